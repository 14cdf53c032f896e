//! Singular value functions and the symmetric norms built on them.

use ncerg::algebra::{random_operator, AlgebraShape, OperatorKind};
use ncerg::rearrangement::{
    delta2_check, embedding_probe, k_decomposition, majorization_check, mu, norm_axiom_suite, norm_eval, GrowthRegime,
    NormId, OrliczFunction,
};

fn main() -> ncerg::Result<()> {
    let shape = AlgebraShape::new([(2, 2.0), (3, 0.5), (1, 0.125)])?;
    let x = random_operator(&shape, OperatorKind::General, 5)?;

    let m = mu(&x)?;
    println!("μ(x) steps (value, length): {:?}", m.steps());

    let norms = [
        NormId::L1,
        NormId::Linf,
        NormId::L1capLinf,
        NormId::L1plusLinf,
        NormId::Orlicz(OrliczFunction::power(2.0)?),
        NormId::Orlicz(OrliczFunction::exp_minus_one()),
    ];
    for n in &norms {
        let axioms = norm_axiom_suite(n, &shape, 11, 25)?;
        let embed = embedding_probe(n, &shape, 12, 25)?;
        println!(
            "{n:>16}: ‖x‖ = {:.6}  axioms {}  C_lower {:.3} C_upper {:.3}  minimal {}",
            norm_eval(n, &x)?,
            if axioms.all_passed() { "ok" } else { "VIOLATED" },
            embed.c_lower,
            embed.c_upper,
            n.declared_minimal(),
        );
    }

    let (x1, x2) = k_decomposition(&x)?;
    println!(
        "optimal split: ‖x1‖₁ + ‖x2‖∞ = {:.6} = ∫₀¹ μ = {:.6}",
        norm_eval(&NormId::L1, &x1)? + norm_eval(&NormId::Linf, &x2)?,
        m.integral_to(1.0)
    );

    let half = x.scale_real(0.5);
    let r = majorization_check(&half, &x)?;
    println!("x/2 ≺ x: {} (worst margin {:.3e})", r.holds, r.worst_margin);

    for psi in [OrliczFunction::power(3.0)?, OrliczFunction::exp_minus_one()] {
        let near0 = delta2_check(&psi, GrowthRegime::NearZero);
        let near_inf = delta2_check(&psi, GrowthRegime::NearInfinity);
        println!("{psi}: δ₂ {} (ratio {:.3}), Δ₂ {} (ratio {:.3e})",
            near0.passes, near0.worst_ratio, near_inf.passes, near_inf.worst_ratio);
    }
    Ok(())
}
