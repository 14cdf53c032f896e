//! Projections witnessing bilateral almost-everywhere convergence, a
//! non-convergent sequence that admits none, and the maximal projection.

use ncerg::algebra::{random_operator, AlgebraShape, Operator, OperatorKind};
use ncerg::ergodic::{cesaro, dsae_check, geometric_schedule, maximal_projection, mean_limit, ProjectionWitness};
use ncerg::kernels::KernelRep;

fn main() -> ncerg::Result<()> {
    let shape = AlgebraShape::new([(3, 1.0), (2, 0.01)])?;
    let kernel = KernelRep::full_pinch(&shape);
    let x = random_operator(&shape, OperatorKind::General, 8)?;
    let schedule: Vec<u64> = geometric_schedule(12).into_iter().filter(|&l| l >= 64).collect();

    let avgs = cesaro(&kernel, &x, &schedule)?.averages();
    let limit = mean_limit(&kernel, &x)?;
    let w = dsae_check(&avgs, &limit, 0.05, 0.05)?;
    println!("convergent averages: valid {}, defect {}, achieved {:.3e}, level {:.3e}",
        w.valid, w.defect, w.achieved_bound, w.level);
    w.audit(&ProjectionWitness::differences(&avgs, &limit)?)?;
    println!("witness re-audited exactly");

    let y = Operator::identity(&shape).scale_real(2.0);
    let alternating: Vec<Operator> = (1..=8).map(|n| y.scale_real(if n % 2 == 0 { 1.0 } else { -1.0 })).collect();
    let bad = dsae_check(&alternating, &Operator::zeros(&shape), 0.5, 1.0)?;
    println!("alternating sequence: valid {}, reason: {}", bad.valid, bad.failure.unwrap_or_default());

    let p = random_operator(&shape, OperatorKind::Psd, 9)?.scale_real(5.0);
    let m = maximal_projection(&kernel, &p, 0.5, &geometric_schedule(8))?;
    println!("maximal projection: defect {:.4} ≤ estimate {:.4}, sup ‖E s_l E‖ = {:.4}",
        m.defect, m.budget, m.achieved_bound);
    Ok(())
}
