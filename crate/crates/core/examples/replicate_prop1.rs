//! Level-by-level norm convergence for a pinching and a random unitary
//! mixture, with the self-audit.

use ncerg::algebra::{random_operator, AlgebraShape, OperatorKind};
use ncerg::ergodic::replicate_prop1;
use ncerg::kernels::random::{random_kernel, KernelFamily};
use ncerg::kernels::KernelRep;

fn main() -> ncerg::Result<()> {
    let shape = AlgebraShape::new([(3, 1.0), (2, 0.5)])?;
    let x = random_operator(&shape, OperatorKind::General, 4)?;
    let kernels = [
        ("full pinch", KernelRep::full_pinch(&shape)),
        ("unitary mixture", random_kernel(&shape, KernelFamily::UnitaryMixture, 5)?),
    ];
    for (name, k) in &kernels {
        let report = replicate_prop1(k, &x, 8, 1e-9)?;
        println!("{name}: {}", if report.passed() { "all levels pass" } else { "FAILED" });
        for level in &report.levels {
            let a = level.check("assembled");
            println!(
                "  n={} l(n)={:?} assembled {:.3e} ≤ {:.3e}",
                level.n,
                level.l_n,
                a.map_or(f64::NAN, |c| c.achieved),
                a.map_or(f64::NAN, |c| c.limit),
            );
            if let Some(f) = &level.failure {
                println!("    {f}");
            }
        }
        report.audit()?;
    }
    Ok(())
}
