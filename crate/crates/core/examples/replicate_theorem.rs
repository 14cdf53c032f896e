//! Level-by-level replication of the bilateral convergence argument on an
//! algebra with one heavy block and two light ones.

use std::time::Instant;

use ncerg::algebra::{random_operator, AlgebraShape, OperatorKind};
use ncerg::ergodic::replicate_theorem;
use ncerg::kernels::random::{random_kernel, KernelFamily};

fn main() -> ncerg::Result<()> {
    let shape = AlgebraShape::new([(4, 16384.0), (2, 2f64.powi(-20)), (2, 2f64.powi(-40))])?;
    let kernel = random_kernel(&shape, KernelFamily::Convex, 7)?;
    let x = random_operator(&shape, OperatorKind::General, 3)?;

    let start = Instant::now();
    let report = replicate_theorem(&kernel, &x, 4, 1e-9)?;
    println!("replicated 4 levels in {:.2?}", start.elapsed());

    for level in &report.levels {
        let e2 = &level.projections["E2n"];
        println!(
            "n={} l(n)={:?} defect(E2n)={:.3e} final={:.3e} (limit {:.3e}) {}",
            level.n,
            level.l_n,
            e2.defect(),
            level.check("final").map_or(f64::NAN, |c| c.achieved),
            level.check("final").map_or(f64::NAN, |c| c.limit),
            if level.passed() { "pass" } else { "FAIL" },
        );
        for c in level.checks.iter().filter(|c| !c.pass) {
            println!("    failed {}: {:e} vs {:e}", c.name, c.achieved, c.limit);
        }
        if let Some(f) = &level.failure {
            println!("    {f}");
        }
    }

    let start = Instant::now();
    report.audit()?;
    println!("audit reproduced every check bit for bit in {:.2?}", start.elapsed());
    Ok(())
}
