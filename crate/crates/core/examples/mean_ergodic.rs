//! Cesàro averages of a random kernel, their limit and the Cauchy profile.

use ncerg::algebra::{random_operator, AlgebraShape, OperatorKind};
use ncerg::ergodic::{cauchy_profile, cesaro, default_schedule, mean_limit};
use ncerg::kernels::random::{random_kernel, KernelFamily};
use ncerg::rearrangement::{norm_eval, NormId};

fn main() -> ncerg::Result<()> {
    let shape = AlgebraShape::new([(2, 1.0), (2, 1.0), (3, 0.5)])?;
    let kernel = random_kernel(&shape, KernelFamily::Convex, 21)?;
    let x = random_operator(&shape, OperatorKind::General, 22)?;

    let gap = kernel.spectral_gap()?;
    println!("fixed space dim {}, peripheral spectrum trivial: {} (residual {:.2e})",
        kernel.fixed_space()?.dim(), gap.peripheral_trivial, gap.residual);

    let traj = cesaro(&kernel, &x, &default_schedule())?;
    let limit = mean_limit(&kernel, &x)?;
    println!("τ(x) = {:.6}, τ(x̃) = {:.6}", x.trace(), limit.trace());
    let profile = cauchy_profile(&traj, &NormId::L1plusLinf)?;
    for (n, (d, env)) in profile.indices.iter().zip(profile.to_limit.iter().zip(&profile.tail_envelope)) {
        println!("n = {n:>6}: ‖s_n − x̃‖ = {d:.3e}  tail envelope {env:.3e}");
    }
    println!("triangle violations {}, envelope non-increasing {}",
        profile.triangle_violations(), profile.envelope_non_increasing());
    println!("‖x − x̃‖_(L1+Linf) = {:.3e}", norm_eval(&NormId::L1plusLinf, &x.sub(&limit)?)?);
    Ok(())
}
