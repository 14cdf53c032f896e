//! Building positive kernels from each family and certifying them, plus two
//! maps that must be rejected.

use ncerg::algebra::{random_unitary, AlgebraShape};
use ncerg::kernels::random::{random_kernel, KernelFamily};
use ncerg::kernels::{AutomorphismTerm, CombineMode, KernelRep};
use ncerg::linalg::C64;

fn main() -> ncerg::Result<()> {
    let shape = AlgebraShape::diagonal(&[1.0, 1.0, 1.0, 1.0])?;
    for fam in KernelFamily::applicable(&shape) {
        let k = random_kernel(&shape, fam, 3)?;
        let c = k.certify();
        println!(
            "{fam:?}: {} (choi min {:.2e}, unital {:.2e}, subtrace {:.2e}, ‖T‖₂ {:.4}) fixed space dim {}",
            if c.passed() { "certified" } else { "rejected" },
            c.choi_min_eig,
            c.unital_defect,
            c.subtrace_defect,
            c.l2_opnorm,
            k.fixed_space()?.dim(),
        );
    }

    let single = AlgebraShape::single(3, 1.0)?;
    let pinch = KernelRep::full_pinch(&single);
    let twice = KernelRep::from_superoperator(&single, pinch.superoperator().scale(C64::new(1.5, 0.0)))?;
    println!("1.5 × pinching fails {:?}", twice.certify().failed_checks());

    let u = random_unitary(&single, 4);
    let ad = KernelRep::from_automorphisms(&single, vec![AutomorphismTerm { weight: 1.0, unitary: u, block_map: None }])?;
    let mixed = KernelRep::combine(&[ad, pinch], CombineMode::Convex(vec![0.3, 0.7]))?;
    println!("convex mix certified: {}; JSON recipe {} bytes", mixed.certify().passed(), mixed.to_json()?.len());
    Ok(())
}
