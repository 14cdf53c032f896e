//! Block algebras with a weighted trace: products, spectral calculus and
//! projections.

use ncerg::algebra::spectral::positive_pieces;
use ncerg::algebra::{
    eigh, meet_projections, random_operator, spectral_projection, spectral_truncate, svd, AlgebraShape, OperatorKind,
};
use ncerg::linalg::C64;

fn main() -> ncerg::Result<()> {
    // M_3 with weight 1 ⊕ M_2 with weight 1/4
    let shape = AlgebraShape::new([(3, 1.0), (2, 0.25)])?;
    println!("shape {shape}: τ(1) = {}, vectorized dimension {}", shape.total_trace(), shape.vec_dim());

    let x = random_operator(&shape, OperatorKind::General, 1)?;
    let y = random_operator(&shape, OperatorKind::General, 2)?;
    let xy = x.mul(&y)?;
    let yx = y.mul(&x)?;
    println!("τ(xy) = {:.6}, τ(yx) = {:.6}", xy.trace(), yx.trace());

    let sd = svd(&x)?;
    println!("‖x‖∞ = {:.6}; singular values per block {:?}", sd.max_value(), sd.sigma);

    let (tall, flat) = spectral_truncate(&x, 0.5)?;
    println!("truncation at 1/2: ‖flat‖∞ = {:.6}, tall + flat = x up to {:.1e}",
        svd(&flat)?.max_value(), tall.add(&flat)?.sub(&x)?.max_abs());

    let h = x.real_part();
    let e = spectral_projection(&h, 0.0, f64::INFINITY)?;
    println!("projection onto h ≥ 0: ranks {:?}, τ(1 − E) = {}", e.ranks(), e.defect());
    let f = eigh(&y.real_part())?.projection_where(|l| l > -0.5);
    let m = meet_projections(&[e.clone(), f.clone()])?;
    println!("meet: ranks {:?}, defect {} ≤ {} + {}", m.ranks(), m.defect(), e.defect(), f.defect());

    let pieces = positive_pieces(&x)?;
    let back = pieces[0].sub(&pieces[1])?.add(&pieces[2].sub(&pieces[3])?.scale(C64::new(0.0, 1.0)))?;
    println!("x = p0 − p1 + i(p2 − p3) up to {:.1e}", back.sub(&x)?.max_abs());
    Ok(())
}
