use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraShape, Operator};
use crate::linalg::{eigh, svd, CMat};

/// Threshold on every certified defect.
pub const CERTIFY_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }
}

/// Exact checks of complete positivity, `T(1) ≤ 1` and `T†(1) ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certification {
    /// Smallest eigenvalue over the Choi matrices of all block pairs.
    pub choi_min_eig: f64,
    /// Largest entrywise `|C − C*|`; nonzero means `T` does not preserve adjoints.
    pub choi_hermiticity_defect: f64,
    /// Largest eigenvalue of `T(1) − 1`.
    pub unital_defect: f64,
    /// Largest eigenvalue of `T†(1) − 1`.
    pub subtrace_defect: f64,
    /// Operator norm on `L₂(τ)`.
    pub l2_opnorm: f64,
    pub verdict: Verdict,
}

impl Certification {
    /// Names of the checks that failed: `choi`, `unital`, `subtrace`.
    pub fn failed_checks(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !(self.choi_min_eig >= -CERTIFY_TOLERANCE
            && self.choi_hermiticity_defect <= CERTIFY_TOLERANCE)
        {
            out.push("choi");
        }
        if !(self.unital_defect <= CERTIFY_TOLERANCE) {
            out.push("unital");
        }
        if !(self.subtrace_defect <= CERTIFY_TOLERANCE) {
            out.push("subtrace");
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass()
    }
}

/// Per-entry block weights in the vectorization order.
pub(crate) fn entry_weights(shape: &AlgebraShape) -> Vec<f64> {
    shape
        .blocks()
        .iter()
        .flat_map(|b| std::iter::repeat_n(b.weight, b.dim * b.dim))
        .collect()
}

/// `W⁻¹ Mᴴ W`, the superoperator of `T†` with `τ(T(x) y*) = τ(x T†(y)*)`.
pub(crate) fn trace_adjoint(shape: &AlgebraShape, m: &CMat) -> CMat {
    let w = entry_weights(shape);
    CMat::from_fn(m.dim(), |i, j| m[(j, i)].conj() * (w[j] / w[i]))
}

/// `W^{1/2} M W^{-1/2}`, unitarily equivalent to `M` on `L₂(τ)`.
pub(crate) fn balanced(shape: &AlgebraShape, m: &CMat) -> CMat {
    let w = entry_weights(shape);
    CMat::from_fn(m.dim(), |i, j| m[(i, j)] * (w[i] / w[j]).sqrt())
}

fn max_eig_minus_one(x: &Operator) -> f64 {
    let h = Operator::from_blocks(
        x.shape(),
        x.blocks().iter().map(CMat::hermitian_part).collect(),
    );
    let Ok(h) = h else { return f64::NAN };
    match crate::algebra::eigh(&h) {
        Ok(sd) => sd.max_value() - 1.0,
        Err(_) => f64::NAN,
    }
}

pub(crate) fn certify(shape: &AlgebraShape, m: &CMat) -> Certification {
    let offsets = shape.vec_offsets();
    let dims: Vec<usize> = shape.dims().collect();
    let mut choi_min = f64::INFINITY;
    let mut herm = 0.0f64;
    let mut solver_failed = false;
    for (k, &dk) in dims.iter().enumerate() {
        for (l, &dl) in dims.iter().enumerate() {
            // C[(i,a),(j,b)] = T(E^k_ij)_l[a,b]
            let c = CMat::from_fn(dk * dl, |r, s| {
                let (i, a) = (r / dl, r % dl);
                let (j, b) = (s / dl, s % dl);
                m[(offsets[l] + a * dl + b, offsets[k] + i * dk + j)]
            });
            herm = herm.max(c.hermitian_defect());
            match eigh(&c.hermitian_part()) {
                Ok(e) => choi_min = choi_min.min(e.values.last().copied().unwrap_or(0.0)),
                Err(_) => solver_failed = true,
            }
        }
    }
    if solver_failed {
        choi_min = f64::NAN;
    }
    let one = Operator::identity(shape).to_vec();
    let apply = |mat: &CMat| -> f64 {
        match Operator::from_vec(shape, &mat.matvec(&one)) {
            Ok(t1) => max_eig_minus_one(&t1),
            Err(_) => f64::NAN,
        }
    };
    let unital_defect = apply(m);
    let subtrace_defect = apply(&trace_adjoint(shape, m));
    let l2_opnorm = match svd(&balanced(shape, m)) {
        Ok(s) => s.sigma.first().copied().unwrap_or(0.0),
        Err(_) => f64::NAN,
    };
    let mut cert = Certification {
        choi_min_eig: choi_min,
        choi_hermiticity_defect: herm,
        unital_defect,
        subtrace_defect,
        l2_opnorm,
        verdict: Verdict::Fail,
    };
    cert.verdict = Verdict::from_bool(cert.failed_checks().is_empty());
    cert
}
