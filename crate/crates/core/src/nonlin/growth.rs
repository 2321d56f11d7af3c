use serde::Serialize;

use super::spec::NonlinearitySpec;

/// Hypothesis flags used by the certificates and the verified theorems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubcriticalityReport {
    pub k: f64,
    pub p: f64,
    pub dim: usize,
    /// ((k+1)N+2)/(N−2), infinite for N = 2.
    #[serde(serialize_with = "crate::report::finite_or_inf")]
    pub bound: f64,
    pub subcritical: bool,
    pub p_gt_k_plus_1: bool,
    pub p_gt_half_k: bool,
    pub k_ge_2: bool,
}

impl SubcriticalityReport {
    /// Inside k/2 < p < bound, where the nodal bound is asserted.
    pub fn in_nodal_window(&self) -> bool {
        self.p_gt_half_k && self.subcritical
    }
}

pub fn critical_bound(k: f64, dim: usize) -> f64 {
    if dim <= 2 {
        f64::INFINITY
    } else {
        ((k + 1.0) * dim as f64 + 2.0) / (dim as f64 - 2.0)
    }
}

pub fn validate_growth(spec: &NonlinearitySpec) -> SubcriticalityReport {
    let k = spec.k_effective();
    let p = spec.p;
    let bound = critical_bound(k, spec.dim);
    SubcriticalityReport {
        k,
        p,
        dim: spec.dim,
        bound,
        subcritical: p > 1.0 && p < bound,
        p_gt_k_plus_1: p > k + 1.0,
        p_gt_half_k: p > 0.5 * k,
        k_ge_2: k >= 2.0,
    }
}
