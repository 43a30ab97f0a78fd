//! One-shot coherent information of diagonal inputs and its maximization.

use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::qmatrix::spectral_entropy;
use crate::states::DiagonalQubitState;

/// Points in the coarse scan that seeds the golden-section refinement.
pub const Q1_SCAN_POINTS: usize = 1001;
/// Optima with `ρ_HH` or `ρ_VV` below this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// One-shot values at or below this are treated as zero.
const ZERO_VALUE_TOL: f64 = 1e-14;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Q1Solution {
    pub state: DiagonalQubitState,
    /// One-shot capacity in bits, never negative.
    pub q1: f64,
    /// True when the optimal input is pure (`ρ_HH ρ_VV = 0`).
    pub degenerate: bool,
}

/// `I_c(diag(q, 1-q), Γ)` in bits from the closed-form output spectra.
///
/// `q` is clamped to `[0, 1]`.
pub fn ic_diagonal(params: ChannelParams, q: f64) -> f64 {
    let q = q.clamp(0.0, 1.0);
    let (h, v) = (params.p_h(), params.p_v());
    let r = 1.0 - q;
    let out = [h * q, v * r, (1.0 - h) * q + (1.0 - v) * r];
    let env = [(1.0 - h) * q, (1.0 - v) * r, h * q + v * r];
    spectral_entropy(&out) - spectral_entropy(&env)
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes [`ic_diagonal`] over `q ∈ [0, 1]`.
///
/// The search runs on the orientation with `p_h >= p_v` and mirrors the result
/// back, so `solve_q1(p_h, p_v)` and `solve_q1(p_v, p_h)` are exact mirror images.
pub fn solve_q1(params: ChannelParams) -> Q1Solution {
    if params.p_h() < params.p_v() {
        let s = solve_q1(params.swapped());
        return Q1Solution {
            state: s.state.swapped(),
            ..s
        };
    }
    let f = |q: f64| ic_diagonal(params, q);
    let last = Q1_SCAN_POINTS - 1;
    let (best_i, _) = (0..Q1_SCAN_POINTS)
        .map(|i| (i, f(i as f64 / last as f64)))
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });

    let lo = best_i.saturating_sub(1) as f64 / last as f64;
    let hi = (best_i + 1).min(last) as f64 / last as f64;
    let (mut q, mut value) = golden_section_max(f, lo, hi, 1e-13);
    for edge in [lo, hi, best_i as f64 / last as f64] {
        let fe = f(edge);
        if fe > value {
            q = edge;
            value = fe;
        }
    }

    if value <= ZERO_VALUE_TOL {
        return Q1Solution {
            state: DiagonalQubitState::from_hh(1.0).expect("pure state"),
            q1: 0.0,
            degenerate: true,
        };
    }
    let degenerate = !(DEGENERACY_TOL..=1.0 - DEGENERACY_TOL).contains(&q);
    Q1Solution {
        state: DiagonalQubitState::from_hh(q).expect("q lies in [0, 1]"),
        q1: value,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(h: f64, v: f64) -> ChannelParams {
        ChannelParams::new(h, v).unwrap()
    }

    #[test]
    fn pure_inputs_carry_nothing() {
        for (h, v) in [(0.7, 0.2), (0.1, 0.9), (0.5, 0.5)] {
            assert_eq!(ic_diagonal(params(h, v), 0.0), 0.0);
            assert_eq!(ic_diagonal(params(h, v), 1.0), 0.0);
        }
    }

    #[test]
    fn erasure_identity() {
        for p in [0.1, 0.35, 0.6, 0.9] {
            assert!((ic_diagonal(params(p, p), 0.5) - (2.0 * p - 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn antidegradable_point_is_degenerate() {
        let s = solve_q1(params(0.4, 0.3));
        assert_eq!(s.q1, 0.0);
        assert!(s.degenerate);
        let s = solve_q1(params(0.9, 0.0));
        assert!(s.degenerate && s.q1 == 0.0);
    }

    #[test]
    fn self_complementary_point_has_zero_capacity() {
        let s = solve_q1(params(0.5, 0.5));
        assert_eq!(s.q1, 0.0);
        assert!(s.degenerate);
    }

    #[test]
    fn symmetric_erasure_optimum() {
        let s = solve_q1(params(0.75, 0.75));
        assert!((s.q1 - 0.5).abs() < 1e-12);
        assert!((s.state.rho_hh() - 0.5).abs() < 1e-6);
        assert!(!s.degenerate);
    }

    #[test]
    fn mirror_symmetry_is_exact() {
        for (h, v) in [(0.7, 0.2), (0.93, 0.41), (0.55, 0.8)] {
            let a = solve_q1(params(h, v));
            let b = solve_q1(params(v, h));
            assert_eq!(a.q1, b.q1);
            assert_eq!(a.state.rho_hh(), b.state.rho_vv());
            assert_eq!(a.state.rho_vv(), b.state.rho_hh());
        }
    }

    #[test]
    fn pure_optimum_outside_antidegradable_region() {
        // near pure V, I_c ~ (2 p_h - 1) q log(1/q): positive, but the optimum
        // sits below the degeneracy cutoff and carries almost nothing
        let s = solve_q1(params(0.51, 0.3));
        assert!(s.degenerate);
        assert!(s.q1 >= 0.0 && s.q1 < 1e-10);
    }

    #[test]
    fn repeated_solves_agree() {
        let a = solve_q1(params(0.7, 0.2));
        let b = solve_q1(params(0.7, 0.2));
        assert_eq!(a, b);
    }

    #[test]
    fn nondegenerate_means_positive() {
        for (h, v) in [(0.7, 0.2), (0.9, 0.6), (0.2, 0.95)] {
            let s = solve_q1(params(h, v));
            assert!(s.degenerate || s.q1 > 0.0, "{h} {v}");
            assert!(!s.degenerate, "non-antidegradable point {h} {v} should be nondegenerate");
        }
    }
}
