//! Closed-form coherent information of the multi-use codes and the capacity
//! lower bounds built on them. All values are in bits.

mod q1;
mod wn;

use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

pub use q1::{ic_diagonal, solve_q1, Q1Solution, DEGENERACY_TOL, Q1_SCAN_POINTS};
pub use wn::{in_asymptotic_region, n_threshold, w_asymptotic, w_n};

use crate::channel::{classify, ChannelParams, Classification};
use crate::error::{Error, Result};
use crate::states::Polarization;
use wn::{ln_pow, ordered, CompensatedSum};

/// Polarization with the larger transmission; ties go to `H`.
pub fn majority(params: ChannelParams) -> Polarization {
    if params.p_h() >= params.p_v() {
        Polarization::H
    } else {
        Polarization::V
    }
}

/// `(ρ_maj, ρ_min)`, with the majority picked by transmission.
fn populations(params: ChannelParams, solution: &Q1Solution) -> (f64, f64) {
    let maj = majority(params);
    (
        solution.state.population(maj),
        solution.state.population(maj.other()),
    )
}

/// `I_c(ρ⁽²⁾, Γ^⊗2) = 2 Q₁ + 2 (1 - p_h - p_v) ρ_HH ρ_VV`.
pub fn ic_rho2(params: ChannelParams, solution: &Q1Solution) -> f64 {
    2.0 * solution.q1
        + 2.0 * (1.0 - params.p_h() - params.p_v()) * solution.state.coherence_weight()
}

/// `I_c(ξ⁽⁴⁾, Γ^⊗4)`.
pub fn ic_xi4(params: ChannelParams, solution: &Q1Solution) -> f64 {
    let (h, v) = (params.p_h(), params.p_v());
    let r = solution.state.coherence_weight();
    4.0 * solution.q1
        + 4.0 * (1.0 - h - v) * r
        + 2.0 * r * r * ((1.0 - h).powi(2) * (1.0 - v).powi(2) - h * h * v * v)
}

/// Per-use gain of the doubled four-qubit code over `Q₁`:
/// `(1 - p_h - p_v) ρ_HH ρ_VV [1 + ½ ρ_HH ρ_VV (1 - p_h - p_v + 2 p_h p_v)]`.
pub fn xi4_benefit(params: ChannelParams, solution: &Q1Solution) -> f64 {
    let (h, v) = (params.p_h(), params.p_v());
    let r = solution.state.coherence_weight();
    (1.0 - h - v) * r * (1.0 + 0.5 * r * (1.0 - h - v + 2.0 * h * v))
}

/// W-state code gain `ρ_maj^(n-1) ρ_min w_n` per channel use.
///
/// Zero for a degenerate one-shot optimum.
pub fn benefit_n(params: ChannelParams, solution: &Q1Solution, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::validation(format!("benefit_n needs n >= 2, got {n}")));
    }
    if solution.degenerate {
        return Ok(0.0);
    }
    let (maj, min) = populations(params, solution);
    let w = w_n(params, n)?;
    Ok((ln_pow(maj, (n - 1) as f64) + min.ln()).exp() * w)
}

/// Entropy change of one erasure block when its `m`-dimensional
/// single-excitation subspace goes from `s/m · I` (product input) to
/// `u·s·|W⟩⟨W| + (1-u)·s/m · I` (W-state input). `ln_s` is `ln s`.
fn block_entropy_change(ln_s: f64, u: f64, m: f64) -> f64 {
    if ln_s == f64::NEG_INFINITY || u == 0.0 || m <= 1.0 {
        return 0.0;
    }
    let top = u.mul_add(m - 1.0, 1.0);
    let rest = if u >= 1.0 {
        0.0
    } else {
        (m - 1.0) * (1.0 - u) * (-u).ln_1p()
    };
    -(ln_s.exp()) * (top * top.ln() + rest) / std::f64::consts::LN_2
}

/// Total entropy change of `Λ_F^⊗(n-k) ⊗ (Tr∘Λ_G)^⊗k` summed over patterns,
/// for transmissions `big` (majority polarization) and `small`.
fn w_code_entropy_change(maj: f64, min: f64, big: f64, small: f64, n: u64) -> f64 {
    let lost_maj = maj * (1.0 - big);
    let lost_any = lost_maj + min * (1.0 - small);
    let ln_ratio = if lost_maj == 0.0 { f64::NEG_INFINITY } else { (lost_maj / lost_any).ln() };
    let mut acc = CompensatedSum::default();
    for k in 0..n.saturating_sub(1) {
        let m = (n - k) as f64;
        let kf = k as f64;
        let ln_s = ln_binomial(n, k)
            + ln_pow(maj, m - 1.0)
            + min.ln()
            + ln_pow(big, m - 1.0)
            + small.ln()
            + ln_pow(lost_any, kf);
        let u = if k == 0 { 1.0 } else { (kf * ln_ratio).exp() };
        acc.add(block_entropy_change(ln_s, u, m));
    }
    acc.value()
}

/// Exact per-use gain `(1/n)[I_c(ρ⁽ⁿ⁾, Γ^⊗n) - I_c((ρ_opt)^⊗n, Γ^⊗n)]` of the
/// W-state code, evaluated block by block.
///
/// In an erasure block with `k` lost photons the single-excitation subspace of
/// the survivors receives a coherent `|W⟩⟨W|` part (all lost photons in the
/// majority polarization) and an incoherent part (some lost photon in the
/// minority polarization). [`benefit_n`] keeps only the coherent part, so the
/// two agree for `n = 2` and differ for `n >= 3`.
pub fn benefit_n_exact(params: ChannelParams, solution: &Q1Solution, n: u64) -> Result<f64> {
    if n < 2 {
        return Err(Error::validation(format!("benefit_n_exact needs n >= 2, got {n}")));
    }
    if solution.degenerate {
        return Ok(0.0);
    }
    let (maj, min) = populations(params, solution);
    let (big, small) = ordered(params);
    let channel = w_code_entropy_change(maj, min, big, small, n);
    let environment = w_code_entropy_change(maj, min, 1.0 - big, 1.0 - small, n);
    Ok((channel - environment) / n as f64)
}

fn check_asymptotic(params: ChannelParams, n: u64) -> Result<()> {
    let n0 = n_threshold(params)?;
    if (n as f64) < 10.0 * n0 {
        return Err(Error::domain(format!(
            "n = {n} is below 10·n₀ = {:.3}; use the exact w_n instead",
            10.0 * n0
        )));
    }
    Ok(())
}

/// `(1 - 2p_min) ρ_maj^(n-1) ρ_min log₂ n`: the large-n gain over `Q₁`.
///
/// Requires `n >= 10·n₀`.
pub fn asymptotic_increment(params: ChannelParams, solution: &Q1Solution, n: u64) -> Result<f64> {
    check_asymptotic(params, n)?;
    if solution.degenerate {
        return Ok(0.0);
    }
    let (maj, min) = populations(params, solution);
    let (_, small) = ordered(params);
    Ok((1.0 - 2.0 * small) * (ln_pow(maj, (n - 1) as f64) + min.ln()).exp() * (n as f64).log2())
}

/// Large-n rate `Q₁ + (1 - 2p_min) ρ_maj^(n-1) ρ_min log₂ n` of the W-state code.
pub fn asymptotic_rate_benefit(params: ChannelParams, solution: &Q1Solution, n: u64) -> Result<f64> {
    Ok(solution.q1 + asymptotic_increment(params, solution, n)?)
}

/// Lower bound on `Q - Q₁` from repeatedly doubling the two-qubit code:
///
/// `(1 - p_h - p_v) Σ_m (ρ_HH ρ_VV)^(2^m) / 2^m · Σ_{k<2^m} a^(2^m-k-1) b^k`
///
/// with `a = (1-p_h)(1-p_v)` and `b = p_h p_v`. Terms whose prefactor drops
/// below `1e-300` end the sum.
pub fn doubling_series_bound(params: ChannelParams, solution: &Q1Solution, m_max: u32) -> f64 {
    let (h, v) = (params.p_h(), params.p_v());
    let r = solution.state.coherence_weight();
    if r == 0.0 {
        return 0.0;
    }
    let a = (1.0 - h) * (1.0 - v);
    let b = h * v;
    let mut total = CompensatedSum::default();
    for m in 0..=m_max.min(62) {
        let len = 1u64 << m;
        let prefactor = (len as f64 * r.ln()).exp() / len as f64;
        if prefactor < 1e-300 {
            break;
        }
        let mut inner = CompensatedSum::default();
        for k in 0..len {
            inner.add((ln_pow(a, (len - k - 1) as f64) + ln_pow(b, k as f64)).exp());
        }
        total.add(prefactor * inner.value());
    }
    (1.0 - h - v) * total.value()
}

/// Superadditivity verdict of the `n`-qubit W-state code at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperadditivityReport {
    pub params: ChannelParams,
    pub n: u64,
    pub classification: Classification,
    pub q1: f64,
    pub w_n: f64,
    pub benefit: f64,
    pub qn_lower: f64,
    pub superadditive: bool,
}

pub fn superadditivity_report(params: ChannelParams, n: u64) -> Result<SuperadditivityReport> {
    let solution = solve_q1(params);
    superadditivity_report_with(params, &solution, n)
}

/// Same as [`superadditivity_report`] with a precomputed one-shot optimum.
pub fn superadditivity_report_with(
    params: ChannelParams,
    solution: &Q1Solution,
    n: u64,
) -> Result<SuperadditivityReport> {
    let classification = classify(params);
    let w = w_n(params, n)?;
    let benefit = if n >= 2 { benefit_n(params, solution, n)? } else { 0.0 };
    let superadditive = !classification.is_antidegradable() && w > 0.0 && benefit > 0.0;
    Ok(SuperadditivityReport {
        params,
        n,
        classification,
        q1: solution.q1,
        w_n: w,
        benefit,
        qn_lower: solution.q1 + benefit.max(0.0),
        superadditive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::DiagonalQubitState;

    fn params(h: f64, v: f64) -> ChannelParams {
        ChannelParams::new(h, v).unwrap()
    }

    fn fixed_solution(q: f64, q1: f64) -> Q1Solution {
        Q1Solution {
            state: DiagonalQubitState::from_hh(q).unwrap(),
            q1,
            degenerate: q == 0.0 || q == 1.0,
        }
    }

    #[test]
    fn rho2_on_the_antidiagonal() {
        let p = params(0.7, 0.3);
        let s = solve_q1(p);
        assert!((ic_rho2(p, &s) - 2.0 * s.q1).abs() < 1e-16);
        let d = fixed_solution(1.0, 0.0);
        assert_eq!(ic_rho2(params(0.7, 0.2), &d), 0.0);
    }

    #[test]
    fn two_use_benefit_matches_rho2() {
        for (h, v) in [(0.7, 0.2), (0.6, 0.1), (0.2, 0.9)] {
            let p = params(h, v);
            let s = solve_q1(p);
            let via_rho2 = (ic_rho2(p, &s) - 2.0 * s.q1) / 2.0;
            assert!((benefit_n(p, &s, 2).unwrap() - via_rho2).abs() < 1e-14);
            assert!((benefit_n_exact(p, &s, 2).unwrap() - via_rho2).abs() < 1e-14);
        }
    }

    #[test]
    fn xi4_at_self_complementary_point() {
        let s = fixed_solution(0.3, 0.0);
        let p = params(0.5, 0.5);
        assert!((ic_xi4(p, &s) - 4.0 * s.q1).abs() < 1e-16);
    }

    #[test]
    fn xi4_benefit_is_the_quarter_rate_gain() {
        for (h, v) in [(0.7, 0.2), (0.8, 0.05), (0.3, 0.6)] {
            let p = params(h, v);
            let s = solve_q1(p);
            assert!((ic_xi4(p, &s) / 4.0 - s.q1 - xi4_benefit(p, &s)).abs() < 1e-15);
        }
    }

    #[test]
    fn degenerate_solutions_short_circuit() {
        let p = params(0.4, 0.3);
        let s = solve_q1(p);
        assert!(s.degenerate);
        assert_eq!(benefit_n(p, &s, 5).unwrap(), 0.0);
        assert_eq!(benefit_n_exact(p, &s, 5).unwrap(), 0.0);
        assert_eq!(doubling_series_bound(p, &s, 4), 0.0);
        assert!(benefit_n(p, &s, 1).is_err());
    }

    #[test]
    fn doubling_series_first_terms() {
        for (h, v) in [(0.7, 0.2), (0.6, 0.1), (0.75, 0.75)] {
            let p = params(h, v);
            let s = solve_q1(p);
            let r = s.state.coherence_weight();
            assert!((doubling_series_bound(p, &s, 0) - (1.0 - h - v) * r).abs() < 1e-16);
            assert!((doubling_series_bound(p, &s, 1) - xi4_benefit(p, &s)).abs() < 1e-16);
        }
    }

    #[test]
    fn doubling_series_converges_quickly() {
        let p = params(0.7, 0.2);
        let s = fixed_solution(0.5, 0.0);
        let six = doubling_series_bound(p, &s, 6);
        let many = doubling_series_bound(p, &s, 40);
        assert!((six - many).abs() < 1e-18);
        // huge m_max terminates through the underflow cutoff
        assert_eq!(doubling_series_bound(p, &s, u32::MAX), many);
    }

    #[test]
    fn asymptotic_benefit_domain() {
        let p = params(0.7, 0.2);
        let s = solve_q1(p);
        assert!(asymptotic_rate_benefit(p, &s, 10).is_err());
        assert!(asymptotic_rate_benefit(params(0.7, 0.6), &s, 10_000).is_err());
        assert!(asymptotic_rate_benefit(p, &s, 10_000).unwrap() > 0.0);
    }

    #[test]
    fn report_invariants() {
        for (h, v, n) in [(0.7, 0.2, 4), (0.3, 0.4, 5), (0.7, 0.3, 3), (0.6, 0.7, 10), (0.7, 0.2, 1)] {
            let r = superadditivity_report(params(h, v), n).unwrap();
            assert_eq!(r.qn_lower, r.q1 + r.benefit.max(0.0));
            assert_eq!(
                r.superadditive,
                !r.classification.is_antidegradable() && r.w_n > 0.0 && r.benefit > 0.0
            );
        }
        let r = superadditivity_report(params(0.3, 0.4), 5).unwrap();
        assert_eq!(r.classification, Classification::Antidegradable);
        assert_eq!(r.benefit, 0.0);
        assert!(!r.superadditive);
    }
}
