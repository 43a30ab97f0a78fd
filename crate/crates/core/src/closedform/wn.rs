//! The `w_n` superadditivity criterion, its large-n asymptotics, and the
//! block length at which the asymptotic criterion turns positive.

use statrs::function::factorial::ln_binomial;

use crate::channel::ChannelParams;
use crate::error::{Error, Result};

/// Transmission of the better-transmitted polarization first. Ties go to `H`.
pub(crate) fn ordered(params: ChannelParams) -> (f64, f64) {
    if params.p_h() >= params.p_v() {
        (params.p_h(), params.p_v())
    } else {
        (params.p_v(), params.p_h())
    }
}

/// `ln(x^k)` with `0^0 = 1`.
pub(crate) fn ln_pow(x: f64, k: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * x.ln()
    }
}

/// Neumaier-compensated sum.
#[derive(Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// `w_n(p_h, p_v)` in bits:
///
/// `Σ_k C(n-1, k) (1-P)^(n-k-1) P^k [(1-p) log₂(n-k) - p log₂(k+1)]`
///
/// where `P` is the larger transmission and `p` the smaller one.
pub fn w_n(params: ChannelParams, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::validation("w_n needs n >= 1"));
    }
    let (big, small) = ordered(params);
    let (ln_stay, ln_lose) = (big.ln(), (-big).ln_1p());
    let ln_weight = |k: u64| {
        let lost = (n - k - 1) as f64;
        let kept = k as f64;
        ln_binomial(n - 1, k)
            + if lost == 0.0 { 0.0 } else { lost * ln_lose }
            + if kept == 0.0 { 0.0 } else { kept * ln_stay }
    };
    let term = |k: u64, ln_w: f64| {
        let bracket = (1.0 - small) * ((n - k) as f64).log2() - small * ((k + 1) as f64).log2();
        ln_w.exp() * bracket
    };

    let mut acc = CompensatedSum::default();
    if n <= FULL_SUM_MAX_N {
        for k in 0..n {
            acc.add(term(k, ln_weight(k)));
        }
        return Ok(acc.value());
    }

    // The binomial weights are unimodal: walk outward from the mode and stop
    // once a weight falls below e^-TAIL_LN_CUTOFF of the peak.
    let mode = (((n - 1) as f64) * big).floor() as u64;
    let mode = mode.min(n - 1);
    let floor = ln_weight(mode) - TAIL_LN_CUTOFF;
    acc.add(term(mode, ln_weight(mode)));
    for k in mode + 1..n {
        let ln_w = ln_weight(k);
        if ln_w < floor {
            break;
        }
        acc.add(term(k, ln_w));
    }
    for k in (0..mode).rev() {
        let ln_w = ln_weight(k);
        if ln_w < floor {
            break;
        }
        acc.add(term(k, ln_w));
    }
    Ok(acc.value())
}

/// Block lengths up to this sum every binomial term.
const FULL_SUM_MAX_N: u64 = 1000;
/// Relative weight `e^-50 ≈ 2e-22` below which tail terms are dropped.
const TAIL_LN_CUTOFF: f64 = 50.0;

fn strictly_ordered(params: ChannelParams) -> Result<(f64, f64)> {
    let (big, small) = ordered(params);
    if big == small {
        return Err(Error::domain("asymptotic w_n needs p_h != p_v"));
    }
    if !(small > 0.0 && big < 1.0) {
        return Err(Error::domain(format!(
            "asymptotic w_n needs both transmissions in (0, 1), got {params}"
        )));
    }
    Ok((big, small))
}

/// `(1 - 2p) log₂ n + (1 - p) log₂(1 - P) - p log₂ P` with `P > p`.
pub fn w_asymptotic(params: ChannelParams, n: f64) -> Result<f64> {
    let (big, small) = strictly_ordered(params)?;
    Ok((1.0 - 2.0 * small) * n.log2() + (1.0 - small) * (1.0 - big).log2() - small * big.log2())
}

/// True when `0 < p < 1/2 < P < 1`: neither degradable nor antidegradable.
pub fn in_asymptotic_region(params: ChannelParams) -> bool {
    let (big, small) = ordered(params);
    0.0 < small && small < 0.5 && 0.5 < big && big < 1.0
}

/// Root `n₀` of [`w_asymptotic`]: `(P^p / (1-P)^(1-p))^(1/(1-2p))`.
pub fn n_threshold(params: ChannelParams) -> Result<f64> {
    if !in_asymptotic_region(params) {
        return Err(Error::domain(format!(
            "n_threshold needs 0 < p_min < 1/2 < p_max < 1, got {params}"
        )));
    }
    let (big, small) = ordered(params);
    let ln_base = small * big.ln() - (1.0 - small) * (-big).ln_1p();
    Ok((ln_base / (1.0 - 2.0 * small)).exp())
}
