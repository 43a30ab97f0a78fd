//! Closed forms checked against the dense spectral oracle.

use clap::ValueEnum;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::channel::{
    apply_gamma_complement, apply_tensor_power, apply_tensor_power_blocked, classify,
    coherent_information_dense, complement_via_gram, kraus_operators, ChannelParams,
};
use crate::closedform::{benefit_n, benefit_n_exact, ic_rho2, ic_xi4, majority, solve_q1, w_n, Q1Solution};
use crate::error::Result;
use crate::qmatrix::{spectral_entropy, von_neumann_entropy};
use crate::states::{rho2, rho_n, xi4};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyLevel {
    /// Oracle checks up to three channel uses.
    Fast,
    /// Adds the four-use dense and blocked cross-checks.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const ORACLE_TOL: f64 = 1e-9;
const RANDOM_POINTS: usize = 5;

/// Random parameter points whose one-shot optimum is a mixed state.
fn sample_points(rng: &mut ChaCha8Rng, count: usize) -> Vec<(ChannelParams, Q1Solution)> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let params = ChannelParams::new(rng.random_range(0.05..0.95), rng.random_range(0.05..0.95))
            .expect("sampled inside [0, 1]");
        let s = solve_q1(params);
        if !s.degenerate && !classify(params).is_antidegradable() {
            out.push((params, s));
        }
    }
    out
}

/// Largest `|closed form - oracle|` over the points, with the worst point.
fn worst(
    points: &[(ChannelParams, Q1Solution)],
    check: impl Fn(ChannelParams, &Q1Solution) -> Result<(f64, f64)>,
) -> Result<(f64, String)> {
    let mut max = 0.0f64;
    let mut at = String::from("-");
    for (p, s) in points {
        let (closed, oracle) = check(*p, s)?;
        let err = (closed - oracle).abs();
        if err > max || err.is_nan() {
            max = err;
            at = format!("{p}: closed form {closed:.6e}, oracle {oracle:.6e}");
        }
    }
    Ok((max, at))
}

fn outcome(name: &'static str, result: Result<(f64, String)>, tol: f64) -> CheckOutcome {
    match result {
        Ok((err, at)) => CheckOutcome {
            name,
            passed: err <= tol,
            detail: format!("max error {err:.3e} (tol {tol:.0e}); worst at {at}"),
        },
        Err(e) => CheckOutcome {
            name,
            passed: false,
            detail: e.to_string(),
        },
    }
}

fn w_code_check(
    points: &[(ChannelParams, Q1Solution)],
    n: usize,
    closed: fn(ChannelParams, &Q1Solution, u64) -> Result<f64>,
) -> Result<(f64, String)> {
    worst(points, |p, s| {
        let rho = rho_n(s.state, n, majority(p))?;
        let oracle = coherent_information_dense(p, &rho)? / n as f64 - s.q1;
        Ok((closed(p, s, n as u64)?, oracle))
    })
}

fn blocked_vs_dense(points: &[(ChannelParams, Q1Solution)], n: usize) -> Result<(f64, String)> {
    worst(points, |p, s| {
        let rho = rho_n(s.state, n, majority(p))?;
        let dense = von_neumann_entropy(&apply_tensor_power(p, &rho, false)?)?;
        let blocks = apply_tensor_power_blocked(p, &rho, false)?;
        let blocked: f64 = blocks.iter().map(|b| b.entropy()).sum();
        Ok((blocked, dense))
    })
}

fn kraus_completeness(points: &[(ChannelParams, Q1Solution)]) -> Result<(f64, String)> {
    worst(points, |p, _| {
        let sum = kraus_operators(p)
            .iter()
            .fold(DMatrix::<Complex64>::zeros(2, 2), |acc, k| acc + k.adjoint() * k);
        let dev = (sum - DMatrix::identity(2, 2)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        Ok((dev, 0.0))
    })
}

fn gram_complement(points: &[(ChannelParams, Q1Solution)]) -> Result<(f64, String)> {
    worst(points, |p, s| {
        let rho = s.state.density();
        let gram = spectral_entropy(&complement_via_gram(p, &rho)?.eigenvalues());
        let direct = spectral_entropy(&apply_gamma_complement(p, &rho)?.eigenvalues());
        Ok((gram, direct))
    })
}

fn w2_identity() -> Result<(f64, String)> {
    let mut max = 0.0f64;
    let mut at = String::from("-");
    for i in 0..=100 {
        for j in 0..=100 {
            let p = ChannelParams::new(i as f64 / 100.0, j as f64 / 100.0)?;
            let err = (w_n(p, 2)? - (1.0 - p.p_h() - p.p_v())).abs();
            if err > max {
                max = err;
                at = p.to_string();
            }
        }
    }
    Ok((max, at))
}

/// Runs the suite for `level`; points are drawn from a generator seeded with `seed`.
pub fn run_checks(level: VerifyLevel, seed: u64) -> Vec<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = sample_points(&mut rng, RANDOM_POINTS);

    let mut out = vec![
        outcome("kraus_completeness", kraus_completeness(&points), 1e-12),
        outcome("w2_identity", w2_identity(), 1e-12),
        outcome(
            "ic_rho2_vs_oracle",
            worst(&points, |p, s| Ok((ic_rho2(p, s), coherent_information_dense(p, &rho2(s.state))?))),
            ORACLE_TOL,
        ),
        outcome("w_code_n3_block_sum_vs_oracle", w_code_check(&points, 3, benefit_n_exact), ORACLE_TOL),
        outcome("w_code_n3_benefit_vs_oracle", w_code_check(&points, 3, benefit_n), ORACLE_TOL),
        outcome("blocked_vs_dense_n3", blocked_vs_dense(&points, 3), ORACLE_TOL),
    ];
    if level == VerifyLevel::Full {
        out.extend([
            outcome("blocked_vs_dense_n4", blocked_vs_dense(&points, 4), ORACLE_TOL),
            outcome(
                "ic_xi4_vs_oracle",
                worst(&points, |p, s| Ok((ic_xi4(p, s), coherent_information_dense(p, &xi4(s.state))?))),
                ORACLE_TOL,
            ),
            outcome("w_code_n4_block_sum_vs_oracle", w_code_check(&points, 4, benefit_n_exact), ORACLE_TOL),
            outcome("w_code_n4_benefit_vs_oracle", w_code_check(&points, 4, benefit_n), ORACLE_TOL),
            outcome("gram_complement_entropy", gram_complement(&points), 1e-12),
        ]);
    }
    out
}
