use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn n_f64(m: usize) -> f64 {
    (1u64 << m) as f64
}

/// Second eigenvalue of `Q1`, `(N² - 4) / (4(N² - 1))`.
pub fn lambda_q1(m: usize) -> f64 {
    let n = n_f64(m);
    (n * n - 4.0) / (4.0 * (n * n - 1.0))
}

/// Analytic bound `λ_{Q0} < (N² - 4 + 3N√(2N)) / (4(N² - 1))`.
pub fn lambda_q0_bound(m: usize) -> f64 {
    let n = n_f64(m);
    (n * n - 4.0 + 3.0 * n * (2.0 * n).sqrt()) / (4.0 * (n * n - 1.0))
}

/// Smallest stationary mass of the edge chain, `2 / (N² - 4)`.
pub fn pi_star(m: usize) -> f64 {
    let n = n_f64(m);
    2.0 / (n * n - 4.0)
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::Epsilon(eps))
    }
}

fn check_m(m: usize) -> Result<()> {
    if (2..=16).contains(&m) {
        Ok(())
    } else {
        Err(Error::DegreeOutOfRange(m))
    }
}

/// `τ(ε) ≤ ⌈(1/Δ) ln(1/(π* ε))⌉` with `Δ = 1 - λ_{Q0}` bound. Accepts any
/// `ε > 0`, including the tiny targets used for design accuracy.
pub fn tau_bound(m: usize, eps: f64) -> Result<u64> {
    check_m(m)?;
    if !(eps > 0.0) {
        return Err(Error::Epsilon(eps));
    }
    let delta = 1.0 - lambda_q0_bound(m);
    Ok(((1.0 / (pi_star(m) * eps)).ln() / delta).ceil().max(1.0) as u64)
}

/// Steps for the orbit chain to come within `ε / N³` of stationarity:
/// `⌈(1/Δ) ln(N³ (N² - 4) / (2ε))⌉`.
pub fn mixing_time_bound(m: usize, eps: f64) -> Result<u64> {
    check_m(m)?;
    check_epsilon(eps)?;
    tau_bound(m, eps / n_f64(m).powi(3))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixingReport {
    pub m: usize,
    pub epsilon: f64,
    pub lambda_q0_bound: f64,
    pub gap_bound: f64,
    pub pi_star: f64,
    /// Emitted bound, using the exact analytic `λ_{Q0}` bound.
    pub t_bound: u64,
    /// Same formula with `1/Δ` replaced by its large-`N` limit `4/3`.
    pub t_asymptotic: u64,
    pub lambda2_numerical: Option<f64>,
    /// Bound evaluated with the numerically computed gap, for comparison.
    pub t_numerical: Option<u64>,
}

pub fn mixing_report(m: usize, eps: f64, numerical_gap: Option<(f64, f64)>) -> Result<MixingReport> {
    let t_bound = mixing_time_bound(m, eps)?;
    let n = n_f64(m);
    let log_term = (n.powi(3) / (pi_star(m) * eps)).ln();
    Ok(MixingReport {
        m,
        epsilon: eps,
        lambda_q0_bound: lambda_q0_bound(m),
        gap_bound: 1.0 - lambda_q0_bound(m),
        pi_star: pi_star(m),
        t_bound,
        t_asymptotic: (log_term * 4.0 / 3.0).ceil() as u64,
        lambda2_numerical: numerical_gap.map(|(l2, _)| l2),
        t_numerical: numerical_gap.map(|(_, gap)| (log_term / gap).ceil() as u64),
    })
}
