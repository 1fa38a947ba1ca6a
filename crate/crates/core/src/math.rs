//! Closed-form ratio functions and the bracketed solvers behind them.
//!
//! Every transcendental or algebraic equation used by the mechanisms is
//! monotone on its search interval, so plain bisection with automatic bracket
//! expansion is used throughout.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Mean and an upper bound on the standard deviation of a value distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentInfo {
    pub mu: f64,
    pub sigma: f64,
}

impl MomentInfo {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(domain(format!(
                "mean must be positive and finite, got {mu}"
            )));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(domain(format!(
                "standard deviation must be nonnegative and finite, got {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    /// Coefficient of variation `sigma / mu`.
    pub fn cv(&self) -> f64 {
        self.sigma / self.mu
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }

    /// Both moments multiplied by `t > 0`.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.mu * t, self.sigma * t)
    }
}

/// Termination settings for the bisection solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub max_iterations: usize,
}

impl SolverConfig {
    pub fn new(abs_tol: f64, max_iterations: usize) -> Result<Self> {
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(domain(format!("abs_tol must be positive, got {abs_tol}")));
        }
        if max_iterations == 0 {
            return Err(domain("max_iterations must be at least 1"));
        }
        Ok(Self {
            abs_tol,
            max_iterations,
        })
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iterations: 200,
        }
    }
}

/// Bisection on `[lo, hi]` for a continuous `f` whose endpoint values differ in sign.
///
/// Stops once the bracket is narrower than `cfg.abs_tol` or cannot be split any
/// further in floating point, and returns the bracket midpoint.
pub fn bisect<F>(f: F, mut lo: f64, mut hi: f64, cfg: &SolverConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::Solver(format!("invalid bracket [{lo}, {hi}]")));
    }
    let f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::Solver(format!(
            "no sign change on [{lo}, {hi}]: f(lo)={f_lo}, f(hi)={f_hi}"
        )));
    }
    let lo_negative = f_lo < 0.0;
    for _ in 0..cfg.max_iterations {
        if hi - lo <= cfg.abs_tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            // Bracket is down to adjacent floats.
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if hi - lo <= cfg.abs_tol {
        Ok(0.5 * (lo + hi))
    } else {
        Err(Error::Solver(format!(
            "bracket [{lo}, {hi}] still wider than {} after {} iterations",
            cfg.abs_tol, cfg.max_iterations
        )))
    }
}

/// Root of a nondecreasing `f` with `f(lo) <= 0`, growing the upper end of the
/// bracket geometrically from `initial_hi` until the sign changes.
pub fn bisect_expanding<F>(f: F, lo: f64, initial_hi: f64, cfg: &SolverConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut hi = initial_hi.max(lo + 1.0);
    let mut below = lo;
    loop {
        let v = f(hi);
        if v.is_nan() {
            return Err(Error::Solver(format!("function undefined at {hi}")));
        }
        if v >= 0.0 {
            break;
        }
        below = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Solver("bracket expansion overflowed".into()));
        }
    }
    bisect(f, below, hi, cfg)
}

fn check_cv(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 || !(r * r).is_finite() {
        return Err(domain(format!(
            "coefficient of variation must be finite and nonnegative, got {r}"
        )));
    }
    Ok(())
}

/// `(rho - 1)^3 / (2 rho - 1)^2` written in terms of `x = rho - 1`.
pub(crate) fn deterministic_excess(x: f64) -> f64 {
    let d = 1.0 + 2.0 * x;
    x * x * x / (d * d)
}

/// `(2 e^(rho - 1) - 1) / rho^2 - 1` written in terms of `x = rho - 1`.
///
/// The numerator equals `2 (e^x - 1 - x - x^2/2)`, evaluated by series near
/// zero where the direct form cancels.
pub(crate) fn lottery_excess(x: f64) -> f64 {
    let rho = 1.0 + x;
    let tail = if x < 0.25 {
        // sum_{n >= 3} x^n / n!
        let mut term = x * x * x / 6.0;
        let mut sum: f64 = 0.0;
        let mut n = 3.0;
        while term.abs() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term;
            n += 1.0;
            term *= x / n;
        }
        sum
    } else if x < 700.0 {
        x.exp_m1() - x - 0.5 * x * x
    } else {
        return (x + std::f64::consts::LN_2 - 2.0 * rho.ln()).exp();
    };
    2.0 * tail / (rho * rho)
}

/// Optimal deterministic robust ratio: the root `rho >= 1` of
/// `(rho - 1)^3 / (2 rho - 1)^2 = r^2`.
pub fn rho_deterministic(r: f64, cfg: &SolverConfig) -> Result<f64> {
    check_cv(r)?;
    if r == 0.0 {
        return Ok(1.0);
    }
    let target = r * r;
    let x = bisect_expanding(|x| deterministic_excess(x) - target, 0.0, 1.0, cfg)?;
    Ok(1.0 + x)
}

/// Log-lottery robust ratio: the root `rho >= 1` of
/// `(2 e^(rho - 1) - 1) / rho^2 = r^2 + 1`.
pub fn rho_randomized(r: f64, cfg: &SolverConfig) -> Result<f64> {
    check_cv(r)?;
    if r == 0.0 {
        return Ok(1.0);
    }
    let target = r * r;
    let x = bisect_expanding(|x| lottery_excess(x) - target, 0.0, 1.0, cfg)?;
    Ok(1.0 + x)
}

/// Inverse of [`rho_randomized`] in closed form.
pub fn rho_randomized_inverse(rho: f64) -> Result<f64> {
    if rho.is_nan() || rho < 1.0 {
        return Err(domain(format!("ratio must be at least 1, got {rho}")));
    }
    if rho.is_infinite() {
        return Ok(f64::INFINITY);
    }
    Ok(lottery_excess(rho - 1.0).max(0.0).sqrt())
}

/// Lower bound `1 + ln(1 + r^2)` on the ratio of every randomized mechanism.
pub fn lower_bound_ratio(r: f64) -> Result<f64> {
    check_cv(r)?;
    Ok(1.0 + (r * r).ln_1p())
}

/// Positive root `k` of the cubic `1/r = (3k + k^3) / 2`.
pub fn azar_micali_k(r: f64, cfg: &SolverConfig) -> Result<f64> {
    if !(r.is_finite() && r > 0.0) {
        return Err(domain(format!("r must be positive and finite, got {r}")));
    }
    let rhs = 2.0 / r;
    bisect_expanding(|k| k * (3.0 + k * k) - rhs, 0.0, 1.0, cfg)
}

/// Ratio guarantee `1 / (1 - 1.5 r k(r))` of pricing at `mu - k(r) sigma`.
///
/// At the root of the cubic, `1 - 1.5 r k = r k^3 / 2`, which is the form
/// evaluated here since the direct one cancels for large `r`.
pub fn azar_micali_rho(r: f64, cfg: &SolverConfig) -> Result<f64> {
    let k = azar_micali_k(r, cfg)?;
    Ok(2.0 / (r * k * k * k))
}

/// Ratio `(1 - lambda)^(-1/lambda)` of pricing at the mean of a
/// `lambda`-regular distribution. Returns `+inf` at `lambda = 1`.
pub fn lambda_regular_ratio(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(domain(format!("lambda must lie in (0, 1], got {lambda}")));
    }
    if lambda == 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok((-(-lambda).ln_1p() / lambda).exp())
}

/// Upper bound `sqrt(1 / (1 - 2 lambda))` on the coefficient of variation of a
/// `lambda`-regular distribution, `0 <= lambda < 1/2`.
pub fn regularity_cv_cap(lambda: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&lambda) {
        return Err(domain(format!(
            "lambda must lie in [0, 1/2) for a finite cap, got {lambda}"
        )));
    }
    Ok((1.0 / (1.0 - 2.0 * lambda)).sqrt())
}

/// Coefficient of variation below which the log-lottery guarantee beats
/// pricing at the mean of a `lambda`-regular distribution.
pub fn regularity_lottery_cutoff(lambda: f64) -> Result<f64> {
    let ratio = lambda_regular_ratio(lambda)?;
    rho_randomized_inverse(ratio)
}
