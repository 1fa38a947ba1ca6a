use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Closed-form regular value distributions used for bidders.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticDistribution {
    Exponential { rate: f64 },
    Uniform { lo: f64, hi: f64 },
    ShiftedExponential { shift: f64, rate: f64 },
}

impl AnalyticDistribution {
    /// Checks parameters; `what` prefixes the offending field in the message.
    pub fn validate(&self, what: &str) -> Result<()> {
        match *self {
            Self::Exponential { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(invalid(
                        format!("{what}.rate"),
                        format!("must be positive, got {rate}"),
                    ));
                }
            }
            Self::Uniform { lo, hi } => {
                if !(lo.is_finite() && lo >= 0.0) {
                    return Err(invalid(
                        format!("{what}.lo"),
                        format!("must be nonnegative, got {lo}"),
                    ));
                }
                if !(hi.is_finite() && hi > lo) {
                    return Err(invalid(
                        format!("{what}.hi"),
                        format!("must exceed lo, got {hi}"),
                    ));
                }
            }
            Self::ShiftedExponential { shift, rate } => {
                if !(shift.is_finite() && shift >= 0.0) {
                    return Err(invalid(
                        format!("{what}.shift"),
                        format!("must be nonnegative, got {shift}"),
                    ));
                }
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(invalid(
                        format!("{what}.rate"),
                        format!("must be positive, got {rate}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Lower end of the support.
    pub fn support_min(&self) -> f64 {
        match *self {
            Self::Exponential { .. } => 0.0,
            Self::Uniform { lo, .. } => lo,
            Self::ShiftedExponential { shift, .. } => shift,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::Uniform { lo, hi } => ((x - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::ShiftedExponential { shift, rate } => {
                if x <= shift {
                    0.0
                } else {
                    -(-rate * (x - shift)).exp_m1()
                }
            }
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => {
                if x < 0.0 {
                    0.0
                } else {
                    rate * (-rate * x).exp()
                }
            }
            Self::Uniform { lo, hi } => {
                if x < lo || x > hi {
                    0.0
                } else {
                    1.0 / (hi - lo)
                }
            }
            Self::ShiftedExponential { shift, rate } => {
                if x < shift {
                    0.0
                } else {
                    rate * (-rate * (x - shift)).exp()
                }
            }
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::Uniform { lo, hi } => lo + u * (hi - lo),
            Self::ShiftedExponential { shift, rate } => shift - (-u).ln_1p() / rate,
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Exponential { rate } => 1.0 / rate,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::ShiftedExponential { shift, rate } => shift + 1.0 / rate,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Exponential { rate } | Self::ShiftedExponential { rate, .. } => {
                1.0 / (rate * rate)
            }
            Self::Uniform { lo, hi } => (hi - lo).powi(2) / 12.0,
        }
    }

    /// Myerson virtual value `x - (1 - F(x)) / f(x)` on the support.
    pub fn virtual_value(&self, x: f64) -> f64 {
        match *self {
            Self::Exponential { rate } | Self::ShiftedExponential { rate, .. } => x - 1.0 / rate,
            Self::Uniform { hi, .. } => 2.0 * x - hi,
        }
    }

    /// Smallest value in the support whose virtual value is at least `y`.
    pub fn inverse_virtual_value(&self, y: f64) -> f64 {
        match *self {
            Self::Exponential { rate } => (y + 1.0 / rate).max(0.0),
            Self::ShiftedExponential { shift, rate } => (y + 1.0 / rate).max(shift),
            Self::Uniform { lo, hi } => (0.5 * (y + hi)).clamp(lo, hi),
        }
    }

    /// Optimal single-bidder posted price `phi^{-1}(0)`.
    pub fn monopoly_price(&self) -> f64 {
        self.inverse_virtual_value(0.0)
    }

    /// Optimal single-bidder revenue.
    pub fn optimal_revenue(&self) -> f64 {
        let p = self.monopoly_price();
        p * (1.0 - self.cdf(p))
    }

    /// `P[X >= p]`.
    pub fn sell_probability(&self, p: f64) -> f64 {
        1.0 - self.cdf(p)
    }
}
