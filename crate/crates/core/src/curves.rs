//! Tabulated ratio curves and their CSV rendering.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::math::{
    azar_micali_rho, lambda_regular_ratio, lower_bound_ratio, regularity_lottery_cutoff,
    rho_deterministic, rho_randomized, SolverConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    RhoD,
    Rho,
    Lower,
    AzarMicali,
    LambdaRatio,
    Cutoff,
}

impl CurveKind {
    pub const ALL: [CurveKind; 6] = [
        Self::RhoD,
        Self::Rho,
        Self::Lower,
        Self::AzarMicali,
        Self::LambdaRatio,
        Self::Cutoff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::RhoD => "rho_d",
            Self::Rho => "rho",
            Self::Lower => "lower",
            Self::AzarMicali => "azar_micali",
            Self::LambdaRatio => "lambda_ratio",
            Self::Cutoff => "cutoff",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Whether the abscissa is the regularity parameter rather than `r`.
    pub fn over_lambda(self) -> bool {
        matches!(self, Self::LambdaRatio | Self::Cutoff)
    }

    /// Default `(min, max, step)` grid.
    pub fn default_grid(self) -> (f64, f64, f64) {
        if self.over_lambda() {
            (0.01, 1.0, 0.01)
        } else {
            (0.0, 2.0, 0.01)
        }
    }

    /// Curve value at `x`; `azar_micali` takes its limit `1` at `r = 0`.
    pub fn eval(self, x: f64, cfg: &SolverConfig) -> Result<f64> {
        match self {
            Self::RhoD => rho_deterministic(x, cfg),
            Self::Rho => rho_randomized(x, cfg),
            Self::Lower => lower_bound_ratio(x),
            Self::AzarMicali if x == 0.0 => Ok(1.0),
            Self::AzarMicali => azar_micali_rho(x, cfg),
            Self::LambdaRatio => lambda_regular_ratio(x),
            Self::Cutoff => regularity_lottery_cutoff(x),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub which: CurveKind,
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl CurveSpec {
    pub fn new(which: CurveKind, min: f64, max: f64, step: f64) -> Result<Self> {
        let spec = Self {
            which,
            min,
            max,
            step,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_default_grid(which: CurveKind) -> Self {
        let (min, max, step) = which.default_grid();
        Self {
            which,
            min,
            max,
            step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo_name, hi_name) = if self.which.over_lambda() {
            ("lambda-min", "lambda-max")
        } else {
            ("r-min", "r-max")
        };
        if !(self.min.is_finite() && self.min >= 0.0) {
            return Err(invalid(
                lo_name,
                format!("must be finite and nonnegative, got {}", self.min),
            ));
        }
        if self.which.over_lambda() && self.min == 0.0 {
            return Err(invalid(lo_name, "must be positive for lambda curves"));
        }
        if !(self.max.is_finite() && self.max >= self.min) {
            return Err(invalid(
                hi_name,
                format!("must be at least {}, got {}", self.min, self.max),
            ));
        }
        if self.which.over_lambda() && self.max > 1.0 {
            return Err(invalid(
                hi_name,
                format!("must not exceed 1, got {}", self.max),
            ));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(invalid(
                "step",
                format!("must be positive, got {}", self.step),
            ));
        }
        if (self.max - self.min) / self.step > 1e7 {
            return Err(invalid("step", "grid would exceed ten million points"));
        }
        Ok(())
    }

    /// Grid `min, min + step, ...` up to `max` (inclusive, with rounding slack).
    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.min + i as f64 * self.step)
            .collect()
    }

    pub fn points(&self, cfg: &SolverConfig) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        self.grid()
            .into_iter()
            .map(|x| Ok((x, self.which.eval(x, cfg)?)))
            .collect()
    }

    pub fn header(&self) -> &'static str {
        if self.which.over_lambda() {
            "lambda,value"
        } else {
            "r,value"
        }
    }

    /// Decimal places needed to print every grid abscissa exactly.
    fn abscissa_decimals(&self) -> usize {
        (0..=12)
            .find(|&d| {
                let scale = 10f64.powi(d as i32);
                [self.min, self.step]
                    .iter()
                    .all(|v| ((v * scale).round() - v * scale).abs() < 1e-6)
            })
            .unwrap_or(12)
    }

    pub fn to_csv(&self, points: &[(f64, f64)]) -> String {
        let decimals = self.abscissa_decimals();
        let mut out = String::from(self.header());
        out.push('\n');
        for &(x, y) in points {
            out.push_str(&format!("{x:.decimals$},{}\n", format_sig(y, 6)));
        }
        out
    }
}

/// Fixed-point rendering with `digits` significant digits; `inf` for infinity.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v.is_nan() {
        return "nan".into();
    }
    if v == 0.0 {
        return format!("{:.*}", digits.saturating_sub(1), 0.0);
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // Rounding may carry into the next decade and add a digit.
    let significant = s
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count();
    if significant > digits && decimals > 0 {
        format!("{v:.*}", decimals - 1)
    } else {
        s
    }
}
