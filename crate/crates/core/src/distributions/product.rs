use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

use super::analytic::AnalyticDistribution;
use super::piecewise::PiecewiseDistribution;

/// One item's value distribution: exact piecewise or closed-form analytic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Marginal {
    Piecewise(PiecewiseDistribution),
    Analytic(AnalyticDistribution),
}

impl Marginal {
    pub fn mean(&self) -> f64 {
        match self {
            Self::Piecewise(d) => d.mean(),
            Self::Analytic(d) => d.mean(),
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Self::Piecewise(d) => d.moments().1,
            Self::Analytic(d) => d.variance(),
        }
    }

    /// Inverse cdf at `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Self::Piecewise(d) => d.quantile(u),
            Self::Analytic(d) => d.quantile(u),
        }
    }

    /// `P[X >= p]`.
    pub fn sell_probability(&self, p: f64) -> f64 {
        match self {
            Self::Piecewise(d) => d.sell_probability(p),
            Self::Analytic(d) => d.sell_probability(p),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random::<f64>())
    }
}

impl From<PiecewiseDistribution> for Marginal {
    fn from(d: PiecewiseDistribution) -> Self {
        Self::Piecewise(d)
    }
}

impl From<AnalyticDistribution> for Marginal {
    fn from(d: AnalyticDistribution) -> Self {
        Self::Analytic(d)
    }
}

/// Independent item values, one marginal per item.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDistribution {
    pub marginals: Vec<Marginal>,
}

impl ProductDistribution {
    pub fn new(marginals: Vec<Marginal>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(domain("a product distribution needs at least one item"));
        }
        for (i, m) in marginals.iter().enumerate() {
            if let Marginal::Analytic(a) = m {
                a.validate(&format!("marginals[{i}]"))?;
            }
        }
        Ok(Self { marginals })
    }

    pub fn items(&self) -> usize {
        self.marginals.len()
    }

    /// Expected welfare `sum_j E[X_j]`.
    pub fn welfare(&self) -> f64 {
        self.marginals.iter().map(Marginal::mean).sum()
    }

    /// Mean and variance of the bundle value `sum_j X_j`.
    pub fn bundle_moments(&self) -> (f64, f64) {
        let mean = self.welfare();
        let var = self.marginals.iter().map(Marginal::variance).sum();
        (mean, var)
    }

    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.marginals.iter().map(|m| m.sample(rng)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marginal_json_is_untagged() {
        let p: Marginal = serde_json::from_str(r#"{"atoms":[[1.0,1.0]]}"#).unwrap();
        assert!(matches!(p, Marginal::Piecewise(_)));
        let a: Marginal =
            serde_json::from_str(r#"{"family":"uniform","lo":0.0,"hi":2.0}"#).unwrap();
        assert_eq!(a.mean(), 1.0);
    }

    #[test]
    fn bundle_moments_add() {
        let d = ProductDistribution::new(vec![
            AnalyticDistribution::Exponential { rate: 1.0 }.into(),
            AnalyticDistribution::Uniform { lo: 0.0, hi: 1.0 }.into(),
        ])
        .unwrap();
        let (mean, var) = d.bundle_moments();
        assert!((mean - 1.5).abs() < 1e-15);
        assert!((var - (1.0 + 1.0 / 12.0)).abs() < 1e-15);
        assert!(ProductDistribution::new(Vec::new()).is_err());
    }
}
