//! Seller-side mechanisms: posted prices, price lotteries, and the two
//! multi-item selling rules, with exact and Monte Carlo revenue.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::{
    AnalyticDistribution, Marginal, PiecewiseDistribution, ProductDistribution,
};
use crate::error::{domain, invalid, Error, Result};
use crate::math::{rho_deterministic, rho_randomized, MomentInfo, SolverConfig};
use crate::report::{deserialize_ratio, ratio, serialize_ratio};
use crate::stats::monte_carlo;

/// A randomization over take-it-or-leave-it prices.
///
/// The buyer purchases whenever their value is at least the realized price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", try_from = "RawLottery")]
pub enum PriceLottery {
    Deterministic {
        p: f64,
    },
    /// Price `p1` with probability `q1`, otherwise `p2`.
    TwoPointLottery {
        p1: f64,
        q1: f64,
        p2: f64,
    },
    /// Density `(pi2 / x - 1) / Z` on `[pi1, pi2]`.
    LogLottery {
        pi1: f64,
        pi2: f64,
    },
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawLottery {
    Deterministic {
        p: f64,
    },
    TwoPointLottery {
        p1: f64,
        q1: f64,
        p2: f64,
    },
    LogLottery {
        pi1: f64,
        pi2: f64,
        #[serde(default, rename = "z")]
        _z: Option<f64>,
    },
}

impl TryFrom<RawLottery> for PriceLottery {
    type Error = Error;

    fn try_from(raw: RawLottery) -> Result<Self> {
        let lottery = match raw {
            RawLottery::Deterministic { p } => Self::Deterministic { p },
            RawLottery::TwoPointLottery { p1, q1, p2 } => Self::TwoPointLottery { p1, q1, p2 },
            RawLottery::LogLottery { pi1, pi2, .. } => Self::LogLottery { pi1, pi2 },
        };
        lottery.validate()?;
        Ok(lottery)
    }
}

/// `(L - 1) e^L + 1`, the log-lottery normalizer divided by `pi1`, where `L = ln(pi2/pi1)`.
fn log_normalizer_unit(l: f64) -> f64 {
    if l < 0.5 {
        // sum_{n >= 2} (n - 1) L^n / n!
        let mut power_over_fact = l * l / 2.0;
        let mut sum = 0.0;
        let mut n = 2.0;
        while power_over_fact > 1e-18 * sum || sum == 0.0 {
            sum += (n - 1.0) * power_over_fact;
            n += 1.0;
            power_over_fact *= l / n;
            if power_over_fact == 0.0 {
                break;
            }
        }
        sum
    } else {
        (l - 1.0) * l.exp() + 1.0
    }
}

impl PriceLottery {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Deterministic { p } => {
                if !(p.is_finite() && p >= 0.0) {
                    return Err(invalid(
                        "lottery",
                        format!("p must be finite and nonnegative, got {p}"),
                    ));
                }
            }
            Self::TwoPointLottery { p1, q1, p2 } => {
                if !(p1.is_finite() && p2.is_finite() && 0.0 <= p1 && p1 < p2) {
                    return Err(invalid(
                        "lottery",
                        format!("need 0 <= p1 < p2, got p1 = {p1}, p2 = {p2}"),
                    ));
                }
                if !(0.0..=1.0).contains(&q1) {
                    return Err(invalid(
                        "lottery",
                        format!("q1 must lie in [0, 1], got {q1}"),
                    ));
                }
            }
            Self::LogLottery { pi1, pi2 } => {
                if !(pi1.is_finite() && pi2.is_finite() && 0.0 < pi1 && pi1 <= pi2) {
                    return Err(invalid(
                        "lottery",
                        format!("need 0 < pi1 <= pi2, got pi1 = {pi1}, pi2 = {pi2}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Normalizer `Z = pi2 ln(pi2/pi1) - (pi2 - pi1)` of a log-lottery.
    pub fn log_normalizer(&self) -> Option<f64> {
        match *self {
            Self::LogLottery { pi1, pi2 } => Some(pi1 * log_normalizer_unit((pi2 / pi1).ln())),
            _ => None,
        }
    }

    /// `P[price <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Self::Deterministic { p } => f64::from(x >= p),
            Self::TwoPointLottery { p1, q1, p2 } => {
                if x >= p2 {
                    1.0
                } else if x >= p1 {
                    q1
                } else {
                    0.0
                }
            }
            Self::LogLottery { pi1, pi2 } => {
                if x < pi1 {
                    0.0
                } else if x >= pi2 {
                    1.0
                } else {
                    let z = self.log_normalizer().unwrap_or(0.0);
                    if z <= 0.0 {
                        return 1.0;
                    }
                    ((pi2 * (x / pi1).ln() - (x - pi1)) / z).clamp(0.0, 1.0)
                }
            }
        }
    }

    /// Density of a log-lottery on `[pi1, pi2]`; `None` for discrete lotteries.
    pub fn density(&self, x: f64) -> Option<f64> {
        match *self {
            Self::LogLottery { pi1, pi2 } if pi2 > pi1 => {
                let z = self.log_normalizer()?;
                Some(if x < pi1 || x > pi2 {
                    0.0
                } else {
                    (pi2 / x - 1.0) / z
                })
            }
            _ => None,
        }
    }

    /// Quantile at `u` in `[0, 1)`; the log-lottery is inverted by bisection.
    pub fn sample_price(&self, u: f64) -> f64 {
        match *self {
            Self::Deterministic { p } => p,
            Self::TwoPointLottery { p1, q1, p2 } => {
                if u < q1 {
                    p1
                } else {
                    p2
                }
            }
            Self::LogLottery { pi1, pi2 } => {
                if u <= 0.0 || pi2 <= pi1 {
                    return pi1;
                }
                if u >= 1.0 {
                    return pi2;
                }
                let (mut lo, mut hi) = (pi1, pi2);
                let tol = 1e-12 * pi2;
                while hi - lo > tol {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Deterministic { p } => *p,
            _ => self.sample_price(rng.random::<f64>()),
        }
    }

    /// Smallest and largest price in the support.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Self::Deterministic { p } => (p, p),
            Self::TwoPointLottery { p1, q1, p2 } => {
                if q1 >= 1.0 {
                    (p1, p1)
                } else if q1 <= 0.0 {
                    (p2, p2)
                } else {
                    (p1, p2)
                }
            }
            Self::LogLottery { pi1, pi2 } => (pi1, pi2),
        }
    }

    /// Exact expected revenue `E_p[p P[X >= p]]` against a piecewise distribution.
    pub fn revenue_exact(&self, d: &PiecewiseDistribution) -> f64 {
        match *self {
            Self::Deterministic { p } => d.revenue_at(p),
            Self::TwoPointLottery { p1, q1, p2 } => {
                q1 * d.revenue_at(p1) + (1.0 - q1) * d.revenue_at(p2)
            }
            Self::LogLottery { pi1, pi2 } => {
                if pi2 <= pi1 {
                    return d.revenue_at(pi1);
                }
                let z = self.log_normalizer().expect("log-lottery");
                let mut cuts = vec![pi1, pi2];
                cuts.extend(d.atoms().iter().map(|a| a.value));
                cuts.extend(d.tails().iter().flat_map(|t| [t.lo, t.hi]));
                cuts.retain(|&c| c >= pi1 && c <= pi2);
                cuts.sort_by(f64::total_cmp);
                cuts.dedup();
                let mut total = 0.0;
                for w in cuts.windows(2) {
                    let (a, b) = (w[0], w[1]);
                    if b <= a {
                        continue;
                    }
                    // On (a, b) the sell probability is C + K / p.
                    let k: f64 = d
                        .tails()
                        .iter()
                        .filter(|t| t.lo <= a && t.hi >= b)
                        .map(|t| t.k)
                        .sum();
                    let mid = 0.5 * (a + b);
                    let c = d.sell_probability(mid) - k / mid;
                    let price_mass = (b - a) * (pi2 - mid) / z;
                    let prob_mass = (pi2 * (b / a).ln() - (b - a)) / z;
                    total += c * price_mass + k * prob_mass;
                }
                total
            }
        }
    }

    /// Exact expected revenue against a closed-form distribution.
    pub fn revenue_exact_analytic(&self, d: &AnalyticDistribution) -> f64 {
        match *self {
            Self::Deterministic { p } => p * d.sell_probability(p),
            Self::TwoPointLottery { p1, q1, p2 } => {
                q1 * p1 * d.sell_probability(p1) + (1.0 - q1) * p2 * d.sell_probability(p2)
            }
            Self::LogLottery { pi1, pi2 } => {
                if pi2 <= pi1 {
                    return pi1 * d.sell_probability(pi1);
                }
                let z = self.log_normalizer().expect("log-lottery");
                weighted_survival_integral(d, pi2, pi1, pi2) / z
            }
        }
    }

    /// Exact expected revenue against either kind of marginal.
    pub fn revenue_exact_marginal(&self, d: &Marginal) -> f64 {
        match d {
            Marginal::Piecewise(d) => self.revenue_exact(d),
            Marginal::Analytic(d) => self.revenue_exact_analytic(d),
        }
    }

    /// Monte Carlo revenue with `n` independent (value, price) draws.
    pub fn revenue_monte_carlo(&self, d: &Marginal, n: u64, seed: u64) -> Result<McEstimate> {
        if n == 0 {
            return Err(domain("n_samples must be at least 1"));
        }
        let [s] = monte_carlo(n, seed, |rng| {
            let v = d.sample(rng);
            let p = self.sample(rng);
            [if v >= p { p } else { 0.0 }]
        });
        Ok(McEstimate {
            estimate: s.mean(),
            std_error: s.std_error(),
            n_samples: n,
        })
    }
}

/// `int_a^b (pi2 - p) P[X >= p] dp` in closed form.
fn weighted_survival_integral(d: &AnalyticDistribution, pi2: f64, a: f64, b: f64) -> f64 {
    // Antiderivative of (pi2 - p) on a constant-one stretch.
    let flat = |x: f64| pi2 * x - 0.5 * x * x;
    let mut total = 0.0;
    match *d {
        AnalyticDistribution::Uniform { lo, hi } => {
            let s1 = b.min(lo);
            if s1 > a {
                total += flat(s1) - flat(a);
            }
            let (u0, u1) = (a.max(lo), b.min(hi));
            if u1 > u0 {
                // (pi2 - p)(hi - p) / (hi - lo)
                let g = |x: f64| pi2 * hi * x - 0.5 * (pi2 + hi) * x * x + x * x * x / 3.0;
                total += (g(u1) - g(u0)) / (hi - lo);
            }
        }
        AnalyticDistribution::Exponential { rate }
        | AnalyticDistribution::ShiftedExponential { rate, .. } => {
            let shift = d.support_min();
            let s1 = b.min(shift);
            if s1 > a {
                total += flat(s1) - flat(a);
            }
            let e0 = a.max(shift);
            if b > e0 {
                let g =
                    |x: f64| (-rate * (x - shift)).exp() * (1.0 / (rate * rate) - (pi2 - x) / rate);
                total += g(b) - g(e0);
            }
        }
    }
    total
}

/// Robust deterministic price `rho_D(r) / (2 rho_D(r) - 1) * mu`.
pub fn robust_price(info: MomentInfo, cfg: &SolverConfig) -> Result<PriceLottery> {
    let rho = rho_deterministic(info.cv(), cfg)?;
    Ok(PriceLottery::Deterministic {
        p: rho / (2.0 * rho - 1.0) * info.mu,
    })
}

/// Log-lottery on `[mu / rho(r), mu / rho(r) * e^{rho(r) - 1}]`; the mean when `sigma = 0`.
pub fn log_lottery(info: MomentInfo, cfg: &SolverConfig) -> Result<PriceLottery> {
    if info.sigma == 0.0 {
        return Ok(PriceLottery::Deterministic { p: info.mu });
    }
    let rho = rho_randomized(info.cv(), cfg)?;
    let pi1 = info.mu / rho;
    let pi2 = pi1 * (rho - 1.0).exp();
    if !pi2.is_finite() {
        return Err(domain(format!(
            "log-lottery support overflows for r = {}",
            info.cv()
        )));
    }
    Ok(PriceLottery::LogLottery { pi1, pi2 })
}

/// Price `mu / 2` or `mu + sigma^2 / mu`, each with probability one half.
pub fn quarter_lottery(info: MomentInfo) -> PriceLottery {
    PriceLottery::TwoPointLottery {
        p1: 0.5 * info.mu,
        q1: 0.5,
        p2: info.mu + info.variance() / info.mu,
    }
}

pub fn price_at_mean(info: MomentInfo) -> PriceLottery {
    PriceLottery::Deterministic { p: info.mu }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// How a multi-item seller offers the items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MultiItemMechanism {
    /// One lottery per item, applied independently.
    Separate { lotteries: Vec<PriceLottery> },
    /// One lottery for the bundle of all items.
    FullBundle { lottery: PriceLottery },
}

fn check_items(infos: &[MomentInfo]) -> Result<()> {
    if infos.is_empty() {
        return Err(domain("need at least one item"));
    }
    Ok(())
}

/// Sells item `j` with its own log-lottery for `(mu_j, sigma_j)`.
pub fn sell_separate(infos: &[MomentInfo], cfg: &SolverConfig) -> Result<MultiItemMechanism> {
    check_items(infos)?;
    let lotteries = infos
        .iter()
        .map(|&i| log_lottery(i, cfg))
        .collect::<Result<_>>()?;
    Ok(MultiItemMechanism::Separate { lotteries })
}

/// Moments `(sum mu_j, sqrt(sum sigma_j^2))` of the bundle of independent items.
pub fn bundle_info(infos: &[MomentInfo]) -> Result<MomentInfo> {
    check_items(infos)?;
    let mu = infos.iter().map(|i| i.mu).sum();
    let var: f64 = infos.iter().map(|i| i.variance()).sum();
    MomentInfo::new(mu, var.sqrt())
}

/// Sells the full bundle with the log-lottery for the bundle moments.
pub fn sell_bundle(infos: &[MomentInfo], cfg: &SolverConfig) -> Result<MultiItemMechanism> {
    let lottery = log_lottery(bundle_info(infos)?, cfg)?;
    Ok(MultiItemMechanism::FullBundle { lottery })
}

/// Revenue floor and welfare ratio guaranteed by a multi-item rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiItemGuarantee {
    /// Revenue the rule earns on every product distribution with the declared moments.
    pub revenue_floor: f64,
    /// Upper bound on `sum mu_j / revenue`.
    pub ratio: f64,
}

/// Guarantee of the separate rule: `sum mu_j / rho(r_j)` and `rho(r_max)`.
pub fn separate_guarantee(infos: &[MomentInfo], cfg: &SolverConfig) -> Result<MultiItemGuarantee> {
    check_items(infos)?;
    let mut floor = 0.0;
    let mut r_max: f64 = 0.0;
    for i in infos {
        floor += i.mu / rho_randomized(i.cv(), cfg)?;
        r_max = r_max.max(i.cv());
    }
    Ok(MultiItemGuarantee {
        revenue_floor: floor,
        ratio: rho_randomized(r_max, cfg)?,
    })
}

/// Guarantee of the bundle rule: `mu_bar / rho(r_bar)` and `rho(r_bar)`.
pub fn bundle_guarantee(infos: &[MomentInfo], cfg: &SolverConfig) -> Result<MultiItemGuarantee> {
    let b = bundle_info(infos)?;
    let rho = rho_randomized(b.cv(), cfg)?;
    Ok(MultiItemGuarantee {
        revenue_floor: b.mu / rho,
        ratio: rho,
    })
}

impl MultiItemMechanism {
    pub fn items(&self) -> Option<usize> {
        match self {
            Self::Separate { lotteries } => Some(lotteries.len()),
            Self::FullBundle { .. } => None,
        }
    }

    fn check_dimension(&self, d: &ProductDistribution) -> Result<()> {
        if let Some(m) = self.items() {
            if m != d.items() {
                return Err(domain(format!(
                    "mechanism sells {m} items but the distribution has {}",
                    d.items()
                )));
            }
        }
        Ok(())
    }

    /// Exact revenue; available for separate sales and single-item bundles.
    pub fn revenue_exact(&self, d: &ProductDistribution) -> Result<f64> {
        self.check_dimension(d)?;
        match self {
            Self::Separate { lotteries } => Ok(lotteries
                .iter()
                .zip(&d.marginals)
                .map(|(l, m)| l.revenue_exact_marginal(m))
                .sum()),
            Self::FullBundle { lottery } => {
                if d.items() == 1 {
                    Ok(lottery.revenue_exact_marginal(&d.marginals[0]))
                } else {
                    Err(domain(
                        "exact bundle revenue needs the sum distribution; use Monte Carlo",
                    ))
                }
            }
        }
    }

    pub fn revenue_monte_carlo(
        &self,
        d: &ProductDistribution,
        n: u64,
        seed: u64,
    ) -> Result<McEstimate> {
        self.check_dimension(d)?;
        if n == 0 {
            return Err(domain("n_samples must be at least 1"));
        }
        let [s] = monte_carlo(n, seed, |rng| {
            let rev = match self {
                Self::Separate { lotteries } => lotteries
                    .iter()
                    .zip(&d.marginals)
                    .map(|(l, m)| {
                        let v = m.sample(rng);
                        let p = l.sample(rng);
                        if v >= p {
                            p
                        } else {
                            0.0
                        }
                    })
                    .sum(),
                Self::FullBundle { lottery } => {
                    let v: f64 = d.marginals.iter().map(|m| m.sample(rng)).sum();
                    let p = lottery.sample(rng);
                    if v >= p {
                        p
                    } else {
                        0.0
                    }
                }
            };
            [rev]
        });
        Ok(McEstimate {
            estimate: s.mean(),
            std_error: s.std_error(),
            n_samples: n,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    Exact,
    Mc,
}

/// Revenue of a mechanism against a distribution, next to the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub mechanism: PriceLottery,
    pub distribution: Marginal,
    pub revenue: f64,
    pub opt: f64,
    #[serde(
        serialize_with = "serialize_ratio",
        deserialize_with = "deserialize_ratio"
    )]
    pub ratio: f64,
    pub method: EvalMethod,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
}

/// Optimal single-item revenue of a marginal.
pub fn optimal_revenue(d: &Marginal) -> f64 {
    match d {
        Marginal::Piecewise(d) => d.myerson_opt().0,
        Marginal::Analytic(d) => d.optimal_revenue(),
    }
}

pub fn evaluate_exact(mech: PriceLottery, d: &Marginal) -> EvalReport {
    let revenue = mech.revenue_exact_marginal(d);
    let opt = optimal_revenue(d);
    EvalReport {
        mechanism: mech,
        distribution: d.clone(),
        revenue,
        opt,
        ratio: ratio(opt, revenue),
        method: EvalMethod::Exact,
        n_samples: None,
        std_error: None,
        seed: None,
    }
}

pub fn evaluate_monte_carlo(
    mech: PriceLottery,
    d: &Marginal,
    n: u64,
    seed: u64,
) -> Result<EvalReport> {
    let est = mech.revenue_monte_carlo(d, n, seed)?;
    let opt = optimal_revenue(d);
    Ok(EvalReport {
        mechanism: mech,
        distribution: d.clone(),
        revenue: est.estimate,
        opt,
        ratio: ratio(opt, est.estimate),
        method: EvalMethod::Mc,
        n_samples: Some(n),
        std_error: Some(est.std_error),
        seed: Some(seed),
    })
}
