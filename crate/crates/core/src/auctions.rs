//! Lazy VCG with log-lottery reserves on top-`k` environments, and the
//! Myerson-optimal auction as a revenue baseline.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::AnalyticDistribution;
use crate::error::{domain, invalid, Result};
use crate::math::{rho_randomized, MomentInfo, SolverConfig};
use crate::mechanisms::{log_lottery, McEstimate, PriceLottery};
use crate::report::ratio;
use crate::stats::monte_carlo;

/// `n` bidders with independent regular values; any `k` of them can be served.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuctionEnvironment {
    pub n: usize,
    pub k: usize,
    pub bidders: Vec<AnalyticDistribution>,
}

impl AuctionEnvironment {
    pub fn new(k: usize, bidders: Vec<AnalyticDistribution>) -> Result<Self> {
        let env = Self {
            n: bidders.len(),
            k,
            bidders,
        };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "must be at least 1"));
        }
        if self.k == 0 || self.k > self.n {
            return Err(invalid(
                "k",
                format!("must lie in [1, n] = [1, {}], got {}", self.n, self.k),
            ));
        }
        if self.bidders.len() != self.n {
            return Err(invalid(
                "bidders",
                format!(
                    "expected n = {} entries, got {}",
                    self.n,
                    self.bidders.len()
                ),
            ));
        }
        for (i, b) in self.bidders.iter().enumerate() {
            b.validate(&format!("bidders[{i}]"))?;
        }
        Ok(())
    }

    /// Parses and validates an environment.
    pub fn from_json(s: &str) -> Result<Self> {
        let env: Self = serde_json::from_str(s)?;
        env.validate()?;
        Ok(env)
    }

    /// Mean and standard deviation of each bidder's value.
    pub fn moment_infos(&self) -> Result<Vec<MomentInfo>> {
        self.bidders
            .iter()
            .map(|b| MomentInfo::new(b.mean(), b.variance().sqrt()))
            .collect()
    }

    /// Largest coefficient of variation among the bidders.
    pub fn max_cv(&self) -> Result<f64> {
        Ok(self
            .moment_infos()?
            .iter()
            .map(MomentInfo::cv)
            .fold(0.0, f64::max))
    }

    /// One log-lottery reserve per bidder, built from the bidder's moments.
    pub fn log_lottery_reserves(&self, cfg: &SolverConfig) -> Result<Vec<PriceLottery>> {
        self.moment_infos()?
            .into_iter()
            .map(|i| log_lottery(i, cfg))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    /// Served bidders, in decreasing order of value.
    pub winners: Vec<usize>,
    pub payments: Vec<f64>,
    pub revenue: f64,
    pub welfare: f64,
}

/// Bidder indices sorted by decreasing value, ties to the lower index.
fn rank_by_value(values: &[f64], order: &mut Vec<usize>) {
    order.clear();
    order.extend(0..values.len());
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
}

/// Runs one lazy-VCG round: the `k` highest bidders are tentatively selected,
/// and each is served at `max(reserve, (k+1)-th highest value)` if willing.
/// A declining winner is not replaced.
pub fn lazy_vcg_round(
    env: &AuctionEnvironment,
    values: &[f64],
    reserve_prices: &[f64],
) -> Result<AuctionOutcome> {
    if values.len() != env.n {
        return Err(domain(format!(
            "expected {} values, got {}",
            env.n,
            values.len()
        )));
    }
    if reserve_prices.len() != env.n {
        return Err(domain(format!(
            "expected {} reserve prices, got {}",
            env.n,
            reserve_prices.len()
        )));
    }
    let mut order = Vec::with_capacity(env.n);
    rank_by_value(values, &mut order);
    let threshold = order.get(env.k).map_or(0.0, |&j| values[j]);
    let mut payments = vec![0.0; env.n];
    let mut winners = Vec::new();
    let mut welfare = 0.0;
    for &i in &order[..env.k] {
        let price = reserve_prices[i].max(threshold);
        if values[i] >= price {
            winners.push(i);
            payments[i] = price;
            welfare += values[i];
        }
    }
    Ok(AuctionOutcome {
        winners,
        revenue: payments.iter().sum(),
        payments,
        welfare,
    })
}

/// Averages of a lazy-VCG simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LazyVcgStats {
    pub revenue: McEstimate,
    pub welfare: McEstimate,
    /// Welfare of reserve-free VCG (the sum of the `k` highest values) on the same draws.
    pub vcg_welfare: McEstimate,
}

fn estimate(s: &crate::stats::RunningStats, n: u64) -> McEstimate {
    McEstimate {
        estimate: s.mean(),
        std_error: s.std_error(),
        n_samples: n,
    }
}

/// Simulates lazy VCG with a fresh log-lottery reserve for each tentative winner.
pub fn simulate_lazy_vcg(
    env: &AuctionEnvironment,
    n_rounds: u64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<LazyVcgStats> {
    env.validate()?;
    if n_rounds == 0 {
        return Err(domain("n_rounds must be at least 1"));
    }
    let reserves = env.log_lottery_reserves(cfg)?;
    simulate_lazy_vcg_with(env, &reserves, n_rounds, seed)
}

/// Simulates lazy VCG with the given reserve lotteries.
pub fn simulate_lazy_vcg_with(
    env: &AuctionEnvironment,
    reserves: &[PriceLottery],
    n_rounds: u64,
    seed: u64,
) -> Result<LazyVcgStats> {
    env.validate()?;
    if reserves.len() != env.n {
        return Err(domain(format!(
            "expected {} reserves, got {}",
            env.n,
            reserves.len()
        )));
    }
    if n_rounds == 0 {
        return Err(domain("n_rounds must be at least 1"));
    }
    let [rev, wel, vcg] = monte_carlo(n_rounds, seed, |rng| {
        let values: Vec<f64> = env
            .bidders
            .iter()
            .map(|b| b.quantile(rng.random::<f64>()))
            .collect();
        let mut order = Vec::with_capacity(env.n);
        rank_by_value(&values, &mut order);
        let threshold = order.get(env.k).map_or(0.0, |&j| values[j]);
        let (mut revenue, mut welfare, mut vcg_welfare) = (0.0, 0.0, 0.0);
        for &i in &order[..env.k] {
            vcg_welfare += values[i];
            let price = reserves[i].sample(rng).max(threshold);
            if values[i] >= price {
                revenue += price;
                welfare += values[i];
            }
        }
        [revenue, welfare, vcg_welfare]
    });
    Ok(LazyVcgStats {
        revenue: estimate(&rev, n_rounds),
        welfare: estimate(&wel, n_rounds),
        vcg_welfare: estimate(&vcg, n_rounds),
    })
}

/// Revenue of one round of the Myerson-optimal auction.
///
/// Serves the (at most `k`) bidders with the highest nonnegative virtual
/// values; each winner pays the smallest value that keeps them served.
pub fn myerson_round(env: &AuctionEnvironment, values: &[f64]) -> Result<AuctionOutcome> {
    if values.len() != env.n {
        return Err(domain(format!(
            "expected {} values, got {}",
            env.n,
            values.len()
        )));
    }
    let phis: Vec<f64> = env
        .bidders
        .iter()
        .zip(values)
        .map(|(b, &v)| b.virtual_value(v))
        .collect();
    let mut order = Vec::with_capacity(env.n);
    rank_by_value(&phis, &mut order);
    let mut payments = vec![0.0; env.n];
    let mut winners = Vec::new();
    let mut welfare = 0.0;
    for &i in &order[..env.k] {
        if phis[i] < 0.0 {
            break;
        }
        // k-th highest virtual value among the other bidders.
        let kth_other = order
            .iter()
            .filter(|&&j| j != i)
            .nth(env.k - 1)
            .map_or(0.0, |&j| phis[j]);
        payments[i] = env.bidders[i].inverse_virtual_value(kth_other.max(0.0));
        winners.push(i);
        welfare += values[i];
    }
    Ok(AuctionOutcome {
        winners,
        revenue: payments.iter().sum(),
        payments,
        welfare,
    })
}

/// Monte Carlo estimate of the Myerson-optimal revenue.
pub fn myerson_optimal_revenue(
    env: &AuctionEnvironment,
    n_rounds: u64,
    seed: u64,
) -> Result<McEstimate> {
    env.validate()?;
    if n_rounds == 0 {
        return Err(domain("n_rounds must be at least 1"));
    }
    let [rev] = monte_carlo(n_rounds, seed, |rng| {
        let values: Vec<f64> = env
            .bidders
            .iter()
            .map(|b| b.quantile(rng.random::<f64>()))
            .collect();
        [myerson_round(env, &values).map_or(f64::NAN, |o| o.revenue)]
    });
    Ok(estimate(&rev, n_rounds))
}

/// Lazy VCG against the Myerson baseline, with the guaranteed ceilings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub environment: AuctionEnvironment,
    pub rounds: u64,
    pub seed: u64,
    pub lazy_vcg: LazyVcgStats,
    pub myerson: McEstimate,
    /// Myerson revenue over lazy-VCG revenue.
    pub revenue_ratio: f64,
    /// VCG welfare over lazy-VCG welfare.
    pub welfare_ratio: f64,
    pub max_cv: f64,
    /// `2 rho(r_max)`.
    pub revenue_ceiling: f64,
    /// `rho(r_max)`.
    pub welfare_ceiling: f64,
}

pub fn compare_with_myerson(
    env: &AuctionEnvironment,
    n_rounds: u64,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<SimulationReport> {
    let lazy = simulate_lazy_vcg(env, n_rounds, seed, cfg)?;
    let myerson = myerson_optimal_revenue(env, n_rounds, seed)?;
    let max_cv = env.max_cv()?;
    let rho = rho_randomized(max_cv, cfg)?;
    Ok(SimulationReport {
        environment: env.clone(),
        rounds: n_rounds,
        seed,
        revenue_ratio: ratio(myerson.estimate, lazy.revenue.estimate),
        welfare_ratio: ratio(lazy.vcg_welfare.estimate, lazy.welfare.estimate),
        lazy_vcg: lazy,
        myerson,
        max_cv,
        revenue_ceiling: 2.0 * rho,
        welfare_ceiling: rho,
    })
}
