//! Adversarial distributions: exact-variance two-point masses, rare events,
//! the equal-revenue posterior of the rare-event mixture, exact-variance
//! perturbations, and the multi-item lower-bound instance.

use crate::error::{domain, Result};
use crate::math::MomentInfo;

use super::piecewise::{Atom, PiecewiseDistribution, ReciprocalTail};
use super::product::{Marginal, ProductDistribution};

/// Two-point mass with mean `mu`, variance exactly `sigma^2`, and lower atom at `x`.
///
/// The upper atom sits at `y(x) = mu + sigma^2 / (mu - x)` and the lower one
/// carries `alpha(x) = sigma^2 / (sigma^2 + (mu - x)^2)`.
pub fn two_point(info: MomentInfo, x: f64) -> Result<PiecewiseDistribution> {
    if !(x >= 0.0 && x < info.mu) {
        return Err(domain(format!(
            "lower atom must lie in [0, mu) = [0, {}), got {x}",
            info.mu
        )));
    }
    if info.sigma == 0.0 {
        return PiecewiseDistribution::point_mass(info.mu);
    }
    let gap = info.mu - x;
    let var = info.variance();
    let alpha = two_point_alpha(info, x);
    let y = info.mu + var / gap;
    PiecewiseDistribution::from_pieces(
        vec![
            Atom {
                value: x,
                mass: alpha,
            },
            Atom {
                value: y,
                mass: gap * gap / (var + gap * gap),
            },
        ],
        Vec::new(),
    )
}

/// Mass `alpha(x)` of the lower atom of [`two_point`].
pub fn two_point_alpha(info: MomentInfo, x: f64) -> f64 {
    let var = info.variance();
    let gap = info.mu - x;
    var / (var + gap * gap)
}

/// Upper atom `y(x)` of [`two_point`].
pub fn two_point_upper(info: MomentInfo, x: f64) -> f64 {
    info.mu + info.variance() / (info.mu - x)
}

/// Value `0` with probability `1 - eps` and `mu / eps` with probability `eps`.
pub fn rare_event(mu: f64, eps: f64) -> Result<PiecewiseDistribution> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(domain(format!("mean must be positive, got {mu}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(domain(format!("eps must lie in (0, 1], got {eps}")));
    }
    if eps == 1.0 {
        return PiecewiseDistribution::point_mass(mu);
    }
    PiecewiseDistribution::new(
        vec![
            Atom {
                value: 0.0,
                mass: 1.0 - eps,
            },
            Atom {
                value: mu / eps,
                mass: eps,
            },
        ],
        Vec::new(),
    )
}

/// Parameters of the rare-event mixture behind [`yao_posterior`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YaoMixture {
    /// Smallest admissible rare-event probability `1 / (1 + r^2)`.
    pub eps0: f64,
    /// Normalizer `1 / (1 + ln(1 + r^2))`; the mixing law has an atom `c` at
    /// `eps0` and density `c / eps` on `(eps0, 1]`.
    pub c: f64,
}

impl YaoMixture {
    pub fn new(info: MomentInfo) -> Result<Self> {
        if info.sigma == 0.0 {
            return Err(domain("the rare-event mixture needs sigma > 0"));
        }
        let r2 = info.cv() * info.cv();
        Ok(Self {
            eps0: 1.0 / (1.0 + r2),
            c: 1.0 / (1.0 + r2.ln_1p()),
        })
    }
}

/// Posterior of the rare-event mixture: a truncated equal-revenue law on
/// `[mu, mu/eps0)` with atoms `1 - c` at zero and `c eps0` at `mu / eps0`.
pub fn yao_posterior(info: MomentInfo) -> Result<PiecewiseDistribution> {
    let YaoMixture { eps0, c } = YaoMixture::new(info)?;
    let top = info.mu / eps0;
    PiecewiseDistribution::new(
        vec![
            Atom {
                value: 0.0,
                mass: 1.0 - c,
            },
            Atom {
                value: top,
                mass: c * eps0,
            },
        ],
        vec![ReciprocalTail {
            lo: info.mu,
            hi: top,
            k: c * info.mu,
        }],
    )
}

/// Mixes `d` (mean `mu`, variance below `sigma^2`) with a rare event so that
/// the result has variance exactly `sigma^2`; `delta` is the rare-event weight.
pub fn perturb_to_exact_sigma(
    d: &PiecewiseDistribution,
    info: MomentInfo,
    delta: f64,
) -> Result<PiecewiseDistribution> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(domain(format!("delta must lie in (0, 1], got {delta}")));
    }
    let (mean, var) = d.moments();
    if (mean - info.mu).abs() > 1e-9 * info.mu.max(1.0) {
        return Err(domain(format!(
            "distribution mean {mean} does not match mu = {}",
            info.mu
        )));
    }
    let target = info.variance();
    if var >= target {
        return Err(domain(format!(
            "variance {var} already reaches sigma^2 = {target}"
        )));
    }
    let mu2 = info.mu * info.mu;
    let eps = delta * mu2 / (delta * mu2 + target - (1.0 - delta) * var);
    let rare = rare_event(info.mu, eps)?;
    PiecewiseDistribution::mixture(&[(1.0 - delta, d), (delta, &rare)])
}

/// Multi-item instance where item 1 carries the rare-event posterior and the
/// remaining items are low-welfare rare events.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundInstance {
    pub infos: Vec<MomentInfo>,
    pub marginals: Vec<PiecewiseDistribution>,
    pub delta: f64,
}

impl LowerBoundInstance {
    pub fn product(&self) -> ProductDistribution {
        ProductDistribution {
            marginals: self
                .marginals
                .iter()
                .cloned()
                .map(Marginal::Piecewise)
                .collect(),
        }
    }

    /// Total welfare of items `2..m`, which equals `delta`.
    pub fn low_item_welfare(&self) -> f64 {
        self.infos[1..].iter().map(|i| i.mu).sum()
    }
}

/// Builds the independent lower-bound instance for coefficients of variation
/// `r_values` (largest first) with low-item welfare `delta`.
///
/// Item 1 has `(mu, sigma) = (1, r_1)`; item `j >= 2` has mean
/// `delta / (m - 1)` and standard deviation `r_j delta / (m - 1)`, realized by
/// atoms at `0` and `(1 + r_j^2) delta / (m - 1)`.
pub fn multi_item_lower_instance(r_values: &[f64], delta: f64) -> Result<LowerBoundInstance> {
    let m = r_values.len();
    if m < 2 {
        return Err(domain(format!("need at least two items, got {m}")));
    }
    if let Some(r) = r_values.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(domain(format!(
            "coefficients of variation must be positive, got {r}"
        )));
    }
    if r_values.iter().any(|&r| r > r_values[0]) {
        return Err(domain(
            "the first coefficient of variation must be the largest",
        ));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(domain(format!("delta must be positive, got {delta}")));
    }
    let share = delta / (m - 1) as f64;
    let first = MomentInfo::new(1.0, r_values[0])?;
    let mut infos = vec![first];
    let mut marginals = vec![yao_posterior(first)?];
    for &r in &r_values[1..] {
        let p = 1.0 / (1.0 + r * r);
        let alpha = (1.0 + r * r) * share;
        infos.push(MomentInfo::new(share, r * share)?);
        marginals.push(PiecewiseDistribution::new(
            vec![
                Atom {
                    value: 0.0,
                    mass: 1.0 - p,
                },
                Atom {
                    value: alpha,
                    mass: p,
                },
            ],
            Vec::new(),
        )?);
    }
    Ok(LowerBoundInstance {
        infos,
        marginals,
        delta,
    })
}

/// Slack `delta ln(1 + r^2) (1 + ln(1 + r^2))^2` lost by the multi-item bound.
pub fn lower_instance_slack(r: f64, delta: f64) -> f64 {
    let l = (r * r).ln_1p();
    delta * l * (1.0 + l) * (1.0 + l)
}

/// Largest `delta = 10^-k` (smallest `k >= 0`) whose slack is below `eps`.
pub fn default_lower_instance_delta(r: f64, eps: f64) -> Result<f64> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(domain(format!("eps must be positive, got {eps}")));
    }
    for k in 0..300 {
        let delta = 10f64.powi(-k);
        if lower_instance_slack(r, delta) < eps {
            return Ok(delta);
        }
    }
    Err(domain("no representable delta meets the requested slack"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn info(mu: f64, sigma: f64) -> MomentInfo {
        MomentInfo::new(mu, sigma).unwrap()
    }

    #[test]
    fn two_point_examples() {
        let d = two_point(info(1.0, 1.0), 0.0).unwrap();
        assert_eq!(d.atoms()[0].value, 0.0);
        assert!((d.atoms()[0].mass - 0.5).abs() < 1e-15);
        assert!((d.atoms()[1].value - 2.0).abs() < 1e-15);
        let d = two_point(info(1.0, 1.0), 0.5).unwrap();
        assert!((d.atoms()[0].mass - 0.8).abs() < 1e-15);
        assert!((d.atoms()[1].value - 3.0).abs() < 1e-15);
        assert!((d.atoms()[1].mass - 0.2).abs() < 1e-15);
        let (mean, var) = d.moments();
        assert!((mean - 1.0).abs() < 1e-12 && (var - 1.0).abs() < 1e-12);
        let (opt, price) = d.myerson_opt();
        assert!((opt - 0.6).abs() < 1e-12);
        assert!((price - 3.0).abs() < 1e-12);
    }

    #[test]
    fn two_point_edge_cases() {
        assert!(two_point(info(1.0, 1.0), 1.0).is_err());
        assert!(two_point(info(1.0, 1.0), -0.1).is_err());
        let degenerate = two_point(info(2.0, 0.0), 0.3).unwrap();
        assert_eq!(degenerate.moments(), (2.0, 0.0));
    }

    #[test]
    fn rare_event_examples() {
        let d = rare_event(1.0, 1.0).unwrap();
        assert_eq!(d.atoms().len(), 1);
        let d = rare_event(1.0, 0.5).unwrap();
        let (mean, var) = d.moments();
        assert_eq!((mean, var), (1.0, 1.0));
        for eps in [0.01, 0.2, 0.7] {
            let (opt, price) = rare_event(2.0, eps).unwrap().myerson_opt();
            assert!((opt - 2.0).abs() < 1e-12);
            assert!((price - 2.0 / eps).abs() < 1e-9);
        }
        assert!(rare_event(1.0, 0.0).is_err());
        assert!(rare_event(1.0, 1.5).is_err());
    }

    #[test]
    fn yao_posterior_example() {
        let d = yao_posterior(info(1.0, 1.0)).unwrap();
        let c = 1.0 / (1.0 + 2f64.ln());
        assert!((d.atoms()[0].mass - (1.0 - c)).abs() < 1e-15);
        assert!((d.atoms()[1].value - 2.0).abs() < 1e-15);
        assert!((d.atoms()[1].mass - c / 2.0).abs() < 1e-15);
        assert!((d.total_mass() - 1.0).abs() < 1e-12);
        let (mean, var) = d.moments();
        assert!((mean - 1.0).abs() < 1e-9);
        assert!(var <= 1.0 + 1e-9);
        let (opt, price) = d.myerson_opt();
        assert!((opt - c).abs() < 1e-12);
        assert!((opt - 0.590616).abs() < 1e-6);
        assert_eq!(price, 1.0);
        assert!(yao_posterior(info(1.0, 0.0)).is_err());
    }

    #[test]
    fn perturbation_example() {
        let base = PiecewiseDistribution::point_mass(1.0).unwrap();
        let d = perturb_to_exact_sigma(&base, info(1.0, 1.0), 0.5).unwrap();
        let (mean, var) = d.moments();
        assert!((mean - 1.0).abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-9);
        // eps = 0.5 / 1.5: atom of mass delta * eps at 3.
        let top = d.atoms().last().unwrap();
        assert!((top.value - 3.0).abs() < 1e-12);
        assert!((top.mass - 0.5 / 3.0).abs() < 1e-12);
        assert!(perturb_to_exact_sigma(&base, info(1.0, 0.0), 0.5).is_err());
        assert!(perturb_to_exact_sigma(&base, info(2.0, 1.0), 0.5).is_err());
    }

    #[test]
    fn lower_instance_example() {
        let inst = multi_item_lower_instance(&[1.0, 1.0], 0.01).unwrap();
        let low = &inst.marginals[1];
        assert_eq!(
            low.atoms()[0],
            Atom {
                value: 0.0,
                mass: 0.5
            }
        );
        assert!((low.atoms()[1].value - 0.02).abs() < 1e-15);
        let (mean, var) = low.moments();
        assert!((mean - 0.01).abs() < 1e-12 && (var - 1e-4).abs() < 1e-12);
        assert!((inst.low_item_welfare() - 0.01).abs() < 1e-15);
        assert!(multi_item_lower_instance(&[1.0], 0.01).is_err());
        assert!(multi_item_lower_instance(&[0.5, 1.0], 0.01).is_err());
    }

    #[test]
    fn default_delta_meets_slack() {
        let delta = default_lower_instance_delta(1.0, 0.01).unwrap();
        assert!(lower_instance_slack(1.0, delta) < 0.01);
        assert!(lower_instance_slack(1.0, delta * 10.0) >= 0.01);
    }
}
