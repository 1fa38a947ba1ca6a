//! Worst-case responses and lower-bound certificates.
//!
//! A certificate pairs a mechanism with a concrete adversarial distribution
//! and records the benchmark `opt`, the mechanism's revenue `rev`, and their
//! ratio. For mixture arguments the benchmark is the expected optimum over the
//! mixture components rather than the optimum of the averaged distribution.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distributions::{
    lower_instance_slack, multi_item_lower_instance, rare_event, two_point, yao_posterior,
    PiecewiseDistribution, ProductDistribution, YaoMixture,
};
use crate::error::{domain, Result};
use crate::math::{bisect, MomentInfo, SolverConfig};
use crate::mechanisms::{MultiItemMechanism, PriceLottery};
use crate::report::{
    deserialize_params, deserialize_ratio, ratio, serialize_params, serialize_ratio,
};
use crate::stats::ordered_map;

/// Default distance of the two-point witness below the price, relative to `mu`.
pub const DEFAULT_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateTag {
    /// Two-point masses approaching the posted price from below.
    Lemma1Limit,
    /// The rare-event mixture and its equal-revenue posterior.
    YaoMixture,
    /// The multi-item instance with one heavy item and low-welfare rare events.
    Thm5Multi,
    /// Brute-force search over the extremal families.
    GridSearch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MechanismDesc {
    Lottery(PriceLottery),
    MultiItem(MultiItemMechanism),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AdversaryDesc {
    Single(PiecewiseDistribution),
    Product(ProductDistribution),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCertificate {
    /// `None` when the bound holds against every mechanism.
    pub mechanism: Option<MechanismDesc>,
    pub adversary: AdversaryDesc,
    pub opt: f64,
    pub rev: f64,
    #[serde(
        serialize_with = "serialize_ratio",
        deserialize_with = "deserialize_ratio"
    )]
    pub ratio: f64,
    pub tag: CertificateTag,
    /// Construction parameters; infinite entries serialize as `"inf"`.
    #[serde(
        serialize_with = "serialize_params",
        deserialize_with = "deserialize_params"
    )]
    pub params: BTreeMap<String, f64>,
}

fn params<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Supremum of `OPT(F) / REV(p; F)` over all distributions with mean `mu` and
/// standard deviation at most `sigma`, for a posted price `p`.
pub fn deterministic_ratio_closed_form(p: f64, info: MomentInfo) -> f64 {
    let MomentInfo { mu, .. } = info;
    let var = info.variance();
    if var == 0.0 {
        return if p <= mu { mu / p } else { f64::INFINITY };
    }
    if p >= mu {
        return f64::INFINITY;
    }
    let gap = mu - p;
    (1.0 + var / (gap * gap)).max(mu / p + var / (p * gap))
}

/// Closed-form worst case of a posted price, with a concrete two-point witness
/// whose lower atom sits `gap` below the price.
///
/// `opt` and `rev` are the limits of the witness's optimum and revenue as the
/// lower atom tends to `p` from below; the witness's own ratio is stored in
/// `params["witness_ratio"]`.
pub fn worst_case_ratio_deterministic(
    p: f64,
    info: MomentInfo,
    gap: Option<f64>,
) -> Result<RatioCertificate> {
    if !(p.is_finite() && p > 0.0) {
        return Err(domain(format!("price must be positive, got {p}")));
    }
    let gap = gap.unwrap_or(DEFAULT_GAP * info.mu);
    if !(gap.is_finite() && gap > 0.0) {
        return Err(domain(format!("gap must be positive, got {gap}")));
    }
    let mech = PriceLottery::Deterministic { p };
    let closed = deterministic_ratio_closed_form(p, info);
    let var = info.variance();

    let (witness, opt, rev) = if var == 0.0 || p > info.mu {
        let d = PiecewiseDistribution::point_mass(info.mu)?;
        let rev = d.revenue_at(p);
        (d, info.mu, rev)
    } else if p == info.mu {
        let d = two_point(info, (p - gap).max(0.0))?;
        (d, info.mu, 0.0)
    } else {
        let x = (p - gap).max(0.0);
        let d = two_point(info, x)?;
        let g = info.mu - p;
        let sell = g * g / (var + g * g);
        let y = info.mu + var / g;
        (d, p.max(sell * y), p * sell)
    };
    let (w_opt, _) = witness.myerson_opt();
    let witness_ratio = ratio(w_opt, witness.revenue_at(p));
    let rev = if closed.is_infinite() { 0.0 } else { rev };
    Ok(RatioCertificate {
        mechanism: Some(MechanismDesc::Lottery(mech)),
        adversary: AdversaryDesc::Single(witness),
        opt,
        rev,
        ratio: if closed.is_infinite() {
            closed
        } else {
            opt / rev
        },
        tag: CertificateTag::Lemma1Limit,
        params: params([
            ("p", p),
            ("mu", info.mu),
            ("sigma", info.sigma),
            ("gap", gap),
            ("witness_ratio", witness_ratio),
        ]),
    })
}

/// Price minimizing the closed-form worst case: the root of
/// `(mu - p)^3 = sigma^2 (2p - mu)` on `[mu/2, mu]`, with its ratio.
pub fn minimize_deterministic(info: MomentInfo, cfg: &SolverConfig) -> Result<(f64, f64)> {
    if info.sigma == 0.0 {
        return Ok((info.mu, 1.0));
    }
    let MomentInfo { mu, .. } = info;
    let var = info.variance();
    let scaled = SolverConfig::new(cfg.abs_tol * mu, cfg.max_iterations)?;
    let p = bisect(
        |p| var * (2.0 * p - mu) - (mu - p).powi(3),
        0.5 * mu,
        mu,
        &scaled,
    )?;
    Ok((p, deterministic_ratio_closed_form(p, info)))
}

/// Lower bound `1 + ln(1 + r^2)` valid for every mechanism, certified by the
/// rare-event mixture: each component has optimum `mu`, while no mechanism
/// earns more than `OPT(posterior) = c mu` on the average.
pub fn yao_lower_bound(info: MomentInfo) -> Result<RatioCertificate> {
    let YaoMixture { eps0, c } = YaoMixture::new(info)?;
    let posterior = yao_posterior(info)?;
    let (rev, _) = posterior.myerson_opt();
    Ok(RatioCertificate {
        mechanism: None,
        adversary: AdversaryDesc::Single(posterior),
        opt: info.mu,
        rev,
        ratio: ratio(info.mu, rev),
        tag: CertificateTag::YaoMixture,
        params: params([
            ("mu", info.mu),
            ("sigma", info.sigma),
            ("eps0", eps0),
            ("c", c),
        ]),
    })
}

/// Ratio of a specific lottery against the rare-event mixture: benchmark `mu`,
/// revenue `REV(mech; posterior)`.
pub fn yao_certificate(mech: PriceLottery, info: MomentInfo) -> Result<RatioCertificate> {
    let YaoMixture { eps0, c } = YaoMixture::new(info)?;
    let posterior = yao_posterior(info)?;
    let rev = mech.revenue_exact(&posterior);
    Ok(RatioCertificate {
        mechanism: Some(MechanismDesc::Lottery(mech)),
        adversary: AdversaryDesc::Single(posterior),
        opt: info.mu,
        rev,
        ratio: ratio(info.mu, rev),
        tag: CertificateTag::YaoMixture,
        params: params([
            ("mu", info.mu),
            ("sigma", info.sigma),
            ("eps0", eps0),
            ("c", c),
        ]),
    })
}

/// Families scanned by [`grid_adversary_search_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AdversaryFamilies {
    /// Exact-variance two-point masses with lower atom on a grid of `[0, mu)`.
    pub two_point: bool,
    /// Rare events with probability on a grid of `[1/(1+r^2), 1]`.
    pub rare_event: bool,
    /// The rare-event mixture, scored against the benchmark `mu`.
    pub yao: bool,
}

impl Default for AdversaryFamilies {
    fn default() -> Self {
        Self {
            two_point: true,
            rare_event: true,
            yao: false,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Candidate {
    TwoPoint(f64),
    Rare(f64),
    Yao,
}

/// Largest ratio over two-point and rare-event adversaries on a `grid_size` grid.
pub fn grid_adversary_search(
    mech: PriceLottery,
    info: MomentInfo,
    grid_size: usize,
) -> Result<RatioCertificate> {
    grid_adversary_search_with(mech, info, grid_size, AdversaryFamilies::default())
}

/// Largest ratio over the chosen families; ties go to the earliest candidate
/// (two-point by increasing `x`, then rare events by increasing `eps`, then the mixture).
pub fn grid_adversary_search_with(
    mech: PriceLottery,
    info: MomentInfo,
    grid_size: usize,
    families: AdversaryFamilies,
) -> Result<RatioCertificate> {
    if grid_size == 0 {
        return Err(domain("grid size must be positive"));
    }
    mech.validate()?;
    let mut candidates = Vec::new();
    if families.two_point {
        candidates.extend(
            (0..grid_size).map(|i| Candidate::TwoPoint(info.mu * i as f64 / grid_size as f64)),
        );
    }
    if families.rare_event {
        let r2 = info.cv() * info.cv();
        let eps0 = 1.0 / (1.0 + r2);
        if grid_size == 1 || eps0 >= 1.0 {
            candidates.push(Candidate::Rare(eps0));
        } else {
            candidates.extend(
                (0..grid_size).map(|j| {
                    Candidate::Rare(eps0 + (1.0 - eps0) * j as f64 / (grid_size - 1) as f64)
                }),
            );
        }
    }
    if families.yao && info.sigma > 0.0 {
        candidates.push(Candidate::Yao);
    }
    if candidates.is_empty() {
        return Err(domain("no adversary family selected"));
    }

    let scored: Vec<Result<(f64, f64, PiecewiseDistribution)>> = ordered_map(&candidates, |c| {
        let (d, opt) = match *c {
            Candidate::TwoPoint(x) => {
                let d = two_point(info, x)?;
                let opt = d.myerson_opt().0;
                (d, opt)
            }
            Candidate::Rare(eps) => {
                let d = rare_event(info.mu, eps.min(1.0))?;
                let opt = d.myerson_opt().0;
                (d, opt)
            }
            Candidate::Yao => (yao_posterior(info)?, info.mu),
        };
        let rev = mech.revenue_exact(&d);
        Ok((opt, rev, d))
    });

    let mut best: Option<(usize, f64, f64, f64, PiecewiseDistribution)> = None;
    for (i, s) in scored.into_iter().enumerate() {
        let (opt, rev, d) = s?;
        let r = ratio(opt, rev);
        if best.as_ref().is_none_or(|b| r > b.1) {
            best = Some((i, r, opt, rev, d));
        }
    }
    let (i, r, opt, rev, d) = best.expect("non-empty candidate list");
    let (family, value) = match candidates[i] {
        Candidate::TwoPoint(x) => (0.0, x),
        Candidate::Rare(eps) => (1.0, eps),
        Candidate::Yao => (2.0, f64::NAN),
    };
    let mut p = params([
        ("mu", info.mu),
        ("sigma", info.sigma),
        ("grid_size", grid_size as f64),
        ("family", family),
    ]);
    match candidates[i] {
        Candidate::TwoPoint(_) => {
            p.insert("x".into(), value);
        }
        Candidate::Rare(_) => {
            p.insert("eps".into(), value);
        }
        Candidate::Yao => {}
    }
    Ok(RatioCertificate {
        mechanism: Some(MechanismDesc::Lottery(mech)),
        adversary: AdversaryDesc::Single(d),
        opt,
        rev,
        ratio: r,
        tag: CertificateTag::GridSearch,
        params: p,
    })
}

/// Monte Carlo budget for evaluating bundle mechanisms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_samples: 1_000_000,
            seed: 0,
        }
    }
}

/// Evaluates `mech` on the multi-item lower-bound instance.
///
/// The benchmark is `mu_1 + delta`: the expected optimum of the heavy item over
/// the rare-event mixture plus the welfare of the low items, each of which a
/// posted price extracts in full. `params["floor"]` holds the theoretical
/// guarantee `1 + ln(1 + r_1^2) - delta ln(1 + r_1^2)(1 + ln(1 + r_1^2))^2`.
/// Separate sales are evaluated exactly; bundles by Monte Carlo.
pub fn multi_item_lower_check(
    r_values: &[f64],
    delta: f64,
    mech: &MultiItemMechanism,
    mc: McConfig,
) -> Result<RatioCertificate> {
    let inst = multi_item_lower_instance(r_values, delta)?;
    let product = inst.product();
    if let Some(m) = mech.items() {
        if m != r_values.len() {
            return Err(domain(format!(
                "mechanism sells {m} items but the instance has {}",
                r_values.len()
            )));
        }
    }
    let mut p = params([("delta", delta), ("items", r_values.len() as f64)]);
    for (j, r) in r_values.iter().enumerate() {
        p.insert(format!("r{}", j + 1), *r);
    }
    let rev = match mech {
        MultiItemMechanism::Separate { .. } => mech.revenue_exact(&product)?,
        MultiItemMechanism::FullBundle { .. } => {
            let est = mech.revenue_monte_carlo(&product, mc.n_samples, mc.seed)?;
            p.insert("std_error".into(), est.std_error);
            p.insert("n_samples".into(), mc.n_samples as f64);
            p.insert("seed".into(), mc.seed as f64);
            est.estimate
        }
    };
    let r1 = r_values[0];
    let l = (r1 * r1).ln_1p();
    p.insert("floor".into(), 1.0 + l - lower_instance_slack(r1, delta));
    let opt = inst.infos[0].mu + inst.low_item_welfare();
    Ok(RatioCertificate {
        mechanism: Some(MechanismDesc::MultiItem(mech.clone())),
        adversary: AdversaryDesc::Product(product),
        opt,
        rev,
        ratio: ratio(opt, rev),
        tag: CertificateTag::Thm5Multi,
        params: p,
    })
}
