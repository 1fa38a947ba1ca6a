use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Tolerance on total probability mass.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Relative tolerance under which two candidate revenues count as tied.
const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub value: f64,
    pub mass: f64,
}

/// A segment `[lo, hi)` carrying density `k / z^2`.
///
/// Inside a standalone equal-revenue piece the cdf reads `1 - k/z`, and every
/// posted price in the segment earns the same revenue `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReciprocalTail {
    pub lo: f64,
    pub hi: f64,
    pub k: f64,
}

impl ReciprocalTail {
    pub fn mass(&self) -> f64 {
        self.k * (1.0 / self.lo - 1.0 / self.hi)
    }

    /// Probability of the segment intersected with `[p, inf)`.
    fn mass_at_or_above(&self, p: f64) -> f64 {
        if p <= self.lo {
            self.mass()
        } else if p < self.hi {
            self.k * (1.0 / p - 1.0 / self.hi)
        } else {
            0.0
        }
    }

    /// Probability of the segment intersected with `(-inf, x]`.
    fn mass_at_or_below(&self, x: f64) -> f64 {
        if x >= self.hi {
            self.mass()
        } else if x > self.lo {
            self.k * (1.0 / self.lo - 1.0 / x)
        } else {
            0.0
        }
    }
}

/// Exact single-dimensional value distribution made of point masses and
/// reciprocal (equal-revenue) segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPiecewise", into = "RawPiecewise")]
pub struct PiecewiseDistribution {
    atoms: Vec<Atom>,
    tails: Vec<ReciprocalTail>,
}

#[derive(Serialize, Deserialize)]
struct RawPiecewise {
    atoms: Vec<(f64, f64)>,
    #[serde(default)]
    tails: Vec<(f64, f64, f64)>,
}

impl TryFrom<RawPiecewise> for PiecewiseDistribution {
    type Error = Error;

    fn try_from(raw: RawPiecewise) -> Result<Self> {
        Self::new(
            raw.atoms
                .into_iter()
                .map(|(value, mass)| Atom { value, mass })
                .collect(),
            raw.tails
                .into_iter()
                .map(|(lo, hi, k)| ReciprocalTail { lo, hi, k })
                .collect(),
        )
    }
}

impl From<PiecewiseDistribution> for RawPiecewise {
    fn from(d: PiecewiseDistribution) -> Self {
        RawPiecewise {
            atoms: d.atoms.iter().map(|a| (a.value, a.mass)).collect(),
            tails: d.tails.iter().map(|t| (t.lo, t.hi, t.k)).collect(),
        }
    }
}

impl PiecewiseDistribution {
    /// Validates and wraps explicit pieces.
    ///
    /// Atoms must be strictly increasing, segments sorted and non-overlapping,
    /// no atom may sit strictly inside a segment, and the total mass must be
    /// one within [`MASS_TOLERANCE`].
    pub fn new(atoms: Vec<Atom>, tails: Vec<ReciprocalTail>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if !(a.value.is_finite() && a.value >= 0.0) {
                return Err(invalid(
                    "distribution",
                    format!(
                        "atoms[{i}].value must be finite and nonnegative, got {}",
                        a.value
                    ),
                ));
            }
            if !(a.mass > 0.0 && a.mass <= 1.0 + MASS_TOLERANCE) {
                return Err(invalid(
                    "distribution",
                    format!("atoms[{i}].mass must lie in (0, 1], got {}", a.mass),
                ));
            }
            if i > 0 && atoms[i - 1].value >= a.value {
                return Err(invalid(
                    "distribution",
                    format!("atom values must be strictly increasing (atoms[{i}])"),
                ));
            }
        }
        for (i, t) in tails.iter().enumerate() {
            if !(t.lo.is_finite() && t.hi.is_finite() && t.lo > 0.0 && t.lo < t.hi) {
                return Err(invalid(
                    "distribution",
                    format!(
                        "tails[{i}] needs 0 < lo < hi < inf, got [{}, {})",
                        t.lo, t.hi
                    ),
                ));
            }
            if !(t.k.is_finite() && t.k > 0.0) {
                return Err(invalid(
                    "distribution",
                    format!("tails[{i}].K must be positive, got {}", t.k),
                ));
            }
            if i > 0 && tails[i - 1].hi > t.lo {
                return Err(invalid(
                    "distribution",
                    format!("tails[{i}] overlaps or precedes tails[{}]", i - 1),
                ));
            }
            if let Some(a) = atoms.iter().find(|a| a.value > t.lo && a.value < t.hi) {
                return Err(invalid(
                    "distribution",
                    format!("atom at {} lies inside tails[{i}]", a.value),
                ));
            }
        }
        let total: f64 =
            atoms.iter().map(|a| a.mass).sum::<f64>() + tails.iter().map(|t| t.mass()).sum::<f64>();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(
                "distribution",
                format!("total probability is {total}, expected 1"),
            ));
        }
        Ok(Self { atoms, tails })
    }

    /// Builds a distribution from unsorted pieces: drops empty atoms, merges
    /// atoms at equal values, sums overlapping segments and splits segments
    /// at interior atoms before validating.
    pub fn from_pieces(mut atoms: Vec<Atom>, tails: Vec<ReciprocalTail>) -> Result<Self> {
        atoms.retain(|a| a.mass > 0.0);
        atoms.sort_by(|a, b| a.value.total_cmp(&b.value));
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match merged.last_mut() {
                Some(last) if last.value == a.value => last.mass += a.mass,
                _ => merged.push(a),
            }
        }

        let tails: Vec<ReciprocalTail> = tails.into_iter().filter(|t| t.k > 0.0).collect();
        let mut cuts: Vec<f64> = tails.iter().flat_map(|t| [t.lo, t.hi]).collect();
        cuts.extend(
            merged
                .iter()
                .map(|a| a.value)
                .filter(|&v| tails.iter().any(|t| v > t.lo && v < t.hi)),
        );
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();

        let mut segments: Vec<ReciprocalTail> = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let k: f64 = tails
                .iter()
                .filter(|t| t.lo <= a && b <= t.hi)
                .map(|t| t.k)
                .sum();
            if k <= 0.0 {
                continue;
            }
            let atom_at_joint = merged.iter().any(|x| x.value == a);
            match segments.last_mut() {
                Some(prev) if prev.hi == a && prev.k == k && !atom_at_joint => prev.hi = b,
                _ => segments.push(ReciprocalTail { lo: a, hi: b, k }),
            }
        }
        Self::new(merged, segments)
    }

    /// Unit point mass at `value`.
    pub fn point_mass(value: f64) -> Result<Self> {
        Self::new(vec![Atom { value, mass: 1.0 }], Vec::new())
    }

    /// Convex combination of distributions with nonnegative weights summing to one.
    pub fn mixture(components: &[(f64, &PiecewiseDistribution)]) -> Result<Self> {
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid(
                "mixture",
                format!("weights must be nonnegative and sum to 1, got total {total}"),
            ));
        }
        let mut atoms = Vec::new();
        let mut tails = Vec::new();
        for (w, d) in components {
            atoms.extend(d.atoms.iter().map(|a| Atom {
                value: a.value,
                mass: w * a.mass,
            }));
            tails.extend(d.tails.iter().map(|t| ReciprocalTail { k: w * t.k, ..*t }));
        }
        Self::from_pieces(atoms, tails)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn tails(&self) -> &[ReciprocalTail] {
        &self.tails
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum::<f64>()
            + self.tails.iter().map(|t| t.mass()).sum::<f64>()
    }

    /// `P[X <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.value <= x)
            .map(|a| a.mass)
            .sum();
        let tails: f64 = self.tails.iter().map(|t| t.mass_at_or_below(x)).sum();
        (atoms + tails).min(1.0)
    }

    /// Left limit `F(x-) = P[X < x]`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.value < x)
            .map(|a| a.mass)
            .sum();
        let tails: f64 = self.tails.iter().map(|t| t.mass_at_or_below(x)).sum();
        (atoms + tails).min(1.0)
    }

    /// `P[X >= p] = 1 - F(p-)`: the probability that a posted price `p` sells.
    pub fn sell_probability(&self, p: f64) -> f64 {
        let atoms: f64 = self
            .atoms
            .iter()
            .filter(|a| a.value >= p)
            .map(|a| a.mass)
            .sum();
        let tails: f64 = self.tails.iter().map(|t| t.mass_at_or_above(p)).sum();
        (atoms + tails).min(1.0)
    }

    /// Revenue `p (1 - F(p-))` of a take-it-or-leave-it price.
    pub fn revenue_at(&self, p: f64) -> f64 {
        if p <= 0.0 {
            return 0.0;
        }
        p * self.sell_probability(p)
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|a| a.value * a.mass).sum::<f64>()
            + self
                .tails
                .iter()
                .map(|t| t.k * (t.hi / t.lo).ln())
                .sum::<f64>()
    }

    /// Exact `(mean, variance)`, integrating each segment in closed form.
    pub fn moments(&self) -> (f64, f64) {
        let mean = self.mean();
        let atoms: f64 = self
            .atoms
            .iter()
            .map(|a| a.mass * (a.value - mean).powi(2))
            .sum();
        // int_lo^hi (z - m)^2 k / z^2 dz
        let tails: f64 = self
            .tails
            .iter()
            .map(|t| {
                t.k * ((t.hi - t.lo) - 2.0 * mean * (t.hi / t.lo).ln()
                    + mean * mean * (1.0 / t.lo - 1.0 / t.hi))
            })
            .sum();
        (mean, (atoms + tails).max(0.0))
    }

    /// Optimal revenue `sup_p p (1 - F(p-))` and the lowest price attaining it.
    ///
    /// Revenue is piecewise monotone between atoms and linear in `p` against the
    /// density `k/z^2`, so the supremum is attained at an atom or a segment
    /// endpoint.
    pub fn myerson_opt(&self) -> (f64, f64) {
        let mut candidates: Vec<f64> = self.atoms.iter().map(|a| a.value).collect();
        candidates.extend(self.tails.iter().flat_map(|t| [t.lo, t.hi]));
        candidates.retain(|&p| p > 0.0);
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();

        let revenues: Vec<f64> = candidates.iter().map(|&p| self.revenue_at(p)).collect();
        let best = revenues.iter().copied().fold(0.0_f64, f64::max);
        if best <= 0.0 {
            return (0.0, 0.0);
        }
        let idx = revenues
            .iter()
            .position(|&r| r >= best * (1.0 - TIE_TOLERANCE))
            .unwrap_or(0);
        (revenues[idx], candidates[idx])
    }

    /// Inverse cdf at `u` in `[0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let mut cum = 0.0;
        let mut ai = 0;
        let mut ti = 0;
        let mut last = 0.0;
        loop {
            let take_atom = match (self.atoms.get(ai), self.tails.get(ti)) {
                (Some(a), Some(t)) => a.value <= t.lo,
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => return last,
            };
            if take_atom {
                let a = self.atoms[ai];
                cum += a.mass;
                last = a.value;
                if u < cum {
                    return a.value;
                }
                ai += 1;
            } else {
                let t = self.tails[ti];
                let m = t.mass();
                if u < cum + m {
                    let z = 1.0 / (1.0 / t.lo - (u - cum) / t.k);
                    return z.clamp(t.lo, t.hi);
                }
                cum += m;
                last = t.hi;
                ti += 1;
            }
        }
    }

    /// Largest point of the support.
    pub fn support_max(&self) -> f64 {
        let a = self.atoms.last().map_or(0.0, |a| a.value);
        let t = self.tails.last().map_or(0.0, |t| t.hi);
        a.max(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite distribution serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(value: f64, mass: f64) -> Atom {
        Atom { value, mass }
    }

    fn equal_revenue() -> PiecewiseDistribution {
        // Atom 1/2 at 0, density (1/2)/z^2 on [1, 2), atom 1/4 at 2.
        PiecewiseDistribution::new(
            vec![atom(0.0, 0.5), atom(2.0, 0.25)],
            vec![ReciprocalTail {
                lo: 1.0,
                hi: 2.0,
                k: 0.5,
            }],
        )
        .unwrap()
    }

    #[test]
    fn point_mass_moments_and_opt() {
        let d = PiecewiseDistribution::point_mass(1.0).unwrap();
        assert_eq!(d.moments(), (1.0, 0.0));
        assert_eq!(d.myerson_opt(), (1.0, 1.0));
        assert_eq!(d.cdf_left(1.0), 0.0);
        assert_eq!(d.cdf(1.0), 1.0);
    }

    #[test]
    fn rejects_bad_pieces() {
        assert!(PiecewiseDistribution::new(vec![atom(0.0, 0.5)], vec![]).is_err());
        assert!(PiecewiseDistribution::new(vec![atom(1.0, 0.5), atom(1.0, 0.5)], vec![]).is_err());
        assert!(PiecewiseDistribution::new(vec![atom(-1.0, 1.0)], vec![]).is_err());
        let inside = PiecewiseDistribution::new(
            vec![atom(0.0, 0.5), atom(1.5, 0.25)],
            vec![ReciprocalTail {
                lo: 1.0,
                hi: 2.0,
                k: 0.5,
            }],
        );
        assert!(inside.is_err());
        let zero_lo = PiecewiseDistribution::new(
            vec![atom(5.0, 0.5)],
            vec![ReciprocalTail {
                lo: 0.0,
                hi: 2.0,
                k: 0.5,
            }],
        );
        assert!(zero_lo.is_err());
    }

    #[test]
    fn cdf_is_right_continuous_with_left_limits() {
        let d = equal_revenue();
        assert_eq!(d.cdf(0.0), 0.5);
        assert_eq!(d.cdf_left(0.0), 0.0);
        assert!((d.cdf(1.5) - (1.0 - 0.5 / 1.5)).abs() < 1e-15);
        assert!((d.cdf_left(2.0) - 0.75).abs() < 1e-15);
        assert_eq!(d.cdf(2.0), 1.0);
        let mut prev = 0.0;
        for i in 0..300 {
            let x = i as f64 * 0.01;
            let c = d.cdf(x);
            assert!(c >= prev - 1e-15);
            prev = c;
        }
    }

    #[test]
    fn revenue_is_flat_on_the_segment() {
        let d = equal_revenue();
        for i in 0..50 {
            let p = 1.0 + i as f64 / 50.0;
            assert!((d.revenue_at(p) - 0.5).abs() < 1e-12);
        }
        let (opt, price) = d.myerson_opt();
        assert!((opt - 0.5).abs() < 1e-12);
        assert_eq!(price, 1.0);
    }

    #[test]
    fn moments_match_quadrature() {
        let d = equal_revenue();
        let (mean, var) = d.moments();
        // 0.5 * ln 2 + 0.5 from the atom at 2.
        assert!((mean - (0.5 * 2f64.ln() + 0.5)).abs() < 1e-14);
        let n = 200_000;
        let h = 1.0 / n as f64;
        let mut second = 0.25 * 4.0;
        for i in 0..n {
            let z = 1.0 + (i as f64 + 0.5) * h;
            second += z * z * 0.5 / (z * z) * h;
        }
        assert!((var - (second - mean * mean)).abs() < 1e-9);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let d = equal_revenue();
        assert_eq!(d.quantile(0.0), 0.0);
        assert_eq!(d.quantile(0.49), 0.0);
        for u in [0.5, 0.55, 0.6, 0.7, 0.74] {
            let z = d.quantile(u);
            assert!((d.cdf(z) - u).abs() < 1e-12, "u={u} z={z}");
        }
        assert_eq!(d.quantile(0.75), 2.0);
        assert_eq!(d.quantile(0.999), 2.0);
    }

    #[test]
    fn from_pieces_splits_and_sums_segments() {
        let d = PiecewiseDistribution::from_pieces(
            vec![
                atom(3.0, 0.25),
                atom(0.0, 0.5),
                atom(3.0, 0.05),
                atom(6.0, 0.0),
            ],
            vec![
                ReciprocalTail {
                    lo: 1.0,
                    hi: 4.0,
                    k: 0.2,
                },
                ReciprocalTail {
                    lo: 2.0,
                    hi: 4.0,
                    k: 0.1,
                },
                ReciprocalTail {
                    lo: 4.0,
                    hi: 8.0,
                    k: 0.2,
                },
            ],
        );
        // Masses: 0.2*(1 - 1/4) + 0.1*(1/2 - 1/4) + 0.2*(1/4 - 1/8) = 0.15 + 0.025 + 0.025
        let d = d.unwrap_or_else(|e| panic!("{e}"));
        assert_eq!(d.atoms().len(), 2);
        assert_eq!(d.tails().len(), 4);
        assert!((d.total_mass() - 1.0).abs() < 1e-15);
        assert!((d.atoms()[1].mass - 0.3).abs() < 1e-15);
        assert_eq!(
            d.tails()[2],
            ReciprocalTail {
                lo: 3.0,
                hi: 4.0,
                k: 0.30000000000000004
            }
        );
    }

    #[test]
    fn mixture_of_point_masses() {
        let a = PiecewiseDistribution::point_mass(1.0).unwrap();
        let b = PiecewiseDistribution::point_mass(3.0).unwrap();
        let m = PiecewiseDistribution::mixture(&[(0.25, &a), (0.75, &b)]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert!((m.mean() - 2.5).abs() < 1e-15);
        assert!(PiecewiseDistribution::mixture(&[(0.5, &a)]).is_err());
    }

    #[test]
    fn json_shape() {
        let d = equal_revenue();
        let s = d.to_json();
        assert_eq!(
            s,
            r#"{"atoms":[[0.0,0.5],[2.0,0.25]],"tails":[[1.0,2.0,0.5]]}"#
        );
        assert_eq!(PiecewiseDistribution::from_json(&s).unwrap(), d);
        let no_tails = PiecewiseDistribution::from_json(r#"{"atoms":[[1.0,1.0]]}"#).unwrap();
        assert_eq!(no_tails.moments(), (1.0, 0.0));
        let err = PiecewiseDistribution::from_json(r#"{"atoms":[[1.0,0.4]]}"#).unwrap_err();
        assert!(err.to_string().contains("total probability"));
    }
}
