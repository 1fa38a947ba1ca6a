//! Browser bindings for the ratio curves, the log-lottery explorer, and the
//! worst-case ratio of posted prices.
//!
//! The plain functions in [`demo`] carry the logic and are tested natively;
//! the `#[wasm_bindgen]` wrappers only convert errors.

use wasm_bindgen::prelude::*;

pub mod demo {
    use robust_pricing::adversary::{
        deterministic_ratio_closed_form, minimize_deterministic, yao_certificate,
    };
    use robust_pricing::curves::{CurveKind, CurveSpec};
    use robust_pricing::math::{lower_bound_ratio, rho_randomized};
    use robust_pricing::mechanisms::{log_lottery, PriceLottery};
    use robust_pricing::{Error, MomentInfo, Result, SolverConfig};

    const MAX_POINTS: usize = 100_000;

    /// Rows `[r, lower, rho, rho_d, azar_micali]` for `r = 0, step, ..., r_max`, flattened.
    pub fn ratio_curves(r_max: f64, step: f64) -> Result<Vec<f64>> {
        let spec = CurveSpec::new(CurveKind::Rho, 0.0, r_max, step)?;
        if spec.grid().len() > MAX_POINTS {
            return Err(Error::Domain(format!(
                "grid has more than {MAX_POINTS} points"
            )));
        }
        let cfg = SolverConfig::default();
        let mut out = Vec::new();
        for r in spec.grid() {
            out.push(r);
            for kind in [
                CurveKind::Lower,
                CurveKind::Rho,
                CurveKind::RhoD,
                CurveKind::AzarMicali,
            ] {
                out.push(kind.eval(r, &cfg)?);
            }
        }
        Ok(out)
    }

    /// Log-lottery for `(mu, sigma)` with its guarantees and a sampled cdf.
    #[derive(Debug, Clone, PartialEq)]
    pub struct LotteryView {
        pub pi1: f64,
        pub pi2: f64,
        /// Guaranteed ratio `rho(r)`.
        pub ratio: f64,
        /// Ratio against the hard mixture, between `lower` and `ratio`.
        pub mixture_ratio: f64,
        /// Lower bound `1 + ln(1 + r^2)`.
        pub lower: f64,
        pub det_price: f64,
        pub det_ratio: f64,
        /// Flattened `(price, cdf)` pairs across `[pi1, pi2]`.
        pub cdf: Vec<f64>,
    }

    pub fn lottery_view(mu: f64, sigma: f64, points: usize) -> Result<LotteryView> {
        let info = MomentInfo::new(mu, sigma)?;
        let cfg = SolverConfig::default();
        let lottery = log_lottery(info, &cfg)?;
        let (pi1, pi2) = lottery.support();
        let points = points.clamp(2, 10_000);
        let mut cdf = Vec::with_capacity(2 * points);
        for i in 0..points {
            let p = pi1 + (pi2 - pi1) * i as f64 / (points - 1) as f64;
            cdf.push(p);
            cdf.push(lottery.cdf(p));
        }
        let mixture_ratio = match lottery {
            PriceLottery::LogLottery { .. } => yao_certificate(lottery, info)?.ratio,
            _ => 1.0,
        };
        let (det_price, det_ratio) = minimize_deterministic(info, &cfg)?;
        Ok(LotteryView {
            pi1,
            pi2,
            ratio: rho_randomized(info.cv(), &cfg)?,
            mixture_ratio,
            lower: lower_bound_ratio(info.cv())?,
            det_price,
            det_ratio,
            cdf,
        })
    }

    /// Flattened `(p, sup ratio)` pairs for posted prices `p` across `(0, 1.2 mu]`.
    pub fn deterministic_ratio_curve(mu: f64, sigma: f64, points: usize) -> Result<Vec<f64>> {
        let info = MomentInfo::new(mu, sigma)?;
        let points = points.clamp(2, 10_000);
        let mut out = Vec::with_capacity(2 * points);
        for i in 1..=points {
            let p = 1.2 * mu * i as f64 / points as f64;
            out.push(p);
            out.push(deterministic_ratio_closed_form(p, info));
        }
        Ok(out)
    }
}

fn js(e: robust_pricing::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = ratioCurves)]
pub fn ratio_curves(r_max: f64, step: f64) -> Result<Vec<f64>, JsError> {
    demo::ratio_curves(r_max, step).map_err(js)
}

#[wasm_bindgen]
pub struct LotteryView {
    pub pi1: f64,
    pub pi2: f64,
    pub ratio: f64,
    #[wasm_bindgen(js_name = mixtureRatio)]
    pub mixture_ratio: f64,
    pub lower: f64,
    #[wasm_bindgen(js_name = detPrice)]
    pub det_price: f64,
    #[wasm_bindgen(js_name = detRatio)]
    pub det_ratio: f64,
    cdf: Vec<f64>,
}

#[wasm_bindgen]
impl LotteryView {
    #[wasm_bindgen(getter)]
    pub fn cdf(&self) -> Vec<f64> {
        self.cdf.clone()
    }
}

#[wasm_bindgen(js_name = lotteryView)]
pub fn lottery_view(mu: f64, sigma: f64, points: usize) -> Result<LotteryView, JsError> {
    let v = demo::lottery_view(mu, sigma, points).map_err(js)?;
    Ok(LotteryView {
        pi1: v.pi1,
        pi2: v.pi2,
        ratio: v.ratio,
        mixture_ratio: v.mixture_ratio,
        lower: v.lower,
        det_price: v.det_price,
        det_ratio: v.det_ratio,
        cdf: v.cdf,
    })
}

#[wasm_bindgen(js_name = deterministicRatioCurve)]
pub fn deterministic_ratio_curve(mu: f64, sigma: f64, points: usize) -> Result<Vec<f64>, JsError> {
    demo::deterministic_ratio_curve(mu, sigma, points).map_err(js)
}
