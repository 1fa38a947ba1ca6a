//! Named mechanisms and adversaries accepted on the command line.

use std::path::Path;

use robust_pricing::distributions::{
    rare_event, two_point, yao_posterior, Marginal, PiecewiseDistribution,
};
use robust_pricing::mechanisms::{
    log_lottery, price_at_mean, quarter_lottery, robust_price, PriceLottery,
};
use robust_pricing::{MomentInfo, SolverConfig};

use crate::CliError;

/// Splits `name(a, b)` or `name:a` into the name and its numeric arguments.
fn parse_call(spec: &str) -> Result<(String, Vec<f64>), CliError> {
    let spec = spec.trim();
    let (name, args) = if let Some(open) = spec.find('(') {
        let close = spec
            .strip_suffix(')')
            .ok_or_else(|| CliError::Usage(format!("missing ')' in {spec:?}")))?;
        (&spec[..open], &close[open + 1..])
    } else if let Some((name, args)) = spec.split_once(':') {
        (name, args)
    } else {
        (spec, "")
    };
    let args = args
        .split(',')
        .map(str::trim)
        .filter(|a| !a.is_empty())
        .map(|a| {
            a.parse::<f64>()
                .map_err(|_| CliError::Usage(format!("argument {a:?} of {name:?} is not a number")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name.trim().to_ascii_lowercase(), args))
}

fn expect_args(name: &str, args: &[f64], n: usize) -> Result<(), CliError> {
    if args.len() != n {
        return Err(CliError::Usage(format!(
            "{name} takes {n} argument(s), got {}",
            args.len()
        )));
    }
    Ok(())
}

/// Reads JSON from an inline literal (starting with `{`) or a file path.
pub fn read_json_arg(spec: &str) -> Result<Option<String>, CliError> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        return Ok(Some(spec.to_string()));
    }
    let path = Path::new(spec);
    if path.is_file() {
        return std::fs::read_to_string(path)
            .map(Some)
            .map_err(|source| CliError::Io {
                path: spec.to_string(),
                source,
            });
    }
    Ok(None)
}

pub fn parse_json<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("{what}: {e}")))
}

/// `robust-price`, `log-lottery`, `quarter`, `mean`, `price(p)`, or lottery JSON.
pub fn mechanism(
    spec: &str,
    info: Option<MomentInfo>,
    cfg: &SolverConfig,
) -> Result<PriceLottery, CliError> {
    if let Some(text) = read_json_arg(spec)? {
        return parse_json("mechanism", &text);
    }
    let (name, args) = parse_call(spec)?;
    if name == "price" {
        expect_args(&name, &args, 1)?;
        let lottery = PriceLottery::Deterministic { p: args[0] };
        lottery.validate()?;
        return Ok(lottery);
    }
    let info =
        info.ok_or_else(|| CliError::Usage(format!("mechanism {name:?} needs --mu and --sigma")))?;
    expect_args(&name, &args, 0)?;
    Ok(match name.as_str() {
        "robust-price" | "det" | "deterministic" => robust_price(info, cfg)?,
        "log-lottery" | "lottery" => log_lottery(info, cfg)?,
        "quarter" | "quarter-lottery" => quarter_lottery(info),
        "mean" | "price-at-mean" => price_at_mean(info),
        _ => {
            return Err(CliError::Usage(format!(
                "unknown mechanism {spec:?}; expected robust-price, log-lottery, quarter, mean, price(p), or lottery JSON"
            )))
        }
    })
}

/// `two-point(x)`, `rare(eps)`, `yao`, `point`, or distribution JSON.
pub fn distribution(spec: &str, info: Option<MomentInfo>) -> Result<Marginal, CliError> {
    if let Some(text) = read_json_arg(spec)? {
        let m: Marginal = parse_json("distribution", &text)?;
        if let Marginal::Analytic(a) = &m {
            a.validate("distribution")?;
        }
        return Ok(m);
    }
    let (name, args) = parse_call(spec)?;
    let info =
        info.ok_or_else(|| CliError::Usage(format!("adversary {name:?} needs --mu and --sigma")))?;
    let d = match name.as_str() {
        "two-point" | "two_point" => {
            expect_args(&name, &args, 1)?;
            two_point(info, args[0])?
        }
        "rare" | "rare-event" => {
            expect_args(&name, &args, 1)?;
            rare_event(info.mu, args[0])?
        }
        "yao" => {
            expect_args(&name, &args, 0)?;
            yao_posterior(info)?
        }
        "point" => {
            expect_args(&name, &args, 0)?;
            PiecewiseDistribution::point_mass(info.mu)?
        }
        _ => {
            return Err(CliError::Usage(format!(
                "unknown adversary {spec:?}; expected two-point(x), rare(eps), yao, point, or distribution JSON"
            )))
        }
    };
    Ok(Marginal::Piecewise(d))
}
