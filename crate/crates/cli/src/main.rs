mod builtin;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use robust_pricing::adversary::{
    grid_adversary_search_with, multi_item_lower_check, worst_case_ratio_deterministic,
    yao_lower_bound, AdversaryFamilies, McConfig,
};
use robust_pricing::auctions::{compare_with_myerson, AuctionEnvironment};
use robust_pricing::curves::{format_sig, CurveKind, CurveSpec};
use robust_pricing::distributions::default_lower_instance_delta;
use robust_pricing::math::{rho_deterministic, rho_randomized};
use robust_pricing::mechanisms::{
    evaluate_exact, evaluate_monte_carlo, log_lottery, robust_price, sell_bundle, sell_separate,
    PriceLottery,
};
use robust_pricing::{MomentInfo, SolverConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] robust_pricing::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error in {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
}

#[derive(Parser)]
#[command(
    name = "robust-pricing",
    version,
    about = "Robust pricing from mean and variance information"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Moments {
    /// Mean buyer value.
    #[arg(long)]
    mu: f64,
    /// Upper bound on the standard deviation of the buyer value.
    #[arg(long)]
    sigma: f64,
}

impl Moments {
    fn info(&self) -> Result<MomentInfo, CliError> {
        Ok(MomentInfo::new(self.mu, self.sigma)?)
    }
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a ratio curve over r (or over lambda for lambda_ratio and cutoff).
    Curve {
        /// One of rho_d, rho, lower, azar_micali, lambda_ratio, cutoff.
        which: String,
        #[arg(long, alias = "lambda-min")]
        r_min: Option<f64>,
        #[arg(long, alias = "lambda-max")]
        r_max: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[command(flatten)]
        output: Output,
    },
    /// Robust deterministic price and its guaranteed ratio.
    Price {
        #[command(flatten)]
        moments: Moments,
        #[command(flatten)]
        output: Output,
    },
    /// Log-lottery parameters and the guaranteed ratio.
    Lottery {
        #[command(flatten)]
        moments: Moments,
        #[command(flatten)]
        output: Output,
    },
    /// Revenue of a mechanism against a distribution, exactly or by Monte Carlo.
    Eval {
        /// robust-price, log-lottery, quarter, mean, price(p), or lottery JSON (inline or path).
        #[arg(long)]
        mechanism: String,
        /// two-point(x), rare(eps), yao, point, or distribution JSON (inline or path).
        #[arg(long)]
        dist: String,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        sigma: Option<f64>,
        /// Exact evaluation (the default).
        #[arg(long, conflicts_with = "mc")]
        exact: bool,
        /// Monte Carlo with this many samples.
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, env = "ROBUST_PRICING_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Ratio certificates.
    Certify {
        #[command(subcommand)]
        kind: Certify,
    },
    /// Lazy VCG with log-lottery reserves against the Myerson-optimal auction.
    Simulate {
        /// Environment JSON file: {"n":..,"k":..,"bidders":[{"family":..},..]}.
        env: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, env = "ROBUST_PRICING_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Subcommand)]
enum Certify {
    /// Lower bound 1 + ln(1 + r^2) from the rare-event mixture.
    Yao {
        #[command(flatten)]
        moments: Moments,
        #[command(flatten)]
        output: Output,
    },
    /// Worst case of a posted price.
    Det {
        #[arg(long)]
        p: f64,
        #[command(flatten)]
        moments: Moments,
        /// Distance of the two-point witness below the price (default 1e-6 mu).
        #[arg(long)]
        gap: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Brute-force search over extremal adversaries.
    Grid {
        #[arg(long)]
        mechanism: String,
        #[command(flatten)]
        moments: Moments,
        #[arg(long, default_value_t = 1000)]
        grid: usize,
        /// Comma-separated subset of two-point, rare, yao.
        #[arg(long, default_value = "two-point,rare")]
        families: String,
        #[command(flatten)]
        output: Output,
    },
    /// Multi-item lower-bound instance against separate or bundled log-lotteries.
    Thm5 {
        /// Coefficients of variation, largest first.
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<f64>,
        /// Welfare of the low items (default: from --eps).
        #[arg(long)]
        delta: Option<f64>,
        /// Target slack used to pick the default delta.
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, value_enum, default_value = "separate")]
        rule: Rule,
        /// Monte Carlo samples for the bundle rule.
        #[arg(long, default_value_t = 1_000_000)]
        rounds: u64,
        #[arg(long, env = "ROBUST_PRICING_SEED", default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Separate,
    Bundle,
}

fn optional_info(mu: Option<f64>, sigma: Option<f64>) -> Result<Option<MomentInfo>, CliError> {
    match (mu, sigma) {
        (Some(mu), Some(sigma)) => Ok(Some(MomentInfo::new(mu, sigma)?)),
        (None, None) => Ok(None),
        _ => Err(CliError::Usage(
            "--mu and --sigma must be given together".into(),
        )),
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn lottery_json(lottery: PriceLottery, ratio: f64) -> Value {
    let mut v = serde_json::to_value(lottery).expect("serializable lottery");
    v["ratio"] = json!(ratio);
    v
}

fn curve(
    which: &str,
    r_min: Option<f64>,
    r_max: Option<f64>,
    step: Option<f64>,
    format: Format,
    cfg: &SolverConfig,
) -> Result<String, CliError> {
    let kind = CurveKind::parse(which).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown curve {which:?}; expected one of rho_d, rho, lower, azar_micali, lambda_ratio, cutoff"
        ))
    })?;
    let (min, max, default_step) = kind.default_grid();
    let spec = CurveSpec::new(
        kind,
        r_min.unwrap_or(min),
        r_max.unwrap_or(max),
        step.unwrap_or(default_step),
    )?;
    let points = spec.points(cfg)?;
    Ok(match format {
        Format::Csv => spec.to_csv(&points),
        Format::Json => {
            let axis = if kind.over_lambda() { "lambda" } else { "r" };
            let rows: Vec<Value> = points
                .iter()
                .map(|&(x, y)| {
                    let value = if y.is_finite() {
                        json!(y)
                    } else {
                        json!(format_sig(y, 6))
                    };
                    json!({ axis: x, "value": value })
                })
                .collect();
            pretty(&json!({ "curve": kind.name(), "points": rows }))
        }
    })
}

fn families(spec: &str) -> Result<AdversaryFamilies, CliError> {
    let mut f = AdversaryFamilies {
        two_point: false,
        rare_event: false,
        yao: false,
    };
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match name {
            "two-point" | "two_point" => f.two_point = true,
            "rare" | "rare-event" => f.rare_event = true,
            "yao" => f.yao = true,
            _ => {
                return Err(CliError::Usage(format!(
                    "unknown adversary family {name:?}"
                )))
            }
        }
    }
    Ok(f)
}

fn certify(kind: &Certify, cfg: &SolverConfig) -> Result<String, CliError> {
    let cert = match kind {
        Certify::Yao { moments, .. } => yao_lower_bound(moments.info()?)?,
        Certify::Det {
            p, moments, gap, ..
        } => worst_case_ratio_deterministic(*p, moments.info()?, *gap)?,
        Certify::Grid {
            mechanism,
            moments,
            grid,
            families: fams,
            ..
        } => {
            let info = moments.info()?;
            let mech = builtin::mechanism(mechanism, Some(info), cfg)?;
            grid_adversary_search_with(mech, info, *grid, families(fams)?)?
        }
        Certify::Thm5 {
            r,
            delta,
            eps,
            rule,
            rounds,
            seed,
            ..
        } => {
            let first = *r
                .first()
                .ok_or_else(|| CliError::Usage("--r needs at least two values".into()))?;
            let delta = match delta {
                Some(d) => *d,
                None => default_lower_instance_delta(first, *eps)?,
            };
            let inst = robust_pricing::distributions::multi_item_lower_instance(r, delta)?;
            let mech = match rule {
                Rule::Separate => sell_separate(&inst.infos, cfg)?,
                Rule::Bundle => sell_bundle(&inst.infos, cfg)?,
            };
            let mc = McConfig {
                n_samples: *rounds,
                seed: *seed,
            };
            multi_item_lower_check(r, delta, &mech, mc)?
        }
    };
    Ok(pretty(&cert))
}

fn certify_output(kind: &Certify) -> &Output {
    match kind {
        Certify::Yao { output, .. }
        | Certify::Det { output, .. }
        | Certify::Grid { output, .. }
        | Certify::Thm5 { output, .. } => output,
    }
}

fn run(cli: Cli) -> Result<(String, Option<PathBuf>), CliError> {
    let cfg = SolverConfig::default();
    let (text, output) = match &cli.command {
        Command::Curve {
            which,
            r_min,
            r_max,
            step,
            format,
            output,
        } => (curve(which, *r_min, *r_max, *step, *format, &cfg)?, output),
        Command::Price { moments, output } => {
            let info = moments.info()?;
            let p = robust_price(info, &cfg)?;
            let ratio = rho_deterministic(info.cv(), &cfg)?;
            (pretty(&lottery_json(p, ratio)), output)
        }
        Command::Lottery { moments, output } => {
            let info = moments.info()?;
            let l = log_lottery(info, &cfg)?;
            let ratio = rho_randomized(info.cv(), &cfg)?;
            (pretty(&lottery_json(l, ratio)), output)
        }
        Command::Eval {
            mechanism,
            dist,
            mu,
            sigma,
            mc,
            seed,
            output,
            ..
        } => {
            let info = optional_info(*mu, *sigma)?;
            let mech = builtin::mechanism(mechanism, info, &cfg)?;
            let d = builtin::distribution(dist, info)?;
            let report = match mc {
                Some(n) => evaluate_monte_carlo(mech, &d, *n, *seed)?,
                None => evaluate_exact(mech, &d),
            };
            (pretty(&report), output)
        }
        Command::Certify { kind } => (certify(kind, &cfg)?, certify_output(kind)),
        Command::Simulate {
            env,
            rounds,
            seed,
            output,
        } => {
            let text = std::fs::read_to_string(env).map_err(|source| CliError::Io {
                path: env.display().to_string(),
                source,
            })?;
            let env = AuctionEnvironment::from_json(&text)?;
            (
                pretty(&compare_with_myerson(&env, *rounds, *seed, &cfg)?),
                output,
            )
        }
    };
    Ok((text, output.out.clone()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|(text, out)| match out {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
