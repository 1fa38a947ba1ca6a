//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime budget.
//!
//! Run with `cargo test -p robust-pricing --test acceptance`. The process
//! exits nonzero if any criterion fails or overruns its budget.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use robust_pricing::adversary::{
    deterministic_ratio_closed_form, minimize_deterministic, multi_item_lower_check,
    worst_case_ratio_deterministic, yao_certificate, McConfig,
};
use robust_pricing::auctions::{compare_with_myerson, AuctionEnvironment};
use robust_pricing::distributions::{
    multi_item_lower_instance, perturb_to_exact_sigma, rare_event, two_point, yao_posterior,
    AnalyticDistribution, Marginal, PiecewiseDistribution, ProductDistribution,
};
use robust_pricing::math::{
    azar_micali_rho, lambda_regular_ratio, lower_bound_ratio, regularity_lottery_cutoff,
    rho_deterministic, rho_randomized,
};
use robust_pricing::mechanisms::{
    evaluate_exact, log_lottery, price_at_mean, quarter_lottery, robust_price, sell_bundle,
    sell_separate, PriceLottery,
};
use robust_pricing::{MomentInfo, SolverConfig};

type Outcome = Result<String, String>;
type Run = Box<dyn Fn() -> Outcome>;
type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn info(mu: f64, r: f64) -> MomentInfo {
    MomentInfo::new(mu, r * mu).expect("valid moments")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// `0, 0.01, ..., 2`.
fn r_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 / 100.0).collect()
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|err| err.to_string())
}

// 1. Plotted ratio curves.
fn figure_values() -> Outcome {
    const TOL: f64 = 1e-3;
    // Reference coordinates of the published curves.
    let reference = [
        (
            "rho_d",
            [
                (0.5, 2.68262),
                (1.0, 5.86454),
                (1.5, 10.9292),
                (2.0, 17.9574),
            ],
        ),
        (
            "rho",
            [
                (0.5, 2.44026),
                (1.0, 3.5994),
                (1.5, 4.51553),
                (2.0, 5.23387),
            ],
        ),
        (
            "lower",
            [
                (0.5, 1.22314),
                (1.0, 1.69315),
                (1.5, 2.17865),
                (2.0, 2.60944),
            ],
        ),
    ];
    let c = cfg();
    let mut curves = Vec::new();
    for r in r_grid() {
        curves.push((
            r,
            e(rho_deterministic(r, &c))?,
            e(rho_randomized(r, &c))?,
            e(lower_bound_ratio(r))?,
        ));
    }
    let mut worst: f64 = 0.0;
    for (name, points) in reference {
        for (r, expected) in points {
            let row = curves
                .iter()
                .find(|row| (row.0 - r).abs() < 1e-9)
                .expect("grid point");
            let got = match name {
                "rho_d" => row.1,
                "rho" => row.2,
                _ => row.3,
            };
            worst = worst.max((got - expected).abs());
            ensure((got - expected).abs() <= TOL, || {
                format!("{name}({r}) = {got}, expected {expected}")
            })?;
        }
    }
    Ok(format!(
        "12 reference values, max deviation {worst:.2e} (tol {TOL:.0e})"
    ))
}

// 2. Quadratic sandwiches.
fn sandwiches() -> Outcome {
    let c = cfg();
    for r in r_grid() {
        let r2 = r * r;
        let rd = e(rho_deterministic(r, &c))?;
        ensure(1.0 + 4.0 * r2 <= rd && rd <= 2.0 + 4.0 * r2, || {
            format!("rho_d({r}) = {rd}")
        })?;
        if r > 0.0 {
            let am = e(azar_micali_rho(r, &c))?;
            let q = 27.0 / 4.0 * r2;
            ensure(1.0 + q <= am && am <= 3.0 + q, || {
                format!("azar_micali({r}) = {am}")
            })?;
        }
    }
    Ok("201 grid points for rho_d, 200 for azar_micali".into())
}

// 3. Log-lottery moment identities and maximin floor.
fn lottery_identities() -> Outcome {
    const RESIDUAL: f64 = 1e-9;
    const FLOOR_TOL: f64 = 1e-9;
    let c = cfg();
    let mut worst_residual: f64 = 0.0;
    let mut checks = 0;
    for mu in [0.5, 1.0, 2.0] {
        for r in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let i = info(mu, r);
            let l = e(log_lottery(i, &c))?;
            let PriceLottery::LogLottery { pi1, pi2 } = l else {
                return Err(format!("({mu}, {r}) did not yield a log-lottery"));
            };
            let first = rel(pi1 * (1.0 + (pi2 / pi1).ln()), mu);
            let second = rel(pi1 * (2.0 * pi2 - pi1), mu * mu + i.variance());
            worst_residual = worst_residual.max(first).max(second);
            ensure(first <= RESIDUAL && second <= RESIDUAL, || {
                format!("({mu}, {r}): residuals {first:.2e}, {second:.2e}")
            })?;
            let mut adversaries: Vec<PiecewiseDistribution> = e((0..100)
                .map(|k| two_point(i, mu * k as f64 / 100.0))
                .collect())?;
            adversaries.push(e(yao_posterior(i))?);
            for (k, d) in adversaries.iter().enumerate() {
                let rev = l.revenue_exact(d);
                checks += 1;
                ensure(rev >= pi1 - FLOOR_TOL, || {
                    format!("({mu}, {r}) adversary {k}: revenue {rev} < pi1 {pi1}")
                })?;
            }
        }
    }
    Ok(format!(
        "15 pairs, max residual {worst_residual:.2e}, {checks} floor checks"
    ))
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    while b - a > tol {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

// 4. Optimal posted price.
fn optimal_posted_price() -> Outcome {
    const TOL: f64 = 1e-6;
    let c = cfg();
    let mut worst: f64 = 0.0;
    for mu in [1.0, 2.0] {
        for r in [0.25, 0.5, 1.0, 1.5, 2.0] {
            let i = info(mu, r);
            let PriceLottery::Deterministic { p } = e(robust_price(i, &c))? else {
                return Err("robust price is not deterministic".into());
            };
            let cert = e(worst_case_ratio_deterministic(p, i, None))?;
            let rd = e(rho_deterministic(r, &c))?;
            ensure((cert.ratio - rd).abs() <= TOL, || {
                format!("({mu}, {r}): ratio {} vs rho_d {rd}", cert.ratio)
            })?;
            let brute = golden_section(
                |q| deterministic_ratio_closed_form(q, i),
                1e-9 * mu,
                mu,
                1e-11,
            );
            let (p_star, _) = e(minimize_deterministic(i, &c))?;
            worst = worst.max((brute - p).abs());
            ensure(
                (brute - p).abs() <= TOL && (p_star - p).abs() <= TOL,
                || format!("({mu}, {r}): golden section {brute}, robust price {p}"),
            )?;
        }
    }
    Ok(format!("10 cases, max |p_golden - p*| = {worst:.2e}"))
}

// 5. Log-lottery ratio against the rare-event mixture.
fn squeeze() -> Outcome {
    const TOL: f64 = 1e-6;
    let c = cfg();
    for r in r_grid().into_iter().skip(1) {
        let i = info(1.0, r);
        let ratio = e(yao_certificate(e(log_lottery(i, &c))?, i))?.ratio;
        let lo = e(lower_bound_ratio(r))?;
        let hi = e(rho_randomized(r, &c))?;
        ensure(lo - TOL <= ratio && ratio <= hi + TOL, || {
            format!("r = {r}: {ratio} outside [{lo}, {hi}]")
        })?;
    }
    Ok("200 grid points inside [1 + ln(1 + r^2), rho(r)]".into())
}

// 6. Quarter lottery.
fn quarter() -> Outcome {
    let mut worst = f64::INFINITY;
    for (mu, r) in [(1.0, 1.0), (1.0, 0.3), (2.0, 2.0), (0.5, 4.0)] {
        let i = info(mu, r);
        let q = quarter_lottery(i);
        for k in 0..200 {
            let d = e(two_point(i, mu * k as f64 / 200.0))?;
            let (opt, _) = d.myerson_opt();
            let share = q.revenue_exact(&d) / opt;
            worst = worst.min(share);
            ensure(share >= 0.25, || {
                format!("({mu}, {r}) x index {k}: REV/OPT = {share}")
            })?;
        }
    }
    let i = info(1.0, 1.0);
    let rev = quarter_lottery(i).revenue_exact(&e(two_point(i, 0.0))?);
    ensure(rev == 0.625, || {
        format!("worked example revenue {rev}, expected 0.625")
    })?;
    Ok(format!(
        "min REV/OPT {worst:.4} over 800 adversaries; worked example 0.625"
    ))
}

// 7. Separate sales and bundling.
fn multi_item() -> Outcome {
    const SAMPLES: u64 = 1_000_000;
    let c = cfg();
    let rho1 = e(rho_randomized(1.0, &c))?;
    let unit = info(1.0, 1.0);
    let families: [(&str, Marginal); 2] = [
        ("two-point", e(two_point(unit, 0.0))?.into()),
        (
            "exponential",
            AnalyticDistribution::Exponential { rate: 1.0 }.into(),
        ),
    ];
    let mut details = Vec::new();
    for m in [2usize, 4, 9] {
        let infos = vec![unit; m];
        let separate = e(sell_separate(&infos, &c))?;
        let bundle = e(sell_bundle(&infos, &c))?;
        let bundle_floor = m as f64 / e(rho_randomized(1.0 / (m as f64).sqrt(), &c))?;
        for (name, marginal) in &families {
            let product = e(ProductDistribution::new(vec![marginal.clone(); m]))?;
            let sep = e(separate.revenue_exact(&product))?;
            let floor = m as f64 / rho1;
            ensure(sep >= floor - 1e-9, || {
                format!("m = {m}, {name}: separate {sep} < {floor}")
            })?;
            let est = e(bundle.revenue_monte_carlo(&product, SAMPLES, m as u64))?;
            let relative_se = est.std_error / est.estimate;
            let needed = bundle_floor * (1.0 - 4.0 * relative_se);
            ensure(est.estimate >= needed, || {
                format!("m = {m}, {name}: bundle {} < {needed}", est.estimate)
            })?;
            details.push(format!(
                "m={m} {name} bundle {:.3}>={:.3}",
                est.estimate, bundle_floor
            ));
        }
    }
    Ok(details.join(", "))
}

fn separate_lower_check() -> Result<f64, String> {
    let (r, delta) = ([1.0, 1.0], 1e-4);
    let inst = e(multi_item_lower_instance(&r, delta))?;
    let mech = e(sell_separate(&inst.infos, &cfg()))?;
    Ok(e(multi_item_lower_check(
        &r,
        delta,
        &mech,
        McConfig::default(),
    ))?
    .ratio)
}

// 8. Multi-item lower bound.
fn multi_item_lower() -> Outcome {
    let ratio = separate_lower_check()?;
    let needed = 1.0 + 2f64.ln() - 0.01;
    ensure(ratio >= needed, || format!("ratio {ratio} < {needed}"))?;
    Ok(format!("ratio {ratio:.5} >= {needed:.5}"))
}

// 9. Exact-variance perturbation.
fn perturbation() -> Outcome {
    const TOL: f64 = 0.01;
    let c = cfg();
    let target = info(1.0, 1.0);
    let pairs: Vec<(&str, PiecewiseDistribution, PriceLottery)> = vec![
        (
            "two-point/log-lottery",
            e(two_point(info(1.0, 0.5), 0.2))?,
            e(log_lottery(target, &c))?,
        ),
        (
            "point/robust price",
            e(PiecewiseDistribution::point_mass(1.0))?,
            e(robust_price(target, &c))?,
        ),
        (
            "rare event/quarter",
            e(rare_event(1.0, 0.8))?,
            quarter_lottery(target),
        ),
    ];
    let ratio = |d: &PiecewiseDistribution, m: PriceLottery| d.myerson_opt().0 / m.revenue_exact(d);
    let mut details = Vec::new();
    for (name, d, m) in pairs {
        let base = ratio(&d, m);
        let mut changes = Vec::new();
        for delta in [1e-2, 1e-4, 1e-6] {
            let p = e(perturb_to_exact_sigma(&d, target, delta))?;
            let (_, var) = p.moments();
            ensure((var - target.variance()).abs() <= 1e-9, || {
                format!("{name}, delta {delta}: variance {var}")
            })?;
            changes.push((ratio(&p, m) - base).abs());
        }
        let last = changes[2];
        ensure(last <= TOL, || {
            format!("{name}: ratio moved by {last} at delta 1e-6")
        })?;
        ensure(changes.windows(2).all(|w| w[1] <= w[0] + 1e-12), || {
            format!("{name}: changes {changes:?} do not shrink with delta")
        })?;
        details.push(format!("{name} {last:.1e}"));
    }
    Ok(format!(
        "ratio change at delta=1e-6: {}",
        details.join(", ")
    ))
}

// 10. Regular distributions.
fn regularity() -> Outcome {
    let exp1: Marginal = AnalyticDistribution::Exponential { rate: 1.0 }.into();
    let report = evaluate_exact(price_at_mean(info(1.0, 1.0)), &exp1);
    ensure(report.ratio == 1.0, || {
        format!("price at mean on exponential(1): ratio {}", report.ratio)
    })?;
    let limit = e(lambda_regular_ratio(1e-9))?;
    let euler = std::f64::consts::E;
    ensure((limit - euler).abs() <= 1e-6, || {
        format!("lambda_regular_ratio(1e-9) = {limit}")
    })?;
    let mut min = (f64::INFINITY, 0.0);
    for k in 10..=1000 {
        let lambda = k as f64 / 1000.0;
        let cut = e(regularity_lottery_cutoff(lambda))?;
        if cut < min.0 {
            min = (cut, lambda);
        }
    }
    ensure((min.0 - 0.61).abs() <= 0.02, || {
        format!("cutoff minimum {} at lambda {}", min.0, min.1)
    })?;
    Ok(format!(
        "ratio 1, limit {limit:.9}, cutoff min {:.4} at lambda {:.3}",
        min.0, min.1
    ))
}

fn lazy_vcg_report(
    n: usize,
    k: usize,
    rounds: u64,
) -> Result<robust_pricing::auctions::SimulationReport, String> {
    let env = e(AuctionEnvironment::new(
        k,
        vec![AnalyticDistribution::Exponential { rate: 1.0 }; n],
    ))?;
    e(compare_with_myerson(&env, rounds, 17, &cfg()))
}

// 11. Lazy VCG with lottery reserves.
fn lazy_vcg() -> Outcome {
    let rho1 = e(rho_randomized(1.0, &cfg()))?;
    let mut details = Vec::new();
    for (n, k) in [(2, 1), (5, 2)] {
        let report = lazy_vcg_report(n, k, 1_000_000)?;
        let lazy = report.lazy_vcg.revenue;
        let needed = report.myerson.estimate / (2.0 * rho1) - 4.0 * lazy.std_error;
        ensure(lazy.estimate >= needed, || {
            format!("({n}, {k}): {} < {needed}", lazy.estimate)
        })?;
        details.push(format!(
            "({n},{k}) {:.4} vs myerson {:.4}",
            lazy.estimate, report.myerson.estimate
        ));
    }
    Ok(details.join(", "))
}

// 12. Determinism.
fn determinism() -> Outcome {
    let c = cfg();
    let i = info(1.0, 1.0);
    let runs: Vec<(&str, Run)> = vec![
        (
            "lottery mc",
            Box::new(move || {
                let d: Marginal = e(yao_posterior(i))?.into();
                let l = e(log_lottery(i, &c))?;
                e(serde_json::to_string(&e(
                    l.revenue_monte_carlo(&d, 200_000, 5)
                )?))
            }),
        ),
        (
            "bundle mc",
            Box::new(move || {
                let product = e(ProductDistribution::new(vec![
                    e(two_point(i, 0.0))?.into();
                    3
                ]))?;
                let bundle = e(sell_bundle(&[i; 3], &c))?;
                e(serde_json::to_string(&e(
                    bundle.revenue_monte_carlo(&product, 200_000, 5)
                )?))
            }),
        ),
        (
            "lazy vcg",
            Box::new(|| e(serde_json::to_string(&lazy_vcg_report(5, 2, 100_000)?))),
        ),
        (
            "multi-item check",
            Box::new(|| Ok(format!("{:?}", separate_lower_check()?.to_bits()))),
        ),
    ];
    for (name, run) in &runs {
        let a = run()?;
        let b = run()?;
        ensure(a == b, || format!("{name}: reruns differ"))?;
    }
    Ok(format!(
        "{} simulations byte-identical on rerun",
        runs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (1, "ratio curves match reference values", 1, figure_values),
        (2, "quadratic sandwiches", 1, sandwiches),
        (3, "log-lottery identities and floor", 5, lottery_identities),
        (4, "optimal posted price", 1, optimal_posted_price),
        (5, "mixture squeeze", 5, squeeze),
        (6, "quarter lottery", 1, quarter),
        (7, "separate and bundled sales", 30, multi_item),
        (8, "multi-item lower bound", 5, multi_item_lower),
        (9, "exact-variance perturbation", 5, perturbation),
        (10, "regular distributions", 5, regularity),
        (11, "lazy VCG revenue bound", 60, lazy_vcg),
        (12, "determinism", 60, determinism),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let budget = Duration::from_secs(budget);
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("over budget; {detail}")),
            Err(reason) => ("FAIL", reason),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "{status} {id:>2} {name:<38} {:>7.3}s / {:>2}s  {detail}",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
    }
    if failures == 0 {
        println!("all 12 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    }
}
