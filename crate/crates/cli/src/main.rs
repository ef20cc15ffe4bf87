//! `mvmdp`: command-line driver for the mean-variance MDP solvers.

mod args;

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, Command, Format, GenKind};
use mvmdp_core::frequency::{frequencies_to_policy, Feasibility, FrequencyPolytope};
use mvmdp_core::games::{
    class_separation_report, enumerate_policies_with_cap, gen_3sat, gen_subset_sum, zero_variance_values,
    SeparationOptions,
};
use mvmdp_core::geometry::{MomentPolygon, Point};
use mvmdp_core::model::{augment_with_cap, validate, Kernel};
use mvmdp_core::rational::{parse_tolerance, to_f64};
use mvmdp_core::setdp::{compute_pmq, exact_frontier, max_variance, min_variance};
use mvmdp_core::tradeoff::{approximate_v_star, discretize_rewards, general_reward_v_hat};
use mvmdp_core::{fixtures, Mdp, Rational};

/// Denominator cap for decimal tolerances.
const TOLERANCE_DEN_CAP: u64 = 1_000_000;

/// Outcome of a subcommand: rendered output plus the decision answer.
struct Outcome {
    text: String,
    yes: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, yes: true }
    }

    fn json(value: Value, yes: bool) -> Self {
        let mut text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
        text.push('\n');
        Outcome { text, yes }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.text) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            ExitCode::from(if out.yes { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn emit(cli: &Cli, text: &str) -> anyhow::Result<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write `{}`", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load(cli: &Cli) -> anyhow::Result<Mdp> {
    let text = match cli.input.as_deref() {
        None => return Err(anyhow!("this subcommand needs an MDP: pass --input FILE (or `-` for stdin)")),
        Some(p) if p.as_os_str() == "-" => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).context("cannot read stdin")?;
            s
        }
        Some(p) => std::fs::read_to_string(p).with_context(|| format!("cannot read `{}`", p.display()))?,
    };
    Mdp::from_json(&text).map_err(|e| anyhow!("malformed MDP JSON: {e}"))
}

/// Loads, validates, and enforces the augmented-state cap.
fn load_checked(cli: &Cli) -> anyhow::Result<(Mdp, Kernel)> {
    let mdp = load(cli)?;
    let kernel = mdp.kernel()?;
    augment_with_cap(&mdp, cli.max_augmented)?;
    Ok((mdp, kernel))
}

fn num(x: &Rational) -> Value {
    json!({ "exact": x.to_string(), "float": to_f64(x) })
}

fn point(p: &Point) -> Value {
    json!({ "mean": num(&p.x), "second_moment": num(&p.y), "variance": num(&p.variance()) })
}

fn tolerance(name: &str, raw: &str) -> anyhow::Result<Rational> {
    let (value, rounded) = parse_tolerance(raw, TOLERANCE_DEN_CAP).map_err(|e| anyhow!("--{name}: {e}"))?;
    if rounded {
        eprintln!("warning: --{name} {raw} is a decimal; using the rational {value}");
    }
    Ok(value)
}

fn feasibility(kernel: &Kernel, f: Feasibility) -> Outcome {
    let witness = f.witness.map(|z| {
        let (mean, second) = z.moments();
        json!({
            "mean": num(&mean),
            "second_moment": num(&second),
            "variance": num(&(&second - &mean * &mean)),
            "policy": frequencies_to_policy(&z).to_json_value(kernel),
        })
    });
    Outcome::json(json!({ "feasible": f.feasible, "witness": witness }), f.feasible)
}

/// Witness policy realizing the moment point `p`, if the polytope has one.
fn witness_at(cli: &Cli, mdp: &Mdp, kernel: &Kernel, p: &Point) -> anyhow::Result<Value> {
    let mut poly = FrequencyPolytope::with_cap(mdp, cli.max_augmented)?;
    let f = poly.exact_pair_feasible(&p.x, &p.variance());
    Ok(f.witness
        .map(|z| frequencies_to_policy(&z).to_json_value(kernel))
        .unwrap_or(Value::Null))
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Validate => {
            let mdp = load(cli)?;
            let report = validate(&mdp);
            let mut text = String::new();
            if report.is_valid() {
                let _ = writeln!(
                    text,
                    "valid: T={}, {} states, {} transition entries, {} reward entries",
                    mdp.horizon(),
                    mdp.states().len(),
                    mdp.transitions().len(),
                    mdp.rewards().len()
                );
            } else {
                let _ = writeln!(text, "invalid ({} violations):\n{report}", report.violations.len());
            }
            Ok(Outcome { text, yes: report.is_valid() })
        }
        Command::AugmentStats => {
            let mdp = load(cli)?;
            mdp.kernel()?;
            let aug = augment_with_cap(&mdp, cli.max_augmented)?;
            let layers: Vec<usize> = aug.layers().iter().map(Vec::len).collect();
            let widths: Vec<usize> = (0..=aug.horizon()).map(|t| aug.w_values(t).len()).collect();
            Ok(Outcome::json(
                json!({
                    "horizon": aug.horizon(),
                    "total": aug.len(),
                    "layer_sizes": layers,
                    "distinct_w": widths,
                    "integer_rewards": aug.integer_flag(),
                    "reward_bound": num(&mdp.reward_bound()),
                }),
                true,
            ))
        }
        Command::FeasiblePair { lambda, v } => {
            let (mdp, kernel) = load_checked(cli)?;
            let mut poly = FrequencyPolytope::with_cap(&mdp, cli.max_augmented)?;
            Ok(feasibility(&kernel, poly.exact_pair_feasible(lambda, v)))
        }
        Command::FeasibleMeanVar { lambda, v } => {
            let (mdp, kernel) = load_checked(cli)?;
            let mut poly = FrequencyPolytope::with_cap(&mdp, cli.max_augmented)?;
            Ok(feasibility(&kernel, poly.mean_fixed_var_bounded(lambda, v)))
        }
        Command::Frontier {
            epsilon,
            nu,
            exact,
            prune_eps,
            samples,
        } => {
            let (mdp, _) = load_checked(cli)?;
            if *exact {
                let prune = prune_eps.as_deref().map(|p| tolerance("prune-eps", p)).transpose()?;
                exact_frontier_output(cli, &mdp, prune.as_ref(), *samples)
            } else {
                let eps = epsilon.as_deref().ok_or_else(|| anyhow!("--epsilon is required without --exact"))?;
                let nu = nu.as_deref().ok_or_else(|| anyhow!("--nu is required without --exact"))?;
                let (eps, nu) = (tolerance("epsilon", eps)?, tolerance("nu", nu)?);
                let curve = if mdp.has_integer_rewards() {
                    approximate_v_star(&mdp, &eps, &nu)?
                } else {
                    general_reward_v_hat(&mdp, &eps, &nu)?
                };
                Ok(match cli.format {
                    Format::Csv => Outcome::ok(curve.to_csv()),
                    Format::Json => Outcome::json(
                        json!({
                            "delta": num(&curve.delta),
                            "epsilon": num(&curve.epsilon),
                            "nu": num(&curve.nu),
                            "mean_max": num(&curve.mean_max),
                            "grid": curve.grid.iter().map(num).collect::<Vec<_>>(),
                            "vhat": curve.vhat.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                        }),
                        true,
                    ),
                })
            }
        }
        Command::ZeroVariance => {
            let (mdp, kernel) = load_checked(cli)?;
            let game = zero_variance_values(&mdp)?;
            let values: Vec<Value> = game
                .winning_policy
                .iter()
                .map(|(k, pol)| json!({ "value": num(k), "policy": pol.to_json_value(&kernel) }))
                .collect();
            let yes = !game.achievable_values.is_empty();
            Ok(Outcome::json(json!({ "zero_variance_feasible": yes, "values": values }), yes))
        }
        Command::MinVariance => {
            let (mdp, kernel) = load_checked(cli)?;
            let pmq = compute_pmq(&mdp, None)?;
            let (value, at) = min_variance(&pmq)?;
            let witness = witness_at(cli, &mdp, &kernel, &at)?;
            Ok(Outcome::json(
                json!({ "min_variance": num(&value), "at": point(&at), "policy": witness }),
                true,
            ))
        }
        Command::MaxVariance => {
            let (mdp, kernel) = load_checked(cli)?;
            let pmq = compute_pmq(&mdp, None)?;
            let best = max_variance(&pmq)?;
            let witness = witness_at(cli, &mdp, &kernel, &best.point)?;
            Ok(Outcome::json(
                json!({
                    "max_variance": num(&best.value),
                    "at": point(&best.point),
                    "mixture": { "from": point(&best.from), "to": point(&best.to), "weight": num(&best.weight) },
                    "policy": witness,
                }),
                true,
            ))
        }
        Command::Oracle { class } => {
            let (mdp, kernel) = load_checked(cli)?;
            let all = enumerate_policies_with_cap(&mdp, *class, cli.max_policies)?;
            Ok(match cli.format {
                Format::Csv => {
                    let mut out = String::from("index,mean,second_moment,variance,mean_f64,second_moment_f64,variance_f64\n");
                    for (i, e) in all.iter().enumerate() {
                        let _ = writeln!(
                            out,
                            "{i},{},{},{},{},{},{}",
                            e.mean,
                            e.second_moment,
                            e.variance,
                            to_f64(&e.mean),
                            to_f64(&e.second_moment),
                            to_f64(&e.variance)
                        );
                    }
                    Outcome::ok(out)
                }
                Format::Json => {
                    let hull = MomentPolygon::hull(all.iter().map(|e| Point::new(e.mean.clone(), e.second_moment.clone())));
                    let rows: Vec<Value> = all
                        .iter()
                        .map(|e| {
                            json!({
                                "mean": num(&e.mean),
                                "second_moment": num(&e.second_moment),
                                "variance": num(&e.variance),
                                "policy": e.policy.to_json_value(&kernel),
                            })
                        })
                        .collect();
                    Outcome::json(json!({ "class": class.tag(), "policies": rows, "hull": hull.to_json_value() }), true)
                }
            })
        }
        Command::Separation { lambda, v, resolution } => {
            let (mdp, _) = load_checked(cli)?;
            let opts = SeparationOptions {
                ts_u_resolution: *resolution,
                policy_cap: cli.max_policies,
            };
            let report = class_separation_report(&mdp, lambda, v, &opts)?;
            let yes = report.rows.iter().any(|r| r.verdict.is_yes());
            Ok(Outcome::json(report.to_json_value(&mdp)?, yes))
        }
        Command::Gen { kind } => {
            let mdp = match kind {
                GenKind::SubsetSum { r } => gen_subset_sum(r)?,
                GenKind::ThreeSat { clauses } => gen_3sat(clauses)?,
                GenKind::Fixture { name } => fixture(name)?,
                GenKind::Random { seed } => fixtures::random_mdp(*seed, &fixtures::RandomSpec::default()),
            };
            Ok(Outcome::ok(mdp.to_json()? + "\n"))
        }
        Command::Discretize { delta } => {
            let (mdp, _) = load_checked(cli)?;
            Ok(Outcome::ok(discretize_rewards(&mdp, delta)?.to_json()? + "\n"))
        }
    }
}

fn exact_frontier_output(cli: &Cli, mdp: &Mdp, prune: Option<&Rational>, samples: usize) -> anyhow::Result<Outcome> {
    let pmq = compute_pmq(mdp, prune)?;
    let frontier = exact_frontier(&pmq)?;
    if cli.format == Format::Json {
        let pieces: Vec<Value> = frontier
            .pieces()
            .iter()
            .map(|p| json!({ "lo": num(&p.lo), "hi": num(&p.hi), "slope": num(&p.slope), "intercept": num(&p.intercept) }))
            .collect();
        return Ok(Outcome::json(
            json!({ "polygon": pmq.to_json_value(), "lower_boundary": pieces }),
            true,
        ));
    }
    let (lo, hi) = frontier.mean_range();
    let mut lambdas: Vec<Rational> = frontier.breakpoints().iter().map(|p| p.x.clone()).collect();
    if samples > 1 {
        let n = Rational::from_integer((samples - 1).into());
        lambdas.extend((0..samples).map(|i| lo + (hi - lo) * Rational::from_integer(i.into()) / &n));
    }
    lambdas.sort();
    lambdas.dedup();
    let mut out = String::from("lambda,v_star,lambda_f64,v_star_f64\n");
    for l in &lambdas {
        let v = frontier.value(l);
        let _ = writeln!(out, "{l},{v},{},{}", to_f64(l), v.to_f64());
    }
    Ok(Outcome::ok(out))
}

fn fixture(name: &str) -> anyhow::Result<Mdp> {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let horizon = || -> anyhow::Result<usize> {
        arg.map_or(Ok(3), |a| a.parse().map_err(|_| anyhow!("fixture horizon `{a}` is not an integer")))
    };
    Ok(match base {
        "randomization-gap" => fixtures::randomization_gap(),
        "information-gap" => fixtures::information_gap(),
        "history-gap" => {
            let p = args::exact(arg.unwrap_or("1/2")).map_err(|e| anyhow!(e))?;
            fixtures::history_gap(p)
        }
        "two-point" => fixtures::two_point_max_variance(),
        "zero-reward-chain" => fixtures::zero_reward_chain(horizon()?),
        "zero-reward-choices" => fixtures::zero_reward_choices(horizon()?),
        "thirds" => fixtures::thirds(),
        other => return Err(anyhow!("unknown fixture `{other}` (see `mvmdp gen fixture --help`)")),
    })
}
