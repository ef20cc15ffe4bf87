use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use mvmdp_core::rational::parse_rational;
use mvmdp_core::{PolicyClass, Rational};

const FORMATS: &str = "\
MDP JSON: rationals are [num, den] pairs. Top-level keys: horizon, states,
initial_state, actions ({state: [action, ...]}), transitions (list of
{t?, s, a, rows: [[next_state, prob], ...]}), rewards (list of
{t?, s, a, pmf: [[reward, prob], ...]}). Entries without t apply at every
stage.

Frontier CSV (approximate): lambda_lo,lambda_hi,qhat,uhat,vhat followed by
float renderings; one row per grid cell. Frontier CSV (--exact):
lambda,v_star plus floats. Both load in gnuplot with
`set datafile separator ','`.

Polygon JSON: {\"vertices\": [[x, y], ...]} counter-clockwise, each
coordinate a [num, den] pair.

Exit codes: 0 success or `yes`, 1 `no` for decision subcommands, 2 input
errors.";

#[derive(Debug, Parser)]
#[command(name = "mvmdp", version, about = "Mean-variance analysis of finite-horizon MDPs", after_help = FORMATS)]
pub struct Cli {
    /// MDP JSON file, `-` for stdin.
    #[arg(short, long, global = true)]
    pub input: Option<PathBuf>,

    /// Write results here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,

    /// Cap on augmented states per stage.
    #[arg(long, global = true, default_value_t = mvmdp_core::model::DEFAULT_LAYER_CAP)]
    pub max_augmented: usize,

    /// Cap on enumerated policies.
    #[arg(long, global = true, default_value_t = mvmdp_core::games::DEFAULT_POLICY_CAP)]
    pub max_policies: u128,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check every model invariant (exit 1 if the model is invalid).
    Validate,
    /// Sizes of the reward-augmented state space.
    AugmentStats,
    /// Is some policy's (mean, variance) exactly (lambda, v)?
    FeasiblePair {
        #[arg(long, allow_hyphen_values = true, value_parser = exact)]
        lambda: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = exact)]
        v: Rational,
    },
    /// Is there a policy with mean lambda and variance at most v?
    FeasibleMeanVar {
        #[arg(long, allow_hyphen_values = true, value_parser = exact)]
        lambda: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = exact)]
        v: Rational,
    },
    /// Approximate tradeoff curve, or the exact one with --exact.
    Frontier {
        /// Value tolerance (p/q; decimals are rationalized with a warning).
        #[arg(long)]
        epsilon: Option<String>,
        /// Argument tolerance.
        #[arg(long)]
        nu: Option<String>,
        /// Compute the exact frontier by set-valued dynamic programming.
        #[arg(long)]
        exact: bool,
        /// Per-stage polygon pruning budget for --exact.
        #[arg(long)]
        prune_eps: Option<String>,
        /// Evenly spaced sample points added to the breakpoints for --exact.
        #[arg(long, default_value_t = 33)]
        samples: usize,
    },
    /// Values the controller can force with zero variance (exit 1 if none).
    ZeroVariance,
    /// Least variance over all policies.
    MinVariance,
    /// Largest variance over all policies.
    MaxVariance,
    /// Enumerate every deterministic policy of a class.
    Oracle {
        /// TS or TSW.
        #[arg(long)]
        class: PolicyClass,
    },
    /// Feasibility of mean >= lambda, variance <= v per policy class
    /// (exit 1 if no class is feasible).
    Separation {
        #[arg(long, allow_hyphen_values = true, value_parser = exact)]
        lambda: Rational,
        #[arg(long, allow_hyphen_values = true, value_parser = exact)]
        v: Rational,
        /// Probability levels for the randomized (t, s) grid search.
        #[arg(long, default_value_t = 16)]
        resolution: u32,
    },
    /// Generate an instance as MDP JSON.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Round rewards down to multiples of delta.
    Discretize {
        #[arg(long, value_parser = exact)]
        delta: Rational,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenKind {
    /// Subset-sum reduction instance.
    SubsetSum {
        #[arg(long, num_args = 1.., required = true, allow_hyphen_values = true)]
        r: Vec<i64>,
    },
    /// 3SAT reduction instance. Each clause is comma-separated literals,
    /// e.g. `--clauses 1,-2,3 -1,2,4`.
    #[command(name = "3sat")]
    ThreeSat {
        #[arg(long, num_args = 1.., required = true, allow_hyphen_values = true, value_parser = clause)]
        clauses: Vec<Vec<i64>>,
    },
    /// Built-in fixture: randomization-gap, information-gap,
    /// history-gap[:p], two-point, zero-reward-chain[:T],
    /// zero-reward-choices[:T], thirds.
    Fixture { name: String },
    /// Seeded random instance.
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

pub fn exact(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn clause(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|lit| lit.trim().parse::<i64>().map_err(|_| format!("bad literal `{lit}` in clause `{s}`")))
        .collect()
}
