mod commands;
mod output;
mod problem;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hext_core::selftest;
use hext_core::Policy;
use serde_json::json;

use commands::{InputError, SeqTarget};
use output::Report;
use problem::Overrides;

const EXIT_INPUT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "hext", version, about = "Verified one-point Hölder extensions with JSON certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    /// Problem file (JSON).
    problem: PathBuf,
    /// Override the space: JSON descriptor, `linf:D`, `lp:P:D` or `l2l2`.
    #[arg(long)]
    space: Option<String>,
    /// Hölder exponent in (0, 1]; defaults to the file's value, then 1.
    #[arg(long)]
    alpha: Option<f64>,
    /// Hölder constant; the smallest valid one is used when absent.
    #[arg(long = "K")]
    k: Option<f64>,
    /// Extension point as a JSON array; replaces `extend_at`.
    #[arg(long)]
    at: Option<String>,
}

#[derive(Args, Clone)]
struct OutArgs {
    /// Write the certificate here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Report the Hölder constant of a map and check its claimed one.
    Check {
        #[command(flatten)]
        p: ProblemArgs,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Extend a map to the requested points and verify the result.
    Extend {
        #[command(flatten)]
        p: ProblemArgs,
        /// Point of the admissible interval to emit: lo, hi or mid.
        #[arg(long, default_value = "mid")]
        policy: String,
        /// Accept a (1+eps)K extension computed on a net of the domain.
        #[arg(long)]
        eps: Option<f64>,
        /// Sequence algorithm, `c0` or `c`; c0 is used when every tail is zero.
        #[arg(long)]
        target: Option<String>,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Admissible-value certificates at the requested points.
    Feasible {
        #[command(flatten)]
        p: ProblemArgs,
        /// Scale for C(K) problems (pairs with rho < delta are checked).
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Cell covering of a point set in l_inf^n.
    Partition {
        #[command(flatten)]
        p: ProblemArgs,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Cone covering of the unit sphere of a space.
    Cover {
        #[arg(long)]
        space: String,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Probe density for verifying the net.
        #[arg(long, default_value_t = 2)]
        resolution: usize,
        #[command(flatten)]
        o: OutArgs,
    },
    /// C(K) extension through the modulus construction.
    CkExtend {
        #[command(flatten)]
        p: ProblemArgs,
        /// `auto` or a JSON modulus table file.
        #[arg(long, default_value = "auto")]
        modulus: String,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Check the C(K) extendability condition at scale delta.
    CkCheck {
        #[command(flatten)]
        p: ProblemArgs,
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Read a C(K)-valued map along witness pairs, giving a map into c.
    Reduce {
        #[command(flatten)]
        p: ProblemArgs,
        /// JSON list of [t, s] index pairs.
        #[arg(long)]
        witnesses: PathBuf,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Generate and certify the alternating-sign counterexample.
    Counterexample {
        #[arg(long = "K", default_value_t = 11.0)]
        k: f64,
        #[arg(long, default_value_t = 1)]
        n1: u32,
        #[arg(long = "N", default_value_t = 5)]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[command(flatten)]
        o: OutArgs,
    },
    /// Run the acceptance property suites.
    Selftest {
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        o: OutArgs,
    },
}

fn overrides(p: &ProblemArgs) -> Result<Overrides, InputError> {
    Ok(Overrides {
        space: p.space.as_deref().map(problem::parse_space).transpose()?,
        alpha: p.alpha,
        k: p.k,
        at: p.at.as_deref().map(problem::parse_point).transpose()?,
    })
}

fn problem_args(p: &ProblemArgs) -> serde_json::Value {
    json!({ "problem": p.problem.display().to_string(), "space": p.space, "alpha": p.alpha, "K": p.k, "at": p.at })
}

fn run(command: Command) -> Result<(Report, Option<PathBuf>), InputError> {
    let result = match command {
        Command::Check { p, o } => {
            let mut r = Report::new("check", problem_args(&p));
            commands::check(&p.problem, &overrides(&p)?, &mut r)?;
            (r, o.out)
        }
        Command::Extend { p, policy, eps, target, o } => {
            let mut args = problem_args(&p);
            args["policy"] = json!(policy);
            args["eps"] = json!(eps);
            args["target"] = json!(target);
            let policy: Policy = policy.parse()?;
            let target = target.as_deref().map(str::parse::<SeqTarget>).transpose()?;
            let mut r = Report::new("extend", args);
            commands::extend(&p.problem, &overrides(&p)?, policy, eps, target, &mut r)?;
            (r, o.out)
        }
        Command::Feasible { p, delta, o } => {
            let mut args = problem_args(&p);
            args["delta"] = json!(delta);
            let mut r = Report::new("feasible", args);
            commands::feasible(&p.problem, &overrides(&p)?, delta, &mut r)?;
            (r, o.out)
        }
        Command::Partition { p, eps, o } => {
            let mut args = problem_args(&p);
            args["eps"] = json!(eps);
            let mut r = Report::new("partition", args);
            commands::partition(&p.problem, &overrides(&p)?, eps, &mut r)?;
            (r, o.out)
        }
        Command::Cover { space, delta, resolution, o } => {
            let parsed = problem::parse_space(&space)?;
            let mut r = Report::new("cover", json!({ "space": space, "delta": delta, "resolution": resolution }));
            commands::cover(&parsed, delta, resolution, &mut r)?;
            (r, o.out)
        }
        Command::CkExtend { p, modulus, o } => {
            let mut args = problem_args(&p);
            args["modulus"] = json!(modulus);
            let mut r = Report::new("ck-extend", args);
            commands::ck_extend_cmd(&p.problem, &overrides(&p)?, &modulus, &mut r)?;
            (r, o.out)
        }
        Command::CkCheck { p, delta, o } => {
            let mut args = problem_args(&p);
            args["delta"] = json!(delta);
            let mut r = Report::new("ck-check", args);
            commands::ck_check(&p.problem, &overrides(&p)?, delta, &mut r)?;
            (r, o.out)
        }
        Command::Reduce { p, witnesses, o } => {
            let mut args = problem_args(&p);
            args["witnesses"] = json!(witnesses.display().to_string());
            let mut r = Report::new("reduce", args);
            commands::reduce(&p.problem, &overrides(&p)?, &witnesses, &mut r)?;
            (r, o.out)
        }
        Command::Counterexample { k, n1, n, alpha, o } => {
            let mut r = Report::new("counterexample", json!({ "K": k, "n1": n1, "N": n, "alpha": alpha }));
            commands::counterexample(k, n1, n, alpha, &mut r)?;
            (r, o.out)
        }
        Command::Selftest { seed, o } => {
            let mut r = Report::new("selftest", json!({ "seed": seed }));
            let results = selftest::run_all(seed);
            for c in &results {
                eprintln!(
                    "criterion {} {:<28} {} ({} cases, {:.2}s)",
                    c.id,
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    c.cases,
                    c.seconds
                );
                r.check(format!("criterion {}: {}", c.id, c.name), c.pass, json!(c.failures));
            }
            r.result("criteria", output::json(&results));
            (r, o.out)
        }
    };
    Ok(result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, out) = match run(cli.command) {
        Ok(r) => r,
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let pass = report.all_pass();
    let text = output::to_json(&report.finish());
    match out {
        Some(path) => {
            if let Err(e) = fs::write(&path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_INPUT);
            }
        }
        None => print!("{text}"),
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY)
    }
}
