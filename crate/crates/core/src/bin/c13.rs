// c13: Tamagawa numbers of elliptic curves with a 13-torsion point over
// quadratic fields. Single-curve reports, height sweeps and checks.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use c13_tamagawa::exactnum::{format_rational, parse_rational, FactorBudget, Rational};
use c13_tamagawa::family::{build, FamilyError};
use c13_tamagawa::localred::tamagawa_with;
use c13_tamagawa::survey::{
    compute_record, read_records, search_v13_4, selftest, structural_checks, sweep, verify_parity,
    verify_unique_v13_2, RunConfig,
};

#[derive(Parser)]
#[command(name = "c13", version)]
#[command(about = "Tamagawa numbers of curves with a point of order 13 over quadratic fields")]
struct Cli {
    /// Pollard rho iterations allowed per factorization
    #[arg(long, global = true, env = "C13_FACTOR_BUDGET", default_value_t = FactorBudget::default().rho_iterations)]
    factor_budget: u64,

    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Report on the curve with parameter t
    Curve {
        /// Parameter as an integer or a fraction, e.g. 2 or -1/2
        #[arg(long, allow_hyphen_values = true, value_parser = parse_t)]
        t: Rational,

        /// Print the JSONL record instead of the report
        #[arg(long)]
        json: bool,
    },
    /// Compute records for every parameter up to a height
    Sweep {
        #[arg(long)]
        max_height: u64,

        /// Worker threads
        #[arg(long, default_value_t = 1)]
        jobs: usize,

        #[arg(long, default_value = "survey.jsonl")]
        out: PathBuf,

        /// Keep existing records and compute only the missing ones
        #[arg(long)]
        resume: bool,

        /// Also factor norm(Δ) to confirm the bad-prime support
        #[arg(long)]
        oracle: bool,

        /// Record per-curve wall time (output is then not reproducible)
        #[arg(long)]
        timing: bool,
    },
    /// Check that v13(c_E) is even and positive in every record
    VerifyParity {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Check that v13(c_E) = 2 only for the j-invariant of t = 2
    UniqueV13_2 {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Evaluate the v13 = 4 heuristic on families of triples a + b = c
    SearchV13_4 {
        /// Exponents p for {1, 2^p - 1, 2^p}
        #[arg(long, value_delimiter = ',')]
        mersenne: Vec<u32>,

        /// Exponents k for {1, 2^k, 2^k + 1}
        #[arg(long, value_delimiter = ',')]
        fermat: Vec<u32>,

        /// Include {1, 8, 9}
        #[arg(long)]
        special189: bool,

        /// Print JSONL records instead of a table
        #[arg(long)]
        json: bool,
    },
    /// Run the built-in cross-checks
    Selftest,
}

fn parse_t(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("not a rational number: {s:?}"))
}

/// Exit code for a failed verification; usage and I/O errors use 2.
const VERIFY_FAILED: u8 = 1;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = FactorBudget::new(cli.factor_budget);
    match run(cli.command, budget) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VERIFY_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Commands, budget: FactorBudget) -> Result<bool> {
    match command {
        Commands::Curve { t, json } => curve(&t, json, budget),
        Commands::Sweep { max_height, jobs, out, resume, oracle, timing } => {
            let cfg = RunConfig {
                max_height,
                jobs,
                out_path: out.clone(),
                resume,
                factor_budget: budget,
                oracle_mode: oracle,
                record_timing: timing,
            };
            let s = sweep(&cfg)?;
            println!(
                "{} parameters, {} computed, {} already present -> {}",
                s.enumerated,
                s.computed,
                s.skipped,
                out.display()
            );
            Ok(true)
        }
        Commands::VerifyParity { input } => {
            let records = read_records(&input)?;
            let rep = verify_parity(&records);
            for v in rep.violations.iter().chain(&rep.errors) {
                println!("violation: {v}");
            }
            println!(
                "parity: {} checked, {} skipped, {} violations, {} errors: {}",
                rep.checked,
                rep.skipped,
                rep.violations.len(),
                rep.errors.len(),
                if rep.passed() { "PASS" } else { "FAIL" }
            );
            Ok(rep.passed())
        }
        Commands::UniqueV13_2 { input } => {
            let records = read_records(&input)?;
            let rep = verify_unique_v13_2(&records);
            for (v, ts) in &rep.by_v13 {
                println!("v13 = {v}: {} curves", ts.len());
            }
            println!("v13 = 2 at t in {{{}}}", rep.with_v13(2).join(", "));
            for v in &rep.violations {
                println!("violation: {v}");
            }
            println!("uniqueness: {}", if rep.passed() { "PASS" } else { "FAIL" });
            Ok(rep.passed())
        }
        Commands::SearchV13_4 { mersenne, fermat, special189, json } => {
            if mersenne.is_empty() && fermat.is_empty() && !special189 {
                anyhow::bail!("nothing to search: give --mersenne, --fermat or --special189");
            }
            let recs = search_v13_4(&mersenne, &fermat, special189, budget);
            let fmt_opt = |b: Option<bool>| b.map_or("?".to_string(), |b| b.to_string());
            let mut consistent = true;
            for r in &recs {
                if r.condition1 == Some(true) && r.condition2 == Some(true) && r.v13 != Some(4) {
                    consistent = false;
                }
                if json {
                    println!("{}", serde_json::to_string(r).context("serializing record")?);
                } else {
                    println!(
                        "{:<18} t = {:<14} cond1 = {:<5} cond2 = {:<5} v13 = {:<4} {}",
                        r.source,
                        r.t,
                        fmt_opt(r.condition1),
                        fmt_opt(r.condition2),
                        r.v13.map_or("-".to_string(), |v| v.to_string()),
                        r.status
                    );
                }
            }
            let flagged = recs.iter().filter(|r| r.is_flagged()).count();
            eprintln!("{} records, {} flagged", recs.len(), flagged);
            Ok(consistent)
        }
        Commands::Selftest => {
            let outcomes = selftest(budget);
            let mut all = true;
            for o in &outcomes {
                let (tag, msg) = match &o.result {
                    Ok(m) => ("PASS", m),
                    Err(m) => {
                        all = false;
                        ("FAIL", m)
                    }
                };
                println!("{tag} {:<40} {msg} ({:.2}s)", o.name, o.seconds);
            }
            Ok(all)
        }
    }
}

fn curve(t: &Rational, json: bool, budget: FactorBudget) -> Result<bool> {
    if json {
        let rec = compute_record(t, budget, false);
        println!("{}", rec.to_json_line());
        return Ok(!rec.is_error());
    }
    let fc = match build(t) {
        Ok(fc) => fc,
        Err(e @ (FamilyError::DegenerateParameter(_) | FamilyError::RationalPoint(_))) => {
            println!("t = {}: {e}", format_rational(t));
            println!("flag: {}", compute_record(t, budget, false).flags);
            return Ok(true);
        }
        Err(e) => return Err(e.into()),
    };
    let g = tamagawa_with(&fc, budget)?;
    println!("t = {}", format_rational(&fc.t));
    println!("K = {}", fc.field);
    println!("E: {}", fc.model);
    let j = fc.model.j_invariant()?;
    println!("j = {}", j.as_rational().map_or_else(|| j.to_string(), format_rational));
    println!("P = (0, 0) of order 13");
    println!();
    println!("{:<36} {:<8} {:>8} {:<10} {:>6}", "prime", "kodaira", "v(Δmin)", "reduction", "c");
    for l in &g.locals {
        println!(
            "{:<36} {:<8} {:>8} {:<10} {:>6}",
            l.prime.to_string(),
            l.kodaira.to_string(),
            l.v_delta_min,
            l.reduction.as_str(),
            l.c
        );
    }
    println!();
    let problems = structural_checks(&fc, &g);
    if problems.is_empty() {
        println!("structural checks: all passed");
    } else {
        for p in &problems {
            println!("structural check failed: {p}");
        }
    }
    println!("c_E = {}, v13(c_E) = {}", g.c_e, g.v13);
    Ok(problems.is_empty())
}
