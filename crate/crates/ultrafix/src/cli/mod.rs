//! Command-line front end: verify description files and trace documents,
//! lift polynomial roots, solve small initial-value problems, and sweep
//! every tiny finite model for the fixed-point dichotomy.
//!
//! Exit codes are a stable contract: `0` success, `1` a validation or
//! precondition failure (broken axioms, refused seeds, dirty documents),
//! `2` unreadable input (bad expressions, malformed files, bad usage).

pub mod expr;
pub mod instance_file;
pub mod trace_doc;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_rational::BigRational;

use crate::apps::{hensel_solve, picard_solve, AppError, HenselProblem, OdeProblem};
use crate::driver::{run, ContractingMap, DriverConfig, Outcome};
use crate::instances::{all_contracting_selfmaps, finite_space_enumerate};
use crate::radius::{check_order_axioms, FinitePoset, RadiusOrder};
use crate::report::Report;
use crate::space::{check_ball_lemma, check_space_axioms, Ultrametric};
use instance_file::{parse_instance_str, FileError, LoadedInstance};
use trace_doc::{emit_document, parse_document, TypedRun, HEADER};

// ── argument surface ────────────────────────────────────────────────────

#[derive(Parser, Debug)]
#[command(
    name = "ultrafix",
    version,
    about = "Fixed points of strictly contracting maps on ultrametric spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a space description file, or re-validate a trace document.
    Verify {
        /// Path to an `instance ...` file or an `ultrafix-trace v1` document.
        file: PathBuf,
    },
    /// Lift a seed to a root of an integer polynomial mod p^N.
    Hensel {
        /// The prime.
        #[arg(long)]
        p: u64,
        /// Number of p-adic digits to certify.
        #[arg(long = "N", default_value_t = 4)]
        precision: u32,
        /// Integer polynomial in x, e.g. "x^2-2".
        #[arg(long)]
        poly: String,
        /// Starting residue; its derivative value must be a unit.
        #[arg(long)]
        seed: i64,
        /// Also write the trace document to this path.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Solve y' = f(t, y), y(0) = y0 as a truncated power series.
    Ode {
        /// Right-hand side f(t, y), e.g. "y" or "t+y^2".
        #[arg(long)]
        rhs: String,
        /// Initial value at t = 0, an exact rational like "1" or "-1/2".
        #[arg(long)]
        y0: String,
        /// Number of series coefficients to solve for.
        #[arg(long, default_value_t = 8)]
        cap: usize,
        /// Also write the trace document to this path.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
    /// Enumerate every small finite model and check that each strictly
    /// contracting self-map fixes exactly one point, reached from every
    /// start.
    DemoFinite {
        /// Largest point count to sweep (1 to 6; counts grow fast).
        #[arg(long, default_value_t = 3)]
        max_points: usize,
    },
}

/// Run a parsed command line, returning the process exit code.
pub fn execute(cli: Cli) -> i32 {
    match cli.command {
        Command::Verify { file } => cmd_verify(&file),
        Command::Hensel { p, precision, poly, seed, emit_trace } => {
            cmd_hensel(p, precision, &poly, seed, emit_trace.as_deref())
        }
        Command::Ode { rhs, y0, cap, emit_trace } => {
            cmd_ode(&rhs, &y0, cap, emit_trace.as_deref())
        }
        Command::DemoFinite { max_points } => cmd_demo_finite(max_points),
    }
}

// ── verify ──────────────────────────────────────────────────────────────

fn cmd_verify(file: &Path) -> i32 {
    let text = match std::fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", file.display());
            return 2;
        }
    };
    let is_doc = instance_file::significant_lines(&text)
        .first()
        .is_some_and(|(_, l)| *l == HEADER);
    if is_doc {
        verify_document(&text)
    } else {
        verify_instance(&text)
    }
}

fn verify_document(text: &str) -> i32 {
    let doc = match parse_document(text) {
        Ok(doc) => doc,
        Err(e) => return file_error(e),
    };
    println!("document: {}", doc.run.describe());
    let report = doc.report();
    print_verdict("validation", &report)
}

fn verify_instance(text: &str) -> i32 {
    let instance = match parse_instance_str(text) {
        Ok(i) => i,
        Err(e) => return file_error(e),
    };
    println!("instance: {}", instance.describe());
    let report = match &instance {
        LoadedInstance::Finite(s) => instance_report(s),
        LoadedInstance::Padic(s) => instance_report(s),
        LoadedInstance::Series(s) => instance_report(s),
        LoadedInstance::Lex(s) => instance_report(s),
    };
    print_verdict("checks", &report)
}

/// Everything checkable about a loaded space: the order axioms of its
/// radius set, the distance axioms over sampled points and radii, and the
/// membership dichotomy of its principal balls.
fn instance_report<S: Ultrametric>(space: &S) -> Report {
    let mut report = check_order_axioms(space.order());
    let mut radii = space.order().sample();
    radii.extend(space.realized_radii());
    report.merge(check_space_axioms(space, &radii));
    report.merge(check_ball_lemma(space));
    report
}

fn file_error(e: FileError) -> i32 {
    eprintln!("error: {e}");
    match e {
        FileError::Parse { .. } => 2,
        FileError::Invalid { .. } => 1,
    }
}

fn print_verdict(label: &str, report: &Report) -> i32 {
    if report.is_clean() {
        println!("{label}: ok");
        0
    } else {
        for v in report.violations() {
            println!("violation {} {}", v.rule, v.detail);
        }
        1
    }
}

// ── hensel ──────────────────────────────────────────────────────────────

fn cmd_hensel(p: u64, precision: u32, poly: &str, seed: i64, out: Option<&Path>) -> i32 {
    let poly = match expr::parse_int_poly(poly) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: --poly: {e}");
            return 2;
        }
    };
    let problem = HenselProblem { p, precision, poly, seed };
    let config = DriverConfig::new(precision as usize + 2, 4);
    let solved = match hensel_solve(&problem, &config) {
        Ok(s) => s,
        Err(e) => return app_error(e),
    };
    println!("model: {}", solved.space.describe());
    println!("outcome: {}", solved.outcome.label());
    let code = match &solved.root {
        Some(root) => {
            println!("root: {}", root.residue());
            0
        }
        None => {
            eprintln!("error: no root certified within the iteration budget");
            1
        }
    };
    let doc = emit_document(&TypedRun::Padic {
        space: solved.space,
        map: solved.map,
        outcome: solved.outcome,
    });
    finish_with_document(doc, out, code)
}

// ── ode ─────────────────────────────────────────────────────────────────

fn cmd_ode(rhs: &str, y0: &str, cap: usize, out: Option<&Path>) -> i32 {
    let rhs = match expr::parse_poly2(rhs) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: --rhs: {e}");
            return 2;
        }
    };
    let y0: BigRational = match expr::parse_rational(y0) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: --y0: {e}");
            return 2;
        }
    };
    let problem = OdeProblem { rhs, y0, cap };
    let config = DriverConfig::new(cap.max(2) + 2, 2);
    let solved = match picard_solve(&problem, &config) {
        Ok(s) => s,
        Err(e) => return app_error(e),
    };
    println!("model: {}", solved.space.describe());
    println!("outcome: {}", solved.outcome.label());
    let code = match &solved.solution {
        Some(y) => {
            let rendered: Vec<String> = y.coeffs().iter().map(|c| c.to_string()).collect();
            println!("coefficients: {}", rendered.join(", "));
            0
        }
        None => {
            eprintln!("error: no solution certified within the iteration budget");
            1
        }
    };
    let doc = emit_document(&TypedRun::Series {
        space: solved.space,
        map: solved.map,
        outcome: solved.outcome,
    });
    finish_with_document(doc, out, code)
}

fn app_error(e: AppError) -> i32 {
    eprintln!("error: {e}");
    1
}

fn finish_with_document(doc: String, out: Option<&Path>, code: i32) -> i32 {
    // Persist before printing: a consumer closing the pipe early must not
    // cost the caller their trace file.
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &doc) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
        eprintln!("trace written to {}", path.display());
    }
    println!();
    print!("{doc}");
    code
}

// ── demo-finite ─────────────────────────────────────────────────────────

fn cmd_demo_finite(max_points: usize) -> i32 {
    if !(1..=6).contains(&max_points) {
        eprintln!("error: --max-points must be between 1 and 6");
        return 2;
    }
    let orders = [FinitePoset::chain("chain3", 3), FinitePoset::diamond("diamond")];
    let mut failures = 0usize;
    for order in &orders {
        for n in 1..=max_points {
            let spaces = finite_space_enumerate(n, order);
            let mut maps_checked = 0usize;
            for space in &spaces {
                for map in all_contracting_selfmaps(space) {
                    maps_checked += 1;
                    let fixed = map.fixed_points();
                    if fixed.len() != 1 {
                        println!(
                            "FAIL {} under {}: {} fixed points",
                            space.describe(),
                            map.describe(),
                            fixed.len()
                        );
                        failures += 1;
                        continue;
                    }
                    let config = DriverConfig::new(n + 1, 2);
                    for start in 0..space.len() {
                        match run(space, &map, start, &config) {
                            Ok(Outcome::Reached { point, .. }) if point == fixed[0] => {}
                            other => {
                                println!(
                                    "FAIL {} under {} from {}: {:?}",
                                    space.describe(),
                                    map.describe(),
                                    space.point_names()[start],
                                    other.map(|o| o.label())
                                );
                                failures += 1;
                            }
                        }
                    }
                }
            }
            println!(
                "order {}, {} point{}: {} space{}, {} contracting map{} checked",
                order.name(),
                n,
                if n == 1 { "" } else { "s" },
                spaces.len(),
                if spaces.len() == 1 { "" } else { "s" },
                maps_checked,
                if maps_checked == 1 { "" } else { "s" },
            );
        }
    }
    if failures == 0 {
        println!("every contracting self-map fixed exactly one point, reached from every start");
        0
    } else {
        println!("{failures} failures");
        1
    }
}
