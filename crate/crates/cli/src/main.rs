//! Command-line front end: parses instance files, dispatches to the solvers,
//! and emits a machine-readable `key=value` report on stdout.
//!
//! Exit codes: 0 yes (or a successful non-decision run), 1 no, 2 input
//! error, 3 resource guard exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use aacsp::arith::{rational_string, Rational};
use aacsp::csp::{CspError, CspKernelized, HybridOutcome};
use aacsp::exact::{
    brute_force_csp, brute_force_lin2, brute_force_ordering, held_karp_ordering, ExactError,
};
use aacsp::io::{
    parse_csp, parse_lin2, parse_ordering, parse_perm, serialize_csp, serialize_lin2, ParseError,
};
use aacsp::lin2::{AaBranch, Assignment, Kernelized, Lin2Error, Verdict};
use aacsp::ordering::{
    solve_ordering_aa, solve_perm_aa, Ordering, OrderingBranch, OrderingError,
};
use aacsp::Limits;

#[derive(Parser)]
#[command(
    name = "aacsp",
    version,
    about = "Solvers for constraint satisfaction above the random-assignment average"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for randomized fallbacks (the default pipeline is deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Variable ceiling for exhaustive search and the ordering DP.
    #[arg(long, global = true)]
    guard: Option<usize>,
    /// Suppress the report; communicate through the exit code only.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether a lin2 system has an assignment of weight >= W/2 + k/2.
    #[command(name = "solve-lin2")]
    SolveLin2 {
        file: PathBuf,
        #[arg(long = "k", value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Emit a witness certificate or a kernel file with O(k) variables.
    #[command(name = "kernelize-lin2")]
    KernelizeLin2 {
        file: PathBuf,
        #[arg(long = "k", value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether a boolean CSP has weight >= rho*W + k/2^c.
    #[command(name = "solve-csp")]
    SolveCsp {
        file: PathBuf,
        #[arg(long = "k", value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Approximate beyond the average in polynomial time or solve exactly.
    #[command(name = "hybrid-csp")]
    HybridCsp {
        file: PathBuf,
        /// Fraction in (0,1] as `NUM/DEN` (or an integer).
        #[arg(long, value_parser = parse_eps)]
        eps: Rational,
    },
    /// Emit a witness certificate or a CSP kernel file with rescaled k.
    #[command(name = "kernelize-csp")]
    KernelizeCsp {
        file: PathBuf,
        #[arg(long = "k", value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decide whether an ordering instance has weight >= rho*W + k.
    #[command(name = "solve-ord")]
    SolveOrd {
        file: PathBuf,
        #[arg(long = "k", value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Decide a permutation CSP (arity <= 3) above average.
    #[command(name = "solve-perm")]
    SolvePerm {
        file: PathBuf,
        #[arg(long = "k", value_parser = clap::value_parser!(u64).range(1..))]
        k: u64,
    },
    /// Exact optimum ordering via the subset dynamic program.
    #[command(name = "exact-ord")]
    ExactOrd { file: PathBuf },
    /// Enumeration oracle for lin2 systems (small instances).
    #[command(name = "oracle-lin2")]
    OracleLin2 { file: PathBuf },
    /// Enumeration oracle for boolean CSPs (small instances).
    #[command(name = "oracle-csp")]
    OracleCsp { file: PathBuf },
    /// Enumeration oracle for ordering instances (small instances).
    #[command(name = "oracle-ord")]
    OracleOrd { file: PathBuf },
}

fn parse_eps(s: &str) -> Result<Rational, String> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (
            n.parse::<i64>().map_err(|_| "invalid numerator")?,
            d.parse::<i64>().map_err(|_| "invalid denominator")?,
        ),
        None => (s.parse::<i64>().map_err(|_| "invalid fraction")?, 1),
    };
    if den <= 0 || num <= 0 || num > den {
        return Err("eps must satisfy 0 < eps <= 1".into());
    }
    Ok(Rational::new(num, den))
}

enum RunError {
    Io(std::io::Error),
    Parse(ParseError),
    Lin2(Lin2Error),
    Csp(CspError),
    Ordering(OrderingError),
    Exact(ExactError),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        let guard = match self {
            RunError::Lin2(e) => is_lin2_guard(e),
            RunError::Csp(CspError::Lin2(e)) => is_lin2_guard(e),
            RunError::Csp(CspError::HybridGuard { .. }) => true,
            RunError::Ordering(OrderingError::Lin2(e)) => is_lin2_guard(e),
            RunError::Ordering(OrderingError::Exact(ExactError::GuardExceeded { .. })) => true,
            RunError::Exact(ExactError::GuardExceeded { .. }) => true,
            _ => false,
        };
        if guard {
            3
        } else {
            2
        }
    }
}

fn is_lin2_guard(e: &Lin2Error) -> bool {
    matches!(e, Lin2Error::ExhaustiveGuard { .. })
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RunError::Io(e) => write!(f, "{e}"),
            RunError::Parse(e) => write!(f, "{e}"),
            RunError::Lin2(e) => write!(f, "{e}"),
            RunError::Csp(e) => write!(f, "{e}"),
            RunError::Ordering(e) => write!(f, "{e}"),
            RunError::Exact(e) => write!(f, "{e}"),
        }
    }
}

macro_rules! from_err {
    ($variant:ident, $ty:ty) => {
        impl From<$ty> for RunError {
            fn from(e: $ty) -> Self {
                RunError::$variant(e)
            }
        }
    };
}
from_err!(Io, std::io::Error);
from_err!(Parse, ParseError);
from_err!(Lin2, Lin2Error);
from_err!(Csp, CspError);
from_err!(Ordering, OrderingError);
from_err!(Exact, ExactError);

/// Ordered `key=value` report; the key sequence is fixed per command.
struct Report {
    lines: Vec<(&'static str, String)>,
}

impl Report {
    fn new(command: &str) -> Self {
        Report {
            lines: vec![("command", command.to_string())],
        }
    }

    fn push(&mut self, key: &'static str, value: impl ToString) {
        self.lines.push((key, value.to_string()));
    }

    fn digest(&mut self, num_vars: usize, num_constraints: usize, total: u64, rho_w: Rational) {
        self.push("num_vars", num_vars);
        self.push("num_constraints", num_constraints);
        self.push("total_weight", total);
        self.push("rho_w", rational_string(rho_w));
    }

    fn print(&self, quiet: bool, seed: Option<u64>, started: Instant) {
        if quiet {
            return;
        }
        let mut out = String::new();
        for (key, value) in &self.lines {
            let _ = writeln!(out, "{key}={value}");
        }
        if let Some(seed) = seed {
            let _ = writeln!(out, "seed={seed}");
        }
        let _ = writeln!(out, "elapsed_ms={}", started.elapsed().as_millis());
        print!("{out}");
    }
}

fn bits_string(a: &Assignment) -> String {
    a.to_string()
}

fn ordering_string(phi: &Ordering) -> String {
    phi.vars()
        .iter()
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn verdict_lines(report: &mut Report, verdict: &Verdict<Assignment>) -> bool {
    match verdict {
        Verdict::Yes { witness, weight } => {
            report.push("verdict", "yes");
            report.push("witness", bits_string(witness));
            report.push("achieved", weight);
            true
        }
        Verdict::No { optimum, witness } => {
            report.push("verdict", "no");
            report.push("witness", bits_string(witness));
            report.push("achieved", optimum);
            false
        }
    }
}

fn aa_branch_name(branch: AaBranch) -> &'static str {
    match branch {
        AaBranch::Certificate { .. } => "yes-certificate",
        AaBranch::Exhaustive { .. } => "kernel+exhaustive",
    }
}

fn read(path: &Path) -> Result<String, RunError> {
    Ok(std::fs::read_to_string(path)?)
}

fn run(cli: &Cli) -> Result<u8, RunError> {
    let limits = cli.guard.map_or_else(Limits::default, Limits::uniform);
    let started = Instant::now();
    let (report, code) = match &cli.command {
        Command::SolveLin2 { file, k } => {
            let system = parse_lin2(&read(file)?)?;
            let mut report = Report::new("solve-lin2");
            report.digest(
                system.num_vars(),
                system.equations().len(),
                system.total_weight(),
                Rational::new(system.total_weight() as i64, 2),
            );
            report.push("k", k);
            let threshold = Rational::new((system.total_weight() + k) as i64, 2);
            report.push("threshold", rational_string(threshold));
            let out = system.solve_aa(*k, &limits)?;
            let yes = {
                report.push("branch", aa_branch_name(out.branch));
                verdict_lines(&mut report, &out.verdict)
            };
            (report, if yes { 0 } else { 1 })
        }
        Command::KernelizeLin2 { file, k, out } => {
            let system = parse_lin2(&read(file)?)?;
            let mut report = Report::new("kernelize-lin2");
            report.digest(
                system.num_vars(),
                system.equations().len(),
                system.total_weight(),
                Rational::new(system.total_weight() as i64, 2),
            );
            report.push("k", k);
            let threshold = Rational::new((system.total_weight() + k) as i64, 2);
            report.push("threshold", rational_string(threshold));
            match system.kernelize(*k)? {
                Kernelized::Certificate { witness, weight } => {
                    report.push("branch", "yes-certificate");
                    report.push("verdict", "yes");
                    report.push("witness", bits_string(&witness));
                    report.push("achieved", weight);
                    (report, 0)
                }
                Kernelized::Kernel(kernel) => {
                    let (compacted, _) = kernel.compact();
                    std::fs::write(out, serialize_lin2(&compacted))?;
                    report.push("branch", "kernel");
                    report.push("verdict", "kernel");
                    report.push("kernel_vars", compacted.num_vars());
                    report.push("kernel_out", out.display());
                    (report, 0)
                }
            }
        }
        Command::SolveCsp { file, k } => {
            let instance = parse_csp(&read(file)?)?;
            let mut report = Report::new("solve-csp");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            report.push("k", k);
            let threshold = instance.average_weight()
                + Rational::new(*k as i64, 1i64 << instance.arity_bound());
            report.push("threshold", rational_string(threshold));
            let out = instance.solve_aa(*k, &limits)?;
            report.push("branch", aa_branch_name(out.branch));
            let yes = verdict_lines(&mut report, &out.verdict);
            (report, if yes { 0 } else { 1 })
        }
        Command::HybridCsp { file, eps } => {
            let instance = parse_csp(&read(file)?)?;
            let mut report = Report::new("hybrid-csp");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            report.push("eps", rational_string(*eps));
            // The polynomial-time branch guarantees rho W + eps W / 2^(c+1).
            let bound = instance.average_weight()
                + *eps * Rational::from_integer(instance.total_weight() as i64)
                    / Rational::from_integer(1i64 << (instance.arity_bound() + 1));
            report.push("threshold", rational_string(bound));
            match instance.hybrid_solve(*eps, &limits)? {
                HybridOutcome::Approx { witness, weight } => {
                    report.push("verdict", "approx");
                    report.push("branch", "approx");
                    report.push("witness", bits_string(&witness));
                    report.push("achieved", weight);
                }
                HybridOutcome::Exact { witness, weight } => {
                    report.push("verdict", "exact");
                    report.push("branch", "exact");
                    report.push("witness", bits_string(&witness));
                    report.push("achieved", weight);
                }
            }
            (report, 0)
        }
        Command::KernelizeCsp { file, k, out } => {
            let instance = parse_csp(&read(file)?)?;
            let mut report = Report::new("kernelize-csp");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            report.push("k", k);
            let threshold = instance.average_weight()
                + Rational::new(*k as i64, 1i64 << instance.arity_bound());
            report.push("threshold", rational_string(threshold));
            match instance.kernelize(*k)? {
                CspKernelized::Certificate { witness, weight } => {
                    report.push("branch", "yes-certificate");
                    report.push("verdict", "yes");
                    report.push("witness", bits_string(&witness));
                    report.push("achieved", weight);
                    (report, 0)
                }
                CspKernelized::Kernel {
                    instance: kernel,
                    parameter,
                } => {
                    let (compacted, _) = kernel.compact();
                    std::fs::write(out, serialize_csp(&compacted))?;
                    report.push("branch", "kernel");
                    report.push("verdict", "kernel");
                    report.push("kernel_vars", compacted.num_vars());
                    report.push("kernel_out", out.display());
                    report.push("new_k", parameter);
                    (report, 0)
                }
            }
        }
        Command::SolveOrd { file, k } => {
            let instance = parse_ordering(&read(file)?)?;
            let mut report = Report::new("solve-ord");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            report.push("k", k);
            let threshold = instance.average_weight() + Rational::from_integer(*k as i64);
            report.push("threshold", rational_string(threshold));
            let out = solve_ordering_aa(&instance, *k, &limits)?;
            report.push(
                "branch",
                match out.branch {
                    OrderingBranch::Certificate => "yes-certificate",
                    OrderingBranch::ExactSearch(_) => "held-karp",
                },
            );
            let yes = match &out.verdict {
                Verdict::Yes { witness, weight } => {
                    report.push("verdict", "yes");
                    report.push("witness", ordering_string(witness));
                    report.push("achieved", weight);
                    true
                }
                Verdict::No { optimum, witness } => {
                    report.push("verdict", "no");
                    report.push("witness", ordering_string(witness));
                    report.push("achieved", optimum);
                    false
                }
            };
            (report, if yes { 0 } else { 1 })
        }
        Command::SolvePerm { file, k } => {
            let instance = parse_perm(&read(file)?)?;
            let mut report = Report::new("solve-perm");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            report.push("k", k);
            let threshold = instance.average_weight() + Rational::from_integer(*k as i64);
            report.push("threshold", rational_string(threshold));
            let out = solve_perm_aa(&instance, *k, &limits)?;
            report.push(
                "branch",
                match out.branch {
                    OrderingBranch::Certificate => "yes-certificate",
                    OrderingBranch::ExactSearch(_) => "held-karp",
                },
            );
            let yes = match &out.verdict {
                Verdict::Yes { witness, weight } => {
                    report.push("verdict", "yes");
                    report.push("witness", ordering_string(witness));
                    report.push("achieved", weight);
                    true
                }
                Verdict::No { optimum, witness } => {
                    report.push("verdict", "no");
                    report.push("witness", ordering_string(witness));
                    report.push("achieved", optimum);
                    false
                }
            };
            (report, if yes { 0 } else { 1 })
        }
        Command::ExactOrd { file } => {
            let instance = parse_ordering(&read(file)?)?;
            let mut report = Report::new("exact-ord");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            let (witness, optimum) = held_karp_ordering(&instance, limits.ordering_vars)?;
            report.push("verdict", "optimum");
            report.push("branch", "held-karp");
            report.push("witness", ordering_string(&witness));
            report.push("achieved", optimum);
            report.push("optimum", optimum);
            (report, 0)
        }
        Command::OracleLin2 { file } => {
            let system = parse_lin2(&read(file)?)?;
            let mut report = Report::new("oracle-lin2");
            report.digest(
                system.num_vars(),
                system.equations().len(),
                system.total_weight(),
                Rational::new(system.total_weight() as i64, 2),
            );
            let (witness, optimum) = brute_force_lin2(&system)?;
            report.push("verdict", "optimum");
            report.push("branch", "enumeration");
            report.push("witness", bits_string(&witness));
            report.push("achieved", optimum);
            report.push("optimum", optimum);
            (report, 0)
        }
        Command::OracleCsp { file } => {
            let instance = parse_csp(&read(file)?)?;
            let mut report = Report::new("oracle-csp");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            let (witness, optimum) = brute_force_csp(&instance)?;
            report.push("verdict", "optimum");
            report.push("branch", "enumeration");
            report.push("witness", bits_string(&witness));
            report.push("achieved", optimum);
            report.push("optimum", optimum);
            (report, 0)
        }
        Command::OracleOrd { file } => {
            let instance = parse_ordering(&read(file)?)?;
            let mut report = Report::new("oracle-ord");
            report.digest(
                instance.num_vars(),
                instance.constraints().len(),
                instance.total_weight(),
                instance.average_weight(),
            );
            let (witness, optimum) = brute_force_ordering(&instance)?;
            report.push("verdict", "optimum");
            report.push("branch", "enumeration");
            report.push("witness", ordering_string(&witness));
            report.push("achieved", optimum);
            report.push("optimum", optimum);
            (report, 0)
        }
    };
    report.print(cli.quiet, cli.seed, started);
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
