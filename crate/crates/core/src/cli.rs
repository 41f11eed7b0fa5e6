//! `diffalg` command line. Every command returns its exit code and the full
//! report text so that tests can drive it without spawning a process.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::calculus::Calculus;
use crate::classifier::{classify, fmt_blocks, fmt_set, generate_templates_with, TableMode};
use crate::expr::parse_expr;
use crate::par::Execution;
use crate::pbw::{Rewriter, Strategy};
use crate::presentation::AlgebraPresentation;
use crate::smoothness::{
    decide_smoothness_with, verdict_lines, verify_witness, SmoothnessError, Verdict, VerifyConfig, WitnessReport,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "diffalg", version, about = "Diffusion algebras: PBW checks, classification, differential smoothness")]
pub struct Cli {
    /// Run every check on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Overlap confluence of every triple.
    CheckPbw { file: PathBuf },
    /// Index decomposition, family and parameters.
    Classify { file: PathBuf },
    /// Smoothness verdict, certified when smooth.
    Smooth {
        file: PathBuf,
        #[arg(long)]
        degree_bound: Option<u32>,
    },
    /// Normal form of a polynomial.
    Reduce { file: PathBuf, expr: String },
    /// Partial derivatives under the constructed calculus.
    D { file: PathBuf, expr: String },
    /// Relation templates for `n` generators.
    Tables {
        n: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
    /// Witness automorphisms and every calculus check.
    VerifyCalculus {
        file: PathBuf,
        #[arg(long)]
        degree_bound: Option<u32>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Paper,
    Full,
}

struct Failure(i32, String);

fn input_err(msg: impl std::fmt::Display) -> Failure {
    Failure(EXIT_INPUT, format!("error: {msg}\n"))
}

fn load(path: &PathBuf) -> Result<AlgebraPresentation, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let p = AlgebraPresentation::parse(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))?;
    let report = p.validate();
    if let Some(v) = report.violations.first() {
        return Err(input_err(format!("{}: {v}", path.display())));
    }
    Ok(p)
}

fn smooth_err(e: SmoothnessError) -> Failure {
    match e {
        SmoothnessError::Invalid(_) => input_err(e),
        SmoothnessError::NotPbw(a, b, c) => {
            Failure(EXIT_NEGATIVE, format!("pbw: false\ntriple: {a} {b} {c}\nerror: {e}\n"))
        }
    }
}

fn check_lines(out: &mut String, report: &WitnessReport) {
    for c in &report.checks {
        let _ = writeln!(out, "check:{}: {}", c.name, if c.passed { "PASS" } else { "FAIL" });
        if !c.passed && !c.detail.is_empty() {
            let _ = writeln!(out, "detail:{}: {}", c.name, c.detail);
        }
    }
}

fn config(n: usize, degree_bound: Option<u32>, exec: Execution) -> VerifyConfig {
    let mut cfg = VerifyConfig::for_n(n);
    if let Some(d) = degree_bound {
        cfg.integrating_degree = d;
    }
    cfg.exec = exec;
    cfg
}

fn smooth_report(
    file: &PathBuf,
    degree_bound: Option<u32>,
    exec: Execution,
    show_witness: bool,
) -> Result<(i32, String), Failure> {
    let p = load(file)?;
    let v = decide_smoothness_with(&p, exec).map_err(smooth_err)?;
    let mut out = String::new();
    for line in verdict_lines(&v, p.n()) {
        out.push_str(&line);
        out.push('\n');
    }
    if v.verdict != Verdict::Smooth {
        return Ok((EXIT_NEGATIVE, out));
    }
    if show_witness {
        if let Some(nu) = &v.witness {
            for line in nu.describe() {
                let _ = writeln!(out, "nu: {line}");
            }
            let _ = writeln!(out, "nu_omega: {}", fmt_images(&nu.nu_omega(), p.n()));
        }
    }
    let cfg = config(p.n(), degree_bound, exec);
    let report = verify_witness(&p, &v, cfg);
    let _ = writeln!(out, "certified_degree: {}", cfg.integrating_degree);
    check_lines(&mut out, &report);
    let code = if report.all_passed() { EXIT_OK } else { EXIT_NEGATIVE };
    Ok((code, out))
}

fn fmt_images(m: &crate::calculus::AffineMap, n: usize) -> String {
    (1..=n).map(|j| format!("D{j} -> {}", m.image(j))).collect::<Vec<_>>().join(", ")
}

fn execute(cli: Cli) -> Result<(i32, String), Failure> {
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    let mut out = String::new();
    match cli.command {
        Command::CheckPbw { file } => {
            let p = load(&file)?;
            let rw = Rewriter::new(&p);
            let report = rw.is_pbw(exec);
            let _ = writeln!(out, "pbw: {}", report.pbw);
            if let Some((a, b, c)) = report.first_failure {
                let t = rw.diamond_check_triple(a, b, c).expect("reported triple is valid");
                let _ = writeln!(out, "triple: {a} {b} {c}");
                let _ = writeln!(out, "left: {}", t.nf_left);
                let _ = writeln!(out, "right: {}", t.nf_right);
                return Ok((EXIT_NEGATIVE, out));
            }
            Ok((EXIT_OK, out))
        }
        Command::Classify { file } => {
            let p = load(&file)?;
            let (dec, fam) = classify(&p);
            let _ = writeln!(out, "family: {}", fam.family_name());
            if let Some(l) = &fam.label {
                let _ = writeln!(out, "case: {l}");
            }
            let _ = writeln!(out, "I: {}", fmt_set(&dec.i_set));
            let _ = writeln!(out, "S: {}", fmt_set(&dec.s));
            let _ = writeln!(out, "Tcirc: {}", fmt_blocks(&dec.t_circ));
            let _ = writeln!(out, "Tbullet: {}", fmt_blocks(&dec.t_bullet));
            let _ = writeln!(out, "R: {}", fmt_blocks(&dec.r_components));
            for (k, v) in &fam.params {
                let _ = writeln!(out, "param: {k} = {v}");
            }
            for v in &fam.violations {
                let _ = writeln!(out, "violation: {v}");
            }
            let code = if fam.family.is_some() { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, out))
        }
        Command::Smooth { file, degree_bound } => smooth_report(&file, degree_bound, exec, false),
        Command::VerifyCalculus { file, degree_bound } => smooth_report(&file, degree_bound, exec, true),
        Command::Reduce { file, expr } => {
            let p = load(&file)?;
            let words = parse_expr(&expr, p.n()).map_err(|e| input_err(format!("expression: {e}")))?;
            let nf = Rewriter::new(&p).normal_form(&words, Strategy::Leftmost);
            let _ = writeln!(out, "{nf}");
            Ok((EXIT_OK, out))
        }
        Command::D { file, expr } => {
            let p = load(&file)?;
            let words = parse_expr(&expr, p.n()).map_err(|e| input_err(format!("expression: {e}")))?;
            let v = decide_smoothness_with(&p, exec).map_err(smooth_err)?;
            let Some(nu) = v.witness else {
                let _ = writeln!(out, "verdict: {}", v.verdict);
                let _ = writeln!(out, "error: no calculus is constructed for this presentation");
                return Ok((EXIT_NEGATIVE, out));
            };
            let calc = Calculus::new(&p, nu);
            let form = calc.differential_words(&words);
            for a in 1..=p.n() {
                let _ = writeln!(out, "d/dD{a}: {}", form.coefficient(&[a]));
            }
            let _ = writeln!(out, "d: {form}");
            Ok((EXIT_OK, out))
        }
        Command::Tables { n, mode } => {
            let mode = match mode {
                ModeArg::Paper => TableMode::Paper,
                ModeArg::Full => TableMode::Full,
            };
            let ts = generate_templates_with(n, mode, exec).map_err(input_err)?;
            let _ = writeln!(out, "templates: {}", ts.len());
            for sk in &ts {
                out.push('\n');
                out.push_str(&sk.render());
            }
            Ok((EXIT_OK, out))
        }
    }
}

/// Parse `args` (including the program name) and run one command.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    match execute(cli) {
        Ok(r) => r,
        Err(Failure(code, msg)) => (code, msg),
    }
}
