//! The `oddsym` command line: verification suites and definition files.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails (the witness
//! is printed), 2 for unreadable or malformed input, 3 for mathematically
//! ill-posed requests such as non-transversal compositions.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oddsym_core::bv::{compose, compose_relations, delta_l, Lagrangian};
use oddsym_core::deformed::DeformedForms;
use oddsym_core::defs::{parse_expr, Definition};
use oddsym_core::examples::{crossed_product_verify, pair_groupoid_demo, Check, Report};
use oddsym_core::poisson::{LieStructureConstants, OddPoissonStructure};
use oddsym_core::suites::{self, SuiteConfig};
use oddsym_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "oddsym",
    version,
    about = "Exact checks for odd Poisson geometry and BV calculus"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 7)]
    pub seed: u64,
    /// Samples per randomized suite.
    #[arg(long, global = true, default_value_t = 200)]
    pub samples: usize,
    /// Degree cap for random polynomials.
    #[arg(long, global = true, default_value_t = 5)]
    pub max_degree: u32,
    /// Definition file.
    #[arg(long, global = true)]
    pub file: Option<PathBuf>,
    /// Expression to evaluate instead of the file's first `[expression]`.
    #[arg(long, global = true)]
    pub expr: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the normal form of an expression in the deformed forms of the file's structure.
    Normalize,
    /// Check {π, π} = 0 for the file's structure.
    CheckPoisson,
    /// Check [f, dg] = {f, g}, associativity and d² = 0.
    CheckDeformation,
    /// Run the BV operator, δ_L and pairing suites.
    BvVerify,
    /// Compose the file's Lagrangian relations and their δ-densities.
    Compose,
    /// Check the crossed-product relations for the file's Lie algebra (sl₂ without a file).
    CrossedProduct,
    /// Realize the deformed forms of ΠT*ℝⁿ by diagonal kernels.
    DemoGroupoid {
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        max_filtration: u32,
    },
    /// Check F ∘ d = Δ ∘ F and the Cartan shadow.
    FourierCheck,
}

enum Outcome {
    Reports(Vec<Report>),
    Text(String),
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn cli_run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&cli) {
        Ok(Outcome::Text(s)) => {
            let _ = writeln!(out, "{s}");
            EXIT_OK
        }
        Ok(Outcome::Reports(reports)) => {
            for r in &reports {
                let _ = write!(out, "{r}");
            }
            if reports.iter().all(Report::passed) {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Err(e) => {
            let _ = writeln!(err, "oddsym: {e}");
            if e.is_domain() {
                EXIT_DOMAIN
            } else {
                EXIT_INPUT
            }
        }
    }
}

fn config(c: &Common) -> SuiteConfig {
    SuiteConfig {
        samples: c.samples,
        seed: c.seed,
        max_degree: c.max_degree,
    }
}

fn definition(c: &Common) -> Result<Option<Definition>, Error> {
    let Some(path) = &c.file else {
        return Ok(None);
    };
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    Definition::parse(&text).map(Some)
}

fn structure(c: &Common) -> Result<(Definition, OddPoissonStructure), Error> {
    let def = definition(c)?.ok_or_else(|| Error::Parse("this command needs --file".into()))?;
    let pi = def
        .poisson()?
        .ok_or_else(|| Error::Parse("the file defines neither [poisson] nor [lie]".into()))?;
    Ok((def, pi))
}

fn run(cli: &Cli) -> Result<Outcome, Error> {
    let c = &cli.common;
    let cfg = config(c);
    match &cli.command {
        Command::Normalize => {
            let (def, pi) = structure(c)?;
            let omega = DeformedForms::new(&pi)?;
            let expr = match &c.expr {
                Some(s) => parse_expr(s)?,
                None => def.expression(None)?.clone(),
            };
            Ok(Outcome::Text(expr.to_deformed(&omega)?.to_string()))
        }
        Command::CheckPoisson => Ok(Outcome::Reports(vec![suites::jacobi(&structure(c)?.1)?])),
        Command::CheckDeformation => {
            let pi = structure(c)?.1;
            Ok(Outcome::Reports(vec![
                suites::jacobi(&pi)?,
                suites::deformation(&pi, cfg)?,
            ]))
        }
        Command::BvVerify => Ok(Outcome::Reports(suites::bv_all(cfg)?)),
        Command::Compose => {
            let def = definition(c)?.ok_or_else(|| Error::Parse("compose needs --file".into()))?;
            compose_file(&def).map(|r| Outcome::Reports(vec![r]))
        }
        Command::CrossedProduct => {
            let lie = match definition(c)? {
                Some(def) => def
                    .lie
                    .ok_or_else(|| Error::Parse("crossed-product needs a [lie] section".into()))?,
                None => LieStructureConstants::sl2(),
            };
            Ok(Outcome::Reports(vec![crossed_product_verify(&lie)?]))
        }
        Command::DemoGroupoid { n, max_filtration } => {
            Ok(Outcome::Reports(vec![pair_groupoid_demo(*n, *max_filtration)?]))
        }
        Command::FourierCheck => Ok(Outcome::Reports(suites::fourier(cfg)?)),
    }
}

/// Folds the file's relations left to right, checking `Δδ_L = 0` for each
/// and `compose(δ_L, δ_M) = δ_{L∘M}` at every step.
fn compose_file(def: &Definition) -> Result<Report, Error> {
    let ls = def
        .lagrangians
        .iter()
        .map(|s| s.build())
        .collect::<Result<Vec<Lagrangian>, _>>()?;
    let (first, rest) = ls
        .split_first()
        .ok_or_else(|| Error::Parse("no [lagrangian] sections".into()))?;
    let mut report = Report::new("Lagrangian relations");
    for (i, l) in ls.iter().enumerate() {
        let d = delta_l(l)?;
        let dd = d.bv_delta()?;
        report.push(
            Check::new(format!("Δδ_L{} = 0", i + 1), (!dd.is_zero()).then(|| dd.to_string())).note(d.to_string()),
        );
    }
    let (mut l, mut m) = (first.clone(), delta_l(first)?);
    for (i, next) in rest.iter().enumerate() {
        l = compose_relations(&l, next)?;
        m = compose(&m, &delta_l(next)?)?;
        let want = delta_l(&l)?;
        report.push(
            Check::new(
                format!("step {}: compose(δ, δ) = δ of the composite", i + 1),
                (m != want).then(|| format!("{m} vs {want}")),
            )
            .note(m.to_string()),
        );
    }
    Ok(report)
}
