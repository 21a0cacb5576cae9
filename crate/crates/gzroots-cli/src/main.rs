mod cases;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use gzroots::atypical::{build_atypical_sl3, AtypicalError};
use gzroots::genrep::{build_flat_sl3, build_generic_rep, GenRepError, GeneratorSet};
use gzroots::gzbasis::{enumerate_basis, generic_dimension, weight_multiplicities, TopRow};
use gzroots::io::{gauge_value, report_value, to_csv, Document};
use gzroots::qarith::{QPoint, UnityOrder};
use gzroots::verify::{
    check_defining_relations, check_root_of_unity_constraints, full_report, DEFAULT_RANK_TOL,
    DEFAULT_RELATION_TOL,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "gzroots", version, about = "Gelfand-Zetlin representations of U_q(sl(N)) at generic q and roots of unity")]
struct Cli {
    /// Relation residual tolerance.
    #[arg(long, global = true, env = "GZROOTS_TOL")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct TopArgs {
    /// Top row, highest first, e.g. `4,2,0`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    top: Vec<i64>,
    /// N; when the top row has N-1 entries a trailing 0 is appended.
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(clap::Args, Clone)]
struct QArgs {
    /// Order of the root of unity q = exp(2 pi i / m).
    #[arg(long, conflicts_with = "generic_angle")]
    m: Option<u32>,
    /// Angle of a generic q = exp(i angle).
    #[arg(long)]
    generic_angle: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Generic,
    Flat,
    Atypical,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum WorkedCase {
    #[value(name = "flat-7")]
    Flat7,
    #[value(name = "flat-18")]
    Flat18,
    #[value(name = "atypical-15")]
    Atypical15,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension of the module with the given top row.
    Dim {
        #[command(flatten)]
        top: TopArgs,
    },
    /// List the basis patterns.
    Enumerate {
        #[command(flatten)]
        top: TopArgs,
        /// Print multiplicities of Cartan-exponent tuples instead.
        #[arg(long)]
        weights: bool,
    },
    /// Build generators and write them as canonical JSON.
    Build {
        #[command(flatten)]
        top: TopArgs,
        #[command(flatten)]
        q: QArgs,
        /// Formula family; chosen from the top row and q when omitted.
        #[arg(long, value_enum)]
        convention: Option<ConventionArg>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a built file against the defining relations.
    Verify { file: PathBuf },
    /// Reproduce a worked example.
    #[command(name = "paper-case")]
    WorkedCase {
        #[arg(value_enum)]
        name: WorkedCase,
        /// Also write the built generators here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert a built file to CSV triplets or canonical JSON.
    Export {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with its exit code.
#[derive(Debug)]
pub(crate) enum Failure {
    Verification(String),
    Config(String),
    Divergence(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Config(_) => 2,
            Failure::Divergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(s) | Failure::Config(s) | Failure::Divergence(s) => s,
        }
    }
}

impl From<AtypicalError> for Failure {
    fn from(e: AtypicalError) -> Self {
        match e {
            AtypicalError::UnresolvedDivergence { .. } | AtypicalError::GenRep(GenRepError::DivergentElement { .. }) => {
                Failure::Divergence(e.to_string())
            }
            _ => Failure::Config(e.to_string()),
        }
    }
}

impl From<GenRepError> for Failure {
    fn from(e: GenRepError) -> Self {
        AtypicalError::from(e).into()
    }
}

fn config(e: impl std::fmt::Display) -> Failure {
    Failure::Config(e.to_string())
}

fn parse_top(args: &TopArgs) -> Result<TopRow, Failure> {
    let mut values = args.top.clone();
    if let Some(n) = args.rank {
        if values.len() + 1 == n {
            values.push(0);
        } else if values.len() != n {
            return Err(Failure::Config(format!("--rank {n} does not fit a top row of {} entries", values.len())));
        }
    }
    TopRow::new(values).map_err(config)
}

fn parse_q(args: &QArgs) -> Result<QPoint, Failure> {
    match (args.m, args.generic_angle) {
        (Some(m), None) => Ok(QPoint::root_of_unity(UnityOrder::new(m).map_err(config)?)),
        (None, Some(a)) => QPoint::generic(a).map_err(config),
        (None, None) => Err(Failure::Config("give either --m or --generic-angle".into())),
        (Some(_), Some(_)) => Err(Failure::Config("--m and --generic-angle are exclusive".into())),
    }
}

pub(crate) fn build(top: &TopRow, q: &QPoint, convention: Option<ConventionArg>) -> Result<GeneratorSet, Failure> {
    let order = q.order();
    let convention = convention.unwrap_or(match order {
        None => ConventionArg::Generic,
        Some(m) if top.rank() == 3 && top.span() == m.as_i64() + 1 => ConventionArg::Flat,
        Some(m) if top.rank() == 3 && top.span() > m.as_i64() => ConventionArg::Atypical,
        Some(_) => ConventionArg::Generic,
    });
    match (convention, order) {
        (ConventionArg::Generic, _) => Ok(build_generic_rep(top, q)?),
        (ConventionArg::Flat, Some(m)) => Ok(build_flat_sl3(top, m).map_err(config)?),
        (ConventionArg::Atypical, Some(m)) => Ok(build_atypical_sl3(top, m)?),
        (_, None) => Err(Failure::Config("flat and atypical conventions need a root of unity (--m)".into())),
    }
}

/// Relations (and root constraints at a root) plus the gauge of a modified basis.
pub(crate) fn build_report(g: &GeneratorSet, tol: f64) -> Value {
    let mut report = json!({});
    let verification = check_defining_relations(g, tol).and_then(|r| match g.q.order() {
        Some(m) => Ok(r.merge(check_root_of_unity_constraints(g, m, tol)?)),
        None => Ok(r),
    });
    report["verification"] = match verification {
        Ok(r) => report_value(&r),
        Err(e) => json!({ "skipped": e.to_string() }),
    };
    if let Some(rec) = &g.rotation {
        report["gauge"] = gauge_value(g, rec);
    }
    report
}

pub(crate) fn write_output(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Config(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn read_document(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    Document::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = cli.tol.unwrap_or(DEFAULT_RELATION_TOL);
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::Config(format!("tolerance must be positive, got {tol}")));
    }
    match cli.command {
        Command::Dim { top } => {
            println!("{}", generic_dimension(&parse_top(&top)?));
        }
        Command::Enumerate { top, weights } => {
            let basis = enumerate_basis(&parse_top(&top)?);
            if weights {
                println!("{:<24} multiplicity", "cartan exponents");
                for (w, n) in weight_multiplicities(&basis) {
                    println!("{:<24} {n}", format!("{w:?}"));
                }
            } else {
                for p in basis.states() {
                    println!("{p}");
                }
            }
        }
        Command::Build { top, q, convention, out } => {
            let g = build(&parse_top(&top)?, &parse_q(&q)?, convention)?;
            let report = build_report(&g, tol);
            write_output(out.as_deref(), &Document::new(g, report).to_canonical_json())?;
        }
        Command::Verify { file } => {
            let doc = read_document(&file)?;
            let g = &doc.generators;
            let r = full_report(g, tol, DEFAULT_RANK_TOL).map_err(config)?;
            println!("{} dim {} at q = {} (top {:?})", g.convention.as_str(), g.dim(), g.q.value(), g.basis.top().values());
            for (name, value) in &r.residuals {
                println!("  {name:<14} {value:.3e}");
            }
            println!("singular vectors: {}", r.singular_vectors.len());
            println!("closure dimensions: {:?}", r.invariant_dims);
            if !r.passed {
                return Err(Failure::Verification(format!(
                    "max residual {:.3e} exceeds tolerance {tol:.1e}",
                    r.max_residual()
                )));
            }
            println!("passed at tol {tol:.1e}");
        }
        Command::WorkedCase { name, out } => cases::run_case(name, cli.tol, out.as_deref())?,
        Command::Export { file, format, out } => {
            let doc = read_document(&file)?;
            let text = match format {
                Format::Csv => to_csv(&doc.generators),
                Format::Json => doc.to_canonical_json(),
            };
            write_output(out.as_deref(), text.trim_end())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
