use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use coulomb_glue_core::constructions::{
    build_a_legs, build_comet, build_q_partition, Partition, PunctureData,
};
use coulomb_glue_core::euler::{cross_check, CrossCheckOptions, CrossCheckReport};
use coulomb_glue_core::gluability::GluabilityReport;
use coulomb_glue_core::problem::{
    decide, problem_of, DismembermentDoc, Flags, ProblemFile, QuiverDoc,
};
use coulomb_glue_core::quiver::{explode, finest_dismemberment};
use coulomb_glue_core::Error;

const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_CONSISTENCY: u8 = 3;

#[derive(Parser)]
#[command(
    name = "coulomb-glue",
    version,
    about = "Gluability checks for quiver gauge theories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct DecisionFlags {
    /// Emit machine-readable JSON.
    #[arg(long)]
    json: bool,
    /// Add the scalar flavor torus before deciding.
    #[arg(long)]
    scalar_flavor: bool,
    /// Quotient both sides by the diagonal scalar torus.
    #[arg(long)]
    quotient_scalar: bool,
    /// Reorient parallel edges to agree before deciding.
    #[arg(long)]
    normalize_orientation: bool,
}

impl DecisionFlags {
    fn flags(self) -> Flags {
        Flags {
            scalar_flavor: self.scalar_flavor,
            quotient_scalar: self.quotient_scalar,
            normalize_orientation: self.normalize_orientation,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide gluability of the map described by FILE.
    CheckGluable {
        #[command(flatten)]
        flags: DecisionFlags,
        file: PathBuf,
    },
    /// Compare the gluability decision with per-coweight exactness.
    Verify {
        #[command(flatten)]
        flags: DecisionFlags,
        /// Coordinate bound for dominant coweights.
        #[arg(long, default_value_t = 2)]
        bound: u32,
        /// Print every coweight verdict.
        #[arg(long)]
        verbose: bool,
        file: PathBuf,
    },
    /// Print a quiver document for a named construction.
    Construct {
        #[command(subcommand)]
        kind: Construct,
    },
}

#[derive(Subcommand)]
enum Construct {
    /// Star quiver of an ordered partition of N, e.g. `4 2,2`.
    PartitionQuiver { n: usize, parts: String },
    /// Disjoint legs of a partition.
    ALegs { parts: String },
    /// Central vertex with loops and one leg per puncture.
    Comet {
        #[arg(long, default_value_t = 0)]
        genus: usize,
        #[arg(long)]
        dim: usize,
        /// Weakly decreasing partition of DIM, repeatable.
        #[arg(long = "puncture")]
        punctures: Vec<String>,
    },
    /// Explode the quiver in FILE along its `explosion` entry.
    Explode { file: PathBuf },
    /// The finest dismemberment of the quiver in FILE.
    DismemberFinest { file: PathBuf },
}

enum Failure {
    Input(String),
    Consistency(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Consistency(m) => Failure::Consistency(m),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<ProblemFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    ProblemFile::parse(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn threads() -> Result<usize, Failure> {
    match std::env::var("COULOMB_GLUE_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("COULOMB_GLUE_THREADS: not a count: {v:?}"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, usize::from)),
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn render_gluability(r: &GluabilityReport) -> String {
    let mut out = String::new();
    if r.verdict {
        let _ = writeln!(out, "gluable ({} pairs checked)", r.pairs_checked);
    } else {
        let _ = writeln!(out, "not gluable: {} bad pairs", r.witnesses.len());
        for w in &r.witnesses {
            let alpha = w.alpha.as_deref().unwrap_or("none");
            let _ = writeln!(
                out,
                "  xi1={} xi2={} restricted=({}, {}) alpha={alpha} mu={}",
                w.xi1, w.xi2, w.restricted1, w.restricted2, w.mu
            );
        }
    }
    let _ = writeln!(
        out,
        "injectivity: {}",
        if r.injectivity_ok { "ok" } else { "fails" }
    );
    out
}

fn render_cross_check(r: &CrossCheckReport, verbose: bool) -> String {
    let mut out = String::new();
    if verbose {
        for v in &r.verdicts {
            let common = match &v.common_factor {
                Some((a, b)) => format!("{a}~{b}"),
                None => "-".into(),
            };
            let _ = writeln!(
                out,
                "lambda={} kind={:?} left_nonzero={} right_nonzero={} common={common} exact={}",
                v.lambda, v.kind, v.left_nonzero, v.right_nonzero, v.exact
            );
        }
    }
    for w in &r.witness_checks {
        let _ = writeln!(
            out,
            "witness mu={} exact={} dominant={} exact={}",
            w.mu, w.exact_at_witness, w.dominant, w.exact_at_dominant
        );
    }
    for d in &r.discrepancies {
        let _ = writeln!(out, "DISCREPANCY: {d}");
    }
    let scope = if r.complete_up_to_bound {
        ""
    } else {
        " (partial coverage)"
    };
    let _ = writeln!(
        out,
        "{} up to bound {}{scope}: gluable={} coweights checked={}",
        if r.consistent {
            "consistent"
        } else {
            "inconsistent"
        },
        r.bound,
        r.gluable,
        r.lambdas_checked
    );
    out
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::CheckGluable { flags, file } => {
            let doc = read(&file)?;
            let report = decide(&doc, flags.flags(), threads()?)?;
            print!(
                "{}",
                if flags.json {
                    json(&report)
                } else {
                    render_gluability(&report)
                }
            );
            Ok(if report.verdict { 0 } else { EXIT_NEGATIVE })
        }
        Command::Verify {
            flags,
            bound,
            verbose,
            file,
        } => {
            let doc = read(&file)?;
            let problem = problem_of(&doc, flags.flags())?;
            let opts = CrossCheckOptions {
                bound,
                record_verdicts: verbose,
                ..Default::default()
            };
            let report = cross_check(&problem, opts)?;
            print!(
                "{}",
                if flags.json {
                    json(&report)
                } else {
                    render_cross_check(&report, verbose)
                }
            );
            Ok(if report.consistent {
                0
            } else {
                EXIT_CONSISTENCY
            })
        }
        Command::Construct { kind } => {
            let doc = construct(kind)?;
            print!("{}", doc.to_json());
            Ok(0)
        }
    }
}

fn construct(kind: Construct) -> Result<ProblemFile, Failure> {
    Ok(match kind {
        Construct::PartitionQuiver { n, parts } => {
            let p = Partition::parse(&parts)?;
            if p.n() != n {
                return Err(Failure::Input(format!(
                    "parts {parts} sum to {}, not {n}",
                    p.n()
                )));
            }
            let (q, d) = build_q_partition(&p)?;
            ProblemFile::from_quiver(&q, &d)
        }
        Construct::ALegs { parts } => {
            let (q, d) = build_a_legs(&Partition::parse(&parts)?)?;
            ProblemFile::from_quiver(&q, &d)
        }
        Construct::Comet {
            genus,
            dim,
            punctures,
        } => {
            let punctures = punctures
                .iter()
                .map(|s| PunctureData::parse(s))
                .collect::<Result<Vec<_>, _>>()?;
            let (q, d) = build_comet(genus, dim, &punctures)?;
            ProblemFile::from_quiver(&q, &d)
        }
        Construct::Explode { file } => {
            let doc = read(&file)?;
            let (q, d) = doc.quiver()?;
            let parts = doc
                .explosion
                .as_ref()
                .map(|e| e.parts.clone())
                .unwrap_or_default();
            let x = explode(&q, &d, &parts)?;
            ProblemFile::from_quiver(&x.quiver, &x.dims)
        }
        Construct::DismemberFinest { file } => {
            let doc = read(&file)?;
            let (q, d) = doc.quiver()?;
            let fd = finest_dismemberment(&q, &d)?;
            let mut out = ProblemFile::from_quiver(&q, &d);
            out.dismemberment = Some(DismembermentDoc {
                quiver: QuiverDoc::from_quiver(&fd.quiver),
                vertex_map: fd.morphism.vertex_map().clone(),
                edge_map: fd.morphism.edge_map().clone(),
            });
            out
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Consistency(m)) => {
            eprintln!("internal consistency failure: {m}");
            ExitCode::from(EXIT_CONSISTENCY)
        }
    }
}
