use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rigidity::pipeline::{self, emit_figures, Figure, FinalVerdict, Pipeline, PipelineConfig, PipelineError};
use rigidity::polygon::RelevanceFilter;
use rigidity::solve::GbLimits;

#[derive(Parser)]
#[command(name = "rigidity", version, about = "Exact certification that equal-mass planar three-body motions are never partially rigid")]
struct Cli {
    /// Directory for stage checkpoints (resumed when present).
    #[arg(long, global = true, default_value = "checkpoints")]
    checkpoint_dir: PathBuf,
    /// Highest series coefficient a_N kept on the power-series route.
    #[arg(long, global = true, default_value_t = 8)]
    truncation: u32,
    /// Escalation ceiling for the truncation.
    #[arg(long, global = true, default_value_t = 16)]
    ceiling: u32,
    /// Which inner normals to examine.
    #[arg(long, global = true, value_enum, default_value_t = Edges::Seven)]
    edges: Edges,
    /// Groebner limits as `basis=N,pairs=M`.
    #[arg(long, global = true, default_value = "basis=2000,pairs=200000")]
    limits: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Edges {
    /// Normals with a + b >= 0.
    Seven,
    /// Every hull edge.
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureKind {
    Minkowski,
    NewtonDiagram,
}

#[derive(Subcommand)]
enum Command {
    /// Equations of motion, derivative cascade, conserved quantities.
    Derive,
    /// Normalization and elimination down to g1..g4 and their quadratic forms.
    Eliminate,
    /// Determinant G, its partials, and the five minors.
    Minors,
    /// Newton polygons, Minkowski sum, inner normals.
    Polygon,
    /// Face systems and Groebner bases per inner normal.
    Verdicts,
    /// Puiseux branch analysis for candidate roots.
    Branches,
    /// Numerical integration, finite differences, witness evaluation.
    Oracle,
    /// Run every stage and write certificate.json.
    Certify {
        /// Additional output path for the certificate.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-derive the verdict from a certificate without recomputation.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
    },
    /// Emit CSV data for plotting.
    EmitFig {
        #[arg(value_enum)]
        figure: FigureKind,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
}

fn parse_limits(s: &str) -> Result<GbLimits, String> {
    let mut limits = GbLimits::default();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (key, value) = part.split_once('=').ok_or_else(|| format!("expected key=value, got {part}"))?;
        let n: usize = value.parse().map_err(|_| format!("not a count: {value}"))?;
        match key.trim() {
            "basis" => limits.max_basis = n,
            "pairs" => limits.max_pairs = n,
            other => return Err(format!("unknown limit {other}")),
        }
    }
    Ok(limits)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn run(cli: Cli) -> Result<ExitCode, PipelineError> {
    let limits = parse_limits(&cli.limits).map_err(PipelineError::Config)?;
    let cfg = PipelineConfig {
        checkpoint_dir: Some(cli.checkpoint_dir.clone()),
        truncation: cli.truncation,
        ceiling: cli.ceiling,
        filter: match cli.edges {
            Edges::Seven => RelevanceFilter::LowerLeft,
            Edges::All => RelevanceFilter::AllEdges,
        },
        limits,
        ..PipelineConfig::default()
    };
    if let Command::Verify { certificate } = &cli.command {
        let cert = pipeline::read_certificate(certificate)?;
        let report = pipeline::verify_certificate(&cert);
        print_json(&report);
        let finite = report.ok() && report.verdict == FinalVerdict::Finite;
        return Ok(if finite { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }
    let mut p = Pipeline::new(cfg)?;
    match cli.command {
        Command::Derive => print_json(&p.derive()?.summary),
        Command::Eliminate => print_json(&p.eliminate()?.summary),
        Command::Minors => print_json(&p.minors()?.summary),
        Command::Polygon => print_json(p.polygon()?),
        Command::Verdicts => print_json(&p.verdicts()?),
        Command::Branches => print_json(&p.branches()?),
        Command::Oracle => print_json(p.oracle()?),
        Command::Certify { out } => {
            let cert = match p.certify() {
                Ok(c) => c,
                Err(PipelineError::Aborted { stage, message, partial }) => {
                    eprintln!("stage {stage} failed: {message}");
                    print_json(&partial.verdict);
                    return Ok(ExitCode::FAILURE);
                }
                Err(e) => return Err(e),
            };
            if let Some(path) = out {
                std::fs::write(path, cert.to_json())?;
            }
            print_json(&cert.verdict);
            return Ok(if cert.verdict == FinalVerdict::Finite { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::EmitFig { figure, out } => {
            let fig = match figure {
                FigureKind::Minkowski => Figure::Minkowski,
                FigureKind::NewtonDiagram => Figure::NewtonDiagram,
            };
            for path in emit_figures(&mut p, fig, &out)? {
                println!("{}", path.display());
            }
        }
        Command::Verify { .. } => unreachable!("handled above"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
