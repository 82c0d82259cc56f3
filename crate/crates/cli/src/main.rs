mod eval;
mod output;
mod plan;
mod range;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{CommandFactory, Parser, Subcommand};
use serde::Serialize;
use stabent::models::ModelSpec;
use stabent::{ModelId, StabilizerModel};

use crate::output::Format;
use crate::plan::{ModelArgs, PlanArgs};

#[derive(Parser)]
#[command(name = "stabent", version, about = "Exact entanglement entropies of stabilizer models and the deformed cluster family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one quantity at a single parameter point.
    Compute(PlanArgs),
    /// Evaluate one quantity over the cartesian product of parameter ranges.
    Sweep(PlanArgs),
    /// Commutation, rank and degeneracy report for a model.
    Validate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// List the model zoo.
    Models {
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Write a model spec file.
    ExportModel {
        #[command(flatten)]
        model: ModelArgs,
        /// Destination; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Read a model spec file, validate it and optionally write it back out.
    ImportModel {
        file: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn usage_error(msg: String) -> ! {
    Cli::command()
        .error(clap::error::ErrorKind::MissingRequiredArgument, msg)
        .exit()
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Compute(args) => run_plan("compute", args),
        Command::Sweep(args) => run_plan("sweep", args),
        Command::Validate { model, out } => {
            let m = model.build_default()?;
            let report = m.validate();
            output::emit_value(&ValidationOut::new(&m, report), out, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Models { out } => {
            let rows: Vec<ZooEntry> = ModelId::catalog()
                .into_iter()
                .map(|(name, description)| ZooEntry { name, description })
                .collect();
            output::emit_value(&rows, out, None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportModel { model, output } => {
            let m = model.build_default()?;
            output::write_text(&serde_json::to_string_pretty(&m.to_spec())?, output.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ImportModel { file, output } => {
            let m = import(&file)?;
            if let Some(path) = output {
                output::write_text(&serde_json::to_string_pretty(&m.to_spec())?, Some(&path))?;
            }
            output::emit_value(&ValidationOut::new(&m, m.validate()), Format::Json, None)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_plan(command: &'static str, args: PlanArgs) -> Result<ExitCode> {
    let plan = match plan::Plan::new(command, args) {
        Ok(p) => p,
        Err(plan::PlanError::Usage(msg)) => usage_error(msg),
        Err(plan::PlanError::Other(e)) => return Err(e),
    };
    let records = eval::run(&plan)?;
    let failed = records.iter().any(|r| r.error.is_some());
    output::emit_records(&plan, &records)?;
    Ok(if failed { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

pub fn import(path: &std::path::Path) -> Result<StabilizerModel> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: ModelSpec = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(StabilizerModel::from_spec(&spec)?)
}

#[derive(Serialize)]
struct ZooEntry {
    name: &'static str,
    description: &'static str,
}

#[derive(Serialize)]
struct ValidationOut {
    model: String,
    dims: Vec<usize>,
    q: usize,
    n_qubits: usize,
    #[serde(flatten)]
    report: stabent::ValidationReport,
}

impl ValidationOut {
    fn new(m: &StabilizerModel, report: stabent::ValidationReport) -> Self {
        Self {
            model: m.name().to_string(),
            dims: m.lattice().dims().to_vec(),
            q: m.lattice().qubits_per_site(),
            n_qubits: m.n_qubits(),
            report,
        }
    }
}
