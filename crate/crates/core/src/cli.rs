//! Command-line front end: `steer`, `tomo`, `hardy` and `sample`.
//!
//! Exit status 0 means success, 1 a failed check, 2 a usage or input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

use crate::ensemble::{DensityOperator, Ensemble};
use crate::error::{Error, Result};
use crate::formats::{
    correlations_to_json, matrix_to_json, read_ensemble, read_matrix, read_to_string, write_text,
};
use crate::hardy::{golden_reference, golden_table, maximize_p22gg, sweep, tau, HardyContext};
use crate::linalg::ComplexMatrix;
use crate::report;
use crate::sampling::{empirical_correlations, reconstruct_empirical, ShotPlan};
use crate::tomography::{
    correlations, hermitian_basis, pauli_basis, resolution_consistency, CorrelationSet,
    OperatorBasis, Partition,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "densmat",
    version,
    about = "Density-matrix steering, correlation tomography and the Hardy table"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Steer one purification of a density matrix to each ensemble.
    Steer(SteerArgs),
    /// Correlation records from a density matrix, or a density matrix from records.
    Tomo(TomoArgs),
    /// Hardy probability table, golden-mean check or overlap sweep.
    Hardy(HardyArgs),
    /// Monte Carlo estimates of the correlation records and their reconstruction.
    Sample(SampleArgs),
}

#[derive(Debug, Args)]
pub struct SteerArgs {
    /// Density matrix file.
    pub density: PathBuf,
    /// Ensemble files, one target each.
    #[arg(required = true)]
    pub ensembles: Vec<PathBuf>,
    /// Every member fidelity must exceed 1 - tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    Hermitian,
    Pauli,
}

#[derive(Debug, Args)]
pub struct TomoArgs {
    /// Density matrix file (forward) or correlation record file (inverse).
    pub input: PathBuf,
    /// Subsystem dimensions, e.g. 2x2x2. Taken from the file in inverse mode.
    #[arg(long)]
    pub partition: Option<String>,
    #[arg(long, value_enum, default_value_t = BasisChoice::Hermitian)]
    pub basis: BasisChoice,
    /// Reference density matrix for the inverse residual.
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Coarser grouping such as 1|23 to cross-check (forward mode, repeatable).
    #[arg(long = "group")]
    pub groups: Vec<String>,
    /// Residuals and deviations must not exceed this.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Output file: records (forward) or reconstructed matrix (inverse).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["x", "golden", "sweep"])))]
pub struct HardyArgs {
    /// Overlap x = |<1R|2R>|^2 in (0, 1).
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Table at x = 1/tau checked against the exact powers of 1/tau.
    #[arg(long)]
    pub golden: bool,
    /// Rows (x, p(2G,2G)) at x = k/(N+1), k = 1..N.
    #[arg(long, value_name = "N")]
    pub sweep: Option<usize>,
    /// Allowed deviation of the golden table.
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    /// Write the table as a correlation record file (or the sweep rows).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Density matrix file.
    pub density: PathBuf,
    #[arg(long)]
    pub partition: String,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = BasisChoice::Hermitian)]
    pub basis: BasisChoice,
    /// Empirical record file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Error with the file it came from.
fn in_file(path: &Path, e: Error) -> Error {
    Error::Format(format!("{}: {e}", path.display()))
}

fn load_density(path: &Path) -> Result<DensityOperator> {
    read_matrix(path)
        .and_then(DensityOperator::new)
        .map_err(|e| in_file(path, e))
}

fn bases_for(partition: &Partition, choice: BasisChoice) -> Result<Vec<OperatorBasis>> {
    partition
        .dims()
        .iter()
        .map(|&d| match choice {
            BasisChoice::Hermitian => Ok(hermitian_basis(d)),
            BasisChoice::Pauli if d == 2 => Ok(pauli_basis()),
            BasisChoice::Pauli => Err(Error::Basis(format!(
                "Pauli basis needs qubits, got dimension {d}"
            ))),
        })
        .collect()
}

/// Output of one invocation.
struct Outcome {
    stdout: String,
    code: i32,
}

fn ok(stdout: String) -> Outcome {
    Outcome {
        stdout,
        code: EXIT_OK,
    }
}

fn checked(stdout: String, pass: bool) -> Outcome {
    Outcome {
        stdout,
        code: if pass { EXIT_OK } else { EXIT_CHECK_FAILED },
    }
}

fn cmd_steer(args: &SteerArgs) -> Result<Outcome> {
    let w = load_density(&args.density)?;
    let targets: Vec<Ensemble> = args
        .ensembles
        .iter()
        .map(|p| read_ensemble(p).map_err(|e| in_file(p, e)))
        .collect::<Result<_>>()?;
    let names: Vec<String> = args
        .ensembles
        .iter()
        .map(|p| p.display().to_string())
        .collect();
    let summary = report::steering(&w, &targets, &names).map_err(|e| match e {
        Error::Realization {
            target: Some(n), ..
        }
        | Error::Support {
            target: Some(n), ..
        } => in_file(&args.ensembles[n], e),
        other => other,
    })?;
    if let Some(out) = &args.out {
        write_text(out, summary.text.trim_end())?;
    }
    Ok(checked(
        summary.text,
        summary.min_fidelity > 1.0 - args.tolerance,
    ))
}

fn cmd_tomo(args: &TomoArgs) -> Result<Outcome> {
    let text = read_to_string(&args.input)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| in_file(&args.input, e.into()))?;
    if value.get("records").is_some() {
        let records: CorrelationSet =
            serde_json::from_value(value).map_err(|e| in_file(&args.input, e.into()))?;
        let reference = match &args.reference {
            Some(p) => Some(read_matrix(p).map_err(|e| in_file(p, e))?),
            None => None,
        };
        let summary = report::reconstruction(&records, reference.as_ref())?;
        if let Some(out) = &args.out {
            write_text(out, &matrix_to_json(summary.matrix.matrix()))?;
        }
        let pass = summary.residual.is_none_or(|r| r <= args.tolerance);
        return Ok(checked(summary.text, pass));
    }

    let matrix: ComplexMatrix =
        serde_json::from_value(value).map_err(|e| in_file(&args.input, e.into()))?;
    let w = DensityOperator::new(matrix).map_err(|e| in_file(&args.input, e))?;
    let spec = args.partition.as_deref().ok_or_else(|| {
        Error::Format("--partition is required for a density matrix input".into())
    })?;
    let partition = Partition::parse(spec)?;
    let records = correlations(&w, &partition, &bases_for(&partition, args.basis)?)?;
    let json = correlations_to_json(&records);

    if args.groups.is_empty() {
        return Ok(match &args.out {
            Some(out) => {
                write_text(out, &json)?;
                ok(format!(
                    "wrote {} records for partition {partition}\n",
                    records.records.len()
                ))
            }
            None => ok(format!("{json}\n")),
        });
    }
    let mut partitions = vec![partition.clone()];
    for g in &args.groups {
        partitions.push(partition.coarsen_spec(g)?);
    }
    let consistency = resolution_consistency(&w, &partitions)?;
    if let Some(out) = &args.out {
        write_text(out, &json)?;
    }
    let pass = consistency.max_pairwise_deviation <= args.tolerance
        && consistency.max_source_deviation <= args.tolerance;
    Ok(checked(report::consistency(&w, &consistency), pass))
}

fn cmd_hardy(args: &HardyArgs) -> Result<Outcome> {
    if let Some(n) = args.sweep {
        let text = report::sweep(&sweep(n));
        if let Some(out) = &args.out {
            write_text(out, text.trim_end())?;
        }
        return Ok(ok(text));
    }
    if args.golden {
        let table = golden_table();
        let ctx = HardyContext::new(1.0 / tau())?;
        let mut text = report::golden(&table);
        let max = maximize_p22gg();
        text.push_str(&format!(
            "maximum of p(2G,2G) at x = {}, p = {}\n\n",
            report::fixed12(max.x),
            report::fixed12(max.p)
        ));
        text.push_str(&report::hardy(&ctx));
        if let Some(out) = &args.out {
            write_text(out, &correlations_to_json(&table.to_records(&ctx)))?;
        }
        let sums_ok = table
            .column_sums()
            .iter()
            .all(|s| (s - 1.0).abs() <= args.tolerance);
        let pass = table.max_deviation(&golden_reference()) <= args.tolerance && sums_ok;
        return Ok(checked(text, pass));
    }
    let x = args.x.expect("clap requires one mode");
    let ctx = HardyContext::new(x)?;
    if let Some(out) = &args.out {
        write_text(out, &correlations_to_json(&ctx.table().to_records(&ctx)))?;
    }
    Ok(ok(report::hardy(&ctx)))
}

fn cmd_sample(args: &SampleArgs) -> Result<Outcome> {
    let w = load_density(&args.density)?;
    let partition = Partition::parse(&args.partition)?;
    let bases = bases_for(&partition, args.basis)?;
    let set = empirical_correlations(
        &w,
        &partition,
        &bases,
        &ShotPlan::new(args.shots, args.seed)?,
    )?;
    let rec = reconstruct_empirical(&set, Some(&w))?;
    if let Some(out) = &args.out {
        write_text(out, &set.to_json())?;
    }
    Ok(ok(report::empirical(&set, &rec)))
}

/// Runs one command line, writing to the given streams; returns the exit status.
pub fn run<I, T>(argv: I, stdout: &mut impl Write, stderr: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{}", e.render());
                EXIT_OK
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Steer(a) => cmd_steer(a),
        Command::Tomo(a) => cmd_tomo(a),
        Command::Hardy(a) => cmd_hardy(a),
        Command::Sample(a) => cmd_sample(a),
    };
    match result {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            outcome.code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if let Error::IncompleteData { missing } = &e {
                for m in missing {
                    let _ = writeln!(stderr, "  missing {m:?}");
                }
            }
            EXIT_USAGE
        }
    }
}
