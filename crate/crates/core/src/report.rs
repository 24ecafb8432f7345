//! Human-readable reports. Every number is printed with `fixed12`, so the
//! text is stable across runs and platforms.

use std::fmt::Write;

use crate::ensemble::{DensityOperator, Ensemble};
use crate::error::Result;
use crate::hardy::{
    golden_reference, paradox_report, HardyContext, ProbabilityTable, GOLDEN_EXPONENTS, OUTCOMES,
    SETTINGS,
};
use crate::linalg::{ComplexMatrix, C64};
use crate::sampling::{EmpiricalReconstruction, EmpiricalSet};
use crate::steering::steering_witness;
use crate::tomography::{ConsistencyReport, CorrelationSet, CorrelationTomography};

/// Largest number of decimals `fixed12` prints.
const MAX_DECIMALS: i32 = 15;

/// Fixed-point decimal with 12 significant digits, at most 15 decimals.
/// Anything that rounds to zero prints exactly like `0.0`.
pub fn fixed12(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let magnitude = if v == 0.0 {
        0
    } else {
        v.abs().log10().floor() as i32
    };
    let mut decimals = (11 - magnitude).clamp(0, MAX_DECIMALS) as usize;
    let mut s = format!("{v:.decimals$}");
    // rounding up to the next power of ten adds a digit
    if decimals > 0
        && s.trim_start_matches('-').parse::<f64>().unwrap() >= 10f64.powi(magnitude + 1)
    {
        decimals -= 1;
        s = format!("{v:.decimals$}");
    }
    if s.chars().all(|c| matches!(c, '-' | '0' | '.')) {
        "0.00000000000".to_string()
    } else {
        s
    }
}

/// `a+bi` with both parts in `fixed12`.
pub fn complex12(z: C64) -> String {
    let im = fixed12(z.im);
    let sign = if im.starts_with('-') { "" } else { "+" };
    format!("{}{sign}{im}i", fixed12(z.re))
}

pub fn render_vector(v: &[C64]) -> String {
    let parts: Vec<String> = v.iter().map(|&z| complex12(z)).collect();
    format!("[{}]", parts.join(", "))
}

pub fn render_matrix(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|c| complex12(m[(r, c)])).collect();
        writeln!(out, "  {}", row.join("  ")).unwrap();
    }
    out
}

/// Steering report for several targets sharing one purification.
#[derive(Clone, Debug)]
pub struct SteeringSummary {
    pub text: String,
    pub min_fidelity: f64,
    pub max_probability_error: f64,
}

/// Builds one purification of `w`, steers it to every target and reports
/// the ancilla bases, outcome probabilities, conditional states and fidelities.
pub fn steering(
    w: &DensityOperator,
    targets: &[Ensemble],
    names: &[String],
) -> Result<SteeringSummary> {
    let witness = steering_witness(w, targets)?;
    let checks = witness.check()?;
    let p = &witness.purification;
    let mut out = String::new();
    writeln!(
        out,
        "purification: system dimension {}, ancilla dimension {}, rank {}",
        p.system_dim(),
        p.ancilla_dim(),
        w.rank()
    )
    .unwrap();
    let mut min_fidelity: f64 = 1.0;
    let mut max_probability_error: f64 = 0.0;
    for (n, (basis, check)) in witness.bases.iter().zip(&checks).enumerate() {
        let name = names.get(n).map_or("", String::as_str);
        writeln!(
            out,
            "\ntarget {}: {name} ({} members)",
            n + 1,
            basis.target().len()
        )
        .unwrap();
        for (mu, (beta, outcome)) in basis.states().iter().zip(&check.outcomes).enumerate() {
            let (weight, fidelity) = match basis.target().members().get(mu) {
                Some(m) => (fixed12(m.weight), fixed12(check.fidelities[mu])),
                None => ("padding".to_string(), "-".to_string()),
            };
            writeln!(out, "  outcome {}", mu + 1).unwrap();
            writeln!(
                out,
                "    ancilla state   {}",
                render_vector(beta.amplitudes())
            )
            .unwrap();
            writeln!(out, "    probability     {}", fixed12(outcome.probability)).unwrap();
            writeln!(out, "    target weight   {weight}").unwrap();
            match &outcome.conditional_state {
                Some(s) => {
                    writeln!(out, "    system state    {}", render_vector(s.amplitudes())).unwrap()
                }
                None => writeln!(out, "    system state    none (zero probability)").unwrap(),
            }
            writeln!(out, "    fidelity        {fidelity}").unwrap();
        }
        writeln!(
            out,
            "  min fidelity            {}",
            fixed12(check.min_fidelity())
        )
        .unwrap();
        writeln!(
            out,
            "  max probability error   {}",
            fixed12(check.max_probability_error())
        )
        .unwrap();
        min_fidelity = min_fidelity.min(check.min_fidelity());
        max_probability_error = max_probability_error.max(check.max_probability_error());
    }
    Ok(SteeringSummary {
        text: out,
        min_fidelity,
        max_probability_error,
    })
}

#[derive(Clone, Debug)]
pub struct ReconstructionSummary {
    pub text: String,
    pub matrix: DensityOperator,
    /// Max-element difference from the reference, when one was given.
    pub residual: Option<f64>,
}

/// Reconstructs the density operator from `records` and reports it.
pub fn reconstruction(
    records: &CorrelationSet,
    reference: Option<&ComplexMatrix>,
) -> Result<ReconstructionSummary> {
    let w = CorrelationTomography::new(records)?.reconstruct()?;
    let mut out = String::new();
    writeln!(
        out,
        "partition {}, {} records",
        records.partition,
        records.records.len()
    )
    .unwrap();
    writeln!(out, "reconstructed density matrix:").unwrap();
    out.push_str(&render_matrix(w.matrix()));
    let residual = reference.map(|r| w.matrix().max_abs_diff(r));
    if let Some(r) = residual {
        writeln!(
            out,
            "max-element residual against reference: {}",
            fixed12(r)
        )
        .unwrap();
    }
    Ok(ReconstructionSummary {
        text: out,
        matrix: w,
        residual,
    })
}

/// Deviation of each reconstruction from `source` and from each other.
pub fn consistency(source: &DensityOperator, report: &ConsistencyReport) -> String {
    let mut out = String::new();
    for (p, w) in report.partitions.iter().zip(&report.reconstructions) {
        writeln!(
            out,
            "partition {:<10} deviation from source {}",
            p.to_string(),
            fixed12(w.matrix().max_abs_diff(source.matrix()))
        )
        .unwrap();
    }
    writeln!(
        out,
        "max pairwise deviation {}",
        fixed12(report.max_pairwise_deviation)
    )
    .unwrap();
    out
}

/// Table and paradox report at one overlap.
pub fn hardy(ctx: &HardyContext) -> String {
    let mut out = String::new();
    writeln!(out, "x = {}", fixed12(ctx.x())).unwrap();
    write!(out, "{}", ctx.table()).unwrap();
    writeln!(out).unwrap();
    write!(out, "{}", paradox_report(ctx)).unwrap();
    out
}

/// The golden table with each entry as a power of `1/τ` and as a decimal,
/// plus its largest deviation from the exact powers.
pub fn golden(table: &ProbabilityTable) -> String {
    let mut out = String::new();
    write!(out, "{:<4}", "p").unwrap();
    for s in SETTINGS {
        write!(out, " {:>26}", s.to_string()).unwrap();
    }
    writeln!(out).unwrap();
    for (o, outcome) in OUTCOMES.iter().enumerate() {
        write!(out, "{:<4}", outcome.to_string()).unwrap();
        for (s, col) in table.entries.iter().enumerate() {
            let label = GOLDEN_EXPONENTS[s][o].map_or("0".to_string(), |k| format!("tau^-{k}"));
            write!(out, " {:>26}", format!("{label} {}", fixed12(col[o]))).unwrap();
        }
        writeln!(out).unwrap();
    }
    let sums: Vec<String> = table.column_sums().iter().map(|&v| fixed12(v)).collect();
    writeln!(out, "column sums {}", sums.join(" ")).unwrap();
    writeln!(
        out,
        "max deviation from tau powers {}",
        fixed12(table.max_deviation(&golden_reference()))
    )
    .unwrap();
    out
}

/// Rows `x p(2G,2G)`.
pub fn sweep(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("x p(2G,2G)\n");
    for (x, p) in rows {
        writeln!(out, "{} {}", fixed12(*x), fixed12(*p)).unwrap();
    }
    out
}

pub fn empirical(set: &EmpiricalSet, rec: &EmpiricalReconstruction) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "partition {}, {} records, {} shots each, seed {}",
        set.partition,
        set.records.len(),
        set.shots,
        set.seed
    )
    .unwrap();
    writeln!(out, "generator {}", set.generator).unwrap();
    let max_se = set
        .records
        .iter()
        .map(|r| r.standard_error)
        .fold(0.0, f64::max);
    writeln!(out, "largest standard error {}", fixed12(max_se)).unwrap();
    match &rec.physicality {
        None => writeln!(out, "raw estimate is a density matrix").unwrap(),
        Some(msg) => writeln!(out, "raw estimate is not a density matrix: {msg}").unwrap(),
    }
    writeln!(out, "raw estimate:").unwrap();
    out.push_str(&render_matrix(&rec.raw));
    writeln!(out, "physical projection:").unwrap();
    out.push_str(&render_matrix(rec.physical.matrix()));
    if let (Some(raw), Some(phys)) = (rec.raw_error, rec.physical_error) {
        writeln!(
            out,
            "max-element error: raw {}, physical {}",
            fixed12(raw),
            fixed12(phys)
        )
        .unwrap();
    }
    out
}
