//! Estimate the singlet's correlation records from simulated shots and
//! watch the reconstruction error shrink as the shot count grows.

use densmat::ensemble::DensityOperator;
use densmat::sampling::{empirical_correlations, reconstruct_empirical, ShotPlan};
use densmat::tomography::{pauli_basis, singlet_projector, Partition};

fn main() -> densmat::error::Result<()> {
    let w = DensityOperator::new(singlet_projector())?;
    let p = Partition::new(vec![2, 2])?;
    let bases = [pauli_basis(), pauli_basis()];

    for shots in [100, 10_000, 1_000_000] {
        let set = empirical_correlations(&w, &p, &bases, &ShotPlan::new(shots, 42)?)?;
        let rec = reconstruct_empirical(&set, Some(&w))?;
        println!(
            "{shots:>9} shots: raw error {:.2e}, projected error {:.2e}{}",
            rec.raw_error.unwrap_or(f64::NAN),
            rec.physical_error.unwrap_or(f64::NAN),
            rec.physicality
                .as_deref()
                .map(|why| format!(" (raw estimate unphysical: {why})"))
                .unwrap_or_default()
        );
    }
    Ok(())
}
