//! Rebuild a three-qubit density matrix from local product correlations, then
//! check that coarser groupings of the same qubits give the same matrix.

use densmat::linalg::PureState;
use densmat::random::random_density;
use densmat::tomography::{
    correlations, hermitian_basis, reconstruct, resolution_consistency, CorrelationTomography,
    Partition,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> densmat::error::Result<()> {
    let p = Partition::parse("2x2x2")?;
    let w = random_density(p.total(), 3, &mut ChaCha8Rng::seed_from_u64(5));
    let bases: Vec<_> = p.dims().iter().map(|&d| hermitian_basis(d)).collect();

    let records = correlations(&w, &p, &bases)?;
    println!("{} records for partition {p}", records.records.len());

    let back = reconstruct(&records)?;
    println!(
        "max element error {:.1e}",
        back.matrix().max_abs_diff(w.matrix())
    );

    // single elements straight from the records
    let tomo = CorrelationTomography::new(&records)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ghz = PureState::from_real(&[h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h])?;
    println!(
        "<ghz|W|ghz> = {:.12}, direct {:.12}",
        tomo.diagonal_element(&ghz)?,
        w.overlap(&ghz)
    );

    let groups = [p.clone(), p.coarsen_spec("1|23")?, p.coarsen_spec("12|3")?];
    let report = resolution_consistency(&w, &groups)?;
    println!(
        "groupings {:?}: pairwise {:.1e}, against source {:.1e}",
        report
            .partitions
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>(),
        report.max_pairwise_deviation,
        report.max_source_deviation
    );
    Ok(())
}
