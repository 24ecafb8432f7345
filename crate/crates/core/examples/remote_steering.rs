//! Steer one purification of a qubit density matrix into two different
//! ensembles, choosing the ancilla measurement after the fact.
//!
//! Run with `cargo run --example remote_steering`.

use densmat::ensemble::{DensityOperator, Ensemble};
use densmat::linalg::{ComplexMatrix, PureState};
use densmat::report;
use densmat::steering::steering_witness;

fn main() -> densmat::error::Result<()> {
    let (p, q) = (0.75_f64, 0.25_f64);
    let w = DensityOperator::new(ComplexMatrix::from_diagonal(&[p, q]))?;

    // the eigenensemble, and two equally weighted states sqrt(p)|0> ± sqrt(q)|1>
    let eigen = Ensemble::from_pairs([(p, PureState::basis(2, 0)), (q, PureState::basis(2, 1))])?;
    let tilted = Ensemble::from_pairs([
        (0.5, PureState::from_real(&[p.sqrt(), q.sqrt()])?),
        (0.5, PureState::from_real(&[p.sqrt(), -q.sqrt()])?),
    ])?;

    let witness = steering_witness(&w, &[eigen.clone(), tilted.clone()])?;
    println!(
        "one purification in dimension {} x {}",
        witness.purification.system_dim(),
        witness.purification.ancilla_dim()
    );
    for (name, check) in ["eigen", "tilted"].iter().zip(witness.check()?) {
        println!(
            "{name}: min fidelity {}, max probability error {:.1e}",
            check.min_fidelity(),
            check.max_probability_error()
        );
    }

    // the same text the `steer` subcommand prints
    let summary = report::steering(&w, &[eigen, tilted], &["eigen".into(), "tilted".into()])?;
    print!("\n{}", summary.text);
    Ok(())
}
