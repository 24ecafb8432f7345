//! Every realization of a density matrix is an isometric remix of its
//! eigenensemble. Draw a random realization and check the law member by member.

use densmat::ensemble::mixing_matrix;
use densmat::random::{random_density, random_realization};
use densmat::report::render_matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> densmat::error::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = random_density(3, 2, &mut rng);
    let e = random_realization(&w, 4, &mut rng);
    let m = mixing_matrix(&w, &e)?;

    println!("rank {} state, {} members", w.rank(), e.len());
    println!("mixing matrix:\n{}", render_matrix(m.matrix()));
    println!(
        "column orthonormality deviation {:.1e}",
        m.column_deviation()
    );

    let eigen = w.eigen_ensemble();
    for (mu, member) in e.members().iter().enumerate() {
        let rebuilt = m.weighted_member(mu, &eigen);
        let err = rebuilt
            .iter()
            .zip(member.state.amplitudes())
            .map(|(r, a)| (r - a * member.weight.sqrt()).norm())
            .fold(0.0, f64::max);
        println!(
            "member {mu}: weight {:.6}, rebuilt within {err:.1e}",
            member.weight
        );
    }
    Ok(())
}
