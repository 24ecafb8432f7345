//! Random states, density operators and ensemble realizations for tests,
//! demos and property checks.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::ensemble::{DensityOperator, Ensemble, EnsembleMember};
use crate::linalg::{inner, norm, ComplexMatrix, HermitianOperator, PureState, C64, ZERO};

fn gaussian(rng: &mut impl Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_state(dim: usize, rng: &mut impl Rng) -> PureState {
    loop {
        let v: Vec<C64> = (0..dim).map(|_| gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(v) {
            return s;
        }
    }
}

/// Hermitian matrix with Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut impl Rng) -> HermitianOperator {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian(rng));
    HermitianOperator::from_hermitian_part(&g)
}

/// `rows x cols` matrix with orthonormal columns (`cols <= rows`).
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    assert!(cols <= rows);
    let mut columns: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while columns.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &columns {
                let overlap = inner(c, &v);
                v.iter_mut().zip(c).for_each(|(x, u)| *x -= overlap * u);
            }
        }
        let n = norm(&v);
        if n > 1e-6 {
            columns.push(v.into_iter().map(|z| z / n).collect());
        }
    }
    ComplexMatrix::from_columns(&columns).expect("columns share a length")
}

/// Random density operator of the given rank (`1 <= rank <= dim`), built as
/// `G G† / tr(G G†)` from a `dim x rank` Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, rng: &mut impl Rng) -> DensityOperator {
    assert!(rank >= 1 && rank <= dim);
    let g = ComplexMatrix::from_fn(dim, rank, |_, _| gaussian(rng));
    let w = &g * &g.adjoint();
    let w = w.scale(C64::from(1.0 / w.trace().re)).hermitian_part();
    DensityOperator::new(w).expect("G G† is a density operator")
}

/// Random ensemble of `size` members realizing `w`, drawn by mixing the
/// eigen-ensemble with a random isometry.
pub fn random_realization(w: &DensityOperator, size: usize, rng: &mut impl Rng) -> Ensemble {
    let eigen = w.eigen_ensemble();
    let rank = eigen.len();
    assert!(size >= rank, "ensemble size {size} below rank {rank}");
    let d = w.dim();
    loop {
        let mixing = random_isometry(size, rank, rng);
        let mut members = Vec::with_capacity(size);
        for mu in 0..size {
            let mut v = vec![ZERO; d];
            for (i, m) in eigen.members().iter().enumerate() {
                let coeff = mixing[(mu, i)] * m.weight.sqrt();
                v.iter_mut()
                    .zip(m.state.amplitudes())
                    .for_each(|(x, a)| *x += coeff * a);
            }
            let weight = norm(&v).powi(2);
            members.push((weight, v));
        }
        // reject draws with a negligible member so every weight stays well above zero
        if members.iter().any(|(q, _)| *q < 1e-6) {
            continue;
        }
        let total: f64 = members.iter().map(|(q, _)| q).sum();
        let members = members
            .into_iter()
            .map(|(q, v)| EnsembleMember {
                weight: q / total,
                state: PureState::normalized(v).expect("nonzero member"),
            })
            .collect();
        return Ensemble::new(members).expect("mixture of a valid realization");
    }
}
