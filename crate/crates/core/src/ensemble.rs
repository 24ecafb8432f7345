//! Density operators, their pure-state ensemble realizations, and the
//! mixing matrix relating any realization to the eigen-ensemble.

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, norm, ComplexMatrix, EigenDecomposition, HermitianOperator, PureState, C64, ZERO,
};
use crate::tolerance::Tolerances;

/// Hermitian, positive-semidefinite, unit-trace operator.
///
/// The eigendecomposition is computed once at construction (it is needed
/// for the PSD check anyway) so every consumer sees the same eigenbasis.
#[derive(Clone, Debug)]
pub struct DensityOperator {
    matrix: HermitianOperator,
    spectrum: EigenDecomposition,
    rank_eps: f64,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::DEFAULT)
    }

    pub fn new_with(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let matrix = HermitianOperator::new_with(matrix, tol)?;
        let trace = matrix.matrix().trace();
        if (trace.re - 1.0).abs() > tol.trace || trace.im.abs() > tol.trace {
            return Err(Error::InvalidDensity(format!(
                "trace is {trace}, expected 1"
            )));
        }
        let spectrum = hermitian_eig(&matrix);
        let smallest = *spectrum.values.last().expect("nonempty spectrum");
        if smallest < -tol.psd {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {smallest:e}"
            )));
        }
        Ok(DensityOperator {
            matrix,
            spectrum,
            rank_eps: tol.rank,
        })
    }

    /// `|φ⟩⟨φ|`
    pub fn pure(state: &PureState) -> Self {
        Self::new(state.projector().hermitian_part()).expect("projector of a normalized state")
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::new(ComplexMatrix::identity(dim).scale(C64::from(1.0 / dim as f64)))
            .expect("I/d is a density operator")
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.matrix()
    }

    pub fn hermitian(&self) -> &HermitianOperator {
        &self.matrix
    }

    pub fn spectrum(&self) -> &EigenDecomposition {
        &self.spectrum
    }

    pub fn rank(&self) -> usize {
        self.spectrum
            .values
            .iter()
            .filter(|&&p| p > self.rank_eps)
            .count()
    }

    /// `tr(W A)`
    pub fn expectation(&self, observable: &HermitianOperator) -> f64 {
        self.matrix().trace_product(observable.matrix()).re
    }

    /// `⟨φ|W|φ⟩`
    pub fn overlap(&self, state: &PureState) -> f64 {
        self.matrix.expectation(state)
    }

    /// Eigenvectors with eigenvalue above the rank threshold, weighted by
    /// their eigenvalues (renormalized to sum to one after dropping the
    /// negligible part of the spectrum).
    pub fn eigen_ensemble(&self) -> Ensemble {
        let kept: Vec<(f64, Vec<C64>)> = self
            .spectrum
            .values
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > self.rank_eps)
            .map(|(k, &p)| (p, self.spectrum.vector(k)))
            .collect();
        let total: f64 = kept.iter().map(|(p, _)| p).sum();
        let members = kept
            .into_iter()
            .map(|(p, v)| EnsembleMember {
                weight: p / total,
                state: PureState::normalized(v).expect("eigenvector"),
            })
            .collect();
        Ensemble::new(members).expect("eigen-ensemble of a density operator")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleMember {
    pub weight: f64,
    pub state: PureState,
}

/// Weighted list of pure states; one realization of a density operator.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    members: Vec<EnsembleMember>,
}

impl Ensemble {
    pub fn new(members: Vec<EnsembleMember>) -> Result<Self> {
        Self::new_with(members, &Tolerances::DEFAULT)
    }

    pub fn new_with(members: Vec<EnsembleMember>, tol: &Tolerances) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::InvalidEnsemble("ensemble has no members".into()))?;
        let dim = first.state.dim();
        for (k, m) in members.iter().enumerate() {
            if m.state.dim() != dim {
                return Err(Error::Dimension(format!(
                    "member {k} has dimension {}, member 0 has {dim}",
                    m.state.dim()
                )));
            }
            if !(m.weight > 0.0) || m.weight > 1.0 + tol.trace {
                return Err(Error::InvalidEnsemble(format!(
                    "member {k} has weight {} outside (0, 1]",
                    m.weight
                )));
            }
        }
        let total: f64 = members.iter().map(|m| m.weight).sum();
        if (total - 1.0).abs() > tol.trace {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Ensemble { members })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (f64, PureState)>) -> Result<Self> {
        Self::new(
            pairs
                .into_iter()
                .map(|(weight, state)| EnsembleMember { weight, state })
                .collect(),
        )
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Dimension of the member states.
    pub fn dim(&self) -> usize {
        self.members[0].state.dim()
    }

    /// Unnormalized mixture `Σ q_μ |ψ_μ⟩⟨ψ_μ|`.
    pub fn mixture(&self) -> ComplexMatrix {
        let d = self.dim();
        let mut w = ComplexMatrix::zeros(d, d);
        for m in &self.members {
            let a = m.state.amplitudes();
            for i in 0..d {
                for j in 0..d {
                    w[(i, j)] += a[i] * a[j].conj() * m.weight;
                }
            }
        }
        w
    }

    pub fn density(&self) -> DensityOperator {
        DensityOperator::new(self.mixture().hermitian_part())
            .expect("a convex mixture of pure states is a density operator")
    }
}

/// `D x d_r` matrix `M` with `√q_μ|ψ_μ⟩ = Σ_i M_{μi} √p_i |φ_i⟩`.
#[derive(Clone, Debug)]
pub struct MixingMatrix {
    entries: ComplexMatrix,
}

impl MixingMatrix {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.entries
    }

    /// Max-element deviation of `M†M` from the identity.
    pub fn column_deviation(&self) -> f64 {
        self.entries.isometry_deviation()
    }

    /// `Σ_i M_{μi} √p_i |φ_i⟩` for one ensemble index.
    pub fn weighted_member(&self, mu: usize, eigen: &Ensemble) -> Vec<C64> {
        let mut v = vec![ZERO; eigen.dim()];
        for (i, m) in eigen.members().iter().enumerate() {
            let coeff = self.entries[(mu, i)] * m.weight.sqrt();
            v.iter_mut()
                .zip(m.state.amplitudes())
                .for_each(|(x, a)| *x += coeff * a);
        }
        v
    }
}

/// Mixing matrix of the realization `e` relative to the eigen-ensemble of
/// `w`: `M_{μi} = ⟨φ_i|ψ_μ⟩ √q_μ / √p_i`.
pub fn mixing_matrix(w: &DensityOperator, e: &Ensemble) -> Result<MixingMatrix> {
    mixing_matrix_with(w, e, &Tolerances::DEFAULT)
}

pub fn mixing_matrix_with(
    w: &DensityOperator,
    e: &Ensemble,
    tol: &Tolerances,
) -> Result<MixingMatrix> {
    if e.dim() != w.dim() {
        return Err(Error::Dimension(format!(
            "ensemble states have dimension {}, density operator {}",
            e.dim(),
            w.dim()
        )));
    }
    let eigen = w.eigen_ensemble();

    let mut overlaps = ComplexMatrix::zeros(e.len(), eigen.len());
    for (mu, m) in e.members().iter().enumerate() {
        let mut residual: Vec<C64> = m.state.amplitudes().to_vec();
        for (i, phi) in eigen.members().iter().enumerate() {
            let c = phi.state.inner(&m.state);
            overlaps[(mu, i)] = c;
            residual
                .iter_mut()
                .zip(phi.state.amplitudes())
                .for_each(|(r, a)| *r -= c * a);
        }
        let residual = norm(&residual);
        if residual > tol.support {
            return Err(Error::Support {
                target: None,
                member: mu,
                residual,
            });
        }
    }

    let deviation = e.mixture().max_abs_diff(w.matrix());
    if deviation > tol.realization {
        return Err(Error::Realization {
            target: None,
            deviation,
        });
    }

    let entries = ComplexMatrix::from_fn(e.len(), eigen.len(), |mu, i| {
        overlaps[(mu, i)] * (e.members()[mu].weight / eigen.members()[i].weight).sqrt()
    });
    Ok(MixingMatrix { entries })
}

/// `Σ_μ q_μ |ψ_μ⟩⟨ψ_μ|` as a validated density operator.
pub fn density_from_ensemble(e: &Ensemble) -> DensityOperator {
    e.density()
}

pub fn eigen_ensemble(w: &DensityOperator) -> Ensemble {
    w.eigen_ensemble()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_density, random_realization, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn up_z() -> PureState {
        PureState::basis(2, 0)
    }
    fn down_z() -> PureState {
        PureState::basis(2, 1)
    }
    fn up_x() -> PureState {
        let s = 0.5f64.sqrt();
        PureState::from_real(&[s, s]).unwrap()
    }
    fn down_x() -> PureState {
        let s = 0.5f64.sqrt();
        PureState::from_real(&[s, -s]).unwrap()
    }
    fn r_l(p: f64) -> (PureState, PureState) {
        let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
        (
            PureState::from_real(&[a, b]).unwrap(),
            PureState::from_real(&[a, -b]).unwrap(),
        )
    }

    #[test]
    fn z_and_x_ensembles_give_the_same_mixture() {
        let half = ComplexMatrix::from_diagonal(&[0.5, 0.5]);
        let wz = Ensemble::from_pairs([(0.5, up_z()), (0.5, down_z())])
            .unwrap()
            .density();
        let wx = Ensemble::from_pairs([(0.5, up_x()), (0.5, down_x())])
            .unwrap()
            .density();
        assert!(wz.matrix().max_abs_diff(&half) < 1e-15);
        assert!(wx.matrix().max_abs_diff(&half) < 1e-15);
    }

    #[test]
    fn tilted_pair_mixes_to_diagonal() {
        let (r, l) = r_l(0.75);
        let w = Ensemble::from_pairs([(0.5, r), (0.5, l)])
            .unwrap()
            .density();
        assert!(
            w.matrix()
                .max_abs_diff(&ComplexMatrix::from_diagonal(&[0.75, 0.25]))
                < 1e-15
        );
    }

    #[test]
    fn ensemble_validation() {
        assert!(matches!(
            Ensemble::from_pairs([(0.5, up_z()), (0.5, PureState::basis(3, 0))]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            Ensemble::from_pairs([(1.0, up_z()), (0.0, down_z())]),
            Err(Error::InvalidEnsemble(_))
        ));
        assert!(matches!(
            Ensemble::from_pairs([(0.5, up_z()), (0.4, down_z())]),
            Err(Error::InvalidEnsemble(_))
        ));
        assert!(Ensemble::new(vec![]).is_err());
    }

    #[test]
    fn density_validation() {
        let bad_trace = ComplexMatrix::from_diagonal(&[0.5, 0.6]);
        assert!(matches!(
            DensityOperator::new(bad_trace),
            Err(Error::InvalidDensity(_))
        ));
        let not_psd = ComplexMatrix::from_diagonal(&[1.5, -0.5]);
        assert!(matches!(
            DensityOperator::new(not_psd),
            Err(Error::InvalidDensity(_))
        ));
    }

    #[test]
    fn eigen_ensemble_of_diagonal() {
        let w = DensityOperator::new(ComplexMatrix::from_diagonal(&[0.75, 0.25])).unwrap();
        let e = w.eigen_ensemble();
        assert_eq!(e.len(), 2);
        assert!((e.members()[0].weight - 0.75).abs() < 1e-15);
        assert!(e.members()[0].state.fidelity(&up_z()) > 1.0 - 1e-15);
        assert!((e.members()[1].weight - 0.25).abs() < 1e-15);
        assert!(e.members()[1].state.fidelity(&down_z()) > 1.0 - 1e-15);
    }

    #[test]
    fn eigen_ensemble_of_pure_state_is_single_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = random_state(3, &mut rng);
        let e = DensityOperator::pure(&phi).eigen_ensemble();
        assert_eq!(e.len(), 1);
        assert!((e.members()[0].weight - 1.0).abs() < 1e-12);
        assert!(e.members()[0].state.fidelity(&phi) > 1.0 - 1e-12);
    }

    #[test]
    fn eigen_ensemble_roundtrip_rank_two_in_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = random_density(4, 2, &mut rng);
        assert_eq!(w.rank(), 2);
        let e = w.eigen_ensemble();
        assert_eq!(e.len(), 2);
        assert!(e.density().matrix().max_abs_diff(w.matrix()) < 1e-10);
        assert!(e.members()[0].state.inner(&e.members()[1].state).norm() < 1e-12);
    }

    #[test]
    fn mixing_matrix_of_eigen_ensemble_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_density(3, 3, &mut rng);
        let m = mixing_matrix(&w, &w.eigen_ensemble()).unwrap();
        assert!(m.matrix().max_abs_diff(&ComplexMatrix::identity(3)) < 1e-10);
    }

    #[test]
    fn mixing_matrix_for_x_ensemble_of_maximally_mixed() {
        let w = DensityOperator::maximally_mixed(2);
        let e = Ensemble::from_pairs([(0.5, up_x()), (0.5, down_x())]).unwrap();
        let m = mixing_matrix(&w, &e).unwrap();
        // oracle: solve √q|ψ⟩ = Σ M √p |φ⟩ directly, i.e. M = (√q_μ⟨φ_i|ψ_μ⟩/√p_i)
        // with every |⟨φ_i|ψ_μ⟩| = 1/√2 for mutually unbiased bases
        let eigen = w.eigen_ensemble();
        for mu in 0..2 {
            for i in 0..2 {
                assert!((m.matrix()[(mu, i)].norm() - 0.5f64.sqrt()).abs() < 1e-12);
            }
            let rebuilt = m.weighted_member(mu, &eigen);
            let target: Vec<C64> = e.members()[mu]
                .state
                .amplitudes()
                .iter()
                .map(|a| a * 0.5f64.sqrt())
                .collect();
            for (a, b) in rebuilt.iter().zip(&target) {
                assert!((a - b).norm() < 1e-12);
            }
        }
        assert!(m.column_deviation() < 1e-12);
    }

    #[test]
    fn mixing_matrix_for_tilted_pair() {
        let p = 0.75;
        let w = DensityOperator::new(ComplexMatrix::from_diagonal(&[p, 1.0 - p])).unwrap();
        let (r, l) = r_l(p);
        let e = Ensemble::from_pairs([(0.5, r), (0.5, l)]).unwrap();
        let m = mixing_matrix(&w, &e).unwrap();
        let s = 0.5f64.sqrt();
        let expected = ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        assert!(m.matrix().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn mixing_matrix_errors() {
        let w = DensityOperator::new(ComplexMatrix::from_diagonal(&[1.0, 0.0])).unwrap();
        let outside = Ensemble::from_pairs([(0.5, up_z()), (0.5, down_z())]).unwrap();
        assert!(matches!(
            mixing_matrix(&w, &outside),
            Err(Error::Support { member: 1, .. })
        ));

        let w = DensityOperator::maximally_mixed(2);
        let wrong = Ensemble::from_pairs([(0.7, up_z()), (0.3, down_z())]).unwrap();
        assert!(matches!(
            mixing_matrix(&w, &wrong),
            Err(Error::Realization { .. })
        ));

        let wrong_dim = Ensemble::from_pairs([(1.0, PureState::basis(3, 0))]).unwrap();
        assert!(matches!(
            mixing_matrix(&w, &wrong_dim),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn random_realizations_satisfy_mixing_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..20 {
            let d = 2 + trial % 3;
            let rank = 1 + trial % d;
            let w = random_density(d, rank, &mut rng);
            let e = random_realization(&w, rank + trial % 4, &mut rng);
            let m = mixing_matrix(&w, &e).unwrap();
            assert!(m.column_deviation() < 1e-10);
            let eigen = w.eigen_ensemble();
            for (mu, member) in e.members().iter().enumerate() {
                let rebuilt = m.weighted_member(mu, &eigen);
                for (a, b) in rebuilt.iter().zip(member.state.amplitudes()) {
                    assert!((a - b * member.weight.sqrt()).norm() < 1e-10);
                }
            }
        }
    }
}
