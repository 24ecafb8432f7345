//! Remote preparation of ensembles by measuring an ancilla.
//!
//! A density operator `W = Σ p_i |φ_i⟩⟨φ_i|` on `d` dimensions is purified
//! into `|Φ⟩ = Σ_i √p_i |φ_i⟩ ⊗ |α_i⟩` on `d x D` dimensions. For any
//! realization `{q_μ, |ψ_μ⟩}` of `W` with at most `D` members, the mixing
//! matrix `M` is completed to a unitary `U` and the ancilla basis
//! `|β_μ⟩ = Σ_ν U*_{μν} |α_ν⟩` rewrites the same purification as
//! `|Φ⟩ = Σ_μ √q_μ |ψ_μ⟩ ⊗ |β_μ⟩`. Measuring the ancilla in that basis
//! leaves the system in `|ψ_μ⟩` with probability `q_μ`.

use rayon::prelude::*;

use crate::ensemble::{mixing_matrix, DensityOperator, Ensemble};
use crate::error::{Error, Result};
use crate::linalg::{
    extend_to_unitary, norm, ComplexMatrix, HermitianOperator, PureState, C64, ZERO,
};
use crate::tolerance::EPS_PROBABILITY;

/// Pure state on system ⊗ ancilla whose ancilla partial trace is `source`.
#[derive(Clone, Debug)]
pub struct Purification {
    state: PureState,
    system_dim: usize,
    ancilla_dim: usize,
    source: DensityOperator,
    eigen: Ensemble,
}

impl Purification {
    /// Amplitudes indexed `system * ancilla_dim + ancilla`.
    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn source(&self) -> &DensityOperator {
        &self.source
    }

    /// Eigen-ensemble used to build the purification.
    pub fn eigen_ensemble(&self) -> &Ensemble {
        &self.eigen
    }

    /// The reference basis `|α_μ⟩`; always the canonical ancilla basis.
    pub fn ancilla_basis(&self) -> Vec<PureState> {
        (0..self.ancilla_dim)
            .map(|k| PureState::basis(self.ancilla_dim, k))
            .collect()
    }

    /// System density operator obtained by tracing out the ancilla.
    pub fn reduced_system(&self) -> ComplexMatrix {
        crate::linalg::partial_trace(
            &self.state.projector(),
            &[self.system_dim, self.ancilla_dim],
            &[0],
        )
        .expect("purification dimensions are consistent")
    }

    /// Projects the ancilla onto `ancilla_state` (Born rule).
    pub fn project_ancilla(&self, ancilla_state: &PureState) -> Result<SteeringOutcome> {
        if ancilla_state.dim() != self.ancilla_dim {
            return Err(Error::Dimension(format!(
                "ancilla state has dimension {}, ancilla is {}",
                ancilla_state.dim(),
                self.ancilla_dim
            )));
        }
        let beta = ancilla_state.amplitudes();
        let phi = self.state.amplitudes();
        let conditional: Vec<C64> = (0..self.system_dim)
            .map(|s| {
                let block = &phi[s * self.ancilla_dim..(s + 1) * self.ancilla_dim];
                block.iter().zip(beta).map(|(p, b)| b.conj() * p).sum()
            })
            .collect();
        let probability = norm(&conditional).powi(2);
        let conditional_state = if probability < EPS_PROBABILITY {
            None
        } else {
            Some(PureState::normalized(conditional)?)
        };
        Ok(SteeringOutcome {
            probability,
            conditional_state,
        })
    }

    /// Ancilla basis whose measurement prepares `target`.
    pub fn steering_basis(&self, target: &Ensemble) -> Result<SteeringBasis> {
        if target.len() > self.ancilla_dim {
            return Err(Error::AncillaTooSmall {
                ancilla_dim: self.ancilla_dim,
                rank: target.len(),
            });
        }
        let mixing = mixing_matrix(&self.source, target)?;
        let rank = self.eigen.len();
        let big = self.ancilla_dim;
        // missing members count as weight-zero rows
        let padded = ComplexMatrix::from_fn(big, rank, |mu, i| {
            if mu < target.len() {
                mixing.matrix()[(mu, i)]
            } else {
                ZERO
            }
        });
        let unitary = extend_to_unitary(&padded)?;
        let states = (0..big)
            .map(|mu| {
                let row: Vec<C64> = (0..big)
                    .map(|nu| unitary.matrix()[(mu, nu)].conj())
                    .collect();
                PureState::normalized(row)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SteeringBasis {
            states,
            target: target.clone(),
        })
    }

    /// Outcome of every basis element, in basis order.
    pub fn measure(&self, basis: &SteeringBasis) -> Result<Vec<SteeringOutcome>> {
        basis
            .states
            .iter()
            .map(|b| self.project_ancilla(b))
            .collect()
    }
}

/// Orthonormal ancilla basis `|β_μ⟩` together with the ensemble it prepares.
#[derive(Clone, Debug)]
pub struct SteeringBasis {
    states: Vec<PureState>,
    target: Ensemble,
}

impl SteeringBasis {
    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn target(&self) -> &Ensemble {
        &self.target
    }

    /// `A = Σ_μ μ |β_μ⟩⟨β_μ|` with outcome labels `μ = 1..D`.
    pub fn observable(&self) -> HermitianOperator {
        let n = self.states.len();
        let mut a = ComplexMatrix::zeros(n, n);
        for (mu, b) in self.states.iter().enumerate() {
            a = &a + &b.projector().scale(C64::from((mu + 1) as f64));
        }
        HermitianOperator::from_hermitian_part(&a)
    }

    /// Max deviation of `⟨β_μ|β_ν⟩` from `δ_μν`.
    pub fn orthonormality_deviation(&self) -> f64 {
        let columns: Vec<Vec<C64>> = self
            .states
            .iter()
            .map(|s| s.amplitudes().to_vec())
            .collect();
        ComplexMatrix::from_columns(&columns)
            .expect("basis states share a dimension")
            .isometry_deviation()
    }
}

#[derive(Clone, Debug)]
pub struct SteeringOutcome {
    pub probability: f64,
    /// `None` when the outcome is impossible (probability below `1e-14`).
    pub conditional_state: Option<PureState>,
}

/// Purifies `w` with an ancilla of dimension `ancilla_dim >= rank(w)`.
pub fn purify(w: &DensityOperator, ancilla_dim: usize) -> Result<Purification> {
    let eigen = w.eigen_ensemble();
    let rank = eigen.len();
    if ancilla_dim < rank {
        return Err(Error::AncillaTooSmall { ancilla_dim, rank });
    }
    let d = w.dim();
    let mut amplitudes = vec![ZERO; d * ancilla_dim];
    for (i, m) in eigen.members().iter().enumerate() {
        let sp = m.weight.sqrt();
        for (s, a) in m.state.amplitudes().iter().enumerate() {
            amplitudes[s * ancilla_dim + i] = a * sp;
        }
    }
    Ok(Purification {
        state: PureState::normalized(amplitudes)?,
        system_dim: d,
        ancilla_dim,
        source: w.clone(),
        eigen,
    })
}

/// Steering basis for a single target, with the ancilla sized to the target.
pub fn steering_basis(w: &DensityOperator, target: &Ensemble) -> Result<SteeringBasis> {
    purify(w, target.len())?.steering_basis(target)
}

/// Measures the steering basis of `target` on a purification sized to it.
pub fn steer(w: &DensityOperator, target: &Ensemble) -> Result<Vec<SteeringOutcome>> {
    let phi = purify(w, target.len())?;
    let basis = phi.steering_basis(target)?;
    phi.measure(&basis)
}

/// One purification plus one steering basis per target ensemble.
#[derive(Clone, Debug)]
pub struct SteeringWitness {
    pub purification: Purification,
    pub bases: Vec<SteeringBasis>,
}

/// Builds a single purification of `w` (ancilla sized to the largest
/// target) and a steering basis for every target.
pub fn steering_witness(w: &DensityOperator, targets: &[Ensemble]) -> Result<SteeringWitness> {
    let ancilla_dim = targets
        .iter()
        .map(Ensemble::len)
        .max()
        .ok_or_else(|| Error::InvalidEnsemble("no target ensembles".into()))?;
    let purification = purify(w, ancilla_dim.max(w.rank()))?;
    let bases = targets
        .par_iter()
        .enumerate()
        .map(|(n, t)| {
            purification.steering_basis(t).map_err(|e| match e {
                Error::Realization { deviation, .. } => Error::Realization {
                    target: Some(n),
                    deviation,
                },
                Error::Support {
                    member, residual, ..
                } => Error::Support {
                    target: Some(n),
                    member,
                    residual,
                },
                other => other,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SteeringWitness {
        purification,
        bases,
    })
}

/// Per-member comparison of a steered ensemble against its target.
#[derive(Clone, Debug)]
pub struct TargetCheck {
    pub outcomes: Vec<SteeringOutcome>,
    /// `|⟨ψ_μ|conditional_μ⟩|²` per target member; 0 if the outcome was impossible.
    pub fidelities: Vec<f64>,
    /// `|probability_μ - q_μ|` per target member.
    pub probability_errors: Vec<f64>,
    /// Total probability of the padding outcomes beyond the target size.
    pub padding_probability: f64,
}

impl TargetCheck {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelities.iter().copied().fold(1.0, f64::min)
    }

    pub fn max_probability_error(&self) -> f64 {
        self.probability_errors
            .iter()
            .copied()
            .fold(self.padding_probability, f64::max)
    }
}

impl SteeringWitness {
    /// Measures every basis and compares the result with its target.
    pub fn check(&self) -> Result<Vec<TargetCheck>> {
        self.bases
            .iter()
            .map(|basis| {
                let outcomes = self.purification.measure(basis)?;
                let target = basis.target();
                let mut fidelities = Vec::with_capacity(target.len());
                let mut probability_errors = Vec::with_capacity(target.len());
                for (m, o) in target.members().iter().zip(&outcomes) {
                    fidelities.push(
                        o.conditional_state
                            .as_ref()
                            .map_or(0.0, |s| s.fidelity(&m.state)),
                    );
                    probability_errors.push((o.probability - m.weight).abs());
                }
                let padding_probability =
                    outcomes[target.len()..].iter().map(|o| o.probability).sum();
                Ok(TargetCheck {
                    outcomes,
                    fidelities,
                    probability_errors,
                    padding_probability,
                })
            })
            .collect()
    }
}

/// `Σ_μ p_μ |c_μ⟩⟨c_μ|` over the possible outcomes of a measurement.
pub fn remix(outcomes: &[SteeringOutcome]) -> Option<ComplexMatrix> {
    let dim = outcomes
        .iter()
        .find_map(|o| o.conditional_state.as_ref())?
        .dim();
    let mut w = ComplexMatrix::zeros(dim, dim);
    for o in outcomes {
        if let Some(s) = &o.conditional_state {
            w = &w + &s.projector().scale(C64::from(o.probability));
        }
    }
    Some(w)
}
