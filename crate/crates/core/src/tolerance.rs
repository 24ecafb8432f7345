//! Numerical tolerances shared by every validating constructor.
//!
//! The defaults are exposed as constants; [`Tolerances`] bundles them so a
//! caller can loosen or tighten individual checks without touching the rest.

/// Allowed deviation of a state norm from one.
pub const EPS_NORM: f64 = 1e-12;
/// Max-element deviation of a matrix from its adjoint.
pub const EPS_HERM: f64 = 1e-12;
/// Max-element deviation of `U†U` from the identity.
pub const EPS_UNIT: f64 = 1e-10;
/// Reconstruction residual bound for the eigensolver.
pub const EPS_EIG: f64 = 1e-10;
/// Eigenvalues at or below this count as zero when taking the rank.
pub const RANK_EPS: f64 = 1e-10;
/// Allowed deviation of a density operator's trace (or ensemble weights) from one.
pub const EPS_TRACE: f64 = 1e-12;
/// Most negative eigenvalue a density operator may have.
pub const EPS_PSD: f64 = 1e-10;
/// Relaxed PSD bound applied to reconstructed density operators.
pub const EPS_PSD_RECONSTRUCTED: f64 = 1e-8;
/// Max-element deviation allowed between an ensemble's mixture and the target.
pub const EPS_REALIZATION: f64 = 1e-8;
/// Projection residual allowed for a state to count as inside a support.
pub const EPS_SUPPORT: f64 = 1e-8;
/// Probabilities below this are treated as impossible outcomes.
pub const EPS_PROBABILITY: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub norm: f64,
    pub hermitian: f64,
    pub unitary: f64,
    pub rank: f64,
    pub trace: f64,
    pub psd: f64,
    pub realization: f64,
    pub support: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        norm: EPS_NORM,
        hermitian: EPS_HERM,
        unitary: EPS_UNIT,
        rank: RANK_EPS,
        trace: EPS_TRACE,
        psd: EPS_PSD,
        realization: EPS_REALIZATION,
        support: EPS_SUPPORT,
    };

    /// Defaults with the PSD check relaxed to the bound used for reconstructions.
    pub fn reconstructed() -> Self {
        Tolerances {
            psd: EPS_PSD_RECONSTRUCTED,
            ..Self::DEFAULT
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
