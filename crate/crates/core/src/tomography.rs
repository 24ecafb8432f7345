//! Reconstruction of a composite density operator from correlations of
//! local observables.
//!
//! Each subsystem gets a basis of `d²` Hermitian operators. The records are
//! `tr(W · M_{i₁} ⊗ … ⊗ M_{iₙ})` for every index tuple. Any projector
//! `|φ⟩⟨φ|` expands over the product basis with real coefficients, so
//! `⟨φ|W|φ⟩` is a fixed linear combination of the records; off-diagonal
//! elements follow from diagonal ones by polarization. Reconstruction
//! evaluates every matrix element in the canonical product basis that way.

use serde::{Deserialize, Serialize};

use crate::ensemble::DensityOperator;
use crate::error::{Error, Result};
use crate::linalg::{
    digits, hermitian_eig, norm, sigma_x, sigma_y, sigma_z, ComplexMatrix, HermitianOperator,
    PureState, C64, I, ONE, ZERO,
};
use crate::tolerance::Tolerances;

/// Smallest allowed ratio of Gram eigenvalues for a basis to count as independent.
const GRAM_CONDITION: f64 = 1e-12;
/// Imaginary parts of records above this flag a non-Hermitian input.
const EPS_REAL: f64 = 1e-12;

/// Ordered subsystem dimensions of a composite system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition {
    dims: Vec<usize>,
}

impl Partition {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Dimension(format!("invalid partition {dims:?}")));
        }
        Ok(Partition { dims })
    }

    /// Parses `"2x2x2"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let dims = spec
            .split(['x', 'X'])
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Format(format!("bad partition {spec:?}: {e}")))?;
        Self::new(dims)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn total(&self) -> usize {
        self.dims.iter().product()
    }

    /// Number of correlation records: `Π d_k²`.
    pub fn record_count(&self) -> usize {
        self.dims.iter().map(|d| d * d).product()
    }

    /// Merges consecutive factors. `groups` lists the 0-based factor
    /// indices of each new factor; together they must cover every factor
    /// once, in order.
    pub fn coarsen(&self, groups: &[Vec<usize>]) -> Result<Partition> {
        let flat: Vec<usize> = groups.iter().flatten().copied().collect();
        if groups.iter().any(Vec::is_empty) || flat != (0..self.dims.len()).collect::<Vec<_>>() {
            return Err(Error::Dimension(format!(
                "grouping {groups:?} does not cover factors 0..{} in order",
                self.dims.len()
            )));
        }
        Partition::new(
            groups
                .iter()
                .map(|g| g.iter().map(|&k| self.dims[k]).product())
                .collect(),
        )
    }

    /// Parses a grouping such as `"1|23"` (1-based factor digits).
    pub fn coarsen_spec(&self, spec: &str) -> Result<Partition> {
        let groups = spec
            .split('|')
            .map(|g| {
                g.trim()
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .filter(|&k| k >= 1)
                            .map(|k| k as usize - 1)
                            .ok_or_else(|| Error::Format(format!("bad grouping {spec:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        self.coarsen(&groups)
    }

    /// All index tuples in record order (first factor slowest).
    pub fn index_tuples(&self) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = self.dims.iter().map(|d| d * d).collect();
        let mut out = Vec::with_capacity(self.record_count());
        let mut tuple = vec![0; sizes.len()];
        for flat in 0..self.record_count() {
            digits(flat, &sizes, &mut tuple);
            out.push(tuple.clone());
        }
        out
    }

    fn flat_index(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.dims.len() {
            return None;
        }
        let mut flat = 0;
        for (&t, &d) in tuple.iter().zip(&self.dims) {
            if t >= d * d {
                return None;
            }
            flat = flat * d * d + t;
        }
        Some(flat)
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(dims: Vec<usize>) -> Result<Self> {
        Partition::new(dims)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.dims
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.dims.iter().map(usize::to_string).collect();
        write!(f, "{}", parts.join("x"))
    }
}

/// Serializable description of a subsystem basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisDescriptor {
    /// Diagonal projectors, then symmetric and antisymmetric pairs.
    Hermitian { dim: usize },
    /// `{I, σx, σy, σz}` on a qubit.
    Pauli,
    Explicit {
        elements: Vec<ComplexMatrix>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
}

impl BasisDescriptor {
    pub fn dim(&self) -> usize {
        match self {
            BasisDescriptor::Hermitian { dim } => *dim,
            BasisDescriptor::Pauli => 2,
            BasisDescriptor::Explicit { elements, .. } => {
                elements.first().map_or(0, ComplexMatrix::rows)
            }
        }
    }

    pub fn to_basis(&self) -> Result<OperatorBasis> {
        match self {
            BasisDescriptor::Hermitian { dim } => Ok(hermitian_basis(*dim)),
            BasisDescriptor::Pauli => Ok(pauli_basis()),
            BasisDescriptor::Explicit { elements, .. } => OperatorBasis::new(
                elements
                    .iter()
                    .map(|m| HermitianOperator::new(m.clone()))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

/// `d²` linearly independent Hermitian operators on one subsystem.
#[derive(Clone, Debug)]
pub struct OperatorBasis {
    dim: usize,
    elements: Vec<HermitianOperator>,
    /// Inverse of the Hilbert-Schmidt Gram matrix `tr(E_a E_b)`.
    gram_inverse: ComplexMatrix,
    descriptor: BasisDescriptor,
}

impl OperatorBasis {
    /// Validates a user-supplied basis.
    pub fn new(elements: Vec<HermitianOperator>) -> Result<Self> {
        let dim = elements.first().map_or(0, HermitianOperator::dim);
        if dim == 0 || elements.len() != dim * dim {
            return Err(Error::Basis(format!(
                "need d² elements of dimension d, got {} of dimension {dim}",
                elements.len()
            )));
        }
        if elements.iter().any(|e| e.dim() != dim) {
            return Err(Error::Basis("elements have different dimensions".into()));
        }
        let descriptor = BasisDescriptor::Explicit {
            elements: elements.iter().map(|e| e.matrix().clone()).collect(),
            labels: None,
        };
        Self::with_descriptor(elements, descriptor)
    }

    fn with_descriptor(
        elements: Vec<HermitianOperator>,
        descriptor: BasisDescriptor,
    ) -> Result<Self> {
        let dim = elements[0].dim();
        let n = elements.len();
        let gram = ComplexMatrix::from_fn(n, n, |a, b| {
            C64::from(elements[a].matrix().trace_product(elements[b].matrix()).re)
        });
        let eig = hermitian_eig(&HermitianOperator::from_hermitian_part(&gram));
        let largest = eig.values[0];
        let smallest = *eig.values.last().unwrap();
        if !(smallest > GRAM_CONDITION * largest) {
            return Err(Error::Basis(format!(
                "elements are linearly dependent (Gram eigenvalues {smallest:e} .. {largest:e})"
            )));
        }
        let inverse_spectrum = crate::linalg::EigenDecomposition {
            values: eig.values.iter().map(|v| 1.0 / v).collect(),
            vectors: eig.vectors,
        };
        let gram_inverse = ComplexMatrix::from_fn(n, n, |a, b| {
            C64::from(inverse_spectrum.recompose()[(a, b)].re)
        });
        Ok(OperatorBasis {
            dim,
            elements,
            gram_inverse,
            descriptor,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn descriptor(&self) -> &BasisDescriptor {
        &self.descriptor
    }

    /// Basis of `a.dim · b.dim` made of all products `A_i ⊗ B_j`, `i` slowest.
    pub fn product(a: &OperatorBasis, b: &OperatorBasis) -> OperatorBasis {
        let elements = a
            .elements
            .iter()
            .flat_map(|x| b.elements.iter().map(move |y| x.kron(y)))
            .collect();
        OperatorBasis::new(elements).expect("products of independent bases are independent")
    }
}

/// The `d²` Hermitian operators `|μ⟩⟨μ|`, then `|μ⟩⟨ν| + |ν⟩⟨μ|` and
/// `i(|μ⟩⟨ν| - |ν⟩⟨μ|)` for `μ < ν`.
pub fn hermitian_basis(dim: usize) -> OperatorBasis {
    assert!(dim >= 1, "basis dimension must be positive");
    let unit = |mu: usize, nu: usize| {
        ComplexMatrix::from_fn(dim, dim, |i, j| if (i, j) == (mu, nu) { ONE } else { ZERO })
    };
    let mut elements = Vec::with_capacity(dim * dim);
    for mu in 0..dim {
        elements.push(unit(mu, mu));
    }
    for mu in 0..dim {
        for nu in mu + 1..dim {
            elements.push(&unit(mu, nu) + &unit(nu, mu));
        }
    }
    for mu in 0..dim {
        for nu in mu + 1..dim {
            elements.push((&unit(mu, nu) - &unit(nu, mu)).scale(I));
        }
    }
    let elements = elements
        .into_iter()
        .map(|m| HermitianOperator::new(m).expect("Hermitian by construction"))
        .collect();
    OperatorBasis::with_descriptor(elements, BasisDescriptor::Hermitian { dim })
        .expect("elementary basis is orthogonal")
}

pub fn pauli_basis() -> OperatorBasis {
    let id = HermitianOperator::new(ComplexMatrix::identity(2)).unwrap();
    OperatorBasis::with_descriptor(
        vec![id, sigma_x(), sigma_y(), sigma_z()],
        BasisDescriptor::Pauli,
    )
    .expect("Pauli basis is orthogonal")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub indices: Vec<usize>,
    #[serde(with = "crate::formats::precise")]
    pub value: f64,
}

/// Records plus the partition and bases they refer to.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSet {
    pub partition: Partition,
    pub bases: Vec<BasisDescriptor>,
    pub records: Vec<CorrelationRecord>,
}

impl CorrelationSet {
    /// Record values in tuple order, or the list of missing tuples.
    pub fn dense_values(&self) -> Result<Vec<f64>> {
        let n = self.partition.record_count();
        let mut values: Vec<Option<f64>> = vec![None; n];
        for r in &self.records {
            let flat = self.partition.flat_index(&r.indices).ok_or_else(|| {
                Error::Format(format!(
                    "record indices {:?} do not fit partition {}",
                    r.indices, self.partition
                ))
            })?;
            values[flat] = Some(r.value);
        }
        let missing: Vec<Vec<usize>> = self
            .partition
            .index_tuples()
            .into_iter()
            .zip(&values)
            .filter(|(_, v)| v.is_none())
            .map(|(t, _)| t)
            .collect();
        if !missing.is_empty() {
            return Err(Error::IncompleteData { missing });
        }
        Ok(values.into_iter().map(Option::unwrap).collect())
    }

    pub fn operator_bases(&self) -> Result<Vec<OperatorBasis>> {
        let bases = self
            .bases
            .iter()
            .map(BasisDescriptor::to_basis)
            .collect::<Result<Vec<_>>>()?;
        check_bases(&self.partition, &bases)?;
        Ok(bases)
    }

    pub fn value(&self, indices: &[usize]) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.indices == indices)
            .map(|r| r.value)
    }
}

fn check_bases(partition: &Partition, bases: &[OperatorBasis]) -> Result<()> {
    if bases.len() != partition.len() {
        return Err(Error::Dimension(format!(
            "{} bases for a partition with {} factors",
            bases.len(),
            partition.len()
        )));
    }
    for (k, (b, &d)) in bases.iter().zip(partition.dims()).enumerate() {
        if b.dim() != d {
            return Err(Error::Dimension(format!(
                "basis {k} has dimension {}, factor has {d}",
                b.dim()
            )));
        }
    }
    Ok(())
}

/// Applies `maps[k]` (a `d_k² x d_k²` matrix) along tensor mode `k`.
fn apply_modes(tensor: &mut Vec<C64>, sizes: &[usize], maps: &[&ComplexMatrix]) {
    for (k, map) in maps.iter().enumerate() {
        let size = sizes[k];
        let outer: usize = sizes[..k].iter().product();
        let inner: usize = sizes[k + 1..].iter().product();
        let mut next = vec![ZERO; tensor.len()];
        for o in 0..outer {
            for a in 0..size {
                let dst = (o * size + a) * inner;
                for b in 0..size {
                    let coeff = map[(a, b)];
                    if coeff == ZERO {
                        continue;
                    }
                    let src = (o * size + b) * inner;
                    for i in 0..inner {
                        next[dst + i] += coeff * tensor[src + i];
                    }
                }
            }
        }
        *tensor = next;
    }
}

/// `tr(X · E_{i₁} ⊗ … ⊗ E_{iₙ})` for every index tuple, in record order.
pub fn product_expectations(
    x: &ComplexMatrix,
    partition: &Partition,
    bases: &[OperatorBasis],
) -> Result<Vec<C64>> {
    check_bases(partition, bases)?;
    let n = partition.total();
    if !x.is_square() || x.rows() != n {
        return Err(Error::Dimension(format!(
            "{}x{} operator on a {} partition",
            x.rows(),
            x.cols(),
            partition
        )));
    }
    let dims = partition.dims();
    let sizes: Vec<usize> = dims.iter().map(|d| d * d).collect();

    // regroup X[i, j] into modes (i_k, j_k)
    let mut tensor = vec![ZERO; n * n];
    let (mut di, mut dj) = (vec![0; dims.len()], vec![0; dims.len()]);
    for i in 0..n {
        digits(i, dims, &mut di);
        for j in 0..n {
            digits(j, dims, &mut dj);
            let mut flat = 0;
            for k in 0..dims.len() {
                flat = flat * sizes[k] + di[k] * dims[k] + dj[k];
            }
            tensor[flat] = x[(i, j)];
        }
    }

    // tr(X E) = Σ X_ij E_ji
    let maps: Vec<ComplexMatrix> = bases
        .iter()
        .map(|b| {
            let d = b.dim();
            ComplexMatrix::from_fn(d * d, d * d, |a, ij| {
                let (i, j) = (ij / d, ij % d);
                b.elements()[a].matrix()[(j, i)]
            })
        })
        .collect();
    let refs: Vec<&ComplexMatrix> = maps.iter().collect();
    apply_modes(&mut tensor, &sizes, &refs);
    Ok(tensor)
}

/// One record per index tuple with value `tr(W · M_{i₁} ⊗ … ⊗ M_{iₙ})`.
pub fn correlations(
    w: &DensityOperator,
    partition: &Partition,
    bases: &[OperatorBasis],
) -> Result<CorrelationSet> {
    let values = product_expectations(w.matrix(), partition, bases)?;
    let records = partition
        .index_tuples()
        .into_iter()
        .zip(values)
        .map(|(indices, v)| {
            debug_assert!(v.im.abs() < EPS_REAL, "imaginary record {v}");
            CorrelationRecord {
                indices,
                value: v.re,
            }
        })
        .collect();
    Ok(CorrelationSet {
        partition: partition.clone(),
        bases: bases.iter().map(|b| b.descriptor().clone()).collect(),
        records,
    })
}

/// Real coefficients `c` with `|φ⟩⟨φ| = Σ c_{i…} M_{i₁} ⊗ … ⊗ M_{iₙ}`.
pub fn expansion_coeffs(
    phi: &PureState,
    partition: &Partition,
    bases: &[OperatorBasis],
) -> Result<Vec<f64>> {
    if phi.dim() != partition.total() {
        return Err(Error::Dimension(format!(
            "state of dimension {} on a {} partition",
            phi.dim(),
            partition
        )));
    }
    let mut overlaps = product_expectations(&phi.projector(), partition, bases)?;
    let sizes: Vec<usize> = partition.dims().iter().map(|d| d * d).collect();
    let inverses: Vec<&ComplexMatrix> = bases.iter().map(|b| &b.gram_inverse).collect();
    apply_modes(&mut overlaps, &sizes, &inverses);
    Ok(overlaps.into_iter().map(|c| c.re).collect())
}

/// Validated record set ready for evaluating matrix elements.
#[derive(Clone, Debug)]
pub struct CorrelationTomography {
    partition: Partition,
    bases: Vec<OperatorBasis>,
    values: Vec<f64>,
}

impl CorrelationTomography {
    pub fn new(records: &CorrelationSet) -> Result<Self> {
        let bases = records.operator_bases()?;
        let values = records.dense_values()?;
        Ok(CorrelationTomography {
            partition: records.partition.clone(),
            bases,
            values,
        })
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    /// `⟨φ|W|φ⟩ = Σ c_{i…}(φ) · record(i…)`.
    pub fn diagonal_element(&self, phi: &PureState) -> Result<f64> {
        let c = expansion_coeffs(phi, &self.partition, &self.bases)?;
        Ok(c.iter().zip(&self.values).map(|(c, v)| c * v).sum())
    }

    /// `⟨v|W|v⟩` for an unnormalized `v`, via the normalized direction.
    fn quadratic_form(&self, v: Vec<C64>) -> Result<f64> {
        let n2 = norm(&v).powi(2);
        if n2 < 1e-300 {
            return Ok(0.0);
        }
        Ok(n2 * self.diagonal_element(&PureState::normalized(v)?)?)
    }

    fn polarize(
        &self,
        alpha: &PureState,
        beta: &PureState,
        diag_alpha: f64,
        diag_beta: f64,
    ) -> Result<C64> {
        let (a, b) = (alpha.amplitudes(), beta.amplitudes());
        let sum: Vec<C64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let twisted: Vec<C64> = a.iter().zip(b).map(|(x, y)| x + I * y).collect();
        let plus = self.quadratic_form(sum)?;
        let plus_i = self.quadratic_form(twisted)?;
        Ok(C64::from(0.5 * plus) + I * (0.5 * plus_i)
            - C64::new(0.5, 0.5) * (diag_alpha + diag_beta))
    }

    /// `⟨β|W|α⟩` from four diagonal elements (polarization identity).
    pub fn offdiagonal_element(&self, alpha: &PureState, beta: &PureState) -> Result<C64> {
        let da = self.diagonal_element(alpha)?;
        let db = self.diagonal_element(beta)?;
        self.polarize(alpha, beta, da, db)
    }

    /// Every matrix element in the canonical product basis, unvalidated.
    pub fn reconstruct_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.partition.total();
        let kets: Vec<PureState> = (0..n).map(|k| PureState::basis(n, k)).collect();
        let diag = kets
            .iter()
            .map(|k| self.diagonal_element(k))
            .collect::<Result<Vec<_>>>()?;
        let mut w = ComplexMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                w[(r, c)] = if r == c {
                    C64::from(diag[r])
                } else {
                    self.polarize(&kets[c], &kets[r], diag[c], diag[r])?
                };
            }
        }
        Ok(w.hermitian_part())
    }

    /// Reconstructed density operator; fails if the records describe no
    /// physical state (trace off by more than `1e-12`, eigenvalues below `-1e-8`).
    pub fn reconstruct(&self) -> Result<DensityOperator> {
        let w = self.reconstruct_matrix()?;
        DensityOperator::new_with(w, &Tolerances::reconstructed()).map_err(|e| match e {
            Error::InvalidDensity(msg) | Error::InvalidMatrix(msg) => Error::Physicality(msg),
            other => other,
        })
    }
}

pub fn diagonal_element(phi: &PureState, records: &CorrelationSet) -> Result<f64> {
    CorrelationTomography::new(records)?.diagonal_element(phi)
}

pub fn offdiagonal_element(
    alpha: &PureState,
    beta: &PureState,
    records: &CorrelationSet,
) -> Result<C64> {
    CorrelationTomography::new(records)?.offdiagonal_element(alpha, beta)
}

pub fn reconstruct(records: &CorrelationSet) -> Result<DensityOperator> {
    CorrelationTomography::new(records)?.reconstruct()
}

/// Nearest-physical projection: clips negative eigenvalues of the Hermitian
/// part to zero and rescales to unit trace.
pub fn project_to_physical(m: &ComplexMatrix) -> Result<DensityOperator> {
    let h = HermitianOperator::from_hermitian_part(m);
    let mut eig = hermitian_eig(&h);
    eig.values.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = eig.values.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Physicality(
            "no positive spectrum to project onto".into(),
        ));
    }
    eig.values.iter_mut().for_each(|v| *v /= total);
    DensityOperator::new(eig.recompose().hermitian_part())
}

/// Reconstructions of the same `w` from several resolutions into subsystems.
#[derive(Clone, Debug)]
pub struct ConsistencyReport {
    pub partitions: Vec<Partition>,
    pub reconstructions: Vec<DensityOperator>,
    /// Largest max-element difference between any two reconstructions.
    pub max_pairwise_deviation: f64,
    /// Largest max-element difference between a reconstruction and `w`.
    pub max_source_deviation: f64,
}

/// Reconstructs `w` from the correlations of every partition (elementary
/// Hermitian bases on each factor) and compares the results.
pub fn resolution_consistency(
    w: &DensityOperator,
    partitions: &[Partition],
) -> Result<ConsistencyReport> {
    let reconstructions = partitions
        .iter()
        .map(|p| {
            let bases: Vec<OperatorBasis> = p.dims().iter().map(|&d| hermitian_basis(d)).collect();
            reconstruct(&correlations(w, p, &bases)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_pairwise_deviation: f64 = 0.0;
    for (a, ra) in reconstructions.iter().enumerate() {
        for rb in &reconstructions[a + 1..] {
            max_pairwise_deviation =
                max_pairwise_deviation.max(ra.matrix().max_abs_diff(rb.matrix()));
        }
    }
    let max_source_deviation = reconstructions
        .iter()
        .map(|r| r.matrix().max_abs_diff(w.matrix()))
        .fold(0.0, f64::max);
    Ok(ConsistencyReport {
        partitions: partitions.to_vec(),
        reconstructions,
        max_pairwise_deviation,
        max_source_deviation,
    })
}

/// `tr(W σ_μ ⊗ σ_μ)` for `μ = x, y, z`.
pub fn spin_correlations(w: &DensityOperator) -> Result<[f64; 3]> {
    if w.dim() != 4 {
        return Err(Error::Dimension(format!(
            "two qubits need dimension 4, got {}",
            w.dim()
        )));
    }
    Ok([sigma_x(), sigma_y(), sigma_z()].map(|s| w.expectation(&s.kron(&s))))
}

/// The singlet projector `(1 - σ·σ)/4`.
pub fn singlet_projector() -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4);
    for s in [sigma_x(), sigma_y(), sigma_z()] {
        m = &m - s.kron(&s).matrix();
    }
    m.scale(C64::from(0.25))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingletWitness {
    pub is_singlet: bool,
    /// `⟨singlet|W|singlet⟩ = (1 - Σ_μ tr(W σ_μ⊗σ_μ))/4`.
    pub fidelity: f64,
}

/// Decides from the three spin correlations alone whether `W` is the singlet.
pub fn singlet_witness(values: [f64; 3], tolerance: f64) -> Result<SingletWitness> {
    if let Some(&value) = values.iter().find(|v| !(v.abs() <= 1.0 + 1e-9)) {
        return Err(Error::Range { value });
    }
    Ok(SingletWitness {
        is_singlet: values.iter().all(|v| (v + 1.0).abs() <= tolerance),
        fidelity: (1.0 - values.iter().sum::<f64>()) / 4.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::random::{random_density, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gram_rank(basis: &OperatorBasis) -> usize {
        let n = basis.elements().len();
        let gram = ComplexMatrix::from_fn(n, n, |a, b| {
            basis.elements()[a]
                .matrix()
                .trace_product(basis.elements()[b].matrix())
        });
        gram.eigh()
            .unwrap()
            .values
            .iter()
            .filter(|v| v.abs() > 1e-10)
            .count()
    }

    fn hbases(p: &Partition) -> Vec<OperatorBasis> {
        p.dims().iter().map(|&d| hermitian_basis(d)).collect()
    }

    fn singlet() -> PureState {
        let s = 0.5f64.sqrt();
        PureState::from_real(&[0.0, s, -s, 0.0]).unwrap()
    }

    #[test]
    fn hermitian_basis_counts_and_span() {
        let b1 = hermitian_basis(1);
        assert_eq!(b1.elements().len(), 1);
        assert_eq!(b1.elements()[0].matrix(), &ComplexMatrix::identity(1));

        let b2 = hermitian_basis(2);
        assert_eq!(b2.elements().len(), 4);
        assert_eq!(gram_rank(&b2), 4);
        // same span as the Pauli basis: every Pauli matrix expands exactly
        for p in pauli_basis().elements() {
            let coeffs: Vec<C64> = b2
                .elements()
                .iter()
                .map(|e| e.matrix().trace_product(p.matrix()))
                .collect();
            let gram_inv = &b2.gram_inverse;
            let mut rebuilt = ComplexMatrix::zeros(2, 2);
            for a in 0..4 {
                let c: C64 = (0..4).map(|b| gram_inv[(a, b)] * coeffs[b]).sum();
                rebuilt = &rebuilt + &b2.elements()[a].matrix().scale(c);
            }
            assert!(rebuilt.max_abs_diff(p.matrix()) < 1e-15);
        }

        let b3 = hermitian_basis(3);
        assert_eq!(b3.elements().len(), 9);
        assert_eq!(gram_rank(&b3), 9);
    }

    #[test]
    fn dependent_basis_is_rejected() {
        let id = HermitianOperator::new(ComplexMatrix::identity(2)).unwrap();
        let e = vec![id.clone(), id, sigma_x(), sigma_z()];
        assert!(matches!(OperatorBasis::new(e), Err(Error::Basis(_))));
        assert!(matches!(
            OperatorBasis::new(vec![sigma_x()]),
            Err(Error::Basis(_))
        ));
    }

    #[test]
    fn partition_parsing_and_coarsening() {
        let p = Partition::parse("2x3x4").unwrap();
        assert_eq!(p.total(), 24);
        assert_eq!(p.record_count(), 4 * 9 * 16);
        assert_eq!(p.coarsen_spec("1|23").unwrap().dims(), &[2, 12]);
        assert_eq!(p.coarsen_spec("12|3").unwrap().dims(), &[6, 4]);
        assert_eq!(p.coarsen_spec("123").unwrap().dims(), &[24]);
        assert!(p.coarsen_spec("2|13").is_err());
        assert!(p.coarsen_spec("1|2").is_err());
        assert!(Partition::parse("2x0").is_err());
        assert!(Partition::parse("two").is_err());
    }

    #[test]
    fn singlet_pauli_correlations_are_minus_one() {
        let w = DensityOperator::pure(&singlet());
        let set = correlations(
            &w,
            &Partition::new(vec![2, 2]).unwrap(),
            &[pauli_basis(), pauli_basis()],
        )
        .unwrap();
        for mu in 1..4 {
            assert!((set.value(&[mu, mu]).unwrap() + 1.0).abs() < 1e-15);
        }
        assert_eq!(
            spin_correlations(&w)
                .unwrap()
                .map(|v| (v + 1.0).abs() < 1e-15),
            [true; 3]
        );
    }

    #[test]
    fn product_state_records_factorize() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let (wa, wb) = (
            random_density(2, 2, &mut rng),
            random_density(3, 2, &mut rng),
        );
        let w = DensityOperator::new(kron(wa.matrix(), wb.matrix()).hermitian_part()).unwrap();
        let p = Partition::new(vec![2, 3]).unwrap();
        let bases = hbases(&p);
        let set = correlations(&w, &p, &bases).unwrap();
        assert_eq!(set.records.len(), 4 * 9);
        for r in &set.records {
            let expected = wa.expectation(&bases[0].elements()[r.indices[0]])
                * wb.expectation(&bases[1].elements()[r.indices[1]]);
            assert!((r.value - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn records_match_direct_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let w = random_density(4, 4, &mut rng);
        let p = Partition::new(vec![2, 2]).unwrap();
        let bases = hbases(&p);
        let set = correlations(&w, &p, &bases).unwrap();
        for r in &set.records {
            let op = kron(
                bases[0].elements()[r.indices[0]].matrix(),
                bases[1].elements()[r.indices[1]].matrix(),
            );
            let direct = (w.matrix() * &op).trace();
            assert!(direct.im.abs() < 1e-12);
            assert!((r.value - direct.re).abs() < 1e-14);
        }
    }

    #[test]
    fn expansion_of_basis_projector_is_a_unit_vector() {
        let p = Partition::new(vec![2, 3]).unwrap();
        let phi = PureState::basis(2, 1).kron(&PureState::basis(3, 2));
        let c = expansion_coeffs(&phi, &p, &hbases(&p)).unwrap();
        // |1⟩⟨1| is element 1 of the first basis, |2⟩⟨2| element 2 of the second
        for (k, v) in c.iter().enumerate() {
            let expected = if k == 9 + 2 { 1.0 } else { 0.0 };
            assert!((v - expected).abs() < 1e-15, "coefficient {k} = {v}");
        }
    }

    #[test]
    fn expansion_of_singlet_reproduces_its_projector() {
        let p = Partition::new(vec![2, 2]).unwrap();
        let bases = hbases(&p);
        let c = expansion_coeffs(&singlet(), &p, &bases).unwrap();
        let mut rebuilt = ComplexMatrix::zeros(4, 4);
        for (t, coeff) in p.index_tuples().iter().zip(&c) {
            let op = kron(
                bases[0].elements()[t[0]].matrix(),
                bases[1].elements()[t[1]].matrix(),
            );
            rebuilt = &rebuilt + &op.scale(C64::from(*coeff));
        }
        assert!(rebuilt.max_abs_diff(&singlet_projector()) < 1e-15);
    }

    #[test]
    fn expansion_residual_random_state_2x3() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let p = Partition::new(vec![2, 3]).unwrap();
        let bases = hbases(&p);
        let phi = random_state(6, &mut rng);
        let c = expansion_coeffs(&phi, &p, &bases).unwrap();
        let mut rebuilt = ComplexMatrix::zeros(6, 6);
        for (t, coeff) in p.index_tuples().iter().zip(&c) {
            let op = kron(
                bases[0].elements()[t[0]].matrix(),
                bases[1].elements()[t[1]].matrix(),
            );
            rebuilt = &rebuilt + &op.scale(C64::from(*coeff));
        }
        assert!(rebuilt.max_abs_diff(&phi.projector()) < 1e-10);
    }

    #[test]
    fn diagonal_elements() {
        let p = Partition::new(vec![2, 2]).unwrap();
        let w0 = DensityOperator::pure(&singlet());
        let set = correlations(&w0, &p, &hbases(&p)).unwrap();
        assert!((diagonal_element(&singlet(), &set).unwrap() - 1.0).abs() < 1e-14);
        let triplet = PureState::basis(4, 0);
        assert!(diagonal_element(&triplet, &set).unwrap().abs() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let w = random_density(4, 3, &mut rng);
        let set = correlations(&w, &p, &hbases(&p)).unwrap();
        let t = CorrelationTomography::new(&set).unwrap();
        for _ in 0..5 {
            let phi = random_state(4, &mut rng);
            assert!((t.diagonal_element(&phi).unwrap() - w.overlap(&phi)).abs() < 1e-10);
        }
    }

    #[test]
    fn offdiagonal_elements() {
        let p = Partition::new(vec![2]).unwrap();
        let w = DensityOperator::new(
            ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap(),
        )
        .unwrap();
        let set = correlations(&w, &p, &hbases(&p)).unwrap();
        let (k0, k1) = (PureState::basis(2, 0), PureState::basis(2, 1));
        let v = offdiagonal_element(&k1, &k0, &set).unwrap();
        assert!((v - C64::from(0.5)).norm() < 1e-14);
        let same = offdiagonal_element(&k0, &k0, &set).unwrap();
        assert!((same - C64::from(diagonal_element(&k0, &set).unwrap())).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(25);
        let p = Partition::new(vec![2, 2]).unwrap();
        let w = random_density(4, 4, &mut rng);
        let t = CorrelationTomography::new(&correlations(&w, &p, &hbases(&p)).unwrap()).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let v = t
                    .offdiagonal_element(&PureState::basis(4, c), &PureState::basis(4, r))
                    .unwrap();
                assert!((v - w.matrix()[(r, c)]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn missing_record_is_reported() {
        let p = Partition::new(vec![2, 2]).unwrap();
        let mut set = correlations(&DensityOperator::maximally_mixed(4), &p, &hbases(&p)).unwrap();
        set.records.remove(5);
        match reconstruct(&set) {
            Err(Error::IncompleteData { missing }) => assert_eq!(missing, vec![vec![1, 1]]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reconstruct_singlet_and_maximally_mixed() {
        let p = Partition::new(vec![2, 2]).unwrap();
        let w0 = DensityOperator::pure(&singlet());
        let rec =
            reconstruct(&correlations(&w0, &p, &[pauli_basis(), pauli_basis()]).unwrap()).unwrap();
        assert!(rec.matrix().max_abs_diff(&singlet_projector()) < 1e-9);

        let mixed = DensityOperator::maximally_mixed(4);
        let set = correlations(&mixed, &p, &[pauli_basis(), pauli_basis()]).unwrap();
        for r in &set.records {
            let expected = if r.indices == [0, 0] { 1.0 } else { 0.0 };
            assert!((r.value - expected).abs() < 1e-15);
        }
        let rec = reconstruct(&set).unwrap();
        assert!(rec.matrix().max_abs_diff(mixed.matrix()) < 1e-12);
    }

    #[test]
    fn reconstruct_roundtrip_over_partitions() {
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for dims in [vec![2, 2], vec![2, 3], vec![2, 2, 2], vec![6], vec![3, 4]] {
            let p = Partition::new(dims).unwrap();
            let w = random_density(p.total(), 1 + p.total() / 2, &mut rng);
            let rec = reconstruct(&correlations(&w, &p, &hbases(&p)).unwrap()).unwrap();
            assert!(rec.matrix().max_abs_diff(w.matrix()) < 1e-9, "{p}");
        }
    }

    #[test]
    fn unphysical_records_are_rejected() {
        let p = Partition::new(vec![2]).unwrap();
        let set = CorrelationSet {
            partition: p,
            bases: vec![BasisDescriptor::Pauli],
            records: vec![
                CorrelationRecord {
                    indices: vec![0],
                    value: 1.0,
                },
                CorrelationRecord {
                    indices: vec![1],
                    value: 0.0,
                },
                CorrelationRecord {
                    indices: vec![2],
                    value: 0.0,
                },
                CorrelationRecord {
                    indices: vec![3],
                    value: 3.0,
                },
            ],
        };
        assert!(matches!(reconstruct(&set), Err(Error::Physicality(_))));
        let raw = CorrelationTomography::new(&set)
            .unwrap()
            .reconstruct_matrix()
            .unwrap();
        let projected = project_to_physical(&raw).unwrap();
        assert!(
            projected
                .matrix()
                .max_abs_diff(&ComplexMatrix::from_diagonal(&[1.0, 0.0]))
                < 1e-12
        );
    }

    #[test]
    fn resolution_consistency_on_three_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let w = random_density(8, 8, &mut rng);
        let fine = Partition::new(vec![2, 2, 2]).unwrap();
        let partitions: Vec<Partition> = ["1|23", "12|3", "1|2|3", "123"]
            .iter()
            .map(|g| fine.coarsen_spec(g).unwrap())
            .collect();
        let report = resolution_consistency(&w, &partitions).unwrap();
        assert!(report.max_pairwise_deviation < 1e-9);
        assert!(report.max_source_deviation < 1e-9);
    }

    #[test]
    fn coarse_records_from_product_basis_match_fine_records() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        let w = random_density(8, 5, &mut rng);
        let h = hermitian_basis(2);
        let fine = correlations(
            &w,
            &Partition::new(vec![2, 2, 2]).unwrap(),
            &[h.clone(), h.clone(), h.clone()],
        )
        .unwrap();
        let coarse = correlations(
            &w,
            &Partition::new(vec![4, 2]).unwrap(),
            &[OperatorBasis::product(&h, &h), h],
        )
        .unwrap();
        for (a, b) in fine.records.iter().zip(&coarse.records) {
            assert_eq!(a.indices[0] * 4 + a.indices[1], b.indices[0]);
            assert_eq!(a.indices[2], b.indices[1]);
            assert!((a.value - b.value).abs() < 1e-12);
        }
    }

    #[test]
    fn singlet_witness_cases() {
        let w = singlet_witness([-1.0, -1.0, -1.0], 1e-12).unwrap();
        assert!(w.is_singlet);
        assert_eq!(w.fidelity, 1.0);
        let w = singlet_witness([1.0, -1.0, -1.0], 1e-12).unwrap();
        assert!(!w.is_singlet);
        assert_eq!(w.fidelity, 0.5);
        assert!(matches!(
            singlet_witness([-1.5, 0.0, 0.0], 1e-12),
            Err(Error::Range { .. })
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let w = random_density(4, 4, &mut rng);
        let got = singlet_witness(spin_correlations(&w).unwrap(), 1e-12).unwrap();
        assert!((got.fidelity - w.overlap(&singlet())).abs() < 1e-12);
    }

    #[test]
    fn mismatched_bases_are_rejected() {
        let p = Partition::new(vec![2, 3]).unwrap();
        let w = DensityOperator::maximally_mixed(6);
        assert!(matches!(
            correlations(&w, &p, &[hermitian_basis(2)]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            correlations(&w, &p, &[hermitian_basis(3), hermitian_basis(2)]),
            Err(Error::Dimension(_))
        ));
        let q = Partition::new(vec![2, 2]).unwrap();
        assert!(matches!(
            correlations(&w, &q, &hbases(&q)),
            Err(Error::Dimension(_))
        ));
    }
}
