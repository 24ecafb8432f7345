//! Dense complex matrices and the handful of factorizations the rest of the
//! crate needs: Kronecker products, partial traces, a Hermitian eigensolver
//! and completion of orthonormal columns to a unitary.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::{Tolerances, EPS_UNIT};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Residual norm below which a Gram-Schmidt candidate is discarded.
const GS_SKIP: f64 = 1e-8;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major dense complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidMatrix(format!(
                "dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidMatrix(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(k) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                k / cols,
                k % cols
            )));
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Square matrix with the given real diagonal.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::from(diag[i]) } else { ZERO })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        Self::new(
            r,
            c,
            rows.iter()
                .flat_map(|row| row.iter().map(|&x| C64::from(x)))
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(Error::Dimension("columns have different lengths".into()));
        }
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Self::new(rows, cols, m.data)
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> Vec<C64> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &ComplexMatrix) -> C64 {
        assert!(
            self.rows == other.cols && self.cols == other.rows,
            "trace_product dimension mismatch"
        );
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max-element norm of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// `(A + A†)/2`
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    /// Max-element deviation of `self† self` from the identity.
    pub fn isometry_deviation(&self) -> f64 {
        let gram = &self.adjoint() * self;
        gram.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        kron(self, other)
    }

    /// Validating Hermitian eigendecomposition of a raw matrix.
    pub fn eigh(&self) -> Result<EigenDecomposition> {
        Ok(hermitian_eig(&HermitianOperator::new(self.clone())?))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `⟨a|b⟩`
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product dimension mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product; entry `(i·b.rows + k, j·b.cols + l)` is `a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            for k in 0..b.rows {
                let row = i * b.rows + k;
                for l in 0..b.cols {
                    out.data[row * cols + j * b.cols + l] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors, first factor slowest.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|&x| b.iter().map(move |&y| x * y))
        .collect()
}

/// Splits a flat index into per-factor digits, first factor most significant.
pub(crate) fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Traces out every factor not listed in `keep`. Kept factors stay in
/// ascending order regardless of the order given.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::Dimension(format!(
            "invalid factor dimensions {dims:?}"
        )));
    }
    if !m.is_square() || m.rows != total {
        return Err(Error::Dimension(format!(
            "{}x{} matrix does not match factor dimensions {dims:?}",
            m.rows, m.cols
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.is_empty() || kept.len() != keep.len() || *kept.last().unwrap() >= dims.len() {
        return Err(Error::Dimension(format!(
            "keep set {keep:?} is not a nonempty set of factors of {dims:?}"
        )));
    }
    let is_kept: Vec<bool> = (0..dims.len()).map(|k| kept.contains(&k)).collect();
    let kept_dims: Vec<usize> = kept.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();

    // (kept index, traced index) for every flat index
    let mut split = Vec::with_capacity(total);
    let mut dig = vec![0; dims.len()];
    for flat in 0..total {
        digits(flat, dims, &mut dig);
        let (mut kept_ix, mut traced_ix) = (0, 0);
        for (k, &d) in dig.iter().enumerate() {
            if is_kept[k] {
                kept_ix = kept_ix * dims[k] + d;
            } else {
                traced_ix = traced_ix * dims[k] + d;
            }
        }
        split.push((kept_ix, traced_ix));
    }

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        Self::new_with(amplitudes, &Tolerances::DEFAULT)
    }

    pub fn new_with(amplitudes: Vec<C64>, tol: &Tolerances) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Dimension(
                "state must have at least one amplitude".into(),
            ));
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidMatrix(
                "state has non-finite amplitudes".into(),
            ));
        }
        let n = norm(&amplitudes);
        if (n - 1.0).abs() > tol.norm {
            return Err(Error::NotNormalized { norm: n });
        }
        Ok(PureState { amplitudes })
    }

    /// Rescales an arbitrary nonzero vector to unit norm.
    pub fn normalized(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        Self::new(amplitudes.into_iter().map(|z| z / n).collect())
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&x| C64::from(x)).collect())
    }

    /// Canonical basis ket `|k⟩` in `dim` dimensions.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = ONE;
        PureState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `|⟨self|other⟩|²`
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    pub fn kron(&self, other: &PureState) -> PureState {
        PureState {
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
        }
    }
}

/// Square matrix equal to its adjoint.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        Self::new_with(matrix, &Tolerances::DEFAULT)
    }

    pub fn new_with(matrix: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "Hermitian operator must be square, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > tol.hermitian {
            return Err(Error::Hermiticity { deviation });
        }
        Ok(HermitianOperator(matrix))
    }

    /// Hermitian part `(A + A†)/2` of a square matrix.
    pub fn from_hermitian_part(matrix: &ComplexMatrix) -> Self {
        HermitianOperator(matrix.hermitian_part())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    /// `⟨ψ|H|ψ⟩`, real for Hermitian `H`.
    pub fn expectation(&self, state: &PureState) -> f64 {
        inner(state.amplitudes(), &self.0.mul_vec(state.amplitudes())).re
    }

    pub fn kron(&self, other: &HermitianOperator) -> HermitianOperator {
        HermitianOperator(kron(&self.0, &other.0))
    }
}

/// Square matrix with `U†U = I`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOperator(ComplexMatrix);

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension(format!(
                "unitary must be square, got {}x{}",
                matrix.rows, matrix.cols
            )));
        }
        let deviation = matrix.isometry_deviation();
        if deviation > EPS_UNIT {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(UnitaryOperator(matrix))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        self.0.column(j)
    }
}

pub fn sigma_x() -> HermitianOperator {
    HermitianOperator(ComplexMatrix::from_fn(2, 2, |i, j| {
        if i != j {
            ONE
        } else {
            ZERO
        }
    }))
}

pub fn sigma_y() -> HermitianOperator {
    HermitianOperator(ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    }))
}

pub fn sigma_z() -> HermitianOperator {
    HermitianOperator(ComplexMatrix::from_diagonal(&[1.0, -1.0]))
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Real eigenvalues, descending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: UnitaryOperator,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `V · diag(λ) · V†`
    pub fn recompose(&self) -> ComplexMatrix {
        let v = self.vectors.matrix();
        let n = v.rows;
        let mut scaled = v.clone();
        for i in 0..n {
            for j in 0..n {
                scaled[(i, j)] *= self.values[j];
            }
        }
        &scaled * &v.adjoint()
    }
}

/// Cyclic complex Jacobi eigensolver.
///
/// Each rotation first removes the phase of the pivot `a_pq`, then applies
/// the real symmetric Jacobi rotation to the resulting real 2x2 block.
/// Eigenvalues come back descending; each eigenvector's first component of
/// magnitude above `1e-12` is made real and positive. Degenerate eigenspaces
/// get an arbitrary orthonormal basis.
pub fn hermitian_eig(h: &HermitianOperator) -> EigenDecomposition {
    let n = h.dim();
    let mut a = h.matrix().hermitian_part();
    let mut v = ComplexMatrix::identity(n);

    let scale = a
        .as_slice()
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if off == 0.0 || off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let cp = phase.conj();

                // A <- A G, V <- V G with G = [[c, s], [-s e^{-iφ}, c e^{-iφ}]] on (p, q)
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * c - akq * cp * s;
                    a[(k, q)] = akp * s + akq * cp * c;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * c - vkq * cp * s;
                    v[(k, q)] = vkp * s + vkq * cp * c;
                }
                // A <- G† A
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = apk * c - aqk * phase * s;
                    a[(q, k)] = apk * s + aqk * phase * c;
                }
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = C64::from(a[(p, p)].re);
                a[(q, q)] = C64::from(a[(q, q)].re);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(y, y)].re.total_cmp(&a[(x, x)].re));
    let values: Vec<f64> = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut vec = v.column(k);
        if let Some(lead) = vec.iter().find(|z| z.norm() > 1e-12).copied() {
            let fix = lead.conj() / lead.norm();
            vec.iter_mut().for_each(|z| *z *= fix);
        }
        for (i, z) in vec.into_iter().enumerate() {
            vectors[(i, col)] = z;
        }
    }
    EigenDecomposition {
        values,
        vectors: UnitaryOperator(vectors),
    }
}

/// Completes `d` orthonormal columns in `D` dimensions to a `D x D` unitary
/// by modified Gram-Schmidt over the canonical basis, with a second
/// orthogonalization pass per candidate. The input columns are copied
/// unchanged into the first `d` columns of the result.
pub fn extend_to_unitary(m: &ComplexMatrix) -> Result<UnitaryOperator> {
    let (big, d) = (m.rows, m.cols);
    if d > big {
        return Err(Error::Dimension(format!(
            "cannot extend {d} columns in {big} dimensions"
        )));
    }
    let deviation = m.isometry_deviation();
    if deviation > EPS_UNIT {
        return Err(Error::Orthonormality { deviation });
    }

    let mut columns: Vec<Vec<C64>> = (0..d).map(|j| m.column(j)).collect();
    for k in 0..big {
        if columns.len() == big {
            break;
        }
        let mut cand = vec![ZERO; big];
        cand[k] = ONE;
        for _pass in 0..2 {
            for col in &columns {
                let overlap = inner(col, &cand);
                for (c, u) in cand.iter_mut().zip(col) {
                    *c -= overlap * u;
                }
            }
        }
        let n = norm(&cand);
        if n < GS_SKIP {
            continue;
        }
        cand.iter_mut().for_each(|z| *z /= n);
        columns.push(cand);
    }
    UnitaryOperator::new(ComplexMatrix::from_columns(&columns)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_hermitian, random_isometry};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_identities() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let zz = kron(sigma_z().matrix(), sigma_z().matrix());
        assert_eq!(zz, ComplexMatrix::from_diagonal(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_sigma_x_sigma_y_matches_entrywise_definition() {
        let (x, y) = (sigma_x().into_matrix(), sigma_y().into_matrix());
        let k = kron(&x, &y);
        // oracle: literal block definition, 16 entries
        for i in 0..2 {
            for j in 0..2 {
                for p in 0..2 {
                    for q in 0..2 {
                        assert_eq!(k[(2 * i + p, 2 * j + q)], x[(i, j)] * y[(p, q)]);
                    }
                }
            }
        }
        let expected = ComplexMatrix::new(
            4,
            4,
            vec![
                ZERO, ZERO, ZERO, -I, //
                ZERO, ZERO, I, ZERO, //
                ZERO, -I, ZERO, ZERO, //
                I, ZERO, ZERO, ZERO,
            ],
        )
        .unwrap();
        assert_eq!(k, expected);
    }

    #[test]
    fn matrix_construction_rejects_bad_input() {
        assert!(ComplexMatrix::new(2, 2, vec![ONE; 3]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexMatrix::new(0, 1, vec![]).is_err());
    }

    #[test]
    fn partial_trace_of_singlet_is_maximally_mixed() {
        let s = 1.0 / 2f64.sqrt();
        let singlet = PureState::from_real(&[0.0, s, -s, 0.0]).unwrap();
        let reduced = partial_trace(&singlet.projector(), &[2, 2], &[0]).unwrap();
        assert!(reduced.max_abs_diff(&ComplexMatrix::from_diagonal(&[0.5, 0.5])) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product_keeps_factor() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(2, &mut rng);
        let ab = kron(a.matrix(), b.matrix());
        let keep_a = partial_trace(&ab, &[3, 2], &[0]).unwrap();
        assert!(keep_a.max_abs_diff(&a.matrix().scale(b.matrix().trace())) < 1e-12);
        let keep_b = partial_trace(&ab, &[3, 2], &[1]).unwrap();
        assert!(keep_b.max_abs_diff(&b.matrix().scale(a.matrix().trace())) < 1e-12);
    }

    #[test]
    fn partial_trace_dimension_errors() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[2]),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            partial_trace(&m, &[2, 2], &[0, 0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn partial_trace_keeps_multiple_factors_in_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, b, cc) = (
            random_hermitian(2, &mut rng),
            random_hermitian(3, &mut rng),
            random_hermitian(2, &mut rng),
        );
        let abc = kron(&kron(a.matrix(), b.matrix()), cc.matrix());
        let kept = partial_trace(&abc, &[2, 3, 2], &[2, 0]).unwrap();
        let expected = kron(a.matrix(), cc.matrix()).scale(b.matrix().trace());
        assert!(kept.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn eig_of_sigma_z_and_sigma_x() {
        let ez = hermitian_eig(&sigma_z());
        assert_eq!(ez.values, vec![1.0, -1.0]);
        assert!(
            ez.vectors
                .matrix()
                .max_abs_diff(&ComplexMatrix::identity(2))
                < 1e-15
        );

        let ex = hermitian_eig(&sigma_x());
        assert!((ex.values[0] - 1.0).abs() < 1e-15 && (ex.values[1] + 1.0).abs() < 1e-15);
        let s = 1.0 / 2f64.sqrt();
        // |↑x⟩ = (|↑z⟩ + |↓z⟩)/√2, |↓x⟩ = (|↑z⟩ - |↓z⟩)/√2
        let up = ex.vector(0);
        let down = ex.vector(1);
        assert!((up[0] - c(s, 0.0)).norm() < 1e-15 && (up[1] - c(s, 0.0)).norm() < 1e-15);
        assert!((down[0] - c(s, 0.0)).norm() < 1e-15 && (down[1] - c(-s, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eig_residual_on_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let h = random_hermitian(n, &mut rng);
            let e = hermitian_eig(&h);
            assert!(e.recompose().max_abs_diff(h.matrix()) < 1e-10, "n = {n}");
            assert!(e.vectors.matrix().isometry_deviation() < 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eig_handles_degenerate_spectrum() {
        let h = HermitianOperator::new(ComplexMatrix::identity(3).scale(c(0.25, 0.0))).unwrap();
        let e = hermitian_eig(&h);
        assert_eq!(e.values, vec![0.25; 3]);
        assert!(e.recompose().max_abs_diff(h.matrix()) < 1e-15);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(m.eigh(), Err(Error::Hermiticity { .. })));
    }

    #[test]
    fn extend_full_unitary_is_unchanged() {
        let s = 1.0 / 2f64.sqrt();
        let h = ComplexMatrix::from_real_rows(&[&[s, s], &[s, -s]]).unwrap();
        let u = extend_to_unitary(&h).unwrap();
        assert_eq!(u.matrix(), &h);
    }

    #[test]
    fn extend_single_canonical_column() {
        let col = ComplexMatrix::from_columns(&[vec![ONE, ZERO, ZERO]]).unwrap();
        let u = extend_to_unitary(&col).unwrap();
        assert!(u.matrix().isometry_deviation() < 1e-10);
        assert_eq!(u.column(0), vec![ONE, ZERO, ZERO]);
    }

    #[test]
    fn extend_random_two_columns_in_five() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_isometry(5, 2, &mut rng);
        let u = extend_to_unitary(&m).unwrap();
        for j in 0..2 {
            assert_eq!(u.column(j), m.column(j));
        }
        assert!(u.matrix().isometry_deviation() < 1e-10);
        for j in 2..5 {
            for k in 0..2 {
                assert!(inner(&m.column(k), &u.column(j)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn extend_rejects_non_orthonormal_columns() {
        let m =
            ComplexMatrix::from_columns(&[vec![ONE, ZERO, ZERO], vec![ONE, ONE, ZERO]]).unwrap();
        assert!(matches!(
            extend_to_unitary(&m),
            Err(Error::Orthonormality { .. })
        ));
    }

    #[test]
    fn state_validation() {
        assert!(matches!(
            PureState::from_real(&[1.0, 1.0]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(PureState::normalized(vec![ZERO, ZERO]).is_err());
        let s = PureState::normalized(vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((norm(s.amplitudes()) - 1.0).abs() < 1e-15);
    }
}
