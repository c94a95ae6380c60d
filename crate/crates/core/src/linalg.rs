//! Dense complex square matrices and the Hermitian kernels built on them.
//!
//! Everything here is sized for qubits and qutrits (dimensions up to a few
//! dozen), so storage is a flat row-major `Vec` and the eigensolver is a
//! cyclic complex Jacobi iteration.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Negative eigenvalues down to this value are treated as round-off and
/// clipped to zero before square roots and logarithms.
pub const PSD_TOL: f64 = 1e-9;

/// Tolerance used when an operation requires Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-12;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Which factor of a bipartite space to keep in [`partial_trace`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    A,
    B,
}

#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct Matrix {
    dim: usize,
    data: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<MatrixRepr> for Matrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        let data = repr.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        Matrix::from_entries(repr.dim, data)
    }
}

impl From<Matrix> for MatrixRepr {
    fn from(m: Matrix) -> Self {
        MatrixRepr {
            dim: m.dim,
            entries: m.data.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting non-square lengths
    /// and non-finite values.
    pub fn from_entries(dim: usize, data: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != dim * dim {
            return Err(Error::NonSquare { dim, len: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { dim, data })
    }

    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Matrix::from_entries(dim, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix::from_fn(dim, |_, _| ZERO)
    }

    pub fn identity(dim: usize) -> Self {
        Matrix::from_fn(dim, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[f64]) -> Self {
        Matrix::from_fn(values.len(), |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Rank-one operator |v⟩⟨v|.
    pub fn outer(v: &[C64]) -> Self {
        Matrix::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn pauli_x() -> Self {
        Matrix { dim: 2, data: vec![ZERO, ONE, ONE, ZERO] }
    }

    pub fn pauli_y() -> Self {
        Matrix { dim: 2, data: vec![ZERO, -I, I, ZERO] }
    }

    pub fn pauli_z() -> Self {
        Matrix { dim: 2, data: vec![ONE, ZERO, ZERO, -ONE] }
    }

    /// n⃗·σ⃗ for a Bloch vector `n`.
    pub fn bloch_observable(n: [f64; 3]) -> Self {
        Matrix::pauli_x().scale_real(n[0]) + Matrix::pauli_y().scale_real(n[1])
            + Matrix::pauli_z().scale_real(n[2])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Matrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        Matrix { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Matrix { dim: self.dim, data: self.data.iter().map(|z| z * c).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on different dimensions");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Re Tr(self · other), the Born-rule pairing for Hermitian operands.
    pub fn trace_product(&self, other: &Matrix) -> C64 {
        assert_eq!(self.dim, other.dim, "trace_product on different dimensions");
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    pub fn hermitian_part(&self) -> Self {
        Matrix::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let es = jacobi(&self.hermitian_part());
        es.values[0]
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol.max(HERMITIAN_TOL)) && self.min_eigenvalue() >= -tol
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.max_abs_diff(&Matrix::identity(self.dim)) <= tol
    }

    pub fn kron(&self, other: &Matrix) -> Self {
        tensor_product(self, other)
    }

    fn require_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            Err(Error::NotHermitian { deviation })
        } else {
            Ok(())
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "adding matrices of different dimensions");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for Matrix {
    type Output = Matrix;

    fn add(self, rhs: Matrix) -> Matrix {
        &self + &rhs
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "subtracting matrices of different dimensions");
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for Matrix {
    type Output = Matrix;

    fn sub(self, rhs: Matrix) -> Matrix {
        &self - &rhs
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "multiplying matrices of different dimensions");
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Matrix { dim: n, data }
    }
}

impl Mul for Matrix {
    type Output = Matrix;

    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

/// Kronecker product: entry `(i·b.dim + k, j·b.dim + l)` is `a[i,j]·b[k,l]`.
pub fn tensor_product(a: &Matrix, b: &Matrix) -> Matrix {
    let (na, nb) = (a.dim, b.dim);
    Matrix::from_fn(na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
}

/// Traces out one factor of a `d_a·d_b` dimensional operator.
pub fn partial_trace(m: &Matrix, d_a: usize, d_b: usize, keep: Subsystem) -> Result<Matrix> {
    if d_a == 0 || d_b == 0 || m.dim != d_a * d_b {
        return Err(Error::DimensionMismatch { expected: d_a * d_b, found: m.dim });
    }
    let out = match keep {
        Subsystem::A => Matrix::from_fn(d_a, |i, j| {
            (0..d_b).map(|k| m[(i * d_b + k, j * d_b + k)]).sum()
        }),
        Subsystem::B => Matrix::from_fn(d_b, |k, l| {
            (0..d_a).map(|i| m[(i * d_b + k, i * d_b + l)]).sum()
        }),
    };
    Ok(out)
}

/// Eigenvalues in ascending order with the matching orthonormal
/// eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

impl Eigensystem {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        (0..self.vectors.dim).map(|i| self.vectors[(i, k)]).collect()
    }

    /// V diag(f(λ)) V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.vectors.dim;
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        Matrix::from_fn(n, |i, j| {
            let mut acc = ZERO;
            for (k, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    acc += self.vectors[(i, k)] * self.vectors[(j, k)].conj() * w;
                }
            }
            acc
        })
    }
}

pub fn hermitian_eigensystem(m: &Matrix) -> Result<Eigensystem> {
    m.require_hermitian()?;
    Ok(jacobi(&m.hermitian_part()))
}

/// Cyclic Jacobi on an exactly Hermitian input.
fn jacobi(m: &Matrix) -> Eigensystem {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = Matrix::identity(n).data;
    let tol = JACOBI_OFF_TOL * m.frobenius_norm().max(1.0);

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = apq / mag;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]] restricted to (p, q).
                let jpp = C64::new(c, 0.0);
                let jpq = C64::new(s, 0.0);
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;

                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = akp * jpp + akq * jqp;
                    a[k * n + q] = akp * jpq + akq * jqq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = jpp.conj() * apk + jqp.conj() * aqk;
                    a[q * n + k] = jpq.conj() * apk + jqq.conj() * aqk;
                }
                a[p * n + p] = C64::new(app - t * mag, 0.0);
                a[q * n + q] = C64::new(aqq + t * mag, 0.0);
                a[p * n + q] = ZERO;
                a[q * n + p] = ZERO;

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * jpp + vkq * jqp;
                    v[k * n + q] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }

    let raw: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // stable: ties keep the first-encountered eigenvector
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));

    let values = order.iter().map(|&k| raw[k]).collect();
    let vectors = Matrix::from_fn(n, |i, col| v[i * n + order[col]]);
    Eigensystem { values, vectors }
}

/// Eigenvalues this close to zero relative to the spectral radius are
/// indistinguishable from round-off.
fn noise_floor(values: &[f64]) -> f64 {
    let scale = values.iter().fold(0.0_f64, |acc, &l| acc.max(l.abs()));
    8.0 * values.len() as f64 * f64::EPSILON * scale
}

pub fn psd_sqrt(m: &Matrix) -> Result<Matrix> {
    let es = hermitian_eigensystem(m)?;
    let min = es.values[0];
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    let floor = noise_floor(&es.values);
    Ok(es.reconstruct_with(|l| if l <= floor { 0.0 } else { l.sqrt() }))
}

/// Sum of singular values, from the spectrum of A†A.
pub fn trace_norm(m: &Matrix) -> f64 {
    let gram = &m.adjoint() * m;
    let es = jacobi(&gram.hermitian_part());
    let floor = noise_floor(&es.values);
    es.values.iter().filter(|&&l| l > floor).map(|l| l.sqrt()).sum()
}

/// Nearest PSD matrix in Frobenius distance.
pub fn project_psd(m: &Matrix) -> Result<Matrix> {
    let es = hermitian_eigensystem(m)?;
    Ok(es.reconstruct_with(|l| l.max(0.0)))
}

/// Same as [`project_psd`] for inputs already known to be Hermitian up to
/// round-off; used in the inner loop of the feasibility solver.
pub(crate) fn project_psd_unchecked(m: &Matrix) -> (Matrix, f64) {
    let es = jacobi(&m.hermitian_part());
    let min = es.values[0];
    (es.reconstruct_with(|l| l.max(0.0)), min)
}

pub(crate) fn min_eigenvalue_unchecked(m: &Matrix) -> f64 {
    jacobi(&m.hermitian_part()).values[0]
}
