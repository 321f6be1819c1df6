//! Dense complex matrices and the scalar extractions the rest of the crate
//! consumes: traces of powers and determinants.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for the hermiticity and tracelessness checks.
pub const HERMITIAN_TRACELESS_TOL: f64 = 1e-12;

/// A dense, square, row-major complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds an `n × n` matrix from row-major entries.
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("matrix dimension must be at least 1"));
        }
        if data.len() != n * n {
            return Err(Error::invalid(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid(format!(
                "entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        assert!(n >= 1, "matrix dimension must be at least 1");
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self { n, data }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, |i, j| if i == j { diag[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diagonal(&d)
    }

    /// Builds a matrix from real row vectors; panics on ragged input.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square matrix");
        Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Largest entry modulus.
    pub fn max_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum; an upper bound on the spectral radius.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, s: Complex64, other: &ComplexMatrix) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn add_identity_scaled(&mut self, s: Complex64) {
        for i in 0..self.n {
            self[(i, i)] += s;
        }
    }

    /// Max-norm distance between two matrices of equal dimension.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Whether `‖M − M†‖_max ≤ rel_tol · ‖M‖_max`.
    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_norm()
    }

    fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `[I, M, M², …, M^kmax]`, accumulated one multiplication per power.
    pub fn power_ladder(&self, kmax: usize) -> Vec<ComplexMatrix> {
        let mut ladder = Vec::with_capacity(kmax + 1);
        ladder.push(Self::identity(self.n));
        if kmax >= 1 {
            ladder.push(self.clone());
        }
        for k in 2..=kmax {
            let next = &ladder[k - 1] * self;
            ladder.push(next);
        }
        ladder
    }

    /// `[tr(M), tr(M²), …, tr(M^pmax)]`.
    pub fn trace_powers(&self, pmax: usize) -> Result<Vec<Complex64>> {
        if pmax == 0 {
            return Err(Error::invalid("trace_powers needs pmax >= 1"));
        }
        let mut out = Vec::with_capacity(pmax);
        let mut power = self.clone();
        out.push(power.trace());
        for _ in 2..=pmax {
            power = &power * self;
            out.push(power.trace());
        }
        Ok(out)
    }

    /// Determinant by LU decomposition with partial pivoting.
    pub fn determinant(&self) -> Complex64 {
        lu_determinant(self.n, self.data.clone())
    }

    pub fn to_json(&self) -> MatrixJson {
        let rows = |f: fn(&Complex64) -> f64| -> Vec<Vec<f64>> {
            (0..self.n).map(|i| self.row(i).iter().map(f).collect()).collect()
        };
        MatrixJson {
            n: self.n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn from_json(json: &MatrixJson) -> Result<Self> {
        let n = json.n;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&json.re) || !shape_ok(&json.im) {
            return Err(Error::invalid(format!(
                "\"re\" and \"im\" must both be {n}x{n} nested arrays"
            )));
        }
        let data = (0..n * n)
            .map(|k| Complex64::new(json.re[k / n][k % n], json.im[k / n][k % n]))
            .collect();
        Self::new(n, data)
    }
}

/// Determinant of a row-major `n × n` matrix, consuming the buffer.
pub(crate) fn lu_determinant(n: usize, mut a: Vec<Complex64>) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
            .unwrap();
        if a[pivot * n + col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                a.swap(pivot * n + j, col * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in col + 1..n {
                let u = a[col * n + j];
                a[row * n + j] -= factor * u;
            }
        }
    }
    det
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let rhs_row = &rhs.data[k * n..(k + 1) * n];
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = self
                .row(i)
                .iter()
                .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Wire form of a matrix: `{"n": int, "re": [[...]], "im": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// A traceless hermitian matrix, the generator of an SU(N) element.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTraceless {
    inner: ComplexMatrix,
}

impl HermitianTraceless {
    /// Accepts `m` when `‖m − m†‖_max ≤ 1e-12·‖m‖_max` and
    /// `|tr m| ≤ 1e-12·‖m‖_max·n`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let scale = m.max_norm();
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TRACELESS_TOL * scale {
            return Err(Error::invalid(format!(
                "matrix is not hermitian: ‖M − M†‖_max = {defect:e}"
            )));
        }
        let tr = m.trace().norm();
        if tr > HERMITIAN_TRACELESS_TOL * scale * m.n() as f64 {
            return Err(Error::invalid(format!("matrix is not traceless: |tr M| = {tr:e}")));
        }
        Ok(Self { inner: m })
    }

    /// Removes the trace of a hermitian matrix, `H − (tr H / n)·I`.
    pub fn project(m: &ComplexMatrix) -> Result<Self> {
        let scale = m.max_norm();
        if m.hermiticity_defect() > HERMITIAN_TRACELESS_TOL * scale {
            return Err(Error::invalid("matrix is not hermitian"));
        }
        let n = m.n();
        let shift = m.trace().re / n as f64;
        // Symmetrize exactly so the stored matrix is hermitian to the bit.
        let inner = ComplexMatrix::from_fn(n, |i, j| {
            if i == j {
                Complex64::new(m[(i, i)].re - shift, 0.0)
            } else {
                (m[(i, j)] + m[(j, i)].conj()) * 0.5
            }
        });
        Ok(Self { inner })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_inner(self) -> ComplexMatrix {
        self.inner
    }

    pub fn n(&self) -> usize {
        self.inner.n()
    }
}
