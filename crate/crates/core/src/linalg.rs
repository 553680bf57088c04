//! Small dense linear algebra: complex rectangular matrices, Hermitian
//! eigenvalues, real Pfaffians and complex determinants.

use std::ops::{Add, Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Row-major entries; errors if the count does not match.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
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

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        Ok(out)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert!(
            self.rows == rhs.rows && self.cols == rhs.cols,
            "dimension mismatch in matrix sum"
        );
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("dimension mismatch in matrix product")
    }
}

/// Real antisymmetric matrix; only the strict upper triangle is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymmetricMatrix {
    dim: usize,
    upper: Vec<f64>,
}

impl AntisymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            upper: vec![0.0; dim * dim.saturating_sub(1) / 2],
        }
    }

    /// `f(j, k)` is queried for `j < k` only.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            for k in j + 1..dim {
                m.set(j, k, f(j, k));
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn slot(&self, j: usize, k: usize) -> usize {
        debug_assert!(j < k && k < self.dim);
        // rows 0..j contribute (dim-1) + (dim-2) + ... + (dim-j) entries
        j * (2 * self.dim - j - 1) / 2 + (k - j - 1)
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        use std::cmp::Ordering::*;
        match j.cmp(&k) {
            Equal => 0.0,
            Less => self.upper[self.slot(j, k)],
            Greater => -self.upper[self.slot(k, j)],
        }
    }

    /// Sets `B[j][k] = v` and `B[k][j] = −v`; `j == k` is ignored.
    pub fn set(&mut self, j: usize, k: usize, v: f64) {
        use std::cmp::Ordering::*;
        match j.cmp(&k) {
            Equal => {}
            Less => {
                let s = self.slot(j, k);
                self.upper[s] = v;
            }
            Greater => {
                let s = self.slot(k, j);
                self.upper[s] = -v;
            }
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|k| self.get(j, k)).collect())
            .collect()
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, self.dim, |j, k| Complex64::new(self.get(j, k), 0.0))
    }
}

/// `W = H†H` when `nr ≥ nt`, else `HH†`; `N × N` with `N = min(nr, nt)`.
pub fn gram(h: &ComplexMatrix, nr: usize, nt: usize) -> Result<ComplexMatrix> {
    if h.rows() != nr || h.cols() != nt {
        return Err(Error::dimension(format!(
            "channel matrix is {}x{}, expected {nr}x{nt}",
            h.rows(),
            h.cols()
        )));
    }
    let n = nr.min(nt);
    let mut w = ComplexMatrix::zeros(n, n);
    // Fill the upper triangle and mirror it so W is exactly Hermitian.
    for j in 0..n {
        for k in j..n {
            let mut acc = Complex64::new(0.0, 0.0);
            if nr >= nt {
                for r in 0..nr {
                    acc += h[(r, j)].conj() * h[(r, k)];
                }
            } else {
                for c in 0..nt {
                    acc += h[(j, c)] * h[(k, c)].conj();
                }
            }
            if j == k {
                acc.im = 0.0;
            }
            w[(j, k)] = acc;
            w[(k, j)] = acc.conj();
        }
    }
    Ok(w)
}

const HERMITIAN_TOL: f64 = 1e-12;
const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues of a Hermitian matrix.
///
/// The `N × N` Hermitian `W` is embedded as the real symmetric
/// `[[Re W, −Im W], [Im W, Re W]]`, whose spectrum is that of `W` with every
/// eigenvalue doubled; cyclic Jacobi diagonalizes it and every second sorted
/// value is kept.
pub fn hermitian_eigenvalues(w: &ComplexMatrix) -> Result<Vec<f64>> {
    if !w.is_square() {
        return Err(Error::dimension("eigenvalues need a square matrix"));
    }
    let n = w.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let norm = w.frobenius_norm();
    let mut worst = 0.0f64;
    for j in 0..n {
        for k in j..n {
            worst = worst.max((w[(j, k)] - w[(k, j)].conj()).norm());
        }
    }
    if worst > HERMITIAN_TOL * norm.max(1.0) {
        return Err(Error::domain(format!(
            "matrix is not Hermitian (max |W - W^H| = {worst:e})"
        )));
    }
    let m = 2 * n;
    let mut a = vec![0.0; m * m];
    for j in 0..n {
        for k in 0..n {
            let z = 0.5 * (w[(j, k)] + w[(k, j)].conj());
            a[j * m + k] = z.re;
            a[(j + n) * m + (k + n)] = z.re;
            a[j * m + (k + n)] = -z.im;
            a[(j + n) * m + k] = z.im;
        }
    }
    jacobi_symmetric(&mut a, m, JACOBI_TOL * norm.max(f64::MIN_POSITIVE))?;
    let mut diag: Vec<f64> = (0..m).map(|i| a[i * m + i]).collect();
    diag.sort_by(|x, y| x.total_cmp(y));
    Ok(diag.into_iter().skip(1).step_by(2).collect())
}

fn off_diagonal_norm(a: &[f64], m: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..m {
        for q in 0..m {
            if p != q {
                s += a[p * m + q] * a[p * m + q];
            }
        }
    }
    s.sqrt()
}

// Cyclic Jacobi on a dense row-major symmetric matrix, in place.
fn jacobi_symmetric(a: &mut [f64], m: usize, tol: f64) -> Result<()> {
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(a, m) <= tol {
            return Ok(());
        }
        for p in 0..m {
            for q in p + 1..m {
                let apq = a[p * m + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * m + p];
                let aqq = a[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
                a[p * m + q] = 0.0;
                a[q * m + p] = 0.0;
            }
        }
    }
    if off_diagonal_norm(a, m) <= tol {
        Ok(())
    } else {
        Err(Error::Numerical("Jacobi iteration did not converge".into()))
    }
}

/// Pfaffian of a real antisymmetric matrix of even dimension.
pub fn pfaffian(b: &AntisymmetricMatrix) -> Result<f64> {
    let n = b.dim();
    if n % 2 == 1 {
        return Err(Error::dimension(format!("Pfaffian of odd dimension {n}")));
    }
    match n {
        0 => return Ok(1.0),
        2 => return Ok(b.get(0, 1)),
        4 => return Ok(b.get(0, 1) * b.get(2, 3) - b.get(0, 2) * b.get(1, 3) + b.get(0, 3) * b.get(1, 2)),
        _ => {}
    }
    // Parlett–Reid skew elimination with largest-magnitude pivoting.
    let mut a = b.to_dense();
    let mut pf = 1.0;
    for k in (0..n - 1).step_by(2) {
        let kp = (k + 1..n)
            .max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))
            .expect("nonempty pivot range");
        if kp != k + 1 {
            a.swap(k + 1, kp);
            for row in a.iter_mut() {
                row.swap(k + 1, kp);
            }
            pf = -pf;
        }
        if a[k + 1][k] == 0.0 {
            return Ok(0.0);
        }
        let pivot = a[k][k + 1];
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[k][j] / pivot).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[i][k + 1]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[i][j] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
    }
    Ok(pf)
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(m: &ComplexMatrix) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::dimension("determinant of a non-square matrix"));
    }
    let n = m.rows();
    let mut a: Vec<Vec<Complex64>> = (0..n).map(|r| (0..n).map(|c| m[(r, c)]).collect()).collect();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| a[i][k].norm().total_cmp(&a[j][k].norm()))
            .expect("nonempty pivot range");
        if a[p][k].norm() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k];
        det *= pivot;
        for i in k + 1..n {
            let factor = a[i][k] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (top, rest) = a.split_at_mut(i);
            for (dst, v) in rest[0][k + 1..].iter_mut().zip(&top[k][k + 1..]) {
                *dst -= factor * v;
            }
        }
    }
    Ok(det)
}

/// Determinant of a real square matrix given as rows.
pub fn real_determinant(rows: &[Vec<f64>]) -> Result<f64> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::dimension("determinant of a non-square matrix"));
    }
    let m = ComplexMatrix::from_fn(n, n, |r, c| Complex64::new(rows[r][c], 0.0));
    Ok(determinant(&m)?.re)
}
