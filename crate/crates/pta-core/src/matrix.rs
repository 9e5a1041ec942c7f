//! Dense small-matrix linear algebra: induced p-norms, logarithmic norms,
//! eigenvalues, and the eigenvalue-shift test utility used by the analysis
//! layer.
//!
//! Everything here targets small matrices (n ≤ 16, the artifact never needs
//! more); the eigensolvers are a cyclic Jacobi iteration for symmetric input
//! and a balanced Hessenberg + Francis double-shift QR sweep for the general
//! real case.

use num_complex::Complex64;
use thiserror::Error;

/// Largest matrix dimension the eigensolvers accept.
pub const MAX_EIG_DIM: usize = 16;

/// Errors raised by matrix construction and the operations in this module.
#[derive(Debug, Clone, Error)]
pub enum MatrixError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("entry count {len} does not match {rows}x{cols}")]
    BadLength { len: usize, rows: usize, cols: usize },
    #[error("matrix dimensions must be positive")]
    Empty,
    #[error("matrix must be symmetric within {tol:.1e} (max asymmetry {found:.3e})")]
    NotSymmetric { tol: f64, found: f64 },
    #[error("dimension {0} exceeds the supported maximum {MAX_EIG_DIM}")]
    TooLarge(usize),
    #[error("eigenvalue iteration exhausted its budget of {budget} sweeps")]
    Convergence {
        budget: usize,
        /// Best available eigenvalue estimates when the budget ran out.
        best: Vec<Complex64>,
    },
}

/// Dense real matrix in row-major order. Construction rejects NaN/±∞ entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    /// Build from row-major entries; every entry must be finite.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::Empty);
        }
        if data.len() != rows * cols {
            return Err(MatrixError::BadLength { len: data.len(), rows, cols });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows: rows.max(1), cols: cols.max(1), data: vec![0.0; rows.max(1) * cols.max(1)] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Result<Self, MatrixError> {
        let n = entries.len();
        let mut m = Self::new(n, n, vec![0.0; n * n])?;
        for (i, &v) in entries.iter().enumerate() {
            if !v.is_finite() {
                return Err(MatrixError::NonFinite);
            }
            m.set(i, i, v);
        }
        Ok(m)
    }

    /// Convenience constructor from nested rows (mostly for tests and the
    /// built-in systems).
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, MatrixError> {
        if rows.is_empty() {
            return Err(MatrixError::Empty);
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(MatrixError::Dimension("ragged rows".into()));
        }
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(rows.len(), cols, data)
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self, MatrixError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self::new(rows, cols, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise sum; panics on shape mismatch (programmer error).
    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub shape mismatch");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Mat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: f64) -> Mat {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| c * v).collect() }
    }

    /// Matrix product; panics on inner-dimension mismatch.
    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += aik * other.get(k, j);
                }
            }
        }
        out
    }

    /// Matrix–vector product; panics on length mismatch.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "mul_vec shape mismatch");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest |A_ij − A_ji|.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        if self.is_square() {
            for i in 0..self.rows {
                for j in (i + 1)..self.cols {
                    worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
                }
            }
        }
        worst
    }

    fn require_square(&self) -> Result<(), MatrixError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(MatrixError::NotSquare { rows: self.rows, cols: self.cols })
        }
    }
}

/// The p in ‖·‖_p and μ_p: 1, 2 or ∞.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PNorm {
    One,
    Two,
    Inf,
}

impl std::fmt::Display for PNorm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PNorm::One => write!(f, "1"),
            PNorm::Two => write!(f, "2"),
            PNorm::Inf => write!(f, "inf"),
        }
    }
}

/// Vector p-norm of a state vector.
pub fn vector_norm(x: &[f64], p: PNorm) -> f64 {
    match p {
        PNorm::One => x.iter().map(|v| v.abs()).sum(),
        PNorm::Two => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
        PNorm::Inf => x.iter().fold(0.0, |m, v| m.max(v.abs())),
    }
}

/// Euclidean norm, the default ‖·‖ of the analysis layer.
#[inline]
pub fn vector_norm2(x: &[f64]) -> f64 {
    vector_norm(x, PNorm::Two)
}

/// Induced matrix p-norm of a square matrix.
///
/// p = 1 is the max column absolute sum, p = ∞ the max row absolute sum, and
/// p = 2 the spectral norm sqrt(λ_max(AᵀA)).
pub fn induced_norm(a: &Mat, p: PNorm) -> Result<f64, MatrixError> {
    a.require_square()?;
    let n = a.rows();
    Ok(match p {
        PNorm::One => (0..n)
            .map(|j| (0..n).map(|i| a.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max),
        PNorm::Inf => (0..n)
            .map(|i| (0..n).map(|j| a.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max),
        PNorm::Two => {
            let ata = a.transpose().matmul(a);
            let evs = sym_eigvals_unchecked(&symmetrize(&ata));
            evs.last().copied().unwrap_or(0.0).max(0.0).sqrt()
        }
    })
}

/// Logarithmic norm μ_p(A) = lim_{h→0⁺} (‖I + hA‖_p − 1)/h, by closed form:
///
/// ```text
/// μ₁(A)  = max_j ( A_jj + Σ_{i≠j} |A_ij| )
/// μ_∞(A) = max_i ( A_ii + Σ_{j≠i} |A_ij| )
/// μ₂(A)  = λ_max( (A + Aᵀ)/2 )
/// ```
///
/// Unlike the induced norm it can be negative, which is what makes it useful
/// for decay envelopes:
///
/// ```
/// use pta_core::matrix::{log_norm, Mat, PNorm};
///
/// let a = Mat::from_rows(&[&[-2.0, 1.0], &[0.0, -5.0]]).unwrap();
/// assert_eq!(log_norm(&a, PNorm::Inf).unwrap(), -1.0);
/// ```
pub fn log_norm(a: &Mat, p: PNorm) -> Result<f64, MatrixError> {
    a.require_square()?;
    let n = a.rows();
    Ok(match p {
        PNorm::One => (0..n)
            .map(|j| {
                a.get(j, j)
                    + (0..n).filter(|&i| i != j).map(|i| a.get(i, j).abs()).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max),
        PNorm::Inf => (0..n)
            .map(|i| {
                a.get(i, i)
                    + (0..n).filter(|&j| j != i).map(|j| a.get(i, j).abs()).sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max),
        PNorm::Two => {
            let s = sym_part(a)?;
            let evs = sym_eigvals_unchecked(&s);
            *evs.last().expect("nonempty spectrum")
        }
    })
}

/// Symmetric part (A + Aᵀ)/2. The result is exactly symmetric.
pub fn sym_part(a: &Mat) -> Result<Mat, MatrixError> {
    a.require_square()?;
    let n = a.rows();
    let mut s = Mat::zeros(n, n);
    for i in 0..n {
        s.set(i, i, a.get(i, i));
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    Ok(s)
}

fn symmetrize(a: &Mat) -> Mat {
    sym_part(a).expect("square by construction")
}

/// Eigenvalues of a real square matrix, sorted by descending real part.
#[derive(Debug, Clone)]
pub struct EigSet {
    values: Vec<Complex64>,
    max_real: f64,
}

impl EigSet {
    fn from_values(mut values: Vec<Complex64>) -> Self {
        values.sort_by(|a, b| {
            b.re.partial_cmp(&a.re)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(b.im.partial_cmp(&a.im).unwrap_or(std::cmp::Ordering::Equal))
        });
        let max_real = values.first().map(|v| v.re).unwrap_or(f64::NEG_INFINITY);
        Self { values, max_real }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Largest real part over the spectrum.
    pub fn max_real(&self) -> f64 {
        self.max_real
    }

    pub fn min_real(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// All eigenvalues of a square real matrix with n ≤ 16.
///
/// Symmetric input goes through the Jacobi path; the general case is balanced,
/// reduced to upper Hessenberg form, and iterated with Francis double shifts.
/// The iteration budget is 100·n² sweeps; exhausting it yields
/// [`MatrixError::Convergence`] carrying the best available estimates.
pub fn eig(a: &Mat) -> Result<EigSet, MatrixError> {
    a.require_square()?;
    let n = a.rows();
    if n > MAX_EIG_DIM {
        return Err(MatrixError::TooLarge(n));
    }
    if n == 1 {
        return Ok(EigSet::from_values(vec![Complex64::new(a.get(0, 0), 0.0)]));
    }
    if a.max_asymmetry() == 0.0 {
        let evs = sym_eigvals_unchecked(a);
        return Ok(EigSet::from_values(
            evs.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        ));
    }
    if n == 2 {
        return Ok(EigSet::from_values(eig2(a.get(0, 0), a.get(0, 1), a.get(1, 0), a.get(1, 1)).to_vec()));
    }
    let mut h = a.clone();
    balance(&mut h);
    to_hessenberg(&mut h);
    let budget = 100 * n * n;
    let values = francis_qr(&mut h, budget)?;
    Ok(EigSet::from_values(values))
}

/// Eigenvalues of a symmetric matrix, ascending. Input must be symmetric
/// within `tol` (absolute, on |A_ij − A_ji|).
pub fn sym_eigvals(a: &Mat, tol: f64) -> Result<Vec<f64>, MatrixError> {
    a.require_square()?;
    let asym = a.max_asymmetry();
    if asym > tol {
        return Err(MatrixError::NotSymmetric { tol, found: asym });
    }
    Ok(sym_eigvals_unchecked(&symmetrize(a)))
}

/// Eigenvalue-shift test: under A + B ⪯ 0 (negative semidefinite sum) the
/// bound λ_min(A) + λ_max(B) ≤ 0 must hold; when the sum is not negative
/// semidefinite the implication is vacuous and the check returns true.
///
/// Both inputs must be symmetric within 1e-10. A false return means the
/// spectral bound failed on a negative-semidefinite sum, which would be a
/// genuine bug in the eigensolver.
pub fn weyl_check(a: &Mat, b: &Mat) -> Result<bool, MatrixError> {
    const SYM_TOL: f64 = 1e-10;
    a.require_square()?;
    b.require_square()?;
    if a.rows() != b.rows() {
        return Err(MatrixError::Dimension(format!(
            "weyl_check needs equal dimensions, got {} and {}",
            a.rows(),
            b.rows()
        )));
    }
    let evs_a = sym_eigvals(a, SYM_TOL)?;
    let evs_b = sym_eigvals(b, SYM_TOL)?;
    let sum = symmetrize(&a.add(b));
    let evs_sum = sym_eigvals_unchecked(&sum);
    let nsd_tol = 1e-10 * (1.0 + sum.max_abs());
    let nsd = evs_sum.last().copied().unwrap_or(0.0) <= nsd_tol;
    if !nsd {
        return Ok(true);
    }
    let bound_tol = 1e-10 * (1.0 + a.max_abs() + b.max_abs());
    let lhs = evs_a.first().copied().unwrap_or(0.0) + evs_b.last().copied().unwrap_or(0.0);
    Ok(lhs <= bound_tol)
}

// ---------------------------------------------------------------------------
// symmetric eigensolver: cyclic Jacobi
// ---------------------------------------------------------------------------

fn sym_eigvals_unchecked(a: &Mat) -> Vec<f64> {
    let n = a.rows();
    let mut m = a.clone();
    let frob = m.data.iter().map(|v| v * v).sum::<f64>().sqrt();
    if frob == 0.0 {
        return vec![0.0; n];
    }
    for _sweep in 0..64 {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m.get(p, q) * m.get(p, q))
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * frob {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                jacobi_rotate(&mut m, p, q);
            }
        }
    }
    let mut evs: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    evs
}

fn jacobi_rotate(m: &mut Mat, p: usize, q: usize) {
    let apq = m.get(p, q);
    if apq == 0.0 {
        return;
    }
    let app = m.get(p, p);
    let aqq = m.get(q, q);
    let theta = (aqq - app) / (2.0 * apq);
    // overflow-safe tangent of the rotation angle
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let n = m.rows();
    m.set(p, p, app - t * apq);
    m.set(q, q, aqq + t * apq);
    m.set(p, q, 0.0);
    m.set(q, p, 0.0);
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = m.get(r, p);
        let arq = m.get(r, q);
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        m.set(r, p, new_rp);
        m.set(p, r, new_rp);
        m.set(r, q, new_rq);
        m.set(q, r, new_rq);
    }
}

// ---------------------------------------------------------------------------
// general eigensolver: balance + Hessenberg + Francis double-shift QR
// ---------------------------------------------------------------------------

fn eig2(a: f64, b: f64, c: f64, d: f64) -> [Complex64; 2] {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr / 4.0 - det;
    if disc >= 0.0 {
        let r = disc.sqrt();
        // stable split: compute the larger-magnitude root first
        let sign = if tr >= 0.0 { 1.0 } else { -1.0 };
        let big = tr / 2.0 + sign * r;
        let small = if big != 0.0 { det / big } else { tr / 2.0 - sign * r };
        [Complex64::new(big, 0.0), Complex64::new(small, 0.0)]
    } else {
        let im = (-disc).sqrt();
        [Complex64::new(tr / 2.0, im), Complex64::new(tr / 2.0, -im)]
    }
}

/// Parlett–Reinsch balancing by powers of two (a diagonal similarity, so the
/// spectrum is untouched while row/column norms equalize).
fn balance(a: &mut Mat) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a.get(j, i).abs();
                    r += a.get(i, j).abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut f = 1.0;
                let mut cc = c;
                let s = c + r;
                let mut g = r / RADIX;
                while cc < g {
                    f *= RADIX;
                    cc *= sqrdx;
                }
                g = r * RADIX;
                while cc > g {
                    f /= RADIX;
                    cc /= sqrdx;
                }
                if (cc + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        let v = a.get(i, j) * ginv;
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, i) * f;
                        a.set(j, i, v);
                    }
                }
            }
        }
        if done {
            break;
        }
    }
}

/// Reduce to upper Hessenberg form by stabilized elementary similarity
/// transformations, then clear the workspace below the subdiagonal.
fn to_hessenberg(a: &mut Mat) {
    let n = a.rows();
    for m in 1..n.saturating_sub(1) {
        // pivot: largest entry in column m-1 at or below row m
        let mut x = 0.0f64;
        let mut piv = m;
        for j in m..n {
            if a.get(j, m - 1).abs() > x.abs() {
                x = a.get(j, m - 1);
                piv = j;
            }
        }
        if piv != m {
            for j in (m - 1)..n {
                let tmp = a.get(piv, j);
                a.set(piv, j, a.get(m, j));
                a.set(m, j, tmp);
            }
            for j in 0..n {
                let tmp = a.get(j, piv);
                a.set(j, piv, a.get(j, m));
                a.set(j, m, tmp);
            }
        }
        if x != 0.0 {
            for i in (m + 1)..n {
                let mut y = a.get(i, m - 1);
                if y != 0.0 {
                    y /= x;
                    a.set(i, m - 1, 0.0);
                    for j in m..n {
                        let v = a.get(i, j) - y * a.get(m, j);
                        a.set(i, j, v);
                    }
                    for j in 0..n {
                        let v = a.get(j, m) + y * a.get(j, i);
                        a.set(j, m, v);
                    }
                }
            }
        }
    }
    // entries below the first subdiagonal are dead storage for the QR sweep
    for i in 2..n {
        for j in 0..(i - 1) {
            a.set(i, j, 0.0);
        }
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix; eigenvalues only.
fn francis_qr(h: &mut Mat, budget: usize) -> Result<Vec<Complex64>, MatrixError> {
    let n = h.rows();
    let eps = f64::EPSILON;
    let mut roots: Vec<Complex64> = Vec::with_capacity(n);
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h.get(i, j).abs();
        }
    }
    if anorm == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n]);
    }
    let mut t_shift = 0.0;
    let mut nn = n as isize - 1;
    let mut total_sweeps = 0usize;
    while nn >= 0 {
        let mut its = 0;
        loop {
            // find a small subdiagonal element; l is the active block start
            let mut l = 0isize;
            let mut ll = nn;
            while ll >= 1 {
                let s = h.get((ll - 1) as usize, (ll - 1) as usize).abs()
                    + h.get(ll as usize, ll as usize).abs();
                let s = if s == 0.0 { anorm } else { s };
                if h.get(ll as usize, (ll - 1) as usize).abs() <= eps * s {
                    h.set(ll as usize, (ll - 1) as usize, 0.0);
                    l = ll;
                    break;
                }
                ll -= 1;
            }
            let x = h.get(nn as usize, nn as usize);
            if l == nn {
                roots.push(Complex64::new(x + t_shift, 0.0));
                nn -= 1;
                break;
            }
            let y = h.get((nn - 1) as usize, (nn - 1) as usize);
            let w = h.get(nn as usize, (nn - 1) as usize) * h.get((nn - 1) as usize, nn as usize);
            if l == nn - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                let x = x + t_shift;
                if q >= 0.0 {
                    let z = p + z.copysign(p);
                    let r1 = x + z;
                    let r2 = if z != 0.0 { x - w / z } else { x + z };
                    roots.push(Complex64::new(r1, 0.0));
                    roots.push(Complex64::new(r2, 0.0));
                } else {
                    roots.push(Complex64::new(x + p, z));
                    roots.push(Complex64::new(x + p, -z));
                }
                nn -= 2;
                break;
            }
            if its == 50 || total_sweeps >= budget {
                let mut best = roots.clone();
                for i in 0..=nn {
                    best.push(Complex64::new(h.get(i as usize, i as usize) + t_shift, 0.0));
                }
                return Err(MatrixError::Convergence { budget, best });
            }
            let (mut x, mut y, mut w) = (x, y, w);
            if its == 10 || its == 20 {
                // exceptional shift to break symmetry-induced cycling
                t_shift += x;
                for i in 0..=nn {
                    let v = h.get(i as usize, i as usize) - x;
                    h.set(i as usize, i as usize, v);
                }
                let s = h.get(nn as usize, (nn - 1) as usize).abs()
                    + h.get((nn - 1) as usize, (nn - 2) as usize).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            total_sweeps += 1;
            // look for two consecutive small subdiagonal elements
            let mut m = nn - 2;
            let (mut p, mut q, mut r) = (0.0, 0.0, 0.0);
            while m >= l {
                let z = h.get(m as usize, m as usize);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / h.get((m + 1) as usize, m as usize)
                    + h.get(m as usize, (m + 1) as usize);
                q = h.get((m + 1) as usize, (m + 1) as usize) - z - rr - ss;
                r = h.get((m + 2) as usize, (m + 1) as usize);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = h.get(m as usize, (m - 1) as usize).abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (h.get((m - 1) as usize, (m - 1) as usize).abs()
                        + z.abs()
                        + h.get((m + 1) as usize, (m + 1) as usize).abs());
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                h.set(i as usize, (i - 2) as usize, 0.0);
                if i != m + 2 {
                    h.set(i as usize, (i - 3) as usize, 0.0);
                }
            }
            // double QR sweep over rows l..nn
            for k in m..=(nn - 1) {
                if k != m {
                    p = h.get(k as usize, (k - 1) as usize);
                    q = h.get((k + 1) as usize, (k - 1) as usize);
                    r = if k != nn - 1 { h.get((k + 2) as usize, (k - 1) as usize) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            let v = -h.get(k as usize, (k - 1) as usize);
                            h.set(k as usize, (k - 1) as usize, v);
                        }
                    } else {
                        h.set(k as usize, (k - 1) as usize, -s * x);
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in (k as usize)..=(nn as usize) {
                        let mut pp = h.get(k as usize, j) + q * h.get((k + 1) as usize, j);
                        if k != nn - 1 {
                            pp += r * h.get((k + 2) as usize, j);
                            let v = h.get((k + 2) as usize, j) - pp * z;
                            h.set((k + 2) as usize, j, v);
                        }
                        let v1 = h.get((k + 1) as usize, j) - pp * y;
                        h.set((k + 1) as usize, j, v1);
                        let v0 = h.get(k as usize, j) - pp * x;
                        h.set(k as usize, j, v0);
                    }
                    let mmin = if nn < k + 3 { nn } else { k + 3 };
                    for i in (l as usize)..=(mmin as usize) {
                        let mut pp = x * h.get(i, k as usize) + y * h.get(i, (k + 1) as usize);
                        if k != nn - 1 {
                            pp += z * h.get(i, (k + 2) as usize);
                            let v = h.get(i, (k + 2) as usize) - pp * r;
                            h.set(i, (k + 2) as usize, v);
                        }
                        let v1 = h.get(i, (k + 1) as usize) - pp * q;
                        h.set(i, (k + 1) as usize, v1);
                        let v0 = h.get(i, k as usize) - pp;
                        h.set(i, k as usize, v0);
                    }
                }
            }
        }
    }
    Ok(roots)
}
