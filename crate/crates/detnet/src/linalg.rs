//! Dense complex vector/matrix kernel sized for dimensions up to 64.
//!
//! Provides tensor (Kronecker) products, a cyclic Jacobi Hermitian
//! eigensolver, the trace norm, and functional calculus on positive
//! semidefinite matrices. Everything is immutable after construction and
//! all operations are pure functions, so values can be shared freely
//! between concurrent sweep workers.
//!
//! Tolerance hierarchy used throughout the crate:
//! construction checks 1e-10, equality-of-probability assertions 1e-9,
//! PSD slack -1e-10, prior sums 1e-12. These reflect double-precision
//! round-off across eigenproblems of dimension at most 16.

use num_complex::Complex64;

use crate::error::{DetnetError, Result};

/// Shorthand constructor for a complex number.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Off-diagonal Frobenius norm threshold at which Jacobi sweeps stop.
const JACOBI_TOL: f64 = 1e-12;
/// Upper bound on Jacobi sweeps; convergence is quadratic and dimensions
/// never exceed 16 in practice, so this is never reached by valid inputs.
const JACOBI_MAX_SWEEPS: usize = 100;
/// Entrywise tolerance for the Hermiticity precondition.
const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below the negative of this fail the PSD precondition.
const PSD_SLACK: f64 = 1e-10;

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    entries: Vec<Complex64>,
}

impl CVector {
    /// Builds a vector from its entries. The entry list must be nonempty.
    pub fn new(entries: Vec<Complex64>) -> Self {
        assert!(!entries.is_empty(), "vector must have positive dimension");
        CVector { entries }
    }

    /// Zero vector of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0);
        CVector { entries: vec![Complex64::ZERO; dim] }
    }

    /// Standard basis vector `e_k` of the given dimension.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index out of range");
        let mut v = Self::zeros(dim);
        v.entries[k] = Complex64::ONE;
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.entries[i]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    /// Inner product, conjugate-linear in `self`: `<self|other>`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: Complex64) -> CVector {
        CVector::new(self.entries.iter().map(|a| a * s).collect())
    }

    pub fn add(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim());
        CVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim());
        CVector::new(
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    /// Returns the vector rescaled to unit norm.
    pub fn normalized(&self) -> CVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(c64(1.0 / n, 0.0))
    }

    /// Kronecker product in left-factor-major convention:
    /// `(a (x) b)[i*dim_b + k] = a_i * b_k`.
    pub fn tensor(&self, other: &CVector) -> CVector {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b);
            }
        }
        CVector::new(out)
    }

    /// Outer product `|self><other|`.
    pub fn outer(&self, other: &CVector) -> CMatrix {
        let mut out = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &other.entries {
                out.push(a * b.conj());
            }
        }
        CMatrix::new(self.dim(), other.dim(), out)
    }

    /// Projector `|self><self|`.
    pub fn projector(&self) -> CMatrix {
        self.outer(self)
    }
}

/// Dense complex matrix, row-major entry order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries; the entry count must equal
    /// `rows * cols` and both dimensions must be positive.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        CMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        CMatrix { rows, cols, entries: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = Complex64::ONE;
        }
        m
    }

    /// Square diagonal matrix from the given diagonal entries.
    pub fn from_diag(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * n + i] = *d;
        }
        m
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

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::new(
            self.rows,
            self.cols,
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix::new(
            self.rows,
            self.cols,
            self.entries.iter().map(|a| a * s).collect(),
        )
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = vec![Complex64::ZERO; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[i * other.cols + j] += a * other.entries[k * other.cols + j];
                }
            }
        }
        CMatrix::new(self.rows, other.cols, out)
    }

    /// Matrix-vector product `self * v`.
    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "matvec dimension mismatch");
        let mut out = vec![Complex64::ZERO; self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::ZERO;
            for j in 0..self.cols {
                acc += self.entries[i * self.cols + j] * v.entries[j];
            }
            *slot = acc;
        }
        CVector::new(out)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let mut out = vec![Complex64::ZERO; self.rows * self.cols];
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[c * self.rows + r] = self.entries[r * self.cols + c].conj();
            }
        }
        CMatrix::new(self.cols, self.rows, out)
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace needs a square matrix");
        (0..self.rows).map(|i| self.entries[i * self.cols + i]).sum()
    }

    /// Kronecker product in left-factor-major convention:
    /// `(a (x) b)[i*rb + k, j*cb + l] = a[i,j] * b[k,l]`.
    pub fn tensor(&self, other: &CMatrix) -> CMatrix {
        let (ra, ca) = (self.rows, self.cols);
        let (rb, cb) = (other.rows, other.cols);
        let mut out = vec![Complex64::ZERO; ra * rb * ca * cb];
        for i in 0..ra {
            for j in 0..ca {
                let a = self.entries[i * ca + j];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out[(i * rb + k) * (ca * cb) + (j * cb + l)] =
                            a * other.entries[k * cb + l];
                    }
                }
            }
        }
        CMatrix::new(ra * rb, ca * cb, out)
    }

    /// Largest entrywise absolute value.
    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference against `other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// True when `self` equals its adjoint within `tol` entrywise.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for r in 0..self.rows {
            for c in r..self.cols {
                let d = self.entries[r * self.cols + c]
                    - self.entries[c * self.cols + r].conj();
                if d.norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are ascending. Eigenvectors are orthonormal and phase
/// canonicalized: the first component of magnitude above 1e-9 is made
/// real positive. Equal eigenvalues are ordered by lexicographic
/// comparison of the canonicalized eigenvector components, which makes
/// the decomposition reproducible bit-for-bit on identical input.
#[derive(Debug, Clone)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<CVector>,
}

impl EigDecomposition {
    /// Rebuilds `sum_i lambda_i |v_i><v_i|`, mainly for test assertions.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvectors[0].dim();
        let mut m = CMatrix::zeros(n, n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m = m.add(&v.projector().scale(c64(*lam, 0.0)));
        }
        m
    }
}

fn offdiag_frobenius(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for p in 0..n {
        for q in (p + 1)..n {
            s += 2.0 * a[p * n + q].norm_sqr();
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating the (p, q) entry of `a`,
/// accumulated into the eigenvector matrix `v`. Both are n x n row-major.
fn jacobi_rotate(a: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let phase = apq / mag;
    let tau = (app - aqq) / (2.0 * mag);
    // Smaller-magnitude root of t^2 + 2*tau*t - 1 = 0 for stability.
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let sp = phase.conj() * s; // s * e^{-i arg(apq)}

    // Column update: col_p' = c*col_p + conj(phase)*s*col_q,
    //                col_q' = -phase*s*col_p + c*col_q.
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * c + akq * sp;
        a[k * n + q] = akq * c - akp * sp.conj();
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * c + vkq * sp;
        v[k * n + q] = vkq * c - vkp * sp.conj();
    }
    // Row update with the adjoint rotation.
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = apk * c + aqk * sp.conj();
        a[q * n + k] = aqk * c - apk * sp;
    }
    // Clean round-off on the annihilated pair and keep the diagonal real.
    a[p * n + q] = Complex64::ZERO;
    a[q * n + p] = Complex64::ZERO;
    a[p * n + p] = c64(a[p * n + p].re, 0.0);
    a[q * n + q] = c64(a[q * n + q].re, 0.0);
}

/// Hermitian eigendecomposition by cyclic Jacobi sweeps.
///
/// Precondition: `m` square and Hermitian within 1e-10 entrywise.
/// The working copy is symmetrized as `(m + m^dagger)/2` so the tiny
/// allowed asymmetry cannot bias the result. Sweeps stop when the
/// off-diagonal Frobenius norm falls below 1e-12 (at most 100 sweeps).
pub fn hermitian_eig(m: &CMatrix) -> Result<EigDecomposition> {
    if !m.is_square() {
        return Err(DetnetError::DimensionMismatch(m.rows(), m.cols()));
    }
    if !m.is_hermitian(HERMITIAN_TOL) {
        return Err(DetnetError::NotHermitian);
    }
    let n = m.rows();
    let mut a: Vec<Complex64> = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            a.push((m.get(r, c) + m.get(c, r).conj()) * 0.5);
        }
    }
    let mut v = vec![Complex64::ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = Complex64::ONE;
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        if offdiag_frobenius(&a, n) <= JACOBI_TOL {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    // Extract columns, canonicalize the global phase of each.
    let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..n)
        .map(|j| {
            let mut col: Vec<Complex64> = (0..n).map(|i| v[i * n + j]).collect();
            let lead = col
                .iter()
                .find(|e| e.norm() > 1e-9)
                .copied()
                .unwrap_or(Complex64::ONE);
            let phase = lead.conj() / lead.norm();
            for e in col.iter_mut() {
                *e *= phase;
            }
            (a[j * n + j].re, col)
        })
        .collect();

    // Ascending eigenvalues; exact ties broken by lexicographic comparison
    // of (re, im) component pairs for reproducibility.
    pairs.sort_by(|x, y| {
        x.0.partial_cmp(&y.0).unwrap().then_with(|| {
            for (a, b) in x.1.iter().zip(&y.1) {
                match a.re.partial_cmp(&b.re).unwrap() {
                    std::cmp::Ordering::Equal => {}
                    ord => return ord,
                }
                match a.im.partial_cmp(&b.im).unwrap() {
                    std::cmp::Ordering::Equal => {}
                    ord => return ord,
                }
            }
            std::cmp::Ordering::Equal
        })
    });

    Ok(EigDecomposition {
        eigenvalues: pairs.iter().map(|p| p.0).collect(),
        eigenvectors: pairs.into_iter().map(|p| CVector::new(p.1)).collect(),
    })
}

/// Trace norm of a Hermitian matrix: the sum of absolute eigenvalues.
pub fn trace_norm(m: &CMatrix) -> Result<f64> {
    let eig = hermitian_eig(m)?;
    Ok(eig.eigenvalues.iter().map(|l| l.abs()).sum())
}

/// Applies `f` to the spectrum of a PSD matrix on its support:
/// `sum_{lambda_i > cutoff} f(max(lambda_i, 0)) |v_i><v_i|`.
///
/// Eigenvalues in `(cutoff, 0)` are clamped to zero before `f` is
/// applied; eigenvalues at or below `cutoff` are dropped entirely, which
/// gives the pseudo-inverse convention for functions like x^(-1/2).
/// Errors with `NotPsd` when any eigenvalue is below -1e-10.
pub fn psd_apply(m: &CMatrix, f: impl Fn(f64) -> f64, cutoff: f64) -> Result<CMatrix> {
    let eig = hermitian_eig(m)?;
    if eig.eigenvalues.iter().any(|l| *l < -PSD_SLACK) {
        return Err(DetnetError::NotPsd);
    }
    let n = m.rows();
    let mut out = CMatrix::zeros(n, n);
    for (lam, vec) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
        if *lam > cutoff {
            out = out.add(&vec.projector().scale(c64(f(lam.max(0.0)), 0.0)));
        }
    }
    Ok(out)
}

/// True when the smallest eigenvalue of a Hermitian matrix is at least `-tol`.
pub fn is_psd(m: &CMatrix, tol: f64) -> Result<bool> {
    let eig = hermitian_eig(m)?;
    Ok(eig.eigenvalues.first().map(|l| *l >= -tol).unwrap_or(true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_4;

    fn two_by_two(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> CMatrix {
        CMatrix::new(2, 2, vec![a, b, c, d])
    }

    #[test]
    fn tensor_identity_case() {
        let i2 = CMatrix::identity(2);
        assert_eq!(i2.tensor(&i2), CMatrix::identity(4));
    }

    #[test]
    fn tensor_basis_bookkeeping() {
        // e0 (x) e1 lands on index 0*2 + 1 = 1 of the composite space.
        let e0 = CVector::basis(2, 0);
        let e1 = CVector::basis(2, 1);
        assert_eq!(e0.tensor(&e1), CVector::basis(4, 1));
    }

    #[test]
    fn tensor_diagonal_phase_matrix() {
        // diag(e^{i pi/2}, e^{-i pi/2}) (x) I2 = diag(i, i, -i, -i).
        let u = CMatrix::from_diag(&[c64(0.0, 1.0), c64(0.0, -1.0)]);
        let got = u.tensor(&CMatrix::identity(2));
        let want = CMatrix::from_diag(&[
            c64(0.0, 1.0),
            c64(0.0, 1.0),
            c64(0.0, -1.0),
            c64(0.0, -1.0),
        ]);
        assert!(got.max_abs_diff(&want) <= 1e-15);
    }

    #[test]
    fn eig_sorts_ascending() {
        let m = CMatrix::from_diag(&[c64(3.0, 0.0), c64(1.0, 0.0)]);
        let eig = hermitian_eig(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 3.0]);
    }

    #[test]
    fn eig_symmetric_flip() {
        let m = two_by_two(
            Complex64::ZERO,
            Complex64::ONE,
            Complex64::ONE,
            Complex64::ZERO,
        );
        let eig = hermitian_eig(&m).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.eigenvalues[1], 1.0, epsilon = 1e-12);
        assert!(m.max_abs_diff(&eig.reconstruct()) <= 1e-10);
    }

    #[test]
    fn eig_rank_two_projector_sum() {
        // T = sum of the two unit-vector projectors (1, +-e^{-2 i theta})/sqrt(2);
        // its larger eigenvalue is 1 + cos(theta) for theta = pi/4.
        let th = FRAC_PI_4;
        let phase = Complex64::from_polar(1.0, 2.0 * th);
        let t = two_by_two(
            Complex64::ONE,
            -(phase + 1.0) * 0.5,
            -(phase.conj() + 1.0) * 0.5,
            Complex64::ONE,
        );
        let eig = hermitian_eig(&t).unwrap();
        assert_abs_diff_eq!(eig.eigenvalues[1], 1.0 + th.cos(), epsilon = 1e-10);
        assert_abs_diff_eq!(eig.eigenvalues[0], 1.0 - th.cos(), epsilon = 1e-10);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = two_by_two(
            Complex64::ZERO,
            Complex64::ONE,
            c64(0.5, 0.0),
            Complex64::ZERO,
        );
        assert!(matches!(hermitian_eig(&m), Err(DetnetError::NotHermitian)));
    }

    #[test]
    fn trace_norm_examples() {
        let m = CMatrix::from_diag(&[Complex64::ONE, -Complex64::ONE]);
        assert_abs_diff_eq!(trace_norm(&m).unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(trace_norm(&CMatrix::zeros(3, 3)).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn psd_apply_inverse_sqrt() {
        let i2 = CMatrix::identity(2);
        let r = psd_apply(&i2, |x| x.powf(-0.5), 1e-12).unwrap();
        assert!(r.max_abs_diff(&i2) <= 1e-12);

        let m = CMatrix::from_diag(&[c64(4.0, 0.0), Complex64::ZERO]);
        let r = psd_apply(&m, |x| x.powf(-0.5), 1e-12).unwrap();
        let want = CMatrix::from_diag(&[c64(0.5, 0.0), Complex64::ZERO]);
        assert!(r.max_abs_diff(&want) <= 1e-12);
    }

    #[test]
    fn psd_apply_identity_function_roundtrip() {
        let m = two_by_two(c64(2.0, 0.0), c64(0.3, 0.4), c64(0.3, -0.4), c64(1.0, 0.0));
        let r = psd_apply(&m, |x| x, 1e-14).unwrap();
        assert!(r.max_abs_diff(&m) <= 1e-10);
    }

    #[test]
    fn psd_apply_rejects_negative_spectrum() {
        let m = CMatrix::from_diag(&[Complex64::ONE, c64(-0.5, 0.0)]);
        assert!(matches!(
            psd_apply(&m, |x| x, 0.0),
            Err(DetnetError::NotPsd)
        ));
    }

    #[test]
    fn is_psd_examples() {
        assert!(is_psd(&CMatrix::identity(4), 1e-10).unwrap());
        let m = CMatrix::from_diag(&[Complex64::ONE, c64(-0.5, 0.0)]);
        assert!(!is_psd(&m, 1e-10).unwrap());
    }

    #[test]
    fn eig_handles_sixteen_dim_phase_structure() {
        // Random-free deterministic 16-dim check: a projector sum with
        // complex phases must reconstruct and stay orthonormal.
        let mut vecs = Vec::new();
        for k in 0..4 {
            let mut entries = vec![Complex64::ZERO; 16];
            for (i, e) in entries.iter_mut().enumerate() {
                let ang = (i as f64 + 1.0) * (k as f64 + 0.5);
                *e = Complex64::from_polar(((i + k) % 3 + 1) as f64, ang);
            }
            vecs.push(CVector::new(entries).normalized());
        }
        let mut m = CMatrix::zeros(16, 16);
        for (k, v) in vecs.iter().enumerate() {
            m = m.add(&v.projector().scale(c64(k as f64 + 0.25, 0.0)));
        }
        let eig = hermitian_eig(&m).unwrap();
        assert!(m.max_abs_diff(&eig.reconstruct()) <= 1e-10);
        for i in 0..16 {
            for j in 0..16 {
                let want = if i == j { 1.0 } else { 0.0 };
                let got = eig.eigenvectors[i].inner(&eig.eigenvectors[j]).norm();
                assert_abs_diff_eq!(got, want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn inner_is_conjugate_linear_in_left_argument() {
        let v = CVector::new(vec![c64(1.0, 0.0), c64(0.0, 1.0)]);
        let w = CVector::new(vec![c64(0.0, 2.0), c64(1.0, 0.0)]);
        // <v|w> = conj(1)*2i + conj(i)*1 = 2i - i = i.
        assert!((v.inner(&w) - c64(0.0, 1.0)).norm() <= 1e-15);
        assert_abs_diff_eq!(v.norm(), 2.0_f64.sqrt(), epsilon = 1e-15);
    }
}
