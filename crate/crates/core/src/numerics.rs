//! Dense complex linear algebra kernel: Hermitian eigendecomposition,
//! PSD predicates, square roots, supported pseudo-inverses and block
//! assembly. Everything here is deterministic per input so that
//! counterexample certificates reproduce bit-for-bit across runs.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Numerical slack used throughout the model.
///
/// `psd_tol` is the eigenvalue floor for cone membership, `eq_tol` the
/// entrywise equality slack and `rank_tol` a relative singular-value
/// cutoff (scaled by the operator norm of the input).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub psd_tol: f64,
    pub eq_tol: f64,
    pub rank_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            psd_tol: 1e-9,
            eq_tol: 1e-8,
            rank_tol: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        if self.psd_tol < 0.0 || self.eq_tol < 0.0 {
            return Err(Error::Validation("tolerances must be nonnegative".into()));
        }
        if self.rank_tol < f64::EPSILON {
            return Err(Error::Validation(
                "rank_tol must be at least machine epsilon".into(),
            ));
        }
        Ok(())
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Build from a row-major slice of real entries (test convenience).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| Complex64::new(entries[i * cols + j], 0.0))
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
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

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> ComplexMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> ComplexMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, s: f64) -> ComplexMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * s)
    }

    pub fn scale_complex(&self, s: Complex64) -> ComplexMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * s)
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, other.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, other.rows, other.cols
        );
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out.set(i * other.rows + p, j * other.cols + q, a * other.get(p, q));
                    }
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.max_abs_diff(other) <= tol
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermitian symmetry (defined for square input).
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, eq_tol: f64) -> bool {
        self.rows == self.cols && self.hermitian_defect() <= eq_tol
    }

    pub fn hermitian_part(&self) -> ComplexMatrix {
        assert_eq!(self.rows, self.cols);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Copy `block` into `self` with its top-left corner at `(row, col)`.
    pub fn insert_block(&mut self, row: usize, col: usize, block: &ComplexMatrix) {
        assert!(row + block.rows <= self.rows && col + block.cols <= self.cols);
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(row + i, col + j, block.get(i, j));
            }
        }
    }

    pub fn extract_block(&self, row: usize, col: usize, rows: usize, cols: usize) -> ComplexMatrix {
        assert!(row + rows <= self.rows && col + cols <= self.cols);
        Self::from_fn(rows, cols, |i, j| self.get(row + i, col + j))
    }
}

// Wire format: nested row-major arrays of [re, im] pairs.
impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self.get(i, j).re, self.get(i, j).im]).collect())
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        if rows.is_empty() {
            return Err(D::Error::custom("matrix must have at least one row"));
        }
        let cols = rows[0].len();
        if cols == 0 || rows.iter().any(|r| r.len() != cols) {
            return Err(D::Error::custom("ragged or empty matrix rows"));
        }
        let m = ComplexMatrix::from_fn(rows.len(), cols, |i, j| {
            Complex64::new(rows[i][j][0], rows[i][j][1])
        });
        if !m.is_finite() {
            return Err(D::Error::custom("matrix entries must be finite"));
        }
        Ok(m)
    }
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Hermitian eigendecomposition by cyclic Jacobi with complex rotations.
///
/// Returns eigenvalues in descending order together with a unitary whose
/// columns are the matching eigenvectors, so `a = V diag(λ) V*`.
/// Eigenvector phases are normalized (largest component real positive)
/// to keep the decomposition deterministic.
pub fn herm_eig(a: &ComplexMatrix, tol: &Tolerances) -> Result<(Vec<f64>, ComplexMatrix)> {
    if a.rows() != a.cols() {
        return Err(Error::ShapeMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let defect = a.hermitian_defect();
    if defect > tol.eq_tol {
        return Err(Error::NotHermitian(defect));
    }
    let n = a.rows();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = 1.0 + m.frobenius_norm();
    let stop = 1e-14 * scale;

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let b = apq.norm();
                if b <= stop / (n as f64) {
                    continue;
                }
                let phase = apq / b;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                let theta = (aqq - app) / (2.0 * b);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Unitary G = diag(1, conj(phase)) * R with R the real Jacobi
                // rotation; G* m G annihilates the (p,q) entry. Apply
                // m <- G* m G and v <- v G, touching only rows/cols p,q.
                let gp = Complex64::new(c, 0.0);
                let gs = Complex64::new(s, 0.0);
                let cq = gp * phase.conj();
                let sq = gs * phase.conj();
                for i in 0..n {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, mip * gp - miq * sq);
                    m.set(i, q, mip * gs + miq * cq);
                }
                for j in 0..n {
                    let mpj = m.get(p, j);
                    let mqj = m.get(q, j);
                    m.set(p, j, mpj * gp - mqj * (gs * phase));
                    m.set(q, j, mpj * gs + mqj * (gp * phase));
                }
                // Restore exact hermiticity of the touched entries to
                // suppress roundoff drift without masking rotation errors.
                let avg = (m.get(p, q) + m.get(q, p).conj()) * 0.5;
                m.set(p, q, avg);
                m.set(q, p, avg.conj());
                m.set(p, p, Complex64::new(m.get(p, p).re, 0.0));
                m.set(q, q, Complex64::new(m.get(q, q).re, 0.0));
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip * gp - viq * sq);
                    v.set(i, q, vip * gs + viq * cq);
                }
            }
        }
    }
    if !converged {
        // One more convergence check after the final sweep.
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * m.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() > stop {
            return Err(Error::NoConvergence(MAX_JACOBI_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| m.get(i, i).re).collect();
    order.sort_by(|&i, &j| eigs[j].partial_cmp(&eigs[i]).unwrap());

    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        values.push(eigs[src]);
        // Phase normalization: make the entry of largest modulus real positive.
        let mut best = 0usize;
        let mut best_norm = 0.0f64;
        for i in 0..n {
            let nz = v.get(i, src).norm();
            if nz > best_norm + 1e-15 {
                best_norm = nz;
                best = i;
            }
        }
        let pivot = v.get(best, src);
        let phase = if best_norm > 0.0 {
            pivot.conj() / best_norm
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..n {
            vectors.set(i, col, v.get(i, src) * phase);
        }
    }
    Ok((values, vectors))
}

/// Cone membership: all eigenvalues at least `-psd_tol`.
pub fn is_psd(a: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    let (values, _) = herm_eig(a, tol)?;
    Ok(values.last().copied().unwrap_or(0.0) >= -tol.psd_tol)
}

/// Smallest eigenvalue; useful for reporting PSD margins.
pub fn min_eigenvalue(a: &ComplexMatrix, tol: &Tolerances) -> Result<f64> {
    let (values, _) = herm_eig(a, tol)?;
    Ok(values.last().copied().unwrap_or(0.0))
}

pub fn spectral_map(
    a: &ComplexMatrix,
    tol: &Tolerances,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix> {
    let (values, vectors) = herm_eig(a, tol)?;
    let n = a.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        let fv = f(values[k]);
        if fv == 0.0 {
            continue;
        }
        for i in 0..n {
            let vik = vectors.get(i, k);
            for j in 0..n {
                let x = out.get(i, j) + vik * vectors.get(j, k).conj() * fv;
                out.set(i, j, x);
            }
        }
    }
    Ok(out.hermitian_part())
}

/// PSD square root via spectral calculus. Eigenvalues within `psd_tol`
/// below zero are clamped to zero so the result is exactly PSD
/// downstream. Eigenvalues below the relative rank cutoff are also
/// clamped: the square root is not Lipschitz at zero, so letting solver
/// dirt of size δ through would inject √δ-sized noise into every
/// absolute value.
pub fn herm_sqrt(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (values, _) = herm_eig(a, tol)?;
    if let Some(&min) = values.last() {
        if min < -tol.psd_tol {
            return Err(Error::NotPsd(min));
        }
    }
    let max = values.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tol.rank_tol * max.max(1e-300);
    spectral_map(a, tol, |v| if v > cutoff { v.sqrt() } else { 0.0 })
}

/// Supported inverse square root of a PSD matrix.
///
/// Returns `(inv_root, support)` where `inv_root = Σ λᵢ^{-1/2} vᵢvᵢ*` over
/// eigenvalues above the relative rank cutoff and `support` is the
/// projection onto their span, so `inv_root · a · inv_root = support`.
pub fn pinv_sqrt(a: &ComplexMatrix, tol: &Tolerances) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (values, _) = herm_eig(a, tol)?;
    let min = values.last().copied().unwrap_or(0.0);
    if min < -tol.psd_tol {
        return Err(Error::NotPsd(min));
    }
    let max = values.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tol.rank_tol * max.max(1e-300);
    let inv_root = spectral_map(a, tol, |v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 })?;
    let support = spectral_map(a, tol, |v| if v > cutoff { 1.0 } else { 0.0 })?;
    Ok((inv_root, support))
}

/// Supported square root with the same rank cutoff as [`pinv_sqrt`].
pub fn supported_sqrt(a: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (values, _) = herm_eig(a, tol)?;
    let min = values.last().copied().unwrap_or(0.0);
    if min < -tol.psd_tol {
        return Err(Error::NotPsd(min));
    }
    let max = values.first().copied().unwrap_or(0.0).max(0.0);
    let cutoff = tol.rank_tol * max.max(1e-300);
    spectral_map(a, tol, |v| if v > cutoff { v.sqrt() } else { 0.0 })
}

/// Largest singular value, computed as `sqrt(λ_max(a* a))`.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    let gram = a.adjoint().mul(a);
    let tol = Tolerances {
        eq_tol: 1e-6 * (1.0 + gram.frobenius_norm()),
        ..Tolerances::default()
    };
    let (values, _) = herm_eig(&gram, &tol).expect("gram matrix is Hermitian by construction");
    values.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// All singular values in descending order.
pub fn singular_values(a: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<f64>> {
    let gram = a.adjoint().mul(a);
    let (values, _) = herm_eig(&gram, tol)?;
    Ok(values.into_iter().map(|v| v.max(0.0).sqrt()).collect())
}

/// Assemble a 2x2 block matrix; absent blocks are zero-filled. Shapes of
/// absent blocks are inferred from the present ones in the same row and
/// column of the grid, so at least one block per grid row and per grid
/// column must be present.
pub fn assemble(
    blocks: [[Option<&ComplexMatrix>; 2]; 2],
) -> Result<ComplexMatrix> {
    let mut row_heights = [None::<usize>; 2];
    let mut col_widths = [None::<usize>; 2];
    for (i, row) in blocks.iter().enumerate() {
        for (j, blk) in row.iter().enumerate() {
            if let Some(b) = blk {
                match row_heights[i] {
                    None => row_heights[i] = Some(b.rows()),
                    Some(h) if h != b.rows() => {
                        return Err(Error::ShapeMismatch(format!(
                            "grid row {i}: block heights {h} vs {}",
                            b.rows()
                        )))
                    }
                    _ => {}
                }
                match col_widths[j] {
                    None => col_widths[j] = Some(b.cols()),
                    Some(w) if w != b.cols() => {
                        return Err(Error::ShapeMismatch(format!(
                            "grid column {j}: block widths {w} vs {}",
                            b.cols()
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    let heights = [
        row_heights[0].ok_or_else(|| Error::ShapeMismatch("grid row 0 fully absent".into()))?,
        row_heights[1].ok_or_else(|| Error::ShapeMismatch("grid row 1 fully absent".into()))?,
    ];
    let widths = [
        col_widths[0].ok_or_else(|| Error::ShapeMismatch("grid column 0 fully absent".into()))?,
        col_widths[1].ok_or_else(|| Error::ShapeMismatch("grid column 1 fully absent".into()))?,
    ];
    let mut out = ComplexMatrix::zeros(heights[0] + heights[1], widths[0] + widths[1]);
    for i in 0..2 {
        for j in 0..2 {
            if let Some(b) = blocks[i][j] {
                out.insert_block(if i == 0 { 0 } else { heights[0] }, if j == 0 { 0 } else { widths[0] }, b);
            }
        }
    }
    Ok(out)
}

/// Direct sum `a ⊛ b` of two matrices (diagonal block assembly).
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assemble([[Some(a), None], [None, Some(b)]]).expect("diagonal assembly cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn reconstruct(values: &[f64], vectors: &ComplexMatrix) -> ComplexMatrix {
        let n = vectors.rows();
        let mut d = ComplexMatrix::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            d.set(i, i, Complex64::new(v, 0.0));
        }
        vectors.mul(&d).mul(&vectors.adjoint())
    }

    #[test]
    fn eig_diagonal_is_sorted_descending() {
        let a = ComplexMatrix::diag_real(&[1.0, 3.0, -2.0]);
        let (values, vectors) = herm_eig(&a, &tol()).unwrap();
        assert_eq!(values, vec![3.0, 1.0, -2.0]);
        assert!(reconstruct(&values, &vectors).approx_eq(&a, 1e-12));
    }

    #[test]
    fn eig_reconstructs_complex_hermitian() {
        let a = ComplexMatrix::from_fn(3, 3, |i, j| match (i, j) {
            (0, 1) => Complex64::new(1.0, 2.0),
            (1, 0) => Complex64::new(1.0, -2.0),
            (0, 2) => Complex64::new(0.0, -1.0),
            (2, 0) => Complex64::new(0.0, 1.0),
            (i, j) if i == j => Complex64::new(i as f64, 0.0),
            _ => Complex64::new(0.5, 0.0),
        });
        let (values, vectors) = herm_eig(&a, &tol()).unwrap();
        assert!(reconstruct(&values, &vectors).approx_eq(&a, 1e-10));
        // Columns are orthonormal.
        let gram = vectors.adjoint().mul(&vectors);
        assert!(gram.approx_eq(&ComplexMatrix::identity(3), 1e-12));
        // Trace is preserved.
        let trace: f64 = values.iter().sum();
        assert!((trace - 3.0).abs() < 1e-10);
    }

    #[test]
    fn eig_is_deterministic() {
        let a = ComplexMatrix::from_fn(4, 4, |i, j| {
            Complex64::new((i * j) as f64, i as f64 - j as f64)
        })
        .hermitian_part();
        let (v1, m1) = herm_eig(&a, &tol()).unwrap();
        let (v2, m2) = herm_eig(&a, &tol()).unwrap();
        assert_eq!(v1, v2);
        assert_eq!(m1, m2);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(herm_eig(&a, &tol()), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn sqrt_of_known_matrix() {
        // [[2,1],[1,2]] has eigenvalues 3, 1; its root has entries
        // (sqrt(3)+1)/2 on and (sqrt(3)-1)/2 off the diagonal.
        let a = ComplexMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let r = herm_sqrt(&a, &tol()).unwrap();
        let d = (3f64.sqrt() + 1.0) / 2.0;
        let o = (3f64.sqrt() - 1.0) / 2.0;
        let expected = ComplexMatrix::from_real(2, 2, &[d, o, o, d]);
        assert!(r.approx_eq(&expected, 1e-12));
        assert!(r.mul(&r).approx_eq(&a, 1e-12));
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let a = ComplexMatrix::diag_real(&[1.0, -1.0]);
        assert!(matches!(herm_sqrt(&a, &tol()), Err(Error::NotPsd(_))));
    }

    #[test]
    fn pinv_sqrt_produces_support() {
        let a = ComplexMatrix::diag_real(&[4.0, 0.0, 1.0]);
        let (inv_root, support) = pinv_sqrt(&a, &tol()).unwrap();
        assert!(inv_root
            .mul(&a)
            .mul(&inv_root)
            .approx_eq(&support, 1e-12));
        assert!(support.mul(&support).approx_eq(&support, 1e-12));
        assert!(inv_root.approx_eq(&ComplexMatrix::diag_real(&[0.5, 0.0, 1.0]), 1e-12));
    }

    #[test]
    fn supported_sqrt_matches_sqrt_on_full_rank() {
        let g = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        let a = g.adjoint().mul(&g).hermitian_part();
        let s1 = herm_sqrt(&a, &tol()).unwrap();
        let s2 = supported_sqrt(&a, &tol()).unwrap();
        assert!(s1.approx_eq(&s2, 1e-12));
    }

    #[test]
    fn op_norm_of_nilpotent() {
        let a = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]);
        assert!((op_norm(&a) - 2.0).abs() < 1e-12);
        let sv = singular_values(&a, &tol()).unwrap();
        assert!((sv[0] - 2.0).abs() < 1e-12 && sv[1].abs() < 1e-12);
    }

    #[test]
    fn assemble_infers_absent_blocks() {
        let a = ComplexMatrix::identity(2);
        let b = ComplexMatrix::from_real(2, 1, &[1.0, 2.0]);
        let out = assemble([[Some(&a), Some(&b)], [None, None]]);
        assert!(out.is_err()); // grid row 1 fully absent
        let c = ComplexMatrix::from_real(1, 1, &[5.0]);
        let out = assemble([[Some(&a), Some(&b)], [None, Some(&c)]]).unwrap();
        assert_eq!((out.rows(), out.cols()), (3, 3));
        assert_eq!(out.get(0, 2), Complex64::new(1.0, 0.0));
        assert_eq!(out.get(2, 2), Complex64::new(5.0, 0.0));
        assert_eq!(out.get(2, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn direct_sum_is_block_diagonal() {
        let a = ComplexMatrix::identity(1);
        let b = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = direct_sum(&a, &b);
        assert_eq!((s.rows(), s.cols()), (3, 3));
        assert_eq!(s.get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(s.get(1, 2), Complex64::new(1.0, 0.0));
        assert_eq!(s.get(0, 1), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn wire_roundtrip() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| Complex64::new(i as f64, j as f64));
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(
            json,
            "[[[0.0,0.0],[0.0,1.0],[0.0,2.0]],[[1.0,0.0],[1.0,1.0],[1.0,2.0]]]"
        );
        let back: ComplexMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(a, back);
        assert!(serde_json::from_str::<ComplexMatrix>("[[[1,0]],[[1,0],[2,0]]]").is_err());
        assert!(serde_json::from_str::<ComplexMatrix>("[]").is_err());
    }

    #[test]
    fn tolerances_validate() {
        assert!(Tolerances::default().validate().is_ok());
        let bad = Tolerances {
            rank_tol: 0.0,
            ..Tolerances::default()
        };
        assert!(bad.validate().is_err());
    }
}
