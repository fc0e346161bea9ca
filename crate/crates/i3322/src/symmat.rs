//! Small dense real symmetric matrix kit.
//!
//! Everything downstream works with real symmetric matrices of modest
//! dimension (a few hundred at most), so this module keeps its own dense
//! storage and a cyclic Jacobi eigensolver instead of pulling in a LAPACK
//! binding. Jacobi is deterministic for a fixed input, which the rest of
//! the crate relies on: identical inputs must produce bit-identical
//! spectra, projectors and downstream reports.

use crate::{Error, Result};

/// Symmetry tolerance enforced at construction.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Eigenvalues in `(-KERNEL_EPS, KERNEL_EPS)` count as kernel and are
/// excluded from the positive eigenspace.
pub const KERNEL_EPS: f64 = 1e-10;
/// Default idempotence tolerance for projector validation.
pub const PROJECTOR_TOL: f64 = 1e-8;

/// Dense real symmetric matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from row-major entries, enforcing symmetry within
    /// [`SYMMETRY_TOL`].
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::BadDimension {
                what: "SymMatrix",
                dim,
            });
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let defect = (data[i * dim + j] - data[j * dim + i]).abs();
                if defect > SYMMETRY_TOL {
                    return Err(Error::NotSymmetric {
                        i,
                        j,
                        defect,
                        tol: SYMMETRY_TOL,
                    });
                }
            }
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::BadDimension {
                    what: "SymMatrix row",
                    dim: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    /// Builds from a generator, symmetrizing exactly: entry (i,j) is taken
    /// from `f(min(i,j), max(i,j))`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        Self::from_fn(dim, |i, j| if i == j { entries[i] } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    /// Sets both (i,j) and (j,i).
    #[inline]
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// M^2, which is symmetric whenever M is.
    pub fn square(&self) -> Self {
        let n = self.dim;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.data[i * n + k] * self.data[j * n + k];
                }
                out[i * n + j] = acc;
                out[j * n + i] = acc;
            }
        }
        Self { dim: n, data: out }
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise inner product; equals Tr(AB) for symmetric A, B.
    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// ||M^2 - M||_F, the idempotence defect.
    pub fn idempotence_defect(&self) -> f64 {
        self.square().sub(self).expect("same dim").fro_norm()
    }
}

/// Orthogonal column set; columns are stored contiguously.
#[derive(Clone, Debug)]
pub struct Basis {
    dim: usize,
    cols: Vec<f64>,
}

const ORTHO_TOL: f64 = 1e-10;

impl Basis {
    pub fn identity(dim: usize) -> Self {
        let mut cols = vec![0.0; dim * dim];
        for i in 0..dim {
            cols[i * dim + i] = 1.0;
        }
        Self { dim, cols }
    }

    /// Validates pairwise orthonormality of the columns.
    pub fn from_columns(dim: usize, columns: Vec<Vec<f64>>) -> Result<Self> {
        if columns.len() != dim || columns.iter().any(|c| c.len() != dim) {
            return Err(Error::BadDimension { what: "Basis", dim });
        }
        for i in 0..dim {
            for j in i..dim {
                let dot: f64 = columns[i].iter().zip(&columns[j]).map(|(a, b)| a * b).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                if (dot - target).abs() > ORTHO_TOL {
                    return Err(Error::InconsistentBases(format!(
                        "columns {i},{j} not orthonormal: <v_i, v_j> = {dot:.3e}"
                    )));
                }
            }
        }
        let mut cols = Vec::with_capacity(dim * dim);
        for c in columns {
            cols.extend_from_slice(&c);
        }
        Ok(Self { dim, cols })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.cols[j * self.dim..(j + 1) * self.dim]
    }

    /// B^T M B.
    pub fn conjugate_down(&self, m: &SymMatrix) -> Result<SymMatrix> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: m.dim(),
                right: self.dim,
            });
        }
        let n = self.dim;
        // W = M B, column by column.
        let mut w = vec![0.0; n * n];
        for j in 0..n {
            let bj = self.column(j);
            for i in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += m.get(i, k) * bj[k];
                }
                w[j * n + i] = acc;
            }
        }
        let mut out = SymMatrix::zeros(n);
        for i in 0..n {
            let bi = self.column(i);
            for j in i..n {
                let wj = &w[j * n..(j + 1) * n];
                let acc: f64 = bi.iter().zip(wj).map(|(a, b)| a * b).sum();
                out.set_sym(i, j, acc);
            }
        }
        Ok(out)
    }

    /// B M B^T.
    pub fn conjugate_up(&self, m: &SymMatrix) -> Result<SymMatrix> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: m.dim(),
                right: self.dim,
            });
        }
        let n = self.dim;
        let mut out = SymMatrix::zeros(n);
        // out = sum_{k,l} m_kl b_k b_l^T with b_k the k-th column.
        // Compute W[i][l] = sum_k B[i][k] m[k][l] first.
        let mut w = vec![0.0; n * n];
        for i in 0..n {
            for l in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.cols[k * n + i] * m.get(k, l);
                }
                w[i * n + l] = acc;
            }
        }
        for i in 0..n {
            for j in i..n {
                let mut acc = 0.0;
                for l in 0..n {
                    acc += w[i * n + l] * self.cols[l * n + j];
                }
                out.set_sym(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn max_abs_diff(&self, other: &Basis) -> f64 {
        self.cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Result of a symmetric eigendecomposition: eigenvalues sorted
/// descending, eigenvectors as the matching orthonormal columns.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub basis: Basis,
}

impl Spectrum {
    /// Sum of lambda_i v_i v_i^T; used by the reconstruction oracle.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.basis.dim();
        let mut out = SymMatrix::zeros(n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let v = self.basis.column(k);
            for i in 0..n {
                for j in i..n {
                    let cur = out.get(i, j);
                    out.set_sym(i, j, cur + lam * v[i] * v[j]);
                }
            }
        }
        out
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }
}

/// Symmetric eigendecomposition via cyclic Jacobi sweeps.
///
/// Eigenvalues are returned in descending order. Each eigenvector has its
/// first component of magnitude > 1e-12 made positive; exact eigenvalue
/// ties are broken by lexicographic comparison of the sign-fixed
/// eigenvectors, so the output is a pure function of the input.
pub fn eig_sym(m: &SymMatrix) -> Spectrum {
    let n = m.dim();
    let mut a = m.data().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    if n > 1 {
        let scale = m.fro_norm().max(1.0);
        let tol = 1e-14 * scale;
        for _sweep in 0..64 {
            let mut off2 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off2 += a[p * n + q] * a[p * n + q];
                }
            }
            if off2.sqrt() <= tol {
                break;
            }
            for p in 0..(n - 1) {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        1.0 / (theta - (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }

    let mut columns: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| v[i * n + j]).collect())
        .collect();
    for col in &mut columns {
        if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                for x in col.iter_mut() {
                    *x = -*x;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let li = a[i * n + i];
        let lj = a[j * n + j];
        match lj.total_cmp(&li) {
            std::cmp::Ordering::Equal => {
                for k in 0..n {
                    match columns[i][k].total_cmp(&columns[j][k]) {
                        std::cmp::Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                std::cmp::Ordering::Equal
            }
            ord => ord,
        }
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let sorted: Vec<Vec<f64>> = order.iter().map(|&i| columns[i].clone()).collect();
    let basis = Basis::from_columns(n, sorted).expect("jacobi columns orthonormal");
    Spectrum { eigenvalues, basis }
}

/// Minimum eigenvalue. M is PSD iff the result is >= -tolerance.
pub fn psd_margin(m: &SymMatrix) -> f64 {
    eig_sym(m).min_eigenvalue()
}

/// Symmetry is guaranteed by the type; checks idempotence at `tol`.
pub fn is_projector(m: &SymMatrix, tol: f64) -> bool {
    m.idempotence_defect() <= tol
}

/// Orthogonal projector, validated at construction.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: SymMatrix,
}

impl Projector {
    pub fn new(matrix: SymMatrix) -> Result<Self> {
        Self::with_name(matrix, "projector")
    }

    /// Like [`Projector::new`] but error messages carry `name`.
    pub fn with_name(matrix: SymMatrix, name: &str) -> Result<Self> {
        let defect = matrix.idempotence_defect();
        if defect > PROJECTOR_TOL {
            return Err(Error::NotProjector {
                which: name.to_string(),
                detail: format!("||P^2 - P||_F = {defect:.3e} exceeds {PROJECTOR_TOL:.0e}"),
            });
        }
        Ok(Self { matrix })
    }

    #[inline]
    pub fn matrix(&self) -> &SymMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatrix {
        self.matrix
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn rank(&self) -> usize {
        // Eigenvalues cluster at 0 and 1; trace rounds to the rank.
        self.matrix.trace().round() as usize
    }
}

impl std::ops::Deref for Projector {
    type Target = SymMatrix;
    fn deref(&self) -> &SymMatrix {
        &self.matrix
    }
}

/// Projector onto the strictly positive eigenspace of M.
///
/// Eigenvalues within [`KERNEL_EPS`] of zero are excluded, so the zero
/// matrix maps to the zero projector.
pub fn positive_eigenspace_projector(m: &SymMatrix) -> Projector {
    let spec = eig_sym(m);
    let n = m.dim();
    let mut out = SymMatrix::zeros(n);
    for (k, &lam) in spec.eigenvalues.iter().enumerate() {
        if lam <= KERNEL_EPS {
            break; // sorted descending
        }
        let v = spec.basis.column(k);
        for i in 0..n {
            for j in i..n {
                let cur = out.get(i, j);
                out.set_sym(i, j, cur + v[i] * v[j]);
            }
        }
    }
    Projector::new(out).expect("eigenspace sum is a projector")
}
