//! Real symmetric matrices, their spectral calculus and the Loewner order.
//!
//! Every matrix that enters the toolkit is symmetrized on construction via
//! `(M + Mᵀ) / 2`, so the stored entries are exactly symmetric. Positivity is
//! carried in the type: [`PsdMatrix`] and [`PdMatrix`] are validated against
//! an eigenvalue tolerance once and then trusted.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by the toolkit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Eigenvalues in `[-psd_tol, 0)` count as zero; `> psd_tol` counts as positive.
    pub psd_tol: f64,
    /// Slack for Loewner-order comparisons.
    pub order_tol: f64,
    /// Slack for spectrum-in-range membership in the solver.
    pub range_tol: f64,
    /// Relative residual bound for accepted solutions.
    pub solve_rtol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            psd_tol: 1e-10,
            order_tol: 1e-8,
            range_tol: 1e-8,
            solve_rtol: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.psd_tol, self.order_tol, self.range_tol, self.solve_rtol];
        if all.iter().all(|t| t.is_finite() && *t >= 0.0) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "tolerances must be finite and nonnegative: {self:?}"
            )))
        }
    }
}

/// A real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    inner: DMatrix<f64>,
}

impl SymmetricMatrix {
    /// Symmetrizes `m` as `(m + mᵀ) / 2`.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::Shape(format!("{}x{}", m.nrows(), m.ncols())));
        }
        if m.nrows() == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self::symmetrized(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::Shape(format!(
                "expected {n} entries per row, found {}",
                bad.len()
            )));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn scaled_identity(n: usize, c: f64) -> Self {
        Self {
            inner: DMatrix::identity(n, n) * c,
        }
    }

    pub(crate) fn symmetrized(m: DMatrix<f64>) -> Self {
        let t = m.transpose();
        Self {
            inner: (m + t) * 0.5,
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.inner
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.norm()
    }

    pub fn check_dim(&self, other: &SymmetricMatrix) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }

    pub fn add(&self, other: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        self.check_dim(other)?;
        Ok(Self {
            inner: &self.inner + &other.inner,
        })
    }

    pub fn sub(&self, other: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        self.check_dim(other)?;
        Ok(Self {
            inner: &self.inner - &other.inner,
        })
    }

    pub fn scale(&self, c: f64) -> SymmetricMatrix {
        Self {
            inner: &self.inner * c,
        }
    }

    /// Adds `c` to every diagonal entry.
    pub fn shift(&self, c: f64) -> SymmetricMatrix {
        let n = self.dim();
        Self {
            inner: &self.inner + DMatrix::identity(n, n) * c,
        }
    }

    /// Frobenius distance `‖self − other‖_F`.
    pub fn distance(&self, other: &SymmetricMatrix) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    pub fn eigh(&self) -> Result<EigenDecomposition> {
        eigh(self)
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigh()?.min_eigenvalue())
    }

    /// `self · other · self` for a symmetric `self`.
    pub fn sandwich(&self, other: &SymmetricMatrix) -> Result<SymmetricMatrix> {
        self.check_dim(other)?;
        Ok(Self::symmetrized(&self.inner * &other.inner * &self.inner))
    }

    /// Applies `phi` to the spectrum.
    pub fn map_spectrum(&self, phi: impl Fn(f64) -> Result<f64>) -> Result<SymmetricMatrix> {
        self.eigh()?.try_map(phi)
    }
}

/// `A = Q Λ Qᵀ` with ascending eigenvalues and orthonormal columns in `Q`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    pub fn reconstruct(&self) -> SymmetricMatrix {
        self.with_eigenvalues(&self.eigenvalues)
    }

    /// `Q diag(values) Qᵀ`.
    pub fn with_eigenvalues(&self, values: &DVector<f64>) -> SymmetricMatrix {
        let q = &self.eigenvectors;
        let mut scaled = q.clone();
        for (mut col, v) in scaled.column_iter_mut().zip(values.iter()) {
            col *= *v;
        }
        SymmetricMatrix::symmetrized(scaled * q.transpose())
    }

    /// `Q φ(Λ) Qᵀ`; non-finite values of `φ` are domain errors.
    pub fn try_map(&self, phi: impl Fn(f64) -> Result<f64>) -> Result<SymmetricMatrix> {
        let mut values = DVector::zeros(self.eigenvalues.len());
        for (out, &lambda) in values.iter_mut().zip(self.eigenvalues.iter()) {
            let v = phi(lambda)?;
            if !v.is_finite() {
                return Err(Error::Domain {
                    x: lambda,
                    reason: format!("non-finite value {v}"),
                });
            }
            *out = v;
        }
        Ok(self.with_eigenvalues(&values))
    }
}

/// Symmetric eigendecomposition with eigenvalues sorted ascending.
pub fn eigh(a: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if a.inner.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let eig = a.inner.clone().symmetric_eigen();
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// A symmetric matrix validated as positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdMatrix {
    sym: SymmetricMatrix,
}

impl PsdMatrix {
    /// Fails with [`Error::NotPsd`] when the smallest eigenvalue is below
    /// `-tol`. Eigenvalues in `[-tol, 0)` are clamped to zero.
    pub fn new(sym: SymmetricMatrix, tol: f64) -> Result<Self> {
        let eig = sym.eigh()?;
        let min = eig.min_eigenvalue();
        if min < -tol {
            return Err(Error::NotPsd {
                min_eigenvalue: min,
            });
        }
        if min < 0.0 {
            let clamped = eig.eigenvalues.map(|v| v.max(0.0));
            return Ok(Self {
                sym: eig.with_eigenvalues(&clamped),
            });
        }
        Ok(Self { sym })
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        Self::new(SymmetricMatrix::from_rows(rows)?, tol)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(SymmetricMatrix::from_diagonal(diag)?, 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            sym: SymmetricMatrix::identity(n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            sym: SymmetricMatrix::zeros(n),
        }
    }

    /// Wraps a matrix known to be PSD by construction.
    pub(crate) fn new_unchecked(sym: SymmetricMatrix) -> Self {
        Self { sym }
    }

    pub fn as_symmetric(&self) -> &SymmetricMatrix {
        &self.sym
    }

    pub fn into_symmetric(self) -> SymmetricMatrix {
        self.sym
    }

    /// Nonnegative scaling.
    pub fn scale_nonneg(&self, c: f64) -> Result<PsdMatrix> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {c} must be >= 0")));
        }
        Ok(Self::new_unchecked(self.sym.scale(c)))
    }

    pub fn add_psd(&self, other: &PsdMatrix) -> Result<PsdMatrix> {
        Ok(Self::new_unchecked(self.sym.add(&other.sym)?))
    }

    /// `self + c·I` for `c >= 0`.
    pub fn shift_nonneg(&self, c: f64) -> PsdMatrix {
        debug_assert!(c >= 0.0);
        Self::new_unchecked(self.sym.shift(c))
    }
}

impl Deref for PsdMatrix {
    type Target = SymmetricMatrix;

    fn deref(&self) -> &SymmetricMatrix {
        &self.sym
    }
}

/// A symmetric matrix validated as positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct PdMatrix {
    psd: PsdMatrix,
}

impl PdMatrix {
    /// Fails with [`Error::NotPd`] unless the smallest eigenvalue exceeds `tol`.
    pub fn new(sym: SymmetricMatrix, tol: f64) -> Result<Self> {
        let min = sym.min_eigenvalue()?;
        if min > tol {
            Ok(Self {
                psd: PsdMatrix::new_unchecked(sym),
            })
        } else {
            Err(Error::NotPd {
                min_eigenvalue: min,
            })
        }
    }

    pub fn from_psd(psd: PsdMatrix, tol: f64) -> Result<Self> {
        Self::new(psd.into_symmetric(), tol)
    }

    pub fn from_rows(rows: &[Vec<f64>], tol: f64) -> Result<Self> {
        Self::new(SymmetricMatrix::from_rows(rows)?, tol)
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(SymmetricMatrix::from_diagonal(diag)?, 0.0)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            psd: PsdMatrix::identity(n),
        }
    }

    pub(crate) fn new_unchecked(sym: SymmetricMatrix) -> Self {
        Self {
            psd: PsdMatrix::new_unchecked(sym),
        }
    }

    pub fn as_psd(&self) -> &PsdMatrix {
        &self.psd
    }

    pub fn into_psd(self) -> PsdMatrix {
        self.psd
    }
}

impl Deref for PdMatrix {
    type Target = PsdMatrix;

    fn deref(&self) -> &PsdMatrix {
        &self.psd
    }
}

/// Serialized as `{"dim": n, "rows": [[..], ..]}`, the matrix file layout.
impl Serialize for SymmetricMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Matrix", 2)?;
        st.serialize_field("dim", &self.dim())?;
        st.serialize_field("rows", &self.rows())?;
        st.end()
    }
}

impl Serialize for PsdMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.sym.serialize(s)
    }
}

/// Functional calculus `Q φ(Λ) Qᵀ` on a PSD matrix.
pub fn apply_fn(a: &PsdMatrix, phi: impl Fn(f64) -> f64) -> Result<SymmetricMatrix> {
    try_apply_fn(a, |x| Ok(phi(x)))
}

/// Like [`apply_fn`] for a fallible `φ`.
pub fn try_apply_fn(a: &PsdMatrix, phi: impl Fn(f64) -> Result<f64>) -> Result<SymmetricMatrix> {
    a.map_spectrum(phi)
}

/// Smallest eigenvalue of `b − a`; nonnegative exactly when `a ⩽ b`.
pub fn loewner_margin(a: &SymmetricMatrix, b: &SymmetricMatrix) -> Result<f64> {
    a.check_dim(b)?;
    b.sub(a)?.min_eigenvalue()
}

/// `a ⩽ b` in the Loewner order, up to `tol`.
pub fn loewner_leq(a: &SymmetricMatrix, b: &SymmetricMatrix, tol: f64) -> Result<bool> {
    Ok(loewner_margin(a, b)? >= -tol)
}

/// Returns `(A^{1/2}, A^{-1/2})`.
pub fn sqrt_pair(a: &PsdMatrix, psd_tol: f64) -> Result<(PdMatrix, PdMatrix)> {
    let eig = a.eigh()?;
    let min = eig.min_eigenvalue();
    if min <= psd_tol {
        return Err(Error::NotPd {
            min_eigenvalue: min,
        });
    }
    let root = eig.with_eigenvalues(&eig.eigenvalues.map(f64::sqrt));
    let inv_root = eig.with_eigenvalues(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    Ok((PdMatrix::new_unchecked(root), PdMatrix::new_unchecked(inv_root)))
}

/// `C A C`.
pub fn congruence(c: &SymmetricMatrix, a: &PsdMatrix) -> Result<PsdMatrix> {
    Ok(PsdMatrix::new_unchecked(c.sandwich(a)?))
}

/// Every eigenvalue within `tol` of 0 or 1.
pub fn is_projection(a: &PsdMatrix, tol: f64) -> bool {
    match a.eigh() {
        Ok(eig) => eig
            .eigenvalues
            .iter()
            .all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol),
        Err(_) => false,
    }
}
