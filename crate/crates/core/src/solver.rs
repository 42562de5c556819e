//! Solving `A σ X = B` and `X σ A = B` for the unknown `X`.
//!
//! With `M = A^{-1/2} B A^{-1/2}` the left equation has a solution exactly
//! when the spectrum of `M` lies in the range of the representing function
//! `f`, and then `X = A^{1/2} f^{-1}(M) A^{1/2}` is the only one.

use nalgebra::DVector;
use serde::Serialize;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::function::RangeDescriptor;
use crate::symmetric::{loewner_margin, sqrt_pair, PdMatrix, PsdMatrix, SymmetricMatrix, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    UniqueSolution,
    RangeViolation,
    NotCancellable,
}

/// Outcome of a solve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub x: Option<PsdMatrix>,
    /// `(λ, distance to the range)` for each eigenvalue of `M` outside it.
    pub violating_eigenvalues: Vec<(f64, f64)>,
    /// `‖A σ X − B‖_F`.
    pub residual: Option<f64>,
}

impl SolveReport {
    fn not_cancellable() -> Self {
        Self {
            status: SolveStatus::NotCancellable,
            x: None,
            violating_eigenvalues: Vec::new(),
            residual: None,
        }
    }

    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::UniqueSolution
    }
}

/// Range membership with slack: the lower end and an attained upper end are
/// widened by `tol`, an open upper end is narrowed by it.
fn range_gap(range: &RangeDescriptor, lambda: f64, tol: f64) -> Option<f64> {
    if lambda < range.lower - tol {
        return Some(range.lower - lambda);
    }
    if range.upper.is_infinite() {
        return None;
    }
    let limit = if range.upper_attained {
        range.upper + tol
    } else {
        range.upper - tol
    };
    if lambda > limit {
        Some((lambda - range.upper).max(0.0))
    } else {
        None
    }
}

/// Solves `A σ X = B`.
pub fn solve_left(sigma: &Connection, a: &PdMatrix, b: &PsdMatrix) -> Result<SolveReport> {
    a.check_dim(b)?;
    let (props, range) = sigma.analyze();
    if props.is_constant {
        return Ok(SolveReport::not_cancellable());
    }
    let tol = sigma.tolerances();
    let (root, inv_root) = sqrt_pair(a, tol.psd_tol)?;
    let m = inv_root.sandwich(b)?.eigh()?;
    let snap = tol.psd_tol * m.max_eigenvalue().max(1.0);
    let spectrum: Vec<f64> = m
        .eigenvalues
        .iter()
        .map(|&l| if l.abs() <= snap { 0.0 } else { l })
        .collect();

    let violating: Vec<(f64, f64)> = spectrum
        .iter()
        .filter_map(|&l| range_gap(&range, l, tol.range_tol).map(|g| (l, g)))
        .collect();
    if !violating.is_empty() {
        return Ok(SolveReport {
            status: SolveStatus::RangeViolation,
            x: None,
            violating_eigenvalues: violating,
            residual: None,
        });
    }

    let mut inner = DVector::zeros(spectrum.len());
    for (out, &l) in inner.iter_mut().zip(&spectrum) {
        let clamped = if l < range.lower {
            range.lower
        } else if l > range.upper {
            range.upper
        } else {
            l
        };
        *out = sigma.representing_inverse(clamped)?;
    }
    let x_raw = root.sandwich(&m.with_eigenvalues(&inner))?;
    let x = PsdMatrix::new(x_raw, tol.psd_tol * (1.0 + inner.amax()))?;
    let residual = sigma.evaluate(a, &x)?.distance(b)?;
    let bound = tol.solve_rtol * (1.0 + b.frobenius_norm());
    if residual > bound {
        return Err(Error::Residual { residual, bound });
    }
    Ok(SolveReport {
        status: SolveStatus::UniqueSolution,
        x: Some(x),
        violating_eigenvalues: Vec::new(),
        residual: Some(residual),
    })
}

/// Solves `X σ A = B` through the transpose, `A σ' X = B`.
pub fn solve_right(sigma: &Connection, a: &PdMatrix, b: &PsdMatrix) -> Result<SolveReport> {
    solve_left(&sigma.transpose(), a, b)
}

/// `A σ X = B` is solvable for every `A > 0` and `B ⩾ 0` exactly when
/// `f(0) = 0` and `f` is unbounded.
pub fn always_solvable(sigma: &Connection) -> bool {
    let (props, range) = sigma.analyze();
    !props.is_constant && props.f0 == 0.0 && range.upper.is_infinite()
}

/// Closed-form solvability of `A #_{p,α} X = B` for the power means
/// `f(x) = (1 − α + α x^p)^{1/p}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolvabilityCondition {
    pub solvable: bool,
    /// `(1 − α)^{1/p}`; absent for `p = 0`.
    pub threshold: Option<f64>,
    /// Smallest eigenvalue of `B − tA` (`p > 0`) or `tA − B` (`p < 0`).
    pub margin: Option<f64>,
    /// `A^{1/2} f_{p,1/α}(A^{-1/2} B A^{-1/2}) A^{1/2}` when solvable.
    pub solution: Option<PsdMatrix>,
}

/// `(1 − β + β y^p)^{1/p}` with `β = 1/α`, the inverse of `f_{p,α}`.
fn power_inverse(p: f64, alpha: f64, y: f64) -> f64 {
    if p == 0.0 {
        return y.powf(1.0 / alpha);
    }
    if p < 0.0 && y == 0.0 {
        return 0.0;
    }
    let base = (1.0 - 1.0 / alpha + y.powf(p) / alpha).max(0.0);
    base.powf(1.0 / p)
}

pub fn quasi_arithmetic_solvability(
    p: f64,
    alpha: f64,
    a: &PdMatrix,
    b: &PsdMatrix,
    tol: &Tolerances,
) -> Result<SolvabilityCondition> {
    if !(-1.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("p = {p} outside [-1, 1]")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside (0, 1)")));
    }
    a.check_dim(b)?;
    let (threshold, margin, solvable) = if p == 0.0 {
        (None, None, true)
    } else {
        let t = (1.0 - alpha).powf(1.0 / p);
        let ta = a.scale(t);
        if p > 0.0 {
            let m = loewner_margin(&ta, b)?;
            (Some(t), Some(m), m >= -tol.order_tol)
        } else {
            let m = loewner_margin(b, &ta)?;
            (Some(t), Some(m), m > tol.order_tol)
        }
    };
    let solution = if solvable {
        let (root, inv_root) = sqrt_pair(a, tol.psd_tol)?;
        let m = inv_root.sandwich(b)?.eigh()?;
        let lower = match threshold {
            Some(t) if p > 0.0 => t,
            _ => 0.0,
        };
        let inner = m.eigenvalues.map(|y| power_inverse(p, alpha, y.max(lower)));
        let x = root.sandwich(&m.with_eigenvalues(&inner))?;
        Some(PsdMatrix::new(x, tol.psd_tol * (1.0 + inner.amax()))?)
    } else {
        None
    };
    Ok(SolvabilityCondition {
        solvable,
        threshold,
        margin,
        solution,
    })
}

/// Largest finite-difference ratio `‖X(A, B + δE) − X(A, B)‖_F / (δ‖E‖_F)`
/// over the symmetric coordinate directions `E`.
pub fn solution_continuity_probe(sigma: &Connection, a: &PdMatrix, b: &PsdMatrix, delta: f64) -> Result<f64> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must be >= 0")));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let solve = |rhs: &PsdMatrix| -> Result<PsdMatrix> {
        let report = solve_left(sigma, a, rhs)?;
        report.x.ok_or_else(|| {
            Error::InvalidParameter(format!("no solution to perturb: {:?}", report.status))
        })
    };
    let base = solve(b)?;
    let n = b.dim();
    let psd_tol = sigma.tolerances().psd_tol;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let mut e = SymmetricMatrix::zeros(n).into_matrix();
            e[(i, j)] = 1.0;
            e[(j, i)] = 1.0;
            let e = SymmetricMatrix::new(e)?;
            let shifted = PsdMatrix::new(b.add(&e.scale(delta))?, psd_tol)?;
            let moved = solve(&shifted)?;
            worst = worst.max(moved.distance(&base)? / (delta * e.frobenius_norm()));
        }
    }
    Ok(worst)
}
