//! Cancellability and regularity of connections, with numeric evidence.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::random::{derive_seed, random_pd, random_projection, random_psd_rank, rng_from_seed};
use crate::solver::{solve_left, SolveReport};
use crate::symmetric::{is_projection, PdMatrix, PsdMatrix, SymmetricMatrix};
use rand::Rng;

/// Relative tolerance for comparing two functions on a grid.
const GRID_TOL: f64 = 1e-12;
/// `0 ∈ Sp(X)` is read as `λ_min(X) ⩽ SPECTRUM_ZERO`.
pub const SPECTRUM_ZERO: f64 = 1e-6;

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n).map(move |i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
}

/// `f ≡ φ` on a log grid, up to [`GRID_TOL`].
fn agrees_on_grid(sigma: &Connection, phi: impl Fn(f64) -> f64) -> bool {
    log_grid(1e-3, 1e3, 61).all(|x| match sigma.representing_value(x) {
        Ok(v) => (v - phi(x)).abs() <= GRID_TOL * (1.0 + v.abs()),
        Err(_) => false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationReport {
    pub connection: String,
    pub left_cancellable: bool,
    pub right_cancellable: bool,
    pub cancellable: bool,
    pub is_mean: bool,
    pub nontrivial_mean: bool,
    /// `f` equals its transpose on the grid.
    pub symmetric: bool,
    pub regular: bool,
    pub transpose_regular: bool,
    /// Whether the measure-side criteria agree with the function side;
    /// absent when no measure is attached.
    pub measure_consistent: Option<bool>,
    pub witnesses: BTreeMap<String, f64>,
}

pub fn classify_connection(sigma: &Connection) -> ClassificationReport {
    let (props, _) = sigma.analyze();
    let left = !props.is_constant;
    let right = !props.is_scalar_identity;
    let f1 = sigma.representing_value(1.0).unwrap_or(f64::NAN);
    let is_mean = sigma.is_mean();
    let nontrivial_mean = is_mean && !agrees_on_grid(sigma, |_| 1.0) && !agrees_on_grid(sigma, |x| x);
    let transpose = sigma.transpose();
    let symmetric = log_grid(1e-3, 1e3, 61).all(|x| {
        match (sigma.representing_value(x), transpose.representing_value(x)) {
            (Ok(f), Ok(g)) => (f - g).abs() <= 1e-10 * (1.0 + f.abs()),
            _ => false,
        }
    });
    let regular = props.f0 > 0.0;
    let transpose_regular = props.transpose_f0 > 0.0;

    let mut witnesses = BTreeMap::new();
    witnesses.insert("f(0)".to_string(), props.f0);
    witnesses.insert("f(1)".to_string(), f1);
    witnesses.insert("g(0)".to_string(), props.transpose_f0);

    let measure_consistent = sigma.scaled_measure().map(|mu| {
        let at0 = mu.atom_at(0.0);
        let at1 = mu.atom_at(1.0);
        witnesses.insert("mu({0})".to_string(), at0);
        witnesses.insert("mu({1})".to_string(), at1);
        let dirac0 = mu.mass() == 0.0 || mu.dirac_multiple(0.0).is_some();
        let dirac1 = mu.mass() == 0.0 || mu.dirac_multiple(1.0).is_some();
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * (1.0 + a.abs());
        left == !dirac0
            && right == !dirac1
            && regular == (at0 > 0.0)
            && transpose_regular == (at1 > 0.0)
            && close(at0, props.f0)
            && close(at1, props.transpose_f0)
    });

    ClassificationReport {
        connection: sigma.label(),
        left_cancellable: left,
        right_cancellable: right,
        cancellable: left && right,
        is_mean,
        nontrivial_mean,
        symmetric,
        regular,
        transpose_regular,
        measure_consistent,
        witnesses,
    }
}

/// One piece of regularity evidence: a measured value and the verdict it
/// implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityCheck {
    pub value: f64,
    pub indicates_regular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityEvidence {
    pub connection: String,
    pub regular: bool,
    /// Keyed `1_f0`, `2_mu0`, `3_i_sigma_0`, `4_a_sigma_0`, `5_i_sigma_singular`,
    /// `6_x_sigma_singular`.
    pub checks: BTreeMap<String, RegularityCheck>,
    /// `‖I σ 0 − f(0) I‖_F`.
    pub i_sigma_zero_error: f64,
    pub consistent: bool,
}

const WITNESS_SAMPLES: u64 = 5;

pub fn regularity_witness(sigma: &Connection, dim: usize, seed: u64) -> Result<RegularityEvidence> {
    if !(1..=crate::axioms::MAX_DIM).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dim must lie in 1..=32, got {dim}")));
    }
    let (props, _) = sigma.analyze();
    let regular = props.f0 > 0.0;
    let mut checks = BTreeMap::new();
    let mut put = |name: &str, value: f64, indicates_regular: bool| {
        checks.insert(name.to_string(), RegularityCheck { value, indicates_regular });
    };
    put("1_f0", props.f0, props.f0 > 0.0);
    if let Some(mu) = sigma.scaled_measure() {
        let at0 = mu.atom_at(0.0);
        put("2_mu0", at0, at0 > 0.0);
    }

    let zero = PsdMatrix::zeros(dim);
    let i_sigma_0 = sigma.evaluate(&PsdMatrix::identity(dim), &zero)?;
    let norm = i_sigma_0.frobenius_norm();
    put("3_i_sigma_0", norm, norm > 1e-7);
    let i_sigma_zero_error =
        i_sigma_0.distance(&SymmetricMatrix::scaled_identity(dim, props.f0))?;

    let mut a_sigma_0: f64 = f64::INFINITY;
    let mut i_sigma_sing: f64 = f64::INFINITY;
    let mut x_sigma_sing: f64 = f64::INFINITY;
    for k in 0..WITNESS_SAMPLES {
        let mut rng = rng_from_seed(derive_seed(seed, k));
        let a = random_pd(&mut rng, dim, 0.2, 5.0);
        let x = random_pd(&mut rng, dim, 0.2, 5.0);
        let rank = rng.random_range(0..dim);
        let singular = random_psd_rank(&mut rng, dim, rank, 0.2, 5.0);
        a_sigma_0 = a_sigma_0.min(sigma.evaluate(&a, &zero)?.frobenius_norm());
        let v = sigma.evaluate(&PsdMatrix::identity(dim), &singular)?;
        i_sigma_sing = i_sigma_sing.min(v.min_eigenvalue()?);
        let v = sigma.evaluate(&x, &singular)?;
        x_sigma_sing = x_sigma_sing.min(v.min_eigenvalue()?);
    }
    put("4_a_sigma_0", a_sigma_0, a_sigma_0 > 1e-7);
    put("5_i_sigma_singular", i_sigma_sing, i_sigma_sing > SPECTRUM_ZERO);
    put("6_x_sigma_singular", x_sigma_sing, x_sigma_sing > SPECTRUM_ZERO);

    let consistent =
        checks.values().all(|c| c.indicates_regular == regular) && i_sigma_zero_error <= 1e-9;
    Ok(RegularityEvidence {
        connection: sigma.label(),
        regular,
        checks,
        i_sigma_zero_error,
        consistent,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProjectionReport {
    pub connection: String,
    pub regular: bool,
    pub nontrivial_mean: bool,
    pub samples: usize,
    /// Largest `‖I σ P − P‖_F` over random projections `P`.
    pub worst_projection_residual: f64,
    /// Random `A` with `f(A) = A` within `1e−8`.
    pub fixed_points_found: usize,
    /// Fixed points that are not projections.
    pub non_projection_fixed_points: usize,
    pub grid_points: usize,
    /// Grid points where `x < f(x) < 1` or `1 < f(x) < x` fails.
    pub sandwich_failures: usize,
}

impl ProjectionReport {
    /// All assertions that apply to this connection hold.
    pub fn holds(&self) -> bool {
        let fixed = self.regular || self.worst_projection_residual <= 1e-9;
        let lemma = !self.nontrivial_mean
            || (self.non_projection_fixed_points == 0 && self.sandwich_failures == 0);
        fixed && lemma
    }
}

pub const PROJECTION_SAMPLES: usize = 50;
pub const SANDWICH_POINTS: usize = 1000;

/// Counts violations of `0 < x < 1 ⟹ x < f(x) < 1` and
/// `x > 1 ⟹ 1 < f(x) < x` on a log grid over `[1e−3, 1e3]`.
pub fn sandwich_failures(sigma: &Connection, points: usize) -> usize {
    log_grid(1e-3, 1e3, points)
        .filter(|&x| x != 1.0)
        .filter(|&x| match sigma.representing_value(x) {
            Ok(v) if x < 1.0 => !(x < v && v < 1.0),
            Ok(v) => !(1.0 < v && v < x),
            Err(_) => true,
        })
        .count()
}

pub fn projection_fixed_points(sigma: &Connection, dim: usize, seed: u64) -> Result<ProjectionReport> {
    if !sigma.is_mean() {
        return Err(Error::NotAMean {
            f1: sigma.representing_value(1.0)?,
        });
    }
    if !(1..=crate::axioms::MAX_DIM).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dim must lie in 1..=32, got {dim}")));
    }
    let class = classify_connection(sigma);
    let id = PsdMatrix::identity(dim);
    let mut worst: f64 = 0.0;
    let mut found = 0;
    let mut bad = 0;
    for k in 0..PROJECTION_SAMPLES as u64 {
        let mut rng = rng_from_seed(derive_seed(seed, k));
        let rank = rng.random_range(0..=dim);
        let p = random_projection(&mut rng, dim, rank);
        worst = worst.max(sigma.evaluate(&id, &p)?.distance(&p)?);

        // Candidates mixing exact 0/1 eigenvalues with generic ones.
        let q = crate::random::random_orthogonal(&mut rng, dim);
        let spectrum: Vec<f64> = (0..dim)
            .map(|_| match rng.random_range(0..3) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.random_range(0.0..3.0),
            })
            .collect();
        let d = nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&spectrum));
        let a = PsdMatrix::new(SymmetricMatrix::new(&q * d * q.transpose())?, 1e-12)?;
        let fa = sigma.evaluate(&id, &a)?;
        if fa.distance(&a)? <= 1e-8 {
            found += 1;
            if !is_projection(&a, 1e-6) {
                bad += 1;
            }
        }
    }
    Ok(ProjectionReport {
        connection: sigma.label(),
        regular: class.regular,
        nontrivial_mean: class.nontrivial_mean,
        samples: PROJECTION_SAMPLES,
        worst_projection_residual: worst,
        fixed_points_found: found,
        non_projection_fixed_points: bad,
        grid_points: SANDWICH_POINTS,
        sandwich_failures: if class.nontrivial_mean {
            sandwich_failures(sigma, SANDWICH_POINTS)
        } else {
            0
        },
    })
}

/// Solves `A σ X = 0`.
pub fn zero_equation(sigma: &Connection, a: &PdMatrix) -> Result<SolveReport> {
    solve_left(sigma, a, &PsdMatrix::zeros(a.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionSpec;
    use crate::measure::FiniteMeasure;
    use crate::solver::SolveStatus;

    fn conn(f: FunctionSpec) -> Connection {
        Connection::from_function(f).unwrap()
    }

    #[test]
    fn classification_examples() {
        let l = classify_connection(&Connection::left_trivial());
        assert!(!l.left_cancellable && l.right_cancellable && !l.cancellable);
        assert!(l.regular && l.is_mean && !l.nontrivial_mean);
        let r = classify_connection(&conn(FunctionSpec::scalar_identity(0.5).unwrap()));
        assert!(r.left_cancellable && !r.right_cancellable);
        assert!(!r.is_mean && !r.regular && r.transpose_regular);
        let g = classify_connection(&conn(FunctionSpec::geometric(0.5).unwrap()));
        assert!(g.cancellable && g.symmetric && g.is_mean && g.nontrivial_mean);
        assert_eq!(g.measure_consistent, Some(true));
        let g = classify_connection(&conn(FunctionSpec::geometric(0.25).unwrap()));
        assert!(!g.symmetric);
    }

    #[test]
    fn measure_side_agrees_across_catalog() {
        for f in crate::function::catalog_examples() {
            let c = classify_connection(&conn(f.clone()));
            assert_ne!(c.measure_consistent, Some(false), "{f}");
        }
        let mu = FiniteMeasure::new(vec![(0.0, 0.3), (1.0, 0.7)], None).unwrap();
        let c = classify_connection(&Connection::from_measure(mu));
        assert!(c.regular && c.transpose_regular && c.cancellable);
        assert_eq!(c.measure_consistent, Some(true));
    }

    #[test]
    fn regularity_examples() {
        let log = regularity_witness(&conn(FunctionSpec::Logarithmic), 3, 1).unwrap();
        assert!(!log.regular && log.consistent, "{log:?}");
        let ar = regularity_witness(&conn(FunctionSpec::arithmetic(0.25).unwrap()), 3, 1).unwrap();
        assert!(ar.regular && ar.consistent, "{ar:?}");
        assert_eq!(ar.checks["1_f0"].value, 0.75);
        let h = regularity_witness(&conn(FunctionSpec::harmonic(0.5).unwrap()), 3, 1).unwrap();
        assert!(!h.regular && h.consistent, "{h:?}");
    }

    #[test]
    fn projections_fixed_by_nonregular_means() {
        let geo = projection_fixed_points(&conn(FunctionSpec::geometric(0.5).unwrap()), 3, 2).unwrap();
        assert!(geo.holds(), "{geo:?}");
        assert!(geo.fixed_points_found > 0);
        let ar = conn(FunctionSpec::arithmetic(0.5).unwrap());
        let p = PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let v = ar.evaluate(&PsdMatrix::identity(2), &p).unwrap();
        let want = SymmetricMatrix::from_diagonal(&[1.0, 0.5]).unwrap();
        assert!(v.distance(&want).unwrap() < 1e-15);
        assert!(matches!(
            projection_fixed_points(&conn(FunctionSpec::constant(2.0).unwrap()), 2, 0),
            Err(Error::NotAMean { .. })
        ));
    }

    #[test]
    fn half_identity_is_not_fixed() {
        let sigma = conn(FunctionSpec::Logarithmic);
        let f = sigma.representing_value(0.5).unwrap();
        assert!(f > 0.5 && f < 1.0);
        assert_eq!(sandwich_failures(&sigma, 1000), 0);
        assert!(sandwich_failures(&Connection::left_trivial(), 100) > 0);
    }

    #[test]
    fn zero_equation_examples() {
        let a = PdMatrix::identity(2);
        let r = zero_equation(&conn(FunctionSpec::Logarithmic), &a).unwrap();
        assert_eq!(r.status, SolveStatus::UniqueSolution);
        assert!(r.x.unwrap().frobenius_norm() < 1e-12);
        let r = zero_equation(&conn(FunctionSpec::arithmetic(0.5).unwrap()), &a).unwrap();
        assert_eq!(r.status, SolveStatus::RangeViolation);
        let r = zero_equation(&Connection::left_trivial(), &a).unwrap();
        assert_eq!(r.status, SolveStatus::NotCancellable);
    }
}
