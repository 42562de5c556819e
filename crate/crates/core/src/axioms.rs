//! Randomized checks of the connection axioms.
//!
//! Each trial draws its own generator from the master seed, so reports are
//! identical whatever order the trials finish in.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::random::{
    derive_seed, random_increment, random_pd, random_symmetric_invertible, rng_from_seed,
};
use crate::symmetric::{congruence, loewner_margin, PsdMatrix, SymmetricMatrix};

pub const MAX_DIM: usize = 32;
/// Steps of the `A + 2^{-n} I` sequence.
pub const M3_STEPS: i32 = 20;

pub const M1: &str = "m1_monotonicity";
pub const M2_INEQUALITY: &str = "m2_transformer_inequality";
pub const M2_EQUALITY: &str = "m2_congruence_invariance";
pub const M3_MONOTONE: &str = "m3_monotone_decrease";
pub const M3_CONVERGENCE: &str = "m3_convergence";
pub const FIXED_POINT: &str = "fixed_point";
pub const NORMALIZATION: &str = "normalization";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomStat {
    pub trials: usize,
    pub failures: usize,
    #[serde(serialize_with = "crate::report::serialize_extended")]
    pub worst_violation: f64,
    pub threshold: f64,
}

impl AxiomStat {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub connection: String,
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    pub axioms: BTreeMap<String, AxiomStat>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.axioms.values().all(AxiomStat::passed)
    }

    pub fn get(&self, name: &str) -> Option<&AxiomStat> {
        self.axioms.get(name)
    }
}

fn thresholds(sigma: &Connection) -> [(&'static str, f64); 7] {
    let order = sigma.tolerances().order_tol;
    [
        (M1, order),
        (M2_INEQUALITY, order),
        (M2_EQUALITY, 1e-8),
        (M3_MONOTONE, 1e-9),
        (M3_CONVERGENCE, 1e-5),
        (FIXED_POINT, 1e-9),
        (NORMALIZATION, 1e-9),
    ]
}

/// Negative part of the smallest eigenvalue of `hi − lo`.
fn order_violation(lo: &SymmetricMatrix, hi: &SymmetricMatrix) -> Result<f64> {
    Ok((-loewner_margin(lo, hi)?).max(0.0))
}

fn relative_gap(x: &SymmetricMatrix, y: &SymmetricMatrix) -> Result<f64> {
    Ok(x.distance(y)? / (1.0 + y.frobenius_norm()))
}

fn run_trial(sigma: &Connection, dim: usize, seed: u64) -> [f64; 7] {
    let mut rng = rng_from_seed(seed);
    let a = random_pd(&mut rng, dim, 0.2, 5.0).into_psd();
    let b = random_pd(&mut rng, dim, 0.2, 5.0).into_psd();
    let da = random_increment(&mut rng, dim, 2.0);
    let db = random_increment(&mut rng, dim, 2.0);
    let c_sym = random_symmetric_invertible(&mut rng, dim, 0.3, 3.0);
    let c_pd = random_pd(&mut rng, dim, 0.3, 3.0);
    let f1 = sigma.representing_value(1.0);

    let m1 = || -> Result<f64> {
        let lo = sigma.evaluate(&a, &b)?;
        let hi = sigma.evaluate(&a.add_psd(&da)?, &b.add_psd(&db)?)?;
        order_violation(&lo, &hi)
    };
    let ab = sigma.evaluate(&a, &b);
    let congruent = |c: &SymmetricMatrix| -> Result<(SymmetricMatrix, SymmetricMatrix)> {
        let lhs = c.sandwich(ab.as_ref().map_err(Clone::clone)?)?;
        let rhs = sigma.evaluate(&congruence(c, &a)?, &congruence(c, &b)?)?;
        Ok((lhs, rhs.into_symmetric()))
    };
    let m2_ineq = || -> Result<f64> {
        let (lhs, rhs) = congruent(&c_sym)?;
        order_violation(&lhs, &rhs)
    };
    let m2_eq = || -> Result<f64> {
        let (lhs, rhs) = congruent(&c_pd)?;
        relative_gap(&rhs, &lhs)
    };
    let m3 = || -> Result<(f64, f64)> {
        let limit = ab.as_ref().map_err(Clone::clone)?;
        let mut worst: f64 = 0.0;
        let mut previous: Option<PsdMatrix> = None;
        for n in 0..=M3_STEPS {
            let eps = 0.5f64.powi(n);
            let x = sigma.evaluate(&a.shift_nonneg(eps), &b.shift_nonneg(eps))?;
            if let Some(p) = &previous {
                worst = worst.max(order_violation(&x, p)?);
            }
            previous = Some(x);
        }
        let last = previous.expect("at least one step");
        Ok((worst, relative_gap(&last, limit)?))
    };
    let fixed = || -> Result<f64> {
        let aa = sigma.evaluate(&a, &a)?;
        relative_gap(&aa, &a.scale(f1.clone()?))
    };
    let norm = || -> Result<f64> {
        let id = PsdMatrix::identity(dim);
        let ii = sigma.evaluate(&id, &id)?;
        relative_gap(&ii, &SymmetricMatrix::scaled_identity(dim, f1.clone()?))
    };

    let or_inf = |r: Result<f64>| r.unwrap_or(f64::INFINITY);
    let (m3_mono, m3_conv) = m3().unwrap_or((f64::INFINITY, f64::INFINITY));
    [
        or_inf(m1()),
        or_inf(m2_ineq()),
        or_inf(m2_eq()),
        m3_mono,
        m3_conv,
        or_inf(fixed()),
        or_inf(norm()),
    ]
}

/// Checks monotonicity, the transformer inequality, congruence invariance,
/// continuity along `A + 2^{-n}I`, and `A σ A = f(1) A` on random matrices.
pub fn verify_axioms(sigma: &Connection, trials: usize, dim: usize, seed: u64) -> Result<AxiomReport> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    if !(1..=MAX_DIM).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "dim must lie in 1..={MAX_DIM}, got {dim}"
        )));
    }
    let results: Vec<[f64; 7]> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_trial(sigma, dim, derive_seed(seed, i)))
        .collect();
    let mut axioms = BTreeMap::new();
    for (k, (name, threshold)) in thresholds(sigma).into_iter().enumerate() {
        let mut stat = AxiomStat {
            trials,
            failures: 0,
            worst_violation: 0.0,
            threshold,
        };
        for r in &results {
            let v = r[k];
            if !(v <= threshold) {
                stat.failures += 1;
            }
            if !(v <= stat.worst_violation) {
                stat.worst_violation = v;
            }
        }
        axioms.insert(name.to_string(), stat);
    }
    Ok(AxiomReport {
        connection: sigma.label(),
        trials,
        dim,
        seed,
        axioms,
    })
}
