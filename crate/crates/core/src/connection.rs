//! Connections `σ` and their evaluation `A σ B`.
//!
//! For invertible `A` the value is `k · A^{1/2} f(A^{-1/2} B A^{-1/2}) A^{1/2}`.
//! When `A` is singular but `B` is invertible the transpose supplies an exact
//! route, `A σ B = B σ' A` with representing function `g(x) = x f(1/x)`. When
//! both are singular, `A` is regularized as `A + εI` along a decreasing
//! schedule and the limit is accepted only once successive iterates agree.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::function::{invert_monotone, FunctionProps, FunctionSpec, RangeDescriptor};
use crate::measure::{eval_from_measure, known_measure_of, FiniteMeasure};
use crate::spec_text;
use crate::symmetric::{EigenDecomposition, PsdMatrix, SymmetricMatrix, Tolerances};

/// Decreasing `ε` values used to reach singular arguments from above.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationSchedule {
    epsilons: Vec<f64>,
    convergence_tol: f64,
}

impl Default for RegularizationSchedule {
    /// `ε_j = 1e−2 · 2^{−j}` for `j = 0..=24`, tolerance `1e−7`.
    fn default() -> Self {
        Self {
            epsilons: (0..=24).map(|j| 1e-2 * 0.5f64.powi(j)).collect(),
            convergence_tol: 1e-7,
        }
    }
}

impl RegularizationSchedule {
    pub fn new(epsilons: Vec<f64>, convergence_tol: f64) -> Result<Self> {
        if epsilons.len() < 2 {
            return Err(Error::InvalidParameter("schedule needs at least two steps".into()));
        }
        if epsilons.iter().any(|e| !(*e > 0.0) || !e.is_finite())
            || epsilons.windows(2).any(|w| w[1] >= w[0])
        {
            return Err(Error::InvalidParameter(
                "schedule must be strictly decreasing and positive".into(),
            ));
        }
        if !(convergence_tol > 0.0) {
            return Err(Error::InvalidParameter("convergence tolerance must be > 0".into()));
        }
        Ok(Self {
            epsilons,
            convergence_tol,
        })
    }

    pub fn epsilons(&self) -> &[f64] {
        &self.epsilons
    }

    pub fn convergence_tol(&self) -> f64 {
        self.convergence_tol
    }
}

type ScalarFn<'a> = &'a dyn Fn(f64) -> Result<f64>;

/// `(A^{1/2}, A^{-1/2})` from an eigendecomposition with positive spectrum.
fn root_pair(eig: &EigenDecomposition) -> (SymmetricMatrix, SymmetricMatrix) {
    let root = eig.with_eigenvalues(&eig.eigenvalues.map(f64::sqrt));
    let inv_root = eig.with_eigenvalues(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    (root, inv_root)
}

/// `R f(R⁻¹ B R⁻¹) R` with `R = A^{1/2}`.
///
/// Eigenvalues of the inner matrix below `psd_tol · max(1, λ_max)` are treated
/// as exact zeros, so `f(0)` conventions apply to numerically singular inputs.
fn congruence_route(
    f: ScalarFn<'_>,
    a_eig: &EigenDecomposition,
    b: &SymmetricMatrix,
    psd_tol: f64,
) -> Result<SymmetricMatrix> {
    let (root, inv_root) = root_pair(a_eig);
    let inner = inv_root.sandwich(b)?.eigh()?;
    let snap = psd_tol * inner.max_eigenvalue().max(1.0);
    let mapped = inner.try_map(|l| f(if l <= snap { 0.0 } else { l }))?;
    root.sandwich(&mapped)
}

/// Shared evaluation for any representing function `f` with optional
/// transpose `g`.
pub(crate) fn connect(
    f: ScalarFn<'_>,
    g: Option<ScalarFn<'_>>,
    a: &PsdMatrix,
    b: &PsdMatrix,
    psd_tol: f64,
    schedule: &RegularizationSchedule,
) -> Result<PsdMatrix> {
    a.check_dim(b)?;
    let a_eig = a.eigh()?;
    let raw = if a_eig.min_eigenvalue() > psd_tol {
        congruence_route(f, &a_eig, b, psd_tol)?
    } else {
        let b_eig = b.eigh()?;
        match g {
            Some(g) if b_eig.min_eigenvalue() > psd_tol => congruence_route(g, &b_eig, a, psd_tol)?,
            _ => regularized_limit(f, a, b, psd_tol, schedule)?,
        }
    };
    let tol = psd_tol * (1.0 + raw.frobenius_norm());
    PsdMatrix::new(raw, tol)
}

fn regularized_limit(
    f: ScalarFn<'_>,
    a: &PsdMatrix,
    b: &PsdMatrix,
    psd_tol: f64,
    schedule: &RegularizationSchedule,
) -> Result<SymmetricMatrix> {
    let mut previous: Option<SymmetricMatrix> = None;
    let mut gap = f64::INFINITY;
    for &eps in schedule.epsilons() {
        let shifted = a.shift(eps);
        let eig = shifted.eigh()?;
        let current = congruence_route(f, &eig, b, psd_tol)?;
        if let Some(prev) = &previous {
            gap = current.distance(prev)?;
            if gap <= schedule.convergence_tol() {
                return Ok(current);
            }
        }
        previous = Some(current);
    }
    Err(Error::NoConvergence { gap })
}

/// An operator connection: a nonnegative scale times a connection defined by a
/// representing function, an associated measure, or both.
#[derive(Debug, Clone)]
pub struct Connection {
    scale: f64,
    function: Option<FunctionSpec>,
    measure: Option<FiniteMeasure>,
    tolerances: Tolerances,
    schedule: RegularizationSchedule,
}

impl Connection {
    /// Attaches the closed-form associated measure when one is known.
    pub fn from_function(f: FunctionSpec) -> Result<Self> {
        f.validate()?;
        let measure = known_measure_of(&f);
        let c = Self {
            scale: 1.0,
            function: Some(f),
            measure,
            tolerances: Tolerances::default(),
            schedule: RegularizationSchedule::default(),
        };
        c.cross_check()?;
        Ok(c)
    }

    pub fn from_measure(mu: FiniteMeasure) -> Self {
        Self {
            scale: 1.0,
            function: None,
            measure: Some(mu),
            tolerances: Tolerances::default(),
            schedule: RegularizationSchedule::default(),
        }
    }

    /// Both sources; they must agree to `1e−6·(1 + x)` on a log grid.
    pub fn from_parts(f: FunctionSpec, mu: FiniteMeasure) -> Result<Self> {
        f.validate()?;
        let c = Self {
            scale: 1.0,
            function: Some(f),
            measure: Some(mu),
            tolerances: Tolerances::default(),
            schedule: RegularizationSchedule::default(),
        };
        c.cross_check()?;
        Ok(c)
    }

    pub fn left_trivial() -> Self {
        Self::from_function(FunctionSpec::Constant { k: 1.0 }).expect("catalog")
    }

    pub fn right_trivial() -> Self {
        Self::from_function(FunctionSpec::ScalarIdentity { k: 1.0 }).expect("catalog")
    }

    pub fn with_scale(mut self, k: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {k} must be >= 0")));
        }
        self.scale = k;
        Ok(self)
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Result<Self> {
        tolerances.validate()?;
        self.tolerances = tolerances;
        Ok(self)
    }

    pub fn with_schedule(mut self, schedule: RegularizationSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    fn cross_check(&self) -> Result<()> {
        let (Some(f), Some(mu)) = (&self.function, &self.measure) else {
            return Ok(());
        };
        for i in 0..=40 {
            let x = 10f64.powf(-2.0 + 4.0 * i as f64 / 40.0);
            let a = f.eval(x)?;
            let b = mu.representing_value(x);
            if (a - b).abs() > 1e-6 * (1.0 + x) {
                return Err(Error::InvalidParameter(format!(
                    "function {f} and measure disagree at {x}: {a} vs {b}"
                )));
            }
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn function(&self) -> Option<&FunctionSpec> {
        self.function.as_ref()
    }

    pub fn measure(&self) -> Option<&FiniteMeasure> {
        self.measure.as_ref()
    }

    /// The measure including the scale, `k μ`.
    pub fn scaled_measure(&self) -> Option<FiniteMeasure> {
        self.measure.as_ref().map(|m| m.scaled(self.scale).expect("scale validated"))
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn schedule(&self) -> &RegularizationSchedule {
        &self.schedule
    }

    /// Human-readable label.
    pub fn label(&self) -> String {
        let base = match (&self.function, &self.measure) {
            (Some(f), _) => f.to_string(),
            (None, Some(m)) => format!("measure[{m}]"),
            (None, None) => unreachable!("connection without a source"),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{}*{base}", self.scale)
        }
    }

    /// `k f(x)`, the representing function of the connection.
    pub fn representing_value(&self, x: f64) -> Result<f64> {
        let v = match (&self.function, &self.measure) {
            (Some(f), _) => f.eval(x)?,
            (None, Some(m)) => crate::measure::fn_from_measure(m, x)?,
            (None, None) => unreachable!("connection without a source"),
        };
        Ok(self.scale * v)
    }

    /// Inverse of the representing function.
    pub fn representing_inverse(&self, y: f64) -> Result<f64> {
        if self.scale == 0.0 {
            return Err(Error::NotInjective);
        }
        let k = self.scale;
        match (&self.function, &self.measure) {
            (Some(f), _) => f.inverse(y / k).map_err(|e| match e {
                Error::Range { gap, .. } => Error::Range { value: y, gap: gap * k },
                other => other,
            }),
            (None, Some(m)) => {
                if m.dirac_multiple(0.0).is_some() {
                    return Err(Error::NotInjective);
                }
                invert_monotone(|x| Ok(k * m.representing_value(x)), y)
            }
            (None, None) => unreachable!("connection without a source"),
        }
    }

    /// Properties and range of the representing function `k f`.
    pub fn analyze(&self) -> (FunctionProps, RangeDescriptor) {
        let k = self.scale;
        let (props, range) = match (&self.function, &self.measure) {
            (Some(f), _) => f.analyze(),
            (None, Some(m)) => measure_profile(m),
            (None, None) => unreachable!("connection without a source"),
        };
        let zero = k == 0.0;
        let props = FunctionProps {
            is_constant: props.is_constant || zero,
            is_scalar_identity: props.is_scalar_identity || zero,
            injective: props.injective && !zero,
            bounded: props.bounded || zero,
            f0: k * props.f0,
            transpose_f0: k * props.transpose_f0,
        };
        (props, range.scaled(k))
    }

    pub fn range(&self) -> RangeDescriptor {
        self.analyze().1
    }

    /// `f(1) = 1`, within `1e−12`.
    pub fn is_mean(&self) -> bool {
        self.representing_value(1.0)
            .map(|v| (v - 1.0).abs() <= 1e-12)
            .unwrap_or(false)
    }

    /// `(A, B) ↦ B σ A`.
    pub fn transpose(&self) -> Connection {
        Connection {
            scale: self.scale,
            function: self.function.as_ref().map(FunctionSpec::transpose),
            measure: self.measure.as_ref().map(FiniteMeasure::reflect),
            tolerances: self.tolerances,
            schedule: self.schedule.clone(),
        }
    }

    /// `A σ B` through the representing function (the primary route).
    pub fn evaluate(&self, a: &PsdMatrix, b: &PsdMatrix) -> Result<PsdMatrix> {
        let t = self.transpose();
        // The scale is folded into f and g.
        let f = |x: f64| self.representing_value(x);
        let g = |x: f64| t.representing_value(x);
        connect(&f, Some(&g), a, b, self.tolerances.psd_tol, &self.schedule)
    }

    /// `A σ B` through the integral representation, when a measure is known.
    pub fn evaluate_via_measure(&self, a: &PsdMatrix, b: &PsdMatrix) -> Result<Option<PsdMatrix>> {
        let Some(mu) = &self.measure else {
            return Ok(None);
        };
        let v = eval_from_measure(mu, a, b, self.tolerances.psd_tol, &self.schedule)?;
        Ok(Some(v.scale_nonneg(self.scale)?))
    }
}

/// `kind[:param=value,…]` as accepted by [`FunctionSpec`], plus an optional
/// `scale=k` parameter for the connection scale.
impl FromStr for Connection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut text = spec_text::tokenize(s)?;
        let mut scale = None;
        let mut rest = Vec::with_capacity(text.params.len());
        for (name, value) in text.params.drain(..) {
            if name.as_deref() == Some("scale") {
                if scale.is_some() {
                    return Err(Error::Parse("duplicate scale".into()));
                }
                scale = Some(spec_text::number(&value)?);
            } else {
                rest.push((name, value));
            }
        }
        let f = crate::function::from_parts(&text.kind, &rest)?;
        let c = Connection::from_function(f)?;
        match scale {
            Some(k) => c.with_scale(k),
            None => Ok(c),
        }
    }
}

/// Properties of `x ↦ ∫ (1 !_t x) dμ(t)` read off the measure.
fn measure_profile(m: &FiniteMeasure) -> (FunctionProps, RangeDescriptor) {
    use crate::measure::DensityShape;
    let f0 = m.atom_at(0.0);
    let g0 = m.atom_at(1.0);
    let is_constant = m.dirac_multiple(0.0).is_some();
    let is_scalar_identity = m.dirac_multiple(1.0).is_some();
    // lim_{x→∞} 1 !_t x = 1/(1 − t); the integral diverges with mass near 1.
    let density_reaches_one = match m.density() {
        Some(d) if d.scale > 0.0 => match &d.shape {
            DensityShape::Arcsine | DensityShape::Uniform => true,
            DensityShape::Table(points) => points
                .last()
                .map(|&(t, v)| t == 1.0 && v > 0.0)
                .unwrap_or(false),
        },
        _ => false,
    };
    let upper = if g0 > 0.0 || density_reaches_one {
        f64::INFINITY
    } else {
        m.weighted_nodes().map(|(t, w)| w / (1.0 - t)).sum()
    };
    let range = RangeDescriptor {
        lower: f0,
        upper,
        upper_attained: is_constant,
        numeric: m.density().is_some(),
    };
    let props = FunctionProps {
        is_constant,
        is_scalar_identity,
        injective: !is_constant,
        bounded: upper.is_finite(),
        f0,
        transpose_f0: g0,
    };
    (props, range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetric::PdMatrix;

    fn pd(rows: &[Vec<f64>]) -> PsdMatrix {
        PdMatrix::from_rows(rows, 1e-10).unwrap().into_psd()
    }

    #[test]
    fn left_trivial_returns_first_argument() {
        let a = pd(&[vec![2.0, 0.3], vec![0.3, 1.0]]);
        let b = pd(&[vec![5.0, -1.0], vec![-1.0, 4.0]]);
        let r = Connection::left_trivial().evaluate(&a, &b).unwrap();
        assert!(r.distance(&a).unwrap() < 1e-12);
        let r = Connection::right_trivial().evaluate(&a, &b).unwrap();
        assert!(r.distance(&b).unwrap() < 1e-12);
    }

    #[test]
    fn geometric_commuting_case() {
        let sigma = Connection::from_function(FunctionSpec::geometric(0.5).unwrap()).unwrap();
        let a = PsdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let b = PsdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let r = sigma.evaluate(&a, &b).unwrap();
        assert!(r.distance(&SymmetricMatrix::scaled_identity(2, 2.0)).unwrap() < 1e-12);
    }

    #[test]
    fn identity_against_scalar_multiple() {
        for f in crate::function::catalog_examples() {
            let sigma = Connection::from_function(f.clone()).unwrap();
            for x in [0.0, 0.1, 1.0, 3.7] {
                let xi = PsdMatrix::new(SymmetricMatrix::scaled_identity(3, x), 0.0).unwrap();
                let r = sigma.evaluate(&PsdMatrix::identity(3), &xi).unwrap();
                let want = SymmetricMatrix::scaled_identity(3, f.eval(x).unwrap());
                assert!(r.distance(&want).unwrap() < 1e-12, "{f} at {x}");
            }
        }
    }

    #[test]
    fn transpose_swaps_arguments() {
        let a = pd(&[vec![2.0, 0.3], vec![0.3, 1.0]]);
        let b = pd(&[vec![5.0, -1.0], vec![-1.0, 4.0]]);
        for f in crate::function::catalog_examples() {
            let sigma = Connection::from_function(f.clone()).unwrap();
            let lhs = sigma.transpose().evaluate(&a, &b).unwrap();
            let rhs = sigma.evaluate(&b, &a).unwrap();
            assert!(lhs.distance(&rhs).unwrap() < 1e-8, "{f}");
        }
        assert_eq!(
            Connection::left_trivial().transpose().function(),
            Some(&FunctionSpec::ScalarIdentity { k: 1.0 })
        );
    }

    #[test]
    fn singular_first_argument_uses_transpose_route() {
        let sigma = Connection::from_function(FunctionSpec::geometric(0.5).unwrap()).unwrap();
        let a = PsdMatrix::from_diagonal(&[0.0, 4.0]).unwrap();
        let b = PsdMatrix::from_diagonal(&[9.0, 1.0]).unwrap();
        let r = sigma.evaluate(&a, &b).unwrap();
        let want = SymmetricMatrix::from_diagonal(&[0.0, 2.0]).unwrap();
        assert!(r.distance(&want).unwrap() < 1e-12);
    }

    #[test]
    fn both_singular_regularizes() {
        let sigma = Connection::from_function(FunctionSpec::arithmetic(0.5).unwrap()).unwrap();
        let a = PsdMatrix::from_diagonal(&[0.0, 2.0]).unwrap();
        let b = PsdMatrix::from_diagonal(&[0.0, 4.0]).unwrap();
        let r = sigma.evaluate(&a, &b).unwrap();
        let want = SymmetricMatrix::from_diagonal(&[0.0, 3.0]).unwrap();
        assert!(r.distance(&want).unwrap() < 1e-6);
    }

    #[test]
    fn unbounded_rate_reports_no_convergence() {
        // Complementary supports: (εI + P) # Q decays like √ε.
        let sigma = Connection::from_function(FunctionSpec::geometric(0.5).unwrap()).unwrap();
        let a = PsdMatrix::from_diagonal(&[1.0, 0.0]).unwrap();
        let b = PsdMatrix::from_diagonal(&[0.0, 1.0]).unwrap();
        assert!(matches!(sigma.evaluate(&a, &b), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn scaled_connection() {
        let sigma = Connection::from_function(FunctionSpec::geometric(0.5).unwrap())
            .unwrap()
            .with_scale(3.0)
            .unwrap();
        let a = PsdMatrix::from_diagonal(&[1.0, 4.0]).unwrap();
        let b = PsdMatrix::from_diagonal(&[4.0, 1.0]).unwrap();
        let r = sigma.evaluate(&a, &b).unwrap();
        assert!(r.distance(&SymmetricMatrix::scaled_identity(2, 6.0)).unwrap() < 1e-12);
        let via = sigma.evaluate_via_measure(&a, &b).unwrap().unwrap();
        assert!(via.distance(&r).unwrap() < 1e-5);
        assert!(!sigma.is_mean());
        assert_eq!(sigma.representing_inverse(6.0).unwrap(), 4.0);
        let zero = sigma.clone().with_scale(0.0).unwrap();
        assert_eq!(zero.representing_inverse(1.0), Err(Error::NotInjective));
        assert!(zero.analyze().0.is_constant);
    }

    #[test]
    fn measure_only_connection() {
        let mu = FiniteMeasure::new(vec![(0.0, 0.25), (0.5, 0.5), (1.0, 0.25)], None).unwrap();
        let sigma = Connection::from_measure(mu);
        let (props, range) = sigma.analyze();
        assert_eq!(props.f0, 0.25);
        assert_eq!(props.transpose_f0, 0.25);
        assert!(range.upper.is_infinite());
        assert!(sigma.is_mean());
        let y = 1.7;
        let x = sigma.representing_inverse(y).unwrap();
        assert!((sigma.representing_value(x).unwrap() - y).abs() < 1e-11);

        let harmonic_only = Connection::from_measure(FiniteMeasure::dirac(0.25, 1.0).unwrap());
        let (_, range) = harmonic_only.analyze();
        assert!((range.upper - 1.0 / 0.75).abs() < 1e-15);
    }

    #[test]
    fn mismatched_sources_rejected() {
        let f = FunctionSpec::geometric(0.5).unwrap();
        let mu = FiniteMeasure::dirac(0.5, 1.0).unwrap();
        assert!(Connection::from_parts(f, mu).is_err());
    }

    #[test]
    fn parses_connection_text() {
        let c: Connection = "geometric:0.5,scale=2".parse().unwrap();
        assert_eq!(c.scale(), 2.0);
        assert_eq!(c.function(), Some(&FunctionSpec::geometric(0.5).unwrap()));
        assert_eq!(c.label(), "2*geometric:alpha=0.5");
        let c: Connection = "kind=logarithmic".parse().unwrap();
        assert_eq!(c.scale(), 1.0);
        assert!("geometric:scale=1,scale=2".parse::<Connection>().is_err());
        assert!("geometric:scale=-1".parse::<Connection>().is_err());
        assert!("nonsense".parse::<Connection>().is_err());
    }

    #[test]
    fn schedule_validation() {
        assert!(RegularizationSchedule::new(vec![1.0, 0.5], 1e-7).is_ok());
        assert!(RegularizationSchedule::new(vec![1.0, 1.0], 1e-7).is_err());
        assert!(RegularizationSchedule::new(vec![1.0, -0.5], 1e-7).is_err());
        assert!(RegularizationSchedule::new(vec![1.0], 1e-7).is_err());
        let d = RegularizationSchedule::default();
        assert_eq!(d.epsilons().len(), 25);
        assert_eq!(d.epsilons()[0], 1e-2);
    }
}
