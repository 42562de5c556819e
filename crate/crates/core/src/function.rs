//! Representing functions `f: [0, ∞) → [0, ∞)` of connections.
//!
//! The catalog covers the trivial connections, the weighted arithmetic,
//! geometric and harmonic means, the quasi-arithmetic power means
//! `f_{p,α}(x) = (1 − α + α x^p)^{1/p}`, the logarithmic mean and its dual.
//! User functions are accepted as [`CustomFn`] after a scalar sanity check;
//! operator monotonicity of a custom function is the caller's obligation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spec_text;

/// A scalar evaluator supplied by the caller.
///
/// Construction checks monotonicity and midpoint concavity on a grid. This is
/// a scalar proxy only: the evaluator is *declared* operator monotone by the
/// caller and is never verified as such.
#[derive(Clone)]
pub struct CustomFn {
    name: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    transposed: bool,
}

impl CustomFn {
    pub fn new(name: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let f = Self {
            name: name.into(),
            eval: Arc::new(eval),
            transposed: false,
        };
        f.check_scalar_properties()?;
        Ok(f)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    fn raw(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    fn value(&self, x: f64) -> f64 {
        if !self.transposed {
            return self.raw(x);
        }
        if x > 0.0 {
            x * self.raw(1.0 / x)
        } else {
            self.raw(LARGE) / LARGE
        }
    }

    fn check_scalar_properties(&self) -> Result<()> {
        let mut grid = vec![0.0];
        grid.extend((0..=120).map(|i| 10f64.powf(-6.0 + 0.1 * i as f64)));
        let values: Vec<f64> = grid.iter().map(|&x| self.value(x)).collect();
        for (&x, &v) in grid.iter().zip(&values) {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "custom function `{}` gives {v} at {x}",
                    self.name
                )));
            }
        }
        for (w, x) in values.windows(2).zip(grid.windows(2)) {
            if w[1] < w[0] - 1e-12 * (1.0 + w[0].abs()) {
                return Err(Error::InvalidParameter(format!(
                    "custom function `{}` decreases between {} and {}",
                    self.name, x[0], x[1]
                )));
            }
        }
        let coarse: Vec<f64> = grid.iter().copied().step_by(8).collect();
        for (i, &a) in coarse.iter().enumerate() {
            for &b in &coarse[i + 1..] {
                let mid = self.value(0.5 * (a + b));
                let chord = 0.5 * (self.value(a) + self.value(b));
                if mid < chord - 1e-12 * (1.0 + chord.abs()) {
                    return Err(Error::InvalidParameter(format!(
                        "custom function `{}` fails midpoint concavity on [{a}, {b}]",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CustomFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomFn")
            .field("name", &self.name)
            .field("transposed", &self.transposed)
            .finish()
    }
}

impl PartialEq for CustomFn {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.eval, &other.eval) && self.transposed == other.transposed
    }
}

/// Probe point standing in for `+∞` in numeric limits.
const LARGE: f64 = 1e12;

/// A representing function.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// `x ↦ k`: the scaled left-trivial connection `(A, B) ↦ kA`.
    Constant { k: f64 },
    /// `x ↦ kx`: the scaled right-trivial connection `(A, B) ↦ kB`.
    ScalarIdentity { k: f64 },
    WeightedArithmetic { alpha: f64 },
    WeightedGeometric { alpha: f64 },
    WeightedHarmonic { alpha: f64 },
    /// `x ↦ (1 − α + α x^p)^{1/p}` with `p ∈ [−1, 1] \ {0}`.
    QuasiArithmetic { p: f64, alpha: f64 },
    Logarithmic,
    DualLogarithmic,
    Custom(CustomFn),
}

/// Range of a nondecreasing function: `[lower, upper)` or `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeDescriptor {
    pub lower: f64,
    #[serde(serialize_with = "crate::report::serialize_extended")]
    pub upper: f64,
    pub upper_attained: bool,
    /// Bounds were estimated by sampling rather than taken from a closed form.
    pub numeric: bool,
}

impl RangeDescriptor {
    /// Distance from `y` to the range, or `None` when `y` is inside.
    pub fn gap(&self, y: f64) -> Option<f64> {
        if y < self.lower {
            Some(self.lower - y)
        } else if y > self.upper || (y == self.upper && !self.upper_attained) {
            Some(y - self.upper)
        } else {
            None
        }
    }

    pub fn contains(&self, y: f64) -> bool {
        self.gap(y).is_none()
    }

    pub fn is_bounded(&self) -> bool {
        self.upper.is_finite()
    }

    pub fn scaled(&self, k: f64) -> RangeDescriptor {
        if k == 0.0 {
            return RangeDescriptor {
                lower: 0.0,
                upper: 0.0,
                upper_attained: true,
                numeric: self.numeric,
            };
        }
        RangeDescriptor {
            lower: k * self.lower,
            upper: k * self.upper,
            upper_attained: self.upper_attained,
            numeric: self.numeric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FunctionProps {
    pub is_constant: bool,
    pub is_scalar_identity: bool,
    pub injective: bool,
    pub bounded: bool,
    /// `f(0)`.
    pub f0: f64,
    /// `g(0)` for the transpose `g(x) = x f(1/x)`, i.e. `lim f(x)/x`.
    pub transpose_f0: f64,
}

impl FunctionSpec {
    pub fn constant(k: f64) -> Result<Self> {
        let f = Self::Constant { k };
        f.validate()?;
        Ok(f)
    }

    pub fn scalar_identity(k: f64) -> Result<Self> {
        let f = Self::ScalarIdentity { k };
        f.validate()?;
        Ok(f)
    }

    pub fn arithmetic(alpha: f64) -> Result<Self> {
        let f = Self::WeightedArithmetic { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn geometric(alpha: f64) -> Result<Self> {
        let f = Self::WeightedGeometric { alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn harmonic(alpha: f64) -> Result<Self> {
        let f = Self::WeightedHarmonic { alpha };
        f.validate()?;
        Ok(f)
    }

    /// `p = 0` is the continuous extension and normalizes to the weighted
    /// geometric mean.
    pub fn quasi_arithmetic(p: f64, alpha: f64) -> Result<Self> {
        let f = if p == 0.0 {
            Self::WeightedGeometric { alpha }
        } else {
            Self::QuasiArithmetic { p, alpha }
        };
        f.validate()?;
        Ok(f)
    }

    pub fn custom(f: CustomFn) -> Self {
        Self::Custom(f)
    }

    pub fn validate(&self) -> Result<()> {
        let weight = |alpha: f64| {
            if alpha > 0.0 && alpha < 1.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("weight {alpha} must lie in (0, 1)")))
            }
        };
        match *self {
            Self::Constant { k } | Self::ScalarIdentity { k } => {
                if k >= 0.0 && k.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!("scale {k} must be >= 0")))
                }
            }
            Self::WeightedArithmetic { alpha }
            | Self::WeightedGeometric { alpha }
            | Self::WeightedHarmonic { alpha } => weight(alpha),
            Self::QuasiArithmetic { p, alpha } => {
                if !(-1.0..=1.0).contains(&p) || p == 0.0 {
                    return Err(Error::InvalidParameter(format!(
                        "exponent {p} must lie in [-1, 1] \\ {{0}}"
                    )));
                }
                weight(alpha)
            }
            Self::Logarithmic | Self::DualLogarithmic | Self::Custom(_) => Ok(()),
        }
    }

    /// `(p, α)` for members of the quasi-arithmetic family, with `p = 0` for
    /// the geometric mean.
    pub fn power_params(&self) -> Option<(f64, f64)> {
        match *self {
            Self::WeightedArithmetic { alpha } => Some((1.0, alpha)),
            Self::WeightedGeometric { alpha } => Some((0.0, alpha)),
            Self::WeightedHarmonic { alpha } => Some((-1.0, alpha)),
            Self::QuasiArithmetic { p, alpha } => Some((p, alpha)),
            _ => None,
        }
    }

    pub fn is_custom(&self) -> bool {
        matches!(self, Self::Custom(_))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) || x.is_infinite() {
            return Err(Error::Domain {
                x,
                reason: "argument must be finite and nonnegative".into(),
            });
        }
        let v = match self {
            Self::Constant { k } => *k,
            Self::ScalarIdentity { k } => k * x,
            Self::WeightedArithmetic { alpha } => 1.0 - alpha + alpha * x,
            Self::WeightedGeometric { alpha } => x.powf(*alpha),
            Self::WeightedHarmonic { alpha } => harmonic_unit(*alpha, x),
            Self::QuasiArithmetic { p, alpha } => power_mean_unit(*p, *alpha, x),
            Self::Logarithmic => logarithmic_mean_unit(x),
            Self::DualLogarithmic => dual_logarithmic_unit(x),
            Self::Custom(c) => c.value(x),
        };
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Domain {
                x,
                reason: format!("function value {v} is not a finite nonnegative number"),
            });
        }
        Ok(v)
    }

    /// `f^{-1}(y)`, in closed form where one exists and by monotone bisection
    /// otherwise.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !y.is_finite() {
            return Err(Error::Domain {
                x: y,
                reason: "inverse argument must be finite".into(),
            });
        }
        let range = self.range();
        let props_constant = self.is_constant();
        if props_constant {
            return Err(Error::NotInjective);
        }
        if let Some(gap) = range.gap(y) {
            return Err(Error::Range { value: y, gap });
        }
        let x = match *self {
            Self::ScalarIdentity { k } => y / k,
            Self::WeightedArithmetic { alpha } => ((y - 1.0 + alpha) / alpha).max(0.0),
            Self::WeightedGeometric { alpha } => y.powf(1.0 / alpha),
            Self::WeightedHarmonic { alpha } => alpha * y / (1.0 - (1.0 - alpha) * y),
            Self::QuasiArithmetic { p, alpha } => {
                if p < 0.0 && y == 0.0 {
                    0.0
                } else {
                    let base = (1.0 - 1.0 / alpha + y.powf(p) / alpha).max(0.0);
                    base.powf(1.0 / p)
                }
            }
            // x ln x/(x − 1) is the reciprocal of the logarithmic mean at 1/x,
            // which keeps the bracket small even where x ≈ e^y is huge.
            Self::DualLogarithmic => {
                if y == 0.0 {
                    0.0
                } else {
                    let guess = 1.0 / invert_monotone(|u| Self::Logarithmic.eval(u), 1.0 / y)?;
                    let f = |x: f64| self.eval(x);
                    let (lo, hi) = (guess * (1.0 - 1e-6), guess * (1.0 + 1e-6));
                    if f(lo)? < y && f(hi)? >= y {
                        bisect(&f, y, 1e-12 * (1.0 + y), lo, hi)?
                    } else {
                        guess
                    }
                }
            }
            _ => return invert_monotone(|x| self.eval(x), y),
        };
        Ok(x.max(0.0))
    }

    /// The transpose `g(x) = x f(1/x)`, the representing function of
    /// `(A, B) ↦ B σ A`.
    pub fn transpose(&self) -> FunctionSpec {
        match self {
            Self::Constant { k } => Self::ScalarIdentity { k: *k },
            Self::ScalarIdentity { k } => Self::Constant { k: *k },
            Self::WeightedArithmetic { alpha } => Self::WeightedArithmetic { alpha: 1.0 - alpha },
            Self::WeightedGeometric { alpha } => Self::WeightedGeometric { alpha: 1.0 - alpha },
            Self::WeightedHarmonic { alpha } => Self::WeightedHarmonic { alpha: 1.0 - alpha },
            Self::QuasiArithmetic { p, alpha } => Self::QuasiArithmetic {
                p: *p,
                alpha: 1.0 - alpha,
            },
            Self::Logarithmic => Self::Logarithmic,
            Self::DualLogarithmic => Self::DualLogarithmic,
            Self::Custom(c) => Self::Custom(CustomFn {
                name: c.name.clone(),
                eval: Arc::clone(&c.eval),
                transposed: !c.transposed,
            }),
        }
    }

    pub fn is_constant(&self) -> bool {
        match *self {
            Self::Constant { .. } => true,
            Self::ScalarIdentity { k } => k == 0.0,
            Self::Custom(_) => self.custom_profile().is_constant,
            _ => false,
        }
    }

    pub fn is_scalar_identity(&self) -> bool {
        match *self {
            Self::ScalarIdentity { .. } => true,
            Self::Constant { k } => k == 0.0,
            Self::Custom(_) => self.custom_profile().is_scalar_identity,
            _ => false,
        }
    }

    pub fn range(&self) -> RangeDescriptor {
        let closed = |lower: f64, upper: f64, upper_attained: bool| RangeDescriptor {
            lower,
            upper,
            upper_attained,
            numeric: false,
        };
        match *self {
            Self::Constant { k } => closed(k, k, true),
            Self::ScalarIdentity { k: 0.0 } => closed(0.0, 0.0, true),
            Self::ScalarIdentity { .. } | Self::Logarithmic | Self::DualLogarithmic => {
                closed(0.0, f64::INFINITY, false)
            }
            Self::Custom(_) => self.custom_profile().range,
            _ => {
                let (p, alpha) = self.power_params().expect("power family");
                if p > 0.0 {
                    closed((1.0 - alpha).powf(1.0 / p), f64::INFINITY, false)
                } else if p == 0.0 {
                    closed(0.0, f64::INFINITY, false)
                } else {
                    closed(0.0, (1.0 - alpha).powf(1.0 / p), false)
                }
            }
        }
    }

    pub fn analyze(&self) -> (FunctionProps, RangeDescriptor) {
        if let Self::Custom(_) = self {
            let prof = self.custom_profile();
            let props = FunctionProps {
                is_constant: prof.is_constant,
                is_scalar_identity: prof.is_scalar_identity,
                injective: !prof.is_constant,
                bounded: prof.range.is_bounded(),
                f0: prof.range.lower,
                transpose_f0: prof.transpose_f0,
            };
            return (props, prof.range);
        }
        let range = self.range();
        let transpose_f0 = match *self {
            Self::Constant { .. } => 0.0,
            Self::ScalarIdentity { k } => k,
            Self::Logarithmic | Self::DualLogarithmic => 0.0,
            _ => {
                let (p, alpha) = self.power_params().expect("power family");
                if p > 0.0 {
                    alpha.powf(1.0 / p)
                } else {
                    0.0
                }
            }
        };
        let is_constant = self.is_constant();
        let props = FunctionProps {
            is_constant,
            is_scalar_identity: self.is_scalar_identity(),
            injective: !is_constant,
            bounded: range.is_bounded(),
            f0: range.lower,
            transpose_f0,
        };
        (props, range)
    }

    fn custom_profile(&self) -> CustomProfile {
        let eval = |x: f64| self.eval(x).unwrap_or(f64::NAN);
        let f0 = eval(0.0);
        let probes: Vec<f64> = (-12..=12).map(|k| 10f64.powi(k)).collect();
        let values: Vec<f64> = probes.iter().map(|&x| eval(x)).collect();
        let is_constant = values
            .iter()
            .all(|v| (v - f0).abs() <= 1e-12 * (1.0 + f0.abs()));
        let slope = eval(1.0);
        let is_scalar_identity = f0.abs() <= 1e-12
            && probes
                .iter()
                .zip(&values)
                .all(|(x, v)| (v / x - slope).abs() <= 1e-9 * (1.0 + slope.abs()));
        let top = eval(LARGE);
        let before = eval(LARGE / 10.0);
        let range = if is_constant {
            RangeDescriptor {
                lower: f0,
                upper: f0,
                upper_attained: true,
                numeric: true,
            }
        } else if top - before <= 1e-6 * (1.0 + top.abs()) {
            RangeDescriptor {
                lower: f0,
                upper: top,
                upper_attained: false,
                numeric: true,
            }
        } else {
            RangeDescriptor {
                lower: f0,
                upper: f64::INFINITY,
                upper_attained: false,
                numeric: true,
            }
        };
        CustomProfile {
            is_constant,
            is_scalar_identity,
            range,
            transpose_f0: top / LARGE,
        }
    }
}

struct CustomProfile {
    is_constant: bool,
    is_scalar_identity: bool,
    range: RangeDescriptor,
    transpose_f0: f64,
}

/// `1 !_α x = x / ((1 − α) x + α)`.
pub(crate) fn harmonic_unit(alpha: f64, x: f64) -> f64 {
    if alpha == 0.0 {
        return 1.0;
    }
    if alpha == 1.0 {
        return x;
    }
    x / ((1.0 - alpha) * x + alpha)
}

fn power_mean_unit(p: f64, alpha: f64, x: f64) -> f64 {
    if p < 0.0 && x == 0.0 {
        return 0.0;
    }
    (1.0 - alpha + alpha * x.powf(p)).powf(1.0 / p)
}

fn logarithmic_mean_unit(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let u = x - 1.0;
    u / ln_near_one(x)
}

/// `ln x`, through `ln_1p` near 1 where `x − 1` is exact.
fn ln_near_one(x: f64) -> f64 {
    if (0.5..=2.0).contains(&x) {
        (x - 1.0).ln_1p()
    } else {
        x.ln()
    }
}

fn dual_logarithmic_unit(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x == 1.0 {
        return 1.0;
    }
    let u = x - 1.0;
    x * ln_near_one(x) / u
}

/// Inverts a nondecreasing `f` at `y` by bisection.
///
/// The bracket starts at `[0, 1]` and grows tenfold until `f(hi) ⩾ y`; once
/// `hi` passes `1e15` the value is declared out of range. Iteration stops when
/// `|f(x) − y| ⩽ 1e−12·(1 + |y|)` or the bracket cannot shrink further.
pub fn invert_monotone(f: impl Fn(f64) -> Result<f64>, y: f64) -> Result<f64> {
    let tol = 1e-12 * (1.0 + y.abs());
    let f0 = f(0.0)?;
    if y < f0 - tol {
        return Err(Error::Range {
            value: y,
            gap: f0 - y,
        });
    }
    if (f0 - y).abs() <= tol {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    loop {
        let fh = f(hi)?;
        if (fh - y).abs() <= tol {
            return Ok(hi);
        }
        if fh >= y {
            break;
        }
        lo = hi;
        hi *= 10.0;
        if hi > 1e15 {
            return Err(Error::Range {
                value: y,
                gap: y - fh,
            });
        }
    }
    bisect(&f, y, tol, lo, hi)
}

/// Bisection on a bracket with `f(lo) < y <= f(hi)`.
fn bisect(f: &impl Fn(f64) -> Result<f64>, y: f64, tol: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    for _ in 0..4000 {
        let mid = if lo > 0.0 && hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if (fm - y).abs() <= tol {
            return Ok(mid);
        }
        if fm < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn eval_fn(f: &FunctionSpec, x: f64) -> Result<f64> {
    f.eval(x)
}

pub fn eval_inverse(f: &FunctionSpec, y: f64) -> Result<f64> {
    f.inverse(y)
}

pub fn transpose_fn(f: &FunctionSpec) -> FunctionSpec {
    f.transpose()
}

pub fn analyze_fn(f: &FunctionSpec) -> (FunctionProps, RangeDescriptor) {
    f.analyze()
}

/// Every catalog kind over a spread of parameters (weights ¼, ½, ¾ and
/// exponents ±½, ±1), plus two scalings of each trivial connection.
pub fn catalog_examples() -> Vec<FunctionSpec> {
    let mut out = vec![
        FunctionSpec::Constant { k: 1.0 },
        FunctionSpec::Constant { k: 2.5 },
        FunctionSpec::ScalarIdentity { k: 1.0 },
        FunctionSpec::ScalarIdentity { k: 0.5 },
        FunctionSpec::Logarithmic,
        FunctionSpec::DualLogarithmic,
    ];
    for alpha in [0.25, 0.5, 0.75] {
        out.push(FunctionSpec::WeightedArithmetic { alpha });
        out.push(FunctionSpec::WeightedGeometric { alpha });
        out.push(FunctionSpec::WeightedHarmonic { alpha });
        for p in [-1.0, -0.5, 0.5, 1.0] {
            out.push(FunctionSpec::QuasiArithmetic { p, alpha });
        }
    }
    out
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { k } => write!(f, "constant:k={k}"),
            Self::ScalarIdentity { k } => write!(f, "scalar_identity:k={k}"),
            Self::WeightedArithmetic { alpha } => write!(f, "arithmetic:alpha={alpha}"),
            Self::WeightedGeometric { alpha } => write!(f, "geometric:alpha={alpha}"),
            Self::WeightedHarmonic { alpha } => write!(f, "harmonic:alpha={alpha}"),
            Self::QuasiArithmetic { p, alpha } => write!(f, "quasi_arithmetic:p={p},alpha={alpha}"),
            Self::Logarithmic => write!(f, "logarithmic"),
            Self::DualLogarithmic => write!(f, "dual_logarithmic"),
            Self::Custom(c) if c.transposed => write!(f, "custom:{}:transposed", c.name),
            Self::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = spec_text::tokenize(s)?;
        from_parts(&text.kind, &text.params)
    }
}

/// Builds a catalog function from a kind name and its parameters.
pub(crate) fn from_parts(kind: &str, params: &[(Option<String>, String)]) -> Result<FunctionSpec> {
    let bind = |names: &[&str]| spec_text::bind(kind, params, names);
    match kind {
        "constant" | "left_trivial" => {
            let v = bind(&["k"])?;
            FunctionSpec::constant(v[0].unwrap_or(1.0))
        }
        "scalar_identity" | "right_trivial" => {
            let v = bind(&["k"])?;
            FunctionSpec::scalar_identity(v[0].unwrap_or(1.0))
        }
        "arithmetic" | "weighted_arithmetic" => {
            let v = bind(&["alpha"])?;
            FunctionSpec::arithmetic(v[0].unwrap_or(0.5))
        }
        "geometric" | "weighted_geometric" => {
            let v = bind(&["alpha"])?;
            FunctionSpec::geometric(v[0].unwrap_or(0.5))
        }
        "harmonic" | "weighted_harmonic" => {
            let v = bind(&["alpha"])?;
            FunctionSpec::harmonic(v[0].unwrap_or(0.5))
        }
        "quasi_arithmetic" | "power_mean" => {
            let v = bind(&["p", "alpha"])?;
            let p = v[0].ok_or_else(|| Error::Parse("quasi_arithmetic needs p".into()))?;
            FunctionSpec::quasi_arithmetic(p, v[1].unwrap_or(0.5))
        }
        "logarithmic" | "log" => {
            bind(&[])?;
            Ok(FunctionSpec::Logarithmic)
        }
        "dual_logarithmic" | "dual_log" => {
            bind(&[])?;
            Ok(FunctionSpec::DualLogarithmic)
        }
        "custom" => Err(Error::Parse(
            "custom functions cannot be given as text".into(),
        )),
        other => Err(Error::Parse(format!("unknown function kind `{other}`"))),
    }
}
