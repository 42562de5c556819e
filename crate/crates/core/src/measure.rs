//! Finite Borel measures on `[0, 1]` and the integral representation
//! `A σ B = ∫ A !_t B dμ(t)`.
//!
//! A measure is a finite set of atoms plus an optional absolutely continuous
//! density. The density is discretized once, at construction, by a quadrature
//! rule; atoms (in particular those at 0 and 1) are kept apart from the rule so
//! that `μ({0})` and `μ({1})` are exact.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::connection::{connect, RegularizationSchedule};
use crate::error::{Error, Result};
use crate::function::{harmonic_unit, FunctionSpec};
use crate::quadrature::QuadratureRule;
use crate::spec_text;
use crate::symmetric::{PsdMatrix, SymmetricMatrix};

/// Default number of quadrature nodes for a density.
pub const DEFAULT_NODES: usize = 200;

/// Upper limit on quadrature nodes accepted from text input.
pub const MAX_NODES: usize = 4096;

const MAX_TABLE_POINTS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum DensityShape {
    /// `1 / (π √(t(1 − t)))`, unit mass. Integrated after `t = sin²θ`, which
    /// turns the endpoint singularities into the constant `2/π`.
    Arcsine,
    /// Lebesgue measure on `(0, 1)`.
    Uniform,
    /// Piecewise-linear density through `(t, value)` points, zero outside.
    Table(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    pub shape: DensityShape,
    pub scale: f64,
    pub nodes: usize,
}

impl Density {
    pub fn arcsine(scale: f64, nodes: usize) -> Result<Self> {
        Self::new(DensityShape::Arcsine, scale, nodes)
    }

    pub fn uniform(scale: f64, nodes: usize) -> Result<Self> {
        Self::new(DensityShape::Uniform, scale, nodes)
    }

    pub fn table(points: Vec<(f64, f64)>, scale: f64, nodes: usize) -> Result<Self> {
        Self::new(DensityShape::Table(points), scale, nodes)
    }

    pub fn new(shape: DensityShape, scale: f64, nodes: usize) -> Result<Self> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("density scale {scale} must be >= 0")));
        }
        if nodes == 0 || nodes > MAX_NODES {
            return Err(Error::InvalidParameter(format!(
                "node count {nodes} must lie in 1..={MAX_NODES}"
            )));
        }
        if let DensityShape::Table(points) = &shape {
            if points.len() < 2 || points.len() > MAX_TABLE_POINTS {
                return Err(Error::InvalidParameter(format!(
                    "density table needs 2..={MAX_TABLE_POINTS} points"
                )));
            }
            for w in points.windows(2) {
                if !(w[0].0 < w[1].0) {
                    return Err(Error::InvalidParameter(
                        "density table locations must be strictly increasing".into(),
                    ));
                }
            }
            for &(t, v) in points {
                if !(0.0..=1.0).contains(&t) || !(v >= 0.0) || !v.is_finite() {
                    return Err(Error::InvalidParameter(format!(
                        "density table point ({t}, {v}) outside [0,1] x [0,inf)"
                    )));
                }
            }
        }
        Ok(Self { shape, scale, nodes })
    }

    /// Density value at `t`, without the scale factor.
    pub fn shape_value(&self, t: f64) -> f64 {
        if !(t > 0.0 && t < 1.0) {
            return 0.0;
        }
        match &self.shape {
            DensityShape::Arcsine => 1.0 / (PI * (t * (1.0 - t)).sqrt()),
            DensityShape::Uniform => 1.0,
            DensityShape::Table(points) => {
                let first = points[0];
                let last = points[points.len() - 1];
                if t < first.0 || t > last.0 {
                    return 0.0;
                }
                let i = points.partition_point(|p| p.0 <= t).clamp(1, points.len() - 1);
                let (t0, v0) = points[i - 1];
                let (t1, v1) = points[i];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Discretizes the density into `(t, weight)` pairs on `(0, 1)`.
    fn discretize(&self) -> Vec<(f64, f64)> {
        if self.scale == 0.0 {
            return Vec::new();
        }
        match &self.shape {
            DensityShape::Arcsine => {
                let rule = QuadratureRule::gauss_legendre(self.nodes).mapped(0.0, PI / 2.0);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&theta, &w)| (theta.sin().powi(2), self.scale * 2.0 / PI * w))
                    .collect()
            }
            DensityShape::Uniform => {
                let rule = QuadratureRule::gauss_legendre(self.nodes).mapped(0.0, 1.0);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&t, &w)| (t, self.scale * w))
                    .collect()
            }
            DensityShape::Table(points) => {
                let segments = points.len() - 1;
                let per = (self.nodes / segments).max(4);
                let base = QuadratureRule::gauss_legendre(per);
                let mut out = Vec::with_capacity(per * segments);
                for w in points.windows(2) {
                    let rule = base.mapped(w[0].0, w[1].0);
                    for (&t, &q) in rule.nodes.iter().zip(&rule.weights) {
                        let v = self.shape_value(t);
                        if v > 0.0 {
                            out.push((t, self.scale * q * v));
                        }
                    }
                }
                out
            }
        }
    }

    fn reflect(&self) -> Density {
        let shape = match &self.shape {
            DensityShape::Table(points) => {
                DensityShape::Table(points.iter().rev().map(|&(t, v)| (1.0 - t, v)).collect())
            }
            other => other.clone(),
        };
        Density {
            shape,
            scale: self.scale,
            nodes: self.nodes,
        }
    }
}

/// A finite measure on `[0, 1]`: atoms plus an optional density.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMeasure {
    atoms: Vec<(f64, f64)>,
    density: Option<Density>,
    discrete: Vec<(f64, f64)>,
}

impl FiniteMeasure {
    /// Atoms at the same location are merged; zero-weight atoms are dropped.
    pub fn new(atoms: Vec<(f64, f64)>, density: Option<Density>) -> Result<Self> {
        for &(t, w) in &atoms {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::InvalidParameter(format!("atom location {t} outside [0, 1]")));
            }
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!("atom weight {w} must be >= 0")));
            }
        }
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (t, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => merged.push((t, w)),
            }
        }
        merged.retain(|&(_, w)| w > 0.0);
        let discrete = density.as_ref().map(Density::discretize).unwrap_or_default();
        Ok(Self {
            atoms: merged,
            density,
            discrete,
        })
    }

    pub fn zero() -> Self {
        Self {
            atoms: Vec::new(),
            density: None,
            discrete: Vec::new(),
        }
    }

    /// `w δ_t`.
    pub fn dirac(t: f64, w: f64) -> Result<Self> {
        Self::new(vec![(t, w)], None)
    }

    /// The unit-mass arcsine law, associated with the geometric mean.
    pub fn arcsine(nodes: usize) -> Result<Self> {
        Self::new(Vec::new(), Some(Density::arcsine(1.0, nodes)?))
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&Density> {
        self.density.as_ref()
    }

    /// Atoms followed by the quadrature nodes of the density.
    pub fn weighted_nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms.iter().chain(self.discrete.iter()).copied()
    }

    /// `μ({t})`.
    pub fn atom_at(&self, t: f64) -> f64 {
        self.atoms
            .iter()
            .find(|a| a.0 == t)
            .map(|a| a.1)
            .unwrap_or(0.0)
    }

    /// `μ([0, 1])`.
    pub fn mass(&self) -> f64 {
        self.weighted_nodes().map(|(_, w)| w).sum()
    }

    pub fn is_probability(&self) -> bool {
        (self.mass() - 1.0).abs() <= 1e-10
    }

    /// `Some(k)` when the measure is `k δ_t`.
    pub fn dirac_multiple(&self, t: f64) -> Option<f64> {
        let density_mass: f64 = self.discrete.iter().map(|(_, w)| w).sum();
        if density_mass > 0.0 {
            return None;
        }
        match self.atoms.as_slice() {
            [] => Some(0.0),
            [(s, w)] if *s == t => Some(*w),
            _ => None,
        }
    }

    /// The measure of the transpose connection: the pushforward under `t ↦ 1 − t`.
    pub fn reflect(&self) -> FiniteMeasure {
        let atoms = self.atoms.iter().map(|&(t, w)| (1.0 - t, w)).collect();
        let density = self.density.as_ref().map(Density::reflect);
        FiniteMeasure::new(atoms, density).expect("reflection preserves validity")
    }

    /// Scales every weight by `k ⩾ 0`.
    pub fn scaled(&self, k: f64) -> Result<FiniteMeasure> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {k} must be >= 0")));
        }
        let atoms = self.atoms.iter().map(|&(t, w)| (t, k * w)).collect();
        let density = self.density.as_ref().map(|d| Density {
            scale: d.scale * k,
            ..d.clone()
        });
        FiniteMeasure::new(atoms, density)
    }

    /// `f(x) = ∫ (1 !_t x) dμ(t)`.
    pub fn representing_value(&self, x: f64) -> f64 {
        self.weighted_nodes()
            .map(|(t, w)| w * harmonic_unit(t, x))
            .sum()
    }
}

/// `A !_t B = [(1 − t)A⁻¹ + tB⁻¹]⁻¹`, extended to singular arguments.
///
/// When both arguments are invertible the defining formula is used directly.
/// Otherwise the value goes through congruence by whichever argument is
/// invertible, and through the regularization schedule when neither is.
pub fn weighted_harmonic(
    a: &PsdMatrix,
    b: &PsdMatrix,
    t: f64,
    psd_tol: f64,
    schedule: &RegularizationSchedule,
) -> Result<PsdMatrix> {
    a.check_dim(b)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("harmonic weight {t} outside [0, 1]")));
    }
    if t == 0.0 {
        return Ok(a.clone());
    }
    if t == 1.0 {
        return Ok(b.clone());
    }
    let a_inv = a.as_matrix().clone().try_inverse();
    let b_inv = b.as_matrix().clone().try_inverse();
    if a.min_eigenvalue()? > psd_tol && b.min_eigenvalue()? > psd_tol {
        if let (Some(ai), Some(bi)) = (a_inv, b_inv) {
            let sum = ai * (1.0 - t) + bi * t;
            if let Some(h) = sum.try_inverse() {
                let h = SymmetricMatrix::symmetrized(h);
                let tol = psd_tol * (1.0 + h.frobenius_norm());
                return PsdMatrix::new(h, tol);
            }
        }
    }
    let f = |x: f64| Ok(harmonic_unit(t, x));
    let g = |x: f64| Ok(harmonic_unit(1.0 - t, x));
    connect(&f, Some(&g), a, b, psd_tol, schedule)
}

/// `f(x) = ∫ (1 !_t x) dμ(t)`.
pub fn fn_from_measure(mu: &FiniteMeasure, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            x,
            reason: "argument must be finite and nonnegative".into(),
        });
    }
    Ok(mu.representing_value(x))
}

/// `A σ B = Σ wᵢ (A !_{tᵢ} B)` over atoms and quadrature nodes.
pub fn eval_from_measure(
    mu: &FiniteMeasure,
    a: &PsdMatrix,
    b: &PsdMatrix,
    psd_tol: f64,
    schedule: &RegularizationSchedule,
) -> Result<PsdMatrix> {
    a.check_dim(b)?;
    let mut acc = SymmetricMatrix::zeros(a.dim());
    for (t, w) in mu.weighted_nodes() {
        let term = weighted_harmonic(a, b, t, psd_tol, schedule)?;
        acc = acc.add(&term.scale(w))?;
    }
    Ok(PsdMatrix::new_unchecked(acc))
}

pub fn mass(mu: &FiniteMeasure) -> f64 {
    mu.mass()
}

pub fn is_probability(mu: &FiniteMeasure) -> bool {
    mu.is_probability()
}

/// The associated measure of `f`, where a closed form is available.
pub fn known_measure_of(f: &FunctionSpec) -> Option<FiniteMeasure> {
    let m = match *f {
        FunctionSpec::Constant { k } => FiniteMeasure::dirac(0.0, k),
        FunctionSpec::ScalarIdentity { k } => FiniteMeasure::dirac(1.0, k),
        FunctionSpec::WeightedArithmetic { alpha }
        | FunctionSpec::QuasiArithmetic { p: 1.0, alpha } => {
            FiniteMeasure::new(vec![(0.0, 1.0 - alpha), (1.0, alpha)], None)
        }
        FunctionSpec::WeightedHarmonic { alpha }
        | FunctionSpec::QuasiArithmetic { p: -1.0, alpha } => FiniteMeasure::dirac(alpha, 1.0),
        FunctionSpec::WeightedGeometric { alpha: 0.5 } => {
            FiniteMeasure::arcsine(DEFAULT_NODES)
        }
        _ => return None,
    };
    m.ok()
}

impl fmt::Display for FiniteMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "atoms=[")?;
        for (i, (t, w)) in self.atoms.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({t},{w})")?;
        }
        write!(f, "]")?;
        if let Some(d) = &self.density {
            match &d.shape {
                DensityShape::Arcsine => write!(f, " density=arcsine")?,
                DensityShape::Uniform => write!(f, " density=uniform")?,
                DensityShape::Table(points) => {
                    write!(f, " density=table:[")?;
                    for (i, (t, v)) in points.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "({t},{v})")?;
                    }
                    write!(f, "]")?;
                }
            }
            write!(f, " nodes={} scale={}", d.nodes, d.scale)?;
        }
        Ok(())
    }
}

impl FromStr for FiniteMeasure {
    type Err = Error;

    /// Grammar (fields separated by whitespace or `;`, any order):
    ///
    /// ```text
    /// atoms=[(t,w),…]
    /// density=arcsine | uniform | table:[(t,v),…]
    /// nodes=N        (default 200)
    /// scale=c        (density multiplier, default 1)
    /// ```
    fn from_str(s: &str) -> Result<Self> {
        let mut atoms: Option<Vec<(f64, f64)>> = None;
        let mut shape: Option<DensityShape> = None;
        let mut nodes: Option<usize> = None;
        let mut scale: Option<f64> = None;
        let fields = split_fields(s)?;
        if fields.is_empty() {
            return Err(Error::Parse("empty measure".into()));
        }
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found `{field}`")))?;
            let dup = || Error::Parse(format!("field `{key}` given twice"));
            match key.trim() {
                "atoms" => {
                    if atoms.replace(parse_pairs(value)?).is_some() {
                        return Err(dup());
                    }
                }
                "density" => {
                    let v = value.trim();
                    let parsed = match v {
                        "arcsine" => DensityShape::Arcsine,
                        "uniform" | "lebesgue" => DensityShape::Uniform,
                        _ => match v.strip_prefix("table:") {
                            Some(rest) => DensityShape::Table(parse_pairs(rest)?),
                            None => {
                                return Err(Error::Parse(format!(
                                    "unsupported density `{v}` (arcsine, uniform, table:[...])"
                                )))
                            }
                        },
                    };
                    if shape.replace(parsed).is_some() {
                        return Err(dup());
                    }
                }
                "nodes" => {
                    let n: usize = value
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid node count `{value}`")))?;
                    if nodes.replace(n).is_some() {
                        return Err(dup());
                    }
                }
                "scale" => {
                    if scale.replace(spec_text::number(value)?).is_some() {
                        return Err(dup());
                    }
                }
                other => return Err(Error::Parse(format!("unknown measure field `{other}`"))),
            }
        }
        if shape.is_none() && (nodes.is_some() || scale.is_some()) {
            return Err(Error::Parse("nodes/scale given without a density".into()));
        }
        let density = match shape {
            Some(shape) => Some(Density::new(
                shape,
                scale.unwrap_or(1.0),
                nodes.unwrap_or(DEFAULT_NODES),
            )?),
            None => None,
        };
        FiniteMeasure::new(atoms.unwrap_or_default(), density)
    }
}

/// Splits on whitespace or `;` outside brackets.
fn split_fields(s: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth: i32 = 0;
    for c in s.chars() {
        match c {
            '[' | '(' => {
                depth += 1;
                cur.push(c);
            }
            ']' | ')' => {
                depth -= 1;
                if depth < 0 {
                    return Err(Error::Parse("unbalanced brackets".into()));
                }
                cur.push(c);
            }
            c if (c.is_whitespace() || c == ';') && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if depth != 0 {
        return Err(Error::Parse("unbalanced brackets".into()));
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    Ok(out)
}

/// Parses `[(a,b),(c,d),…]`.
fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>> {
    let body = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("expected [(x,y),…], found `{s}`")))?
        .trim();
    if body.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut rest = body;
    loop {
        let inner_start = rest
            .strip_prefix('(')
            .ok_or_else(|| Error::Parse(format!("expected `(` in `{s}`")))?;
        let close = inner_start
            .find(')')
            .ok_or_else(|| Error::Parse(format!("missing `)` in `{s}`")))?;
        let (x, y) = inner_start[..close]
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("expected a pair in `{s}`")))?;
        out.push((spec_text::number(x)?, spec_text::number(y)?));
        if out.len() > MAX_TABLE_POINTS {
            return Err(Error::Parse("too many pairs".into()));
        }
        rest = inner_start[close + 1..].trim_start();
        if rest.is_empty() {
            return Ok(out);
        }
        rest = rest
            .strip_prefix(',')
            .ok_or_else(|| Error::Parse(format!("expected `,` between pairs in `{s}`")))?
            .trim_start();
    }
}
