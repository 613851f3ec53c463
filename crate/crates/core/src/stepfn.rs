//! Non-increasing step functions on the half line and the objects derived
//! from them: distribution functions, Lorenz curves and integral functionals.
//!
//! A [`StepFunction`] is always kept in canonical form: pieces sorted by
//! strictly decreasing value, no zero-valued pieces, and an implicit zero
//! tail on the rest of `[0, ∞)`. It is the common representation for
//! decreasing rearrangements of discrete functions and for spectral scales
//! of densities.

use alloc::vec::Vec;
use core::cmp::Ordering;

// shadowed by inherent methods whenever std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result, MERGE_TOL};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub value: f64,
    pub width: f64,
}

/// Canonical non-increasing step function with finite integral.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepFunction {
    pieces: Vec<Piece>,
}

impl StepFunction {
    pub fn zero() -> Self {
        Self { pieces: Vec::new() }
    }

    /// Decreasing rearrangement of arbitrary `(value, width)` pairs.
    ///
    /// Zero-valued pairs may carry an infinite width (the symbolic zero
    /// tail); every other width must be finite and positive.
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut pieces = Vec::new();
        for (value, width) in pairs {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::domain(alloc::format!("invalid value {value}")));
            }
            if width.is_nan() || width <= 0.0 {
                return Err(Error::domain(alloc::format!("invalid width {width}")));
            }
            if value == 0.0 {
                continue;
            }
            if !width.is_finite() {
                return Err(Error::domain("nonzero value on an infinite width"));
            }
            pieces.push(Piece { value, width });
        }
        // stable: equal values keep input order
        pieces.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(Ordering::Equal));
        Ok(Self { pieces: merge_adjacent(pieces) })
    }

    /// Single plateau `value` on `[0, width)`.
    pub fn flat(value: f64, width: f64) -> Result<Self> {
        Self::new([(value, width)])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// `∫ f`.
    pub fn total(&self) -> f64 {
        self.pieces.iter().map(|p| p.value * p.width).sum()
    }

    /// Measure of the support, `μ(supp f)`.
    pub fn support(&self) -> f64 {
        self.pieces.iter().map(|p| p.width).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.pieces.first().map_or(0.0, |p| p.value)
    }

    pub fn min_positive_value(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.value)
    }

    /// Right-continuous evaluation: the value on `[t_k, t_{k+1})`.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let mut start = 0.0;
        for p in &self.pieces {
            let end = start + p.width;
            if t < end {
                return p.value;
            }
            start = end;
        }
        0.0
    }

    /// Cumulative widths, i.e. the right end of every piece.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.pieces
            .iter()
            .map(|p| {
                acc += p.width;
                acc
            })
            .collect()
    }

    /// Distribution function `D_f(t) = μ([f > t])`, itself a canonical
    /// non-increasing step function of `t`.
    pub fn distribution(&self) -> StepFunction {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut mass: f64 = self.support();
        for (k, p) in self.pieces.iter().enumerate().rev() {
            let lower = self.pieces.get(k + 1).map_or(0.0, |q| q.value);
            pieces.push(Piece { value: mass, width: p.value - lower });
            mass -= p.width;
        }
        // piece values are cumulative masses, strictly decreasing by construction
        StepFunction { pieces }
    }

    /// Lorenz curve `L_f(t) = ∫₀ᵗ f(s) ds`.
    pub fn lorenz(&self) -> LorenzCurve {
        let mut knots = Vec::with_capacity(self.pieces.len() + 1);
        knots.push((0.0, 0.0));
        let (mut t, mut l) = (0.0, 0.0);
        for p in &self.pieces {
            t += p.width;
            l += p.value * p.width;
            knots.push((t, l));
        }
        LorenzCurve { knots }
    }

    /// `L_f(t)` without building the whole curve.
    pub fn lorenz_at(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut start = 0.0;
        for p in &self.pieces {
            if t <= start {
                break;
            }
            let len = (t - start).min(p.width);
            acc += p.value * len;
            start += p.width;
        }
        acc
    }

    /// `Σ φ(value)·width` over the pieces, without any check on `φ(0)`.
    pub fn integrate_values(&self, phi: impl Fn(f64) -> f64) -> f64 {
        self.pieces.iter().map(|p| phi(p.value) * p.width).sum()
    }

    /// `∫₀^∞ φ(f(t)) dt` for convex `φ` with `φ(0) = 0`.
    ///
    /// The zero tail has infinite measure, so `φ(0) ≠ 0` is rejected.
    pub fn convex_integral<C: ConvexFunction + ?Sized>(&self, phi: &C) -> Result<f64> {
        let at_zero = phi.eval(0.0);
        if at_zero.abs() > 1e-15 {
            return Err(Error::domain(alloc::format!(
                "φ(0) = {at_zero} makes the integral over the zero tail diverge"
            )));
        }
        Ok(self.integrate_values(|x| phi.eval(x)))
    }

    /// `∫ |f − g|`, exact over the union of breakpoints.
    pub fn l1_distance(&self, other: &StepFunction) -> f64 {
        let mut acc = 0.0;
        joint_walk(self, other, |a, b, len| acc += (a - b).abs() * len);
        acc
    }

    /// `∫ √(f g)`.
    pub fn sqrt_overlap(&self, other: &StepFunction) -> f64 {
        let mut acc = 0.0;
        joint_walk(self, other, |a, b, len| acc += (a * b).sqrt() * len);
        acc
    }

    /// Spectral scale of a tensor product: values multiply, widths multiply.
    pub fn tensor(&self, other: &StepFunction) -> StepFunction {
        let mut pieces = Vec::with_capacity(self.len() * other.len());
        for p in &self.pieces {
            for q in &other.pieces {
                pieces.push(Piece { value: p.value * q.value, width: p.width * q.width });
            }
        }
        pieces.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(Ordering::Equal));
        StepFunction { pieces: merge_adjacent(pieces) }
    }

    /// `t ↦ c·f(t/s)`: values scaled by `c`, widths by `s`.
    pub fn rescale(&self, value_factor: f64, width_factor: f64) -> Result<StepFunction> {
        if !(value_factor > 0.0 && value_factor.is_finite()) || !(width_factor > 0.0 && width_factor.is_finite()) {
            return Err(Error::domain("rescaling factors must be positive and finite"));
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece { value: p.value * value_factor, width: p.width * width_factor })
            .collect();
        Ok(StepFunction { pieces })
    }

    /// Restriction to `[0, t)`.
    pub fn truncate(&self, t: f64) -> StepFunction {
        let mut pieces = Vec::new();
        let mut start = 0.0;
        for p in &self.pieces {
            if start >= t {
                break;
            }
            let width = p.width.min(t - start);
            if width > 0.0 {
                pieces.push(Piece { value: p.value, width });
            }
            start += p.width;
        }
        StepFunction { pieces }
    }

    /// Multiplicity-weighted `(value, width)` pairs.
    pub fn to_pairs(&self) -> Vec<(f64, f64)> {
        self.pieces.iter().map(|p| (p.value, p.width)).collect()
    }
}

fn merge_adjacent(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if (last.value - p.value).abs() <= MERGE_TOL * last.value.max(p.value) {
                let width = last.width + p.width;
                last.value = (last.value * last.width + p.value * p.width) / width;
                last.width = width;
                continue;
            }
        }
        out.push(p);
    }
    out
}

/// Calls `visit(f, g, len)` on every interval of the union partition of the
/// two supports.
pub(crate) fn joint_walk(f: &StepFunction, g: &StepFunction, mut visit: impl FnMut(f64, f64, f64)) {
    let (fp, gp) = (f.pieces(), g.pieces());
    let (mut i, mut j) = (0, 0);
    let mut f_left = fp.first().map_or(0.0, |p| p.width);
    let mut g_left = gp.first().map_or(0.0, |p| p.width);
    loop {
        let (f_on, g_on) = (i < fp.len(), j < gp.len());
        let len = match (f_on, g_on) {
            (true, true) => f_left.min(g_left),
            (true, false) => f_left,
            (false, true) => g_left,
            (false, false) => break,
        };
        let fv = if f_on { fp[i].value } else { 0.0 };
        let gv = if g_on { gp[j].value } else { 0.0 };
        visit(fv, gv, len);
        if f_on {
            f_left -= len;
            if f_left <= 0.0 {
                i += 1;
                f_left = fp.get(i).map_or(0.0, |p| p.width);
            }
        }
        if g_on {
            g_left -= len;
            if g_left <= 0.0 {
                j += 1;
                g_left = gp.get(j).map_or(0.0, |p| p.width);
            }
        }
    }
}

/// Concave, non-decreasing, piecewise-linear curve through `(0, 0)`,
/// constant after its last knot.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzCurve {
    knots: Vec<(f64, f64)>,
}

impl LorenzCurve {
    /// Validates knots: strictly increasing `t`, `L(0) = 0`, non-decreasing
    /// and concave up to a relative slack of `1e-9`.
    pub fn from_knots(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.first().map_or(true, |&(t, _)| t > 0.0) {
            knots.insert(0, (0.0, 0.0));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::domain("Lorenz curve must start at (0, 0)"));
        }
        let scale = knots.iter().map(|k| k.1.abs()).fold(1.0, f64::max);
        let mut prev_slope = f64::INFINITY;
        for w in knots.windows(2) {
            let ((t0, l0), (t1, l1)) = (w[0], w[1]);
            if !(t1 > t0) || !t1.is_finite() || !l1.is_finite() {
                return Err(Error::domain("knot times must be finite and strictly increasing"));
            }
            let slope = (l1 - l0) / (t1 - t0);
            if slope < -1e-9 * scale {
                return Err(Error::domain("Lorenz curve must be non-decreasing"));
            }
            if slope > prev_slope + 1e-9 * scale {
                return Err(Error::domain("Lorenz curve must be concave"));
            }
            prev_slope = slope;
        }
        Ok(Self { knots })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Plateau value, the total integral.
    pub fn total(&self) -> f64 {
        self.knots.last().map_or(0.0, |k| k.1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let idx = self.knots.partition_point(|k| k.0 <= t);
        if idx >= self.knots.len() {
            return self.total();
        }
        let (t0, l0) = self.knots[idx - 1];
        let (t1, l1) = self.knots[idx];
        l0 + (l1 - l0) * (t - t0) / (t1 - t0)
    }

    /// Slopes between consecutive knots (the piece values of the underlying
    /// step function).
    pub fn slopes(&self) -> Vec<f64> {
        self.knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
    }

    /// See [`dominates`].
    pub fn dominates(&self, other: &LorenzCurve, tol: f64) -> bool {
        dominates(self, other, tol)
    }
}

/// `f(t) ≥ g(t) − tol·scale` at every knot of either curve, with `scale` the
/// larger plateau. Knot comparison suffices since both curves are linear
/// between union knots and constant after the last one.
pub fn dominates(f: &LorenzCurve, g: &LorenzCurve, tol: f64) -> bool {
    let scale = f.total().max(g.total());
    let slack = if scale > 0.0 { tol * scale } else { tol };
    f.knots.iter().chain(g.knots.iter()).all(|&(t, _)| f.eval(t) >= g.eval(t) - slack)
}

/// Convex function with `φ(0) = 0`, supplied as a handle.
///
/// Convexity is a contract of the implementor; it is not (and cannot be)
/// checked from the handle.
pub trait ConvexFunction {
    fn eval(&self, x: f64) -> f64;
}

/// `x ↦ x^p` for `p ≥ 1`.
#[derive(Debug, Clone, Copy)]
pub struct Power(pub f64);

impl ConvexFunction for Power {
    fn eval(&self, x: f64) -> f64 {
        x.powf(self.0)
    }
}

/// `x ↦ (x − t)₊`.
#[derive(Debug, Clone, Copy)]
pub struct HockeyStick(pub f64);

impl ConvexFunction for HockeyStick {
    fn eval(&self, x: f64) -> f64 {
        (x - self.0).max(0.0)
    }
}

/// `x ↦ x log x` (with `0 log 0 = 0`).
#[derive(Debug, Clone, Copy)]
pub struct XLogX;

impl ConvexFunction for XLogX {
    fn eval(&self, x: f64) -> f64 {
        if x > 0.0 {
            x * x.ln()
        } else {
            0.0
        }
    }
}

/// Wraps a closure the caller asserts to be convex with `φ(0) = 0`.
pub struct AssumeConvex<F>(pub F);

impl<F: Fn(f64) -> f64> ConvexFunction for AssumeConvex<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub label: usize,
    pub mass: f64,
}

/// Finite list of weighted atoms, optionally followed by a symbolic tail of
/// infinite mass on which every function vanishes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasureSpace {
    atoms: Vec<Atom>,
    infinite_tail: bool,
}

impl DiscreteMeasureSpace {
    pub fn new(atoms: Vec<Atom>, infinite_tail: bool) -> Result<Self> {
        for (k, a) in atoms.iter().enumerate() {
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return Err(Error::domain(alloc::format!("atom {} has mass {}", a.label, a.mass)));
            }
            if atoms[..k].iter().any(|b| b.label == a.label) {
                return Err(Error::domain(alloc::format!("duplicate atom label {}", a.label)));
            }
        }
        Ok(Self { atoms, infinite_tail })
    }

    /// Atoms labelled `0..n` with the given masses.
    pub fn with_masses(masses: &[f64]) -> Result<Self> {
        Self::new(
            masses.iter().enumerate().map(|(label, &mass)| Atom { label, mass }).collect(),
            false,
        )
    }

    /// `n` atoms of unit mass.
    pub fn counting(n: usize) -> Self {
        Self { atoms: (0..n).map(|label| Atom { label, mass: 1.0 }).collect(), infinite_tail: false }
    }

    pub fn with_infinite_tail(mut self) -> Self {
        self.infinite_tail = true;
        self
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn masses(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.mass).collect()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn has_infinite_tail(&self) -> bool {
        self.infinite_tail
    }

    /// Mass of the listed atoms (excluding the tail).
    pub fn finite_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Total mass, `None` when the tail is infinite.
    pub fn total_mass(&self) -> Option<f64> {
        (!self.infinite_tail).then(|| self.finite_mass())
    }
}

/// Nonnegative function on a [`DiscreteMeasureSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVector {
    space: DiscreteMeasureSpace,
    values: Vec<f64>,
}

impl WeightedVector {
    pub fn new(space: DiscreteMeasureSpace, values: Vec<f64>) -> Result<Self> {
        if space.len() != values.len() {
            return Err(Error::dim(alloc::format!("{} atoms but {} values", space.len(), values.len())));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::domain(alloc::format!("invalid value {v}")));
        }
        Ok(Self { space, values })
    }

    /// Values on unit-mass atoms.
    pub fn unit(values: &[f64]) -> Result<Self> {
        Self::new(DiscreteMeasureSpace::counting(values.len()), values.to_vec())
    }

    pub fn weighted(values: &[f64], masses: &[f64]) -> Result<Self> {
        Self::new(DiscreteMeasureSpace::with_masses(masses)?, values.to_vec())
    }

    pub fn space(&self) -> &DiscreteMeasureSpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn masses(&self) -> Vec<f64> {
        self.space.masses()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().zip(self.space.atoms()).map(|(v, a)| v * a.mass).sum()
    }

    pub fn support_mass(&self) -> f64 {
        self.values.iter().zip(self.space.atoms()).filter(|(v, _)| **v > 0.0).map(|(_, a)| a.mass).sum()
    }

    pub fn rearrange(&self) -> StepFunction {
        // values and masses were validated on construction
        StepFunction::new(self.values.iter().zip(self.space.atoms()).map(|(&v, a)| (v, a.mass)))
            .expect("validated weighted vector")
    }
}

/// Decreasing rearrangement of `(value, mass)` pairs.
pub fn rearrange(pairs: &[(f64, f64)]) -> Result<StepFunction> {
    if let Some(&(_, m)) = pairs.iter().find(|(_, m)| !(*m > 0.0)) {
        return Err(Error::domain(alloc::format!("nonpositive mass {m}")));
    }
    StepFunction::new(pairs.iter().copied())
}
