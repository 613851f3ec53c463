//! Majorization and submajorization on discrete measure spaces, and the
//! doubly (sub)stochastic maps that implement them.
//!
//! Conventions for a [`StochasticMap`] `T` from `(X, μ)` to `(Y, ν)`: the
//! matrix has one row per target atom and one column per source atom, and
//! acts on functions by `(T f)_i = Σ_j T_ij f_j`.
//!
//! - doubly substochastic (DSS): `T_ij ≥ 0`, `Σ_j T_ij ≤ 1` (subunital) and
//!   `Σ_i ν_i T_ij ≤ μ_j` (integral non-increasing);
//! - doubly stochastic (DS): both families hold with equality.
//!
//! With unit masses these are the familiar row and column sum conditions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

// shadowed by inherent methods whenever std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::stepfn::{HockeyStick, WeightedVector};
use crate::{Error, Result, DEFAULT_TOL};

/// Largest refined grid the T-transform synthesis will build.
pub const GRID_CAP: usize = 1_000_000;

/// Absolute slack on row/column sums when verifying synthesized maps.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// Relative `L¹` slack when verifying `T f = g`.
pub const ACTION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMap {
    source_masses: Vec<f64>,
    target_masses: Vec<f64>,
    /// Row-major, `target × source`.
    matrix: Vec<Vec<f64>>,
}

impl StochasticMap {
    pub fn new(source_masses: Vec<f64>, target_masses: Vec<f64>, matrix: Vec<Vec<f64>>) -> Result<Self> {
        if matrix.len() != target_masses.len() {
            return Err(Error::dim(format!("{} rows for {} target atoms", matrix.len(), target_masses.len())));
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != source_masses.len()) {
            return Err(Error::dim(format!("row of length {} for {} source atoms", row.len(), source_masses.len())));
        }
        if source_masses.iter().chain(&target_masses).any(|m| !(*m > 0.0 && m.is_finite())) {
            return Err(Error::domain("atom masses must be positive and finite"));
        }
        if matrix.iter().flatten().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::domain("matrix entries must be finite and nonnegative"));
        }
        Ok(Self { source_masses, target_masses, matrix })
    }

    pub fn identity(masses: &[f64]) -> Result<Self> {
        let n = masses.len();
        let matrix = (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        Self::new(masses.to_vec(), masses.to_vec(), matrix)
    }

    pub fn zeros(source_masses: &[f64], target_masses: &[f64]) -> Result<Self> {
        let matrix = vec![vec![0.0; source_masses.len()]; target_masses.len()];
        Self::new(source_masses.to_vec(), target_masses.to_vec(), matrix)
    }

    pub fn source_masses(&self) -> &[f64] {
        &self.source_masses
    }

    pub fn target_masses(&self) -> &[f64] {
        &self.target_masses
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn entry(&self, target: usize, source: usize) -> f64 {
        self.matrix[target][source]
    }

    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| row.iter().zip(f).map(|(t, x)| t * x).sum()).collect()
    }

    /// Dual map: `∫ g·T(f) dν = ∫ T*(g)·f dμ`.
    pub fn apply_dual(&self, g: &[f64]) -> Vec<f64> {
        (0..self.source_masses.len())
            .map(|j| {
                let s: f64 = (0..self.target_masses.len()).map(|i| self.target_masses[i] * self.matrix[i][j] * g[i]).sum();
                s / self.source_masses[j]
            })
            .collect()
    }

    /// `T(1)`, one entry per target atom.
    pub fn row_sums(&self) -> Vec<f64> {
        self.matrix.iter().map(|r| r.iter().sum()).collect()
    }

    /// `∫ T(χ_j) dν`, one entry per source atom.
    pub fn weighted_column_sums(&self) -> Vec<f64> {
        (0..self.source_masses.len())
            .map(|j| (0..self.target_masses.len()).map(|i| self.target_masses[i] * self.matrix[i][j]).sum())
            .collect()
    }

    /// Largest violation of the DSS inequalities (0 when satisfied).
    pub fn dss_violation(&self) -> f64 {
        let rows = self.row_sums().into_iter().map(|s| s - 1.0);
        let cols = self.weighted_column_sums().into_iter().zip(&self.source_masses).map(|(s, m)| s - m);
        rows.chain(cols).fold(0.0, f64::max)
    }

    /// Largest deviation from the DS equalities.
    pub fn ds_violation(&self) -> f64 {
        let rows = self.row_sums().into_iter().map(|s| (s - 1.0).abs());
        let cols = self.weighted_column_sums().into_iter().zip(&self.source_masses).map(|(s, m)| (s - m).abs());
        rows.chain(cols).fold(0.0, f64::max)
    }

    pub fn is_dss(&self, tol: f64) -> bool {
        self.dss_violation() <= tol
    }

    pub fn is_ds(&self, tol: f64) -> bool {
        self.ds_violation() <= tol
    }

    /// Relative `L¹(ν)` distance between `T f` and `g`.
    pub fn action_error(&self, f: &[f64], g: &[f64]) -> f64 {
        let tf = self.apply(f);
        let err: f64 = tf.iter().zip(g).zip(&self.target_masses).map(|((a, b), m)| (a - b).abs() * m).sum();
        let scale: f64 = g.iter().zip(&self.target_masses).map(|(b, m)| b.abs() * m).sum();
        if err == 0.0 {
            0.0
        } else {
            err / scale.max(f64::MIN_POSITIVE)
        }
    }
}

/// `f ≻_w g`: Lorenz dominance of the decreasing rearrangements.
pub fn check_submajorization(f: &WeightedVector, g: &WeightedVector, tol: f64) -> bool {
    f.rearrange().lorenz().dominates(&g.rearrange().lorenz(), tol)
}

/// `f ≻ g`: submajorization with equal integrals.
pub fn check_majorization(f: &WeightedVector, g: &WeightedVector, tol: f64) -> bool {
    let (a, b) = (f.integral(), g.integral());
    let scale = a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
    (a - b).abs() <= tol * scale && check_submajorization(f, g, tol)
}

/// Hockey-stick form of submajorization: `∫(f − t)₊ ≥ ∫(g − t)₊` at
/// `t = 0` and at every value taken by `f` or `g`. Both sides are piecewise
/// linear and convex in `t` with kinks only at those values, so checking
/// them decides the inequality for all `t ≥ 0`.
pub fn check_submajorization_hockey(f: &WeightedVector, g: &WeightedVector, tol: f64) -> bool {
    let (fs, gs) = (f.rearrange(), g.rearrange());
    let scale = fs.total().max(gs.total());
    let slack = if scale > 0.0 { tol * scale } else { tol };
    let levels = core::iter::once(0.0).chain(fs.pieces().iter().chain(gs.pieces()).map(|p| p.value));
    levels.into_iter().all(|t| {
        let phi = HockeyStick(t);
        let lhs = fs.convex_integral(&phi).expect("(x - t)+ vanishes at 0");
        let rhs = gs.convex_integral(&phi).expect("(x - t)+ vanishes at 0");
        lhs >= rhs - slack
    })
}

/// Doubly stochastic map `T` with `T f = g`, built from a chain of
/// T-transforms on the decreasing rearrangements refined to a common mass
/// grid.
///
/// When the total masses differ, an infinite symbolic tail on the lighter
/// side is used to carve out a zero-valued balancing atom, which is appended
/// as the last atom of that side in the returned map.
pub fn synthesize_ds(f: &WeightedVector, g: &WeightedVector) -> Result<StochasticMap> {
    if !check_majorization(f, g, DEFAULT_TOL) {
        return Err(Error::NotMajorized);
    }
    let (mut src_vals, mut src_masses) = (f.values().to_vec(), f.masses());
    let (mut tgt_vals, mut tgt_masses) = (g.values().to_vec(), g.masses());
    let (mu, nu) = (f.space().finite_mass(), g.space().finite_mass());
    let gap = nu - mu;
    if gap.abs() > 1e-12 * mu.max(nu) {
        let (tail_side, lighter) = if gap > 0.0 {
            (f.space().has_infinite_tail(), "source")
        } else {
            (g.space().has_infinite_tail(), "target")
        };
        if !tail_side {
            return Err(Error::NotExtendable(format!(
                "total masses {mu} and {nu} differ and the {lighter} space has no infinite tail"
            )));
        }
        if gap > 0.0 {
            src_vals.push(0.0);
            src_masses.push(gap);
        } else {
            tgt_vals.push(0.0);
            tgt_masses.push(-gap);
        }
    }
    let matrix = refined_t_transform_map(&src_vals, &src_masses, &tgt_vals, &tgt_masses)?;
    StochasticMap::new(src_masses, tgt_masses, matrix)
}

/// Doubly substochastic map `T` with `T f = g`, `T(χ_supp f) ≤ χ_supp g` and
/// `T*(χ_supp g) ≤ χ_supp f`.
///
/// The target is padded with a sink atom that absorbs `∫f − ∫g`, a DS map is
/// synthesized onto the padded target and the padding is dropped again.
pub fn synthesize_dss(f: &WeightedVector, g: &WeightedVector) -> Result<StochasticMap> {
    if !check_submajorization(f, g, DEFAULT_TOL) {
        return Err(Error::NotSubmajorized);
    }
    let (nx, ny) = (f.values().len(), g.values().len());
    if g.integral() <= 0.0 {
        return StochasticMap::zeros(&f.masses(), &g.masses());
    }
    let deficit = f.integral() - g.integral();
    let src_masses = f.masses();
    let tgt_masses = g.masses();
    let all_masses: Vec<f64> = src_masses.iter().chain(&tgt_masses).copied().collect();
    let unit = common_unit(&all_masses)?;

    let mut tgt_vals = g.values().to_vec();
    let mut padded_tgt_masses = tgt_masses.clone();
    if deficit > 1e-12 * f.integral() {
        let g_min = g.values().iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
        let mut sink_atoms = (deficit / (g_min * unit)).ceil().max(1.0);
        loop {
            let sink_mass = sink_atoms * unit;
            let sink_value = deficit / sink_mass;
            let mut vals = tgt_vals.clone();
            vals.push(sink_value);
            let mut masses = padded_tgt_masses.clone();
            masses.push(sink_mass);
            let candidate = WeightedVector::weighted(&vals, &masses)?;
            if check_submajorization(f, &candidate, DEFAULT_TOL) {
                tgt_vals = vals;
                padded_tgt_masses = masses;
                break;
            }
            sink_atoms *= 2.0;
            let needed = (src_masses.iter().sum::<f64>() + padded_tgt_masses.iter().sum::<f64>() + sink_atoms * unit) / unit;
            if needed > GRID_CAP as f64 {
                return Err(Error::GridTooFine { needed: needed as usize, cap: GRID_CAP });
            }
        }
    }

    let mut src_vals = f.values().to_vec();
    let mut padded_src_masses = src_masses.clone();
    let (mu, nu): (f64, f64) = (padded_src_masses.iter().sum(), padded_tgt_masses.iter().sum());
    let balance = ((nu - mu) / unit).round() * unit;
    if balance > 0.0 {
        src_vals.push(0.0);
        padded_src_masses.push(balance);
    } else if balance < 0.0 {
        tgt_vals.push(0.0);
        padded_tgt_masses.push(-balance);
    }

    let full = refined_t_transform_map(&src_vals, &padded_src_masses, &tgt_vals, &padded_tgt_masses)?;
    let matrix = (0..ny)
        .map(|i| {
            (0..nx)
                .map(|j| if g.values()[i] > 0.0 && f.values()[j] > 0.0 { full[i][j] } else { 0.0 })
                .collect()
        })
        .collect();
    StochasticMap::new(src_masses, tgt_masses, matrix)
}

/// Outcome of [`ds_extension_exists`].
#[derive(Debug, Clone, PartialEq)]
pub struct DsExtension {
    pub exists: bool,
    /// `μ(X ∖ Ω)`, infinite when the source has an infinite tail.
    pub cosupport_mass: f64,
    /// `∫_Y (1 − T(χ_Ω)) dν`, infinite when the target has an infinite tail.
    pub unused_capacity: f64,
    /// The DS extension `T̃(h) = T(χ_Ω h) + w ∫_{X∖Ω} h dμ / μ(X∖Ω)` with
    /// `w = 1 − T(χ_Ω)`; only built when both spaces are finite.
    pub extension: Option<StochasticMap>,
}

/// Decides whether a DSS map `T` with `T f = g` that is integral-preserving
/// on the source atoms `support` agrees there with some DS map, by the
/// measure balance `μ(X∖Ω) = ∫_Y (1 − T(χ_Ω)) dν`.
pub fn ds_extension_exists(
    t: &StochasticMap,
    support: &[usize],
    f: &WeightedVector,
    g: &WeightedVector,
) -> Result<DsExtension> {
    let (nx, ny) = (f.values().len(), g.values().len());
    if t.source_masses().len() != nx || t.target_masses().len() != ny {
        return Err(Error::dim("map does not act between the spaces of f and g"));
    }
    if let Some(&j) = support.iter().find(|&&j| j >= nx) {
        return Err(Error::dim(format!("support atom {j} out of range")));
    }
    let mass_scale = t.source_masses().iter().chain(t.target_masses()).fold(1.0, |a: f64, b| a.max(*b));
    if !t.is_dss(CONSTRAINT_TOL * mass_scale) {
        return Err(Error::Precondition(format!("map is not DSS (violation {:e})", t.dss_violation())));
    }
    let action = t.action_error(f.values(), g.values());
    if action > ACTION_TOL {
        return Err(Error::Precondition(format!("T f differs from g (relative L1 error {action:e})")));
    }
    let col = t.weighted_column_sums();
    for &j in support {
        let mu = t.source_masses()[j];
        if (col[j] - mu).abs() > CONSTRAINT_TOL * mu.max(1.0) {
            return Err(Error::Precondition(format!("map is not integral-preserving on source atom {j}")));
        }
    }

    let in_support = |j: usize| support.contains(&j);
    let chi_omega: Vec<f64> = (0..nx).map(|j| if in_support(j) { 1.0 } else { 0.0 }).collect();
    let t_chi = t.apply(&chi_omega);
    let finite_capacity: f64 = t_chi.iter().zip(t.target_masses()).map(|(v, m)| (1.0 - v) * m).sum();
    let finite_cosupport: f64 = (0..nx).filter(|&j| !in_support(j)).map(|j| t.source_masses()[j]).sum();
    let cosupport_mass = if f.space().has_infinite_tail() { f64::INFINITY } else { finite_cosupport };
    let unused_capacity = if g.space().has_infinite_tail() { f64::INFINITY } else { finite_capacity };

    let exists = match (cosupport_mass.is_infinite(), unused_capacity.is_infinite()) {
        (true, true) => true,
        (false, false) => {
            (cosupport_mass - unused_capacity).abs() <= DEFAULT_TOL * cosupport_mass.max(unused_capacity).max(1.0)
        }
        _ => false,
    };

    let extension = if exists && cosupport_mass.is_finite() {
        let matrix = (0..ny)
            .map(|i| {
                let w = (1.0 - t_chi[i]).max(0.0);
                (0..nx)
                    .map(|j| {
                        if in_support(j) {
                            t.entry(i, j)
                        } else if finite_cosupport > 0.0 {
                            w * t.source_masses()[j] / finite_cosupport
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        Some(StochasticMap::new(t.source_masses().to_vec(), t.target_masses().to_vec(), matrix)?)
    } else {
        None
    };
    Ok(DsExtension { exists, cosupport_mass, unused_capacity, extension })
}

/// Source atoms where `f` is positive.
pub fn support_of(f: &WeightedVector) -> Vec<usize> {
    f.values().iter().enumerate().filter(|(_, v)| **v > 0.0).map(|(j, _)| j).collect()
}

/// Common mass unit of all `masses` (a float gcd), such that every mass is
/// an integer multiple of it.
pub fn common_unit(masses: &[f64]) -> Result<f64> {
    let scale = masses.iter().copied().fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::domain("no positive masses"));
    }
    let eps = 1e-9 * scale;
    let mut unit = masses[0];
    for &m in &masses[1..] {
        let (mut a, mut b) = (unit.max(m), unit.min(m));
        while b > eps {
            let r = a % b;
            a = b;
            b = if r > b - eps { 0.0 } else { r };
        }
        unit = a;
    }
    let total: f64 = masses.iter().sum();
    let needed = (total / unit).ceil();
    if !(needed <= GRID_CAP as f64) {
        return Err(Error::GridTooFine { needed: if needed.is_finite() { needed as usize } else { usize::MAX }, cap: GRID_CAP });
    }
    for &m in masses {
        let k = (m / unit).round();
        if (m - k * unit).abs() > 1e-9 * m {
            return Err(Error::GridTooFine { needed: usize::MAX, cap: GRID_CAP });
        }
    }
    Ok(unit)
}

/// Atom indices sorted by value, descending, ties by index.
fn sorted_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    order
}

/// Core DS synthesis between two spaces of equal total mass: refine both to
/// a uniform grid, run the T-transform chain on the sorted refined vectors
/// and aggregate back to atoms. Returns the `target × source` matrix.
pub(crate) fn refined_t_transform_map(
    src_vals: &[f64],
    src_masses: &[f64],
    tgt_vals: &[f64],
    tgt_masses: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let all: Vec<f64> = src_masses.iter().chain(tgt_masses).copied().collect();
    let unit = common_unit(&all)?;
    let counts = |masses: &[f64]| -> Vec<usize> { masses.iter().map(|m| (m / unit).round() as usize).collect() };
    let (src_counts, tgt_counts) = (counts(src_masses), counts(tgt_masses));
    let (n_src, n_tgt): (usize, usize) = (src_counts.iter().sum(), tgt_counts.iter().sum());
    if n_src != n_tgt {
        return Err(Error::Numerical(format!("refined grids differ in size ({n_src} vs {n_tgt})")));
    }
    let n = n_src;

    // refined sorted source: value and owning atom per grid cell
    let mut x = Vec::with_capacity(n);
    let mut owner = Vec::with_capacity(n);
    for j in sorted_order(src_vals) {
        for _ in 0..src_counts[j] {
            x.push(src_vals[j]);
            owner.push(j);
        }
    }
    let mut y = Vec::with_capacity(n);
    let mut tgt_owner = Vec::with_capacity(n);
    for i in sorted_order(tgt_vals) {
        for _ in 0..tgt_counts[i] {
            y.push(tgt_vals[i]);
            tgt_owner.push(i);
        }
    }

    // rows: refined target positions; columns: source atoms
    let nx = src_vals.len();
    let mut c: Vec<Vec<f64>> = owner
        .iter()
        .map(|&j| {
            let mut row = vec![0.0; nx];
            row[j] = 1.0;
            row
        })
        .collect();
    t_transform_chain(&mut x, &y, &mut c);

    let mut matrix = vec![vec![0.0; nx]; tgt_vals.len()];
    for (r, &i) in tgt_owner.iter().enumerate() {
        let w = 1.0 / tgt_counts[i] as f64;
        for (acc, v) in matrix[i].iter_mut().zip(&c[r]) {
            *acc += w * v;
        }
    }
    Ok(matrix)
}

/// Moves the sorted vector `z` onto the sorted target `y` by T-transforms,
/// applying each transform to the rows of `rows` as well.
///
/// Each step picks the largest `j` with `z_j > y_j` and the smallest `k > j`
/// with `z_k < y_k`, and moves `min(z_j − y_j, y_k − z_k)` from `j` to `k`.
/// Ordering of `z` is preserved and every step matches one more coordinate.
fn t_transform_chain(z: &mut [f64], y: &[f64], rows: &mut [Vec<f64>]) {
    let n = z.len();
    let scale = z.iter().chain(y).fold(0.0, |a: f64, b| a.max(b.abs()));
    let eps = 1e-15 * scale.max(f64::MIN_POSITIVE);
    for _ in 0..2 * n + 1 {
        let Some(j) = (0..n).rev().find(|&j| z[j] > y[j] + eps) else { break };
        let Some(k) = (j + 1..n).find(|&k| z[k] < y[k] - eps) else { break };
        let (excess, shortfall) = (z[j] - y[j], y[k] - z[k]);
        let delta = excess.min(shortfall);
        let t = delta / (z[j] - z[k]);
        let (row_j, row_k) = two_rows(rows, j, k);
        for (a, b) in row_j.iter_mut().zip(row_k.iter_mut()) {
            let (va, vb) = (*a, *b);
            *a = (1.0 - t) * va + t * vb;
            *b = t * va + (1.0 - t) * vb;
        }
        if excess <= shortfall {
            z[k] += excess;
            z[j] = y[j];
        } else {
            z[j] -= shortfall;
            z[k] = y[k];
        }
    }
}

fn two_rows(rows: &mut [Vec<f64>], j: usize, k: usize) -> (&mut Vec<f64>, &mut Vec<f64>) {
    debug_assert!(j < k);
    let (head, tail) = rows.split_at_mut(k);
    (&mut head[j], &mut tail[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stepfn::{DiscreteMeasureSpace, Power};

    fn uv(v: &[f64]) -> WeightedVector {
        WeightedVector::unit(v).unwrap()
    }

    fn assert_map_close(t: &StochasticMap, want: &[&[f64]]) {
        for (row, want_row) in t.matrix().iter().zip(want) {
            for (a, b) in row.iter().zip(want_row.iter()) {
                assert!((a - b).abs() < 1e-12, "{:?} vs {:?}", t.matrix(), want);
            }
        }
    }

    #[test]
    fn submajorization_examples() {
        assert!(check_submajorization(&uv(&[0.5, 0.5]), &uv(&[0.4, 0.4]), 1e-9));
        assert!(check_submajorization(&uv(&[0.3, 0.7]), &uv(&[0.3, 0.7]), 1e-9));
        assert!(!check_submajorization(&uv(&[0.6, 0.4]), &uv(&[0.7, 0.3]), 1e-9));
    }

    #[test]
    fn majorization_examples() {
        assert!(check_majorization(&uv(&[1.0, 0.0]), &uv(&[0.5, 0.5]), 1e-9));
        assert!(!check_majorization(&uv(&[0.5, 0.5]), &uv(&[0.4, 0.4]), 1e-9));
        let a = uv(&[0.5, 0.3, 0.2]);
        let b = uv(&[0.4, 0.3, 0.3]);
        assert!(check_majorization(&a, &b, 1e-9));
        assert!(!check_majorization(&b, &a, 1e-9));
    }

    #[test]
    fn hockey_stick_agrees_on_examples() {
        let pairs: [(&[f64], &[f64]); 3] =
            [(&[0.5, 0.5], &[0.4, 0.4]), (&[0.6, 0.4], &[0.7, 0.3]), (&[0.5, 0.3, 0.2], &[0.4, 0.3, 0.3])];
        for (f, g) in pairs {
            assert_eq!(
                check_submajorization(&uv(f), &uv(g), 1e-9),
                check_submajorization_hockey(&uv(f), &uv(g), 1e-9)
            );
        }
    }

    #[test]
    fn ds_point_mass_to_uniform() {
        let t = synthesize_ds(&uv(&[1.0, 0.0]), &uv(&[0.5, 0.5])).unwrap();
        assert_map_close(&t, &[&[0.5, 0.5], &[0.5, 0.5]]);
    }

    #[test]
    fn ds_identity_on_equal_inputs() {
        let t = synthesize_ds(&uv(&[0.2, 0.5, 0.3]), &uv(&[0.2, 0.5, 0.3])).unwrap();
        assert_map_close(&t, &[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
    }

    #[test]
    fn ds_three_atoms() {
        let f = uv(&[0.6, 0.3, 0.1]);
        let g = uv(&[0.5, 0.3, 0.2]);
        let t = synthesize_ds(&f, &g).unwrap();
        assert!(t.is_ds(1e-12));
        assert!(t.action_error(f.values(), g.values()) < 1e-10);
    }

    #[test]
    fn ds_rejects_non_majorized() {
        assert_eq!(synthesize_ds(&uv(&[0.5, 0.5]), &uv(&[1.0, 0.0])), Err(Error::NotMajorized));
    }

    #[test]
    fn ds_with_non_uniform_masses() {
        let f = WeightedVector::weighted(&[0.6, 0.1], &[1.0, 2.0]).unwrap();
        let g = WeightedVector::weighted(&[0.5, 0.2, 0.1], &[1.0, 1.0, 1.0]).unwrap();
        assert!(check_majorization(&f, &g, 1e-9));
        let t = synthesize_ds(&f, &g).unwrap();
        assert!(t.is_ds(1e-12), "violation {}", t.ds_violation());
        assert!(t.action_error(f.values(), g.values()) < 1e-10);
    }

    #[test]
    fn ds_unequal_finite_masses_not_extendable() {
        let f = WeightedVector::weighted(&[0.5, 0.5], &[1.0, 1.0]).unwrap();
        let g = WeightedVector::weighted(&[0.5, 0.5, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(synthesize_ds(&f, &g), Err(Error::NotExtendable(_))));
        // an infinite tail on the lighter side supplies the missing atom
        let f_tail = WeightedVector::new(DiscreteMeasureSpace::counting(2).with_infinite_tail(), vec![0.5, 0.5]).unwrap();
        let t = synthesize_ds(&f_tail, &g).unwrap();
        assert_eq!(t.source_masses().len(), 3);
        assert!(t.is_ds(1e-12));
    }

    #[test]
    fn dss_scale_then_mix() {
        let f = uv(&[1.0, 0.0]);
        let g = uv(&[0.4, 0.4]);
        let t = synthesize_dss(&f, &g).unwrap();
        assert!(t.is_dss(1e-12));
        assert!(t.action_error(f.values(), g.values()) < 1e-10);
        // T*(χ_supp g) ≤ χ_supp f: the zero source atom is untouched
        assert_eq!(t.entry(0, 1), 0.0);
        assert_eq!(t.entry(1, 1), 0.0);
    }

    #[test]
    fn dss_zero_target() {
        let t = synthesize_dss(&uv(&[0.3, 0.2]), &uv(&[0.0, 0.0])).unwrap();
        assert!(t.matrix().iter().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn dss_partial_mass() {
        let f = uv(&[0.5, 0.5]);
        let g = uv(&[0.5, 0.3]);
        let t = synthesize_dss(&f, &g).unwrap();
        assert!(t.is_dss(1e-12));
        assert!(t.action_error(f.values(), g.values()) < 1e-10);
        assert!(t.row_sums().iter().all(|s| *s <= 1.0 + 1e-12));
    }

    #[test]
    fn dss_rejects_non_submajorized() {
        assert_eq!(synthesize_dss(&uv(&[0.6, 0.4]), &uv(&[0.7, 0.3])), Err(Error::NotSubmajorized));
    }

    #[test]
    fn dss_support_conditions() {
        let f = uv(&[0.0, 0.7, 0.2, 0.0]);
        let g = uv(&[0.3, 0.0, 0.3, 0.1]);
        let t = synthesize_dss(&f, &g).unwrap();
        let chi_f: Vec<f64> = f.values().iter().map(|v| if *v > 0.0 { 1.0 } else { 0.0 }).collect();
        let chi_g: Vec<f64> = g.values().iter().map(|v| if *v > 0.0 { 1.0 } else { 0.0 }).collect();
        for (a, b) in t.apply(&chi_f).iter().zip(&chi_g) {
            assert!(*a <= b + 1e-12);
        }
        for (a, b) in t.apply_dual(&chi_g).iter().zip(&chi_f) {
            assert!(*a <= b + 1e-12);
        }
    }

    #[test]
    fn dss_contracts_convex_functionals() {
        let f = uv(&[0.7, 0.2, 0.1, 0.0]);
        let g = uv(&[0.3, 0.25, 0.2, 0.05]);
        let t = synthesize_dss(&f, &g).unwrap();
        let tf = WeightedVector::unit(&t.apply(f.values())).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let lhs = tf.rearrange().convex_integral(&Power(p)).unwrap();
            let rhs = f.rearrange().convex_integral(&Power(p)).unwrap();
            assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn extension_of_ds_map_exists() {
        let f = uv(&[0.6, 0.3, 0.1]);
        let g = uv(&[0.5, 0.3, 0.2]);
        let t = synthesize_ds(&f, &g).unwrap();
        let ext = ds_extension_exists(&t, &support_of(&f), &f, &g).unwrap();
        assert!(ext.exists);
        assert!(ext.extension.unwrap().is_ds(1e-12));
    }

    #[test]
    fn shift_obstruction() {
        // f = (0, g1, g2) on three atoms, g = (g1, g2) with no cosupport
        let (g1, g2) = (0.6, 0.4);
        let f = uv(&[0.0, g1, g2]);
        let g = uv(&[g1, g2]);
        let shift = StochasticMap::new(vec![1.0; 3], vec![1.0; 2], vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let ext = ds_extension_exists(&shift, &support_of(&f), &f, &g).unwrap();
        assert!(!ext.exists);
        assert_eq!(ext.cosupport_mass, 1.0);
        assert_eq!(ext.unused_capacity, 0.0);
        assert!(ext.extension.is_none());
        // balanced cosupports: the shift embedded in equal finite spaces extends
        let g3 = uv(&[g1, g2, 0.0]);
        let shift3 = StochasticMap::new(
            vec![1.0; 3],
            vec![1.0; 3],
            vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]],
        )
        .unwrap();
        let ext3 = ds_extension_exists(&shift3, &support_of(&f), &f, &g3).unwrap();
        assert!(ext3.exists);
        let full = ext3.extension.unwrap();
        assert!(full.is_ds(1e-12));
        assert!(full.action_error(f.values(), g3.values()) < 1e-12);
    }

    #[test]
    fn extension_precondition_errors() {
        let f = uv(&[0.5, 0.5]);
        let g = uv(&[0.5, 0.5]);
        let not_dss = StochasticMap::new(vec![1.0; 2], vec![1.0; 2], vec![vec![1.0, 0.5], vec![0.0, 0.5]]).unwrap();
        assert!(matches!(ds_extension_exists(&not_dss, &[0, 1], &f, &g), Err(Error::Precondition(_))));
        let lossy = StochasticMap::new(vec![1.0; 2], vec![1.0; 2], vec![vec![0.5, 0.0], vec![0.0, 1.0]]).unwrap();
        let g_lossy = uv(&[0.25, 0.5]);
        assert!(matches!(ds_extension_exists(&lossy, &[0, 1], &f, &g_lossy), Err(Error::Precondition(_))));
    }

    #[test]
    fn infinite_tails_in_extension() {
        let f = WeightedVector::new(DiscreteMeasureSpace::counting(2).with_infinite_tail(), vec![0.5, 0.5]).unwrap();
        let g = WeightedVector::new(DiscreteMeasureSpace::counting(2).with_infinite_tail(), vec![0.5, 0.5]).unwrap();
        let id = StochasticMap::identity(&[1.0, 1.0]).unwrap();
        assert!(ds_extension_exists(&id, &[0, 1], &f, &g).unwrap().exists);
        let g_fin = uv(&[0.5, 0.5]);
        assert!(!ds_extension_exists(&id, &[0, 1], &f, &g_fin).unwrap().exists);
    }

    #[test]
    fn common_unit_cases() {
        assert_eq!(common_unit(&[1.0, 1.0]).unwrap(), 1.0);
        assert!((common_unit(&[0.5, 1.5, 2.0]).unwrap() - 0.5).abs() < 1e-12);
        assert!(matches!(common_unit(&[1.0, core::f64::consts::PI]), Err(Error::GridTooFine { .. })));
    }
}
