//! Majorization for densities on factor models: finite Hermitian matrices
//! paired with a trace weight, or bare spectral scales for models without a
//! finite matrix realization.

use alloc::format;
use alloc::vec::Vec;

// shadowed by inherent methods whenever std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::classical::synthesize_dss;
use crate::linalg::{eigh, hermitian_asymmetry, real, CMatrix, Eigen};
use crate::stepfn::{LorenzCurve, StepFunction, WeightedVector, XLogX};
use crate::{Error, Result, RANK_CUTOFF};

/// Largest entrywise `|m − m†|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const CLUSTER_GAP: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    TypeI(usize),
    TypeIInf,
    TypeII1,
    TypeIIInf,
}

/// Factor kind plus the normalization of its trace.
///
/// `trace_unit` is the trace of a minimal (type I) or reference (type II)
/// projection and becomes the width carried by each eigenvalue of a matrix
/// density. Type II∞ has no canonical normalization; the default of 1 is a
/// convention and can be changed with [`FactorModel::with_trace_unit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorModel {
    kind: FactorKind,
    trace_unit: f64,
    /// `None` stands for an infinite trace of the identity.
    trace_of_identity: Option<f64>,
}

impl FactorModel {
    pub fn type_i(n: usize) -> Self {
        Self { kind: FactorKind::TypeI(n), trace_unit: 1.0, trace_of_identity: Some(n as f64) }
    }

    pub fn type_i_inf() -> Self {
        Self { kind: FactorKind::TypeIInf, trace_unit: 1.0, trace_of_identity: None }
    }

    /// Type II₁ with `τ(1) = 1`.
    pub fn type_ii1() -> Self {
        Self { kind: FactorKind::TypeII1, trace_unit: 1.0, trace_of_identity: Some(1.0) }
    }

    pub fn type_ii_inf() -> Self {
        Self { kind: FactorKind::TypeIIInf, trace_unit: 1.0, trace_of_identity: None }
    }

    /// Sets the trace unit. For type I_n the trace of the identity follows
    /// as `n · trace_unit`; type II₁ keeps `τ(1) = 1`.
    pub fn with_trace_unit(mut self, trace_unit: f64) -> Result<Self> {
        if !(trace_unit > 0.0 && trace_unit.is_finite()) {
            return Err(Error::domain(format!("trace_unit must be positive and finite, got {trace_unit}")));
        }
        self.trace_unit = trace_unit;
        if let FactorKind::TypeI(n) = self.kind {
            self.trace_of_identity = Some(n as f64 * trace_unit);
        }
        Ok(self)
    }

    pub fn kind(&self) -> FactorKind {
        self.kind
    }

    pub fn trace_unit(&self) -> f64 {
        self.trace_unit
    }

    /// `τ(1)`, infinite for I∞ and II∞.
    pub fn trace_of_identity(&self) -> f64 {
        self.trace_of_identity.unwrap_or(f64::INFINITY)
    }

    pub fn is_finite(&self) -> bool {
        self.trace_of_identity.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Matrix { matrix: CMatrix, scale: StepFunction },
    Scale(StepFunction),
}

/// Positive trace-class element of a factor model.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    repr: Repr,
    factor: FactorModel,
}

impl Density {
    /// Hermitian PSD matrix; every eigenvalue carries the factor's trace
    /// unit as its width.
    pub fn from_matrix(matrix: CMatrix, factor: FactorModel) -> Result<Self> {
        let scale = matrix_scale(&matrix, factor.trace_unit(), RANK_CUTOFF)?;
        if let FactorKind::TypeI(n) = factor.kind() {
            if matrix.nrows() != n {
                return Err(Error::dim(format!("matrix of dimension {} on a type I_{n} factor", matrix.nrows())));
            }
        }
        let width = matrix.nrows() as f64 * factor.trace_unit();
        if width > factor.trace_of_identity() * (1.0 + 1e-12) {
            return Err(Error::dim(format!(
                "matrix spans trace {width} but the factor has trace of identity {}",
                factor.trace_of_identity()
            )));
        }
        Ok(Self { repr: Repr::Matrix { matrix, scale }, factor })
    }

    /// Density given only through its spectral scale.
    pub fn from_scale(scale: StepFunction, factor: FactorModel) -> Result<Self> {
        if scale.support() > factor.trace_of_identity() * (1.0 + 1e-12) {
            return Err(Error::domain(format!(
                "scale support {} exceeds the trace of identity {}",
                scale.support(),
                factor.trace_of_identity()
            )));
        }
        Ok(Self { repr: Repr::Scale(scale), factor })
    }

    pub fn factor(&self) -> &FactorModel {
        &self.factor
    }

    pub fn matrix(&self) -> Option<&CMatrix> {
        match &self.repr {
            Repr::Matrix { matrix, .. } => Some(matrix),
            Repr::Scale(_) => None,
        }
    }

    pub fn dim(&self) -> Option<usize> {
        self.matrix().map(|m| m.nrows())
    }

    /// `λ_ρ`: eigenvalues in decreasing order, each of width `trace_unit`,
    /// with eigenvalues below `RANK_CUTOFF · λ_max` dropped.
    pub fn spectral_scale(&self) -> &StepFunction {
        match &self.repr {
            Repr::Matrix { scale, .. } => scale,
            Repr::Scale(s) => s,
        }
    }

    /// Spectral scale with a custom relative rank cutoff.
    pub fn spectral_scale_with_cutoff(&self, cutoff: f64) -> Result<StepFunction> {
        match &self.repr {
            Repr::Matrix { matrix, .. } => matrix_scale(matrix, self.factor.trace_unit(), cutoff),
            Repr::Scale(s) => Ok(s.clone()),
        }
    }

    /// Trace with respect to the factor's trace.
    pub fn trace(&self) -> f64 {
        self.spectral_scale().total()
    }

    /// Trace of the support projection.
    pub fn support_trace(&self) -> f64 {
        self.spectral_scale().support()
    }

    pub fn lorenz(&self) -> LorenzCurve {
        self.spectral_scale().lorenz()
    }
}

fn matrix_scale(matrix: &CMatrix, trace_unit: f64, cutoff: f64) -> Result<StepFunction> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::dim(format!("density matrix is {}x{}", matrix.nrows(), matrix.ncols())));
    }
    if matrix.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::domain("density matrix has non-finite entries"));
    }
    let asym = hermitian_asymmetry(matrix);
    if asym > HERMITIAN_TOL {
        return Err(Error::domain(format!("matrix is not Hermitian (asymmetry {asym:e})")));
    }
    let values = eigh(matrix).values;
    let top = values.first().copied().unwrap_or(0.0).max(0.0);
    if let Some(&low) = values.last() {
        if low < -HERMITIAN_TOL * top.max(1.0) {
            return Err(Error::domain(format!("matrix is not positive semidefinite (eigenvalue {low:e})")));
        }
    }
    let threshold = cutoff * top;
    StepFunction::new(values.into_iter().filter(|v| *v > threshold).map(|v| (v, trace_unit)))
}

/// `ρ ≻_w σ`, decided on spectral scales; the densities may live on
/// different factor models.
pub fn q_submajorizes(rho: &Density, sigma: &Density, tol: f64) -> bool {
    rho.lorenz().dominates(&sigma.lorenz(), tol)
}

/// `ρ ≻ σ`: submajorization with equal traces.
pub fn q_majorizes(rho: &Density, sigma: &Density, tol: f64) -> bool {
    let (a, b) = (rho.trace(), sigma.trace());
    (a - b).abs() <= tol * a.max(b).max(f64::MIN_POSITIVE) && q_submajorizes(rho, sigma, tol)
}

/// `inf_u ‖ρ − uσu*‖₁ = ‖λ_ρ − λ_σ‖_{L¹}`.
pub fn orbit_l1_distance(rho: &Density, sigma: &Density) -> f64 {
    rho.spectral_scale().l1_distance(sigma.spectral_scale())
}

/// `sup_u F(ρ, uσu*) = ∫ √(λ_ρ λ_σ)`.
pub fn orbit_fidelity(rho: &Density, sigma: &Density) -> f64 {
    rho.spectral_scale().sqrt_overlap(sigma.spectral_scale())
}

/// `S_α = log(τ(ρ^α)) / (1 − α)`, with `S₁ = τ(−ρ log ρ)` and
/// `S₀ = log τ(s_ρ)`.
pub fn renyi_entropy(rho: &Density, alpha: f64) -> Result<f64> {
    renyi_of_scale(rho.spectral_scale(), alpha)
}

pub fn renyi_of_scale(scale: &StepFunction, alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) || alpha.is_infinite() {
        return Err(Error::domain(format!("Rényi order must be finite and nonnegative, got {alpha}")));
    }
    if scale.is_zero() {
        return Err(Error::domain("entropy of the zero density"));
    }
    if alpha == 0.0 {
        return Ok(scale.support().ln());
    }
    if alpha == 1.0 {
        return Ok(-scale.convex_integral(&XLogX)?);
    }
    let moment = scale.integrate_values(|v| v.powf(alpha));
    Ok(moment.ln() / (1.0 - alpha))
}

/// Completely positive map `X ↦ Σ_k K_k X K_k†`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub kraus: Vec<CMatrix>,
    pub dim_in: usize,
    pub dim_out: usize,
}

impl KrausChannel {
    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * x * k.adjoint();
        }
        out
    }

    /// `T(1) = Σ K K†`.
    pub fn unit_image(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * k.adjoint();
        }
        out
    }

    /// `T*(1) = Σ K† K`; `T` is trace non-increasing iff this is `≤ 1`.
    pub fn dual_unit_image(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += k.adjoint() * k;
        }
        out
    }

    /// `λ_max(T(1)) − 1`; nonpositive for subunital maps.
    pub fn subunitality_excess(&self) -> f64 {
        largest_eigenvalue(&self.unit_image()) - 1.0
    }

    /// `λ_max(T*(1)) − 1`; nonpositive for trace non-increasing maps.
    pub fn trace_excess(&self) -> f64 {
        largest_eigenvalue(&self.dual_unit_image()) - 1.0
    }
}

fn largest_eigenvalue(m: &CMatrix) -> f64 {
    eigh(m).values.first().copied().unwrap_or(0.0)
}

/// Eigenvalue clusters of a Hermitian matrix: mean value and the indices of
/// the eigenvector columns (in decreasing eigenvalue order).
pub(crate) fn clusters(e: &Eigen, gap: f64) -> Vec<(f64, Vec<usize>)> {
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (k, &v) in e.values.iter().enumerate() {
        match out.last_mut() {
            Some((_, members)) if e.values[*members.last().expect("nonempty")] - v < gap => members.push(k),
            _ => out.push((v, alloc::vec![k])),
        }
    }
    for (value, members) in &mut out {
        *value = members.iter().map(|&k| e.values[k]).sum::<f64>() / members.len() as f64;
        *value = value.max(0.0);
    }
    out
}

/// DSS channel with `T(ρ) = σ` for matrix densities with `ρ ≻_w σ`.
///
/// Both densities are split into degenerate eigenvalue blocks; a classical
/// DSS matrix `T_BC` between block values (masses = block trace) is
/// synthesized and realized block by block: when the blocks have equal
/// dimension by `√T_BC W` with `W` an isometry between the block bases,
/// otherwise by the measure-and-prepare operators `√(T_BC / m_C) |f_r⟩⟨e_s|`.
/// With equal trace units the channel is subunital and trace non-increasing.
pub fn synthesize_dss_channel(rho: &Density, sigma: &Density) -> Result<KrausChannel> {
    let (Some(a), Some(b)) = (rho.matrix(), sigma.matrix()) else {
        return Err(Error::domain("channel synthesis needs matrix densities"));
    };
    if !q_submajorizes(rho, sigma, crate::DEFAULT_TOL) {
        return Err(Error::NotSubmajorized);
    }
    let (ea, eb) = (eigh(a), eigh(b));
    let (ca, cb) = (clusters(&ea, CLUSTER_GAP), clusters(&eb, CLUSTER_GAP));
    let (ua, ub) = (rho.factor().trace_unit(), sigma.factor().trace_unit());
    let f_vals: Vec<f64> = ca.iter().map(|c| c.0).collect();
    let f_mass: Vec<f64> = ca.iter().map(|c| c.1.len() as f64 * ua).collect();
    let g_vals: Vec<f64> = cb.iter().map(|c| c.0).collect();
    let g_mass: Vec<f64> = cb.iter().map(|c| c.1.len() as f64 * ub).collect();
    let f = WeightedVector::weighted(&f_vals, &f_mass)?;
    let g = WeightedVector::weighted(&g_vals, &g_mass)?;
    let t = synthesize_dss(&f, &g)?;

    let (da, db) = (a.nrows(), b.nrows());
    let mut kraus = Vec::new();
    for (bi, (_, tgt)) in cb.iter().enumerate() {
        for (ci, (_, src)) in ca.iter().enumerate() {
            let weight = t.entry(bi, ci);
            if weight <= 0.0 {
                continue;
            }
            if tgt.len() == src.len() {
                let mut k = CMatrix::zeros(db, da);
                for (&r, &s) in tgt.iter().zip(src) {
                    k += eb.vectors.column(r) * ea.vectors.column(s).adjoint();
                }
                kraus.push(k * real(weight.sqrt()));
            } else {
                let amp = real((weight / src.len() as f64).sqrt());
                for &r in tgt {
                    for &s in src {
                        kraus.push(eb.vectors.column(r) * ea.vectors.column(s).adjoint() * amp);
                    }
                }
            }
        }
    }
    Ok(KrausChannel { kraus, dim_in: da, dim_out: db })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag, trace_norm};
    use crate::random::{density, haar_unitary, rng_from_seed};

    fn mat(values: &[f64]) -> Density {
        Density::from_matrix(diag(values), FactorModel::type_i(values.len())).unwrap()
    }

    #[test]
    fn spectral_scale_sorts_eigenvalues() {
        let s = mat(&[0.2, 0.5, 0.3]).spectral_scale().to_pairs();
        let want = [(0.5, 1.0), (0.3, 1.0), (0.2, 1.0)];
        for (a, b) in s.iter().zip(want) {
            assert!((a.0 - b.0).abs() < 1e-14 && a.1 == b.1);
        }
    }

    #[test]
    fn rejects_non_hermitian_and_negative() {
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = real(1e-6);
        assert!(matches!(Density::from_matrix(m, FactorModel::type_i(2)), Err(Error::Domain(_))));
        assert!(matches!(Density::from_matrix(diag(&[1.2, -0.2]), FactorModel::type_i(2)), Err(Error::Domain(_))));
        assert!(matches!(Density::from_matrix(diag(&[1.0]), FactorModel::type_i(2)), Err(Error::Dimension(_))));
    }

    #[test]
    fn scale_is_unitarily_invariant() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let rho = density(3, &mut rng);
            let u = haar_unitary(3, &mut rng);
            let a = Density::from_matrix(rho.clone(), FactorModel::type_i(3)).unwrap();
            let b = Density::from_matrix(&u * rho * u.adjoint(), FactorModel::type_i(3)).unwrap();
            assert!(a.spectral_scale().l1_distance(b.spectral_scale()) < 1e-12);
        }
    }

    #[test]
    fn cross_model_comparison() {
        // with trace unit 1/2 the two eigenvalues occupy [0, 1) at height 0.5
        let half_unit = FactorModel::type_i(2).with_trace_unit(0.5).unwrap();
        let rho = Density::from_matrix(diag(&[0.5, 0.5]), half_unit).unwrap();
        let flat = Density::from_scale(StepFunction::flat(0.5, 1.0).unwrap(), FactorModel::type_ii1()).unwrap();
        assert!(q_majorizes(&rho, &flat, 1e-9));
        assert!(q_majorizes(&flat, &rho, 1e-9));
        // with the default unit the matrix spreads over [0, 2) and carries twice the trace
        let spread = mat(&[0.5, 0.5]);
        assert!(q_submajorizes(&spread, &flat, 1e-9) && !q_submajorizes(&flat, &spread, 1e-9));
        assert!(Density::from_scale(StepFunction::flat(0.5, 2.0).unwrap(), FactorModel::type_ii1()).is_err());
    }

    #[test]
    fn tracial_state_is_minimal() {
        let tau = Density::from_scale(StepFunction::flat(1.0, 1.0).unwrap(), FactorModel::type_ii1()).unwrap();
        let psi = Density::from_scale(StepFunction::new([(1.5, 0.5), (0.5, 0.5)]).unwrap(), FactorModel::type_ii1()).unwrap();
        assert!(q_majorizes(&psi, &tau, 1e-9));
        assert!(!q_majorizes(&tau, &psi, 1e-9));
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            assert!(renyi_entropy(&tau, alpha).unwrap().abs() < 1e-15);
            assert!(renyi_entropy(&psi, alpha).unwrap() <= 1e-15);
        }
    }

    #[test]
    fn renyi_values() {
        let mixed = mat(&[0.5, 0.5]);
        for alpha in [0.0, 0.5, 1.0, 2.0, 7.0] {
            assert!((renyi_entropy(&mixed, alpha).unwrap() - 2f64.ln()).abs() < 1e-14);
        }
        let rho = mat(&[0.7, 0.2, 0.1]);
        let s1 = renyi_entropy(&rho, 1.0).unwrap();
        for alpha in [1.0 - 1e-4, 1.0 + 1e-4] {
            assert!((renyi_entropy(&rho, alpha).unwrap() - s1).abs() < 1e-3);
        }
        assert!(renyi_entropy(&rho, -0.5).is_err());
    }

    #[test]
    fn orbit_quantities() {
        let (a, b) = (mat(&[0.7, 0.3]), mat(&[0.5, 0.5]));
        assert!((orbit_l1_distance(&a, &b) - 0.4).abs() < 1e-14);
        let (p, q) = (mat(&[0.7, 0.3]), mat(&[0.4, 0.6]));
        assert!((orbit_fidelity(&p, &q) - (0.42f64.sqrt() + 0.12f64.sqrt())).abs() < 1e-14);
        assert!((orbit_fidelity(&p, &p) - 1.0).abs() < 1e-14);
    }

    fn check_channel(rho: &Density, sigma: &Density) -> KrausChannel {
        let ch = synthesize_dss_channel(rho, sigma).unwrap();
        assert!(ch.subunitality_excess() <= 1e-10);
        assert!(ch.trace_excess() <= 1e-10);
        let out = ch.apply(rho.matrix().unwrap());
        assert!(trace_norm(&(out - sigma.matrix().unwrap())) < 1e-9);
        ch
    }

    #[test]
    fn channel_equal_diagonal_is_pinching() {
        let rho = mat(&[0.6, 0.3, 0.1]);
        let ch = check_channel(&rho, &rho);
        assert_eq!(ch.kraus.len(), 3);
        for k in &ch.kraus {
            assert!(trace_norm(&(k * k - k)) < 1e-12);
        }
    }

    #[test]
    fn channel_pure_to_mixed() {
        check_channel(&mat(&[1.0, 0.0]), &mat(&[0.5, 0.5]));
    }

    #[test]
    fn channel_submajorized_and_rotated() {
        let mut rng = rng_from_seed(11);
        for _ in 0..10 {
            let rho = density(3, &mut rng);
            let u = haar_unitary(3, &mut rng);
            let r = Density::from_matrix(rho.clone(), FactorModel::type_i(3)).unwrap();
            let s = Density::from_matrix(&u * &rho * u.adjoint(), FactorModel::type_i(3)).unwrap();
            check_channel(&r, &s);
            let half = Density::from_matrix(&u * &rho * u.adjoint() * real(0.5), FactorModel::type_i(3)).unwrap();
            check_channel(&r, &half);
        }
    }

    #[test]
    fn channel_rejects_non_submajorized() {
        assert_eq!(synthesize_dss_channel(&mat(&[0.5, 0.5]), &mat(&[0.9, 0.1])), Err(Error::NotSubmajorized));
    }
}
