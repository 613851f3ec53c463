//! Finite truncations of Powers product states and the experiments built on
//! them: distillation scales, conversion-fidelity trends and CHSH values.

use alloc::format;
use alloc::vec::Vec;

// shadowed by inherent methods whenever std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::{coefficient_matrix, kron, partial_trace_a, partial_trace_b, real, sign, CMatrix, CVector};
use crate::locc::{conversion_fidelity_of_scales, BipartitePureState};
use crate::random::{complex_gaussian, rng_from_seed, SeededRng};
use crate::stepfn::StepFunction;
use crate::{Error, Result};

/// Largest number of copies for which Powers scales are built.
pub const MAX_COPIES: usize = 30;

/// `n` copies of `Ψ_λ = (|11⟩ + √λ |22⟩) / √(1 + λ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowersModel {
    lambda: f64,
    copies: usize,
}

impl PowersModel {
    pub fn new(lambda: f64, copies: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::domain(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        if copies == 0 {
            return Err(Error::domain("number of copies must be positive"));
        }
        if copies > MAX_COPIES {
            return Err(Error::domain(format!("{copies} copies exceed the cap of {MAX_COPIES}")));
        }
        Ok(Self { lambda, copies })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn copies(&self) -> usize {
        self.copies
    }
}

/// Marginal spectral scale of `Ψ_λ^{⊗n}`: value `λ^k / (1+λ)^n` with
/// multiplicity `C(n, k)`, without building the `2ⁿ`-dimensional state.
pub fn powers_marginal_scale(m: &PowersModel) -> StepFunction {
    let (lambda, n) = (m.lambda, m.copies);
    if lambda == 0.0 {
        return StepFunction::flat(1.0, 1.0).expect("valid piece");
    }
    let norm = (1.0 + lambda).powi(n as i32);
    let mut binom = 1.0;
    let mut pairs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        pairs.push((lambda.powi(k as i32) / norm, binom));
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    StepFunction::new(pairs).expect("positive finite pieces")
}

/// One copy of `Ψ_λ` on `C² ⊗ C²`.
pub fn powers_pair(lambda: f64) -> Result<BipartitePureState> {
    PowersModel::new(lambda, 1)?;
    let c = [1.0 / (1.0 + lambda).sqrt(), (lambda / (1.0 + lambda)).sqrt()];
    BipartitePureState::from_schmidt_coefficients(&c, 2, 2)
}

/// Vector of `Ψ_λ^{⊗n}` on `C^{2ⁿ} ⊗ C^{2ⁿ}`, with each party's copies
/// grouped together (index of A is the binary word of its qubits).
pub fn powers_vector(m: &PowersModel) -> Result<CVector> {
    let n = m.copies;
    if n > 6 {
        return Err(Error::domain(format!("explicit vectors are limited to 6 copies, got {n}")));
    }
    let d = 1usize << n;
    let (a, b) = (1.0 / (1.0 + m.lambda).sqrt(), (m.lambda / (1.0 + m.lambda)).sqrt());
    let mut psi = CVector::zeros(d * d);
    for word in 0..d {
        let ones = word.count_ones() as i32;
        let amp = a.powi(n as i32 - ones) * b.powi(ones);
        psi[word * d + word] = real(amp);
    }
    Ok(psi)
}

/// Compressed scale `λ'(t) = n λ_ρ(n t)` on `[0, τ(s_ρ)/n)`.
///
/// `ρ' ⊗ (uniform state on n levels)` has the same spectral scale as `ρ`,
/// so it majorizes `ρ ⊗ (pure state)`; the returned scale is checked
/// against that inequality before it is handed out.
pub fn distill_target_scale(rho: &StepFunction, n: usize) -> Result<StepFunction> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    if (rho.total() - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!("scale has trace {}, expected 1", rho.total())));
    }
    if rho.support() > 1.0 + 1e-12 {
        return Err(Error::domain(format!("scale support {} exceeds a unit trace of identity", rho.support())));
    }
    let target = rho.rescale(n as f64, 1.0 / n as f64)?;
    if !distillation_holds(rho, &target, n, crate::DEFAULT_TOL) {
        return Err(Error::Numerical("compressed scale fails its majorization check".into()));
    }
    Ok(target)
}

/// `ρ' ⊗ u_n ≻ ρ ⊗ point`, with `u_n` the uniform scale `1/n` on `[0, n)`.
pub fn distillation_holds(rho: &StepFunction, target: &StepFunction, n: usize, tol: f64) -> bool {
    let uniform = StepFunction::flat(1.0 / n as f64, n as f64).expect("valid piece");
    let point = StepFunction::flat(1.0, 1.0).expect("valid piece");
    let lhs = target.tensor(&uniform);
    let rhs = rho.tensor(&point);
    (lhs.total() - rhs.total()).abs() <= tol * lhs.total().max(rhs.total())
        && lhs.lorenz().dominates(&rhs.lorenz(), tol)
}

/// Conversion fidelity of `Ω_λ^{⊗n} ⊗ Ψ → Ω_λ^{⊗n} ⊗ Φ` for each `n`,
/// where `psi` and `phi` are Schmidt spectra.
pub fn trivialization_trend(
    lambda: f64,
    psi: &StepFunction,
    phi: &StepFunction,
    n_list: &[usize],
) -> Result<Vec<(usize, f64)>> {
    n_list
        .iter()
        .map(|&n| {
            let catalyst = powers_marginal_scale(&PowersModel::new(lambda, n)?);
            let f = conversion_fidelity_of_scales(&catalyst.tensor(psi), &catalyst.tensor(phi));
            Ok((n, f))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub iters: usize,
    /// Stop a restart once β improves by less than this.
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { restarts: 16, iters: 200, tol: 1e-10, seed: 0 }
    }
}

/// Effective operators for the seesaw: given Bob's observable `b`, the
/// operator `X` with `⟨a ⊗ b⟩ = Tr(a X)`, and symmetrically for Alice's.
trait Correlations {
    fn dims(&self) -> (usize, usize);
    fn for_alice(&self, b: &CMatrix) -> CMatrix;
    fn for_bob(&self, a: &CMatrix) -> CMatrix;
}

struct MixedCorrelations<'a> {
    rho: &'a CMatrix,
    da: usize,
    db: usize,
}

impl Correlations for MixedCorrelations<'_> {
    fn dims(&self) -> (usize, usize) {
        (self.da, self.db)
    }

    fn for_alice(&self, b: &CMatrix) -> CMatrix {
        partial_trace_b(&(kron(&CMatrix::identity(self.da, self.da), b) * self.rho), self.da, self.db)
    }

    fn for_bob(&self, a: &CMatrix) -> CMatrix {
        partial_trace_a(&(kron(a, &CMatrix::identity(self.db, self.db)) * self.rho), self.da, self.db)
    }
}

/// Pure state with coefficient matrix `C`: `⟨a ⊗ b⟩ = Tr(a C bᵀ C†)`.
struct PureCorrelations {
    c: CMatrix,
}

impl Correlations for PureCorrelations {
    fn dims(&self) -> (usize, usize) {
        self.c.shape()
    }

    fn for_alice(&self, b: &CMatrix) -> CMatrix {
        &self.c * b.transpose() * self.c.adjoint()
    }

    fn for_bob(&self, a: &CMatrix) -> CMatrix {
        (self.c.adjoint() * a * &self.c).transpose()
    }
}

/// Lower bound on the CHSH value `sup Tr ρ(a₁(b₁+b₂) + a₂(b₁−b₂))` of a
/// density on `C^{d_a} ⊗ C^{d_b}`, by alternating optimization over ±1
/// observables from random starts.
pub fn chsh_seesaw(rho: &CMatrix, da: usize, db: usize, config: &SeesawConfig) -> Result<f64> {
    if rho.shape() != (da * db, da * db) {
        return Err(Error::dim(format!("density is {}x{} for dimensions {da}x{db}", rho.nrows(), rho.ncols())));
    }
    seesaw(&MixedCorrelations { rho, da, db }, config)
}

/// [`chsh_seesaw`] for a pure state, using its coefficient matrix.
pub fn chsh_seesaw_pure(psi: &CVector, da: usize, db: usize, config: &SeesawConfig) -> Result<f64> {
    if psi.len() != da * db {
        return Err(Error::dim(format!("vector of length {} for dimensions {da}x{db}", psi.len())));
    }
    seesaw(&PureCorrelations { c: coefficient_matrix(psi, da, db) }, config)
}

fn seesaw(corr: &dyn Correlations, config: &SeesawConfig) -> Result<f64> {
    if config.restarts == 0 {
        return Err(Error::domain("seesaw needs at least one restart"));
    }
    let (_, db) = corr.dims();
    let mut rng = rng_from_seed(config.seed);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..config.restarts {
        let mut b1 = random_observable(db, &mut rng);
        let mut b2 = random_observable(db, &mut rng);
        let mut value = f64::NEG_INFINITY;
        for _ in 0..config.iters {
            let a1 = sign(&corr.for_alice(&(&b1 + &b2)));
            let a2 = sign(&corr.for_alice(&(&b1 - &b2)));
            let y1 = corr.for_bob(&(&a1 + &a2));
            let y2 = corr.for_bob(&(&a1 - &a2));
            b1 = sign(&y1);
            b2 = sign(&y2);
            let next = (&b1 * &y1).trace().re + (&b2 * &y2).trace().re;
            let done = next - value < config.tol;
            value = value.max(next);
            if done {
                break;
            }
        }
        best = best.max(value);
    }
    Ok(best)
}

fn random_observable(d: usize, rng: &mut SeededRng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    sign(&(&g + g.adjoint()))
}

/// Closed form `2√(1 + sin²2θ)` of the maximal CHSH value of one pair
/// `Ψ_λ`, where `sin 2θ = 2√λ / (1 + λ)`.
pub fn powers_pair_chsh(lambda: f64) -> f64 {
    2.0 * (1.0 + 4.0 * lambda / ((1.0 + lambda) * (1.0 + lambda))).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, marginal_a};
    use crate::quantum::renyi_of_scale;

    fn assert_pairs(s: &StepFunction, want: &[(f64, f64)]) {
        let got = s.to_pairs();
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (a, b) in got.iter().zip(want) {
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-12, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn powers_scales() {
        assert_pairs(&powers_marginal_scale(&PowersModel::new(1.0, 3).unwrap()), &[(0.125, 8.0)]);
        assert_pairs(&powers_marginal_scale(&PowersModel::new(0.5, 1).unwrap()), &[(2.0 / 3.0, 1.0), (1.0 / 3.0, 1.0)]);
        assert_pairs(
            &powers_marginal_scale(&PowersModel::new(0.5, 2).unwrap()),
            &[(4.0 / 9.0, 1.0), (2.0 / 9.0, 2.0), (1.0 / 9.0, 1.0)],
        );
        assert_pairs(&powers_marginal_scale(&PowersModel::new(0.0, 5).unwrap()), &[(1.0, 1.0)]);
        assert!(PowersModel::new(0.5, 31).is_err());
        assert!(PowersModel::new(1.5, 1).is_err());
    }

    #[test]
    fn powers_totals_and_additivity() {
        for lambda in [0.1, 0.3, 0.5, 0.9, 1.0] {
            let one = powers_marginal_scale(&PowersModel::new(lambda, 1).unwrap());
            for n in [1, 5, 17, 30] {
                let s = powers_marginal_scale(&PowersModel::new(lambda, n).unwrap());
                assert!((s.total() - 1.0).abs() < 1e-12);
                for alpha in [0.5, 1.0, 2.0] {
                    let sn = renyi_of_scale(&s, alpha).unwrap();
                    let s1 = renyi_of_scale(&one, alpha).unwrap();
                    assert!((sn - n as f64 * s1).abs() < 1e-9 * n as f64, "λ={lambda} n={n} α={alpha}");
                }
            }
        }
    }

    #[test]
    fn explicit_vector_matches_scale() {
        let m = PowersModel::new(0.4, 3).unwrap();
        let psi = powers_vector(&m).unwrap();
        let eig: Vec<f64> = eigh(&marginal_a(&psi, 8, 8)).values.into_iter().filter(|v| *v > 1e-15).collect();
        let from_eig = StepFunction::new(eig.into_iter().map(|v| (v, 1.0))).unwrap();
        assert!(from_eig.l1_distance(&powers_marginal_scale(&m)) < 1e-12);
    }

    #[test]
    fn distillation_examples() {
        let flat = StepFunction::flat(1.0, 1.0).unwrap();
        assert_pairs(&distill_target_scale(&flat, 2).unwrap(), &[(2.0, 0.5)]);
        let two_step = StepFunction::new([(1.5, 0.5), (0.5, 0.5)]).unwrap();
        assert_pairs(&distill_target_scale(&two_step, 2).unwrap(), &[(3.0, 0.25), (1.0, 0.25)]);
        assert_eq!(distill_target_scale(&two_step, 1).unwrap(), two_step);
        assert!(distill_target_scale(&StepFunction::flat(0.5, 1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn trend_special_cases() {
        let bell = StepFunction::flat(0.5, 2.0).unwrap();
        let point = StepFunction::flat(1.0, 1.0).unwrap();
        for (_, f) in trivialization_trend(0.5, &bell, &bell, &[1, 4, 9]).unwrap() {
            assert!((f - 1.0).abs() < 1e-12);
        }
        for lambda in [0.3, 0.5, 1.0] {
            let t = trivialization_trend(lambda, &point, &bell, &[1, 2, 3, 5, 10, 20, 30]).unwrap();
            for w in t.windows(2) {
                assert!(w[1].1 >= w[0].1 - 1e-12, "{t:?}");
            }
        }
        let zero = trivialization_trend(0.0, &point, &bell, &[1, 5, 10]).unwrap();
        for (_, f) in zero {
            assert!((f - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn chsh_reference_values() {
        let cfg = SeesawConfig::default();
        let bell = powers_pair(1.0).unwrap().vector().unwrap();
        assert!((chsh_seesaw_pure(&bell, 2, 2, &cfg).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        let rho = &bell * bell.adjoint();
        assert!((chsh_seesaw(&rho, 2, 2, &cfg).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-6);
        let product = powers_pair(0.0).unwrap().vector().unwrap();
        assert!((chsh_seesaw_pure(&product, 2, 2, &cfg).unwrap() - 2.0).abs() < 1e-6);
        let half = powers_pair(0.5).unwrap().vector().unwrap();
        assert!((chsh_seesaw_pure(&half, 2, 2, &cfg).unwrap() - powers_pair_chsh(0.5)).abs() < 1e-6);
    }

    #[test]
    fn seesaw_is_deterministic() {
        let cfg = SeesawConfig { seed: 42, ..SeesawConfig::default() };
        let psi = powers_pair(0.3).unwrap().vector().unwrap();
        assert_eq!(chsh_seesaw_pure(&psi, 2, 2, &cfg).unwrap(), chsh_seesaw_pure(&psi, 2, 2, &cfg).unwrap());
    }
}
