//! Bipartite pure states, LOCC protocols and the majorization-based
//! conversion criteria between them.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

// shadowed by inherent methods whenever std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::birkhoff;
use crate::classical::synthesize_ds;
use crate::linalg::{
    apply_a, apply_b, coefficient_matrix, complete_basis, identity_defect, overlap, real, svd, CMatrix,
    CVector,
};
use crate::quantum::{renyi_of_scale, Density, FactorKind, FactorModel};
use crate::stepfn::{joint_walk, LorenzCurve, StepFunction, WeightedVector};
use crate::{Error, Result, DEFAULT_TOL, RANK_CUTOFF};

/// Accepted deviation of `‖Ψ‖` from 1.
pub const NORM_TOL: f64 = 1e-9;

/// Accepted deviation of `Σ K†K` from the identity.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Branches below this probability are dropped during simulation.
pub const PRUNE_PROB: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
enum StateRepr {
    /// `Ψ = Σ_k c_k |a_k⟩ ⊗ |b_k⟩` with `a_k`, `b_k` the columns of the frames.
    Finite { coeffs: Vec<f64>, frame_a: CMatrix, frame_b: CMatrix },
    /// Only the Schmidt spectrum (the marginal spectral scale) is known.
    Scale(StepFunction),
}

/// Unit vector of a bipartite system in Schmidt form.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartitePureState {
    repr: StateRepr,
    factor_a: FactorModel,
    factor_b: FactorModel,
}

impl BipartitePureState {
    /// Schmidt decomposition of a vector on `C^{d_a} ⊗ C^{d_b}` (row-major,
    /// index `a·d_b + b`).
    pub fn from_vector(psi: &CVector, da: usize, db: usize) -> Result<Self> {
        if da == 0 || db == 0 || psi.len() != da * db {
            return Err(Error::dim(format!("vector of length {} for dimensions {da}x{db}", psi.len())));
        }
        if psi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::domain("vector has non-finite entries"));
        }
        let norm = psi.norm();
        if norm == 0.0 {
            return Err(Error::domain("zero vector"));
        }
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("vector has norm {norm}, expected 1")));
        }
        let c = coefficient_matrix(psi, da, db) / real(norm);
        let svd = svd(&c);
        let m = da.min(db);
        let coeffs = svd.values[..m].to_vec();
        // zero singular values leave their columns to the basis completion
        let kept = coeffs.iter().take_while(|&&s| s > 0.0).count();
        let a_cols = svd.u.columns(0, kept).into_owned();
        let b_cols = svd.v.columns(0, kept).map(|z| z.conj());
        Self::from_frames(coeffs, complete_basis(&a_cols, da), complete_basis(&b_cols, db))
    }

    /// `Σ_k c_k |i_k⟩ ⊗ |j_k⟩` from `(c, i, j)` triples in the standard
    /// bases. The triples need distinct `i` and distinct `j`.
    pub fn from_schmidt_triples(triples: &[(f64, usize, usize)], da: usize, db: usize) -> Result<Self> {
        let mut psi = CVector::zeros(da * db);
        for (n, &(c, i, j)) in triples.iter().enumerate() {
            if i >= da || j >= db {
                return Err(Error::dim(format!("schmidt[{n}] index ({i}, {j}) outside {da}x{db}")));
            }
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::domain(format!("schmidt[{n}] coefficient must be finite and nonnegative")));
            }
            if triples[..n].iter().any(|&(_, i2, j2)| i2 == i || j2 == j) {
                return Err(Error::domain(format!("schmidt[{n}] repeats a basis index")));
            }
            psi[i * db + j] = real(c);
        }
        Self::from_vector(&psi, da, db)
    }

    /// `Σ_k c_k |k⟩ ⊗ |k⟩` on `C^{d_a} ⊗ C^{d_b}`.
    pub fn from_schmidt_coefficients(coeffs: &[f64], da: usize, db: usize) -> Result<Self> {
        if coeffs.len() > da.min(db) {
            return Err(Error::dim(format!("{} coefficients for dimensions {da}x{db}", coeffs.len())));
        }
        let triples: Vec<(f64, usize, usize)> = coeffs.iter().enumerate().map(|(k, &c)| (c, k, k)).collect();
        Self::from_schmidt_triples(&triples, da, db)
    }

    fn from_frames(mut coeffs: Vec<f64>, frame_a: CMatrix, frame_b: CMatrix) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        for c in &mut coeffs {
            *c /= norm;
        }
        let (da, db) = (frame_a.nrows(), frame_b.nrows());
        Ok(Self {
            repr: StateRepr::Finite { coeffs, frame_a, frame_b },
            factor_a: FactorModel::type_i(da),
            factor_b: FactorModel::type_i(db),
        })
    }

    /// State known only through its Schmidt spectrum `λ` (the spectral scale
    /// of either marginal) on the given factors.
    pub fn from_scale(scale: StepFunction, factor_a: FactorModel, factor_b: FactorModel) -> Result<Self> {
        if (scale.total() - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("Schmidt spectrum has total {}, expected 1", scale.total())));
        }
        let state = Self { repr: StateRepr::Scale(scale), factor_a, factor_b };
        state.check_factors()?;
        Ok(state)
    }

    /// Replaces the factor models. Trace units must agree on both sides
    /// (the marginals then share one spectral scale).
    pub fn with_factors(mut self, factor_a: FactorModel, factor_b: FactorModel) -> Result<Self> {
        self.factor_a = factor_a;
        self.factor_b = factor_b;
        self.check_factors()?;
        Ok(self)
    }

    fn check_factors(&self) -> Result<()> {
        let (ua, ub) = (self.factor_a.trace_unit(), self.factor_b.trace_unit());
        if (ua - ub).abs() > 1e-12 * ua.max(ub) {
            return Err(Error::domain(format!("trace units differ between the parties ({ua} vs {ub})")));
        }
        if let Some((da, db)) = self.dims() {
            for (factor, d, side) in [(&self.factor_a, da, "A"), (&self.factor_b, db, "B")] {
                if let FactorKind::TypeI(n) = factor.kind() {
                    if n != d {
                        return Err(Error::dim(format!("party {side} has dimension {d} but factor type I_{n}")));
                    }
                }
            }
        }
        let support = self.schmidt_scale().support();
        for f in [&self.factor_a, &self.factor_b] {
            if support > f.trace_of_identity() * (1.0 + 1e-12) {
                return Err(Error::domain("Schmidt support exceeds the trace of the identity"));
            }
        }
        Ok(())
    }

    pub fn factor_a(&self) -> &FactorModel {
        &self.factor_a
    }

    pub fn factor_b(&self) -> &FactorModel {
        &self.factor_b
    }

    /// Local dimensions of a finite state.
    pub fn dims(&self) -> Option<(usize, usize)> {
        match &self.repr {
            StateRepr::Finite { frame_a, frame_b, .. } => Some((frame_a.nrows(), frame_b.nrows())),
            StateRepr::Scale(_) => None,
        }
    }

    /// Schmidt coefficients (descending, `min(d_a, d_b)` entries including
    /// zeros) of a finite state.
    pub fn coefficients(&self) -> Option<&[f64]> {
        match &self.repr {
            StateRepr::Finite { coeffs, .. } => Some(coeffs),
            StateRepr::Scale(_) => None,
        }
    }

    /// Unitaries whose leading columns are the Schmidt vectors.
    pub fn frames(&self) -> Option<(&CMatrix, &CMatrix)> {
        match &self.repr {
            StateRepr::Finite { frame_a, frame_b, .. } => Some((frame_a, frame_b)),
            StateRepr::Scale(_) => None,
        }
    }

    pub fn vector(&self) -> Option<CVector> {
        let StateRepr::Finite { coeffs, frame_a, frame_b } = &self.repr else { return None };
        let (da, db) = (frame_a.nrows(), frame_b.nrows());
        let mut psi = CVector::zeros(da * db);
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                psi += frame_a.column(k).kronecker(&frame_b.column(k)) * real(c);
            }
        }
        Some(psi)
    }

    /// Spectral scale shared by both marginals: squared Schmidt coefficients
    /// above `RANK_CUTOFF` relative to the largest, each of width
    /// `trace_unit`.
    pub fn schmidt_scale(&self) -> StepFunction {
        match &self.repr {
            StateRepr::Finite { coeffs, .. } => {
                let unit = self.factor_a.trace_unit();
                let top = coeffs.first().map_or(0.0, |c| c * c);
                StepFunction::new(coeffs.iter().map(|c| c * c).filter(|p| *p > RANK_CUTOFF * top).map(|p| (p, unit)))
                    .expect("squared coefficients are finite and nonnegative")
            }
            StateRepr::Scale(s) => s.clone(),
        }
    }

    /// Trace-weighted Schmidt rank `τ(s_ψ)`.
    pub fn schmidt_rank(&self) -> f64 {
        self.schmidt_scale().support()
    }

    /// Marginal on A as a density of `factor_a`.
    pub fn marginal_a(&self) -> Result<Density> {
        match (self.vector(), self.dims()) {
            (Some(psi), Some((da, db))) => Density::from_matrix(crate::linalg::marginal_a(&psi, da, db), self.factor_a),
            _ => Density::from_scale(self.schmidt_scale(), self.factor_a),
        }
    }

    /// Marginal on B as a density of `factor_b`.
    pub fn marginal_b(&self) -> Result<Density> {
        match (self.vector(), self.dims()) {
            (Some(psi), Some((da, db))) => Density::from_matrix(crate::linalg::marginal_b(&psi, da, db), self.factor_b),
            _ => Density::from_scale(self.schmidt_scale(), self.factor_b),
        }
    }

    /// `(u ⊗ v) Ψ`.
    pub fn local_unitary(&self, u: &CMatrix, v: &CMatrix) -> Result<Self> {
        let StateRepr::Finite { coeffs, frame_a, frame_b } = &self.repr else {
            return Err(Error::domain("local unitaries need a finite state"));
        };
        if u.shape() != frame_a.shape() || v.shape() != frame_b.shape() {
            return Err(Error::dim("local unitary dimensions do not match the state"));
        }
        Ok(Self {
            repr: StateRepr::Finite { coeffs: coeffs.clone(), frame_a: u * frame_a, frame_b: v * frame_b },
            factor_a: self.factor_a,
            factor_b: self.factor_b,
        })
    }
}

/// `Ψ → Φ` by LOCC iff `ψ ≺ φ` (Lorenz dominance of the target's Schmidt
/// spectrum over the source's, with equal totals).
pub fn locc_convertible(psi: &BipartitePureState, phi: &BipartitePureState, tol: f64) -> bool {
    let (a, b) = (psi.schmidt_scale(), phi.schmidt_scale());
    (a.total() - b.total()).abs() <= tol * a.total().max(b.total()) && b.lorenz().dominates(&a.lorenz(), tol)
}

/// `Ψ → Φ` by SLOCC iff `r(Ψ) ≥ r(Φ)`.
pub fn slocc_convertible(psi: &BipartitePureState, phi: &BipartitePureState) -> bool {
    let (r, s) = (psi.schmidt_rank(), phi.schmidt_rank());
    r >= s * (1.0 - 1e-12)
}

/// `F² = sup |⟨Φ, Ω⟩|²` over `Ω` reachable from `Ψ` by SLOCC, which equals
/// `L_φ(r(Ψ))`.
pub fn slocc_fidelity(psi: &BipartitePureState, phi: &BipartitePureState) -> f64 {
    phi.schmidt_scale().lorenz_at(psi.schmidt_rank()).min(1.0)
}

/// `sup |⟨Φ, Ω⟩|` over `Ω` with `ψ ≺ ω`, i.e. `sup ∫ √(φ ω)`.
///
/// On the common refinement of both spectra the optimal `ω` is a multiple
/// of `φ` on consecutive blocks. In tail coordinates (mass of `φ` and `ψ`
/// beyond each breakpoint) the blocks are the segments of the lower convex
/// hull of the points, and each contributes `√(ΔΦ ΔΨ)`.
pub fn locc_conversion_fidelity(psi: &BipartitePureState, phi: &BipartitePureState) -> f64 {
    conversion_fidelity_of_scales(&psi.schmidt_scale(), &phi.schmidt_scale())
}

pub fn conversion_fidelity_of_scales(psi: &StepFunction, phi: &StepFunction) -> f64 {
    // masses of φ and ψ on the atoms of the union partition, head first
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    joint_walk(phi, psi, |p, q, len| atoms.push((p * len, q * len)));
    let mut points = Vec::with_capacity(atoms.len() + 1);
    let (mut x, mut y) = (0.0, 0.0);
    points.push((x, y));
    for &(dp, dq) in atoms.iter().rev() {
        x += dp;
        y += dq;
        points.push((x, y));
    }
    let hull = lower_hull(&points);
    hull.windows(2).map(|w| ((w[1].0 - w[0].0).max(0.0) * (w[1].1 - w[0].1).max(0.0)).sqrt()).sum::<f64>().min(1.0)
}

/// Lower convex hull of points sorted by nondecreasing `x`.
fn lower_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in sorted {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        if hull.last().is_some_and(|l| l.0 == p.0) {
            // equal x: keep the lower point, which came first
            continue;
        }
        hull.push(p);
    }
    hull
}

/// Entanglement monotones of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct Monotones {
    /// `(α, S_α)` in the requested order.
    pub renyi: Vec<(f64, f64)>,
    pub schmidt_rank: f64,
    pub lorenz: LorenzCurve,
    /// `‖λ_ψ − λ_ψ'‖₁` between the spectral scales of the two marginals.
    pub marginal_mismatch: f64,
}

pub fn monotones(psi: &BipartitePureState, alphas: &[f64]) -> Result<Monotones> {
    let scale = psi.marginal_a()?.spectral_scale().clone();
    let other = psi.marginal_b()?.spectral_scale().clone();
    let renyi = alphas.iter().map(|&a| renyi_of_scale(&scale, a).map(|s| (a, s))).collect::<Result<Vec<_>>>()?;
    Ok(Monotones {
        renyi,
        schmidt_rank: scale.support(),
        lorenz: scale.lorenz(),
        marginal_mismatch: scale.l1_distance(&other),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub kraus: Vec<CMatrix>,
}

/// Instrument used when the transcript so far equals `condition`. An empty
/// condition is the fallback for transcripts without an exact match.
#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    pub condition: Vec<String>,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub party: Party,
    pub instruments: Vec<Instrument>,
}

/// Sequence of local instruments with classical communication: each round
/// is performed by one party and may depend on all earlier outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct LoccProtocol {
    pub dims: (usize, usize),
    pub rounds: Vec<Round>,
}

impl LoccProtocol {
    /// Checks operator shapes and `Σ K†K = 1` for every instrument; returns
    /// the largest completeness residual.
    pub fn validate(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (r, round) in self.rounds.iter().enumerate() {
            let d = match round.party {
                Party::A => self.dims.0,
                Party::B => self.dims.1,
            };
            for (i, inst) in round.instruments.iter().enumerate() {
                if inst.outcomes.is_empty() {
                    return Err(Error::MalformedProtocol(format!("round {r} instrument {i} has no outcomes")));
                }
                let mut sum = CMatrix::zeros(d, d);
                for out in &inst.outcomes {
                    for k in &out.kraus {
                        if k.shape() != (d, d) {
                            return Err(Error::MalformedProtocol(format!(
                                "round {r} instrument {i} outcome {:?}: Kraus operator is {}x{}, expected {d}x{d}",
                                out.label,
                                k.nrows(),
                                k.ncols()
                            )));
                        }
                        sum += k.adjoint() * k;
                    }
                }
                let residual = identity_defect(&sum);
                if residual > COMPLETENESS_TOL {
                    return Err(Error::MalformedProtocol(format!(
                        "round {r} instrument {i}: Σ K†K deviates from 1 by {residual:e}"
                    )));
                }
                worst = worst.max(residual);
            }
        }
        Ok(worst)
    }

    fn instrument(&self, round: usize, transcript: &[String]) -> Result<&Instrument> {
        let insts = &self.rounds[round].instruments;
        insts
            .iter()
            .find(|i| i.condition == transcript)
            .or_else(|| insts.iter().find(|i| i.condition.is_empty()))
            .ok_or_else(|| {
                Error::MalformedProtocol(format!("round {round} has no instrument for transcript {transcript:?}"))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub transcript: Vec<String>,
    pub probability: f64,
    /// Normalized output vector.
    pub state: CVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub branches: Vec<Branch>,
    /// Total probability of branches dropped below [`PRUNE_PROB`].
    pub pruned_mass: f64,
}

impl Simulation {
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum::<f64>() + self.pruned_mass
    }
}

/// Enumerates all branches of `protocol` applied to `psi`. Every Kraus
/// operator of an outcome produces its own branch, labeled by the outcome.
pub fn simulate_protocol(psi: &BipartitePureState, protocol: &LoccProtocol) -> Result<Simulation> {
    let (Some(start), Some(dims)) = (psi.vector(), psi.dims()) else {
        return Err(Error::domain("simulation needs a finite state"));
    };
    if dims != protocol.dims {
        return Err(Error::dim(format!("state is {}x{} but protocol is {}x{}", dims.0, dims.1, protocol.dims.0, protocol.dims.1)));
    }
    protocol.validate()?;
    let (da, db) = dims;
    let mut branches = vec![Branch { transcript: Vec::new(), probability: 1.0, state: start }];
    let mut pruned_mass = 0.0;
    for (r, round) in protocol.rounds.iter().enumerate() {
        let mut next = Vec::new();
        for branch in branches {
            let inst = protocol.instrument(r, &branch.transcript)?;
            for out in &inst.outcomes {
                for k in &out.kraus {
                    let v = match round.party {
                        Party::A => apply_a(&branch.state, k, da, db),
                        Party::B => apply_b(&branch.state, k, da, db),
                    };
                    let weight = v.norm_squared();
                    let probability = branch.probability * weight;
                    if probability < PRUNE_PROB {
                        pruned_mass += probability;
                        continue;
                    }
                    let mut transcript = branch.transcript.clone();
                    transcript.push(out.label.clone());
                    next.push(Branch { transcript, probability, state: v / real(weight.sqrt()) });
                }
            }
        }
        branches = next;
    }
    Ok(Simulation { branches, pruned_mass })
}

/// Two-round protocol taking `Ψ` to `Φ` when `ψ ≺ φ`.
///
/// A doubly stochastic `D` with `ψ² = D φ²` is synthesized on the squared
/// Schmidt coefficients and split into permutations, `D = Σ_x p_x P_x`.
/// Alice measures with `k_x = √p_x Σ_i √(φ²_{π_x(i)} / ψ̃²_i) |g_{π_x(i)}⟩⟨e_i|`
/// (`ψ̃² = D φ²` as recomputed from the terms), plus the projection onto the
/// complement of her support; Bob then applies the unitary sending his
/// Schmidt vectors `f_i` to `h_{π_x(i)}`.
pub fn synthesize_nielsen_protocol(psi: &BipartitePureState, phi: &BipartitePureState) -> Result<LoccProtocol> {
    let (Some(dims), Some(dims_phi)) = (psi.dims(), phi.dims()) else {
        return Err(Error::domain("protocol synthesis needs finite states"));
    };
    if dims != dims_phi {
        return Err(Error::dim(format!(
            "source is {}x{} but target is {}x{}",
            dims.0, dims.1, dims_phi.0, dims_phi.1
        )));
    }
    if !locc_convertible(psi, phi, DEFAULT_TOL) {
        return Err(Error::NotConvertible);
    }
    let (da, db) = dims;
    let (psi_vec, phi_vec) = (psi.vector().expect("finite"), phi.vector().expect("finite"));
    if overlap(&psi_vec, &phi_vec) >= 1.0 - 1e-14 {
        let identity = Outcome { label: "id".to_string(), kraus: vec![CMatrix::identity(da, da)] };
        return Ok(LoccProtocol {
            dims,
            rounds: vec![Round { party: Party::A, instruments: vec![Instrument { condition: vec![], outcomes: vec![identity] }] }],
        });
    }

    let a: Vec<f64> = psi.coefficients().expect("finite").iter().map(|c| c * c).collect();
    let b: Vec<f64> = phi.coefficients().expect("finite").iter().map(|c| c * c).collect();
    let m = a.len();
    let d = synthesize_ds(&WeightedVector::unit(&b)?, &WeightedVector::unit(&a)?)?;
    let terms = birkhoff::decompose(d.matrix())?;
    let (e, f) = psi.frames().expect("finite");
    let (g, h) = phi.frames().expect("finite");

    let mut a_tilde = vec![0.0; m];
    for t in &terms {
        for i in 0..m {
            a_tilde[i] += t.weight * b[t.perm[i]];
        }
    }
    let top = a[0];
    let support: Vec<bool> = (0..m).map(|i| a[i] > RANK_CUTOFF * top && a_tilde[i] > 0.0).collect();

    let mut outcomes = Vec::new();
    let mut corrections = Vec::new();
    let mut support_proj = CMatrix::zeros(da, da);
    for i in (0..m).filter(|&i| support[i]) {
        support_proj += e.column(i) * e.column(i).adjoint();
    }
    for (x, t) in terms.iter().enumerate() {
        let mut k = CMatrix::zeros(da, da);
        for i in (0..m).filter(|&i| support[i]) {
            let j = t.perm[i];
            if b[j] > 0.0 {
                k += g.column(j) * e.column(i).adjoint() * real((b[j] / a_tilde[i]).sqrt());
            }
        }
        let label = format!("x{x}");
        outcomes.push(Outcome { label: label.clone(), kraus: vec![k * real(t.weight.sqrt())] });
        let mut v = CMatrix::zeros(db, db);
        for i in 0..db {
            let target = if i < m { t.perm[i] } else { i };
            v += h.column(target) * f.column(i).adjoint();
        }
        corrections.push(Instrument {
            condition: vec![label],
            outcomes: vec![Outcome { label: "correct".to_string(), kraus: vec![v] }],
        });
    }
    let complement = CMatrix::identity(da, da) - support_proj;
    if complement.norm() > 1e-12 {
        outcomes.push(Outcome { label: "perp".to_string(), kraus: vec![complement] });
        corrections.push(Instrument {
            condition: vec!["perp".to_string()],
            outcomes: vec![Outcome { label: "correct".to_string(), kraus: vec![CMatrix::identity(db, db)] }],
        });
    }

    let protocol = LoccProtocol {
        dims,
        rounds: vec![
            Round { party: Party::A, instruments: vec![Instrument { condition: vec![], outcomes }] },
            Round { party: Party::B, instruments: corrections },
        ],
    };
    protocol.validate()?;
    Ok(protocol)
}

/// Worst branch fidelity `|⟨Φ, out⟩|` of a simulation.
pub fn worst_branch_fidelity(sim: &Simulation, phi: &CVector) -> f64 {
    sim.branches.iter().map(|b| overlap(&b.state, phi)).fold(1.0, f64::min)
}
