//! Dense complex linear algebra helpers on top of `nalgebra`.
//!
//! Bipartite vectors use the row-major convention: the amplitude of
//! `|a⟩ ⊗ |b⟩` sits at index `a * d_b + b`, so the coefficient matrix of a
//! vector is `d_a × d_b` with `C[a, b] = ψ[a d_b + b]`.

use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
// shadowed by inherent methods whenever std is linked somewhere in the build
#[allow(unused_imports)]
use num_traits::Float;

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub fn real(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// `max |m − m†|` entrywise.
pub fn hermitian_asymmetry(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted in
/// decreasing order (stable in the solver's output order).
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMatrix,
}

/// Hermitian eigendecomposition of `(m + m†)/2`.
pub fn eigh(m: &CMatrix) -> Eigen {
    let n = m.nrows();
    if n == 0 {
        return Eigen { values: Vec::new(), vectors: CMatrix::zeros(0, 0) };
    }
    let sym = (m + m.adjoint()) * real(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Eigen { values, vectors }
}

/// `Σ_k f(λ_k) |v_k⟩⟨v_k|`.
pub fn hermitian_function(m: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let e = eigh(m);
    rebuild(&e.vectors, e.values.iter().map(|&v| f(v)))
}

fn rebuild(vectors: &CMatrix, values: impl Iterator<Item = f64>) -> CMatrix {
    let mut scaled = vectors.clone();
    for (k, v) in values.enumerate() {
        scaled.column_mut(k).scale_mut(v);
    }
    scaled * vectors.adjoint()
}

/// `m^{1/2}` of a PSD matrix; negative eigenvalues are clipped to zero.
pub fn psd_sqrt(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |x| x.max(0.0).sqrt())
}

/// Hermitian unitary `sign(m)` with `sign(0) = +1`.
pub fn sign(m: &CMatrix) -> CMatrix {
    hermitian_function(m, |x| if x < 0.0 { -1.0 } else { 1.0 })
}

/// Thin singular value decomposition `m = u diag(values) v†`, values
/// descending. Columns of `u` and `v` belonging to zero singular values are
/// zero.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub values: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD. `nalgebra`'s bidiagonal complex SVD loses accuracy
/// (errors around 1e-4) on rank-deficient inputs, which are the normal case
/// for Schmidt decompositions; Jacobi keeps high relative accuracy.
pub fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd { u: t.v, values: t.values, v: t.u };
    }
    let mut a = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    for _ in 0..100 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let g = a.column(p).dotc(&a.column(q));
                let gn = g.norm();
                if gn <= 1e-15 * (alpha * beta).sqrt() || gn == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = g / gn;
                let zeta = (beta - alpha) / (2.0 * gn);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let (xp, xq) = (mat[(i, p)], mat[(i, q)]);
                        mat[(i, p)] = xp * c - xq * phase.conj() * s;
                        mat[(i, q)] = xp * phase * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|k| a.column(k).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]).then(x.cmp(&y)));
    let values: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let u = CMatrix::from_fn(rows, cols, |i, k| {
        let n = norms[order[k]];
        if n > 0.0 { a[(i, order[k])] / n } else { real(0.0) }
    });
    let v = CMatrix::from_fn(cols, cols, |i, k| v[(i, order[k])]);
    Svd { u, values, v }
}

/// Sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    svd(m).values.iter().sum()
}

/// Trace norm of a Hermitian matrix via its eigenvalues.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigh(m).values.iter().map(|v| v.abs()).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn coefficient_matrix(psi: &CVector, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, db, |a, b| psi[a * db + b])
}

pub fn vector_from_coefficients(c: &CMatrix) -> CVector {
    let (da, db) = c.shape();
    CVector::from_fn(da * db, |k, _| c[(k / db, k % db)])
}

/// `(op ⊗ 1) ψ`.
pub fn apply_a(psi: &CVector, op: &CMatrix, da: usize, db: usize) -> CVector {
    vector_from_coefficients(&(op * coefficient_matrix(psi, da, db)))
}

/// `(1 ⊗ op) ψ`.
pub fn apply_b(psi: &CVector, op: &CMatrix, da: usize, db: usize) -> CVector {
    vector_from_coefficients(&(coefficient_matrix(psi, da, db) * op.transpose()))
}

/// Marginal on A of `|ψ⟩⟨ψ|`: `C C†`.
pub fn marginal_a(psi: &CVector, da: usize, db: usize) -> CMatrix {
    let c = coefficient_matrix(psi, da, db);
    &c * c.adjoint()
}

/// Marginal on B of `|ψ⟩⟨ψ|`: `(C† C)ᵀ`.
pub fn marginal_b(psi: &CVector, da: usize, db: usize) -> CMatrix {
    let c = coefficient_matrix(psi, da, db);
    (c.adjoint() * &c).transpose()
}

/// `Tr_B ρ` for `ρ` on `C^{d_a} ⊗ C^{d_b}`.
pub fn partial_trace_b(rho: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| rho[(a * db + b, a2 * db + b)]).sum())
}

/// `Tr_A ρ`.
pub fn partial_trace_a(rho: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| rho[(a * db + b, a * db + b2)]).sum())
}

/// Extends orthonormal columns to a full `d × d` unitary by Gram–Schmidt on
/// the standard basis vectors with the largest residuals.
pub fn complete_basis(cols: &CMatrix, d: usize) -> CMatrix {
    let mut basis: Vec<CVector> = (0..cols.ncols()).map(|k| cols.column(k).into_owned()).collect();
    while basis.len() < d {
        let mut best: Option<(f64, CVector)> = None;
        for e in 0..d {
            let mut v = CVector::zeros(d);
            v[e] = real(1.0);
            for _ in 0..2 {
                for q in &basis {
                    let overlap = q.dotc(&v);
                    v -= q * overlap;
                }
            }
            let norm = v.norm();
            if best.as_ref().map_or(true, |(n, _)| norm > *n + 1e-12) {
                best = Some((norm, v));
            }
        }
        let (norm, v) = best.expect("d > 0");
        basis.push(v / real(norm));
    }
    CMatrix::from_columns(&basis)
}

/// `‖u†u − 1‖_max`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let g = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - real(target)).norm());
        }
    }
    worst
}

/// Largest entry modulus of `m − 1`.
pub fn identity_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((m[(i, j)] - real(target)).norm());
        }
    }
    worst
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_fn(values.len(), values.len(), |i, j| if i == j { real(values[i]) } else { real(0.0) })
}

/// Largest `|⟨a, b⟩|` — the overlap fidelity of two unit vectors.
pub fn overlap(a: &CVector, b: &CVector) -> f64 {
    a.dotc(b).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_unitary, probability_vector, rng_from_seed};

    #[test]
    fn svd_is_accurate_on_rank_deficient_inputs() {
        let mut rng = rng_from_seed(5);
        for i in 0..2000 {
            let (r, c) = (2 + i % 4, 2 + (i / 4) % 4);
            let rank = 1 + i % r.min(c);
            let mut p = probability_vector(rank, &mut rng);
            p.resize(r.min(c), 0.0);
            let (u, v) = (haar_unitary(r, &mut rng), haar_unitary(c, &mut rng));
            let m = CMatrix::from_fn(r, c, |a, b| (0..r.min(c)).map(|k| u[(a, k)] * v[(b, k)] * real(p[k].sqrt())).sum());
            let s = svd(&m);
            let mut expect: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
            expect.sort_by(|a, b| b.total_cmp(a));
            for (x, y) in s.values.iter().zip(&expect) {
                assert!((x - y).abs() < 1e-13, "{:?} vs {expect:?}", s.values);
            }
            let back = &s.u * diag(&s.values) * s.v.adjoint();
            assert!((back - &m).iter().all(|z| z.norm() < 1e-13));
        }
    }

    #[test]
    fn eigh_sorts_descending() {
        let m = diag(&[0.2, 0.5, 0.3]);
        let e = eigh(&m);
        assert_eq!(e.values.len(), 3);
        assert!((e.values[0] - 0.5).abs() < 1e-15);
        assert!((e.values[2] - 0.2).abs() < 1e-15);
        let back = rebuild(&e.vectors, e.values.iter().copied());
        assert!((back - m).norm() < 1e-14);
    }

    #[test]
    fn local_application_matches_kron() {
        let da = 2;
        let db = 3;
        let psi = CVector::from_fn(6, |k, _| Complex::new(k as f64, 1.0 - k as f64));
        let a = CMatrix::from_fn(2, 2, |i, j| Complex::new((i + 2 * j) as f64, 0.5));
        let b = CMatrix::from_fn(3, 3, |i, j| Complex::new(i as f64 - j as f64, (i * j) as f64));
        let via_kron = kron(&a, &b) * &psi;
        let via_local = apply_b(&apply_a(&psi, &a, da, db), &b, da, db);
        assert!((via_kron - via_local).norm() < 1e-12);
    }

    #[test]
    fn marginals_match_partial_traces() {
        let psi = CVector::from_fn(6, |k, _| Complex::new(1.0 + k as f64, (k * k) as f64 * 0.1));
        let rho = &psi * psi.adjoint();
        assert!((marginal_a(&psi, 2, 3) - partial_trace_b(&rho, 2, 3)).norm() < 1e-12);
        assert!((marginal_b(&psi, 2, 3) - partial_trace_a(&rho, 2, 3)).norm() < 1e-12);
    }

    #[test]
    fn completion_is_unitary() {
        let mut v = CVector::zeros(3);
        v[0] = real(0.6);
        v[2] = Complex::new(0.0, 0.8);
        let u = complete_basis(&CMatrix::from_columns(&[v.clone()]), 3);
        assert!(unitarity_defect(&u) < 1e-14);
        assert!((u.column(0) - v).norm() < 1e-15);
    }

    #[test]
    fn sign_and_sqrt() {
        let m = diag(&[0.25, -2.0, 0.0]);
        let s = sign(&m);
        assert!((s - diag(&[1.0, -1.0, 1.0])).norm() < 1e-14);
        let r = psd_sqrt(&diag(&[0.25, 4.0]));
        assert!((r - diag(&[0.5, 2.0])).norm() < 1e-14);
        assert!((trace_norm(&m) - 2.25).abs() < 1e-14);
        assert!((trace_norm_hermitian(&m) - 2.25).abs() < 1e-14);
    }
}
