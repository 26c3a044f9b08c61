//! Deterministic sparse symmetric generalized eigensolver.
//!
//! Smallest eigenvalues of a pencil `(A, B)` with `B` positive definite are
//! computed by shift-invert Lanczos in the `B` inner product:
//!
//! * the shift is placed strictly below the spectrum, verified by the pivot
//!   signs (Sylvester inertia) of the profile factorization of `A - sigma B`;
//! * the Krylov iteration starts from the all-ones vector (B-normalized)
//!   with a tiny fixed dither that breaks exact symmetry orthogonality, and
//!   is fully reorthogonalized, so runs are bitwise reproducible;
//! * for multiple requested pairs the count below the reported top is
//!   verified by one extra inertia query, guarding against missed modes.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::assembly::AssembledForm;
use crate::sparse::{SkylineFactor, SparseSym};
use crate::{Error, Result};

/// Converged eigenpairs of a pencil, ascending by eigenvalue.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    /// B-normalized eigenvectors, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// `||A x - lambda B x||_2 / ||B x||_2` per pair.
    pub residuals: Vec<f64>,
    /// Total operator applications across restarts.
    pub iterations: usize,
    pub shift_used: f64,
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Deterministic start vector: all ones plus a fixed low-amplitude dither.
/// The dither removes exact orthogonality to odd modes on symmetric
/// problems; without it the Krylov space can be trapped in a symmetry
/// sector.
fn start_vector(n: usize, variant: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let phase = 0.7 * i as f64 + 0.31 * (variant as f64 + 1.0);
            1.0 + 1e-3 * phase.sin() + if variant > 0 { (0.13 * i as f64 + variant as f64).cos() } else { 0.0 }
        })
        .collect()
}

struct ShiftedOperator<'m> {
    a: &'m SparseSym,
    b: &'m SparseSym,
    factor: SkylineFactor,
    sigma: f64,
}

impl<'m> ShiftedOperator<'m> {
    /// Places the shift strictly below the pencil spectrum. Starts from a
    /// Gershgorin-style diagonal estimate and lowers it until the shifted
    /// matrix factors positive definite.
    fn place_shift(a: &'m SparseSym, b: &'m SparseSym, hint: Option<f64>) -> Result<Self> {
        let diag_b = b.diag();
        if diag_b.iter().any(|&v| v <= 0.0) {
            return Err(Error::FactorizationFailure(
                "mass matrix has a non-positive diagonal entry".into(),
            ));
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..a.n() {
            let mut d = 0.0;
            let mut r = 0.0;
            for (j, v) in a.row(i) {
                if j == i {
                    d = v;
                } else {
                    r += v.abs();
                }
            }
            lo = lo.min((d - r) / diag_b[i]);
            hi = hi.max((d + r) / diag_b[i]);
        }
        let spread = (hi - lo).abs().max(1.0);
        let mut sigma = hint.unwrap_or(lo - 1e-3 * spread);
        for attempt in 0..64 {
            let shifted = SparseSym::combine(&[(1.0, a), (-sigma, b)])?;
            let factor = SkylineFactor::factor(&shifted)?;
            if factor.is_positive_definite() {
                return Ok(Self {
                    a,
                    b,
                    factor,
                    sigma,
                });
            }
            sigma -= spread * (1 << attempt.min(20)) as f64 * 1e-3;
        }
        Err(Error::FactorizationFailure(
            "could not place the shift below the spectrum".into(),
        ))
    }

    /// Re-factors at a new shift, verifying that exactly `expect_below`
    /// pencil eigenvalues lie below it; retreats while the count is larger.
    fn reshift(&mut self, target: f64, expect_below: usize) -> Result<()> {
        let mut sigma = target;
        for _ in 0..8 {
            let shifted = SparseSym::combine(&[(1.0, self.a), (-sigma, self.b)])?;
            let factor = SkylineFactor::factor(&shifted)?;
            if factor.tiny_pivots() == 0 && factor.negative_pivots() <= expect_below {
                self.factor = factor;
                self.sigma = sigma;
                return Ok(());
            }
            sigma = self.sigma + 0.5 * (sigma - self.sigma);
        }
        Ok(()) // keep the old factorization; it is still valid
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.factor.solve(&self.b.matvec_alloc(x))
    }
}

/// Computes the `k` smallest eigenpairs of `(a, b)` with `b` positive
/// definite. `tol` bounds the relative residual:
/// `||A x - lambda B x||_2 <= tol * (1 + |lambda|) * ||B x||_2`.
pub fn lowest_eigenpairs_pencil(
    a: &SparseSym,
    b: &SparseSym,
    k: usize,
    tol: f64,
) -> Result<EigenPairs> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::DimensionMismatch(format!(
            "pencil sizes {n} vs {}",
            b.n()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("requested {k} of {n} pairs")));
    }
    let mut op = ShiftedOperator::place_shift(a, b, None)?;
    let mut conv_vals: Vec<f64> = Vec::new();
    let mut conv_vecs: Vec<Vec<f64>> = Vec::new();
    let mut conv_res: Vec<f64> = Vec::new();
    let mut total_ops = 0usize;
    let m_cap = usize::min(140, usize::max(30, 12_000_000 / n.max(1))).min(n);
    let mut reshifted = false;

    'restarts: for restart in 0..8 {
        let want = k - conv_vals.len();
        if want == 0 {
            break;
        }
        // B-orthonormal Krylov basis and the cached products B v.
        let mut vs: Vec<Vec<f64>> = Vec::new();
        let mut bvs: Vec<Vec<f64>> = Vec::new();
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();

        let mut v = start_vector(n, restart);
        // Deflate converged directions and normalize.
        for (xc, _lc) in conv_vecs.iter().zip(&conv_vals) {
            let c = op.b.inner(xc, &v);
            axpy(-c, xc, &mut v);
        }
        let bn = op.b.inner(&v, &v).sqrt();
        if !(bn > 0.0) {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= bn);

        let mut slow_progress = false;
        loop {
            let m = vs.len();
            if m >= m_cap {
                break;
            }
            let mut w = op.apply(&v);
            total_ops += 1;
            if total_ops > 3000 {
                return Err(Error::SolverNoConvergence(format!(
                    "operator application cap hit with {} of {k} pairs",
                    conv_vals.len()
                )));
            }
            for xc in &conv_vecs {
                let c = op.b.inner(xc, &w);
                axpy(-c, xc, &mut w);
            }
            let bv = op.b.matvec_alloc(&v);
            let alpha = dot(&w, &bv);
            axpy(-alpha, &v, &mut w);
            if let Some(prev) = vs.last() {
                axpy(-betas[m - 1], prev, &mut w);
            }
            // Full reorthogonalization, two passes.
            for _ in 0..2 {
                for (vi, bvi) in vs.iter().zip(&bvs) {
                    let c = dot(&w, bvi);
                    axpy(-c, vi, &mut w);
                }
                let c = dot(&w, &bv);
                axpy(-c, &v, &mut w);
            }
            vs.push(v.clone());
            bvs.push(bv);
            alphas.push(alpha);
            let beta = op.b.inner(&w, &w).max(0.0).sqrt();
            betas.push(beta);

            let invariant = beta < 1e-13 * (1.0 + alpha.abs());
            let check_now = invariant || vs.len() % 4 == 0 || vs.len() >= m_cap;
            if check_now {
                let m = vs.len();
                let mut t = DMatrix::<f64>::zeros(m, m);
                for i in 0..m {
                    t[(i, i)] = alphas[i];
                    if i + 1 < m {
                        t[(i, i + 1)] = betas[i];
                        t[(i + 1, i)] = betas[i];
                    }
                }
                let eig = SymmetricEigen::new(t);
                let mut order: Vec<usize> = (0..m).collect();
                order.sort_by(|&p, &q| {
                    eig.eigenvalues[q]
                        .partial_cmp(&eig.eigenvalues[p])
                        .expect("finite ritz values")
                });
                // Try to harvest the wanted pairs (largest nu = smallest
                // lambda), in order.
                let mut new_vals = Vec::new();
                let mut new_vecs = Vec::new();
                let mut new_res = Vec::new();
                for &idx in order.iter().take(want) {
                    let nu = eig.eigenvalues[idx];
                    if nu <= 0.0 {
                        break;
                    }
                    let y = eig.eigenvectors.column(idx);
                    let bound = (betas[m - 1] * y[m - 1]).abs();
                    if !invariant && bound > 0.05 * tol * nu.abs() {
                        break;
                    }
                    let mut x = vec![0.0; n];
                    for (j, vj) in vs.iter().enumerate() {
                        axpy(y[j], vj, &mut x);
                    }
                    let bx = op.b.matvec_alloc(&x);
                    let nrm = dot(&x, &bx).max(0.0).sqrt();
                    if !(nrm > 0.0) {
                        break;
                    }
                    x.iter_mut().for_each(|t| *t /= nrm);
                    let lambda = op.sigma + 1.0 / nu;
                    let ax = a.matvec_alloc(&x);
                    let bx = b.matvec_alloc(&x);
                    let mut r = vec![0.0; n];
                    for i in 0..n {
                        r[i] = ax[i] - lambda * bx[i];
                    }
                    let res = norm2(&r) / norm2(&bx).max(1e-300);
                    if res <= tol * (1.0 + lambda.abs()) {
                        new_vals.push(lambda);
                        new_vecs.push(x);
                        new_res.push(res);
                    } else {
                        break;
                    }
                }
                if new_vals.len() == want {
                    conv_vals.extend(new_vals);
                    conv_vecs.extend(new_vecs);
                    conv_res.extend(new_res);
                    break 'restarts;
                }
                // Slow-progress detection on the first pass: if after a good
                // number of steps the top Ritz pair is still far from
                // converged, the shift is too far below; re-shift near the
                // current estimate.
                if !invariant && !reshifted && vs.len() == 24 && restart == 0 {
                    let top = order[0];
                    let bound = (betas[m - 1] * eig.eigenvectors[(m - 1, top)]).abs();
                    if bound > 1e-3 * eig.eigenvalues[top].abs() {
                        let lam_est = op.sigma + 1.0 / eig.eigenvalues[top];
                        let margin = 0.05 * (lam_est - op.sigma).abs().max(1e-12);
                        op.reshift(lam_est - margin, conv_vals.len())?;
                        reshifted = true;
                        slow_progress = true;
                        break;
                    }
                }
                if invariant {
                    // Invariant subspace: harvest what converged and restart
                    // with a fresh deflated vector.
                    conv_vals.extend(new_vals);
                    conv_vecs.extend(new_vecs);
                    conv_res.extend(new_res);
                    break;
                }
            }
            if vs.len() >= m_cap {
                break;
            }
            let beta = *betas.last().unwrap();
            if beta < 1e-13 * (1.0 + alphas.last().unwrap().abs()) {
                break;
            }
            w.iter_mut().for_each(|x| *x /= beta);
            v = w;
        }
        let _ = slow_progress;
        let _ = restart;
    }

    if conv_vals.len() < k {
        return Err(Error::SolverNoConvergence(format!(
            "converged {} of {k} pairs",
            conv_vals.len()
        )));
    }

    // Ascending order with deterministic in-cluster ordering.
    let mut idx: Vec<usize> = (0..k).collect();
    idx.sort_by(|&p, &q| {
        conv_vals[p]
            .partial_cmp(&conv_vals[q])
            .expect("finite eigenvalues")
    });
    let mut values: Vec<f64> = idx.iter().map(|&i| conv_vals[i]).collect();
    let mut vectors: Vec<Vec<f64>> = idx.iter().map(|&i| conv_vecs[i].clone()).collect();
    let residuals: Vec<f64> = idx.iter().map(|&i| conv_res[i]).collect();
    for x in vectors.iter_mut() {
        fix_sign(x);
    }
    // Clusters: stable lexicographic order inside near-degenerate groups.
    let mut i = 0;
    while i < k {
        let mut j = i + 1;
        while j < k && (values[j] - values[i]).abs() <= 1e-8 * (1.0 + values[i].abs()) {
            j += 1;
        }
        if j - i > 1 {
            let mut grp: Vec<(Vec<f64>, f64, f64)> = (i..j)
                .map(|p| (vectors[p].clone(), values[p], residuals[p]))
                .collect();
            grp.sort_by(|a, b| lex_cmp(&a.0, &b.0));
            for (off, (vx, vl, _vr)) in grp.into_iter().enumerate() {
                vectors[i + off] = vx;
                values[i + off] = vl;
            }
        }
        i = j;
    }

    // Completeness guard for multi-pair requests: the number of pencil
    // eigenvalues at or below the reported top must match.
    if k > 1 {
        let top = values[k - 1];
        let probe = top + 1e-9 * (1.0 + top.abs());
        let below = crate::sparse::eigenvalues_below(a, b, probe)?;
        if below > k {
            return Err(Error::SolverNoConvergence(format!(
                "{below} eigenvalues below {probe:.6e} but only {k} converged"
            )));
        }
    }

    Ok(EigenPairs {
        values,
        vectors,
        residuals,
        iterations: total_ops,
        shift_used: op.sigma,
    })
}

fn fix_sign(x: &mut [f64]) {
    let lead = x
        .iter()
        .find(|v| v.abs() > 1e-10 * x.iter().fold(0.0f64, |m, w| m.max(w.abs())))
        .copied()
        .unwrap_or(1.0);
    if lead < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("finite entries") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// Rayleigh quotient `psi^T A psi / psi^T B psi`.
pub fn rayleigh_quotient(a: &SparseSym, b: &SparseSym, psi: &[f64]) -> Result<f64> {
    let denom = b.inner(psi, psi);
    if denom <= 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(a.inner(psi, psi) / denom)
}

/// Discretization metadata carried by every spectrum report.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumMeta {
    pub h_mesh: f64,
    pub mesh_nodes: usize,
    pub ds: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub end_condition: String,
}

/// Sorted eigenvalues with residual norms and provenance of the assembled
/// form; the JSON-facing result of every eigensolve.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub mesh: SpectrumMetaMesh,
    pub grid: SpectrumMetaGrid,
    pub end_condition: String,
    pub paper_form: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumMetaMesh {
    pub h_mesh: f64,
    pub nodes: usize,
    pub triangles: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumMetaGrid {
    pub ds: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub nodes: usize,
}

/// Eigen-solution of an assembled form: the report plus the eigenvectors in
/// the form's degree-of-freedom numbering.
#[derive(Debug, Clone)]
pub struct SolvedSpectrum {
    pub report: SpectrumReport,
    pub pairs: EigenPairs,
}

/// The `k` smallest eigenpairs of an assembled form.
pub fn lowest_eigenpairs(form: &AssembledForm, k: usize, tol: f64) -> Result<SolvedSpectrum> {
    let pairs = lowest_eigenpairs_pencil(&form.a, &form.b, k, tol)?;
    let report = SpectrumReport {
        eigenvalues: pairs.values.clone(),
        residuals: pairs.residuals.clone(),
        iterations: pairs.iterations,
        mesh: SpectrumMetaMesh {
            h_mesh: form.meta.h_mesh,
            nodes: form.meta.mesh_nodes,
            triangles: form.meta.mesh_triangles,
        },
        grid: SpectrumMetaGrid {
            ds: form.meta.ds,
            s_min: form.meta.s_min,
            s_max: form.meta.s_max,
            nodes: form.meta.s_nodes,
        },
        end_condition: form.meta.end_condition.clone(),
        paper_form: form.description.clone(),
    };
    Ok(SolvedSpectrum { report, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::CooBuilder;

    fn fem_1d(n_elems: usize, len: f64) -> (SparseSym, SparseSym) {
        // P1 stiffness and consistent mass on (0, len) with Dirichlet ends;
        // n_elems - 1 interior nodes.
        let n = n_elems - 1;
        let h = len / n_elems as f64;
        let mut k = CooBuilder::new(n);
        let mut m = CooBuilder::new(n);
        for e in 0..n_elems {
            let nodes = [e as isize - 1, e as isize];
            for (li, &gi) in nodes.iter().enumerate() {
                for (lj, &gj) in nodes.iter().enumerate() {
                    if gi < 0 || gj < 0 || gi >= n as isize || gj >= n as isize {
                        continue;
                    }
                    let kv = if li == lj { 1.0 / h } else { -1.0 / h };
                    let mv = if li == lj { h / 3.0 } else { h / 6.0 };
                    k.push(gi as usize, gj as usize, kv);
                    m.push(gi as usize, gj as usize, mv);
                }
            }
        }
        (k.build(), m.build())
    }

    #[test]
    fn dirichlet_laplacian_1d_ground_state() {
        let (k, m) = fem_1d(128, 1.0);
        assert_eq!(k.n(), 127);
        let got = lowest_eigenpairs_pencil(&k, &m, 1, 1e-10).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!(
            (got.values[0] - pi2).abs() / pi2 < 1e-3,
            "lambda1 = {}",
            got.values[0]
        );
        assert!(got.residuals[0] < 1e-10 * (1.0 + got.values[0]));
    }

    #[test]
    fn first_three_modes_match_sine_series() {
        let (k, m) = fem_1d(200, 1.0);
        let got = lowest_eigenpairs_pencil(&k, &m, 3, 1e-10).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        for j in 0..3 {
            let exact = pi2 * ((j + 1) * (j + 1)) as f64;
            assert!(
                (got.values[j] - exact).abs() / exact < 5e-3,
                "mu_{} = {}",
                j + 1,
                got.values[j]
            );
        }
        assert!(got.values[0] < got.values[1] && got.values[1] < got.values[2]);
    }

    #[test]
    fn identity_pencil_gives_all_ones() {
        let (_, m) = fem_1d(40, 2.0);
        let got = lowest_eigenpairs_pencil(&m, &m, 3, 1e-11).unwrap();
        for v in &got.values {
            assert!((v - 1.0).abs() < 1e-9, "eigenvalue {v}");
        }
    }

    #[test]
    fn psd_perturbation_never_lowers_eigenvalues() {
        // Minimax consistency: A + P with P >= 0 raises every eigenvalue.
        let (k, m) = fem_1d(60, 1.0);
        let base = lowest_eigenpairs_pencil(&k, &m, 3, 1e-10).unwrap();
        // P = mass-weighted rank-n PSD perturbation: use the mass matrix
        // itself scaled (clearly PSD and same pattern).
        let kp = SparseSym::combine(&[(1.0, &k), (0.37, &m)]).unwrap();
        let bumped = lowest_eigenpairs_pencil(&kp, &m, 3, 1e-10).unwrap();
        for j in 0..3 {
            assert!(bumped.values[j] >= base.values[j] - 1e-9);
        }
    }

    #[test]
    fn rayleigh_quotient_of_eigenvector_is_eigenvalue() {
        let (k, m) = fem_1d(80, 1.0);
        let got = lowest_eigenpairs_pencil(&k, &m, 1, 1e-11).unwrap();
        let rq = rayleigh_quotient(&k, &m, &got.vectors[0]).unwrap();
        assert!((rq - got.values[0]).abs() < 1e-9);
        assert!(matches!(
            rayleigh_quotient(&k, &m, &vec![0.0; k.n()]),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn shifted_pencil_with_negative_lowest_eigenvalue() {
        let (k, m) = fem_1d(64, 1.0);
        // K - 15 M has its lowest eigenvalue pi^2 - 15 < 0.
        let shifted = SparseSym::combine(&[(1.0, &k), (-15.0, &m)]).unwrap();
        let got = lowest_eigenpairs_pencil(&shifted, &m, 1, 1e-10).unwrap();
        let expect = std::f64::consts::PI.powi(2) - 15.0;
        assert!((got.values[0] - expect).abs() < 0.02, "got {}", got.values[0]);
    }

    #[test]
    fn bitwise_reproducible() {
        let (k, m) = fem_1d(90, 1.5);
        let a = lowest_eigenpairs_pencil(&k, &m, 2, 1e-10).unwrap();
        let b = lowest_eigenpairs_pencil(&k, &m, 2, 1e-10).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.vectors, b.vectors);
        assert_eq!(a.iterations, b.iterations);
    }
}
