//! Sparse symmetric matrices and a profile (skyline) LDL^T factorization.
//!
//! The factorization reports the pivot signs, so Sylvester inertia counts of
//! `A - sigma B` come for free; the eigensolver uses them both to validate
//! shifts and to bisect on the sign of the lowest eigenvalue of a pencil.

use std::collections::VecDeque;

use crate::{Error, Result};

/// Symmetric sparse matrix in CSR layout with the full (both triangles)
/// pattern stored. Patterns are kept even for exactly-zero values so that
/// matrices assembled on the same discretization can be combined entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSym {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSym {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn vals(&self) -> &[f64] {
        &self.vals
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        self.col_idx[lo..hi]
            .iter()
            .zip(&self.vals[lo..hi])
            .map(|(&c, &v)| (c as usize, v))
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .find(|(j, _)| *j == i)
                    .map(|(_, v)| v)
                    .unwrap_or(0.0)
            })
            .collect()
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        for i in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.col_idx[k] as usize];
            }
            y[i] = acc;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.matvec(x, &mut y);
        y
    }

    /// `x^T A y`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            let mut row = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                row += self.vals[k] * y[self.col_idx[k] as usize];
            }
            acc += x[i] * row;
        }
        acc
    }

    /// Maximum relative symmetry defect `|a_ij - a_ji| / scale`.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self
            .vals
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1e-300);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j > i {
                    let vt = self
                        .row(j)
                        .find(|(c, _)| *c == i)
                        .map(|(_, v)| v)
                        .unwrap_or(0.0);
                    worst = worst.max((v - vt).abs() / scale);
                }
            }
        }
        worst
    }

    /// Entrywise linear combination of same-pattern matrices.
    pub fn combine(terms: &[(f64, &SparseSym)]) -> Result<SparseSym> {
        let first = terms
            .first()
            .ok_or_else(|| Error::DimensionMismatch("empty combination".into()))?
            .1;
        for (_, m) in terms.iter().skip(1) {
            if m.n != first.n || m.row_ptr != first.row_ptr || m.col_idx != first.col_idx {
                return Err(Error::DimensionMismatch(
                    "combine requires identical sparsity patterns".into(),
                ));
            }
        }
        let mut vals = vec![0.0; first.vals.len()];
        for (c, m) in terms {
            for (dst, src) in vals.iter_mut().zip(&m.vals) {
                *dst += c * src;
            }
        }
        Ok(SparseSym {
            n: first.n,
            row_ptr: first.row_ptr.clone(),
            col_idx: first.col_idx.clone(),
            vals,
        })
    }

    /// Coordinate-format text export: one `row col value` line per stored
    /// entry of the lower triangle.
    pub fn write_coordinate_text<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n, self.nnz())?;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                if j <= i {
                    writeln!(w, "{} {} {}", i, j, v)?;
                }
            }
        }
        Ok(())
    }
}

/// Accumulates duplicate-tolerant triplets and compresses them to CSR.
#[derive(Debug)]
pub struct CooBuilder {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl CooBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(n: usize, cap: usize) -> Self {
        Self {
            n,
            entries: Vec::with_capacity(cap),
        }
    }

    #[inline]
    pub fn push(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(i < self.n && j < self.n);
        self.entries.push((i as u32, j as u32, v));
    }

    pub fn build(mut self) -> SparseSym {
        self.entries
            .sort_unstable_by_key(|&(i, j, _)| ((i as u64) << 32) | j as u64);
        let mut row_ptr = vec![0usize; self.n + 1];
        let mut col_idx = Vec::new();
        let mut vals = Vec::new();
        let mut k = 0;
        while k < self.entries.len() {
            let (i, j, mut v) = self.entries[k];
            k += 1;
            while k < self.entries.len() && self.entries[k].0 == i && self.entries[k].1 == j {
                v += self.entries[k].2;
                k += 1;
            }
            row_ptr[i as usize + 1] += 1;
            col_idx.push(j);
            vals.push(v);
        }
        for i in 0..self.n {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSym {
            n: self.n,
            row_ptr,
            col_idx,
            vals,
        }
    }
}

/// Reverse Cuthill-McKee ordering of the matrix graph. Returns `perm` with
/// `perm[new] = old`. Deterministic: ties broken by node index.
pub fn rcm_order(m: &SparseSym) -> Vec<usize> {
    let n = m.n;
    let degree: Vec<usize> = (0..n)
        .map(|i| m.row(i).filter(|(j, _)| *j != i).count())
        .collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let bfs_levels = |start: usize, visited_mask: &[bool]| -> Vec<Vec<usize>> {
        let mut seen = visited_mask.to_vec();
        let mut levels = vec![vec![start]];
        seen[start] = true;
        loop {
            let mut next = Vec::new();
            for &u in levels.last().unwrap() {
                for (v, _) in m.row(u) {
                    if !seen[v] {
                        seen[v] = true;
                        next.push(v);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort_unstable();
            levels.push(next);
        }
        levels
    };

    while order.len() < n {
        // Component seed: unvisited node of minimum degree.
        let mut start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i))
            .expect("unvisited node exists");
        // Pseudo-peripheral refinement.
        let mut ecc = 0usize;
        for _ in 0..4 {
            let levels = bfs_levels(start, &visited);
            if levels.len() <= ecc {
                break;
            }
            ecc = levels.len();
            start = *levels
                .last()
                .unwrap()
                .iter()
                .min_by_key(|&&i| (degree[i], i))
                .unwrap();
        }
        // Cuthill-McKee BFS from the seed.
        let mut queue = VecDeque::new();
        visited[start] = true;
        queue.push_back(start);
        let mut component = Vec::new();
        while let Some(u) = queue.pop_front() {
            component.push(u);
            let mut nbrs: Vec<usize> = m
                .row(u)
                .filter(|(v, _)| !visited[*v])
                .map(|(v, _)| v)
                .collect();
            nbrs.sort_unstable_by_key(|&v| (degree[v], v));
            nbrs.dedup();
            for v in nbrs {
                if !visited[v] {
                    visited[v] = true;
                    queue.push_back(v);
                }
            }
        }
        component.reverse();
        order.extend(component);
    }
    order
}

/// Profile LDL^T factorization with a fill-reducing permutation.
pub struct SkylineFactor {
    n: usize,
    /// perm[new] = old
    perm: Vec<usize>,
    /// perm_inv[old] = new
    perm_inv: Vec<usize>,
    /// First stored row of each (permuted) column.
    fmin: Vec<usize>,
    /// Column start offsets into `sky`.
    col_ptr: Vec<usize>,
    /// Strictly-subdiagonal factor entries: for column j, L(j, k) for
    /// k = fmin[j] .. j-1 (row j of the unit lower factor).
    sky: Vec<f64>,
    d: Vec<f64>,
    n_negative: usize,
    n_tiny: usize,
}

/// Cap on profile storage (entries); past this the problem should be
/// re-discretized rather than factored.
const PROFILE_CAP: usize = 140_000_000;

impl SkylineFactor {
    /// Factors `m` with the given ordering (`perm[new] = old`). Tiny pivots
    /// are counted and clamped so inertia queries remain meaningful; callers
    /// that need a definite factorization must check `is_positive_definite`.
    pub fn factor_with_order(m: &SparseSym, perm: Vec<usize>) -> Result<Self> {
        let n = m.n;
        let mut perm_inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            perm_inv[old] = new;
        }
        // Column heights of the permuted matrix.
        let mut fmin: Vec<usize> = (0..n).collect();
        for i_old in 0..n {
            let i = perm_inv[i_old];
            for (j_old, _) in m.row(i_old) {
                let j = perm_inv[j_old];
                if i < j {
                    fmin[j] = fmin[j].min(i);
                } else if j < i {
                    fmin[i] = fmin[i].min(j);
                }
            }
        }
        let mut col_ptr = vec![0usize; n + 1];
        for j in 0..n {
            col_ptr[j + 1] = col_ptr[j] + (j - fmin[j]);
        }
        let profile = col_ptr[n];
        if profile > PROFILE_CAP {
            return Err(Error::FactorizationFailure(format!(
                "profile {profile} exceeds the storage cap"
            )));
        }
        let mut sky = vec![0.0f64; profile];
        let mut diag = vec![0.0f64; n];
        // Scatter the permuted matrix into the envelope.
        for i_old in 0..n {
            let i = perm_inv[i_old];
            for (j_old, v) in m.row(i_old) {
                let j = perm_inv[j_old];
                if j == i {
                    diag[i] = v;
                } else if j < i {
                    sky[col_ptr[i] + (j - fmin[i])] = v;
                }
            }
        }
        let scale = diag.iter().fold(0.0f64, |s, v| s.max(v.abs())).max(1e-300);
        let tiny = 1e-300f64.max(scale * 1e-18);

        let mut d = vec![0.0f64; n];
        let mut n_negative = 0usize;
        let mut n_tiny = 0usize;
        let mut work = vec![0.0f64; n];
        for j in 0..n {
            let fj = fmin[j];
            // Load column j (rows fj..j) into the work array.
            for k in fj..j {
                work[k] = sky[col_ptr[j] + (k - fj)];
            }
            // Reduce: work[i] becomes v(i) = d(i) * L(j, i).
            for i in fj..j {
                let lo = fmin[i].max(fj);
                let mut s = work[i];
                let base_i = col_ptr[i];
                for k in lo..i {
                    s -= sky[base_i + (k - fmin[i])] * work[k];
                }
                work[i] = s;
            }
            // Diagonal pivot and the stored row of L.
            let mut dj = diag[j];
            for k in fj..j {
                let dk = d[k];
                let l = work[k] / dk;
                dj -= l * work[k];
                sky[col_ptr[j] + (k - fj)] = l;
            }
            if dj.abs() < tiny {
                n_tiny += 1;
                dj = if dj >= 0.0 { tiny } else { -tiny };
            }
            if dj < 0.0 {
                n_negative += 1;
            }
            d[j] = dj;
        }
        Ok(Self {
            n,
            perm,
            perm_inv,
            fmin,
            col_ptr,
            sky,
            d,
            n_negative,
            n_tiny,
        })
    }

    /// Factors with the built-in reverse Cuthill-McKee ordering.
    pub fn factor(m: &SparseSym) -> Result<Self> {
        let perm = rcm_order(m);
        Self::factor_with_order(m, perm)
    }

    /// Number of negative pivots; by Sylvester's law this is the number of
    /// eigenvalues of the factored matrix below zero.
    pub fn negative_pivots(&self) -> usize {
        self.n_negative
    }

    pub fn tiny_pivots(&self) -> usize {
        self.n_tiny
    }

    pub fn is_positive_definite(&self) -> bool {
        self.n_negative == 0 && self.n_tiny == 0
    }

    /// Solves `M x = b` in place of the returned vector.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let mut x = vec![0.0f64; self.n];
        for j in 0..self.n {
            x[j] = b[self.perm[j]];
        }
        // Forward: L y = b (unit lower, row-wise access).
        for j in 0..self.n {
            let fj = self.fmin[j];
            let base = self.col_ptr[j];
            let mut s = x[j];
            for k in fj..j {
                s -= self.sky[base + (k - fj)] * x[k];
            }
            x[j] = s;
        }
        for j in 0..self.n {
            x[j] /= self.d[j];
        }
        // Backward: L^T x = y (column updates).
        for j in (0..self.n).rev() {
            let fj = self.fmin[j];
            let base = self.col_ptr[j];
            let xj = x[j];
            for k in fj..j {
                x[k] -= self.sky[base + (k - fj)] * xj;
            }
        }
        let mut out = vec![0.0f64; self.n];
        for j in 0..self.n {
            out[self.perm[j]] = x[j];
        }
        out
    }

    pub fn profile_len(&self) -> usize {
        self.sky.len()
    }
}

/// Number of pencil eigenvalues of `(a, b)` strictly below `sigma`, by the
/// inertia of `a - sigma b`. `b` must be positive definite.
pub fn eigenvalues_below(a: &SparseSym, b: &SparseSym, sigma: f64) -> Result<usize> {
    let shifted = SparseSym::combine(&[(1.0, a), (-sigma, b)])?;
    let f = SkylineFactor::factor(&shifted)?;
    Ok(f.negative_pivots())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_to_sparse(d: &[Vec<f64>]) -> SparseSym {
        let n = d.len();
        let mut b = CooBuilder::new(n);
        for i in 0..n {
            for j in 0..n {
                if d[i][j] != 0.0 {
                    b.push(i, j, d[i][j]);
                }
            }
        }
        b.build()
    }

    fn laplacian_1d(n: usize) -> SparseSym {
        let mut b = CooBuilder::new(n);
        for i in 0..n {
            b.push(i, i, 2.0);
            if i > 0 {
                b.push(i, i - 1, -1.0);
            }
            if i + 1 < n {
                b.push(i, i + 1, -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn coo_merges_duplicates() {
        let mut b = CooBuilder::new(3);
        b.push(0, 0, 1.0);
        b.push(0, 0, 2.0);
        b.push(2, 1, -1.0);
        b.push(1, 2, -1.0);
        let m = b.build();
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.diag()[0], 3.0);
        assert!(m.symmetry_defect() < 1e-15);
    }

    #[test]
    fn factor_solves_laplacian() {
        let n = 50;
        let a = laplacian_1d(n);
        let f = SkylineFactor::factor(&a).unwrap();
        assert!(f.is_positive_definite());
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let x = f.solve(&b);
        let r = a.matvec_alloc(&x);
        for i in 0..n {
            assert!((r[i] - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn inertia_counts_eigenvalues_below_shift() {
        // 1D Dirichlet Laplacian eigenvalues: 4 sin^2(k pi / (2(n+1))).
        let n = 24;
        let a = laplacian_1d(n);
        let exact: Vec<f64> = (1..=n)
            .map(|k| {
                let t = (k as f64 * std::f64::consts::PI) / (2.0 * (n as f64 + 1.0));
                4.0 * t.sin().powi(2)
            })
            .collect();
        for sigma in [0.05, 0.3, 1.0, 2.5, 3.9] {
            let shifted = {
                let mut b = CooBuilder::new(n);
                for i in 0..n {
                    for (j, v) in a.row(i) {
                        b.push(i, j, v);
                    }
                    b.push(i, i, -sigma);
                }
                b.build()
            };
            let f = SkylineFactor::factor(&shifted).unwrap();
            let expected = exact.iter().filter(|&&l| l < sigma).count();
            assert_eq!(f.negative_pivots(), expected, "sigma = {sigma}");
        }
    }

    #[test]
    fn factor_matches_dense_on_random_spd() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 30;
        let mut d = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                if i == j || rng.gen_bool(0.2) {
                    let v = rng.gen_range(-1.0..1.0);
                    d[i][j] = v;
                    d[j][i] = v;
                }
            }
            d[i][i] = 4.0 + rng.gen_range(0.0..1.0);
        }
        let a = dense_to_sparse(&d);
        let f = SkylineFactor::factor(&a).unwrap();
        assert!(f.is_positive_definite());
        let b: Vec<f64> = (0..n).map(|i| (i as f64).cos()).collect();
        let x = f.solve(&b);
        let r = a.matvec_alloc(&x);
        for i in 0..n {
            assert!((r[i] - b[i]).abs() < 1e-9, "row {i}");
        }
    }

    #[test]
    fn rcm_is_a_permutation() {
        let a = laplacian_1d(37);
        let p = rcm_order(&a);
        let mut seen = vec![false; 37];
        for &i in &p {
            assert!(!seen[i]);
            seen[i] = true;
        }
    }

    #[test]
    fn combine_requires_same_pattern() {
        let a = laplacian_1d(5);
        let b = laplacian_1d(6);
        assert!(SparseSym::combine(&[(1.0, &a), (1.0, &b)]).is_err());
        let c = SparseSym::combine(&[(2.0, &a), (-1.0, &a)]).unwrap();
        assert_eq!(c.diag(), vec![2.0; 5]);
    }
}
