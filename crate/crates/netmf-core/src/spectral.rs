//! Top-h eigendecomposition of the normalized adjacency, the window filter,
//! the rank-h similarity approximation, and numeric verification of the
//! singular-value / Rayleigh-quotient bounds.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::closed_form::{ClosedFormMatrix, MatrixKind, Provenance};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::sparse::Csr;

/// Default residual tolerance for Lanczos Ritz pairs.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;
/// Default seed for the Lanczos start vector.
pub const DEFAULT_EIGEN_SEED: u64 = 42;
/// Cap on the vertex count for full dense eigendecompositions.
pub const FULL_EIGEN_CAP: usize = 2_000;

/// Top-h eigenpairs of a symmetric matrix, eigenvalues descending by
/// algebraic value, eigenvectors orthonormal columns.
#[derive(Debug, Clone)]
pub struct EigenPairs {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
    residuals: Vec<f64>,
}

impl EigenPairs {
    pub fn h(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// n×h matrix whose columns are the eigenvectors.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Per-pair ‖S u − λ u‖₂.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// Max deviation of Uᵀ U from the identity.
    pub fn orthonormality_gap(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut gap: f64 = 0.0;
        for i in 0..self.h() {
            for j in 0..self.h() {
                let expect = if i == j { 1.0 } else { 0.0 };
                gap = gap.max((g[(i, j)] - expect).abs());
            }
        }
        gap
    }

    /// Keep only the pairs at `indices` (in the given order).
    pub fn select(&self, indices: &[usize]) -> EigenPairs {
        let n = self.vectors.nrows();
        let mut vectors = DMatrix::<f64>::zeros(n, indices.len());
        let mut eigenvalues = Vec::with_capacity(indices.len());
        let mut residuals = Vec::with_capacity(indices.len());
        for (k, &i) in indices.iter().enumerate() {
            vectors.set_column(k, &self.vectors.column(i));
            eigenvalues.push(self.eigenvalues[i]);
            residuals.push(self.residuals[i]);
        }
        EigenPairs {
            eigenvalues,
            vectors,
            residuals,
        }
    }
}

/// Which eigenpairs a rank-h approximation keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenSelection {
    /// The h algebraically largest eigenvalues (the filter prefers large
    /// positive eigenvalues; this is the pipeline default).
    Algebraic,
    /// The h largest by |f(λ)| — the ordering under which the approximation
    /// error bound is stated.
    FilterMagnitude,
}

/// Split full eigenpairs into (kept, excluded eigenvalues) under a selection
/// rule for a window size `window`.
pub fn select_eigenpairs(
    full: &EigenPairs,
    h: usize,
    selection: EigenSelection,
    window: usize,
) -> (EigenPairs, Vec<f64>) {
    let n = full.h();
    assert!(h <= n, "cannot keep more pairs than available");
    let mut order: Vec<usize> = (0..n).collect();
    if selection == EigenSelection::FilterMagnitude {
        order.sort_by(|&a, &b| {
            let fa = filter(full.eigenvalues[a], window).abs();
            let fb = filter(full.eigenvalues[b], window).abs();
            fb.partial_cmp(&fa).unwrap()
        });
    }
    let kept: Vec<usize> = order[..h].to_vec();
    let excluded: Vec<f64> = order[h..].iter().map(|&i| full.eigenvalues[i]).collect();
    (full.select(&kept), excluded)
}

fn sign_fix_column(col: &mut [f64]) {
    let max_abs = col.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if max_abs == 0.0 {
        return;
    }
    let first_nonzero = col.iter().find(|v| v.abs() > 1e-12 * max_abs);
    if let Some(&v) = first_nonzero {
        if v < 0.0 {
            for x in col.iter_mut() {
                *x = -*x;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// The h algebraically largest eigenpairs of a sparse symmetric matrix by
/// Lanczos iteration with full reorthogonalization. The start vector is
/// pseudo-random from `seed`, so results are deterministic. `max_basis`
/// caps the Krylov dimension (it is also capped at n).
pub fn top_eigenpairs(
    s: &Csr,
    h: usize,
    tol: f64,
    max_basis: usize,
    seed: u64,
) -> Result<EigenPairs> {
    let n = s.n_rows();
    assert_eq!(n, s.n_cols(), "matrix must be square");
    if h == 0 || h > n {
        return Err(Error::validation(format!(
            "requested {h} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let limit = max_basis.clamp(h, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_unit = |basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..16 {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            for _ in 0..2 {
                for u in basis {
                    let c = dot(&v, u);
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= c * ui;
                    }
                }
            }
            let nv = norm(&v);
            if nv > 1e-10 {
                for x in v.iter_mut() {
                    *x /= nv;
                }
                return Some(v);
            }
        }
        None
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut v = random_unit(&basis).expect("n >= 1");
    let mut next_check = (h + 10).min(limit);

    loop {
        basis.push(v.clone());
        let j = basis.len() - 1;
        let mut w = s.mul_vec(&v);
        let alpha = dot(&w, &v);
        alphas.push(alpha);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        if j > 0 && betas[j - 1] > 0.0 {
            let prev = &basis[j - 1];
            let beta = betas[j - 1];
            for (wi, pi) in w.iter_mut().zip(prev) {
                *wi -= beta * pi;
            }
        }
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                if c != 0.0 {
                    for (wi, ui) in w.iter_mut().zip(u) {
                        *wi -= c * ui;
                    }
                }
            }
        }
        let beta = norm(&w);

        let size = basis.len();
        let at_limit = size == limit;
        if size >= h && (size >= next_check || at_limit || beta <= 1e-12) {
            next_check = ((size as f64 * 1.5) as usize).max(size + 10).min(limit);
            if let Some(pairs) = ritz_pairs(s, &basis, &alphas, &betas, beta, h, tol) {
                return Ok(pairs);
            }
            if at_limit {
                let achieved = ritz_residuals(s, &basis, &alphas, &betas, beta, h);
                return Err(Error::convergence(format!(
                    "Lanczos did not reach tol={tol} with a basis of {size}; \
                     residuals {achieved:?}"
                )));
            }
        }
        if at_limit {
            // no convergence check possible beyond the limit
            let achieved = ritz_residuals(s, &basis, &alphas, &betas, beta, h);
            return Err(Error::convergence(format!(
                "Lanczos basis limit {limit} reached before convergence; residuals {achieved:?}"
            )));
        }

        if beta <= 1e-12 {
            // invariant subspace: restart with a fresh orthogonal direction
            betas.push(0.0);
            match random_unit(&basis) {
                Some(f) => v = f,
                None => {
                    // basis spans the whole space; final extraction
                    if let Some(pairs) = ritz_pairs(s, &basis, &alphas, &betas, 0.0, h, tol) {
                        return Ok(pairs);
                    }
                    let achieved = ritz_residuals(s, &basis, &alphas, &betas, 0.0, h);
                    return Err(Error::convergence(format!(
                        "Lanczos exhausted the space without reaching tol={tol}; \
                         residuals {achieved:?}"
                    )));
                }
            }
        } else {
            betas.push(beta);
            for x in w.iter_mut() {
                *x /= beta;
            }
            v = w;
        }
    }
}

fn tridiagonal(alphas: &[f64], betas: &[f64]) -> DMatrix<f64> {
    let m = alphas.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    t
}

fn ritz_decompose(
    s: &Csr,
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    h: usize,
) -> (Vec<f64>, DMatrix<f64>, Vec<f64>) {
    let n = basis[0].len();
    let m = basis.len();
    let eig = SymmetricEigen::new(tridiagonal(alphas, betas));
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let kept = &order[..h];

    let mut values = Vec::with_capacity(h);
    let mut vectors = DMatrix::<f64>::zeros(n, h);
    let mut residuals = Vec::with_capacity(h);
    for (k, &idx) in kept.iter().enumerate() {
        let theta = eig.eigenvalues[idx];
        let coeffs = eig.eigenvectors.column(idx);
        let mut y = vec![0.0; n];
        for (b, &c) in basis.iter().zip(coeffs.iter()) {
            if c != 0.0 {
                for (yi, bi) in y.iter_mut().zip(b) {
                    *yi += c * bi;
                }
            }
        }
        let ny = norm(&y);
        if ny > 0.0 {
            for x in y.iter_mut() {
                *x /= ny;
            }
        }
        sign_fix_column(&mut y);
        let sy = s.mul_vec(&y);
        let res = sy
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        values.push(theta);
        vectors.set_column(k, &nalgebra::DVector::from_vec(y).column(0));
        residuals.push(res);
    }
    (values, vectors, residuals)
}

fn ritz_pairs(
    s: &Csr,
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    _beta_last: f64,
    h: usize,
    tol: f64,
) -> Option<EigenPairs> {
    if basis.len() < h {
        return None;
    }
    let (eigenvalues, vectors, residuals) = ritz_decompose(s, basis, alphas, betas, h);
    if residuals.iter().all(|&r| r <= tol) {
        Some(EigenPairs {
            eigenvalues,
            vectors,
            residuals,
        })
    } else {
        None
    }
}

fn ritz_residuals(
    s: &Csr,
    basis: &[Vec<f64>],
    alphas: &[f64],
    betas: &[f64],
    _beta_last: f64,
    h: usize,
) -> Vec<f64> {
    let h = h.min(basis.len());
    ritz_decompose(s, basis, alphas, betas, h).2
}

/// Full eigendecomposition of a (small) sparse symmetric matrix by a dense
/// solver; pairs sorted descending with the same sign convention as the
/// Lanczos path.
pub fn full_eigenpairs(s: &Csr) -> Result<EigenPairs> {
    let n = s.n_rows();
    if n > FULL_EIGEN_CAP {
        return Err(Error::capacity(format!(
            "full eigendecomposition capped at {FULL_EIGEN_CAP} vertices, got {n}; \
             use the Lanczos top-h path"
        )));
    }
    let dense = s.to_dense();
    let sym = (&dense + dense.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    let mut eigenvalues = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for (k, &idx) in order.iter().enumerate() {
        let mut col: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        sign_fix_column(&mut col);
        let theta = eig.eigenvalues[idx];
        let sv = s.mul_vec(&col);
        let res = sv
            .iter()
            .zip(&col)
            .map(|(a, b)| (a - theta * b).powi(2))
            .sum::<f64>()
            .sqrt();
        vectors.set_column(k, &nalgebra::DVector::from_vec(col).column(0));
        eigenvalues.push(theta);
        residuals.push(res);
    }
    Ok(EigenPairs {
        eigenvalues,
        vectors,
        residuals,
    })
}

/// The window filter f(x) = (1/T) Σ_{r=1..T} x^r, evaluated in Horner form.
pub fn filter(x: f64, window: usize) -> f64 {
    assert!(window >= 1, "window size T must be at least 1");
    let mut acc = 1.0;
    for _ in 1..window {
        acc = 1.0 + x * acc;
    }
    x * acc / window as f64
}

/// f applied to a slice of eigenvalues.
pub fn filtered(eigenvalues: &[f64], window: usize) -> Vec<f64> {
    eigenvalues.iter().map(|&x| filter(x, window)).collect()
}

/// Rank-h similarity approximation:
/// M̂ = vol(G)/b · D^{-1/2} U_h f(Λ_h) U_hᵀ D^{-1/2}.
/// Entries may be negative; the shift downstream absorbs them.
pub fn approximate_similarity(
    graph: &Graph,
    pairs: &EigenPairs,
    window: usize,
    b: f64,
) -> Result<ClosedFormMatrix> {
    if pairs.vectors.nrows() != graph.n() {
        return Err(Error::validation(format!(
            "eigenpairs over {} vertices do not match graph with {} vertices",
            pairs.vectors.nrows(),
            graph.n()
        )));
    }
    if !(b > 0.0) {
        return Err(Error::validation("negative-sample count b must be positive"));
    }
    let n = graph.n();
    let h = pairs.h();
    let mut w = pairs.vectors.clone();
    for i in 0..n {
        let scale = 1.0 / graph.degree(i).sqrt();
        for k in 0..h {
            w[(i, k)] *= scale;
        }
    }
    let mut wf = w.clone();
    for (k, &lambda) in pairs.eigenvalues.iter().enumerate() {
        let f = filter(lambda, window);
        for i in 0..n {
            wf[(i, k)] *= f;
        }
    }
    let mut m = wf * w.transpose();
    m *= graph.volume() / b;
    Ok(ClosedFormMatrix::new(
        m,
        MatrixKind::Similarity,
        Provenance::new("deepwalk-approx")
            .with("T", window)
            .with("b", b)
            .with("h", h)
            .with("n", n),
    ))
}

/// Numeric check of the spectral bounds on (1/T Σ P^r) D^{-1}.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Singular values of the interior matrix, non-increasing.
    pub singular_values: Vec<f64>,
    /// Signed eigenvalues of the interior matrix, non-increasing.
    pub interior_eigenvalues: Vec<f64>,
    /// (1/d_min)·|f(λ_{p_s})| with p ordering |f| non-increasing.
    pub singular_bounds: Vec<f64>,
    /// Smallest eigenvalue of the interior matrix.
    pub rayleigh_lhs: f64,
    /// (1/d_min)·min_i f(λ_i).
    pub rayleigh_rhs: f64,
    pub singular_ok: bool,
    pub rayleigh_ok: bool,
    pub window: usize,
    pub d_min: f64,
}

/// Tolerance for the bound checks.
pub const BOUND_SLACK: f64 = 1e-10;

/// Verify the per-singular-value bound and the Rayleigh-quotient lower bound
/// against a full dense eigendecomposition oracle.
pub fn verify_bounds(graph: &Graph, window: usize) -> Result<SpectralReport> {
    let n = graph.n();
    if n > FULL_EIGEN_CAP {
        return Err(Error::capacity(format!(
            "verify_bounds needs a full dense eigendecomposition; capped at {FULL_EIGEN_CAP}, got {n}"
        )));
    }
    if window == 0 {
        return Err(Error::validation("window size T must be at least 1"));
    }
    let full = full_eigenpairs(&graph.normalized_adjacency())?;
    let f_vals = filtered(full.eigenvalues(), window);

    // interior = (1/T Σ P^r) D^{-1}
    let p = graph.transition_matrix();
    let mut power = p.to_dense();
    let mut acc = power.clone();
    for _ in 2..=window {
        power = p.mul_dense(&power);
        acc += &power;
    }
    for j in 0..n {
        let scale = 1.0 / (window as f64 * graph.degree(j));
        for i in 0..n {
            acc[(i, j)] *= scale;
        }
    }
    let sym = (&acc + acc.transpose()) * 0.5;
    let interior_eig = SymmetricEigen::new(sym);

    let mut interior_eigenvalues: Vec<f64> = interior_eig.eigenvalues.iter().copied().collect();
    interior_eigenvalues.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut singular_values: Vec<f64> = interior_eigenvalues.iter().map(|v| v.abs()).collect();
    singular_values.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut singular_bounds: Vec<f64> = f_vals.iter().map(|v| v.abs() / graph.d_min()).collect();
    singular_bounds.sort_by(|a, b| b.partial_cmp(a).unwrap());

    let singular_ok = singular_values
        .iter()
        .zip(&singular_bounds)
        .all(|(s, bound)| *s <= bound + BOUND_SLACK);

    let rayleigh_lhs = interior_eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let rayleigh_rhs =
        f_vals.iter().cloned().fold(f64::INFINITY, f64::min) / graph.d_min();
    let rayleigh_ok = rayleigh_lhs >= rayleigh_rhs - BOUND_SLACK;

    Ok(SpectralReport {
        singular_values,
        interior_eigenvalues,
        singular_bounds,
        rayleigh_lhs,
        rayleigh_rhs,
        singular_ok,
        rayleigh_ok,
        window,
        d_min: graph.d_min(),
    })
}
