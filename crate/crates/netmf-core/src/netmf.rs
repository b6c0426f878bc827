//! The factorization pipelines: shifted log, truncated SVD (full or
//! randomized by size), the exact and spectrally-approximated embeddings,
//! and the approximation-error accounting.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::closed_form::{
    deepwalk_matrix_capped, ClosedFormMatrix, MatrixKind, Provenance, DEFAULT_DENSE_CAP,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{self, filter, EigenPairs};

/// Matrices up to this many rows use the exact dense SVD; larger ones use
/// the randomized method.
pub const FULL_SVD_THRESHOLD: usize = 3_000;
/// Randomized SVD parameters (fixed for determinism).
pub const RSVD_OVERSAMPLE: usize = 10;
pub const RSVD_POWER_ITERS: usize = 7;

/// M′ = max(M, 1), elementwise.
pub fn shifted(m: &ClosedFormMatrix) -> ClosedFormMatrix {
    let values = m.values().map(|v| v.max(1.0));
    ClosedFormMatrix::new(values, MatrixKind::Shifted, m.provenance().clone())
}

/// log M′ = ln(max(M, 1)), elementwise. Total on any real input: negative
/// entries of an approximated similarity map to 0.
pub fn shifted_log(m: &ClosedFormMatrix) -> ClosedFormMatrix {
    let values = m.values().map(|v| v.max(1.0).ln());
    ClosedFormMatrix::new(values, MatrixKind::LogShifted, m.provenance().clone())
}

/// Top-d singular triplets with σ descending and the sign convention that
/// the largest-magnitude entry of each left singular vector is positive.
#[derive(Debug, Clone)]
pub struct TruncatedSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub vt: DMatrix<f64>,
}

impl TruncatedSvd {
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (k, &s) in self.sigma.iter().enumerate() {
            for i in 0..us.nrows() {
                us[(i, k)] *= s;
            }
        }
        us * &self.vt
    }
}

fn apply_sign_convention(u: &mut DMatrix<f64>, vt: &mut DMatrix<f64>) {
    for k in 0..u.ncols() {
        let mut best = 0usize;
        let mut best_abs = 0.0f64;
        for i in 0..u.nrows() {
            let a = u[(i, k)].abs();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        if best_abs > 0.0 && u[(best, k)] < 0.0 {
            for i in 0..u.nrows() {
                u[(i, k)] = -u[(i, k)];
            }
            for j in 0..vt.ncols() {
                vt[(k, j)] = -vt[(k, j)];
            }
        }
    }
}

/// Truncated SVD with the full/randomized method chosen by size.
/// `seed` only feeds the randomized path.
pub fn truncated_svd(matrix: &DMatrix<f64>, d: usize, seed: u64) -> Result<TruncatedSvd> {
    let (nr, nc) = (matrix.nrows(), matrix.ncols());
    let max_rank = nr.min(nc);
    if d == 0 || d > max_rank {
        return Err(Error::validation(format!(
            "rank d must be in [1, {max_rank}], got {d}"
        )));
    }
    if nr.max(nc) <= FULL_SVD_THRESHOLD {
        full_truncated_svd(matrix, d)
    } else {
        randomized_svd(matrix, d, RSVD_OVERSAMPLE, RSVD_POWER_ITERS, seed)
    }
}

fn full_truncated_svd(matrix: &DMatrix<f64>, d: usize) -> Result<TruncatedSvd> {
    let svd = matrix
        .clone()
        .try_svd(true, true, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::convergence("dense SVD did not converge".to_string()))?;
    let u_full = svd.u.expect("u requested");
    let vt_full = svd.v_t.expect("v_t requested");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });
    let mut u = DMatrix::<f64>::zeros(matrix.nrows(), d);
    let mut vt = DMatrix::<f64>::zeros(d, matrix.ncols());
    let mut sigma = Vec::with_capacity(d);
    for (j, &idx) in order.iter().take(d).enumerate() {
        u.set_column(j, &u_full.column(idx));
        vt.set_row(j, &vt_full.row(idx));
        sigma.push(svd.singular_values[idx]);
    }
    apply_sign_convention(&mut u, &mut vt);
    Ok(TruncatedSvd { u, sigma, vt })
}

/// Range-finder randomized SVD (Gaussian test matrix, QR re-orthonormalized
/// power iterations).
pub fn randomized_svd(
    matrix: &DMatrix<f64>,
    d: usize,
    oversample: usize,
    power_iters: usize,
    seed: u64,
) -> Result<TruncatedSvd> {
    let (nr, nc) = (matrix.nrows(), matrix.ncols());
    let k = (d + oversample).min(nr.min(nc));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = DMatrix::<f64>::from_fn(nc, k, |_, _| StandardNormal.sample(&mut rng));
    let mut q = (matrix * omega).qr().q();
    for _ in 0..power_iters {
        q = (matrix.transpose() * &q).qr().q();
        q = (matrix * &q).qr().q();
    }
    let b = q.transpose() * matrix; // k × nc
    let small = full_truncated_svd(&b, d.min(k))?;
    let mut u = q * small.u;
    let mut vt = small.vt;
    apply_sign_convention(&mut u, &mut vt);
    Ok(TruncatedSvd {
        u,
        sigma: small.sigma,
        vt,
    })
}

/// Row-per-vertex embedding with its factorization provenance.
#[derive(Debug, Clone)]
pub struct Embedding {
    matrix: DMatrix<f64>,
    singular_values: Vec<f64>,
    provenance: Provenance,
}

impl Embedding {
    pub fn new(
        matrix: DMatrix<f64>,
        singular_values: Vec<f64>,
        provenance: Provenance,
    ) -> Result<Embedding> {
        if matrix.ncols() > matrix.nrows() {
            return Err(Error::validation(format!(
                "embedding dimension {} exceeds vertex count {}",
                matrix.ncols(),
                matrix.nrows()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("embedding contains non-finite entries"));
        }
        for w in singular_values.windows(2) {
            if w[1] > w[0] + 1e-12 {
                return Err(Error::validation(
                    "embedding columns must be ordered by descending singular value",
                ));
            }
        }
        Ok(Embedding {
            matrix,
            singular_values,
            provenance,
        })
    }

    /// U_d √Σ_d from a truncated SVD.
    pub fn from_svd(svd: &TruncatedSvd, provenance: Provenance) -> Result<Embedding> {
        let mut matrix = svd.u.clone();
        for (k, &s) in svd.sigma.iter().enumerate() {
            let root = s.max(0.0).sqrt();
            for i in 0..matrix.nrows() {
                matrix[(i, k)] *= root;
            }
        }
        Embedding::new(matrix, svd.sigma.clone(), provenance)
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// Exact pipeline (small window): factorize the log-shifted DeepWalk matrix.
pub fn netmf_exact(graph: &Graph, window: usize, b: f64, d: usize, seed: u64) -> Result<Embedding> {
    netmf_exact_capped(graph, window, b, d, seed, DEFAULT_DENSE_CAP)
}

pub fn netmf_exact_capped(
    graph: &Graph,
    window: usize,
    b: f64,
    d: usize,
    seed: u64,
    dense_cap: usize,
) -> Result<Embedding> {
    let m = deepwalk_matrix_capped(graph, window, b, dense_cap)?;
    let lg = shifted_log(&m);
    let svd = truncated_svd(lg.values(), d, seed)?;
    Embedding::from_svd(
        &svd,
        Provenance::new("netmf-exact")
            .with("T", window)
            .with("b", b)
            .with("d", d)
            .with("n", graph.n())
            .with("seed", seed),
    )
}

/// Approximate pipeline (large window): rank-h spectral approximation of the
/// similarity, then the same shift-log-SVD tail.
pub fn netmf_approx(
    graph: &Graph,
    window: usize,
    b: f64,
    h: usize,
    d: usize,
    seed: u64,
) -> Result<Embedding> {
    let pairs = top_pairs_for_approx(graph, h, seed)?;
    netmf_approx_with_pairs(graph, &pairs, window, b, d, seed)
}

/// The Lanczos stage of the approximate pipeline, exposed so callers can
/// reuse one decomposition across several windows.
pub fn top_pairs_for_approx(graph: &Graph, h: usize, seed: u64) -> Result<EigenPairs> {
    if h == 0 || h > graph.n() {
        return Err(Error::validation(format!(
            "rank h must be in [1, {}], got {h}",
            graph.n()
        )));
    }
    spectral::top_eigenpairs(
        &graph.normalized_adjacency(),
        h,
        spectral::DEFAULT_EIGEN_TOL,
        graph.n(),
        seed,
    )
}

pub fn netmf_approx_with_pairs(
    graph: &Graph,
    pairs: &EigenPairs,
    window: usize,
    b: f64,
    d: usize,
    seed: u64,
) -> Result<Embedding> {
    let m_hat = spectral::approximate_similarity(graph, pairs, window, b)?;
    let lg = shifted_log(&m_hat);
    let svd = truncated_svd(lg.values(), d, seed)?;
    Embedding::from_svd(
        &svd,
        Provenance::new("netmf-approx")
            .with("T", window)
            .with("b", b)
            .with("h", pairs.h())
            .with("d", d)
            .with("n", graph.n())
            .with("seed", seed),
    )
}

/// Frobenius-norm error accounting for a rank-h approximation.
#[derive(Debug, Clone)]
pub struct ErrorReport {
    /// ‖M − M̂‖_F
    pub err_similarity: f64,
    /// ‖M′ − M̂′‖_F
    pub err_shifted: f64,
    /// ‖log M′ − log M̂′‖_F
    pub err_log: f64,
    /// vol(G)/(b·d_min) · sqrt(Σ_excluded f(λ)²)
    pub bound: f64,
    /// err_log ≤ err_shifted ≤ err_similarity within slack.
    pub chain_holds: bool,
    /// err_similarity ≤ bound within slack.
    pub bound_holds: bool,
}

const CHAIN_SLACK: f64 = 1e-10;

/// Compare an exact similarity with its approximation through all three
/// pipeline stages and against the spectral bound computed from the
/// eigenvalues the approximation excluded.
pub fn error_report(
    m: &ClosedFormMatrix,
    m_hat: &ClosedFormMatrix,
    excluded: &[f64],
    window: usize,
    b: f64,
    graph: &Graph,
) -> Result<ErrorReport> {
    if m.nrows() != m_hat.nrows() || m.ncols() != m_hat.ncols() {
        return Err(Error::validation(format!(
            "shape mismatch: {}x{} vs {}x{}",
            m.nrows(),
            m.ncols(),
            m_hat.nrows(),
            m_hat.ncols()
        )));
    }
    let err_similarity = (m.values() - m_hat.values()).norm();
    let err_shifted = (shifted(m).values() - shifted(m_hat).values()).norm();
    let err_log = (shifted_log(m).values() - shifted_log(m_hat).values()).norm();
    let tail: f64 = excluded
        .iter()
        .map(|&l| {
            let f = filter(l, window);
            f * f
        })
        .sum();
    let bound = graph.volume() / (b * graph.d_min()) * tail.sqrt();
    let chain_holds =
        err_log <= err_shifted + CHAIN_SLACK && err_shifted <= err_similarity + CHAIN_SLACK;
    let bound_holds = err_similarity <= bound + CHAIN_SLACK;
    Ok(ErrorReport {
        err_similarity,
        err_shifted,
        err_log,
        bound,
        chain_holds,
        bound_holds,
    })
}

/// Write an embedding in the exchange format: optional `# `-prefixed header
/// lines, a `n d` size line, then one `token v1 … vd` row per vertex.
/// Values use 6-decimal fixed notation, or 17 significant digits with
/// `full_precision`.
pub fn write_embedding(
    w: &mut impl std::io::Write,
    embedding: &Embedding,
    tokens: &[String],
    full_precision: bool,
    header_lines: &[String],
) -> Result<()> {
    if tokens.len() != embedding.n() {
        return Err(Error::validation(format!(
            "{} tokens for {} embedding rows",
            tokens.len(),
            embedding.n()
        )));
    }
    for line in header_lines {
        writeln!(w, "# {line}")?;
    }
    writeln!(w, "{} {}", embedding.n(), embedding.dim())?;
    for (i, token) in tokens.iter().enumerate() {
        write!(w, "{token}")?;
        for j in 0..embedding.dim() {
            let v = embedding.matrix()[(i, j)];
            if full_precision {
                write!(w, " {v:.16e}")?;
            } else {
                write!(w, " {v:.6}")?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Read the exchange format back: (tokens, row-per-vertex matrix).
pub fn read_embedding(r: impl std::io::BufRead) -> Result<(Vec<String>, DMatrix<f64>)> {
    let mut lines = r.lines();
    let (n, d) = loop {
        let line = lines
            .next()
            .ok_or_else(|| Error::format("empty embedding file"))??;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let n = parts
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::format("bad size line in embedding file"))?;
        let d = parts
            .next()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| Error::format("bad size line in embedding file"))?;
        break (n, d);
    };
    let mut tokens = Vec::with_capacity(n);
    let mut matrix = DMatrix::<f64>::zeros(n, d);
    let mut row = 0usize;
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if row >= n {
            return Err(Error::format("embedding file has more rows than declared"));
        }
        let mut parts = trimmed.split_whitespace();
        let token = parts
            .next()
            .ok_or_else(|| Error::format("embedding row missing token"))?;
        tokens.push(token.to_string());
        for j in 0..d {
            let v = parts
                .next()
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| {
                    Error::format(format!("embedding row for \"{token}\" needs {d} values"))
                })?;
            matrix[(row, j)] = v;
        }
        if parts.next().is_some() {
            return Err(Error::format(format!(
                "embedding row for \"{token}\" has more than {d} values"
            )));
        }
        row += 1;
    }
    if row != n {
        return Err(Error::format(format!(
            "embedding file declared {n} rows but contains {row}"
        )));
    }
    Ok((tokens, matrix))
}

/// Deterministic gaussian embedding used as a classification baseline.
pub fn random_embedding(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closed_form::deepwalk_matrix;
    use nalgebra::DVector;
    use crate::graph::{load_edge_list, IsolatedPolicy};
    use crate::spectral::{full_eigenpairs, select_eigenpairs, EigenSelection};
    use std::io::Cursor;

    fn k3() -> Graph {
        load_edge_list(Cursor::new("a b\nb c\nc a\n"), IsolatedPolicy::Reject).unwrap()
    }

    #[test]
    fn shifted_log_cases() {
        let g = k3();
        let m = deepwalk_matrix(&g, 2, 1.0).unwrap();
        let lg = shifted_log(&m);
        let c = 1.125f64.ln();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.0 } else { c };
                assert!((lg.values()[(i, j)] - expect).abs() < 1e-12);
            }
        }
        assert_eq!(lg.kind(), MatrixKind::LogShifted);

        let half = ClosedFormMatrix::new(
            DMatrix::from_element(2, 2, 0.5),
            MatrixKind::Similarity,
            Provenance::new("test"),
        );
        assert!(shifted_log(&half).values().iter().all(|&v| v == 0.0));

        let neg = ClosedFormMatrix::new(
            DMatrix::from_element(2, 2, -3.0),
            MatrixKind::Similarity,
            Provenance::new("test"),
        );
        assert!(shifted_log(&neg).values().iter().all(|&v| v == 0.0));
        assert!(shifted(&neg).values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn truncated_svd_k3_spectrum_and_residual() {
        let g = k3();
        let lg = shifted_log(&deepwalk_matrix(&g, 2, 1.0).unwrap());
        let c = 1.125f64.ln();
        let svd = truncated_svd(lg.values(), 3, 0).unwrap();
        let expect = [2.0 * c, c, c];
        for (got, want) in svd.sigma.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        // d = 2 leaves exactly one sigma of residual
        let svd2 = truncated_svd(lg.values(), 2, 0).unwrap();
        let residual = (lg.values() - svd2.reconstruct()).norm();
        assert!((residual - c).abs() < 1e-10);
    }

    #[test]
    fn truncated_svd_diagonal_and_zero() {
        let diag = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, 2.0, 1.0]));
        let svd = truncated_svd(&diag, 3, 0).unwrap();
        assert!((diag.clone() - svd.reconstruct()).norm() <= 1e-12);
        assert_eq!(svd.sigma, vec![3.0, 2.0, 1.0]);

        let zero = DMatrix::<f64>::zeros(4, 4);
        let svd = truncated_svd(&zero, 2, 0).unwrap();
        assert!(svd.sigma.iter().all(|&s| s == 0.0));
        let emb = Embedding::from_svd(&svd, Provenance::new("test")).unwrap();
        assert!(emb.matrix().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn svd_residual_identity() {
        let g = crate::synth::random_connected(25, 0.3, 17).unwrap();
        let lg = shifted_log(&deepwalk_matrix(&g, 3, 1.0).unwrap());
        let full = truncated_svd(lg.values(), 25, 0).unwrap();
        for d in [2, 5, 10] {
            let part = truncated_svd(lg.values(), d, 0).unwrap();
            let residual = (lg.values() - part.reconstruct()).norm();
            let tail: f64 = full.sigma[d..].iter().map(|s| s * s).sum::<f64>().sqrt();
            assert!((residual - tail).abs() <= 1e-8, "d={d}: {residual} vs {tail}");
        }
    }

    #[test]
    fn randomized_svd_close_to_full_on_low_rank() {
        // build an exactly rank-6 matrix
        let a = random_embedding(120, 6, 3);
        let b = random_embedding(80, 6, 4);
        let m = &a * b.transpose();
        let full = full_truncated_svd(&m, 6).unwrap();
        let rand = randomized_svd(&m, 6, RSVD_OVERSAMPLE, RSVD_POWER_ITERS, 5).unwrap();
        for (s1, s2) in full.sigma.iter().zip(&rand.sigma) {
            assert!((s1 - s2).abs() < 1e-8 * s1.max(1.0));
        }
        assert!((m.clone() - rand.reconstruct()).norm() < 1e-7);
        // deterministic
        let rand2 = randomized_svd(&m, 6, RSVD_OVERSAMPLE, RSVD_POWER_ITERS, 5).unwrap();
        assert_eq!(rand.u, rand2.u);
    }

    #[test]
    fn netmf_exact_k3_symmetry_properties() {
        // d = 3 keeps the tied singular pair whole, so the row symmetry of
        // the vertex-transitive graph survives factorization; a d = 2 cut
        // would split the tied pair along an arbitrary basis vector.
        let emb = netmf_exact(&k3(), 2, 1.0, 3, 42).unwrap();
        assert_eq!(emb.n(), 3);
        assert_eq!(emb.dim(), 3);
        // vertex-transitive graph: equal row norms, equal pairwise dots
        let rows: Vec<_> = (0..3).map(|i| emb.matrix().row(i).clone_owned()).collect();
        let n0 = rows[0].norm();
        for r in &rows {
            assert!((r.norm() - n0).abs() < 1e-9);
        }
        let d01 = rows[0].dot(&rows[1]);
        let d02 = rows[0].dot(&rows[2]);
        let d12 = rows[1].dot(&rows[2]);
        assert!((d01 - d02).abs() < 1e-9 && (d01 - d12).abs() < 1e-9);
    }

    #[test]
    fn netmf_approx_full_rank_matches_exact_gram_on_k3() {
        // K3 has a tied singular pair, so compare Gram matrices, which are
        // invariant to rotations inside the tied subspace.
        let g = k3();
        let exact = netmf_exact(&g, 2, 1.0, 3, 42).unwrap();
        let approx = netmf_approx(&g, 2, 1.0, 3, 3, 42).unwrap();
        let gram_e = exact.matrix() * exact.matrix().transpose();
        let gram_a = approx.matrix() * approx.matrix().transpose();
        assert!((gram_e - gram_a).abs().max() <= 1e-6);
    }

    #[test]
    fn netmf_approx_full_rank_matches_exact_on_irregular_graph() {
        let g = crate::synth::random_connected(28, 0.2, 23).unwrap();
        let d = 6;
        let exact = netmf_exact(&g, 3, 1.0, d, 42).unwrap();
        let approx = netmf_approx(&g, 3, 1.0, g.n(), d, 42).unwrap();
        let gap = (exact.matrix() - approx.matrix()).abs().max();
        assert!(gap <= 1e-6, "gap {gap}");
    }

    #[test]
    fn netmf_approx_rank1_k3_zero_embedding() {
        // M̂ = J up to roundoff; the shift maps it to ~0 and the square root
        // of the residual singular values sets the 1e-7 floor
        let emb = netmf_approx(&k3(), 2, 1.0, 1, 2, 42).unwrap();
        assert!(emb.matrix().iter().all(|&v| v.abs() < 1e-7));
    }

    #[test]
    fn permutation_equivariance() {
        // isomorphic graphs embed identically up to the relabeling
        let g = crate::synth::random_connected(15, 0.3, 31).unwrap();
        let perm: Vec<usize> = (0..15).map(|i| (i * 7 + 3) % 15).collect();
        let mut edges = Vec::new();
        for i in 0..15 {
            let (cols, vals) = g.adjacency().row(i);
            for (&j, &w) in cols.iter().zip(vals) {
                if j >= i {
                    edges.push((perm[i], perm[j], w));
                }
            }
        }
        let tokens: Vec<String> = (0..15).map(|i| format!("p{i}")).collect();
        let gp = Graph::from_edges(tokens, &edges, IsolatedPolicy::Reject).unwrap();

        let e1 = netmf_exact(&g, 3, 1.0, 4, 42).unwrap();
        let e2 = netmf_exact(&gp, 3, 1.0, 4, 42).unwrap();
        let gram1 = e1.matrix() * e1.matrix().transpose();
        let gram2 = e2.matrix() * e2.matrix().transpose();
        for i in 0..15 {
            for j in 0..15 {
                assert!(
                    (gram1[(i, j)] - gram2[(perm[i], perm[j])]).abs() < 1e-8,
                    "({i},{j})"
                );
            }
        }
    }

    #[test]
    fn error_report_k3_tight() {
        let g = k3();
        let window = 2;
        let m = deepwalk_matrix(&g, window, 1.0).unwrap();
        let full = full_eigenpairs(&g.normalized_adjacency()).unwrap();
        let (kept, excluded) = select_eigenpairs(&full, 1, EigenSelection::FilterMagnitude, window);
        let m_hat = crate::spectral::approximate_similarity(&g, &kept, window, 1.0).unwrap();
        let report = error_report(&m, &m_hat, &excluded, window, 1.0, &g).unwrap();
        let expect = 0.5303300858899107;
        assert!((report.err_similarity - expect).abs() < 1e-6);
        assert!((report.bound - expect).abs() < 1e-6);
        assert!(report.chain_holds);
        assert!(report.bound_holds);
    }

    #[test]
    fn error_report_full_rank_is_zero() {
        let g = crate::synth::random_connected(20, 0.25, 41).unwrap();
        let window = 5;
        let m = deepwalk_matrix(&g, window, 1.0).unwrap();
        let full = full_eigenpairs(&g.normalized_adjacency()).unwrap();
        let (kept, excluded) =
            select_eigenpairs(&full, g.n(), EigenSelection::FilterMagnitude, window);
        let m_hat = crate::spectral::approximate_similarity(&g, &kept, window, 1.0).unwrap();
        let report = error_report(&m, &m_hat, &excluded, window, 1.0, &g).unwrap();
        assert!(report.bound <= 1e-12);
        assert!(report.err_similarity <= 1e-8);
        assert!(report.err_log <= 1e-8);
    }

    #[test]
    fn error_chain_on_random_graph() {
        let g = crate::synth::random_connected(50, 0.2, 77).unwrap();
        let window = 10;
        let m = deepwalk_matrix(&g, window, 1.0).unwrap();
        let full = full_eigenpairs(&g.normalized_adjacency()).unwrap();
        let (kept, excluded) = select_eigenpairs(&full, 25, EigenSelection::FilterMagnitude, window);
        let m_hat = crate::spectral::approximate_similarity(&g, &kept, window, 1.0).unwrap();
        let report = error_report(&m, &m_hat, &excluded, window, 1.0, &g).unwrap();
        assert!(report.chain_holds);
        assert!(report.bound_holds);
    }

    #[test]
    fn embedding_round_trip_through_file() {
        let g = crate::synth::random_connected(12, 0.4, 2).unwrap();
        let emb = netmf_exact(&g, 2, 1.0, 4, 42).unwrap();
        let tokens: Vec<String> = g.tokens().to_vec();
        let mut buf = Vec::new();
        write_embedding(&mut buf, &emb, &tokens, true, &["header".to_string()]).unwrap();
        let (tokens2, matrix) = read_embedding(Cursor::new(buf)).unwrap();
        assert_eq!(tokens, tokens2);
        assert!((emb.matrix() - matrix).abs().max() < 1e-15);
    }
}
