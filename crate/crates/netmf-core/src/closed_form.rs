//! The exact matrices implicitly factorized by LINE, DeepWalk, PTE, and
//! node2vec, constructed explicitly.
//!
//! All similarity matrices already fold in the negative-sampling count b as
//! a division, so the downstream shifted log needs no separate `- log b`
//! term. Logarithms are natural throughout.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::graph::{BipartiteGraph, Graph};
use crate::sparse::Csr;

/// Default cap on the vertex count for dense n×n constructions.
pub const DEFAULT_DENSE_CAP: usize = 20_000;
/// Default cap on the number of directed-edge states (2|E| for simple graphs).
pub const DEFAULT_EDGE_STATE_CAP: usize = 20_000;
/// Defaults for the edge-chain fixed-point iteration.
pub const DEFAULT_STATIONARY_TOL: f64 = 1e-12;
pub const DEFAULT_STATIONARY_MAX_ITER: usize = 200_000;

/// Which stage of the pipeline a matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Pre-log similarity values (entries ≥ 0 for exact constructions; the
    /// spectral approximation may produce negatives).
    Similarity,
    /// max(M, 1): entries ≥ 1.
    Shifted,
    /// ln(max(M, 1)): entries ≥ 0 and finite.
    LogShifted,
}

/// Model and parameters a matrix was built from; rendered into output headers.
#[derive(Debug, Clone)]
pub struct Provenance {
    pub model: String,
    pub params: Vec<(String, String)>,
}

impl Provenance {
    pub fn new(model: &str) -> Self {
        Provenance {
            model: model.to_string(),
            params: Vec::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl fmt::Display) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model={}", self.model)?;
        for (k, v) in &self.params {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// A dense closed-form matrix together with its pipeline stage and origin.
#[derive(Debug, Clone)]
pub struct ClosedFormMatrix {
    values: DMatrix<f64>,
    kind: MatrixKind,
    provenance: Provenance,
}

impl ClosedFormMatrix {
    pub fn new(values: DMatrix<f64>, kind: MatrixKind, provenance: Provenance) -> Self {
        ClosedFormMatrix {
            values,
            kind,
            provenance,
        }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }
}

/// LINE (2nd order) similarity: entry (i, j) = vol(G)·A_ij / (b·d_i·d_j).
pub fn line_matrix(graph: &Graph, b: f64) -> Result<ClosedFormMatrix> {
    line_matrix_capped(graph, b, DEFAULT_DENSE_CAP)
}

pub fn line_matrix_capped(graph: &Graph, b: f64, dense_cap: usize) -> Result<ClosedFormMatrix> {
    check_b(b)?;
    check_dense_cap(graph.n(), dense_cap)?;
    let n = graph.n();
    let vol = graph.volume();
    let deg = graph.degrees();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let (cols, vals) = graph.adjacency().row(i);
        for (&j, &a) in cols.iter().zip(vals) {
            m[(i, j)] = vol * a / (b * deg[i] * deg[j]);
        }
    }
    Ok(ClosedFormMatrix::new(
        m,
        MatrixKind::Similarity,
        Provenance::new("line").with("b", b).with("n", n),
    ))
}

/// DeepWalk similarity: M = vol(G)/(bT) · (Σ_{r=1..T} P^r) · D^{-1}.
pub fn deepwalk_matrix(graph: &Graph, window: usize, b: f64) -> Result<ClosedFormMatrix> {
    deepwalk_matrix_capped(graph, window, b, DEFAULT_DENSE_CAP)
}

pub fn deepwalk_matrix_capped(
    graph: &Graph,
    window: usize,
    b: f64,
    dense_cap: usize,
) -> Result<ClosedFormMatrix> {
    check_window(window)?;
    check_b(b)?;
    check_dense_cap(graph.n(), dense_cap)?;
    let n = graph.n();
    let p = graph.transition_matrix();
    let mut power = p.to_dense();
    let mut acc = power.clone();
    for _ in 2..=window {
        power = p.mul_dense(&power);
        acc += &power;
    }
    let vol = graph.volume();
    let deg = graph.degrees();
    let scale = vol / (b * window as f64);
    for j in 0..n {
        let col_scale = scale / deg[j];
        for i in 0..n {
            acc[(i, j)] *= col_scale;
        }
    }
    Ok(ClosedFormMatrix::new(
        acc,
        MatrixKind::Similarity,
        Provenance::new("deepwalk")
            .with("T", window)
            .with("b", b)
            .with("n", n),
    ))
}

/// Sub-network weights for the PTE joint matrix.
#[derive(Debug, Clone, Copy)]
pub struct PteWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl PteWeights {
    /// The balancing choice α·vol(G_ww) = β·vol(G_dw) = γ·vol(G_lw), with the
    /// common scalar pinned to vol(G_ww) via α = 1.
    pub fn balanced(ww: &Graph, dw: &BipartiteGraph, lw: &BipartiteGraph) -> Self {
        PteWeights {
            alpha: 1.0,
            beta: ww.volume() / dw.volume(),
            gamma: ww.volume() / lw.volume(),
        }
    }
}

/// PTE joint similarity: the vertical stack of the three normalized
/// sub-network matrices, each scaled by its weight and volume and divided by
/// b. Shape (#word + #doc + #label) × #word.
pub fn pte_matrix(
    ww: &Graph,
    dw: &BipartiteGraph,
    lw: &BipartiteGraph,
    weights: PteWeights,
    b: f64,
) -> Result<ClosedFormMatrix> {
    check_b(b)?;
    let n_word = ww.n();
    if dw.n_cols() != n_word || lw.n_cols() != n_word {
        return Err(Error::validation(format!(
            "word-count mismatch: ww has {n_word} words, dw has {} columns, lw has {} columns",
            dw.n_cols(),
            lw.n_cols()
        )));
    }
    let n_doc = dw.n_rows();
    let n_label = lw.n_rows();
    let mut m = DMatrix::<f64>::zeros(n_word + n_doc + n_label, n_word);

    let fill_block = |m: &mut DMatrix<f64>,
                      row_offset: usize,
                      adj: &Csr,
                      row_deg: &[f64],
                      col_deg: &[f64],
                      scale: f64| {
        for r in 0..adj.n_rows() {
            let (cols, vals) = adj.row(r);
            for (&c, &a) in cols.iter().zip(vals) {
                m[(row_offset + r, c)] = scale * a / (row_deg[r] * col_deg[c] * b);
            }
        }
    };

    fill_block(
        &mut m,
        0,
        ww.adjacency(),
        ww.degrees(),
        ww.degrees(),
        weights.alpha * ww.volume(),
    );
    fill_block(
        &mut m,
        n_word,
        dw.adjacency(),
        dw.row_degrees(),
        dw.col_degrees(),
        weights.beta * dw.volume(),
    );
    fill_block(
        &mut m,
        n_word + n_doc,
        lw.adjacency(),
        lw.row_degrees(),
        lw.col_degrees(),
        weights.gamma * lw.volume(),
    );

    Ok(ClosedFormMatrix::new(
        m,
        MatrixKind::Similarity,
        Provenance::new("pte")
            .with("alpha", weights.alpha)
            .with("beta", weights.beta)
            .with("gamma", weights.gamma)
            .with("b", b)
            .with("n", n_word + n_doc + n_label),
    ))
}

/// Markov chain over directed-edge states (current, previous) realizing the
/// second-order random walk with return parameter p and in-out parameter q.
///
/// States are exactly the stored positions of the adjacency CSR: position k
/// in row v with column w is the state "at v, came from w". On weighted
/// graphs the bias factors multiply the edge weight A_{v,u}.
#[derive(Debug, Clone)]
pub struct SecondOrderChain {
    p: f64,
    q: f64,
    n_vertices: usize,
    /// current vertex of each state (the CSR row of the position)
    state_current: Vec<usize>,
    /// previous vertex of each state (the CSR column of the position)
    state_prev: Vec<usize>,
    /// row-stochastic transition matrix over states
    step: Csr,
}

impl SecondOrderChain {
    pub fn new(graph: &Graph, p: f64, q: f64) -> Result<SecondOrderChain> {
        Self::new_capped(graph, p, q, DEFAULT_EDGE_STATE_CAP)
    }

    pub fn new_capped(
        graph: &Graph,
        p: f64,
        q: f64,
        state_cap: usize,
    ) -> Result<SecondOrderChain> {
        if !(p > 0.0) || !(q > 0.0) {
            return Err(Error::validation(format!(
                "second-order parameters must be positive, got p={p} q={q}"
            )));
        }
        let adj = graph.adjacency();
        let n_states = adj.nnz();
        if n_states > state_cap {
            return Err(Error::capacity(format!(
                "edge-state space has {n_states} states, exceeding the cap of {state_cap}; \
                 use the first-order (DeepWalk) closed form instead"
            )));
        }
        let mut state_current = Vec::with_capacity(n_states);
        let mut state_prev = Vec::with_capacity(n_states);
        for v in 0..graph.n() {
            for &w in adj.row(v).0 {
                state_current.push(v);
                state_prev.push(w);
            }
        }

        let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
        let mut row_buf: Vec<(usize, f64)> = Vec::new();
        for s in 0..n_states {
            let v = state_current[s];
            let prev = state_prev[s];
            row_buf.clear();
            let (cols, vals) = adj.row(v);
            let mut total = 0.0;
            for (&u, &a_vu) in cols.iter().zip(vals) {
                let bias = if u == prev {
                    1.0 / p
                } else if adj.get(prev, u) > 0.0 {
                    1.0
                } else {
                    1.0 / q
                };
                let weight = a_vu * bias;
                let target = adj
                    .position(u, v)
                    .expect("adjacency is symmetric, reverse edge exists");
                row_buf.push((target, weight));
                total += weight;
            }
            if !(total > 0.0) {
                return Err(Error::validation(format!(
                    "edge state ({v}, {prev}) has no outgoing mass"
                )));
            }
            for &(t, w) in &row_buf {
                triplets.push((s, t, w / total));
            }
        }
        let step = Csr::from_triplets(n_states, n_states, triplets);
        Ok(SecondOrderChain {
            p,
            q,
            n_vertices: graph.n(),
            state_current,
            state_prev,
            step,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_states(&self) -> usize {
        self.state_current.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// (current, previous) vertices of state `s`.
    pub fn state(&self, s: usize) -> (usize, usize) {
        (self.state_current[s], self.state_prev[s])
    }

    /// State index for the walker at `current` having arrived from `previous`.
    pub fn state_index(&self, graph: &Graph, current: usize, previous: usize) -> Option<usize> {
        graph.adjacency().position(current, previous)
    }

    pub fn step(&self) -> &Csr {
        &self.step
    }

    /// out = ψ · step for a row vector ψ over states.
    pub fn propagate(&self, psi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; psi.len()];
        for s in 0..psi.len() {
            let mass = psi[s];
            if mass == 0.0 {
                continue;
            }
            let (cols, vals) = self.step.row(s);
            for (&t, &w) in cols.iter().zip(vals) {
                out[t] += mass * w;
            }
        }
        out
    }
}

/// Stationary distribution over edge states with its fixed-point residual.
#[derive(Debug, Clone)]
pub struct EdgeDistribution {
    probabilities: Vec<f64>,
    residual: f64,
}

impl EdgeDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Σ_u X_{v,u}: the stationary probability of the walker being at `v`.
    pub fn vertex_marginals(&self, chain: &SecondOrderChain) -> Vec<f64> {
        let mut m = vec![0.0; chain.n_vertices()];
        for (s, &x) in self.probabilities.iter().enumerate() {
            m[chain.state_current[s]] += x;
        }
        m
    }
}

/// Fixed point of X = stepᵀ X by damped power iteration. The damping
/// (averaging with the previous iterate) leaves the fixed points unchanged
/// while converging on periodic chains; the reported residual is the L1 norm
/// of X − stepᵀX for the returned X.
pub fn stationary_distribution(
    chain: &SecondOrderChain,
    tol: f64,
    max_iter: usize,
) -> Result<EdgeDistribution> {
    if !(tol > 0.0) {
        return Err(Error::validation("stationary tolerance must be positive"));
    }
    let n = chain.n_states();
    let mut x = vec![1.0 / n as f64; n];
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let y = chain.propagate(&x);
        residual = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        if residual <= tol {
            return Ok(EdgeDistribution {
                probabilities: x,
                residual,
            });
        }
        let mut total = 0.0;
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = 0.5 * (*xi + *yi);
            total += *xi;
        }
        for xi in x.iter_mut() {
            *xi /= total;
        }
    }
    Err(Error::convergence(format!(
        "edge-chain stationary distribution did not reach tol={tol} within {max_iter} iterations \
         (residual {residual:.3e})"
    )))
}

/// Expected joint vertex-context frequency of the second-order walk:
/// entry (w, c) = (1/2T) Σ_{r=1..T} ( Σ_u X_{w,u}·(P^r)_{c,w,u}
///                                  + Σ_u X_{c,u}·(P^r)_{w,c,u} ).
///
/// Higher-order transitions are obtained by repeated application of the
/// edge-chain step, never by materializing the dense tensor.
pub fn node2vec_joint_expectation(
    chain: &SecondOrderChain,
    x: &EdgeDistribution,
    window: usize,
) -> DMatrix<f64> {
    let n = chain.n_vertices();
    let n_states = chain.n_states();
    let mut f_sum = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        let mut psi = vec![0.0; n_states];
        for s in 0..n_states {
            if chain.state_current[s] == v {
                psi[s] = x.probabilities[s];
            }
        }
        for _ in 1..=window {
            psi = chain.propagate(&psi);
            for (s, &mass) in psi.iter().enumerate() {
                f_sum[(v, chain.state_current[s])] += mass;
            }
        }
    }
    let sym = &f_sum + f_sum.transpose();
    sym / (2.0 * window as f64)
}

/// node2vec similarity (entrywise Table-1 closed form, 1/b folded in):
/// joint expectation divided by b · (Σ_u X_{w,u}) · (Σ_u X_{c,u}).
pub fn node2vec_matrix(
    graph: &Graph,
    p: f64,
    q: f64,
    window: usize,
    b: f64,
) -> Result<ClosedFormMatrix> {
    node2vec_matrix_capped(
        graph,
        p,
        q,
        window,
        b,
        DEFAULT_EDGE_STATE_CAP,
        DEFAULT_STATIONARY_TOL,
        DEFAULT_STATIONARY_MAX_ITER,
    )
}

#[allow(clippy::too_many_arguments)]
pub fn node2vec_matrix_capped(
    graph: &Graph,
    p: f64,
    q: f64,
    window: usize,
    b: f64,
    state_cap: usize,
    stationary_tol: f64,
    stationary_max_iter: usize,
) -> Result<ClosedFormMatrix> {
    check_window(window)?;
    check_b(b)?;
    let chain = SecondOrderChain::new_capped(graph, p, q, state_cap)?;
    let x = stationary_distribution(&chain, stationary_tol, stationary_max_iter)?;
    let joint = node2vec_joint_expectation(&chain, &x, window);
    let marginals = x.vertex_marginals(&chain);
    let n = graph.n();
    let mut m = joint;
    for c in 0..n {
        for w in 0..n {
            m[(w, c)] /= b * marginals[w] * marginals[c];
        }
    }
    Ok(ClosedFormMatrix::new(
        m,
        MatrixKind::Similarity,
        Provenance::new("node2vec")
            .with("p", p)
            .with("q", q)
            .with("T", window)
            .with("b", b)
            .with("n", n),
    ))
}

fn check_b(b: f64) -> Result<()> {
    if !(b > 0.0) {
        return Err(Error::validation(format!(
            "negative-sample count b must be positive, got {b}"
        )));
    }
    Ok(())
}

fn check_window(window: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::validation("window size T must be at least 1"));
    }
    Ok(())
}

fn check_dense_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::capacity(format!(
            "dense {n}x{n} matrix exceeds the cap of {cap} vertices; \
             use the spectral approximation (rank-h) path instead"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, IsolatedPolicy};
    use std::io::Cursor;

    fn k3() -> Graph {
        load_edge_list(Cursor::new("a b\nb c\nc a\n"), IsolatedPolicy::Reject).unwrap()
    }

    fn path3() -> Graph {
        load_edge_list(Cursor::new("1 2\n2 3\n"), IsolatedPolicy::Reject).unwrap()
    }

    #[test]
    fn line_matrix_k3() {
        let m = line_matrix(&k3(), 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.0 } else { 1.5 };
                assert!((m.values()[(i, j)] - expect).abs() < 1e-15);
            }
        }
        // b = 2 scales everything below the shift threshold
        let m2 = line_matrix(&k3(), 2.0).unwrap();
        assert!((m2.values()[(0, 1)] - 0.75).abs() < 1e-15);
    }

    #[test]
    fn line_matrix_path() {
        let m = line_matrix(&path3(), 1.0).unwrap();
        assert!((m.values()[(0, 1)] - 2.0).abs() < 1e-15); // 4/(1·2)
        assert_eq!(m.values()[(0, 2)], 0.0);
    }

    #[test]
    fn deepwalk_matrix_k3_window2() {
        let m = deepwalk_matrix(&k3(), 2, 1.0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 0.75 } else { 1.125 };
                assert!((m.values()[(i, j)] - expect).abs() < 1e-12);
            }
        }
        // symmetry of the three-factor form
        let sym_gap = (m.values() - m.values().transpose()).abs().max();
        assert!(sym_gap <= 1e-10);
    }

    #[test]
    fn deepwalk_window1_equals_line() {
        for text in ["a b\nb c\nc a\n", "1 2\n2 3\n", "a b 3\nb c 1\nc d 2\nd a 1\na c 5\n"] {
            let g = load_edge_list(Cursor::new(text), IsolatedPolicy::Reject).unwrap();
            let dw = deepwalk_matrix(&g, 1, 1.5).unwrap();
            let li = line_matrix(&g, 1.5).unwrap();
            let gap = (dw.values() - li.values()).abs().max();
            assert!(gap <= 1e-12, "gap {gap}");
        }
    }

    #[test]
    fn deepwalk_row_mass_identity() {
        // M D 1 = vol/b · 1 because each P^r is row-stochastic
        let g = k3();
        let m = deepwalk_matrix(&g, 3, 2.0).unwrap();
        let expected = g.volume() / 2.0;
        for i in 0..g.n() {
            let s: f64 = (0..g.n()).map(|j| m.values()[(i, j)] * g.degree(j)).sum();
            assert!((s - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn dense_cap_refuses() {
        let err = deepwalk_matrix_capped(&k3(), 2, 1.0, 2).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn pte_blocks() {
        use crate::graph::{load_bipartite_aligned, load_bipartite_edge_list};
        let ww = k3(); // words a, b, c
        let dw = load_bipartite_aligned(Cursor::new("d1 a\nd1 b\nd1 c\n"), ww.tokens()).unwrap();
        let lw = load_bipartite_aligned(Cursor::new("l1 a\n"), ww.tokens()).unwrap();
        let weights = PteWeights::balanced(&ww, &dw, &lw);
        assert!((weights.alpha * ww.volume() - weights.beta * dw.volume()).abs() < 1e-12);
        assert!((weights.alpha * ww.volume() - weights.gamma * lw.volume()).abs() < 1e-12);

        let m = pte_matrix(&ww, &dw, &lw, weights, 1.0).unwrap();
        assert_eq!(m.nrows(), 3 + 1 + 1);
        assert_eq!(m.ncols(), 3);
        // ww block: α·6·1/(2·2) = 1.5α
        assert!((m.values()[(0, 1)] - 1.5 * weights.alpha).abs() < 1e-12);
        // dw block: β·3·(1/3)·1 = β
        for c in 0..3 {
            assert!((m.values()[(3, c)] - weights.beta).abs() < 1e-12);
        }
        // lw block: γ·1·1·1 = γ on the linked word
        assert!((m.values()[(4, 0)] - weights.gamma).abs() < 1e-12);
        assert_eq!(m.values()[(4, 1)], 0.0);

        // column-count mismatch
        let lw_bad = load_bipartite_edge_list(Cursor::new("l1 zz\n")).unwrap();
        assert!(pte_matrix(&ww, &dw, &lw_bad, weights, 1.0).is_err());
    }

    #[test]
    fn chain_rows_stochastic_and_unbiased_case() {
        let g = k3();
        let chain = SecondOrderChain::new(&g, 1.0, 1.0).unwrap();
        assert_eq!(chain.n_states(), 6);
        for s in 0..chain.n_states() {
            let (_, vals) = chain.step().row(s);
            let total: f64 = vals.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
            for &v in vals {
                assert!((v - 0.5).abs() < 1e-12); // first-order rows on K3
            }
        }
    }

    #[test]
    fn chain_transitions_only_to_adjacent_states() {
        let g = load_edge_list(
            Cursor::new("a b\nb c\nc a\nc d\n"),
            IsolatedPolicy::Reject,
        )
        .unwrap();
        let chain = SecondOrderChain::new(&g, 0.7, 1.3).unwrap();
        for s in 0..chain.n_states() {
            let (v, _) = chain.state(s);
            let (cols, vals) = chain.step().row(s);
            assert!((vals.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for &t in cols {
                let (u, prev_of_t) = chain.state(t);
                assert_eq!(prev_of_t, v, "next state must remember the current vertex");
                assert!(g.adjacency().get(v, u) > 0.0);
            }
        }
    }

    #[test]
    fn chain_bias_hand_case() {
        // K3, p = 0.5, q = 1, state (c=2, b=1): u = 1 gets 2, u = 3 gets 1
        let g = k3();
        let chain = SecondOrderChain::new(&g, 0.5, 1.0).unwrap();
        let s = chain.state_index(&g, 1, 0).unwrap(); // at b, came from a
        let (cols, vals) = chain.step().row(s);
        let mut probs = std::collections::HashMap::new();
        for (&t, &w) in cols.iter().zip(vals) {
            probs.insert(chain.state(t).0, w);
        }
        assert!((probs[&0] - 2.0 / 3.0).abs() < 1e-12); // backtrack boosted
        assert!((probs[&2] - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn chain_large_p_suppresses_backtrack() {
        let g = path3();
        let chain = SecondOrderChain::new(&g, 1e9, 1.0).unwrap();
        let s = chain.state_index(&g, 1, 0).unwrap(); // at 2, came from 1
        let (cols, vals) = chain.step().row(s);
        for (&t, &w) in cols.iter().zip(vals) {
            let (u, _) = chain.state(t);
            if u == 2 {
                assert!(w > 1.0 - 1e-8);
            } else {
                assert!(w < 1e-8);
            }
        }
    }

    #[test]
    fn stationary_k3_uniform_and_path_quarter() {
        let g = k3();
        let chain = SecondOrderChain::new(&g, 1.0, 1.0).unwrap();
        let x = stationary_distribution(&chain, 1e-13, 10_000).unwrap();
        for &p in x.probabilities() {
            assert!((p - 1.0 / 6.0).abs() < 1e-12);
        }
        assert!(x.residual() <= 1e-13);
        let total: f64 = x.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);

        // periodic (bipartite) chain still converges under damping
        let g = path3();
        let chain = SecondOrderChain::new(&g, 1.0, 1.0).unwrap();
        let x = stationary_distribution(&chain, 1e-13, 10_000).unwrap();
        for &p in x.probabilities() {
            assert!((p - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_marginals_match_degree_law() {
        let g = load_edge_list(
            Cursor::new("a b 2\nb c\nc a\nc d 3\nd a\n"),
            IsolatedPolicy::Reject,
        )
        .unwrap();
        let chain = SecondOrderChain::new(&g, 1.0, 1.0).unwrap();
        let x = stationary_distribution(&chain, 1e-13, 50_000).unwrap();
        let marginals = x.vertex_marginals(&chain);
        for v in 0..g.n() {
            assert!(
                (marginals[v] - g.degree(v) / g.volume()).abs() < 1e-10,
                "vertex {v}"
            );
        }
    }

    #[test]
    fn node2vec_reduces_to_deepwalk_when_unbiased() {
        for (text, window) in [
            ("a b\nb c\nc a\n", 1usize),
            ("a b\nb c\nc a\n", 3),
            ("a b 3\nb c 1\nc d 2\nd a 1\na c 5\n", 2),
        ] {
            let g = load_edge_list(Cursor::new(text), IsolatedPolicy::Reject).unwrap();
            let nv = node2vec_matrix(&g, 1.0, 1.0, window, 1.0).unwrap();
            let dw = deepwalk_matrix(&g, window, 1.0).unwrap();
            let gap = (nv.values() - dw.values()).abs().max();
            assert!(gap <= 1e-8, "gap {gap} for window {window}");
        }
    }

    #[test]
    fn node2vec_k3_window1_offdiagonal() {
        let m = node2vec_matrix(&k3(), 1.0, 1.0, 1, 1.0).unwrap();
        assert!((m.values()[(0, 1)] - 1.5).abs() < 1e-9);
    }

    #[test]
    fn node2vec_state_cap() {
        let err = node2vec_matrix_capped(&k3(), 1.0, 1.0, 2, 1.0, 4, 1e-10, 1000).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn similarity_entries_nonnegative() {
        let g = load_edge_list(
            Cursor::new("a b 2\nb c\nc a\nc d 3\nd a\n"),
            IsolatedPolicy::Reject,
        )
        .unwrap();
        for m in [
            line_matrix(&g, 1.0).unwrap(),
            deepwalk_matrix(&g, 5, 2.0).unwrap(),
            node2vec_matrix(&g, 0.5, 2.0, 2, 1.0).unwrap(),
        ] {
            assert!(m.values().iter().all(|&v| v >= 0.0));
            assert_eq!(m.kind(), MatrixKind::Similarity);
        }
    }
}
