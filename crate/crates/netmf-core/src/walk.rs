//! Monte-Carlo side of the closed forms: first- and second-order walk
//! corpora, the empirical SGNS matrix, and distance reports against the
//! expected limits.
//!
//! Every walk draws from its own counter-based stream (ChaCha8 keyed by the
//! master seed, stream = walk index), so corpora are reproducible and
//! independent of how walks are scheduled across threads. Counts are u64 and
//! merged by addition, which commutes exactly.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::closed_form::{
    self, deepwalk_matrix, node2vec_joint_expectation, node2vec_matrix, SecondOrderChain,
    DEFAULT_STATIONARY_MAX_ITER, DEFAULT_STATIONARY_TOL,
};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::netmf::shifted_log;
use crate::sparse::Csr;

/// Distribution of a walk's first vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkStart {
    /// P(w) = d_w / vol(G): the walk is stationary from step one.
    Stationary,
    /// Uniform over vertices; the limits are unchanged on a connected
    /// non-bipartite graph.
    Uniform,
}

/// Corpus generation parameters.
#[derive(Debug, Clone, Copy)]
pub struct WalkParams {
    /// Number of walks N.
    pub walks: usize,
    /// Walk length L.
    pub length: usize,
    /// Window size T.
    pub window: usize,
    pub seed: u64,
    pub start: WalkStart,
}

type Pair = (u32, u32);
type PairCounts = HashMap<Pair, u64>;

/// Counted vertex-context multiset from first-order walks, with the
/// per-offset sub-multisets.
#[derive(Debug, Clone)]
pub struct WalkCorpus {
    n: usize,
    total: u64,
    joint: PairCounts,
    forward: Vec<PairCounts>,
    backward: Vec<PairCounts>,
    params: WalkParams,
}

/// Counted (vertex, context, previous) triplets from second-order walks.
#[derive(Debug, Clone)]
pub struct TripletCorpus {
    n: usize,
    total: u64,
    triplets: HashMap<(u32, u32, u32), u64>,
    joint: PairCounts,
    params: WalkParams,
    p: f64,
    q: f64,
}

/// Shared view over the pair counts of either corpus type.
pub trait PairCorpus {
    fn n(&self) -> usize;
    /// |D|
    fn total(&self) -> u64;
    fn joint(&self) -> &PairCounts;

    /// #(w): occurrences of w as the vertex of a pair.
    fn word_marginals(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.n()];
        for (&(w, _), &c) in self.joint() {
            m[w as usize] += c;
        }
        m
    }

    /// #(c): occurrences of c as the context of a pair.
    fn context_marginals(&self) -> Vec<u64> {
        let mut m = vec![0u64; self.n()];
        for (&(_, c), &count) in self.joint() {
            m[c as usize] += count;
        }
        m
    }
}

impl PairCorpus for WalkCorpus {
    fn n(&self) -> usize {
        self.n
    }
    fn total(&self) -> u64 {
        self.total
    }
    fn joint(&self) -> &PairCounts {
        &self.joint
    }
}

impl PairCorpus for TripletCorpus {
    fn n(&self) -> usize {
        self.n
    }
    fn total(&self) -> u64 {
        self.total
    }
    fn joint(&self) -> &PairCounts {
        &self.joint
    }
}

impl WalkCorpus {
    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    /// #(w,c) in the sub-multiset where the context sits r steps after the
    /// vertex (r is 1-based).
    pub fn forward_counts(&self, r: usize) -> &PairCounts {
        &self.forward[r - 1]
    }

    pub fn backward_counts(&self, r: usize) -> &PairCounts {
        &self.backward[r - 1]
    }

    /// |D_r→| = |D_r←| = N·(L−T).
    pub fn per_offset_total(&self) -> u64 {
        (self.params.walks * (self.params.length - self.params.window)) as u64
    }
}

impl TripletCorpus {
    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn triplet_counts(&self) -> &HashMap<(u32, u32, u32), u64> {
        &self.triplets
    }
}

/// Cumulative-weight tables for O(log deg) sampling along CSR rows.
struct RowSampler {
    indptr: Vec<usize>,
    indices: Vec<usize>,
    cumulative: Vec<f64>,
}

impl RowSampler {
    fn new(m: &Csr) -> RowSampler {
        let indptr = m.indptr().to_vec();
        let indices = m.indices().to_vec();
        let mut cumulative = vec![0.0; m.nnz()];
        for i in 0..m.n_rows() {
            let mut acc = 0.0;
            for k in indptr[i]..indptr[i + 1] {
                acc += m.values()[k];
                cumulative[k] = acc;
            }
        }
        RowSampler {
            indptr,
            indices,
            cumulative,
        }
    }

    /// Sample a column of row `i` proportionally to its weights.
    fn sample(&self, i: usize, rng: &mut ChaCha8Rng) -> usize {
        let (s, e) = (self.indptr[i], self.indptr[i + 1]);
        debug_assert!(e > s, "row {i} has no mass");
        let total = self.cumulative[e - 1];
        let x = rng.random::<f64>() * total;
        let slice = &self.cumulative[s..e];
        let k = s + slice.partition_point(|&c| c <= x).min(e - s - 1);
        self.indices[k]
    }
}

fn cumulative_sampler(weights: &[f64]) -> Vec<f64> {
    let mut cum = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for &w in weights {
        acc += w;
        cum.push(acc);
    }
    cum
}

fn sample_cumulative(cum: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cum.last().unwrap();
    let x = rng.random::<f64>() * total;
    cum.partition_point(|&c| c <= x).min(cum.len() - 1)
}

fn walk_rng(seed: u64, walk_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walk_index);
    rng
}

fn merge_counts<K: std::hash::Hash + Eq>(into: &mut HashMap<K, u64>, from: HashMap<K, u64>) {
    for (k, v) in from {
        *into.entry(k).or_insert(0) += v;
    }
}

fn check_walk_params(graph: &Graph, params: &WalkParams, min_length_gap: usize) -> Result<()> {
    if params.window == 0 {
        return Err(Error::validation("window size T must be at least 1"));
    }
    if params.length < params.window + min_length_gap {
        return Err(Error::validation(format!(
            "walk length {} too short for window {} (need L ≥ T + {min_length_gap})",
            params.length, params.window
        )));
    }
    if params.walks == 0 {
        return Err(Error::validation("need at least one walk"));
    }
    if !graph.is_connected() {
        return Err(Error::validation(
            "walk corpora require a connected graph (take the largest component first)",
        ));
    }
    Ok(())
}

/// Generate a first-order walk corpus: N walks of length L; for every
/// position j ≤ L−T and offset r ≤ T the pairs (w_j, w_{j+r}) and
/// (w_{j+r}, w_j) are added, so |D| = 2·N·T·(L−T).
pub fn deepwalk_corpus(graph: &Graph, params: WalkParams) -> Result<WalkCorpus> {
    check_walk_params(graph, &params, 1)?;
    let n = graph.n();
    let sampler = RowSampler::new(graph.adjacency());
    let degree_cum = cumulative_sampler(graph.degrees());
    let t = params.window;
    let l = params.length;

    struct Local {
        joint: PairCounts,
        forward: Vec<PairCounts>,
        backward: Vec<PairCounts>,
        total: u64,
    }

    let merged = (0..params.walks)
        .into_par_iter()
        .fold(
            || Local {
                joint: HashMap::new(),
                forward: vec![HashMap::new(); t],
                backward: vec![HashMap::new(); t],
                total: 0,
            },
            |mut local, w_idx| {
                let mut rng = walk_rng(params.seed, w_idx as u64);
                let mut walk = Vec::with_capacity(l);
                let start = match params.start {
                    WalkStart::Stationary => sample_cumulative(&degree_cum, &mut rng),
                    WalkStart::Uniform => rng.random_range(0..n),
                };
                walk.push(start as u32);
                let mut cur = start;
                for _ in 1..l {
                    cur = sampler.sample(cur, &mut rng);
                    walk.push(cur as u32);
                }
                for j in 0..(l - t) {
                    for r in 1..=t {
                        let a = walk[j];
                        let b = walk[j + r];
                        *local.forward[r - 1].entry((a, b)).or_insert(0) += 1;
                        *local.backward[r - 1].entry((b, a)).or_insert(0) += 1;
                        *local.joint.entry((a, b)).or_insert(0) += 1;
                        *local.joint.entry((b, a)).or_insert(0) += 1;
                        local.total += 2;
                    }
                }
                local
            },
        )
        .reduce(
            || Local {
                joint: HashMap::new(),
                forward: vec![HashMap::new(); t],
                backward: vec![HashMap::new(); t],
                total: 0,
            },
            |mut a, b| {
                merge_counts(&mut a.joint, b.joint);
                for (af, bf) in a.forward.iter_mut().zip(b.forward) {
                    merge_counts(af, bf);
                }
                for (ab, bb) in a.backward.iter_mut().zip(b.backward) {
                    merge_counts(ab, bb);
                }
                a.total += b.total;
                a
            },
        );

    debug_assert_eq!(
        merged.total,
        (2 * params.walks * t * (l - t)) as u64,
        "loop-count identity"
    );
    Ok(WalkCorpus {
        n,
        total: merged.total,
        joint: merged.joint,
        forward: merged.forward,
        backward: merged.backward,
        params,
    })
}

/// Generate a second-order walk corpus per the node2vec recording scheme:
/// the first two vertices are one draw from the edge-chain stationary
/// distribution, and for every j in [2, L−T] (1-based) and offset r the
/// triplets (w_j, w_{j+r}, w_{j−1}) and (w_{j+r}, w_j, w_{j−1}) are added,
/// so |D| = 2·N·T·(L−T−1).
pub fn node2vec_corpus(
    graph: &Graph,
    p: f64,
    q: f64,
    params: WalkParams,
) -> Result<TripletCorpus> {
    check_walk_params(graph, &params, 2)?;
    let chain = SecondOrderChain::new(graph, p, q)?;
    let x = closed_form::stationary_distribution(
        &chain,
        DEFAULT_STATIONARY_TOL,
        DEFAULT_STATIONARY_MAX_ITER,
    )?;
    let n = graph.n();
    let state_cum = cumulative_sampler(x.probabilities());
    let step_sampler = RowSampler::new(chain.step());
    let t = params.window;
    let l = params.length;

    struct Local {
        triplets: HashMap<(u32, u32, u32), u64>,
        joint: PairCounts,
        total: u64,
    }

    let merged = (0..params.walks)
        .into_par_iter()
        .fold(
            || Local {
                triplets: HashMap::new(),
                joint: HashMap::new(),
                total: 0,
            },
            |mut local, w_idx| {
                let mut rng = walk_rng(params.seed, w_idx as u64);
                let mut walk = Vec::with_capacity(l);
                let mut state = sample_cumulative(&state_cum, &mut rng);
                let (w2, w1) = chain.state(state);
                walk.push(w1 as u32);
                walk.push(w2 as u32);
                for _ in 2..l {
                    state = step_sampler.sample(state, &mut rng);
                    walk.push(chain.state(state).0 as u32);
                }
                // j is 1-based in the recording scheme; walk is 0-based
                for j in 1..(l - t) {
                    let w = walk[j];
                    let u = walk[j - 1];
                    for r in 1..=t {
                        let c = walk[j + r];
                        *local.triplets.entry((w, c, u)).or_insert(0) += 1;
                        *local.triplets.entry((c, w, u)).or_insert(0) += 1;
                        *local.joint.entry((w, c)).or_insert(0) += 1;
                        *local.joint.entry((c, w)).or_insert(0) += 1;
                        local.total += 2;
                    }
                }
                local
            },
        )
        .reduce(
            || Local {
                triplets: HashMap::new(),
                joint: HashMap::new(),
                total: 0,
            },
            |mut a, b| {
                merge_counts(&mut a.triplets, b.triplets);
                merge_counts(&mut a.joint, b.joint);
                a.total += b.total;
                a
            },
        );

    debug_assert_eq!(merged.total, (2 * params.walks * t * (l - t - 1)) as u64);
    Ok(TripletCorpus {
        n,
        total: merged.total,
        triplets: merged.triplets,
        joint: merged.joint,
        params,
        p,
        q,
    })
}

/// Empirical SGNS matrix: entry (w, c) = ln(max(#(w,c)·|D| / (b·#(w)·#(c)), 1)),
/// 0 where #(w,c) = 0. The shift convention matches the closed-form
/// pipeline's shifted log.
pub fn empirical_sgns_matrix(corpus: &impl PairCorpus, b: f64) -> Result<DMatrix<f64>> {
    if corpus.total() == 0 {
        return Err(Error::validation("corpus is empty"));
    }
    if !(b > 0.0) {
        return Err(Error::validation("negative-sample count b must be positive"));
    }
    let n = corpus.n();
    let word = corpus.word_marginals();
    let ctx = corpus.context_marginals();
    let total = corpus.total() as f64;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for (&(w, c), &count) in corpus.joint() {
        let (wi, ci) = (w as usize, c as usize);
        let ratio = (count as f64) * total / (b * (word[wi] as f64) * (ctx[ci] as f64));
        m[(wi, ci)] = ratio.max(1.0).ln();
    }
    Ok(m)
}

/// Distances between a corpus and its expected limits.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// L1 distance per offset r between #(w,c)_r→/|D_r→| and
    /// (d_w/vol)(P^r)_{w,c}; empty for triplet corpora.
    pub per_offset_forward: Vec<f64>,
    /// Mirrored version against (d_c/vol)(P^r)_{c,w}.
    pub per_offset_backward: Vec<f64>,
    /// L1 distance between the empirical joint and its limit.
    pub joint_l1: f64,
    pub joint_max_abs: f64,
    /// L1 distance between #(w)/|D| and the stationary vertex law.
    pub marginal_l1: f64,
    /// Max |empirical SGNS − closed-form log-shifted| over entries where the
    /// closed form is positive.
    pub pmi_max_abs: f64,
}

fn l1_against_dense(counts: &PairCounts, denom: f64, theory: &DMatrix<f64>) -> (f64, f64) {
    let n = theory.nrows();
    let mut l1 = 0.0;
    let mut max_abs = 0.0f64;
    for w in 0..n {
        for c in 0..n {
            let emp = counts
                .get(&(w as u32, c as u32))
                .map(|&v| v as f64 / denom)
                .unwrap_or(0.0);
            let d = (emp - theory[(w, c)]).abs();
            l1 += d;
            max_abs = max_abs.max(d);
        }
    }
    (l1, max_abs)
}

/// The expected joint of the first-order corpus:
/// (1/2T) Σ_r ( (d_w/vol)(P^r)_{w,c} + (d_c/vol)(P^r)_{c,w} ).
pub fn deepwalk_joint_expectation(graph: &Graph, window: usize) -> DMatrix<f64> {
    let n = graph.n();
    let p = graph.transition_matrix();
    let mut power = p.to_dense();
    let mut theory = DMatrix::<f64>::zeros(n, n);
    let vol = graph.volume();
    for r in 1..=window {
        if r > 1 {
            power = p.mul_dense(&power);
        }
        for w in 0..n {
            let pw = graph.degree(w) / vol;
            for c in 0..n {
                let pc = graph.degree(c) / vol;
                theory[(w, c)] += pw * power[(w, c)] + pc * power[(c, w)];
            }
        }
    }
    theory / (2.0 * window as f64)
}

/// Compare a first-order corpus with its limits (per-offset, joint,
/// marginal, and log-shifted PMI against the closed form).
pub fn deepwalk_convergence_report(
    corpus: &WalkCorpus,
    graph: &Graph,
    b: f64,
) -> Result<ConvergenceReport> {
    if corpus.n != graph.n() {
        return Err(Error::validation(
            "corpus and graph have different vertex counts",
        ));
    }
    let n = graph.n();
    let window = corpus.params.window;
    let vol = graph.volume();
    let p = graph.transition_matrix();

    let mut per_offset_forward = Vec::with_capacity(window);
    let mut per_offset_backward = Vec::with_capacity(window);
    let denom = corpus.per_offset_total() as f64;
    let mut power = p.to_dense();
    for r in 1..=window {
        if r > 1 {
            power = p.mul_dense(&power);
        }
        let mut fwd = DMatrix::<f64>::zeros(n, n);
        let mut bwd = DMatrix::<f64>::zeros(n, n);
        for w in 0..n {
            for c in 0..n {
                fwd[(w, c)] = graph.degree(w) / vol * power[(w, c)];
                bwd[(w, c)] = graph.degree(c) / vol * power[(c, w)];
            }
        }
        per_offset_forward.push(l1_against_dense(corpus.forward_counts(r), denom, &fwd).0);
        per_offset_backward.push(l1_against_dense(corpus.backward_counts(r), denom, &bwd).0);
    }

    let theory_joint = deepwalk_joint_expectation(graph, window);
    let (joint_l1, joint_max_abs) =
        l1_against_dense(&corpus.joint, corpus.total as f64, &theory_joint);

    let word = corpus.word_marginals();
    let marginal_l1: f64 = (0..n)
        .map(|w| (word[w] as f64 / corpus.total as f64 - graph.degree(w) / vol).abs())
        .sum();

    let closed = shifted_log(&deepwalk_matrix(graph, window, b)?);
    let empirical = empirical_sgns_matrix(corpus, b)?;
    let mut pmi_max_abs = 0.0f64;
    for w in 0..n {
        for c in 0..n {
            if closed.values()[(w, c)] > 0.0 {
                pmi_max_abs = pmi_max_abs.max((empirical[(w, c)] - closed.values()[(w, c)]).abs());
            }
        }
    }

    Ok(ConvergenceReport {
        per_offset_forward,
        per_offset_backward,
        joint_l1,
        joint_max_abs,
        marginal_l1,
        pmi_max_abs,
    })
}

/// Compare a second-order corpus with its limits: the joint against the
/// stationary joint expectation, marginals against Σ_u X_{w,u}, and the
/// empirical SGNS matrix against the node2vec closed form.
pub fn node2vec_convergence_report(
    corpus: &TripletCorpus,
    graph: &Graph,
    b: f64,
) -> Result<ConvergenceReport> {
    if corpus.n != graph.n() {
        return Err(Error::validation(
            "corpus and graph have different vertex counts",
        ));
    }
    let n = graph.n();
    let window = corpus.params.window;
    let chain = SecondOrderChain::new(graph, corpus.p, corpus.q)?;
    let x = closed_form::stationary_distribution(
        &chain,
        DEFAULT_STATIONARY_TOL,
        DEFAULT_STATIONARY_MAX_ITER,
    )?;
    let theory_joint = node2vec_joint_expectation(&chain, &x, window);
    let (joint_l1, joint_max_abs) =
        l1_against_dense(&corpus.joint, corpus.total as f64, &theory_joint);

    let marginals = x.vertex_marginals(&chain);
    let word = corpus.word_marginals();
    let marginal_l1: f64 = (0..n)
        .map(|w| (word[w] as f64 / corpus.total as f64 - marginals[w]).abs())
        .sum();

    let closed = shifted_log(&node2vec_matrix(graph, corpus.p, corpus.q, window, b)?);
    let empirical = empirical_sgns_matrix(corpus, b)?;
    let mut pmi_max_abs = 0.0f64;
    for w in 0..n {
        for c in 0..n {
            if closed.values()[(w, c)] > 0.0 {
                pmi_max_abs = pmi_max_abs.max((empirical[(w, c)] - closed.values()[(w, c)]).abs());
            }
        }
    }

    Ok(ConvergenceReport {
        per_offset_forward: Vec::new(),
        per_offset_backward: Vec::new(),
        joint_l1,
        joint_max_abs,
        marginal_l1,
        pmi_max_abs,
    })
}
