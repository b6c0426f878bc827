//! Undirected weighted graphs in CSR form, plus bipartite graphs and label
//! sets for the text-network and classification pipelines.
//!
//! Degrees follow the generalized definition d_i = Σ_j A_ij, so a self-loop's
//! weight is counted once in its row sum. Vertices are indexed in
//! first-appearance order of their tokens, which keeps loading deterministic
//! without a sort.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::sparse::Csr;

/// What to do with vertices that end up with zero degree at load time.
/// The closed forms all need D^{-1}, so the default is to reject them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IsolatedPolicy {
    Reject,
    Drop,
}

/// Immutable undirected weighted graph.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    tokens: Vec<String>,
    token_index: HashMap<String, usize>,
    adjacency: Csr,
    degrees: Vec<f64>,
    volume: f64,
    d_min: f64,
}

impl Graph {
    /// Build from undirected weighted edges over `n` vertices with the given
    /// tokens. Duplicate edges (either orientation) sum their weights.
    pub fn from_edges(
        tokens: Vec<String>,
        edges: &[(usize, usize, f64)],
        policy: IsolatedPolicy,
    ) -> Result<Graph> {
        let n = tokens.len();
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(a, b, w) in edges {
            if a >= n || b >= n {
                return Err(Error::validation(format!(
                    "edge ({a}, {b}) out of range for {n} vertices"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::format(format!("negative or non-finite weight {w}")));
            }
            let key = (a.min(b), a.max(b));
            *acc.entry(key).or_insert(0.0) += w;
        }
        acc.retain(|_, w| *w > 0.0);

        let mut incident = vec![false; n];
        for (&(a, b), _) in &acc {
            incident[a] = true;
            incident[b] = true;
        }
        let keep: Vec<usize> = match policy {
            IsolatedPolicy::Reject => {
                if let Some(v) = (0..n).find(|&v| !incident[v]) {
                    return Err(Error::validation(format!(
                        "isolated vertex \"{}\" (policy: reject)",
                        tokens[v]
                    )));
                }
                (0..n).collect()
            }
            IsolatedPolicy::Drop => (0..n).filter(|&v| incident[v]).collect(),
        };
        if keep.is_empty() {
            return Err(Error::validation("graph has no edges".to_string()));
        }
        let mut remap = vec![usize::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let kept_tokens: Vec<String> = keep.iter().map(|&v| tokens[v].clone()).collect();

        let mut triplets = Vec::with_capacity(2 * acc.len());
        for (&(a, b), &w) in &acc {
            let (a, b) = (remap[a], remap[b]);
            triplets.push((a, b, w));
            if a != b {
                triplets.push((b, a, w));
            }
        }
        let adjacency = Csr::from_triplets(kept_tokens.len(), kept_tokens.len(), triplets);
        Graph::from_parts(kept_tokens, adjacency)
    }

    fn from_parts(tokens: Vec<String>, adjacency: Csr) -> Result<Graph> {
        let n = tokens.len();
        let degrees = adjacency.row_sums();
        if let Some(v) = degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::validation(format!(
                "vertex \"{}\" has zero degree",
                tokens[v]
            )));
        }
        let volume: f64 = degrees.iter().sum();
        let d_min = degrees.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut token_index = HashMap::with_capacity(n);
        for (i, t) in tokens.iter().enumerate() {
            if token_index.insert(t.clone(), i).is_some() {
                return Err(Error::validation(format!("duplicate token \"{t}\"")));
            }
        }
        Ok(Graph {
            n,
            tokens,
            token_index,
            adjacency,
            degrees,
            volume,
            d_min,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &Csr {
        &self.adjacency
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    /// vol(G) = Σ_i d_i.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn d_min(&self) -> f64 {
        self.d_min
    }

    pub fn token(&self, v: usize) -> &str {
        &self.tokens[v]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.token_index.get(token).copied()
    }

    pub fn edge_count(&self) -> usize {
        let loops = (0..self.n)
            .filter(|&v| self.adjacency.get(v, v) > 0.0)
            .count();
        (self.adjacency.nnz() - loops) / 2 + loops
    }

    /// P = D^{-1} A, row-stochastic.
    pub fn transition_matrix(&self) -> Csr {
        self.adjacency.map_values(|i, _, v| v / self.degrees[i])
    }

    /// S = D^{-1/2} A D^{-1/2}, symmetric with spectrum in [-1, 1].
    pub fn normalized_adjacency(&self) -> Csr {
        self.adjacency
            .map_values(|i, j, v| v / (self.degrees[i] * self.degrees[j]).sqrt())
    }

    /// Vertex sets of the connected components, in order of their smallest
    /// contained vertex index.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut comps = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                comp.push(v);
                for &u in self.adjacency.row(v).0 {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Two-colorability check; any self-loop makes the graph non-bipartite.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n];
        for start in 0..self.n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &u in self.adjacency.row(v).0 {
                    if u == v {
                        return false;
                    }
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        stack.push(u);
                    } else if color[u] == color[v] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Induced subgraph on the largest component (ties broken by the
    /// component containing the smallest original index), re-indexed in
    /// ascending original order with tokens preserved.
    pub fn largest_connected_component(&self) -> Graph {
        let comps = self.components();
        let best = comps
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
            .map(|(_, c)| c)
            .expect("graph has at least one vertex");
        self.induced_subgraph(best)
    }

    /// Induced subgraph on `vertices` (ascending original order defines the
    /// new indices).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Graph {
        let mut keep = vertices.to_vec();
        keep.sort_unstable();
        let mut remap = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            remap[old] = new;
        }
        let tokens: Vec<String> = keep.iter().map(|&v| self.tokens[v].clone()).collect();
        let mut triplets = Vec::new();
        for &v in &keep {
            let (cols, vals) = self.adjacency.row(v);
            for (&u, &w) in cols.iter().zip(vals) {
                if remap[u] != usize::MAX {
                    triplets.push((remap[v], remap[u], w));
                }
            }
        }
        let adjacency = Csr::from_triplets(tokens.len(), tokens.len(), triplets);
        Graph::from_parts(tokens, adjacency).expect("induced subgraph keeps positive degrees")
    }

    /// Write edges as `src dst weight`, one undirected edge per line
    /// (self-loops once). Weights use shortest round-trip formatting.
    pub fn dump_edge_list(&self, w: &mut impl Write) -> Result<()> {
        for i in 0..self.n {
            let (cols, vals) = self.adjacency.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                if j >= i {
                    writeln!(w, "{} {} {}", self.tokens[i], self.tokens[j], v)?;
                }
            }
        }
        Ok(())
    }

    /// Vocab sidecar: `index<TAB>token` per line.
    pub fn dump_vocab(&self, w: &mut impl Write) -> Result<()> {
        for (i, t) in self.tokens.iter().enumerate() {
            writeln!(w, "{i}\t{t}")?;
        }
        Ok(())
    }
}

struct EdgeLines {
    tokens: Vec<String>,
    edges: Vec<(usize, usize, f64)>,
}

fn parse_edge_lines(reader: impl BufRead, mut preset: Vec<String>) -> Result<EdgeLines> {
    let mut token_index: HashMap<String, usize> = HashMap::new();
    for (i, t) in preset.iter().enumerate() {
        token_index.insert(t.clone(), i);
    }
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() > 3 {
            return Err(Error::format(format!(
                "line {}: expected `src dst [weight]`, got {} fields",
                lineno + 1,
                fields.len()
            )));
        }
        if fields.len() < 2 {
            return Err(Error::format(format!(
                "line {}: expected `src dst [weight]`",
                lineno + 1
            )));
        }
        let weight = if fields.len() == 3 {
            fields[2].parse::<f64>().map_err(|_| {
                Error::format(format!("line {}: bad weight \"{}\"", lineno + 1, fields[2]))
            })?
        } else {
            1.0
        };
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::format(format!(
                "line {}: negative or non-finite weight {weight}",
                lineno + 1
            )));
        }
        let mut intern = |tok: &str| -> usize {
            if let Some(&i) = token_index.get(tok) {
                i
            } else {
                let i = preset.len();
                preset.push(tok.to_string());
                token_index.insert(tok.to_string(), i);
                i
            }
        };
        let a = intern(fields[0]);
        let b = intern(fields[1]);
        edges.push((a, b, weight));
    }
    Ok(EdgeLines {
        tokens: preset,
        edges,
    })
}

/// Load an undirected weighted graph from an edge-list stream
/// (`src dst [weight]`, `#` comments, blank lines ignored, duplicates sum,
/// weight defaults to 1). Index assignment is first-appearance order.
pub fn load_edge_list(reader: impl BufRead, policy: IsolatedPolicy) -> Result<Graph> {
    load_edge_list_detailed(reader, policy).map(|(g, _)| g)
}

/// Like [`load_edge_list`] but also reports the tokens of vertices removed
/// under [`IsolatedPolicy::Drop`], so callers can warn.
pub fn load_edge_list_detailed(
    reader: impl BufRead,
    policy: IsolatedPolicy,
) -> Result<(Graph, Vec<String>)> {
    let parsed = parse_edge_lines(reader, Vec::new())?;
    let graph = Graph::from_edges(parsed.tokens.clone(), &parsed.edges, policy)?;
    let dropped = parsed
        .tokens
        .iter()
        .filter(|t| graph.index_of(t).is_none())
        .cloned()
        .collect();
    Ok((graph, dropped))
}

/// Load with a pre-assigned vocabulary (`index<TAB>token` lines). Tokens not
/// listed in the vocab are appended in first-appearance order. Together with
/// [`Graph::dump_edge_list`] and [`Graph::dump_vocab`] this round-trips a
/// graph bit-exactly, indices included.
pub fn load_edge_list_with_vocab(
    edges: impl BufRead,
    vocab: impl BufRead,
    policy: IsolatedPolicy,
) -> Result<Graph> {
    let mut preset: Vec<(usize, String)> = Vec::new();
    for (lineno, line) in vocab.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, '\t');
        let idx = parts
            .next()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .ok_or_else(|| Error::format(format!("vocab line {}: bad index", lineno + 1)))?;
        let tok = parts
            .next()
            .ok_or_else(|| Error::format(format!("vocab line {}: missing token", lineno + 1)))?;
        preset.push((idx, tok.to_string()));
    }
    preset.sort_by_key(|&(i, _)| i);
    for (expect, (got, _)) in preset.iter().enumerate() {
        if *got != expect {
            return Err(Error::format(format!(
                "vocab indices must be 0..k contiguous; missing {expect}"
            )));
        }
    }
    let parsed = parse_edge_lines(edges, preset.into_iter().map(|(_, t)| t).collect())?;
    Graph::from_edges(parsed.tokens, &parsed.edges, policy)
}

/// Bipartite graph with separate row/column vertex sets (document-word and
/// label-word networks).
#[derive(Debug, Clone)]
pub struct BipartiteGraph {
    row_tokens: Vec<String>,
    col_tokens: Vec<String>,
    adjacency: Csr,
    row_degrees: Vec<f64>,
    col_degrees: Vec<f64>,
    volume: f64,
}

impl BipartiteGraph {
    pub fn from_edges(
        row_tokens: Vec<String>,
        col_tokens: Vec<String>,
        edges: &[(usize, usize, f64)],
    ) -> Result<BipartiteGraph> {
        Self::build(row_tokens, col_tokens, edges, false)
    }

    /// Like [`BipartiteGraph::from_edges`] but permits column-vocabulary
    /// entries with no incident edges, for column spaces aligned to an
    /// external word vocabulary.
    pub fn from_edges_aligned(
        row_tokens: Vec<String>,
        col_tokens: Vec<String>,
        edges: &[(usize, usize, f64)],
    ) -> Result<BipartiteGraph> {
        Self::build(row_tokens, col_tokens, edges, true)
    }

    fn build(
        row_tokens: Vec<String>,
        col_tokens: Vec<String>,
        edges: &[(usize, usize, f64)],
        allow_unused_cols: bool,
    ) -> Result<BipartiteGraph> {
        let (nr, nc) = (row_tokens.len(), col_tokens.len());
        let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for &(r, c, w) in edges {
            if r >= nr || c >= nc {
                return Err(Error::validation(format!(
                    "bipartite edge ({r}, {c}) out of range for {nr}x{nc}"
                )));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::format(format!("negative or non-finite weight {w}")));
            }
            *acc.entry((r, c)).or_insert(0.0) += w;
        }
        acc.retain(|_, w| *w > 0.0);
        let triplets: Vec<_> = acc.iter().map(|(&(r, c), &w)| (r, c, w)).collect();
        let adjacency = Csr::from_triplets(nr, nc, triplets);
        let row_degrees = adjacency.row_sums();
        let mut col_degrees = vec![0.0; nc];
        for r in 0..nr {
            let (cols, vals) = adjacency.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                col_degrees[c] += v;
            }
        }
        if let Some(r) = row_degrees.iter().position(|&d| d <= 0.0) {
            return Err(Error::validation(format!(
                "bipartite row vertex \"{}\" has zero degree",
                row_tokens[r]
            )));
        }
        if !allow_unused_cols {
            if let Some(c) = col_degrees.iter().position(|&d| d <= 0.0) {
                return Err(Error::validation(format!(
                    "bipartite column vertex \"{}\" has zero degree",
                    col_tokens[c]
                )));
            }
        }
        let volume = row_degrees.iter().sum();
        Ok(BipartiteGraph {
            row_tokens,
            col_tokens,
            adjacency,
            row_degrees,
            col_degrees,
            volume,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_tokens.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_tokens.len()
    }

    pub fn adjacency(&self) -> &Csr {
        &self.adjacency
    }

    pub fn row_degrees(&self) -> &[f64] {
        &self.row_degrees
    }

    pub fn col_degrees(&self) -> &[f64] {
        &self.col_degrees
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn row_tokens(&self) -> &[String] {
        &self.row_tokens
    }

    pub fn col_tokens(&self) -> &[String] {
        &self.col_tokens
    }
}

/// Load a bipartite edge list; row and column tokens live in separate
/// vocabularies, each indexed in first-appearance order.
pub fn load_bipartite_edge_list(reader: impl BufRead) -> Result<BipartiteGraph> {
    let mut row_tokens: Vec<String> = Vec::new();
    let mut col_tokens: Vec<String> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut col_index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::format(format!(
                "line {}: expected `row col [weight]`",
                lineno + 1
            )));
        }
        let weight = if fields.len() == 3 {
            fields[2].parse::<f64>().map_err(|_| {
                Error::format(format!("line {}: bad weight \"{}\"", lineno + 1, fields[2]))
            })?
        } else {
            1.0
        };
        let r = *row_index.entry(fields[0].to_string()).or_insert_with(|| {
            row_tokens.push(fields[0].to_string());
            row_tokens.len() - 1
        });
        let c = *col_index.entry(fields[1].to_string()).or_insert_with(|| {
            col_tokens.push(fields[1].to_string());
            col_tokens.len() - 1
        });
        edges.push((r, c, weight));
    }
    BipartiteGraph::from_edges(row_tokens, col_tokens, &edges)
}

/// Load a bipartite edge list whose column vocabulary is pinned to
/// `col_vocab` (a word vocabulary shared with another network). Unknown
/// column tokens are a validation error; unused vocabulary entries are fine.
pub fn load_bipartite_aligned(
    reader: impl BufRead,
    col_vocab: &[String],
) -> Result<BipartiteGraph> {
    let col_index: HashMap<&str, usize> = col_vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.as_str(), i))
        .collect();
    let mut row_tokens: Vec<String> = Vec::new();
    let mut row_index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::format(format!(
                "line {}: expected `row col [weight]`",
                lineno + 1
            )));
        }
        let weight = if fields.len() == 3 {
            fields[2].parse::<f64>().map_err(|_| {
                Error::format(format!("line {}: bad weight \"{}\"", lineno + 1, fields[2]))
            })?
        } else {
            1.0
        };
        let r = *row_index.entry(fields[0].to_string()).or_insert_with(|| {
            row_tokens.push(fields[0].to_string());
            row_tokens.len() - 1
        });
        let c = *col_index.get(fields[1]).ok_or_else(|| {
            Error::validation(format!(
                "line {}: column token \"{}\" not in the shared word vocabulary",
                lineno + 1,
                fields[1]
            ))
        })?;
        edges.push((r, c, weight));
    }
    BipartiteGraph::from_edges_aligned(row_tokens, col_vocab.to_vec(), &edges)
}

/// Multi-label assignments for a vertex set.
#[derive(Debug, Clone)]
pub struct LabelSet {
    assignments: BTreeMap<usize, BTreeSet<usize>>,
    label_tokens: Vec<String>,
}

impl LabelSet {
    pub fn new(
        assignments: BTreeMap<usize, BTreeSet<usize>>,
        label_tokens: Vec<String>,
        n_vertices: usize,
    ) -> Result<LabelSet> {
        for (&v, labels) in &assignments {
            if v >= n_vertices {
                return Err(Error::validation(format!(
                    "labeled vertex index {v} out of range for {n_vertices} vertices"
                )));
            }
            if labels.is_empty() {
                return Err(Error::validation(format!("vertex {v} listed with no label")));
            }
            if let Some(&l) = labels.iter().next_back() {
                if l >= label_tokens.len() {
                    return Err(Error::validation(format!("label index {l} out of range")));
                }
            }
        }
        Ok(LabelSet {
            assignments,
            label_tokens,
        })
    }

    /// Assemble from (vertex_token, label_token) pairs, resolving vertex
    /// tokens through `vertex_index`. Label tokens are interned in
    /// first-appearance order.
    pub fn from_pairs(
        pairs: &[(String, String)],
        vertex_index: impl Fn(&str) -> Option<usize>,
        n_vertices: usize,
    ) -> Result<LabelSet> {
        let mut label_tokens: Vec<String> = Vec::new();
        let mut label_index: HashMap<String, usize> = HashMap::new();
        let mut assignments: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for (vt, lt) in pairs {
            let v = vertex_index(vt).ok_or_else(|| {
                Error::validation(format!("labeled vertex \"{vt}\" not found in vertex set"))
            })?;
            let l = *label_index.entry(lt.clone()).or_insert_with(|| {
                label_tokens.push(lt.clone());
                label_tokens.len() - 1
            });
            assignments.entry(v).or_default().insert(l);
        }
        LabelSet::new(assignments, label_tokens, n_vertices)
    }

    pub fn labeled_vertices(&self) -> Vec<usize> {
        self.assignments.keys().copied().collect()
    }

    pub fn labels_of(&self, v: usize) -> Option<&BTreeSet<usize>> {
        self.assignments.get(&v)
    }

    pub fn n_labels(&self) -> usize {
        self.label_tokens.len()
    }

    pub fn label_tokens(&self) -> &[String] {
        &self.label_tokens
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }
}

/// Parse `vertex<ws>label` lines (repeats allowed for multi-label).
pub fn parse_label_pairs(reader: impl BufRead) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let content = match line.find('#') {
            Some(p) => &line[..p],
            None => &line[..],
        };
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 2 {
            return Err(Error::format(format!(
                "line {}: expected `vertex label`",
                lineno + 1
            )));
        }
        pairs.push((fields[0].to_string(), fields[1].to_string()));
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn load(text: &str) -> Graph {
        load_edge_list(Cursor::new(text), IsolatedPolicy::Reject).unwrap()
    }

    #[test]
    fn k3_basics() {
        let g = load("a b\nb c\nc a\n");
        assert_eq!(g.n(), 3);
        assert_eq!(g.degrees(), &[2.0, 2.0, 2.0]);
        assert_eq!(g.volume(), 6.0);
        assert_eq!(g.d_min(), 2.0);
        assert_eq!(g.token(0), "a");
        assert_eq!(g.index_of("c"), Some(2));
    }

    #[test]
    fn duplicate_edges_sum() {
        let g = load("a b\na b 2\n");
        assert_eq!(g.degrees(), &[3.0, 3.0]);
        assert_eq!(g.volume(), 6.0);
        assert_eq!(g.adjacency().get(0, 1), 3.0);
        // reversed orientation also sums
        let g = load("a b\nb a 2\n");
        assert_eq!(g.adjacency().get(1, 0), 3.0);
    }

    #[test]
    fn self_loop_counted_once_in_row_sum() {
        let g = load("a b\nc c\n");
        let c = g.index_of("c").unwrap();
        assert_eq!(g.degree(c), 1.0);
        assert_eq!(g.adjacency().get(c, c), 1.0);
        assert_eq!(g.volume(), 3.0);
    }

    #[test]
    fn comments_blank_lines_and_default_weight() {
        let g = load("# a comment\n\na b # trailing\n  b c 2.5\n");
        assert_eq!(g.n(), 3);
        assert_eq!(g.adjacency().get(1, 2), 2.5);
    }

    #[test]
    fn negative_weight_is_format_error() {
        let err = load_edge_list(Cursor::new("a b -1\n"), IsolatedPolicy::Reject).unwrap_err();
        assert!(matches!(err, Error::Format(_)), "{err}");
    }

    #[test]
    fn isolated_vertex_policy() {
        // zero-weight edge leaves "c" and "d" without incident weight
        let text = "a b\nc d 0\n";
        let err = load_edge_list(Cursor::new(text), IsolatedPolicy::Reject).unwrap_err();
        match err {
            Error::Validation(msg) => assert!(msg.contains('c'), "{msg}"),
            other => panic!("expected validation error, got {other}"),
        }
        let (g, dropped) =
            load_edge_list_detailed(Cursor::new(text), IsolatedPolicy::Drop).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(dropped, vec!["c".to_string(), "d".to_string()]);
    }

    #[test]
    fn transition_matrix_rows_stochastic() {
        let g = load("a b 3\na c 1\nb c 1\n");
        let p = g.transition_matrix();
        assert!((p.get(0, 1) - 0.75).abs() < 1e-15);
        assert!((p.get(0, 2) - 0.25).abs() < 1e-15);
        for s in p.row_sums() {
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn path_transition_rows() {
        let g = load("1 2\n2 3\n");
        let p = g.transition_matrix();
        assert_eq!(p.get(0, 1), 1.0);
        assert_eq!(p.get(1, 0), 0.5);
        assert_eq!(p.get(1, 2), 0.5);
        assert_eq!(p.get(2, 1), 1.0);
    }

    #[test]
    fn normalized_adjacency_values() {
        let g = load("1 2\n2 3\n");
        let s = g.normalized_adjacency();
        assert!((s.get(0, 1) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.symmetry_gap(), 0.0);
    }

    #[test]
    fn lcc_selection_and_tie_break() {
        let g = load("a b\nb c\nc a\nd e\n");
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.n(), 3);
        assert_eq!(lcc.tokens(), &["a", "b", "c"]);

        // two triangles, tie broken toward the one containing index 0
        let g = load("a b\nb c\nc a\nx y\ny z\nz x\n");
        let lcc = g.largest_connected_component();
        assert_eq!(lcc.tokens(), &["a", "b", "c"]);

        let g = load("a b\nb c\nc a\n");
        assert_eq!(g.largest_connected_component().n(), 3);
    }

    #[test]
    fn connectivity_and_bipartiteness_flags() {
        let path = load("1 2\n2 3\n");
        assert!(path.is_connected());
        assert!(path.is_bipartite());
        let k3 = load("a b\nb c\nc a\n");
        assert!(!k3.is_bipartite());
        let looped = load("a b\na a\n");
        assert!(!looped.is_bipartite());
        let two = load("a b\nc d\n");
        assert!(!two.is_connected());
    }

    #[test]
    fn dump_and_reload_with_vocab_is_identical() {
        let g = load("w5 w1 2\nw1 w3\nw3 w5 0.25\nw3 w3 4\n");
        let mut edges = Vec::new();
        let mut vocab = Vec::new();
        g.dump_edge_list(&mut edges).unwrap();
        g.dump_vocab(&mut vocab).unwrap();
        let g2 = load_edge_list_with_vocab(
            Cursor::new(edges),
            Cursor::new(vocab),
            IsolatedPolicy::Reject,
        )
        .unwrap();
        assert_eq!(g.tokens(), g2.tokens());
        assert_eq!(g.adjacency(), g2.adjacency());
        assert_eq!(g.degrees(), g2.degrees());
        assert_eq!(g.volume(), g2.volume());
    }

    #[test]
    fn degrees_match_recomputed_row_sums() {
        let g = load("a b 0.1\nb c 2\nc a 7\nc c 1.5\n");
        let recomputed = g.adjacency().row_sums();
        assert_eq!(recomputed, g.degrees());
        assert_eq!(g.volume(), recomputed.iter().sum::<f64>());
    }

    #[test]
    fn label_set_from_pairs() {
        let g = load("a b\nb c\nc a\n");
        let pairs = vec![
            ("a".to_string(), "red".to_string()),
            ("b".to_string(), "blue".to_string()),
            ("a".to_string(), "blue".to_string()),
        ];
        let ls = LabelSet::from_pairs(&pairs, |t| g.index_of(t), g.n()).unwrap();
        assert_eq!(ls.n_labels(), 2);
        assert_eq!(ls.labeled_vertices(), vec![0, 1]);
        assert_eq!(ls.labels_of(0).unwrap().len(), 2);

        let bad = vec![("zz".to_string(), "red".to_string())];
        assert!(LabelSet::from_pairs(&bad, |t| g.index_of(t), g.n()).is_err());
    }

    #[test]
    fn bipartite_degrees_and_volume() {
        let text = "d1 w1\nd1 w2\nd1 w3\n";
        let bg = load_bipartite_edge_list(Cursor::new(text)).unwrap();
        assert_eq!(bg.n_rows(), 1);
        assert_eq!(bg.n_cols(), 3);
        assert_eq!(bg.row_degrees(), &[3.0]);
        assert_eq!(bg.col_degrees(), &[1.0, 1.0, 1.0]);
        assert_eq!(bg.volume(), 3.0);
        assert_eq!(
            bg.row_degrees().iter().sum::<f64>(),
            bg.col_degrees().iter().sum::<f64>()
        );
    }
}
