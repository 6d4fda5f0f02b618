//! Graph families and composites for continuous-time quantum walks.
//!
//! Every graph lives on a power-of-two index space (2^w indices for w wires)
//! so that its walk can be addressed by qubits. Real vertices are flagged in
//! an `active` mask; the remaining indices are padding. Adjacency entries are
//! exact integers so that commutator checks are exact, never tolerance-based.

use ndarray::Array2;

use crate::error::{Result, WalkError};

/// Desk-scale ceiling on composite dimensions.
pub const DIM_CAP: usize = 1 << 16;

/// Hopping rate γ and evolution time t of a walk `exp(-i t γ A)`.
///
/// γ is a pure scale on t; it lives here rather than in [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    pub gamma: f64,
    pub t: f64,
}

impl WalkParams {
    pub fn new(gamma: f64, t: f64) -> Result<Self> {
        if !gamma.is_finite() || !t.is_finite() {
            return Err(WalkError::InvalidArgument(format!(
                "walk parameters must be finite (gamma = {gamma}, t = {t})"
            )));
        }
        Ok(Self { gamma, t })
    }

    /// Phase angle `-γ t λ` accumulated by an eigenstate with eigenvalue λ.
    pub fn phase(&self, lambda: f64) -> f64 {
        -self.gamma * self.t * lambda
    }
}

impl Default for WalkParams {
    fn default() -> Self {
        Self { gamma: 1.0, t: 1.0 }
    }
}

/// An undirected graph embedded in a power-of-two index space.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    dim: usize,
    adjacency: Array2<i64>,
    active: Vec<bool>,
    label: String,
}

impl Graph {
    /// Build a graph from an explicit edge list. Vertices touched by an edge
    /// are active; untouched indices become padding.
    pub fn from_edges(dim: usize, edges: &[(usize, usize)], label: &str) -> Result<Self> {
        if dim == 0 || !dim.is_power_of_two() {
            return Err(WalkError::InvalidArgument(format!(
                "graph dimension must be a power of two, got {dim}"
            )));
        }
        let mut adjacency = Array2::zeros((dim, dim));
        let mut active = vec![false; dim];
        for &(i, j) in edges {
            if i >= dim || j >= dim {
                return Err(WalkError::InvalidArgument(format!(
                    "edge ({i}, {j}) out of range for dimension {dim}"
                )));
            }
            if i == j {
                return Err(WalkError::InvalidArgument(format!(
                    "self-loop at vertex {i} not allowed"
                )));
            }
            adjacency[[i, j]] = 1;
            adjacency[[j, i]] = 1;
            active[i] = true;
            active[j] = true;
        }
        Ok(Self {
            dim,
            adjacency,
            active,
            label: label.to_string(),
        })
    }

    /// Build from parts, validating the structural invariants.
    pub fn from_parts(adjacency: Array2<i64>, active: Vec<bool>, label: &str) -> Result<Self> {
        let dim = adjacency.nrows();
        if adjacency.ncols() != dim {
            return Err(WalkError::InvalidArgument(
                "adjacency must be square".into(),
            ));
        }
        if dim == 0 || !dim.is_power_of_two() {
            return Err(WalkError::InvalidArgument(format!(
                "graph dimension must be a power of two, got {dim}"
            )));
        }
        if active.len() != dim {
            return Err(WalkError::DimensionMismatch {
                left: dim,
                right: active.len(),
            });
        }
        for i in 0..dim {
            if adjacency[[i, i]] != 0 {
                return Err(WalkError::InvalidArgument(format!(
                    "nonzero diagonal entry at vertex {i}"
                )));
            }
            for j in 0..dim {
                if adjacency[[i, j]] < 0 {
                    return Err(WalkError::InvalidArgument(format!(
                        "negative adjacency entry at ({i}, {j})"
                    )));
                }
                if adjacency[[i, j]] != adjacency[[j, i]] {
                    return Err(WalkError::InvalidArgument(format!(
                        "adjacency not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self {
            dim,
            adjacency,
            active,
            label: label.to_string(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of wires addressing the index space (log2 of `dim`).
    pub fn wires(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn adjacency(&self) -> &Array2<i64> {
        &self.adjacency
    }

    pub fn adjacency_f64(&self) -> Array2<f64> {
        self.adjacency.mapv(|v| v as f64)
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn is_active(&self, v: usize) -> bool {
        v < self.dim && self.active[v]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn fully_active(&self) -> bool {
        self.active.iter().all(|&a| a)
    }

    /// Number of undirected edges incident to the active vertex `v`.
    pub fn degree(&self, v: usize) -> Result<usize> {
        if v >= self.dim {
            return Err(WalkError::InvalidArgument(format!(
                "vertex {v} out of range for dimension {}",
                self.dim
            )));
        }
        if !self.active[v] {
            return Err(WalkError::InvalidArgument(format!(
                "vertex {v} is padding, not a real vertex"
            )));
        }
        Ok(self
            .adjacency
            .row(v)
            .iter()
            .map(|&x| x as usize)
            .sum::<usize>())
    }

    /// Common degree of all active vertices, or `None` if degrees vary.
    pub fn is_degree_regular(&self) -> Option<usize> {
        let mut common = None;
        for v in 0..self.dim {
            if !self.active[v] {
                continue;
            }
            let d = self.degree(v).expect("active vertex");
            match common {
                None => common = Some(d),
                Some(c) if c != d => return None,
                _ => {}
            }
        }
        common
    }

    /// Undirected edge list (i < j).
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                if self.adjacency[[i, j]] != 0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// True when every padding index has an all-zero row.
    pub fn padding_isolated(&self) -> bool {
        (0..self.dim)
            .filter(|&v| !self.active[v])
            .all(|v| self.adjacency.row(v).iter().all(|&x| x == 0))
    }

    /// Drop every edge incident to a padding index.
    pub(crate) fn isolate_padding(mut self) -> Self {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self.active[i] || !self.active[j] {
                    self.adjacency[[i, j]] = 0;
                }
            }
        }
        self
    }

    pub(crate) fn with_label(mut self, label: String) -> Self {
        self.label = label;
        self
    }

    /// GraphViz dot output: active vertices only, all edges solid.
    pub fn to_dot(&self) -> String {
        dot_render(self, &[], &self.label)
    }

    /// JSON dump: `{dim, active, edges, label}` in that field order.
    pub fn to_json(&self) -> String {
        let active: Vec<String> = self.active.iter().map(|a| a.to_string()).collect();
        let edges: Vec<String> = self
            .edges()
            .iter()
            .map(|(i, j)| format!("[{i},{j}]"))
            .collect();
        format!(
            "{{\"dim\":{},\"active\":[{}],\"edges\":[{}],\"label\":{}}}",
            self.dim,
            active.join(","),
            edges.join(","),
            serde_json::to_string(&self.label).expect("string encodes"),
        )
    }
}

/// Two subgraphs `A = diag(A1, A2)` joined by an interlink graph `B` whose
/// edges run only between the blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct InterdependentPair {
    intra: Graph,
    inter: Graph,
    split: usize,
}

impl InterdependentPair {
    fn new(intra: Graph, inter: Graph, split: usize) -> Result<Self> {
        if intra.dim() != inter.dim() {
            return Err(WalkError::DimensionMismatch {
                left: intra.dim(),
                right: inter.dim(),
            });
        }
        for (i, j) in inter.edges() {
            if (i < split) == (j < split) {
                return Err(WalkError::Internal(format!(
                    "interlink edge ({i}, {j}) does not cross the block split at {split}"
                )));
            }
            if intra.adjacency[[i, j]] != 0 {
                return Err(WalkError::Internal(format!(
                    "edge ({i}, {j}) appears in both the intra and interlink graphs"
                )));
            }
        }
        Ok(Self {
            intra,
            inter,
            split,
        })
    }

    pub fn intra(&self) -> &Graph {
        &self.intra
    }

    pub fn inter(&self) -> &Graph {
        &self.inter
    }

    /// Index where the second block begins.
    pub fn split(&self) -> usize {
        self.split
    }

    /// The composite graph `A + B` the walk actually evolves on.
    pub fn combined(&self) -> Graph {
        let adjacency = &self.intra.adjacency + &self.inter.adjacency;
        Graph {
            dim: self.intra.dim,
            adjacency,
            active: self.intra.active.clone(),
            label: self.intra.label.clone(),
        }
    }

    /// Dot output with intra edges solid and interlink edges dashed.
    pub fn to_dot(&self) -> String {
        dot_render(&self.combined(), &self.inter.edges(), self.intra.label())
    }
}

fn dot_render(g: &Graph, dashed: &[(usize, usize)], label: &str) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "graph \"{label}\" {{").unwrap();
    for v in 0..g.dim() {
        if g.is_active(v) {
            writeln!(out, "  {v};").unwrap();
        }
    }
    for (i, j) in g.edges() {
        if !g.is_active(i) || !g.is_active(j) {
            continue;
        }
        if dashed.contains(&(i, j)) {
            writeln!(out, "  {i} -- {j} [style=dashed];").unwrap();
        } else {
            writeln!(out, "  {i} -- {j};").unwrap();
        }
    }
    out.push_str("}\n");
    out
}

// ---------------------------------------------------------------------------
// Graph families
// ---------------------------------------------------------------------------

/// The 2-vertex path: adjacency `[[0,1],[1,0]]`.
pub fn path2() -> Graph {
    Graph::from_edges(2, &[(0, 1)], "P2").expect("static graph")
}

/// Complete graph on 2^m vertices.
pub fn complete_graph(m: u32) -> Result<Graph> {
    if m == 0 {
        return Err(WalkError::InvalidArgument(
            "complete graph needs at least 2 vertices (m >= 1); a single vertex has no edges"
                .into(),
        ));
    }
    let n = checked_dim(m)?;
    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j));
        }
    }
    Graph::from_edges(n, &edges, &format!("K{n}"))
}

/// Complete bipartite graph K_{2^m1, 2^m2} embedded in dimension 2^(m1+1).
///
/// Part 1 occupies indices `0 .. 2^m1`; part 2 starts at index `2^m1`
/// (leading wire 1, next `m1 - m2` wires 0). Remaining indices are padding.
pub fn complete_bipartite(m1: u32, m2: u32) -> Result<Graph> {
    if m1 < 1 {
        return Err(WalkError::InvalidArgument(
            "complete bipartite graph requires m1 >= 1".into(),
        ));
    }
    if m1 < m2 {
        return Err(WalkError::InvalidArgument(format!(
            "complete bipartite graph requires m1 >= m2, got m1 = {m1}, m2 = {m2}"
        )));
    }
    let n1 = checked_dim(m1)?;
    let n2 = checked_dim(m2)?;
    let dim = checked_dim(m1 + 1)?;
    let mut edges = Vec::with_capacity(n1 * n2);
    for i in 0..n1 {
        for j in 0..n2 {
            edges.push((i, n1 + j));
        }
    }
    Graph::from_edges(dim, &edges, &format!("K({n1},{n2})"))
}

/// Star graph S_{2^m + 1}, realized as K_{2^m, 1}.
pub fn star(m: u32) -> Result<Graph> {
    let n = checked_dim(m)?;
    Ok(complete_bipartite(m, 0)?.with_label(format!("S{}", n + 1)))
}

/// Hypercube graph Q_n: 2^n vertices, edges between indices differing in one bit.
pub fn hypercube(n: u32) -> Result<Graph> {
    if n == 0 {
        return Err(WalkError::InvalidArgument(
            "hypercube requires n >= 1".into(),
        ));
    }
    let dim = checked_dim(n)?;
    let mut edges = Vec::new();
    for i in 0..dim {
        for b in 0..n {
            let j = i ^ (1 << b);
            if i < j {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(dim, &edges, &format!("Q{n}"))
}

/// Book graph B_{2^m}: the Cartesian product of the star S_{2^m + 1} with P2,
/// re-embedded so its padding indices stay isolated.
pub fn book(m: u32) -> Result<Graph> {
    if m == 0 {
        return Err(WalkError::InvalidArgument(
            "book graph requires m >= 1".into(),
        ));
    }
    let pages = 1usize << m;
    let g = cartesian(&star(m)?, &path2())?;
    Ok(g.isolate_padding().with_label(format!("B{pages}")))
}

/// Cartesian product: `A1 ⊗ I + I ⊗ A2` on the product index space, with the
/// active mask the outer AND of the factor masks.
///
/// The adjacency is the plain operator sum, so the walk on the product is
/// exactly the tensor product of the factor walks. When a factor has padding,
/// its padded fibers keep the other factor's edges; such edges join two
/// inactive indices only (activity is preserved along every product edge).
pub fn cartesian(g1: &Graph, g2: &Graph) -> Result<Graph> {
    let (d1, d2) = (g1.dim, g2.dim);
    let dim = d1
        .checked_mul(d2)
        .filter(|&d| d <= DIM_CAP)
        .ok_or(WalkError::ResourceLimit {
            what: "cartesian product dimension",
            value: d1.saturating_mul(d2),
            cap: DIM_CAP,
        })?;
    let mut adjacency = Array2::zeros((dim, dim));
    for (i1, j1) in g1.edges() {
        for k in 0..d2 {
            adjacency[[i1 * d2 + k, j1 * d2 + k]] = 1;
            adjacency[[j1 * d2 + k, i1 * d2 + k]] = 1;
        }
    }
    for (i2, j2) in g2.edges() {
        for k in 0..d1 {
            adjacency[[k * d2 + i2, k * d2 + j2]] = 1;
            adjacency[[k * d2 + j2, k * d2 + i2]] = 1;
        }
    }
    let mut active = vec![false; dim];
    for i in 0..d1 {
        for j in 0..d2 {
            active[i * d2 + j] = g1.active[i] && g2.active[j];
        }
    }
    Graph::from_parts(
        adjacency,
        active,
        &format!("cartesian({},{})", g1.label, g2.label),
    )
}

/// Embed two graphs side by side under a new top wire: top = 0 holds `g1`,
/// top = 1 holds `g2` at offset `max(dim1, dim2)`.
pub fn disjoint_union(g1: &Graph, g2: &Graph) -> Result<Graph> {
    let half = g1.dim.max(g2.dim);
    let dim = half
        .checked_mul(2)
        .filter(|&d| d <= DIM_CAP)
        .ok_or(WalkError::ResourceLimit {
            what: "disjoint union dimension",
            value: half.saturating_mul(2),
            cap: DIM_CAP,
        })?;
    let mut adjacency = Array2::zeros((dim, dim));
    let mut active = vec![false; dim];
    for (i, j) in g1.edges() {
        adjacency[[i, j]] = 1;
        adjacency[[j, i]] = 1;
    }
    active[..g1.dim].copy_from_slice(&g1.active);
    for (i, j) in g2.edges() {
        adjacency[[half + i, half + j]] = 1;
        adjacency[[half + j, half + i]] = 1;
    }
    active[half..half + g2.dim].copy_from_slice(&g2.active);
    Graph::from_parts(
        adjacency,
        active,
        &format!("union({},{})", g1.label, g2.label),
    )
}

/// Two disjoint copies of `g1` with one interlink rung per active vertex.
pub fn identity_interlink(g1: &Graph) -> Result<InterdependentPair> {
    let intra = disjoint_union(g1, g1)?.with_label(format!("interdep_id({})", g1.label));
    let split = g1.dim;
    let rungs: Vec<(usize, usize)> = (0..g1.dim)
        .filter(|&i| g1.active[i])
        .map(|i| (i, split + i))
        .collect();
    let inter = Graph::from_edges(intra.dim(), &rungs, "identity interlink")?;
    InterdependentPair::new(intra, inter, split)
}

/// Two disjoint graphs joined by all active-to-active edges (the all-ones
/// interlink). Requires both graphs degree-regular with equal degree and
/// fully-active power-of-two vertex counts with `|g1| >= |g2|`; the
/// constructor then proves the composite's two parts commute.
pub fn complete_interlink(g1: &Graph, g2: &Graph) -> Result<InterdependentPair> {
    let d1 = g1.is_degree_regular();
    let d2 = g2.is_degree_regular();
    let fmt = |d: Option<usize>| d.map_or("-".to_string(), |v| v.to_string());
    if d1.is_none() || d2.is_none() || d1 != d2 {
        return Err(WalkError::DegreeMismatch {
            left: fmt(d1),
            right: fmt(d2),
        });
    }
    for (name, g) in [("first", g1), ("second", g2)] {
        if !g.fully_active() {
            return Err(WalkError::InvalidArgument(format!(
                "complete interlink requires a fully-active {name} subgraph \
                 (active count must be its power-of-two dimension); got {} of {}",
                g.active_count(),
                g.dim
            )));
        }
    }
    if g1.dim < g2.dim {
        return Err(WalkError::InvalidArgument(format!(
            "complete interlink requires |g1| >= |g2|, got {} < {}",
            g1.dim, g2.dim
        )));
    }
    let intra =
        disjoint_union(g1, g2)?.with_label(format!("interdep_complete({},{})", g1.label, g2.label));
    let split = g1.dim;
    let mut rungs = Vec::with_capacity(g1.dim * g2.dim);
    for i in 0..g1.dim {
        for j in 0..g2.dim {
            rungs.push((i, split + j));
        }
    }
    let inter = Graph::from_edges(intra.dim(), &rungs, "complete interlink")?;
    if !commutes(&intra, &inter)? {
        return Err(WalkError::Internal(
            "complete interlink blocks failed the exact commutator check".into(),
        ));
    }
    InterdependentPair::new(intra, inter, split)
}

/// Exact integer test of `A·B - B·A = 0`.
pub fn commutes(a: &Graph, b: &Graph) -> Result<bool> {
    if a.dim != b.dim {
        return Err(WalkError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let n = a.dim;
    let (am, bm) = (&a.adjacency, &b.adjacency);
    for i in 0..n {
        for j in 0..n {
            let mut acc: i64 = 0;
            for k in 0..n {
                acc += am[[i, k]] * bm[[k, j]] - bm[[i, k]] * am[[k, j]];
            }
            if acc != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn checked_dim(wires: u32) -> Result<usize> {
    let dim =
        1usize
            .checked_shl(wires)
            .filter(|&d| d <= DIM_CAP)
            .ok_or(WalkError::ResourceLimit {
                what: "graph dimension wires",
                value: wires as usize,
                cap: DIM_CAP.trailing_zeros() as usize,
            })?;
    Ok(dim)
}
