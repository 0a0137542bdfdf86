//! Graphs, edge-disjoint packings, blow-ups and a few exact small-graph
//! invariants.
//!
//! Vertices are always the dense range `0..n`. Edges are stored as sorted
//! `(u, v)` pairs with `u < v`, which is also the canonical JSON form.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Edge = (usize, usize);

/// Normalizes an unordered pair to `(min, max)`.
#[inline]
pub fn edge(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphRepr> for SimpleGraph {
    type Error = Error;

    fn try_from(repr: GraphRepr) -> Result<Self> {
        SimpleGraph::new(repr.n, repr.edges.iter().map(|&[u, v]| (u, v)))
    }
}

impl From<SimpleGraph> for GraphRepr {
    fn from(g: SimpleGraph) -> Self {
        GraphRepr {
            n: g.n,
            edges: g.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

impl SimpleGraph {
    /// Builds a graph, rejecting loops, repeated pairs and out-of-range
    /// endpoints. Pairs may be given in either orientation.
    pub fn new(n: usize, edges: impl IntoIterator<Item = Edge>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(Error::InvalidGraph(format!("loop at vertex {u}")));
            }
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has an endpoint outside 0..{n}"
                )));
            }
            list.push(edge(u, v));
        }
        list.sort_unstable();
        for w in list.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge ({}, {})",
                    w[0].0, w[0].1
                )));
            }
        }
        Ok(SimpleGraph { n, edges: list })
    }

    pub fn empty(n: usize) -> Self {
        SimpleGraph {
            n,
            edges: Vec::new(),
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        SimpleGraph { n, edges }
    }

    pub fn cycle(len: usize) -> Result<Self> {
        if len < 3 {
            return Err(Error::InvalidGraph(format!("cycle length {len} < 3")));
        }
        SimpleGraph::new(len, (0..len).map(|i| (i, (i + 1) % len)))
    }

    pub fn path(n: usize) -> Self {
        SimpleGraph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn petersen() -> Self {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        SimpleGraph::new(10, outer.chain(spokes).chain(inner)).expect("petersen is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.edges.binary_search(&edge(u, v)).is_ok()
    }

    /// Sorted neighbor lists.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Lexicographically first triangle, if any.
    pub fn find_triangle(&self) -> Option<[usize; 3]> {
        let adj = self.adjacency();
        for u in 0..self.n {
            for (idx, &v) in adj[u].iter().enumerate() {
                if v <= u {
                    continue;
                }
                for &w in &adj[u][idx + 1..] {
                    if adj[v].binary_search(&w).is_ok() {
                        return Some([u, v, w]);
                    }
                }
            }
        }
        None
    }

    pub fn is_triangle_free(&self) -> bool {
        self.find_triangle().is_none()
    }

    /// True iff the graph is a single cycle through all `n` vertices.
    pub fn is_cycle(&self) -> bool {
        self.n >= 3
            && self.edge_count() == self.n
            && self.degrees().iter().all(|&d| d == 2)
            && self.is_connected()
    }
}

/// An ordered list of edge-disjoint embedded copies of `pattern` on the
/// ground set `0..n`. Copy index doubles as its color.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PackingRepr", into = "PackingRepr")]
pub struct ColoredPacking {
    n: usize,
    pattern: SimpleGraph,
    copies: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct PackingRepr {
    n: usize,
    pattern: SimpleGraph,
    copies: Vec<Vec<usize>>,
}

impl TryFrom<PackingRepr> for ColoredPacking {
    type Error = Error;

    fn try_from(r: PackingRepr) -> Result<Self> {
        ColoredPacking::new(r.n, r.pattern, r.copies)
    }
}

impl From<ColoredPacking> for PackingRepr {
    fn from(p: ColoredPacking) -> Self {
        PackingRepr {
            n: p.n,
            pattern: p.pattern,
            copies: p.copies,
        }
    }
}

impl ColoredPacking {
    /// Validates every copy as an embedding and the copies as pairwise
    /// edge-disjoint.
    pub fn new(n: usize, pattern: SimpleGraph, copies: Vec<Vec<usize>>) -> Result<Self> {
        let p = ColoredPacking::new_unchecked(n, pattern, copies)?;
        p.edge_coloring()?;
        Ok(p)
    }

    /// Checks that each copy is an injective in-range vertex map but does not
    /// check edge-disjointness.
    pub fn new_unchecked(n: usize, pattern: SimpleGraph, copies: Vec<Vec<usize>>) -> Result<Self> {
        for (c, map) in copies.iter().enumerate() {
            if map.len() != pattern.n() {
                return Err(Error::InvalidPacking(format!(
                    "copy {c} maps {} vertices, pattern has {}",
                    map.len(),
                    pattern.n()
                )));
            }
            let mut seen = BTreeSet::new();
            for &x in map {
                if x >= n {
                    return Err(Error::InvalidPacking(format!(
                        "copy {c} uses vertex {x} outside 0..{n}"
                    )));
                }
                if !seen.insert(x) {
                    return Err(Error::InvalidPacking(format!(
                        "copy {c} is not injective (vertex {x} repeated)"
                    )));
                }
            }
        }
        Ok(ColoredPacking { n, pattern, copies })
    }

    pub fn empty(n: usize, pattern: SimpleGraph) -> Self {
        ColoredPacking {
            n,
            pattern,
            copies: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pattern(&self) -> &SimpleGraph {
        &self.pattern
    }

    pub fn copies(&self) -> &[Vec<usize>] {
        &self.copies
    }

    pub fn copy_count(&self) -> usize {
        self.copies.len()
    }

    /// Ground edges of copy `c`, in pattern edge order.
    pub fn copy_edges(&self, c: usize) -> impl Iterator<Item = Edge> + '_ {
        let map = &self.copies[c];
        self.pattern
            .edges()
            .iter()
            .map(move |&(a, b)| edge(map[a], map[b]))
    }

    /// Maps each ground edge to the copy that owns it. Fails on the first
    /// pair of copies sharing an edge.
    pub fn edge_coloring(&self) -> Result<BTreeMap<Edge, usize>> {
        let mut owner = BTreeMap::new();
        for c in 0..self.copies.len() {
            for e in self.copy_edges(c) {
                if let Some(&first) = owner.get(&e) {
                    return Err(Error::EdgeClash {
                        first,
                        second: c,
                        edge: e,
                    });
                }
                owner.insert(e, c);
            }
        }
        Ok(owner)
    }

    /// The packing with copy `c` removed; colors of later copies shift down.
    pub fn without_copy(&self, c: usize) -> ColoredPacking {
        let mut copies = self.copies.clone();
        copies.remove(c);
        ColoredPacking {
            n: self.n,
            pattern: self.pattern.clone(),
            copies,
        }
    }

    /// Same packing with copies sorted lexicographically.
    pub fn canonical(&self) -> ColoredPacking {
        let mut copies = self.copies.clone();
        copies.sort();
        ColoredPacking {
            n: self.n,
            pattern: self.pattern.clone(),
            copies,
        }
    }
}

/// The host graph formed by all copy edges.
pub fn union_graph(p: &ColoredPacking) -> Result<SimpleGraph> {
    let owner = p.edge_coloring()?;
    Ok(SimpleGraph {
        n: p.n,
        edges: owner.into_keys().collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupSpec {
    base: SimpleGraph,
    class_sizes: Vec<usize>,
}

impl BlowupSpec {
    pub fn new(base: SimpleGraph, class_sizes: Vec<usize>) -> Result<Self> {
        if class_sizes.len() != base.n() {
            return Err(Error::InvalidGraph(format!(
                "{} class sizes for a base graph on {} vertices",
                class_sizes.len(),
                base.n()
            )));
        }
        if let Some(i) = class_sizes.iter().position(|&s| s == 0) {
            return Err(Error::InvalidGraph(format!("class {i} is empty")));
        }
        Ok(BlowupSpec { base, class_sizes })
    }

    pub fn uniform(base: SimpleGraph, m: usize) -> Result<Self> {
        let sizes = vec![m; base.n()];
        BlowupSpec::new(base, sizes)
    }

    pub fn base(&self) -> &SimpleGraph {
        &self.base
    }

    pub fn class_sizes(&self) -> &[usize] {
        &self.class_sizes
    }

    /// First flattened vertex of each class (class-major order).
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.class_sizes
            .iter()
            .map(|&s| {
                let o = acc;
                acc += s;
                o
            })
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.class_sizes.iter().sum()
    }
}

/// Replaces base vertex `i` by an independent set of `class_sizes[i]`
/// vertices and each base edge by a complete bipartite graph. Vertex `(i, a)`
/// is flattened to `offset(i) + a`.
pub fn blow_up(spec: &BlowupSpec) -> SimpleGraph {
    let offsets = spec.offsets();
    let mut edges = Vec::new();
    for &(i, j) in spec.base.edges() {
        for a in 0..spec.class_sizes[i] {
            for b in 0..spec.class_sizes[j] {
                edges.push(edge(offsets[i] + a, offsets[j] + b));
            }
        }
    }
    edges.sort_unstable();
    SimpleGraph {
        n: spec.vertex_count(),
        edges,
    }
}

pub const DEFAULT_CHROMATIC_LIMIT: usize = 16;

pub fn chromatic_number(g: &SimpleGraph) -> Result<usize> {
    chromatic_number_with_limit(g, DEFAULT_CHROMATIC_LIMIT)
}

/// Exact chromatic number by backtracking, starting from a maximum-clique
/// lower bound.
pub fn chromatic_number_with_limit(g: &SimpleGraph, limit: usize) -> Result<usize> {
    if g.n() > limit {
        return Err(Error::guard("chromatic-number vertex", limit, g.n()));
    }
    if g.n() == 0 {
        return Ok(0);
    }
    if g.edge_count() == 0 {
        return Ok(1);
    }
    let adj = g.adjacency();
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].len()));
    let lower = max_clique(&adj);
    for k in lower..=g.n() {
        let mut colors = vec![usize::MAX; g.n()];
        if color_with(&adj, &order, 0, k, 0, &mut colors) {
            return Ok(k);
        }
    }
    unreachable!("n colors always suffice")
}

fn color_with(
    adj: &[Vec<usize>],
    order: &[usize],
    pos: usize,
    k: usize,
    used: usize,
    colors: &mut [usize],
) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos];
    // A fresh color is interchangeable with any other unused one.
    let top = (used + 1).min(k);
    for c in 0..top {
        if adj[v].iter().all(|&w| colors[w] != c) {
            colors[v] = c;
            if color_with(adj, order, pos + 1, k, used.max(c + 1), colors) {
                return true;
            }
            colors[v] = usize::MAX;
        }
    }
    false
}

fn max_clique(adj: &[Vec<usize>]) -> usize {
    fn extend(adj: &[Vec<usize>], clique: usize, candidates: Vec<usize>, best: &mut usize) {
        if candidates.is_empty() {
            *best = (*best).max(clique);
            return;
        }
        if clique + candidates.len() <= *best {
            return;
        }
        for (i, &v) in candidates.iter().enumerate() {
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|w| adj[v].binary_search(w).is_ok())
                .collect();
            extend(adj, clique + 1, next, best);
        }
    }
    let mut best = 0;
    extend(adj, 0, (0..adj.len()).collect(), &mut best);
    best
}

/// Length of a shortest cycle, `None` for forests.
pub fn girth(g: &SimpleGraph) -> Option<usize> {
    let adj = g.adjacency();
    let mut best: Option<usize> = None;
    for s in 0..g.n() {
        let mut dist = vec![usize::MAX; g.n()];
        let mut parent = vec![usize::MAX; g.n()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if best.is_some_and(|b| 2 * dist[u] + 1 >= b) {
                break;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    parent[v] = u;
                    queue.push_back(v);
                } else if parent[u] != v {
                    let len = dist[u] + dist[v] + 1;
                    best = Some(best.map_or(len, |b| b.min(len)));
                }
            }
        }
    }
    best
}

/// All copies of `pattern` in `host`, one vertex map per distinct edge set
/// (the lexicographically smallest map), ordered by sorted edge set.
pub fn pattern_copies(host: &SimpleGraph, pattern: &SimpleGraph) -> Vec<Vec<usize>> {
    let k = pattern.n();
    if k > host.n() {
        return Vec::new();
    }
    let host_adj = host.adjacency();
    let pat_adj = pattern.adjacency();
    // earlier-placed pattern neighbors of each pattern vertex
    let back: Vec<Vec<usize>> = (0..k)
        .map(|a| pat_adj[a].iter().copied().filter(|&b| b < a).collect())
        .collect();
    let mut found: BTreeMap<Vec<Edge>, Vec<usize>> = BTreeMap::new();
    let mut map = Vec::with_capacity(k);
    let mut used = vec![false; host.n()];

    fn rec(
        host: &SimpleGraph,
        host_adj: &[Vec<usize>],
        pattern: &SimpleGraph,
        back: &[Vec<usize>],
        map: &mut Vec<usize>,
        used: &mut [bool],
        found: &mut BTreeMap<Vec<Edge>, Vec<usize>>,
    ) {
        let a = map.len();
        if a == pattern.n() {
            let mut key: Vec<Edge> = pattern
                .edges()
                .iter()
                .map(|&(x, y)| edge(map[x], map[y]))
                .collect();
            key.sort_unstable();
            found.entry(key).or_insert_with(|| map.clone());
            return;
        }
        let candidates: Vec<usize> = match back[a].first() {
            Some(&b) => host_adj[map[b]].clone(),
            None => (0..host.n()).collect(),
        };
        for x in candidates {
            if used[x] || !back[a].iter().all(|&b| host.has_edge(map[b], x)) {
                continue;
            }
            used[x] = true;
            map.push(x);
            rec(host, host_adj, pattern, back, map, used, found);
            map.pop();
            used[x] = false;
        }
    }

    rec(
        host, &host_adj, pattern, &back, &mut map, &mut used, &mut found,
    );
    found.into_values().collect()
}

/// Resolves graph shorthands: `edge`/`k2`, `k<t>`, `c<len>`, `p<n>`,
/// `petersen`, `empty<n>`, and uniform blow-ups `<name>[m]`.
pub fn named(name: &str) -> Result<SimpleGraph> {
    let name = name.trim().to_ascii_lowercase();
    let bad = || Error::InvalidArgument(format!("unknown graph name {name:?}"));
    if let Some(inner) = name.strip_suffix(']') {
        let (base, m) = inner.split_once('[').ok_or_else(bad)?;
        let m: usize = m.parse().map_err(|_| bad())?;
        let spec = BlowupSpec::uniform(named(base)?, m)?;
        return Ok(blow_up(&spec));
    }
    let number = |prefix: &str| -> Option<usize> { name.strip_prefix(prefix)?.parse().ok() };
    match name.as_str() {
        "edge" => Ok(SimpleGraph::complete(2)),
        "petersen" => Ok(SimpleGraph::petersen()),
        _ => {
            if let Some(n) = number("empty") {
                Ok(SimpleGraph::empty(n))
            } else if let Some(t) = number("k") {
                Ok(SimpleGraph::complete(t))
            } else if let Some(len) = number("c") {
                SimpleGraph::cycle(len)
            } else if let Some(n) = number("p") {
                Ok(SimpleGraph::path(n))
            } else {
                Err(bad())
            }
        }
    }
}
