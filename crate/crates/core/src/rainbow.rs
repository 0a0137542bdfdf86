//! Rainbow (multicolor) subgraph detection in edge-colored packings, the
//! homomorphism-based growth classifier, and the pentagon inequality audit.

use std::collections::VecDeque;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{union_graph, ColoredPacking, SimpleGraph};
use crate::rational::{self, Rational};

/// Read access to an edge-colored host graph.
pub trait EdgeColors {
    fn vertex_count(&self) -> usize;
    fn color(&self, u: usize, v: usize) -> Option<usize>;
    /// Neighbors of `u` in increasing order.
    fn neighbors(&self, u: usize) -> Vec<usize>;
}

/// Union graph of a packing with each edge labeled by its copy index.
#[derive(Clone, Debug)]
pub struct ColoredHost {
    adj: Vec<Vec<(usize, usize)>>,
}

impl ColoredHost {
    pub fn from_packing(p: &ColoredPacking) -> Result<Self> {
        let coloring = p.edge_coloring()?;
        let mut adj = vec![Vec::new(); p.n()];
        for (&(u, v), &c) in &coloring {
            adj[u].push((v, c));
            adj[v].push((u, c));
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(ColoredHost { adj })
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn colored_neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }
}

impl EdgeColors for ColoredHost {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    fn color(&self, u: usize, v: usize) -> Option<usize> {
        let list = &self.adj[u];
        list.binary_search_by_key(&v, |&(w, _)| w)
            .ok()
            .map(|i| list[i].1)
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        self.adj[u].iter().map(|&(w, _)| w).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessEdge {
    pub u: usize,
    pub v: usize,
    pub color: usize,
}

/// An embedding of the forbidden graph whose edges have pairwise distinct
/// colors. `vertices[x]` is the image of forbidden-graph vertex `x`; `edges`
/// follows the forbidden graph's edge order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowWitness {
    pub vertices: Vec<usize>,
    pub edges: Vec<WitnessEdge>,
}

impl RainbowWitness {
    fn from_map(host: &impl EdgeColors, g: &SimpleGraph, map: Vec<usize>) -> Self {
        let edges = g
            .edges()
            .iter()
            .map(|&(a, b)| WitnessEdge {
                u: map[a],
                v: map[b],
                color: host.color(map[a], map[b]).expect("embedded edge"),
            })
            .collect();
        RainbowWitness {
            vertices: map,
            edges,
        }
    }

    /// Independent re-check against the packing: injective map, every edge
    /// present with the stated color, colors pairwise distinct.
    pub fn check(&self, p: &ColoredPacking, g: &SimpleGraph) -> bool {
        let Ok(coloring) = p.edge_coloring() else {
            return false;
        };
        if self.vertices.len() != g.n() || self.edges.len() != g.edge_count() {
            return false;
        }
        let mut seen = self.vertices.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.vertices.len() || seen.iter().any(|&x| x >= p.n()) {
            return false;
        }
        let mut colors = Vec::new();
        for (&(a, b), e) in g.edges().iter().zip(&self.edges) {
            let key = crate::graph::edge(self.vertices[a], self.vertices[b]);
            if key != crate::graph::edge(e.u, e.v) || coloring.get(&key) != Some(&e.color) {
                return false;
            }
            colors.push(e.color);
        }
        colors.sort_unstable();
        colors.windows(2).all(|w| w[0] != w[1])
    }
}

/// A rainbow-subgraph search strategy.
pub trait RainbowDetector: Send + Sync {
    fn name(&self) -> &'static str;
    fn applies_to(&self, forbidden: &SimpleGraph) -> bool;
    fn find(&self, host: &ColoredHost, forbidden: &SimpleGraph) -> Option<RainbowWitness>;
}

/// Triangle enumeration over `u < v < w`; first witness in lexicographic
/// vertex order.
pub struct TriangleScan;

impl RainbowDetector for TriangleScan {
    fn name(&self) -> &'static str {
        "triangle-scan"
    }

    fn applies_to(&self, forbidden: &SimpleGraph) -> bool {
        *forbidden == SimpleGraph::complete(3)
    }

    fn find(&self, host: &ColoredHost, forbidden: &SimpleGraph) -> Option<RainbowWitness> {
        let n = host.vertex_count();
        let hit = (0..n).into_par_iter().find_map_first(|u| {
            let nbrs = host.colored_neighbors(u);
            let start = nbrs.partition_point(|&(v, _)| v <= u);
            for (idx, &(v, cuv)) in nbrs.iter().enumerate().skip(start) {
                for &(w, cuw) in &nbrs[idx + 1..] {
                    if cuv == cuw {
                        continue;
                    }
                    if let Some(cvw) = host.color(v, w) {
                        if cvw != cuv && cvw != cuw {
                            return Some(vec![u, v, w]);
                        }
                    }
                }
            }
            None
        })?;
        Some(RainbowWitness::from_map(host, forbidden, hit))
    }
}

/// Embedding search over the host with the all-distinct-colors constraint
/// checked on every partial assignment.
pub struct Backtracking;

impl RainbowDetector for Backtracking {
    fn name(&self) -> &'static str {
        "backtracking"
    }

    fn applies_to(&self, _: &SimpleGraph) -> bool {
        true
    }

    fn find(&self, host: &ColoredHost, forbidden: &SimpleGraph) -> Option<RainbowWitness> {
        let map = rainbow_embedding(host, forbidden, None)?;
        Some(RainbowWitness::from_map(host, forbidden, map))
    }
}

static DETECTORS: [&dyn RainbowDetector; 2] = [&TriangleScan, &Backtracking];

pub fn detectors() -> &'static [&'static dyn RainbowDetector] {
    &DETECTORS
}

/// The first registered detector that handles `forbidden`.
pub fn detector_for(forbidden: &SimpleGraph) -> &'static dyn RainbowDetector {
    *DETECTORS
        .iter()
        .find(|d| d.applies_to(forbidden))
        .expect("backtracking applies to everything")
}

pub fn detector_by_name(name: &str) -> Option<&'static dyn RainbowDetector> {
    DETECTORS.iter().copied().find(|d| d.name() == name)
}

pub const FORBIDDEN_VERTEX_LIMIT: usize = 8;

fn check_forbidden(forbidden: &SimpleGraph) -> Result<()> {
    if forbidden.n() > FORBIDDEN_VERTEX_LIMIT {
        return Err(Error::guard(
            "forbidden-graph vertex",
            FORBIDDEN_VERTEX_LIMIT,
            forbidden.n(),
        ));
    }
    if forbidden.edge_count() == 0 || !forbidden.is_connected() {
        return Err(Error::InvalidArgument(
            "forbidden graph must be connected with at least one edge".into(),
        ));
    }
    Ok(())
}

/// A rainbow copy of `forbidden` in the packing, if one exists.
pub fn find_rainbow(p: &ColoredPacking, forbidden: &SimpleGraph) -> Result<Option<RainbowWitness>> {
    check_forbidden(forbidden)?;
    let host = ColoredHost::from_packing(p)?;
    Ok(detector_for(forbidden).find(&host, forbidden))
}

/// Like [`find_rainbow`] but with an explicit detector.
pub fn find_rainbow_with(
    detector: &dyn RainbowDetector,
    p: &ColoredPacking,
    forbidden: &SimpleGraph,
) -> Result<Option<RainbowWitness>> {
    check_forbidden(forbidden)?;
    if !detector.applies_to(forbidden) {
        return Err(Error::InvalidArgument(format!(
            "detector {} does not handle this forbidden graph",
            detector.name()
        )));
    }
    let host = ColoredHost::from_packing(p)?;
    Ok(detector.find(&host, forbidden))
}

/// Search order: pinned vertices first, then BFS, so every later vertex has
/// an earlier neighbor.
fn search_order(g: &SimpleGraph, first: usize, second: Option<usize>) -> Vec<usize> {
    let adj = g.adjacency();
    let mut order = vec![first];
    let mut seen = vec![false; g.n()];
    seen[first] = true;
    if let Some(s) = second {
        order.push(s);
        seen[s] = true;
    }
    let mut queue: VecDeque<usize> = order.iter().copied().collect();
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                order.push(y);
                queue.push_back(y);
            }
        }
    }
    order
}

/// Finds an injective map of the connected graph `g` into `host` whose edges
/// carry pairwise distinct colors. With `pin = Some((a, b, u, v))` the
/// forbidden edge `ab` is forced onto host edge `uv`.
pub fn rainbow_embedding<H: EdgeColors>(
    host: &H,
    g: &SimpleGraph,
    pin: Option<(usize, usize, usize, usize)>,
) -> Option<Vec<usize>> {
    if g.n() == 0 {
        return Some(Vec::new());
    }
    let g_adj = g.adjacency();
    let order = match pin {
        Some((a, b, _, _)) => search_order(g, a, Some(b)),
        None => search_order(g, 0, None),
    };
    if order.len() != g.n() {
        return None;
    }
    let mut position = vec![usize::MAX; g.n()];
    for (i, &x) in order.iter().enumerate() {
        position[x] = i;
    }
    let earlier: Vec<Vec<usize>> = order
        .iter()
        .map(|&x| {
            g_adj[x]
                .iter()
                .copied()
                .filter(|&y| position[y] < position[x])
                .collect()
        })
        .collect();

    let mut state = Embedding {
        host,
        order: &order,
        earlier: &earlier,
        map: vec![usize::MAX; g.n()],
        used_vertex: vec![false; host.vertex_count()],
        colors: Vec::new(),
    };
    let found = match pin {
        Some((a, b, u, v)) => {
            let c = host.color(u, v)?;
            state.map[a] = u;
            state.map[b] = v;
            state.used_vertex[u] = true;
            state.used_vertex[v] = true;
            state.colors.push(c);
            state.extend(2)
        }
        None => state.extend(0),
    };
    found.then_some(state.map)
}

struct Embedding<'a, H> {
    host: &'a H,
    order: &'a [usize],
    earlier: &'a [Vec<usize>],
    map: Vec<usize>,
    used_vertex: Vec<bool>,
    colors: Vec<usize>,
}

impl<H: EdgeColors> Embedding<'_, H> {
    fn extend(&mut self, pos: usize) -> bool {
        if pos == self.order.len() {
            return true;
        }
        let x = self.order[pos];
        let candidates = match self.earlier[pos].first() {
            Some(&y) => self.host.neighbors(self.map[y]),
            None => (0..self.host.vertex_count()).collect(),
        };
        for cand in candidates {
            if self.used_vertex[cand] {
                continue;
            }
            let mark = self.colors.len();
            let ok = self.earlier[pos]
                .iter()
                .all(|&y| match self.host.color(self.map[y], cand) {
                    Some(c) if !self.colors.contains(&c) => {
                        self.colors.push(c);
                        true
                    }
                    _ => false,
                });
            if ok {
                self.map[x] = cand;
                self.used_vertex[cand] = true;
                if self.extend(pos + 1) {
                    return true;
                }
                self.used_vertex[cand] = false;
                self.map[x] = usize::MAX;
            }
            self.colors.truncate(mark);
        }
        false
    }
}

pub const HOMOMORPHISM_VERTEX_LIMIT: usize = 12;

/// True iff some edge-preserving vertex map `g -> f` exists.
pub fn exists_homomorphism(g: &SimpleGraph, f: &SimpleGraph) -> Result<bool> {
    for graph in [g, f] {
        if graph.n() > HOMOMORPHISM_VERTEX_LIMIT {
            return Err(Error::guard(
                "homomorphism vertex",
                HOMOMORPHISM_VERTEX_LIMIT,
                graph.n(),
            ));
        }
    }
    if g.n() == 0 {
        return Ok(true);
    }
    if f.n() == 0 {
        return Ok(false);
    }
    let g_adj = g.adjacency();
    let f_deg = f.degrees();
    // BFS order per component
    let mut order = Vec::with_capacity(g.n());
    let mut seen = vec![false; g.n()];
    for root in 0..g.n() {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &y in &g_adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut map = vec![usize::MAX; g.n()];
    fn assign(
        pos: usize,
        order: &[usize],
        g_adj: &[Vec<usize>],
        f: &SimpleGraph,
        f_deg: &[usize],
        map: &mut [usize],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let x = order[pos];
        for target in 0..f.n() {
            if !g_adj[x].is_empty() && f_deg[target] == 0 {
                continue;
            }
            let ok = g_adj[x]
                .iter()
                .all(|&y| map[y] == usize::MAX || f.has_edge(map[y], target));
            if ok {
                map[x] = target;
                if assign(pos + 1, order, g_adj, f, f_deg, map) {
                    return true;
                }
                map[x] = usize::MAX;
            }
        }
        false
    }
    Ok(assign(0, &order, &g_adj, f, &f_deg, &mut map))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GrowthOrder {
    /// `ex_F(n, G) = Θ(n²)`.
    QuadraticTheta,
    /// `ex_F(n, G) = o(n²)`.
    SubquadraticLittleO,
}

/// Quadratic growth exactly when `forbidden` has no homomorphism into
/// `pattern`.
pub fn classify_order(pattern: &SimpleGraph, forbidden: &SimpleGraph) -> Result<GrowthOrder> {
    Ok(if exists_homomorphism(forbidden, pattern)? {
        GrowthOrder::SubquadraticLittleO
    } else {
        GrowthOrder::QuadraticTheta
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CopySlack {
    pub copy: usize,
    /// Degree sum over the copy's vertices.
    pub lhs: u64,
    /// `2n + 10 + Σ N*(uv)` over the copy's edges.
    pub rhs: u64,
}

/// Every quantity of the pentagon counting argument evaluated on one
/// rainbow-triangle-free pentagon packing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PentagonAudit {
    pub t: usize,
    pub n: usize,
    /// `Σ_i Σ_{v ∈ C_i} d(v)`.
    pub double_sum: u64,
    /// `½ Σ_v d(v)²`.
    pub half_sum_squares: u64,
    /// `50 t² / n`.
    #[serde(with = "rational::serde_str")]
    pub qm_am_bound: Rational,
    pub per_copy: Vec<CopySlack>,
    /// `Σ_i Σ_{uv ∈ C_i} N*(uv)`.
    pub n_star_total: u64,
    /// Failed inequalities, empty when everything holds.
    pub violations: Vec<String>,
}

impl PentagonAudit {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Audits a pentagon packing. `N*(uv)` counts common neighbors `z` of a copy
/// edge `uv` whose edges `uz, vz` both belong to one other copy.
pub fn pentagon_audit(p: &ColoredPacking) -> Result<PentagonAudit> {
    if !p.pattern().is_cycle() || p.pattern().n() != 5 {
        return Err(Error::Precondition(
            "pentagon audit needs pattern C5".into(),
        ));
    }
    if let Some(w) = find_rainbow(p, &SimpleGraph::complete(3))? {
        return Err(Error::Precondition(format!(
            "packing has a rainbow triangle on {:?}",
            w.vertices
        )));
    }
    let host = ColoredHost::from_packing(p)?;
    let degrees = union_graph(p)?.degrees();
    let t = p.copy_count();
    let n = p.n();

    let mut double_sum = 0u64;
    let mut n_star_total = 0u64;
    let mut per_copy = Vec::with_capacity(t);
    for (i, map) in p.copies().iter().enumerate() {
        let lhs: u64 = map.iter().map(|&v| degrees[v] as u64).sum();
        double_sum += lhs;
        let mut n_star = 0u64;
        for (u, v) in p.copy_edges(i) {
            for &(z, cu) in host.colored_neighbors(u) {
                if cu != i && host.color(v, z) == Some(cu) {
                    n_star += 1;
                }
            }
        }
        n_star_total += n_star;
        per_copy.push(CopySlack {
            copy: i,
            lhs,
            rhs: 2 * n as u64 + 10 + n_star,
        });
    }
    let sum_squares: u64 = degrees.iter().map(|&d| (d as u64) * (d as u64)).sum();
    let half_sum_squares = sum_squares / 2;
    let qm_am_bound = if n == 0 {
        Rational::from_integer(BigInt::from(0))
    } else {
        rational::ratio(50 * (t as i64) * (t as i64), n as i64)
    };

    let mut violations = Vec::new();
    if !sum_squares.is_multiple_of(2) || double_sum != half_sum_squares {
        violations.push(format!(
            "double sum {double_sum} differs from half sum of squares {}/2",
            sum_squares
        ));
    }
    if Rational::from_integer(BigInt::from(double_sum)) < qm_am_bound {
        violations.push(format!(
            "double sum {double_sum} below 50t²/n = {}",
            rational::format(&qm_am_bound)
        ));
    }
    for s in &per_copy {
        if s.lhs > s.rhs {
            violations.push(format!("copy {}: degree sum {} > {}", s.copy, s.lhs, s.rhs));
        }
    }
    if n_star_total > 5 * t as u64 {
        violations.push(format!("ΣN* = {n_star_total} > 5t = {}", 5 * t));
    }
    // 50t²/n <= (2n + 15)t
    if 50 * (t as u64) * (t as u64) > (2 * n as u64 + 15) * t as u64 * n as u64 {
        violations.push(format!("t = {t} breaks 50t²/n <= (2n+15)t at n = {n}"));
    }

    Ok(PentagonAudit {
        t,
        n,
        double_sum,
        half_sum_squares,
        qm_am_bound,
        per_copy,
        n_star_total,
        violations,
    })
}
