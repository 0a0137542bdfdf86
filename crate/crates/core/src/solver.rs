//! Exact `ex_F(n, G)` for small `n` by branch and bound over edge-disjoint
//! copy packings, with an unpruned subset oracle for cross-checking.
//!
//! The search picks copies in increasing index order. Each node is a valid
//! packing; a child adds one later copy that is edge-disjoint from the node
//! and creates no rainbow forbidden graph. Only rainbow copies through an
//! edge of the new copy need checking.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{edge, pattern_copies, ColoredPacking, SimpleGraph};
use crate::rainbow::{rainbow_embedding, EdgeColors};

pub const SOLVER_VERTEX_LIMIT: usize = 12;
pub const DEFAULT_NODE_BUDGET: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub n: usize,
    pub pattern: SimpleGraph,
    /// `None` packs without any rainbow restriction.
    pub forbidden: Option<SimpleGraph>,
    /// Restricts copies to a host graph on `0..n`; `None` means `K_n`.
    pub host: Option<SimpleGraph>,
    pub node_budget: u64,
    /// Forces the first copy in the list to be used. Only sound for the
    /// complete host, where every copy is equivalent under relabeling.
    pub symmetry_breaking: bool,
    pub threads: usize,
}

impl SearchConfig {
    pub fn new(n: usize, pattern: SimpleGraph, forbidden: Option<SimpleGraph>) -> Self {
        SearchConfig {
            n,
            pattern,
            forbidden,
            host: None,
            node_budget: DEFAULT_NODE_BUDGET,
            symmetry_breaking: true,
            threads: 1,
        }
    }

    pub fn with_host(mut self, host: SimpleGraph) -> Self {
        self.host = Some(host);
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.node_budget = budget;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_symmetry_breaking(mut self, on: bool) -> Self {
        self.symmetry_breaking = on;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n > SOLVER_VERTEX_LIMIT {
            return Err(Error::guard("solver vertex", SOLVER_VERTEX_LIMIT, self.n));
        }
        if self.node_budget == 0 {
            return Err(Error::InvalidArgument(
                "node budget must be positive".into(),
            ));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument(
                "thread count must be positive".into(),
            ));
        }
        if self.pattern.edge_count() == 0 {
            return Err(Error::InvalidArgument(
                "pattern needs at least one edge".into(),
            ));
        }
        if let Some(h) = &self.host {
            if h.n() != self.n {
                return Err(Error::InvalidArgument(format!(
                    "host has {} vertices, config says {}",
                    h.n(),
                    self.n
                )));
            }
        }
        if let Some(g) = &self.forbidden {
            if g.n() > crate::rainbow::FORBIDDEN_VERTEX_LIMIT {
                return Err(Error::guard(
                    "forbidden-graph vertex",
                    crate::rainbow::FORBIDDEN_VERTEX_LIMIT,
                    g.n(),
                ));
            }
            if g.edge_count() == 0 || !g.is_connected() {
                return Err(Error::InvalidArgument(
                    "forbidden graph must be connected with at least one edge".into(),
                ));
            }
        }
        Ok(())
    }
}

/// All copies of `pattern` in `K_n`, one vertex map per distinct edge set,
/// ordered by sorted edge set.
pub fn enumerate_copies(n: usize, pattern: &SimpleGraph) -> Result<Vec<Vec<usize>>> {
    if n > SOLVER_VERTEX_LIMIT {
        return Err(Error::guard(
            "copy-enumeration vertex",
            SOLVER_VERTEX_LIMIT,
            n,
        ));
    }
    Ok(pattern_copies(&SimpleGraph::complete(n), pattern))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SearchOutcome {
    pub value: usize,
    pub optimal: bool,
    pub packing: ColoredPacking,
    pub nodes: u64,
}

const NO_COLOR: u32 = u32::MAX;

struct Instance {
    n: usize,
    copies: Vec<Vec<usize>>,
    masks: Vec<u128>,
    copy_edges: Vec<Vec<(usize, usize)>>,
    index: Vec<usize>,
    edges_per_copy: usize,
    forbidden: Option<Forbidden>,
}

enum Forbidden {
    Triangle,
    General(SimpleGraph),
}

impl Instance {
    fn build(cfg: &SearchConfig) -> Result<Self> {
        let host = cfg
            .host
            .clone()
            .unwrap_or_else(|| SimpleGraph::complete(cfg.n));
        let copies = pattern_copies(&host, &cfg.pattern);
        let mut index = vec![usize::MAX; cfg.n * cfg.n];
        for (i, &(u, v)) in host.edges().iter().enumerate() {
            index[u * cfg.n + v] = i;
            index[v * cfg.n + u] = i;
        }
        let copy_edges: Vec<Vec<(usize, usize)>> = copies
            .iter()
            .map(|map| {
                cfg.pattern
                    .edges()
                    .iter()
                    .map(|&(a, b)| edge(map[a], map[b]))
                    .collect()
            })
            .collect();
        let masks = copy_edges
            .iter()
            .map(|es| {
                es.iter()
                    .fold(0u128, |m, &(u, v)| m | 1 << index[u * cfg.n + v])
            })
            .collect();
        let forbidden = cfg.forbidden.as_ref().map(|g| {
            if *g == SimpleGraph::complete(3) {
                Forbidden::Triangle
            } else {
                Forbidden::General(g.clone())
            }
        });
        Ok(Instance {
            n: cfg.n,
            copies,
            masks,
            copy_edges,
            index,
            edges_per_copy: cfg.pattern.edge_count(),
            forbidden,
        })
    }

    #[inline]
    fn edge_index(&self, u: usize, v: usize) -> usize {
        self.index[u * self.n + v]
    }
}

/// Mutable packing state: chosen copies, used-edge mask and edge colors.
#[derive(Clone)]
struct State {
    chosen: Vec<usize>,
    used: u128,
    color: Vec<u32>,
}

struct ColorView<'a> {
    inst: &'a Instance,
    color: &'a [u32],
}

impl EdgeColors for ColorView<'_> {
    fn vertex_count(&self) -> usize {
        self.inst.n
    }

    fn color(&self, u: usize, v: usize) -> Option<usize> {
        if u == v {
            return None;
        }
        let e = self.inst.edge_index(u, v);
        if e == usize::MAX || self.color[e] == NO_COLOR {
            None
        } else {
            Some(self.color[e] as usize)
        }
    }

    fn neighbors(&self, u: usize) -> Vec<usize> {
        (0..self.inst.n)
            .filter(|&w| self.color(u, w).is_some())
            .collect()
    }
}

impl State {
    fn new(inst: &Instance) -> Self {
        let edges = inst.index.iter().filter(|&&i| i != usize::MAX).count() / 2;
        State {
            chosen: Vec::new(),
            used: 0,
            color: vec![NO_COLOR; edges.max(1)],
        }
    }

    /// Adds copy `c` if it is edge-disjoint and creates no rainbow
    /// forbidden graph.
    fn try_push(&mut self, inst: &Instance, c: usize) -> bool {
        if inst.masks[c] & self.used != 0 {
            return false;
        }
        let tag = c as u32;
        match &inst.forbidden {
            None => {}
            Some(Forbidden::Triangle) => {
                for &(u, v) in &inst.copy_edges[c] {
                    for w in 0..inst.n {
                        if w == u || w == v {
                            continue;
                        }
                        let (e1, e2) = (inst.edge_index(u, w), inst.edge_index(v, w));
                        if e1 == usize::MAX || e2 == usize::MAX {
                            continue;
                        }
                        let (c1, c2) = (self.color[e1], self.color[e2]);
                        // edges of the new copy are still uncolored here
                        if c1 != NO_COLOR && c2 != NO_COLOR && c1 != c2 {
                            return false;
                        }
                    }
                }
            }
            Some(Forbidden::General(g)) => {
                self.paint(inst, c, tag);
                let view = ColorView {
                    inst,
                    color: &self.color,
                };
                let hit = inst.copy_edges[c].iter().any(|&(u, v)| {
                    g.edges().iter().any(|&(a, b)| {
                        rainbow_embedding(&view, g, Some((a, b, u, v))).is_some()
                            || rainbow_embedding(&view, g, Some((a, b, v, u))).is_some()
                    })
                });
                self.paint(inst, c, NO_COLOR);
                if hit {
                    return false;
                }
            }
        }
        self.paint(inst, c, tag);
        self.used |= inst.masks[c];
        self.chosen.push(c);
        true
    }

    fn pop(&mut self, inst: &Instance) {
        let c = self.chosen.pop().expect("nonempty");
        self.paint(inst, c, NO_COLOR);
        self.used &= !inst.masks[c];
    }

    fn paint(&mut self, inst: &Instance, c: usize, tag: u32) {
        for &(u, v) in &inst.copy_edges[c] {
            self.color[inst.edge_index(u, v)] = tag;
        }
    }
}

struct Shared {
    best: AtomicUsize,
    nodes: AtomicU64,
    aborted: AtomicBool,
    budget: u64,
}

struct Subsearch<'a> {
    inst: &'a Instance,
    shared: &'a Shared,
    state: State,
    best: usize,
    best_set: Option<Vec<usize>>,
}

impl Subsearch<'_> {
    fn dfs(&mut self, next: usize) {
        let nodes = self.shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if nodes > self.shared.budget {
            self.shared.aborted.store(true, Ordering::Relaxed);
        }
        if self.shared.aborted.load(Ordering::Relaxed) {
            return;
        }
        let len = self.state.chosen.len();
        if len > self.best {
            self.best = len;
            self.best_set = Some(self.state.chosen.clone());
            self.shared.best.fetch_max(len, Ordering::Relaxed);
        }
        let inst = self.inst;
        let mut coverable = 0u128;
        let mut compatible = 0usize;
        for c in next..inst.copies.len() {
            if inst.masks[c] & self.state.used == 0 {
                coverable |= inst.masks[c];
                compatible += 1;
            }
        }
        let by_edges = (coverable.count_ones() as usize) / inst.edges_per_copy;
        let bound = len + compatible.min(by_edges);
        // strict against other subsearches so witnesses stay independent of
        // scheduling
        if bound <= self.best || bound < self.shared.best.load(Ordering::Relaxed) {
            return;
        }
        for c in next..inst.copies.len() {
            if self.state.try_push(inst, c) {
                self.dfs(c + 1);
                self.state.pop(inst);
                if self.shared.aborted.load(Ordering::Relaxed) {
                    return;
                }
            }
        }
    }
}

/// Largest rainbow-free packing. `optimal` is false when the node budget ran
/// out; the packing is then a certified lower bound. With a complete search
/// the witness is the first optimum in search order regardless of thread
/// count.
pub fn max_rainbow_free_packing(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let inst = Instance::build(cfg)?;
    let mut root = State::new(&inst);
    let use_symmetry = cfg.symmetry_breaking && cfg.host.is_none() && !inst.copies.is_empty();
    let shared = Shared {
        best: AtomicUsize::new(0),
        nodes: AtomicU64::new(1),
        aborted: AtomicBool::new(false),
        budget: cfg.node_budget,
    };

    let first_branch = if use_symmetry {
        if !root.try_push(&inst, 0) {
            // every copy is isomorphic to copy 0, so none can be used
            return finish(cfg, &inst, Vec::new(), true, &shared);
        }
        1
    } else {
        0
    };
    shared.best.store(root.chosen.len(), Ordering::Relaxed);

    let branches: Vec<usize> = (first_branch..inst.copies.len()).collect();
    let run = |c: usize| -> Option<(usize, Vec<usize>)> {
        let mut sub = Subsearch {
            inst: &inst,
            shared: &shared,
            state: root.clone(),
            best: root.chosen.len(),
            best_set: None,
        };
        if !sub.state.try_push(&inst, c) {
            return None;
        }
        sub.dfs(c + 1);
        sub.best_set.map(|s| (s.len(), s))
    };
    let results: Vec<Option<(usize, Vec<usize>)>> = if cfg.threads <= 1 {
        branches.iter().map(|&c| run(c)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| branches.par_iter().map(|&c| run(c)).collect())
    };

    let mut best = root.chosen.clone();
    for (value, set) in results.into_iter().flatten() {
        if value > best.len() {
            best = set;
        }
    }
    let optimal = !shared.aborted.load(Ordering::Relaxed);
    finish(cfg, &inst, best, optimal, &shared)
}

fn finish(
    cfg: &SearchConfig,
    inst: &Instance,
    chosen: Vec<usize>,
    optimal: bool,
    shared: &Shared,
) -> Result<SearchOutcome> {
    let copies = chosen.iter().map(|&c| inst.copies[c].clone()).collect();
    let packing = ColoredPacking::new(cfg.n, cfg.pattern.clone(), copies)?;
    Ok(SearchOutcome {
        value: chosen.len(),
        optimal,
        packing,
        nodes: shared.nodes.load(Ordering::Relaxed).min(cfg.node_budget),
    })
}

pub const ORACLE_COPY_LIMIT: usize = 24;

/// Unpruned maximum over every subset of copies, with its own copy
/// enumeration and a full rainbow scan per edge-disjoint subset.
pub fn oracle_max_packing(
    n: usize,
    pattern: &SimpleGraph,
    forbidden: Option<&SimpleGraph>,
) -> Result<usize> {
    let copies = naive_copies(n, pattern);
    if copies.len() > ORACLE_COPY_LIMIT {
        return Err(Error::guard("oracle copy", ORACLE_COPY_LIMIT, copies.len()));
    }
    let mut best = 0;
    let mut color = vec![usize::MAX; n * n];
    for mask in 0u32..1 << copies.len() {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        color.fill(usize::MAX);
        let mut disjoint = true;
        'outer: for (c, es) in copies.iter().enumerate() {
            if mask >> c & 1 == 0 {
                continue;
            }
            for &(u, v) in es {
                if color[u * n + v] != usize::MAX {
                    disjoint = false;
                    break 'outer;
                }
                color[u * n + v] = c;
                color[v * n + u] = c;
            }
        }
        if !disjoint {
            continue;
        }
        if let Some(g) = forbidden {
            if has_rainbow_naive(n, &color, g) {
                continue;
            }
        }
        best = size;
    }
    Ok(best)
}

fn naive_copies(n: usize, pattern: &SimpleGraph) -> Vec<Vec<(usize, usize)>> {
    let mut found = BTreeSet::new();
    let mut map = Vec::new();
    fn rec(
        n: usize,
        pattern: &SimpleGraph,
        map: &mut Vec<usize>,
        found: &mut BTreeSet<Vec<(usize, usize)>>,
    ) {
        if map.len() == pattern.n() {
            let mut es: Vec<_> = pattern
                .edges()
                .iter()
                .map(|&(a, b)| edge(map[a], map[b]))
                .collect();
            es.sort_unstable();
            found.insert(es);
            return;
        }
        for x in 0..n {
            if !map.contains(&x) {
                map.push(x);
                rec(n, pattern, map, found);
                map.pop();
            }
        }
    }
    rec(n, pattern, &mut map, &mut found);
    found.into_iter().collect()
}

/// Tries every injective vertex map of `g`.
fn has_rainbow_naive(n: usize, color: &[usize], g: &SimpleGraph) -> bool {
    fn rec(n: usize, color: &[usize], g: &SimpleGraph, map: &mut Vec<usize>) -> bool {
        if map.len() == g.n() {
            let mut seen: Vec<usize> = Vec::new();
            for &(a, b) in g.edges() {
                let c = color[map[a] * n + map[b]];
                if c == usize::MAX || seen.contains(&c) {
                    return false;
                }
                seen.push(c);
            }
            return true;
        }
        for x in 0..n {
            if !map.contains(&x) {
                map.push(x);
                if rec(n, color, g, map) {
                    return true;
                }
                map.pop();
            }
        }
        false
    }
    rec(n, color, g, &mut Vec::new())
}
