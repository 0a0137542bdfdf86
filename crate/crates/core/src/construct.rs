//! Explicit packings and host graphs, plus the name-keyed family registry
//! used by the `construct` command.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::{behrend_q_free, QFreeSet};
use crate::graph::{ColoredPacking, SimpleGraph};
use crate::rational::{self, Rational};

/// Clique packing on `t(t+1)n/2` vertices: class `i` (1-based) holds
/// `i·n` vertices, and for every `ℓ ∈ 1..=n` and slope `k ∈ A` the copy
/// `{(1, ℓ), (2, ℓ + k), …, (t, ℓ + (t-1)k)}` is added. Two vertices
/// determine `k` and `ℓ`, so copies are edge-disjoint; a rainbow triangle
/// would give a `(t-2)`-limited-ratio triple in `A`.
///
/// `(i, x)` is flattened to `n·(i-1)·i/2 + x - 1`. Copies are listed in
/// `(ℓ, k)` lexicographic order.
pub fn construction_kt(n: usize, t: usize, a: &QFreeSet) -> Result<ColoredPacking> {
    if t < 3 {
        return Err(Error::InvalidArgument(format!("clique size t = {t} < 3")));
    }
    if (a.q() as usize) < t - 2 {
        return Err(Error::Precondition(format!(
            "slope set is only {}-free but K_{t} needs {}-free",
            a.q(),
            t - 2
        )));
    }
    if let Some(&k) = a.elements().iter().find(|&&k| k < 1 || k as usize > n) {
        return Err(Error::Precondition(format!("slope {k} outside 1..={n}")));
    }
    let offset = |i: usize| n * (i - 1) * i / 2;
    let mut copies = Vec::with_capacity(n * a.len());
    for l in 1..=n {
        for &k in a.elements() {
            let k = k as usize;
            copies.push((1..=t).map(|i| offset(i) + l + (i - 1) * k - 1).collect());
        }
    }
    ColoredPacking::new(t * (t + 1) * n / 2, SimpleGraph::complete(t), copies)
}

/// Perfect pentagon decomposition of `C5[m]` for odd `m`: copy `(a, d)` visits
/// `(c, a + c·d mod m)` for classes `c = 0..5`. Consecutive classes recover
/// `d` from the difference; the closing edge needs `4` invertible mod `m`.
pub fn c5_blowup_packing(m: usize) -> Result<ColoredPacking> {
    if m == 0 || m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "pentagon decomposition needs odd m, got {m}: the edge between classes 5 and 1 \
             has slope 4d, which is only a bijection in d when gcd(4, m) = 1"
        )));
    }
    let mut copies = Vec::with_capacity(m * m);
    for a in 0..m {
        for d in 0..m {
            copies.push((0..5).map(|c| c * m + (a + c * d) % m).collect());
        }
    }
    ColoredPacking::new(5 * m, SimpleGraph::cycle(5)?, copies)
}

/// `K5` as two edge-disjoint pentagons.
pub fn k5_double_pentagon() -> ColoredPacking {
    ColoredPacking::new(
        5,
        SimpleGraph::cycle(5).expect("C5"),
        vec![vec![0, 1, 2, 3, 4], vec![0, 2, 4, 1, 3]],
    )
    .expect("known packing")
}

/// Fractions of the five classes `A1, A2, B1, B2, C` of an unbalanced
/// pentagon blow-up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnbalancedBlowupShape {
    #[serde(with = "rational::serde_str")]
    pub alpha: Rational,
    #[serde(with = "rational::serde_str")]
    pub beta: Rational,
    #[serde(with = "rational::serde_str")]
    pub gamma: Rational,
    pub n: usize,
}

impl UnbalancedBlowupShape {
    pub fn new(alpha: Rational, beta: Rational, gamma: Rational, n: usize) -> Result<Self> {
        if alpha.is_negative() || beta.is_negative() || gamma.is_negative() {
            return Err(Error::InvalidArgument(
                "class fractions must be nonnegative".into(),
            ));
        }
        let total = &alpha * BigInt::from(2) + &beta * BigInt::from(2) + &gamma;
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "2α + 2β + γ = {} ≠ 1",
                rational::format(&total)
            )));
        }
        Ok(UnbalancedBlowupShape {
            alpha,
            beta,
            gamma,
            n,
        })
    }

    /// Same fractions on a different vertex count.
    pub fn with_n(&self, n: usize) -> Self {
        UnbalancedBlowupShape { n, ..self.clone() }
    }

    /// `[|A1|, |A2|, |B1|, |B2|, |C|]`: A and B rounded to nearest (ties up),
    /// C takes the remainder.
    pub fn class_sizes(&self) -> Result<[usize; 5]> {
        let n = Rational::from_integer(BigInt::from(self.n));
        let a = rational::round_half_up(&(&self.alpha * &n));
        let b = rational::round_half_up(&(&self.beta * &n));
        let c: BigInt = BigInt::from(self.n) - &a * 2u32 - &b * 2u32;
        if c.is_negative() {
            return Err(Error::InvalidArgument(format!(
                "rounded classes overflow n = {}: |C| would be {c}",
                self.n
            )));
        }
        let to = |x: &BigInt| x.to_usize().expect("bounded by n");
        Ok([to(&a), to(&a), to(&b), to(&b), to(&c)])
    }
}

/// Complete bipartite blocks `A1–A2, A1–B1, A2–B2, B1–C, B2–C`, classes
/// flattened in the order `A1, A2, B1, B2, C`.
pub fn unbalanced_blowup(shape: &UnbalancedBlowupShape) -> Result<SimpleGraph> {
    let sizes = shape.class_sizes()?;
    let mut offsets = [0usize; 5];
    for i in 1..5 {
        offsets[i] = offsets[i - 1] + sizes[i - 1];
    }
    const A1: usize = 0;
    const A2: usize = 1;
    const B1: usize = 2;
    const B2: usize = 3;
    const C: usize = 4;
    let blocks = [(A1, A2), (A1, B1), (A2, B2), (B1, C), (B2, C)];
    let mut edges = Vec::new();
    for (x, y) in blocks {
        for u in offsets[x]..offsets[x] + sizes[x] {
            for v in offsets[y]..offsets[y] + sizes[y] {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::new(shape.n, edges)
}

/// Output of a construction family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Built {
    Packing(ColoredPacking),
    Graph(SimpleGraph),
}

#[derive(Clone, Debug, Default)]
pub struct FamilyParams {
    pub n: Option<usize>,
    pub t: Option<usize>,
    pub m: Option<usize>,
    pub q: Option<u32>,
    pub alpha: Option<Rational>,
    pub beta: Option<Rational>,
    pub gamma: Option<Rational>,
}

fn required<T: Clone>(value: &Option<T>, flag: &str, family: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::InvalidArgument(format!("family {family} needs --{flag}")))
}

pub trait Construction: Send + Sync {
    fn name(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    fn build(&self, params: &FamilyParams) -> Result<Built>;
}

struct CliquePacking;

impl Construction for CliquePacking {
    fn name(&self) -> &'static str {
        "kt"
    }

    fn summary(&self) -> &'static str {
        "K_t packing over a q-free slope set (needs --n, --t; --q defaults to t-2)"
    }

    fn build(&self, p: &FamilyParams) -> Result<Built> {
        let n = required(&p.n, "n", self.name())?;
        let t = required(&p.t, "t", self.name())?;
        let q = p.q.unwrap_or(t.saturating_sub(2).max(1) as u32);
        let slopes = behrend_q_free(n as i64, q)?;
        construction_kt(n, t, &slopes).map(Built::Packing)
    }
}

struct PentagonBlowup;

impl Construction for PentagonBlowup {
    fn name(&self) -> &'static str {
        "c5blowup"
    }

    fn summary(&self) -> &'static str {
        "perfect pentagon decomposition of C5[m], m odd (needs --m)"
    }

    fn build(&self, p: &FamilyParams) -> Result<Built> {
        let m = required(&p.m, "m", self.name())?;
        c5_blowup_packing(m).map(Built::Packing)
    }
}

struct DoublePentagon;

impl Construction for DoublePentagon {
    fn name(&self) -> &'static str {
        "k5"
    }

    fn summary(&self) -> &'static str {
        "K5 split into two pentagons"
    }

    fn build(&self, _: &FamilyParams) -> Result<Built> {
        Ok(Built::Packing(k5_double_pentagon()))
    }
}

struct Unbalanced;

impl Construction for Unbalanced {
    fn name(&self) -> &'static str {
        "unbalanced"
    }

    fn summary(&self) -> &'static str {
        "unbalanced C5 blow-up (needs --n, --alpha, --beta; --gamma defaults to 1-2α-2β)"
    }

    fn build(&self, p: &FamilyParams) -> Result<Built> {
        let n = required(&p.n, "n", self.name())?;
        let alpha = required(&p.alpha, "alpha", self.name())?;
        let beta = required(&p.beta, "beta", self.name())?;
        let gamma = match &p.gamma {
            Some(g) => g.clone(),
            None => Rational::one() - (&alpha + &beta) * BigInt::from(2),
        };
        let shape = UnbalancedBlowupShape::new(alpha, beta, gamma, n)?;
        unbalanced_blowup(&shape).map(Built::Graph)
    }
}

pub struct Registry {
    families: BTreeMap<&'static str, Box<dyn Construction>>,
}

impl Registry {
    pub fn empty() -> Self {
        Registry {
            families: BTreeMap::new(),
        }
    }

    pub fn builtin() -> Self {
        let mut r = Registry::empty();
        r.register(Box::new(CliquePacking));
        r.register(Box::new(PentagonBlowup));
        r.register(Box::new(DoublePentagon));
        r.register(Box::new(Unbalanced));
        r
    }

    pub fn register(&mut self, family: Box<dyn Construction>) {
        self.families.insert(family.name(), family);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Construction> {
        self.families.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.families.keys().copied()
    }

    pub fn build(&self, name: &str, params: &FamilyParams) -> Result<Built> {
        let family = self.get(name).ok_or_else(|| {
            let known: Vec<_> = self.names().collect();
            Error::InvalidArgument(format!(
                "unknown family {name:?} (known: {})",
                known.join(", ")
            ))
        })?;
        family.build(params)
    }
}

impl Default for Registry {
    fn default() -> Self {
        Registry::builtin()
    }
}

/// Total edges of the unbalanced blow-up from its class sizes.
pub fn unbalanced_edge_count(sizes: &[usize; 5]) -> usize {
    let [a1, a2, b1, b2, c] = *sizes;
    a1 * a2 + a1 * b1 + a2 * b2 + b1 * c + b2 * c
}
