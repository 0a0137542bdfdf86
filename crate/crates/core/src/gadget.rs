//! Integer sets free of linear configurations.
//!
//! A `(k, h)`-gadget is a system of `k - 2` independent equations
//! `p·x_i + q·x_j = (p + q)·x_l` in `k` unknowns with `0 < p, q <= h`. Its
//! single-equation specialization is the q-limited-ratio triple
//! `λa + μb = (λ + μ)c` with `1 <= λ, μ <= q`, which for `q = 1` is a
//! three-term arithmetic progression.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::certificate::Verification;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// `p·x_i + q·x_j = (p + q)·x_l`, unknowns indexed from 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Equation {
    pub p: u32,
    pub q: u32,
    pub i: usize,
    pub j: usize,
    pub l: usize,
}

impl Equation {
    pub fn holds(&self, z: &[i64]) -> bool {
        let lhs = self.p as i128 * z[self.i] as i128 + self.q as i128 * z[self.j] as i128;
        lhs == (self.p + self.q) as i128 * z[self.l] as i128
    }

    fn row(&self, k: usize) -> Vec<Rational> {
        let mut row = vec![Rational::zero(); k];
        row[self.i] += Rational::from_integer(self.p.into());
        row[self.j] += Rational::from_integer(self.q.into());
        row[self.l] -= Rational::from_integer((self.p + self.q).into());
        row
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    k: usize,
    h: u32,
    equations: Vec<Equation>,
}

impl Gadget {
    pub fn new(k: usize, h: u32, equations: Vec<Equation>) -> Result<Self> {
        if k < 3 {
            return Err(Error::InvalidArgument(format!(
                "gadget needs k >= 3, got {k}"
            )));
        }
        if equations.len() != k - 2 {
            return Err(Error::InvalidArgument(format!(
                "a ({k}, {h})-gadget has {} equations, got {}",
                k - 2,
                equations.len()
            )));
        }
        let mut covered = vec![false; k];
        for e in &equations {
            if e.p == 0 || e.q == 0 || e.p > h || e.q > h {
                return Err(Error::InvalidArgument(format!(
                    "coefficients ({}, {}) outside 1..={h}",
                    e.p, e.q
                )));
            }
            if e.i >= k || e.j >= k || e.l >= k {
                return Err(Error::InvalidArgument(format!(
                    "unknown index out of 0..{k} in {e:?}"
                )));
            }
            if e.i == e.j || e.i == e.l || e.j == e.l {
                return Err(Error::InvalidArgument(format!("repeated unknown in {e:?}")));
            }
            covered[e.i] = true;
            covered[e.j] = true;
            covered[e.l] = true;
        }
        if let Some(x) = covered.iter().position(|c| !c) {
            return Err(Error::InvalidArgument(format!(
                "unknown x{x} appears in no equation"
            )));
        }
        let rows: Vec<Vec<Rational>> = equations.iter().map(|e| e.row(k)).collect();
        if rank(rows) != k - 2 {
            return Err(Error::InvalidArgument(
                "equations are linearly dependent".into(),
            ));
        }
        Ok(Gadget { k, h, equations })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn h(&self) -> u32 {
        self.h
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }
}

/// Rank over the rationals by exact Gaussian elimination.
fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        let inv = Rational::one() / rows[r][c].clone();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let factor = rows[i][c].clone() * inv.clone();
            for j in c..cols {
                let delta = factor.clone() * rows[r][j].clone();
                rows[i][j] -= delta;
            }
        }
        r += 1;
    }
    r
}

pub fn gadget_satisfied(g: &Gadget, z: &[i64]) -> Result<bool> {
    if z.len() != g.k {
        return Err(Error::InvalidArgument(format!(
            "gadget has {} unknowns, got {} values",
            g.k,
            z.len()
        )));
    }
    Ok(g.equations.iter().all(|e| e.holds(z)))
}

/// True iff `a, b, c` are pairwise distinct and `λa + μb = (λ + μ)c` for
/// some `1 <= λ, μ <= q`.
pub fn is_q_limited_triple(a: i64, b: i64, c: i64, q: u32) -> bool {
    if a == b || b == c || a == c {
        return false;
    }
    let (a, b, c) = (a as i128, b as i128, c as i128);
    (1..=q as i128).any(|l| (1..=q as i128).any(|m| l * a + m * b == (l + m) * c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TripleWitness {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub lambda: u32,
    pub mu: u32,
}

/// Scans all ordered pairs `(a, b)` and all `λ, μ <= q`. The reported
/// witness is the lexicographically smallest `(a, b, c, λ, μ)`, independent
/// of how the scan is split across threads.
pub fn verify_q_free(elements: &[i64], q: u32) -> Verification<TripleWitness> {
    let mut sorted = elements.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let set = &sorted;
    let witness = set.par_iter().find_map_first(|&a| {
        set.iter().find_map(|&b| {
            if a == b {
                return None;
            }
            let mut best: Option<TripleWitness> = None;
            for lambda in 1..=q {
                for mu in 1..=q {
                    let num = lambda as i128 * a as i128 + mu as i128 * b as i128;
                    let den = (lambda + mu) as i128;
                    if num % den != 0 {
                        continue;
                    }
                    let c = (num / den) as i64;
                    if set.binary_search(&c).is_ok() {
                        let w = TripleWitness {
                            a,
                            b,
                            c,
                            lambda,
                            mu,
                        };
                        if best.is_none_or(|x| (w.c, w.lambda, w.mu) < (x.c, x.lambda, x.mu)) {
                            best = Some(w);
                        }
                    }
                }
            }
            best
        })
    });
    Verification::from_witness(witness)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetWitness {
    pub gadget: Gadget,
    pub values: Vec<i64>,
}

pub const DEFAULT_GADGET_BUDGET: usize = 50_000_000;

/// All structurally valid `(k, h)`-gadgets. Equations are normalized to
/// `i < j`; gadgets are distinct as sets of equations.
pub fn enumerate_gadgets(k: usize, h: u32) -> Result<Vec<Gadget>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "gadget needs k >= 3, got {k}"
        )));
    }
    let forms = equation_forms(k, h);
    let mut out = Vec::new();
    let mut pick = Vec::new();
    fn choose(
        k: usize,
        h: u32,
        forms: &[Equation],
        start: usize,
        pick: &mut Vec<Equation>,
        out: &mut Vec<Gadget>,
    ) {
        if pick.len() == k - 2 {
            if let Ok(g) = Gadget::new(k, h, pick.clone()) {
                out.push(g);
            }
            return;
        }
        for idx in start..forms.len() {
            pick.push(forms[idx]);
            choose(k, h, forms, idx + 1, pick, out);
            pick.pop();
        }
    }
    choose(k, h, &forms, 0, &mut pick, &mut out);
    Ok(out)
}

fn equation_forms(k: usize, h: u32) -> Vec<Equation> {
    let mut forms = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            for l in (0..k).filter(|&l| l != i && l != j) {
                for p in 1..=h {
                    for q in 1..=h {
                        forms.push(Equation { p, q, i, j, l });
                    }
                }
            }
        }
    }
    forms
}

pub fn verify_gadget_free(
    elements: &[i64],
    k: usize,
    h: u32,
) -> Result<Verification<GadgetWitness>> {
    verify_gadget_free_with_budget(elements, k, h, DEFAULT_GADGET_BUDGET)
}

/// Checks every distinct ordered `k`-tuple of `elements` against every
/// `(k, h)`-gadget. `budget` caps `#gadgets × #tuples`.
pub fn verify_gadget_free_with_budget(
    elements: &[i64],
    k: usize,
    h: u32,
    budget: usize,
) -> Result<Verification<GadgetWitness>> {
    let mut set = elements.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.len() < k {
        return Ok(Verification::pass());
    }
    let forms = equation_forms(k, h);
    let tuples = (0..k).try_fold(1usize, |acc, i| acc.checked_mul(set.len() - i));
    let form_work = tuples.and_then(|t| t.checked_mul(forms.len()));
    match form_work {
        Some(w) if w <= budget => {}
        other => {
            return Err(Error::guard(
                "gadget-enumeration budget",
                budget,
                other.unwrap_or(usize::MAX),
            ))
        }
    }
    let gadgets = enumerate_gadgets(k, h)?;
    let gadget_forms: Vec<Vec<usize>> = gadgets
        .iter()
        .map(|g| {
            g.equations()
                .iter()
                .map(|e| forms.iter().position(|f| f == e).expect("normalized form"))
                .collect()
        })
        .collect();
    let work = tuples.and_then(|t| t.checked_mul(gadgets.len().max(1)));
    match work {
        Some(w) if w <= budget => {}
        other => {
            return Err(Error::guard(
                "gadget-enumeration budget",
                budget,
                other.unwrap_or(usize::MAX),
            ))
        }
    }

    let mut tuple = Vec::with_capacity(k);
    let mut used = vec![false; set.len()];
    let mut satisfied = vec![false; forms.len()];
    let mut found = None;
    search_tuples(
        &set,
        k,
        &forms,
        &gadgets,
        &gadget_forms,
        &mut tuple,
        &mut used,
        &mut satisfied,
        &mut found,
    );
    Ok(Verification::from_witness(found))
}

#[allow(clippy::too_many_arguments)]
fn search_tuples(
    set: &[i64],
    k: usize,
    forms: &[Equation],
    gadgets: &[Gadget],
    gadget_forms: &[Vec<usize>],
    tuple: &mut Vec<i64>,
    used: &mut [bool],
    satisfied: &mut [bool],
    found: &mut Option<GadgetWitness>,
) {
    if found.is_some() {
        return;
    }
    if tuple.len() == k {
        for (s, f) in satisfied.iter_mut().zip(forms) {
            *s = f.holds(tuple);
        }
        if let Some(g) = gadget_forms
            .iter()
            .position(|fs| fs.iter().all(|&f| satisfied[f]))
        {
            *found = Some(GadgetWitness {
                gadget: gadgets[g].clone(),
                values: tuple.clone(),
            });
        }
        return;
    }
    for idx in 0..set.len() {
        if used[idx] {
            continue;
        }
        used[idx] = true;
        tuple.push(set[idx]);
        search_tuples(
            set,
            k,
            forms,
            gadgets,
            gadget_forms,
            tuple,
            used,
            satisfied,
            found,
        );
        tuple.pop();
        used[idx] = false;
        if found.is_some() {
            return;
        }
    }
}

/// A subset of `1..=n` certified to contain no q-limited-ratio triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QFreeSet {
    q: u32,
    n: i64,
    elements: Vec<i64>,
}

impl QFreeSet {
    /// Sorts, range-checks and certifies `elements`.
    pub fn certify(q: u32, n: i64, mut elements: Vec<i64>) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("q must be at least 1".into()));
        }
        elements.sort_unstable();
        if elements.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("repeated element".into()));
        }
        if let Some(&x) = elements.iter().find(|&&x| x < 1 || x > n) {
            return Err(Error::InvalidArgument(format!(
                "element {x} outside 1..={n}"
            )));
        }
        let check = verify_q_free(&elements, q);
        if let Some(w) = check.witness {
            return Err(Error::Precondition(format!(
                "set is not {q}-free: {}·{} + {}·{} = {}·{}",
                w.lambda,
                w.a,
                w.mu,
                w.b,
                w.lambda + w.mu,
                w.c
            )));
        }
        Ok(QFreeSet { q, n, elements })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Below this universe size the exact search result is returned when it
/// beats the digit construction.
pub const BRUTE_FORCE_FALLBACK: i64 = 20;
const MAX_BASE: i64 = 1024;

/// Behrend-style construction: numbers below `n` whose base-`d` digits all lie
/// in `0..s`, with `2q(s - 1) < d` so that `λa + μb` never carries, and whose
/// digit vectors share one squared norm. A digitwise solution of
/// `λa + μb = (λ + μ)c` on a sphere is trivial by strict convexity. For `s = 2`
/// the whole digit box already works. The base is swept and the largest
/// certified candidate returned, shifted by one into `1..=n`.
pub fn behrend_q_free(n: i64, q: u32) -> Result<QFreeSet> {
    if q == 0 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    if n < 2 {
        return QFreeSet::certify(q, n.max(1), vec![1]);
    }
    let mut best: Vec<i64> = vec![1];
    let min_base = 2 * q as i64 + 1;
    for d in min_base..=n.min(MAX_BASE).max(min_base) {
        let s = (d - 1) / (2 * q as i64) + 1;
        for candidate in digit_candidates(n, d, s) {
            if candidate.len() > best.len() && verify_q_free(&candidate, q).passed() {
                best = candidate;
            }
        }
    }
    if n <= BRUTE_FORCE_FALLBACK {
        let (size, exact) = max_q_free_bruteforce(n, q)?;
        if size > best.len() {
            best = exact;
        }
    }
    QFreeSet::certify(q, n, best)
}

/// Largest sphere bucket (smallest norm on ties) and, for binary digits, the
/// whole box. Elements are `value + 1`.
fn digit_candidates(n: i64, d: i64, s: i64) -> Vec<Vec<i64>> {
    let mut values = Vec::new();
    let mut norms = Vec::new();
    // enumerate digit vectors, least significant first, with value < n
    fn rec(
        n: i64,
        d: i64,
        s: i64,
        place: i64,
        value: i64,
        norm: i64,
        values: &mut Vec<i64>,
        norms: &mut Vec<i64>,
    ) {
        if place > (n - 1) {
            values.push(value);
            norms.push(norm);
            return;
        }
        for digit in 0..s {
            let v = value + digit * place;
            if v >= n {
                break;
            }
            let next = place.checked_mul(d).unwrap_or(i64::MAX);
            rec(n, d, s, next, v, norm + digit * digit, values, norms);
        }
    }
    rec(n, d, s, 1, 0, 0, &mut values, &mut norms);

    let mut by_norm: std::collections::BTreeMap<i64, Vec<i64>> = std::collections::BTreeMap::new();
    for (&v, &r) in values.iter().zip(&norms) {
        by_norm.entry(r).or_default().push(v + 1);
    }
    let mut out = Vec::new();
    if let Some(bucket) = by_norm
        .values()
        .fold(None::<&Vec<i64>>, |acc, b| match acc {
            Some(a) if a.len() >= b.len() => Some(a),
            _ => Some(b),
        })
    {
        let mut b = bucket.clone();
        b.sort_unstable();
        out.push(b);
    }
    if s == 2 {
        let mut all: Vec<i64> = values.iter().map(|v| v + 1).collect();
        all.sort_unstable();
        out.push(all);
    }
    out
}

pub const BRUTE_FORCE_LIMIT: i64 = 60;

/// Exact maximum q-free subset of `1..=n` by branch and bound. The bound uses
/// translation invariance: any interval of length `L` holds at most `M(L)`
/// elements, where `M` is tabulated for shorter lengths first.
pub fn max_q_free_bruteforce(n: i64, q: u32) -> Result<(usize, Vec<i64>)> {
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::guard(
            "q-free brute-force universe",
            BRUTE_FORCE_LIMIT as usize,
            n as usize,
        ));
    }
    if q == 0 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    if n <= 0 {
        return Ok((0, Vec::new()));
    }
    let n = n as usize;
    let mut table = vec![0usize; n + 1];
    let mut witness = Vec::new();
    for len in 1..=n {
        let mut search = IntervalSearch {
            len,
            q: q as i64,
            table: &table,
            best: table[len - 1],
            best_set: Vec::new(),
            current: Vec::new(),
            member: vec![false; len + 1],
        };
        search.go(1);
        if search.best_set.is_empty() {
            // M(len) = M(len - 1): extend with the previous optimum
            search.best_set = witness.clone();
        }
        let (best, best_set) = (search.best, search.best_set);
        table[len] = best;
        witness = best_set;
    }
    Ok((table[n], witness))
}

struct IntervalSearch<'a> {
    len: usize,
    q: i64,
    table: &'a [usize],
    best: usize,
    best_set: Vec<i64>,
    current: Vec<i64>,
    member: Vec<bool>,
}

impl IntervalSearch<'_> {
    fn go(&mut self, x: usize) {
        if self.current.len() > self.best {
            self.best = self.current.len();
            self.best_set = self.current.clone();
        }
        if x > self.len {
            return;
        }
        // more elements can only come from x..=len
        let rest = self.len - x + 1;
        let bound = if rest < self.len {
            self.table[rest]
        } else {
            self.table[rest - 1] + 1
        };
        if self.current.len() + bound <= self.best {
            return;
        }
        if self.can_add(x as i64) {
            self.current.push(x as i64);
            self.member[x] = true;
            self.go(x + 1);
            self.member[x] = false;
            self.current.pop();
        }
        self.go(x + 1);
    }

    /// `x` exceeds every chosen element, so it can only be an endpoint.
    fn can_add(&self, x: i64) -> bool {
        for &a in &self.current {
            for l in 1..=self.q {
                for m in 1..=self.q {
                    let num = l * a + m * x;
                    if num % (l + m) == 0 && self.member[(num / (l + m)) as usize] {
                        return false;
                    }
                }
            }
        }
        true
    }
}
