//! Fractional packings as an exact rational linear program.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{edge, pattern_copies, SimpleGraph};
use crate::rational::{self, Rational};

pub const LP_COPY_LIMIT: usize = 2000;
pub const LP_EDGE_LIMIT: usize = 2000;

/// Optimal solution of `max c·x` subject to `Ax <= b`, `x >= 0`, with
/// `b >= 0`, together with an optimal dual.
#[derive(Clone, Debug, PartialEq)]
pub struct LpOptimum {
    pub value: Rational,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
}

/// Dense tableau simplex with Bland's rule, started from the slack basis.
pub fn simplex_max(a: &[Vec<Rational>], b: &[Rational], c: &[Rational]) -> Result<LpOptimum> {
    let rows = a.len();
    let cols = c.len();
    if b.len() != rows || a.iter().any(|r| r.len() != cols) {
        return Err(Error::InvalidArgument("inconsistent LP dimensions".into()));
    }
    if b.iter().any(|x| x.is_negative()) {
        return Err(Error::InvalidArgument("slack basis needs b >= 0".into()));
    }
    let width = cols + rows;
    let mut tab: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut t = row.clone();
            t.resize(width, Rational::zero());
            t[cols + i] = rational::int(1);
            t
        })
        .collect();
    let mut rhs = b.to_vec();
    let mut reduced: Vec<Rational> = c.iter().map(|x| -x.clone()).collect();
    reduced.resize(width, Rational::zero());
    let mut objective = Rational::zero();
    let mut basis: Vec<usize> = (cols..width).collect();

    while let Some(enter) = (0..width).find(|&j| reduced[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..rows {
            if !tab[i][enter].is_positive() {
                continue;
            }
            let ratio = &rhs[i] / &tab[i][enter];
            let better = match &leave {
                None => true,
                Some((l, r)) => ratio < *r || (ratio == *r && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        let Some((pivot_row, _)) = leave else {
            return Err(Error::Degenerate("LP is unbounded".into()));
        };

        let pivot = tab[pivot_row][enter].clone();
        let support: Vec<usize> = (0..width)
            .filter(|&j| !tab[pivot_row][j].is_zero())
            .collect();
        for &j in &support {
            tab[pivot_row][j] /= &pivot;
        }
        rhs[pivot_row] /= &pivot;
        let prow: Vec<(usize, Rational)> = support
            .iter()
            .map(|&j| (j, tab[pivot_row][j].clone()))
            .collect();
        let prhs = rhs[pivot_row].clone();
        for i in 0..rows {
            if i == pivot_row || tab[i][enter].is_zero() {
                continue;
            }
            let factor = tab[i][enter].clone();
            for (j, v) in &prow {
                tab[i][*j] -= &factor * v;
            }
            rhs[i] -= &factor * &prhs;
        }
        if !reduced[enter].is_zero() {
            let factor = reduced[enter].clone();
            for (j, v) in &prow {
                reduced[*j] -= &factor * v;
            }
            objective -= &factor * &prhs;
        }
        basis[pivot_row] = enter;
    }

    let mut primal = vec![Rational::zero(); cols];
    for (i, &var) in basis.iter().enumerate() {
        if var < cols {
            primal[var] = rhs[i].clone();
        }
    }
    let dual = reduced[cols..].to_vec();
    Ok(LpOptimum {
        value: objective,
        primal,
        dual,
    })
}

/// An optimal fractional packing with the dual edge weights certifying it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FractionalPacking {
    #[serde(with = "rational::serde_str")]
    pub nu_star: Rational,
    pub copies: Vec<Vec<usize>>,
    #[serde(with = "rational::serde_str_vec")]
    pub weights: Vec<Rational>,
    /// One dual value per host edge, in host edge order.
    #[serde(with = "rational::serde_str_vec")]
    pub duals: Vec<Rational>,
}

impl FractionalPacking {
    /// Re-checks primal feasibility, dual feasibility and equal objectives.
    pub fn certify(&self, host: &SimpleGraph, pattern: &SimpleGraph) -> bool {
        let one = rational::int(1);
        let index = |u: usize, v: usize| host.edges().binary_search(&edge(u, v)).ok();
        let mut load = vec![Rational::zero(); host.edge_count()];
        let mut dual_ok =
            self.duals.len() == host.edge_count() && self.duals.iter().all(|y| !y.is_negative());
        for (map, w) in self.copies.iter().zip(&self.weights) {
            if w.is_negative() || *w > one {
                return false;
            }
            let mut cover = Rational::zero();
            for &(a, b) in pattern.edges() {
                let Some(e) = index(map[a], map[b]) else {
                    return false;
                };
                load[e] += w;
                if dual_ok {
                    cover += &self.duals[e];
                }
            }
            dual_ok &= cover >= one;
        }
        let total: Rational = self.weights.iter().sum();
        let dual_total: Rational = self.duals.iter().sum();
        load.iter().all(|l| *l <= one)
            && dual_ok
            && total == self.nu_star
            && dual_total == self.nu_star
    }
}

/// `ν*`: maximum total weight on pattern copies of `host` with every edge
/// loaded at most 1. Each copy has an edge, so `ψ <= 1` is implied by the
/// edge rows and not stated separately.
pub fn lp_fractional_packing(
    host: &SimpleGraph,
    pattern: &SimpleGraph,
) -> Result<FractionalPacking> {
    if pattern.edge_count() == 0 {
        return Err(Error::InvalidArgument(
            "pattern needs at least one edge".into(),
        ));
    }
    if host.edge_count() > LP_EDGE_LIMIT {
        return Err(Error::guard("LP edge", LP_EDGE_LIMIT, host.edge_count()));
    }
    let copies = pattern_copies(host, pattern);
    if copies.len() > LP_COPY_LIMIT {
        return Err(Error::guard("LP copy", LP_COPY_LIMIT, copies.len()));
    }
    let mut a = vec![vec![Rational::zero(); copies.len()]; host.edge_count()];
    for (c, map) in copies.iter().enumerate() {
        for &(x, y) in pattern.edges() {
            let e = host
                .edges()
                .binary_search(&edge(map[x], map[y]))
                .expect("copy edge in host");
            a[e][c] = rational::int(1);
        }
    }
    let b = vec![rational::int(1); host.edge_count()];
    let c = vec![rational::int(1); copies.len()];
    let opt = simplex_max(&a, &b, &c)?;
    Ok(FractionalPacking {
        nu_star: opt.value,
        copies,
        weights: opt.primal,
        duals: opt.dual,
    })
}
