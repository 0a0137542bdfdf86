//! Weight systems for fractional odd-cycle packings of unbalanced pentagon
//! blow-ups, the resulting edge density, its maximization, and reference
//! coefficients.
//!
//! A weight triple `(λ, μ, δ)` spreads fractional `C_{2k+1}` weight over three
//! cycle families, distinguished by which class pair carries their `2k - 3`
//! long edges (`B_i–C`, `A_i–B_i`, `A_1–A_2`). Asking every edge to be fully
//! loaded fixes the class ratios and hence the density.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, Num, One};
use serde::{Deserialize, Serialize};

use crate::construct::UnbalancedBlowupShape;
use crate::error::{Error, Result};
use crate::graph::{chromatic_number, SimpleGraph};
use crate::rational::{self, Rational};

/// Scalars the density formulas are evaluated over (`f64` or exact
/// rationals).
pub trait Scalar: Clone + PartialOrd + Num + FromPrimitive + std::fmt::Debug {}

impl<T: Clone + PartialOrd + Num + FromPrimitive + std::fmt::Debug> Scalar for T {}

fn lit<T: Scalar>(x: i64) -> T {
    T::from_i64(x).expect("small integer")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightTriple<T> {
    /// Cycle length is `2k + 1`.
    pub k: u32,
    pub lambda: T,
    pub mu: T,
    pub delta: T,
}

impl<T: Scalar> WeightTriple<T> {
    pub fn new(k: u32, lambda: T, mu: T, delta: T) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "cycle parameter k = {k} < 2"
            )));
        }
        let zero = T::zero();
        if lambda < zero || mu < zero || delta < zero {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        if lambda.is_zero() && mu.is_zero() && delta.is_zero() {
            return Err(Error::InvalidArgument("weights are all zero".into()));
        }
        Ok(WeightTriple {
            k,
            lambda,
            mu,
            delta,
        })
    }

    pub fn scaled(&self, factor: T) -> Result<Self> {
        WeightTriple::new(
            self.k,
            self.lambda.clone() * factor.clone(),
            self.mu.clone() * factor.clone(),
            self.delta.clone() * factor,
        )
    }

    /// Loads of the `A1–A2`, `A_i–B_i` and `B_i–C` blocks.
    fn loads(&self) -> (T, T, T) {
        let k = lit::<T>(self.k as i64);
        let one = T::one();
        let two = lit::<T>(2);
        let three = lit::<T>(3);
        let (l, m, d) = (self.lambda.clone(), self.mu.clone(), self.delta.clone());
        let aa = l.clone() + m.clone() + (two * k.clone() - three) * d.clone();
        let ab = l.clone() + (k.clone() - one.clone()) * m.clone() + d.clone();
        let bc = (k - one) * l + m + d;
        (aa, ab, bc)
    }
}

/// `(β/α, γ/α)` from the full-load equations.
pub fn class_ratios<T: Scalar>(w: &WeightTriple<T>) -> Result<(T, T)> {
    let (aa, ab, bc) = w.loads();
    if aa.is_zero() || ab.is_zero() {
        return Err(Error::Degenerate(format!(
            "zero load denominator for {w:?}"
        )));
    }
    Ok((ab.clone() / aa, bc / ab))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassFractions<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
}

/// Class fractions normalized by `2α + 2β + γ = 1`.
pub fn solve_abg<T: Scalar>(w: &WeightTriple<T>) -> Result<ClassFractions<T>> {
    let (rb, rc) = class_ratios(w)?;
    let two = lit::<T>(2);
    let alpha = T::one() / (two.clone() + two * rb.clone() + rc.clone());
    Ok(ClassFractions {
        beta: rb * alpha.clone(),
        gamma: rc * alpha.clone(),
        alpha,
    })
}

impl<T: Scalar> ClassFractions<T> {
    /// `|E| / n²` of the blow-up with these fractions: `α² + 2αβ + 2βγ`.
    pub fn edge_density(&self) -> T {
        let two = lit::<T>(2);
        self.alpha.clone() * self.alpha.clone()
            + two.clone() * self.alpha.clone() * self.beta.clone()
            + two * self.beta.clone() * self.gamma.clone()
    }
}

impl ClassFractions<Rational> {
    pub fn shape(&self, n: usize) -> Result<UnbalancedBlowupShape> {
        UnbalancedBlowupShape::new(self.alpha.clone(), self.beta.clone(), self.gamma.clone(), n)
    }
}

impl ClassFractions<f64> {
    /// Exact binary values of `α` and `β`; `γ` absorbs the rounding so the
    /// shape identity holds exactly.
    pub fn shape(&self, n: usize) -> Result<UnbalancedBlowupShape> {
        let conv = |x: f64| {
            rational::from_f64(x)
                .ok_or_else(|| Error::Degenerate(format!("non-finite fraction {x}")))
        };
        let alpha = conv(self.alpha)?;
        let beta = conv(self.beta)?;
        let gamma = Rational::one() - (&alpha + &beta) * BigInt::from(2);
        UnbalancedBlowupShape::new(alpha, beta, gamma, n)
    }
}

/// Edge density of the fully loaded blow-up:
/// `(2k+1)(λ+μ+δ) / ((λ+μ+(2k-3)δ) · (2 + 2β/α + γ/α)²)`.
pub fn density<T: Scalar>(w: &WeightTriple<T>) -> Result<T> {
    let (aa, _, _) = w.loads();
    let (rb, rc) = class_ratios(w)?;
    let two = lit::<T>(2);
    let k = lit::<T>(w.k as i64);
    let total = w.lambda.clone() + w.mu.clone() + w.delta.clone();
    let spread = two.clone() + two.clone() * rb + rc;
    Ok((two * k + T::one()) * total / (aa * spread.clone() * spread))
}

/// `(0, 1, (-1 + ∛(4k+15)) / 2)`.
pub fn cube_root_triple(k: u32) -> Result<WeightTriple<f64>> {
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "weight choice needs k >= 3, got {k}"
        )));
    }
    let delta = (-1.0 + (4.0 * k as f64 + 15.0).cbrt()) / 2.0;
    WeightTriple::new(k, 0.0, 1.0, delta)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityOptimum {
    pub triple: WeightTriple<f64>,
    pub value: f64,
}

pub const GRID_STEPS: u32 = 64;
const FINAL_STEP: f64 = 1e-9;

/// Maximizes the density over the simplex `λ + μ + δ = 1` (the density is
/// scale invariant). A `1/64` grid seeds pairwise-transfer coordinate search
/// with a halving step down to `1e-9`. Grid ties go to the lexicographically
/// smallest triple.
pub fn maximize_density(k: u32) -> Result<DensityOptimum> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "cycle parameter k = {k} < 2"
        )));
    }
    let eval = |x: &[f64; 3]| -> f64 {
        WeightTriple::new(k, x[0], x[1], x[2])
            .and_then(|w| density(&w))
            .unwrap_or(f64::NEG_INFINITY)
    };
    let steps = GRID_STEPS;
    let mut best = [0.0, 0.0, 1.0];
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..=steps {
        for j in 0..=steps - i {
            let x = [
                i as f64 / steps as f64,
                j as f64 / steps as f64,
                (steps - i - j) as f64 / steps as f64,
            ];
            let v = eval(&x);
            if v > best_value {
                best = x;
                best_value = v;
            }
        }
    }

    const DIRECTIONS: [(usize, usize); 3] = [(0, 2), (1, 2), (0, 1)];
    let mut step = 1.0 / steps as f64;
    while step >= FINAL_STEP {
        let mut improved = false;
        for &(up, down) in &DIRECTIONS {
            for (from, to) in [(down, up), (up, down)] {
                // move mass from `from` to `to`, clamped to the simplex
                let amount = step.min(best[from]);
                if amount <= 0.0 {
                    continue;
                }
                let mut x = best;
                x[from] -= amount;
                x[to] += amount;
                let v = eval(&x);
                if v > best_value {
                    best = x;
                    best_value = v;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    Ok(DensityOptimum {
        triple: WeightTriple::new(k, best[0], best[1], best[2])?,
        value: best_value,
    })
}

/// `k / (2(2k+1)²)`: copies of `C_{2k+1}` per `n²` allowed by the counting
/// bound.
pub fn upper_bound_coeff(k: u32) -> Result<Rational> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let k = k as i64;
    Ok(rational::ratio(k, 2 * (2 * k + 1) * (2 * k + 1)))
}

/// `1 / (5(2k+1))`: copies per `n²` from decomposing the balanced blow-up
/// `C5[n/5]` into `C_{2k+1}`.
pub fn balanced_decomposition_coeff(k: u32) -> Rational {
    rational::ratio(1, 5 * (2 * k as i64 + 1))
}

/// `(1 - 1/(χ(G) - 1)) / (2e(F))` for `χ(F) < χ(G)`.
pub fn reference_coeffs(pattern: &SimpleGraph, forbidden: &SimpleGraph) -> Result<Rational> {
    let chi_f = chromatic_number(pattern)?;
    let chi_g = chromatic_number(forbidden)?;
    if chi_f >= chi_g {
        return Err(Error::Precondition(format!(
            "coefficient needs χ(F) < χ(G), got χ(F) = {chi_f}, χ(G) = {chi_g}"
        )));
    }
    if pattern.edge_count() == 0 {
        return Err(Error::Precondition("pattern has no edges".into()));
    }
    let turan = Rational::one() - rational::ratio(1, chi_g as i64 - 1);
    Ok(turan / Rational::from_integer(BigInt::from(2 * pattern.edge_count())))
}
