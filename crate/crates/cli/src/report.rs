//! Long-format summary table: one `table,parameter,metric,value` row per
//! reported number.

use std::ops::RangeInclusive;

use anyhow::Result;
use mcturan::fractional::{
    balanced_decomposition_coeff, cube_root_triple, density, maximize_density, upper_bound_coeff,
};
use mcturan::gadget::{behrend_q_free, verify_q_free};
use mcturan::graph::SimpleGraph;
use mcturan::rational::{format, to_f64};
use mcturan::solver::{max_rainbow_free_packing, SearchConfig};

pub struct ReportPlan {
    pub densities: Option<RangeInclusive<u64>>,
    pub gadget_sizes: Option<Vec<i64>>,
    pub q: u32,
    pub upper_bounds: Option<RangeInclusive<u64>>,
    pub solver: Option<RangeInclusive<u64>>,
    pub budget: u64,
    pub threads: usize,
}

pub struct Row {
    pub table: &'static str,
    pub parameter: String,
    pub metric: &'static str,
    pub value: String,
}

fn row(
    table: &'static str,
    parameter: impl ToString,
    metric: &'static str,
    value: impl ToString,
) -> Row {
    Row {
        table,
        parameter: parameter.to_string(),
        metric,
        value: value.to_string(),
    }
}

pub fn build(plan: &ReportPlan) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    if let Some(ks) = &plan.densities {
        for k in ks.clone() {
            let k = k as u32;
            let opt = maximize_density(k)?;
            rows.push(row("density", k, "optimizedDensity", opt.value));
            if k >= 3 {
                rows.push(row(
                    "density",
                    k,
                    "paperTripleDensity",
                    density(&cube_root_triple(k)?)?,
                ));
            }
            rows.push(row(
                "density",
                k,
                "impliedCopyCoeff",
                opt.value / (2 * k + 1) as f64,
            ));
        }
    }
    if let Some(ks) = &plan.upper_bounds {
        for k in ks.clone() {
            let k = k as u32;
            let ub = upper_bound_coeff(k)?;
            let balanced = balanced_decomposition_coeff(k);
            rows.push(row("upper_bound", k, "upperBoundCoeff", to_f64(&ub)));
            rows.push(row("upper_bound", k, "upperBoundCoeffExact", format(&ub)));
            rows.push(row("upper_bound", k, "balancedCoeff", to_f64(&balanced)));
            rows.push(row(
                "upper_bound",
                k,
                "balancedCoeffExact",
                format(&balanced),
            ));
        }
    }
    if let Some(ns) = &plan.gadget_sizes {
        for &n in ns {
            let set = behrend_q_free(n, plan.q)?;
            let certified = verify_q_free(set.elements(), plan.q).passed();
            rows.push(row("gadget", n, "size", set.len()));
            rows.push(row("gadget", n, "certified", certified));
        }
    }
    if let Some(ns) = &plan.solver {
        let c5 = SimpleGraph::cycle(5)?;
        let k3 = SimpleGraph::complete(3);
        for n in ns.clone() {
            let n = n as usize;
            let cfg = SearchConfig::new(n, c5.clone(), Some(k3.clone()))
                .with_budget(plan.budget)
                .with_threads(plan.threads);
            let out = max_rainbow_free_packing(&cfg)?;
            rows.push(row("solver", n, "value", out.value));
            rows.push(row("solver", n, "optimal", out.optimal));
            rows.push(row("solver", n, "quadraticTerm", (n * n) as f64 / 25.0));
        }
    }
    Ok(rows)
}
