use std::fs;
use std::io::Read;
use std::ops::RangeInclusive;
use std::path::Path;

use anyhow::{bail, Context, Result};
use mcturan::graph::{self, ColoredPacking, SimpleGraph};
use mcturan::rational::{self, Rational};
use serde_json::Value;

/// A graph shorthand (`k3`, `c5`, `c5[3]`, …) or `json:<path>`.
pub fn graph_arg(text: &str) -> Result<SimpleGraph> {
    if let Some(path) = text.strip_prefix("json:") {
        let raw = fs::read_to_string(path).with_context(|| format!("reading graph file {path}"))?;
        let g: SimpleGraph = serde_json::from_str(&raw)
            .with_context(|| format!("malformed graph JSON in {path}"))?;
        return Ok(g);
    }
    Ok(graph::named(text)?)
}

/// `--G none` selects pure packing mode.
pub fn optional_graph_arg(text: &str) -> Result<Option<SimpleGraph>> {
    if text.eq_ignore_ascii_case("none") {
        Ok(None)
    } else {
        graph_arg(text).map(Some)
    }
}

pub fn rational_arg(text: &str) -> Result<Rational> {
    Ok(rational::parse(text)?)
}

/// `a..b`, inclusive, or a single value.
pub fn range_arg(text: &str) -> Result<RangeInclusive<u64>> {
    let parse = |s: &str| -> Result<u64> {
        s.trim()
            .parse()
            .with_context(|| format!("bad range bound {s:?} in {text:?}"))
    };
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
        None => {
            let v = parse(text)?;
            (v, v)
        }
    };
    if lo > hi {
        bail!("empty range {text:?}");
    }
    Ok(lo..=hi)
}

pub fn int_list_arg(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .with_context(|| format!("bad integer {s:?}"))
        })
        .collect()
}

pub fn read_input(path: Option<&Path>) -> Result<String> {
    let mut raw = String::new();
    match path {
        Some(p) => {
            raw = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut raw)
                .context("reading stdin")?;
        }
    }
    Ok(raw)
}

/// A bare packing, or any object carrying one under `packing` (such as a
/// `solve` or `verify` certificate).
pub fn packing_from_json(raw: &str) -> Result<ColoredPacking> {
    let value: Value = serde_json::from_str(raw).context("input is not JSON")?;
    let inner = match value.get("packing") {
        Some(p) => p.clone(),
        None => value,
    };
    serde_json::from_value(inner).context("input is not a valid packing")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(range_arg("3..10").unwrap(), 3..=10);
        assert_eq!(range_arg("3..=4").unwrap(), 3..=4);
        assert_eq!(range_arg("7").unwrap(), 7..=7);
        assert!(range_arg("5..2").is_err());
        assert!(range_arg("a..2").is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(
            int_list_arg("100, 1000,10000").unwrap(),
            vec![100, 1000, 10000]
        );
        assert!(int_list_arg("1,x").is_err());
    }

    #[test]
    fn packing_inside_certificate() {
        let raw = r#"{"value":1,"packing":{"n":3,"pattern":{"n":3,"edges":[[0,1],[0,2],[1,2]]},"copies":[[0,1,2]]}}"#;
        assert_eq!(packing_from_json(raw).unwrap().copy_count(), 1);
    }
}
