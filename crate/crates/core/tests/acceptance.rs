//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use mcturan::construct::{c5_blowup_packing, construction_kt, k5_double_pentagon};
use mcturan::fractional::{cube_root_triple, density, maximize_density, upper_bound_coeff};
use mcturan::gadget::{behrend_q_free, is_q_limited_triple, max_q_free_bruteforce, verify_q_free};
use mcturan::graph::{blow_up, union_graph, BlowupSpec};
use mcturan::lp::lp_fractional_packing;
use mcturan::rainbow::{classify_order, find_rainbow, pentagon_audit, GrowthOrder};
use mcturan::rational::{int, ratio, to_f64, Rational};
use mcturan::solver::{max_rainbow_free_packing, oracle_max_packing, SearchConfig};
use mcturan::{SimpleGraph, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn k(t: usize) -> SimpleGraph {
    SimpleGraph::complete(t)
}

fn c5() -> SimpleGraph {
    SimpleGraph::cycle(5).unwrap()
}

fn random_host(rng: &mut ChaCha8Rng, n: usize, p: f64) -> SimpleGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    SimpleGraph::new(n, edges).unwrap()
}

fn clique_packings() -> Check {
    let mut slowest = Duration::ZERO;
    for t in 3..=5 {
        for n in [10usize, 50, 200] {
            let start = Instant::now();
            let a = behrend_q_free(n as i64, t as u32 - 2).map_err(|e| e.to_string())?;
            let p = construction_kt(n, t, &a).map_err(|e| e.to_string())?;
            ensure!(
                p.edge_coloring().is_ok(),
                "t={t} n={n}: copies share an edge"
            );
            ensure!(
                p.copy_count() == n * a.len(),
                "t={t} n={n}: {} copies, expected {}",
                p.copy_count(),
                n * a.len()
            );
            let union = union_graph(&p).map_err(|e| e.to_string())?;
            ensure!(
                union.edge_count() == p.copy_count() * t * (t - 1) / 2,
                "t={t} n={n}: union edge count mismatch"
            );
            let rainbow = find_rainbow(&p, &k(3)).map_err(|e| e.to_string())?;
            ensure!(
                rainbow.is_none(),
                "t={t} n={n}: rainbow triangle {rainbow:?}"
            );
            let took = start.elapsed();
            if n == 200 {
                ensure!(took < Duration::from_secs(60), "t={t} n=200 took {took:?}");
                slowest = slowest.max(took);
            }
        }
    }
    Ok(format!(
        "9 instances, slowest n=200 run {:.2}s",
        slowest.as_secs_f64()
    ))
}

fn pentagon_decompositions() -> Check {
    for m in (1..=15).step_by(2) {
        let p = c5_blowup_packing(m).map_err(|e| e.to_string())?;
        let host = blow_up(&BlowupSpec::uniform(c5(), m).unwrap());
        ensure!(p.copy_count() == m * m, "m={m}: {} copies", p.copy_count());
        let coloring = p.edge_coloring().map_err(|e| e.to_string())?;
        let covered: BTreeSet<_> = coloring.keys().copied().collect();
        let expected: BTreeSet<_> = host.edges().iter().copied().collect();
        ensure!(
            covered == expected,
            "m={m}: copies do not cover C5[m] exactly"
        );
        ensure!(
            find_rainbow(&p, &k(3))
                .map_err(|e| e.to_string())?
                .is_none(),
            "m={m}: rainbow triangle"
        );
    }
    let five = c5_blowup_packing(5).unwrap();
    ensure!(
        five.copy_count() == 25,
        "m=5 gives {} copies",
        five.copy_count()
    );
    Ok("m = 1, 3, ..., 15 decompose exactly; m=5 has 25 copies".into())
}

fn k5_double_pentagon_optimum() -> Check {
    let out = max_rainbow_free_packing(&SearchConfig::new(5, c5(), Some(k(3))))
        .map_err(|e| e.to_string())?;
    let oracle = oracle_max_packing(5, &c5(), Some(&k(3))).map_err(|e| e.to_string())?;
    ensure!(out.optimal, "search did not finish");
    ensure!(out.value == 2, "solver value {}", out.value);
    ensure!(oracle == 2, "oracle value {oracle}");
    ensure!(out.value > 1, "no excess over (n/5)² = 1");
    ensure!(
        find_rainbow(&out.packing, &k(3)).unwrap().is_none() && out.packing.edge_coloring().is_ok(),
        "witness invalid"
    );
    Ok(format!(
        "ex = 2 (optimal, oracle agrees, {} nodes)",
        out.nodes
    ))
}

fn pentagon_audits() -> Check {
    for m in (1..=15).step_by(2) {
        let a = pentagon_audit(&c5_blowup_packing(m).unwrap()).map_err(|e| e.to_string())?;
        ensure!(a.holds(), "C5[{m}]: {:?}", a.violations);
        ensure!(
            a.double_sum == a.half_sum_squares,
            "C5[{m}]: double sum identity"
        );
    }
    let a = pentagon_audit(&k5_double_pentagon()).map_err(|e| e.to_string())?;
    ensure!(a.holds(), "K5: {:?}", a.violations);
    ensure!(
        a.double_sum == 40 && a.qm_am_bound == int(40),
        "K5: double sum {} vs bound {}",
        a.double_sum,
        a.qm_am_bound
    );
    ensure!(a.n_star_total <= 5 * a.t as u64, "K5: N* total");

    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_edc5);
    let mut audited = 0;
    let mut nonempty = 0;
    while audited < 100 {
        let n = rng.gen_range(5..=9);
        let p = rng.gen_range(0.5..=1.0);
        let host = random_host(&mut rng, n, p);
        let cfg = SearchConfig::new(n, c5(), Some(k(3)))
            .with_host(host)
            .with_budget(20_000);
        let out = max_rainbow_free_packing(&cfg).map_err(|e| e.to_string())?;
        let a = pentagon_audit(&out.packing).map_err(|e| e.to_string())?;
        ensure!(
            a.holds(),
            "random packing {:?}: {:?}",
            out.packing.copies(),
            a.violations
        );
        ensure!(
            a.double_sum == a.half_sum_squares,
            "random packing: double sum identity"
        );
        audited += 1;
        if a.t > 0 {
            nonempty += 1;
        }
    }
    ensure!(
        nonempty >= 50,
        "only {nonempty} of the random packings are nonempty"
    );
    Ok(format!(
        "C5[m] m<=15, K5 (40 = 40), {audited} random packings ({nonempty} nonempty)"
    ))
}

/// Maximum of the `λ = 0` slice at `k = 3` by golden-section search on
/// `x = δ/μ`, computed without the library's density code.
fn slice_optimum_independent() -> f64 {
    let f = |x: f64| {
        let r = (2.0 + x) / (1.0 + 3.0 * x);
        let s = (1.0 + x) / (2.0 + x);
        let spread = 2.0 + 2.0 * r + s;
        7.0 * (1.0 + x) / ((1.0 + 3.0 * x) * spread * spread)
    };
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.1f64, 10.0f64);
    for _ in 0..200 {
        let a = hi - phi * (hi - lo);
        let b = lo + phi * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    f((lo + hi) / 2.0)
}

const K3_OPTIMUM: f64 = 0.2016149093821668;

fn density_numerics() -> Check {
    let start = Instant::now();
    let d3 = density(&cube_root_triple(3).unwrap()).unwrap();
    ensure!(
        (d3 - 0.2016).abs() <= 5e-5,
        "cube-root choice at k=3 gives {d3}"
    );
    let opt = maximize_density(3).unwrap();
    let independent = slice_optimum_independent();
    ensure!(
        (independent - K3_OPTIMUM).abs() < 1e-12,
        "golden section gives {independent}"
    );
    ensure!(
        (opt.value - 0.201615).abs() <= 1e-5,
        "optimizer gives {}",
        opt.value
    );
    ensure!(
        (opt.value - independent).abs() <= 1e-5,
        "optimizer {} vs {independent}",
        opt.value
    );
    let mut prev = 0.0;
    for kk in 3..=200 {
        let d = density(&cube_root_triple(kk).unwrap()).unwrap();
        ensure!(d > prev, "not increasing at k={kk}: {d} <= {prev}");
        ensure!(d < 0.25, "k={kk}: {d} >= 1/4");
        prev = d;
    }
    let far = density(&cube_root_triple(10_000).unwrap()).unwrap();
    ensure!(far > 0.24 && far < 0.25, "k=10^4 gives {far}");
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!(
        "0.2016 at k=3, optimum {:.7} (independent {:.7}), k=10^4 -> {far:.5}, {:.2}s",
        opt.value,
        independent,
        took.as_secs_f64()
    ))
}

fn upper_bound_consistency() -> Check {
    ensure!(
        upper_bound_coeff(2).unwrap() == ratio(1, 25),
        "k=2 coefficient"
    );
    let mut tightest = 0.0f64;
    for kk in 3..=50u32 {
        let implied = maximize_density(kk).unwrap().value / (2 * kk + 1) as f64;
        let bound = to_f64(&upper_bound_coeff(kk).unwrap());
        ensure!(
            implied <= bound * (1.0 + 1e-6),
            "k={kk}: {implied} > {bound}"
        );
        tightest = tightest.max(implied / bound);
    }
    Ok(format!(
        "1/25 exact; max implied/bound ratio {tightest:.6} over k in 3..=50"
    ))
}

fn naive_q_free(set: &[i64], q: u32) -> bool {
    for &a in set {
        for &b in set {
            for &c in set {
                if is_q_limited_triple(a, b, c, q) {
                    return false;
                }
            }
        }
    }
    true
}

/// Largest q-free subset of `1..=n` by plain exhaustive extension.
fn exhaustive_max(n: i64, q: u32) -> usize {
    fn rec(next: i64, n: i64, q: u32, cur: &mut Vec<i64>, best: &mut usize) {
        *best = (*best).max(cur.len());
        for x in next..=n {
            let ok = cur.iter().all(|&a| {
                cur.iter().all(|&b| {
                    !is_q_limited_triple(a, b, x, q)
                        && !is_q_limited_triple(a, x, b, q)
                        && !is_q_limited_triple(x, a, b, q)
                })
            });
            if ok {
                cur.push(x);
                rec(x + 1, n, q, cur, best);
                cur.pop();
            }
        }
    }
    let mut best = 0;
    rec(1, n, q, &mut Vec::new(), &mut best);
    best
}

fn gadget_soundness() -> Check {
    let mut sizes = Vec::new();
    for n in [100i64, 1000, 10_000] {
        for q in 1..=3 {
            let a = behrend_q_free(n, q).map_err(|e| e.to_string())?;
            ensure!(
                verify_q_free(a.elements(), q).passed(),
                "n={n} q={q}: not q-free"
            );
            ensure!(
                a.elements().iter().all(|&x| (1..=n).contains(&x)),
                "n={n}: out of range"
            );
            if q == 2 {
                sizes.push(a.len());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xa9);
    for q in 1..=3u32 {
        let mut prev = 0;
        for n in 1..=30i64 {
            let (m, w) = max_q_free_bruteforce(n, q).map_err(|e| e.to_string())?;
            ensure!(
                w.len() == m && naive_q_free(&w, q),
                "n={n} q={q}: brute witness invalid"
            );
            ensure!(
                verify_q_free(&w, q).passed(),
                "n={n} q={q}: verifier rejects brute witness"
            );
            ensure!(
                m >= prev && m <= prev + 1,
                "n={n} q={q}: M jumps from {prev} to {m}"
            );
            prev = m;
            if n <= 20 {
                let e = exhaustive_max(n, q);
                ensure!(
                    e == m,
                    "n={n} q={q}: exhaustive {e} vs branch and bound {m}"
                );
            }
            let b = behrend_q_free(n, q).map_err(|e| e.to_string())?;
            ensure!(b.len() <= m, "n={n} q={q}: construction beats the maximum");
            if n <= 20 {
                ensure!(b.len() == m, "n={n} q={q}: fallback is not maximum");
            }
            for _ in 0..50 {
                let subset: Vec<i64> = (1..=n).filter(|_| rng.gen_bool(0.4)).collect();
                let v = verify_q_free(&subset, q);
                ensure!(
                    v.passed() == naive_q_free(&subset, q),
                    "verifier disagrees on {subset:?}"
                );
                if let Some(t) = &v.witness {
                    ensure!(
                        t.lambda as i64 * t.a + t.mu as i64 * t.b == (t.lambda + t.mu) as i64 * t.c,
                        "bad witness {t:?}"
                    );
                }
            }
        }
    }
    let classic = verify_q_free(&[1, 2, 4, 5, 10, 11, 13, 14], 1);
    ensure!(classic.verdict == Verdict::Pass, "classic set rejected");
    let bad = verify_q_free(&[1, 2, 3], 1);
    ensure!(bad.verdict == Verdict::Fail, "{{1,2,3}} accepted");
    let w = bad.witness.ok_or("no witness for {1,2,3}")?;
    ensure!(
        is_q_limited_triple(w.a, w.b, w.c, 1),
        "witness {w:?} is not a progression"
    );
    ensure!(
        sizes.windows(2).all(|s| s[1] > s[0]),
        "q=2 sizes do not grow: {sizes:?}"
    );
    Ok(format!(
        "q=2 sizes at n=10^2..10^4: {sizes:?}; oracle agrees for n<=30"
    ))
}

fn dichotomy() -> Check {
    let cases = [
        (c5(), k(3), GrowthOrder::QuadraticTheta),
        (k(2), k(3), GrowthOrder::QuadraticTheta),
        (k(3), k(3), GrowthOrder::SubquadraticLittleO),
        (k(4), k(3), GrowthOrder::SubquadraticLittleO),
        (k(5), k(3), GrowthOrder::SubquadraticLittleO),
        (k(4), k(4), GrowthOrder::SubquadraticLittleO),
        (k(5), k(4), GrowthOrder::SubquadraticLittleO),
        (k(5), k(5), GrowthOrder::SubquadraticLittleO),
    ];
    for (f, g, want) in &cases {
        let got = classify_order(f, g).map_err(|e| e.to_string())?;
        ensure!(
            got == *want,
            "F on {} edges, G on {} edges: {got:?}",
            f.edge_count(),
            g.edge_count()
        );
    }
    Ok(format!("{} pattern pairs classified", cases.len()))
}

fn lp_checks() -> Check {
    let host = blow_up(&BlowupSpec::uniform(c5(), 3).unwrap());
    let sol = lp_fractional_packing(&host, &c5()).map_err(|e| e.to_string())?;
    ensure!(sol.nu_star == int(9), "C5[3]: ν* = {}", sol.nu_star);
    ensure!(sol.certify(&host, &c5()), "C5[3]: certificate rejected");
    ensure!(
        c5_blowup_packing(3).unwrap().copy_count() == 9,
        "integral decomposition size"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x1b);
    let patterns = [k(3), c5(), SimpleGraph::cycle(4).unwrap()];
    for trial in 0..50 {
        let n = rng.gen_range(3..=8);
        let p = rng.gen_range(0.3..=1.0);
        let host = random_host(&mut rng, n, p);
        let f = &patterns[trial % patterns.len()];
        let sol = lp_fractional_packing(&host, f).map_err(|e| e.to_string())?;
        ensure!(sol.certify(&host, f), "trial {trial}: certificate rejected");
        let nu = if f.n() > n {
            0
        } else {
            let cfg = SearchConfig::new(n, f.clone(), None).with_host(host.clone());
            let out = max_rainbow_free_packing(&cfg).map_err(|e| e.to_string())?;
            ensure!(out.optimal, "trial {trial}: integral search incomplete");
            out.value
        };
        let cap = Rational::new(
            (host.edge_count() as i64).into(),
            (f.edge_count() as i64).into(),
        );
        ensure!(
            int(nu as i64) <= sol.nu_star && sol.nu_star <= cap,
            "trial {trial}: {nu} <= {} <= {} fails",
            sol.nu_star,
            cap
        );
    }
    Ok("C5[3] gives 9 exactly; sandwich holds on 50 random hosts".into())
}

fn solver_equivalence() -> Check {
    let mut instances = 0;
    for f in [k(3), k(4), c5()] {
        for n in 1..=5 {
            let oracle = match oracle_max_packing(n, &f, Some(&k(3))) {
                Ok(v) => v,
                Err(mcturan::Error::Guard { .. }) => continue,
                Err(e) => return Err(e.to_string()),
            };
            let mut witnesses = Vec::new();
            for threads in [1, 4] {
                let cfg = SearchConfig::new(n, f.clone(), Some(k(3))).with_threads(threads);
                let out = max_rainbow_free_packing(&cfg).map_err(|e| e.to_string())?;
                ensure!(out.optimal, "n={n}: incomplete");
                ensure!(
                    out.value == oracle,
                    "n={n}: solver {} vs oracle {oracle}",
                    out.value
                );
                witnesses.push(out.packing);
            }
            ensure!(
                witnesses[0] == witnesses[1],
                "n={n}: witness depends on thread count"
            );
            instances += 1;
        }
    }
    // a larger instance where the parallel split actually matters
    let cfg = SearchConfig::new(7, k(3), Some(k(3)));
    let one = max_rainbow_free_packing(&cfg.clone().with_threads(1)).map_err(|e| e.to_string())?;
    let four = max_rainbow_free_packing(&cfg.with_threads(4)).map_err(|e| e.to_string())?;
    ensure!(
        one.value == four.value && one.packing == four.packing,
        "n=7 triangles: outcomes differ across thread counts"
    );
    Ok(format!(
        "{instances} oracle instances agree; witnesses identical for 1 and 4 threads"
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("clique packings without rainbow triangles", clique_packings),
        ("pentagon blow-up decompositions", pentagon_decompositions),
        ("K5 double pentagon optimum", k5_double_pentagon_optimum),
        ("pentagon inequality audits", pentagon_audits),
        ("density numerics", density_numerics),
        ("upper bound consistency", upper_bound_consistency),
        ("gadget-set soundness", gadget_soundness),
        ("dichotomy classifier", dichotomy),
        ("fractional packing LP", lp_checks),
        ("solver and oracle equivalence", solver_equivalence),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
