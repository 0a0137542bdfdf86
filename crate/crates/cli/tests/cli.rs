use std::io::Write;
use std::process::{Command, Output, Stdio};

use mcturan::graph::ColoredPacking;
use mcturan::rainbow::RainbowWitness;
use mcturan::SimpleGraph;
use serde_json::Value;

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mcturan"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

const RAINBOW_PACKING: &str =
    r#"{"n":6,"pattern":{"n":3,"edges":[[0,1],[0,2],[1,2]]},"copies":[[0,1,2],[0,3,4],[1,3,5]]}"#;

#[test]
fn construct_then_verify() {
    let built = run(&["construct", "--family", "k5"], None);
    assert!(built.status.success());
    let checked = run(&["verify", "--G", "k3"], Some(&stdout(&built)));
    assert_eq!(checked.status.code(), Some(0));
    let v = json(&checked);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["audit"]["doubleSum"], 40);
    assert_eq!(v["audit"]["qmAmBound"], "40");
}

#[test]
fn rainbow_witness_round_trips() {
    let first = run(&["verify", "--G", "k3"], Some(RAINBOW_PACKING));
    assert_eq!(first.status.code(), Some(2));
    let v = json(&first);
    assert_eq!(v["verdict"], "FAIL");
    let packing: ColoredPacking = serde_json::from_value(v["packing"].clone()).unwrap();
    let witness: RainbowWitness = serde_json::from_value(v["witness"].clone()).unwrap();
    assert!(witness.check(&packing, &SimpleGraph::complete(3)));

    let again = run(&["verify", "--G", "k3"], Some(&stdout(&first)));
    assert_eq!(again.status.code(), Some(2));
    assert_eq!(json(&again)["witness"], v["witness"]);

    let general = run(
        &["verify", "--G", "k3", "--detector", "backtracking"],
        Some(RAINBOW_PACKING),
    );
    assert_eq!(general.status.code(), Some(2));
}

#[test]
fn verify_rejects_bad_input() {
    let clash =
        r#"{"n":4,"pattern":{"n":3,"edges":[[0,1],[0,2],[1,2]]},"copies":[[0,1,2],[0,1,3]]}"#;
    let o = run(&["verify"], Some(clash));
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["verify"], Some("{not json")).status.code(), Some(1));
    let o = run(
        &["verify", "--detector", "triangle-scan", "--G", "p3"],
        Some(RAINBOW_PACKING),
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn solve_k5_double_pentagon() {
    let o = run(&["solve", "--n", "5", "--F", "c5", "--G", "k3"], None);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["value"], 2);
    assert_eq!(v["optimal"], true);
    assert_eq!(v["verdict"], "PASS");
    let packing: ColoredPacking = serde_json::from_value(v["packing"].clone()).unwrap();
    let checked = run(&["verify"], Some(&serde_json::to_string(&packing).unwrap()));
    assert_eq!(checked.status.code(), Some(0));
}

#[test]
fn solve_budget_gives_lower_bound() {
    let o = run(&["solve", "--n", "7", "--F", "c5", "--budget", "3"], None);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["verdict"], "LOWER_BOUND");
    assert_eq!(v["optimal"], false);
}

#[test]
fn solve_guard_is_named() {
    let o = run(&["solve", "--n", "13", "--F", "k3"], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solver vertex guard"));
}

#[test]
fn solve_output_is_thread_independent() {
    let one = json(&run(
        &["--threads", "1", "solve", "--n", "7", "--F", "k3"],
        None,
    ));
    let four = json(&run(
        &["--threads", "4", "solve", "--n", "7", "--F", "k3"],
        None,
    ));
    assert_eq!(one["packing"], four["packing"]);
    assert_eq!(one["value"], four["value"]);
}

#[test]
fn identical_argv_identical_bytes() {
    for args in [
        &["solve", "--n", "6", "--F", "c5"][..],
        &["lp", "--host", "k4", "--pattern", "k3"],
        &["gadget", "--n", "1000", "--q", "2"],
        &["optimize", "--sweep", "3..5"],
        &["report", "--upper-bounds", "2..4", "--gadget-sizes", "100"],
    ] {
        let a = run(args, None);
        let b = run(args, None);
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn sweep_csv() {
    let o = run(&["solve", "--F", "k3", "--sweep", "3..6"], None);
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,value,optimal,nodes,millis");
    assert_eq!(lines.len(), 5);
    let values: Vec<u64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn optimize_k3() {
    let o = run(&["optimize", "--k", "3"], None);
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| {
        row[header.iter().position(|h| *h == name).unwrap()]
            .parse::<f64>()
            .unwrap()
    };
    assert!((col("density") - 0.201615).abs() < 1e-5);
    assert!((col("paperTripleDensity") - 0.2016).abs() < 1e-9);
}

#[test]
fn gadget_commands() {
    let v = json(&run(&["gadget", "--n", "14", "--q", "1"], None));
    assert_eq!(v["certified"], true);
    assert!(v["size"].as_u64().unwrap() >= 6);
    let ok = run(
        &["gadget", "--elements", "1,2,4,5,10,11,13,14", "--q", "1"],
        None,
    );
    assert_eq!(ok.status.code(), Some(0));
    let bad = run(
        &["gadget", "--elements", "1,2,3", "--k", "3", "--h", "1"],
        None,
    );
    assert_eq!(bad.status.code(), Some(2));
    assert!(json(&bad)["witness"]["gadget"].is_object());
}

#[test]
fn lp_blowup() {
    let v = json(&run(&["lp", "--host", "c5[3]", "--pattern", "c5"], None));
    assert_eq!(v["nuStar"], "9");
    assert_eq!(v["verdict"], "PASS");
}

#[test]
fn json_graph_files() {
    let dir = std::env::temp_dir().join(format!("mcturan-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("k4.json");
    std::fs::write(
        &good,
        r#"{"n":4,"edges":[[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]]}"#,
    )
    .unwrap();
    let arg = format!("json:{}", good.display());
    let v = json(&run(&["lp", "--host", &arg, "--pattern", "k3"], None));
    assert_eq!(v["nuStar"], "2");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"n":2,"edges":[[0,4]]}"#).unwrap();
    let o = run(
        &[
            "lp",
            "--host",
            &format!("json:{}", bad.display()),
            "--pattern",
            "k3",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed graph JSON"));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("mcturan-out-{}.json", std::process::id()));
    let o = run(
        &[
            "--out",
            path.to_str().unwrap(),
            "construct",
            "--family",
            "c5blowup",
            "--m",
            "3",
        ],
        None,
    );
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let p: ColoredPacking = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(p.copy_count(), 9);
}

#[test]
fn report_tables() {
    let o = run(&["report", "--densities", "3..10"], None);
    let densities: Vec<f64> = stdout(&o)
        .lines()
        .filter(|l| l.contains(",optimizedDensity,"))
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(densities.len(), 8);
    assert!(densities.windows(2).all(|w| w[0] <= w[1]));

    let o = run(&["report", "--upper-bounds", "2..6"], None);
    assert!(stdout(&o).contains("upper_bound,2,upperBoundCoeff,0.04\n"));

    let o = run(
        &["report", "--gadget-sizes", "100,1000,10000", "--q", "1"],
        None,
    );
    let text = stdout(&o);
    let certified: Vec<&str> = text
        .lines()
        .filter(|l| l.contains(",certified,"))
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(certified, vec!["true"; 3]);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["solve", "--bogus"], None).status.code(), Some(1));
    assert_eq!(
        run(&["construct", "--family", "nope"], None).status.code(),
        Some(1)
    );
    assert_eq!(
        run(&["construct", "--family", "c5blowup", "--m", "4"], None)
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"], None).status.code(), Some(0));
}
