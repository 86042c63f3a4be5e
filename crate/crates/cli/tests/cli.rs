use std::process::{Command, Output};

use serde_json::Value;

fn obslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obslab")).args(args).env_remove("OBSLAB_LIMITS").output().expect("binary runs")
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

fn ok(args: &[&str]) -> Value {
    let o = obslab(args);
    assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
    json_of(&o)
}

#[test]
fn pd_chain_of_z9() {
    let r = ok(&["pd-chain", "--input", r#"{"base":{"p":3,"n":2}}"#]);
    assert_eq!(r["result"]["chain"], serde_json::json!(["(3)", "0"]));
    assert_eq!(r["result"]["prime"], 3);
}

#[test]
fn theta_three() {
    let r = ok(&["chern", "--theta", "3"]);
    assert_eq!(r["result"]["polynomial"], "s1^3 - 3*s1*s2 + 3*s3");
}

#[test]
fn legendre_picard_fuchs_is_second_order() {
    let r = ok(&["gm", "--family", "legendre", "--picard-fuchs"]);
    let pf = &r["result"]["picard_fuchs"];
    assert_eq!(pf["order"], 2);
    let op = pf["operator"].as_array().unwrap();
    assert_eq!(op.len(), 3);
    // every numeric field is an exact string
    for c in op.iter().flat_map(|c| c.as_array().unwrap()) {
        assert!(c.is_string());
    }
}

#[test]
fn family_file_is_accepted() {
    let dir = std::env::temp_dir().join(format!("obslab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("legendre.json");
    std::fs::write(&path, serde_json::to_string(&ok(&["corpus", "legendre"])).unwrap()).unwrap();
    let r = ok(&["gm", "--family", path.to_str().unwrap(), "--picard-fuchs"]);
    assert_eq!(r["result"]["picard_fuchs"]["order"], 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn report_carries_provenance() {
    let r = ok(&["chern", "--theta", "2"]);
    assert_eq!(r["command"], "chern");
    assert_eq!(r["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["input_sha256"].as_str().unwrap().len(), 64);
    assert!(r["design_decisions"].is_object());
    assert_eq!(r["limits"]["degree_cap"], 8);
}

#[test]
fn corpus_entries() {
    let k3 = ok(&["corpus", "k3-diamond"]);
    assert_eq!(k3["h"][1][1], 20);
    let pd = ok(&["corpus", "pd-samples"]);
    assert_eq!(pd.as_array().unwrap().len(), 10);
    assert!(ok(&["corpus", "legendre"])["f"].as_str().unwrap().contains("y^2*z"));
    assert_eq!(obslab(&["corpus", "nope"]).status.code(), Some(2));
}

#[test]
fn invalid_input_exits_two() {
    assert_eq!(obslab(&["pd-chain", "--input", "{not json"]).status.code(), Some(2));
    assert_eq!(obslab(&["pd-chain", "--input", r#"{"base":{"p":4,"n":1}}"#]).status.code(), Some(2));
    assert_eq!(obslab(&["gm", "--input", r#"{"ambient_dim":2,"degree":3,"f":"x^3+y^2*z","trunc_order":3}"#]).status.code(), Some(2));
    assert_eq!(obslab(&["chern", "--theta", "2", "--degree-cap", "0"]).status.code(), Some(2));
    assert_eq!(obslab(&["trace"]).status.code(), Some(2));
}

#[test]
fn limits_exit_three() {
    // a first-order operator search cannot capture the Legendre periods
    let o = obslab(&["gm", "--family", "legendre", "--picard-fuchs", "--max-order", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stdout));
    let o = obslab(&["gm", "--family", "legendre", "--picard-fuchs", "--trunc", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stdout));
    // the acceptance suite takes several seconds
    assert_eq!(obslab(&["selftest", "--time-budget", "1"]).status.code(), Some(3));
}

#[test]
fn env_limits_and_flag_precedence() {
    let run = |env: &str, extra: &[&str]| {
        let mut args = vec!["chern", "--theta", "2"];
        args.extend_from_slice(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_obslab")).args(&args).env("OBSLAB_LIMITS", env).output().unwrap();
        (o.status.code(), json_of(&o))
    };
    let (code, r) = run("degree_cap=5", &[]);
    assert_eq!(code, Some(0));
    assert_eq!(r["limits"]["degree_cap"], 5);
    let (_, r) = run("degree_cap=5", &["--degree-cap", "6"]);
    assert_eq!(r["limits"]["degree_cap"], 6);
    let (code, _) = run("bogus=1", &[]);
    assert_eq!(code, Some(2));
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["gm", "--family", "fermat-cubic", "--lift", "--trunc", "5"],
        vec!["hkr", "--input", r#"{"dim":2,"h":[[1,0,1],[0,20,0],[1,0,1]],"calabi_yau":true}"#, "--injectivity", "--seed", "3"],
        vec!["pd-chain", "--input", r#"{"base":{"p":2,"n":1},"pd_gens":["z","w"],"trunc":{"z":2,"w":4}}"#],
    ] {
        let a = obslab(&args);
        let b = obslab(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn reports_round_trip_as_input() {
    let cases: Vec<Vec<&str>> = vec![
        vec!["pd-chain", "--input", r#"{"base":{"p":3,"n":2}}"#],
        vec!["gamma-nilpotent", "--input", r#"{"base":{"p":5,"n":1},"pd_gens":["z"],"trunc":{"z":7}}"#],
        vec!["derham", "--input", r#"{"field":"QQ","vars":["x","y"],"relations":["x*y"]}"#, "--degree-cap", "2"],
        vec!["chern", "--input", r#"{"rank":2,"classes":["a+b","a*b"],"vars":["a","b"],"cap":4}"#],
        vec!["atiyah", "--input", r#"{"line_degrees":[1,-3,2]}"#],
        vec!["trace", "--input", r#"{"field":"QQ","ranks":[1,1],"diffs":[[["1"]]],"maps":[[["2"]],[["2"]]]}"#],
        vec!["hkr", "--input", r#"{"dim":1,"h":[[1,1],[1,1]],"calabi_yau":true}"#, "--kunneth"],
    ];
    for args in cases {
        let first = obslab(&args);
        assert_eq!(first.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&first.stdout));
        let report = String::from_utf8(first.stdout.clone()).unwrap();
        let mut again = args.clone();
        let pos = again.iter().position(|a| *a == "--input").unwrap();
        again[pos + 1] = &report;
        let second = obslab(&again);
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn subcommand_results() {
    let r = ok(&["atiyah", "--line", "-2"]);
    assert_eq!(r["result"]["trace_residue"], "-2");
    assert_eq!(r["result"]["degree_from_determinant"], -2);

    // identity on an exact two-term complex has super-trace 1 − 1
    let r = ok(&[
        "trace",
        "--input",
        r#"{"field":"QQ","ranks":[2,2],"diffs":[[["1","0"],["0","1"]]],"maps":[[["1","0"],["0","1"]],[["1","0"],["0","1"]]]}"#,
    ]);
    assert_eq!(r["result"]["super_trace"], "0");

    let r = ok(&["hkr", "--input", r#"{"dim":2,"h":[[1,0,1],[0,20,0],[1,0,1]],"calabi_yau":true}"#]);
    assert_eq!(r["result"]["hh_dims"], serde_json::json!([1, 0, 22, 0, 1]));

    let r = ok(&["derham", "--input", r#"{"field":"QQ","vars":["x"],"relations":["x^3"]}"#, "--kunneth", "y"]);
    assert_eq!(r["result"]["isomorphism"], true);

    let r = ok(&["gm", "--family", "fermat-cubic", "--obstruction", "1", "--trunc", "2"]);
    assert_eq!(r["result"]["obstruction"]["sign_relation"], true);
}

#[test]
fn kodaira_spencer_of_a_nontrivial_family() {
    // y² = t over k[t]/t³ → k[t]/t², a non-split square-zero extension
    let input = r#"{"field":"QQ","base_vars":["t"],"base_relations":["t^3"],"ideal":["t^2"],
        "fibre_vars":["y"],"weights":[2,1],"fibre_relations":["y^2 - t"]}"#;
    let o = obslab(&["obstruction", "--input", input]);
    let r = json_of(&o);
    assert_eq!(o.status.code(), Some(0), "{r}");
    assert_eq!(r["result"]["kodaira_spencer_zero"], false);
    assert_eq!(r["result"]["restricts_to_projection"], true);

    let split = r#"{"field":"QQ","base_vars":["t","e"],"base_relations":["t^2","e^2","t*e"],"ideal":["e"],
        "fibre_vars":["y"],"weights":[2,2,1],"fibre_relations":["y^2 - t"]}"#;
    assert_eq!(ok(&["obstruction", "--input", split])["result"]["kodaira_spencer_zero"], true);
}
