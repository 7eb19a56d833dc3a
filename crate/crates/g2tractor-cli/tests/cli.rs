use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_g2tractor"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("g2tractor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn selftest_is_exact() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["overall"], true);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["residual"], 0.0, "{c}");
    }
}

#[test]
fn family_then_recover() {
    let f = scratch("circle.json");
    let o = run(&["family", "--eps", "-1", "--abar", "-8/5", "--b", "4/5", "--out", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let p = f.to_str().unwrap();
    let o = run(&["recover", "--phi", p, "--phi-prime", p]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["eps"], -1);
    assert_eq!(v["abar"], "-8/5");
    // S is recovered up to sign, which flips B.
    let sign = if v["S"][1] == "1" { 1 } else { -1 };
    assert_eq!(v["b"], if sign == 1 { "4/5" } else { "-4/5" });
}

#[test]
fn parabolic_member_recovers_rescaled_s() {
    let f = scratch("parabolic.json");
    let p = f.to_str().unwrap();
    assert_eq!(run(&["family", "--eps", "0", "--param-s", "3/2", "--out", p]).status.code(), Some(0));
    let v = json(&run(&["recover", "--phi", p, "--phi-prime", p]));
    assert_eq!(v["eps"], 0);
    assert_eq!(v["S"][0], "3/2");
}

#[test]
fn identical_forms_are_a_verification_failure() {
    let f = scratch("identity.json");
    let p = f.to_str().unwrap();
    run(&["family", "--eps", "1", "--abar", "0", "--b", "0", "--out", p]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    let phi = scratch("phi_only.json");
    std::fs::write(&phi, v["phi"].to_string()).unwrap();
    let o = run(&["recover", "--phi", phi.to_str().unwrap(), "--phi-prime", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json(&o)["error"].as_str().unwrap().contains("identical"));
}

#[test]
fn malformed_input_names_the_field() {
    let f = scratch("bad.json");
    std::fs::write(&f, r#"{"phi": [{"indices": [1, 2, 3], "coeff": "x"}], "phi_prime": [{"coeff": "1"}]}"#).unwrap();
    let p = f.to_str().unwrap();
    let o = run(&["recover", "--phi", p, "--phi-prime", p]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("phi"), "{err}");
    let g = scratch("missing.json");
    std::fs::write(&g, r#"{"other": []}"#).unwrap();
    let o = run(&["recover", "--phi", g.to_str().unwrap(), "--phi-prime", p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing field `phi`"));
}

#[test]
fn classify_rays() {
    let o = run(&["classify", "--s", "0,0,0,1,0,0,0", "--x", "1,0,0,0,0,0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["label"], "M2-");
    let o = run(&["classify", "--s", "0,0,0,1,0,0,0", "--x", "1,0,0,1,0,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not isotropic"));
}

#[test]
fn transcendental_parameters_need_float() {
    assert_eq!(run(&["family", "--eps", "-1", "--upsilon", "0.5"]).status.code(), Some(2));
    let o = run(&["family", "--eps", "-1", "--upsilon", "0.5", "--backend", "float"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["params"]["variant"], "circle");
}

#[test]
fn gallery_exit_codes_and_reproducibility() {
    let a = run(&["gallery", "verify", "submaximal", "--points", "2", "--i-values", "1"]);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&["gallery", "verify", "submaximal", "--points", "2", "--i-values", "1"]);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["overall"], true);
    assert!(v["checks"][0]["claim"].is_string());
    let o = run(&["gallery", "verify", "submaximal", "--points", "2", "--i-values", "1", "--inject-nonsolution"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(run(&["gallery", "verify", "nowhere"]).status.code(), Some(2));
}

#[test]
fn config_file_and_flag_precedence() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# quick run\npoints = 2\nseed = 5\ni_values = 0\n").unwrap();
    let c = cfg.to_str().unwrap();
    let v = json(&run(&["--config", c, "gallery", "verify", "submaximal"]));
    assert_eq!((v["points"].as_u64(), v["seed"].as_u64()), (Some(2), Some(5)));
    let v = json(&run(&["--config", c, "gallery", "verify", "submaximal", "--seed", "9"]));
    assert_eq!(v["seed"], 9);
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    let o = run(&["--config", c, "selftest"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("colour"));
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["family"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_parser() {
    let c = g2tractor_cli::parse_config("a = 1\n\n  b=two # note\n").unwrap();
    assert_eq!(c["a"], "1");
    assert_eq!(c["b"], "two");
    assert!(g2tractor_cli::parse_config("novalue").is_err());
}
