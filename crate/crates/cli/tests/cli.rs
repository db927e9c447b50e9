use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn klyachko(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_klyachko"))
        .args(args)
        .env_remove("KLYACHKO_CACHE_DIR")
        .env_remove("KLYACHKO_MAX_ELEMENTS")
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = klyachko(&full);
    let code = out.status.code().expect("exit code");
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (v, code)
}

fn assert_schema(name: &str, instance: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{name}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let compiled = jsonschema::JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(instance) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} output violates its schema:\n{}", msgs.join("\n"));
    };
}

fn code(args: &[&str]) -> i32 {
    klyachko(args).status.code().expect("exit code")
}

fn all_rows_multiplicity_one(report: &Value, rows: usize) {
    let r = report["rows"].as_array().unwrap();
    assert_eq!(r.len(), rows);
    for row in r {
        assert_eq!(row["total"], 1, "row {row}");
    }
    assert_eq!(report["flags"]["gelfand"], true);
    assert_eq!(report["dim_check"]["equal"], true);
}

#[test]
fn verify_gelfand_gl2_f2() {
    let (v, c) = json_of(&["verify-gelfand", "--n", "2", "--q", "2"]);
    assert_eq!(c, 0);
    assert_schema("gelfand_report", &v);
    all_rows_multiplicity_one(&v, 3);
    assert_eq!(v["group_order"], 6);
    assert_eq!(v["cache"], "disabled");
}

#[test]
fn verify_gelfand_gl3_f2() {
    let (v, c) = json_of(&["verify-gelfand", "--n", "3", "--q", "2"]);
    assert_eq!(c, 0);
    assert_schema("gelfand_report", &v);
    all_rows_multiplicity_one(&v, 6);
    assert_eq!(v["group_order"], 168);
}

#[test]
fn verify_gelfand_gl2_f7() {
    let (v, c) = json_of(&["verify-gelfand", "--n", "2", "--q", "7"]);
    assert_eq!(c, 0);
    assert_schema("gelfand_report", &v);
    assert_eq!(v["group_order"], 2016);
    // q^2 - 1 classes for GL_2(F_q)
    all_rows_multiplicity_one(&v, 48);
}

#[test]
fn sequential_and_parallel_reports_agree() {
    let (a, _) = json_of(&["verify-gelfand", "--n", "2", "--q", "4"]);
    let (b, _) = json_of(&["verify-gelfand", "--n", "2", "--q", "4", "--sequential"]);
    let (c, _) = json_of(&["--threads", "2", "verify-gelfand", "--n", "2", "--q", "4"]);
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn other_psi_choices_still_give_a_gelfand_model() {
    for psi in ["1", "2", "4"] {
        let (v, c) = json_of(&["verify-gelfand", "--n", "2", "--q", "5", "--psi", psi]);
        assert_eq!(c, 0, "psi {psi}");
        assert_eq!(v["psi_seed"].to_string(), psi);
    }
}

#[test]
fn cache_is_written_then_reused() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_klyachko"))
            .args(["--format", "json", "verify-gelfand", "--n", "2", "--q", "3"])
            .env("KLYACHKO_CACHE_DIR", dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    let mut first = run();
    assert_eq!(first["cache"], "miss");
    assert!(std::fs::read_dir(dir.path()).unwrap().count() >= 1);
    let mut second = run();
    assert_eq!(second["cache"], "hit");
    first["cache"] = Value::Null;
    second["cache"] = Value::Null;
    assert_eq!(first, second);

    // A damaged cache is rebuilt rather than trusted.
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(entry.unwrap().path(), b"garbage").unwrap();
    }
    let third = run();
    assert_eq!(third["cache"], "miss");
    assert_eq!(run()["cache"], "hit");
}

#[test]
fn cache_dir_flag_works_too() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (a, _) = json_of(&["table", "--n", "2", "--q", "2", "--cache-dir", d]);
    let (b, _) = json_of(&["table", "--n", "2", "--q", "2", "--cache-dir", d]);
    assert_eq!(a["cache"], "miss");
    assert_eq!(b["cache"], "hit");
    assert_eq!(a["characters"], b["characters"]);
}

#[test]
fn table_output() {
    let (v, c) = json_of(&["table", "--n", "2", "--q", "3"]);
    assert_eq!(c, 0);
    assert_schema("table", &v);
    let degrees: Vec<u64> = v["degrees"].as_array().unwrap().iter().map(|d| d.as_u64().unwrap()).collect();
    assert_eq!(degrees.iter().map(|d| d * d).sum::<u64>(), 48);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), degrees.len());
    assert_eq!(classes.iter().map(|c| c["size"].as_u64().unwrap()).sum::<u64>(), 48);
    assert_eq!(classes[0]["element_order"], 1);
}

#[test]
fn resource_refusals_exit_2() {
    assert_eq!(code(&["verify-gelfand", "--n", "4", "--q", "3"]), 2);
    assert_eq!(code(&["verify-gelfand", "--n", "2", "--q", "3", "--max-elements", "10"]), 2);
    assert_eq!(code(&["verify-gelfand", "--n", "2", "--q", "64", "--max-q", "32"]), 2);
    let out = Command::new(env!("CARGO_BIN_EXE_klyachko"))
        .args(["verify-gelfand", "--n", "2", "--q", "3"])
        .env("KLYACHKO_MAX_ELEMENTS", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_input_exits_4() {
    assert_eq!(code(&["verify-gelfand", "--n", "2", "--q", "6"]), 4);
    assert_eq!(code(&["verify-gelfand", "--n", "0", "--q", "2"]), 4);
    assert_eq!(code(&["verify-gelfand", "--n", "2", "--q", "2", "--psi", "2"]), 4);
    assert_eq!(code(&["verify-gelfand", "--n", "2", "--q", "2", "--ell", "7"]), 4);
    assert_eq!(code(&["kappa", "U(rho:1,1,3"]), 4);
    assert_eq!(code(&["kappa", "U(rho:1,1,3)@0", "--n", "4"]), 4);
    assert_eq!(code(&["derive", ""]), 4);
    assert_eq!(code(&["period", "--t", "0"]), 4);
    assert_eq!(code(&["residue-survival", "--t", "4"]), 4);
    assert_eq!(code(&["--threads", "0", "period", "--t", "2"]), 4);
    assert_eq!(code(&["no-such-command"]), 4);
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn parse_errors_name_the_position() {
    let out = klyachko(&["kappa", "U(rho:1,1,3) y"]);
    assert_eq!(out.status.code(), Some(4));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position 13"), "{err}");
}

#[test]
fn kappa_examples() {
    let cases = [
        ("U(rho:1,1,3)@0", 3, 1, 1, "H_{1,2} with psi_1"),
        ("U(rho:1,1,2)@0", 2, 0, 1, "H_{0,2} with psi_0"),
        ("U(a:1,1,1)@0 x U(b:1,1,1)@0", 2, 2, 0, "H_{2,0} with psi_2"),
    ];
    for (param, n, r, k, model) in cases {
        let (v, c) = json_of(&["kappa", param]);
        assert_eq!(c, 0);
        assert_schema("kappa", &v);
        assert_eq!(v["n"], n, "{param}");
        assert_eq!(v["kappa"]["r"], r, "{param}");
        assert_eq!(v["kappa"]["k"], k, "{param}");
        assert_eq!(v["model"], model, "{param}");
        assert_eq!(v["unitary_valid"], true);
    }
    let (v, c) = json_of(&["kappa", "U(rho:1,1,3)@0", "--n", "3"]);
    assert_eq!(c, 0);
    assert_eq!(v["n"], 3);
}

#[test]
fn kappa_reports_the_dual_family() {
    let (v, _) = json_of(&["kappa", "U(rho:1,1,3)@0 x P(U(rho:1,2,2),1/4)"]);
    assert_eq!(v["n"], 11);
    assert_eq!(v["kappa"]["r"], 1);
    assert_eq!(v["kappa"]["k"], 5);
    assert_eq!(v["dual_model"], "H'_{10,1} with conj(psi'_1) on the contragredient");
    assert_eq!(v["contragredient"], "U(rho~:1,1,3)@0 x P(U(rho~:1,2,2),1/4)");
}

#[test]
fn printed_parameters_reparse_to_the_same_output() {
    let inputs = [
        "U(rho:1,1,3)@0 x P(U(rho:1,2,2),1/4)",
        " U( s* : 2 , 3 , 1 ) x U(rho~:1,1,2)@-1/2",
        "P(U(x:3,1,5),-2/6) x U(y:1,4,4)",
    ];
    for input in inputs {
        let (a, _) = json_of(&["kappa", input]);
        let printed = a["parameter"].as_str().unwrap().to_string();
        let (b, _) = json_of(&["kappa", &printed]);
        assert_eq!(a, b, "{input}");
        let contra = a["contragredient"].as_str().unwrap().to_string();
        let (c, _) = json_of(&["kappa", &contra]);
        assert_eq!(c["contragredient"], a["parameter"], "{input}");
        let (d, _) = json_of(&["derive", input]);
        for step in d["steps"].as_array().unwrap() {
            let s = step["parameter"].as_str().unwrap();
            if s != "1" {
                let (e, code) = json_of(&["kappa", s]);
                assert_eq!(code, 0, "{s}");
                assert_eq!(e["n"], step["n"], "{s}");
            }
        }
    }
}

#[test]
fn derive_examples() {
    let (v, c) = json_of(&["derive", "U(rho:1,1,3)@0"]);
    assert_eq!(c, 0);
    assert_schema("derive", &v);
    let steps = v["steps"].as_array().unwrap();
    let orders: Vec<u64> = steps.iter().map(|s| s["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, [1, 1, 1]);
    let ns: Vec<u64> = steps.iter().map(|s| s["n"].as_u64().unwrap()).collect();
    assert_eq!(ns, [2, 1, 0]);
    assert_eq!(steps[2]["parameter"], "1");

    let (v, _) = json_of(&["derive", "U(rho:2,2,1)@0"]);
    assert_schema("derive", &v);
    let steps = v["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 1);
    assert_eq!(steps[0]["order"], 4);
    assert_eq!(v["total_order"], 4);
}

#[test]
fn period_output() {
    for t in 1..=8 {
        let (v, c) = json_of(&["period", "--t", &t.to_string()]);
        assert_eq!(c, 0);
        assert_schema("period", &v);
    }
    let (v, _) = json_of(&["period", "--t", "2"]);
    assert_eq!(v["formula"], "L(2)/Res");
    let (v, _) = json_of(&["period", "--t", "4", "--zeta"]);
    assert_schema("period", &v);
    assert_eq!(v["formula"], "L(2)*L(4)/(Res*L(3))");
    let pi = std::f64::consts::PI;
    let apery = 1.202_056_903_159_594_2;
    let expected = (pi.powi(2) / 6.0) * (pi.powi(4) / 90.0) / apery;
    assert!((v["value"].as_f64().unwrap() - expected).abs() < 1e-8);
    let (v, _) = json_of(&["period", "--t", "3", "--zeta"]);
    assert_eq!(v["formula"], "(Alpha(S)/Res)*(L(2)/L(3))");
    assert_eq!(v["intertwining_eigenvalue"], "Res/L(3)");
}

#[test]
fn residue_survival_output() {
    for t in [3, 5, 7, 9, 11] {
        let (v, c) = json_of(&["residue-survival", "--t", &t.to_string()]);
        assert_eq!(c, 0);
        assert_schema("residue_survival", &v);
        assert_eq!(v["survivors"], serde_json::json!([t]));
        let m = (t - 1) / 2;
        assert_eq!(v["mu_q"], serde_json::json!([format!("-{m}"), "1/2"]));
    }
}

#[test]
fn text_format_is_default() {
    let out = klyachko(&["kappa", "U(rho:1,1,3)@0"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("(r, k) = (1, 1)"), "{s}");
    let out = klyachko(&["verify-gelfand", "--n", "2", "--q", "2"]);
    let s = String::from_utf8(out.stdout).unwrap();
    assert!(s.contains("gelfand true"), "{s}");
}
