use std::process::Command;

use serde_json::Value;

fn dqgraph(args: &[&str]) -> (i32, Value, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_dqgraph")).args(args).output().expect("binary runs");
    let report: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("report is JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)));
    (out.status.code().expect("exit code"), report, out.stdout)
}

#[test]
fn enumerate_wheels_only_census() {
    let (code, report, _) = dqgraph(&["enumerate", "--n", "2", "--m", "2", "--filter", "wheels_only"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["labeled_count"], 8);
    assert_eq!(report["result"]["class_count"], 1);
    assert_eq!(report["tool"], "dqgraph");
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["command"]["subcommand"], "enumerate");
}

#[test]
fn enumerate_all_bidifferential_two_vertices() {
    let (code, report, _) = dqgraph(&["enumerate", "--n", "2", "--m", "2"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["labeled_count"], 28);
    assert_eq!(report["result"]["class_count"], 4);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["cocycle-kernel", "--n", "2", "--all-graphs", "--seed", "11"];
    let (_, _, a) = dqgraph(&args);
    let (_, _, b) = dqgraph(&args);
    assert_eq!(a, b);
}

#[test]
fn thread_count_does_not_change_results() {
    let (_, one, _) = dqgraph(&["enumerate", "--n", "3", "--m", "2", "--threads", "1"]);
    let (_, two, _) = dqgraph(&["enumerate", "--n", "3", "--m", "2", "--threads", "2"]);
    assert_eq!(one["result"], two["result"]);
}

#[test]
fn reduce_reports_sign() {
    let (code, report, _) = dqgraph(&["reduce", "1 2 ; 3: 2 1"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["representative"], "1 2 ; 3: 1 2");
    assert_eq!(report["result"]["sign"], -1);
    assert_eq!(report["result"]["sum"], "-1/1\t1 2 ; 3: 1 2\n");
}

#[test]
fn wheels_flags_two_cycle() {
    let (code, report, _) = dqgraph(&["wheels", "2 2 ; 3: 1 4 / 4: 3 2"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["wheel_free"], false);
    assert_eq!(report["result"]["classes"][0]["has_wheel"], true);
}

#[test]
fn eval_poisson_graph_on_so3() {
    let (code, report, _) = dqgraph(&["eval", "1 2 ; 3: 1 2", "--preset", "so3", "--args", "x1;x2"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["value"], "x3");
}

#[test]
fn delta_of_symmetric_graph_matches_oracle() {
    let (code, report, _) =
        dqgraph(&["delta", "2 2 ; 3: 1 2 / 4: 1 2", "--preset", "so3", "--args", "x1^2;x2^2;x3^2"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["sum"], "-2/1\t2 3 ; 4: 1 2 / 5: 1 3\n2/1\t2 3 ; 4: 1 3 / 5: 2 3\n");
    assert_eq!(report["result"]["check"]["agrees"], true);
    assert_eq!(report["result"]["check"]["graph_value"], "-16*x1^2*x2^2 + 16*x2^2*x3^2");
}

#[test]
fn compose_and_bracket_match_oracle() {
    for sub in ["compose", "bracket"] {
        let (code, report, _) = dqgraph(&[
            sub,
            "1 2 ; 3: 1 2",
            "1 2 ; 3: 1 2",
            "--preset",
            "sl2",
            "--args",
            "x1*x3;x2^2;x3+x1",
        ]);
        assert_eq!(code, 0, "{sub}");
        assert_eq!(report["result"]["check"]["agrees"], true, "{sub}");
    }
}

#[test]
fn leibniz_single_generator_at_three_vertices() {
    let (code, report, _) = dqgraph(&["leibniz", "--n", "2", "--m", "3"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["count"], 1);
}

#[test]
fn verify_assoc_kontsevich_k2_on_symplectic_plane() {
    let (code, report, _) = dqgraph(&[
        "verify-assoc",
        "--series",
        "kontsevich-k2",
        "--order",
        "2",
        "--preset",
        "symplectic2",
        "--degree",
        "4",
    ]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["result"]["failing_triples"], 0);
    assert_eq!(report["result"]["graph_level_verified"], true);
}

#[test]
fn verify_assoc_detects_missing_order() {
    let (code, report, _) = dqgraph(&[
        "verify-assoc",
        "--series",
        "kontsevich-k2",
        "--order",
        "3",
        "--preset",
        "so3",
    ]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "missing_order");
}

#[test]
fn cocycle_kernel_rigidity() {
    let (_, one, _) = dqgraph(&["cocycle-kernel", "--n", "1"]);
    assert_eq!(one["result"]["dimension"], 1);
    let (_, two, _) = dqgraph(&["cocycle-kernel", "--n", "2"]);
    assert_eq!(two["result"]["dimension"], 0);
}

#[test]
fn errors_carry_machine_readable_records() {
    let (code, report, _) = dqgraph(&["reduce", "1 2 ; 3: 3 1"]);
    assert_eq!(code, 1);
    assert!(report["error"]["kind"].is_string());
    assert!(report["config"].is_object());

    let (code, report, _) = dqgraph(&["eval", "1 2 ; 3: 1 2", "--preset", "so4", "--args", "x1;x2"]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "unknown_preset");

    let (code, report, _) = dqgraph(&["transmogrify"]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "usage");
}

#[test]
fn output_flag_writes_file() {
    let dir = std::env::temp_dir().join(format!("dqgraph-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let status = Command::new(env!("CARGO_BIN_EXE_dqgraph"))
        .args(["enumerate", "--n", "1", "--m", "2", "--output"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["result"]["labeled_count"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn solve_mc_obstructs_at_fourth_order() {
    let (code, report, _) = dqgraph(&["solve-mc", "--max-order", "4", "--wheel-free", "--seed", "7"]);
    assert_eq!(code, 2, "{report}");
    let reports = report["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    for r in &reports[..3] {
        assert_eq!(r["status"], "solved");
        assert_eq!(r["verified"], true);
    }
    assert_eq!(reports[3]["status"], "obstructed");
    assert_eq!(reports[3]["graph_certificate"]["verified"], true);
    assert_eq!(reports[3]["certificate"]["kind"], "evaluation");
    assert_eq!(reports[3]["certificate"]["infeasible"], true);
    assert_eq!(reports[3]["certificate"]["verified"], true);
    for r in reports[3]["certificate"]["ranks"].as_array().unwrap() {
        assert!(r["rank"].as_u64() < r["augmented_rank"].as_u64());
    }
}
