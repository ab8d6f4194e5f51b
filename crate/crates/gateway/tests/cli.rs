mod common;

use common::fixture_path;
use mazemate_gateway::cli::run;

fn mazemate(args: &[&str]) -> (u8, String, String) {
    let mut argv = vec!["mazemate".to_string()];
    for a in args {
        argv.push(match a.strip_prefix('@') {
            Some(name) => fixture_path(name).display().to_string(),
            None => a.to_string(),
        });
    }
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn solve_low_prints_actions() {
    let (code, out, _) = mazemate(&["solve", "--mode", "low", "@trivial.json"]);
    assert_eq!(code, 0);
    assert_eq!(out, "move\nmove\n");
}

#[test]
fn solve_high_prints_program() {
    let (code, out, _) = mazemate(&["solve", "--mode", "high", "@quiz_corridor.json"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("while path_ahead {"), "{out}");
}

#[test]
fn simulate_spin_exhausts_fuel() {
    let (code, out, _) = mazemate(&["simulate", "@trivial.json", "@spin.prog"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("outcome: FuelExhausted"), "{out}");
    let (code, out, _) = mazemate(&["simulate", "@bat_corridor.json", "@bat_corridor.prog"]);
    assert_eq!(code, 0);
    assert!(out.contains("health: 80"));
}

#[test]
fn check_small_maze_fails_size() {
    let (code, out, _) = mazemate(&["check", "@small_3x3.json"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL size: expected 8×8, found 3×3"), "{out}");
    let (code, _, _) = mazemate(&["check", "@classroom_8x8.json"]);
    assert_eq!(code, 0);
}

#[test]
fn unsolvable_is_domain_failure() {
    let (code, _, err) = mazemate(&["--json", "solve", "@blocked.json"]);
    assert_eq!(code, 1);
    let e: serde_json::Value = serde_json::from_str(&err).unwrap();
    assert_eq!(e["code"], "UNSOLVABLE");
}

#[test]
fn usage_and_parse_errors_exit_2() {
    assert_eq!(mazemate(&["solve", "--mode", "medium", "@trivial.json"]).0, 2);
    assert_eq!(mazemate(&["frobnicate"]).0, 2);
    assert_eq!(mazemate(&["validate", "/nonexistent/maze.json"]).0, 2);
    assert_eq!(mazemate(&["simulate", "@trivial.json", "@trivial.json"]).0, 2);
}

#[test]
fn json_outputs() {
    let (code, out, _) = mazemate(&["--json", "validate", "@classroom_8x8.json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["width"], 8);
    let (_, out, _) = mazemate(&["--json", "hint", "--stage", "3", "@bat_corridor.json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kind"], "high_efficiency_program");
    let (code, out, _) = mazemate(&["compress", "@quiz_corridor.json"]);
    assert_eq!(code, 0);
    assert!(out.contains("while"));
}
