//! End-to-end checks of the `zigzag` binary: every command must be a thin
//! adapter whose output is byte-identical to calling the library directly,
//! and the exit codes must follow the documented taxonomy.

use std::process::{Command, Output};

use zigzag_cli::export::{inject_json, layout_json};
use zigzag_cli::format::{parse_diagram_file, write_diagram_file};
use zigzag_core::diagram::{builtin_example, validate};
use zigzag_core::layout::{diagram_layout, PairsMode};
use zigzag_core::render::{extract_scene, to_scene_json, to_svg};

fn zigzag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zigzag"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = zigzag(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("output is UTF-8")
}

#[test]
fn layout_output_matches_the_library_byte_for_byte() {
    let ex = builtin_example("monad").unwrap();
    let direct = layout_json(&diagram_layout(&ex.diagram, PairsMode::Cover).unwrap());
    assert_eq!(stdout_of(&["layout", "monad"]), direct);
    let all = layout_json(&diagram_layout(&ex.diagram, PairsMode::All).unwrap());
    assert_eq!(stdout_of(&["layout", "monad", "--pairs", "all"]), all);
}

#[test]
fn render_output_matches_the_library_byte_for_byte() {
    let ex = builtin_example("monad").unwrap();
    let layout = diagram_layout(&ex.diagram, PairsMode::Cover).unwrap();
    let scene = extract_scene(&ex.diagram, &layout, &ex.signature).unwrap();
    assert_eq!(
        stdout_of(&["render", "monad"]),
        to_svg(&scene, 40.0).unwrap()
    );
    assert_eq!(
        stdout_of(&["render", "monad", "--scale", "25"]),
        to_svg(&scene, 25.0).unwrap()
    );

    let ex = builtin_example("associator").unwrap();
    let layout = diagram_layout(&ex.diagram, PairsMode::Cover).unwrap();
    let scene = extract_scene(&ex.diagram, &layout, &ex.signature).unwrap();
    assert_eq!(
        stdout_of(&["render", "associator"]),
        to_scene_json(&scene, 40.0).unwrap()
    );
}

#[test]
fn inject_output_matches_the_library_byte_for_byte() {
    let ex = builtin_example("associator").unwrap();
    assert_eq!(
        stdout_of(&["inject", "associator"]),
        inject_json(&ex.diagram).unwrap()
    );
}

#[test]
fn examples_output_matches_the_library_byte_for_byte() {
    let ex = builtin_example("eckmann-hilton").unwrap();
    assert_eq!(
        stdout_of(&["examples", "eckmann-hilton", "--canonical"]),
        write_diagram_file(&ex.signature, &ex.diagram, true)
    );
    assert_eq!(
        stdout_of(&["examples", "eckmann-hilton"]),
        write_diagram_file(&ex.signature, &ex.diagram, false)
    );
}

#[test]
fn every_example_file_validates_and_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    for name in stdout_of(&["examples"]).lines() {
        let path = dir.path().join(format!("{name}.json"));
        let path = path.to_str().unwrap();
        let written = stdout_of(&["examples", name, "--canonical", "-o", path]);
        assert!(written.is_empty());
        let text = std::fs::read_to_string(path).unwrap();
        let ex = builtin_example(name).unwrap();
        let (sig, d) = parse_diagram_file(&text).unwrap();
        assert_eq!((sig, d), (ex.signature, ex.diagram), "{name}");
        let report = zigzag(&["validate", path]);
        assert!(report.status.success(), "{name} validates");
    }
}

#[test]
fn writing_to_a_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("monad.svg");
    let path = path.to_str().unwrap();
    zigzag(&["render", "monad", "-o", path]);
    assert_eq!(
        std::fs::read_to_string(path).unwrap(),
        stdout_of(&["render", "monad"])
    );
}

#[test]
fn a_mutated_example_fails_validation_with_a_point_path() {
    let text = stdout_of(&["examples", "monad", "--canonical"]);
    let broken = text.replace(
        "{\"source\":\"f\",\"target\":\"m\"}",
        "{\"source\":\"x\",\"target\":\"m\"}",
    );
    assert_ne!(broken, text);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, &broken).unwrap();
    let path = path.to_str().unwrap();

    let out = zigzag(&["validate", path]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("[s0]"), "report names the point: {stderr}");

    // The library reports the same failures the binary prints.
    let (sig, d) = parse_diagram_file(&broken).unwrap();
    for failure in validate(&d, &sig) {
        assert!(stderr.contains(&format!("{}: {}", failure.path, failure.kind)));
    }

    let out = zigzag(&["--json-errors", "validate", path]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("{\"kind\":\"validation\",\"exit\":1,"));
    assert!(stderr.contains("\"failures\":[{\"path\":\"[s0]\""));
}

#[test]
fn exit_codes_follow_the_taxonomy() {
    assert_eq!(zigzag(&["validate", "monad"]).status.code(), Some(0));
    // Unreadable input.
    assert_eq!(
        zigzag(&["validate", "no-such-file.json"]).status.code(),
        Some(2)
    );
    // Malformed JSON.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = zigzag(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    // Structurally broken diagram file.
    let bad = r#"{"signature": {"generators": [{"id": "x", "dimension": 0}], "arrows": []},
                  "diagram": {"regular": [], "singular": [], "forward": [], "backward": []}}"#;
    std::fs::write(&path, bad).unwrap();
    let out = zigzag(&["--json-errors", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("{\"kind\":\"parse\",\"exit\":2,"));
    // Dimensions without a drawable form.
    let out = zigzag(&["render", "point"]);
    assert_eq!(out.status.code(), Some(1));
    let out = zigzag(&["--json-errors", "render", "wire"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .starts_with("{\"kind\":\"unsupported\",\"exit\":1,"));
    // Unknown example name is reported against the list.
    assert_eq!(zigzag(&["examples", "nonesuch"]).status.code(), Some(2));
    // Usage errors from the argument parser.
    assert_eq!(zigzag(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn solve_lp_reports_every_status_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.lp");
    let path_str = path.to_str().unwrap();

    std::fs::write(&path, "Minimize\n obj: x + 2 y\nSubject To\n c0: x + y >= 1\n c1: x - y <= 3\nBounds\n y free\nEnd\n").unwrap();
    let out = zigzag(&["solve-lp", path_str]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("status: optimal\nobjective: "));
    assert!(text.contains("\nx = "));

    std::fs::write(&path, "Minimize\n obj: x\nSubject To\n c0: x >= 2\n c1: x <= 1\nEnd\n").unwrap();
    let out = zigzag(&["solve-lp", path_str]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"status: infeasible\n");

    std::fs::write(&path, "Minimize\n obj: - x\nSubject To\nEnd\n").unwrap();
    let out = zigzag(&["solve-lp", path_str]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, b"status: unbounded\n");

    std::fs::write(&path, "Maximize\n obj: x\nSubject To\nEnd\n").unwrap();
    assert_eq!(zigzag(&["solve-lp", path_str]).status.code(), Some(2));
}
