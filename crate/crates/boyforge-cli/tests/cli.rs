use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn shipped() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../boyforge/data/boy.bsy")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boyforge")).args(args).output().unwrap()
}

fn text(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned() + &String::from_utf8_lossy(&o.stderr)
}

/// Copies the shipped plan and nets into `dir`, editing the plan text.
fn edited(dir: &Path, f: impl Fn(&str) -> String) -> PathBuf {
    let data = shipped().parent().unwrap().to_path_buf();
    std::fs::copy(data.join("boy.net"), dir.join("boy.net")).unwrap();
    let plan = std::fs::read_to_string(shipped()).unwrap();
    let p = dir.join("boy.bsy");
    std::fs::write(&p, f(&plan)).unwrap();
    p
}

#[test]
fn verify_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let o = run(&["verify", shipped().to_str().unwrap(), "--report", json.to_str().unwrap()]);
    let out = text(&o);
    assert_eq!(o.status.code(), Some(1), "{out}");
    let fails: Vec<&str> = out.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(fails.len(), 1, "{out}");
    assert!(fails[0].contains("three boundary circles"));
    assert!(out.contains("PASS euler characteristic: computed 1"));
    let j = std::fs::read_to_string(json).unwrap();
    assert!(j.starts_with('{') && j.ends_with("}\n"));
    assert!(j.contains("\"verdict\": \"fail\""));
}

#[test]
fn misplaced_anchor_names_the_anchor() {
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), |s| s.replace("A->A',B->B',C->C'\n", "A->A',B->B',C->C''\n"));
    let o = run(&["verify", p.to_str().unwrap()]);
    let out = text(&o);
    assert_eq!(o.status.code(), Some(1), "{out}");
    assert!(out.contains("anchor C"), "{out}");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "/nonexistent/boy.bsy"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = edited(dir.path(), |s| s.replace("place piece_I as I1", "plaice piece_I as I1"));
    let o = run(&["verify", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", text(&o));
    assert!(text(&o).contains("at 4:1"), "{}", text(&o));
}

#[test]
fn built_mesh_classifies_back() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["build", shipped().to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    let mesh = dir.path().join("boy.obj");
    assert!(dir.path().join("boy-double-curve.obj").exists());
    let o = run(&["classify", mesh.to_str().unwrap(), "--keep-vertices"]);
    let out = text(&o);
    assert!(o.status.success(), "{out}");
    assert_eq!(out.lines().next().unwrap(), "projective plane, χ=1, non-orientable");
    assert!(out.contains("boundary circles: 0"));
    assert!(out.contains("homology: (Z, Z/2, 0)"));
    assert!(out.contains("triple points: 1"));
}

#[test]
fn cube_mesh_is_a_sphere() {
    let cube = Path::new(env!("CARGO_MANIFEST_DIR")).join("../boyforge/tests/data/cube.bsy");
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["build", cube.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]).status.success());
    let o = run(&["classify", dir.path().join("cube.obj").to_str().unwrap()]);
    assert_eq!(text(&o).lines().next().unwrap(), "sphere, χ=2, orientable");
    let o = run(&["classify", dir.path().join("cube.obj").to_str().unwrap(), "--weld", "0.001"]);
    assert_eq!(text(&o).lines().next().unwrap(), "sphere, χ=2, orientable");
    assert_eq!(run(&["classify", "x.obj", "--weld", "-1"]).status.code(), Some(2));
}

#[test]
fn nets_sheet_has_seven_copies() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("nets.svg");
    let o = run(&["nets", shipped().to_str().unwrap(), "--svg", svg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o));
    let s = std::fs::read_to_string(svg).unwrap();
    assert!(s.starts_with("<?xml") || s.starts_with("<svg"));
    assert_eq!(s.matches("class=\"net\"").count(), 7);
}

#[test]
fn surgery_reports_the_remainder() {
    let o = run(&["surgery", shipped().to_str().unwrap(), "--enumerate-resolutions"]);
    let out = text(&o);
    assert_eq!(o.status.code(), Some(1), "{out}");
    assert!(out.contains("remainder: 6 faces from I1, I2, I3"), "{out}");
    assert!(out.contains("Möbius band, χ=0, 1 boundary circles"), "{out}");
    assert!(out.contains("0 of 1 resolutions"), "{out}");
}
