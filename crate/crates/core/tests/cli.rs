use std::path::Path;
use std::process::{Command, Output};

fn per1lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_per1lab"))
        .args(args)
        .env_remove("PER1LAB_CONFIG")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    let prefix = format!("{key}=");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .to_string()
}

#[test]
fn residue_prints_iota_and_resit() {
    let o = per1lab(&["residue", "--a", "1.0"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(field(&s, "iota").parse::<f64>().unwrap(), 1.0);
    assert_eq!(field(&s, "resit").parse::<f64>().unwrap(), 0.0);
    assert!(s.starts_with("# per1lab residue\n# epsilon="));
}

#[test]
fn find_a_then_height_round_trips() {
    let o = per1lab(&["find-a", "--height", "2.0", "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    let a = field(&stdout(&o), "a");
    let o = per1lab(&["height", "--a", &a, "--tol", "1e-9"]);
    assert_eq!(o.status.code(), Some(0));
    let h: f64 = field(&stdout(&o), "h").parse().unwrap();
    assert!((h - 2.0).abs() < 1e-6, "{h}");
}

#[test]
fn verify_theorem_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().to_str().unwrap();
    let o = per1lab(&["verify", "theorem", "--t", "2.0", "--radius", "1e-4", "--n", "64", "--output-dir", od]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let s = stdout(&o);
    assert!(s.contains("misiurewicz_like=0"));
    assert!(s.contains("disk PASS"));
    assert!(Path::new(&field(&s, "report")).exists());
}

#[test]
fn verify_contrast_run() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().to_str().unwrap();
    let o = per1lab(&["verify", "theorem", "--a", "0.5", "--n", "32", "--output-dir", od]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("misiurewicz_like=0"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().to_str().unwrap();
    assert_eq!(per1lab(&[]).status.code(), Some(2));
    assert_eq!(per1lab(&["residue", "--a", "1", "--unknown"]).status.code(), Some(2));
    assert_eq!(per1lab(&["verify", "theorem", "--t", "1.0", "--output-dir", od]).status.code(), Some(2));
    assert_eq!(per1lab(&["find-a", "--height", "1e6"]).status.code(), Some(2));
    assert_eq!(per1lab(&["classify", "--a", "1.3", "--delta-re", "0.1"]).status.code(), Some(2));
    assert_eq!(
        per1lab(&["phase", "--a", "1.3", "--delta-re", "0", "--delta-im", "1e-5"]).status.code(),
        Some(3)
    );
    // a failed verification exits 1: one iterate is too few for any
    // critical orbit to escape
    let o = per1lab(&["verify", "lemma41", "--t", "2.0", "--max-iter", "1", "--output-dir", od]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("lemma41 FAIL"));
}

#[test]
fn config_file_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("per1lab.conf");
    std::fs::write(&cfg, "epsilon=0.004\nmax_iter=1234\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_per1lab"))
        .args(["classify", "--a", "1.3", "--delta-re", "1e-6", "--max-iter", "99999"])
        .env("PER1LAB_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("epsilon=4.0000000000000001e-3"), "{s}");
    assert!(s.contains("max_iter=99999"), "{s}");
    assert!(s.contains(&format!("config={}", cfg.display())), "{s}");
}

#[test]
fn scans_write_csv_and_ppm() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().to_str().unwrap();
    let o = per1lab(&["scan-delta", "--a", "1.3", "--radius", "1e-4", "--n", "9", "--out", "disk.csv", "--output-dir", od]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("disk.csv")).unwrap();
    assert_eq!(csv.lines().count(), 82);
    assert_eq!(
        csv.lines().next().unwrap(),
        "re,im,verdict,escape_iter_plus,escape_iter_minus,min_multiplier_modulus,im_sigma"
    );
    let img = std::fs::read(dir.path().join("disk.ppm")).unwrap();
    assert!(img.starts_with(b"P6\n9 9\n255\n"));
    assert_eq!(img.len(), b"P6\n9 9\n255\n".len() + 3 * 81);

    let o = per1lab(&[
        "scan-slice", "--re-min", "-2", "--re-max", "2", "--im-min", "-1", "--im-max", "1",
        "--n", "8", "--out", "slice", "--max-iter", "500", "--jobs", "2", "--output-dir", od,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("slice.csv").exists());
    assert!(dir.path().join("slice.ppm").exists());
}
