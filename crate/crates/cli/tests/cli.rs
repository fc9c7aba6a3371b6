use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levy-deco"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fails_with_2(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(2), "{args:?}");
    String::from_utf8(out.stderr).unwrap()
}

/// Header plus numeric rows after the '#' block.
fn table(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

fn write_file(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn gaussian_exponent_is_minus_half_s_squared() {
    let (_, rows) = table(&ok(&["exponent", "--gaussian", "D=1", "--grid=-3:3:13"]));
    assert_eq!(rows.len(), 13);
    for r in rows {
        assert!((r[1] + r[0] * r[0] / 2.0).abs() < 1e-15);
        assert_eq!(r[2], 0.0);
    }
}

#[test]
fn stable_exponent_follows_the_power_law() {
    let (_, rows) = table(&ok(&["exponent", "--stable", "alpha=1.5,K=1,x0=1", "--grid=-4:4:9"]));
    let c = rows.iter().find(|r| r[0] == 1.0).unwrap()[1];
    for r in &rows {
        assert!((r[1] - c * r[0].abs().powf(1.5)).abs() < 1e-12 * (1.0 + r[1].abs()));
    }
}

#[test]
fn json_output_parses() {
    let text = ok(&["exponent", "--gaussian", "D=2", "--grid=0:1:2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["metadata"]["command"], "exponent");
    assert_eq!(v["rows"][1][1].as_f64().unwrap(), -1.0);
}

#[test]
fn missing_model_exits_2() {
    fails_with_2(&["exponent"]);
    fails_with_2(&["exponent", "--stable", "alpha=1.5", "--mandel", "k0=1"]);
    let err = fails_with_2(&["exponent", "--stable", "alpha=2.5,K=1,x0=1"]);
    assert!(err.starts_with("error kind="), "{err}");
}

#[test]
fn evolve_starts_at_one_and_jumps_agree() {
    let (h, rows) = table(&ok(&["evolve", "--mandel", "k0=1,rate=2", "--jump", "--t", "0,0.5,3"]));
    let (t, abs, dev) = (column(&h, "t"), column(&h, "abs_phi"), column(&h, "closed_vs_jump"));
    for r in &rows {
        if r[t] == 0.0 {
            assert_eq!(r[abs], 1.0);
        }
        assert!(r[dev] < 1e-10, "{r:?}");
    }
}

#[test]
fn small_truncation_is_refused() {
    let err = fails_with_2(&["evolve", "--mandel", "k0=1", "--jump", "--truncation", "1", "--t", "1"]);
    assert!(err.contains("kind=TruncationTooSmall"), "{err}");
    fails_with_2(&["evolve", "--gaussian", "D=1", "--jump"]);
}

#[test]
fn transition_is_monotone_in_nbar() {
    let (h, rows) = table(&ok(&["transition", "--mandel", "k0=1", "--nbar", "0,0.5,2,10"]));
    let (n, div) = (column(&h, "nbar"), column(&h, "divergence"));
    let mut per_n: Vec<(f64, f64)> = rows.iter().map(|r| (r[n], r[div])).collect();
    per_n.dedup();
    assert_eq!(per_n.len(), 4);
    assert_eq!(per_n[0].1, 0.0);
    for w in per_n[1..].windows(2) {
        assert!(w[1].1 < w[0].1, "{per_n:?}");
    }
    let compound = column(&h, "abs_cf_compound");
    assert!(rows.iter().filter(|r| r[n] == 0.0).all(|r| r[compound] == 1.0));
}

#[test]
fn empty_nbar_list_exits_2() {
    fails_with_2(&["transition", "--mandel", "k0=1", "--nbar", ""]);
}

#[test]
fn montecarlo_is_reproducible() {
    let args = ["montecarlo", "--mandel", "k0=1,rate=2", "--samples", "5000", "--seed", "9", "--grid=-5:5:21"];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let (h, rows) = table(&a);
    let rate = rows[0][column(&h, "pass_rate_3se")];
    assert!(rate > 0.9, "{rate}");
}

#[test]
fn single_sample_reports_infinite_error() {
    let text = ok(&["montecarlo", "--gaussian", "D=1", "--samples", "1", "--grid=0:1:3"]);
    assert!(text.contains("# se = infinite"));
    let (h, rows) = table(&text);
    assert!(rows.iter().all(|r| r[column(&h, "se")].is_infinite()));
}

#[test]
fn samples_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("samples.csv");
    ok(&["montecarlo", "--gaussian", "D=1", "--samples", "10", "--samples-out", path.to_str().unwrap()]);
    let body = std::fs::read_to_string(path).unwrap();
    assert_eq!(body.lines().filter(|l| !l.starts_with('#')).count(), 11);
}

#[test]
fn visibility_limits() {
    let (_, rows) = table(&ok(&["visibility", "--gaussian", "D=1", "--t", "0,1"]));
    assert_eq!(rows[0][1], 1.0);
    assert!(rows[1][1] < 1.0);

    // a point separation far beyond the kick scale leaves only the no-jump branch
    let (h, rows) = table(&ok(&["visibility", "--mandel", "k0=1,rate=1.5", "--point", "1e6", "--t", "0.5,1,2"]));
    let (v, p) = (column(&h, "visibility"), column(&h, "no_jump_probability"));
    for r in rows {
        assert!((r[v] - r[p]).abs() < 1e-5, "{r:?}");
    }
}

#[test]
fn unnormalized_weights_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let w = write_file(&dir, "w.csv", "0,1\n1,1\n2,1\n");
    let err = fails_with_2(&["visibility", "--gaussian", "D=1", "--weights", &w]);
    assert!(!err.contains("kind=Parse"), "{err}");
    let w = write_file(&dir, "ok.csv", "0 0.25\n1,0.5\n2\t0.25\n");
    ok(&["visibility", "--gaussian", "D=1", "--weights", &w]);
}

#[test]
fn command_line_beats_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_file(&dir, "run.cfg", "# sample run\ngaussian = D=1\ngrid = 0:1:2\nseed = 4\n");
    let text = ok(&["exponent", "--config", &cfg]);
    assert!(text.contains("# config.common.seed = 4"));
    let (_, rows) = table(&text);
    assert_eq!(rows[1][1], -0.5);

    let text = ok(&["exponent", "--config", &cfg, "--gaussian", "D=4", "--grid=0:1:3"]);
    let (_, rows) = table(&text);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2][1], -2.0);
}

#[test]
fn metadata_block_precedes_the_header() {
    let text = ok(&["exponent", "--gaussian", "D=1", "--grid=0:1:2"]);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# levy-deco "));
    assert_eq!(lines[1], "# command = exponent");
    assert!(lines.iter().any(|l| l.starts_with("# units = ")));
    let header = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    assert_eq!(lines[header], "s,re_psi,im_psi");
}

#[test]
fn output_goes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let stdout = ok(&["exponent", "--gaussian", "D=1", "--out", path.to_str().unwrap()]);
    assert!(stdout.is_empty());
    assert!(std::fs::read_to_string(path).unwrap().contains("s,re_psi,im_psi"));
}
