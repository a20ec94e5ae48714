use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn zcwell(dir: &Path, args: &[&str]) -> Output {
    zcwell_env(dir, args, None)
}

fn zcwell_env(dir: &Path, args: &[&str], units: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_zcwell"));
    cmd.current_dir(dir).args(args).env_remove("ZCWELL_UNITS");
    if let Some(u) = units {
        cmd.env("ZCWELL_UNITS", u);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "exit {:?}\n{}", o.status.code(), stderr(o));
}

fn table(path: &Path) -> (String, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn json_field(text: &str, key: &str) -> f64 {
    let at = text.find(&format!("\"{key}\":")).unwrap_or_else(|| panic!("no {key}"));
    let rest = &text[at + key.len() + 3..];
    let end = rest.find([',', '\n', '}']).unwrap();
    rest[..end].trim().parse().unwrap()
}

fn write_design(dir: &Path, name: &str, body: &str) {
    fs::write(dir.join(name), body).unwrap();
}

#[test]
fn triangle_shortcut_prints_strength() {
    let dir = TempDir::new().unwrap();
    let o = zcwell(dir.path(), &["design", "--shape", "triangle", "--c", "0.5"]);
    ok(&o);
    assert!(stdout(&o).contains("\"strength\": -2.0"));
}

#[test]
fn peak_on_the_wall_is_a_domain_error() {
    let dir = TempDir::new().unwrap();
    let o = zcwell(dir.path(), &["design", "--shape", "triangle", "--c", "0.0"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("[Domain]"), "{err}");
    assert!(err.contains("diverges as c -> 0"), "{err}");
    assert!(stdout(&o).is_empty());
}

#[test]
fn minimal_file_gains_spikes_and_round_trips() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    write_design(
        p,
        "w.json",
        r#"{"a": 2.0, "hbar": 1.0, "mass": 1.0, "boundary": "dirichlet",
            "knots": [[0.0, 0.0], [0.5, 1.0], [1.5, 0.5], [2.0, 0.0]]}"#,
    );
    ok(&zcwell(p, &["design", "--input", "w.json", "--output", "full.json"]));
    let full = fs::read_to_string(p.join("full.json")).unwrap();
    // slopes 2, -0.5, -1: g = (1/2) (slope jump) / psi
    let g: Vec<f64> = full
        .match_indices("\"strength\":")
        .map(|(i, _)| {
            let rest = &full[i + 11..];
            rest[..rest.find('\n').unwrap()].trim().parse().unwrap()
        })
        .collect();
    assert_eq!(g.len(), 2);
    assert!((g[0] - 0.5 * (-0.5 - 2.0) / 1.0).abs() < 1e-14);
    assert!((g[1] - 0.5 * (-1.0 + 0.5) / 0.5).abs() < 1e-14);

    ok(&zcwell(p, &["design", "--input", "full.json", "--output", "again.json"]));
    assert_eq!(full, fs::read_to_string(p.join("again.json")).unwrap());
    ok(&zcwell(p, &["analyze", "--input", "full.json", "--out-csv", "xp"]));
    ok(&zcwell(p, &["susy", "--input", "full.json", "--out", "partner.json"]));
    ok(&zcwell(p, &["verify", "--input", "full.json", "--ladder", "63,127", "--k", "3", "--out", "r.json"]));
}

#[test]
fn cusp_at_a_node_is_rejected() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    write_design(
        p,
        "bad.json",
        r#"{"a": 1.0, "hbar": 1.0, "mass": 1.0, "boundary": "dirichlet",
            "knots": [[0.0, 0.0], [0.25, 1.0], [0.5, 0.0], [0.75, 1.0], [1.0, 0.0]]}"#,
    );
    let o = zcwell(p, &["design", "--input", "bad.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[CuspAtNode]"));
}

#[test]
fn single_cusp_periodic_design_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    write_design(
        p,
        "ring.json",
        r#"{"a": 1.0, "hbar": 1.0, "mass": 1.0, "boundary": "periodic",
            "knots": [[0.0, 1.0], [0.5, 2.0], [1.0, 1.0]]}"#,
    );
    let o = zcwell(p, &["design", "--input", "ring.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[PeriodicInfeasible]"), "{}", stderr(&o));
}

#[test]
fn analyze_writes_both_tables() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "triangle", "--c", "0.3", "--output", "t.json"]));
    let o = zcwell(p, &["analyze", "--input", "t.json", "--pgrid", "-40:40:801", "--out-csv", "xp"]);
    ok(&o);
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("parseval:")).expect("parseval line");
    let norm: f64 = line.split('=').nth(1).unwrap().trim().split(' ').next().unwrap().parse().unwrap();
    assert!((norm - 1.0).abs() < 1e-6, "{line}");

    let (hx, xs) = table(&p.join("xp_x.csv"));
    assert_eq!(hx, "x,psi");
    // the peak value sqrt(3/a) is sampled at the knot
    assert!(xs.iter().any(|r| r[0] == 0.3 && (r[1] - 3f64.sqrt()).abs() < 1e-15));
    assert!(xs.windows(2).all(|w| w[0][0] < w[1][0]));

    let (hp, ps) = table(&p.join("xp_p.csv"));
    assert_eq!(hp, "p,phi2");
    assert_eq!(ps.len(), 801);
    assert_eq!((ps[0][0], ps[800][0]), (-40.0, 40.0));
    let (a, c) = (1.0f64, 0.3f64);
    for r in ps.iter().filter(|r| r[0].abs() > 0.5) {
        let p = r[0];
        let want = 3.0 / (PI * c * (a - c) * p.powi(4))
            * ((1.0 - (p * c).cos()) / c + (1.0 - (p * (a - c)).cos()) / (a - c) - (1.0 - p.cos()) / a);
        assert!((r[1] - want).abs() <= 1e-9 * want.abs().max(1e-6), "p={p}");
    }
    let origin = ps.iter().find(|r| r[0] == 0.0).unwrap();
    assert!((origin[1] - 3.0 / (8.0 * PI)).abs() < 1e-10);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "twin-symmetric", "--output", "t.json"]));
    for stem in ["one", "two"] {
        ok(&zcwell(p, &["analyze", "--input", "t.json", "--pgrid", "-10:10:201", "--out-csv", stem]));
        ok(&zcwell(p, &["susy", "--input", "t.json", "--out", &format!("{stem}.json")]));
        ok(&zcwell(p, &["verify", "--input", "t.json", "--ladder", "59,119", "--k", "3", "--out", &format!("{stem}_r.json")]));
    }
    for suffix in ["_x.csv", "_p.csv", ".json", "_r.json"] {
        let a = fs::read(p.join(format!("one{suffix}"))).unwrap();
        let b = fs::read(p.join(format!("two{suffix}"))).unwrap();
        assert_eq!(a, b, "{suffix}");
    }
}

#[test]
fn unit_override_from_environment() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let o = zcwell_env(p, &["design", "--shape", "triangle", "--c", "0.5"], Some("2,1,1"));
    ok(&o);
    assert!(stdout(&o).contains("\"strength\": -8.0"));
    // flag wins over the environment
    let o = zcwell_env(p, &["--units", "1,0.5,1", "design", "--shape", "triangle", "--c", "0.5"], Some("2,1,1"));
    ok(&o);
    assert!(stdout(&o).contains("\"strength\": -4.0"));
    let o = zcwell_env(p, &["design", "--shape", "triangle", "--c", "0.5"], Some("1,1"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn refuses_to_overwrite_input() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "triangle", "--c", "0.5", "--output", "t.json"]));
    let before = fs::read(p.join("t.json")).unwrap();
    let o = zcwell(p, &["design", "--input", "t.json", "--output", "./t.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[Usage]"));
    assert_eq!(before, fs::read(p.join("t.json")).unwrap());
}

#[test]
fn numerical_failure_exits_two() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "triangle", "--c", "0.5", "--output", "t.json"]));
    let o = zcwell(p, &["analyze", "--input", "t.json", "--out-csv", "xp", "--tail-tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("[QuadratureNonConvergence]"));
}

#[test]
fn susy_partner_file_layout() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "twin-symmetric", "--output", "t.json"]));
    ok(&zcwell(p, &["susy", "--input", "t.json", "--out", "partner.json"]));
    let text = fs::read_to_string(p.join("partner.json")).unwrap();
    assert!(text.contains("\"spikes\""));
    assert!(text.contains("\"zero\": true"));
    assert_eq!(text.matches("\"K\":").count(), 2);
    assert!((json_field(&text, "K") - 1.0).abs() < 1e-12);

    let o = zcwell(p, &["design", "--shape", "twin-antisymmetric", "--output", "anti.json"]);
    ok(&o);
    let o = zcwell(p, &["susy", "--input", "anti.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[NodeInInterior]"));
}

#[test]
fn susy_report_matches_spectra() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "twin-symmetric", "--output", "t.json"]));
    let o = zcwell(p, &["susy", "--input", "t.json", "--out", "partner.json", "--report", "iso.json", "--ladder", "299,599,1199", "--k", "3"]);
    ok(&o);
    let text = fs::read_to_string(p.join("iso.json")).unwrap();
    assert!(text.contains("\"passed\": true"));
    assert!(text.contains("\"zero_mode_unmatched\": true"));
    assert!(text.contains("\"version\""));
}

#[test]
fn verify_report_and_detuned_control() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "triangle", "--c", "0.5", "--output", "t.json"]));
    let o = zcwell(p, &["verify", "--input", "t.json", "--ladder", "199,399", "--k", "3", "--out", "r.json"]);
    ok(&o);
    let text = fs::read_to_string(p.join("r.json")).unwrap();
    for key in ["ladder", "eigenvalues", "zero_mode", "overlaps", "convergence_order", "passed", "meta"] {
        assert!(text.contains(&format!("\"{key}\"")), "{key}");
    }
    assert!(text.contains("\"passed\": true"));

    // listed spikes are checked as written
    let detuned = text_replace(&fs::read_to_string(p.join("t.json")).unwrap(), "-2.0", "-1.0");
    fs::write(p.join("d.json"), detuned).unwrap();
    let o = zcwell(p, &["verify", "--input", "d.json", "--ladder", "199,399", "--k", "3", "--out", "rd.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[VerificationFailed]"));
    let e0 = json_field(&fs::read_to_string(p.join("rd.json")).unwrap().replace("[\n", "").replace(' ', ""), "zero_mode");
    assert!(e0 > 1.0, "{e0}");
}

fn text_replace(s: &str, from: &str, to: &str) -> String {
    assert!(s.contains(from));
    s.replace(from, to)
}

#[test]
fn off_grid_ladder_names_a_compatible_size() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["design", "--shape", "twin-symmetric", "--output", "t.json"]));
    let o = zcwell(p, &["verify", "--input", "t.json", "--ladder", "999"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("[SpikeOffGrid]") && err.contains("17"), "{err}");
}

#[test]
fn asym_free_well_levels() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    ok(&zcwell(p, &["asym", "--a", "1", "--b", "1", "--v0", "0", "--levels", "5", "--out-csv", "levels.csv"]));
    let text = fs::read_to_string(p.join("levels.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,E,regime"));
    for (i, line) in lines.enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        let n = (i + 1) as f64;
        assert_eq!(cells[0], (i + 1).to_string());
        let e: f64 = cells[1].parse().unwrap();
        let want = n * n * PI * PI / 8.0;
        assert!((e / want - 1.0).abs() < 1e-9);
        assert_eq!(cells[2], "above");
    }
}

#[test]
fn asym_tune_prints_step_height() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    let o = zcwell(p, &["asym", "tune", "--a", "1", "--b", "1", "--branch", "0"]);
    ok(&o);
    // bisection on sin x + x cos x over (pi/2, pi)
    let (mut lo, mut hi) = (PI / 2.0, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid.sin() + mid * mid.cos() > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let out = stdout(&o);
    let v0: f64 = out.lines().find_map(|l| l.strip_prefix("V0 = ")).unwrap().parse().unwrap();
    assert!((v0 - 0.5 * lo * lo).abs() < 1e-12);

    let (h, rows) = table(&p.join("zc_wave.csv"));
    assert_eq!(h, "x,psi");
    assert_eq!(rows.first().unwrap()[1], 0.0);
    assert!(rows.last().unwrap()[1].abs() < 1e-15);
    // the step point is sampled
    assert!(rows.iter().any(|r| r[0] == 1.0));

    let o = zcwell(p, &["asym", "--a", "1", "--b", "1", "--v0", &v0.to_string(), "--levels", "2", "--wave-csv", "w.csv"]);
    ok(&o);
    assert!(stdout(&o).contains("threshold"));
    let o = zcwell(p, &["asym", "--a", "1", "--b", "1", "--v0", "2.5", "--wave-csv", "w2.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[NotTuned]"));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = zcwell(dir.path(), &["design"]);
    assert_eq!(o.status.code(), Some(1));
    let o = zcwell(dir.path(), &["--help"]);
    ok(&o);
    let o = zcwell(dir.path(), &["analyze", "--input", "x.json", "--out-csv", "s", "--pgrid", "1:0:5"]);
    assert_eq!(o.status.code(), Some(1));
}
