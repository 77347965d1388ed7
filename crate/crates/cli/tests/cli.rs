use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_viralcond"))
        .args(args)
        .output()
        .expect("spawn viralcond")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}: ");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
        .parse()
        .unwrap()
}

fn assert_diagnostic(out: &Output, code: i32, mentions: &str) {
    assert_eq!(out.status.code(), Some(code), "stderr: {}", stderr(out));
    let err = stderr(out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains(mentions), "{err}");
}

#[test]
fn table1_rows() {
    let out = run(&["table1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for row in [
        "10,90,11.38,11.22,-1.42%",
        "50,50,25,25,0%",
        "250,750,200.24,199.07,-0.59%",
    ] {
        assert!(text.lines().any(|l| l == row), "missing {row} in\n{text}");
    }
}

#[test]
fn compute_ring() {
    let out = run(&["compute", "--gen", "ring(1000)"]);
    assert!(out.status.success());
    let v = field(&stdout(&out), "v_numeric");
    assert!((v - 1.0).abs() < 0.02, "{v}");
}

#[test]
fn compute_grid() {
    let out = run(&["compute", "--gen", "grid2d(30,30)"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let exact_rho = 4.0 * (std::f64::consts::PI / 31.0).cos();
    assert!((field(&text, "threshold") - 1.0 / exact_rho).abs() < 1e-9);
    assert!((field(&text, "v_h") - 1.96).abs() < 0.06);
    // trapezoid on 401 points of the same fixed point gives 1.93970
    assert!((field(&text, "v_numeric") - 1.9397).abs() < 1e-3);
}

#[test]
fn compute_three_node_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.txt");
    fs::write(&path, "# a path\na b\nb c\n").unwrap();
    let out = run(&["compute", "--graph", path.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,N,L,mean_degree,threshold,V,V_H,rel_error"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], ["path", "3", "2"]);
    let v: f64 = row[5].parse().unwrap();
    assert!(v.is_finite() && v > 0.0 && v < 2f64.sqrt());
}

#[test]
fn compute_writes_curve() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let out = run(&[
        "compute",
        "--gen",
        "petersen",
        "--points",
        "5",
        "--curve",
        curve.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(curve).unwrap();
    assert!(text.starts_with("s,y,converged\n0,1,true\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn curve_and_generate() {
    let out = run(&["curve", "--gen", "ring:10", "--points", "3"]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,y,converged"));
    for (line, (s, y)) in lines.zip([(0.0, 1.0), (1.0, 0.5), (2.0, 0.0)]) {
        let cols: Vec<&str> = line.split(',').collect();
        assert!((cols[0].parse::<f64>().unwrap() - s).abs() < 1e-12, "{line}");
        assert!((cols[1].parse::<f64>().unwrap() - y).abs() < 1e-9, "{line}");
        assert_eq!(cols[2], "true");
    }
    let out = run(&["generate", "--gen", "grid:30,30"]);
    assert!(stdout(&out).starts_with("# nodes 900 edges 1740\n"));
}

#[test]
fn output_is_deterministic() {
    let args = ["compute", "--gen", "er:200,500", "--seed", "7", "--format", "csv"];
    let first = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, run(&args).stdout);
    let gen = ["generate", "--gen", "pa:300,600", "--seed", "3"];
    assert_eq!(run(&gen).stdout, run(&gen).stdout);
    let other = run(&["generate", "--gen", "pa:300,600", "--seed", "4"]);
    assert_ne!(run(&gen).stdout, other.stdout);
}

#[test]
fn error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.txt");
    assert_diagnostic(
        &run(&["compute", "--graph", missing.to_str().unwrap()]),
        3,
        "missing.txt",
    );

    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "a b\nc\n").unwrap();
    let out = run(&["compute", "--graph", bad.to_str().unwrap()]);
    assert_diagnostic(&out, 4, "bad.txt");
    assert!(stderr(&out).contains("line 2"));

    let split = dir.path().join("split.txt");
    fs::write(&split, "a b\nc d\n").unwrap();
    assert_diagnostic(&run(&["compute", "--graph", split.to_str().unwrap()]), 6, "split.txt");

    assert_diagnostic(&run(&["compute", "--gen", "er:100,300"]), 5, "er:100,300");
    assert_diagnostic(&run(&["compute", "--gen", "ring:10", "--tol", "-1"]), 5, "--tol");
    assert_diagnostic(&run(&["compute", "--gen", "hypercube:3"]), 5, "hypercube");
    assert_eq!(run(&["compute"]).status.code(), Some(2));
    assert_eq!(
        run(&["compute", "--gen", "ring:5", "--graph", "x"]).status.code(),
        Some(2)
    );
}

#[test]
fn iteration_cap_warns_but_succeeds() {
    let out = run(&["compute", "--gen", "grid:6,6", "--max-iter", "2"]);
    assert!(out.status.success());
    assert!(stderr(&out).starts_with("warning: grid:6,6:"));
    assert!(field(&stdout(&out), "non_converged_samples") > 0.0);
}

#[test]
fn compare_petersen_with_bipartite() {
    let out = run(&["compare", "--a-gen", "petersen", "--b-gen", "bipartite:2,8"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let crossing: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("crossovers: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((crossing - 1.0).abs() < 1e-6, "{text}");
    assert!(text.contains("only bipartite:2,8 epidemic"));
}

#[test]
fn compare_identical_and_ring() {
    let same = run(&["compare", "--a-gen", "grid:5,5", "--b-gen", "grid:5,5"]);
    assert!(stdout(&same).contains("curves identical"));

    let out = run(&[
        "compare",
        "--a-gen",
        "ring:10",
        "--b-gen",
        "bipartite:2,8",
        "--format",
        "csv",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("s,y_a,converged_a,y_b,converged_b\n"));
    let text = stdout(&run(&["compare", "--a-gen", "ring:10", "--b-gen", "bipartite:2,8"]));
    let line = |name: &str| text.lines().find(|l| l.starts_with(name)).unwrap().to_owned();
    assert!(line("ring:10").contains("threshold=0.5"));
    let v = |l: String| -> f64 { l.rsplit("V=").next().unwrap().parse().unwrap() };
    assert!((v(line("ring:10")) - 1.0).abs() < 1e-6);
    assert!((v(line("bipartite:2,8")) - 1.7721).abs() < 1e-3);
}

#[test]
fn table2_skips_missing_topologies() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("hot.edges"), "0 1\n1 2\n2 3\n3 0\n0 2\n").unwrap();
    let out = run(&["table2", "--seeds", "2", "--topologies", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "name,N,L,mean_degree,threshold,V,V_H,rel_error,V_sd,seeds");
    assert_eq!(lines[1], "Abilene,,,,,,,skipped: topology file required,,0");
    assert!(lines[3].starts_with("HOT,4,5,2.5,"));
    assert!(lines[4].starts_with("Erdős-Rényi,1000,2009,4.018,"));
    assert!(lines[4].ends_with(",2"));
    assert_eq!(lines.len(), 9);
}
