use std::f64::consts::PI;
use std::process::{Command, Output};

fn qpart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpart")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// The second column of a spectrum CSV.
fn eigenvalue_column(o: &Output) -> Vec<f64> {
    stdout(o).lines().skip(2).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect()
}

/// The number after `key = ` on the first line containing it.
fn field(text: &str, key: &str) -> f64 {
    let pat = format!("{key} = ");
    let rest = &text[text.find(&pat).unwrap_or_else(|| panic!("no `{key}` in\n{text}")) + pat.len()..];
    rest.split(|c: char| c == ',' || c.is_whitespace()).next().unwrap().parse().unwrap()
}

#[test]
fn spectrum_closed_forms() {
    let o = qpart(&["spectrum", "catalog:interval:1", "--conditions", "all-dirichlet", "--count", "3"]);
    assert!(o.status.success());
    let v = eigenvalue_column(&o);
    for (j, x) in v.iter().enumerate() {
        assert!((x - (PI * (j + 1) as f64).powi(2)).abs() < 1e-8);
    }
    assert!(stdout(&o).starts_with("# beta = 0, leaves = 2, length = 1\n"));

    let o = qpart(&["spectrum", "catalog:loop:1", "--count", "4"]);
    let v = eigenvalue_column(&o);
    let expect = [0.0, 4.0 * PI * PI, 4.0 * PI * PI, 16.0 * PI * PI];
    assert!(v.iter().zip(expect).all(|(a, b)| (a - b).abs() < 1e-8), "{v:?}");
}

#[test]
fn per_vertex_conditions() {
    // star center is vertex 0: Dirichlet there gives three decoupled quarter-wave edges
    let o = qpart(&["spectrum", "catalog:star:3", "--conditions", "d,s,s,s", "--count", "3"]);
    let v = eigenvalue_column(&o);
    assert!(v.iter().all(|x| (x - PI * PI / 4.0).abs() < 1e-8), "{v:?}");
    assert_eq!(qpart(&["spectrum", "catalog:star:3", "--conditions", "d,s"]).status.code(), Some(2));
}

#[test]
fn parse_errors_exit_with_2() {
    let dir = std::env::temp_dir().join(format!("qpart-cli-bad-{}", std::process::id()));
    std::fs::write(&dir, "{ \"edges\": [").unwrap();
    let o = qpart(&["spectrum", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("graph file"));
    std::fs::remove_file(&dir).unwrap();
    assert_eq!(qpart(&["spectrum", "catalog:hexagon:1"]).status.code(), Some(2));
    assert_eq!(qpart(&["energy", "catalog:star:3", "--k", "3"]).status.code(), Some(2));
    assert_eq!(qpart(&["energy", "catalog:star:3", "--k", "3", "--kind", "X"]).status.code(), Some(2));
}

#[test]
fn solver_limits_exit_with_3() {
    let o = qpart(&["energy", "catalog:star:3", "--k", "7", "--kind", "N"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceeds the limit"));
}

#[test]
fn star_energies() {
    let n = stdout(&qpart(&["energy", "catalog:star:3", "--k", "3", "--kind", "N"]));
    assert!((field(&n, "energy N_3") / (PI * PI) - 1.0).abs() < 0.01, "{n}");
    let d = stdout(&qpart(&["energy", "catalog:star:3", "--k", "4", "--kind", "D"]));
    assert!((field(&d, "energy D_4") / (PI * PI) - 1.0).abs() < 0.01, "{d}");
    assert_eq!(d.lines().filter(|l| l.starts_with("cluster ")).count(), 4);
}

#[test]
fn interval_dirichlet_energy_has_natural_leaves() {
    let d = stdout(&qpart(&["energy", "catalog:interval:1", "--k", "5", "--kind", "D"]));
    assert!((field(&d, "energy D_5") / (16.0 * PI * PI) - 1.0).abs() < 1e-8, "{d}");
}

#[test]
fn energy_csv_lists_fragments() {
    let o = qpart(&["energy", "catalog:interval:1", "--k", "2", "--kind", "N", "--csv"]);
    let text = stdout(&o);
    assert!(text.starts_with("cluster,edge,start,end,boundary_count,class\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn verify_passes_on_catalog_graphs() {
    let o = qpart(&["verify", "catalog:star:3", "--kmax", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));

    let o = qpart(&["verify", "catalog:loop:1", "--kmax", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("mu_k equals the Eulerian bound for k = 2, 4."));
}

#[test]
fn windmill_sharpness_row() {
    let o = qpart(&["verify", "catalog:windmill:1:4:1", "--kmax", "14", "--bounds-only", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row: Vec<&str> = text.lines().find(|l| l.starts_with("14,")).unwrap().split(',').collect();
    // k, lambda, mu, rank_excess, eulerian_upper, ...
    let mu: f64 = row[2].parse().unwrap();
    let eulerian: f64 = row[4].parse().unwrap();
    let expect = 225.0 * PI * PI / 100.0;
    assert!((mu / expect - 1.0).abs() < 1e-8 && (eulerian / expect - 1.0).abs() < 1e-12);
}

#[test]
fn verify_json_is_valid() {
    let o = qpart(&["verify", "catalog:interval:1", "--kmax", "3", "--mesh", "8", "--format", "json"]);
    let text = stdout(&o);
    assert!(text.trim_start().starts_with('{') && text.contains("\"checks\""));
}

#[test]
fn nodal_counts() {
    let t = stdout(&qpart(&["nodal", "catalog:interval:1", "--index", "4"]));
    assert!(t.contains("nu = 4, xi = 3, nu - xi = 1"), "{t}");
    assert!(t.contains(": pass"));

    let t = stdout(&qpart(&["nodal", "catalog:loop:1", "--index", "2"]));
    assert!(t.contains("nu = 2, xi = 2, nu - xi = 0"), "{t}");

    // the second eigenvalue of the equilateral star is double
    let t = stdout(&qpart(&["nodal", "catalog:star:3", "--index", "2"]));
    assert!(t.contains("generic = false") && t.contains("skipped"), "{t}");
}

#[test]
fn catalog_files_round_trip() {
    let dir = std::env::temp_dir().join(format!("qpart-cli-rt-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for spec in ["star:3", "loop:1", "lasso:1:1", "figure8:1:1", "dumbbell:1:1:1", "pumpkin:3", "pumpkin_dumbbell:1:1", "windmill:1:4:1", "stower:2:2"] {
        let o = qpart(&["catalog", spec]);
        assert!(o.status.success());
        let path = dir.join(format!("{}.json", spec.replace(':', "_")));
        std::fs::write(&path, &o.stdout).unwrap();
        let again = qpart(&["catalog", path.to_str().unwrap()]);
        // a file path is not a catalog spec
        assert_eq!(again.status.code(), Some(2));
        let from_file = qpart(&["spectrum", path.to_str().unwrap(), "--count", "6"]);
        let from_spec = qpart(&["spectrum", &format!("catalog:{spec}"), "--count", "6"]);
        assert_eq!(stdout(&from_file), stdout(&from_spec), "{spec}");
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_byte_stable() {
    let args = ["energy", "catalog:lasso:1:2", "--k", "3", "--kind", "N"];
    assert_eq!(qpart(&args).stdout, qpart(&args).stdout);
    let args = ["energy", "catalog:lasso:1:2", "--k", "3", "--kind", "N", "--jobs", "1"];
    assert_eq!(qpart(&args).stdout, qpart(&args[..6]).stdout);
}
