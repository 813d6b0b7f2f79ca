use serde_json::{json, Value};
use shapeflow::domain::Domain;
use shapeflow::immersion::Immersion;
use shapeflow::io::{load_frame, read_scalar_csv, write_csv, write_obj, write_scalar_csv, RunConfig};
use shapeflow::runner::{is_config_error, run, RunStatus};
use shapeflow::ShapeError;
use std::path::Path;

fn circle_config(dir: &Path, nodes: usize) -> Value {
    json!({
        "name": "test-circle",
        "domain": {"kind": "circle", "resolution": [nodes]},
        "operator": {"A": 1.0, "p": 1},
        "immersion": {"preset": "circle", "r": 1.0},
        "momentum": {"preset": "radial", "rT": 1.0},
        "time": {"tEnd": 0.2, "dtMax": 0.02, "outputEvery": 0.1},
        "output": {"dir": dir},
        "checks": ["circle-vs-ode", "energy-drift", "momentum-drift", "horizontality", "area-swept", "sqrt-vol-lipschitz"]
    })
}

fn parse(v: &Value, base: Option<&Path>) -> shapeflow::Result<RunConfig> {
    RunConfig::from_json(&v.to_string(), base)
}

#[test]
fn config_errors_are_config_errors() {
    let err = RunConfig::from_json("{\n  \"name\": \"x\",\n  \"domain\": 3\n}", None).unwrap_err();
    assert!(matches!(&err, ShapeError::Config(m) if m.starts_with("line 3,")), "{err}");
    assert!(is_config_error(&err));

    let dir = tempfile::tempdir().unwrap();
    let mut v = circle_config(dir.path(), 32);
    v["bogus"] = json!(1);
    assert!(parse(&v, None).is_err());

    let mut v = circle_config(dir.path(), 32);
    v["immersion"] = json!({"preset": "torus", "R": 2.0, "rho": 0.5});
    let e = parse(&v, None).unwrap_err();
    assert!(is_config_error(&e) && e.to_string().contains("does not fit"), "{e}");

    let mut v = circle_config(dir.path(), 32);
    v["domain"] = json!({"kind": "torus", "resolution": [8]});
    let e = parse(&v, None).and_then(|c| c.validate()).unwrap_err();
    assert!(is_config_error(&e), "{e}");

    let mut v = circle_config(dir.path(), 32);
    v["momentum"] = json!({"preset": "product-sine"});
    assert!(parse(&v, None).is_err());
}

#[test]
fn frames_round_trip_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let dom = Domain::torus(7, 5).unwrap();
    let f = Immersion::<f64>::from_fn(dom.clone(), 3, |u, v| [u.sin() / 3.0, v.cos() * 0.1 + 1e-17, u * v]).unwrap();
    let obj = dir.path().join("f.obj");
    let csv = dir.path().join("f.csv");
    write_obj(&obj, &f, 0.25).unwrap();
    write_csv(&csv, &f).unwrap();
    assert_eq!(load_frame::<f64>(&obj, &dom, 3).unwrap(), f);
    assert_eq!(load_frame::<f64>(&csv, &dom, 3).unwrap(), f);
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 35);
    assert!(load_frame::<f64>(&obj, &Domain::torus(6, 5).unwrap(), 3).is_err());

    let c = Immersion::<f64>::circle(Domain::circle(9).unwrap(), 0.3, [0.1, 0.2]).unwrap();
    let path = dir.path().join("c.obj");
    write_obj(&path, &c, 0.0).unwrap();
    assert_eq!(load_frame::<f64>(&path, c.domain(), 2).unwrap(), c);
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().filter(|l| l.starts_with("l ")).count(), 9);

    let s = dir.path().join("b.csv");
    let vals = vec![0.1, -2.5e-7, 3.0];
    write_scalar_csv(&s, "b", &vals).unwrap();
    assert_eq!(read_scalar_csv(&s).unwrap(), vals);
}

#[test]
fn completed_run_writes_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let out_a = run(&parse(&circle_config(&a, 64), None).unwrap()).unwrap();
    run(&parse(&circle_config(&b, 64), None).unwrap()).unwrap();
    assert_eq!(out_a.status, RunStatus::Completed, "{:?}", out_a.checks);
    assert_eq!(out_a.status.exit_code(), 0);
    assert_eq!(out_a.frames.len(), 3);
    for name in ["diagnostics.csv", "checks.csv", "manifest.json", "circle_vs_ode.csv", "ode.csv", "frames/times.csv", "frames/0002.csv"] {
        assert!(a.join(name).exists(), "{name}");
    }
    let diag = std::fs::read_to_string(a.join("diagnostics.csv")).unwrap();
    assert_eq!(diag, std::fs::read_to_string(b.join("diagnostics.csv")).unwrap());
    assert!(diag.lines().next().unwrap().starts_with("t,dt,energy,"));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(a.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["name"], "test-circle");
    assert_eq!(manifest["frames"].as_array().unwrap().len(), 3);
    let checks = std::fs::read_to_string(a.join("checks.csv")).unwrap();
    assert!(checks.lines().skip(1).all(|l| l.ends_with("PASS")));
}

#[test]
fn coarse_circle_fails_the_ode_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&parse(&circle_config(dir.path(), 8), None).unwrap()).unwrap();
    assert_eq!(out.status, RunStatus::ChecksFailed);
    assert_eq!(out.status.exit_code(), 3);
    assert!(out.checks.iter().any(|c| c.name == "circle-vs-ode" && !c.pass));
}

#[test]
fn impossible_tolerance_aborts() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = circle_config(dir.path(), 32);
    v["time"] = json!({"tEnd": 0.2, "dtMax": 0.02, "dtMin": 0.01, "driftTol": 1e-15});
    let out = run(&parse(&v, None).unwrap()).unwrap();
    assert_eq!(out.status, RunStatus::Aborted);
    assert_eq!(out.status.exit_code(), 2);
    assert!(matches!(out.abort, Some(ShapeError::Aborted { .. })));
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn diagnostics_cadence_is_respected() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = circle_config(dir.path(), 32);
    v["output"]["diagnosticsEvery"] = json!(4);
    v["checks"] = json!([]);
    let out = run(&parse(&v, None).unwrap()).unwrap();
    let rows = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap().lines().count() - 1;
    let n = out.trajectory.diagnostics.len();
    assert_eq!(rows, (n - 1) / 4 + 1 + usize::from((n - 1) % 4 != 0));
}

#[test]
fn file_presets_resolve_against_the_config_directory() {
    let dir = tempfile::tempdir().unwrap();
    let dom = Domain::dirichlet_square(12, 12).unwrap();
    let f = Immersion::<f64>::flat_sheet(dom.clone()).unwrap();
    write_obj(&dir.path().join("sheet.obj"), &f, 0.0).unwrap();
    let b: Vec<f64> = (0..dom.nodes()).map(|k| if dom.is_boundary(k) { 0.0 } else { 0.1 }).collect();
    write_scalar_csv(&dir.path().join("b.csv"), "b", &b).unwrap();
    let img = image::GrayImage::from_fn(16, 16, |x, y| image::Luma([if (4..12).contains(&x) && (4..12).contains(&y) { 0 } else { 255 }]));
    img.save(dir.path().join("mask.pgm")).unwrap();

    let out_dir = dir.path().join("out");
    let mut v = json!({
        "domain": {"kind": "dirichlet-square", "resolution": [12, 12]},
        "operator": {"A": 1.0, "p": 1},
        "immersion": {"preset": "from-file", "path": "sheet.obj"},
        "momentum": {"preset": "from-file", "path": "b.csv"},
        "time": {"tEnd": 0.1, "dtMax": 0.05},
        "output": {"dir": out_dir, "format": "csv"},
        "checks": ["energy-drift", "horizontality"]
    });
    let cfg = parse(&v, Some(dir.path())).unwrap();
    let out = run(&cfg).unwrap();
    assert_eq!(out.status, RunStatus::Completed);
    assert!(out_dir.join("frames/0001.csv").exists());
    assert!(parse(&v, None).and_then(|c| run(&c)).is_err());

    v["momentum"] = json!({"preset": "bitmap", "path": "mask.pgm", "sigma": 1.0, "amplitude": 0.5});
    let out = run(&parse(&v, Some(dir.path())).unwrap()).unwrap();
    assert_eq!(out.status, RunStatus::Completed);
    let b0 = &out.trajectory.frames[0].b;
    let centre = dom.index(6, 6);
    assert!(b0[centre] > 0.0);
}
