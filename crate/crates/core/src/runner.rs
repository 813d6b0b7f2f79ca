//! Configuration-driven geodesic runs with file output.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::domain::DomainKind;
use crate::error::{Result, ShapeError};
use crate::geodesic::{integrate, Diagnostics, GeodesicState, Trajectory};
use crate::geometry::build_geometry;
use crate::immersion::Immersion;
use crate::io::config::{CheckKind, FrameFormat, ImmersionPreset, MomentumPreset, RunConfig};
use crate::io::{bitmap_momentum, frames, load_frame, read_scalar_csv, write_table};
use crate::linalg::{dot3, norm3};
use crate::oracles::sphere::radius_at;
use crate::oracles::{
    area_swept_bound_check, samples_from, sphere_ode_solve, sqrt_vol_lipschitz_check, BoundReport, SphereState,
};
use crate::sobolev::apply_p;

/// Relative tolerance on energy and momentum drift.
pub const DRIFT_LIMIT: f64 = 5e-3;
/// `reparamMomNorm / ‖P f_t‖` limit for horizontal runs.
pub const HORIZONTALITY_LIMIT: f64 = 1e-6;
pub const CIRCLE_RADIUS_LIMIT: f64 = 1e-3;
pub const CIRCLE_ROUNDNESS_LIMIT: f64 = 1e-6;

/// Exit status of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Completed,
    Aborted,
    ChecksFailed,
}

impl RunStatus {
    pub fn exit_code(self) -> i32 {
        match self {
            RunStatus::Completed => 0,
            RunStatus::Aborted => 2,
            RunStatus::ChecksFailed => 3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub abort: Option<ShapeError>,
    pub checks: Vec<BoundReport>,
    pub frames: Vec<PathBuf>,
    pub trajectory: Trajectory<f64>,
    pub wall_seconds: f64,
}

/// Whether an error stems from the configuration rather than the solver.
pub fn is_config_error(e: &ShapeError) -> bool {
    matches!(
        e,
        ShapeError::Config(_)
            | ShapeError::Io(_)
            | ShapeError::InvalidDomain(_)
            | ShapeError::InvalidImmersion(_)
            | ShapeError::InvalidOperator(_)
            | ShapeError::ShapeMismatch { .. }
            | ShapeError::NotHypersurface
    )
}

pub fn initial_immersion(cfg: &RunConfig) -> Result<Immersion<f64>> {
    let dom = cfg.domain.build()?;
    match &cfg.immersion {
        ImmersionPreset::FlatSheet => Immersion::flat_sheet(dom),
        ImmersionPreset::Circle { r, center } => Immersion::circle(dom, *r, *center),
        ImmersionPreset::Torus { big_r, rho } => Immersion::torus(dom, *big_r, *rho),
        ImmersionPreset::FromFile { path } => load_frame(path, &dom, cfg.ambient()),
    }
}

/// Builds `(f₀, b₀)` from the presets and solves for the initial velocity.
pub fn initial_state(cfg: &RunConfig) -> Result<GeodesicState<f64>> {
    let f = initial_immersion(cfg)?;
    let dom = f.domain().clone();
    let op = &cfg.operator;
    let density = |a: Vec<f64>| -> Result<Vec<f64>> {
        let geo = build_geometry(&f)?;
        Ok(a.iter().zip(&geo.vol_density).map(|(a, s)| a * s).collect())
    };
    let param = |k: usize| dom.param(k);
    let b = match &cfg.momentum {
        MomentumPreset::ProductSine { amplitude, k } => {
            let kf = *k as f64;
            let a = (0..dom.nodes())
                .map(|n| {
                    let [u, v] = param(n);
                    if dom.kind() == DomainKind::Circle {
                        amplitude * (kf * u).cos()
                    } else {
                        amplitude * (kf * u).sin() * (kf * v).sin()
                    }
                })
                .collect();
            density(a)?
        }
        MomentumPreset::GaussianBump { amplitude, center, width } => {
            let a = (0..dom.nodes())
                .map(|n| {
                    let [u, v] = param(n);
                    let d2 = (u - center[0]).powi(2) + if dom.dim() == 2 { (v - center[1]).powi(2) } else { 0.0 };
                    amplitude * (-d2 / (2.0 * width * width)).exp()
                })
                .collect();
            density(a)?
        }
        MomentumPreset::Bitmap { path, sigma, amplitude } => density(bitmap_momentum(path, *sigma, *amplitude, &dom)?)?,
        MomentumPreset::Radial { r_t, wobble, k } => {
            let v: Vec<f64> = (0..dom.nodes())
                .map(|n| r_t * (1.0 + wobble * (*k as f64 * param(n)[dom.dim() - 1]).cos()))
                .collect();
            return GeodesicState::from_normal_velocity(op, cfg.rhs, f, &v);
        }
        MomentumPreset::FromFile { path } => read_scalar_csv(path)?,
    };
    GeodesicState::new(op, cfg.rhs, f, b)
}

fn max_relative_drift(diag: &[Diagnostics], value: impl Fn(&Diagnostics) -> f64) -> f64 {
    let v0 = value(&diag[0]);
    diag.iter().map(|d| (value(d) - v0).abs() / v0.abs()).fold(0.0, f64::max)
}

/// Energy drift `max_t |E(t) − E(0)| / E(0)`.
pub fn energy_drift_check(diag: &[Diagnostics]) -> BoundReport {
    BoundReport::new("energy-drift", max_relative_drift(diag, |d| d.energy), DRIFT_LIMIT)
}

/// Largest `reparamMomNorm / ‖P f_t‖` over the run.
pub fn horizontality_check(diag: &[Diagnostics]) -> BoundReport {
    let worst = diag
        .iter()
        .map(|d| {
            if d.momenta.pf_norm > 0.0 {
                d.momenta.reparam_mom_norm / d.momenta.pf_norm
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max);
    BoundReport::new("horizontality", worst, HORIZONTALITY_LIMIT)
}

/// Linear and angular momentum drift relative to the initial field scales
/// `∫ |P f_t| vol` and `∫ |f| |P f_t| vol`.
pub fn momentum_drift_checks(state0: &GeodesicState<f64>, op: &crate::OperatorConfig, diag: &[Diagnostics]) -> Vec<BoundReport> {
    let pf = apply_p(op, &state0.geo, &state0.f_t);
    let (mut lin_scale, mut ang_scale) = (0.0, 0.0);
    for (k, p) in pf.values.iter().enumerate() {
        let w = state0.geo.mass[k];
        lin_scale += w * norm3(*p);
        ang_scale += w * norm3(*p) * norm3(state0.f.values()[k]);
    }
    let d0 = &diag[0];
    let mut lin = 0.0f64;
    let mut ang = 0.0f64;
    for d in diag {
        let dl: Vec<f64> = (0..3).map(|c| d.momenta.lin_mom[c] - d0.momenta.lin_mom[c]).collect();
        lin = lin.max(dot3([dl[0], dl[1], dl[2]], [dl[0], dl[1], dl[2]]).sqrt());
        let da: f64 = d.momenta.ang_mom.iter().zip(&d0.momenta.ang_mom).map(|(a, b)| (a - b).powi(2)).sum();
        ang = ang.max(da.sqrt());
    }
    vec![
        BoundReport::new("linear-momentum-drift", lin / lin_scale, DRIFT_LIMIT),
        BoundReport::new("angular-momentum-drift", ang / ang_scale, DRIFT_LIMIT),
    ]
}

/// Radius comparison of a circle geodesic with the ODE oracle.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CircleComparison {
    /// `(t, mean radius, ODE radius, max radial deviation / mean radius)`.
    pub rows: Vec<(f64, f64, f64, f64)>,
    pub ode: Vec<crate::oracles::SphereSample>,
    pub max_radius_error: f64,
    pub max_roundness: f64,
}

/// Compares circle frames against the ODE with initial `(r0, r_t)`.
pub fn circle_vs_ode(
    traj: &Trajectory<f64>,
    center: [f64; 2],
    r0: f64,
    r_t: f64,
    op: &crate::OperatorConfig,
) -> Result<CircleComparison> {
    let t_end = traj.frames.last().map(|f| f.t).unwrap_or(0.0);
    let s0 = SphereState { r: r0, r_t, n: 2, a: op.a, p: op.p };
    let ode = sphere_ode_solve(&s0, 1e-4, t_end)?;
    let mut rows = Vec::new();
    let (mut err, mut round) = (0.0f64, 0.0f64);
    for fr in &traj.frames {
        let rs: Vec<f64> = fr
            .f
            .values()
            .iter()
            .map(|p| ((p[0] - center[0]).powi(2) + (p[1] - center[1]).powi(2)).sqrt())
            .collect();
        let mean = rs.iter().sum::<f64>() / rs.len() as f64;
        let dev = rs.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean;
        let r_ode = radius_at(&ode, fr.t);
        err = err.max((mean - r_ode).abs() / r_ode);
        round = round.max(dev);
        rows.push((fr.t, mean, r_ode, dev));
    }
    Ok(CircleComparison {
        rows,
        ode,
        max_radius_error: err,
        max_roundness: round,
    })
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Manifest<'a> {
    name: Option<&'a str>,
    version: &'static str,
    config: &'a RunConfig,
    status: RunStatus,
    abort: Option<String>,
    accepted: usize,
    rejected: usize,
    wall_seconds: f64,
    frames: Vec<String>,
    checks: &'a [BoundReport],
}

fn create_dir(path: &Path) -> Result<()> {
    std::fs::create_dir_all(path).map_err(|e| ShapeError::Io(format!("{}: {e}", path.display())))
}

/// Integrates the configured geodesic and writes frames, diagnostics,
/// check reports and a manifest into the output directory.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    let clock = Instant::now();
    cfg.validate()?;
    let state0 = initial_state(cfg)?;
    let traj = integrate(&cfg.operator, cfg.rhs, state0.clone(), &cfg.time)?;

    let out = &cfg.output.dir;
    let frame_dir = out.join("frames");
    create_dir(&frame_dir)?;
    let ext = match cfg.frame_format() {
        FrameFormat::Csv => "csv",
        _ => "obj",
    };
    let mut frame_paths = Vec::new();
    for (k, fr) in traj.frames.iter().enumerate() {
        let path = frame_dir.join(format!("{k:04}.{ext}"));
        match ext {
            "csv" => frames::write_csv(&path, &fr.f)?,
            _ => frames::write_obj(&path, &fr.f, fr.t)?,
        }
        frame_paths.push(path);
    }
    let times: Vec<Vec<String>> = traj.frames.iter().enumerate().map(|(k, f)| vec![k.to_string(), fmt(f.t)]).collect();
    write_table(&frame_dir.join("times.csv"), &["frame".into(), "t".into()], &times)?;

    let header = Diagnostics::csv_header(cfg.ambient());
    let rows: Vec<Vec<String>> = traj
        .diagnostics
        .iter()
        .enumerate()
        .filter(|(k, _)| k % cfg.output.diagnostics_every == 0 || *k + 1 == traj.diagnostics.len())
        .map(|(_, d)| d.csv_row())
        .collect();
    write_table(&out.join("diagnostics.csv"), &header, &rows)?;

    let mut checks = Vec::new();
    let samples = samples_from(&traj.diagnostics);
    for kind in &cfg.checks {
        match kind {
            CheckKind::AreaSwept => checks.push(area_swept_bound_check(&samples)),
            CheckKind::SqrtVolLipschitz => {
                checks.push(sqrt_vol_lipschitz_check(&samples, cfg.domain.kind.dim(), cfg.operator.a, cfg.operator.p))
            }
            CheckKind::EnergyDrift => checks.push(energy_drift_check(&traj.diagnostics)),
            CheckKind::MomentumDrift => checks.extend(momentum_drift_checks(&state0, &cfg.operator, &traj.diagnostics)),
            CheckKind::Horizontality => checks.push(horizontality_check(&traj.diagnostics)),
            CheckKind::CircleVsOde => {
                let (ImmersionPreset::Circle { r, center }, MomentumPreset::Radial { r_t, .. }) = (&cfg.immersion, &cfg.momentum)
                else {
                    unreachable!("validated config");
                };
                let cmp = circle_vs_ode(&traj, *center, *r, *r_t, &cfg.operator)?;
                let rows: Vec<Vec<String>> = cmp
                    .rows
                    .iter()
                    .map(|&(t, r, ro, dev)| vec![fmt(t), fmt(r), fmt(ro), fmt((r - ro) / ro), fmt(dev)])
                    .collect();
                let head = ["t", "rPde", "rOde", "relError", "roundness"].map(String::from);
                write_table(&out.join("circle_vs_ode.csv"), &head, &rows)?;
                let ode_rows: Vec<Vec<String>> = cmp.ode.iter().map(|s| vec![fmt(s.t), fmt(s.r), fmt(s.r_t)]).collect();
                write_table(&out.join("ode.csv"), &["t", "r", "r_t"].map(String::from), &ode_rows)?;
                checks.push(BoundReport::new("circle-vs-ode", cmp.max_radius_error, CIRCLE_RADIUS_LIMIT));
                checks.push(BoundReport::new("circle-roundness", cmp.max_roundness, CIRCLE_ROUNDNESS_LIMIT));
            }
        }
    }
    let check_rows: Vec<Vec<String>> = checks
        .iter()
        .map(|c| vec![c.name.clone(), fmt(c.lhs), fmt(c.rhs), fmt(c.ratio), if c.pass { "PASS" } else { "FAIL" }.into()])
        .collect();
    write_table(&out.join("checks.csv"), &["check", "lhs", "rhs", "ratio", "result"].map(String::from), &check_rows)?;

    let status = if traj.abort.is_some() {
        RunStatus::Aborted
    } else if checks.iter().any(|c| !c.pass) {
        RunStatus::ChecksFailed
    } else {
        RunStatus::Completed
    };
    let wall_seconds = clock.elapsed().as_secs_f64();
    let manifest = Manifest {
        name: cfg.name.as_deref(),
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        status,
        abort: traj.abort.as_ref().map(|e| e.to_string()),
        accepted: traj.accepted,
        rejected: traj.rejected,
        wall_seconds,
        frames: frame_paths
            .iter()
            .map(|p| p.strip_prefix(out).unwrap_or(p).display().to_string())
            .collect(),
        checks: &checks,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| ShapeError::Io(e.to_string()))?;
    std::fs::write(out.join("manifest.json"), text).map_err(|e| ShapeError::Io(e.to_string()))?;

    Ok(RunOutcome {
        status,
        abort: traj.abort.clone(),
        checks,
        frames: frame_paths,
        trajectory: traj,
        wall_seconds,
    })
}
