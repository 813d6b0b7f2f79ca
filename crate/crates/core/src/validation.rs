//! Seeded self-checks of the discrete operators, the first-variation
//! formulas and the geodesic integrator at small resolutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::domain::{Domain, DomainKind};
use crate::error::{Result, ShapeError};
use crate::geodesic::{integrate, momentum_rhs_general, momentum_rhs_h1, step, GeodesicState, RhsForm, TimeConfig};
use crate::geometry::{build_geometry, jacobian, InducedGeometry};
use crate::immersion::{FieldAlongF, Immersion};
use crate::laplace::laplacian;
use crate::linalg::{dot3, mat_mul, sub3, Mat2};
use crate::oracles::{
    area_swept_bound_check, completeness_probe, samples_from, sphere_ode_solve, sqrt_vol_lipschitz_check, SphereState,
};
use crate::runner::{circle_vs_ode, horizontality_check, momentum_drift_checks};
use crate::sobolev::{
    adjoint_nabla_p_perp, apply_p, solve_p, split_horizontal_vertical, tangential_part, OperatorConfig,
};

pub const SUITES: [&str; 3] = ["operators", "variations", "geodesics"];

/// One checked property: `value <= tolerance` passes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub suite: String,
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(suite: &str, name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        CheckResult {
            suite: suite.into(),
            name: name.into(),
            value,
            tolerance,
            pass: value.is_finite() && value <= tolerance,
        }
    }

    /// `PASS suite/name value=… tol=…`.
    pub fn line(&self) -> String {
        format!(
            "{} {}/{} value={:.3e} tol={:.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.name,
            self.value,
            self.tolerance
        )
    }
}

/// Random smooth function: a few low Fourier modes (periodic axes) or sine
/// modes vanishing on the boundary (Dirichlet square).
#[derive(Clone, Debug)]
pub struct RandomModes {
    periodic: bool,
    modes: Vec<(f64, f64, f64, f64)>,
}

impl RandomModes {
    pub fn new(rng: &mut impl Rng, domain: &Domain, count: usize, amplitude: f64) -> Self {
        let periodic = domain.is_periodic();
        let scale: Vec<f64> = domain
            .extent()
            .iter()
            .map(|e| if periodic { std::f64::consts::TAU / e } else { std::f64::consts::PI / e })
            .collect();
        let second = if domain.dim() == 2 { scale[1] } else { 0.0 };
        let lo = if periodic { 0 } else { 1 };
        let modes = (0..count)
            .map(|_| {
                let ku = rng.gen_range(lo..=3) as f64 * scale[0];
                let kv = rng.gen_range(lo..=3) as f64 * second;
                (ku, kv, amplitude * rng.gen_range(-1.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU))
            })
            .collect();
        RandomModes { periodic, modes }
    }

    pub fn eval(&self, u: f64, v: f64) -> f64 {
        self.modes
            .iter()
            .map(|&(ku, kv, c, ph)| {
                if self.periodic {
                    c * (ku * u + kv * v + ph).cos()
                } else {
                    c * (ku * u).sin() * if kv > 0.0 { (kv * v).sin() } else { 1.0 }
                }
            })
            .sum()
    }

    pub fn sample(&self, domain: &Domain) -> Vec<f64> {
        (0..domain.nodes())
            .map(|k| {
                let [u, v] = domain.param(k);
                self.eval(u, v)
            })
            .collect()
    }
}

/// Random smooth vector field along the domain.
pub fn random_field(rng: &mut impl Rng, domain: &Domain, amplitude: f64) -> FieldAlongF<f64> {
    let comps: Vec<Vec<f64>> = (0..3).map(|_| RandomModes::new(rng, domain, 4, amplitude).sample(domain)).collect();
    FieldAlongF::from_values((0..domain.nodes()).map(|k| [comps[0][k], comps[1][k], comps[2][k]]).collect())
}

/// A torus of revolution or a graph over the square, bent along its normal
/// by a random smooth function of the given amplitude.
pub fn random_surface(rng: &mut impl Rng, domain: &Domain, amplitude: f64) -> Result<Immersion<f64>> {
    let base = match domain.kind() {
        DomainKind::Torus => Immersion::torus(domain.clone(), 2.0, 0.8)?,
        DomainKind::DirichletSquare => Immersion::flat_sheet(domain.clone())?,
        DomainKind::Circle => Immersion::circle(domain.clone(), 1.0, [0.0, 0.0])?,
    };
    let geo = build_geometry(&base)?;
    let phi = RandomModes::new(rng, domain, 4, amplitude).sample(domain);
    base.displaced(1.0, &FieldAlongF::scaled_vectors(&phi, geo.normal()?))
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        a.abs() / b.abs()
    }
}

fn field_diff_norm(geo: &InducedGeometry<f64>, a: &FieldAlongF<f64>, b: &FieldAlongF<f64>) -> f64 {
    geo.norm(&a.axpy(-1.0, b))
}

/// Grid shift by `(s0, s1)` nodes on a periodic domain.
pub fn shift<const D: usize>(domain: &Domain, data: &[[f64; D]], s0: usize, s1: usize) -> Vec<[f64; D]> {
    (0..domain.nodes())
        .map(|k| {
            let (i, j) = domain.coords(k);
            let n1 = if domain.dim() == 2 { domain.count(1) } else { 1 };
            data[domain.index((i + s0) % domain.count(0), (j + s1) % n1)]
        })
        .collect()
}

/// Adjoint identity data on a torus of `n × 3n/4` nodes: the finite-difference
/// quotients for each `ε` and the adjoint pairing.
pub fn adjoint_fd_quotients(n: usize, cfg: &OperatorConfig, eps: &[f64], seed: u64) -> Result<(Vec<f64>, f64)> {
    let dom = Domain::torus(n, 3 * n / 4)?;
    let f = Immersion::torus(dom.clone(), 2.0, 0.8)?;
    let geo = build_geometry(&f)?;
    // the modes depend on the seed only, so every resolution sees the same fields
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_field(&mut rng, &dom, 1.0);
    let k = random_field(&mut rng, &dom, 1.0);
    let phi = RandomModes::new(&mut rng, &dom, 3, 1.0).sample(&dom);
    let m = FieldAlongF::scaled_vectors(&phi, geo.normal()?);
    let adj = geo.inner(&m, &adjoint_nabla_p_perp(cfg, &geo, &h, &k)?);
    let ph = apply_p(cfg, &geo, &h);
    let quotients = eps
        .iter()
        .map(|&e| {
            let g2 = build_geometry(&f.displaced(e, &m)?)?;
            let d = apply_p(cfg, &g2, &h).axpy(-1.0, &ph).scale(1.0 / e);
            Ok(geo.inner(&d, &k))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((quotients, adj))
}

fn operators(seed: u64) -> Result<Vec<CheckResult>> {
    const S: &str = "operators";
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let domains = [Domain::torus(16, 12)?, Domain::dirichlet_square(14, 14)?];
    for dom in &domains {
        let tag = format!("{:?}", dom.kind()).to_lowercase();
        let f = random_surface(&mut rng, dom, 0.15)?;
        let geo = build_geometry(&f)?;
        let mut h = random_field(&mut rng, dom, 1.0);
        let mut k = random_field(&mut rng, dom, 1.0);
        h.zero_boundary(dom);
        k.zero_boundary(dom);
        let scale = geo.norm(&h) * geo.norm(&k);
        let sym = geo.inner(&laplacian(&geo, &h), &k) - geo.inner(&h, &laplacian(&geo, &k));
        out.push(CheckResult::new(S, format!("laplacian-symmetry-{tag}"), sym.abs() / scale, 1e-10));
        let pos = geo.inner(&laplacian(&geo, &h), &h);
        out.push(CheckResult::new(S, format!("laplacian-positivity-{tag}"), (-pos).max(0.0), 0.0));
        for p in [1, 2] {
            let cfg = OperatorConfig::new(0.5, p);
            let sym = geo.inner(&apply_p(&cfg, &geo, &h), &k) - geo.inner(&h, &apply_p(&cfg, &geo, &k));
            out.push(CheckResult::new(S, format!("p{p}-symmetry-{tag}"), sym.abs() / scale, 1e-10));
            let excess = geo.inner(&apply_p(&cfg, &geo, &h), &h) - geo.inner(&h, &h);
            out.push(CheckResult::new(S, format!("p{p}-positivity-{tag}"), (-excess).max(0.0), 0.0));
            let (x, _) = solve_p(&cfg, &geo, &apply_p(&cfg, &geo, &h), None)?;
            out.push(CheckResult::new(
                S,
                format!("p{p}-solve-roundtrip-{tag}"),
                field_diff_norm(&geo, &x, &h) / geo.norm(&h),
                1e-8,
            ));
        }
        let cfg = OperatorConfig::new(0.5, 1);
        let (ver, hor) = split_horizontal_vertical(&cfg, &geo, &h)?;
        let recon = FieldAlongF::from_values(
            (0..dom.nodes())
                .map(|n| {
                    let t = geo.push_forward(n, ver.values[n]);
                    [t[0] + hor.values[n][0], t[1] + hor.values[n][1], t[2] + hor.values[n][2]]
                })
                .collect(),
        );
        out.push(CheckResult::new(
            S,
            format!("split-reconstruction-{tag}"),
            field_diff_norm(&geo, &recon, &h) / geo.norm(&h),
            1e-14,
        ));
        let tnorm = |t: &crate::immersion::TangentField<f64>| {
            (0..dom.nodes())
                .map(|n| {
                    let v = geo.push_forward(n, t.values[n]);
                    geo.mass[n] * dot3(v, v)
                })
                .sum::<f64>()
                .sqrt()
        };
        let ref_norm = tnorm(&tangential_part(&geo, &apply_p(&cfg, &geo, &h)));
        let resid = tnorm(&tangential_part(&geo, &apply_p(&cfg, &geo, &hor)));
        out.push(CheckResult::new(S, format!("split-horizontal-{tag}"), resid / ref_norm, 1e-8));
        let (ver2, _) = split_horizontal_vertical(&cfg, &geo, &hor)?;
        out.push(CheckResult::new(S, format!("split-idempotent-{tag}"), tnorm(&ver2) / geo.norm(&h), 1e-8));
    }

    // reparametrization equivariance under a grid shift
    let dom = &domains[0];
    let f = random_surface(&mut rng, dom, 0.15)?;
    let h = random_field(&mut rng, dom, 1.0);
    let cfg = OperatorConfig::new(0.5, 2);
    let fs = Immersion::new(dom.clone(), 3, shift(dom, f.values(), 3, 5))?;
    let hs = FieldAlongF::from_values(shift(dom, &h.values, 3, 5));
    let lhs = apply_p(&cfg, &build_geometry(&fs)?, &hs);
    let rhs = shift(dom, &apply_p(&cfg, &build_geometry(&f)?, &h).values, 3, 5);
    let err = lhs.values.iter().zip(&rhs).map(|(a, b)| crate::linalg::norm3(sub3(*a, *b))).fold(0.0, f64::max);
    out.push(CheckResult::new(S, "reparametrization-equivariance", err / lhs.max_abs(), 1e-12));

    // p = 1: specialized and general momentum right-hand sides
    for dom in &domains {
        let tag = format!("{:?}", dom.kind()).to_lowercase();
        let f = random_surface(&mut rng, dom, 0.15)?;
        let geo = build_geometry(&f)?;
        let mut ft = random_field(&mut rng, dom, 1.0);
        ft.zero_boundary(dom);
        let cfg = OperatorConfig::new(0.7, 1);
        let a = momentum_rhs_h1(&cfg, &geo, &ft)?;
        let b = momentum_rhs_general(&cfg, &geo, &ft, None)?;
        let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        out.push(CheckResult::new(S, format!("rhs-h1-vs-general-{tag}"), err / scale, 1e-12));
    }

    // adjoint identity: first order in ε, discretization error O(Δ²)
    let eps = [1e-2, 1e-3, 1e-4];
    let mut limits = Vec::new();
    for n in [32, 64] {
        let cfg = OperatorConfig::new(0.7, 2);
        let (q, adj) = adjoint_fd_quotients(n, &cfg, &eps, seed)?;
        let d1 = (q[0] - q[1]).abs();
        let d2 = (q[1] - q[2]).abs();
        out.push(CheckResult::new(S, format!("adjoint-fd-first-order-n{n}"), (d1 / d2 / 10.0).ln().abs(), 0.25));
        // Richardson limit ε → 0 of a first-order quotient
        let limit = q[2] + (q[2] - q[1]) / 9.0;
        limits.push(rel(limit - adj, adj));
    }
    out.push(CheckResult::new(S, "adjoint-fd-identity-n64", limits[1], 5e-2));
    out.push(CheckResult::new(S, "adjoint-fd-grid-convergence", limits[1] / limits[0], 0.5));
    Ok(out)
}

/// First-variation errors for `g`, `g⁻¹` and `vol` at each `ε`.
pub fn variation_errors(f: &Immersion<f64>, h: &FieldAlongF<f64>, eps: &[f64]) -> Result<[Vec<f64>; 3]> {
    let dom = f.domain();
    let m = dom.dim();
    let geo = build_geometry(f)?;
    let dh = jacobian(dom, &h.values);
    let free: Vec<usize> = dom.free_nodes().collect();
    let dg: Vec<Mat2<f64>> = (0..dom.nodes())
        .map(|n| {
            let mut a = [[0.0; 2]; 2];
            for i in 0..m {
                for j in 0..m {
                    a[i][j] = dot3(dh[n][i], geo.tf[n][j]) + dot3(dh[n][j], geo.tf[n][i]);
                }
            }
            a
        })
        .collect();
    let dginv: Vec<Mat2<f64>> = (0..dom.nodes())
        .map(|n| {
            let x = mat_mul(&mat_mul(&geo.g_inv[n], &dg[n], m), &geo.g_inv[n], m);
            x.map(|r| r.map(|v| -v))
        })
        .collect();
    let dvol: Vec<f64> = (0..dom.nodes())
        .map(|n| {
            let mut tr = 0.0;
            for i in 0..m {
                for j in 0..m {
                    tr += geo.g_inv[n][i][j] * dot3(dh[n][i], geo.tf[n][j]);
                }
            }
            tr * geo.vol_density[n]
        })
        .collect();
    let mat_err = |a: &Mat2<f64>, b: &Mat2<f64>, c: &Mat2<f64>, e: f64| {
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                worst = worst.max(((a[i][j] - b[i][j]) / e - c[i][j]).abs());
            }
        }
        worst
    };
    let mut errs: [Vec<f64>; 3] = Default::default();
    for &e in eps {
        let g2 = build_geometry(&f.displaced(e, h)?)?;
        let (mut eg, mut ei, mut ev) = (0.0f64, 0.0f64, 0.0f64);
        for &n in &free {
            eg = eg.max(mat_err(&g2.g[n], &geo.g[n], &dg[n], e));
            ei = ei.max(mat_err(&g2.g_inv[n], &geo.g_inv[n], &dginv[n], e));
            ev = ev.max(((g2.vol_density[n] - geo.vol_density[n]) / e - dvol[n]).abs());
        }
        errs[0].push(eg);
        errs[1].push(ei);
        errs[2].push(ev);
    }
    Ok(errs)
}

fn variations(seed: u64) -> Result<Vec<CheckResult>> {
    const S: &str = "variations";
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let eps = [1e-2, 1e-3, 1e-4];
    let mut out = Vec::new();
    for dom in [Domain::torus(16, 16)?, Domain::dirichlet_square(16, 16)?] {
        let tag = format!("{:?}", dom.kind()).to_lowercase();
        let f = random_surface(&mut rng, &dom, 0.2)?;
        let mut h = random_field(&mut rng, &dom, 1.0);
        h.zero_boundary(&dom);
        let errs = variation_errors(&f, &h, &eps)?;
        for (name, e) in ["metric", "inverse-metric", "volume"].iter().zip(&errs) {
            // slope of log error against log ε; first order means slope 1
            let slopes: Vec<f64> = e.windows(2).map(|w| (w[0] / w[1]).log10()).collect();
            let worst = slopes.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
            out.push(CheckResult::new(S, format!("{name}-first-order-{tag}"), worst, 0.1));
        }
    }
    Ok(out)
}

fn geodesics(seed: u64) -> Result<Vec<CheckResult>> {
    const S: &str = "geodesics";
    let mut out = Vec::new();
    let cfg = OperatorConfig::new(1.0, 1);

    // bump initial data on a coarse square
    let dom = Domain::dirichlet_square(40, 40)?;
    let f = Immersion::flat_sheet(dom.clone())?;
    let b: Vec<f64> = (0..dom.nodes())
        .map(|k| {
            let [u, v] = dom.param(k);
            u.sin() * v.sin()
        })
        .collect();
    let s0 = GeodesicState::new(&cfg, RhsForm::Auto, f.clone(), b)?;
    let exact = std::f64::consts::PI.powi(2) / 12.0;
    out.push(CheckResult::new(S, "bump-energy-coarse", rel(s0.energy() - exact, exact), 1e-2));
    let (s1, _) = step(&cfg, RhsForm::Auto, &s0, 0.01, None)?;
    out.push(CheckResult::new(S, "bump-step-energy", rel(s1.energy() - s0.energy(), s0.energy()), 1e-6));
    let traj = integrate(&cfg, RhsForm::Auto, s0, &TimeConfig::new(1.0, 0.1))?;
    let samples = samples_from(&traj.diagnostics);
    let area = area_swept_bound_check(&samples);
    out.push(CheckResult::new(S, "bump-area-swept-bound", area.ratio, 1.0 + crate::oracles::bounds::BOUND_SLACK));
    let lip = sqrt_vol_lipschitz_check(&samples, 2, cfg.a, cfg.p);
    out.push(CheckResult::new(S, "bump-sqrt-vol-bound", lip.ratio, 1.0 + crate::oracles::bounds::BOUND_SLACK));

    // zero momentum
    let z = GeodesicState::new(&cfg, RhsForm::Auto, f.clone(), vec![0.0; dom.nodes()])?;
    let traj = integrate(&cfg, RhsForm::Auto, z, &TimeConfig::new(0.5, 0.1))?;
    let moved = traj
        .final_state
        .f
        .values()
        .iter()
        .zip(f.values())
        .map(|(a, b)| crate::linalg::norm3(sub3(*a, *b)))
        .fold(0.0, f64::max);
    out.push(CheckResult::new(S, "zero-momentum-static", moved, 0.0));

    // circle against the radial ODE
    for p in [1, 2] {
        let cfg = OperatorConfig::new(1.0, p);
        let dom = Domain::circle(128)?;
        let f = Immersion::circle(dom.clone(), 1.0, [0.0, 0.0])?;
        let s0 = GeodesicState::from_normal_velocity(&cfg, RhsForm::Auto, f, &vec![1.0; dom.nodes()])?;
        let traj = integrate(&cfg, RhsForm::Auto, s0, &TimeConfig::new(0.5, 0.01).with_output_every(0.1))?;
        let cmp = circle_vs_ode(&traj, [0.0, 0.0], 1.0, 1.0, &cfg)?;
        out.push(CheckResult::new(S, format!("circle-vs-ode-p{p}"), cmp.max_radius_error, 1e-3));
        out.push(CheckResult::new(S, format!("circle-roundness-p{p}"), cmp.max_roundness, 1e-6));
    }

    // momentum conservation and horizontality on a bent torus
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let dom = Domain::torus(48, 36)?;
    let f = random_surface(&mut rng, &dom, 0.1)?;
    let geo = build_geometry(&f)?;
    let a = RandomModes::new(&mut rng, &dom, 3, 0.3).sample(&dom);
    let b: Vec<f64> = a.iter().zip(&geo.vol_density).map(|(a, s)| a * s).collect();
    let s0 = GeodesicState::new(&cfg, RhsForm::Auto, f, b)?;
    let traj = integrate(&cfg, RhsForm::Auto, s0.clone(), &TimeConfig::new(0.5, 0.05))?;
    for c in momentum_drift_checks(&s0, &cfg, &traj.diagnostics) {
        out.push(CheckResult::new(S, format!("torus-{}", c.name), c.lhs, c.rhs));
    }
    let hz = horizontality_check(&traj.diagnostics);
    out.push(CheckResult::new(S, "torus-horizontality", hz.lhs, hz.rhs));

    // sphere oracle: conserved invariant and completeness surrogate
    let s = SphereState { r: 1.0, r_t: 0.8, n: 3, a: 0.5, p: 2 };
    let tr = sphere_ode_solve(&s, 1e-3, 2.0)?;
    let i0 = s.invariant();
    let worst = tr
        .iter()
        .map(|x| rel(SphereState { r: x.r, r_t: x.r_t, ..s }.invariant() - i0, i0))
        .fold(0.0, f64::max);
    out.push(CheckResult::new(S, "sphere-ode-invariant", worst, 1e-8));
    for (n, p) in [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)] {
        let probe = completeness_probe(n, 1.0, p);
        out.push(CheckResult::new(
            S,
            format!("completeness-n{n}-p{p}"),
            if probe.consistent() { 0.0 } else { 1.0 },
            0.0,
        ));
    }
    Ok(out)
}

/// Runs the named suites in order. An empty selection is a configuration
/// error.
pub fn run_suites(suites: &[String], seed: u64) -> Result<Vec<CheckResult>> {
    if suites.is_empty() {
        return Err(ShapeError::Config("no validation suite selected".into()));
    }
    let mut out = Vec::new();
    for s in suites {
        let part = match s.as_str() {
            "operators" => operators(seed)?,
            "variations" => variations(seed)?,
            "geodesics" => geodesics(seed)?,
            other => {
                return Err(ShapeError::Config(format!(
                    "unknown suite {other:?} (expected one of {})",
                    SUITES.join(", ")
                )))
            }
        };
        out.extend(part);
    }
    Ok(out)
}
