//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{Domain, DomainKind};
use crate::error::{Result, ShapeError};
use crate::geodesic::{RhsForm, TimeConfig};
use crate::sobolev::OperatorConfig;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub resolution: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<Vec<f64>>,
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        Domain::new(self.kind, &self.resolution, self.extent.as_deref())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ImmersionPreset {
    FlatSheet,
    Circle {
        r: f64,
        #[serde(default)]
        center: [f64; 2],
    },
    Torus {
        #[serde(rename = "R")]
        big_r: f64,
        rho: f64,
    },
    /// OBJ or CSV frame written by the runner.
    FromFile { path: PathBuf },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MomentumPreset {
    /// `a = amplitude · sin(k u) sin(k v)` on the square, `amplitude · cos(k θ)` on curves.
    ProductSine {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_u32")]
        k: u32,
    },
    /// `a = amplitude · exp(−|x − center|² / (2 width²))` in parameter coordinates.
    GaussianBump {
        amplitude: f64,
        center: [f64; 2],
        width: f64,
    },
    /// Grayscale image, dark pixels positive.
    Bitmap {
        path: PathBuf,
        #[serde(default = "one")]
        sigma: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// Normal velocity `f_t = r_t ν`, optionally modulated by
    /// `1 + wobble · cos(k s)` with `s` the last parameter coordinate.
    Radial {
        #[serde(rename = "rT")]
        r_t: f64,
        #[serde(default)]
        wobble: f64,
        #[serde(default = "one_u32")]
        k: u32,
    },
    /// One momentum-density value per node, one per line (header `b`).
    FromFile { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

fn one_u32() -> u32 {
    1
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrameFormat {
    /// OBJ for surfaces, CSV for curves.
    #[default]
    Auto,
    Obj,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct OutputSpec {
    pub dir: PathBuf,
    #[serde(default)]
    pub format: FrameFormat,
    /// Write every n-th diagnostics row.
    #[serde(default = "one_usize")]
    pub diagnostics_every: usize,
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    AreaSwept,
    SqrtVolLipschitz,
    EnergyDrift,
    MomentumDrift,
    Horizontality,
    CircleVsOde,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
pub struct RunConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub domain: DomainSpec,
    /// Defaults to 2 for curves and 3 for surfaces.
    #[serde(default)]
    pub ambient_dim: Option<usize>,
    pub operator: OperatorConfig,
    #[serde(default)]
    pub rhs: RhsForm,
    pub immersion: ImmersionPreset,
    pub momentum: MomentumPreset,
    pub time: TimeConfig,
    pub output: OutputSpec,
    #[serde(default)]
    pub checks: Vec<CheckKind>,
}

impl RunConfig {
    /// Parses JSON. Relative input paths resolve against `base`; the output
    /// directory stays relative to the working directory.
    pub fn from_json(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| ShapeError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
        if let Some(base) = base {
            cfg.resolve_paths(base);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ShapeError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent())
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let ImmersionPreset::FromFile { path } = &mut self.immersion {
            fix(path);
        }
        match &mut self.momentum {
            MomentumPreset::Bitmap { path, .. } | MomentumPreset::FromFile { path } => fix(path),
            _ => {}
        }
    }

    pub fn ambient(&self) -> usize {
        self.ambient_dim
            .unwrap_or(if self.domain.kind == DomainKind::Circle { 2 } else { 3 })
    }

    /// Checks preset/domain compatibility and numeric ranges.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(ShapeError::Config(m));
        self.domain.build().map_err(|e| ShapeError::Config(e.to_string()))?;
        self.operator.validate().map_err(|e| ShapeError::Config(e.to_string()))?;
        self.time.validate().map_err(|e| ShapeError::Config(e.to_string()))?;
        let kind = self.domain.kind;
        if self.ambient() != kind.dim() + 1 {
            return bad(format!(
                "ambientDim {} must be dim M + 1 = {} for geodesic runs",
                self.ambient(),
                kind.dim() + 1
            ));
        }
        let imm_ok = match &self.immersion {
            ImmersionPreset::FlatSheet => kind == DomainKind::DirichletSquare,
            ImmersionPreset::Circle { r, .. } => {
                if !(*r > 0.0) {
                    return bad(format!("circle radius {r} must be positive"));
                }
                kind == DomainKind::Circle
            }
            ImmersionPreset::Torus { .. } => kind == DomainKind::Torus,
            ImmersionPreset::FromFile { .. } => true,
        };
        if !imm_ok {
            return bad(format!("immersion preset {:?} does not fit domain kind {kind:?}", self.immersion));
        }
        match &self.momentum {
            MomentumPreset::Bitmap { sigma, .. } => {
                if kind != DomainKind::DirichletSquare {
                    return bad("bitmap momentum needs the dirichlet-square domain".into());
                }
                if !(*sigma >= 0.0) {
                    return bad(format!("blur sigma {sigma} must be nonnegative"));
                }
            }
            MomentumPreset::GaussianBump { width, .. } if !(*width > 0.0) => {
                return bad(format!("bump width {width} must be positive"));
            }
            _ => {}
        }
        if self.output.diagnostics_every == 0 {
            return bad("diagnosticsEvery must be at least 1".into());
        }
        if self.checks.contains(&CheckKind::CircleVsOde)
            && !(matches!(self.immersion, ImmersionPreset::Circle { .. })
                && matches!(self.momentum, MomentumPreset::Radial { wobble, .. } if wobble == 0.0))
        {
            return bad("circle-vs-ode needs a circle immersion with unmodulated radial momentum".into());
        }
        if self.checks.contains(&CheckKind::MomentumDrift) && !kind.is_periodic() {
            return bad("momentum-drift is only meaningful on periodic domains".into());
        }
        Ok(())
    }

    /// Frame format with `auto` resolved.
    pub fn frame_format(&self) -> FrameFormat {
        match (self.output.format, self.domain.kind) {
            (FrameFormat::Auto, DomainKind::Circle) => FrameFormat::Csv,
            (FrameFormat::Auto, _) => FrameFormat::Obj,
            (f, _) => f,
        }
    }
}
