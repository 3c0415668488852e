//! Run configuration (JSON) and its translation into domain, mesh and data.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Deserialize;
use slipflow::analysis::AuditOptions;
use slipflow::assembly::{BodyForce, BoundaryField, BoundaryValue, ProblemData};
use slipflow::linear::{KornOptions, SobolevOptions};
use slipflow::mesh::{import_mesh, mesh_annulus_at, mesh_disk_with_holes, mesh_mirror_symmetric};
use slipflow::navier_stokes::SolverConfig;
use slipflow::{Curve, DomainSpec, Error, Mesh, Result};

use crate::expr::{Field, Scalar};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: DomainConfig,
    #[serde(default)]
    pub mesh: Option<MeshConfig>,
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub audit: AuditConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Seed of the randomized oracle sampling in `validate`.
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    Annulus {
        #[serde(default)]
        center: [f64; 2],
        r_in: f64,
        r_out: f64,
    },
    Curves {
        outer: CurveConfig,
        #[serde(default)]
        holes: Vec<CurveConfig>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Circle { center: [f64; 2], radius: f64 },
    /// Sampled ellipse with axes along x1 and x2, interpolated by a periodic spline.
    Ellipse {
        center: [f64; 2],
        a: f64,
        b: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Closed periodic spline through the given points.
    Spline { points: Vec<[f64; 2]> },
}

fn default_samples() -> usize {
    96
}

impl CurveConfig {
    fn build(&self) -> Result<Curve> {
        match self {
            CurveConfig::Circle { center, radius } => Curve::circle(*center, *radius),
            CurveConfig::Ellipse { center, a, b, samples } => {
                let n = (*samples).max(8);
                let pts = (0..n)
                    .map(|k| {
                        let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                        [center[0] + a * th.cos(), center[1] + b * th.sin()]
                    })
                    .collect();
                Curve::spline(pts)
            }
            CurveConfig::Spline { points } => Curve::spline(points.clone()),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeshConfig {
    /// Structured annulus mesh (annulus domains only).
    Structured { n_radial: usize, n_angular: usize },
    /// Constrained Delaunay mesh with target edge length `h` (circles only).
    /// `mirror` reflects a half mesh so it is exactly symmetric about x1.
    Delaunay {
        h: f64,
        #[serde(default)]
        mirror: bool,
    },
    /// Triangle-style `.node` / `.ele` files (paths relative to the config).
    Import { node: PathBuf, ele: PathBuf },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub nu: f64,
    /// Friction coefficient per boundary component.
    #[serde(default)]
    pub beta: Vec<Scalar>,
    /// Body force `[f1, f2]`.
    #[serde(default)]
    pub force: Option<[Scalar; 2]>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// Normal velocity `a` per component.
    #[serde(default)]
    pub normal: Vec<Scalar>,
    /// Tangential traction density `b_tau` per component.
    #[serde(default)]
    pub traction: Vec<Scalar>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AuditConfig {
    /// Evaluate the small-flux constants (needs a mesh).
    pub constants: bool,
    pub q: f64,
    pub korn: KornOptions,
    pub sobolev: SobolevOptions,
}

impl Default for AuditConfig {
    fn default() -> Self {
        let d = AuditOptions::default();
        Self { constants: true, q: d.q, korn: d.korn, sobolev: d.sobolev }
    }
}

impl AuditConfig {
    pub fn options(&self) -> AuditOptions {
        AuditOptions { q: self.q, korn: self.korn.clone(), sobolev: self.sobolev.clone() }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Output directory when `--out` is not given.
    pub dir: Option<PathBuf>,
    pub vtk: bool,
    pub boundary_csv: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: None, vtk: true, boundary_csv: true }
    }
}

/// Parsed configuration with its raw bytes and location.
pub struct Loaded {
    pub config: RunConfig,
    pub raw: Vec<u8>,
    pub base: PathBuf,
}

pub fn load(path: &Path) -> Result<Loaded> {
    let raw = std::fs::read(path)?;
    let config: RunConfig =
        serde_json::from_slice(&raw).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { config, raw, base })
}

impl RunConfig {
    pub fn domain(&self) -> Result<DomainSpec> {
        match &self.domain {
            DomainConfig::Annulus { center, r_in, r_out } => DomainSpec::annulus_at(*center, *r_in, *r_out),
            DomainConfig::Curves { outer, holes } => {
                let mut curves = vec![outer.build()?];
                for h in holes {
                    curves.push(h.build()?);
                }
                DomainSpec::from_curves(curves)
            }
        }
    }

    pub fn mesh(&self, domain: &DomainSpec, base: &Path) -> Result<Arc<Mesh>> {
        let mesh = match (&self.mesh, &self.domain) {
            (Some(MeshConfig::Structured { n_radial, n_angular }), DomainConfig::Annulus { center, r_in, r_out }) => {
                mesh_annulus_at(*center, *r_in, *r_out, *n_radial, *n_angular)?
            }
            (Some(MeshConfig::Structured { .. }), _) => {
                return Err(Error::Config("structured meshes need an annulus domain".into()));
            }
            (Some(MeshConfig::Delaunay { h, mirror: false }), _) => mesh_disk_with_holes(domain, *h)?,
            (Some(MeshConfig::Delaunay { h, mirror: true }), _) => mesh_mirror_symmetric(domain, *h)?,
            (Some(MeshConfig::Import { node, ele }), _) => import_mesh(&base.join(node), &base.join(ele), domain.clone())?,
            (None, DomainConfig::Annulus { center, r_in, r_out }) => mesh_annulus_at(*center, *r_in, *r_out, 8, 32)?,
            (None, _) => mesh_disk_with_holes(domain, domain.diameter() / 24.0)?,
        };
        Ok(Arc::new(mesh))
    }

    pub fn data(&self, domain: &DomainSpec) -> Result<ProblemData> {
        let n = domain.components();
        let field = |vals: &[Scalar], name: &str| -> Result<BoundaryField> {
            if vals.is_empty() {
                return Ok(BoundaryField::zero(n));
            }
            if vals.len() != n {
                return Err(Error::Config(format!("{name} has {} entries, the domain has {n} boundary components", vals.len())));
            }
            let values = vals
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    Ok(match Field::from_scalar(s, &format!("{name}[{j}]"))? {
                        Field::Constant(c) => BoundaryValue::Constant(c),
                        f => BoundaryValue::Function(Arc::new(move |b: &slipflow::BoundarySample| f.eval(b.point(), b.t))),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(BoundaryField::from_values(values))
        };
        let mut data = ProblemData::new(self.physics.nu, n)
            .with_beta(field(&self.physics.beta, "physics.beta")?)
            .with_normal(field(&self.boundary.normal, "boundary.normal")?)
            .with_traction(field(&self.boundary.traction, "boundary.traction")?);
        if let Some([f1, f2]) = &self.physics.force {
            let f1 = Field::from_scalar(f1, "physics.force[0]")?;
            let f2 = Field::from_scalar(f2, "physics.force[1]")?;
            if !matches!((&f1, &f2), (Field::Constant(a), Field::Constant(b)) if *a == 0.0 && *b == 0.0) {
                data = data.with_force(BodyForce::field(move |x| [f1.eval(x, 0.0), f2.eval(x, 0.0)]));
            }
        }
        data.validate(domain)?;
        Ok(data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_rejected() {
        let bad = r#"{"domain": {"kind": "annulus", "r_in": 1, "r_out": 2, "extra": 1}, "physics": {"nu": 1}}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
        let bad = r#"{"domain": {"kind": "annulus", "r_in": 1, "r_out": 2}, "physics": {"nu": 1}, "typo": 0}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
        let ok = r#"{"domain": {"kind": "annulus", "r_in": 1, "r_out": 2}, "physics": {"nu": 1, "beta": [0.75, "0"]}}"#;
        let c: RunConfig = serde_json::from_str(ok).unwrap();
        let d = c.domain().unwrap();
        assert!(c.data(&d).is_ok());
    }

    #[test]
    fn component_count_checked() {
        let c: RunConfig = serde_json::from_str(
            r#"{"domain": {"kind": "annulus", "r_in": 1, "r_out": 2}, "physics": {"nu": 1, "beta": [1, 1, 1]}}"#,
        )
        .unwrap();
        assert!(matches!(c.data(&c.domain().unwrap()), Err(Error::Config(_))));
    }
}
