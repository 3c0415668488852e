//! Field output: legacy ASCII VTK and CSV boundary profiles and traces.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::analysis::DiagnosticsFields;
use crate::assembly::ProblemData;
use crate::error::{Error, Result};
use crate::flow::FlowState;
use crate::geometry::{dot, BoundarySample};
use crate::navier_stokes::IterationTrace;

/// Tool version and configuration hash written into every artifact.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub config_sha256: Option<String>,
}

impl Provenance {
    pub fn new(config_sha256: Option<String>) -> Self {
        Self { tool: "slipflow".into(), version: env!("CARGO_PKG_VERSION").into(), config_sha256 }
    }

    pub fn line(&self) -> String {
        match &self.config_sha256 {
            Some(h) => format!("{} {} config-sha256 {}", self.tool, self.version, h),
            None => format!("{} {}", self.tool, self.version),
        }
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// Legacy VTK unstructured grid: every P2 node is a point and each triangle
/// is split into four linear subtriangles. Point data `u`, `p`, `omega`, `Phi`.
pub fn vtk_string(flow: &FlowState, diag: &DiagnosticsFields, prov: &Provenance) -> String {
    let mesh = &flow.mesh;
    let n = mesh.n_nodes();
    let nt = mesh.n_triangles();
    let mut s = String::with_capacity(64 * n);
    s.push_str("# vtk DataFile Version 3.0\n");
    s.push_str(&prov.line());
    s.push_str("\nASCII\nDATASET UNSTRUCTURED_GRID\n");
    s.push_str(&format!("POINTS {n} double\n"));
    for x in mesh.nodes() {
        s.push_str(&format!("{} {} 0\n", x[0], x[1]));
    }
    s.push_str(&format!("CELLS {} {}\n", 4 * nt, 16 * nt));
    for k in 0..nt {
        let v = mesh.triangle_nodes(k);
        for c in [[v[0], v[3], v[5]], [v[3], v[1], v[4]], [v[5], v[4], v[2]], [v[3], v[4], v[5]]] {
            s.push_str(&format!("3 {} {} {}\n", c[0], c[1], c[2]));
        }
    }
    s.push_str(&format!("CELL_TYPES {}\n", 4 * nt));
    for _ in 0..4 * nt {
        s.push_str("5\n");
    }
    s.push_str(&format!("POINT_DATA {n}\nVECTORS u double\n"));
    for u in &flow.velocity {
        s.push_str(&format!("{} {} 0\n", u[0], u[1]));
    }
    let pressure = crate::analysis::nodal_pressure(flow);
    for (name, vals) in [("p", &pressure), ("omega", &diag.vorticity), ("Phi", &diag.head)] {
        s.push_str(&format!("SCALARS {name} double 1\nLOOKUP_TABLE default\n"));
        for v in vals.iter() {
            s.push_str(&format!("{v}\n"));
        }
    }
    s
}

pub fn write_vtk(path: &Path, flow: &FlowState, diag: &DiagnosticsFields, prov: &Provenance) -> Result<()> {
    std::fs::write(path, vtk_string(flow, diag, prov))?;
    Ok(())
}

/// One boundary node of the profile CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryRow {
    pub component: usize,
    pub arclength: f64,
    pub u_n: f64,
    pub u_tau: f64,
    #[serde(rename = "Phi")]
    pub head: f64,
    pub kappa: f64,
    /// `beta/nu + 2 kappa`.
    pub margin: f64,
}

/// Boundary nodes ordered by component and curve parameter.
pub fn boundary_profile(flow: &FlowState, data: &ProblemData) -> Vec<BoundaryRow> {
    let mesh = &flow.mesh;
    let domain = mesh.domain();
    let head = crate::analysis::nodal_head(flow);
    let mut nodes: Vec<_> = mesh.boundary_nodes().iter().enumerate().filter_map(|(i, b)| b.map(|b| (i, b))).collect();
    nodes.sort_by(|a, b| a.1.component.cmp(&b.1.component).then(a.1.t.total_cmp(&b.1.t)));
    nodes
        .into_iter()
        .map(|(i, b)| {
            let f = &b.frame;
            let u = flow.velocity[i];
            let beta = data.beta.eval(&BoundarySample { component: b.component, t: b.t, frame: b.frame });
            BoundaryRow {
                component: b.component,
                arclength: domain.arclength(b.component, b.t),
                u_n: dot(u, f.normal),
                u_tau: dot(u, f.tangent),
                head: head[i],
                kappa: f.curvature,
                margin: beta / data.nu + 2.0 * f.curvature,
            }
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], prov: &Provenance) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "# {}", prov.line())?;
    let mut c = csv::Writer::from_writer(w);
    for r in rows {
        c.serialize(r).map_err(csv_err)?;
    }
    c.flush()?;
    Ok(())
}

pub fn write_boundary_csv(path: &Path, flow: &FlowState, data: &ProblemData, prov: &Provenance) -> Result<()> {
    write_csv(path, &boundary_profile(flow, data), prov)
}

#[derive(Serialize)]
struct TraceRow<'a> {
    iteration: usize,
    lambda: f64,
    step: &'a str,
    residual: f64,
    energy: f64,
    damping: f64,
}

pub fn write_trace_csv(path: &Path, trace: &IterationTrace, prov: &Provenance) -> Result<()> {
    let rows: Vec<_> = (0..trace.residuals.len())
        .map(|i| TraceRow {
            iteration: i,
            lambda: trace.lambda[i],
            step: &trace.step[i],
            residual: trace.residuals[i],
            energy: trace.energies[i],
            damping: trace.damping[i],
        })
        .collect();
    write_csv(path, &rows, prov)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::diagnostics;
    use crate::mesh::mesh_annulus;
    use std::sync::Arc;

    #[test]
    fn vtk_layout_and_profile() {
        let m = Arc::new(mesh_annulus(1.0, 2.0, 2, 12).unwrap());
        let flow = FlowState::interpolate(
            m.clone(),
            |x| {
                let r2 = x[0] * x[0] + x[1] * x[1];
                [-3.0 * x[0] / r2, -3.0 * x[1] / r2]
            },
            |x| -4.5 / (x[0] * x[0] + x[1] * x[1]),
            1.0,
        );
        let d = diagnostics(&flow).unwrap();
        let s = vtk_string(&flow, &d, &Provenance::new(Some("abc".into())));
        assert!(s.contains(&format!("POINTS {} double", m.n_vertices() + m.edges().len())));
        assert!(s.lines().nth(1).unwrap().ends_with("config-sha256 abc"));
        let data = ProblemData::new(1.0, 2);
        let rows = boundary_profile(&flow, &data);
        assert!(rows.iter().filter(|r| r.component == 0).all(|r| (r.u_n + 1.5).abs() < 1e-12));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.csv");
        write_boundary_csv(&p, &flow, &data, &Provenance::new(None)).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "component,arclength,u_n,u_tau,Phi,kappa,margin");
    }
}
