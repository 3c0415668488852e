use super::{DofMap, ProblemData};
use crate::error::{Error, Result};
use crate::fem::{assembly_tabulation, edge_local_nodes, p2_values, QuadPoint};
use crate::geometry::{dot, Point};
use crate::mesh::{BoundaryEdge, Mesh};
use crate::parallel::map_blocks;
use crate::sparse::CsrMatrix;

const BLOCK: usize = 128;

type Local = [[f64; 12]; 12];

fn velocity_matrix<F>(mesh: &Mesh, dofmap: &DofMap, kernel: F) -> CsrMatrix
where
    F: Fn(usize, &[QuadPoint], &mut Local) + Sync + Send,
{
    let tab = assembly_tabulation();
    let blocks = map_blocks(mesh.n_triangles(), BLOCK, |range| {
        let mut qp = Vec::new();
        let mut out = Vec::with_capacity(range.len() * 144);
        for k in range {
            mesh.quad_points(k, tab, &mut qp);
            let mut m = [[0.0; 12]; 12];
            kernel(k, &qp, &mut m);
            let nodes = mesh.triangle_nodes(k);
            let rot = dofmap.local_rotation(&nodes);
            if !rot.is_identity() {
                rot.rotate_cols(&mut m);
                rot.rotate_rows(&mut m);
            }
            for a in 0..12 {
                for b in 0..12 {
                    if m[a][b] != 0.0 {
                        out.push((2 * nodes[a / 2] + a % 2, 2 * nodes[b / 2] + b % 2, m[a][b]));
                    }
                }
            }
        }
        out
    });
    let entries = blocks.concat();
    CsrMatrix::from_entries(dofmap.n_velocity(), dofmap.n_velocity(), &entries)
}

/// Viscous form `(nu/2) int S(u) : S(phi)` with `S(u) = grad u + grad u^T`.
pub fn assemble_viscous(mesh: &Mesh, dofmap: &DofMap, nu: f64) -> CsrMatrix {
    velocity_matrix(mesh, dofmap, |_, qp, m| {
        for q in qp {
            let w = nu * q.jxw;
            for i in 0..6 {
                for j in 0..6 {
                    let gg = dot(q.grad[i], q.grad[j]);
                    for d in 0..2 {
                        for c in 0..2 {
                            let delta = if c == d { gg } else { 0.0 };
                            m[2 * i + d][2 * j + c] += w * (delta + q.grad[j][d] * q.grad[i][c]);
                        }
                    }
                }
            }
        }
    })
}

/// Vector L2 mass matrix.
pub fn assemble_mass(mesh: &Mesh, dofmap: &DofMap) -> CsrMatrix {
    velocity_matrix(mesh, dofmap, |_, qp, m| {
        for q in qp {
            for i in 0..6 {
                for j in 0..6 {
                    let v = q.jxw * q.phi[i] * q.phi[j];
                    m[2 * i][2 * j] += v;
                    m[2 * i + 1][2 * j + 1] += v;
                }
            }
        }
    })
}

/// Vector `int grad u : grad phi`.
pub fn assemble_gradient_stiffness(mesh: &Mesh, dofmap: &DofMap) -> CsrMatrix {
    velocity_matrix(mesh, dofmap, |_, qp, m| {
        for q in qp {
            for i in 0..6 {
                for j in 0..6 {
                    let v = q.jxw * dot(q.grad[i], q.grad[j]);
                    m[2 * i][2 * j] += v;
                    m[2 * i + 1][2 * j + 1] += v;
                }
            }
        }
    })
}

fn local_cartesian(mesh: &Mesh, k: usize, w: &[Point]) -> [Point; 6] {
    mesh.triangle_nodes(k).map(|i| w[i])
}

fn convection_impl(mesh: &Mesh, dofmap: &DofMap, w: &[f64], jacobian: bool) -> CsrMatrix {
    let wc = dofmap.to_cartesian(w);
    velocity_matrix(mesh, dofmap, |k, qp, m| {
        let wl = local_cartesian(mesh, k, &wc);
        for q in qp {
            let mut wq = [0.0; 2];
            let mut gw = [[0.0; 2]; 2];
            for l in 0..6 {
                for d in 0..2 {
                    wq[d] += q.phi[l] * wl[l][d];
                    for c in 0..2 {
                        gw[d][c] += wl[l][d] * q.grad[l][c];
                    }
                }
            }
            for i in 0..6 {
                let ni = q.jxw * q.phi[i];
                for j in 0..6 {
                    let adv = ni * dot(wq, q.grad[j]);
                    m[2 * i][2 * j] += adv;
                    m[2 * i + 1][2 * j + 1] += adv;
                    if jacobian {
                        let nn = ni * q.phi[j];
                        for d in 0..2 {
                            for c in 0..2 {
                                m[2 * i + d][2 * j + c] += nn * gw[d][c];
                            }
                        }
                    }
                }
            }
        }
    })
}

/// Convection matrix `C(w)[u, phi] = int (w . grad) u . phi` and `N(w) = C(w) w`.
pub fn assemble_convection(mesh: &Mesh, dofmap: &DofMap, w: &[f64]) -> (CsrMatrix, Vec<f64>) {
    let c = convection_impl(mesh, dofmap, w, false);
    let n = c.mul_vec(w);
    (c, n)
}

/// Derivative of `u -> C(u) u` at `w`: `C(w) + int (u . grad) w . phi`.
pub fn assemble_convection_jacobian(mesh: &Mesh, dofmap: &DofMap, w: &[f64]) -> CsrMatrix {
    convection_impl(mesh, dofmap, w, true)
}

/// `B[q, u] = int q div u` with P1 pressure rows.
pub fn assemble_divergence(mesh: &Mesh, dofmap: &DofMap) -> CsrMatrix {
    let tab = assembly_tabulation();
    let blocks = map_blocks(mesh.n_triangles(), BLOCK, |range| {
        let mut qp = Vec::new();
        let mut out = Vec::with_capacity(range.len() * 36);
        for k in range {
            mesh.quad_points(k, tab, &mut qp);
            let mut m = [[0.0; 12]; 3];
            for q in &qp {
                for p in 0..3 {
                    let w = q.jxw * q.psi[p];
                    for j in 0..6 {
                        m[p][2 * j] += w * q.grad[j][0];
                        m[p][2 * j + 1] += w * q.grad[j][1];
                    }
                }
            }
            let nodes = mesh.triangle_nodes(k);
            dofmap.local_rotation(&nodes).rotate_cols(&mut m);
            let verts = mesh.triangles()[k];
            for p in 0..3 {
                for b in 0..12 {
                    if m[p][b] != 0.0 {
                        out.push((verts[p], 2 * nodes[b / 2] + b % 2, m[p][b]));
                    }
                }
            }
        }
        out
    });
    CsrMatrix::from_entries(dofmap.n_pressure(), dofmap.n_velocity(), &blocks.concat())
}

/// `m_q = int q` for every P1 basis function.
pub fn pressure_mean_vector(mesh: &Mesh) -> Vec<f64> {
    let tab = assembly_tabulation();
    let mut out = vec![0.0; mesh.n_vertices()];
    let mut qp = Vec::new();
    for k in 0..mesh.n_triangles() {
        mesh.quad_points(k, tab, &mut qp);
        let verts = mesh.triangles()[k];
        for q in &qp {
            for p in 0..3 {
                out[verts[p]] += q.jxw * q.psi[p];
            }
        }
    }
    out
}

/// `int f . phi`.
pub fn assemble_body_force(mesh: &Mesh, dofmap: &DofMap, data: &ProblemData) -> Vec<f64> {
    let mut out = vec![0.0; dofmap.n_velocity()];
    if data.force.is_zero() {
        return out;
    }
    let tab = assembly_tabulation();
    let blocks = map_blocks(mesh.n_triangles(), BLOCK, |range| {
        let mut qp = Vec::new();
        let mut res = Vec::with_capacity(range.len());
        for k in range {
            mesh.quad_points(k, tab, &mut qp);
            let mut v = [0.0; 12];
            for q in &qp {
                let f = data.force.eval(q.x);
                for i in 0..6 {
                    v[2 * i] += q.jxw * f[0] * q.phi[i];
                    v[2 * i + 1] += q.jxw * f[1] * q.phi[i];
                }
            }
            let nodes = mesh.triangle_nodes(k);
            dofmap.local_rotation(&nodes).rotate_vec(&mut v);
            res.push((nodes, v));
        }
        res
    });
    for (nodes, v) in blocks.into_iter().flatten() {
        for a in 0..12 {
            out[2 * nodes[a / 2] + a % 2] += v[a];
        }
    }
    out
}

/// Boundary integral `int g(s) phi . tau ds` over edges, calling `visit`
/// with `(dof, weight * g * N (e . tau))` pieces.
fn boundary_tangential<G>(mesh: &Mesh, dofmap: &DofMap, edges: &[BoundaryEdge], mut visit: G) -> Result<()>
where
    G: FnMut(&BoundaryEdge, &crate::mesh::EdgePoint, &[(usize, f64); 6]) -> Result<()>,
{
    for be in edges {
        let nodes = mesh.triangle_nodes(be.triangle);
        let local = edge_local_nodes(be.local_edge);
        for ep in mesh.edge_quadrature(be) {
            let phi = p2_values(ep.xi);
            let tau = ep.sample.frame.tangent;
            let mut g = [(0usize, 0.0); 6];
            for (slot, &l) in local.iter().enumerate() {
                for c in 0..2 {
                    let dof = 2 * nodes[l] + c;
                    g[2 * slot + c] = (dof, phi[l] * dot(dofmap.direction(dof), tau));
                }
            }
            visit(be, &ep, &g)?;
        }
    }
    Ok(())
}

/// Friction form `int beta (u . tau)(phi . tau) ds`.
pub fn assemble_friction(mesh: &Mesh, dofmap: &DofMap, data: &ProblemData) -> Result<CsrMatrix> {
    let mut entries = Vec::new();
    boundary_tangential(mesh, dofmap, mesh.boundary_edges(), |_, ep, g| {
        let b = data.beta.eval(&ep.sample);
        if !(b >= 0.0) {
            return Err(Error::Data(format!(
                "friction coefficient is {b} < 0 on component {} at t = {:.6}",
                ep.sample.component, ep.sample.t
            )));
        }
        if b == 0.0 {
            return Ok(());
        }
        for &(i, gi) in g {
            for &(j, gj) in g {
                let v = ep.weight * b * gi * gj;
                if v != 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Ok(())
    })?;
    Ok(CsrMatrix::from_entries(dofmap.n_velocity(), dofmap.n_velocity(), &entries))
}

/// Boundary load `int b_tau (phi . tau) ds`.
pub fn assemble_boundary_traction(mesh: &Mesh, dofmap: &DofMap, data: &ProblemData) -> Vec<f64> {
    let mut out = vec![0.0; dofmap.n_velocity()];
    boundary_tangential(mesh, dofmap, mesh.boundary_edges(), |_, ep, g| {
        let b = data.traction.eval(&ep.sample);
        for &(i, gi) in g {
            out[i] += ep.weight * b * gi;
        }
        Ok(())
    })
    .expect("traction assembly is infallible");
    out
}

/// Coefficients of the circulation `u -> oint_{component} u . tau ds`.
pub fn circulation_functional(mesh: &Mesh, dofmap: &DofMap, component: usize) -> Vec<f64> {
    let mut out = vec![0.0; dofmap.n_velocity()];
    let edges: Vec<BoundaryEdge> = mesh.boundary_edges().iter().filter(|b| b.component == component).copied().collect();
    boundary_tangential(mesh, dofmap, &edges, |_, ep, g| {
        for &(i, gi) in g {
            out[i] += ep.weight * gi;
        }
        Ok(())
    })
    .expect("infallible");
    out
}

/// Prescribed normal velocity at boundary nodes.
#[derive(Clone, Debug)]
pub struct NormalTrace {
    /// `(dof, value)` of every normal dof, ascending by dof.
    pub fixed: Vec<(usize, f64)>,
    pub fluxes: Vec<f64>,
    pub total_flux: f64,
}

impl NormalTrace {
    /// Fixed-value mask and values over all velocity dofs.
    pub fn mask(&self, n_velocity: usize) -> (Vec<bool>, Vec<f64>) {
        let mut mask = vec![false; n_velocity];
        let mut vals = vec![0.0; n_velocity];
        for &(d, v) in &self.fixed {
            mask[d] = true;
            vals[d] = v;
        }
        (mask, vals)
    }

    /// The same constraint pattern with zero values.
    pub fn homogeneous(&self) -> Self {
        Self {
            fixed: self.fixed.iter().map(|&(d, _)| (d, 0.0)).collect(),
            fluxes: vec![0.0; self.fluxes.len()],
            total_flux: 0.0,
        }
    }
}

/// Check flux compatibility and fix every normal dof to the nodal value of `a`.
pub fn apply_normal_trace(mesh: &Mesh, dofmap: &DofMap, data: &ProblemData) -> Result<NormalTrace> {
    data.check_flux(mesh.domain())?;
    let (fluxes, total_flux) = data.fluxes(mesh.domain());
    let mut fixed = Vec::new();
    for (node, bn) in mesh.boundary_nodes().iter().enumerate() {
        if let Some(bn) = bn {
            let s = crate::geometry::BoundarySample { component: bn.component, t: bn.t, frame: bn.frame };
            fixed.push((2 * node, data.normal.eval(&s)));
        }
    }
    debug_assert!(fixed.iter().all(|(d, _)| dofmap.is_normal_dof(*d)));
    Ok(NormalTrace { fixed, fluxes, total_flux })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::BoundaryField;
    use crate::mesh::mesh_annulus;
    use crate::sparse::norm2;

    #[test]
    fn viscous_kills_rigid_modes() {
        let m = mesh_annulus(1.0, 2.0, 4, 16).unwrap();
        let d = DofMap::new(&m);
        let a = assemble_viscous(&m, &d, 1.3);
        assert!(a.asymmetry() < 1e-12 * a.max_abs());
        for u in [d.interpolate(&m, |x| [-x[1], x[0]]), d.interpolate(&m, |_| [1.0, 0.0])] {
            let r = norm2(&a.mul_vec(&u));
            assert!(r <= 1e-10 * a.frobenius_norm() * norm2(&u), "{r}");
        }
    }

    #[test]
    fn friction_and_traction_on_unit_circle() {
        let m = mesh_annulus(1.0, 2.0, 3, 32).unwrap();
        let d = DofMap::new(&m);
        let data = ProblemData::new(1.0, 2).with_beta(BoundaryField::constants(&[0.0, 1.0]));
        let f = assemble_friction(&m, &d, &data).unwrap();
        // tangential unit field on the inner circle: tau = (n2, -n1), n = -x
        let u = d.interpolate(&m, |x| {
            let r = x[0].hypot(x[1]);
            [x[1] / r, -x[0] / r]
        });
        let e = f.bilinear(&u, &u);
        assert!((e - 2.0 * std::f64::consts::PI).abs() < 1e-4, "{e}");
        let un = d.interpolate(&m, |x| [x[0], x[1]]);
        assert!(f.bilinear(&un, &un).abs() < 1e-6);
        let zero = assemble_friction(&m, &d, &ProblemData::new(1.0, 2)).unwrap();
        assert_eq!(zero.nnz(), 0);
        let neg = ProblemData::new(1.0, 2).with_beta(BoundaryField::constants(&[-1.0, 0.0]));
        assert!(matches!(assemble_friction(&m, &d, &neg), Err(Error::Data(_))));
    }

    #[test]
    fn divergence_of_rigid_and_constant_fields() {
        let m = mesh_annulus(1.0, 2.0, 4, 16).unwrap();
        let d = DofMap::new(&m);
        let b = assemble_divergence(&m, &d);
        for u in [d.interpolate(&m, |x| [-x[1], x[0]]), d.interpolate(&m, |_| [0.3, -0.7])] {
            assert!(norm2(&b.mul_vec(&u)) < 1e-12);
        }
        let u = d.interpolate(&m, |x| [x[0], x[1]]);
        let total: f64 = b.mul_vec(&u).iter().sum();
        assert!((total - 2.0 * m.area()).abs() < 1e-12);
    }

    #[test]
    fn centripetal_convection() {
        let m = mesh_annulus(1.0, 2.0, 4, 24).unwrap();
        let d = DofMap::new(&m);
        let b = 1.7;
        let w = d.interpolate(&m, |x| [-b * x[1], b * x[0]]);
        let (_, n) = assemble_convection(&m, &d, &w);
        let mut lm = ProblemData::new(1.0, 2);
        lm.force = crate::assembly::BodyForce::field(move |x| [-b * b * x[0], -b * b * x[1]]);
        let expect = assemble_body_force(&m, &d, &lm);
        let diff: Vec<f64> = n.iter().zip(&expect).map(|(a, b)| a - b).collect();
        assert!(norm2(&diff) < 1e-12 * norm2(&expect));
        let (c0, n0) = assemble_convection(&m, &d, &vec![0.0; d.n_velocity()]);
        assert_eq!(c0.nnz(), 0);
        assert!(n0.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn normal_trace_compatibility() {
        let m = mesh_annulus(1.0, 2.0, 3, 16).unwrap();
        let d = DofMap::new(&m);
        let hamel = ProblemData::new(1.0, 2).with_normal(BoundaryField::constants(&[-1.5, 3.0]));
        let tr = apply_normal_trace(&m, &d, &hamel).unwrap();
        assert_eq!(tr.fixed.len(), d.normal_dofs().len());
        let bad = ProblemData::new(1.0, 2).with_normal(BoundaryField::constants(&[1.0, 1.0]));
        assert!(matches!(apply_normal_trace(&m, &d, &bad), Err(Error::Compatibility { .. })));
    }
}
