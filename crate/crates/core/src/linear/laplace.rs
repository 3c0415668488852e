use std::sync::Arc;

use super::SparseSolver;
use crate::assembly::BoundaryField;
use crate::error::{Error, Result};
use crate::fem::{assembly_tabulation, edge_local_nodes, p2_values};
use crate::flow::ScalarField;
use crate::geometry::{dot, BoundarySample};
use crate::mesh::Mesh;
use crate::parallel::map_blocks;
use crate::sparse::CsrMatrix;

fn scalar_matrix(mesh: &Mesh, stiffness: bool, mass: bool) -> CsrMatrix {
    let tab = assembly_tabulation();
    let blocks = map_blocks(mesh.n_triangles(), 128, |range| {
        let mut qp = Vec::new();
        let mut out = Vec::with_capacity(range.len() * 36);
        for k in range {
            mesh.quad_points(k, tab, &mut qp);
            let mut m = [[0.0; 6]; 6];
            for q in &qp {
                for i in 0..6 {
                    for j in 0..6 {
                        let mut v = 0.0;
                        if stiffness {
                            v += dot(q.grad[i], q.grad[j]);
                        }
                        if mass {
                            v += q.phi[i] * q.phi[j];
                        }
                        m[i][j] += q.jxw * v;
                    }
                }
            }
            let nodes = mesh.triangle_nodes(k);
            for i in 0..6 {
                for j in 0..6 {
                    out.push((nodes[i], nodes[j], m[i][j]));
                }
            }
        }
        out
    });
    CsrMatrix::from_entries(mesh.n_nodes(), mesh.n_nodes(), &blocks.concat())
}

/// Scalar P2 stiffness `int grad u . grad v`.
pub fn scalar_stiffness(mesh: &Mesh) -> CsrMatrix {
    scalar_matrix(mesh, true, false)
}

/// Scalar P2 mass `int u v`.
pub fn scalar_mass(mesh: &Mesh) -> CsrMatrix {
    scalar_matrix(mesh, false, true)
}

/// Factorized Dirichlet Laplacian, reusable across boundary data.
pub struct ScalarSystem {
    mesh: Arc<Mesh>,
    stiffness: CsrMatrix,
    interior: Vec<usize>,
    index: Vec<Option<usize>>,
    solver: Option<SparseSolver>,
}

impl ScalarSystem {
    pub fn new(mesh: &Arc<Mesh>) -> Result<Self> {
        let stiffness = scalar_stiffness(mesh);
        let mut index = vec![None; mesh.n_nodes()];
        let mut interior = Vec::new();
        for i in 0..mesh.n_nodes() {
            if mesh.boundary_node(i).is_none() {
                index[i] = Some(interior.len());
                interior.push(i);
            }
        }
        let entries: Vec<_> = stiffness
            .iter()
            .filter_map(|(i, j, v)| Some((index[i]?, index[j]?, v)))
            .collect();
        let solver = if interior.is_empty() {
            None
        } else {
            Some(SparseSolver::cholesky(&CsrMatrix::from_entries(interior.len(), interior.len(), &entries))?)
        };
        Ok(Self { mesh: mesh.clone(), stiffness, interior, index, solver })
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        &self.stiffness
    }

    /// `sqrt(r^T K0^{-1} r)` over the interior rows of `r`: the discrete
    /// `H^{-1}` norm of a residual tested against interior P2 functions.
    pub fn dual_norm(&self, r: &[f64]) -> Result<f64> {
        let Some(solver) = &self.solver else { return Ok(0.0) };
        let ri: Vec<f64> = self.interior.iter().map(|&i| r[i]).collect();
        let x = solver.solve(&ri)?;
        Ok(x.iter().zip(&ri).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt())
    }

    /// Harmonic extension of boundary values.
    pub fn solve_dirichlet(&self, values: &BoundaryField) -> Result<ScalarField> {
        let mut u = vec![0.0; self.mesh.n_nodes()];
        for (i, bn) in self.mesh.boundary_nodes().iter().enumerate() {
            if let Some(bn) = bn {
                u[i] = values.eval(&BoundarySample { component: bn.component, t: bn.t, frame: bn.frame });
            }
        }
        if let Some(solver) = &self.solver {
            let ku = self.stiffness.mul_vec(&u);
            let rhs: Vec<f64> = self.interior.iter().map(|&i| -ku[i]).collect();
            let x = solver.solve(&rhs)?;
            for (pos, &i) in self.interior.iter().enumerate() {
                u[i] = x[pos];
            }
        }
        debug_assert!(self.index.len() == u.len());
        Ok(ScalarField::new(self.mesh.clone(), u))
    }
}

/// Solve `-Laplace q = 0` with `q = values` on each boundary component.
pub fn solve_laplace_dirichlet(mesh: &Arc<Mesh>, values: &BoundaryField) -> Result<ScalarField> {
    ScalarSystem::new(mesh)?.solve_dirichlet(values)
}

/// Solve `-Laplace q = 0`, `dq/dn = a` with zero mean.
pub fn solve_laplace_neumann(mesh: &Arc<Mesh>, a: &BoundaryField) -> Result<ScalarField> {
    let domain = mesh.domain();
    let total: f64 = (0..domain.components()).map(|j| a.integral(domain, j)).sum();
    let perimeter: f64 = (0..domain.components()).map(|j| domain.length(j)).sum();
    let tolerance = 1e-8 * a.max_abs(domain).max(f64::MIN_POSITIVE) * perimeter;
    if total.abs() > tolerance {
        return Err(Error::Compatibility { total, tolerance });
    }
    let n = mesh.n_nodes();
    let k = scalar_stiffness(mesh);
    let ones = vec![1.0; n];
    let mean = scalar_mass(mesh).mul_vec(&ones);
    let mut rhs = vec![0.0; n + 1];
    for be in mesh.boundary_edges() {
        let nodes = mesh.triangle_nodes(be.triangle);
        for ep in mesh.edge_quadrature(be) {
            let phi = p2_values(ep.xi);
            let g = a.eval(&ep.sample);
            for l in edge_local_nodes(be.local_edge) {
                rhs[nodes[l]] += ep.weight * g * phi[l];
            }
        }
    }
    let mut entries: Vec<_> = k.iter().collect();
    for (i, &m) in mean.iter().enumerate() {
        entries.push((i, n, m));
        entries.push((n, i, m));
    }
    let sys = CsrMatrix::from_entries(n + 1, n + 1, &entries);
    let x = SparseSolver::lu(&sys)?.solve(&rhs)?;
    Ok(ScalarField::new(mesh.clone(), x[..n].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_annulus;

    #[test]
    fn annulus_dirichlet_log_profile() {
        let m = Arc::new(mesh_annulus(1.0, 2.0, 8, 32).unwrap());
        let q = solve_laplace_dirichlet(&m, &BoundaryField::constants(&[0.0, 1.0])).unwrap();
        let v = q.eval_at([2f64.sqrt(), 0.0]).unwrap().0;
        assert!((v - 0.5).abs() < 1e-4, "{v}");
        let max = q.values.iter().cloned().fold(f64::MIN, f64::max);
        let min = q.values.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max <= 1.0 + 1e-8 && min >= -1e-8);
        let one = solve_laplace_dirichlet(&m, &BoundaryField::constants(&[1.0, 1.0])).unwrap();
        assert!(one.values.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn neumann_hamel_datum() {
        let exact = |x: [f64; 2]| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            [-3.0 * x[0] / r2, -3.0 * x[1] / r2]
        };
        let mut errs = Vec::new();
        for (nr, na) in [(8, 32), (16, 64)] {
            let m = Arc::new(mesh_annulus(1.0, 2.0, nr, na).unwrap());
            let q = solve_laplace_neumann(&m, &BoundaryField::constants(&[-1.5, 3.0])).unwrap();
            let interp = ScalarField::interpolate(m.clone(), |x| -1.5 * (x[0] * x[0] + x[1] * x[1]).ln());
            let e = q.gradient_l2_error(exact);
            // Galerkin error no worse than the interpolant's
            assert!(e <= 1.05 * interp.gradient_l2_error(exact), "{e}");
            assert!(q.mean().abs() < 1e-10);
            errs.push(e);
        }
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
        let m = Arc::new(mesh_annulus(1.0, 2.0, 4, 16).unwrap());
        let bad = solve_laplace_neumann(&m, &BoundaryField::constants(&[1.0, 1.0]));
        assert!(matches!(bad, Err(Error::Compatibility { .. })));
    }
}
