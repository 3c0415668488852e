//! Solenoidal extensions of the normal boundary datum and the harmonic
//! vector fields of a multiply-connected domain.

use std::sync::Arc;

use crate::assembly::{BoundaryField, DofMap};
use crate::error::{Error, Result};
use crate::fem::{accurate_tabulation, QuadPoint};
use crate::flow::{integrate_mesh, FlowState, ScalarField};
use crate::geometry::{dot, BoundarySample, Point};
use crate::linear::{scalar_mass, solve_laplace_neumann, ScalarSystem, SparseSolver};
use crate::mesh::Mesh;

/// Divergence-free extension `A = grad q` of a normal datum.
#[derive(Clone, Debug)]
pub struct ExtensionField {
    /// Neumann potential `q`; `A` is its exact discrete gradient.
    pub potential: ScalarField,
    /// Continuous P2 representative of `A` (L2 projection, normal trace reset to the datum).
    pub velocity: Vec<Point>,
    /// `int_{Gamma_j} a ds` for the holes `j = 1..N`.
    pub fluxes: Vec<f64>,
    pub method: &'static str,
}

/// L2 projection of a piecewise field onto continuous P2 vectors.
pub fn project_to_nodes(mesh: &Mesh, f: impl Fn(usize, &QuadPoint) -> Point + Sync + Send) -> Result<Vec<Point>> {
    let m = scalar_mass(mesh);
    let solver = SparseSolver::cholesky(&m)?;
    let tab = accurate_tabulation();
    let mut rhs = [vec![0.0; mesh.n_nodes()], vec![0.0; mesh.n_nodes()]];
    let mut qp = Vec::new();
    for k in 0..mesh.n_triangles() {
        mesh.quad_points(k, tab, &mut qp);
        let nodes = mesh.triangle_nodes(k);
        for q in &qp {
            let v = f(k, q);
            for i in 0..6 {
                rhs[0][nodes[i]] += q.jxw * v[0] * q.phi[i];
                rhs[1][nodes[i]] += q.jxw * v[1] * q.phi[i];
            }
        }
    }
    let x = solver.solve(&rhs[0])?;
    let y = solver.solve(&rhs[1])?;
    Ok(x.into_iter().zip(y).map(|(a, b)| [a, b]).collect())
}

fn hole_fluxes(mesh: &Mesh, a: &BoundaryField) -> Vec<f64> {
    let d = mesh.domain();
    (1..d.components()).map(|j| a.integral(d, j)).collect()
}

/// Extension by the gradient of the zero-mean Neumann solution.
pub fn solenoidal_extension(mesh: &Arc<Mesh>, a: &BoundaryField) -> Result<ExtensionField> {
    let potential = solve_laplace_neumann(mesh, a)?;
    let mut velocity = project_to_nodes(mesh, |k, q| potential.eval_local(k, q).1)?;
    for (node, bn) in mesh.boundary_nodes().iter().enumerate() {
        if let Some(bn) = bn {
            let n = bn.frame.normal;
            let target = a.eval(&BoundarySample { component: bn.component, t: bn.t, frame: bn.frame });
            let shift = target - dot(velocity[node], n);
            velocity[node][0] += shift * n[0];
            velocity[node][1] += shift * n[1];
        }
    }
    Ok(ExtensionField { potential, velocity, fluxes: hole_fluxes(mesh, a), method: "neumann" })
}

/// Gradients `grad q_k` of the Dirichlet solutions with `q_k = delta_jk` on
/// `Gamma_j`, their L2 Gram matrix and the Gram-Schmidt coefficients.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub mesh: Arc<Mesh>,
    pub potentials: Vec<ScalarField>,
    pub gram: Vec<Vec<f64>>,
    /// Lower-triangular `alpha` with `psi_i = sum_k alpha_ik grad q_k`.
    pub alpha: Vec<Vec<f64>>,
}

pub fn harmonic_basis(mesh: &Arc<Mesh>) -> Result<HarmonicBasis> {
    let n = mesh.domain().holes();
    if n == 0 {
        return Ok(HarmonicBasis { mesh: mesh.clone(), potentials: Vec::new(), gram: Vec::new(), alpha: Vec::new() });
    }
    let system = ScalarSystem::new(mesh)?;
    let comps = mesh.domain().components();
    let potentials: Vec<ScalarField> = (1..=n)
        .map(|k| {
            let values: Vec<f64> = (0..comps).map(|j| if j == k { 1.0 } else { 0.0 }).collect();
            system.solve_dirichlet(&BoundaryField::constants(&values))
        })
        .collect::<Result<_>>()?;
    let kq: Vec<Vec<f64>> = potentials.iter().map(|q| system.stiffness().mul_vec(&q.values)).collect();
    let gram: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| crate::sparse::dot(&potentials[i].values, &kq[j])).collect())
        .collect();
    // Cholesky G = L L^T, alpha = L^{-1}
    let mut l = vec![vec![0.0; n]; n];
    let scale = (0..n).map(|i| gram[i][i]).fold(0.0, f64::max);
    for i in 0..n {
        for j in 0..=i {
            let s = gram[i][j] - (0..j).map(|k| l[i][k] * l[j][k]).sum::<f64>();
            if i == j {
                if s <= 1e-12 * scale {
                    return Err(Error::NumericalRank(format!(
                        "Gram matrix of harmonic fields is numerically singular at column {i} (pivot {s:.3e})"
                    )));
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut alpha = vec![vec![0.0; n]; n];
    for c in 0..n {
        for i in 0..n {
            let rhs = if i == c { 1.0 } else { 0.0 };
            let s: f64 = (0..i).map(|k| l[i][k] * alpha[k][c]).sum();
            alpha[i][c] = (rhs - s) / l[i][i];
        }
    }
    Ok(HarmonicBasis { mesh: mesh.clone(), potentials, gram, alpha })
}

/// Linear combination `sum_k c_k grad q_k` of basis gradients.
#[derive(Clone, Debug)]
pub struct HarmonicField {
    pub coefficients: Vec<f64>,
    basis: HarmonicBasis,
}

impl HarmonicField {
    pub fn eval_local(&self, k: usize, q: &QuadPoint) -> Point {
        let mut v = [0.0; 2];
        for (c, pot) in self.coefficients.iter().zip(&self.basis.potentials) {
            let g = pot.eval_local(k, q).1;
            v[0] += c * g[0];
            v[1] += c * g[1];
        }
        v
    }

    pub fn eval_at(&self, x: Point) -> Option<Point> {
        let mut v = [0.0; 2];
        for (c, pot) in self.coefficients.iter().zip(&self.basis.potentials) {
            let g = pot.eval_at(x)?.1;
            v[0] += c * g[0];
            v[1] += c * g[1];
        }
        Some(v)
    }

    pub fn l2_norm(&self) -> f64 {
        self.basis.gram_norm(&self.coefficients)
    }

    /// `(int |h|^q)^{1/q}`.
    pub fn lq_norm(&self, q: f64) -> f64 {
        integrate_mesh(&self.basis.mesh, accurate_tabulation(), |k, p| {
            let v = self.eval_local(k, p);
            dot(v, v).sqrt().powf(q)
        })
        .powf(1.0 / q)
    }

    /// L2 distance to another combination of the same basis.
    pub fn l2_distance(&self, other: &Self) -> f64 {
        let d: Vec<f64> = self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| a - b).collect();
        self.basis.gram_norm(&d)
    }

    pub fn l2_error(&self, exact: impl Fn(Point) -> Point + Sync + Send) -> f64 {
        integrate_mesh(&self.basis.mesh, accurate_tabulation(), |k, p| {
            let v = self.eval_local(k, p);
            let e = exact(p.x);
            (v[0] - e[0]).powi(2) + (v[1] - e[1]).powi(2)
        })
        .sqrt()
    }
}

impl HarmonicBasis {
    pub fn dim(&self) -> usize {
        self.potentials.len()
    }

    fn gram_norm(&self, c: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..c.len() {
            for j in 0..c.len() {
                s += c[i] * self.gram[i][j] * c[j];
            }
        }
        s.max(0.0).sqrt()
    }

    fn field(&self, coefficients: Vec<f64>) -> HarmonicField {
        HarmonicField { coefficients, basis: self.clone() }
    }

    /// Harmonic part from hole fluxes: `c = alpha^T alpha F`.
    pub fn harmonic_part(&self, fluxes: &[f64]) -> Result<HarmonicField> {
        let n = self.dim();
        if fluxes.len() != n {
            return Err(Error::Data(format!("expected {n} hole fluxes, got {}", fluxes.len())));
        }
        let af: Vec<f64> = (0..n).map(|i| (0..n).map(|j| self.alpha[i][j] * fluxes[j]).sum()).collect();
        let c = (0..n).map(|k| (0..n).map(|i| self.alpha[i][k] * af[i]).sum()).collect();
        Ok(self.field(c))
    }

    /// Orthonormal fields `psi_i` as combinations of the basis gradients.
    pub fn orthonormal(&self) -> Vec<HarmonicField> {
        self.alpha.iter().map(|row| self.field(row.clone())).collect()
    }

    fn project_moments(&self, moments: Vec<f64>) -> HarmonicField {
        // c = G^{-1} b = alpha^T alpha b
        let n = self.dim();
        let ab: Vec<f64> = (0..n).map(|i| (0..n).map(|j| self.alpha[i][j] * moments[j]).sum()).collect();
        self.field((0..n).map(|k| (0..n).map(|i| self.alpha[i][k] * ab[i]).sum()).collect())
    }

    /// L2 projection of a piecewise vector field onto the harmonic space.
    pub fn project(&self, f: impl Fn(usize, &QuadPoint) -> Point + Sync + Send) -> HarmonicField {
        let moments = self
            .potentials
            .iter()
            .map(|q| integrate_mesh(&self.mesh, accurate_tabulation(), |k, p| dot(f(k, p), q.eval_local(k, p).1)))
            .collect();
        self.project_moments(moments)
    }

    pub fn project_extension(&self, ext: &ExtensionField) -> HarmonicField {
        self.project(|k, q| ext.potential.eval_local(k, q).1)
    }

    pub fn project_flow(&self, flow: &FlowState) -> HarmonicField {
        self.project(|k, q| flow.eval_local(k, q).u)
    }
}

/// Harmonic part of any extension of `a`, from its hole fluxes.
pub fn harmonic_part(basis: &HarmonicBasis, fluxes: &[f64]) -> Result<HarmonicField> {
    basis.harmonic_part(fluxes)
}

/// Velocity dofs of a nodal extension (used as a Stokes lift cross-check).
pub fn extension_dofs(ext: &ExtensionField, dofmap: &DofMap) -> Vec<f64> {
    dofmap.to_dofs(&ext.velocity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::mesh::{mesh_annulus, mesh_disk_with_holes};
    use std::f64::consts::PI;

    fn radial(x: Point) -> Point {
        let r2 = x[0] * x[0] + x[1] * x[1];
        [-3.0 * x[0] / r2, -3.0 * x[1] / r2]
    }

    #[test]
    fn annulus_basis_and_hamel_part() {
        let m = Arc::new(mesh_annulus(1.0, 2.0, 8, 32).unwrap());
        let b = harmonic_basis(&m).unwrap();
        let g = b.gram[0][0];
        assert!((g - 2.0 * PI / 2f64.ln()).abs() < 1e-3 * g, "{g}");
        assert!((b.alpha[0][0] - 1.0 / g.sqrt()).abs() < 1e-14);
        assert!((b.orthonormal()[0].l2_norm() - 1.0).abs() < 1e-12);
        let h = b.harmonic_part(&[6.0 * PI]).unwrap();
        // h is a gradient of the discrete potential, so it carries the P2 gradient error
        let interp = crate::flow::ScalarField::interpolate(m.clone(), |x| -1.5 * (x[0] * x[0] + x[1] * x[1]).ln());
        assert!(h.l2_error(radial) < 1.05 * interp.gradient_l2_error(radial), "{}", h.l2_error(radial));
        assert!(b.harmonic_part(&[0.0]).unwrap().l2_norm() == 0.0);
        let s = b.harmonic_part(&[12.0 * PI]).unwrap();
        assert!((s.coefficients[0] - 2.0 * h.coefficients[0]).abs() < 1e-14);
    }

    #[test]
    fn extensions_agree() {
        let a = BoundaryField::constants(&[-1.5, 3.0]);
        let (mut gaps, mut errs) = (Vec::new(), Vec::new());
        for (nr, na) in [(8, 32), (16, 64)] {
            let m = Arc::new(mesh_annulus(1.0, 2.0, nr, na).unwrap());
            let ext = solenoidal_extension(&m, &a).unwrap();
            assert!((ext.fluxes[0] - 6.0 * PI).abs() < 1e-10);
            let b = harmonic_basis(&m).unwrap();
            let formula = b.harmonic_part(&ext.fluxes).unwrap();
            let proj = b.project_extension(&ext);
            gaps.push(formula.l2_distance(&proj) / formula.l2_norm());
            let flow = FlowState::new(m.clone(), ext.velocity.clone(), vec![0.0; m.n_vertices()], 1.0);
            errs.push(flow.velocity_l2_error(radial));
        }
        assert!(errs[0] < 0.05 && errs[0] / errs[1] > 3.5, "{errs:?}");
        assert!(gaps[0] < 1e-4, "{gaps:?}");
        assert!(gaps[1] < 1e-10 || gaps[0] / gaps[1] >= 3.0, "{gaps:?}");
    }

    #[test]
    fn simply_connected_is_empty_and_disk_extension() {
        let d = DomainSpec::disk(1.0).unwrap();
        let m = Arc::new(mesh_disk_with_holes(&d, 0.15).unwrap());
        assert_eq!(harmonic_basis(&m).unwrap().dim(), 0);
        let a = BoundaryField::function(1, |s| s.frame.normal[0]);
        let ext = solenoidal_extension(&m, &a).unwrap();
        let flow = FlowState::new(m.clone(), ext.velocity.clone(), vec![0.0; m.n_vertices()], 1.0);
        assert!(flow.velocity_l2_error(|_| [1.0, 0.0]) < 1e-3);
    }
}
