//! Discrete flow fields and their evaluation.

use std::sync::Arc;

use serde::Serialize;

use crate::assembly::DofMap;
use crate::fem::{accurate_tabulation, element_point, QuadPoint, Tabulation};
use crate::geometry::{dot, Point};
use crate::mesh::Mesh;
use crate::navier_stokes::IterationTrace;
use crate::parallel::map_blocks;

/// Sum of `f(k, qp) * jxw` over all quadrature points of every triangle.
pub fn integrate_mesh<F>(mesh: &Mesh, tab: &Tabulation, f: F) -> f64
where
    F: Fn(usize, &QuadPoint) -> f64 + Sync + Send,
{
    map_blocks(mesh.n_triangles(), 256, |range| {
        let mut qp = Vec::new();
        let mut s = 0.0;
        for k in range {
            mesh.quad_points(k, tab, &mut qp);
            for q in &qp {
                s += q.jxw * f(k, q);
            }
        }
        s
    })
    .into_iter()
    .sum()
}

/// Velocity, pressure and their gradients at a point.
#[derive(Clone, Copy, Debug, Default)]
pub struct Eval {
    pub x: Point,
    pub u: Point,
    /// `grad[d][c] = d u_d / d x_c`.
    pub grad: [[f64; 2]; 2],
    pub p: f64,
    pub grad_p: Point,
}

impl Eval {
    /// `d2 u1 - d1 u2`.
    pub fn vorticity(&self) -> f64 {
        self.grad[0][1] - self.grad[1][0]
    }

    /// Total head `p + |u|^2 / 2`.
    pub fn head(&self) -> f64 {
        self.p + 0.5 * dot(self.u, self.u)
    }

    pub fn divergence(&self) -> f64 {
        self.grad[0][0] + self.grad[1][1]
    }
}

/// Bookkeeping attached to a solution.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FlowMetadata {
    pub problem: String,
    /// Whether the rigid rotation was removed by an orthogonality constraint.
    pub rotation_constraint: bool,
    /// `<f, u0> + <b, u0>` relative to the load, when the rotation constraint is active.
    pub compatibility_residual: Option<f64>,
    pub circulation_pins: Vec<(usize, f64)>,
    pub residual: Option<f64>,
    pub trace: Option<IterationTrace>,
    pub notes: Vec<String>,
}

/// Taylor-Hood velocity (Cartesian values at P2 nodes) and P1 pressure.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub mesh: Arc<Mesh>,
    pub velocity: Vec<Point>,
    pub pressure: Vec<f64>,
    pub nu: f64,
    pub metadata: FlowMetadata,
}

impl FlowState {
    pub fn new(mesh: Arc<Mesh>, velocity: Vec<Point>, pressure: Vec<f64>, nu: f64) -> Self {
        assert_eq!(velocity.len(), mesh.n_nodes());
        assert_eq!(pressure.len(), mesh.n_vertices());
        Self { mesh, velocity, pressure, nu, metadata: FlowMetadata::default() }
    }

    /// Nodal interpolation of analytic fields.
    pub fn interpolate(mesh: Arc<Mesh>, u: impl Fn(Point) -> Point, p: impl Fn(Point) -> f64, nu: f64) -> Self {
        let velocity = mesh.nodes().iter().map(|&x| u(x)).collect();
        let pressure = mesh.vertices().iter().map(|&x| p(x)).collect();
        let mut s = Self::new(mesh, velocity, pressure, nu);
        s.metadata.problem = "interpolated".into();
        s
    }

    pub fn zero(mesh: Arc<Mesh>, nu: f64) -> Self {
        let (n, v) = (mesh.n_nodes(), mesh.n_vertices());
        Self::new(mesh, vec![[0.0; 2]; n], vec![0.0; v], nu)
    }

    pub fn velocity_dofs(&self, dofmap: &DofMap) -> Vec<f64> {
        dofmap.to_dofs(&self.velocity)
    }

    /// Evaluate inside triangle `k` at a quadrature point of that triangle.
    pub fn eval_local(&self, k: usize, q: &QuadPoint) -> Eval {
        let nodes = self.mesh.triangle_nodes(k);
        let verts = self.mesh.triangles()[k];
        let mut e = Eval { x: q.x, ..Default::default() };
        for i in 0..6 {
            let u = self.velocity[nodes[i]];
            for d in 0..2 {
                e.u[d] += q.phi[i] * u[d];
                for c in 0..2 {
                    e.grad[d][c] += u[d] * q.grad[i][c];
                }
            }
        }
        for i in 0..3 {
            let p = self.pressure[verts[i]];
            e.p += q.psi[i] * p;
            e.grad_p[0] += p * q.grad_psi[i][0];
            e.grad_p[1] += p * q.grad_psi[i][1];
        }
        e
    }

    /// Evaluate in triangle `k` at reference coordinates `xi`.
    pub fn eval_ref(&self, k: usize, xi: [f64; 2]) -> Eval {
        let q = element_point(&self.mesh.triangle_coords(k), xi);
        self.eval_local(k, &q)
    }

    /// Evaluate at a physical point (boundary points included).
    pub fn eval_at(&self, x: Point) -> Option<Eval> {
        let tol = 1e-6;
        let (k, xi) = self.mesh.locator().locate(&self.mesh, x, tol)?;
        Some(self.eval_ref(k, xi))
    }

    /// `int f(eval) dx` with the degree-8 rule.
    pub fn integrate(&self, f: impl Fn(&Eval) -> f64 + Sync + Send) -> f64 {
        integrate_mesh(&self.mesh, accurate_tabulation(), |k, q| f(&self.eval_local(k, q)))
    }

    pub fn velocity_l2_norm(&self) -> f64 {
        self.integrate(|e| dot(e.u, e.u)).sqrt()
    }

    pub fn velocity_l2_error(&self, exact: impl Fn(Point) -> Point + Sync + Send) -> f64 {
        self.integrate(|e| {
            let v = exact(e.x);
            (e.u[0] - v[0]).powi(2) + (e.u[1] - v[1]).powi(2)
        })
        .sqrt()
    }

    /// `|u_h - u|_{H1}` seminorm.
    pub fn velocity_h1_error(&self, exact_grad: impl Fn(Point) -> [[f64; 2]; 2] + Sync + Send) -> f64 {
        self.integrate(|e| {
            let g = exact_grad(e.x);
            let mut s = 0.0;
            for d in 0..2 {
                for c in 0..2 {
                    s += (e.grad[d][c] - g[d][c]).powi(2);
                }
            }
            s
        })
        .sqrt()
    }

    pub fn pressure_mean(&self) -> f64 {
        self.integrate(|e| e.p) / self.mesh.area()
    }

    /// L2 error of the pressure after removing the mean of both fields.
    pub fn pressure_l2_error(&self, exact: impl Fn(Point) -> f64 + Sync + Send) -> f64 {
        let area = self.mesh.area();
        let mh = self.integrate(|e| e.p) / area;
        let me = self.integrate(|e| exact(e.x)) / area;
        self.integrate(|e| (e.p - mh - exact(e.x) + me).powi(2)).sqrt()
    }

    /// `oint u . tau ds` over one component.
    pub fn circulation(&self, component: usize) -> f64 {
        self.boundary_integral(component, |e, f| dot(e.u, f.tangent))
    }

    /// `oint u . n ds` over one component.
    pub fn flux(&self, component: usize) -> f64 {
        self.boundary_integral(component, |e, f| dot(e.u, f.normal))
    }

    /// Integral over the boundary edges of one component of a function of the
    /// interior trace and the exact boundary frame.
    pub fn boundary_integral(&self, component: usize, g: impl Fn(&Eval, &crate::geometry::BoundaryFrame) -> f64) -> f64 {
        let mut s = 0.0;
        for be in self.mesh.boundary_edges().iter().filter(|b| b.component == component) {
            for ep in self.mesh.edge_quadrature(be) {
                let e = self.eval_ref(be.triangle, ep.xi);
                s += ep.weight * g(&e, &ep.sample.frame);
            }
        }
        s
    }
}

/// P2 scalar field on the mesh nodes.
#[derive(Clone, Debug)]
pub struct ScalarField {
    pub mesh: Arc<Mesh>,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_nodes());
        Self { mesh, values }
    }

    pub fn interpolate(mesh: Arc<Mesh>, f: impl Fn(Point) -> f64) -> Self {
        let values = mesh.nodes().iter().map(|&x| f(x)).collect();
        Self { mesh, values }
    }

    /// Value and gradient at a quadrature point of triangle `k`.
    pub fn eval_local(&self, k: usize, q: &QuadPoint) -> (f64, Point) {
        let nodes = self.mesh.triangle_nodes(k);
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for i in 0..6 {
            let c = self.values[nodes[i]];
            v += q.phi[i] * c;
            g[0] += c * q.grad[i][0];
            g[1] += c * q.grad[i][1];
        }
        (v, g)
    }

    pub fn eval_at(&self, x: Point) -> Option<(f64, Point)> {
        let (k, xi) = self.mesh.locator().locate(&self.mesh, x, 1e-6)?;
        let q = element_point(&self.mesh.triangle_coords(k), xi);
        Some(self.eval_local(k, &q))
    }

    pub fn integrate(&self, f: impl Fn(Point, f64, Point) -> f64 + Sync + Send) -> f64 {
        integrate_mesh(&self.mesh, accurate_tabulation(), |k, q| {
            let (v, g) = self.eval_local(k, q);
            f(q.x, v, g)
        })
    }

    pub fn l2_error(&self, exact: impl Fn(Point) -> f64 + Sync + Send) -> f64 {
        self.integrate(|x, v, _| (v - exact(x)).powi(2)).sqrt()
    }

    pub fn gradient_l2_error(&self, exact: impl Fn(Point) -> Point + Sync + Send) -> f64 {
        self.integrate(|x, _, g| {
            let e = exact(x);
            (g[0] - e[0]).powi(2) + (g[1] - e[1]).powi(2)
        })
        .sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|_, v, _| v) / self.mesh.area()
    }
}
