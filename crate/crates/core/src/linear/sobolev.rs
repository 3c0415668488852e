use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{scalar_mass, scalar_stiffness, SparseSolver};
use crate::error::{Error, Result};
use crate::fem::accurate_tabulation;
use crate::flow::{integrate_mesh, ScalarField};
use crate::mesh::Mesh;
use crate::parallel::map_blocks;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SobolevOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SobolevOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 2000 }
    }
}

/// Lower estimate of the embedding constant `|v|_{L^r} <= C_r |v|_{W^{1,2}}`.
#[derive(Clone, Debug, Serialize)]
pub struct SobolevEstimate {
    pub r: f64,
    pub c_r: f64,
    /// Ratio attained by the constant function.
    pub constant_ratio: f64,
    #[serde(skip)]
    pub maximizer: Option<ScalarField>,
    pub iterations: usize,
    /// Last change of the normalized iterate in the W^{1,2} norm.
    pub stationarity: f64,
    pub converged: bool,
    /// Always false: the value comes from a finite-dimensional search.
    pub rigorous: bool,
}

fn lr_norm(mesh: &Mesh, v: &[f64], r: f64) -> f64 {
    integrate_mesh(mesh, accurate_tabulation(), |k, q| {
        let nodes = mesh.triangle_nodes(k);
        let val: f64 = (0..6).map(|i| q.phi[i] * v[nodes[i]]).sum();
        val.abs().powf(r)
    })
    .powf(1.0 / r)
}

/// `g_i = int |v|^{r-2} v phi_i`.
fn lr_gradient(mesh: &Mesh, v: &[f64], r: f64) -> Vec<f64> {
    let tab = accurate_tabulation();
    let parts = map_blocks(mesh.n_triangles(), 256, |range| {
        let mut qp = Vec::new();
        let mut out = Vec::new();
        for k in range {
            mesh.quad_points(k, tab, &mut qp);
            let nodes = mesh.triangle_nodes(k);
            let mut loc = [0.0; 6];
            for q in &qp {
                let val: f64 = (0..6).map(|i| q.phi[i] * v[nodes[i]]).sum();
                let w = q.jxw * val.abs().powf(r - 2.0) * val;
                for i in 0..6 {
                    loc[i] += w * q.phi[i];
                }
            }
            out.extend(nodes.iter().copied().zip(loc));
        }
        out
    });
    let mut g = vec![0.0; mesh.n_nodes()];
    for (i, v) in parts.into_iter().flatten() {
        g[i] += v;
    }
    g
}

/// Maximize `|v|_{L^r} / |v|_{W^{1,2}}` over scalar P2 functions by the
/// normalized fixed-point ascent `v <- G^{-1} grad F(v)`, `F = int |v|^r`.
pub fn sobolev_constant(mesh: &Arc<Mesh>, r: f64, options: &SobolevOptions) -> Result<SobolevEstimate> {
    if !(r > 2.0 && r.is_finite()) {
        return Err(Error::Config(format!("Sobolev exponent must satisfy 2 < r < inf, got {r}")));
    }
    let g = scalar_mass(mesh).add(1.0, &scalar_stiffness(mesh), 1.0);
    let solver = SparseSolver::cholesky(&g)?;
    let gnorm = |v: &[f64]| g.bilinear(v, v).sqrt();

    let area = mesh.area();
    let constant_ratio = area.powf(1.0 / r) / area.sqrt();

    let domain = mesh.domain();
    let diam = domain.diameter();
    let c1 = mesh.nodes().iter().map(|x| x[0]).sum::<f64>() / mesh.n_nodes() as f64;
    let mut v: Vec<f64> = mesh.nodes().iter().map(|x| 1.0 + 0.5 * (x[0] - c1) / diam).collect();
    let s = gnorm(&v);
    v.iter_mut().for_each(|a| *a /= s);

    let (mut change, mut iterations, mut converged) = (f64::INFINITY, 0, false);
    for it in 1..=options.max_iter {
        iterations = it;
        let mut w = solver.solve(&lr_gradient(mesh, &v, r))?;
        let s = gnorm(&w);
        w.iter_mut().for_each(|a| *a /= s);
        let d: Vec<f64> = w.iter().zip(&v).map(|(a, b)| a - b).collect();
        change = gnorm(&d);
        v = w;
        if change < options.tol {
            converged = true;
            break;
        }
    }
    let ratio = lr_norm(mesh, &v, r) / gnorm(&v);
    Ok(SobolevEstimate {
        r,
        c_r: ratio.max(constant_ratio),
        constant_ratio,
        maximizer: Some(ScalarField::new(mesh.clone(), v)),
        iterations,
        stationarity: change,
        converged,
        rigorous: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_annulus;

    #[test]
    fn bounded_below_by_constant() {
        let m = Arc::new(mesh_annulus(1.0, 2.0, 4, 16).unwrap());
        for r in [4.0, 8.0] {
            let e = sobolev_constant(&m, r, &SobolevOptions::default()).unwrap();
            let exact = (3.0 * std::f64::consts::PI).powf(1.0 / r - 0.5);
            assert!(e.c_r.is_finite() && e.c_r >= exact * (1.0 - 1e-6), "{r}: {} vs {exact}", e.c_r);
            assert!(!e.rigorous);
        }
        assert!(sobolev_constant(&m, 2.0, &SobolevOptions::default()).is_err());
    }
}
