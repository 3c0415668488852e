use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::{rigid_mode, SparseSolver};
use crate::assembly::{
    assemble_friction, assemble_gradient_stiffness, assemble_mass, assemble_viscous, BoundaryField, DofMap, ProblemData,
};
use crate::error::{Error, Result};
use crate::geometry::classify_symmetry;
use crate::mesh::Mesh;
use crate::sparse::{dot, norm2, CsrMatrix};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KornOptions {
    /// Remove the rigid rotation by L2 orthogonality (needs a circularly symmetric domain).
    pub rotation_constraint: bool,
    pub block: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Spectral shift `sigma` of the inverse iteration (must be below the smallest eigenvalue).
    pub shift: f64,
}

impl Default for KornOptions {
    fn default() -> Self {
        Self { rotation_constraint: false, block: 8, tol: 1e-9, max_iter: 400, shift: -1e-2 }
    }
}

/// Smallest eigenvalue of the Korn pencil and the resulting constant.
/// `k = 1 / lambda_min` is a lower bound for the continuum constant.
#[derive(Clone, Debug, Serialize)]
pub struct KornEstimate {
    pub lambda_min: f64,
    pub k: f64,
    /// Minimizing velocity field in dof form.
    #[serde(skip)]
    pub mode: Vec<f64>,
    /// Cosine between the minimizer and the rigid rotation in the W^{1,2} inner
    /// product, when the domain is circularly symmetric.
    pub rotation_cosine: Option<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub lower_bound: bool,
}

fn submatrix(a: &CsrMatrix, index: &[Option<usize>], n: usize) -> CsrMatrix {
    let e: Vec<_> = a.iter().filter_map(|(i, j, v)| Some((index[i]?, index[j]?, v))).collect();
    CsrMatrix::from_entries(n, n, &e)
}

fn start_vector(n: usize, j: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let s = ((i as f64 + 1.0) * 12.9898 + (j as f64 + 1.0) * 78.233).sin() * 43758.5453;
            s - s.floor() - 0.5
        })
        .collect()
}

/// Orthonormalize the columns of `x` in the inner product of `g` (modified
/// Gram-Schmidt, two passes). Columns that collapse are dropped.
fn g_orthonormalize(g: &CsrMatrix, x: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(x.len());
    let mut gout: Vec<Vec<f64>> = Vec::with_capacity(x.len());
    for mut v in x {
        let n0 = g.bilinear(&v, &v).sqrt();
        for _ in 0..2 {
            for (q, gq) in out.iter().zip(&gout) {
                let c = dot(&v, gq);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let gv = g.mul_vec(&v);
        let nv = dot(&v, &gv).sqrt();
        if nv > 1e-10 * n0 {
            v.iter_mut().for_each(|a| *a /= nv);
            out.push(v);
            gout.push(gv.into_iter().map(|a| a / nv).collect());
        }
    }
    out
}

/// Smallest eigenvalue `lambda` of
/// `(int S:S + int weight |v_tau|^2) x = lambda (|v|^2_{L2} + |grad v|^2_{L2}) x`
/// over velocities with zero normal trace, via shift-invert subspace iteration
/// with Rayleigh-Ritz.
pub fn korn_constant(mesh: &Mesh, dofmap: &DofMap, weight: &BoundaryField, options: &KornOptions) -> Result<KornEstimate> {
    let domain = mesh.domain();
    let friction = assemble_friction(mesh, dofmap, &ProblemData::new(1.0, domain.components()).with_beta(weight.clone()))?;
    // assemble_viscous(nu) is (nu/2) int S:S
    let energy = assemble_viscous(mesh, dofmap, 2.0).add(1.0, &friction, 1.0);
    let mass = assemble_mass(mesh, dofmap);
    let gram = mass.add(1.0, &assemble_gradient_stiffness(mesh, dofmap), 1.0);

    let nv = dofmap.n_velocity();
    let mut index = vec![None; nv];
    let mut free = Vec::new();
    for (d, slot) in index.iter_mut().enumerate() {
        if !dofmap.is_normal_dof(d) {
            *slot = Some(free.len());
            free.push(d);
        }
    }
    let n = free.len();
    let kr = submatrix(&energy, &index, n);
    let gr = submatrix(&gram, &index, n);
    let restrict = |v: &[f64]| -> Vec<f64> { free.iter().map(|&d| v[d]).collect() };

    let center = classify_symmetry(domain).circularly_symmetric;
    let rotation = center.map(|c| restrict(&rigid_mode(mesh, dofmap, c).dofs));
    let constraint = if options.rotation_constraint {
        let u0 = rotation
            .as_ref()
            .ok_or_else(|| Error::Data("rotation constraint requested on a domain without circular symmetry".into()))?;
        let mr = submatrix(&mass, &index, n);
        Some(mr.mul_vec(u0))
    } else {
        None
    };

    let sigma = options.shift;
    let shifted = kr.add(1.0, &gr, -sigma);
    let solver = SparseSolver::cholesky(&shifted)?;
    // with the constraint c.y = 0 the bordered solve is a rank-one correction
    // y = A^-1 g - (c.A^-1 g / c.A^-1 c) A^-1 c
    let correction = match &constraint {
        Some(c) => {
            let w = solver.solve(c)?;
            let cw = dot(c, &w);
            Some((c, w, cw))
        }
        None => None,
    };
    let apply_inverse = |x: &[f64]| -> Result<Vec<f64>> {
        let mut y = solver.solve(&gr.mul_vec(x))?;
        if let Some((c, w, cw)) = &correction {
            let t = dot(c, &y) / cw;
            y.iter_mut().zip(w).for_each(|(a, b)| *a -= t * b);
        }
        Ok(y)
    };

    let p = options.block.max(2).min(n);
    let mut x: Vec<Vec<f64>> = (0..p).map(|j| start_vector(n, j)).collect();
    if constraint.is_some() {
        // project the start block onto the constrained space
        x = x.iter().map(|v| apply_inverse(v)).collect::<Result<_>>()?;
    }
    let mut best = (f64::INFINITY, Vec::new(), f64::INFINITY);
    for it in 1..=options.max_iter {
        let y: Vec<Vec<f64>> = x.iter().map(|v| apply_inverse(v)).collect::<Result<_>>()?;
        let q = g_orthonormalize(&gr, y);
        let kq: Vec<Vec<f64>> = q.iter().map(|v| kr.mul_vec(v)).collect();
        let m = q.len();
        let h = Mat::<f64>::from_fn(m, m, |i, j| 0.5 * (dot(&q[i], &kq[j]) + dot(&q[j], &kq[i])));
        let eig = h
            .self_adjoint_eigen(Side::Lower)
            .map_err(|e| Error::Solver(format!("Rayleigh-Ritz eigensolve failed: {e:?}")))?;
        let (vals, vecs) = (eig.S().column_vector(), eig.U());
        x = (0..m)
            .map(|j| {
                let mut v = vec![0.0; n];
                for (i, qi) in q.iter().enumerate() {
                    let c = vecs[(i, j)];
                    v.iter_mut().zip(qi).for_each(|(a, b)| *a += c * b);
                }
                v
            })
            .collect();
        let theta = vals[0];
        let (kx, gx) = (kr.mul_vec(&x[0]), gr.mul_vec(&x[0]));
        let mut r: Vec<f64> = kx.iter().zip(&gx).map(|(a, b)| a - theta * b).collect();
        if let Some(c) = &constraint {
            // the multiplier absorbs the component along the constraint
            let t = dot(&r, c) / dot(c, c);
            r.iter_mut().zip(c).for_each(|(a, b)| *a -= t * b);
        }
        let res = norm2(&r) / (norm2(&gx) * (theta.abs() + sigma.abs())).max(f64::MIN_POSITIVE);
        best = (theta, x[0].clone(), res);
        if res < options.tol {
            let mut mode = vec![0.0; nv];
            for (pos, &d) in free.iter().enumerate() {
                mode[d] = best.1[pos];
            }
            let rotation_cosine = rotation.as_ref().map(|u0| {
                let g0 = gr.mul_vec(u0);
                dot(&best.1, &g0).abs() / (gr.bilinear(&best.1, &best.1) * dot(u0, &g0)).sqrt()
            });
            let lambda_min = theta.max(0.0);
            return Ok(KornEstimate {
                lambda_min,
                k: if lambda_min > 0.0 { 1.0 / lambda_min } else { f64::INFINITY },
                mode,
                rotation_cosine,
                iterations: it,
                residual: res,
                lower_bound: true,
            });
        }
    }
    Err(Error::Solver(format!(
        "Korn eigeniteration did not converge in {} iterations (lambda {:.6e}, residual {:.3e})",
        options.max_iter, best.0, best.2
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_annulus;

    #[test]
    fn rotation_is_the_kernel() {
        let m = mesh_annulus(1.0, 2.0, 4, 16).unwrap();
        let d = DofMap::new(&m);
        let e = korn_constant(&m, &d, &BoundaryField::zero(2), &KornOptions::default()).unwrap();
        assert!(e.lambda_min < 1e-10, "{}", e.lambda_min);
        assert!(e.rotation_cosine.unwrap() > 0.999);
    }

    #[test]
    fn constraint_and_friction_bound_away_from_zero() {
        let m = mesh_annulus(1.0, 2.0, 4, 16).unwrap();
        let d = DofMap::new(&m);
        let opts = KornOptions { rotation_constraint: true, ..Default::default() };
        let c = korn_constant(&m, &d, &BoundaryField::zero(2), &opts).unwrap();
        assert!(c.lambda_min > 1e-3);
        let f1 = korn_constant(&m, &d, &BoundaryField::constants(&[1.0, 1.0]), &KornOptions::default()).unwrap();
        let f4 = korn_constant(&m, &d, &BoundaryField::constants(&[4.0, 4.0]), &KornOptions::default()).unwrap();
        assert!(f1.lambda_min > 1e-3);
        assert!(f4.lambda_min >= f1.lambda_min * (1.0 - 1e-9));
    }
}
