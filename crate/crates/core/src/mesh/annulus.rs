use std::f64::consts::PI;

use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};

/// Structured polar triangulation of `r_in < |x| < r_out`.
///
/// Component 0 is the outer circle, component 1 the inner one. Diagonals flip
/// at the half turn so that the mesh is mirror symmetric about the x1-axis
/// when `n_angular` is even.
pub fn mesh_annulus(r_in: f64, r_out: f64, n_radial: usize, n_angular: usize) -> Result<Mesh> {
    mesh_annulus_at([0.0, 0.0], r_in, r_out, n_radial, n_angular)
}

pub fn mesh_annulus_at(center: Point, r_in: f64, r_out: f64, n_radial: usize, n_angular: usize) -> Result<Mesh> {
    if !(r_in > 0.0 && r_in < r_out && r_out.is_finite()) {
        return Err(Error::Config(format!("annulus radii must satisfy 0 < r_in < r_out, got ({r_in}, {r_out})")));
    }
    if n_radial < 2 || n_angular < 8 {
        return Err(Error::Config(format!(
            "annulus mesh needs n_radial >= 2 and n_angular >= 8, got ({n_radial}, {n_angular})"
        )));
    }
    let domain = DomainSpec::annulus_at(center, r_in, r_out)?;
    let n = n_angular;
    let mut vertices = Vec::with_capacity((n_radial + 1) * n);
    for i in 0..=n_radial {
        let r = if i == n_radial { r_out } else { r_in + (r_out - r_in) * i as f64 / n_radial as f64 };
        for j in 0..n {
            let (s, c) = (2.0 * PI * j as f64 / n as f64).sin_cos();
            vertices.push([center[0] + r * c, center[1] + r * s]);
        }
    }
    let id = |i: usize, j: usize| i * n + (j % n);
    let mut triangles = Vec::with_capacity(2 * n_radial * n);
    for i in 0..n_radial {
        for j in 0..n {
            let (a, b, c, d) = (id(i, j), id(i, j + 1), id(i + 1, j + 1), id(i + 1, j));
            if 2 * j < n {
                triangles.push([a, d, c]);
                triangles.push([a, c, b]);
            } else {
                triangles.push([a, d, b]);
                triangles.push([d, c, b]);
            }
        }
    }
    Mesh::from_parts(domain, vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_loops() {
        let m = mesh_annulus(1.0, 2.0, 4, 16).unwrap();
        assert_eq!(m.n_vertices(), 5 * 16);
        assert_eq!(m.n_triangles(), 2 * 4 * 16);
        let outer = m.boundary_edges().iter().filter(|b| b.component == 0).count();
        let inner = m.boundary_edges().iter().filter(|b| b.component == 1).count();
        assert_eq!((outer, inner), (16, 16));
        m.check_invariants().unwrap();
    }

    #[test]
    fn rejects_bad_input() {
        assert!(mesh_annulus(2.0, 1.0, 4, 16).is_err());
        assert!(mesh_annulus(1.0, 2.0, 1, 16).is_err());
        assert!(mesh_annulus(1.0, 2.0, 4, 4).is_err());
    }

    #[test]
    fn area_converges_monotonically() {
        let exact = 3.0 * PI;
        let mut prev = f64::MAX;
        let mut prev_h = f64::MAX;
        for n in [8, 16, 32] {
            let m = mesh_annulus(1.0, 2.0, n, 2 * n).unwrap();
            let err = (m.polygonal_area() - exact).abs();
            assert!(err < prev);
            let h = m.h_max();
            if prev_h < f64::MAX {
                let ratio = prev_h / h;
                assert!((ratio - 2.0).abs() < 0.1, "h ratio {ratio}");
            }
            prev = err;
            prev_h = h;
            assert!((m.area() - exact).abs() < 1e-4 * exact);
        }
    }

    #[test]
    fn boundary_normals_point_outward() {
        let m = mesh_annulus(1.0, 2.0, 3, 12).unwrap();
        for be in m.boundary_edges() {
            let t = m.triangles()[be.triangle];
            let c = [
                (m.vertices()[t[0]][0] + m.vertices()[t[1]][0] + m.vertices()[t[2]][0]) / 3.0,
                (m.vertices()[t[0]][1] + m.vertices()[t[1]][1] + m.vertices()[t[2]][1]) / 3.0,
            ];
            for v in be.vertices {
                let f = m.boundary_node(v).unwrap().frame;
                let x = m.nodes()[v];
                assert!((x[0] - c[0]) * f.normal[0] + (x[1] - c[1]) * f.normal[1] > 0.0);
            }
        }
    }
}
