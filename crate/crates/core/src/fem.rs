//! Reference P2/P1 shape functions, tabulations on quadrature rules and the
//! isoparametric element map.
//!
//! Local node order: vertices 0, 1, 2, then the nodes of edges (0,1), (1,2),
//! (2,0).

use std::sync::OnceLock;

use crate::geometry::Point;
use crate::quadrature::{gauss_legendre, TriangleRule};

pub type Grad = [f64; 2];

#[inline]
pub fn p2_values(xi: [f64; 2]) -> [f64; 6] {
    let (l1, l2) = (xi[0], xi[1]);
    let l0 = 1.0 - l1 - l2;
    [
        l0 * (2.0 * l0 - 1.0),
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        4.0 * l0 * l1,
        4.0 * l1 * l2,
        4.0 * l2 * l0,
    ]
}

#[inline]
pub fn p2_ref_grads(xi: [f64; 2]) -> [Grad; 6] {
    let (l1, l2) = (xi[0], xi[1]);
    let l0 = 1.0 - l1 - l2;
    let d0 = 1.0 - 4.0 * l0;
    [
        [d0, d0],
        [4.0 * l1 - 1.0, 0.0],
        [0.0, 4.0 * l2 - 1.0],
        [4.0 * (l0 - l1), -4.0 * l1],
        [4.0 * l2, 4.0 * l1],
        [-4.0 * l2, 4.0 * (l0 - l2)],
    ]
}

#[inline]
pub fn p1_values(xi: [f64; 2]) -> [f64; 3] {
    [1.0 - xi[0] - xi[1], xi[0], xi[1]]
}

pub const P1_REF_GRADS: [Grad; 3] = [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]];

/// Reference coordinates of a point on local edge `k` at fraction `s`.
#[inline]
pub fn edge_point(k: usize, s: f64) -> ([f64; 2], [f64; 2]) {
    match k {
        0 => ([s, 0.0], [1.0, 0.0]),
        1 => ([1.0 - s, s], [-1.0, 1.0]),
        _ => ([0.0, 1.0 - s], [0.0, -1.0]),
    }
}

/// Local node indices (start vertex, edge node, end vertex) of local edge `k`.
#[inline]
pub fn edge_local_nodes(k: usize) -> [usize; 3] {
    [k, 3 + k, (k + 1) % 3]
}

/// Shape functions tabulated on a triangle rule.
pub struct Tabulation {
    pub rule: TriangleRule,
    pub p2: Vec<[f64; 6]>,
    pub dp2: Vec<[Grad; 6]>,
    pub p1: Vec<[f64; 3]>,
}

impl Tabulation {
    pub fn new(rule: TriangleRule) -> Self {
        let p2 = rule.points.iter().map(|&x| p2_values(x)).collect();
        let dp2 = rule.points.iter().map(|&x| p2_ref_grads(x)).collect();
        let p1 = rule.points.iter().map(|&x| p1_values(x)).collect();
        Self { rule, p2, dp2, p1 }
    }
}

/// Degree-5 tabulation used for assembly.
pub fn assembly_tabulation() -> &'static Tabulation {
    static T: OnceLock<Tabulation> = OnceLock::new();
    T.get_or_init(|| Tabulation::new(TriangleRule::degree5()))
}

/// Degree-8 tabulation used for error norms and diagnostics.
pub fn accurate_tabulation() -> &'static Tabulation {
    static T: OnceLock<Tabulation> = OnceLock::new();
    T.get_or_init(|| Tabulation::new(TriangleRule::collapsed(5)))
}

/// Gauss points on `[0, 1]` for boundary edges.
pub fn edge_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static R: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    R.get_or_init(|| gauss_legendre(5))
}

/// Physical data at one quadrature point.
#[derive(Clone, Copy, Debug)]
pub struct QuadPoint {
    pub x: Point,
    pub jxw: f64,
    pub phi: [f64; 6],
    pub grad: [Grad; 6],
    pub psi: [f64; 3],
    pub grad_psi: [Grad; 3],
}

/// Jacobian `dx/dxi` of the isoparametric map.
#[inline]
pub fn jacobian(coords: &[Point; 6], dref: &[Grad; 6]) -> [[f64; 2]; 2] {
    let mut j = [[0.0; 2]; 2];
    for i in 0..6 {
        for a in 0..2 {
            for b in 0..2 {
                j[a][b] += coords[i][a] * dref[i][b];
            }
        }
    }
    j
}

#[inline]
pub fn map_point(coords: &[Point; 6], phi: &[f64; 6]) -> Point {
    let mut x = [0.0; 2];
    for i in 0..6 {
        x[0] += phi[i] * coords[i][0];
        x[1] += phi[i] * coords[i][1];
    }
    x
}

#[inline]
fn inv_t(j: &[[f64; 2]; 2]) -> ([[f64; 2]; 2], f64) {
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    // (J^{-1})^T
    (
        [[j[1][1] / det, -j[1][0] / det], [-j[0][1] / det, j[0][0] / det]],
        det,
    )
}

#[inline]
fn push(g: Grad, jt: &[[f64; 2]; 2]) -> Grad {
    [jt[0][0] * g[0] + jt[0][1] * g[1], jt[1][0] * g[0] + jt[1][1] * g[1]]
}

/// Evaluate the element at every point of a tabulation.
pub fn element_points(coords: &[Point; 6], tab: &Tabulation, out: &mut Vec<QuadPoint>) {
    out.clear();
    for q in 0..tab.rule.len() {
        let j = jacobian(coords, &tab.dp2[q]);
        let (jt, det) = inv_t(&j);
        let mut grad = [[0.0; 2]; 6];
        for i in 0..6 {
            grad[i] = push(tab.dp2[q][i], &jt);
        }
        let mut grad_psi = [[0.0; 2]; 3];
        for i in 0..3 {
            grad_psi[i] = push(P1_REF_GRADS[i], &jt);
        }
        out.push(QuadPoint {
            x: map_point(coords, &tab.p2[q]),
            jxw: det * tab.rule.weights[q],
            phi: tab.p2[q],
            grad,
            psi: tab.p1[q],
            grad_psi,
        });
    }
}

/// Evaluate the element at a single reference point.
pub fn element_point(coords: &[Point; 6], xi: [f64; 2]) -> QuadPoint {
    let phi = p2_values(xi);
    let dref = p2_ref_grads(xi);
    let j = jacobian(coords, &dref);
    let (jt, det) = inv_t(&j);
    let mut grad = [[0.0; 2]; 6];
    for i in 0..6 {
        grad[i] = push(dref[i], &jt);
    }
    let mut grad_psi = [[0.0; 2]; 3];
    for i in 0..3 {
        grad_psi[i] = push(P1_REF_GRADS[i], &jt);
    }
    QuadPoint { x: map_point(coords, &phi), jxw: det, phi, grad, psi: p1_values(xi), grad_psi }
}

/// Determinant of the Jacobian at a reference point.
pub fn jacobian_det(coords: &[Point; 6], xi: [f64; 2]) -> f64 {
    let j = jacobian(coords, &p2_ref_grads(xi));
    j[0][0] * j[1][1] - j[0][1] * j[1][0]
}

/// Invert the element map by Newton iteration starting at the centroid.
pub fn invert_map(coords: &[Point; 6], x: Point) -> Option<[f64; 2]> {
    let mut xi = [1.0 / 3.0, 1.0 / 3.0];
    for _ in 0..30 {
        let phi = p2_values(xi);
        let p = map_point(coords, &phi);
        let r = [x[0] - p[0], x[1] - p[1]];
        let j = jacobian(coords, &p2_ref_grads(xi));
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            return None;
        }
        let d = [(j[1][1] * r[0] - j[0][1] * r[1]) / det, (-j[1][0] * r[0] + j[0][0] * r[1]) / det];
        xi[0] += d[0];
        xi[1] += d[1];
        if d[0].abs() + d[1].abs() < 1e-15 {
            break;
        }
        if !(xi[0].is_finite() && xi[1].is_finite()) || xi[0].abs() > 10.0 || xi[1].abs() > 10.0 {
            return None;
        }
    }
    Some(xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_is_nodal_and_complete() {
        let nodes = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5]];
        for (i, x) in nodes.iter().enumerate() {
            let v = p2_values(*x);
            for (j, vj) in v.iter().enumerate() {
                assert!((vj - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
        let xi = [0.21, 0.33];
        let g = p2_ref_grads(xi);
        let sx: f64 = g.iter().map(|g| g[0]).sum();
        let sy: f64 = g.iter().map(|g| g[1]).sum();
        assert!(sx.abs() < 1e-14 && sy.abs() < 1e-14);
        let h = 1e-6;
        for k in 0..2 {
            let mut a = xi;
            let mut b = xi;
            a[k] += h;
            b[k] -= h;
            let (va, vb) = (p2_values(a), p2_values(b));
            for i in 0..6 {
                assert!(((va[i] - vb[i]) / (2.0 * h) - g[i][k]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn affine_element_area_and_inverse() {
        let v = [[0.0, 0.0], [2.0, 0.0], [0.0, 1.0]];
        let coords = [v[0], v[1], v[2], [1.0, 0.0], [1.0, 0.5], [0.0, 0.5]];
        let mut pts = Vec::new();
        element_points(&coords, assembly_tabulation(), &mut pts);
        let area: f64 = pts.iter().map(|q| q.jxw).sum();
        assert!((area - 1.0).abs() < 1e-14);
        let xi = invert_map(&coords, [0.5, 0.25]).unwrap();
        assert!((xi[0] - 0.25).abs() < 1e-14 && (xi[1] - 0.25).abs() < 1e-14);
    }
}
