use crate::geometry::Point;
use crate::mesh::Mesh;

/// Velocity and pressure numbering with boundary frame rotation.
#[derive(Clone, Debug)]
pub struct DofMap {
    n_nodes: usize,
    n_vertices: usize,
    /// Columns `n` and `tau` of the rotation at boundary nodes.
    frames: Vec<Option<[Point; 2]>>,
    component: Vec<Option<usize>>,
}

impl DofMap {
    pub fn new(mesh: &Mesh) -> Self {
        let frames = mesh.boundary_nodes().iter().map(|b| b.map(|b| [b.frame.normal, b.frame.tangent])).collect();
        let component = mesh.boundary_nodes().iter().map(|b| b.map(|b| b.component)).collect();
        Self { n_nodes: mesh.n_nodes(), n_vertices: mesh.n_vertices(), frames, component }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_velocity(&self) -> usize {
        2 * self.n_nodes
    }

    pub fn n_pressure(&self) -> usize {
        self.n_vertices
    }

    pub fn frame(&self, node: usize) -> Option<[Point; 2]> {
        self.frames[node]
    }

    pub fn component(&self, node: usize) -> Option<usize> {
        self.component[node]
    }

    /// Normal dofs of all boundary nodes, ascending.
    pub fn normal_dofs(&self) -> Vec<usize> {
        (0..self.n_nodes).filter(|&i| self.frames[i].is_some()).map(|i| 2 * i).collect()
    }

    pub fn is_normal_dof(&self, dof: usize) -> bool {
        dof % 2 == 0 && self.frames[dof / 2].is_some()
    }

    /// Cartesian direction represented by a velocity dof.
    pub fn direction(&self, dof: usize) -> Point {
        let (node, c) = (dof / 2, dof % 2);
        match self.frames[node] {
            Some(f) => f[c],
            None => {
                if c == 0 {
                    [1.0, 0.0]
                } else {
                    [0.0, 1.0]
                }
            }
        }
    }

    /// Nodal Cartesian values to dof coefficients.
    pub fn to_dofs(&self, cartesian: &[Point]) -> Vec<f64> {
        assert_eq!(cartesian.len(), self.n_nodes);
        let mut out = vec![0.0; 2 * self.n_nodes];
        for (i, u) in cartesian.iter().enumerate() {
            match self.frames[i] {
                Some([n, t]) => {
                    out[2 * i] = u[0] * n[0] + u[1] * n[1];
                    out[2 * i + 1] = u[0] * t[0] + u[1] * t[1];
                }
                None => {
                    out[2 * i] = u[0];
                    out[2 * i + 1] = u[1];
                }
            }
        }
        out
    }

    /// Dof coefficients to nodal Cartesian values.
    pub fn to_cartesian(&self, dofs: &[f64]) -> Vec<Point> {
        assert_eq!(dofs.len(), 2 * self.n_nodes);
        (0..self.n_nodes)
            .map(|i| {
                let (a, b) = (dofs[2 * i], dofs[2 * i + 1]);
                match self.frames[i] {
                    Some([n, t]) => [a * n[0] + b * t[0], a * n[1] + b * t[1]],
                    None => [a, b],
                }
            })
            .collect()
    }

    /// Interpolate a Cartesian field at the P2 nodes.
    pub fn interpolate(&self, mesh: &Mesh, f: impl Fn(Point) -> Point) -> Vec<f64> {
        let values: Vec<Point> = mesh.nodes().iter().map(|&x| f(x)).collect();
        self.to_dofs(&values)
    }

    pub fn local_rotation(&self, nodes: &[usize; 6]) -> LocalRotation {
        LocalRotation(nodes.map(|i| self.frames[i]))
    }
}

/// Per-element rotation `Q = blockdiag(R_i)` with `R_i = [n | tau]` at
/// boundary nodes and identity elsewhere.
#[derive(Clone, Copy, Debug)]
pub struct LocalRotation(pub [Option<[Point; 2]>; 6]);

impl LocalRotation {
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Option::is_none)
    }

    /// `M <- M Q` for a matrix with 12 columns.
    pub fn rotate_cols<const R: usize>(&self, m: &mut [[f64; 12]; R]) {
        for (i, f) in self.0.iter().enumerate() {
            if let Some([n, t]) = f {
                for row in m.iter_mut() {
                    let (a, b) = (row[2 * i], row[2 * i + 1]);
                    row[2 * i] = a * n[0] + b * n[1];
                    row[2 * i + 1] = a * t[0] + b * t[1];
                }
            }
        }
    }

    /// `M <- Q^T M` for a 12 x 12 matrix.
    pub fn rotate_rows(&self, m: &mut [[f64; 12]; 12]) {
        for (i, f) in self.0.iter().enumerate() {
            if let Some([n, t]) = f {
                for col in 0..12 {
                    let (a, b) = (m[2 * i][col], m[2 * i + 1][col]);
                    m[2 * i][col] = a * n[0] + b * n[1];
                    m[2 * i + 1][col] = a * t[0] + b * t[1];
                }
            }
        }
    }

    /// `v <- Q^T v`.
    pub fn rotate_vec(&self, v: &mut [f64; 12]) {
        for (i, f) in self.0.iter().enumerate() {
            if let Some([n, t]) = f {
                let (a, b) = (v[2 * i], v[2 * i + 1]);
                v[2 * i] = a * n[0] + b * n[1];
                v[2 * i + 1] = a * t[0] + b * t[1];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_annulus;

    #[test]
    fn rotation_round_trip() {
        let m = mesh_annulus(1.0, 2.0, 3, 12).unwrap();
        let d = DofMap::new(&m);
        let u: Vec<Point> = m.nodes().iter().map(|x| [x[0].sin() + 0.3, x[1] * x[0] - 1.0]).collect();
        let back = d.to_cartesian(&d.to_dofs(&u));
        for (a, b) in u.iter().zip(&back) {
            assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
        }
        let normals = d.normal_dofs();
        assert_eq!(normals.len(), 2 * 12 + 2 * 12);
        assert!(normals.iter().all(|&k| d.is_normal_dof(k) && !d.is_normal_dof(k + 1)));
    }
}
