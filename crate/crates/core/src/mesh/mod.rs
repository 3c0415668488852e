//! Conforming triangulations with isoparametric P2 boundary elements.
//!
//! P2 node numbering: vertices first (`0..nv`), then one node per edge
//! (`nv + e`). Boundary vertices and boundary edge nodes are placed exactly on
//! their curve and carry the boundary frame of that point.

mod annulus;
mod delaunay;
mod io;
mod locate;

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::fem::{self, element_points, QuadPoint, Tabulation};
use crate::geometry::{dist, frame_at, norm, BoundaryFrame, BoundarySample, DomainSpec, Point};

pub use annulus::{mesh_annulus, mesh_annulus_at};
pub use delaunay::{mesh_disk_with_holes, mesh_mirror_symmetric};
pub use io::{import_mesh, read_mesh_files, write_mesh_files, MeshFiles};
pub use locate::Locator;

/// Boundary edge of the triangulation, oriented with the domain on its left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryEdge {
    pub edge: usize,
    pub vertices: [usize; 2],
    pub component: usize,
    /// Curve parameters at the two vertices; the second is shifted by an
    /// integer so that `params[1] - params[0]` is the signed parameter span.
    pub params: [f64; 2],
    pub triangle: usize,
    pub local_edge: usize,
}

impl BoundaryEdge {
    /// Curve parameter at fraction `s` along the edge.
    pub fn param_at(&self, s: f64) -> f64 {
        (self.params[0] + s * (self.params[1] - self.params[0])).rem_euclid(1.0)
    }
}

/// P2 node lying on a boundary curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryNode {
    pub component: usize,
    pub t: f64,
    pub frame: BoundaryFrame,
}

/// Triangulation of a [`DomainSpec`].
#[derive(Debug)]
pub struct Mesh {
    domain: DomainSpec,
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    triangle_edges: Vec<[usize; 3]>,
    nodes: Vec<Point>,
    boundary_edges: Vec<BoundaryEdge>,
    boundary_nodes: Vec<Option<BoundaryNode>>,
    curved: Vec<bool>,
    locator: OnceLock<Locator>,
}

impl Clone for Mesh {
    fn clone(&self) -> Self {
        Self {
            domain: self.domain.clone(),
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            edges: self.edges.clone(),
            triangle_edges: self.triangle_edges.clone(),
            nodes: self.nodes.clone(),
            boundary_edges: self.boundary_edges.clone(),
            boundary_nodes: self.boundary_nodes.clone(),
            curved: self.curved.clone(),
            locator: OnceLock::new(),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Origin {
    Generated,
    Imported,
}

impl Origin {
    fn err(self, msg: String) -> Error {
        match self {
            Origin::Generated => Error::Mesh(msg),
            Origin::Imported => Error::Import(msg),
        }
    }
}

impl Mesh {
    /// Build a mesh from raw vertices and triangles. Triangles are reoriented
    /// counterclockwise; boundary edges are matched to the nearest curve.
    pub fn from_parts(domain: DomainSpec, vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        Self::build(domain, vertices, triangles, Origin::Generated)
    }

    pub(crate) fn build(
        domain: DomainSpec,
        mut vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        origin: Origin,
    ) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return Err(origin.err("mesh has no triangles".into()));
        }
        for (k, t) in triangles.iter_mut().enumerate() {
            if t.iter().any(|&v| v >= nv) {
                return Err(origin.err(format!("triangle {k} references a missing vertex")));
            }
            let a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if a == 0.0 {
                return Err(origin.err(format!("triangle {k} is degenerate")));
            }
            if a < 0.0 {
                t.swap(1, 2);
            }
        }

        let mut edge_index: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_tris: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (k, t) in triangles.iter().enumerate() {
            let mut te = [0; 3];
            for l in 0..3 {
                let (a, b) = (t[l], t[(l + 1) % 3]);
                let key = [a.min(b), a.max(b)];
                let e = *edge_index.entry(key).or_insert_with(|| {
                    edges.push(key);
                    edge_tris.push(Vec::new());
                    edges.len() - 1
                });
                edge_tris[e].push((k, l));
                te[l] = e;
            }
            triangle_edges.push(te);
        }
        if let Some(e) = edge_tris.iter().position(|v| v.len() > 2) {
            return Err(origin.err(format!(
                "non-conforming mesh: edge {}-{} is shared by {} triangles",
                edges[e][0],
                edges[e][1],
                edge_tris[e].len()
            )));
        }

        // match boundary edges to curves
        let mut vertex_tag: Vec<Option<(usize, f64)>> = vec![None; nv];
        let mut raw_boundary = Vec::new();
        for (e, tris) in edge_tris.iter().enumerate() {
            if tris.len() != 1 {
                continue;
            }
            let (k, l) = tris[0];
            let (a, b) = (triangles[k][l], triangles[k][(l + 1) % 3]);
            let len = dist(vertices[a], vertices[b]);
            let mid = [(vertices[a][0] + vertices[b][0]) / 2.0, (vertices[a][1] + vertices[b][1]) / 2.0];
            let mut best: Option<(usize, f64)> = None;
            for j in 0..domain.components() {
                let c = domain.curve(j);
                let d = c.project(vertices[a]).1.max(c.project(vertices[b]).1).max(c.project(mid).1);
                if best.is_none_or(|(_, bd)| d < bd) {
                    best = Some((j, d));
                }
            }
            let (j, d) = best.expect("domain has at least one curve");
            if d >= 0.1 * len {
                return Err(origin.err(format!(
                    "boundary edge {e} ({a}-{b}) is {d:.3e} away from every curve (limit {:.3e})",
                    0.1 * len
                )));
            }
            for v in [a, b] {
                let t = domain.curve(j).project(vertices[v]).0;
                match vertex_tag[v] {
                    Some((j0, _)) if j0 != j => {
                        return Err(origin.err(format!("vertex {v} lies on boundary components {j0} and {j}")));
                    }
                    _ => vertex_tag[v] = Some((j, t)),
                }
            }
            raw_boundary.push((e, [a, b], j, k, l));
        }

        // points already on the curve are kept bit-for-bit so that export and
        // re-import reproduce the same coordinates
        let snap_tol = 1e-13 * domain.diameter();
        for (v, tag) in vertex_tag.iter().enumerate() {
            if let Some((j, t)) = tag {
                if domain.curve(*j).project(vertices[v]).1 > snap_tol {
                    vertices[v] = domain.curve(*j).point(*t);
                }
            }
        }

        let ne = edges.len();
        let mut nodes = vertices.clone();
        nodes.extend(edges.iter().map(|[a, b]| {
            [(vertices[*a][0] + vertices[*b][0]) / 2.0, (vertices[*a][1] + vertices[*b][1]) / 2.0]
        }));
        let mut boundary_nodes: Vec<Option<BoundaryNode>> = vec![None; nv + ne];
        let mut boundary_edges = Vec::with_capacity(raw_boundary.len());
        let mut curved = vec![false; triangles.len()];
        for (e, [a, b], j, k, l) in raw_boundary {
            let t0 = vertex_tag[a].expect("tagged").1;
            let mut t1 = vertex_tag[b].expect("tagged").1;
            if t1 - t0 > 0.5 {
                t1 -= 1.0;
            } else if t0 - t1 > 0.5 {
                t1 += 1.0;
            }
            let be = BoundaryEdge { edge: e, vertices: [a, b], component: j, params: [t0, t1], triangle: k, local_edge: l };
            let tm = be.param_at(0.5);
            nodes[nv + e] = domain.curve(j).point(tm);
            curved[k] = true;
            for (node, t) in [(a, t0.rem_euclid(1.0)), (b, t1.rem_euclid(1.0)), (nv + e, tm)] {
                if boundary_nodes[node].is_none() {
                    let frame = frame_at(&domain, j, t).map_err(|err| origin.err(err.to_string()))?;
                    boundary_nodes[node] = Some(BoundaryNode { component: j, t, frame });
                }
            }
            boundary_edges.push(be);
        }

        let mesh = Self {
            domain,
            vertices,
            triangles,
            edges,
            triangle_edges,
            nodes,
            boundary_edges,
            boundary_nodes,
            curved,
            locator: OnceLock::new(),
        };
        mesh.check_loops(origin)?;
        mesh.check_jacobians(origin)?;
        Ok(mesh)
    }

    fn check_loops(&self, origin: Origin) -> Result<()> {
        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut in_count: HashMap<usize, usize> = HashMap::new();
        for (i, be) in self.boundary_edges.iter().enumerate() {
            if next.insert(be.vertices[0], i).is_some() {
                return Err(origin.err(format!("boundary vertex {} starts two boundary edges", be.vertices[0])));
            }
            *in_count.entry(be.vertices[1]).or_default() += 1;
        }
        if in_count.values().any(|&c| c != 1) || in_count.len() != next.len() {
            return Err(origin.err("boundary edges do not form closed loops".into()));
        }
        let mut seen = vec![false; self.boundary_edges.len()];
        let mut loops = vec![0usize; self.domain.components()];
        for start in 0..self.boundary_edges.len() {
            if seen[start] {
                continue;
            }
            let comp = self.boundary_edges[start].component;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                if self.boundary_edges[i].component != comp {
                    return Err(origin.err(format!("boundary loop mixes components {comp} and {}", self.boundary_edges[i].component)));
                }
                i = next[&self.boundary_edges[i].vertices[1]];
            }
            loops[comp] += 1;
        }
        if let Some(j) = loops.iter().position(|&c| c != 1) {
            return Err(origin.err(format!("boundary component {j} has {} loops, expected 1", loops[j])));
        }
        Ok(())
    }

    fn check_jacobians(&self, origin: Origin) -> Result<()> {
        let probes = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.0], [0.5, 0.5], [0.0, 0.5], [1.0 / 3.0, 1.0 / 3.0]];
        for k in 0..self.triangles.len() {
            let c = self.triangle_coords(k);
            for xi in probes {
                if fem::jacobian_det(&c, xi) <= 0.0 {
                    return Err(origin.err(format!("triangle {k} is inverted after boundary snapping")));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self) -> &[[usize; 3]] {
        &self.triangle_edges
    }

    /// All P2 node coordinates.
    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn boundary_node(&self, node: usize) -> Option<&BoundaryNode> {
        self.boundary_nodes[node].as_ref()
    }

    pub fn boundary_nodes(&self) -> &[Option<BoundaryNode>] {
        &self.boundary_nodes
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_curved(&self, k: usize) -> bool {
        self.curved[k]
    }

    /// Global P2 node indices of triangle `k`.
    #[inline]
    pub fn triangle_nodes(&self, k: usize) -> [usize; 6] {
        let t = self.triangles[k];
        let e = self.triangle_edges[k];
        let nv = self.vertices.len();
        [t[0], t[1], t[2], nv + e[0], nv + e[1], nv + e[2]]
    }

    #[inline]
    pub fn triangle_coords(&self, k: usize) -> [Point; 6] {
        self.triangle_nodes(k).map(|i| self.nodes[i])
    }

    /// Quadrature points of triangle `k` for the given tabulation.
    pub fn quad_points(&self, k: usize, tab: &Tabulation, out: &mut Vec<QuadPoint>) {
        element_points(&self.triangle_coords(k), tab, out);
    }

    /// Longest edge length.
    pub fn h_max(&self) -> f64 {
        self.edges.iter().map(|[a, b]| dist(self.vertices[*a], self.vertices[*b])).fold(0.0, f64::max)
    }

    /// Area of the isoparametric triangulation.
    pub fn area(&self) -> f64 {
        let tab = fem::accurate_tabulation();
        let mut pts = Vec::new();
        (0..self.n_triangles())
            .map(|k| {
                self.quad_points(k, tab, &mut pts);
                pts.iter().map(|q| q.jxw).sum::<f64>()
            })
            .sum()
    }

    /// Area of the straight-sided triangulation.
    pub fn polygonal_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| signed_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]))
            .sum()
    }

    /// Quadrature data on a boundary edge: for each Gauss point the fraction
    /// `s`, the reference point in the owning triangle, the arclength weight
    /// and the exact boundary sample at the corresponding curve parameter.
    pub fn edge_quadrature(&self, be: &BoundaryEdge) -> Vec<EdgePoint> {
        let coords = self.triangle_coords(be.triangle);
        let (xs, ws) = fem::edge_rule();
        xs.iter()
            .zip(ws)
            .map(|(&s, &w)| {
                let (xi, dxi) = fem::edge_point(be.local_edge, s);
                let j = fem::jacobian(&coords, &fem::p2_ref_grads(xi));
                let dx = [j[0][0] * dxi[0] + j[0][1] * dxi[1], j[1][0] * dxi[0] + j[1][1] * dxi[1]];
                let t = be.param_at(s);
                let frame = frame_at(&self.domain, be.component, t).expect("boundary curve is regular");
                EdgePoint {
                    s,
                    xi,
                    weight: w * norm(dx),
                    x: fem::map_point(&coords, &fem::p2_values(xi)),
                    sample: BoundarySample { component: be.component, t, frame },
                }
            })
            .collect()
    }

    /// Point locator over the curved triangulation (built lazily).
    pub fn locator(&self) -> &Locator {
        self.locator.get_or_init(|| Locator::new(self))
    }

    /// Check every structural invariant; returns a description of the first
    /// violation.
    pub fn check_invariants(&self) -> Result<()> {
        for (k, t) in self.triangles.iter().enumerate() {
            if signed_area(self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]) <= 0.0 {
                return Err(Error::Mesh(format!("triangle {k} has non-positive area")));
            }
        }
        let tol = 1e-10 * self.domain.diameter();
        for (i, bn) in self.boundary_nodes.iter().enumerate() {
            if let Some(bn) = bn {
                let d = self.domain.curve(bn.component).project(self.nodes[i]).1;
                if d > tol {
                    return Err(Error::Mesh(format!("boundary node {i} is {d:.3e} off its curve")));
                }
            }
        }
        let mut count = vec![0usize; self.edges.len()];
        for te in &self.triangle_edges {
            for &e in te {
                count[e] += 1;
            }
        }
        let boundary: std::collections::HashSet<usize> = self.boundary_edges.iter().map(|b| b.edge).collect();
        for (e, c) in count.iter().enumerate() {
            let expect = if boundary.contains(&e) { 1 } else { 2 };
            if *c != expect {
                return Err(Error::Mesh(format!("edge {e} is shared by {c} triangles")));
            }
        }
        self.check_loops(Origin::Generated)?;
        self.check_jacobians(Origin::Generated)
    }
}

/// Per-Gauss-point data on a boundary edge.
#[derive(Clone, Copy, Debug)]
pub struct EdgePoint {
    pub s: f64,
    pub xi: [f64; 2],
    pub weight: f64,
    pub x: Point,
    pub sample: BoundarySample,
}

#[inline]
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}
