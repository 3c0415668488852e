//! ASCII `.node` / `.ele` / `.bnd` mesh files.
//!
//! Indices are zero based. Lines starting with `#` are comments.
//!
//! ```text
//! .node   <nv> 2 0 1            then  <i> <x> <y> <marker>   (marker = component + 1, 0 inside)
//! .ele    <nt> 3 0              then  <i> <a> <b> <c>
//! .bnd    <nb> 1                then  <i> <a> <b> <component>
//! ```
//! Coordinates are written with the shortest representation that reads back
//! to the same `f64`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Mesh, Origin};
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, Point};

/// In-memory contents of the three mesh files.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MeshFiles {
    pub node: String,
    pub ele: String,
    pub bnd: String,
}

impl MeshFiles {
    pub fn from_mesh(mesh: &Mesh, header: Option<&str>) -> Self {
        let comment = |out: &mut String| {
            if let Some(h) = header {
                for line in h.lines() {
                    let _ = writeln!(out, "# {line}");
                }
            }
        };
        let mut marker = vec![0usize; mesh.n_vertices()];
        for be in mesh.boundary_edges() {
            for v in be.vertices {
                marker[v] = be.component + 1;
            }
        }
        let mut node = String::new();
        comment(&mut node);
        let _ = writeln!(node, "{} 2 0 1", mesh.n_vertices());
        for (i, p) in mesh.vertices().iter().enumerate() {
            let _ = writeln!(node, "{i} {} {} {}", p[0], p[1], marker[i]);
        }
        let mut ele = String::new();
        comment(&mut ele);
        let _ = writeln!(ele, "{} 3 0", mesh.n_triangles());
        for (i, t) in mesh.triangles().iter().enumerate() {
            let _ = writeln!(ele, "{i} {} {} {}", t[0], t[1], t[2]);
        }
        let mut bnd = String::new();
        comment(&mut bnd);
        let _ = writeln!(bnd, "{} 1", mesh.boundary_edges().len());
        for (i, be) in mesh.boundary_edges().iter().enumerate() {
            let _ = writeln!(bnd, "{i} {} {} {}", be.vertices[0], be.vertices[1], be.component);
        }
        Self { node, ele, bnd }
    }

    /// Parse node and element text and attach the domain.
    pub fn to_mesh(&self, domain: DomainSpec) -> Result<Mesh> {
        let (vertices, markers) = parse_node(&self.node)?;
        let triangles = parse_ele(&self.ele, vertices.len())?;
        let mesh = Mesh::build(domain, vertices, triangles, Origin::Imported)?;
        for be in mesh.boundary_edges() {
            for v in be.vertices {
                if markers[v] == 0 {
                    return Err(Error::Import(format!("boundary vertex {v} has no boundary marker")));
                }
            }
        }
        if !self.bnd.trim().is_empty() {
            check_bnd(&self.bnd, &mesh)?;
        }
        Ok(mesh)
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, f)| !f.is_empty())
}

fn num<T: std::str::FromStr>(field: &str, line: usize, what: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Import(format!("{what} line {line}: cannot parse '{field}'")))
}

fn parse_node(text: &str) -> Result<(Vec<Point>, Vec<usize>)> {
    let mut lines = data_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| Error::Import("empty .node file".into()))?;
    let n: usize = num(head[0], ln, ".node")?;
    let mut vertices = vec![[0.0; 2]; n];
    let mut markers = vec![0usize; n];
    let mut seen = vec![false; n];
    for (ln, f) in lines {
        if f.len() < 3 {
            return Err(Error::Import(format!(".node line {ln}: expected index x y [marker]")));
        }
        let i: usize = num(f[0], ln, ".node")?;
        if i >= n {
            return Err(Error::Import(format!(".node line {ln}: index {i} out of range")));
        }
        vertices[i] = [num(f[1], ln, ".node")?, num(f[2], ln, ".node")?];
        markers[i] = if f.len() > 3 { num(f[3], ln, ".node")? } else { 0 };
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Import(format!(".node file lacks vertex {i}")));
    }
    Ok((vertices, markers))
}

fn parse_ele(text: &str, nv: usize) -> Result<Vec<[usize; 3]>> {
    let mut lines = data_lines(text);
    let (ln, head) = lines.next().ok_or_else(|| Error::Import("empty .ele file".into()))?;
    let n: usize = num(head[0], ln, ".ele")?;
    let mut tris = vec![[0usize; 3]; n];
    let mut seen = vec![false; n];
    for (ln, f) in lines {
        if f.len() < 4 {
            return Err(Error::Import(format!(".ele line {ln}: expected index a b c")));
        }
        let i: usize = num(f[0], ln, ".ele")?;
        if i >= n {
            return Err(Error::Import(format!(".ele line {ln}: index {i} out of range")));
        }
        let t = [num(f[1], ln, ".ele")?, num(f[2], ln, ".ele")?, num(f[3], ln, ".ele")?];
        if t.iter().any(|&v: &usize| v >= nv) {
            return Err(Error::Import(format!(".ele line {ln}: vertex index out of range")));
        }
        tris[i] = t;
        seen[i] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Import(format!(".ele file lacks triangle {i}")));
    }
    Ok(tris)
}

fn check_bnd(text: &str, mesh: &Mesh) -> Result<()> {
    let mut lines = data_lines(text);
    let Some((ln, head)) = lines.next() else { return Ok(()) };
    let n: usize = num(head[0], ln, ".bnd")?;
    let mut given = std::collections::HashMap::new();
    for (ln, f) in lines {
        if f.len() < 4 {
            return Err(Error::Import(format!(".bnd line {ln}: expected index a b component")));
        }
        let (a, b, c): (usize, usize, usize) = (num(f[1], ln, ".bnd")?, num(f[2], ln, ".bnd")?, num(f[3], ln, ".bnd")?);
        given.insert([a.min(b), a.max(b)], c);
    }
    if given.len() != n || n != mesh.boundary_edges().len() {
        return Err(Error::Import(format!(
            ".bnd lists {} edges, mesh has {} boundary edges",
            given.len(),
            mesh.boundary_edges().len()
        )));
    }
    for be in mesh.boundary_edges() {
        let key = [be.vertices[0].min(be.vertices[1]), be.vertices[0].max(be.vertices[1])];
        match given.get(&key) {
            Some(&c) if c == be.component => {}
            Some(&c) => {
                return Err(Error::Import(format!(
                    "boundary edge {}-{} is tagged {c} but lies on component {}",
                    key[0], key[1], be.component
                )))
            }
            None => return Err(Error::Import(format!("boundary edge {}-{} missing from .bnd", key[0], key[1]))),
        }
    }
    Ok(())
}

/// Write `<stem>.node`, `<stem>.ele` and `<stem>.bnd`.
pub fn write_mesh_files(mesh: &Mesh, stem: &Path, header: Option<&str>) -> Result<[PathBuf; 3]> {
    let files = MeshFiles::from_mesh(mesh, header);
    let paths = [stem.with_extension("node"), stem.with_extension("ele"), stem.with_extension("bnd")];
    std::fs::write(&paths[0], &files.node)?;
    std::fs::write(&paths[1], &files.ele)?;
    std::fs::write(&paths[2], &files.bnd)?;
    Ok(paths)
}

/// Read mesh files; the `.bnd` file is optional and cross-checked when present.
pub fn read_mesh_files(node: &Path, ele: &Path, bnd: Option<&Path>) -> Result<MeshFiles> {
    Ok(MeshFiles {
        node: std::fs::read_to_string(node)?,
        ele: std::fs::read_to_string(ele)?,
        bnd: match bnd {
            Some(p) => std::fs::read_to_string(p)?,
            None => String::new(),
        },
    })
}

/// Import a mesh from `.node` / `.ele` files.
pub fn import_mesh(node: &Path, ele: &Path, domain: DomainSpec) -> Result<Mesh> {
    let bnd = node.with_extension("bnd");
    let files = read_mesh_files(node, ele, bnd.exists().then_some(bnd.as_path()))?;
    files.to_mesh(domain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::mesh_annulus;

    #[test]
    fn round_trip() {
        let m = mesh_annulus(1.0, 2.0, 3, 12).unwrap();
        let f = MeshFiles::from_mesh(&m, Some("test header"));
        let m2 = f.to_mesh(m.domain().clone()).unwrap();
        assert_eq!(m.triangles(), m2.triangles());
        assert_eq!(m.vertices(), m2.vertices());
        let comps: std::collections::BTreeSet<_> = m2.boundary_edges().iter().map(|b| b.component).collect();
        assert_eq!(comps.into_iter().collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(MeshFiles::from_mesh(&m2, Some("test header")), f);
    }

    #[test]
    fn clockwise_triangle_is_reoriented() {
        let m = mesh_annulus(1.0, 2.0, 2, 8).unwrap();
        let mut f = MeshFiles::from_mesh(&m, None);
        let t = m.triangles()[0];
        f.ele = f.ele.replacen(&format!("0 {} {} {}", t[0], t[1], t[2]), &format!("0 {} {} {}", t[0], t[2], t[1]), 1);
        let m2 = f.to_mesh(m.domain().clone()).unwrap();
        m2.check_invariants().unwrap();
    }

    #[test]
    fn off_curve_vertex_is_rejected() {
        let m = mesh_annulus(1.0, 2.0, 2, 8).unwrap();
        let mut f = MeshFiles::from_mesh(&m, None);
        // outer vertex (r = 2, angle 0) pushed half an edge length outward
        let nv = m.n_vertices();
        let idx = nv - 8;
        let p = m.vertices()[idx];
        let h = 2.0 * 2.0 * (std::f64::consts::PI / 8.0).sin();
        let line = format!("{idx} {} {} 1", p[0], p[1]);
        f.node = f.node.replacen(&line, &format!("{idx} {} {} 1", p[0] + 0.5 * h, p[1]), 1);
        match f.to_mesh(m.domain().clone()) {
            Err(Error::Import(msg)) => assert!(msg.contains("boundary edge"), "{msg}"),
            other => panic!("expected import error, got {other:?}"),
        }
    }
}
