use std::collections::HashSet;
use std::f64::consts::PI;

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::Mesh;
use crate::error::{Error, Result};
use crate::geometry::{dist, DomainSpec, Point};

/// Constrained Delaunay refinement of a domain bounded by circles.
///
/// Each circle is sampled with spacing close to `target_h`; the triangulation
/// is refined to a minimum angle of 20 degrees and a maximum area of an
/// equilateral triangle of side `target_h`.
pub fn mesh_disk_with_holes(domain: &DomainSpec, target_h: f64) -> Result<Mesh> {
    let circles = circles_with_clearance(domain, target_h)?;
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    for &(center, radius) in &circles {
        let n = ((2.0 * PI * radius / target_h).ceil() as usize).max(8);
        let pts: Vec<_> = (0..n).map(|k| circle_point(center, radius, k, n)).collect();
        add_chain(&mut cdt, &pts, true)?;
    }
    let (vertices, triangles) = refine_and_collect(cdt, domain, target_h, true, |_| true);
    Mesh::from_parts(domain.clone(), vertices, triangles)
}

/// Like [`mesh_disk_with_holes`] but exactly mirror-symmetric about the
/// x1-axis: the upper half is triangulated and reflected. Every circle must be
/// centered on the axis.
pub fn mesh_mirror_symmetric(domain: &DomainSpec, target_h: f64) -> Result<Mesh> {
    let circles = circles_with_clearance(domain, target_h)?;
    let tol = 1e-12 * domain.diameter();
    if circles.iter().any(|(c, _)| c[1].abs() > tol) {
        return Err(Error::Mesh("mirror-symmetric meshing needs every circle centered on the x1-axis".into()));
    }
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::new();
    for &(center, radius) in &circles {
        // even count so that angle 0 and pi are samples
        let n = (((2.0 * PI * radius / target_h).ceil() as usize).max(8) + 1) / 2 * 2;
        let pts: Vec<_> = (0..=n / 2).map(|k| circle_point([center[0], 0.0], radius, k, n)).collect();
        add_chain(&mut cdt, &pts, false)?;
    }
    // pieces of the axis inside the domain, between consecutive circle crossings
    let mut cuts: Vec<f64> = circles.iter().flat_map(|(c, r)| [c[0] - r, c[0] + r]).collect();
    cuts.sort_by(f64::total_cmp);
    for w in cuts.windows(2) {
        let mid = [(w[0] + w[1]) / 2.0, 0.0];
        if !domain.contains(mid) {
            continue;
        }
        let m = (((w[1] - w[0]) / target_h).ceil() as usize).max(1);
        let pts: Vec<_> = (0..=m).map(|k| [w[0] + (w[1] - w[0]) * k as f64 / m as f64, 0.0]).collect();
        add_chain(&mut cdt, &pts, false)?;
    }
    // the axis chain lies on the convex hull, where outer-face exclusion would
    // drop the whole half domain; filtering by containment is enough
    let (upper_v, upper_t) = refine_and_collect(cdt, domain, target_h, false, |c| c[1] > 0.0);
    let mut vertices = upper_v.clone();
    let mirror: Vec<usize> = upper_v
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v[1] == 0.0 {
                i
            } else {
                vertices.push([v[0], -v[1]]);
                vertices.len() - 1
            }
        })
        .collect();
    let mut triangles = upper_t.clone();
    triangles.extend(upper_t.iter().map(|t| [mirror[t[0]], mirror[t[2]], mirror[t[1]]]));
    Mesh::from_parts(domain.clone(), vertices, triangles)
}

fn circles_with_clearance(domain: &DomainSpec, target_h: f64) -> Result<Vec<(Point, f64)>> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::Config(format!("target_h must be positive, got {target_h}")));
    }
    let circles: Vec<_> = domain
        .curves()
        .iter()
        .map(|c| c.as_circle())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Mesh("the built-in generator only handles circular boundaries; import a mesh for other curves".into()))?;
    let (c0, r0) = circles[0];
    for j in 1..circles.len() {
        let (cj, rj) = circles[j];
        let gap = r0 - dist(cj, c0) - rj;
        if gap < 3.0 * target_h {
            return Err(Error::Mesh(format!("hole {j} is {gap:.3e} from the outer boundary, below 3*target_h")));
        }
        for k in 1..j {
            let (ck, rk) = circles[k];
            let gap = dist(cj, ck) - rj - rk;
            if gap < 3.0 * target_h {
                return Err(Error::Mesh(format!("holes {k} and {j} are {gap:.3e} apart, below 3*target_h")));
            }
        }
    }
    Ok(circles)
}

/// Sample `k` of `n` equally spaced points; quarter points are exact.
fn circle_point(center: Point, radius: f64, k: usize, n: usize) -> Point {
    let (s, c) = match (4 * k) % n == 0 {
        true => [(0.0, 1.0), (1.0, 0.0), (0.0, -1.0), (-1.0, 0.0)][(4 * k / n) % 4],
        false => (2.0 * PI * k as f64 / n as f64).sin_cos(),
    };
    [center[0] + radius * c, center[1] + radius * s]
}

fn add_chain(cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>, pts: &[Point], closed: bool) -> Result<()> {
    let handles = pts
        .iter()
        .map(|p| cdt.insert(Point2::new(p[0], p[1])).map_err(|e| Error::Mesh(format!("insertion failed: {e:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let n = handles.len();
    let segments = if closed { n } else { n - 1 };
    for k in 0..segments {
        cdt.add_constraint(handles[k], handles[(k + 1) % n]);
    }
    Ok(())
}

/// Refine to 20 degrees and the area of an equilateral triangle of side
/// `target_h`, then keep the triangles inside the domain whose centroid passes
/// `keep`. Vertex numbering is compacted and unused vertices dropped.
fn refine_and_collect(
    mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>>,
    domain: &DomainSpec,
    target_h: f64,
    exclude_outer: bool,
    keep: impl Fn(Point) -> bool,
) -> (Vec<Point>, Vec<[usize; 3]>) {
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(20.0))
        .with_max_allowed_area(3f64.sqrt() / 4.0 * target_h * target_h)
        .keep_constraint_edges()
        .exclude_outer_faces(exclude_outer);
    let result = cdt.refine(params);
    let excluded: HashSet<_> = result.excluded_faces.iter().copied().collect();

    let vertices: Vec<_> = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let vs = face.vertices();
        let tri = [vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()];
        let c = [
            (vertices[tri[0]][0] + vertices[tri[1]][0] + vertices[tri[2]][0]) / 3.0,
            (vertices[tri[0]][1] + vertices[tri[1]][1] + vertices[tri[2]][1]) / 3.0,
        ];
        if domain.contains(c) && keep(c) {
            triangles.push(tri);
        }
    }
    let mut used = vec![usize::MAX; vertices.len()];
    let mut compact = Vec::new();
    for t in &mut triangles {
        for v in t.iter_mut() {
            if used[*v] == usize::MAX {
                used[*v] = compact.len();
                compact.push(vertices[*v]);
            }
            *v = used[*v];
        }
    }
    (compact, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Curve;

    fn min_angle_deg(m: &Mesh) -> f64 {
        let mut best = 180.0f64;
        for t in m.triangles() {
            for k in 0..3 {
                let (a, b, c) = (m.vertices()[t[k]], m.vertices()[t[(k + 1) % 3]], m.vertices()[t[(k + 2) % 3]]);
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
                best = best.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        best
    }

    #[test]
    fn disk_area() {
        let d = DomainSpec::disk(1.0).unwrap();
        let m = mesh_disk_with_holes(&d, 0.1).unwrap();
        m.check_invariants().unwrap();
        assert!((m.area() - PI).abs() < 0.01 * PI);
        assert!(min_angle_deg(&m) >= 19.5, "{}", min_angle_deg(&m));
    }

    #[test]
    fn annulus_area() {
        let d = DomainSpec::annulus(1.0, 2.0).unwrap();
        let h = 0.2;
        let m = mesh_disk_with_holes(&d, h).unwrap();
        m.check_invariants().unwrap();
        assert!((m.area() - 3.0 * PI).abs() < 0.02 * h * 3.0 * PI);
        let inner = m.boundary_edges().iter().filter(|b| b.component == 1).count();
        assert!(inner > 0);
    }

    #[test]
    fn mirrored_two_holes() {
        let d = DomainSpec::from_curves(vec![
            Curve::circle([0.0, 0.0], 3.0).unwrap(),
            Curve::circle([-1.2, 0.0], 0.5).unwrap(),
            Curve::circle([1.3, 0.0], 0.6).unwrap(),
        ])
        .unwrap();
        let m = mesh_mirror_symmetric(&d, 0.3).unwrap();
        m.check_invariants().unwrap();
        let exact = PI * (9.0 - 0.25 - 0.36);
        assert!((m.area() - exact).abs() < 0.02 * 0.3 * exact);
        assert!(min_angle_deg(&m) >= 19.5);
        let pts: HashSet<_> = m.vertices().iter().map(|v| (v[0].to_bits(), v[1].to_bits())).collect();
        assert!(m.vertices().iter().all(|v| pts.contains(&(v[0].to_bits(), (-v[1] + 0.0).to_bits()))));
        let off_axis = DomainSpec::from_curves(vec![Curve::circle([0.0, 0.0], 3.0).unwrap(), Curve::circle([0.0, 0.5], 0.5).unwrap()]).unwrap();
        assert!(matches!(mesh_mirror_symmetric(&off_axis, 0.3), Err(Error::Mesh(_))));
    }

    #[test]
    fn close_holes_rejected() {
        let d = DomainSpec::from_curves(vec![
            Curve::circle([0.0, 0.0], 3.0).unwrap(),
            Curve::circle([-0.505, 0.0], 0.5).unwrap(),
            Curve::circle([0.505, 0.0], 0.5).unwrap(),
        ])
        .unwrap();
        assert!(matches!(mesh_disk_with_holes(&d, 0.1), Err(Error::Mesh(_))));
    }
}
