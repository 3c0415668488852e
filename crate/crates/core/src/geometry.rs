//! Closed parametric boundary curves, multiply-connected domains and the
//! boundary frame (normal, tangent, curvature, Weingarten map).
//!
//! Curvature follows the outward-normal convention `kappa = (d tau / ds) . n`
//! with `n` the outward normal of the domain. An outer circle of radius `R`
//! therefore has `kappa = -1/R` and a circular hole `kappa = +1/R`. The
//! tangent is always `tau = (n2, -n1)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

pub type Point = [f64; 2];

const TWO_PI: f64 = 2.0 * PI;

#[inline]
pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Periodic cubic spline through control points at uniform parameters `i/m`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PeriodicSpline {
    points: Vec<Point>,
    #[serde(skip)]
    second: Vec<Point>,
}

impl PeriodicSpline {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let m = points.len();
        if m < 4 {
            return Err(Error::Geometry(format!("spline needs at least 4 control points, got {m}")));
        }
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Geometry("spline control point is not finite".into()));
        }
        let h = 1.0 / m as f64;
        let rhs: Vec<Point> = (0..m)
            .map(|i| {
                let (a, b, c) = (points[(i + m - 1) % m], points[i], points[(i + 1) % m]);
                [
                    6.0 * (a[0] - 2.0 * b[0] + c[0]) / (h * h),
                    6.0 * (a[1] - 2.0 * b[1] + c[1]) / (h * h),
                ]
            })
            .collect();
        // M[i-1] + 4 M[i] + M[i+1] = rhs[i]; strictly diagonally dominant
        let mut second = vec![[0.0; 2]; m];
        let scale = rhs.iter().map(|r| norm(*r)).fold(0.0, f64::max).max(1e-300);
        for _ in 0..500 {
            let mut change: f64 = 0.0;
            for i in 0..m {
                let (l, r) = (second[(i + m - 1) % m], second[(i + 1) % m]);
                let new = [(rhs[i][0] - l[0] - r[0]) / 4.0, (rhs[i][1] - l[1] - r[1]) / 4.0];
                change = change.max(dist(new, second[i]));
                second[i] = new;
            }
            if change <= 1e-16 * scale {
                break;
            }
        }
        Ok(Self { points, second })
    }

    pub fn control_points(&self) -> &[Point] {
        &self.points
    }

    /// Value, first and second derivative with respect to the parameter.
    fn eval(&self, t: f64) -> (Point, Point, Point) {
        let m = self.points.len();
        let u = t.rem_euclid(1.0) * m as f64;
        let i = (u.floor() as usize).min(m - 1);
        let x = u - i as f64;
        let (a, b) = (1.0 - x, x);
        let h = 1.0 / m as f64;
        let (p0, p1) = (self.points[i], self.points[(i + 1) % m]);
        let (m0, m1) = (self.second[i], self.second[(i + 1) % m]);
        let mut v = [0.0; 2];
        let mut d = [0.0; 2];
        let mut dd = [0.0; 2];
        for c in 0..2 {
            v[c] = a * p0[c] + b * p1[c] + ((a * a * a - a) * m0[c] + (b * b * b - b) * m1[c]) * h * h / 6.0;
            d[c] = (p1[c] - p0[c]) / h + ((1.0 - 3.0 * a * a) * m0[c] + (3.0 * b * b - 1.0) * m1[c]) * h / 6.0;
            dd[c] = a * m0[c] + b * m1[c];
        }
        (v, d, dd)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Circle { center: Point, radius: f64 },
    Spline(PeriodicSpline),
}

/// A closed curve parametrized over `[0, 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    kind: CurveKind,
    reversed: bool,
}

impl Curve {
    /// Counterclockwise circle, `t = 0` at angle zero.
    pub fn circle(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Geometry(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Self { kind: CurveKind::Circle { center, radius }, reversed: false })
    }

    pub fn spline(points: Vec<Point>) -> Result<Self> {
        let curve = Self { kind: CurveKind::Spline(PeriodicSpline::new(points)?), reversed: false };
        let diam = curve.bbox_diameter();
        let samples = 64 * curve.control_count().max(1);
        for k in 0..samples {
            let t = k as f64 / samples as f64;
            if norm(curve.derivative(t)) < 1e-14 * diam {
                return Err(Error::Geometry(format!("spline tangent degenerates near t = {t}")));
            }
        }
        Ok(curve)
    }

    /// The same point set traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        Self { kind: self.kind.clone(), reversed: !self.reversed }
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn as_circle(&self) -> Option<(Point, f64)> {
        match self.kind {
            CurveKind::Circle { center, radius } => Some((center, radius)),
            CurveKind::Spline(_) => None,
        }
    }

    fn control_count(&self) -> usize {
        match &self.kind {
            CurveKind::Circle { .. } => 1,
            CurveKind::Spline(s) => s.points.len(),
        }
    }

    fn raw(&self, t: f64) -> (Point, Point, Point) {
        match &self.kind {
            CurveKind::Circle { center, radius } => {
                let th = TWO_PI * t;
                let (s, c) = th.sin_cos();
                (
                    [center[0] + radius * c, center[1] + radius * s],
                    [-TWO_PI * radius * s, TWO_PI * radius * c],
                    [-TWO_PI * TWO_PI * radius * c, -TWO_PI * TWO_PI * radius * s],
                )
            }
            CurveKind::Spline(sp) => sp.eval(t),
        }
    }

    fn eval3(&self, t: f64) -> (Point, Point, Point) {
        if self.reversed {
            let (p, d, dd) = self.raw(1.0 - t);
            (p, [-d[0], -d[1]], dd)
        } else {
            self.raw(t)
        }
    }

    pub fn point(&self, t: f64) -> Point {
        self.eval3(t).0
    }

    pub fn derivative(&self, t: f64) -> Point {
        self.eval3(t).1
    }

    pub fn second_derivative(&self, t: f64) -> Point {
        self.eval3(t).2
    }

    /// Signed enclosed area, positive for counterclockwise traversal.
    pub fn signed_area(&self) -> f64 {
        match self.kind {
            CurveKind::Circle { radius, .. } => {
                let a = PI * radius * radius;
                if self.reversed {
                    -a
                } else {
                    a
                }
            }
            CurveKind::Spline(_) => {
                let (x, w) = gauss_legendre(8);
                let panels = 8 * self.control_count();
                let mut area = 0.0;
                for k in 0..panels {
                    for (xi, wi) in x.iter().zip(&w) {
                        let t = (k as f64 + xi) / panels as f64;
                        let (p, d, _) = self.eval3(t);
                        area += 0.5 * (p[0] * d[1] - p[1] * d[0]) * wi / panels as f64;
                    }
                }
                area
            }
        }
    }

    pub fn is_counterclockwise(&self) -> bool {
        self.signed_area() > 0.0
    }

    fn bbox_diameter(&self) -> f64 {
        match self.kind {
            CurveKind::Circle { radius, .. } => 2.0 * radius,
            CurveKind::Spline(_) => {
                let pts = self.polygon(256);
                let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
                for p in &pts {
                    for c in 0..2 {
                        lo[c] = lo[c].min(p[c]);
                        hi[c] = hi[c].max(p[c]);
                    }
                }
                dist(lo, hi)
            }
        }
    }

    /// Points at `n` uniform parameter values.
    pub fn polygon(&self, n: usize) -> Vec<Point> {
        (0..n).map(|k| self.point(k as f64 / n as f64)).collect()
    }

    /// Closest curve parameter to `p` and the distance.
    pub fn project(&self, p: Point) -> (f64, f64) {
        if let CurveKind::Circle { center, radius } = self.kind {
            let d = sub(p, center);
            let mut t = (d[1].atan2(d[0]) / TWO_PI).rem_euclid(1.0);
            if self.reversed {
                t = (1.0 - t).rem_euclid(1.0);
            }
            if t >= 1.0 {
                t = 0.0;
            }
            return (t, (norm(d) - radius).abs());
        }
        let n = 32 * self.control_count();
        let mut best = (0.0, f64::MAX);
        for k in 0..n {
            let t = k as f64 / n as f64;
            let d = dist(self.point(t), p);
            if d < best.1 {
                best = (t, d);
            }
        }
        let mut t = best.0;
        let dt_max = 1.0 / n as f64;
        for _ in 0..50 {
            let (g, d, dd) = self.eval3(t);
            let r = sub(g, p);
            let f = dot(r, d);
            let fp = dot(d, d) + dot(r, dd);
            if fp <= 0.0 {
                break;
            }
            let step = (f / fp).clamp(-dt_max, dt_max);
            t -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let t = t.rem_euclid(1.0);
        (t, dist(self.point(t), p))
    }

    /// Point-in-curve test against the enclosed region.
    pub fn contains(&self, p: Point) -> bool {
        if let CurveKind::Circle { center, radius } = self.kind {
            return dist(p, center) < radius;
        }
        let poly = self.polygon(64 * self.control_count());
        point_in_polygon(&poly, p)
    }
}

fn point_in_polygon(poly: &[Point], p: Point) -> bool {
    let mut inside = false;
    let n = poly.len();
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Orthonormal boundary frame at a boundary point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFrame {
    pub point: Point,
    /// Unit outward normal of the domain.
    pub normal: Point,
    /// Unit tangent `(n2, -n1)`.
    pub tangent: Point,
    pub curvature: f64,
    /// `kappa * tau tau^T`.
    pub weingarten: [[f64; 2]; 2],
}

impl BoundaryFrame {
    fn new(point: Point, normal: Point, curvature: f64) -> Self {
        let tangent = [normal[1], -normal[0]];
        let off = curvature * tangent[0] * tangent[1];
        let w = [[curvature * tangent[0] * tangent[0], off], [off, curvature * tangent[1] * tangent[1]]];
        Self { point, normal, tangent, curvature, weingarten: w }
    }

    pub fn apply_weingarten(&self, u: Point) -> Point {
        let w = &self.weingarten;
        [w[0][0] * u[0] + w[0][1] * u[1], w[1][0] * u[0] + w[1][1] * u[1]]
    }
}

/// A boundary frame tagged with its component and curve parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundarySample {
    pub component: usize,
    pub t: f64,
    pub frame: BoundaryFrame,
}

impl BoundarySample {
    pub fn point(&self) -> Point {
        self.frame.point
    }

    pub fn radius(&self) -> f64 {
        norm(self.frame.point)
    }

    pub fn angle(&self) -> f64 {
        self.frame.point[1].atan2(self.frame.point[0])
    }
}

/// A bounded domain: the region inside `curves[0]` minus the regions inside
/// `curves[1..]`.
#[derive(Clone, Debug)]
pub struct DomainSpec {
    curves: Vec<Curve>,
    labels: Vec<String>,
    ccw: Vec<bool>,
    diameter: f64,
}

/// Outcome of [`classify_symmetry`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SymmetryClass {
    pub admissible_x1: bool,
    pub circularly_symmetric: Option<Point>,
}

impl DomainSpec {
    pub fn new(curves: Vec<Curve>, labels: Vec<String>) -> Result<Self> {
        if curves.is_empty() {
            return Err(Error::Geometry("domain needs an outer curve".into()));
        }
        if labels.len() != curves.len() {
            return Err(Error::Geometry(format!(
                "{} labels given for {} curves",
                labels.len(),
                curves.len()
            )));
        }
        let ccw = curves.iter().map(Curve::is_counterclockwise).collect();
        let diameter = curves[0].bbox_diameter();
        let domain = Self { curves, labels, ccw, diameter };
        domain.check_nesting()?;
        Ok(domain)
    }

    /// Curves labelled `gamma0, gamma1, ...`.
    pub fn from_curves(curves: Vec<Curve>) -> Result<Self> {
        let labels = (0..curves.len()).map(|j| format!("gamma{j}")).collect();
        Self::new(curves, labels)
    }

    /// Concentric annulus `r_in < |x - center| < r_out`.
    pub fn annulus_at(center: Point, r_in: f64, r_out: f64) -> Result<Self> {
        if !(r_in > 0.0 && r_in < r_out) {
            return Err(Error::Geometry(format!("annulus radii must satisfy 0 < r_in < r_out, got ({r_in}, {r_out})")));
        }
        Self::new(
            vec![Curve::circle(center, r_out)?, Curve::circle(center, r_in)?],
            vec!["outer".into(), "inner".into()],
        )
    }

    pub fn annulus(r_in: f64, r_out: f64) -> Result<Self> {
        Self::annulus_at([0.0, 0.0], r_in, r_out)
    }

    pub fn disk(radius: f64) -> Result<Self> {
        Self::new(vec![Curve::circle([0.0, 0.0], radius)?], vec!["outer".into()])
    }

    fn check_nesting(&self) -> Result<()> {
        let n = 256;
        let polys: Vec<Vec<Point>> = self.curves.iter().map(|c| c.polygon(n)).collect();
        for j in 1..self.curves.len() {
            if polys[j].iter().any(|p| !self.curves[0].contains(*p)) {
                return Err(Error::Geometry(format!("hole {j} is not strictly inside the outer curve")));
            }
            for k in 1..j {
                let overlap = polys[j].iter().any(|p| self.curves[k].contains(*p))
                    || polys[k].iter().any(|p| self.curves[j].contains(*p));
                if overlap {
                    return Err(Error::Geometry(format!("holes {k} and {j} overlap")));
                }
            }
        }
        for j in 0..self.curves.len() {
            for k in (j + 1)..self.curves.len() {
                if curve_clearance(&polys[j], &polys[k]) <= 0.0 {
                    return Err(Error::Geometry(format!("curves {j} and {k} touch")));
                }
            }
        }
        Ok(())
    }

    pub fn curves(&self) -> &[Curve] {
        &self.curves
    }

    pub fn curve(&self, component: usize) -> &Curve {
        &self.curves[component]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Number of boundary components (`N + 1`).
    pub fn components(&self) -> usize {
        self.curves.len()
    }

    /// Number of holes `N`.
    pub fn holes(&self) -> usize {
        self.curves.len() - 1
    }

    /// Bounding-box diameter of the outer curve.
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn area(&self) -> f64 {
        let outer = self.curves[0].signed_area().abs();
        outer - self.curves[1..].iter().map(|c| c.signed_area().abs()).sum::<f64>()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.curves[0].contains(p) && !self.curves[1..].iter().any(|c| c.contains(p))
    }

    /// Nearest boundary component, parameter and distance.
    pub fn project(&self, p: Point) -> (usize, f64, f64) {
        let mut best = (0, 0.0, f64::MAX);
        for (j, c) in self.curves.iter().enumerate() {
            let (t, d) = c.project(p);
            if d < best.2 {
                best = (j, t, d);
            }
        }
        best
    }

    pub fn sample(&self, component: usize, t: f64) -> Result<BoundarySample> {
        Ok(BoundarySample { component, t, frame: frame_at(self, component, t)? })
    }

    /// Total arclength of one component.
    pub fn length(&self, component: usize) -> f64 {
        boundary_integral(self, component, |_| 1.0)
    }

    /// Arclength from parameter 0 to `t` along one component.
    pub fn arclength(&self, component: usize, t: f64) -> f64 {
        let (x, w) = gauss_legendre(8);
        let curve = &self.curves[component];
        let panels = 16;
        let h = t / panels as f64;
        (0..panels)
            .flat_map(|k| x.iter().zip(&w).map(move |(xi, wi)| (h * (k as f64 + xi), wi * h)))
            .map(|(s, wt)| wt * norm(curve.derivative(s)))
            .sum()
    }
}

fn curve_clearance(a: &[Point], b: &[Point]) -> f64 {
    let mut best = f64::MAX;
    for p in a {
        for q in b {
            best = best.min(dist(*p, *q));
        }
    }
    best
}

/// Boundary frame of component `component` at parameter `t`.
pub fn frame_at(domain: &DomainSpec, component: usize, t: f64) -> Result<BoundaryFrame> {
    if component >= domain.components() {
        return Err(Error::Geometry(format!(
            "component {component} does not exist (domain has {})",
            domain.components()
        )));
    }
    let curve = &domain.curves[component];
    if let CurveKind::Circle { center, radius } = curve.kind {
        let th = TWO_PI * if curve.reversed { 1.0 - t } else { t };
        let (s, c) = th.sin_cos();
        let p = [center[0] + radius * c, center[1] + radius * s];
        return Ok(if component == 0 {
            BoundaryFrame::new(p, [c, s], -1.0 / radius)
        } else {
            BoundaryFrame::new(p, [-c, -s], 1.0 / radius)
        });
    }
    let (p, d, dd) = curve.eval3(t);
    let speed = norm(d);
    if speed < 1e-14 * domain.diameter {
        return Err(Error::Geometry(format!("degenerate tangent on component {component} at t = {t}")));
    }
    let orient = if domain.ccw[component] { 1.0 } else { -1.0 };
    let mut n = [orient * d[1] / speed, -orient * d[0] / speed];
    if component > 0 {
        n = [-n[0], -n[1]];
    }
    let k_signed = (d[0] * dd[1] - d[1] * dd[0]) / (speed * speed * speed);
    let left = [-d[1] / speed, d[0] / speed];
    Ok(BoundaryFrame::new(p, n, k_signed * dot(left, n)))
}

/// Arclength integral over one component, 16 panels of 8 Gauss nodes.
pub fn boundary_integral(domain: &DomainSpec, component: usize, g: impl Fn(&BoundarySample) -> f64) -> f64 {
    boundary_integral_with(domain, component, 16, 8, g)
}

/// Composite Gauss-Legendre arclength integral with explicit panel and node counts.
pub fn boundary_integral_with(
    domain: &DomainSpec,
    component: usize,
    panels: usize,
    nodes: usize,
    g: impl Fn(&BoundarySample) -> f64,
) -> f64 {
    boundary_rule(domain, component, panels, nodes).iter().map(|(s, w)| w * g(s)).sum()
}

/// Samples and arclength weights of the composite Gauss-Legendre rule.
pub fn boundary_rule(domain: &DomainSpec, component: usize, panels: usize, nodes: usize) -> Vec<(BoundarySample, f64)> {
    let (x, w) = gauss_legendre(nodes);
    let curve = &domain.curves[component];
    let mut out = Vec::with_capacity(panels * nodes);
    for k in 0..panels {
        for (xi, wi) in x.iter().zip(&w) {
            let t = (k as f64 + xi) / panels as f64;
            let frame = frame_at(domain, component, t).expect("curve regularity is checked at construction");
            let speed = norm(curve.derivative(t));
            out.push((BoundarySample { component, t, frame }, wi * speed / panels as f64));
        }
    }
    out
}

/// Parameters of the default boundary quadrature of one component.
pub fn boundary_quadrature_params(panels: usize, nodes: usize) -> Vec<f64> {
    let (x, _) = gauss_legendre(nodes);
    (0..panels).flat_map(|k| x.iter().map(move |xi| (k as f64 + xi) / panels as f64)).collect()
}

/// Mirror symmetry about the x1-axis and circular symmetry.
pub fn classify_symmetry(domain: &DomainSpec) -> SymmetryClass {
    let tol = 1e-10 * domain.diameter;
    let mut admissible = true;
    for curve in &domain.curves {
        match curve.kind {
            CurveKind::Circle { center, radius } => {
                if center[1].abs() > tol || radius < center[1].abs() {
                    admissible = false;
                }
            }
            CurveKind::Spline(_) => {
                let pts = curve.polygon(16 * curve.control_count().max(16));
                let mirrored = pts.iter().all(|p| curve.project([p[0], -p[1]]).1 <= tol);
                let crosses = pts.iter().any(|p| p[1] >= 0.0) && pts.iter().any(|p| p[1] <= 0.0);
                if !(mirrored && crosses) {
                    admissible = false;
                }
            }
        }
    }
    let mut center = None;
    for curve in &domain.curves {
        match (curve.as_circle(), center) {
            (Some((c, _)), None) => center = Some(c),
            (Some((c, _)), Some(c0)) if dist(c, c0) <= tol => {}
            _ => {
                center = None;
                break;
            }
        }
    }
    let all_circles = domain.curves.iter().all(|c| c.as_circle().is_some());
    SymmetryClass { admissible_x1: admissible, circularly_symmetric: if all_circles { center } else { None } }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ellipse(a: f64, b: f64, center: Point, m: usize) -> Vec<Point> {
        (0..m)
            .map(|k| {
                let th = TWO_PI * k as f64 / m as f64;
                [center[0] + a * th.cos(), center[1] + b * th.sin()]
            })
            .collect()
    }

    #[test]
    fn circle_curvature_signs() {
        let d = DomainSpec::annulus(1.0, 2.0).unwrap();
        for k in 0..10 {
            let t = k as f64 / 10.0;
            let f0 = frame_at(&d, 0, t).unwrap();
            let f1 = frame_at(&d, 1, t).unwrap();
            assert_eq!(f0.curvature, -0.5);
            assert_eq!(f1.curvature, 1.0);
            assert!(dot(f0.normal, f0.point) > 0.0);
            assert!(dot(f1.normal, f1.point) < 0.0);
        }
    }

    #[test]
    fn spline_circle_matches_analytic_frame() {
        let outer = Curve::spline(ellipse(2.0, 2.0, [0.0, 0.0], 200)).unwrap();
        let hole = Curve::spline(ellipse(0.5, 0.5, [0.2, 0.0], 200)).unwrap().reversed();
        let d = DomainSpec::from_curves(vec![outer, hole]).unwrap();
        for k in 0..7 {
            let t = k as f64 / 7.0 + 0.013;
            let f0 = frame_at(&d, 0, t).unwrap();
            assert!((f0.curvature + 0.5).abs() < 1e-4, "{}", f0.curvature);
            let f1 = frame_at(&d, 1, t).unwrap();
            assert!((f1.curvature - 2.0).abs() < 1e-3, "{}", f1.curvature);
            let to_center = sub([0.2, 0.0], f1.point);
            assert!(dot(f1.normal, to_center) > 0.0);
        }
    }

    #[test]
    fn curvature_is_orientation_even() {
        let pts = ellipse(2.0, 1.0, [0.0, 0.0], 40);
        let c = Curve::spline(pts).unwrap();
        let d1 = DomainSpec::from_curves(vec![c.clone()]).unwrap();
        let d2 = DomainSpec::from_curves(vec![c.reversed()]).unwrap();
        for k in 0..20 {
            let t = k as f64 / 20.0 + 0.01;
            let a = frame_at(&d1, 0, t).unwrap();
            let b = frame_at(&d2, 0, 1.0 - t).unwrap();
            assert!(dist(a.point, b.point) < 1e-12);
            assert!((a.curvature - b.curvature).abs() < 1e-10);
            assert!(dist(a.normal, b.normal) < 1e-12);
        }
    }

    #[test]
    fn frame_invariants() {
        let c = Curve::spline(ellipse(3.0, 1.0, [0.5, 0.0], 24)).unwrap();
        let d = DomainSpec::from_curves(vec![c]).unwrap();
        for k in 0..50 {
            let f = frame_at(&d, 0, k as f64 / 50.0).unwrap();
            assert!((norm(f.normal) - 1.0).abs() < 1e-12);
            assert!(dot(f.normal, f.tangent).abs() < 1e-12);
            for u in [[1.0, 0.0], [0.3, -2.0], [-1.5, 0.7]] {
                assert!(dot(f.apply_weingarten(u), f.normal).abs() < 1e-12);
            }
            assert_eq!(f.weingarten[0][1], f.weingarten[1][0]);
        }
    }

    #[test]
    fn boundary_integrals() {
        let d = DomainSpec::annulus(1.0, 2.0).unwrap();
        let l0 = boundary_integral(&d, 0, |_| 1.0);
        assert!((l0 - 4.0 * PI).abs() < 1e-12 * 4.0 * PI);
        let f0 = boundary_integral(&d, 0, |_| -1.5);
        assert!((f0 + 6.0 * PI).abs() < 1e-12);
        let f1 = boundary_integral(&d, 1, |_| 3.0);
        assert!((f1 - 6.0 * PI).abs() < 1e-12);
        let cos2 = boundary_integral(&d, 1, |s| s.angle().cos().powi(2));
        assert!((cos2 - PI).abs() < 1e-12);
    }

    #[test]
    fn symmetry_classes() {
        let a = DomainSpec::annulus(1.0, 2.0).unwrap();
        let s = classify_symmetry(&a);
        assert!(s.admissible_x1);
        assert_eq!(s.circularly_symmetric, Some([0.0, 0.0]));
        let shifted = DomainSpec::annulus_at([5.0, 0.0], 1.0, 2.0).unwrap();
        let s = classify_symmetry(&shifted);
        assert!(s.admissible_x1);
        assert_eq!(s.circularly_symmetric, Some([5.0, 0.0]));
        let off = DomainSpec::from_curves(vec![
            Curve::circle([0.0, 0.0], 3.0).unwrap(),
            Curve::circle([0.0, 1.5], 0.5).unwrap(),
        ])
        .unwrap();
        let s = classify_symmetry(&off);
        assert!(!s.admissible_x1);
        assert_eq!(s.circularly_symmetric, None);
        let e = DomainSpec::from_curves(vec![Curve::spline(ellipse(2.0, 1.0, [0.0, 0.0], 32)).unwrap()]).unwrap();
        assert!(classify_symmetry(&e).admissible_x1);
    }

    #[test]
    fn invalid_domains() {
        assert!(DomainSpec::annulus(2.0, 1.0).is_err());
        assert!(Curve::circle([0.0, 0.0], -1.0).is_err());
        let r = DomainSpec::from_curves(vec![
            Curve::circle([0.0, 0.0], 1.0).unwrap(),
            Curve::circle([0.9, 0.0], 0.5).unwrap(),
        ]);
        assert!(r.is_err());
    }
}
