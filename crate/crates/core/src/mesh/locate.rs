use super::Mesh;
use crate::fem::invert_map;
use crate::geometry::Point;

/// Bucket grid over triangle bounding boxes.
#[derive(Debug)]
pub struct Locator {
    lo: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl Locator {
    pub fn new(mesh: &Mesh) -> Self {
        let mut lo = [f64::MAX; 2];
        let mut hi = [f64::MIN; 2];
        for p in mesh.nodes() {
            for c in 0..2 {
                lo[c] = lo[c].min(p[c]);
                hi[c] = hi[c].max(p[c]);
            }
        }
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
        let side = (mesh.n_triangles() as f64).sqrt().ceil().max(1.0) as usize;
        let cell = span / side as f64 * 1.000_001;
        let nx = ((hi[0] - lo[0]) / cell).floor() as usize + 1;
        let ny = ((hi[1] - lo[1]) / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for k in 0..mesh.n_triangles() {
            let c = mesh.triangle_coords(k);
            let mut a = [f64::MAX; 2];
            let mut b = [f64::MIN; 2];
            for p in &c {
                for d in 0..2 {
                    a[d] = a[d].min(p[d]);
                    b[d] = b[d].max(p[d]);
                }
            }
            let pad = 0.05 * (b[0] - a[0]).max(b[1] - a[1]);
            let ix0 = (((a[0] - pad - lo[0]) / cell).floor().max(0.0) as usize).min(nx - 1);
            let ix1 = (((b[0] + pad - lo[0]) / cell).floor().max(0.0) as usize).min(nx - 1);
            let iy0 = (((a[1] - pad - lo[1]) / cell).floor().max(0.0) as usize).min(ny - 1);
            let iy1 = (((b[1] + pad - lo[1]) / cell).floor().max(0.0) as usize).min(ny - 1);
            for iy in iy0..=iy1 {
                for ix in ix0..=ix1 {
                    buckets[iy * nx + ix].push(k);
                }
            }
        }
        Self { lo, cell, nx, ny, buckets }
    }

    /// Triangle containing `p` and the reference coordinates, allowing a
    /// barycentric violation up to `tol`. Among candidates the least violated
    /// one is returned.
    pub fn locate(&self, mesh: &Mesh, p: Point, tol: f64) -> Option<(usize, [f64; 2])> {
        let ix = ((p[0] - self.lo[0]) / self.cell).floor();
        let iy = ((p[1] - self.lo[1]) / self.cell).floor();
        if ix < 0.0 || iy < 0.0 || ix as usize >= self.nx || iy as usize >= self.ny {
            return None;
        }
        let mut best: Option<(usize, [f64; 2], f64)> = None;
        for &k in &self.buckets[iy as usize * self.nx + ix as usize] {
            let Some(xi) = invert_map(&mesh.triangle_coords(k), p) else { continue };
            let viol = (-xi[0]).max(-xi[1]).max(xi[0] + xi[1] - 1.0).max(0.0);
            if best.is_none_or(|b| viol < b.2) {
                best = Some((k, xi, viol));
            }
            if viol == 0.0 {
                break;
            }
        }
        best.filter(|b| b.2 <= tol).map(|(k, xi, _)| {
            let l1 = xi[0].clamp(0.0, 1.0);
            let l2 = xi[1].clamp(0.0, 1.0 - l1);
            (k, [l1, l2])
        })
    }
}
