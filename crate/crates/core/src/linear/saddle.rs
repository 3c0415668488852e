use crate::sparse::CsrMatrix;

/// Linear functional on the velocity dofs with a prescribed value.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub label: String,
    /// Nonzero `(dof, coefficient)` pairs.
    pub terms: Vec<(usize, f64)>,
    pub target: f64,
}

impl Constraint {
    pub fn from_dense(label: impl Into<String>, coeffs: &[f64], target: f64) -> Self {
        let terms = coeffs.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(i, &v)| (i, v)).collect();
        Self { label: label.into(), terms, target }
    }

    pub fn apply(&self, u: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, v)| v * u[i]).sum()
    }
}

/// Restriction of the unknowns to a subspace in which every unknown is either
/// zero or `sign * y[index]` for a reduced unknown `y`.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub map: Vec<Option<(usize, f64)>>,
    pub size: usize,
}

impl Reduction {
    pub fn reduce_matrix(&self, a: &CsrMatrix) -> CsrMatrix {
        let e: Vec<_> = a
            .iter()
            .filter_map(|(i, j, v)| {
                let (ri, si) = self.map[i]?;
                let (rj, sj) = self.map[j]?;
                Some((ri, rj, si * sj * v))
            })
            .collect();
        CsrMatrix::from_entries(self.size, self.size, &e)
    }

    pub fn reduce_vec(&self, b: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.size];
        for (i, m) in self.map.iter().enumerate() {
            if let Some((ri, s)) = m {
                r[*ri] += s * b[i];
            }
        }
        r
    }

    pub fn expand(&self, y: &[f64]) -> Vec<f64> {
        self.map.iter().map(|m| m.map_or(0.0, |(ri, s)| s * y[ri])).collect()
    }
}

/// Unknown ordering of the reduced saddle system:
/// `[free velocity | pressure | pressure-mean multiplier | constraint multipliers]`.
#[derive(Clone, Debug)]
pub struct SaddleLayout {
    pub n_velocity: usize,
    pub n_pressure: usize,
    pub n_constraints: usize,
    /// Position of each velocity dof among the unknowns, `None` when fixed.
    pub index: Vec<Option<usize>>,
    pub free: Vec<usize>,
}

impl SaddleLayout {
    pub fn new(fixed: &[bool], n_pressure: usize, n_constraints: usize) -> Self {
        let mut index = vec![None; fixed.len()];
        let mut free = Vec::new();
        for (d, &f) in fixed.iter().enumerate() {
            if !f {
                index[d] = Some(free.len());
                free.push(d);
            }
        }
        Self { n_velocity: fixed.len(), n_pressure, n_constraints, index, free }
    }

    pub fn n_free(&self) -> usize {
        self.free.len()
    }

    pub fn pressure_offset(&self) -> usize {
        self.free.len()
    }

    pub fn mean_index(&self) -> usize {
        self.free.len() + self.n_pressure
    }

    pub fn constraint_offset(&self) -> usize {
        self.mean_index() + 1
    }

    pub fn size(&self) -> usize {
        self.constraint_offset() + self.n_constraints
    }

    /// Assemble
    /// `[K_ff, -B_f^T, 0, C_f^T; -B_f, 0, m, 0; 0, m^T, 0, 0; C_f, 0, 0, 0]`.
    pub fn matrix(&self, k: &CsrMatrix, b: &CsrMatrix, mean: &[f64], constraints: &[Constraint]) -> CsrMatrix {
        let mut e = Vec::with_capacity(k.nnz() + 2 * b.nnz() + 2 * mean.len());
        for (i, j, v) in k.iter() {
            if let (Some(a), Some(c)) = (self.index[i], self.index[j]) {
                e.push((a, c, v));
            }
        }
        let po = self.pressure_offset();
        for (q, j, v) in b.iter() {
            if let Some(c) = self.index[j] {
                e.push((po + q, c, -v));
                e.push((c, po + q, -v));
            }
        }
        let mi = self.mean_index();
        for (q, &m) in mean.iter().enumerate() {
            e.push((po + q, mi, m));
            e.push((mi, po + q, m));
        }
        let co = self.constraint_offset();
        for (r, c) in constraints.iter().enumerate() {
            for &(j, v) in &c.terms {
                if let Some(col) = self.index[j] {
                    e.push((co + r, col, v));
                    e.push((col, co + r, v));
                }
            }
        }
        CsrMatrix::from_entries(self.size(), self.size(), &e)
    }

    /// Right-hand side for the full state with fixed velocity values `fixed`.
    pub fn rhs(&self, k: &CsrMatrix, b: &CsrMatrix, load: &[f64], fixed: &[f64], constraints: &[Constraint]) -> Vec<f64> {
        let mut r = vec![0.0; self.size()];
        let kf = k.mul_vec(fixed);
        for (pos, &d) in self.free.iter().enumerate() {
            r[pos] = load[d] - kf[d];
        }
        let bf = b.mul_vec(fixed);
        let po = self.pressure_offset();
        for q in 0..self.n_pressure {
            r[po + q] = bf[q];
        }
        let co = self.constraint_offset();
        for (i, c) in constraints.iter().enumerate() {
            r[co + i] = c.target - c.apply(fixed);
        }
        r
    }

    /// Split an unknown vector into full velocity, pressure, mean multiplier
    /// and constraint multipliers.
    pub fn unpack(&self, x: &[f64], fixed: &[f64]) -> (Vec<f64>, Vec<f64>, f64, Vec<f64>) {
        let mut u = fixed.to_vec();
        for (pos, &d) in self.free.iter().enumerate() {
            u[d] = x[pos];
        }
        let po = self.pressure_offset();
        let p = x[po..po + self.n_pressure].to_vec();
        let co = self.constraint_offset();
        (u, p, x[self.mean_index()], x[co..co + self.n_constraints].to_vec())
    }

    /// Inverse of [`unpack`](Self::unpack) (fixed entries of `u` are dropped).
    pub fn pack(&self, u: &[f64], p: &[f64], mu: f64, lambda: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.size()];
        for (pos, &d) in self.free.iter().enumerate() {
            x[pos] = u[d];
        }
        let po = self.pressure_offset();
        x[po..po + self.n_pressure].copy_from_slice(p);
        x[self.mean_index()] = mu;
        let co = self.constraint_offset();
        x[co..co + self.n_constraints].copy_from_slice(lambda);
        x
    }
}
