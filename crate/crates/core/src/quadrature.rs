//! Quadrature rules on the unit interval and on the reference triangle
//! `{(xi, eta) : xi, eta >= 0, xi + eta <= 1}`.

/// Gauss-Legendre nodes and weights mapped to `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A quadrature rule on the reference triangle. Weights sum to 1/2.
#[derive(Clone, Debug)]
pub struct TriangleRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    /// Symmetric 7-point rule, exact for degree 5.
    pub fn degree5() -> Self {
        let a1 = 0.059_715_871_789_769_820_4;
        let b1 = 0.470_142_064_105_115_089_8;
        let w1 = 0.132_394_152_788_506_180_7;
        let a2 = 0.797_426_985_353_087_322_3;
        let b2 = 0.101_286_507_323_456_338_8;
        let w2 = 0.125_939_180_544_827_152_6;
        let mut rule = Self { points: vec![[1.0 / 3.0, 1.0 / 3.0]], weights: vec![0.225], degree: 5 };
        rule.push_orbit3(a1, b1, w1);
        rule.push_orbit3(a2, b2, w2);
        rule.halve();
        rule
    }

    /// Symmetric 12-point rule, exact for degree 6.
    pub fn degree6() -> Self {
        let mut rule = Self { points: Vec::new(), weights: Vec::new(), degree: 6 };
        rule.push_orbit3(0.501_426_509_658_179, 0.249_286_745_170_910, 0.116_786_275_726_379);
        rule.push_orbit3(0.873_821_971_016_996, 0.063_089_014_491_502, 0.050_844_906_370_207);
        let (a, b, c) = (0.053_145_049_844_817, 0.310_352_451_033_784, 0.636_502_499_121_399);
        for (x, y) in [(a, b), (b, a), (a, c), (c, a), (b, c), (c, b)] {
            rule.points.push([x, y]);
            rule.weights.push(0.082_851_075_618_374);
        }
        rule.halve();
        rule
    }

    /// Collapsed Gauss product rule with `n * n` points, exact for degree `2n - 2`.
    pub fn collapsed(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let u = x[i];
                points.push([u, (1.0 - u) * x[j]]);
                weights.push(w[i] * w[j] * (1.0 - u));
            }
        }
        Self { points, weights, degree: 2 * n - 2 }
    }

    fn push_orbit3(&mut self, a: f64, b: f64, w: f64) {
        // barycentric (a, b, b) and its rotations; stored as (lambda1, lambda2)
        for (l1, l2) in [(b, b), (a, b), (b, a)] {
            self.points.push([l1, l2]);
            self.weights.push(w);
        }
    }

    fn halve(&mut self) {
        for w in &mut self.weights {
            *w *= 0.5;
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    fn exact_monomial(a: u32, b: u32) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    fn check_rule(rule: &TriangleRule) {
        let deg = rule.degree as u32;
        for a in 0..=deg {
            for b in 0..=(deg - a) {
                let q: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(p, w)| w * p[0].powi(a as i32) * p[1].powi(b as i32))
                    .sum();
                let e = exact_monomial(a, b);
                assert!((q - e).abs() < 1e-13, "x^{a} y^{b}: {q} vs {e}");
            }
        }
    }

    #[test]
    fn triangle_rules_integrate_monomials() {
        check_rule(&TriangleRule::degree5());
        check_rule(&TriangleRule::degree6());
        check_rule(&TriangleRule::collapsed(5));
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            for k in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }
}
