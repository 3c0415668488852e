use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{boundary_integral, boundary_quadrature_params, frame_at, BoundarySample, DomainSpec, Point};

type ScalarFn = Arc<dyn Fn(&BoundarySample) -> f64 + Send + Sync>;
type VectorFn = Arc<dyn Fn(Point) -> Point + Send + Sync>;

/// Scalar boundary datum on one component.
#[derive(Clone)]
pub enum BoundaryValue {
    Constant(f64),
    Function(ScalarFn),
}

impl fmt::Debug for BoundaryValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryValue::Constant(c) => write!(f, "Constant({c})"),
            BoundaryValue::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl BoundaryValue {
    pub fn eval(&self, s: &BoundarySample) -> f64 {
        match self {
            BoundaryValue::Constant(c) => *c,
            BoundaryValue::Function(g) => g(s),
        }
    }
}

/// One [`BoundaryValue`] per boundary component.
#[derive(Clone, Debug)]
pub struct BoundaryField {
    values: Vec<BoundaryValue>,
}

impl BoundaryField {
    pub fn zero(components: usize) -> Self {
        Self { values: vec![BoundaryValue::Constant(0.0); components] }
    }

    pub fn constants(values: &[f64]) -> Self {
        Self { values: values.iter().map(|&c| BoundaryValue::Constant(c)).collect() }
    }

    pub fn from_values(values: Vec<BoundaryValue>) -> Self {
        Self { values }
    }

    /// Same function on every component.
    pub fn function(components: usize, g: impl Fn(&BoundarySample) -> f64 + Send + Sync + 'static) -> Self {
        let g: ScalarFn = Arc::new(g);
        Self { values: vec![BoundaryValue::Function(g); components] }
    }

    pub fn components(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, component: usize) -> &BoundaryValue {
        &self.values[component]
    }

    pub fn set(&mut self, component: usize, value: BoundaryValue) {
        self.values[component] = value;
    }

    pub fn eval(&self, s: &BoundarySample) -> f64 {
        self.values[s.component].eval(s)
    }

    /// Values at the default boundary quadrature parameters of every component.
    pub fn samples(&self, domain: &DomainSpec) -> Vec<(BoundarySample, f64)> {
        let params = boundary_quadrature_params(16, 8);
        let mut out = Vec::new();
        for j in 0..domain.components() {
            for &t in &params {
                let frame = frame_at(domain, j, t).expect("regular curve");
                let s = BoundarySample { component: j, t, frame };
                out.push((s, self.eval(&s)));
            }
        }
        out
    }

    /// Whether the field vanishes at every boundary quadrature point.
    pub fn vanishes(&self, domain: &DomainSpec) -> bool {
        if self.values.iter().all(|v| matches!(v, BoundaryValue::Constant(c) if *c == 0.0)) {
            return true;
        }
        self.samples(domain).iter().all(|(_, v)| *v == 0.0)
    }

    pub fn integral(&self, domain: &DomainSpec, component: usize) -> f64 {
        let v = &self.values[component];
        boundary_integral(domain, component, |s| v.eval(s))
    }

    pub fn max_abs(&self, domain: &DomainSpec) -> f64 {
        self.samples(domain).iter().fold(0.0, |m, (_, v)| m.max(v.abs()))
    }
}

/// Volume force.
#[derive(Clone, Default)]
pub struct BodyForce(Option<VectorFn>);

impl fmt::Debug for BodyForce {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "BodyForce(zero)"),
            Some(_) => write!(f, "BodyForce(..)"),
        }
    }
}

impl BodyForce {
    pub fn zero() -> Self {
        Self(None)
    }

    pub fn field(f: impl Fn(Point) -> Point + Send + Sync + 'static) -> Self {
        Self(Some(Arc::new(f)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_none()
    }

    pub fn eval(&self, x: Point) -> Point {
        match &self.0 {
            None => [0.0, 0.0],
            Some(f) => f(x),
        }
    }
}

/// Physical data of the slip problem: viscosity, force, friction, normal
/// datum `a` and tangential boundary traction density `b_tau`.
#[derive(Clone, Debug)]
pub struct ProblemData {
    pub nu: f64,
    pub force: BodyForce,
    pub beta: BoundaryField,
    pub normal: BoundaryField,
    pub traction: BoundaryField,
}

impl ProblemData {
    /// Zero data with viscosity `nu` on a domain with `components` boundary curves.
    pub fn new(nu: f64, components: usize) -> Self {
        Self {
            nu,
            force: BodyForce::zero(),
            beta: BoundaryField::zero(components),
            normal: BoundaryField::zero(components),
            traction: BoundaryField::zero(components),
        }
    }

    pub fn with_beta(mut self, beta: BoundaryField) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_normal(mut self, normal: BoundaryField) -> Self {
        self.normal = normal;
        self
    }

    pub fn with_traction(mut self, traction: BoundaryField) -> Self {
        self.traction = traction;
        self
    }

    pub fn with_force(mut self, force: BodyForce) -> Self {
        self.force = force;
        self
    }

    /// Per-component fluxes and their sum.
    pub fn fluxes(&self, domain: &DomainSpec) -> (Vec<f64>, f64) {
        let per: Vec<f64> = (0..domain.components()).map(|j| self.normal.integral(domain, j)).collect();
        let total = per.iter().sum();
        (per, total)
    }

    /// Tolerance on the total flux: `1e-8 * max|a| * |boundary|`.
    pub fn flux_tolerance(&self, domain: &DomainSpec) -> f64 {
        let perimeter: f64 = (0..domain.components()).map(|j| domain.length(j)).sum();
        1e-8 * self.normal.max_abs(domain).max(f64::MIN_POSITIVE) * perimeter
    }

    /// Check viscosity, component counts, friction sign and flux compatibility.
    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return Err(Error::Data(format!("viscosity must be positive, got {}", self.nu)));
        }
        let n = domain.components();
        for (name, f) in [("beta", &self.beta), ("normal datum", &self.normal), ("traction", &self.traction)] {
            if f.components() != n {
                return Err(Error::Data(format!("{name} has {} components, domain has {n}", f.components())));
            }
        }
        for (s, b) in self.beta.samples(domain) {
            if !(b >= 0.0) {
                return Err(Error::Data(format!(
                    "friction coefficient is {b} < 0 on component {} at t = {:.6}",
                    s.component, s.t
                )));
            }
        }
        self.check_flux(domain)
    }

    pub fn check_flux(&self, domain: &DomainSpec) -> Result<()> {
        let (_, total) = self.fluxes(domain);
        let tolerance = self.flux_tolerance(domain);
        if total.abs() > tolerance {
            return Err(Error::Compatibility { total, tolerance });
        }
        Ok(())
    }
}
