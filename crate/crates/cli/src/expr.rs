//! Scalar fields given either as numbers or as arithmetic expressions in
//! `r`, `theta`, `t`, `x1`, `x2`.

use std::sync::Arc;

use serde::Deserialize;
use slipflow::Error;

thread_local! {
    static BUILTINS: meval::Context<'static> = meval::Context::new();
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Scalar {
    Value(f64),
    Expr(String),
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::Value(0.0)
    }
}

/// Compiled expression, cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Compiled(Arc<meval::Expr>);

impl Compiled {
    pub fn parse(src: &str, what: &str) -> Result<Self, Error> {
        let e: meval::Expr = src.parse().map_err(|e| Error::Config(format!("{what}: cannot parse '{src}': {e}")))?;
        let c = Self(Arc::new(e));
        // surface unknown variables and functions now rather than mid-solve
        c.try_eval(1.0, 0.5, 0.25, [0.5, 0.75]).map_err(|e| Error::Config(format!("{what}: '{src}': {e}")))?;
        Ok(c)
    }

    fn try_eval(&self, r: f64, theta: f64, t: f64, x: [f64; 2]) -> Result<f64, meval::Error> {
        let vars = [("r", r), ("theta", theta), ("t", t), ("x1", x[0]), ("x2", x[1])];
        BUILTINS.with(|b| self.0.eval_with_context((vars, b)))
    }

    /// Evaluate at a point; `t` is the curve parameter (0 inside the domain).
    pub fn eval(&self, x: [f64; 2], t: f64) -> f64 {
        self.try_eval(x[0].hypot(x[1]), x[1].atan2(x[0]), t, x).expect("expression checked at parse time")
    }
}

/// Number or compiled expression.
#[derive(Clone)]
pub enum Field {
    Constant(f64),
    Expr(Compiled),
}

impl Field {
    pub fn from_scalar(s: &Scalar, what: &str) -> Result<Self, Error> {
        match s {
            Scalar::Value(v) if v.is_finite() => Ok(Field::Constant(*v)),
            Scalar::Value(v) => Err(Error::Config(format!("{what}: value {v} is not finite"))),
            Scalar::Expr(e) => Ok(Field::Expr(Compiled::parse(e, what)?)),
        }
    }

    pub fn eval(&self, x: [f64; 2], t: f64) -> f64 {
        match self {
            Field::Constant(c) => *c,
            Field::Expr(e) => e.eval(x, t),
        }
    }
}

/// Constant expression such as `2*pi` (no variables).
pub fn constant(src: &str, what: &str) -> Result<f64, Error> {
    meval::eval_str(src).map_err(|e| Error::Config(format!("{what}: '{src}': {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variables_and_functions() {
        let c = Compiled::parse("x1 * cos(theta) + r^2 - t", "test").unwrap();
        let v = c.eval([3.0, 4.0], 0.5);
        assert!((v - (3.0 * 0.6 + 25.0 - 0.5)).abs() < 1e-12);
        assert!(Compiled::parse("y + 1", "test").is_err());
        assert!(Compiled::parse("1 +", "test").is_err());
        assert!((constant("2*pi", "pin").unwrap() - 2.0 * std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn scalar_json() {
        let v: Vec<Scalar> = serde_json::from_str(r#"[1.5, "sin(theta)"]"#).unwrap();
        assert_eq!(v, vec![Scalar::Value(1.5), Scalar::Expr("sin(theta)".into())]);
    }
}
