use crate::approx::{reference_rule, WeightSpec};
use crate::error::{Error, Result};
use crate::spacetime::legendre_eval_all;

/// Shifted-Legendre `L2(0, 1)` projection of degree `n`, used as the
/// polynomial baseline for pointwise comparisons.
#[derive(Debug, Clone)]
pub struct ShiftedLegendre {
    coeffs: Vec<f64>,
}

impl ShiftedLegendre {
    pub fn project<F: Fn(f64) -> f64>(f: F, n: usize) -> Result<Self> {
        let rule = reference_rule(WeightSpec::uniform())?;
        let mut coeffs = vec![0.0; n + 1];
        for (t, w) in rule.iter() {
            let v = f(t);
            if !v.is_finite() {
                return Err(Error::NonFinite { value: v, at: t, context: "Legendre projection".into() });
            }
            for (c, p) in coeffs.iter_mut().zip(legendre_eval_all(n, 2.0 * t - 1.0)) {
                *c += w * v * p;
            }
        }
        for (k, c) in coeffs.iter_mut().enumerate() {
            *c *= (2 * k + 1) as f64;
        }
        Ok(Self { coeffs })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let p = legendre_eval_all(self.coeffs.len() - 1, 2.0 * t - 1.0);
        self.coeffs.iter().zip(&p).map(|(c, v)| c * v).sum()
    }
}
