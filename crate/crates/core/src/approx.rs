//! Weighted L² projection, interpolation at mapped Gauss nodes, weighted norms,
//! and closed-form expansions of `t^r (-log t)^k`.

use crate::error::{domain, Error, Result};
use crate::laguerre::{jacobi_gauss, laguerre_gauss, Measure, QuadratureRule};
use crate::logbasis::{gamma_norm, gauss_glof, glof_eval_all, BasisParams, Expansion};
use crate::special::factorial;

/// Weight `(-log t)^log_exp t^alg_exp` on (0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub log_exp: f64,
    pub alg_exp: f64,
}

impl WeightSpec {
    pub fn new(log_exp: f64, alg_exp: f64) -> Result<Self> {
        if !(log_exp > -1.0) || !alg_exp.is_finite() {
            return domain(format!("weight needs log_exp > -1 and finite alg_exp (got {log_exp}, {alg_exp})"));
        }
        Ok(Self { log_exp, alg_exp })
    }

    /// The weight natural to a GLOF family, `(-log t)^alpha t^lambda`.
    pub fn of(params: &BasisParams) -> Self {
        Self { log_exp: params.alpha, alg_exp: params.lambda }
    }

    /// Unweighted Lebesgue measure on (0, 1).
    pub fn uniform() -> Self {
        Self { log_exp: 0.0, alg_exp: 0.0 }
    }
}

/// `f(t) = t^r (-log t)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularMonomial {
    pub r: f64,
    pub k: u32,
}

impl SingularMonomial {
    pub fn new(r: f64, k: u32) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return domain(format!("singular monomial needs finite r >= 0 (got {r})"));
        }
        Ok(Self { r, k })
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t == 0.0 {
            return if self.r == 0.0 && self.k == 0 {
                1.0
            } else if self.r > 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let l = -t.ln();
        (self.r * t.ln()).exp() * l.powi(self.k as i32)
    }

    /// `s = (beta + lambda + 2r + 2) / (2 beta + 2)`.
    pub fn s(&self, params: &BasisParams) -> f64 {
        (params.beta + params.lambda + 2.0 * self.r + 2.0) / (2.0 * params.beta + 2.0)
    }

    /// `R = |(2r + lambda - beta) / (2r + 2 + lambda + beta)|`.
    pub fn ratio(&self, params: &BasisParams) -> f64 {
        ((2.0 * self.r + params.lambda - params.beta) / (2.0 * self.r + 2.0 + params.lambda + params.beta)).abs()
    }

    fn check(&self, params: &BasisParams) -> Result<()> {
        if params.lambda <= -1.0 - 2.0 * self.r {
            return domain(format!(
                "t^{}(-log t)^{} is not square integrable for lambda = {} (need lambda > {})",
                self.r,
                self.k,
                params.lambda,
                -1.0 - 2.0 * self.r
            ));
        }
        Ok(())
    }
}

/// Default extra quadrature points for [`project`].
pub fn default_oversample(n: usize) -> usize {
    n + 16
}

fn sample<F: Fn(f64) -> f64>(f: &F, rule: &QuadratureRule, context: &str) -> Result<Vec<f64>> {
    rule.nodes()
        .iter()
        .map(|&t| {
            let v = f(t);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::NonFinite { value: v, at: t, context: context.to_string() })
            }
        })
        .collect()
}

/// `gamma_n^{-1} sum_j v_j S_n(t_j) chi_j` for `n = 0..=n_max`.
pub(crate) fn discrete_transform(
    params: &BasisParams,
    n_max: usize,
    rule: &QuadratureRule,
    values: &[f64],
) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; n_max + 1];
    for ((&t, &w), &v) in rule.nodes().iter().zip(rule.weights()).zip(values) {
        if w == 0.0 || v == 0.0 {
            continue;
        }
        let s = glof_eval_all(params, n_max, t)?;
        for (a, sn) in acc.iter_mut().zip(&s) {
            *a += v * w * sn;
        }
    }
    for (n, a) in acc.iter_mut().enumerate() {
        *a /= gamma_norm(n, params.alpha, params.beta);
    }
    Ok(acc)
}

/// Orthogonal projection onto `S_0..S_n` in the `(-log t)^alpha t^lambda` inner
/// product, integrated with `n + 1 + oversample` Gauss-GLOF points.
pub fn project<F: Fn(f64) -> f64>(params: &BasisParams, n: usize, f: F, oversample: usize) -> Result<Expansion> {
    let rule = gauss_glof(params, n + oversample)?;
    let values = sample(&f, &rule, "projection")?;
    Expansion::plain(*params, discrete_transform(params, n, &rule, &values)?)
}

/// Interpolant at the `n + 1` mapped Gauss nodes, returned in modal form.
pub fn interpolate<F: Fn(f64) -> f64>(params: &BasisParams, n: usize, f: F) -> Result<Expansion> {
    let rule = gauss_glof(params, n)?;
    let values = sample(&f, &rule, "interpolation")?;
    Expansion::plain(*params, discrete_transform(params, n, &rule, &values)?)
}

/// Interpolant from values already sampled at the nodes of `gauss_glof(params, n)`.
pub fn interpolate_values(params: &BasisParams, n: usize, values: &[f64]) -> Result<Expansion> {
    let rule = gauss_glof(params, n)?;
    if values.len() != rule.len() {
        return Err(Error::Mismatch(format!("{} values for {} nodes", values.len(), rule.len())));
    }
    Expansion::plain(*params, discrete_transform(params, n, &rule, values)?)
}

/// `sqrt(sum_j f(t_j)^2 chi_j)`.
pub fn weighted_norm<F: Fn(f64) -> f64>(f: F, w: WeightSpec, quad: &QuadratureRule) -> Result<f64> {
    match quad.measure().unit_interval_weight() {
        Some((a, l)) if a == w.log_exp && l == w.alg_exp => {}
        _ => {
            return Err(Error::Mismatch(format!(
                "rule measure {:?} does not match weight (-log t)^{} t^{}",
                quad.measure(),
                w.log_exp,
                w.alg_exp
            )))
        }
    }
    let mut sum = 0.0;
    for (t, c) in quad.iter() {
        let v = f(t);
        if !v.is_finite() {
            return Err(Error::NonFinite { value: v, at: t, context: "weighted norm".into() });
        }
        sum += v * v * c;
    }
    Ok(sum.sqrt())
}

/// Weighted distance between `f` and an expansion.
pub fn weighted_error<F: Fn(f64) -> f64>(f: F, e: &Expansion, w: WeightSpec, quad: &QuadratureRule) -> Result<f64> {
    let c = e.plain_coeffs();
    let mut sum = 0.0;
    weighted_norm(|_| 0.0, w, quad)?;
    for (t, wt) in quad.iter() {
        let s = glof_eval_all(e.params(), c.len() - 1, t)?;
        let p: f64 = c.iter().zip(&s).map(|(a, b)| a * b).sum();
        let d = f(t) - p;
        if !d.is_finite() {
            return Err(Error::NonFinite { value: d, at: t, context: "weighted error".into() });
        }
        sum += d * d * wt;
    }
    Ok(sum.sqrt())
}

const PANEL_POINTS: usize = 32;
const PANEL_Y_MAX: f64 = 700.0;

/// Composite rule for `(-log t)^alpha t^lambda dt` built from Gauss panels in
/// `y = -log t`: Gauss-Jacobi on the first panel, then Gauss-Legendre on
/// dyadic panels up to 1, width 1/2 up to 40 and width 4 up to 700.
///
/// It does not depend on any mapping parameter, so it measures errors of
/// functions outside every GLOF class.
pub fn reference_rule(w: WeightSpec) -> Result<QuadratureRule> {
    if !(w.alg_exp > -1.0) {
        return domain(format!("reference rule needs lambda > -1 (got {})", w.alg_exp));
    }
    let alpha = w.log_exp;
    let decay = w.alg_exp + 1.0;
    let gl = jacobi_gauss(0.0, 0.0, PANEL_POINTS - 1)?;
    let head = jacobi_gauss(0.0, alpha, PANEL_POINTS - 1)?;
    let mut edges = vec![0.0, 2f64.powi(-10)];
    for p in -9..=0 {
        edges.push(2f64.powi(p));
    }
    let mut y = 1.0;
    while y < 40.0 {
        y += 0.5;
        edges.push(y);
    }
    while y < PANEL_Y_MAX {
        y += 4.0;
        edges.push(y);
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let h0 = edges[1];
    for (x, wx) in head.iter() {
        let yy = 0.5 * h0 * (x + 1.0);
        nodes.push((-yy).exp());
        weights.push(wx * (0.5 * h0).powf(alpha + 1.0) * (-decay * yy).exp());
    }
    for win in edges[1..].windows(2) {
        let (a, b) = (win[0], win[1]);
        let half = 0.5 * (b - a);
        for (x, wx) in gl.iter() {
            let yy = a + half * (x + 1.0);
            nodes.push((-yy).exp());
            weights.push(wx * half * yy.powf(alpha) * (-decay * yy).exp());
        }
    }
    Ok(QuadratureRule::from_parts(nodes, weights, Measure::Composite { alpha, lambda: w.alg_exp }))
}

/// Exact expansion coefficient of `t^r (-log t)^k` on `S_n^{(alpha,beta,lambda)}`.
pub fn singular_coeff(m: SingularMonomial, params: &BasisParams, n: usize) -> Result<f64> {
    m.check(params)?;
    let s = m.s(params);
    let k = m.k as usize;
    let alpha = params.alpha;
    let bp1 = params.beta + 1.0;
    if n <= k {
        return singular_coeff_quadrature(m, params, n, s);
    }
    // integral of y^{alpha+k} e^{-s y} L_n(y), expanded by Leibniz's rule
    let q = (s - 1.0) / s;
    let nf = n as f64;
    let mut sum = 0.0;
    for j in 0..=k {
        let falling: f64 = (0..j).map(|i| nf - i as f64).product();
        let rising: f64 = (1..=k - j).map(|i| nf + alpha + i as f64).product();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * falling * rising / (factorial(j) * factorial(k - j)) * q.powi((n - j) as i32);
    }
    let scale = factorial(k) * bp1.powi(-(k as i32)) * s.powf(-(alpha + k as f64 + 1.0));
    Ok(scale * sum)
}

/// Low-index coefficients: the substitution `z = s y` turns the integral into a
/// Laguerre moment of a degree-`n` polynomial, integrated exactly.
fn singular_coeff_quadrature(m: SingularMonomial, params: &BasisParams, n: usize, s: f64) -> Result<f64> {
    let k = m.k as f64;
    let alpha = params.alpha;
    let rule = laguerre_gauss(alpha + k, n / 2 + 1)?;
    let mut integral = 0.0;
    for (z, w) in rule.iter() {
        integral += w * crate::laguerre::laguerre_eval_all(alpha, n, z / s)?[n];
    }
    integral *= s.powf(-(alpha + k + 1.0));
    let norm = gamma_norm(n, alpha, params.beta) * (params.beta + 1.0).powf(alpha + 1.0);
    Ok((params.beta + 1.0).powf(-k) * integral / norm)
}

/// Result of [`projection_error_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    /// Geometric rate `R`.
    pub ratio: f64,
    /// Upper bound on the weighted projection error at the requested `N`.
    pub bound: f64,
    /// Degrees above which the bound holds.
    pub threshold: f64,
}

/// Explicit projection-error envelope for `t^r (-log t)^k`.
///
/// For `alpha = lambda = 0` the sharper uniform-weight form
/// `sqrt(2)^k (beta+1)^{-k} k! N^k sqrt(2(beta+1)N) R^{N-k}` is returned.
pub fn projection_error_bound(m: SingularMonomial, params: &BasisParams, n: usize) -> Result<ErrorBound> {
    m.check(params)?;
    params.require_vanishing_at_zero()?;
    let ratio = m.ratio(params);
    let k = m.k as f64;
    let alpha = params.alpha;
    let nf = n as f64;
    let threshold = if ratio == 0.0 { 0.0 } else { -(2.0 * k + alpha + 2.0) / (2.0 * ratio.ln()) };
    if !(nf > threshold) {
        return domain(format!("N = {n} is not above the validity threshold {threshold:.3} (R = {ratio})"));
    }
    if ratio == 0.0 {
        return Ok(ErrorBound { ratio, bound: 0.0, threshold });
    }
    let bp1 = params.beta + 1.0;
    let kk = m.k as usize;
    let bound = if alpha == 0.0 && params.lambda == 0.0 {
        2f64.sqrt().powi(m.k as i32)
            * bp1.powf(-k)
            * factorial(kk)
            * nf.powf(k)
            * (2.0 * bp1 * nf).sqrt()
            * ratio.powf(nf - k)
    } else {
        let c = (2f64.powf(alpha + 1.0 + k) * bp1.powf(2.0 * alpha + 2.0 - k)
            / (params.beta + params.lambda + 2.0 * m.r + 2.0).powf(alpha + 1.0 + k))
        .sqrt();
        c * factorial(kk + 1) * nf.powf((alpha + 1.0) / 2.0 + k) * ratio.powf(nf)
    };
    Ok(ErrorBound { ratio, bound, threshold })
}

/// Weighted tail `sqrt(sum_{n > N} gamma_n fhat_n^2)` from the closed-form
/// coefficients, summed until the terms stop contributing.
pub fn singular_tail_norm(m: SingularMonomial, params: &BasisParams, n: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut j = n + 1;
    let mut quiet = 0;
    while quiet < 20 && j < n + 5000 {
        let c = singular_coeff(m, params, j)?;
        let term = gamma_norm(j, params.alpha, params.beta) * c * c;
        sum += term;
        if term <= 1e-18 * sum || term == 0.0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
        j += 1;
    }
    Ok(sum.sqrt())
}
