//! Log orthogonal functions (LOFs) and their generalized form (GLOFs) on (0, 1).
//!
//! With `y(t) = -(beta + 1) log t` the GLOFs are
//!
//! ```text
//! S_n^{(alpha,beta,lambda)}(t) = t^{(beta-lambda)/2} L_n^{(alpha)}(y(t)),
//! ```
//!
//! orthogonal under `(-log t)^alpha t^lambda`. The LOF family is the special
//! case `lambda = beta`.

use crate::error::{domain, Error, Result};
use crate::laguerre::{laguerre_gauss_log, Measure, QuadratureRule};
use crate::special::ln_gamma;

/// Points below this are clamped before evaluation.
pub const MIN_T: f64 = 1e-300;

/// The triple `(alpha, beta, lambda)` defining a GLOF family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisParams {
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

impl BasisParams {
    pub fn new(alpha: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !(alpha > -1.0) || !(beta > -1.0) || !lambda.is_finite() {
            return domain(format!(
                "basis parameters need alpha > -1, beta > -1, finite lambda (got {alpha}, {beta}, {lambda})"
            ));
        }
        Ok(Self { alpha, beta, lambda })
    }

    /// The LOF family, `lambda = beta`.
    pub fn lof(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, beta, beta)
    }

    /// Exponent `(beta - lambda) / 2` of the algebraic prefactor.
    pub fn algebraic_exponent(&self) -> f64 {
        0.5 * (self.beta - self.lambda)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.beta, self.lambda)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, lambda)
    }

    /// `y(t) = -(beta + 1) log t`.
    pub fn map(&self, t: f64) -> f64 {
        -(self.beta + 1.0) * t.ln()
    }

    pub(crate) fn require_vanishing_at_zero(&self) -> Result<()> {
        if self.beta > self.lambda {
            Ok(())
        } else {
            domain(format!(
                "functions must vanish at t = 0, which needs beta > lambda (beta = {}, lambda = {})",
                self.beta, self.lambda
            ))
        }
    }
}

/// Where an evaluation point lands after validation.
enum Point {
    Zero,
    Interior { log_t: f64 },
}

fn classify(t: f64) -> Result<Point> {
    if !(0.0..=1.0).contains(&t) {
        return domain(format!("evaluation point t = {t} outside [0, 1]"));
    }
    if t == 0.0 {
        return Ok(Point::Zero);
    }
    if t < MIN_T {
        log::debug!("t = {t:e} clamped to {MIN_T:e}");
        return Ok(Point::Interior { log_t: MIN_T.ln() });
    }
    Ok(Point::Interior { log_t: t.ln() })
}

/// Laguerre values of degree `0..=n` at `y = -(beta+1) log t`, driven by `log t`.
fn laguerre_in_log(alpha: f64, beta: f64, n: usize, log_t: f64, out: &mut Vec<f64>) {
    out.clear();
    // (beta+1) log t = -y; at t = 1 this is exactly zero
    let s = (beta + 1.0) * log_t;
    out.push(1.0);
    if n >= 1 {
        out.push(alpha + 1.0 + s);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 + s) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
}

/// `t^{-(beta-lambda)/2} S_k(t)` for `k = 0..=n`, from `log t`.
pub(crate) fn glof_poly_log(params: &BasisParams, n: usize, log_t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    laguerre_in_log(params.alpha, params.beta, n, log_t, &mut out);
    out
}

/// `t^{1-(beta-lambda)/2} S_k'(t)` for `k = 0..=n`, from `log t`.
pub(crate) fn glof_deriv_poly_log(params: &BasisParams, n: usize, log_t: f64) -> Vec<f64> {
    let gamma = params.algebraic_exponent();
    let bp1 = params.beta + 1.0;
    let mut base = Vec::with_capacity(n + 1);
    let mut shifted = Vec::with_capacity(n);
    laguerre_in_log(params.alpha, params.beta, n, log_t, &mut base);
    laguerre_in_log(params.alpha + 1.0, params.beta, n.saturating_sub(1), log_t, &mut shifted);
    (0..=n).map(|k| gamma * base[k] + if k == 0 { 0.0 } else { bp1 * shifted[k - 1] }).collect()
}

/// `S_0(t), ..., S_n(t)` for the family `params`.
///
/// At `t = 0` the limit is returned when it exists: zero for `beta > lambda`,
/// and `S_0 = 1` for `beta = lambda`.
pub fn glof_eval_all(params: &BasisParams, n: usize, t: f64) -> Result<Vec<f64>> {
    let gamma = params.algebraic_exponent();
    match classify(t)? {
        Point::Zero => {
            if gamma > 0.0 {
                Ok(vec![0.0; n + 1])
            } else if gamma == 0.0 && n == 0 {
                Ok(vec![1.0])
            } else {
                domain(format!("S_n^({},{},{}) has no finite limit at t = 0", params.alpha, params.beta, params.lambda))
            }
        }
        Point::Interior { log_t } => {
            let mut vals = Vec::with_capacity(n + 1);
            laguerre_in_log(params.alpha, params.beta, n, log_t, &mut vals);
            let scale = (gamma * log_t).exp();
            if scale != 1.0 {
                vals.iter_mut().for_each(|v| *v *= scale);
            }
            Ok(vals)
        }
    }
}

/// `d/dt S_k(t)` for `k = 0..=n`.
///
/// Uses `S_n' = ((beta-lambda)/2) S_n^{(alpha,beta,lambda+2)} + (beta+1) S_{n-1}^{(alpha+1,beta,lambda+2)}`.
pub fn glof_deriv_all(params: &BasisParams, n: usize, t: f64) -> Result<Vec<f64>> {
    let gamma = params.algebraic_exponent();
    match classify(t)? {
        Point::Zero => {
            if gamma > 1.0 {
                Ok(vec![0.0; n + 1])
            } else if gamma == 0.0 && n == 0 {
                Ok(vec![0.0])
            } else {
                domain(format!(
                    "derivative of S_n^({},{},{}) is unbounded at t = 0",
                    params.alpha, params.beta, params.lambda
                ))
            }
        }
        Point::Interior { log_t } => {
            let mut base = Vec::with_capacity(n + 1);
            let mut shifted = Vec::with_capacity(n);
            laguerre_in_log(params.alpha, params.beta, n, log_t, &mut base);
            laguerre_in_log(params.alpha + 1.0, params.beta, n.saturating_sub(1), log_t, &mut shifted);
            let scale = ((gamma - 1.0) * log_t).exp();
            let bp1 = params.beta + 1.0;
            Ok((0..=n)
                .map(|k| {
                    let lower = if k == 0 { 0.0 } else { bp1 * shifted[k - 1] };
                    scale * (gamma * base[k] + lower)
                })
                .collect())
        }
    }
}

/// `d/dt S_n(t)`.
pub fn glof_deriv(params: &BasisParams, n: usize, t: f64) -> Result<f64> {
    Ok(glof_deriv_all(params, n, t)?[n])
}

/// Squared weighted norm `Γ(n+α+1) / ((β+1)^{α+1} n!)`.
pub fn gamma_norm(n: usize, alpha: f64, beta: f64) -> f64 {
    let nf = n as f64;
    (ln_gamma(nf + alpha + 1.0) - ln_gamma(nf + 1.0) - (alpha + 1.0) * (beta + 1.0).ln()).exp()
}

/// Gauss-GLOF rule with `n + 1` points for `(-log t)^alpha t^lambda` on (0, 1).
///
/// Exact for `t^{beta-lambda} p(log t)` with `deg p <= 2n + 1`. Nodes are the
/// mapped Laguerre-Gauss nodes and decrease with the index.
pub fn gauss_glof(params: &BasisParams, n: usize) -> Result<QuadratureRule> {
    let (ys, log_w) = laguerre_gauss_log(params.alpha, n)?;
    let bp1 = params.beta + 1.0;
    let shift = -(params.alpha + 1.0) * bp1.ln();
    let mut nodes = Vec::with_capacity(ys.len());
    let mut weights = Vec::with_capacity(ys.len());
    for (y, lw) in ys.into_iter().zip(log_w) {
        let log_t = -y / bp1;
        nodes.push(log_t.exp());
        weights.push(((params.lambda - params.beta) * log_t + shift + lw).exp());
    }
    Ok(QuadratureRule::from_parts(
        nodes,
        weights,
        Measure::Glof { alpha: params.alpha, beta: params.beta, lambda: params.lambda },
    ))
}

/// Plain-basis stencil of `phi_n = (n/(n+alpha)) S_n - S_{n-1}`.
pub fn boundary_stencil(alpha: f64, n: usize) -> [(usize, f64); 2] {
    debug_assert!(n >= 1);
    [(n - 1, -1.0), (n, n as f64 / (n as f64 + alpha))]
}

/// `phi_n(t)`, which vanishes at both endpoints.
pub fn boundary_basis_eval(params: &BasisParams, n: usize, t: f64) -> Result<f64> {
    params.require_vanishing_at_zero()?;
    if n == 0 {
        return domain("boundary basis index starts at 1");
    }
    let vals = glof_eval_all(params, n, t)?;
    Ok(boundary_stencil(params.alpha, n).iter().map(|&(i, c)| c * vals[i]).sum())
}

/// Pseudo-derivative of `e` in the `(alpha+1, beta, lambda)` family.
pub fn pseudo_deriv_expansion(e: &Expansion) -> Result<Expansion> {
    e.pseudo_derivative()
}

/// Which basis an [`Expansion`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `S_0, ..., S_N`.
    Plain,
    /// `phi_1, ..., phi_N`; coefficient `i` multiplies `phi_{i+1}`.
    Boundary,
}

/// A finite combination of GLOFs (or boundary functions) on (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Expansion {
    params: BasisParams,
    coeffs: Vec<f64>,
    kind: BasisKind,
}

impl Expansion {
    pub fn plain(params: BasisParams, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Config("expansion needs at least one coefficient".into()));
        }
        Ok(Self { params, coeffs, kind: BasisKind::Plain })
    }

    pub fn boundary(params: BasisParams, coeffs: Vec<f64>) -> Result<Self> {
        params.require_vanishing_at_zero()?;
        if coeffs.is_empty() {
            return Err(Error::Config("boundary expansion needs at least one coefficient".into()));
        }
        Ok(Self { params, coeffs, kind: BasisKind::Boundary })
    }

    /// Single basis function `S_n` (plain) as an expansion.
    pub fn unit(params: BasisParams, n: usize) -> Self {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[n] = 1.0;
        Self { params, coeffs, kind: BasisKind::Plain }
    }

    pub fn params(&self) -> &BasisParams {
        &self.params
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Highest plain-basis index touched.
    pub fn degree(&self) -> usize {
        match self.kind {
            BasisKind::Plain => self.coeffs.len() - 1,
            BasisKind::Boundary => self.coeffs.len(),
        }
    }

    /// Coefficients in the plain basis `S_0..S_N`.
    pub fn plain_coeffs(&self) -> Vec<f64> {
        match self.kind {
            BasisKind::Plain => self.coeffs.clone(),
            BasisKind::Boundary => {
                let mut out = vec![0.0; self.coeffs.len() + 1];
                for (i, &c) in self.coeffs.iter().enumerate() {
                    for (idx, w) in boundary_stencil(self.params.alpha, i + 1) {
                        out[idx] += c * w;
                    }
                }
                out
            }
        }
    }

    pub fn to_plain(&self) -> Self {
        Self { params: self.params, coeffs: self.plain_coeffs(), kind: BasisKind::Plain }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let c = self.plain_coeffs();
        let vals = glof_eval_all(&self.params, c.len() - 1, t)?;
        Ok(c.iter().zip(&vals).map(|(a, b)| a * b).sum())
    }

    pub fn deriv(&self, t: f64) -> Result<f64> {
        let c = self.plain_coeffs();
        if c[1..].iter().all(|&x| x == 0.0) && self.params.algebraic_exponent() == 0.0 {
            return Ok(0.0);
        }
        let vals = glof_deriv_all(&self.params, c.len() - 1, t)?;
        Ok(c.iter().zip(&vals).map(|(a, b)| a * b).sum())
    }

    /// Pseudo-derivative `t^{1+g} d/dt (t^{-g} u)` with `g = (beta-lambda)/2`,
    /// expressed in the `(alpha+1, beta, lambda)` family: `c_n -> (beta+1) c_{n+1}`.
    pub fn pseudo_derivative(&self) -> Result<Self> {
        let c = self.plain_coeffs();
        let params = self.params.with_alpha(self.params.alpha + 1.0)?;
        let bp1 = self.params.beta + 1.0;
        let coeffs = if c.len() == 1 { vec![0.0] } else { c[1..].iter().map(|&x| bp1 * x).collect() };
        Ok(Self { params, coeffs, kind: BasisKind::Plain })
    }

    /// Same pseudo-derivative, kept in the original family through
    /// `S_{n-1}^{(alpha+1)} = sum_{l<n} S_l^{(alpha)}`.
    pub fn pseudo_derivative_in_family(&self) -> Self {
        let c = self.plain_coeffs();
        let bp1 = self.params.beta + 1.0;
        let mut out = vec![0.0; c.len()];
        let mut tail = 0.0;
        for l in (0..c.len()).rev() {
            out[l] = bp1 * tail;
            tail += c[l];
        }
        if out.len() > 1 {
            out.pop();
        }
        Self { params: self.params, coeffs: out, kind: BasisKind::Plain }
    }
}
