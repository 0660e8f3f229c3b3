//! Fractional integrals and derivatives of GLOF expansions.
//!
//! Caputo forms are evaluated through the substitution `s = t tau`,
//!
//! ```text
//! (CD^nu v, w) = 1/Γ(1-nu) ∫_0^1 w(t) t^{1-nu} ∫_0^1 v'(t tau) (1-tau)^{-nu} dtau dt,
//! ```
//!
//! with the inner integral split at `tau = 1/2`. The lower half uses a
//! Gauss-GLOF rule matched to the algebraic behavior of `v'` at zero, on a
//! short interval `(0, 2^{-m})`, and Gauss-Legendre panels on the dyadic
//! intervals between `2^{-m}` and `1/2`. The upper half is mapped to (-1, 1)
//! by `tau = (xi + 3)/4` and integrated by a Gauss-Jacobi rule carrying the
//! factor `(1 - xi)^{-nu}`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::laguerre::{jacobi_gauss, laguerre_gauss_log};
use crate::logbasis::{glof_deriv_poly_log, glof_poly_log, BasisKind, BasisParams, Expansion};
use crate::special::{gamma, ln_gamma, rgamma};

const ML_MAX_TERMS: usize = 500;
const ML_MAX_ARG: f64 = 50.0;

/// Which fractional operator an order refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FracKind {
    CaputoLeft,
    RlLeft,
    RlRight,
    IntegralLeft,
    IntegralRight,
}

/// Order and kind of a fractional operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    pub value: f64,
    pub kind: FracKind,
}

impl FracOrder {
    pub fn new(value: f64, kind: FracKind) -> Result<Self> {
        let ok = match kind {
            FracKind::IntegralLeft | FracKind::IntegralRight => value > 0.0 && value.is_finite(),
            _ => (value > 0.0 && value < 1.0) || (value > 1.0 && value < 2.0),
        };
        if !ok {
            return domain(format!("order {value} not admissible for {kind:?}"));
        }
        Ok(Self { value, kind })
    }
}

/// `E_gamma(z) = sum_j z^j / Γ(gamma j + 1)` by compensated series summation.
pub fn mittag_leffler(gamma_: f64, z: f64) -> Result<f64> {
    if !(gamma_ > 0.0) || !gamma_.is_finite() {
        return domain(format!("Mittag-Leffler parameter must be positive (got {gamma_})"));
    }
    if !(z.abs() <= ML_MAX_ARG) {
        return domain(format!("|z| = {} exceeds the series range {ML_MAX_ARG}", z.abs()));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut largest = 0.0f64;
    let ln_z = z.abs().ln();
    let mut prev = f64::INFINITY;
    for j in 0..ML_MAX_TERMS {
        let jf = j as f64;
        let g = gamma_ * jf + 1.0;
        let mag = if g < 170.0 { z.abs().powi(j as i32) / gamma(g) } else { (jf * ln_z - ln_gamma(g)).exp() };
        let term = if z < 0.0 && j % 2 == 1 { -mag } else { mag };
        largest = largest.max(mag);
        let t = sum + term;
        comp += if sum.abs() >= term.abs() { (sum - t) + term } else { (term - t) + sum };
        sum = t;
        if j > 0 && mag <= 1e-16 * (sum + comp).abs() && mag < prev {
            if largest > 1e8 * (sum + comp).abs() {
                log::warn!("E_{gamma_}({z}): cancellation, terms up to {largest:e} for a sum of {:e}", sum + comp);
            }
            return Ok(sum + comp);
        }
        prev = mag;
    }
    Err(Error::Convergence(format!(
        "Mittag-Leffler series for E_{gamma_}({z}) did not settle in {ML_MAX_TERMS} terms; partial sum {:e}, last term {prev:e}",
        sum + comp
    )))
}

/// `t -> c t^e`, the closed form of a fractional derivative of `t^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOracle {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerOracle {
    pub fn eval(&self, t: f64) -> f64 {
        if self.coeff == 0.0 {
            0.0
        } else {
            self.coeff * t.powf(self.exponent)
        }
    }
}

/// Caputo (and, for `p > 0`, Riemann-Liouville) derivative of `t^p`:
/// `Γ(p+1)/Γ(p+1-nu) t^{p-nu}`.
pub fn caputo_power_oracle(nu: f64, p: f64) -> Result<PowerOracle> {
    if !(nu > 0.0 && nu < 2.0 && nu != 1.0) {
        return domain(format!("order {nu} outside (0,1) ∪ (1,2)"));
    }
    if !(p >= 0.0) || !p.is_finite() {
        return domain(format!("power {p} must be finite and nonnegative"));
    }
    if p == 0.0 {
        return Ok(PowerOracle { coeff: 0.0, exponent: 0.0 });
    }
    if !(p > nu - 1.0) {
        return domain(format!("power {p} must exceed nu - 1 = {}", nu - 1.0));
    }
    let r = rgamma(p + 1.0 - nu);
    if r == 0.0 {
        log::info!("Γ({}) has a pole; derivative of t^{p} of order {nu} vanishes", p + 1.0 - nu);
    }
    Ok(PowerOracle { coeff: gamma(p + 1.0) * r, exponent: p - nu })
}

/// Number of halvings below 1/2 before the Gauss-GLOF piece takes over.
///
/// The factor `(1 - tau)^{-nu}` is singular at `tau = 1`; after the log map of
/// `(0, delta)` that point sits at distance `gv log(1/delta)` from the half line,
/// which controls the convergence of the Laguerre-based rule.
fn near_levels(gv: f64) -> usize {
    ((4.5 / gv).ceil() as usize).clamp(1, 60)
}

/// Default inner-rule index `2N + 16`.
pub fn default_inner_size(n: usize) -> usize {
    2 * n + 16
}

/// How the test function enters the outer integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestSide {
    /// `w(t)`, for `(CD^nu v, w)`.
    Value,
    /// `w'(t)`, for `(I^{2-mu} u', w')`.
    Derivative,
}

/// Quadrature bundle for the split kernel scheme.
///
/// Nodes are stored as logarithms and weights absorb the algebraic factors
/// of trial and test functions, so deep nodes neither underflow nor overflow.
#[derive(Debug, Clone)]
pub struct SplitRules {
    nu: f64,
    trial: BasisParams,
    test: BasisParams,
    side: TestSide,
    outer: Vec<(f64, f64)>,
    inner: Vec<(f64, f64)>,
}

impl SplitRules {
    /// Rules for `(CD^nu v, w)` with `v` in `trial` and `w` in `test`.
    pub fn caputo(trial: &BasisParams, test: &BasisParams, nu: f64, n_outer: usize, n_inner: usize) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return domain(format!("Caputo order {nu} outside (0, 1)"));
        }
        Self::build(trial, test, nu, TestSide::Value, n_outer, n_inner)
    }

    /// Rules for `(I^{2-mu} u', w')`, the weak form of `-(D^mu u, w)`.
    pub fn rl_bvp(trial: &BasisParams, test: &BasisParams, mu: f64, n_outer: usize, n_inner: usize) -> Result<Self> {
        if !(mu > 1.0 && mu < 2.0) {
            return domain(format!("Riemann-Liouville order {mu} outside (1, 2)"));
        }
        trial.require_vanishing_at_zero()?;
        test.require_vanishing_at_zero()?;
        Self::build(trial, test, mu - 1.0, TestSide::Derivative, n_outer, n_inner)
    }

    fn build(
        trial: &BasisParams,
        test: &BasisParams,
        nu: f64,
        side: TestSide,
        n_outer: usize,
        n_inner: usize,
    ) -> Result<Self> {
        let gv = trial.algebraic_exponent();
        if !(gv > 0.0) {
            return domain(format!(
                "trial derivative is not integrable at 0 for beta = {}, lambda = {}",
                trial.beta, trial.lambda
            ));
        }
        let ew = match side {
            TestSide::Value => test.algebraic_exponent(),
            TestSide::Derivative => test.algebraic_exponent() - 1.0,
        };
        // t^{beta_t} collects w, t^{1-nu} and the t^{gv-1} of the inner integral
        let beta_t = gv - 1.0 + ew + 1.0 - nu;
        if !(beta_t > -1.0) {
            return domain(format!("outer integrand exponent {beta_t} not integrable"));
        }
        let (ys, lw) = laguerre_gauss_log(0.0, n_outer)?;
        let bt1 = beta_t + 1.0;
        let outer = ys.iter().zip(&lw).map(|(&y, &l)| (-y / bt1, (l - bt1.ln()).exp())).collect();

        // lower half: a Gauss-GLOF rule on (0, delta) exact for tau^{gv-1} poly(log tau),
        // then Gauss-Legendre panels on the dyadic intervals up to 1/2
        let levels = near_levels(gv);
        let delta = 0.5f64.powi(levels as i32);
        let ld = delta.ln();
        let mut inner = Vec::with_capacity((levels + 1) * (n_inner + 1));
        let (ys, lw) = laguerre_gauss_log(0.0, n_inner)?;
        for (&y, &l) in ys.iter().zip(&lw) {
            let ls = -y / gv;
            let tau = delta * ls.exp();
            // delta^{gv} s^{gv-1} chi_s (1 - tau)^{-nu}, chi_s = s^{1-gv} omega / gv
            let w = (l - gv.ln() + gv * ld).exp() * (-nu * (-tau).ln_1p()).exp();
            inner.push((ld + ls, w));
        }
        let gl = jacobi_gauss(0.0, 0.0, n_inner)?;
        for k in 1..levels {
            let (a, b) = (0.5f64.powi((k + 1) as i32), 0.5f64.powi(k as i32));
            let h = 0.5 * (b - a);
            for (x, wx) in gl.iter() {
                let tau = a + h * (x + 1.0);
                let lt = tau.ln();
                inner.push((lt, h * wx * ((gv - 1.0) * lt).exp() * (-nu * (-tau).ln_1p()).exp()));
            }
        }
        let far = jacobi_gauss(-nu, 0.0, n_inner)?;
        let scale = 4f64.powf(nu - 1.0);
        for (xi, eta) in far.iter() {
            let lr = ((xi + 3.0) / 4.0).ln();
            inner.push((lr, scale * eta * ((gv - 1.0) * lr).exp()));
        }
        Ok(Self { nu, trial: *trial, test: *test, side, outer, inner })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn side(&self) -> TestSide {
        self.side
    }

    pub fn trial(&self) -> &BasisParams {
        &self.trial
    }

    pub fn test(&self) -> &BasisParams {
        &self.test
    }

    pub fn outer_len(&self) -> usize {
        self.outer.len()
    }

    pub fn inner_len(&self) -> usize {
        self.inner.len()
    }

    /// `t^{1-gv} ∫_0^1 v_j'(t tau)(1-tau)^{-nu} dtau` for plain trial indices `0..=n`.
    fn inner_integrals(&self, n: usize, log_t: f64) -> Vec<f64> {
        let mut acc = vec![0.0; n + 1];
        for &(shift, w) in &self.inner {
            let q = glof_deriv_poly_log(&self.trial, n, log_t + shift);
            for (a, v) in acc.iter_mut().zip(&q) {
                *a += w * v;
            }
        }
        acc
    }

    fn test_values(&self, n: usize, log_t: f64) -> Vec<f64> {
        match self.side {
            TestSide::Value => glof_poly_log(&self.test, n, log_t),
            TestSide::Derivative => glof_deriv_poly_log(&self.test, n, log_t),
        }
    }

    /// Dense matrix `B[k][j] = form(S_j^{trial}, S_k^{test})` over plain bases.
    pub fn plain_matrix(&self, n_trial: usize, n_test: usize) -> Result<DMatrix<f64>> {
        let rows: Vec<(Vec<f64>, Vec<f64>)> = self
            .outer
            .par_iter()
            .map(|&(log_t, w)| {
                let d = self.inner_integrals(n_trial, log_t);
                let p: Vec<f64> = self.test_values(n_test, log_t).into_iter().map(|x| x * w).collect();
                (p, d)
            })
            .collect();
        let mut m = DMatrix::zeros(n_test + 1, n_trial + 1);
        for (p, d) in &rows {
            for (k, pk) in p.iter().enumerate() {
                for (j, dj) in d.iter().enumerate() {
                    m[(k, j)] += pk * dj;
                }
            }
        }
        m /= gamma(1.0 - self.nu);
        if let Some(bad) = m.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite { value: *bad, at: f64::NAN, context: "fractional stiffness entry".into() });
        }
        Ok(m)
    }

    fn check_family(&self, v: &Expansion, w: &Expansion) -> Result<()> {
        if v.params() != &self.trial || w.params() != &self.test {
            return Err(Error::Mismatch(format!(
                "rules built for trial {:?} / test {:?}, got {:?} / {:?}",
                self.trial,
                self.test,
                v.params(),
                w.params()
            )));
        }
        Ok(())
    }
}

fn bilinear(v: &Expansion, w: &Expansion, rules: &SplitRules) -> Result<f64> {
    rules.check_family(v, w)?;
    let cv = v.plain_coeffs();
    let cw = w.plain_coeffs();
    let m = rules.plain_matrix(cv.len() - 1, cw.len() - 1)?;
    let mut s = 0.0;
    for (k, a) in cw.iter().enumerate() {
        for (j, b) in cv.iter().enumerate() {
            s += a * m[(k, j)] * b;
        }
    }
    Ok(s)
}

fn is_constant_lof(v: &Expansion) -> bool {
    v.params().algebraic_exponent() == 0.0 && v.plain_coeffs()[1..].iter().all(|&c| c == 0.0)
}

/// `(CD^nu v, w)` by the split scheme.
pub fn caputo_bilinear(v: &Expansion, w: &Expansion, nu: f64, rules: &SplitRules) -> Result<f64> {
    if is_constant_lof(v) {
        return Ok(0.0);
    }
    if rules.side != TestSide::Value || (rules.nu - nu).abs() > 0.0 {
        return Err(Error::Mismatch(format!("rules are not Caputo rules of order {nu}")));
    }
    bilinear(v, w, rules)
}

/// `-(D^mu u, w) = (I^{2-mu} u', w')` for boundary expansions.
pub fn rl_bilinear_bvp(u: &Expansion, w: &Expansion, mu: f64, rules: &SplitRules) -> Result<f64> {
    if u.kind() != BasisKind::Boundary || w.kind() != BasisKind::Boundary {
        return domain("the boundary-value form needs boundary-basis expansions");
    }
    if rules.side != TestSide::Derivative || (rules.nu - (mu - 1.0)).abs() > 0.0 {
        return Err(Error::Mismatch(format!("rules are not boundary-value rules of order {mu}")));
    }
    bilinear(u, w, rules)
}
