//! Generalized Laguerre polynomials on the half line and the Gauss rules
//! built on them, plus Gauss-Jacobi rules on (-1, 1).
//!
//! Nodes are found by bisection-safeguarded Newton iteration. The zeros of
//! degree `m` bracket the zeros of degree `m + 1` (interlacing), so the rule of
//! size `N + 1` is grown from the one-point rule, one degree at a time.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{domain, Error, Result};
use crate::special::ln_gamma;

/// Largest rule index `N` (rule of `N + 1` points) accepted by the Gauss
/// constructors.
pub const MAX_RULE_INDEX: usize = 256;

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Parameter of the Laguerre weight `y^alpha e^{-y}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreParam {
    alpha: f64,
}

impl LaguerreParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) {
            return domain(format!("Laguerre parameter alpha = {alpha} must exceed -1"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// The measure a [`QuadratureRule`] integrates against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Measure {
    /// `y^alpha e^{-y} dy` on (0, inf).
    Laguerre { alpha: f64 },
    /// `(-log t)^alpha t^lambda dt` on (0, 1), nodes mapped with parameter `beta`.
    Glof { alpha: f64, beta: f64, lambda: f64 },
    /// `(1 - x)^a (1 + x)^b dx` on (-1, 1).
    Jacobi { a: f64, b: f64 },
    /// `(-log t)^alpha t^lambda dt` on (0, 1), composite panels in `-log t`.
    Composite { alpha: f64, lambda: f64 },
}

impl Measure {
    /// `(alpha, lambda)` of the weight `(-log t)^alpha t^lambda`, when the
    /// measure lives on (0, 1).
    pub fn unit_interval_weight(&self) -> Option<(f64, f64)> {
        match *self {
            Measure::Glof { alpha, lambda, .. } | Measure::Composite { alpha, lambda } => Some((alpha, lambda)),
            _ => None,
        }
    }
}

/// Nodes and positive weights for one measure.
///
/// Laguerre and Jacobi rules list their nodes in increasing order. GLOF rules
/// keep the index of the underlying Laguerre node, so `t_j = exp(-y_j/(beta+1))`
/// decreases with `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    measure: Measure,
}

impl QuadratureRule {
    pub(crate) fn from_parts(nodes: Vec<f64>, weights: Vec<f64>, measure: Measure) -> Self {
        debug_assert_eq!(nodes.len(), weights.len());
        Self { nodes, weights, measure }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Applies the rule to `f`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.iter().map(|(x, w)| f(x) * w).sum()
    }
}

fn check_rule_index(n: usize) -> Result<()> {
    if n > MAX_RULE_INDEX {
        return Err(Error::Domain(format!("rule index {n} exceeds the supported maximum {MAX_RULE_INDEX}")));
    }
    Ok(())
}

/// Values `L_0^{(alpha)}(y), ..., L_n^{(alpha)}(y)` by forward recurrence.
pub fn laguerre_eval_all(alpha: f64, n: usize, y: f64) -> Result<Vec<f64>> {
    LaguerreParam::new(alpha)?;
    if !(y >= 0.0) {
        return domain(format!("Laguerre argument y = {y} must be nonnegative"));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(alpha + 1.0 - y);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - y) * out[k] - (kf + alpha) * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// `(L_m, L_{m-1})` at `y`, for `m >= 1`.
fn laguerre_pair(alpha: f64, m: usize, y: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = alpha + 1.0 - y;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + alpha + 1.0 - y) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Zero of `f` inside the sign-changing bracket `(lo, hi)`.
///
/// `eval` returns the value and derivative. Newton steps that leave the
/// bracket are replaced by bisection.
fn safeguarded_newton<F>(eval: F, mut lo: f64, mut hi: f64, index: usize) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = eval(lo);
    let (fhi, _) = eval(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::Convergence(format!("node {index}: bracket ({lo}, {hi}) does not enclose a sign change")));
    }
    let lo_sign = flo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..NEWTON_MAX_ITER {
        let (f, df) = eval(x);
        if f == 0.0 {
            return Ok(x);
        }
        let dx = f / df;
        let tol = NEWTON_TOL * x.abs().max(1e-6);
        if dx.abs() <= tol {
            return Ok(x - dx);
        }
        if f.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - dx;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        x = next;
        if hi - lo <= tol {
            return Ok(x);
        }
    }
    Err(Error::Convergence(format!(
        "node {index}: no convergence after {NEWTON_MAX_ITER} iterations (bracket ({lo}, {hi}))"
    )))
}

/// Zeros of a degree-`diag.len()` orthogonal polynomial, bracketed by the
/// eigenvalues of its Jacobi matrix and polished by safeguarded Newton.
fn eigen_bracketed_zeros<F>(diag: &[f64], off: &[f64], lo: f64, hi: f64, eval: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> (f64, f64),
{
    let m = diag.len();
    let mut jac = nalgebra::DMatrix::<f64>::zeros(m, m);
    for k in 0..m {
        jac[(k, k)] = diag[k];
        if k + 1 < m {
            jac[(k, k + 1)] = off[k];
            jac[(k + 1, k)] = off[k];
        }
    }
    let mut eig: Vec<f64> = jac.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    let mut zeros = Vec::with_capacity(m);
    for j in 0..m {
        let left = if j == 0 { lo } else { 0.5 * (eig[j - 1] + eig[j]) };
        let right = if j + 1 == m { hi } else { 0.5 * (eig[j] + eig[j + 1]) };
        zeros.push(safeguarded_newton(&eval, left, right, j)?);
    }
    Ok(zeros)
}

fn laguerre_zeros(alpha: f64, m: usize) -> Result<Vec<f64>> {
    if m >= 2 {
        let eval = |y: f64| {
            let (l, lm1) = laguerre_pair(alpha, m, y);
            let d = (m as f64 * l - (m as f64 + alpha) * lm1) / y;
            (l, d)
        };
        let diag: Vec<f64> = (0..m).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let off: Vec<f64> = (1..m).map(|k| (k as f64 * (k as f64 + alpha)).sqrt()).collect();
        let upper = 4.0 * m as f64 + 2.0 * alpha.abs() + 10.0;
        if let Ok(z) = eigen_bracketed_zeros(&diag, &off, f64::MIN_POSITIVE, upper, eval) {
            return Ok(z);
        }
    }
    laguerre_zeros_interlaced(alpha, m)
}

/// Zeros of `L_{n}^{(alpha)}` for `n = 1..=m`, returning those of degree `m`.
fn laguerre_zeros_interlaced(alpha: f64, m: usize) -> Result<Vec<f64>> {
    let mut zeros = vec![alpha + 1.0];
    for deg in 2..=m {
        let eval = |y: f64| {
            let (l, lm1) = laguerre_pair(alpha, deg, y);
            let d = (deg as f64 * l - (deg as f64 + alpha) * lm1) / y;
            (l, d)
        };
        // generous upper bound on the largest zero
        let upper = 4.0 * deg as f64 + 2.0 * alpha.abs() + 10.0;
        let mut next = Vec::with_capacity(deg);
        let mut lo = 0.0_f64;
        for j in 0..deg {
            let hi = if j < zeros.len() { zeros[j] } else { upper };
            // a zero sitting exactly on the bracket end would break the sign test
            let lo_in = if j == 0 { f64::MIN_POSITIVE } else { lo };
            next.push(safeguarded_newton(eval, lo_in, hi, j)?);
            lo = hi;
        }
        zeros = next;
    }
    Ok(zeros)
}

type LogRule = Arc<(Vec<f64>, Vec<f64>)>;

/// Rules already computed, keyed by the bits of `alpha` and the rule index.
fn rule_cache() -> &'static Mutex<HashMap<(u64, usize), LogRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), LogRule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Nodes and natural-log weights of the Laguerre-Gauss rule with `n + 1` points.
pub(crate) fn laguerre_gauss_log(alpha: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    LaguerreParam::new(alpha)?;
    check_rule_index(n)?;
    let key = (alpha.to_bits(), n);
    if let Some(hit) = rule_cache().lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
        return Ok((hit.0.clone(), hit.1.clone()));
    }
    let rule = compute_laguerre_gauss_log(alpha, n)?;
    rule_cache().lock().unwrap_or_else(|e| e.into_inner()).insert(key, Arc::new(rule.clone()));
    Ok(rule)
}

fn compute_laguerre_gauss_log(alpha: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes = laguerre_zeros(alpha, n + 1)?;
    // w_j = Γ(n+α+2)/((n+1)! y_j [L_n^{(α+1)}(y_j)]^2), i.e. the derivative of
    // L_{n+1} at its own zero. The equivalent form with L_n^{(α)}(y_j) is far
    // more sensitive to node error because y_j sits close to a zero of L_n.
    // Γ(n+α+2)/(n+1)! = Γ(α+1) Π_{k<=n+1} (1 + α/k)
    let log_const = ln_gamma(alpha + 1.0) + (1..=n + 1).map(|k| (alpha / k as f64).ln_1p()).sum::<f64>();
    let log_weights = nodes
        .iter()
        .map(|&y| {
            let d = if n == 0 { 1.0 } else { laguerre_pair(alpha + 1.0, n, y).0 };
            log_const - y.ln() - 2.0 * d.abs().ln()
        })
        .collect();
    Ok((nodes, log_weights))
}

/// Laguerre-Gauss rule with `n + 1` points for the weight `y^alpha e^{-y}`.
///
/// Exact for polynomials of degree `<= 2n + 1`.
pub fn laguerre_gauss(alpha: f64, n: usize) -> Result<QuadratureRule> {
    let (nodes, log_w) = laguerre_gauss_log(alpha, n)?;
    let weights = log_w.into_iter().map(f64::exp).collect();
    Ok(QuadratureRule::from_parts(nodes, weights, Measure::Laguerre { alpha }))
}

/// `(P_m, P_{m-1})` for the Jacobi family at `x`, `m >= 1`.
fn jacobi_pair(a: f64, b: f64, m: usize, x: f64) -> (f64, f64) {
    let mut prev = 1.0;
    let mut cur = 0.5 * ((a + b + 2.0) * x + (a - b));
    for k in 1..m {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        let c1 = 2.0 * (kf + 1.0) * (kf + a + b + 1.0) * s;
        let c2 = (s + 1.0) * ((s + 2.0) * s * x + a * a - b * b);
        let c3 = 2.0 * (kf + a) * (kf + b) * (s + 2.0);
        let next = (c2 * cur - c3 * prev) / c1;
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

fn jacobi_deriv(a: f64, b: f64, m: usize, x: f64, p: f64, pm1: f64) -> f64 {
    let mf = m as f64;
    let s = 2.0 * mf + a + b;
    (mf * ((a - b) - s * x) * p + 2.0 * (mf + a) * (mf + b) * pm1) / (s * (1.0 - x * x))
}

fn jacobi_zeros_eigen(a: f64, b: f64, m: usize) -> Option<Vec<f64>> {
    if m < 2 {
        return None;
    }
    let diag: Vec<f64> = (0..m)
        .map(|k| {
            if k == 0 {
                (b - a) / (a + b + 2.0)
            } else {
                let s = 2.0 * k as f64 + a + b;
                (b * b - a * a) / (s * (s + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..m)
        .map(|k| {
            let kf = k as f64;
            let s = 2.0 * kf + a + b;
            let sq = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b).powi(2) * (3.0 + a + b))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + a + b) / (s * s * (s + 1.0) * (s - 1.0))
            };
            sq.sqrt()
        })
        .collect();
    let eval = |x: f64| {
        let (p, pm1) = jacobi_pair(a, b, m, x);
        (p, jacobi_deriv(a, b, m, x, p, pm1))
    };
    eigen_bracketed_zeros(&diag, &off, -1.0, 1.0, eval).ok()
}

/// Zeros of the degree-`m_final` Jacobi polynomial by interlacing across degrees.
fn jacobi_zeros_interlaced(a: f64, b: f64, m_final: usize) -> Result<Vec<f64>> {
    let mut zeros = vec![(b - a) / (a + b + 2.0)];
    for deg in 2..=m_final {
        let eval = |x: f64| {
            let (p, pm1) = jacobi_pair(a, b, deg, x);
            (p, jacobi_deriv(a, b, deg, x, p, pm1))
        };
        let mut next = Vec::with_capacity(deg);
        let mut lo = -1.0_f64;
        for j in 0..deg {
            let hi = if j < zeros.len() { zeros[j] } else { 1.0 };
            next.push(safeguarded_newton(eval, lo, hi, j)?);
            lo = hi;
        }
        zeros = next;
    }
    Ok(zeros)
}

/// Gauss-Jacobi rule with `n + 1` points for `(1-x)^a (1+x)^b` on (-1, 1).
pub fn jacobi_gauss(a: f64, b: f64, n: usize) -> Result<QuadratureRule> {
    if !(a > -1.0) || !(b > -1.0) {
        return domain(format!("Jacobi parameters a = {a}, b = {b} must exceed -1"));
    }
    check_rule_index(n)?;
    let m_final = n + 1;
    let zeros = match jacobi_zeros_eigen(a, b, m_final) {
        Some(z) => z,
        None => jacobi_zeros_interlaced(a, b, m_final)?,
    };
    let mf = m_final as f64;
    // Γ(m+a+1)Γ(m+b+1)/(Γ(m+a+b+1) m!) accumulated as a product of O(1) factors
    let mut log_const =
        ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0) + (a + b + 1.0) * std::f64::consts::LN_2;
    for k in 1..=m_final {
        let kf = k as f64;
        log_const += (a / kf).ln_1p() + (b / kf).ln_1p();
    }
    log_const += mf.ln();
    for k in 1..m_final {
        log_const -= ((a + b + 1.0) / k as f64).ln_1p();
    }
    let weights = zeros
        .iter()
        .map(|&x| {
            let (p, pm1) = jacobi_pair(a, b, m_final, x);
            let dp = jacobi_deriv(a, b, m_final, x, p, pm1);
            (log_const - (1.0 - x * x).ln() - 2.0 * dp.abs().ln()).exp()
        })
        .collect();
    Ok(QuadratureRule::from_parts(zeros, weights, Measure::Jacobi { a, b }))
}

/// Gauss-Legendre rule with `n + 1` points on (-1, 1).
pub fn legendre_gauss(n: usize) -> Result<QuadratureRule> {
    jacobi_gauss(0.0, 0.0, n)
}
