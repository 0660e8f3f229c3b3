//! Galerkin solvers for the Caputo initial-value problem and the
//! Riemann-Liouville boundary-value problem in GLOF trial spaces.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::approx::{interpolate, project};
use crate::error::{domain, Error, Result};
use crate::fracops::{default_inner_size, SplitRules};
use crate::laguerre::{laguerre_eval_all, laguerre_gauss_log, MAX_RULE_INDEX};
use crate::linalg::Factored;
use crate::logbasis::{boundary_stencil, BasisParams, Expansion};

/// Shareable real function of one variable.
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Wrap a closure as a [`ScalarFn`].
pub fn scalar_fn<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> ScalarFn {
    Arc::new(f)
}

/// `CD^nu u + q u = g` on (0, 1) with `u(0) = u0`.
#[derive(Clone)]
pub struct IvpProblem {
    pub nu: f64,
    pub q: ScalarFn,
    pub g: ScalarFn,
    pub u0: f64,
}

impl IvpProblem {
    pub fn new(nu: f64, q: ScalarFn, g: ScalarFn, u0: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return domain(format!("Caputo order {nu} outside (0, 1)"));
        }
        if !u0.is_finite() {
            return domain(format!("initial value {u0} is not finite"));
        }
        Ok(Self { nu, q, g, u0 })
    }

    /// `CD^nu u + k u = 0`, `u(0) = 1`, solved by `E_nu(-k t^nu)`.
    pub fn relaxation(nu: f64, k: f64) -> Result<Self> {
        Self::new(nu, scalar_fn(move |_| k), scalar_fn(|_| 0.0), 1.0)
    }
}

/// `-D^mu u + q u = g` on (0, 1) with `u(0) = u(1) = 0`.
#[derive(Clone)]
pub struct BvpProblem {
    pub mu: f64,
    pub q: ScalarFn,
    pub g: ScalarFn,
}

impl BvpProblem {
    pub fn new(mu: f64, q: ScalarFn, g: ScalarFn) -> Result<Self> {
        if !(mu > 1.0 && mu < 2.0) {
            return domain(format!("Riemann-Liouville order {mu} outside (1, 2)"));
        }
        Ok(Self { mu, q, g })
    }
}

/// How the forcing enters the right-hand side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsMode {
    /// Interpolant at the Gauss-GLOF nodes.
    #[default]
    Interpolate,
    /// Discrete projection with the inner rule.
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub params: BasisParams,
    pub n: usize,
    pub inner_rule_size: usize,
    pub rhs_mode: RhsMode,
}

impl SolverConfig {
    /// Degree `n` with inner rule `2n + 16` and interpolated forcing.
    pub fn new(params: BasisParams, n: usize) -> Result<Self> {
        let c = Self { params, n, inner_rule_size: default_inner_size(n), rhs_mode: RhsMode::Interpolate };
        c.validate()?;
        Ok(c)
    }

    pub fn with_inner(mut self, inner_rule_size: usize) -> Result<Self> {
        self.inner_rule_size = inner_rule_size;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rhs_mode(mut self, mode: RhsMode) -> Self {
        self.rhs_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.params.beta > self.params.lambda) {
            return Err(Error::Config(format!(
                "trial space needs beta > lambda (beta = {}, lambda = {})",
                self.params.beta, self.params.lambda
            )));
        }
        if self.n < 1 {
            return Err(Error::Config("trial degree must be at least 1".into()));
        }
        if self.inner_rule_size < self.n || self.inner_rule_size > MAX_RULE_INDEX {
            return Err(Error::Config(format!(
                "inner rule size {} must lie in [{}, {MAX_RULE_INDEX}]",
                self.inner_rule_size, self.n
            )));
        }
        Ok(())
    }
}

/// `(S + M) x = rhs` in the trial basis, with the load expansion it came from.
#[derive(Debug, Clone)]
pub struct GalerkinSystem {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub load: Expansion,
}

impl GalerkinSystem {
    pub fn matrix(&self) -> DMatrix<f64> {
        &self.stiffness + &self.mass
    }
}

fn check_finite(v: f64, t: f64, context: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite { value: v, at: t, context: context.into() })
    }
}

/// `M[k][j] = ∫_0^1 q S_k S_j dt` over plain indices `0..=n`.
///
/// Uses a Laguerre rule in `y` with `t = exp(-y/(beta-lambda+1))`, which is
/// exact when `q` is constant.
pub fn mass_matrix(
    params: &BasisParams,
    n: usize,
    n_rule: usize,
    q: &(dyn Fn(f64) -> f64 + Sync),
) -> Result<DMatrix<f64>> {
    let (ys, lw) = laguerre_gauss_log(0.0, n_rule)?;
    let e1 = params.beta - params.lambda + 1.0;
    let scale = (params.beta + 1.0) / e1;
    let rows: Vec<Result<(f64, Vec<f64>)>> = ys
        .par_iter()
        .zip(lw.par_iter())
        .map(|(&y, &l)| {
            let t = (-y / e1).exp();
            let qv = check_finite(q(t), t, "coefficient q")?;
            Ok((qv * (l.exp() / e1), laguerre_eval_all(params.alpha, n, scale * y)?))
        })
        .collect();
    let mut m = DMatrix::zeros(n + 1, n + 1);
    for row in rows {
        let (w, l) = row?;
        if w == 0.0 {
            continue;
        }
        for k in 0..=n {
            let wk = w * l[k];
            for j in 0..=k {
                m[(k, j)] += wk * l[j];
            }
        }
    }
    for k in 0..=n {
        for j in 0..k {
            m[(j, k)] = m[(k, j)];
        }
    }
    Ok(m)
}

/// `(CD^nu S_j, S_k)` over plain indices `0..=n`.
pub fn caputo_stiffness(params: &BasisParams, nu: f64, n: usize, n_rule: usize) -> Result<DMatrix<f64>> {
    SplitRules::caputo(params, params, nu, n_rule, n_rule)?.plain_matrix(n, n)
}

/// `(N+1) x N` map from boundary coefficients to plain coefficients.
pub fn boundary_transform(alpha: f64, n: usize) -> DMatrix<f64> {
    let mut c = DMatrix::zeros(n + 1, n);
    for col in 0..n {
        for (idx, w) in boundary_stencil(alpha, col + 1) {
            c[(idx, col)] = w;
        }
    }
    c
}

fn load(c: &SolverConfig, f: &(dyn Fn(f64) -> f64 + Sync)) -> Result<Expansion> {
    match c.rhs_mode {
        RhsMode::Interpolate => interpolate(&c.params, c.n, f),
        RhsMode::Project => project(&c.params, c.n, f, c.inner_rule_size - c.n),
    }
}

/// Assemble `(S + M) v = f` for the homogenized unknown `v = u - u0`.
pub fn assemble_ivp(p: &IvpProblem, c: &SolverConfig) -> Result<GalerkinSystem> {
    c.validate()?;
    let (q, g, u0) = (p.q.clone(), p.g.clone(), p.u0);
    let forcing = move |t: f64| g(t) - u0 * q(t);
    let load = load(c, &forcing)?;
    let stiffness = caputo_stiffness(&c.params, p.nu, c.n, c.inner_rule_size)?;
    let mass = mass_matrix(&c.params, c.n, c.inner_rule_size, &*p.q)?;
    let gram = mass_matrix(&c.params, c.n, c.inner_rule_size, &|_| 1.0)?;
    let rhs = gram * DVector::from_column_slice(load.coeffs());
    Ok(GalerkinSystem { stiffness, mass, rhs, load })
}

/// Galerkin solution `u_N = v_N + u0` of an initial-value problem.
#[derive(Debug, Clone)]
pub struct IvpSolution {
    pub v: Expansion,
    pub u0: f64,
    pub cond: f64,
}

impl IvpSolution {
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.v.eval(t)? + self.u0)
    }
}

pub fn solve_ivp(p: &IvpProblem, c: &SolverConfig) -> Result<IvpSolution> {
    let sys = assemble_ivp(p, c)?;
    let (x, cond) = solve_system(&sys)?;
    log::debug!("ivp N = {} cond = {cond:e}", c.n);
    Ok(IvpSolution { v: Expansion::plain(c.params, x.iter().copied().collect())?, u0: p.u0, cond })
}

fn solve_system(sys: &GalerkinSystem) -> Result<(DVector<f64>, f64)> {
    let f = Factored::new(&sys.matrix())?;
    Ok((f.solve(&sys.rhs)?, f.cond()))
}

/// Assemble the boundary-basis system for `-D^mu u + q u = g`.
pub fn assemble_bvp(p: &BvpProblem, c: &SolverConfig) -> Result<GalerkinSystem> {
    c.validate()?;
    let load = load(c, &*p.g)?;
    let rules = SplitRules::rl_bvp(&c.params, &c.params, p.mu, c.inner_rule_size, c.inner_rule_size)?;
    let b = rules.plain_matrix(c.n, c.n)?;
    let mass = mass_matrix(&c.params, c.n, c.inner_rule_size, &*p.q)?;
    let gram = mass_matrix(&c.params, c.n, c.inner_rule_size, &|_| 1.0)?;
    let ct = boundary_transform(c.params.alpha, c.n);
    let rhs = ct.transpose() * gram * DVector::from_column_slice(load.coeffs());
    Ok(GalerkinSystem { stiffness: ct.transpose() * b * &ct, mass: ct.transpose() * mass * &ct, rhs, load })
}

/// Galerkin solution of a boundary-value problem in the `phi_n` basis.
#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub u: Expansion,
    pub cond: f64,
}

impl BvpSolution {
    pub fn eval(&self, t: f64) -> Result<f64> {
        self.u.eval(t)
    }
}

pub fn solve_bvp(p: &BvpProblem, c: &SolverConfig) -> Result<BvpSolution> {
    let sys = assemble_bvp(p, c)?;
    let (x, cond) = solve_system(&sys)?;
    log::debug!("bvp N = {} cond = {cond:e}", c.n);
    Ok(BvpSolution { u: Expansion::boundary(c.params, x.iter().copied().collect())?, cond })
}

/// `max_i |f(t_i) - g(t_i)|` over `m` uniform points of [0, 1].
pub fn max_diff_uniform<F, G>(f: F, g: G, m: usize) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    G: Fn(f64) -> Result<f64>,
{
    let mut worst = 0.0f64;
    for i in 0..m {
        let t = if m == 1 { 0.0 } else { i as f64 / (m - 1) as f64 };
        let d = (f(t)? - g(t)?).abs();
        worst = worst.max(check_finite(d, t, "solution difference")?);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::{reference_rule, WeightSpec};
    use crate::fracops::{caputo_bilinear, caputo_power_oracle, mittag_leffler};
    use crate::special::gamma;

    fn paper_params() -> BasisParams {
        BasisParams::new(0.0, 5.0, 0.0).unwrap()
    }

    fn integrate(f: impl Fn(f64) -> f64) -> f64 {
        reference_rule(WeightSpec::uniform()).unwrap().integrate(f)
    }

    #[test]
    fn config_validation() {
        let lof = BasisParams::lof(0.0, 1.0).unwrap();
        assert!(matches!(SolverConfig::new(lof, 4), Err(Error::Config(_))));
        assert!(SolverConfig::new(paper_params(), 0).is_err());
        assert!(SolverConfig::new(paper_params(), 8).unwrap().with_inner(4).is_err());
        assert!(SolverConfig::new(paper_params(), 8).unwrap().with_inner(300).is_err());
        assert!(IvpProblem::relaxation(1.0, 1.0).is_err());
        assert!(BvpProblem::new(2.0, scalar_fn(|_| 0.0), scalar_fn(|_| 0.0)).is_err());
    }

    #[test]
    fn zero_coefficient_gives_zero_mass() {
        let p = IvpProblem::new(0.5, scalar_fn(|_| 0.0), scalar_fn(|t| t), 0.0).unwrap();
        let sys = assemble_ivp(&p, &SolverConfig::new(paper_params(), 6).unwrap()).unwrap();
        assert!(sys.mass.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn mass_matrix_matches_reference_integration() {
        let params = BasisParams::new(0.5, 3.0, 1.0).unwrap();
        let q = |t: f64| 1.0 + t.sin();
        let m = mass_matrix(&params, 6, 40, &q).unwrap();
        for k in 0..=6 {
            for j in 0..=6 {
                let expect = integrate(|t| {
                    let s = crate::logbasis::glof_eval_all(&params, 6, t).unwrap();
                    q(t) * s[j] * s[k]
                });
                assert!((m[(k, j)] - expect).abs() < 1e-12 * (1.0 + expect.abs()), "{k} {j}");
            }
        }
    }

    #[test]
    fn nonfinite_data_aborts_assembly() {
        let p = IvpProblem::new(0.5, scalar_fn(|t| 1.0 / (t - t)), scalar_fn(|_| 1.0), 0.0).unwrap();
        assert!(matches!(
            assemble_ivp(&p, &SolverConfig::new(paper_params(), 4).unwrap()),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn manufactured_linear_solution() {
        let nu = 0.5;
        let params = BasisParams::new(0.0, 2.0, 0.0).unwrap();
        let oracle = caputo_power_oracle(nu, 1.0).unwrap();
        let p = IvpProblem::new(nu, scalar_fn(|_| 0.0), scalar_fn(move |t| oracle.eval(t)), 0.0).unwrap();
        let sol = solve_ivp(&p, &SolverConfig::new(params, 24).unwrap()).unwrap();
        let err = max_diff_uniform(|t| sol.eval(t), Ok, 1000).unwrap();
        assert!(err < 1e-9, "{err:e}");
    }

    #[test]
    fn relaxation_matches_mittag_leffler() {
        let nu = 0.7;
        let p = IvpProblem::relaxation(nu, 1.0).unwrap();
        let sol = solve_ivp(&p, &SolverConfig::new(paper_params(), 40).unwrap()).unwrap();
        let err = max_diff_uniform(|t| sol.eval(t), |t| mittag_leffler(nu, -t.powf(nu)), 1000).unwrap();
        assert!(err < 1e-8, "{err:e}");
        assert!(sol.cond.is_finite() && sol.cond >= 1.0);
    }

    #[test]
    fn balanced_forcing_gives_constant_solution() {
        let q = scalar_fn(|t: f64| 2.0 + t.cos());
        let qc = q.clone();
        let p = IvpProblem::new(0.4, q, scalar_fn(move |t| 3.0 * qc(t)), 3.0).unwrap();
        let sol = solve_ivp(&p, &SolverConfig::new(paper_params(), 10).unwrap()).unwrap();
        assert!(sol.v.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!(sol.eval(0.3).unwrap(), 3.0);
    }

    #[test]
    fn homogenization_equivalence() {
        let nu = 0.6;
        let q = scalar_fn(|t: f64| 1.0 + t.sin());
        let g = scalar_fn(f64::cos);
        let (qa, ga) = (q.clone(), g.clone());
        let direct = IvpProblem::new(nu, q.clone(), g, 1.0).unwrap();
        let shifted = IvpProblem::new(nu, q, scalar_fn(move |t| ga(t) - qa(t)), 0.0).unwrap();
        let c = SolverConfig::new(paper_params(), 20).unwrap();
        let a = solve_ivp(&direct, &c).unwrap();
        let b = solve_ivp(&shifted, &c).unwrap();
        let d = max_diff_uniform(|t| a.eval(t), |t| Ok(b.eval(t)? + 1.0), 200).unwrap();
        assert!(d < 1e-13, "{d:e}");
    }

    #[test]
    fn galerkin_orthogonality() {
        let nu = 0.45;
        let q = |t: f64| 1.0 + t.sin();
        let p = IvpProblem::new(nu, scalar_fn(q), scalar_fn(f64::cos), 1.0).unwrap();
        let c = SolverConfig::new(paper_params(), 12).unwrap();
        let sol = solve_ivp(&p, &c).unwrap();
        let sys = assemble_ivp(&p, &c).unwrap();
        let rules =
            SplitRules::caputo(&c.params, &c.params, nu, c.inner_rule_size + 24, c.inner_rule_size + 24).unwrap();
        let mut worst = 0.0f64;
        let mut scale = 0.0f64;
        for k in 0..=c.n {
            let w = Expansion::unit(c.params, k);
            let a = caputo_bilinear(&sol.v, &w, nu, &rules).unwrap()
                + integrate(|t| q(t) * sol.v.eval(t).unwrap() * w.eval(t).unwrap());
            let f = integrate(|t| sys.load.eval(t).unwrap() * w.eval(t).unwrap());
            worst = worst.max((a - f).abs());
            scale = scale.max(f.abs());
        }
        assert!(worst <= 1e-9 * scale, "{worst:e} vs {scale:e}");
    }

    #[test]
    fn variable_coefficient_self_convergence() {
        let p = IvpProblem::new(0.5, scalar_fn(|t: f64| 1.0 + t.sin()), scalar_fn(f64::cos), 1.0).unwrap();
        let sols: Vec<IvpSolution> = [8, 16, 24, 32]
            .iter()
            .map(|&n| solve_ivp(&p, &SolverConfig::new(paper_params(), n).unwrap()).unwrap())
            .collect();
        let d: Vec<f64> =
            sols.windows(2).map(|w| max_diff_uniform(|t| w[0].eval(t), |t| w[1].eval(t), 500).unwrap()).collect();
        assert!(d[1] < d[0] / 10.0 && d[2] < d[1] / 10.0, "{d:?}");
    }

    fn manufactured_bvp(mu: f64) -> BvpProblem {
        let g = move |t: f64| {
            -(gamma(2.5) / gamma(2.5 - mu) * t.powf(1.5 - mu) - gamma(3.5) / gamma(3.5 - mu) * t.powf(2.5 - mu))
                + t.exp() * t.powf(1.5) * (1.0 - t)
        };
        BvpProblem::new(mu, scalar_fn(f64::exp), scalar_fn(g)).unwrap()
    }

    #[test]
    fn bvp_manufactured_solution() {
        let sol = solve_bvp(&manufactured_bvp(1.5), &SolverConfig::new(paper_params(), 40).unwrap()).unwrap();
        let err = max_diff_uniform(|t| sol.eval(t), |t| Ok(t.powf(1.5) * (1.0 - t)), 1000).unwrap();
        assert!(err < 1e-8, "{err:e}");
        assert!(sol.eval(0.0).unwrap().abs() < 1e-300 && sol.eval(1.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn bvp_coercive_for_nonnegative_q() {
        for &mu in &[1.2, 1.5, 1.8] {
            let p = BvpProblem::new(mu, scalar_fn(|t: f64| t * t), scalar_fn(|t: f64| t.sin())).unwrap();
            let c = SolverConfig::new(paper_params(), 16).unwrap();
            let a = assemble_bvp(&p, &c).unwrap().matrix();
            assert!((0..16).all(|i| a[(i, i)] > 0.0), "mu = {mu}");
            assert!(solve_bvp(&p, &c).is_ok());
        }
    }

    #[test]
    fn bvp_single_mode_and_zero_forcing() {
        let p = BvpProblem::new(1.5, scalar_fn(f64::exp), scalar_fn(|t| t)).unwrap();
        let sol = solve_bvp(&p, &SolverConfig::new(paper_params(), 1).unwrap()).unwrap();
        assert_eq!(sol.u.coeffs().len(), 1);
        assert!(sol.u.coeffs()[0].is_finite());
        let p0 = BvpProblem::new(1.5, scalar_fn(f64::exp), scalar_fn(|_| 0.0)).unwrap();
        let z = solve_bvp(&p0, &SolverConfig::new(paper_params(), 8).unwrap()).unwrap();
        assert!(z.u.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn bvp_self_convergence() {
        let p = BvpProblem::new(1.5, scalar_fn(f64::exp), scalar_fn(|t: f64| t * t.sin())).unwrap();
        let sols: Vec<BvpSolution> = [8, 16, 24, 32]
            .iter()
            .map(|&n| solve_bvp(&p, &SolverConfig::new(paper_params(), n).unwrap()).unwrap())
            .collect();
        let d: Vec<f64> =
            sols.windows(2).map(|w| max_diff_uniform(|t| w[0].eval(t), |t| w[1].eval(t), 500).unwrap()).collect();
        assert!(d[1] < d[0] / 4.0 && d[2] < d[1] / 4.0, "{d:?}");
    }

    #[test]
    fn boundary_transform_matches_stencil() {
        let c = boundary_transform(0.5, 3);
        assert_eq!(c[(0, 0)], -1.0);
        assert!((c[(1, 0)] - 1.0 / 1.5).abs() < 1e-16);
        assert_eq!(c[(2, 1)], 2.0 / 2.5);
        assert_eq!(c[(2, 2)], -1.0);
    }

    #[test]
    fn project_mode_also_converges() {
        let nu = 0.5;
        let p = IvpProblem::relaxation(nu, 1.0).unwrap();
        let c = SolverConfig::new(paper_params(), 32).unwrap().with_rhs_mode(RhsMode::Project);
        let sol = solve_ivp(&p, &c).unwrap();
        let err = max_diff_uniform(|t| sol.eval(t), |t| mittag_leffler(nu, -t.powf(nu)), 500).unwrap();
        assert!(err < 1e-8, "{err:e}");
    }
}
