//! Time-fractional diffusion on (-1, 1)^2 with GLOFs in time and a
//! Legendre-Galerkin basis in space, decoupled by matrix diagonalization.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::approx::interpolate_values;
use crate::error::{domain, Error, Result};
use crate::laguerre::legendre_gauss;
use crate::linalg::Factored;
use crate::logbasis::{gauss_glof, glof_eval_all, BasisParams};
use crate::solvers::{caputo_stiffness, mass_matrix, SolverConfig};

/// Forcing `f(x1, x2, t)`.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// `CD^nu u - Δu = f` on (-1,1)^2 x (0, T), zero boundary and initial data.
#[derive(Clone)]
pub struct DiffusionProblem {
    pub nu: f64,
    pub f: SpaceTimeFn,
    pub t_final: f64,
}

impl DiffusionProblem {
    pub fn new(nu: f64, f: SpaceTimeFn, t_final: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < 1.0) {
            return domain(format!("Caputo order {nu} outside (0, 1)"));
        }
        if !(t_final > 0.0 && t_final.is_finite()) {
            return domain(format!("final time {t_final} must be positive"));
        }
        Ok(Self { nu, f, t_final })
    }
}

/// `P_0(x), ..., P_n(x)`.
pub fn legendre_eval_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n >= 1 {
        out.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        out.push(((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0));
    }
    out
}

/// `psi_k(x) = P_k(x) - P_{k+2}(x)` for `k = 0..=nx-2`.
pub fn psi_eval_all(nx: usize, x: f64) -> Vec<f64> {
    let p = legendre_eval_all(nx, x);
    (0..nx - 1).map(|k| p[k] - p[k + 2]).collect()
}

/// Stiffness, mass and generalized eigenpairs of the 1D Dirichlet Laplacian
/// in the basis `psi_k`.
#[derive(Debug, Clone)]
pub struct SpaceOperator1D {
    pub stiffness: DMatrix<f64>,
    pub mass: DMatrix<f64>,
    pub eigvecs: DMatrix<f64>,
    pub eigvals: DVector<f64>,
}

pub fn legendre_galerkin_1d(nx: usize) -> Result<SpaceOperator1D> {
    if nx < 2 {
        return domain(format!("spatial degree {nx} must be at least 2"));
    }
    let m = nx - 1;
    let mut a = DMatrix::zeros(m, m);
    let mut b = DMatrix::zeros(m, m);
    for k in 0..m {
        let kf = k as f64;
        a[(k, k)] = 4.0 * kf + 6.0;
        b[(k, k)] = 2.0 / (2.0 * kf + 1.0) + 2.0 / (2.0 * kf + 5.0);
        if k + 2 < m {
            let off = -2.0 / (2.0 * kf + 5.0);
            b[(k, k + 2)] = off;
            b[(k + 2, k)] = off;
        }
    }
    let chol = b.clone().cholesky().ok_or_else(|| Error::Convergence("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l.clone().try_inverse().ok_or_else(|| Error::Convergence("Cholesky factor not invertible".into()))?;
    let c = &linv * &a * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigvals = DVector::from_fn(m, |i, _| eig.eigenvalues[order[i]]);
    let q = DMatrix::from_fn(m, m, |r, col| eig.eigenvectors[(r, order[col])]);
    let eigvecs = linv.transpose() * q;
    if eigvals.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Convergence("nonpositive eigenvalue in the Laplacian pencil".into()));
    }
    Ok(SpaceOperator1D { stiffness: a, mass: b, eigvecs, eigvals })
}

/// Time expansions of every spatial eigenmode pair.
#[derive(Debug, Clone)]
pub struct SpaceTimeSolution {
    params: BasisParams,
    nu: f64,
    t_final: f64,
    nx: usize,
    space: SpaceOperator1D,
    /// `modes[i * m + j]` holds the time coefficients of eigenmode pair `(i, j)`.
    modes: Vec<Vec<f64>>,
    cond_max: f64,
}

impl SpaceTimeSolution {
    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn nt(&self) -> usize {
        self.modes[0].len() - 1
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn space(&self) -> &SpaceOperator1D {
        &self.space
    }

    pub fn mode_coeffs(&self, i: usize, j: usize) -> &[f64] {
        &self.modes[i * (self.nx - 1) + j]
    }

    /// Largest condition estimate among the per-mode systems.
    pub fn cond(&self) -> f64 {
        self.cond_max
    }

    /// Coefficients `U[k][l]` of `u(., ., t)` in the basis `psi_k(x1) psi_l(x2)`.
    pub fn coefficients_at(&self, t: f64) -> Result<DMatrix<f64>> {
        if !(0.0..=self.t_final).contains(&t) {
            return domain(format!("time {t} outside [0, {}]", self.t_final));
        }
        let m = self.nx - 1;
        let s = glof_eval_all(&self.params, self.nt(), t / self.t_final)?;
        let v = DMatrix::from_fn(m, m, |i, j| self.mode_coeffs(i, j).iter().zip(&s).map(|(a, b)| a * b).sum());
        let e = &self.space.eigvecs;
        Ok(e * v * e.transpose())
    }

    /// Values `u(xs[a], xs[b], t)` as a matrix indexed `(a, b)`.
    pub fn values_on_grid(&self, xs: &[f64], t: f64) -> Result<DMatrix<f64>> {
        let u = self.coefficients_at(t)?;
        let psi = psi_matrix(self.nx, xs);
        Ok(psi.transpose() * u * psi)
    }

    pub fn eval(&self, x1: f64, x2: f64, t: f64) -> Result<f64> {
        let u = self.coefficients_at(t)?;
        let p1 = DVector::from_vec(psi_eval_all(self.nx, x1));
        let p2 = DVector::from_vec(psi_eval_all(self.nx, x2));
        Ok(p1.dot(&(u * p2)))
    }
}

/// `psi_k(xs[a])` as a `(nx-1) x len` matrix.
fn psi_matrix(nx: usize, xs: &[f64]) -> DMatrix<f64> {
    let cols: Vec<Vec<f64>> = xs.iter().map(|&x| psi_eval_all(nx, x)).collect();
    DMatrix::from_fn(nx - 1, xs.len(), |k, a| cols[a][k])
}

/// Pieces shared by the solve and by residual checks.
struct Assembled {
    space: SpaceOperator1D,
    stiffness: DMatrix<f64>,
    gram: DMatrix<f64>,
    /// Interpolated time coefficients of `T^nu (f, psi_k psi_l)`, one matrix per time index.
    load: Vec<DMatrix<f64>>,
    scale: f64,
}

fn spatial_points(nx: usize) -> usize {
    nx + 16
}

fn assemble(p: &DiffusionProblem, nx: usize, c: &SolverConfig) -> Result<Assembled> {
    c.validate()?;
    let space = legendre_galerkin_1d(nx)?;
    let m = nx - 1;
    let nt = c.n;
    let scale = p.t_final.powf(p.nu);
    let time_rule = gauss_glof(&c.params, nt)?;
    let gl = legendre_gauss(spatial_points(nx))?;
    let xs = gl.nodes().to_vec();
    let wx = DVector::from_column_slice(gl.weights());
    let psi = psi_matrix(nx, &xs);
    let psi_w = DMatrix::from_fn(m, xs.len(), |k, a| psi[(k, a)] * wx[a]);

    let slices: Vec<Result<DMatrix<f64>>> = time_rule
        .nodes()
        .par_iter()
        .map(|&th| {
            let t = th * p.t_final;
            let mut fv = DMatrix::zeros(xs.len(), xs.len());
            for (a, &x1) in xs.iter().enumerate() {
                for (b, &x2) in xs.iter().enumerate() {
                    let v = (p.f)(x1, x2, t);
                    if !v.is_finite() {
                        return Err(Error::NonFinite { value: v, at: t, context: format!("forcing at ({x1}, {x2})") });
                    }
                    fv[(a, b)] = v;
                }
            }
            Ok(&psi_w * fv * psi_w.transpose() * scale)
        })
        .collect();
    let slices = slices.into_iter().collect::<Result<Vec<_>>>()?;

    let mut load = vec![DMatrix::zeros(m, m); nt + 1];
    for k in 0..m {
        for l in 0..m {
            let values: Vec<f64> = slices.iter().map(|s| s[(k, l)]).collect();
            let e = interpolate_values(&c.params, nt, &values)?;
            for (n, &cn) in e.coeffs().iter().enumerate() {
                load[n][(k, l)] = cn;
            }
        }
    }
    let stiffness = caputo_stiffness(&c.params, p.nu, nt, c.inner_rule_size)?;
    let gram = mass_matrix(&c.params, nt, c.inner_rule_size, &|_| 1.0)?;
    Ok(Assembled { space, stiffness, gram, load, scale })
}

/// Solve by diagonalizing the spatial operator and running one scalar
/// GLOF-Galerkin time solve per eigenmode pair.
pub fn solve_diffusion(p: &DiffusionProblem, nx: usize, c: &SolverConfig) -> Result<SpaceTimeSolution> {
    let asm = assemble(p, nx, c)?;
    let m = nx - 1;
    let nt = c.n;
    let e = &asm.space.eigvecs;
    let et = e.transpose();
    let rotated: Vec<DMatrix<f64>> = asm.load.iter().map(|f| &et * f * e).collect();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let solved: Vec<Result<(Vec<f64>, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let shift = asm.scale * (asm.space.eigvals[i] + asm.space.eigvals[j]);
            let a = &asm.stiffness + &asm.gram * shift;
            let rhs = &asm.gram * DVector::from_fn(nt + 1, |n, _| rotated[n][(i, j)]);
            let f = Factored::new(&a).map_err(|err| Error::Convergence(format!("mode ({i}, {j}): {err}")))?;
            let x = f.solve(&rhs).map_err(|err| Error::Convergence(format!("mode ({i}, {j}): {err}")))?;
            Ok((x.iter().copied().collect(), f.cond()))
        })
        .collect();
    let mut modes = Vec::with_capacity(m * m);
    let mut cond_max = 0.0f64;
    for r in solved {
        let (v, cond) = r?;
        cond_max = cond_max.max(cond);
        modes.push(v);
    }
    Ok(SpaceTimeSolution { params: c.params, nu: p.nu, t_final: p.t_final, nx, space: asm.space, modes, cond_max })
}

/// Relative residual of the coupled space-time Galerkin system,
/// `B (CD^nu U) B + T^nu (A U B + B U A) = F`, evaluated at a decoupled solution.
pub fn decoupling_residual(p: &DiffusionProblem, sol: &SpaceTimeSolution, c: &SolverConfig) -> Result<f64> {
    if sol.nt() != c.n || sol.nu != p.nu || sol.t_final != p.t_final {
        return Err(Error::Mismatch("solution was not computed from this problem and config".into()));
    }
    let asm = assemble(p, sol.nx, c)?;
    let (a, b) = (&asm.space.stiffness, &asm.space.mass);
    let e = &asm.space.eigvecs;
    let m = sol.nx - 1;
    let nt = c.n;
    let u: Vec<DMatrix<f64>> =
        (0..=nt).map(|n| e * DMatrix::from_fn(m, m, |i, j| sol.mode_coeffs(i, j)[n]) * e.transpose()).collect();
    let mut worst = 0.0f64;
    let mut size = 0.0f64;
    for k in 0..=nt {
        let mut lhs = DMatrix::zeros(m, m);
        let mut rhs = DMatrix::zeros(m, m);
        for n in 0..=nt {
            lhs += b * &u[n] * b * asm.stiffness[(k, n)]
                + (a * &u[n] * b + b * &u[n] * a) * (asm.scale * asm.gram[(k, n)]);
            rhs += &asm.load[n] * asm.gram[(k, n)];
        }
        worst = worst.max((lhs - &rhs).amax());
        size = size.max(rhs.amax());
    }
    Ok(if size > 0.0 { worst / size } else { worst })
}

/// Time nodes and weights on (0, 1) graded toward 0 (16-point Gauss-Legendre
/// on `[2^{-k-1}, 2^{-k}]`, k < 40), for L2-in-time errors of weakly
/// singular functions.
fn graded_time_rule() -> Result<Vec<(f64, f64)>> {
    let gl = legendre_gauss(15)?;
    let mut out = Vec::new();
    for k in 0..40 {
        let (a, b) = (0.5f64.powi(k + 1), 0.5f64.powi(k));
        let h = 0.5 * (b - a);
        for (x, w) in gl.iter() {
            out.push((a + h * (x + 1.0), h * w));
        }
    }
    Ok(out)
}

fn l2_space_time<F>(sol: &SpaceTimeSolution, nx_quad: usize, other: F) -> Result<f64>
where
    F: Fn(&[f64], f64) -> Result<DMatrix<f64>> + Sync,
{
    let gl = legendre_gauss(nx_quad)?;
    let xs = gl.nodes().to_vec();
    let wx = gl.weights().to_vec();
    let tr = graded_time_rule()?;
    let parts: Vec<Result<f64>> = tr
        .par_iter()
        .map(|&(th, wt)| {
            let t = th * sol.t_final;
            let d = sol.values_on_grid(&xs, t)? - other(&xs, t)?;
            let mut s = 0.0;
            for a in 0..xs.len() {
                for b in 0..xs.len() {
                    s += wx[a] * wx[b] * d[(a, b)] * d[(a, b)];
                }
            }
            Ok(s * wt)
        })
        .collect();
    let mut sum = 0.0;
    for p in parts {
        sum += p?;
    }
    Ok((sum * sol.t_final).sqrt())
}

/// `||u_N - u||` in L2((-1,1)^2 x (0,T)).
pub fn l2_error<F>(sol: &SpaceTimeSolution, exact: F) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64 + Sync,
{
    l2_space_time(sol, sol.nx + 16, |xs, t| Ok(DMatrix::from_fn(xs.len(), xs.len(), |a, b| exact(xs[a], xs[b], t))))
}

/// `||u_N - v_M||` in L2((-1,1)^2 x (0,T)) for two solutions on the same interval.
pub fn l2_distance(a: &SpaceTimeSolution, b: &SpaceTimeSolution) -> Result<f64> {
    if a.t_final != b.t_final {
        return Err(Error::Mismatch(format!("final times {} and {} differ", a.t_final, b.t_final)));
    }
    l2_space_time(a, a.nx.max(b.nx) + 16, |xs, t| b.values_on_grid(xs, t))
}
