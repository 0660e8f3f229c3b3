use std::f64::consts::PI;
use std::sync::Arc;

use crate::approx::SingularMonomial;
use crate::error::{Error, Result};
use crate::fracops::{caputo_power_oracle, mittag_leffler};
use crate::solvers::ScalarFn;
use crate::spacetime::SpaceTimeFn;

/// Names accepted by `--f`, `--q` and `--g`.
pub const REGISTRY: &[&str] = &[
    "sin",
    "cos",
    "exp",
    "zero",
    "const:K",
    "pow:R",
    "powlog:R:K",
    "mittag:NU:K",
    "1+sin",
    "tsin",
    "bvpu",
    "expxyt",
    "diffu:A",
];

/// A named function of one variable on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin {
    Sin,
    Cos,
    Exp,
    Const(f64),
    /// `t^r (-log t)^k`.
    PowLog {
        r: f64,
        k: u32,
    },
    /// `E_nu(-k t^nu)`.
    Mittag {
        nu: f64,
        k: f64,
    },
    OnePlusSin,
    /// `t sin t`.
    TSin,
    /// `t^{3/2} (1 - t)`.
    BvpExact,
}

/// A named function of `(x1, x2, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Builtin2d {
    /// Forcing `exp(x1 x2 t)`.
    ExpXyt,
    /// Exact solution `(t^a + t^{2a}) sin(pi x1) sin(pi x2)`.
    Manufactured { a: f64 },
}

fn unknown(name: &str) -> Error {
    Error::Config(format!("unknown function '{name}'; registered: {}", REGISTRY.join(", ")))
}

fn num(name: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Config(format!("bad number '{s}' in function '{name}'")))
}

impl Builtin {
    pub fn parse(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(':').collect();
        let b = match parts.as_slice() {
            ["sin"] => Self::Sin,
            ["cos"] => Self::Cos,
            ["exp"] => Self::Exp,
            ["zero"] => Self::Const(0.0),
            ["const", k] => Self::Const(num(name, k)?),
            ["pow", r] => Self::PowLog { r: num(name, r)?, k: 0 },
            ["powlog", r, k] => Self::PowLog {
                r: num(name, r)?,
                k: k.parse().map_err(|_| Error::Config(format!("bad log power '{k}' in '{name}'")))?,
            },
            ["mittag", nu, k] => {
                let nu = num(name, nu)?;
                if !(nu > 0.0) {
                    return Err(Error::Config(format!("Mittag-Leffler index must be positive in '{name}'")));
                }
                Self::Mittag { nu, k: num(name, k)? }
            }
            ["1+sin"] => Self::OnePlusSin,
            ["tsin"] => Self::TSin,
            ["bvpu"] => Self::BvpExact,
            _ => return Err(unknown(name)),
        };
        Ok(b)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Self::Sin => t.sin(),
            Self::Cos => t.cos(),
            Self::Exp => t.exp(),
            Self::Const(k) => k,
            Self::PowLog { r, k } => {
                if k == 0 {
                    t.powf(r)
                } else {
                    t.powf(r) * (-t.ln()).powi(k as i32)
                }
            }
            Self::Mittag { nu, k } => mittag_leffler(nu, -k * t.powf(nu)).unwrap_or(f64::NAN),
            Self::OnePlusSin => 1.0 + t.sin(),
            Self::TSin => t * t.sin(),
            Self::BvpExact => t.powf(1.5) * (1.0 - t),
        }
    }

    pub fn to_fn(self) -> ScalarFn {
        Arc::new(move |t| self.eval(t))
    }

    /// Unbounded or non-smooth at `t = 0`.
    pub fn singular_at_zero(&self) -> bool {
        match *self {
            Self::PowLog { r, k } => k > 0 || r.fract() != 0.0 || r < 0.0,
            Self::Mittag { nu, .. } => nu.fract() != 0.0,
            Self::BvpExact => true,
            _ => false,
        }
    }

    /// The singular monomial this function is, if any.
    pub fn monomial(&self) -> Option<SingularMonomial> {
        match *self {
            Self::PowLog { r, k } => SingularMonomial::new(r, k).ok(),
            _ => None,
        }
    }

    /// Forcing for `-D^mu u + q u = g` when `u` is this function, if known.
    pub fn rl_forcing(&self, mu: f64, q: ScalarFn) -> Result<ScalarFn> {
        match *self {
            Self::BvpExact => {
                // u = t^{3/2} - t^{5/2}
                let a = caputo_power_oracle(mu, 1.5)?;
                let b = caputo_power_oracle(mu, 2.5)?;
                Ok(Arc::new(move |t| -(a.eval(t) - b.eval(t)) + q(t) * t.powf(1.5) * (1.0 - t)))
            }
            _ => Err(Error::Config("no closed-form forcing for this exact solution; pass --g".into())),
        }
    }
}

impl Builtin2d {
    pub fn parse(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(':').collect();
        match parts.as_slice() {
            ["expxyt"] => Ok(Self::ExpXyt),
            ["diffu", a] => {
                let a = num(name, a)?;
                if !(a > 0.0) {
                    return Err(Error::Config(format!("time exponent must be positive in '{name}'")));
                }
                Ok(Self::Manufactured { a })
            }
            _ => Err(unknown(name)),
        }
    }

    /// Exact solution, when this name denotes one.
    pub fn exact(&self) -> Option<impl Fn(f64, f64, f64) -> f64 + Sync + Send + Copy> {
        match *self {
            Self::Manufactured { a } => {
                Some(move |x1: f64, x2: f64, t: f64| (t.powf(a) + t.powf(2.0 * a)) * (PI * x1).sin() * (PI * x2).sin())
            }
            Self::ExpXyt => None,
        }
    }

    /// Forcing of `CD^nu u - Δu = f`.
    pub fn forcing(&self, nu: f64) -> Result<SpaceTimeFn> {
        match *self {
            Self::ExpXyt => Ok(Arc::new(|x1, x2, t| (x1 * x2 * t).exp())),
            Self::Manufactured { a } => {
                let o1 = caputo_power_oracle(nu, a)?;
                let o2 = caputo_power_oracle(nu, 2.0 * a)?;
                Ok(Arc::new(move |x1, x2, t| {
                    let s = (PI * x1).sin() * (PI * x2).sin();
                    (o1.eval(t) + o2.eval(t) + 2.0 * PI * PI * (t.powf(a) + t.powf(2.0 * a))) * s
                }))
            }
        }
    }
}
