//! Gamma-function helpers.
//!
//! The gamma function comes from `libm` (within a few ulp on the positive
//! axis). Ratios go through log-gamma so that arguments in the hundreds do not
//! overflow.

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `1 / Γ(x)`, zero at the poles `x = 0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// `Γ(a) / Γ(b)` for positive `a`, `b`.
pub fn gamma_ratio(a: f64, b: f64) -> f64 {
    debug_assert!(a > 0.0 && b > 0.0);
    if a < 150.0 && b < 150.0 {
        gamma(a) / gamma(b)
    } else {
        (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}
