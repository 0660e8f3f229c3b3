use nalgebra::{DMatrix, DVector, LU};

use crate::error::{Error, Result};

/// Relative pivot size below which a matrix counts as singular.
pub const PIVOT_TOL: f64 = 1e-13;

const HAGER_MAX_ITER: usize = 5;

/// LU factors (partial pivoting) of a symmetrically equilibrated square
/// matrix `D A D`, plus a one-norm condition estimate of `A` itself.
pub struct Factored {
    scale: DVector<f64>,
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    lu_t: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    cond: f64,
}

impl Factored {
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || a.nrows() == 0 {
            return Err(Error::Mismatch(format!("expected a nonempty square matrix, got {}x{}", a.nrows(), a.ncols())));
        }
        if let Some(bad) = a.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite { value: *bad, at: f64::NAN, context: "system matrix".into() });
        }
        let n = a.nrows();
        let scale = DVector::from_fn(n, |i, _| {
            let d = a[(i, i)].abs();
            let r = if d > 0.0 { d } else { a.row(i).amax() };
            if r > 0.0 {
                1.0 / r.sqrt()
            } else {
                1.0
            }
        });
        let scaled = DMatrix::from_fn(n, n, |i, j| scale[i] * a[(i, j)] * scale[j]);
        let lu = scaled.clone().lu();
        let lu_t = scaled.transpose().lu();
        let mut pa = scaled;
        lu.p().permute_rows(&mut pa);
        let u = lu.u();
        for row in 0..n {
            let pivot = u[(row, row)].abs();
            if !(pivot > PIVOT_TOL * pa.row(row).amax()) {
                return Err(Error::Singular { row, pivot, cond: f64::INFINITY });
            }
        }
        let mut f = Self { scale, lu, lu_t, cond: f64::INFINITY };
        f.cond = one_norm(a) * f.inverse_one_norm_estimate();
        Ok(f)
    }

    pub fn cond(&self) -> f64 {
        self.cond
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        let x = self.solve_with(&self.lu, b).ok_or(Error::Singular { row: 0, pivot: 0.0, cond: self.cond })?;
        if let Some(bad) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFinite { value: *bad, at: f64::NAN, context: "linear solve".into() });
        }
        Ok(x)
    }

    /// `D (DAD)^{-1} D b`, or the transposed analogue.
    fn solve_with(&self, lu: &LU<f64, nalgebra::Dyn, nalgebra::Dyn>, b: &DVector<f64>) -> Option<DVector<f64>> {
        let y = lu.solve(&b.component_mul(&self.scale))?;
        Some(y.component_mul(&self.scale))
    }

    /// Hager's estimate of `||A^{-1}||_1`.
    fn inverse_one_norm_estimate(&self) -> f64 {
        let n = self.scale.len();
        let mut x = DVector::from_element(n, 1.0 / n as f64);
        let mut est = 0.0;
        for _ in 0..HAGER_MAX_ITER {
            let Some(y) = self.solve_with(&self.lu, &x) else { return f64::INFINITY };
            est = y.iter().map(|v| v.abs()).sum::<f64>();
            let xi = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
            let Some(z) = self.solve_with(&self.lu_t, &xi) else { return f64::INFINITY };
            let (j, zmax) =
                z.iter()
                    .enumerate()
                    .map(|(j, v)| (j, v.abs()))
                    .fold((0, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
            if zmax <= z.dot(&x) {
                break;
            }
            x.fill(0.0);
            x[j] = 1.0;
        }
        est
    }
}

pub fn one_norm(a: &DMatrix<f64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 1.0, 2.0, 3.0]);
        let f = Factored::new(&a).unwrap();
        let x = f.solve(&DVector::from_vec(vec![1.0, 2.0])).unwrap();
        assert!((x[0] - 0.1).abs() < 1e-15 && (x[1] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn condition_matches_exact_one_norm() {
        let a = DMatrix::from_fn(6, 6, |i, j| 1.0 / (i + j + 1) as f64);
        let f = Factored::new(&a).unwrap();
        let exact = one_norm(&a) * one_norm(&a.clone().try_inverse().unwrap());
        assert!(f.cond() <= exact * (1.0 + 1e-6));
        assert!(f.cond() >= exact / 10.0, "{} vs {exact}", f.cond());
    }

    #[test]
    fn singular_rejected() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(Factored::new(&a), Err(Error::Singular { .. })));
    }

    #[test]
    fn nonfinite_rejected() {
        let a = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(matches!(Factored::new(&a), Err(Error::NonFinite { .. })));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn solve_has_small_backward_error(
            n in 1usize..12,
            seed in proptest::collection::vec(-1.0f64..1.0, 144),
            scale in proptest::collection::vec(-8i32..8, 12),
        ) {
            // badly scaled, diagonally dominant
            let a = DMatrix::from_fn(n, n, |i, j| {
                let v = if i == j { n as f64 + 1.0 } else { seed[i * 12 + j] };
                v * 2f64.powi(scale[i] + scale[j])
            });
            let b = DVector::from_fn(n, |i, _| seed[i] + 0.5);
            let x = Factored::new(&a).unwrap().solve(&b).unwrap();
            let r = &a * &x - &b;
            for i in 0..n {
                let row = a.row(i).iter().zip(x.iter()).map(|(p, q)| (p * q).abs()).sum::<f64>() + b[i].abs();
                proptest::prop_assert!(r[i].abs() <= 1e-13 * row, "row {}: {} vs {}", i, r[i], row);
            }
        }
    }
}
