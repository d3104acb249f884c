//! Small dense kernels shared by the combiners.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest condition number accepted when inverting a Gram matrix.
pub const MAX_CONDITION: f64 = 1e12;

/// `ΘH`: row `m` of `h` scaled by `theta[m]`.
pub fn apply_diagonal(theta: &DVector<Complex64>, h: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let mut out = h.clone();
    for (m, t) in theta.iter().enumerate() {
        for x in out.row_mut(m).iter_mut() {
            *x *= *t;
        }
    }
    out
}

/// Spectral condition number of a Hermitian positive semidefinite matrix.
pub fn hermitian_condition(a: &DMatrix<Complex64>) -> f64 {
    let ev = a.clone().symmetric_eigenvalues();
    let max = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = ev.iter().fold(f64::INFINITY, |m, v| m.min(*v));
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Inverse of a Hermitian positive definite matrix through its Cholesky
/// factor, refusing matrices with condition number above `max_condition`.
pub fn hermitian_inverse(
    a: &DMatrix<Complex64>,
    max_condition: f64,
) -> Result<(DMatrix<Complex64>, f64)> {
    let cond = hermitian_condition(a);
    if !(cond <= max_condition) {
        return Err(Error::Combiner {
            reason: "Gram matrix H*Θ*ΘH is rank deficient or ill-conditioned",
            condition_number: cond,
        });
    }
    let chol = a.clone().cholesky().ok_or(Error::Combiner {
        reason: "Gram matrix H*Θ*ΘH is not positive definite",
        condition_number: cond,
    })?;
    Ok((chol.inverse(), cond))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_well_conditioned_matrix() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(4.0, 0.0),
                Complex64::new(1.0, 1.0),
                Complex64::new(1.0, -1.0),
                Complex64::new(3.0, 0.0),
            ],
        );
        let (inv, cond) = hermitian_inverse(&a, MAX_CONDITION).unwrap();
        let eye = &a * &inv;
        assert!((eye - DMatrix::identity(2, 2)).camax() < 1e-14);
        assert!(cond > 1.0 && cond < 10.0);
    }

    #[test]
    fn singular_matrix_is_refused() {
        let one = Complex64::new(1.0, 0.0);
        let a = DMatrix::from_element(3, 3, one);
        match hermitian_inverse(&a, MAX_CONDITION) {
            Err(Error::Combiner {
                condition_number, ..
            }) => assert!(condition_number > MAX_CONDITION),
            other => panic!("{other:?}"),
        }
    }
}
