use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Quartic-over-quartic susceptibility in the RF Rabi frequency Ω:
///
/// ```text
/// χ(Ω) = −D·(A1Ω⁴ + A2Ω² + A3)/(C1Ω⁴ + C2Ω² + C3) + j·D·(B1Ω⁴ + B2Ω² + B3)/(C1Ω⁴ + C2Ω² + C3)
/// ```
///
/// Coefficient arrays are ordered `[X1, X2, X3]`, highest power first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalSusceptibility {
    pub prefactor: f64,
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub c: [f64; 3],
}

#[inline]
fn poly(k: &[f64; 3], w2: f64) -> f64 {
    (k[0] * w2 + k[1]) * w2 + k[2]
}

/// `(2·X1Ω² + X2)`, the bracketed factor of `dX/dΩ = 2Ω(2X1Ω² + X2)`.
#[inline]
fn half_dpoly(k: &[f64; 3], w2: f64) -> f64 {
    2.0 * k[0] * w2 + k[1]
}

impl RationalSusceptibility {
    pub fn new(prefactor: f64, a: [f64; 3], b: [f64; 3], c: [f64; 3]) -> Result<Self> {
        if !prefactor.is_finite() {
            return Err(Error::invalid("prefactor", "must be finite"));
        }
        if a.iter().chain(&b).chain(&c).any(|v| !v.is_finite()) {
            return Err(Error::invalid("coefficients", "must be finite"));
        }
        if c == [0.0; 3] {
            return Err(Error::invalid(
                "coefficients",
                "denominator polynomial is identically zero",
            ));
        }
        Ok(Self { prefactor, a, b, c })
    }

    fn denominator(&self, omega: f64) -> Result<f64> {
        let den = poly(&self.c, omega * omega);
        if den == 0.0 || !den.is_finite() {
            Err(Error::ZeroDenominator { omega })
        } else {
            Ok(den)
        }
    }

    /// Analytic `dχ/dΩ`.
    pub fn derivative(&self, omega: f64) -> Result<Complex64> {
        let w2 = omega * omega;
        let den = self.denominator(omega)?;
        let dc = half_dpoly(&self.c, w2);
        let bracket = |k: &[f64; 3]| half_dpoly(k, w2) / den - poly(k, w2) * dc / (den * den);
        let scale = 2.0 * self.prefactor * omega;
        Ok(Complex64::new(
            -scale * bracket(&self.a),
            scale * bracket(&self.b),
        ))
    }

    /// Least-squares fit of the coefficients to `(Ω, χ)` samples, with
    /// `C3 = 1`.
    ///
    /// `degree` is the polynomial degree in Ω² (1 or 2); with degree 1 the
    /// Ω⁴ coefficients are held at zero. Samples must not include poles.
    pub fn fit(prefactor: f64, samples: &[(f64, Complex64)], degree: usize) -> Result<Self> {
        if !(1..=2).contains(&degree) {
            return Err(Error::invalid("degree", "must be 1 or 2"));
        }
        if !(prefactor.is_finite() && prefactor != 0.0) {
            return Err(Error::invalid("prefactor", "must be finite and nonzero"));
        }
        // unknowns per polynomial: degree+1 for A and B, degree for C
        let unknowns = 3 * degree + 2;
        if 2 * samples.len() < unknowns {
            return Err(Error::invalid(
                "samples",
                format!("need at least {} samples", unknowns.div_ceil(2)),
            ));
        }
        let scale = samples.iter().map(|(w, _)| w.abs()).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::invalid("samples", "need at least one nonzero Ω"));
        }

        let mut design = DMatrix::<f64>::zeros(2 * samples.len(), unknowns);
        let mut rhs = DVector::<f64>::zeros(2 * samples.len());
        for (row, &(omega, chi)) in samples.iter().enumerate() {
            let u = (omega / scale).powi(2);
            let y = chi / prefactor;
            let powers: Vec<f64> = (0..=degree).rev().map(|p| u.powi(p as i32)).collect();
            let (re, im) = (2 * row, 2 * row + 1);
            for (j, &p) in powers.iter().enumerate() {
                design[(re, j)] = p;
                design[(im, degree + 1 + j)] = -p;
            }
            for (j, &p) in powers[..degree].iter().enumerate() {
                design[(re, 2 * degree + 2 + j)] = y.re * p;
                design[(im, 2 * degree + 2 + j)] = y.im * p;
            }
            rhs[re] = -y.re;
            rhs[im] = -y.im;
        }

        // the C columns carry χ/D (seconds) while A and B columns are O(1)
        let norms: Vec<f64> = design.column_iter().map(|c| c.norm()).collect();
        for (j, n) in norms.iter().enumerate() {
            if *n > 0.0 {
                design.column_mut(j).unscale_mut(*n);
            }
        }
        let svd = design.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max();
        let mut sol = svd
            .solve(&rhs, cutoff)
            .map_err(|e| Error::Domain(format!("rational fit failed: {e}")))?;
        for (j, n) in norms.iter().enumerate() {
            if *n > 0.0 {
                sol[j] /= n;
            }
        }

        let unscale = |coef: &[f64]| -> [f64; 3] {
            // coef ordered from u^degree down to u^0; u = Ω²/scale²
            let mut out = [0.0; 3];
            for (j, &v) in coef.iter().enumerate() {
                let p = (degree - j) as i32;
                out[2 - p as usize] = v / scale.powi(2 * p);
            }
            out
        };
        let a = unscale(&sol.as_slice()[..degree + 1]);
        let b = unscale(&sol.as_slice()[degree + 1..2 * degree + 2]);
        let mut c_coef = sol.as_slice()[2 * degree + 2..].to_vec();
        c_coef.push(1.0);
        let c = unscale(&c_coef);
        Self::new(prefactor, a, b, c)
    }
}

/// Evaluates the rational model at `omega_rf`.
pub fn susceptibility_rational(model: &RationalSusceptibility, omega_rf: f64) -> Result<Complex64> {
    let w2 = omega_rf * omega_rf;
    let den = model.denominator(omega_rf)?;
    let d = model.prefactor;
    Ok(Complex64::new(
        -d * poly(&model.a, w2) / den,
        d * poly(&model.b, w2) / den,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_ratio_gives_pure_imaginary_prefactor() {
        let c = [0.3, -1.2, 4.0];
        let m = RationalSusceptibility::new(2.5, [0.0; 3], c, c).unwrap();
        for w in [0.0, 0.1, 1.0, 17.0] {
            let chi = susceptibility_rational(&m, w).unwrap();
            assert!((chi - Complex64::new(0.0, 2.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_frequency_is_constant_term_ratio() {
        let m = RationalSusceptibility::new(3.0, [1.0, 2.0, 5.0], [4.0, 1.0, 7.0], [1.0, 1.0, 2.0])
            .unwrap();
        let chi = susceptibility_rational(&m, 0.0).unwrap();
        assert_eq!(chi, Complex64::new(-3.0 * 5.0 / 2.0, 3.0 * 7.0 / 2.0));
    }

    #[test]
    fn zero_denominator_is_a_domain_error() {
        // C(Ω) = Ω² − 4 vanishes at Ω = 2
        let m =
            RationalSusceptibility::new(1.0, [0.0; 3], [0.0, 0.0, 1.0], [0.0, 1.0, -4.0]).unwrap();
        assert!(matches!(
            susceptibility_rational(&m, 2.0),
            Err(Error::ZeroDenominator { .. })
        ));
        assert!(m.derivative(2.0).is_err());
        assert!(RationalSusceptibility::new(1.0, [0.0; 3], [0.0; 3], [0.0; 3]).is_err());
    }

    #[test]
    fn fit_recovers_known_quadratic_model() {
        let truth = RationalSusceptibility::new(
            1e2,
            [2e-28, -3e-14, 0.5],
            [1e-28, 4e-14, 2.0],
            [3e-28, 1e-14, 1.0],
        )
        .unwrap();
        let samples: Vec<_> = (0..24)
            .map(|i| {
                let w = 1e6 + 4e5 * i as f64;
                (w, susceptibility_rational(&truth, w).unwrap())
            })
            .collect();
        let fitted = RationalSusceptibility::fit(truth.prefactor, &samples, 2).unwrap();
        for w in [1.3e6, 4.2e6, 9.1e6] {
            let a = susceptibility_rational(&truth, w).unwrap();
            let b = susceptibility_rational(&fitted, w).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm(), "{a} vs {b}");
        }
    }
}
