//! Atomic response of the four-level ladder: complex susceptibility, its
//! slope with respect to the RF Rabi frequency, and probe-beam transfer
//! through the vapor cell.

mod probe;
mod rational;
mod solver;

pub use probe::{probe_transfer, ProbeField, ProbeOutput};
pub use rational::{susceptibility_rational, RationalSusceptibility};
pub use solver::{
    steady_state, susceptibility_numeric, ConditioningReport, SolverMode, SolverOptions,
};

use num_complex::Complex64;

use crate::constants::{HBAR, VACUUM_PERMITTIVITY};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};

/// Fields and relaxation constants of one vapor-cell element.
///
/// All frequencies are angular (rad/s). Detunings follow
/// `Δ = ω_transition − ω_field`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourLevelSystem {
    pub probe_rabi: f64,
    pub coupling_rabi: f64,
    pub probe_detuning: f64,
    pub coupling_detuning: f64,
    pub rf_detuning: f64,
    /// Decay rate of the intermediate state |2⟩.
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    /// Atomic number density, m⁻³.
    pub atomic_density: f64,
    /// Fraction of atoms taking part in the interaction.
    pub population_fraction: f64,
    /// |1⟩→|2⟩ dipole moment, C·m.
    pub mu12: f64,
    /// |3⟩→|4⟩ dipole moment, C·m.
    pub mu34: f64,
    /// Rydberg coherence time, s.
    pub t2: f64,
}

impl FourLevelSystem {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("probe_rabi", self.probe_rabi)?;
        ensure_nonnegative("coupling_rabi", self.coupling_rabi)?;
        for (name, v) in [
            ("probe_detuning", self.probe_detuning),
            ("coupling_detuning", self.coupling_detuning),
            ("rf_detuning", self.rf_detuning),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        ensure_positive("gamma2", self.gamma2)?;
        ensure_nonnegative("gamma3", self.gamma3)?;
        ensure_nonnegative("gamma4", self.gamma4)?;
        ensure_positive("atomic_density", self.atomic_density)?;
        ensure_positive("population_fraction", self.population_fraction)?;
        if self.population_fraction > 1.0 {
            return Err(Error::invalid("population_fraction", "must not exceed 1"));
        }
        ensure_positive("mu12", self.mu12)?;
        ensure_positive("mu34", self.mu34)?;
        ensure_positive("t2", self.t2)?;
        let d = self.prefactor();
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::invalid(
                "prefactor",
                format!("D = {d} is not finite and positive"),
            ));
        }
        Ok(())
    }

    /// Density of atoms that interact with the fields.
    pub fn interacting_density(&self) -> f64 {
        self.atomic_density * self.population_fraction
    }

    /// Susceptibility scale `D = 2·N·μ12²/(ε0·ħ)` in s⁻¹, with `N` the
    /// interacting density.
    pub fn prefactor(&self) -> f64 {
        2.0 * self.interacting_density() * self.mu12 * self.mu12 / (VACUUM_PERMITTIVITY * HBAR)
    }

    /// Number of interacting atoms in `volume` (m³).
    pub fn atom_count(&self, volume: f64) -> f64 {
        self.interacting_density() * volume
    }
}

/// Anything that maps an RF Rabi frequency to a complex susceptibility.
pub trait Susceptibility {
    fn chi(&self, omega_rf: f64) -> Result<Complex64>;

    /// `dχ/dΩ` at `omega_l`.
    fn slope(&self, omega_l: f64) -> Result<Complex64>;
}

/// Susceptibility obtained from the steady-state density matrix.
#[derive(Debug, Clone, Copy)]
pub struct NumericSusceptibility {
    pub system: FourLevelSystem,
    pub options: SolverOptions,
}

/// Relative step of the numeric slope.
pub const SLOPE_STEP: f64 = 1e-4;
/// Agreement required between the h/2 and extrapolated estimates.
pub const SLOPE_TOLERANCE: f64 = 1e-4;

impl Susceptibility for NumericSusceptibility {
    fn chi(&self, omega_rf: f64) -> Result<Complex64> {
        susceptibility_numeric(&self.system, omega_rf, &self.options)
    }

    fn slope(&self, omega_l: f64) -> Result<Complex64> {
        ensure_positive("omega_l", omega_l)?;
        let central = |h: f64| -> Result<Complex64> {
            Ok((self.chi(omega_l + h)? - self.chi(omega_l - h)?) / (2.0 * h))
        };
        let h = SLOPE_STEP * omega_l;
        let coarse = central(h)?;
        let fine = central(0.5 * h)?;
        let extrapolated = (4.0 * fine - coarse) / 3.0;
        if (extrapolated - fine).norm() <= SLOPE_TOLERANCE * extrapolated.norm() {
            Ok(extrapolated)
        } else {
            Err(Error::SlopeNotConverged {
                coarse,
                fine,
                extrapolated,
            })
        }
    }
}

impl Susceptibility for RationalSusceptibility {
    fn chi(&self, omega_rf: f64) -> Result<Complex64> {
        susceptibility_rational(self, omega_rf)
    }

    fn slope(&self, omega_l: f64) -> Result<Complex64> {
        ensure_positive("omega_l", omega_l)?;
        self.derivative(omega_l)
    }
}

/// `χ′(Ω_l)` for either source: analytic for the rational model, Richardson
/// finite difference for the numeric solver.
pub fn susceptibility_slope<S: Susceptibility + ?Sized>(
    source: &S,
    omega_l: f64,
) -> Result<Complex64> {
    source.slope(omega_l)
}


#[cfg(test)]
mod tests {
    use super::fixtures::cesium;
    use super::*;
    use crate::constants::angular;

    #[test]
    fn prefactor_uses_interacting_density() {
        let sys = cesium();
        let expected = 2.0 * 3e13 * sys.mu12.powi(2) / (VACUUM_PERMITTIVITY * HBAR);
        assert!((sys.prefactor() - expected).abs() < 1e-12 * expected);
        sys.validate().unwrap();
    }

    #[test]
    fn rejects_negative_inputs() {
        let mut sys = cesium();
        sys.gamma3 = -1.0;
        assert!(matches!(
            sys.validate(),
            Err(Error::InvalidParameter { name: "gamma3", .. })
        ));
        let mut sys = cesium();
        sys.probe_rabi = 0.0;
        assert!(sys.validate().is_err());
    }

    #[test]
    fn constant_rational_has_zero_slope() {
        let model =
            RationalSusceptibility::new(1.0, [0.0, 0.0, 2.0], [0.0, 0.0, 3.0], [0.0, 0.0, 1.0])
                .unwrap();
        let s = susceptibility_slope(&model, angular(1e6)).unwrap();
        assert_eq!(s, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn numeric_slope_at_default_lo_is_finite_and_nonzero() {
        let source = NumericSusceptibility {
            system: cesium(),
            options: SolverOptions {
                weak_probe_limit: None,
                ..SolverOptions::default()
            },
        };
        let s = susceptibility_slope(&source, angular(1e6)).unwrap();
        assert!(s.re.is_finite() && s.im.is_finite());
        assert!(s.norm() > 0.0);
    }

    #[test]
    fn slope_requires_positive_lo_rabi() {
        let model =
            RationalSusceptibility::new(1.0, [0.0; 3], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]).unwrap();
        assert!(susceptibility_slope(&model, 0.0).is_err());
    }
}
