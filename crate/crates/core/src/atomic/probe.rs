use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};

/// Probe beam entering the vapor cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeField {
    /// Field amplitude U0 at the cell input, V/m.
    pub input_amplitude: f64,
    pub input_phase: f64,
    pub wavelength: f64,
    /// Full width at half maximum of the beam, m.
    pub fwhm: f64,
    pub cell_length: f64,
}

/// `π·c·ε0/(8·ln2)`, mapping `F²·|U|²` to optical power.
fn power_factor() -> f64 {
    PI * SPEED_OF_LIGHT * VACUUM_PERMITTIVITY / (8.0 * LN_2)
}

impl ProbeField {
    /// Builds the probe from its optical power instead of its amplitude.
    pub fn from_power(
        power: f64,
        input_phase: f64,
        wavelength: f64,
        fwhm: f64,
        cell_length: f64,
    ) -> Result<Self> {
        ensure_nonnegative("probe power", power)?;
        ensure_positive("fwhm", fwhm)?;
        let probe = Self {
            input_amplitude: (power / (power_factor() * fwhm * fwhm)).sqrt(),
            input_phase,
            wavelength,
            fwhm,
            cell_length,
        };
        probe.validate()?;
        Ok(probe)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_nonnegative("input_amplitude", self.input_amplitude)?;
        ensure_positive("wavelength", self.wavelength)?;
        ensure_positive("fwhm", self.fwhm)?;
        ensure_positive("cell_length", self.cell_length)?;
        if !self.input_phase.is_finite() {
            return Err(Error::invalid("input_phase", "must be finite"));
        }
        Ok(())
    }

    pub fn input_power(&self) -> f64 {
        self.power_of(self.input_amplitude)
    }

    fn power_of(&self, amplitude: f64) -> f64 {
        power_factor() * self.fwhm * self.fwhm * amplitude * amplitude
    }

    /// Geometric beam area `π(F/2)²`.
    pub fn beam_area(&self) -> f64 {
        PI * 0.25 * self.fwhm * self.fwhm
    }

    /// Beam area times cell length.
    pub fn interaction_volume(&self) -> f64 {
        self.beam_area() * self.cell_length
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOutput {
    pub amplitude: f64,
    pub phase: f64,
    pub power: f64,
}

/// Amplitude, phase and power of the probe after the cell.
pub fn probe_transfer(probe: &ProbeField, chi: Complex64) -> Result<ProbeOutput> {
    probe.validate()?;
    let k = PI * probe.cell_length / probe.wavelength;
    let amplitude = probe.input_amplitude * (-k * chi.im).exp();
    Ok(ProbeOutput {
        amplitude,
        phase: probe.input_phase + k * chi.re,
        power: probe.power_of(amplitude),
    })
}
