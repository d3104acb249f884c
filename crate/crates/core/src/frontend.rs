//! Receiver-side model of one RAQ-MIMO element and of the conventional
//! antenna array it is compared against.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::atomic::{
    probe_transfer, FourLevelSystem, NumericSusceptibility, ProbeField, ProbeOutput, Susceptibility,
};
use crate::constants::{
    angular, wavelength, BOLTZMANN, ELEMENTARY_CHARGE, HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY,
};
use crate::error::{ensure_nonnegative, ensure_positive, Error, Result};

/// RF local oscillator shared by all elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalOscillator {
    /// Carrier frequency f_l, Hz.
    pub frequency: f64,
    /// Radiated power, W. Informational; the Rabi frequency is authoritative.
    pub power: f64,
    /// LO Rabi frequency Ω_l, rad/s.
    pub rabi: f64,
    /// Angle of incidence ϑ on the array, rad.
    pub incidence_angle: f64,
    /// Phase θ_y1 at the first element, rad.
    pub reference_phase: f64,
    /// Largest accepted ratio Ω_k/Ω_l of a user's Rabi frequency.
    pub max_signal_ratio: f64,
}

impl LocalOscillator {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("lo frequency", self.frequency)?;
        ensure_nonnegative("lo power", self.power)?;
        ensure_positive("lo rabi", self.rabi)?;
        ensure_positive("max_signal_ratio", self.max_signal_ratio)?;
        if !(self.incidence_angle.is_finite() && self.reference_phase.is_finite()) {
            return Err(Error::invalid("lo phase", "angles must be finite"));
        }
        Ok(())
    }

    /// Checks that a user of Rabi frequency `omega_k` is weak against the LO.
    pub fn check_weak_signal(&self, omega_k: f64) -> Result<()> {
        let ratio = omega_k / self.rabi;
        if ratio <= self.max_signal_ratio {
            Ok(())
        } else {
            Err(Error::invalid(
                "user rabi",
                format!("Ω_k/Ω_l = {ratio:.3e} exceeds {}", self.max_signal_ratio),
            ))
        }
    }
}

/// Rabi frequency induced on the |3⟩→|4⟩ transition by a plane wave of
/// intensity `intensity` (W/m²).
pub fn rabi_from_intensity(intensity: f64, mu34: f64) -> f64 {
    let field = (2.0 * intensity / (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY)).sqrt();
    mu34 * field / HBAR
}

/// Balanced coherent optical detection chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotodetectionChain {
    /// Local optical power P_l, W.
    pub local_power: f64,
    /// Local optical phase φ_l, rad.
    pub local_phase: f64,
    /// Quantum efficiency η.
    pub efficiency: f64,
    /// Linear amplifier gain G.
    pub gain: f64,
    /// Bandwidth B, Hz.
    pub bandwidth: f64,
}

impl PhotodetectionChain {
    pub fn validate(&self) -> Result<()> {
        ensure_nonnegative("local_power", self.local_power)?;
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::invalid("efficiency", "must lie in (0, 1]"));
        }
        if !(self.gain >= 1.0 && self.gain.is_finite()) {
            return Err(Error::invalid("gain", "must be at least 1"));
        }
        ensure_positive("bandwidth", self.bandwidth)?;
        if !self.local_phase.is_finite() {
            return Err(Error::invalid("local_phase", "must be finite"));
        }
        Ok(())
    }
}

/// Dispersion magnitude κ and phase ψ derived from `χ′(Ω_l)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    pub kappa: f64,
    /// `None` when `χ′ = 0`, where ψ is undefined.
    pub psi: Option<f64>,
}

pub fn dispersion_coefficients(
    chi_slope: Complex64,
    cell_length: f64,
    mu34: f64,
    probe_wavelength: f64,
) -> Result<Dispersion> {
    ensure_positive("cell_length", cell_length)?;
    ensure_positive("mu34", mu34)?;
    ensure_positive("probe_wavelength", probe_wavelength)?;
    let magnitude = chi_slope.norm();
    if !magnitude.is_finite() {
        return Err(Error::invalid("chi_slope", "must be finite"));
    }
    let kappa = PI * cell_length * mu34 / (HBAR * probe_wavelength) * magnitude;
    let psi = (magnitude > 0.0).then(|| (chi_slope.im / magnitude).clamp(-1.0, 1.0).acos());
    Ok(Dispersion { kappa, psi })
}

/// Local optical phase that makes `φ(Ω_l) = 0` and so `cos²φ = 1`.
pub fn maximizing_local_phase(probe_phase: f64, psi: f64) -> f64 {
    probe_phase - psi
}

/// Gain and phase of element `m` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementResponse {
    pub k_gain: f64,
    pub sqrt_gain: f64,
    /// Composite phase φ(Ω_l).
    pub composite_phase: f64,
    /// Phase shift Φ_m.
    pub phase: Complex64,
}

impl ElementResponse {
    pub fn gain(&self) -> f64 {
        self.sqrt_gain * self.sqrt_gain
    }
}

/// Array geometry as seen by the LO plane wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub spacing: f64,
    /// RF wavelength of the user signals.
    pub rf_wavelength: f64,
}

impl ArrayGeometry {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("rf_wavelength", self.rf_wavelength)?;
        ensure_positive("spacing", self.spacing)?;
        if self.spacing > 0.5 * self.rf_wavelength * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "spacing",
                format!(
                    "{} m exceeds half a wavelength ({} m)",
                    self.spacing,
                    0.5 * self.rf_wavelength
                ),
            ));
        }
        Ok(())
    }

    fn phase_step(&self, incidence_angle: f64) -> f64 {
        2.0 * PI / self.rf_wavelength * self.spacing * incidence_angle.sin()
    }
}

/// Optical quantities of the probe inputs to [`element_response`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReadout {
    /// Output probe power P(Ω_l), W.
    pub power: f64,
    /// Output probe phase φ_p(Ω_l), rad.
    pub phase: f64,
    pub wavelength: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn element_response(
    osc: &LocalOscillator,
    chain: &PhotodetectionChain,
    probe: &ProbeReadout,
    dispersion: &Dispersion,
    effective_aperture: f64,
    element: usize,
    array: &ArrayGeometry,
) -> Result<ElementResponse> {
    osc.validate()?;
    chain.validate()?;
    array.validate()?;
    ensure_nonnegative("probe power", probe.power)?;
    ensure_positive("probe wavelength", probe.wavelength)?;
    if !(effective_aperture.is_finite() && effective_aperture > 0.0) {
        return Err(Error::invalid("effective_aperture", "must be positive"));
    }
    if element == 0 {
        return Err(Error::invalid("element", "indices start at 1"));
    }
    let omega_p = angular(SPEED_OF_LIGHT / probe.wavelength);
    let k_gain = chain.gain.sqrt() * chain.efficiency * ELEMENTARY_CHARGE
        / (HBAR * omega_p * (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY * effective_aperture).sqrt());
    let sqrt_gain = 2.0 * k_gain * (chain.local_power * probe.power).sqrt() * dispersion.kappa;
    // ψ is irrelevant when κ = 0: the element is blind either way
    let composite_phase = chain.local_phase - probe.phase + dispersion.psi.unwrap_or(0.0);
    let theta = osc.reference_phase + array.phase_step(osc.incidence_angle) * (element - 1) as f64;
    let phase = 0.5
        * (Complex64::from_polar(1.0, -(theta - composite_phase))
            + Complex64::from_polar(1.0, -(theta + composite_phase)));
    Ok(ElementResponse {
        k_gain,
        sqrt_gain,
        composite_phase,
        phase,
    })
}

/// Diagonal matrix stored by its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonal(pub DVector<Complex64>);

impl Diagonal {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &DVector<Complex64> {
        &self.0
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_diagonal(&self.0)
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Diagonal(self.0.map(|v| v * s))
    }
}

/// `D = diag{1, e^{−j2πd·sinϑ/λ}, …, e^{−j2πd(M−1)·sinϑ/λ}}`.
pub fn steering_matrix(
    elements: usize,
    array: &ArrayGeometry,
    incidence_angle: f64,
) -> Result<Diagonal> {
    if elements == 0 {
        return Err(Error::invalid("elements", "must be at least 1"));
    }
    array.validate()?;
    let step = array.phase_step(incidence_angle);
    Ok(Diagonal(DVector::from_fn(elements, |m, _| {
        Complex64::from_polar(1.0, -step * m as f64)
    })))
}

/// Projection-noise-limited noise power of the photodetected signal.
pub fn sql_noise_power(
    chain: &PhotodetectionChain,
    probe: &ProbeReadout,
    kappa: f64,
    composite_phase: f64,
    mu34: f64,
    atom_count: f64,
    t2: f64,
) -> Result<f64> {
    chain.validate()?;
    if !(atom_count > 0.0 && atom_count.is_finite()) {
        return Err(Error::Domain("atom count must be positive".into()));
    }
    if !(t2 > 0.0 && t2.is_finite()) {
        return Err(Error::Domain("T2 must be positive".into()));
    }
    ensure_positive("mu34", mu34)?;
    ensure_nonnegative("kappa", kappa)?;
    ensure_nonnegative("probe power", probe.power)?;
    let omega_p = angular(SPEED_OF_LIGHT / probe.wavelength);
    let responsivity = chain.efficiency * ELEMENTARY_CHARGE / (HBAR * omega_p);
    let field_density = sql_field_density(mu34, atom_count, t2);
    let cos2 = composite_phase.cos().powi(2);
    Ok(4.0
        * chain.gain
        * responsivity
        * responsivity
        * chain.local_power
        * probe.power
        * kappa
        * kappa
        * cos2
        * field_density
        * field_density
        * chain.bandwidth)
}

/// `E_SQL/√B = ħ/(μ34·√(N·T2))`, V/m/√Hz.
pub fn sql_field_density(mu34: f64, atom_count: f64, t2: f64) -> f64 {
    HBAR / (mu34 * (atom_count * t2).sqrt())
}

/// Conventional antenna front end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmimoFrontEnd {
    pub antenna_gain: f64,
    pub lna_gain: f64,
    /// Effective aperture A0 of a half-wave dipole, m².
    pub aperture: f64,
    pub noise_power: f64,
    pub room_temperature: f64,
    pub lna_temperature: f64,
}

impl MmimoFrontEnd {
    /// Per-chain gain ρ0.
    pub fn gain(&self) -> f64 {
        self.antenna_gain * self.lna_gain
    }
}

pub fn mmimo_frontend(
    carrier: f64,
    antenna_gain: f64,
    lna_gain: f64,
    room_temperature: f64,
    lna_temperature: f64,
    bandwidth: f64,
) -> Result<MmimoFrontEnd> {
    ensure_positive("carrier", carrier)?;
    ensure_positive("antenna_gain", antenna_gain)?;
    ensure_positive("lna_gain", lna_gain)?;
    ensure_positive("room_temperature", room_temperature)?;
    ensure_positive("lna_temperature", lna_temperature)?;
    ensure_positive("bandwidth", bandwidth)?;
    let lambda = wavelength(carrier);
    Ok(MmimoFrontEnd {
        antenna_gain,
        lna_gain,
        aperture: lambda * lambda / (4.0 * PI),
        noise_power: lna_gain * BOLTZMANN * room_temperature * bandwidth
            + BOLTZMANN * lna_temperature * bandwidth,
        room_temperature,
        lna_temperature,
    })
}

/// Per-element receiver model of a well-configured RAQ-MIMO array.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontEndResponse {
    /// Gain ρ.
    pub gain: f64,
    /// Phase shift Φ = Φ_1 of the reference element.
    pub phase: Complex64,
    pub kappa: f64,
    pub psi: Option<f64>,
    pub composite_phase: f64,
    pub effective_aperture: f64,
    pub noise_power: f64,
    pub k_gain: f64,
}

impl FrontEndResponse {
    /// `cos²φ(Ω_l)`.
    pub fn cos2_phase(&self) -> f64 {
        self.composite_phase.cos().powi(2)
    }

    /// `ρ·cos²φ`, the gain seen after matched combining.
    pub fn effective_gain(&self) -> f64 {
        self.gain * self.cos2_phase()
    }

    /// `Θ = √ρ·Φ·D` for an `elements`-element array.
    pub fn theta(&self, steering: &Diagonal) -> Diagonal {
        steering.scaled(self.gain.sqrt() * self.phase)
    }
}

/// Everything needed to evaluate the RAQ-MIMO front end from first
/// principles.
#[derive(Debug, Clone, Copy)]
pub struct ReceiverSetup {
    pub atoms: NumericSusceptibility,
    pub probe: ProbeField,
    pub oscillator: LocalOscillator,
    pub chain: PhotodetectionChain,
    pub effective_aperture: f64,
    pub array: ArrayGeometry,
    /// Use the local optical phase that maximizes cos²φ instead of
    /// `chain.local_phase`.
    pub maximize_phase: bool,
}

/// Intermediate and final quantities of the front-end evaluation.
#[derive(Debug, Clone, Copy)]
pub struct FrontEndReport {
    pub chi: Complex64,
    pub chi_slope: Complex64,
    pub probe_output: ProbeOutput,
    pub probe_input_power: f64,
    pub atom_count: f64,
    pub chain: PhotodetectionChain,
    pub response: FrontEndResponse,
}

impl ReceiverSetup {
    pub fn atoms_system(&self) -> &FourLevelSystem {
        &self.atoms.system
    }

    pub fn evaluate(&self) -> Result<FrontEndReport> {
        let sys = &self.atoms.system;
        let omega_l = self.oscillator.rabi;
        let chi = self.atoms.chi(omega_l)?;
        let chi_slope = self.atoms.slope(omega_l)?;
        let probe_output = probe_transfer(&self.probe, chi)?;
        let dispersion = dispersion_coefficients(
            chi_slope,
            self.probe.cell_length,
            sys.mu34,
            self.probe.wavelength,
        )?;
        let readout = ProbeReadout {
            power: probe_output.power,
            phase: probe_output.phase,
            wavelength: self.probe.wavelength,
        };
        let mut chain = self.chain;
        if self.maximize_phase {
            chain.local_phase =
                maximizing_local_phase(readout.phase, dispersion.psi.unwrap_or(0.0));
        }
        let element = element_response(
            &self.oscillator,
            &chain,
            &readout,
            &dispersion,
            self.effective_aperture,
            1,
            &self.array,
        )?;
        let atom_count = sys.atom_count(self.probe.interaction_volume());
        let noise_power = sql_noise_power(
            &chain,
            &readout,
            dispersion.kappa,
            element.composite_phase,
            sys.mu34,
            atom_count,
            sys.t2,
        )?;
        Ok(FrontEndReport {
            chi,
            chi_slope,
            probe_output,
            probe_input_power: self.probe.input_power(),
            atom_count,
            chain,
            response: FrontEndResponse {
                gain: element.gain(),
                phase: element.phase,
                kappa: dispersion.kappa,
                psi: dispersion.psi,
                composite_phase: element.composite_phase,
                effective_aperture: self.effective_aperture,
                noise_power,
                k_gain: element.k_gain,
            },
        })
    }
}
