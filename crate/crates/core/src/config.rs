//! Experiment configuration: a JSON document with one object per
//! subsystem. Every field has a default except the four physical constants
//! the model cannot guess (μ12, μ34, T2 and the effective aperture).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::atomic::{
    FourLevelSystem, NumericSusceptibility, ProbeField, SolverMode, SolverOptions,
};
use crate::channel::{large_scale_profile, LargeScaleProfile, UserGeometry};
use crate::constants::{angular, db_to_linear, dbm_to_watts, wavelength, ATOMIC_DIPOLE_UNIT};
use crate::frontend::{
    mmimo_frontend, steering_matrix, ArrayGeometry, FrontEndReport, LocalOscillator, MmimoFrontEnd,
    PhotodetectionChain, ReceiverSetup,
};
use crate::link::ReceiverFront;
use crate::rates::Scheme;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Free-form remarks; ignored by the simulator.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub atoms: AtomsConfig,
    pub probe: ProbeConfig,
    pub coupling: CouplingConfig,
    pub cell: CellConfig,
    pub local_oscillator: LocalOscillatorConfig,
    pub detection: DetectionConfig,
    pub mmimo: MmimoConfig,
    pub array: ArrayConfig,
    pub users: UsersConfig,
    pub simulation: SimulationConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverModeConfig {
    #[default]
    Full,
    LinearResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub mode: SolverModeConfig,
    /// Rydberg-level linewidth regularizer, Hz.
    pub regularization_hz: f64,
    /// Reject Ωp ≥ limit·γ2 when set.
    pub weak_probe_limit: Option<f64>,
    pub min_rcond: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            mode: SolverModeConfig::Full,
            regularization_hz: 1e3,
            weak_probe_limit: None,
            min_rcond: d.min_rcond,
        }
    }
}

/// Frequencies are given in Hz and converted to rad/s internally; dipole
/// moments in units of e·a0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AtomsConfig {
    pub atomic_density_cm3: f64,
    pub population_fraction: f64,
    pub mu12_ea0: Option<f64>,
    pub mu34_ea0: Option<f64>,
    pub t2_s: Option<f64>,
    pub gamma2_hz: f64,
    pub gamma3_hz: f64,
    pub gamma4_hz: f64,
    pub probe_detuning_hz: f64,
    pub coupling_detuning_hz: f64,
    pub rf_detuning_hz: f64,
    pub solver: SolverConfig,
}

impl Default for AtomsConfig {
    fn default() -> Self {
        Self {
            atomic_density_cm3: 3e10,
            population_fraction: 1e-3,
            mu12_ea0: None,
            mu34_ea0: None,
            t2_s: None,
            gamma2_hz: 5.234e6,
            gamma3_hz: 0.0,
            gamma4_hz: 0.0,
            probe_detuning_hz: 0.0,
            coupling_detuning_hz: 0.0,
            rf_detuning_hz: 0.0,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub wavelength_nm: f64,
    pub beam_diameter_mm: f64,
    pub power_uw: f64,
    pub rabi_hz: f64,
    pub input_phase_rad: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            wavelength_nm: 852.0,
            beam_diameter_mm: 1.7,
            power_uw: 29.8,
            rabi_hz: 5.7e6,
            input_phase_rad: 0.0,
        }
    }
}

/// Only `rabi_hz` enters the model; the beam parameters are recorded for
/// completeness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub wavelength_nm: f64,
    pub beam_diameter_mm: f64,
    pub power_uw: f64,
    pub rabi_hz: f64,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            wavelength_nm: 510.0,
            beam_diameter_mm: 1.7,
            power_uw: 17.0,
            rabi_hz: 0.97e6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellConfig {
    pub length_cm: f64,
}

impl Default for CellConfig {
    fn default() -> Self {
        Self { length_cm: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalOscillatorConfig {
    pub frequency_hz: f64,
    pub power_dbm: f64,
    pub rabi_hz: f64,
    /// User carrier offset f_c − f_l, Hz.
    pub offset_hz: f64,
    pub incidence_angle_rad: f64,
    pub reference_phase_rad: f64,
    pub max_signal_ratio: f64,
}

impl Default for LocalOscillatorConfig {
    fn default() -> Self {
        Self {
            frequency_hz: 6.9458e9,
            power_dbm: 15.0,
            rabi_hz: 1e6,
            offset_hz: 150e3,
            incidence_angle_rad: 0.0,
            reference_phase_rad: 0.0,
            max_signal_ratio: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    pub local_power_mw: f64,
    pub local_phase_rad: f64,
    /// Choose the local optical phase that sets cos²φ = 1.
    pub maximize_phase: bool,
    pub efficiency: f64,
    pub lna_gain_db: f64,
    pub bandwidth_hz: f64,
    pub effective_aperture_m2: Option<f64>,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            local_power_mw: 1.0,
            local_phase_rad: 0.0,
            maximize_phase: true,
            efficiency: 0.8,
            lna_gain_db: 30.0,
            bandwidth_hz: 1e5,
            effective_aperture_m2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MmimoConfig {
    pub antenna_gain_db: f64,
    pub lna_gain_db: f64,
    pub lna_temperature_k: f64,
    pub room_temperature_k: f64,
}

impl Default for MmimoConfig {
    fn default() -> Self {
        Self {
            antenna_gain_db: 2.1,
            lna_gain_db: 30.0,
            lna_temperature_k: 100.0,
            room_temperature_k: 290.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArrayConfig {
    pub elements: usize,
    /// Element spacing, m; half the LO wavelength when absent.
    pub spacing_m: Option<f64>,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self {
            elements: 300,
            spacing_m: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct UsersConfig {
    pub count: usize,
    pub radius_m: f64,
    pub center_m: f64,
    /// Shadow-fading standard deviation, dB.
    pub shadowing_db: f64,
    pub transmit_power_dbm: f64,
}

impl Default for UsersConfig {
    fn default() -> Self {
        Self {
            count: 20,
            radius_m: 300.0,
            center_m: 400.0,
            shadowing_db: 0.0,
            transmit_power_dbm: 30.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub trials: usize,
    pub seed: u64,
    pub schemes: Vec<Scheme>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            trials: 500,
            seed: 1,
            schemes: Scheme::ALL.to_vec(),
        }
    }
}

/// Front ends of both systems for one array size.
#[derive(Debug, Clone)]
pub struct Fronts {
    pub raq: ReceiverFront,
    pub mmimo: ReceiverFront,
    pub report: FrontEndReport,
    pub mmimo_front: MmimoFrontEnd,
}

pub fn load_config(path: impl AsRef<Path>) -> Result<Config, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Config::from_json_str(&text)
}

impl Config {
    /// Parses and validates. Blank input is read as `{}`.
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let text = if text.trim().is_empty() { "{}" } else { text };
        let cfg: Config = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The shipped default template.
    pub fn template() -> Self {
        let mut cfg = Config::default();
        cfg.atoms.mu12_ea0 = Some(DEFAULT_MU12_EA0);
        cfg.atoms.mu34_ea0 = Some(DEFAULT_MU34_EA0);
        cfg.atoms.t2_s = Some(DEFAULT_T2_S);
        cfg.detection.effective_aperture_m2 = Some(DEFAULT_EFFECTIVE_APERTURE_M2);
        cfg.notes = TEMPLATE_NOTES.iter().map(|s| s.to_string()).collect();
        cfg
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        let missing = [
            ("atoms.mu12_ea0", self.atoms.mu12_ea0.is_none()),
            ("atoms.mu34_ea0", self.atoms.mu34_ea0.is_none()),
            ("atoms.t2_s", self.atoms.t2_s.is_none()),
            (
                "detection.effective_aperture_m2",
                self.detection.effective_aperture_m2.is_none(),
            ),
        ];
        for (key, absent) in missing {
            if absent {
                problems.push(format!("missing required key `{key}`"));
            }
        }
        let mut positive = |key: &str, v: f64| {
            if !(v.is_finite() && v > 0.0) {
                problems.push(format!("`{key}` must be positive, got {v}"));
            }
        };
        positive("atoms.atomic_density_cm3", self.atoms.atomic_density_cm3);
        positive("atoms.gamma2_hz", self.atoms.gamma2_hz);
        positive("atoms.solver.min_rcond", self.atoms.solver.min_rcond);
        positive("probe.wavelength_nm", self.probe.wavelength_nm);
        positive("probe.beam_diameter_mm", self.probe.beam_diameter_mm);
        positive("probe.power_uw", self.probe.power_uw);
        positive("probe.rabi_hz", self.probe.rabi_hz);
        positive("cell.length_cm", self.cell.length_cm);
        positive(
            "local_oscillator.frequency_hz",
            self.local_oscillator.frequency_hz,
        );
        positive("local_oscillator.rabi_hz", self.local_oscillator.rabi_hz);
        positive(
            "local_oscillator.max_signal_ratio",
            self.local_oscillator.max_signal_ratio,
        );
        positive("detection.local_power_mw", self.detection.local_power_mw);
        positive("detection.efficiency", self.detection.efficiency);
        positive("detection.bandwidth_hz", self.detection.bandwidth_hz);
        positive("mmimo.lna_temperature_k", self.mmimo.lna_temperature_k);
        positive("mmimo.room_temperature_k", self.mmimo.room_temperature_k);
        positive("users.radius_m", self.users.radius_m);
        positive("users.center_m", self.users.center_m);
        for (key, v) in [
            ("atoms.mu12_ea0", self.atoms.mu12_ea0),
            ("atoms.mu34_ea0", self.atoms.mu34_ea0),
            ("atoms.t2_s", self.atoms.t2_s),
            (
                "detection.effective_aperture_m2",
                self.detection.effective_aperture_m2,
            ),
            ("array.spacing_m", self.array.spacing_m),
        ] {
            if let Some(v) = v {
                positive(key, v);
            }
        }
        let mut nonneg = |key: &str, v: f64| {
            if !(v.is_finite() && v >= 0.0) {
                problems.push(format!("`{key}` must be nonnegative, got {v}"));
            }
        };
        nonneg("atoms.gamma3_hz", self.atoms.gamma3_hz);
        nonneg("atoms.gamma4_hz", self.atoms.gamma4_hz);
        nonneg(
            "atoms.solver.regularization_hz",
            self.atoms.solver.regularization_hz,
        );
        nonneg("coupling.rabi_hz", self.coupling.rabi_hz);
        nonneg("users.shadowing_db", self.users.shadowing_db);
        nonneg(
            "local_oscillator.offset_hz",
            self.local_oscillator.offset_hz,
        );
        for (key, v) in [
            ("atoms.probe_detuning_hz", self.atoms.probe_detuning_hz),
            (
                "atoms.coupling_detuning_hz",
                self.atoms.coupling_detuning_hz,
            ),
            ("atoms.rf_detuning_hz", self.atoms.rf_detuning_hz),
            ("probe.input_phase_rad", self.probe.input_phase_rad),
            (
                "local_oscillator.power_dbm",
                self.local_oscillator.power_dbm,
            ),
            (
                "local_oscillator.incidence_angle_rad",
                self.local_oscillator.incidence_angle_rad,
            ),
            (
                "local_oscillator.reference_phase_rad",
                self.local_oscillator.reference_phase_rad,
            ),
            ("detection.local_phase_rad", self.detection.local_phase_rad),
            ("detection.lna_gain_db", self.detection.lna_gain_db),
            ("mmimo.antenna_gain_db", self.mmimo.antenna_gain_db),
            ("mmimo.lna_gain_db", self.mmimo.lna_gain_db),
            ("users.transmit_power_dbm", self.users.transmit_power_dbm),
        ] {
            if !v.is_finite() {
                problems.push(format!("`{key}` must be finite"));
            }
        }
        if !(self.atoms.population_fraction > 0.0 && self.atoms.population_fraction <= 1.0) {
            problems.push(format!(
                "`atoms.population_fraction` must lie in (0, 1], got {}",
                self.atoms.population_fraction
            ));
        }
        if let Some(limit) = self.atoms.solver.weak_probe_limit {
            if !(limit.is_finite() && limit > 0.0) {
                problems.push(format!(
                    "`atoms.solver.weak_probe_limit` must be positive, got {limit}"
                ));
            } else if self.probe.rabi_hz >= limit * self.atoms.gamma2_hz {
                problems.push(format!(
                    "probe Rabi frequency {} Hz is not below {limit}·γ2 = {} Hz",
                    self.probe.rabi_hz,
                    limit * self.atoms.gamma2_hz
                ));
            }
        }
        if self.detection.efficiency > 1.0 {
            problems.push(format!(
                "`detection.efficiency` must not exceed 1, got {}",
                self.detection.efficiency
            ));
        }
        if self.array.elements < 2 {
            problems.push(format!(
                "`array.elements` must be at least 2, got {}",
                self.array.elements
            ));
        }
        if self.users.count == 0 {
            problems.push("`users.count` must be at least 1".into());
        }
        if self.users.center_m <= self.users.radius_m {
            problems.push(format!(
                "`users.center_m` ({}) must exceed `users.radius_m` ({}) so no user sits on the array",
                self.users.center_m, self.users.radius_m
            ));
        }
        if let Some(d) = self.array.spacing_m {
            let half = wavelength(self.local_oscillator.frequency_hz) / 2.0;
            if d > half * (1.0 + 1e-12) {
                problems.push(format!(
                    "`array.spacing_m` = {d} exceeds half the LO wavelength ({half:.6} m)"
                ));
            }
        }
        if self.simulation.trials == 0 {
            problems.push("`simulation.trials` must be at least 1".into());
        }
        if self.simulation.schemes.is_empty() {
            problems.push("`simulation.schemes` must name at least one scheme".into());
        }
        if self.simulation.schemes.contains(&Scheme::Zf) && self.array.elements <= self.users.count
        {
            problems.push(format!(
                "ZF requires M > K, got M = {} and K = {}",
                self.array.elements, self.users.count
            ));
        }
        if problems.is_empty() {
            if let Err(e) = self.four_level_system().validate() {
                problems.push(e.to_string());
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Validation(problems))
        }
    }

    pub fn four_level_system(&self) -> FourLevelSystem {
        let a = &self.atoms;
        FourLevelSystem {
            probe_rabi: angular(self.probe.rabi_hz),
            coupling_rabi: angular(self.coupling.rabi_hz),
            probe_detuning: angular(a.probe_detuning_hz),
            coupling_detuning: angular(a.coupling_detuning_hz),
            rf_detuning: angular(a.rf_detuning_hz),
            gamma2: angular(a.gamma2_hz),
            gamma3: angular(a.gamma3_hz),
            gamma4: angular(a.gamma4_hz),
            atomic_density: a.atomic_density_cm3 * 1e6,
            population_fraction: a.population_fraction,
            mu12: a.mu12_ea0.unwrap_or(f64::NAN) * ATOMIC_DIPOLE_UNIT,
            mu34: a.mu34_ea0.unwrap_or(f64::NAN) * ATOMIC_DIPOLE_UNIT,
            t2: a.t2_s.unwrap_or(f64::NAN),
        }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.atoms.solver;
        SolverOptions {
            mode: match s.mode {
                SolverModeConfig::Full => SolverMode::Full,
                SolverModeConfig::LinearResponse => SolverMode::LinearResponse,
            },
            regularization: angular(s.regularization_hz),
            weak_probe_limit: s.weak_probe_limit,
            min_rcond: s.min_rcond,
        }
    }

    pub fn array_geometry(&self) -> ArrayGeometry {
        let rf_wavelength = wavelength(self.local_oscillator.frequency_hz);
        ArrayGeometry {
            spacing: self.array.spacing_m.unwrap_or(rf_wavelength / 2.0),
            rf_wavelength,
        }
    }

    /// User carrier frequency f_c = f_l + f_δ.
    pub fn carrier_hz(&self) -> f64 {
        self.local_oscillator.frequency_hz + self.local_oscillator.offset_hz
    }

    pub fn transmit_power_w(&self) -> f64 {
        dbm_to_watts(self.users.transmit_power_dbm)
    }

    pub fn receiver_setup(&self) -> crate::Result<ReceiverSetup> {
        let probe = ProbeField::from_power(
            self.probe.power_uw * 1e-6,
            self.probe.input_phase_rad,
            self.probe.wavelength_nm * 1e-9,
            self.probe.beam_diameter_mm * 1e-3,
            self.cell.length_cm * 1e-2,
        )?;
        let lo = &self.local_oscillator;
        let d = &self.detection;
        Ok(ReceiverSetup {
            atoms: NumericSusceptibility {
                system: self.four_level_system(),
                options: self.solver_options(),
            },
            probe,
            oscillator: LocalOscillator {
                frequency: lo.frequency_hz,
                power: dbm_to_watts(lo.power_dbm),
                rabi: angular(lo.rabi_hz),
                incidence_angle: lo.incidence_angle_rad,
                reference_phase: lo.reference_phase_rad,
                max_signal_ratio: lo.max_signal_ratio,
            },
            chain: PhotodetectionChain {
                local_power: d.local_power_mw * 1e-3,
                local_phase: d.local_phase_rad,
                efficiency: d.efficiency,
                gain: db_to_linear(d.lna_gain_db),
                bandwidth: d.bandwidth_hz,
            },
            effective_aperture: d.effective_aperture_m2.unwrap_or(f64::NAN),
            array: self.array_geometry(),
            maximize_phase: d.maximize_phase,
        })
    }

    pub fn mmimo_frontend(&self) -> crate::Result<MmimoFrontEnd> {
        mmimo_frontend(
            self.carrier_hz(),
            db_to_linear(self.mmimo.antenna_gain_db),
            db_to_linear(self.mmimo.lna_gain_db),
            self.mmimo.room_temperature_k,
            self.mmimo.lna_temperature_k,
            self.detection.bandwidth_hz,
        )
    }

    /// Evaluates the RAQ-MIMO front end once; the result does not depend
    /// on the array size.
    pub fn evaluate_frontend(&self) -> crate::Result<FrontEndReport> {
        self.receiver_setup()?.evaluate()
    }

    pub fn fronts_for(
        &self,
        report: &FrontEndReport,
        mmimo: &MmimoFrontEnd,
        elements: usize,
    ) -> crate::Result<(ReceiverFront, ReceiverFront)> {
        let steering = steering_matrix(
            elements,
            &self.array_geometry(),
            self.local_oscillator.incidence_angle_rad,
        )?;
        Ok((
            ReceiverFront::raq(&report.response, &steering),
            ReceiverFront::mmimo(mmimo, elements),
        ))
    }

    pub fn fronts(&self, elements: usize) -> crate::Result<Fronts> {
        let report = self.evaluate_frontend()?;
        let mmimo_front = self.mmimo_frontend()?;
        let (raq, mmimo) = self.fronts_for(&report, &mmimo_front, elements)?;
        Ok(Fronts {
            raq,
            mmimo,
            report,
            mmimo_front,
        })
    }

    /// User drop with `users` users (at least `users.count`), and its
    /// large-scale gains.
    pub fn large_scale(
        &self,
        users: usize,
        seed: u64,
    ) -> crate::Result<(UserGeometry, LargeScaleProfile)> {
        large_scale_profile(
            users,
            self.users.center_m,
            self.users.radius_m,
            self.users.shadowing_db,
            seed,
        )
    }
}

/// Cs 6S1/2 → 6P3/2 reduced dipole (D2 line), e·a0.
pub const DEFAULT_MU12_EA0: f64 = 4.478_57;
/// 47D5/2 → 48P3/2 radial dipole, e·a0.
pub const DEFAULT_MU34_EA0: f64 = 1443.45;
pub const DEFAULT_T2_S: f64 = 1e-6;
/// Probe beam diameter times cell length, m².
pub const DEFAULT_EFFECTIVE_APERTURE_M2: f64 = 1.7e-4;

const TEMPLATE_NOTES: &[&str] = &[
    "Units are given by the key suffixes; frequencies are ordinary (Hz), not angular.",
    "mu12_ea0 is the Cs D2 reduced dipole; mu34_ea0 the 47D5/2-48P3/2 radial dipole. Neither is published with the cell parameters, so both are estimates.",
    "t2_s and effective_aperture_m2 are estimates as well. The RAQ-MIMO SNR scales as mu34^2 * N * T2 / B, so the RAQ/M-MIMO gap moves by log2 of any change in mu34^2 * T2; expect roughly +/-2 bit/s/Hz of spread from plausible choices.",
    "shadowing_db = 0 freezes beta for every trial; raise it to add lognormal shadowing to the user drop.",
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_lists_required_keys() {
        for text in ["", "  \n", "{}"] {
            match Config::from_json_str(text) {
                Err(ConfigError::Validation(p)) => {
                    assert_eq!(p.len(), 4, "{p:?}");
                    for key in ["mu12_ea0", "mu34_ea0", "t2_s", "effective_aperture_m2"] {
                        assert!(p.iter().any(|m| m.contains(key)), "{key} not in {p:?}");
                    }
                }
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn template_round_trips_and_validates() {
        let t = Config::template();
        t.validate().unwrap();
        let back = Config::from_json_str(&t.to_json_pretty()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = serde_json::to_value(Config::template()).unwrap();
        v["array"]["elemnts"] = 3.into();
        assert!(matches!(
            Config::from_json_str(&v.to_string()),
            Err(ConfigError::Parse(_))
        ));
    }

    #[test]
    fn square_zf_rejected() {
        let mut t = Config::template();
        t.array.elements = 20;
        t.users.count = 20;
        t.simulation.schemes = vec![Scheme::Zf];
        match t.validate() {
            Err(ConfigError::Validation(p)) => assert!(p.iter().any(|m| m.contains("M > K"))),
            other => panic!("{other:?}"),
        }
        t.simulation.schemes = vec![Scheme::Mrc];
        t.validate().unwrap();
    }

    #[test]
    fn unit_conversions() {
        let t = Config::template();
        let sys = t.four_level_system();
        assert!((sys.atomic_density - 3e16).abs() < 1.0);
        assert!((sys.mu12 - 3.7971e-29).abs() < 1e-33);
        assert!((t.transmit_power_w() - 1.0).abs() < 1e-12);
        assert!((t.mmimo_frontend().unwrap().aperture - 1.482_47e-4).abs() < 1e-8);
    }
}
