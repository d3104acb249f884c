#![allow(dead_code)]

use num_complex::Complex64;
use raqsim::atomic::FourLevelSystem;
use raqsim::constants::{angular, ATOMIC_DIPOLE_UNIT};

pub fn cesium() -> FourLevelSystem {
    FourLevelSystem {
        probe_rabi: angular(5.7e6),
        coupling_rabi: angular(0.97e6),
        probe_detuning: 0.0,
        coupling_detuning: 0.0,
        rf_detuning: 0.0,
        gamma2: angular(5.234e6),
        gamma3: angular(10e3),
        gamma4: angular(5e3),
        atomic_density: 3e16,
        population_fraction: 1e-3,
        mu12: 3.7971e-29,
        mu34: 1443.45 * ATOMIC_DIPOLE_UNIT,
        t2: 1e-6,
    }
}

/// First-order probe coherence of the ladder, written as a continued
/// fraction over the three coherences ⟨1|ρ|j⟩.
pub fn weak_probe_chi(sys: &FourLevelSystem, omega_rf: f64, eps: f64) -> Complex64 {
    let j = Complex64::i();
    let d2 = sys.probe_detuning + sys.coupling_detuning;
    let d3 = d2 + sys.rf_detuning;
    let inner = Complex64::new((sys.gamma4 + eps) / 2.0, 0.0) - j * d3;
    let middle =
        Complex64::new((sys.gamma3 + eps) / 2.0, 0.0) - j * d2 + (omega_rf / 2.0).powi(2) / inner;
    let outer = Complex64::new(sys.gamma2 / 2.0, 0.0) - j * sys.probe_detuning
        + (sys.coupling_rabi / 2.0).powi(2) / middle;
    sys.prefactor() * (j * 0.5) / outer
}

pub fn richardson(f: impl Fn(f64) -> Complex64, x: f64, h: f64) -> Complex64 {
    let c = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (c(h / 2.0) * 4.0 - c(h)) / 3.0
}
