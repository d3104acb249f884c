//! Steady state of the four-level ladder Lindblad equation.
//!
//! The density matrix evolves as `dρ/dt = −i[H, ρ] + Σ_c D[L_c]ρ` with, in
//! the frame rotating with every field (ħ = 1),
//!
//! ```text
//! H = diag(0, Δp, Δp+Δc, Δp+Δc+Δl)
//!   + Ωp/2 (|1⟩⟨2| + h.c.) + Ωc/2 (|2⟩⟨3| + h.c.) + Ω_RF/2 (|3⟩⟨4| + h.c.)
//! ```
//!
//! and cascade decays `|2⟩→|1⟩` at γ2, `|3⟩→|2⟩` at γ3 + ε and `|4⟩→|3⟩` at
//! γ4 + ε. The regularization ε keeps the steady state unique when the
//! Rydberg decay rates vanish.

use std::fmt;

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use super::FourLevelSystem;
use crate::constants::angular;
use crate::error::{ensure_nonnegative, Error, Result};

type Op = SMatrix<Complex64, 4, 4>;
type Super = SMatrix<Complex64, 16, 16>;
type Vec16 = SVector<Complex64, 16>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverMode {
    /// Exact steady state at the configured probe strength.
    #[default]
    Full,
    /// First-order response in Ωp around the ground state; the weak-probe
    /// limit of `Full`.
    LinearResponse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub mode: SolverMode,
    /// Linewidth ε (rad/s) added to both Rydberg levels.
    pub regularization: f64,
    /// Reject `Ωp ≥ limit·γ2` when set.
    pub weak_probe_limit: Option<f64>,
    /// Smallest acceptable reciprocal condition number of the linear system.
    pub min_rcond: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            mode: SolverMode::Full,
            regularization: angular(1e3),
            weak_probe_limit: Some(1.0),
            min_rcond: 1e-14,
        }
    }
}

/// Diagnostics of a steady-state linear solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditioningReport {
    pub mode: SolverMode,
    /// `σ_min/σ_max` of the constrained Liouvillian.
    pub reciprocal_condition: f64,
    /// `‖A·x − b‖∞` of the returned solution (NaN if no solution).
    pub residual: f64,
}

impl fmt::Display for ConditioningReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?} mode, reciprocal condition {:e}, residual {:e}",
            self.mode, self.reciprocal_condition, self.residual
        )
    }
}

#[inline]
fn idx(a: usize, b: usize) -> usize {
    4 * a + b
}

fn ket_bra(a: usize, b: usize) -> Op {
    let mut m = Op::zeros();
    m[(a, b)] = Complex64::new(1.0, 0.0);
    m
}

fn hamiltonian(sys: &FourLevelSystem, probe_rabi: f64, omega_rf: f64) -> Op {
    let mut h = Op::zeros();
    let d2 = sys.probe_detuning;
    let d3 = d2 + sys.coupling_detuning;
    let d4 = d3 + sys.rf_detuning;
    h[(1, 1)] = d2.into();
    h[(2, 2)] = d3.into();
    h[(3, 3)] = d4.into();
    for (a, rabi) in [(0, probe_rabi), (1, sys.coupling_rabi), (2, omega_rf)] {
        h[(a, a + 1)] = (0.5 * rabi).into();
        h[(a + 1, a)] = (0.5 * rabi).into();
    }
    h
}

/// Liouvillian as a 16×16 matrix acting on row-major `vec(ρ)`.
fn liouvillian(sys: &FourLevelSystem, probe_rabi: f64, omega_rf: f64, eps: f64) -> Super {
    let h = hamiltonian(sys, probe_rabi, omega_rf);
    let jumps = [
        ket_bra(0, 1) * Complex64::from(sys.gamma2.sqrt()),
        ket_bra(1, 2) * Complex64::from((sys.gamma3 + eps).sqrt()),
        ket_bra(2, 3) * Complex64::from((sys.gamma4 + eps).sqrt()),
    ];
    let mut out = Super::zeros();
    for a in 0..4 {
        for b in 0..4 {
            let rho = ket_bra(a, b);
            let mut d = (h * rho - rho * h) * (-I);
            for l in &jumps {
                let ld = l.adjoint();
                let ldl = ld * l;
                d += l * rho * ld - (ldl * rho + rho * ldl) * Complex64::from(0.5);
            }
            for p in 0..4 {
                for q in 0..4 {
                    out[(idx(p, q), idx(a, b))] = d[(p, q)];
                }
            }
        }
    }
    out
}

// Both solves divide the Liouvillian by γ2 so that its entries are O(1).

/// Replaces the (redundant) population equation of |1⟩ with a trace row.
fn constrain_trace(mut l: Super) -> Super {
    for c in 0..16 {
        l[(0, c)] = Complex64::new(0.0, 0.0);
    }
    for a in 0..4 {
        l[(0, idx(a, a))] = Complex64::new(1.0, 0.0);
    }
    l
}

fn max_abs<'a>(values: impl Iterator<Item = &'a Complex64>) -> f64 {
    values.fold(0.0, |m, z| m.max(z.norm()))
}

fn solve(a: &Super, b: &Vec16, mode: SolverMode, min_rcond: f64) -> Result<Vec16> {
    let sv = a.singular_values();
    let smax = sv.max();
    let rcond = if smax > 0.0 { sv.min() / smax } else { 0.0 };
    let mut report = ConditioningReport {
        mode,
        reciprocal_condition: rcond,
        residual: f64::NAN,
    };
    if !(rcond >= min_rcond) {
        return Err(Error::SingularSteadyState { report });
    }
    let Some(x) = a.lu().solve(b) else {
        return Err(Error::SingularSteadyState { report });
    };
    report.residual = max_abs((a * x - b).iter());
    if !report.residual.is_finite()
        || report.residual > 1e-10 * (max_abs(a.iter()) * max_abs(x.iter()) + max_abs(b.iter()))
    {
        return Err(Error::SingularSteadyState { report });
    }
    Ok(x)
}

fn check_inputs(sys: &FourLevelSystem, omega_rf: f64, opts: &SolverOptions) -> Result<()> {
    sys.validate()?;
    ensure_nonnegative("omega_rf", omega_rf)?;
    ensure_nonnegative("regularization", opts.regularization)?;
    if let Some(limit) = opts.weak_probe_limit {
        let ratio = sys.probe_rabi / sys.gamma2;
        if ratio >= limit {
            return Err(Error::StrongProbe { ratio, limit });
        }
    }
    Ok(())
}

/// Steady-state density matrix under the full fields (row index = bra-side
/// level, so `ρ[(0, 1)] = ⟨1|ρ|2⟩`).
pub fn steady_state(sys: &FourLevelSystem, omega_rf: f64, opts: &SolverOptions) -> Result<Op> {
    check_inputs(sys, omega_rf, opts)?;
    let scale = Complex64::from(1.0 / sys.gamma2);
    let l =
        constrain_trace(liouvillian(sys, sys.probe_rabi, omega_rf, opts.regularization) * scale);
    let mut b = Vec16::zeros();
    b[0] = Complex64::new(1.0, 0.0);
    let x = solve(&l, &b, SolverMode::Full, opts.min_rcond)?;
    Ok(Op::from_fn(|p, q| x[idx(p, q)]))
}

/// `χ = D·⟨1|ρ|2⟩/Ωp` from the steady state of the ladder.
pub fn susceptibility_numeric(
    sys: &FourLevelSystem,
    omega_rf: f64,
    opts: &SolverOptions,
) -> Result<Complex64> {
    let coherence_per_rabi = match opts.mode {
        SolverMode::Full => steady_state(sys, omega_rf, opts)?[(0, 1)] / sys.probe_rabi,
        SolverMode::LinearResponse => {
            check_inputs(sys, omega_rf, opts)?;
            // H is affine in Ωp, so L(Ωp) = L0 + Ωp·L1 exactly.
            let scale = Complex64::from(1.0 / sys.gamma2);
            let l0 = liouvillian(sys, 0.0, omega_rf, opts.regularization) * scale;
            let l1 = liouvillian(sys, 1.0, omega_rf, opts.regularization) * scale - l0;
            let mut ground = Vec16::zeros();
            ground[idx(0, 0)] = Complex64::new(1.0, 0.0);
            let mut rhs = -(l1 * ground);
            rhs[0] = Complex64::new(0.0, 0.0);
            let x = solve(
                &constrain_trace(l0),
                &rhs,
                SolverMode::LinearResponse,
                opts.min_rcond,
            )?;
            x[idx(0, 1)]
        }
    };
    Ok(sys.prefactor() * coherence_per_rabi)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::cesium;
    use super::*;

    fn two_level(sys: &FourLevelSystem) -> Complex64 {
        let rho12 = I * (0.5 * sys.probe_rabi) / (0.5 * sys.gamma2 - I * sys.probe_detuning);
        sys.prefactor() * rho12 / sys.probe_rabi
    }

    fn weak(mode: SolverMode) -> SolverOptions {
        SolverOptions {
            mode,
            ..SolverOptions::default()
        }
    }

    #[test]
    fn steady_state_is_a_density_matrix() {
        let sys = cesium();
        let opts = SolverOptions {
            weak_probe_limit: None,
            ..SolverOptions::default()
        };
        let rho = steady_state(&sys, angular(1e6), &opts).unwrap();
        let trace: Complex64 = (0..4).map(|i| rho[(i, i)]).sum();
        assert!((trace - 1.0).norm() < 1e-12);
        assert!((rho - rho.adjoint()).camax() < 1e-12);
        for i in 0..4 {
            assert!(rho[(i, i)].re > -1e-12);
        }
    }

    #[test]
    fn two_level_limit_matches_lorentzian() {
        let mut sys = cesium();
        sys.coupling_rabi = 0.0;
        sys.probe_rabi = 0.5 * sys.gamma2;
        for detuning in [0.0, angular(2e6), angular(-7e6)] {
            sys.probe_detuning = detuning;
            let want = two_level(&sys);
            let lr = susceptibility_numeric(&sys, 0.0, &weak(SolverMode::LinearResponse)).unwrap();
            assert!((lr - want).norm() < 1e-9 * want.norm(), "{lr} vs {want}");

            let mut faint = sys;
            faint.probe_rabi = 1e-5 * sys.gamma2;
            let full = susceptibility_numeric(&faint, 0.0, &weak(SolverMode::Full)).unwrap();
            assert!(
                (full - want).norm() < 1e-6 * want.norm(),
                "{full} vs {want}"
            );
        }
    }

    #[test]
    fn eit_reduces_absorption() {
        let mut sys = cesium();
        sys.probe_rabi = 1e-3 * sys.gamma2;
        let lo = angular(1e6);
        sys.coupling_rabi = 3.0 * sys.gamma2;
        let eit = susceptibility_numeric(&sys, lo, &weak(SolverMode::Full)).unwrap();
        sys.coupling_rabi = 0.0;
        let bare = susceptibility_numeric(&sys, lo, &weak(SolverMode::Full)).unwrap();
        assert!(eit.im < bare.im, "{eit} vs {bare}");
        assert!(eit.im >= 0.0);
    }

    #[test]
    fn strong_probe_is_rejected_by_default() {
        let sys = cesium();
        let err = susceptibility_numeric(&sys, 0.0, &SolverOptions::default()).unwrap_err();
        assert!(matches!(err, Error::StrongProbe { .. }));
    }

    #[test]
    fn decoupled_rydberg_levels_report_conditioning() {
        let mut sys = cesium();
        sys.probe_rabi = 1e-3 * sys.gamma2;
        sys.coupling_rabi = 0.0;
        for mode in [SolverMode::Full, SolverMode::LinearResponse] {
            let opts = SolverOptions {
                mode,
                regularization: 0.0,
                ..SolverOptions::default()
            };
            match susceptibility_numeric(&sys, 0.0, &opts) {
                Err(Error::SingularSteadyState { report }) => {
                    assert!(report.reciprocal_condition < opts.min_rcond);
                }
                other => panic!("expected singular solve, got {other:?}"),
            }
            let regularized = SolverOptions {
                mode,
                ..SolverOptions::default()
            };
            assert!(susceptibility_numeric(&sys, 0.0, &regularized).is_ok());
        }
    }

    #[test]
    fn coupled_ladder_needs_no_regularization() {
        let mut sys = cesium();
        sys.probe_rabi = 1e-3 * sys.gamma2;
        let opts = SolverOptions {
            mode: SolverMode::LinearResponse,
            regularization: 0.0,
            ..SolverOptions::default()
        };
        let chi = susceptibility_numeric(&sys, angular(1e6), &opts).unwrap();
        assert!(chi.is_finite() && chi.im > 0.0);
    }

    #[test]
    fn weak_probe_response_is_linear() {
        let mut sys = cesium();
        let opts = weak(SolverMode::Full);
        let lo = angular(1e6);
        sys.probe_rabi = 1e-4 * sys.gamma2;
        let a = susceptibility_numeric(&sys, lo, &opts).unwrap();
        sys.probe_rabi *= 2.0;
        let b = susceptibility_numeric(&sys, lo, &opts).unwrap();
        assert!((a - b).norm() < 1e-3 * a.norm(), "{a} vs {b}");
    }
}
