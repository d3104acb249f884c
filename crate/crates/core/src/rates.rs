//! Closed-form lower bounds on the ergodic rate, their asymptotes, and the
//! gap formulas between ZF and MRC and between RAQ-MIMO and conventional
//! massive MIMO.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Mrc,
    Zf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Raq,
    Mmimo,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Mrc, Scheme::Zf];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Mrc => "MRC",
            Scheme::Zf => "ZF",
        }
    }
}

impl System {
    pub const ALL: [System; 2] = [System::Raq, System::Mmimo];

    pub fn label(self) -> &'static str {
        match self {
            System::Raq => "RAQ",
            System::Mmimo => "MMIMO",
        }
    }
}

/// Inputs to the closed-form expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundInputs {
    pub system: System,
    pub scheme: Scheme,
    pub elements: usize,
    pub beta: Vec<f64>,
    /// Per-user transmit power P_s, W.
    pub transmit_power: f64,
    /// A_e for RAQ-MIMO, A0 for massive MIMO.
    pub aperture: f64,
    /// ρ for RAQ-MIMO, ρ0 for massive MIMO.
    pub gain: f64,
    /// cos²φ(Ω_l); 1 for massive MIMO.
    pub cos2_phase: f64,
    pub noise_power: f64,
}

impl BoundInputs {
    pub fn users(&self) -> usize {
        self.beta.len()
    }

    /// `ρ·cos²φ·A/σ²`: received SINR per unit `P_s·β`.
    pub fn snr_coefficient(&self) -> f64 {
        self.gain * self.cos2_phase * self.aperture / self.noise_power
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        Self {
            scheme,
            ..self.clone()
        }
    }

    pub fn with_power(&self, transmit_power: f64) -> Self {
        Self {
            transmit_power,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta.is_empty() {
            return Err(Error::invalid("beta", "needs at least one user"));
        }
        if self.beta.iter().any(|b| !(*b > 0.0 && b.is_finite())) {
            return Err(Error::invalid("beta", "gains must be positive"));
        }
        for (name, v) in [
            ("aperture", self.aperture),
            ("gain", self.gain),
            ("noise_power", self.noise_power),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be positive, got {v}")));
            }
        }
        if !(self.transmit_power >= 0.0 && self.transmit_power.is_finite()) {
            return Err(Error::invalid("transmit_power", "must be nonnegative"));
        }
        if !(0.0..=1.0 + 1e-12).contains(&self.cos2_phase) {
            return Err(Error::invalid("cos2_phase", "must lie in [0, 1]"));
        }
        Ok(())
    }

    fn check_user(&self, user: usize) -> Result<()> {
        if user >= self.users() {
            Err(Error::invalid(
                "user",
                format!("index {user} out of range for {} users", self.users()),
            ))
        } else {
            Ok(())
        }
    }

    fn check_dimensions(&self) -> Result<()> {
        let (m, k) = (self.elements, self.users());
        match self.scheme {
            Scheme::Mrc if m < 2 => {
                Err(Error::Domain(format!("MRC bound needs M ≥ 2, got M = {m}")))
            }
            Scheme::Zf if m < k => Err(Error::Domain(format!(
                "ZF bound needs M ≥ K, got M = {m}, K = {k}"
            ))),
            _ => Ok(()),
        }
    }

    fn interference(&self, user: usize) -> f64 {
        self.beta
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != user)
            .map(|(_, b)| b)
            .sum()
    }
}

/// Closed-form lower bound on the ergodic rate of `user`, bit/s/Hz.
///
/// The RAQ-MIMO MRC form normalizes by σ² and so carries a `1 +` in its
/// denominator; the conventional MRC form keeps σ²_m-mimo in the
/// denominator. Both are evaluated as printed; they agree algebraically.
pub fn lower_bound(inputs: &BoundInputs, user: usize) -> Result<f64> {
    inputs.validate()?;
    inputs.check_user(user)?;
    inputs.check_dimensions()?;
    let m = inputs.elements as f64;
    let k = inputs.users() as f64;
    let b = inputs.beta[user];
    let interference = inputs.interference(user);
    let ps = inputs.transmit_power;
    let sinr = match (inputs.system, inputs.scheme) {
        (System::Raq, Scheme::Mrc) => {
            let c = inputs.gain * inputs.cos2_phase * ps * inputs.aperture / inputs.noise_power;
            c * (m - 1.0) * b / (1.0 + c * interference)
        }
        (System::Raq, Scheme::Zf) => {
            inputs.gain * inputs.cos2_phase * ps * inputs.aperture * (m - k) * b
                / inputs.noise_power
        }
        (System::Mmimo, Scheme::Mrc) => {
            let s = inputs.gain * ps * inputs.aperture;
            s * (m - 1.0) * b / (s * interference + inputs.noise_power)
        }
        (System::Mmimo, Scheme::Zf) => {
            inputs.gain * ps * inputs.aperture * (m - k) * b / inputs.noise_power
        }
    };
    Ok((1.0 + sinr).log2())
}

pub fn lower_bounds(inputs: &BoundInputs) -> Result<Vec<f64>> {
    (0..inputs.users())
        .map(|k| lower_bound(inputs, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Asymptote {
    /// Interference dominates noise: MRC saturates at
    /// `log2(1 + (M−1)β_k/Σ_{i≠k}β_i)`.
    InterferenceLimited,
    /// `P_s = E/M` with a fixed energy budget `E` as M grows.
    PowerScaling { energy: f64 },
}

pub fn asymptotic_limit(inputs: &BoundInputs, user: usize, case: Asymptote) -> Result<f64> {
    inputs.validate()?;
    inputs.check_user(user)?;
    let b = inputs.beta[user];
    match case {
        Asymptote::InterferenceLimited => {
            if inputs.users() < 2 {
                return Err(Error::Domain(
                    "interference-limited rate needs K ≥ 2".into(),
                ));
            }
            if inputs.elements < 1 {
                return Err(Error::Domain("needs M ≥ 1".into()));
            }
            Ok((1.0 + (inputs.elements as f64 - 1.0) * b / inputs.interference(user)).log2())
        }
        Asymptote::PowerScaling { energy } => {
            if !(energy >= 0.0 && energy.is_finite()) {
                return Err(Error::invalid("energy", "must be nonnegative"));
            }
            let snr = match inputs.system {
                System::Raq => {
                    energy * b * inputs.aperture * inputs.gain * inputs.cos2_phase
                        / inputs.noise_power
                }
                System::Mmimo => energy * b * inputs.aperture * inputs.gain / inputs.noise_power,
            };
            Ok((1.0 + snr).log2())
        }
    }
}

/// ZF-over-MRC comparison for one user with cos²φ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZfMrcGap {
    /// SINR ratio Ratio₁.
    pub ratio: f64,
    /// ΔR_k = log2(Ratio₁).
    pub delta_rate: f64,
    /// ΔR_k without the finite-array penalty (M → ∞).
    pub delta_rate_large_array: f64,
    /// ΔR = log2(1 − (K−1)/(M−1)).
    pub array_penalty: f64,
    /// P_r^(tot) = P_s·A·Σβ_i.
    pub received_total: f64,
    /// P_r^(k) = P_s·A·β_k.
    pub received_user: f64,
}

pub fn gap_zf_vs_mrc(inputs: &BoundInputs, user: usize) -> Result<ZfMrcGap> {
    inputs.validate()?;
    inputs.check_user(user)?;
    let (m, k) = (inputs.elements, inputs.users());
    if k < 2 {
        return Err(Error::Domain("ZF/MRC gap needs K ≥ 2".into()));
    }
    if m <= k {
        return Err(Error::Domain(format!(
            "ZF/MRC gap needs M > K (ΔR = −∞ at M = K), got M = {m}, K = {k}"
        )));
    }
    let (mf, kf) = (m as f64, k as f64);
    let total: f64 = inputs.beta.iter().sum();
    let received_total = inputs.transmit_power * inputs.aperture * total;
    let received_user = inputs.transmit_power * inputs.aperture * inputs.beta[user];
    // cos²φ set to 1, the configuration that maximizes Ratio₁
    let cos2_phase = 1.0;
    let rho = inputs.gain * cos2_phase;
    let other = (received_total - received_user) / inputs.noise_power;
    let ratio = rho * ((mf - kf) / (mf - 1.0)) * other;
    let array_penalty = (1.0 - (kf - 1.0) / (mf - 1.0)).log2();
    let delta_rate_large_array = rho.log2() + other.log2();
    Ok(ZfMrcGap {
        ratio,
        delta_rate: delta_rate_large_array + array_penalty,
        delta_rate_large_array,
        array_penalty,
        received_total,
        received_user,
    })
}

/// RAQ-MIMO-over-massive-MIMO comparison under ZF with cos²φ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RaqMmimoGap {
    /// Ratio₂ = (ρ/ρ0)(A_e/A0)(σ²_m-mimo/σ²).
    pub ratio: f64,
    /// ΔR̃_k = log2(Ratio₂).
    pub delta_rate: f64,
}

pub fn gap_raq_vs_mmimo(
    raq: &BoundInputs,
    mmimo: &BoundInputs,
    user: usize,
) -> Result<RaqMmimoGap> {
    raq.validate()?;
    mmimo.validate()?;
    raq.check_user(user)?;
    if raq.system != System::Raq || mmimo.system != System::Mmimo {
        return Err(Error::invalid(
            "system",
            "expects RAQ inputs first and massive-MIMO inputs second",
        ));
    }
    if raq.elements != mmimo.elements
        || raq.beta != mmimo.beta
        || raq.transmit_power != mmimo.transmit_power
    {
        return Err(Error::invalid(
            "inputs",
            "both systems must share M, K, β and P_s",
        ));
    }
    let ratio = (raq.gain / mmimo.gain)
        * (raq.aperture / mmimo.aperture)
        * (mmimo.noise_power / raq.noise_power);
    let delta_rate = (raq.gain / mmimo.gain).log2() + (raq.aperture / mmimo.aperture).log2()
        - (raq.noise_power / mmimo.noise_power).log2();
    Ok(RaqMmimoGap { ratio, delta_rate })
}

/// Per-user gaps and their K-user averages.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub zf_mrc: Vec<ZfMrcGap>,
    pub raq_mmimo: Vec<RaqMmimoGap>,
    pub mean_delta_rate: f64,
    pub mean_delta_rate_large_array: f64,
    pub mean_raq_gain: f64,
}

impl GapReport {
    pub fn compute(raq: &BoundInputs, mmimo: &BoundInputs) -> Result<Self> {
        let k = raq.users();
        let zf_mrc = (0..k)
            .map(|u| gap_zf_vs_mrc(raq, u))
            .collect::<Result<Vec<_>>>()?;
        let raq_mmimo = (0..k)
            .map(|u| gap_raq_vs_mmimo(raq, mmimo, u))
            .collect::<Result<Vec<_>>>()?;
        let mean = |it: &mut dyn Iterator<Item = f64>| it.sum::<f64>() / k as f64;
        Ok(Self {
            mean_delta_rate: mean(&mut zf_mrc.iter().map(|g| g.delta_rate)),
            mean_delta_rate_large_array: mean(&mut zf_mrc.iter().map(|g| g.delta_rate_large_array)),
            mean_raq_gain: mean(&mut raq_mmimo.iter().map(|g| g.delta_rate)),
            zf_mrc,
            raq_mmimo,
        })
    }
}
