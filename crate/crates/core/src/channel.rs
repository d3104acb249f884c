//! User drop, large-scale fading and Rayleigh small-scale fading.
//!
//! The array sits at the origin; users are dropped uniformly on a disk whose
//! center lies on the x axis at `center` meters.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::constants::db_to_linear;
use crate::error::{Error, Result};
use crate::rng::{self, Domain};

/// Path-loss intercept at 1 m, dB.
pub const PATHLOSS_INTERCEPT_DB: f64 = -30.0;
/// Path-loss slope, dB per decade.
pub const PATHLOSS_SLOPE_DB: f64 = 38.0;
/// Distances are floored here before evaluating path loss.
pub const MIN_DISTANCE_M: f64 = 1.0;

#[derive(Debug, Clone, PartialEq)]
pub struct UserGeometry {
    pub center: f64,
    pub radius: f64,
    pub positions: Vec<[f64; 2]>,
}

impl UserGeometry {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.positions.iter().map(|[x, y]| x.hypot(*y)).collect()
    }

    /// The first `k` users.
    pub fn truncated(&self, k: usize) -> Self {
        Self {
            center: self.center,
            radius: self.radius,
            positions: self.positions[..k.min(self.positions.len())].to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LargeScaleProfile {
    /// Linear large-scale gains β_k.
    pub beta: Vec<f64>,
    pub shadowing_db: f64,
}

impl LargeScaleProfile {
    pub fn from_beta(beta: Vec<f64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::invalid("beta", "needs at least one user"));
        }
        if beta.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::invalid("beta", "gains must be positive"));
        }
        Ok(Self {
            beta,
            shadowing_db: 0.0,
        })
    }

    pub fn users(&self) -> usize {
        self.beta.len()
    }

    pub fn truncated(&self, k: usize) -> Self {
        Self {
            beta: self.beta[..k.min(self.beta.len())].to_vec(),
            shadowing_db: self.shadowing_db,
        }
    }
}

/// Deterministic path loss `−30 − 38·log10(d)` in dB.
pub fn pathloss_db(distance: f64) -> f64 {
    PATHLOSS_INTERCEPT_DB - PATHLOSS_SLOPE_DB * distance.max(MIN_DISTANCE_M).log10()
}

/// Uniform points on a disk via the radius-√u method.
pub fn drop_users<R: Rng + ?Sized>(
    users: usize,
    center: f64,
    radius: f64,
    rng: &mut R,
) -> Vec<[f64; 2]> {
    (0..users)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let t = 2.0 * PI * rng.random::<f64>();
            [center + r * t.cos(), r * t.sin()]
        })
        .collect()
}

/// Large-scale gains for a geometry, with log-normal shadowing drawn from
/// `rng` when `shadowing_db > 0`.
pub fn beta_for<R: Rng + ?Sized>(
    geometry: &UserGeometry,
    shadowing_db: f64,
    rng: &mut R,
) -> LargeScaleProfile {
    let beta = geometry
        .distances()
        .into_iter()
        .map(|d| {
            let shadow = if shadowing_db > 0.0 {
                shadowing_db * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            db_to_linear(pathloss_db(d) + shadow)
        })
        .collect();
    LargeScaleProfile { beta, shadowing_db }
}

pub fn large_scale_profile(
    users: usize,
    center: f64,
    radius: f64,
    shadowing_db: f64,
    seed: u64,
) -> Result<(UserGeometry, LargeScaleProfile)> {
    if users == 0 {
        return Err(Error::Geometry("at least one user is required".into()));
    }
    if !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::Geometry(format!(
            "radius must be nonnegative, got {radius}"
        )));
    }
    if !(center > radius) {
        return Err(Error::Geometry(format!(
            "cell center ({center} m) must lie farther from the array than the drop radius ({radius} m)"
        )));
    }
    if !(shadowing_db >= 0.0 && shadowing_db.is_finite()) {
        return Err(Error::invalid("shadowing_db", "must be nonnegative"));
    }
    let positions = drop_users(
        users,
        center,
        radius,
        &mut rng::stream(seed, Domain::Geometry, 0),
    );
    let geometry = UserGeometry {
        center,
        radius,
        positions,
    };
    let profile = beta_for(
        &geometry,
        shadowing_db,
        &mut rng::stream(seed, Domain::Shadowing, 0),
    );
    Ok((geometry, profile))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// Small-scale fading, M×K.
    pub g: DMatrix<Complex64>,
    /// Diagonal of Σ: `√β_k`.
    pub sqrt_beta: Vec<f64>,
    /// Composite channel `H = GΣ`.
    pub h: DMatrix<Complex64>,
}

/// Circularly symmetric unit-variance complex Gaussian.
#[inline]
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

/// Draws `G` column by column from `rng` and forms `H = GΣ`.
pub fn realize<R: Rng + ?Sized>(
    elements: usize,
    profile: &LargeScaleProfile,
    rng: &mut R,
) -> ChannelRealization {
    let k = profile.users();
    let g = DMatrix::from_fn(elements, k, |_, _| complex_gaussian(rng));
    let sqrt_beta: Vec<f64> = profile.beta.iter().map(|b| b.sqrt()).collect();
    let mut h = g.clone();
    for (j, s) in sqrt_beta.iter().enumerate() {
        h.column_mut(j).scale_mut(*s);
    }
    ChannelRealization { g, sqrt_beta, h }
}

pub fn channel_realization(
    elements: usize,
    profile: &LargeScaleProfile,
    seed: u64,
) -> Result<ChannelRealization> {
    if elements == 0 {
        return Err(Error::invalid("elements", "must be at least 1"));
    }
    Ok(realize(
        elements,
        profile,
        &mut rng::stream(seed, Domain::SmallScale, 0),
    ))
}
