//! Parameter sweeps over M, K or P_s for both systems and both combiners.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{LargeScaleProfile, UserGeometry};
use crate::config::Config;
use crate::constants::dbm_to_watts;
use crate::error::{Error, Result};
use crate::link::{ergodic_rates_batch, Evaluation, RateReport, ReceiverFront};
use crate::rates::{Scheme, System};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "M")]
    Elements,
    #[serde(rename = "K")]
    Users,
    #[serde(rename = "Ps_dBm")]
    Power,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Elements => "M",
            Axis::Users => "K",
            Axis::Power => "Ps_dBm",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Axis::Elements => "Number of receive elements M",
            Axis::Users => "Number of users K",
            Axis::Power => "Transmit power per user (dBm)",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "M" => Ok(Axis::Elements),
            "K" => Ok(Axis::Users),
            "Ps_dBm" => Ok(Axis::Power),
            _ => Err(Error::invalid("axis", format!("unknown axis `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    FigM,
    FigK,
    FigP,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::FigM, Preset::FigK, Preset::FigP];

    pub fn name(self) -> &'static str {
        match self {
            Preset::FigM => "fig-M",
            Preset::FigK => "fig-K",
            Preset::FigP => "fig-P",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::invalid(
                    "preset",
                    format!("unknown preset `{s}`, expected fig-M, fig-K or fig-P"),
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub grid: Vec<f64>,
    /// Values of the two axes not being swept.
    pub elements: usize,
    pub users: usize,
    pub transmit_power_dbm: f64,
    pub schemes: Vec<Scheme>,
    pub trials: usize,
    pub seed: u64,
}

impl SweepSpec {
    pub fn preset(preset: Preset, config: &Config) -> Self {
        let (axis, grid, elements, users) = match preset {
            Preset::FigM => (
                Axis::Elements,
                (1..=10).map(|i| 50.0 * i as f64).collect(),
                300,
                config.users.count,
            ),
            Preset::FigK => (
                Axis::Users,
                (1..=30).map(f64::from).collect(),
                300,
                config.users.count,
            ),
            Preset::FigP => (
                Axis::Power,
                (0..=30).map(|i| -20.0 + 2.0 * i as f64).collect(),
                config.array.elements,
                config.users.count,
            ),
        };
        let transmit_power_dbm = match preset {
            Preset::FigM => 30.0,
            _ => config.users.transmit_power_dbm,
        };
        Self {
            axis,
            grid,
            elements,
            users,
            transmit_power_dbm,
            schemes: Scheme::ALL.to_vec(),
            trials: config.simulation.trials,
            seed: config.simulation.seed,
        }
    }

    /// `(M, K, P_s in dBm)` at grid index `i`.
    pub fn point(&self, i: usize) -> (usize, usize, f64) {
        let v = self.grid[i];
        match self.axis {
            Axis::Elements => (v as usize, self.users, self.transmit_power_dbm),
            Axis::Users => (self.elements, v as usize, self.transmit_power_dbm),
            Axis::Power => (self.elements, self.users, v),
        }
    }

    pub fn max_users(&self) -> usize {
        (0..self.grid.len())
            .map(|i| self.point(i).1)
            .max()
            .unwrap_or(self.users)
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::invalid("grid", "must not be empty"));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid", "values must be finite"));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid", "must be strictly increasing"));
        }
        if self.axis != Axis::Power && self.grid.iter().any(|v| v.fract() != 0.0 || *v < 1.0) {
            return Err(Error::invalid("grid", "counts must be positive integers"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.schemes.is_empty() {
            return Err(Error::invalid("schemes", "must name at least one scheme"));
        }
        for i in 0..self.grid.len() {
            let (m, k, _) = self.point(i);
            if m < 2 {
                return Err(Error::invalid("elements", format!("M = {m} is below 2")));
            }
            if k == 0 {
                return Err(Error::invalid("users", "K must be at least 1"));
            }
            if self.schemes.contains(&Scheme::Zf) && m <= k {
                return Err(Error::invalid(
                    "grid",
                    format!("ZF requires M > K, violated at M = {m}, K = {k}"),
                ));
            }
        }
        Ok(())
    }
}

/// One output line: a (grid point, system, scheme) triple.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: Axis,
    pub value: f64,
    pub system: System,
    pub scheme: Scheme,
    /// User-averaged Monte Carlo rate.
    pub rate_mc: f64,
    /// User-averaged closed-form lower bound.
    pub rate_lb: f64,
    /// 95% half-width of `rate_mc`.
    pub ci: f64,
    pub err: String,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    /// Full reports aligned with `rows`; `None` where the point failed.
    pub reports: Vec<Option<RateReport>>,
    pub geometry: UserGeometry,
    pub profile: LargeScaleProfile,
}

/// Runs `spec`. Users are dropped once per sweep (the K axis uses the
/// first K of them) and trial `t` reuses the same small-scale stream at
/// every grid point. With `threads` set, the work runs in a dedicated pool
/// of that size; the output does not depend on it.
pub fn run_sweep(spec: &SweepSpec, config: &Config, threads: Option<usize>) -> Result<SweepResult> {
    spec.validate()?;
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Domain(format!("cannot start worker pool: {e}")))?
            .install(|| sweep_inner(spec, config)),
        None => sweep_inner(spec, config),
    }
}

fn sweep_inner(spec: &SweepSpec, config: &Config) -> Result<SweepResult> {
    let report = config.evaluate_frontend()?;
    let mmimo_front = config.mmimo_frontend()?;
    let (geometry, profile) = config.large_scale(spec.max_users(), spec.seed)?;

    // group consecutive grid points sharing (M, K) so one batch serves them
    let mut groups: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for i in 0..spec.grid.len() {
        let (m, k, _) = spec.point(i);
        match groups.last_mut() {
            Some((gm, gk, idx)) if *gm == m && *gk == k => idx.push(i),
            _ => groups.push((m, k, vec![i])),
        }
    }

    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (m, k, indices) in groups {
        let users = profile.truncated(k);
        let mut evaluations = Vec::new();
        let mut labels = Vec::new();
        for &i in &indices {
            let ps = dbm_to_watts(spec.point(i).2);
            for (f, system) in System::ALL.iter().enumerate() {
                for &scheme in &spec.schemes {
                    evaluations.push(Evaluation {
                        front: f,
                        scheme,
                        transmit_power: ps,
                    });
                    labels.push((i, *system, scheme));
                }
            }
        }
        let outcome = config.fronts_for(&report, &mmimo_front, m).and_then(
            |(raq, mm): (ReceiverFront, ReceiverFront)| {
                ergodic_rates_batch(&[raq, mm], &users, &evaluations, spec.trials, spec.seed)
            },
        );
        match outcome {
            Ok(batch) => {
                for ((i, system, scheme), r) in labels.into_iter().zip(batch) {
                    let err = if r.failed_trials > 0 {
                        format!("{} of {} trials failed", r.failed_trials, r.trials)
                    } else {
                        String::new()
                    };
                    rows.push(SweepRow {
                        axis: spec.axis,
                        value: spec.grid[i],
                        system,
                        scheme,
                        rate_mc: r.mean_rate(),
                        rate_lb: r.mean_lower_bound(),
                        ci: r.mean_ci_half_width(),
                        err,
                    });
                    reports.push(Some(r));
                }
            }
            Err(e) => {
                log::warn!("sweep point M = {m}, K = {k} failed: {e}");
                for (i, system, scheme) in labels {
                    rows.push(SweepRow {
                        axis: spec.axis,
                        value: spec.grid[i],
                        system,
                        scheme,
                        rate_mc: f64::NAN,
                        rate_lb: f64::NAN,
                        ci: f64::NAN,
                        err: e.to_string(),
                    });
                    reports.push(None);
                }
            }
        }
    }
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        reports,
        geometry,
        profile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_match_campaigns() {
        let cfg = Config::template();
        let m = SweepSpec::preset(Preset::FigM, &cfg);
        assert_eq!(
            m.grid,
            vec![50., 100., 150., 200., 250., 300., 350., 400., 450., 500.]
        );
        assert_eq!(m.transmit_power_dbm, 30.0);
        let k = SweepSpec::preset(Preset::FigK, &cfg);
        assert_eq!((k.grid.len(), k.elements), (30, 300));
        let p = SweepSpec::preset(Preset::FigP, &cfg);
        assert_eq!(
            (p.grid[0], *p.grid.last().unwrap(), p.grid.len()),
            (-20.0, 40.0, 31)
        );
        for spec in [m, k, p] {
            spec.validate().unwrap();
        }
        assert_eq!("FIG-m".parse::<Preset>().unwrap(), Preset::FigM);
        assert!("fig-Q".parse::<Preset>().is_err());
    }

    #[test]
    fn spec_rules() {
        let cfg = Config::template();
        let mut s = SweepSpec::preset(Preset::FigK, &cfg);
        s.grid.push(300.0);
        assert!(s.validate().is_err());
        s.schemes = vec![Scheme::Mrc];
        s.validate().unwrap();
        s.grid = vec![3.0, 2.0];
        assert!(s.validate().is_err());
        s.grid = vec![];
        assert!(s.validate().is_err());
        let mut s = SweepSpec::preset(Preset::FigM, &cfg);
        s.trials = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn small_sweep_shape() {
        let cfg = Config::template();
        let mut s = SweepSpec::preset(Preset::FigM, &cfg);
        s.grid = vec![40.0, 80.0];
        s.trials = 3;
        let r = run_sweep(&s, &cfg, Some(2)).unwrap();
        assert_eq!(r.rows.len(), 8);
        assert!(r
            .rows
            .iter()
            .all(|row| row.err.is_empty() && row.rate_mc > 0.0));
    }
}
