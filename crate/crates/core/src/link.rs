//! Monte Carlo uplink: combiners, per-user SINR, ergodic rates and a
//! waveform-level detector.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{complex_gaussian, realize, LargeScaleProfile};
use crate::error::{ensure_positive, Error, Result};
use crate::frontend::{Diagonal, FrontEndResponse, MmimoFrontEnd};
use crate::linalg::{apply_diagonal, hermitian_inverse, MAX_CONDITION};
use crate::rates::{lower_bounds, BoundInputs, Scheme, System};
use crate::rng::{self, Domain};

/// Two-sided 95% normal quantile used for reported confidence intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// The array-level view of a receiver: `Θ`, aperture and noise power.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceiverFront {
    pub system: System,
    pub theta: Diagonal,
    pub aperture: f64,
    pub noise_power: f64,
    /// ρ or ρ0.
    pub gain: f64,
    /// cos²φ; 1 for massive MIMO.
    pub cos2_phase: f64,
}

impl ReceiverFront {
    pub fn raq(response: &FrontEndResponse, steering: &Diagonal) -> Self {
        Self {
            system: System::Raq,
            theta: response.theta(steering),
            aperture: response.effective_aperture,
            noise_power: response.noise_power,
            gain: response.gain,
            cos2_phase: response.cos2_phase(),
        }
    }

    /// `Θ = √ρ0·I_M`.
    pub fn mmimo(front: &MmimoFrontEnd, elements: usize) -> Self {
        let g = front.gain();
        Self {
            system: System::Mmimo,
            theta: Diagonal(DVector::from_element(
                elements,
                Complex64::new(g.sqrt(), 0.0),
            )),
            aperture: front.aperture,
            noise_power: front.noise_power,
            gain: g,
            cos2_phase: 1.0,
        }
    }

    pub fn elements(&self) -> usize {
        self.theta.len()
    }

    pub fn bound_inputs(&self, scheme: Scheme, beta: &[f64], transmit_power: f64) -> BoundInputs {
        BoundInputs {
            system: self.system,
            scheme,
            elements: self.elements(),
            beta: beta.to_vec(),
            transmit_power,
            aperture: self.aperture,
            gain: self.gain,
            cos2_phase: self.cos2_phase,
            noise_power: self.noise_power,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.theta.is_empty() {
            return Err(Error::invalid("elements", "must be at least 1"));
        }
        ensure_positive("aperture", self.aperture)?;
        ensure_positive("noise_power", self.noise_power)?;
        ensure_positive("gain", self.gain)?;
        if self.theta.entries().iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("theta", "entries must be finite"));
        }
        Ok(())
    }
}

fn check_shapes(theta: &Diagonal, h: &DMatrix<Complex64>) -> Result<()> {
    if theta.len() != h.nrows() {
        return Err(Error::Dimension(format!(
            "Θ is {0}×{0} but H has {1} rows",
            theta.len(),
            h.nrows()
        )));
    }
    if h.ncols() == 0 {
        return Err(Error::Dimension("H has no columns".into()));
    }
    Ok(())
}

/// MRC: `C = ΘH`; ZF: `C = ΘH(H*Θ*ΘH)⁻¹`.
pub fn combiner(
    scheme: Scheme,
    theta: &Diagonal,
    h: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    check_shapes(theta, h)?;
    let th = apply_diagonal(theta.entries(), h);
    match scheme {
        Scheme::Mrc => Ok(th),
        Scheme::Zf => {
            if h.nrows() < h.ncols() {
                return Err(Error::Dimension(format!(
                    "ZF needs M ≥ K, got M = {}, K = {}",
                    h.nrows(),
                    h.ncols()
                )));
            }
            let (inv, _) = hermitian_inverse(&th.ad_mul(&th), MAX_CONDITION)?;
            Ok(th * inv)
        }
    }
}

/// Per-user SINR for an arbitrary combiner `C`.
pub fn sinr_per_user(
    c: &DMatrix<Complex64>,
    theta: &Diagonal,
    h: &DMatrix<Complex64>,
    transmit_power: f64,
    aperture: f64,
    noise_power: f64,
) -> Result<Vec<f64>> {
    check_shapes(theta, h)?;
    if c.shape() != h.shape() {
        return Err(Error::Dimension(format!(
            "C is {:?} but H is {:?}",
            c.shape(),
            h.shape()
        )));
    }
    ensure_positive("noise_power", noise_power)?;
    let b = c.ad_mul(&apply_diagonal(theta.entries(), h));
    let s = transmit_power * aperture;
    Ok((0..h.ncols())
        .map(|k| {
            let interference: f64 = (0..h.ncols())
                .filter(|i| *i != k)
                .map(|i| b[(k, i)].norm_sqr())
                .sum();
            s * b[(k, k)].norm_sqr() / (s * interference + noise_power * c.column(k).norm_squared())
        })
        .collect())
}

/// Everything a trial needs to score one front end under both combiners.
struct GramState {
    gram: DMatrix<Complex64>,
    inverse: Option<DMatrix<Complex64>>,
}

impl GramState {
    fn new(theta: &Diagonal, h: &DMatrix<Complex64>, need_inverse: bool) -> Self {
        let th = apply_diagonal(theta.entries(), h);
        let gram = th.ad_mul(&th);
        let inverse = if need_inverse && h.nrows() >= h.ncols() {
            hermitian_inverse(&gram, MAX_CONDITION)
                .ok()
                .map(|(inv, _)| inv)
        } else {
            None
        };
        Self { gram, inverse }
    }

    fn sinr(&self, scheme: Scheme, signal: f64, noise_power: f64) -> Option<Vec<f64>> {
        let a = &self.gram;
        let k = a.nrows();
        match scheme {
            Scheme::Mrc => Some(
                (0..k)
                    .map(|u| {
                        let d = a[(u, u)].re;
                        let interference: f64 = (0..k)
                            .filter(|i| *i != u)
                            .map(|i| a[(u, i)].norm_sqr())
                            .sum();
                        signal * d * d / (signal * interference + noise_power * d)
                    })
                    .collect(),
            ),
            Scheme::Zf => self.inverse.as_ref().map(|inv| {
                (0..k)
                    .map(|u| signal / (noise_power * inv[(u, u)].re))
                    .collect()
            }),
        }
    }
}

/// Per-user SINR from the Gram matrix `(ΘH)*(ΘH)`, without forming `C`.
pub fn sinr_from_gram(
    scheme: Scheme,
    theta: &Diagonal,
    h: &DMatrix<Complex64>,
    transmit_power: f64,
    aperture: f64,
    noise_power: f64,
) -> Result<Vec<f64>> {
    check_shapes(theta, h)?;
    ensure_positive("noise_power", noise_power)?;
    if scheme == Scheme::Zf && h.nrows() < h.ncols() {
        return Err(Error::Dimension(format!(
            "ZF needs M ≥ K, got M = {}, K = {}",
            h.nrows(),
            h.ncols()
        )));
    }
    let th = apply_diagonal(theta.entries(), h);
    let gram = th.ad_mul(&th);
    let inverse = match scheme {
        Scheme::Zf => Some(hermitian_inverse(&gram, MAX_CONDITION)?.0),
        Scheme::Mrc => None,
    };
    let state = GramState { gram, inverse };
    Ok(state
        .sinr(scheme, transmit_power * aperture, noise_power)
        .expect("inverse computed above"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkScenario {
    pub front: ReceiverFront,
    pub profile: LargeScaleProfile,
    /// Per-user transmit power P_s, W.
    pub transmit_power: f64,
    pub scheme: Scheme,
}

impl LinkScenario {
    pub fn elements(&self) -> usize {
        self.front.elements()
    }

    pub fn users(&self) -> usize {
        self.profile.users()
    }

    pub fn validate(&self) -> Result<()> {
        self.front.validate()?;
        if self.profile.users() == 0 {
            return Err(Error::invalid("users", "must be at least 1"));
        }
        if !(self.transmit_power >= 0.0 && self.transmit_power.is_finite()) {
            return Err(Error::invalid("transmit_power", "must be nonnegative"));
        }
        if self.scheme == Scheme::Zf && self.elements() <= self.users() {
            return Err(Error::invalid(
                "elements",
                format!(
                    "ZF requires M > K, got M = {}, K = {}",
                    self.elements(),
                    self.users()
                ),
            ));
        }
        Ok(())
    }

    pub fn bound_inputs(&self) -> BoundInputs {
        self.front
            .bound_inputs(self.scheme, &self.profile.beta, self.transmit_power)
    }
}

/// Monte Carlo ergodic rates with their closed-form lower bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub system: System,
    pub scheme: Scheme,
    pub transmit_power: f64,
    pub rate: Vec<f64>,
    pub lower_bound: Vec<f64>,
    /// Standard error of each per-user mean.
    pub std_err: Vec<f64>,
    /// 95% normal-approximation half-width per user.
    pub ci_half_width: Vec<f64>,
    /// Standard error of the user-averaged rate.
    pub mean_std_err: f64,
    pub trials: usize,
    pub failed_trials: usize,
}

impl RateReport {
    pub fn mean_rate(&self) -> f64 {
        mean(&self.rate)
    }

    pub fn mean_lower_bound(&self) -> f64 {
        mean(&self.lower_bound)
    }

    /// 95% half-width of the user-averaged rate.
    pub fn mean_ci_half_width(&self) -> f64 {
        Z_95 * self.mean_std_err
    }

    pub fn successful_trials(&self) -> usize {
        self.trials - self.failed_trials
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// One entry of a batch: which front end, which combiner, which power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub front: usize,
    pub scheme: Scheme,
    pub transmit_power: f64,
}

fn reduce(samples: &[Option<Vec<f64>>], users: usize) -> Option<(Vec<f64>, Vec<f64>, f64, usize)> {
    let mut sum = vec![0.0; users];
    let mut sq = vec![0.0; users];
    let (mut msum, mut msq) = (0.0, 0.0);
    let mut n = 0usize;
    for s in samples.iter().flatten() {
        let mut avg = 0.0;
        for (k, r) in s.iter().enumerate() {
            sum[k] += r;
            sq[k] += r * r;
            avg += r;
        }
        avg /= users as f64;
        msum += avg;
        msq += avg * avg;
        n += 1;
    }
    if n == 0 {
        return None;
    }
    let nf = n as f64;
    let se = |s: f64, q: f64| {
        if n < 2 {
            0.0
        } else {
            let m = s / nf;
            ((q - nf * m * m).max(0.0) / (nf - 1.0) / nf).sqrt()
        }
    };
    let means = sum.iter().map(|s| s / nf).collect();
    let errs = sum.iter().zip(&sq).map(|(s, q)| se(*s, *q)).collect();
    Some((means, errs, se(msum, msq), samples.len() - n))
}

/// Runs many evaluations on shared channel draws. All fronts must have the
/// same number of elements. Trial `t` uses the small-scale stream
/// `(seed, t)`, so results depend only on the seed and never on the order
/// in which trials execute.
pub fn ergodic_rates_batch(
    fronts: &[ReceiverFront],
    profile: &LargeScaleProfile,
    evaluations: &[Evaluation],
    trials: usize,
    seed: u64,
) -> Result<Vec<RateReport>> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    let users = profile.users();
    if users == 0 {
        return Err(Error::invalid("users", "must be at least 1"));
    }
    let Some(first) = fronts.first() else {
        return Err(Error::invalid("fronts", "needs at least one front end"));
    };
    let m = first.elements();
    for f in fronts {
        f.validate()?;
        if f.elements() != m {
            return Err(Error::Dimension(
                "front ends differ in element count".into(),
            ));
        }
    }
    for e in evaluations {
        if e.front >= fronts.len() {
            return Err(Error::invalid(
                "front",
                format!("index {} out of range", e.front),
            ));
        }
        if !(e.transmit_power >= 0.0 && e.transmit_power.is_finite()) {
            return Err(Error::invalid("transmit_power", "must be nonnegative"));
        }
        if e.scheme == Scheme::Zf && m <= users {
            return Err(Error::invalid(
                "elements",
                format!("ZF requires M > K, got M = {m}, K = {users}"),
            ));
        }
    }
    let need_inverse: Vec<bool> = (0..fronts.len())
        .map(|i| {
            evaluations
                .iter()
                .any(|e| e.front == i && e.scheme == Scheme::Zf)
        })
        .collect();

    let per_trial: Vec<Vec<Option<Vec<f64>>>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng::stream(seed, Domain::SmallScale, t);
            let h = realize(m, profile, &mut rng).h;
            let states: Vec<GramState> = fronts
                .iter()
                .zip(&need_inverse)
                .map(|(f, need)| GramState::new(&f.theta, &h, *need))
                .collect();
            evaluations
                .iter()
                .map(|e| {
                    let f = &fronts[e.front];
                    states[e.front]
                        .sinr(e.scheme, e.transmit_power * f.aperture, f.noise_power)
                        .map(|g| g.iter().map(|x| (1.0 + x).log2()).collect())
                })
                .collect()
        })
        .collect();

    evaluations
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let f = &fronts[e.front];
            let samples: Vec<Option<Vec<f64>>> = per_trial.iter().map(|t| t[i].clone()).collect();
            let (rate, std_err, mean_std_err, failed) =
                reduce(&samples, users).ok_or(Error::Combiner {
                    reason: "every trial failed to invert the Gram matrix",
                    condition_number: f64::INFINITY,
                })?;
            let lower_bound =
                lower_bounds(&f.bound_inputs(e.scheme, &profile.beta, e.transmit_power))?;
            Ok(RateReport {
                system: f.system,
                scheme: e.scheme,
                transmit_power: e.transmit_power,
                ci_half_width: std_err.iter().map(|s| Z_95 * s).collect(),
                rate,
                lower_bound,
                std_err,
                mean_std_err,
                trials,
                failed_trials: failed,
            })
        })
        .collect()
}

pub fn ergodic_rates_mc(scenario: &LinkScenario, trials: usize, seed: u64) -> Result<RateReport> {
    scenario.validate()?;
    let eval = Evaluation {
        front: 0,
        scheme: scenario.scheme,
        transmit_power: scenario.transmit_power,
    };
    let mut reports = ergodic_rates_batch(
        std::slice::from_ref(&scenario.front),
        &scenario.profile,
        &[eval],
        trials,
        seed,
    )?;
    Ok(reports.remove(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymbolAlphabet {
    /// Unit-power circularly symmetric Gaussian.
    #[default]
    Gaussian,
    Qpsk,
}

fn draw_symbol<R: Rng + ?Sized>(alphabet: SymbolAlphabet, rng: &mut R) -> Complex64 {
    match alphabet {
        SymbolAlphabet::Gaussian => complex_gaussian(rng),
        SymbolAlphabet::Qpsk => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let re = if rng.random::<bool>() { s } else { -s };
            let im = if rng.random::<bool>() { s } else { -s };
            Complex64::new(re, im)
        }
    }
}

/// Normalized symbol estimates `r̂ = diag(c_k*Θh_k)⁻¹·C*v / √(P_s·A_e)` for a
/// block of received vectors (one column per symbol time).
pub fn detect_block(
    c: &DMatrix<Complex64>,
    theta: &Diagonal,
    h: &DMatrix<Complex64>,
    transmit_power: f64,
    aperture: f64,
    v: &DMatrix<Complex64>,
) -> Result<DMatrix<Complex64>> {
    check_shapes(theta, h)?;
    if v.nrows() != h.nrows() {
        return Err(Error::Dimension(format!(
            "v has {} rows, expected {}",
            v.nrows(),
            h.nrows()
        )));
    }
    ensure_positive("transmit_power", transmit_power)?;
    let b = c.ad_mul(&apply_diagonal(theta.entries(), h));
    let mut r = c.ad_mul(v);
    let amp = (transmit_power * aperture).sqrt();
    for k in 0..r.nrows() {
        let scale = 1.0 / (amp * b[(k, k)]);
        for x in r.row_mut(k).iter_mut() {
            *x *= scale;
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveformReport {
    pub empirical_sinr: Vec<f64>,
    pub analytic_sinr: Vec<f64>,
    pub symbols: usize,
}

impl WaveformReport {
    pub fn max_relative_error(&self) -> f64 {
        self.empirical_sinr
            .iter()
            .zip(&self.analytic_sinr)
            .map(|(e, a)| ((e - a) / a).abs())
            .fold(0.0, f64::max)
    }
}

const WAVEFORM_CHUNK: usize = 4096;

/// Transmits `n_symbols` symbol vectors through `v = √(P_s·A_e)·ΘHs + w`,
/// combines with `scheme`, and measures per-user SINR as signal energy over
/// the energy of the normalized estimation error.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_and_detect(
    theta: &Diagonal,
    h: &DMatrix<Complex64>,
    transmit_power: f64,
    aperture: f64,
    noise_power: f64,
    scheme: Scheme,
    n_symbols: usize,
    seed: u64,
    alphabet: SymbolAlphabet,
) -> Result<WaveformReport> {
    if n_symbols < 1000 {
        return Err(Error::invalid(
            "n_symbols",
            format!("needs at least 1000 symbols, got {n_symbols}"),
        ));
    }
    ensure_positive("noise_power", noise_power)?;
    ensure_positive("transmit_power", transmit_power)?;
    let c = combiner(scheme, theta, h)?;
    let analytic = sinr_per_user(&c, theta, h, transmit_power, aperture, noise_power)?;
    let (m, k) = h.shape();
    let th = apply_diagonal(theta.entries(), h);
    let amp = (transmit_power * aperture).sqrt();
    let sigma = noise_power.sqrt();
    let mut rng = rng::stream(seed, Domain::Waveform, 0);
    let mut signal = vec![0.0; k];
    let mut error = vec![0.0; k];
    let mut done = 0;
    while done < n_symbols {
        let n = WAVEFORM_CHUNK.min(n_symbols - done);
        let s = DMatrix::from_fn(k, n, |_, _| draw_symbol(alphabet, &mut rng));
        let w = DMatrix::from_fn(m, n, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * (sigma * std::f64::consts::FRAC_1_SQRT_2)
        });
        let v = &th * &s * Complex64::new(amp, 0.0) + w;
        let r = detect_block(&c, theta, h, transmit_power, aperture, &v)?;
        for u in 0..k {
            for j in 0..n {
                signal[u] += s[(u, j)].norm_sqr();
                error[u] += (r[(u, j)] - s[(u, j)]).norm_sqr();
            }
        }
        done += n;
    }
    Ok(WaveformReport {
        empirical_sinr: signal.iter().zip(&error).map(|(s, e)| s / e).collect(),
        analytic_sinr: analytic,
        symbols: n_symbols,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_h(m: usize, k: usize, seed: u64) -> DMatrix<Complex64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(m, k, |_, _| complex_gaussian(&mut rng))
    }

    fn random_theta(m: usize, seed: u64) -> Diagonal {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Diagonal(DVector::from_fn(m, |_, _| {
            Complex64::from_polar(0.7, rng.random::<f64>() * 6.0)
        }))
    }

    fn toy_front(m: usize) -> ReceiverFront {
        ReceiverFront {
            system: System::Raq,
            theta: random_theta(m, 3),
            aperture: 1.0,
            noise_power: 1.0,
            gain: 0.49,
            cos2_phase: 1.0,
        }
    }

    #[test]
    fn zf_inverts_effective_channel() {
        let (theta, h) = (random_theta(64, 1), random_h(64, 8, 2));
        let c = combiner(Scheme::Zf, &theta, &h).unwrap();
        let eye = c.ad_mul(&apply_diagonal(theta.entries(), &h));
        assert!((eye - DMatrix::identity(8, 8)).camax() < 1e-10);
    }

    #[test]
    fn single_user_combiners_are_parallel() {
        let (theta, h) = (random_theta(16, 1), random_h(16, 1, 2));
        let a = combiner(Scheme::Mrc, &theta, &h).unwrap();
        let b = combiner(Scheme::Zf, &theta, &h).unwrap();
        let ratio = b[(0, 0)] / a[(0, 0)];
        assert!((b - a * ratio).camax() < 1e-12);
        let g1 = sinr_per_user(
            &combiner(Scheme::Mrc, &theta, &h).unwrap(),
            &theta,
            &h,
            1.0,
            1.0,
            0.3,
        )
        .unwrap();
        let g2 = sinr_per_user(
            &combiner(Scheme::Zf, &theta, &h).unwrap(),
            &theta,
            &h,
            1.0,
            1.0,
            0.3,
        )
        .unwrap();
        assert!((g1[0] - g2[0]).abs() < 1e-10 * g1[0]);
    }

    #[test]
    fn zf_dimension_rules() {
        let theta = random_theta(8, 1);
        assert!(combiner(Scheme::Zf, &theta, &random_h(8, 8, 2)).is_ok());
        assert!(matches!(
            combiner(Scheme::Zf, &theta, &random_h(8, 9, 2)),
            Err(Error::Dimension(_))
        ));
        let mut h = random_h(8, 3, 2);
        let col = h.column(0).clone_owned();
        h.set_column(1, &col);
        assert!(matches!(
            combiner(Scheme::Zf, &theta, &h),
            Err(Error::Combiner { .. })
        ));
    }

    #[test]
    fn zf_sinr_matches_inverse_diagonal() {
        let (theta, h) = (random_theta(32, 4), random_h(32, 5, 5));
        let c = combiner(Scheme::Zf, &theta, &h).unwrap();
        let g = sinr_per_user(&c, &theta, &h, 2.0, 0.5, 0.1).unwrap();
        let fast = sinr_from_gram(Scheme::Zf, &theta, &h, 2.0, 0.5, 0.1).unwrap();
        for (a, b) in g.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-9 * a);
        }
        let mrc = sinr_per_user(
            &combiner(Scheme::Mrc, &theta, &h).unwrap(),
            &theta,
            &h,
            2.0,
            0.5,
            0.1,
        )
        .unwrap();
        let fast = sinr_from_gram(Scheme::Mrc, &theta, &h, 2.0, 0.5, 0.1).unwrap();
        for (a, b) in mrc.iter().zip(&fast) {
            assert!((a - b).abs() < 1e-12 * a);
        }
    }

    #[test]
    fn sinr_ignores_column_scaling() {
        let (theta, h) = (random_theta(20, 6), random_h(20, 4, 7));
        let mut c = combiner(Scheme::Mrc, &theta, &h).unwrap();
        let before = sinr_per_user(&c, &theta, &h, 1.0, 1.0, 0.5).unwrap();
        let s = Complex64::from_polar(7.0, std::f64::consts::FRAC_PI_3);
        for x in c.column_mut(2).iter_mut() {
            *x *= s;
        }
        let after = sinr_per_user(&c, &theta, &h, 1.0, 1.0, 0.5).unwrap();
        for (a, b) in before.iter().zip(&after) {
            assert!((a - b).abs() < 1e-12 * a);
        }
        let silent = sinr_per_user(&c, &theta, &h, 0.0, 1.0, 0.5).unwrap();
        assert!(silent.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn noiseless_zf_recovers_symbols() {
        let (theta, h) = (random_theta(12, 8), random_h(12, 4, 9));
        let c = combiner(Scheme::Zf, &theta, &h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let s = DMatrix::from_fn(4, 50, |_, _| complex_gaussian(&mut rng));
        let (ps, ae): (f64, f64) = (3.0, 0.2);
        let v = apply_diagonal(theta.entries(), &h) * &s * Complex64::new((ps * ae).sqrt(), 0.0);
        let r = detect_block(&c, &theta, &h, ps, ae, &v).unwrap();
        assert!((r - s).camax() < 1e-12);
    }

    #[test]
    fn waveform_is_reproducible() {
        let (theta, h) = (random_theta(8, 1), random_h(8, 2, 2));
        let run = || {
            synthesize_and_detect(
                &theta,
                &h,
                1.0,
                1.0,
                0.5,
                Scheme::Mrc,
                2000,
                42,
                SymbolAlphabet::Qpsk,
            )
            .unwrap()
        };
        assert_eq!(run(), run());
        assert!(synthesize_and_detect(
            &theta,
            &h,
            1.0,
            1.0,
            0.5,
            Scheme::Mrc,
            999,
            42,
            SymbolAlphabet::Gaussian
        )
        .is_err());
    }

    #[test]
    fn huge_noise_kills_rate() {
        let profile = LargeScaleProfile::from_beta(vec![1.0, 0.5]).unwrap();
        let mut front = toy_front(8);
        front.noise_power = 1e30;
        let s = LinkScenario {
            front,
            profile,
            transmit_power: 1.0,
            scheme: Scheme::Zf,
        };
        let r = ergodic_rates_mc(&s, 20, 1).unwrap();
        assert!(r.rate.iter().all(|x| *x < 1e-20));
    }

    #[test]
    fn scenario_rules() {
        let profile = LargeScaleProfile::from_beta(vec![1.0; 8]).unwrap();
        let s = LinkScenario {
            front: toy_front(8),
            profile,
            transmit_power: 1.0,
            scheme: Scheme::Zf,
        };
        assert!(s.validate().unwrap_err().is_validation());
        assert!(ergodic_rates_mc(&s, 0, 1).is_err());
    }

    #[test]
    fn batch_is_thread_count_independent() {
        let profile = LargeScaleProfile::from_beta(vec![1.0, 0.2, 0.05]).unwrap();
        let fronts = [toy_front(10)];
        let evals = [
            Evaluation {
                front: 0,
                scheme: Scheme::Mrc,
                transmit_power: 2.0,
            },
            Evaluation {
                front: 0,
                scheme: Scheme::Zf,
                transmit_power: 2.0,
            },
        ];
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| ergodic_rates_batch(&fronts, &profile, &evals, 64, 5).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
