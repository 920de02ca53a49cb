//! Stochastic dynamics of attention-coupled phase oscillators.
//!
//! The core model couples `n` phases on a network through a mix of the
//! instantaneous neighbour field and slow "attention" states that integrate
//! each oscillator's past:
//!
//! ```text
//! d theta_i = [ omega_i + lambda Im(I_i e^{-i theta_i}) ] dt
//!             + sqrt(2 D dt) xi_i,
//!
//! I_i = (1 - alpha) (1/deg_i)  sum_j A_ij  e^{i theta_j}
//!     +      alpha  (1/deg'_i) sum_j A'_ij M_j,
//!
//! dM_i / dt = beta ( e^{i theta_i} - M_i ),
//! ```
//!
//! where `xi_i` are independent standard normals. The auxiliary graph `A'`
//! selects what the attention term reads: the neighbourhood (`A' = A`), the
//! oscillator's own history (`A' = identity`), or nothing at all. All state
//! updates use pre-step values (plain Euler–Maruyama).
//!
//! Two variants reuse the same engine: an opinion model in which the natural
//! frequency is replaced by a pull `rho_i sin(phi_i - theta_i)` toward a
//! fixed anchor angle, and a Stuart–Landau amplitude model whose oscillators
//! carry a complex state instead of a bare phase.
//!
//! Reproducibility: initial phases, natural frequencies, anchors, and the
//! dynamical noise each draw from a dedicated ChaCha stream of the
//! configured seed (see [`crate::rng`]), so enabling or disabling one source
//! of randomness never perturbs the others.

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::Network;
use crate::rng::{self, STREAM_ANCHORS, STREAM_FREQUENCIES, STREAM_NOISE, STREAM_PHASES};

const TAU: f64 = std::f64::consts::TAU;

/// Distribution of natural frequencies. All variants have mean zero: the
/// model is analysed in the co-rotating frame, so a tabulated sample is
/// centred on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FrequencyDist {
    /// Every oscillator at exactly zero frequency.
    Delta,
    /// Gaussian with the given variance (mean pinned to zero).
    Normal { variance: f64 },
    /// An explicit list of frequencies, one per oscillator.
    Tabulated { values: Vec<f64> },
}

impl FrequencyDist {
    /// A tabulated distribution, centred so its sample mean is exactly zero.
    pub fn tabulated(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("tabulated frequencies must be non-empty".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tabulated frequencies must be finite".into()));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        for v in &mut values {
            *v -= mean;
        }
        Ok(FrequencyDist::Tabulated { values })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            FrequencyDist::Delta => Ok(()),
            FrequencyDist::Normal { variance } => {
                if *variance > 0.0 && variance.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "frequency variance must be positive and finite, got {variance}"
                    )))
                }
            }
            FrequencyDist::Tabulated { values } => {
                if values.is_empty() {
                    Err(Error::InvalidParameter("tabulated frequencies must be non-empty".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Draw `n` natural frequencies from `dist` on the frequency stream of
/// `seed`. The delta distribution returns exact zeros without consuming any
/// randomness; a tabulated list must match `n` exactly.
pub fn sample_frequencies(dist: &FrequencyDist, n: usize, seed: u64) -> Result<Vec<f64>> {
    dist.validate()?;
    match dist {
        FrequencyDist::Delta => Ok(vec![0.0; n]),
        FrequencyDist::Normal { variance } => {
            let mut rng = rng::substream(seed, STREAM_FREQUENCIES);
            let normal = Normal::new(0.0, variance.sqrt())
                .map_err(|e| Error::InvalidParameter(format!("bad frequency distribution: {e}")))?;
            Ok((0..n).map(|_| normal.sample(&mut rng)).collect())
        }
        FrequencyDist::Tabulated { values } => {
            if values.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "tabulated frequencies",
                    expected: n,
                    got: values.len(),
                });
            }
            Ok(values.clone())
        }
    }
}

/// What the attention term reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttentionMode {
    /// Attention states of the graph neighbours (auxiliary graph = A).
    Neighbor,
    /// The oscillator's own attention state (auxiliary graph = identity).
    #[serde(rename = "self")]
    Own,
    /// No attention at all; requires `alpha = 0`.
    None,
}

/// Initial condition for the attention states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MInit {
    /// `M_i(0) = e^{i theta_i(0)}` (the stationary value for a frozen phase).
    PhaseLocked,
    /// `M_i(0) = 0` (empty memory).
    Zero,
}

/// Parameters of a single simulation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SimConfig {
    /// Coupling strength lambda.
    pub lambda: f64,
    /// Attention mixing weight alpha in [0, 1].
    pub alpha: f64,
    /// Attention relaxation rate beta (inverse memory span).
    pub beta: f64,
    /// Noise intensity D.
    pub noise: f64,
    /// Integrator time step.
    pub dt: f64,
    /// Total integration time.
    pub t_end: f64,
    /// Master seed; all randomness derives from it.
    pub seed: u64,
    pub attention: AttentionMode,
    pub freq: FrequencyDist,
    /// Fraction of the run (from the end) averaged into the tail-mean
    /// order parameter.
    pub measure_window: f64,
    /// Record observables every this many steps (>= 1).
    pub sample_stride: usize,
    pub m_init: MInit,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            lambda: 1.0,
            alpha: 0.0,
            beta: 1.0,
            noise: 0.5,
            dt: 0.05,
            t_end: 2000.0,
            seed: 0,
            attention: AttentionMode::Neighbor,
            freq: FrequencyDist::Delta,
            measure_window: 0.2,
            sample_stride: 1,
            m_init: MInit::PhaseLocked,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.attention == AttentionMode::None && self.alpha != 0.0 {
            return Err(Error::InvalidParameter(
                "attention mode 'none' requires alpha = 0".into(),
            ));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.t_end < self.dt {
            return Err(Error::InvalidParameter(format!(
                "t_end ({}) must be at least one step ({})",
                self.t_end, self.dt
            )));
        }
        if self.noise < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise intensity must be non-negative, got {}",
                self.noise
            )));
        }
        if self.beta < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "attention rate must be non-negative, got {}",
                self.beta
            )));
        }
        if !(self.measure_window > 0.0 && self.measure_window <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "measure_window must lie in (0, 1], got {}",
                self.measure_window
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter("sample_stride must be >= 1".into()));
        }
        if self.lambda < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling must be non-negative, got {}",
                self.lambda
            )));
        }
        self.freq.validate()
    }
}

/// Mutable state of one realisation.
#[derive(Debug, Clone)]
pub struct EnsembleState {
    pub t: f64,
    pub theta: Vec<f64>,
    pub m: Vec<Complex64>,
    pub omega: Vec<f64>,
}

impl EnsembleState {
    /// Draw the initial condition for `cfg` on `net`: phases uniform on
    /// [0, 2 pi), frequencies from the configured distribution, attention
    /// states per `cfg.m_init`.
    pub fn init(cfg: &SimConfig, net: &Network) -> Result<Self> {
        cfg.validate()?;
        let n = net.n();
        let mut phases = rng::substream(cfg.seed, STREAM_PHASES);
        let theta: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut phases, 0.0..TAU)).collect();
        let omega = sample_frequencies(&cfg.freq, n, cfg.seed)?;
        let m = match cfg.m_init {
            MInit::PhaseLocked => theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
            MInit::Zero => vec![Complex64::new(0.0, 0.0); n],
        };
        Ok(EnsembleState { t: 0.0, theta, m, omega })
    }
}

/// Kuramoto order parameter `R e^{i psi}` of a phase vector.
pub fn order_parameter(theta: &[f64]) -> Result<(f64, f64)> {
    if theta.is_empty() {
        return Err(Error::InvalidParameter("order parameter of an empty ensemble".into()));
    }
    Ok(order_parameter_unchecked(theta))
}

fn order_parameter_unchecked(theta: &[f64]) -> (f64, f64) {
    let mut sum = Complex64::new(0.0, 0.0);
    for &t in theta {
        sum += Complex64::from_polar(1.0, t);
    }
    sum /= theta.len() as f64;
    (sum.norm(), sum.arg())
}

/// Per-node drift source: constant natural frequencies, or a pull toward
/// fixed anchor angles.
enum Drift<'a> {
    Natural(&'a [f64]),
    Anchored { rho: &'a [f64], phi: &'a [f64] },
}

/// One Euler–Maruyama step of the phase/attention system, drawing noise
/// from `noise_rng` (one standard normal per oscillator, in index order,
/// whenever the configured noise intensity is positive). Both updates use
/// pre-step state.
pub fn step(
    state: &mut EnsembleState,
    cfg: &SimConfig,
    net: &Network,
    noise_rng: &mut ChaCha8Rng,
) -> Result<()> {
    if state.theta.len() != net.n() {
        return Err(Error::DimensionMismatch {
            context: "state vs network",
            expected: net.n(),
            got: state.theta.len(),
        });
    }
    let mut z = vec![Complex64::new(0.0, 0.0); net.n()];
    let drift = Drift::Natural(&state.omega);
    advance(&mut state.theta, &mut state.m, &drift, cfg, net, noise_rng, &mut z);
    state.t += cfg.dt;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn advance(
    theta: &mut [f64],
    m: &mut [Complex64],
    drift: &Drift,
    cfg: &SimConfig,
    net: &Network,
    noise_rng: &mut ChaCha8Rng,
    z: &mut [Complex64],
) {
    let n = theta.len();
    for (zi, &t) in z.iter_mut().zip(theta.iter()) {
        *zi = Complex64::from_polar(1.0, t);
    }
    let noise_scale = (2.0 * cfg.noise * cfg.dt).sqrt();

    // Complete graphs admit an O(n) accumulation: every neighbour sum is
    // the global sum minus the node's own term.
    let (sum_z, sum_m) = if net.is_complete() {
        let sz: Complex64 = z.iter().sum();
        let sm: Complex64 = m.iter().sum();
        (Some(sz), Some(sm))
    } else {
        (None, None)
    };

    for i in 0..n {
        let spatial = match sum_z {
            Some(sz) => (sz - z[i]) / (n as f64 - 1.0),
            None => {
                let mut acc = Complex64::new(0.0, 0.0);
                for &j in net.neighbours(i) {
                    acc += z[j as usize];
                }
                acc / net.degree(i) as f64
            }
        };
        let attended = match cfg.attention {
            AttentionMode::Neighbor => match sum_m {
                Some(sm) => (sm - m[i]) / (n as f64 - 1.0),
                None => {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &j in net.neighbours(i) {
                        acc += m[j as usize];
                    }
                    acc / net.degree(i) as f64
                }
            },
            AttentionMode::Own => m[i],
            AttentionMode::None => Complex64::new(0.0, 0.0),
        };
        let field = (1.0 - cfg.alpha) * spatial + cfg.alpha * attended;
        let base = match drift {
            Drift::Natural(omega) => omega[i],
            Drift::Anchored { rho, phi } => rho[i] * (phi[i] - theta[i]).sin(),
        };
        let mut dtheta = (base + cfg.lambda * (field * z[i].conj()).im) * cfg.dt;
        if noise_scale > 0.0 {
            let xi: f64 = StandardNormal.sample(noise_rng);
            dtheta += noise_scale * xi;
        }
        theta[i] += dtheta;
    }
    // Attention relaxes toward the pre-step phase state.
    let bdt = cfg.beta * cfg.dt;
    for (mi, zi) in m.iter_mut().zip(z.iter()) {
        *mi += bdt * (zi - *mi);
    }
}

/// Time series of the synchronisation observables of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableSeries {
    /// Sample times (always includes t = 0 and the final step).
    pub times: Vec<f64>,
    /// Order-parameter magnitude R at each sample.
    pub r: Vec<f64>,
    /// Order-parameter angle psi at each sample.
    pub psi: Vec<f64>,
    /// Mean of R over the tail measurement window.
    pub r_tail: f64,
    /// Phases at t = 0 (unwrapped; useful for displacement statistics).
    pub theta_initial: Vec<f64>,
    /// Phases at the end of the run (unwrapped).
    pub theta_final: Vec<f64>,
    /// Mean oscillator amplitude at each sample; only populated by the
    /// amplitude (Stuart–Landau) model.
    pub mean_amplitude: Option<Vec<f64>>,
}

impl ObservableSeries {
    fn tail_mean(times: &[f64], r: &[f64], t_end: f64, window: f64) -> f64 {
        let cutoff = t_end * (1.0 - window) - 1e-9;
        let mut sum = 0.0;
        let mut count = 0usize;
        for (&t, &v) in times.iter().zip(r) {
            if t >= cutoff {
                sum += v;
                count += 1;
            }
        }
        sum / count as f64
    }
}

fn run_engine(
    cfg: &SimConfig,
    net: &Network,
    theta0: Vec<f64>,
    m0: Vec<Complex64>,
    drift: Drift<'_>,
) -> Result<ObservableSeries> {
    let n_steps = (cfg.t_end / cfg.dt).round() as usize;
    let mut theta = theta0;
    let mut m = m0;
    let theta_initial = theta.clone();
    let mut noise_rng = rng::substream(cfg.seed, STREAM_NOISE);
    let mut z = vec![Complex64::new(0.0, 0.0); net.n()];

    let mut times = Vec::with_capacity(n_steps / cfg.sample_stride + 2);
    let mut r = Vec::with_capacity(times.capacity());
    let mut psi = Vec::with_capacity(times.capacity());
    let record = |k: usize, theta: &[f64], r: &mut Vec<f64>, psi: &mut Vec<f64>, times: &mut Vec<f64>| -> Result<()> {
        let (rv, pv) = order_parameter_unchecked(theta);
        if !rv.is_finite() {
            return Err(Error::NumericalBlowup {
                t: k as f64 * cfg.dt,
                detail: "order parameter became non-finite".into(),
            });
        }
        times.push(k as f64 * cfg.dt);
        r.push(rv);
        psi.push(pv);
        Ok(())
    };

    record(0, &theta, &mut r, &mut psi, &mut times)?;
    for k in 1..=n_steps {
        advance(&mut theta, &mut m, &drift, cfg, net, &mut noise_rng, &mut z);
        if k % cfg.sample_stride == 0 || k == n_steps {
            record(k, &theta, &mut r, &mut psi, &mut times)?;
        }
    }

    let r_tail = ObservableSeries::tail_mean(&times, &r, cfg.t_end, cfg.measure_window);
    Ok(ObservableSeries {
        times,
        r,
        psi,
        r_tail,
        theta_initial,
        theta_final: theta,
        mean_amplitude: None,
    })
}

/// Integrate one realisation of the phase/attention model.
pub fn simulate(cfg: &SimConfig, net: &Network) -> Result<ObservableSeries> {
    let state = EnsembleState::init(cfg, net)?;
    run_engine(cfg, net, state.theta, state.m, Drift::Natural(&state.omega))
}

/// Per-node pull strengths of the opinion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PullStrength {
    /// One value shared by every node.
    Uniform(f64),
    /// An explicit per-node vector.
    PerNode(Vec<f64>),
}

/// Anchor angles of the opinion model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnchorSpec {
    /// Independent uniform draws on [0, 2 pi) from the anchor stream.
    Random,
    /// An explicit per-node vector of angles.
    Given(Vec<f64>),
}

/// Configuration of the opinion variant: the common dynamics plus the
/// anchored drift replacing natural frequencies.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct OpinionConfig {
    pub sim: SimConfig,
    pub pull: PullStrength,
    pub anchors: AnchorSpec,
}

/// Integrate the opinion variant: natural frequencies are replaced by a
/// pull `rho_i sin(phi_i - theta_i)` toward quenched anchor angles. With
/// every pull strength zero this reproduces [`simulate`] with the delta
/// frequency distribution exactly, sample for sample.
pub fn simulate_opinion(cfg: &OpinionConfig, net: &Network) -> Result<ObservableSeries> {
    cfg.sim.validate()?;
    let n = net.n();
    let rho: Vec<f64> = match &cfg.pull {
        PullStrength::Uniform(v) => vec![*v; n],
        PullStrength::PerNode(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "pull strengths",
                    expected: n,
                    got: v.len(),
                });
            }
            v.clone()
        }
    };
    if rho.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::InvalidParameter("pull strengths must be finite and non-negative".into()));
    }
    let phi: Vec<f64> = match &cfg.anchors {
        AnchorSpec::Random => {
            let mut rng = rng::substream(cfg.sim.seed, STREAM_ANCHORS);
            (0..n).map(|_| rand::Rng::random_range(&mut rng, 0.0..TAU)).collect()
        }
        AnchorSpec::Given(v) => {
            if v.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "anchor angles",
                    expected: n,
                    got: v.len(),
                });
            }
            v.clone()
        }
    };

    let mut phases = rng::substream(cfg.sim.seed, STREAM_PHASES);
    let theta0: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut phases, 0.0..TAU)).collect();
    let m0 = match cfg.sim.m_init {
        MInit::PhaseLocked => theta0.iter().map(|&t| Complex64::from_polar(1.0, t)).collect(),
        MInit::Zero => vec![Complex64::new(0.0, 0.0); n],
    };
    run_engine(&cfg.sim, net, theta0, m0, Drift::Anchored { rho: &rho, phi: &phi })
}

/// Initial condition for the amplitude model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZInit {
    /// `z_i(0) = radius * e^{i phi_i}` with uniform random angles.
    UniformPhase { radius: f64 },
    /// Every oscillator at the same fixed complex value.
    Const { re: f64, im: f64 },
}

/// Parameters of the Stuart–Landau (amplitude) variant.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct SlConfig {
    /// Linear growth rate of the amplitude.
    pub a: f64,
    /// Cubic saturation coefficient (must be positive).
    pub b: f64,
    /// Common rotation frequency.
    pub omega: f64,
    /// Per-component noise intensity sigma.
    pub sigma: f64,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub dt: f64,
    pub t_end: f64,
    pub seed: u64,
    pub attention: AttentionMode,
    pub measure_window: f64,
    pub sample_stride: usize,
    pub z_init: ZInit,
}

impl Default for SlConfig {
    fn default() -> Self {
        SlConfig {
            a: 1.0,
            b: 1.0,
            omega: 0.0,
            sigma: 0.0,
            lambda: 1.0,
            alpha: 0.0,
            beta: 1.0,
            dt: 0.01,
            t_end: 100.0,
            seed: 0,
            attention: AttentionMode::Neighbor,
            measure_window: 0.2,
            sample_stride: 1,
            z_init: ZInit::UniformPhase { radius: 1.0 },
        }
    }
}

impl SlConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "saturation coefficient must be positive, got {}",
                self.b
            )));
        }
        if self.sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise intensity must be non-negative, got {}",
                self.sigma
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {}",
                self.alpha
            )));
        }
        if self.attention == AttentionMode::None && self.alpha != 0.0 {
            return Err(Error::InvalidParameter(
                "attention mode 'none' requires alpha = 0".into(),
            ));
        }
        if !(self.dt > 0.0) || self.t_end < self.dt {
            return Err(Error::InvalidParameter(
                "need dt > 0 and t_end >= dt for the amplitude model".into(),
            ));
        }
        if !(self.measure_window > 0.0 && self.measure_window <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "measure_window must lie in (0, 1], got {}",
                self.measure_window
            )));
        }
        if self.sample_stride == 0 {
            return Err(Error::InvalidParameter("sample_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Integrate the Stuart–Landau variant:
///
/// ```text
/// dz_i = [ (i omega + a) z_i - b |z_i|^2 z_i + lambda Q_i ] dt + dW_i,
/// Q_i  = (1 - alpha)/deg_i sum_j A_ij z_j + alpha/deg'_i sum_j A'_ij Q~_j,
/// dQ~_i/dt = beta (z_i - Q~_i),
/// ```
///
/// with `dW` an isotropic complex Gaussian of per-component intensity
/// `sigma`. Reports the order parameter of the phases `arg z_i` together
/// with the mean amplitude.
pub fn simulate_stuart_landau(cfg: &SlConfig, net: &Network) -> Result<ObservableSeries> {
    cfg.validate()?;
    let n = net.n();
    let n_steps = (cfg.t_end / cfg.dt).round() as usize;

    let mut z: Vec<Complex64> = match cfg.z_init {
        ZInit::Const { re, im } => vec![Complex64::new(re, im); n],
        ZInit::UniformPhase { radius } => {
            let mut rng = rng::substream(cfg.seed, STREAM_PHASES);
            (0..n)
                .map(|_| Complex64::from_polar(radius, rand::Rng::random_range(&mut rng, 0.0..TAU)))
                .collect()
        }
    };
    let mut q: Vec<Complex64> = z.clone();
    let mut noise_rng = rng::substream(cfg.seed, STREAM_NOISE);
    let noise_scale = (2.0 * cfg.sigma * cfg.dt).sqrt();
    let growth = Complex64::new(cfg.a, cfg.omega);

    let theta_of = |z: &[Complex64]| -> Vec<f64> { z.iter().map(|v| v.arg()).collect() };
    let theta_initial = theta_of(&z);

    let mut times = Vec::new();
    let mut r = Vec::new();
    let mut psi = Vec::new();
    let mut amp = Vec::new();
    let record = |k: usize,
                  z: &[Complex64],
                  times: &mut Vec<f64>,
                  r: &mut Vec<f64>,
                  psi: &mut Vec<f64>,
                  amp: &mut Vec<f64>|
     -> Result<()> {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut asum = 0.0;
        for v in z {
            let norm = v.norm();
            if !norm.is_finite() || norm > 1e6 {
                return Err(Error::NumericalBlowup {
                    t: k as f64 * cfg.dt,
                    detail: format!("oscillator amplitude reached {norm}"),
                });
            }
            asum += norm;
            if norm > 0.0 {
                sum += v / norm;
            } else {
                sum += Complex64::new(1.0, 0.0);
            }
        }
        sum /= z.len() as f64;
        times.push(k as f64 * cfg.dt);
        r.push(sum.norm());
        psi.push(sum.arg());
        amp.push(asum / z.len() as f64);
        Ok(())
    };

    record(0, &z, &mut times, &mut r, &mut psi, &mut amp)?;
    let mut znew = z.clone();
    for k in 1..=n_steps {
        let (sum_z, sum_q) = if net.is_complete() {
            (Some(z.iter().sum::<Complex64>()), Some(q.iter().sum::<Complex64>()))
        } else {
            (None, None)
        };
        for i in 0..n {
            let spatial = match sum_z {
                Some(sz) => (sz - z[i]) / (n as f64 - 1.0),
                None => {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for &j in net.neighbours(i) {
                        acc += z[j as usize];
                    }
                    acc / net.degree(i) as f64
                }
            };
            let attended = match cfg.attention {
                AttentionMode::Neighbor => match sum_q {
                    Some(sq) => (sq - q[i]) / (n as f64 - 1.0),
                    None => {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for &j in net.neighbours(i) {
                            acc += q[j as usize];
                        }
                        acc / net.degree(i) as f64
                    }
                },
                AttentionMode::Own => q[i],
                AttentionMode::None => Complex64::new(0.0, 0.0),
            };
            let field = (1.0 - cfg.alpha) * spatial + cfg.alpha * attended;
            let zi = z[i];
            let mut dz = (growth * zi - cfg.b * zi.norm_sqr() * zi + cfg.lambda * field) * cfg.dt;
            if noise_scale > 0.0 {
                let xr: f64 = StandardNormal.sample(&mut noise_rng);
                let xi: f64 = StandardNormal.sample(&mut noise_rng);
                dz += noise_scale * Complex64::new(xr, xi);
            }
            znew[i] = zi + dz;
        }
        let bdt = cfg.beta * cfg.dt;
        for (qi, zi) in q.iter_mut().zip(z.iter()) {
            *qi += bdt * (zi - *qi);
        }
        std::mem::swap(&mut z, &mut znew);
        if k % cfg.sample_stride == 0 || k == n_steps {
            record(k, &z, &mut times, &mut r, &mut psi, &mut amp)?;
        }
    }

    let r_tail = ObservableSeries::tail_mean(&times, &r, cfg.t_end, cfg.measure_window);
    Ok(ObservableSeries {
        times,
        r,
        psi,
        r_tail,
        theta_initial,
        theta_final: theta_of(&z),
        mean_amplitude: Some(amp),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::{generate, NetworkSpec};
    use approx::assert_relative_eq;

    #[test]
    fn order_parameter_limits() {
        let (r, psi) = order_parameter(&[0.7; 50]).unwrap();
        assert_relative_eq!(r, 1.0, max_relative = 1e-14);
        assert_relative_eq!(psi, 0.7, max_relative = 1e-12);
        // Evenly spread phases cancel.
        let spread: Vec<f64> = (0..8).map(|k| TAU * k as f64 / 8.0).collect();
        let (r0, _) = order_parameter(&spread).unwrap();
        assert!(r0 < 1e-12);
        assert!(order_parameter(&[]).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let net = generate(&NetworkSpec::watts_strogatz(40, 4, 0.1, 5)).unwrap();
        let cfg = SimConfig { t_end: 10.0, seed: 42, ..SimConfig::default() };
        let a = simulate(&cfg, &net).unwrap();
        let b = simulate(&cfg, &net).unwrap();
        assert_eq!(a.r, b.r);
        assert_eq!(a.theta_final, b.theta_final);
    }

    #[test]
    fn attention_modes_coincide_at_alpha_zero() {
        let net = generate(&NetworkSpec::watts_strogatz(30, 4, 0.1, 2)).unwrap();
        let base = SimConfig { t_end: 5.0, alpha: 0.0, seed: 9, ..SimConfig::default() };
        let mut runs = Vec::new();
        for mode in [AttentionMode::Neighbor, AttentionMode::Own, AttentionMode::None] {
            let cfg = SimConfig { attention: mode, ..base.clone() };
            runs.push(simulate(&cfg, &net).unwrap());
        }
        assert_eq!(runs[0].theta_final, runs[1].theta_final);
        assert_eq!(runs[0].theta_final, runs[2].theta_final);
        assert_eq!(runs[0].r, runs[2].r);
    }

    #[test]
    fn none_mode_requires_alpha_zero() {
        let net = generate(&NetworkSpec::complete(10)).unwrap();
        let cfg = SimConfig {
            attention: AttentionMode::None,
            alpha: 0.3,
            ..SimConfig::default()
        };
        assert!(simulate(&cfg, &net).is_err());
    }

    #[test]
    fn strong_coupling_synchronises_complete_graph() {
        let net = generate(&NetworkSpec::complete(500)).unwrap();
        let cfg = SimConfig {
            lambda: 5.0,
            noise: 0.5,
            t_end: 200.0,
            seed: 1,
            sample_stride: 20,
            ..SimConfig::default()
        };
        let out = simulate(&cfg, &net).unwrap();
        assert!(out.r_tail > 0.8, "tail R = {}", out.r_tail);
    }

    #[test]
    fn zero_coupling_stays_incoherent() {
        let net = generate(&NetworkSpec::complete(1000)).unwrap();
        let cfg = SimConfig {
            lambda: 0.0,
            t_end: 100.0,
            seed: 3,
            sample_stride: 50,
            ..SimConfig::default()
        };
        let out = simulate(&cfg, &net).unwrap();
        // Noise floor scale is sqrt(pi / (4 N)) ~ 0.028; stay within a few
        // multiples of it.
        assert!(out.r_tail < 0.085, "tail R = {}", out.r_tail);
    }

    #[test]
    fn attention_states_stay_bounded() {
        let net = generate(&NetworkSpec::watts_strogatz(24, 4, 0.2, 7)).unwrap();
        let cfg = SimConfig {
            lambda: 2.0,
            alpha: 0.6,
            beta: 1.0,
            t_end: 50.0,
            seed: 11,
            ..SimConfig::default()
        };
        let mut state = EnsembleState::init(&cfg, &net).unwrap();
        let mut noise = crate::rng::substream(cfg.seed, STREAM_NOISE);
        let bound = 1.0 + 5.0 * cfg.dt;
        for _ in 0..1000 {
            step(&mut state, &cfg, &net, &mut noise).unwrap();
            for m in &state.m {
                assert!(m.norm() <= bound, "|M| = {} exceeds {bound}", m.norm());
            }
        }
    }

    #[test]
    fn zero_pull_reduces_to_plain_model() {
        let net = generate(&NetworkSpec::erdos_renyi(25, 0.3, 4)).unwrap();
        let sim = SimConfig { t_end: 8.0, seed: 17, ..SimConfig::default() };
        let plain = simulate(&sim, &net).unwrap();
        let opinion = simulate_opinion(
            &OpinionConfig {
                sim: sim.clone(),
                pull: PullStrength::Uniform(0.0),
                anchors: AnchorSpec::Random,
            },
            &net,
        )
        .unwrap();
        assert_eq!(plain.r, opinion.r);
        assert_eq!(plain.theta_final, opinion.theta_final);
    }

    #[test]
    fn strong_pull_wins_over_coupling() {
        // With a strong pull every phase parks at its own random anchor, so
        // the population stays incoherent even with coupling switched on.
        let net = generate(&NetworkSpec::complete(400)).unwrap();
        let sim = SimConfig {
            lambda: 1.0,
            noise: 0.05,
            t_end: 60.0,
            seed: 5,
            sample_stride: 10,
            ..SimConfig::default()
        };
        let out = simulate_opinion(
            &OpinionConfig {
                sim,
                pull: PullStrength::Uniform(20.0),
                anchors: AnchorSpec::Random,
            },
            &net,
        )
        .unwrap();
        assert!(out.r_tail < 0.15, "tail R = {}", out.r_tail);
    }

    #[test]
    fn stuart_landau_limit_cycle() {
        // Uncoupled, noiseless, a = b = 1: the amplitude relaxes to 1 and
        // the phase advances at omega.
        let net = generate(&NetworkSpec::complete(4)).unwrap();
        let cfg = SlConfig {
            omega: 2.0,
            lambda: 0.0,
            dt: 1e-3,
            t_end: 20.0,
            z_init: ZInit::Const { re: 0.1, im: 0.0 },
            sample_stride: 100,
            ..SlConfig::default()
        };
        let out = simulate_stuart_landau(&cfg, &net).unwrap();
        let amp = out.mean_amplitude.as_ref().unwrap();
        assert_relative_eq!(*amp.last().unwrap(), 1.0, max_relative = 5e-3);
        // Phase advance omega * t_end modulo 2 pi, common to every node.
        let expected = (2.0 * 20.0_f64).rem_euclid(TAU);
        let got = out.theta_final[0].rem_euclid(TAU);
        let diff = (got - expected + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI;
        assert!(diff.abs() < 0.05, "phase error {diff}");
        // All oscillators identical by symmetry.
        assert_relative_eq!(out.r_tail, 1.0, max_relative = 1e-9);
    }

    #[test]
    fn stuart_landau_coupling_synchronises() {
        let net = generate(&NetworkSpec::complete(50)).unwrap();
        let cfg = SlConfig {
            omega: 0.5,
            lambda: 2.0,
            sigma: 0.01,
            dt: 0.01,
            t_end: 100.0,
            seed: 8,
            sample_stride: 50,
            ..SlConfig::default()
        };
        let out = simulate_stuart_landau(&cfg, &net).unwrap();
        assert!(out.r_tail > 0.9, "tail R = {}", out.r_tail);
    }

    #[test]
    fn tabulated_frequencies_are_centred() {
        let dist = FrequencyDist::tabulated(vec![1.0, 2.0, 3.0]).unwrap();
        let vals = sample_frequencies(&dist, 3, 0).unwrap();
        assert_relative_eq!(vals.iter().sum::<f64>(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(vals[2] - vals[0], 2.0, max_relative = 1e-15);
        // Length mismatch is an error.
        assert!(sample_frequencies(&dist, 4, 0).is_err());
    }

    #[test]
    fn normal_frequencies_match_variance() {
        let dist = FrequencyDist::Normal { variance: 0.25 };
        let vals = sample_frequencies(&dist, 20000, 123).unwrap();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 0.25).abs() < 0.02, "variance {var}");
    }
}
