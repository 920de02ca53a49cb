//! Discrete query/key attention over phase histories and its continuum
//! exponential-kernel limit.
//!
//! A stored trajectory is a matrix of unit-modulus states Theta with rows
//! indexed by time and columns by oscillator. With real projection matrices
//! W_Q and W_K (one row per oscillator, `d` feature columns) the attention
//! scores between two stored rows s and t are
//!
//! ```text
//! U[s][t] = | sum_f Q[s][f] conj(K[t][f]) | / sqrt(d),   Q = Theta W_Q,
//!                                                        K = Theta W_K,
//! ```
//!
//! and each row of U is normalised by a softmax into a stochastic kernel C.
//! The attended summary of the history is the kernel-weighted combination of
//! past rows; the value projection is the identity, so the summary lives in
//! the same space as the states themselves.
//!
//! In the continuum limit, softmax attention with scores that grow linearly
//! in the stored time reduces to an exponential kernel: the weight of the
//! sample at time t_k is softmax(beta (t_k - t_T)). The same kernel is what
//! the online attention state of the dynamics integrates, which is checked
//! against [`exponential_reconstruction`].

use num_complex::Complex64;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Tolerance for the unit-modulus check on stored states.
const UNIT_TOL: f64 = 1e-12;

/// RNG stream used when drawing random projection matrices.
const STREAM_PROJECTIONS: u64 = 200;

/// A stored trajectory of unit-modulus oscillator states.
///
/// Rows are time samples (oldest first), columns are oscillators.
#[derive(Debug, Clone)]
pub struct PhaseHistory {
    rows: Vec<Vec<Complex64>>,
    n: usize,
}

impl PhaseHistory {
    /// Build a history from phase angles; states are `exp(i theta)`.
    pub fn from_angles(theta: &[Vec<f64>]) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidParameter("history needs at least one row".into()));
        }
        let n = theta[0].len();
        let rows = theta
            .iter()
            .map(|row| {
                if row.len() != n {
                    return Err(Error::DimensionMismatch {
                        context: "phase history row",
                        expected: n,
                        got: row.len(),
                    });
                }
                Ok(row.iter().map(|&t| Complex64::from_polar(1.0, t)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PhaseHistory { rows, n })
    }

    /// Build a history from complex states, enforcing unit modulus.
    pub fn from_states(states: Vec<Vec<Complex64>>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("history needs at least one row".into()));
        }
        let n = states[0].len();
        for (s, row) in states.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    context: "phase history row",
                    expected: n,
                    got: row.len(),
                });
            }
            for (i, z) in row.iter().enumerate() {
                if (z.norm() - 1.0).abs() > UNIT_TOL {
                    return Err(Error::InvalidParameter(format!(
                        "state at row {s}, column {i} has modulus {} (must be 1 within {UNIT_TOL:e})",
                        z.norm()
                    )));
                }
            }
        }
        Ok(PhaseHistory { rows: states, n })
    }

    /// Number of stored time samples.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Number of oscillators.
    pub fn width(&self) -> usize {
        self.n
    }

    pub fn row(&self, t: usize) -> &[Complex64] {
        &self.rows[t]
    }
}

/// Real query/key projections: one row per oscillator, `d` feature columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttentionParams {
    pub d: usize,
    pub wq: Vec<Vec<f64>>,
    pub wk: Vec<Vec<f64>>,
}

impl AttentionParams {
    pub fn new(wq: Vec<Vec<f64>>, wk: Vec<Vec<f64>>) -> Result<Self> {
        if wq.is_empty() || wq[0].is_empty() {
            return Err(Error::InvalidParameter("projection matrices must be non-empty".into()));
        }
        let d = wq[0].len();
        if wk.len() != wq.len() {
            return Err(Error::DimensionMismatch {
                context: "W_K rows",
                expected: wq.len(),
                got: wk.len(),
            });
        }
        for row in wq.iter().chain(wk.iter()) {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    context: "projection feature columns",
                    expected: d,
                    got: row.len(),
                });
            }
        }
        Ok(AttentionParams { d, wq, wk })
    }

    /// Standard-normal random projections for `n` oscillators and `d`
    /// features; handy for demos and smoke tests.
    pub fn random(n: usize, d: usize, seed: u64) -> Self {
        let mut rng = rng::substream(seed, STREAM_PROJECTIONS);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let mut draw = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
            (0..rows)
                .map(|_| (0..cols).map(|_| normal.sample(&mut rng)).collect())
                .collect()
        };
        AttentionParams { d, wq: draw(n, d), wk: draw(n, d) }
    }
}

/// Result of running attention over a stored history.
#[derive(Debug, Clone)]
pub struct AttentionOutput {
    /// Kernel row of the latest time sample (sums to one).
    pub kernel_row: Vec<f64>,
    /// Kernel-weighted combination of past states, one entry per oscillator.
    pub m: Vec<Complex64>,
}

fn project(hist: &PhaseHistory, w: &[Vec<f64>], d: usize) -> Vec<Vec<Complex64>> {
    hist.rows
        .iter()
        .map(|row| {
            (0..d)
                .map(|f| row.iter().zip(w).map(|(z, wr)| z * wr[f]).sum())
                .collect()
        })
        .collect()
}

fn softmax_rows(scores: &mut [Vec<f64>]) {
    for row in scores.iter_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

/// The full row-stochastic attention kernel C over a stored history.
pub fn attention_matrix(hist: &PhaseHistory, params: &AttentionParams) -> Result<Vec<Vec<f64>>> {
    if params.wq.len() != hist.width() {
        return Err(Error::DimensionMismatch {
            context: "projection rows vs oscillators",
            expected: hist.width(),
            got: params.wq.len(),
        });
    }
    let q = project(hist, &params.wq, params.d);
    let k = project(hist, &params.wk, params.d);
    let scale = (params.d as f64).sqrt();
    let mut scores: Vec<Vec<f64>> = q
        .iter()
        .map(|qs| {
            k.iter()
                .map(|kt| {
                    let dot: Complex64 = qs.iter().zip(kt).map(|(a, b)| a * b.conj()).sum();
                    dot.norm() / scale
                })
                .collect()
        })
        .collect();
    softmax_rows(&mut scores);
    Ok(scores)
}

/// Run attention over a stored history and summarise it from the viewpoint
/// of the latest sample.
pub fn discrete_attention(hist: &PhaseHistory, params: &AttentionParams) -> Result<AttentionOutput> {
    let c = attention_matrix(hist, params)?;
    let kernel_row = c.last().expect("history is non-empty").clone();
    let mut m = vec![Complex64::new(0.0, 0.0); hist.width()];
    for (w, row) in kernel_row.iter().zip(&hist.rows) {
        for (mi, z) in m.iter_mut().zip(row) {
            *mi += w * z;
        }
    }
    Ok(AttentionOutput { kernel_row, m })
}

/// Normalised exponential kernel weights over sample times.
///
/// `times` must be strictly increasing; the weight of sample k is
/// `softmax_k(beta (t_k - t_last))`, i.e. recent samples dominate for large
/// `beta` and the weights flatten to uniform as `beta -> 0`.
pub fn exponential_kernel_weights(beta: f64, times: &[f64]) -> Result<Vec<f64>> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("need at least one sample time".into()));
    }
    if !(beta >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kernel rate must be non-negative, got {beta}"
        )));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
    }
    let last = *times.last().expect("non-empty");
    let mut w: Vec<f64> = times.iter().map(|&t| (beta * (t - last)).exp()).collect();
    let sum: f64 = w.iter().sum();
    for v in &mut w {
        *v /= sum;
    }
    Ok(w)
}

/// Exponential-kernel reconstruction of an attention state from a phase
/// trajectory: the exact solution of `dM/dt = beta (z(t) - M)`,
///
/// ```text
/// M(T) = exp(-beta (T - t_0)) M(t_0)
///        + beta * integral_{t_0}^{T} exp(beta (s - T)) z(s) ds,
/// ```
///
/// with the integral evaluated by the trapezoid rule on the sampled grid.
/// Used as an oracle against the stepped attention state of the dynamics.
pub fn exponential_reconstruction(
    beta: f64,
    times: &[f64],
    states: &[Complex64],
    m0: Complex64,
) -> Result<Complex64> {
    if times.len() != states.len() {
        return Err(Error::DimensionMismatch {
            context: "reconstruction samples",
            expected: times.len(),
            got: states.len(),
        });
    }
    if times.len() < 2 {
        return Err(Error::InvalidParameter("need at least two samples to integrate".into()));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sample times must be strictly increasing".into()));
    }
    let t_end = *times.last().expect("non-empty");
    let t0 = times[0];
    let mut integral = Complex64::new(0.0, 0.0);
    for k in 0..times.len() - 1 {
        let h = times[k + 1] - times[k];
        let f0 = (beta * (times[k] - t_end)).exp() * states[k];
        let f1 = (beta * (times[k + 1] - t_end)).exp() * states[k + 1];
        integral += 0.5 * h * (f0 + f1);
    }
    Ok((-beta * (t_end - t0)).exp() * m0 + beta * integral)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn two_step_worked_example() {
        // Theta = [[1, 1], [i, 1]], W_Q = W_K = [1, 0]^T, d = 1.
        // Scores are all unit modulus, so the kernel row is uniform and the
        // summary is the plain average of the two stored rows.
        let hist = PhaseHistory::from_states(vec![
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let params = AttentionParams::new(vec![vec![1.0], vec![0.0]], vec![vec![1.0], vec![0.0]]).unwrap();
        let out = discrete_attention(&hist, &params).unwrap();
        assert_relative_eq!(out.kernel_row[0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(out.kernel_row[1], 0.5, max_relative = 1e-14);
        assert_relative_eq!(out.m[0].re, 0.5, max_relative = 1e-14);
        assert_relative_eq!(out.m[0].im, 0.5, max_relative = 1e-14);
        assert_relative_eq!(out.m[1].re, 1.0, max_relative = 1e-14);
        assert!(out.m[1].im.abs() < 1e-15);
    }

    #[test]
    fn kernel_rows_are_stochastic() {
        let theta: Vec<Vec<f64>> = (0..6)
            .map(|t| (0..4).map(|i| 0.3 * t as f64 + 0.7 * i as f64).collect())
            .collect();
        let hist = PhaseHistory::from_angles(&theta).unwrap();
        let params = AttentionParams::random(4, 3, 11);
        let c = attention_matrix(&hist, &params).unwrap();
        for row in &c {
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10, "row sums to {sum}");
            assert!(row.iter().all(|&w| w >= 0.0));
        }
    }

    #[test]
    fn single_oscillator_projection_is_uniform() {
        // With W_Q = W_K = e_0 and unit-modulus states, every score is
        // |Theta[s][0]| * |Theta[t][0]| = 1, so attention degenerates to
        // the uniform kernel no matter what the history did.
        let theta: Vec<Vec<f64>> = (0..5)
            .map(|t| vec![1.3 * t as f64, -0.4 * t as f64, 2.2])
            .collect();
        let hist = PhaseHistory::from_angles(&theta).unwrap();
        let e0 = vec![vec![1.0], vec![0.0], vec![0.0]];
        let params = AttentionParams::new(e0.clone(), e0).unwrap();
        let out = discrete_attention(&hist, &params).unwrap();
        for &w in &out.kernel_row {
            assert_relative_eq!(w, 0.2, max_relative = 1e-12);
        }
    }

    #[test]
    fn non_unit_state_rejected() {
        let err = PhaseHistory::from_states(vec![vec![c(0.9, 0.0)]]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn exponential_weights_normalise_and_order() {
        let times: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
        let w = exponential_kernel_weights(2.0, &times).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        // Monotone: later samples carry more weight.
        assert!(w.windows(2).all(|p| p[1] > p[0]));
        // beta = 0 flattens to uniform.
        let u = exponential_kernel_weights(0.0, &times).unwrap();
        for &v in &u {
            assert_relative_eq!(v, 0.02, max_relative = 1e-12);
        }
    }

    #[test]
    fn exponential_weights_reject_unsorted_times() {
        assert!(exponential_kernel_weights(1.0, &[0.0, 0.2, 0.2]).is_err());
        assert!(exponential_kernel_weights(1.0, &[]).is_err());
    }

    #[test]
    fn reconstruction_matches_constant_state() {
        // z(t) = 1 for all t: M(T) -> 1 - exp(-beta T) (1 - M(0)).
        let times: Vec<f64> = (0..=1000).map(|k| 1e-3 * k as f64).collect();
        let states = vec![c(1.0, 0.0); times.len()];
        let m = exponential_reconstruction(3.0, &times, &states, c(0.0, 0.0)).unwrap();
        let exact = 1.0 - (-3.0f64).exp();
        assert_relative_eq!(m.re, exact, max_relative = 1e-5);
        assert!(m.im.abs() < 1e-12);
    }
}
