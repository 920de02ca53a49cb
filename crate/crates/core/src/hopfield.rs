//! Associative memory on oscillators: Hebbian couplings, attention-assisted
//! retrieval, stability maps, and masked-pattern recovery.
//!
//! Binary patterns `eta in {-1, +1}^N` are written into two Hebbian
//! matrices: the spatial coupling `C` from the `p` originally stored
//! patterns and the attention coupling `C_hat` from `q` later ones. Phases
//! evolve under the deterministic field
//!
//! ```text
//! dtheta_i/dt = Im[ I_i e^{-i theta_i} ] + eps Im[ Rhat e^{-2 i theta_i} ],
//!
//! I_i = (1 - alpha) sum_j C_ij e^{i theta_j} + alpha sum_j Chat_ij M_j,
//! dM_i/dt = beta ( e^{i theta_i} - M_i ),
//! ```
//!
//! where the second-order field `Rhat` sharpens phases toward the binary
//! axis {0, pi}. By default `Rhat` is the complex second-harmonic mean
//! `N^{-1} sum_j e^{2 i theta_j}`, for which the `alpha = 0` limit reduces
//! exactly to the classical second-harmonic associative network
//! `(eps/N) sum_j sin 2(theta_j - theta_i)`; a modulus variant (`|Rhat|`)
//! is available behind [`SecondOrderField::Modulus`]. With the modulus the
//! classical reduction does not hold — the term becomes a pure
//! `-eps |Rhat| sin 2 theta_i` pinning field — so the complex mean is the
//! default.
//!
//! Every binary configuration `theta_i in {0, pi}`, `M_i = e^{i theta_i}`
//! is an equilibrium of the full field. Retrieval quality is governed by
//! the spectrum of the Jacobian of the augmented state
//! `(theta, Re M, Im M)` — dimension `3N` — which is assembled analytically
//! and validated against finite differences. The global phase shift
//! contributes one exact zero eigenvalue (null vector `(1, -Im M, Re M)`),
//! which stability queries exclude.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{self, STREAM_PHASES};

pub mod glyphs;

use nalgebra::DMatrix;

/// Time step of the recovery integrator (classical fourth-order
/// Runge–Kutta on the deterministic field).
pub const RECOVER_DT: f64 = 0.05;

/// A binary pattern with entries exactly +-1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    eta: Vec<i8>,
}

impl Pattern {
    pub fn new(eta: Vec<i8>) -> Result<Self> {
        if eta.is_empty() {
            return Err(Error::InvalidParameter("pattern must be non-empty".into()));
        }
        if let Some(pos) = eta.iter().position(|&e| e != 1 && e != -1) {
            return Err(Error::InvalidParameter(format!(
                "pattern entry {pos} is {}; entries must be exactly +1 or -1",
                eta[pos]
            )));
        }
        Ok(Pattern { eta })
    }

    /// Parse a bitmap: lines of `#` (ink, +1) and `.` (blank, -1), all of
    /// equal width.
    pub fn from_bitmap(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text.lines().map(str::trim_end).filter(|l| !l.is_empty()).collect();
        if lines.is_empty() {
            return Err(Error::InvalidParameter("bitmap has no rows".into()));
        }
        let width = lines[0].chars().count();
        let mut eta = Vec::with_capacity(lines.len() * width);
        for (r, line) in lines.iter().enumerate() {
            if line.chars().count() != width {
                return Err(Error::InvalidParameter(format!(
                    "bitmap row {} has width {}, expected {width}",
                    r + 1,
                    line.chars().count()
                )));
            }
            for (c, ch) in line.chars().enumerate() {
                match ch {
                    '#' => eta.push(1),
                    '.' => eta.push(-1),
                    other => {
                        return Err(Error::InvalidParameter(format!(
                            "bitmap row {}, column {}: unexpected character {other:?}",
                            r + 1,
                            c + 1
                        )))
                    }
                }
            }
        }
        Pattern::new(eta)
    }

    /// Render as a bitmap with the given row width.
    pub fn render(&self, width: usize) -> String {
        let mut out = String::new();
        for (i, &e) in self.eta.iter().enumerate() {
            out.push(if e > 0 { '#' } else { '.' });
            if (i + 1) % width == 0 {
                out.push('\n');
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn entries(&self) -> &[i8] {
        &self.eta
    }

    /// The phase configuration encoding this pattern:
    /// `theta_i = (1 - eta_i) pi / 2` (0 for +1, pi for -1).
    pub fn phases(&self) -> Vec<f64> {
        self.eta
            .iter()
            .map(|&e| (1.0 - e as f64) * std::f64::consts::FRAC_PI_2)
            .collect()
    }

    /// Normalised absolute overlap `|sum eta_a eta_b| / N` between two
    /// patterns of equal length.
    pub fn overlap(&self, other: &Pattern) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                context: "pattern overlap",
                expected: self.len(),
                got: other.len(),
            });
        }
        let dot: i64 = self
            .eta
            .iter()
            .zip(&other.eta)
            .map(|(&a, &b)| a as i64 * b as i64)
            .sum();
        Ok((dot.abs() as f64) / self.len() as f64)
    }
}

/// Hebbian coupling matrix `(1/N) sum_mu eta_i eta_j` over a pattern set.
/// Symmetric; the diagonal is `p / N` for `p` patterns.
pub fn hebbian_matrix(patterns: &[Pattern]) -> Result<DMatrix<f64>> {
    let first = patterns
        .first()
        .ok_or_else(|| Error::InvalidParameter("need at least one pattern".into()))?;
    let n = first.len();
    for p in patterns {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                context: "pattern lengths",
                expected: n,
                got: p.len(),
            });
        }
    }
    let mut c = DMatrix::zeros(n, n);
    for p in patterns {
        for i in 0..n {
            let ei = p.eta[i] as f64;
            for j in 0..n {
                c[(i, j)] += ei * p.eta[j] as f64;
            }
        }
    }
    c /= n as f64;
    Ok(c)
}

/// Choice of the second-order (phase-sharpening) field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecondOrderField {
    /// Complex second-harmonic mean `N^{-1} sum_j e^{2 i theta_j}` inside
    /// `Im[. e^{-2 i theta_i}]` (default; reduces to the classical
    /// associative network at `alpha = 0`).
    ComplexMean,
    /// Its modulus: the term becomes `-eps |Rhat| sin 2 theta_i`.
    Modulus,
}

/// Couplings and parameters of the associative-memory network.
#[derive(Debug, Clone)]
pub struct HnnConfig {
    n: usize,
    c: DMatrix<f64>,
    c_hat: DMatrix<f64>,
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub second_order: SecondOrderField,
}

impl HnnConfig {
    /// Build from stored pattern sets: `old` writes the spatial coupling,
    /// `new` (possibly empty) writes the attention coupling.
    pub fn from_patterns(
        old: &[Pattern],
        new: &[Pattern],
        eps: f64,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        let c = hebbian_matrix(old)?;
        let n = c.nrows();
        let c_hat = if new.is_empty() {
            DMatrix::zeros(n, n)
        } else {
            let m = hebbian_matrix(new)?;
            if m.nrows() != n {
                return Err(Error::DimensionMismatch {
                    context: "old vs new pattern lengths",
                    expected: n,
                    got: m.nrows(),
                });
            }
            m
        };
        Self::from_couplings(c, c_hat, eps, alpha, beta)
    }

    /// Build from explicit coupling matrices (must be square and of equal
    /// size).
    pub fn from_couplings(
        c: DMatrix<f64>,
        c_hat: DMatrix<f64>,
        eps: f64,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        let n = c.nrows();
        if c.ncols() != n || c_hat.nrows() != n || c_hat.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "coupling matrices",
                expected: n,
                got: c_hat.nrows().max(c.ncols()),
            });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "attention weight must lie in [0, 1], got {alpha}"
            )));
        }
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "attention rate must be positive, got {beta}"
            )));
        }
        if !eps.is_finite() || eps < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "second-order strength must be finite and non-negative, got {eps}"
            )));
        }
        Ok(HnnConfig { n, c, c_hat, eps, alpha, beta, second_order: SecondOrderField::ComplexMean })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spatial_coupling(&self) -> &DMatrix<f64> {
        &self.c
    }

    pub fn attention_coupling(&self) -> &DMatrix<f64> {
        &self.c_hat
    }

    pub fn with_second_order(mut self, field: SecondOrderField) -> Self {
        self.second_order = field;
        self
    }

    fn with_eps_alpha(&self, eps: f64, alpha: f64) -> Self {
        let mut c = self.clone();
        c.eps = eps;
        c.alpha = alpha;
        c
    }
}

fn check_dims(cfg: &HnnConfig, theta: &[f64], m: &[Complex64]) -> Result<()> {
    if theta.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            context: "phase vector",
            expected: cfg.n,
            got: theta.len(),
        });
    }
    if m.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            context: "attention vector",
            expected: cfg.n,
            got: m.len(),
        });
    }
    Ok(())
}

/// Time derivatives `(dtheta/dt, dM/dt)` of the associative-memory field.
pub fn hnn_vector_field(
    theta: &[f64],
    m: &[Complex64],
    cfg: &HnnConfig,
) -> Result<(Vec<f64>, Vec<Complex64>)> {
    check_dims(cfg, theta, m)?;
    let n = cfg.n;
    let z: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    let rho: Complex64 = theta
        .iter()
        .map(|&t| Complex64::from_polar(1.0, 2.0 * t))
        .sum::<Complex64>()
        / n as f64;

    let mut dtheta = vec![0.0; n];
    for i in 0..n {
        let mut field = Complex64::new(0.0, 0.0);
        for j in 0..n {
            field += (1.0 - cfg.alpha) * cfg.c[(i, j)] * z[j] + cfg.alpha * cfg.c_hat[(i, j)] * m[j];
        }
        let first = (field * z[i].conj()).im;
        let e2 = Complex64::from_polar(1.0, -2.0 * theta[i]);
        let second = match cfg.second_order {
            SecondOrderField::ComplexMean => (rho * e2).im,
            SecondOrderField::Modulus => (rho.norm() * e2).im,
        };
        dtheta[i] = first + cfg.eps * second;
    }
    let dm: Vec<Complex64> = m.iter().zip(&z).map(|(mi, zi)| cfg.beta * (zi - mi)).collect();
    Ok((dtheta, dm))
}

/// Analytic Jacobian of the augmented field at an arbitrary state, in the
/// coordinates `(theta_1..theta_N, Re M_1..Re M_N, Im M_1..Im M_N)`.
pub fn hnn_jacobian(theta: &[f64], m: &[Complex64], cfg: &HnnConfig) -> Result<DMatrix<f64>> {
    check_dims(cfg, theta, m)?;
    let n = cfg.n;
    let mut j = DMatrix::zeros(3 * n, 3 * n);
    let cos: Vec<f64> = theta.iter().map(|&t| t.cos()).collect();
    let sin: Vec<f64> = theta.iter().map(|&t| t.sin()).collect();
    let one_minus_a = 1.0 - cfg.alpha;

    // Second-order helpers.
    let rho: Complex64 = theta
        .iter()
        .map(|&t| Complex64::from_polar(1.0, 2.0 * t))
        .sum::<Complex64>()
        / n as f64;
    if cfg.second_order == SecondOrderField::Modulus && rho.norm() < 1e-12 {
        return Err(Error::Singular {
            context: "modulus second-order field",
            detail: "second-harmonic mean vanishes; |Rhat| not differentiable".into(),
        });
    }

    for i in 0..n {
        // d(dtheta_i)/d(theta_k), k != i, plus the diagonal accumulated as
        // the negative row sum of the pairwise part.
        let mut diag = 0.0;
        for k in 0..n {
            if k == i {
                continue;
            }
            let d = theta[k] - theta[i];
            let mut a = one_minus_a * cfg.c[(i, k)] * d.cos();
            if cfg.second_order == SecondOrderField::ComplexMean {
                a += 2.0 * cfg.eps / n as f64 * (2.0 * d).cos();
            }
            j[(i, k)] = a;
            diag -= a;
        }
        // Attention contribution to the diagonal: the field term
        // alpha sum_k Chat_ik (v_k cos - u_k sin) differentiated in theta_i.
        let mut att = 0.0;
        for k in 0..n {
            att += cfg.c_hat[(i, k)] * (-m[k].im * sin[i] - m[k].re * cos[i]);
        }
        diag += cfg.alpha * att;

        if cfg.second_order == SecondOrderField::Modulus {
            // term = -eps |rho| sin(2 theta_i):
            // d/d theta_k |rho| = -(2/N) Im[e^{2 i theta_k} conj(rho)]/|rho|.
            let norm = rho.norm();
            for k in 0..n {
                let dnorm = -(2.0 / n as f64)
                    * (Complex64::from_polar(1.0, 2.0 * theta[k]) * rho.conj()).im
                    / norm;
                let term = -cfg.eps * dnorm * (2.0 * theta[i]).sin();
                if k == i {
                    diag += term - 2.0 * cfg.eps * norm * (2.0 * theta[i]).cos();
                } else {
                    j[(i, k)] += term;
                }
            }
        }
        j[(i, i)] = diag;

        // d(dtheta_i)/d(u_k) and /d(v_k).
        for k in 0..n {
            j[(i, n + k)] = -cfg.alpha * cfg.c_hat[(i, k)] * sin[i];
            j[(i, 2 * n + k)] = cfg.alpha * cfg.c_hat[(i, k)] * cos[i];
        }

        // du_i/dt = beta (cos theta_i - u_i); dv_i/dt = beta (sin theta_i - v_i).
        j[(n + i, i)] = -cfg.beta * sin[i];
        j[(n + i, n + i)] = -cfg.beta;
        j[(2 * n + i, i)] = cfg.beta * cos[i];
        j[(2 * n + i, 2 * n + i)] = -cfg.beta;
    }
    Ok(j)
}

/// Jacobian at a pattern's phase-locked equilibrium
/// (`theta_i = (1 - eta_i) pi/2`, `M_i = eta_i`).
pub fn jacobian_at_pattern(cfg: &HnnConfig, pattern: &Pattern) -> Result<DMatrix<f64>> {
    if pattern.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            context: "pattern vs couplings",
            expected: cfg.n,
            got: pattern.len(),
        });
    }
    let theta = pattern.phases();
    let m: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
    hnn_jacobian(&theta, &m, cfg)
}

/// Central finite-difference Jacobian of the augmented field (validation
/// utility for the analytic one).
pub fn finite_difference_jacobian(
    theta: &[f64],
    m: &[Complex64],
    cfg: &HnnConfig,
    step: f64,
) -> Result<DMatrix<f64>> {
    check_dims(cfg, theta, m)?;
    let n = cfg.n;
    let pack = |theta: &[f64], m: &[Complex64]| -> Vec<f64> {
        let mut x = Vec::with_capacity(3 * n);
        x.extend_from_slice(theta);
        x.extend(m.iter().map(|v| v.re));
        x.extend(m.iter().map(|v| v.im));
        x
    };
    let eval = |x: &[f64]| -> Result<Vec<f64>> {
        let theta = &x[0..n];
        let m: Vec<Complex64> = (0..n).map(|i| Complex64::new(x[n + i], x[2 * n + i])).collect();
        let (dt, dm) = hnn_vector_field(theta, &m, cfg)?;
        let mut out = Vec::with_capacity(3 * n);
        out.extend(dt);
        out.extend(dm.iter().map(|v| v.re));
        out.extend(dm.iter().map(|v| v.im));
        Ok(out)
    };
    let x0 = pack(theta, m);
    let mut j = DMatrix::zeros(3 * n, 3 * n);
    for col in 0..3 * n {
        let mut xp = x0.clone();
        let mut xm = x0.clone();
        xp[col] += step;
        xm[col] -= step;
        let fp = eval(&xp)?;
        let fm = eval(&xm)?;
        for row in 0..3 * n {
            j[(row, col)] = (fp[row] - fm[row]) / (2.0 * step);
        }
    }
    Ok(j)
}

/// Full eigenvalue spectrum of a real square matrix (order unspecified).
pub fn spectrum(j: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    if j.nrows() != j.ncols() {
        return Err(Error::DimensionMismatch {
            context: "eigenvalue input",
            expected: j.nrows(),
            got: j.ncols(),
        });
    }
    let a = faer::Mat::from_fn(j.nrows(), j.ncols(), |r, c| j[(r, c)]);
    a.eigenvalues()
        .map_err(|_| Error::NonConvergent("eigenvalue decomposition did not converge".into()))
}

/// Rightmost eigenvalue of a real square matrix after excluding the single
/// global-phase zero mode (the unique eigenvalue of modulus below 1e-8).
///
/// More than one near-zero eigenvalue is reported as ambiguous rather than
/// silently guessed; no near-zero eigenvalue simply means nothing is
/// excluded.
pub fn leading_eigenvalue(j: &DMatrix<f64>) -> Result<Complex64> {
    const ZERO_TOL: f64 = 1e-8;
    let eigs = spectrum(j)?;
    let near_zero: Vec<usize> = (0..eigs.len()).filter(|&i| eigs[i].norm() < ZERO_TOL).collect();
    if near_zero.len() > 1 {
        return Err(Error::AmbiguousZeroMode { count: near_zero.len(), tol: ZERO_TOL });
    }
    let skip = near_zero.first().copied();
    let mut best: Option<Complex64> = None;
    for (i, &e) in eigs.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        best = Some(match best {
            None => e,
            Some(b) if e.re > b.re || (e.re == b.re && e.im > b.im) => e,
            Some(b) => b,
        });
    }
    best.ok_or_else(|| Error::InvalidParameter("matrix has no eigenvalues beyond the zero mode".into()))
}

/// Stability landscape of one pattern over a parameter grid.
#[derive(Debug, Clone)]
pub struct StabilityMap {
    pub eps: Vec<f64>,
    pub alpha: Vec<f64>,
    /// `re[i][j]` = leading-eigenvalue real part at `(eps[i], alpha[j])`.
    pub re: Vec<Vec<f64>>,
    /// Zero-level boundary segments in `(eps, alpha)` coordinates from
    /// per-cell linear interpolation.
    pub contour: Vec<((f64, f64), (f64, f64))>,
}

/// Evaluate the leading-eigenvalue real part of `pattern` over an
/// `eps x alpha` grid. Cells are independent and evaluated in parallel;
/// results are merged in grid order.
pub fn stability_map(
    cfg: &HnnConfig,
    pattern: &Pattern,
    eps_grid: &[f64],
    alpha_grid: &[f64],
) -> Result<StabilityMap> {
    if eps_grid.is_empty() || alpha_grid.is_empty() {
        return Err(Error::InvalidParameter("stability map needs non-empty grids".into()));
    }
    if eps_grid.windows(2).any(|w| w[1] <= w[0]) || alpha_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("stability grids must be strictly increasing".into()));
    }
    let cells: Vec<(usize, usize)> = (0..eps_grid.len())
        .flat_map(|i| (0..alpha_grid.len()).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = cells
        .into_par_iter()
        .map(|(i, j)| {
            let local = cfg.with_eps_alpha(eps_grid[i], alpha_grid[j]);
            let jac = jacobian_at_pattern(&local, pattern)?;
            Ok(leading_eigenvalue(&jac)?.re)
        })
        .collect::<Result<_>>()?;
    let re: Vec<Vec<f64>> = values.chunks(alpha_grid.len()).map(|c| c.to_vec()).collect();

    // Zero contour: linear interpolation along cell edges with a sign
    // change, joined pairwise inside each cell.
    let mut contour = Vec::new();
    let interp = |a: f64, b: f64, va: f64, vb: f64| a + (0.0 - va) * (b - a) / (vb - va);
    for i in 0..eps_grid.len().saturating_sub(1) {
        for j in 0..alpha_grid.len().saturating_sub(1) {
            let (e0, e1) = (eps_grid[i], eps_grid[i + 1]);
            let (a0, a1) = (alpha_grid[j], alpha_grid[j + 1]);
            let v00 = re[i][j];
            let v10 = re[i + 1][j];
            let v01 = re[i][j + 1];
            let v11 = re[i + 1][j + 1];
            let mut pts = Vec::new();
            if (v00 < 0.0) != (v10 < 0.0) {
                pts.push((interp(e0, e1, v00, v10), a0));
            }
            if (v01 < 0.0) != (v11 < 0.0) {
                pts.push((interp(e0, e1, v01, v11), a1));
            }
            if (v00 < 0.0) != (v01 < 0.0) {
                pts.push((e0, interp(a0, a1, v00, v01)));
            }
            if (v10 < 0.0) != (v11 < 0.0) {
                pts.push((e1, interp(a0, a1, v10, v11)));
            }
            let mut it = pts.chunks_exact(2);
            for pair in &mut it {
                contour.push((pair[0], pair[1]));
            }
        }
    }
    Ok(StabilityMap { eps: eps_grid.to_vec(), alpha: alpha_grid.to_vec(), re, contour })
}

/// Recover a pattern from a masked initial condition.
///
/// Unmasked sites start at the target's phase; masked sites start at
/// independent uniform angles drawn from `seed`. The deterministic field is
/// integrated for `steps` Runge–Kutta steps of size [`RECOVER_DT`]. Because
/// the model is invariant under a global phase shift, decoding first
/// estimates the drifted reference frame from the unmasked sites
/// (`psi_ref = arg sum_unmasked e^{i (theta_i - target_i)}`), then reads
/// each site as `sign cos(theta_i - psi_ref)`. The returned overlap is
/// `| N^{-1} sum_i eta_i e^{i (theta_i - psi_ref)} |`.
pub fn recover(
    cfg: &HnnConfig,
    target: &Pattern,
    mask: &[bool],
    steps: usize,
    seed: u64,
) -> Result<(Pattern, f64)> {
    if target.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            context: "target vs couplings",
            expected: cfg.n,
            got: target.len(),
        });
    }
    if mask.len() != cfg.n {
        return Err(Error::DimensionMismatch {
            context: "mask vs pattern",
            expected: cfg.n,
            got: mask.len(),
        });
    }
    if mask.iter().all(|&b| b) {
        return Err(Error::AllMasked);
    }
    if steps == 0 {
        return Err(Error::InvalidParameter("recovery needs at least one step".into()));
    }

    let n = cfg.n;
    let targets = target.phases();
    let mut rng = rng::substream(seed, STREAM_PHASES);
    let mut theta: Vec<f64> = (0..n)
        .map(|i| {
            if mask[i] {
                rand::Rng::random_range(&mut rng, 0.0..std::f64::consts::TAU)
            } else {
                targets[i]
            }
        })
        .collect();
    let mut m: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();

    // RK4 on the combined (theta, M) state.
    let stage = |theta: &[f64], m: &[Complex64]| hnn_vector_field(theta, m, cfg);
    let h = RECOVER_DT;
    for _ in 0..steps {
        let (k1t, k1m) = stage(&theta, &m)?;
        let t2: Vec<f64> = theta.iter().zip(&k1t).map(|(t, k)| t + 0.5 * h * k).collect();
        let m2: Vec<Complex64> = m.iter().zip(&k1m).map(|(v, k)| v + 0.5 * h * k).collect();
        let (k2t, k2m) = stage(&t2, &m2)?;
        let t3: Vec<f64> = theta.iter().zip(&k2t).map(|(t, k)| t + 0.5 * h * k).collect();
        let m3: Vec<Complex64> = m.iter().zip(&k2m).map(|(v, k)| v + 0.5 * h * k).collect();
        let (k3t, k3m) = stage(&t3, &m3)?;
        let t4: Vec<f64> = theta.iter().zip(&k3t).map(|(t, k)| t + h * k).collect();
        let m4: Vec<Complex64> = m.iter().zip(&k3m).map(|(v, k)| v + h * k).collect();
        let (k4t, k4m) = stage(&t4, &m4)?;
        for i in 0..n {
            theta[i] += h / 6.0 * (k1t[i] + 2.0 * k2t[i] + 2.0 * k3t[i] + k4t[i]);
            m[i] += h / 6.0 * (k1m[i] + 2.0 * k2m[i] + 2.0 * k3m[i] + k4m[i]);
        }
    }

    // Reference frame from the unmasked sites' drift relative to their
    // targets.
    let ref_sum: Complex64 = (0..n)
        .filter(|&i| !mask[i])
        .map(|i| Complex64::from_polar(1.0, theta[i] - targets[i]))
        .sum();
    let psi_ref = ref_sum.arg();

    let eta: Vec<i8> = theta
        .iter()
        .map(|&t| if (t - psi_ref).cos() >= 0.0 { 1 } else { -1 })
        .collect();
    let overlap = (0..n)
        .map(|i| {
            target.eta[i] as f64 * Complex64::from_polar(1.0, theta[i] - psi_ref)
        })
        .sum::<Complex64>()
        .norm()
        / n as f64;
    Ok((Pattern::new(eta)?, overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pat(entries: &[i8]) -> Pattern {
        Pattern::new(entries.to_vec()).unwrap()
    }

    fn letter(l: char) -> Pattern {
        glyphs::pattern(l).unwrap()
    }

    fn stored_config(eps: f64, alpha: f64, beta: f64) -> HnnConfig {
        HnnConfig::from_patterns(&glyphs::old_set(), &glyphs::new_set(), eps, alpha, beta).unwrap()
    }

    #[test]
    fn hebbian_examples() {
        // Single all-ones pattern on 4 nodes: every entry 1/4.
        let c = hebbian_matrix(&[pat(&[1, 1, 1, 1])]).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(c[(i, j)], 0.25);
            }
        }
        // Two patterns, orthogonal at sites 1-2.
        let c = hebbian_matrix(&[pat(&[1, 1, -1, -1]), pat(&[1, -1, 1, -1])]).unwrap();
        assert_eq!(c[(0, 1)], 0.0);
        for i in 0..4 {
            assert_eq!(c[(i, i)], 0.5); // p / N = 2 / 4
        }
        // Symmetry.
        assert_eq!(c[(2, 3)], c[(3, 2)]);
    }

    #[test]
    fn pattern_validation_and_bitmaps() {
        assert!(Pattern::new(vec![1, 0, -1]).is_err());
        let p = Pattern::from_bitmap("#.\n.#\n").unwrap();
        assert_eq!(p.entries(), &[1, -1, -1, 1]);
        assert_eq!(p.render(2), "#.\n.#\n");
        assert!(Pattern::from_bitmap("#.\n.x\n").is_err());
        assert!(Pattern::from_bitmap("#.\n.\n").is_err());
    }

    #[test]
    fn field_hand_example() {
        // One stored pattern (+, +) on two nodes gives C_12 = 1/2; at
        // theta = (0, pi/2) with eps = 0 the field is (1/2, -1/2).
        let cfg = HnnConfig::from_patterns(&[pat(&[1, 1])], &[], 0.0, 0.0, 1.0).unwrap();
        let theta = [0.0, std::f64::consts::FRAC_PI_2];
        let m: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let (dtheta, _) = hnn_vector_field(&theta, &m, &cfg).unwrap();
        assert_relative_eq!(dtheta[0], 0.5, max_relative = 1e-14);
        assert_relative_eq!(dtheta[1], -0.5, max_relative = 1e-14);
    }

    #[test]
    fn alpha_zero_matches_classical_second_harmonic() {
        // At alpha = 0 the field must equal the classical network
        // sum_j C_ij sin(theta_j - theta_i) + (eps/N) sum_j sin 2(theta_j - theta_i).
        let cfg = HnnConfig::from_patterns(
            &[pat(&[1, -1, 1, 1, -1])],
            &[],
            0.7,
            0.0,
            1.0,
        )
        .unwrap();
        let theta = [0.3, 1.9, -0.4, 2.8, 0.1];
        let m: Vec<Complex64> = theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let (dtheta, _) = hnn_vector_field(&theta, &m, &cfg).unwrap();
        let n = 5;
        for i in 0..n {
            let mut expect = 0.0;
            for j in 0..n {
                expect += cfg.spatial_coupling()[(i, j)] * (theta[j] - theta[i]).sin();
                expect += 0.7 / n as f64 * (2.0 * (theta[j] - theta[i])).sin();
            }
            assert_relative_eq!(dtheta[i], expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn every_binary_configuration_is_an_equilibrium() {
        // Exhaustive over all 2^10 sign configurations at N = 10.
        let old = [pat(&[1, -1, 1, 1, -1, -1, 1, -1, 1, 1])];
        let new = [pat(&[-1, -1, 1, -1, 1, 1, 1, -1, -1, 1])];
        let cfg = HnnConfig::from_patterns(&old, &new, 0.5, 0.6, 0.8).unwrap();
        for bits in 0u32..1024 {
            let eta: Vec<i8> = (0..10).map(|b| if bits >> b & 1 == 1 { 1 } else { -1 }).collect();
            let p = Pattern::new(eta).unwrap();
            let theta = p.phases();
            let m: Vec<Complex64> =
                theta.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
            let (dtheta, dm) = hnn_vector_field(&theta, &m, &cfg).unwrap();
            for v in dtheta {
                assert!(v.abs() < 1e-12, "residual phase velocity {v}");
            }
            for v in dm {
                assert!(v.norm() < 1e-12, "residual attention velocity {v}");
            }
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        // Generic (non-equilibrium) state, both second-order modes.
        let old = [letter('K'), letter('U')];
        let new = [letter('A'), letter('M')];
        for mode in [SecondOrderField::ComplexMean, SecondOrderField::Modulus] {
            let cfg = HnnConfig::from_patterns(&old, &new, 0.4, 0.55, 0.9)
                .unwrap()
                .with_second_order(mode);
            let n = cfg.n();
            let theta: Vec<f64> = (0..n).map(|i| 0.17 * i as f64 % 2.3 - 0.6).collect();
            let m: Vec<Complex64> = (0..n)
                .map(|i| Complex64::new(0.4 * ((i * 7 % 5) as f64 - 2.0) / 3.0, 0.3 * ((i % 3) as f64 - 1.0)))
                .collect();
            let analytic = hnn_jacobian(&theta, &m, &cfg).unwrap();
            let fd = finite_difference_jacobian(&theta, &m, &cfg, 1e-6).unwrap();
            let mut worst = 0.0f64;
            for r in 0..3 * n {
                for c in 0..3 * n {
                    let denom = fd[(r, c)].abs().max(1.0);
                    worst = worst.max((analytic[(r, c)] - fd[(r, c)]).abs() / denom);
                }
            }
            assert!(worst < 1e-6, "worst Jacobian deviation {worst} in {mode:?}");
        }
    }

    #[test]
    fn pattern_jacobian_has_zero_mode_and_null_vector() {
        let cfg = stored_config(0.25, 0.5, 1.0);
        let p = letter('K');
        let j = jacobian_at_pattern(&cfg, &p).unwrap();
        // Analytic null vector of the global phase shift: (1, -Im M, Re M);
        // at a pattern M = eta, so it is (1, 0, eta).
        let n = cfg.n();
        let mut null = nalgebra::DVector::zeros(3 * n);
        for i in 0..n {
            null[i] = 1.0;
            null[2 * n + i] = p.entries()[i] as f64;
        }
        let image = &j * &null;
        assert!(image.norm() < 1e-10, "null vector residual {}", image.norm());
        // And the eigensolver sees exactly one near-zero eigenvalue.
        let eigs = spectrum(&j).unwrap();
        let zeros = eigs.iter().filter(|e| e.norm() < 1e-8).count();
        assert_eq!(zeros, 1);
    }

    #[test]
    fn leading_eigenvalue_examples() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, -1.0, -2.0]));
        assert_relative_eq!(leading_eigenvalue(&d).unwrap().re, -1.0, max_relative = 1e-12);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, -1.0, 0.5]));
        assert_relative_eq!(leading_eigenvalue(&d).unwrap().re, 0.5, max_relative = 1e-12);
        // Two exact zeros: ambiguous.
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, 0.0, -1.0]));
        assert!(matches!(leading_eigenvalue(&d), Err(Error::AmbiguousZeroMode { .. })));
        // Symmetric matrix: real result.
        let s = DMatrix::from_row_slice(3, 3, &[0.0, 0.3, 0.1, 0.3, -0.5, 0.0, 0.1, 0.0, -0.9]);
        let e = leading_eigenvalue(&s).unwrap();
        assert!(e.im.abs() < 1e-10);
    }

    #[test]
    fn stored_pattern_spectrum_frozen_values() {
        // alpha = 0, beta = 1, eps = 1/4: the theta block decouples and the
        // leading eigenvalues are exact rationals.
        let cfg = stored_config(0.25, 0.0, 1.0);
        let expect = [('K', -15.0 / 32.0), ('U', -5.0 / 32.0), ('R', -7.0 / 16.0)];
        for (l, v) in expect {
            let j = jacobian_at_pattern(&cfg, &letter(l)).unwrap();
            let e = leading_eigenvalue(&j).unwrap();
            assert_relative_eq!(e.re, v, max_relative = 1e-9);
            assert!(e.im.abs() < 1e-9);
        }
        // New patterns are not in the spatial coupling: unstable at alpha=0.
        for l in ['A', 'M', 'O', 'T'] {
            let j = jacobian_at_pattern(&cfg, &letter(l)).unwrap();
            assert!(leading_eigenvalue(&j).unwrap().re > 0.5);
        }
    }

    #[test]
    fn attention_stabilises_new_patterns() {
        // Frozen eigenvalue oracles at alpha = 0.5 and 0.75 (beta = 1,
        // eps = 1/4).
        let cfg = stored_config(0.25, 0.5, 1.0);
        let mid = [
            ('K', -0.172125348),
            ('U', -0.173797580),
            ('A', -0.166256084),
            ('M', -0.203808146),
            ('T', -0.193970993),
        ];
        for (l, v) in mid {
            let e = leading_eigenvalue(&jacobian_at_pattern(&cfg, &letter(l)).unwrap()).unwrap();
            assert_relative_eq!(e.re, v, epsilon = 1e-6);
        }
        let cfg = stored_config(0.25, 0.75, 1.0);
        let high = [('K', 0.122509231), ('A', -0.120917598), ('O', -0.121344196)];
        for (l, v) in high {
            let e = leading_eigenvalue(&jacobian_at_pattern(&cfg, &letter(l)).unwrap()).unwrap();
            assert_relative_eq!(e.re, v, epsilon = 1e-6);
        }
    }

    #[test]
    fn global_phase_shift_preserves_spectrum() {
        let cfg = stored_config(0.3, 0.45, 0.8);
        let p = letter('U');
        let theta0 = p.phases();
        let m0: Vec<Complex64> = theta0.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let e0 = leading_eigenvalue(&hnn_jacobian(&theta0, &m0, &cfg).unwrap()).unwrap();
        let shift = 0.83;
        let theta1: Vec<f64> = theta0.iter().map(|&t| t + shift).collect();
        let m1: Vec<Complex64> = theta1.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let e1 = leading_eigenvalue(&hnn_jacobian(&theta1, &m1, &cfg).unwrap()).unwrap();
        assert_relative_eq!(e0.re, e1.re, epsilon = 1e-9);
    }

    #[test]
    fn stability_map_shapes_and_contour() {
        let cfg = stored_config(0.25, 0.0, 1.0);
        let eps = [0.1, 0.25, 0.4];
        let alpha = [0.0, 0.25, 0.5, 0.75];
        let map = stability_map(&cfg, &letter('A'), &eps, &alpha).unwrap();
        assert_eq!(map.re.len(), 3);
        assert!(map.re.iter().all(|row| row.len() == 4));
        // New pattern: unstable on the whole alpha = 0 column. High alpha
        // stabilises it only once the second-harmonic binding is strong
        // enough (eps >= 0.25 here); at eps = 0.1 it stays unstable.
        assert!(map.re.iter().all(|row| row[0] > 0.0));
        assert!(*map.re[0].last().unwrap() > 0.0);
        assert!(*map.re[1].last().unwrap() < 0.0);
        assert!(*map.re[2].last().unwrap() < 0.0);
        // Frozen spot value away from the oracle cells used elsewhere.
        assert_relative_eq!(map.re[2][1], -0.049669, epsilon = 1e-6);
        assert!(!map.contour.is_empty());
        // Degenerate 1x1 grid equals a direct eigenvalue call.
        let single = stability_map(&cfg, &letter('A'), &[0.25], &[0.75]).unwrap();
        let direct = leading_eigenvalue(
            &jacobian_at_pattern(&cfg.with_eps_alpha(0.25, 0.75), &letter('A')).unwrap(),
        )
        .unwrap();
        assert_relative_eq!(single.re[0][0], direct.re, max_relative = 1e-12);
    }

    #[test]
    fn recover_from_unmasked_start_is_identity() {
        let cfg = stored_config(0.25, 0.0, 1.0);
        let target = letter('K');
        let mask = vec![false; target.len()];
        let (rec, overlap) = recover(&cfg, &target, &mask, 200, 1).unwrap();
        assert_eq!(rec, target);
        assert!((overlap - 1.0).abs() < 1e-6, "overlap {overlap}");
    }

    #[test]
    fn recover_rejects_full_mask() {
        let cfg = stored_config(0.25, 0.0, 1.0);
        let target = letter('K');
        assert!(matches!(
            recover(&cfg, &target, &vec![true; target.len()], 10, 0),
            Err(Error::AllMasked)
        ));
    }

    #[test]
    fn recover_stored_pattern_with_mask() {
        let cfg = stored_config(0.25, 0.0, 1.0);
        let target = letter('U');
        let n = target.len();
        let mut successes = 0;
        for seed in 0..5 {
            // Mask 20% of sites deterministically per seed.
            let mut mask = vec![false; n];
            let mut rng = crate::rng::substream(seed, crate::rng::STREAM_MASKS);
            let mut masked = 0;
            while masked < n / 5 {
                let i = rand::Rng::random_range(&mut rng, 0..n);
                if !mask[i] {
                    mask[i] = true;
                    masked += 1;
                }
            }
            let (_, overlap) = recover(&cfg, &target, &mask, 10_000, seed).unwrap();
            if overlap > 0.99 {
                successes += 1;
            }
        }
        assert!(successes >= 4, "stored-pattern recovery {successes}/5");
    }
}
