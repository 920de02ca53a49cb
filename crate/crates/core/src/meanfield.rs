//! Critical coupling of the incoherent state from linear stability theory.
//!
//! For the noisy phase model the incoherent state loses stability at a
//! coupling `lambda_c` determined by a frequency-averaged condition. With
//! purely spatial coupling (no attention) the threshold solves
//!
//! ```text
//! lambda_c * integral D / (D^2 + omega^2) g(omega) d omega = 2,
//! ```
//!
//! which for the delta distribution collapses to `lambda_c = 2 D`. With the
//! self-reading attention term the condition becomes the root in lambda of
//!
//! ```text
//! integral Re f(omega) g(omega) d omega = 2,
//!
//! f(omega) = (1 - alpha) lambda
//!            / ( D + i omega
//!                - (alpha lambda / 2) (4 D + 2 i omega) / (beta + 4 D + 2 i omega) ),
//! ```
//!
//! evaluated at spectral parameter zero (marginal stability). For the delta
//! distribution this again has a closed form,
//! `lambda_c = 2 D / (1 - alpha beta / (beta + 4 D))`, which the numerical
//! root-finder is cross-checked against.
//!
//! The delta-distribution condition has a pole at
//! `lambda* = (beta + 4 D) / (2 alpha)`: the left side sweeps from below 2
//! up to +infinity as lambda approaches `lambda*` from below, and is useless
//! beyond it. The bracketing logic therefore expands geometrically in small
//! multiplicative steps and, where the pole location is known, caps the
//! search just below it — a bracket that simply doubles its upper end can
//! leap across the narrow root window and falsely conclude that no finite
//! threshold exists.
//!
//! Frequency averages use Gauss–Hermite quadrature with doubling refinement;
//! the recurrence works with *normalised* Hermite polynomials so that node
//! counts in the thousands stay inside f64 range.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::FrequencyDist;
use crate::error::{Error, Result};

/// Refinement target for the frequency average: doubling the node count
/// must move the result by less than this.
const QUAD_TOL: f64 = 1e-10;
/// First Gauss–Hermite node count tried.
const QUAD_NODES_MIN: usize = 64;
/// Largest node count before refinement gives up.
const QUAD_NODES_MAX: usize = 8192;
/// Multiplicative step of the bracket expansion. Deliberately close to 1 so
/// a narrow sign-change window between the root and a nearby pole is never
/// stepped over.
const BRACKET_GROWTH: f64 = 1.05;
/// Expansion gives up once lambda exceeds this multiple of 2 D.
const BRACKET_CAP: f64 = 32768.0;
/// Acceptable condition mismatch at a returned root.
const RESIDUAL_TOL: f64 = 1e-8;

/// Result of a critical-coupling computation.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaCResult {
    /// The critical coupling.
    pub lambda_c: f64,
    /// Absolute mismatch of the stability condition at `lambda_c`.
    pub residual: f64,
    /// The sign-change bracket the root was isolated in (degenerate for
    /// closed-form paths).
    pub bracket: (f64, f64),
    /// Estimated quadrature error of the frequency average at the root.
    pub quadrature_error: f64,
}

/// The stability kernel `f` at spectral parameter zero.
///
/// At `alpha = 0` this reduces to `lambda / (D + i omega)`; at `alpha = 1`
/// it vanishes identically (no threshold at any coupling).
pub fn f_eval(omega: f64, alpha: f64, beta: f64, lambda: f64, d: f64) -> Result<Complex64> {
    let i_omega = Complex64::new(0.0, omega);
    let inner = Complex64::new(4.0 * d, 2.0 * omega) / (beta + Complex64::new(4.0 * d, 2.0 * omega));
    let den = d + i_omega - 0.5 * alpha * lambda * inner;
    if den.norm() < 1e-14 {
        return Err(Error::Singular {
            context: "stability kernel",
            detail: format!("omega = {omega}, alpha = {alpha}, beta = {beta}, lambda = {lambda}, D = {d}"),
        });
    }
    Ok((1.0 - alpha) * lambda / den)
}

/// Nodes and weights of the `n`-point Gauss–Hermite rule for
/// `integral exp(-x^2) f(x) dx ~= sum w_i f(x_i)`, nodes ascending.
///
/// Each node is located by Sturm-sequence bisection on the symmetric
/// tridiagonal Jacobi matrix (eigenvalue counts make the ordering exact at
/// any `n`), then polished by Newton iteration on the *normalised* Hermite
/// recurrence (the unnormalised polynomials overflow f64 well below 1000
/// nodes).
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidParameter("quadrature needs at least one node".into()));
    }
    let pi_quarter = std::f64::consts::PI.powf(-0.25);
    // Normalised Hermite value and derivative at z, with running rescaling:
    // near the extreme roots the polynomial magnitude reaches exp(z^2 / 2),
    // which overflows f64 beyond a few hundred nodes. Both recurrence
    // carriers are scaled down by 1e-100 whenever they pass 1e100, counting
    // the factors; the Newton ratio is scale-free and the weight restores
    // the scale (underflowing to the true zero for far-out nodes).
    const SCALE: f64 = 1e100;
    let eval = |z: f64| -> (f64, f64, i32) {
        let mut p2 = 0.0f64;
        let mut p1 = pi_quarter;
        let mut scale = 0i32;
        for j in 1..=n {
            let jf = j as f64;
            let p0 = z * (2.0 / jf).sqrt() * p1 - ((jf - 1.0) / jf).sqrt() * p2;
            p2 = p1;
            p1 = p0;
            if p1.abs() > SCALE {
                p1 /= SCALE;
                p2 /= SCALE;
                scale += 1;
            }
        }
        (p1, (2.0 * n as f64).sqrt() * p2, scale)
    };

    // Number of Jacobi-matrix eigenvalues (= rule nodes) strictly below
    // `sigma`, from the sign changes of the shifted LDL^T pivots. The matrix
    // has zero diagonal and off-diagonal squares j/2; a vanishing pivot is
    // nudged negative, and the recurrence tolerates the resulting infinities.
    let count_below = |sigma: f64| -> usize {
        let mut d = -sigma;
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        let mut count = usize::from(d < 0.0);
        for j in 1..n {
            d = -sigma - (j as f64 / 2.0) / d;
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            count += usize::from(d < 0.0);
        }
        count
    };

    let m = (n + 1) / 2;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    // Gershgorin bound on the spectrum: every node satisfies |x| < sqrt(2n).
    let bound = (2.0 * n as f64 + 1.0).sqrt() + 1.0;
    for i in 0..m {
        // The i-th largest root is eigenvalue n-1-i in ascending order; all
        // roots in this half are >= 0, so bisect over [0, bound].
        let k = n - 1 - i;
        let (mut lo, mut hi) = (0.0f64, bound);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let mut z = 0.5 * (lo + hi);
        let mut converged = false;
        let mut dp = 0.0;
        let mut dp_scale = 0i32;
        for _ in 0..100 {
            let (p, d, scale) = eval(z);
            dp = d;
            dp_scale = scale;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergent(format!(
                "Gauss-Hermite root {i} of {n} did not converge"
            )));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        // True derivative is dp * SCALE^dp_scale; the weight divides the
        // square back out (flushing to zero where it genuinely underflows).
        let wi = (2.0 / (dp * dp)) * SCALE.powi(-2 * dp_scale);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    x.reverse();
    w.reverse();
    Ok((x, w))
}

fn cached_gauss_hermite(n: usize) -> Result<Arc<(Vec<f64>, Vec<f64>)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache poisoned");
    if let Some(rule) = guard.get(&n) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(gauss_hermite(n)?);
    guard.insert(n, rule.clone());
    Ok(rule)
}

/// Average `integrand` over the frequency distribution:
/// `integral integrand(omega) g(omega) d omega`.
///
/// Returns the value together with an error estimate. Delta averages are
/// exact (`integrand(0)`); tabulated averages are the sample mean; normal
/// averages use Gauss–Hermite with node doubling until the change drops
/// below 1e-10.
pub fn quadrature(dist: &FrequencyDist, integrand: impl Fn(f64) -> f64) -> Result<(f64, f64)> {
    match dist {
        FrequencyDist::Delta => Ok((integrand(0.0), 0.0)),
        FrequencyDist::Tabulated { values } => {
            if values.is_empty() {
                return Err(Error::InvalidParameter("tabulated distribution is empty".into()));
            }
            let mean = values.iter().map(|&v| integrand(v)).sum::<f64>() / values.len() as f64;
            Ok((mean, 0.0))
        }
        FrequencyDist::Normal { variance } => {
            if !(*variance > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "normal frequency variance must be positive, got {variance}"
                )));
            }
            let sigma = variance.sqrt();
            let scale = sigma * std::f64::consts::SQRT_2;
            let norm = std::f64::consts::PI.sqrt().recip();
            let evaluate = |n: usize| -> Result<f64> {
                let rule = cached_gauss_hermite(n)?;
                let (x, w) = (&rule.0, &rule.1);
                Ok(norm * x.iter().zip(w).map(|(&xi, &wi)| wi * integrand(scale * xi)).sum::<f64>())
            };
            let mut n = QUAD_NODES_MIN;
            let mut prev = evaluate(n)?;
            while n < QUAD_NODES_MAX {
                n *= 2;
                let next = evaluate(n)?;
                let diff = (next - prev).abs();
                if diff < QUAD_TOL {
                    return Ok((next, diff));
                }
                prev = next;
            }
            Err(Error::NonConvergent(format!(
                "frequency average still moving after {QUAD_NODES_MAX} quadrature nodes"
            )))
        }
    }
}

/// Critical coupling with purely spatial coupling (no attention):
/// `lambda_c = 2 / integral D/(D^2 + omega^2) g(omega) d omega`.
///
/// For the delta distribution the average is exactly `1/D`, so the result
/// is exactly `2 D`.
pub fn lambda_c_neighbor(d: f64, dist: &FrequencyDist) -> Result<LambdaCResult> {
    check_noise(d)?;
    let (avg, quad_err) = quadrature(dist, |omega| d / (d * d + omega * omega))?;
    if !(avg > 0.0) || !avg.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "frequency average of the stability integrand is {avg}; distribution not usable"
        )));
    }
    let lambda_c = 2.0 / avg;
    Ok(LambdaCResult {
        lambda_c,
        residual: (lambda_c * avg - 2.0).abs(),
        bracket: (lambda_c, lambda_c),
        quadrature_error: quad_err,
    })
}

/// Closed-form threshold of the self-reading attention model for the delta
/// frequency distribution: `2 D / (1 - alpha beta / (beta + 4 D))`.
pub fn lambda_c_self_delta_closed_form(d: f64, alpha: f64, beta: f64) -> Result<f64> {
    check_noise(d)?;
    check_attention(alpha, beta)?;
    Ok(2.0 * d / (1.0 - alpha * beta / (beta + 4.0 * d)))
}

/// Critical coupling with self-reading attention, for any supported
/// frequency distribution, via bracketing bisection on the averaged
/// stability condition. `alpha = 0` reduces exactly to
/// [`lambda_c_neighbor`].
pub fn lambda_c_self(d: f64, alpha: f64, beta: f64, dist: &FrequencyDist) -> Result<LambdaCResult> {
    check_noise(d)?;
    check_attention(alpha, beta)?;
    if alpha == 0.0 {
        return lambda_c_neighbor(d, dist);
    }

    let condition = |lambda: f64| -> Result<(f64, f64)> {
        let kernel_err = std::cell::RefCell::new(None::<Error>);
        let (avg, qerr) = quadrature(dist, |omega| {
            match f_eval(omega, alpha, beta, lambda, d) {
                Ok(f) => f.re,
                Err(e) => {
                    kernel_err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        })?;
        if let Some(e) = kernel_err.into_inner() {
            return Err(e);
        }
        Ok((avg - 2.0, qerr))
    };

    // The condition rises through zero from below; start at the
    // no-attention threshold, where it is still negative.
    let mut lo = 2.0 * d;
    let (mut g_lo, _) = condition(lo)?;
    while g_lo >= 0.0 {
        lo *= 0.5;
        if lo < 1e-12 * d {
            return Err(Error::NoBracket(
                "stability condition non-negative arbitrarily close to zero coupling".into(),
            ));
        }
        g_lo = condition(lo)?.0;
    }

    // Where the pole of the delta-case condition is known analytically, cap
    // the search just below it; the condition diverges to +infinity there,
    // so a sign change inside (lo, cap) is guaranteed.
    let pole_cap = match dist {
        FrequencyDist::Delta => Some((beta + 4.0 * d) / (2.0 * alpha) * (1.0 - 1e-9)),
        _ => None,
    };
    let cap = pole_cap.unwrap_or(BRACKET_CAP * 2.0 * d);

    let mut hi = lo;
    let mut g_hi = g_lo;
    let mut bracketed = false;
    while hi < cap {
        hi = (hi * BRACKET_GROWTH).min(cap);
        g_hi = condition(hi)?.0;
        if g_hi > 0.0 {
            bracketed = true;
            break;
        }
        lo = hi;
    }
    if !bracketed {
        return Err(Error::NoBracket(format!(
            "no finite threshold: condition still {g_hi:.3e} at lambda = {hi:.6e}"
        )));
    }
    let bracket = (lo, hi);

    let mut quad_err = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval at float resolution
        }
        let (g_mid, qerr) = condition(mid)?;
        quad_err = qerr;
        if g_mid > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda_c = 0.5 * (lo + hi);
    let residual = condition(lambda_c)?.0.abs();
    if residual > RESIDUAL_TOL {
        return Err(Error::NonConvergent(format!(
            "root residual {residual:.3e} exceeds {RESIDUAL_TOL:e} (condition extremely steep?)"
        )));
    }
    Ok(LambdaCResult { lambda_c, residual, bracket, quadrature_error: quad_err })
}

fn check_noise(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("noise intensity must be positive, got {d}")))
    }
}

fn check_attention(alpha: f64, beta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "attention weight must lie in [0, 1) for a finite threshold, got {alpha}"
        )));
    }
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "attention rate must be positive, got {beta}"
        )));
    }
    Ok(())
}
