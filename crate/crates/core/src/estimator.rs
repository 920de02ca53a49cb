//! Empirical estimation of the critical coupling from simulations.
//!
//! Below threshold the order parameter of `n` independent uniform phases
//! has mean resultant length `sqrt(pi / (4 n))` — the *noise floor*. The
//! default estimator scans a strictly increasing coupling grid, runs a
//! small seed ensemble per point, and declares the transition at the first
//! grid value whose seed-averaged tail order parameter clears a multiple
//! `c` of the floor with a one-seed-sigma margin; one extra bisection pass
//! between the bracketing grid points sharpens the estimate.
//!
//! The alternative finite-size estimator runs the grid at several system
//! sizes and locates the coupling where the rescaled curves
//! `R_tail * sqrt(n)` for the two largest sizes separate: below threshold
//! the rescaled floor is size-independent (`sqrt(pi) / 2`), above it the
//! curves fan out with `sqrt(n)`.
//!
//! Every (coupling, size, seed) point is an independent simulation; points
//! run in parallel and are merged in deterministic order, so estimates are
//! reproducible run to run for a fixed master seed.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, SimConfig};
use crate::error::{Error, Result};
use crate::net::{generate, NetworkSpec};
use crate::rng::run_seed;

/// Mean resultant length of `n` independent uniform phases.
pub fn noise_floor(n: usize) -> f64 {
    (std::f64::consts::PI / (4.0 * n as f64)).sqrt()
}

/// Which transition criterion the estimator applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrossingRule {
    /// Seed-averaged tail R clears `c * noise_floor(n)` by one seed sigma.
    NoiseFloor,
    /// `R * sqrt(n)` curves of the two largest sizes separate.
    FiniteSize,
}

/// Estimation protocol: the coupling grid, the ensemble sizes, and the
/// crossing rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationProtocol {
    /// Strictly increasing coupling values to scan.
    pub grid: Vec<f64>,
    /// Independent realisations per grid point (at least 3).
    pub seeds_per_point: usize,
    /// System sizes. The noise-floor rule uses the first entry; the
    /// finite-size rule needs at least two.
    pub sizes: Vec<usize>,
    pub rule: CrossingRule,
    /// Noise-floor multiplier `c`.
    pub floor_multiplier: f64,
}

impl EstimationProtocol {
    /// Noise-floor protocol with the default multiplier `c = 3`.
    pub fn noise_floor(grid: Vec<f64>, seeds_per_point: usize, n: usize) -> Self {
        EstimationProtocol {
            grid,
            seeds_per_point,
            sizes: vec![n],
            rule: CrossingRule::NoiseFloor,
            floor_multiplier: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.len() < 2 {
            return Err(Error::InvalidParameter("coupling grid needs at least 2 points".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("coupling grid must be strictly increasing".into()));
        }
        if self.seeds_per_point < 3 {
            return Err(Error::InvalidParameter(format!(
                "need at least 3 seeds per point, got {}",
                self.seeds_per_point
            )));
        }
        if self.sizes.is_empty() {
            return Err(Error::InvalidParameter("need at least one system size".into()));
        }
        if self.rule == CrossingRule::FiniteSize && self.sizes.len() < 2 {
            return Err(Error::InvalidParameter(
                "finite-size crossing needs at least two system sizes".into(),
            ));
        }
        if !(self.floor_multiplier > 0.0) {
            return Err(Error::InvalidParameter("floor multiplier must be positive".into()));
        }
        Ok(())
    }
}

/// The system whose threshold is being estimated: a network family plus a
/// run template. The template's coupling is overridden by the grid; its
/// seed is the master seed for the whole estimate, and its size is
/// overridden by the protocol's size list.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct System {
    pub net: NetworkSpec,
    pub run: SimConfig,
}

/// One simulated point of the scan.
#[derive(Debug, Clone, Serialize)]
pub struct PointRun {
    pub lambda: f64,
    pub n: usize,
    pub seed: u64,
    pub r_tail: f64,
}

/// Seed-aggregated statistics of one (coupling, size) point.
#[derive(Debug, Clone, Serialize)]
pub struct PointStat {
    pub lambda: f64,
    pub n: usize,
    pub r_mean: f64,
    /// Sample standard deviation over seeds.
    pub r_std: f64,
}

/// Result of a threshold estimation.
#[derive(Debug, Clone, Serialize)]
pub struct LambdaCEstimate {
    pub lambda_c: f64,
    /// Confidence half-width: half the final bracket plus the seed scatter
    /// mapped through the local slope of the R curve.
    pub half_width: f64,
    /// Grid bracket the crossing was found in.
    pub bracket: (f64, f64),
    /// Every simulated realisation.
    pub rows: Vec<PointRun>,
    /// Per-point aggregates.
    pub stats: Vec<PointStat>,
}

/// Run the seed ensemble for one (coupling, size) point. Realisation `k`
/// derives both its topology seed and its dynamics seed from the masters,
/// so different points never share randomness.
fn run_point(system: &System, lambda: f64, n: usize, seeds: usize) -> Result<Vec<PointRun>> {
    (0..seeds)
        .into_par_iter()
        .map(|k| {
            let spec = system
                .net
                .with_n(n)
                .with_seed(run_seed(system.net.seed, k as u64));
            let net = generate(&spec)?;
            let mut cfg = system.run.clone();
            cfg.lambda = lambda;
            cfg.seed = run_seed(system.run.seed, k as u64);
            let out = simulate(&cfg, &net)?;
            Ok(PointRun { lambda, n, seed: cfg.seed, r_tail: out.r_tail })
        })
        .collect()
}

fn aggregate(rows: &[PointRun]) -> PointStat {
    let k = rows.len() as f64;
    let mean = rows.iter().map(|r| r.r_tail).sum::<f64>() / k;
    let var = if rows.len() > 1 {
        rows.iter().map(|r| (r.r_tail - mean).powi(2)).sum::<f64>() / (k - 1.0)
    } else {
        0.0
    };
    PointStat {
        lambda: rows[0].lambda,
        n: rows[0].n,
        r_mean: mean,
        r_std: var.sqrt(),
    }
}

/// Estimate the critical coupling of `system` under `protocol`.
pub fn estimate_lambda_c(system: &System, protocol: &EstimationProtocol) -> Result<LambdaCEstimate> {
    protocol.validate()?;
    system.run.validate()?;
    match protocol.rule {
        CrossingRule::NoiseFloor => estimate_noise_floor(system, protocol),
        CrossingRule::FiniteSize => estimate_finite_size(system, protocol),
    }
}

fn estimate_noise_floor(system: &System, protocol: &EstimationProtocol) -> Result<LambdaCEstimate> {
    let n = protocol.sizes[0];
    let floor = protocol.floor_multiplier * noise_floor(n);
    let mut rows = Vec::new();
    let mut stats = Vec::new();
    for &lambda in &protocol.grid {
        let point = run_point(system, lambda, n, protocol.seeds_per_point)?;
        stats.push(aggregate(&point));
        rows.extend(point);
    }

    let above = |s: &PointStat| s.r_mean - s.r_std > floor;
    let crossing = stats.iter().position(above);
    let i = match crossing {
        None => {
            return Err(Error::NoCrossing(format!(
                "every grid point stays at the noise floor (threshold {floor:.4})"
            )))
        }
        Some(0) => {
            return Err(Error::NoCrossing(
                "already above the noise floor at the first grid point; extend the grid downward"
                    .into(),
            ))
        }
        Some(i) => i,
    };
    let (grid_lo, grid_hi) = (protocol.grid[i - 1], protocol.grid[i]);

    // One bisection pass between the bracketing grid points.
    let mid = 0.5 * (grid_lo + grid_hi);
    let mid_rows = run_point(system, mid, n, protocol.seeds_per_point)?;
    let mid_stat = aggregate(&mid_rows);
    let mid_above = above(&mid_stat);
    rows.extend(mid_rows);

    let (lo, hi) = if mid_above { (grid_lo, mid) } else { (mid, grid_hi) };
    let lambda_c = 0.5 * (lo + hi);

    // Seed scatter mapped through the slope of the R curve across the
    // bracketing grid points.
    let slope = (stats[i].r_mean - stats[i - 1].r_mean) / (grid_hi - grid_lo);
    let scatter = stats[i].r_std.max(stats[i - 1].r_std).max(mid_stat.r_std);
    let scatter_width = if slope > 1e-12 { scatter / slope } else { 0.0 };
    let half_width = 0.5 * (hi - lo) + scatter_width;

    stats.insert(i, mid_stat);
    Ok(LambdaCEstimate { lambda_c, half_width, bracket: (grid_lo, grid_hi), rows, stats })
}

fn estimate_finite_size(system: &System, protocol: &EstimationProtocol) -> Result<LambdaCEstimate> {
    let mut sizes = protocol.sizes.clone();
    sizes.sort_unstable();
    sizes.dedup();
    if sizes.len() < 2 {
        return Err(Error::InvalidParameter(
            "finite-size crossing needs two distinct system sizes".into(),
        ));
    }
    let (n1, n2) = (sizes[sizes.len() - 2], sizes[sizes.len() - 1]);

    let mut rows = Vec::new();
    let mut stats = Vec::new();
    let mut curves: Vec<Vec<PointStat>> = Vec::new();
    for &n in &[n1, n2] {
        let mut curve = Vec::new();
        for &lambda in &protocol.grid {
            let point = run_point(system, lambda, n, protocol.seeds_per_point)?;
            curve.push(aggregate(&point));
            rows.extend(point);
        }
        stats.extend(curve.iter().cloned());
        curves.push(curve);
    }

    // Rescaled separation y(lambda) = R sqrt(n2) - R sqrt(n1) and its
    // standard error from the seed scatter.
    let k = protocol.seeds_per_point as f64;
    let diff: Vec<f64> = (0..protocol.grid.len())
        .map(|j| {
            curves[1][j].r_mean * (n2 as f64).sqrt() - curves[0][j].r_mean * (n1 as f64).sqrt()
        })
        .collect();
    let se: Vec<f64> = (0..protocol.grid.len())
        .map(|j| {
            let v1 = (n1 as f64) * curves[0][j].r_std.powi(2) / k;
            let v2 = (n2 as f64) * curves[1][j].r_std.powi(2) / k;
            (v1 + v2).sqrt()
        })
        .collect();

    // First grid point where the curves have separated beyond noise and
    // stay separated for the rest of the grid.
    let sep = (0..diff.len()).position(|j| {
        diff[j] > 2.0 * se[j] && (j + 1..diff.len()).all(|l| diff[l] > 0.0)
    });
    let i = match sep {
        None => {
            return Err(Error::NoCrossing(
                "rescaled curves never separate beyond seed noise on this grid".into(),
            ))
        }
        Some(0) => {
            return Err(Error::NoCrossing(
                "curves already separated at the first grid point; extend the grid downward".into(),
            ))
        }
        Some(i) => i,
    };
    let (grid_lo, grid_hi) = (protocol.grid[i - 1], protocol.grid[i]);

    // Linear interpolation of the separation through zero.
    let (d0, d1) = (diff[i - 1], diff[i]);
    let lambda_c = if d1 > d0 && d0 < 0.0 {
        grid_lo + (0.0 - d0) * (grid_hi - grid_lo) / (d1 - d0)
    } else {
        // The left point already sits at or above zero within noise; the
        // crossing is somewhere inside the cell.
        0.5 * (grid_lo + grid_hi)
    };
    let slope = (d1 - d0) / (grid_hi - grid_lo);
    let scatter_width = if slope > 1e-12 { se[i].max(se[i - 1]) / slope } else { 0.0 };
    let half_width = 0.5 * (grid_hi - grid_lo) + scatter_width;

    Ok(LambdaCEstimate { lambda_c, half_width, bracket: (grid_lo, grid_hi), rows, stats })
}

/// Parameter being swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepAxis {
    Lambda,
    Alpha,
    Beta,
}

/// One row of a coherence sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub r_mean: f64,
    pub r_std: f64,
    pub r_tails: Vec<f64>,
}

fn apply_axis(cfg: &mut SimConfig, axis: SweepAxis, value: f64) {
    match axis {
        SweepAxis::Lambda => cfg.lambda = value,
        SweepAxis::Alpha => cfg.alpha = value,
        SweepAxis::Beta => cfg.beta = value,
    }
}

/// Sweep one parameter and report the seed-averaged tail order parameter
/// at each value. Deterministic for a fixed master seed.
pub fn sweep_coherence(
    system: &System,
    axis: SweepAxis,
    values: &[f64],
    seeds: usize,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    if seeds == 0 {
        return Err(Error::InvalidParameter("sweep needs at least one seed".into()));
    }
    let jobs: Vec<(usize, usize)> = (0..values.len())
        .flat_map(|vi| (0..seeds).map(move |k| (vi, k)))
        .collect();
    let results: Vec<(usize, f64)> = jobs
        .into_par_iter()
        .map(|(vi, k)| {
            let spec = system.net.with_seed(run_seed(system.net.seed, k as u64));
            let net = generate(&spec)?;
            let mut cfg = system.run.clone();
            apply_axis(&mut cfg, axis, values[vi]);
            cfg.validate()?;
            cfg.seed = run_seed(system.run.seed, k as u64);
            let out = simulate(&cfg, &net)?;
            Ok((vi, out.r_tail))
        })
        .collect::<Result<_>>()?;

    let mut tails: Vec<Vec<f64>> = vec![Vec::new(); values.len()];
    for (vi, r) in results {
        tails[vi].push(r);
    }
    Ok(values
        .iter()
        .zip(tails)
        .map(|(&value, r_tails)| {
            let k = r_tails.len() as f64;
            let mean = r_tails.iter().sum::<f64>() / k;
            let var = if r_tails.len() > 1 {
                r_tails.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (k - 1.0)
            } else {
                0.0
            };
            SweepRow { value, r_mean: mean, r_std: var.sqrt(), r_tails }
        })
        .collect())
}

/// One row of a threshold sweep.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdSweepRow {
    pub value: f64,
    pub lambda_c: f64,
    pub half_width: f64,
}

/// Estimate the threshold at each value of a swept parameter (attention
/// weight or rate). The grid and seed budget apply at every value.
pub fn sweep_lambda_c(
    system: &System,
    axis: SweepAxis,
    values: &[f64],
    protocol: &EstimationProtocol,
) -> Result<Vec<ThresholdSweepRow>> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("sweep needs at least one value".into()));
    }
    if axis == SweepAxis::Lambda {
        return Err(Error::InvalidParameter(
            "threshold sweeps vary alpha or beta; the coupling is what is being estimated".into(),
        ));
    }
    values
        .iter()
        .map(|&value| {
            let mut sys = system.clone();
            apply_axis(&mut sys.run, axis, value);
            let est = estimate_lambda_c(&sys, protocol)?;
            Ok(ThresholdSweepRow { value, lambda_c: est.lambda_c, half_width: est.half_width })
        })
        .collect()
}
