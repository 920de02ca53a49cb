//! `phasekit hopfield map|recover`: associative-memory stability maps and
//! masked-pattern recovery with the built-in letter glyphs (or bitmap
//! files).

use std::path::PathBuf;

use clap::{Args as ClapArgs, Subcommand};
use serde::Serialize;

use phasekit::hopfield::{
    glyphs, jacobian_at_pattern, leading_eigenvalue, recover, stability_map, HnnConfig, Pattern,
    SecondOrderField,
};
use phasekit::rng::{self, STREAM_MASKS};

use crate::error::{CliError, CliResult};
use crate::manifest::ManifestBuilder;
use crate::util::{fmt_f, parse_grid, OutputCollector};
use crate::Ctx;

#[derive(Debug, Subcommand)]
pub enum HopfieldCmd {
    /// Leading-eigenvalue stability maps over an eps x alpha grid.
    Map(MapArgs),
    /// Recover a masked pattern by integrating the retrieval dynamics.
    Recover(RecoverArgs),
}

/// Shared pattern-set options: which letters form the stored (spatial)
/// and new (attention) sets.
#[derive(Debug, ClapArgs)]
pub struct SetArgs {
    /// Letters written into the spatial coupling.
    #[arg(long, default_value = "KUR")]
    pub old: String,
    /// Letters written into the attention coupling.
    #[arg(long, default_value = "AMOT")]
    pub new: String,
    /// Attention decay rate.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Use the modulus form of the second-order field instead of the
    /// complex mean.
    #[arg(long)]
    pub modulus: bool,
}

impl SetArgs {
    fn patterns(text: &str) -> CliResult<Vec<Pattern>> {
        text.chars().map(|l| glyphs::pattern(l).map_err(CliError::from)).collect()
    }

    pub fn config(&self, eps: f64, alpha: f64) -> CliResult<HnnConfig> {
        let old = Self::patterns(&self.old)?;
        let new = Self::patterns(&self.new)?;
        let cfg = HnnConfig::from_patterns(&old, &new, eps, alpha, self.beta)?;
        Ok(if self.modulus { cfg.with_second_order(SecondOrderField::Modulus) } else { cfg })
    }
}

#[derive(Debug, ClapArgs)]
pub struct MapArgs {
    /// Letters to map (old set + new set by default).
    #[arg(long, default_value = "KURAMOT")]
    pub letters: String,
    /// Second-order strength grid: start:step:stop or a comma list.
    #[arg(long, default_value = "0.05:0.05:1.0")]
    pub eps_grid: String,
    /// Attention weight grid.
    #[arg(long, default_value = "0.0:0.05:1.0")]
    pub alpha_grid: String,
    #[command(flatten)]
    pub set: SetArgs,
}

#[derive(Serialize)]
struct MapEcho {
    letters: String,
    eps_grid: Vec<f64>,
    alpha_grid: Vec<f64>,
    old: String,
    new: String,
    beta: f64,
    modulus: bool,
}

#[derive(Serialize)]
pub struct LetterSummary {
    pub letter: char,
    pub stable_fraction: f64,
    pub min_re: f64,
    pub max_re: f64,
}

/// Write `map_X.csv` and `contour_X.csv` for each letter and return the
/// per-letter summaries. Shared between `hopfield map` and the fig6-map
/// preset. The config's own eps/alpha are placeholders; the grids
/// override them cell by cell.
pub fn emit_maps(
    letters: &str,
    eps_grid: &[f64],
    alpha_grid: &[f64],
    cfg: &HnnConfig,
    out: &mut OutputCollector,
) -> CliResult<Vec<LetterSummary>> {
    let mut summaries = Vec::new();
    for letter in letters.chars() {
        let pattern = glyphs::pattern(letter)?;
        let map = stability_map(cfg, &pattern, eps_grid, alpha_grid)?;

        let mut csv = String::from("eps,alpha,re_leading\n");
        for (i, &e) in map.eps.iter().enumerate() {
            for (j, &a) in map.alpha.iter().enumerate() {
                csv.push_str(&format!("{},{},{}\n", fmt_f(e), fmt_f(a), fmt_f(map.re[i][j])));
            }
        }
        out.write(&format!("map_{letter}.csv"), &csv)?;

        let mut contour = String::from("eps1,alpha1,eps2,alpha2\n");
        for ((e1, a1), (e2, a2)) in &map.contour {
            contour.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f(*e1),
                fmt_f(*a1),
                fmt_f(*e2),
                fmt_f(*a2)
            ));
        }
        out.write(&format!("contour_{letter}.csv"), &contour)?;

        let cells: Vec<f64> = map.re.iter().flatten().copied().collect();
        let stable = cells.iter().filter(|v| **v < 0.0).count();
        summaries.push(LetterSummary {
            letter,
            stable_fraction: stable as f64 / cells.len() as f64,
            min_re: cells.iter().copied().fold(f64::INFINITY, f64::min),
            max_re: cells.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok(summaries)
}

pub fn run_map(args: &MapArgs, ctx: &Ctx) -> CliResult<()> {
    let eps_grid = parse_grid(&args.eps_grid)?;
    let alpha_grid = parse_grid(&args.alpha_grid)?;
    let manifest = ManifestBuilder::new("hopfield map", ctx.scale.name(), ctx.seed, ctx.jobs)
        .config(MapEcho {
            letters: args.letters.clone(),
            eps_grid: eps_grid.clone(),
            alpha_grid: alpha_grid.clone(),
            old: args.set.old.clone(),
            new: args.set.new.clone(),
            beta: args.set.beta,
            modulus: args.set.modulus,
        });
    // eps/alpha placeholders; the map overrides both per cell.
    let cfg = args.set.config(0.25, 0.0)?;

    let mut out = OutputCollector::new(&ctx.out)?;
    let summaries = emit_maps(&args.letters, &eps_grid, &alpha_grid, &cfg, &mut out)?;
    let json = serde_json::to_string_pretty(&summaries)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    out.write("map_summary.json", &format!("{json}\n"))?;
    manifest.write(&out)?;
    for s in &summaries {
        println!(
            "{}: stable {}% of cells, re range [{}, {}]",
            s.letter,
            fmt_f(100.0 * s.stable_fraction),
            fmt_f(s.min_re),
            fmt_f(s.max_re)
        );
    }
    Ok(())
}

#[derive(Debug, ClapArgs)]
pub struct RecoverArgs {
    /// Letter to recover (or use --bitmap).
    #[arg(long)]
    pub letter: Option<char>,
    /// Bitmap file with `#`/`.` rows instead of a built-in letter.
    #[arg(long)]
    pub bitmap: Option<PathBuf>,
    /// Fraction of sites whose phase is randomised at start.
    #[arg(long, default_value_t = 0.2)]
    pub mask: f64,
    /// Second-order strength.
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Attention mixing weight.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Integration steps (step size 0.05).
    #[arg(long, default_value_t = 12_000)]
    pub steps: usize,
    #[command(flatten)]
    pub set: SetArgs,
}

#[derive(Serialize)]
struct RecoverReport {
    letter: Option<char>,
    mask_fraction: f64,
    masked_sites: usize,
    eps: f64,
    alpha: f64,
    beta: f64,
    steps: usize,
    overlap: f64,
    success: bool,
    /// Leading-eigenvalue real part of the target pattern at these
    /// parameters (the stability map's prediction).
    re_leading: f64,
}

pub fn run_recover(args: &RecoverArgs, ctx: &Ctx) -> CliResult<()> {
    let target = match (&args.letter, &args.bitmap) {
        (Some(l), None) => glyphs::pattern(*l)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
            Pattern::from_bitmap(&text)?
        }
        _ => return Err(CliError::usage("give exactly one of --letter or --bitmap")),
    };
    if !(0.0..1.0).contains(&args.mask) {
        return Err(CliError::usage("mask fraction must lie in [0, 1)"));
    }
    let cfg = args.set.config(args.eps, args.alpha)?;
    let n = target.len();

    // Choose masked sites from the dedicated mask stream.
    let wanted = (args.mask * n as f64).round() as usize;
    let mut mask = vec![false; n];
    let mut rng = rng::substream(ctx.seed, STREAM_MASKS);
    let mut masked = 0;
    while masked < wanted {
        let i = rand::Rng::random_range(&mut rng, 0..n);
        if !mask[i] {
            mask[i] = true;
            masked += 1;
        }
    }

    let manifest = ManifestBuilder::new("hopfield recover", ctx.scale.name(), ctx.seed, ctx.jobs);
    let (recovered, overlap) = recover(&cfg, &target, &mask, args.steps, ctx.seed)?;
    let re_leading = leading_eigenvalue(&jacobian_at_pattern(&cfg, &target)?)?.re;

    let report = RecoverReport {
        letter: args.letter,
        mask_fraction: args.mask,
        masked_sites: wanted,
        eps: args.eps,
        alpha: args.alpha,
        beta: args.set.beta,
        steps: args.steps,
        overlap,
        success: overlap > 0.99,
        re_leading,
    };
    let manifest = manifest.config(&report);

    let width = (n as f64).sqrt().round() as usize;
    let width = if width * width == n { width } else { n };
    let mut masked_render = String::new();
    for (i, &e) in target.entries().iter().enumerate() {
        masked_render.push(if mask[i] {
            '?'
        } else if e > 0 {
            '#'
        } else {
            '.'
        });
        if (i + 1) % width == 0 {
            masked_render.push('\n');
        }
    }

    let mut out = OutputCollector::new(&ctx.out)?;
    out.write("target.txt", &target.render(width))?;
    out.write("masked.txt", &masked_render)?;
    out.write("recovered.txt", &recovered.render(width))?;
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    out.write("recover.json", &format!("{json}\n"))?;
    manifest.write(&out)?;
    println!(
        "overlap={} success={} re_leading={}",
        fmt_f(overlap),
        report.success,
        fmt_f(re_leading)
    );
    Ok(())
}

pub fn run(cmd: &HopfieldCmd, ctx: &Ctx) -> CliResult<()> {
    match cmd {
        HopfieldCmd::Map(args) => run_map(args, ctx),
        HopfieldCmd::Recover(args) => run_recover(args, ctx),
    }
}
