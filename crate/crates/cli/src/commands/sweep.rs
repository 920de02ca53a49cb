//! `phasekit sweep`: seed-averaged tail coherence across a parameter
//! grid. Writes an aggregate CSV and a long-form per-seed CSV.

use clap::{Args as ClapArgs, ValueEnum};
use serde::Serialize;

use phasekit::estimator::{sweep_coherence, SweepAxis, System};

use crate::error::{CliError, CliResult};
use crate::manifest::ManifestBuilder;
use crate::system::SystemArgs;
use crate::util::{fmt_f, parse_grid, OutputCollector};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Lambda,
    Alpha,
    Beta,
}

impl From<AxisArg> for SweepAxis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Lambda => SweepAxis::Lambda,
            AxisArg::Alpha => SweepAxis::Alpha,
            AxisArg::Beta => SweepAxis::Beta,
        }
    }
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Which parameter the grid varies.
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    /// Grid: start:step:stop or a comma list.
    #[arg(long)]
    pub values: String,
    /// Independent realisations per grid value (default by --scale).
    #[arg(long)]
    pub seeds: Option<usize>,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Serialize)]
struct SweepEcho<'a> {
    axis: &'a str,
    values: &'a [f64],
    seeds: usize,
    system: &'a System,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let (net, run, _config) = args.system.resolve_phase(ctx)?;
    let values = parse_grid(&args.values)?;
    let seeds = args.seeds.unwrap_or(ctx.scale.default_seeds());
    let system = System { net, run };
    let axis_name = match args.axis {
        AxisArg::Lambda => "lambda",
        AxisArg::Alpha => "alpha",
        AxisArg::Beta => "beta",
    };
    let manifest = ManifestBuilder::new("sweep", ctx.scale.name(), ctx.seed, ctx.jobs).config(
        SweepEcho { axis: axis_name, values: &values, seeds, system: &system },
    );

    let rows = sweep_coherence(&system, args.axis.into(), &values, seeds)?;

    let mut agg = format!("{axis_name},R_mean,R_std\n");
    let mut long = format!("{axis_name},seed_index,R_tail\n");
    for row in &rows {
        agg.push_str(&format!(
            "{},{},{}\n",
            fmt_f(row.value),
            fmt_f(row.r_mean),
            fmt_f(row.r_std)
        ));
        for (k, r) in row.r_tails.iter().enumerate() {
            long.push_str(&format!("{},{k},{}\n", fmt_f(row.value), fmt_f(*r)));
        }
    }

    let mut out = OutputCollector::new(&ctx.out)?;
    out.write("sweep.csv", &agg)?;
    out.write("sweep_runs.csv", &long)?;
    let json = serde_json::to_string_pretty(&rows)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    out.write("sweep.json", &format!("{json}\n"))?;
    manifest.write(&out)?;
    for row in &rows {
        println!("{axis_name}={} R={}±{}", fmt_f(row.value), fmt_f(row.r_mean), fmt_f(row.r_std));
    }
    Ok(())
}
