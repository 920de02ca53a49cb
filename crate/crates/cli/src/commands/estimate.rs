//! `phasekit estimate-lambda-c`: numerical synchronization-threshold
//! estimation via the noise-floor or finite-size crossing rule.

use clap::{Args as ClapArgs, ValueEnum};
use serde::Serialize;

use phasekit::estimator::{
    estimate_lambda_c, CrossingRule, EstimationProtocol, LambdaCEstimate, System,
};

use crate::error::{CliError, CliResult};
use crate::manifest::ManifestBuilder;
use crate::system::SystemArgs;
use crate::util::{fmt_f, parse_grid, parse_sizes, OutputCollector};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    /// First grid point whose ensemble mean clears the incoherent-state
    /// noise floor.
    NoiseFloor,
    /// Crossing of rescaled R sqrt(N) curves for two system sizes.
    FiniteSize,
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Coupling grid: start:step:stop or a comma list.
    #[arg(long)]
    pub grid: String,
    /// Realisations per grid point (default by --scale, minimum 3).
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Crossing rule.
    #[arg(long, value_enum, default_value_t = RuleArg::NoiseFloor)]
    pub rule: RuleArg,
    /// System sizes for the finite-size rule (comma list, >= 2 sizes).
    #[arg(long)]
    pub sizes: Option<String>,
    /// Noise-floor multiplier c in the crossing test mean - std > c * floor.
    #[arg(long, default_value_t = 3.0)]
    pub floor_multiplier: f64,
    #[command(flatten)]
    pub system: SystemArgs,
}

#[derive(Serialize)]
struct EstimateEcho<'a> {
    protocol: &'a EstimationProtocol,
    system: &'a System,
}

pub fn points_csv(est: &LambdaCEstimate) -> String {
    let mut csv = String::from("lambda,n,R_mean,R_std\n");
    for s in &est.stats {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f(s.lambda),
            s.n,
            fmt_f(s.r_mean),
            fmt_f(s.r_std)
        ));
    }
    csv
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let (net, run, _config) = args.system.resolve_phase(ctx)?;
    let grid = parse_grid(&args.grid)?;
    let seeds = args.seeds.unwrap_or(ctx.scale.default_seeds()).max(3);
    let sizes = match (&args.sizes, args.rule) {
        (Some(text), _) => parse_sizes(text)?,
        (None, RuleArg::NoiseFloor) => vec![net.n],
        (None, RuleArg::FiniteSize) => {
            return Err(CliError::usage(
                "--rule finite-size needs --sizes with at least two sizes",
            ))
        }
    };
    let protocol = EstimationProtocol {
        grid,
        seeds_per_point: seeds,
        sizes,
        rule: match args.rule {
            RuleArg::NoiseFloor => CrossingRule::NoiseFloor,
            RuleArg::FiniteSize => CrossingRule::FiniteSize,
        },
        floor_multiplier: args.floor_multiplier,
    };
    let system = System { net, run };
    let manifest = ManifestBuilder::new("estimate-lambda-c", ctx.scale.name(), ctx.seed, ctx.jobs)
        .config(EstimateEcho { protocol: &protocol, system: &system });

    let estimate = estimate_lambda_c(&system, &protocol)?;

    let mut out = OutputCollector::new(&ctx.out)?;
    out.write("points.csv", &points_csv(&estimate))?;
    let json = serde_json::to_string_pretty(&estimate)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    out.write("estimate.json", &format!("{json}\n"))?;
    manifest.write(&out)?;
    println!(
        "lambda_c={} half_width={} bracket=[{}, {}]",
        fmt_f(estimate.lambda_c),
        fmt_f(estimate.half_width),
        fmt_f(estimate.bracket.0),
        fmt_f(estimate.bracket.1)
    );
    Ok(())
}
