//! `phasekit lambda-c`: the mean-field synchronization threshold from the
//! analytic stability condition (closed form where available, bracketed
//! bisection otherwise).

use clap::{Args as ClapArgs, ValueEnum};
use serde::Serialize;

use phasekit::meanfield::{lambda_c_neighbor, lambda_c_self, lambda_c_self_delta_closed_form};

use crate::error::{CliError, CliResult};
use crate::manifest::ManifestBuilder;
use crate::system::parse_freq;
use crate::util::{fmt_f, OutputCollector};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// Attention reads the neighbours' states (threshold is
    /// alpha-independent).
    Neighbor,
    /// Attention reads each oscillator's own state.
    #[value(name = "self")]
    Own,
}

#[derive(Debug, ClapArgs)]
pub struct Args {
    /// Attention wiring.
    #[arg(long, value_enum, default_value_t = ModeArg::Neighbor)]
    pub attention: ModeArg,
    /// Noise intensity D.
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    /// Attention mixing weight (self mode).
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Attention decay rate (self mode).
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Frequency distribution: delta | normal:VAR | tabulated:...
    #[arg(long, default_value = "delta")]
    pub dist: String,
}

#[derive(Serialize)]
struct LambdaCReport {
    attention: String,
    noise: f64,
    alpha: f64,
    beta: f64,
    dist: String,
    lambda_c: f64,
    residual: f64,
    bracket: (f64, f64),
    quadrature_error: f64,
    /// Exact closed form, where one exists for the inputs.
    closed_form: Option<f64>,
}

pub fn run(args: &Args, ctx: &Ctx) -> CliResult<()> {
    let dist = parse_freq(&args.dist)?;
    let manifest = ManifestBuilder::new("lambda-c", ctx.scale.name(), ctx.seed, ctx.jobs);

    let (result, closed_form, mode_name) = match args.attention {
        ModeArg::Neighbor => {
            let r = lambda_c_neighbor(args.noise, &dist)?;
            let closed = match dist {
                phasekit::dynamics::FrequencyDist::Delta => Some(2.0 * args.noise),
                _ => None,
            };
            (r, closed, "neighbor")
        }
        ModeArg::Own => {
            let r = lambda_c_self(args.noise, args.alpha, args.beta, &dist)?;
            let closed = match dist {
                phasekit::dynamics::FrequencyDist::Delta => {
                    Some(lambda_c_self_delta_closed_form(args.noise, args.alpha, args.beta)?)
                }
                _ => None,
            };
            (r, closed, "self")
        }
    };

    let report = LambdaCReport {
        attention: mode_name.to_string(),
        noise: args.noise,
        alpha: args.alpha,
        beta: args.beta,
        dist: args.dist.clone(),
        lambda_c: result.lambda_c,
        residual: result.residual,
        bracket: result.bracket,
        quadrature_error: result.quadrature_error,
        closed_form,
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::Runtime(e.to_string()))?;

    let manifest = manifest.config(&report);
    let mut out = OutputCollector::new(&ctx.out)?;
    out.write("lambda_c.json", &format!("{json}\n"))?;
    manifest.write(&out)?;
    println!("lambda_c={}", fmt_f(report.lambda_c));
    Ok(())
}
