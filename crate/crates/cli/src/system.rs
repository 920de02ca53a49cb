//! Shared "which system am I running" resolution: either a TOML
//! experiment file (`--config`) or a set of inline flags describing the
//! network and the run parameters.

use std::path::PathBuf;

use clap::{Args as ClapArgs, ValueEnum};

use phasekit::dynamics::{AttentionMode, FrequencyDist, MInit, SimConfig};
use phasekit::net::{Indexing, NetworkKind, NetworkSpec};

use crate::config::{ExperimentConfig, Scenario};
use crate::error::{CliError, CliResult};
use crate::Ctx;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Complete,
    WattsStrogatz,
    ErdosRenyi,
    BarabasiAlbert,
    EdgeList,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IndexingArg {
    ZeroBased,
    OneBased,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttentionArg {
    Neighbor,
    #[value(name = "self")]
    Own,
    None,
}

impl From<AttentionArg> for AttentionMode {
    fn from(a: AttentionArg) -> Self {
        match a {
            AttentionArg::Neighbor => AttentionMode::Neighbor,
            AttentionArg::Own => AttentionMode::Own,
            AttentionArg::None => AttentionMode::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MInitArg {
    PhaseLocked,
    Zero,
}

/// Parse `delta`, `normal:VARIANCE`, or `tabulated:v1,v2,...`.
pub fn parse_freq(text: &str) -> CliResult<FrequencyDist> {
    let text = text.trim();
    if text == "delta" {
        return Ok(FrequencyDist::Delta);
    }
    if let Some(var) = text.strip_prefix("normal:") {
        let variance: f64 = var
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad variance in `{text}`")))?;
        return Ok(FrequencyDist::Normal { variance });
    }
    if let Some(list) = text.strip_prefix("tabulated:") {
        let values: Vec<f64> = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("bad value `{v}` in `{text}`")))
            })
            .collect::<CliResult<_>>()?;
        return Ok(FrequencyDist::tabulated(values).map_err(CliError::from)?);
    }
    Err(CliError::usage(format!(
        "frequency distribution `{text}` not recognised; use delta, normal:VAR, or tabulated:v1,v2,..."
    )))
}

/// Network and run parameters common to simulate / sweep / estimate.
#[derive(Debug, ClapArgs)]
pub struct SystemArgs {
    /// TOML experiment file; when given, the inline flags below are
    /// rejected.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Network family.
    #[arg(long, value_enum, default_value_t = KindArg::Complete)]
    pub kind: KindArg,
    /// Nodes (default set by --scale: desk 200, paper 1000).
    #[arg(long)]
    pub n: Option<usize>,
    /// Watts-Strogatz even ring degree.
    #[arg(long)]
    pub k: Option<usize>,
    /// Rewiring or edge probability (Watts-Strogatz / Erdos-Renyi).
    #[arg(long)]
    pub p: Option<f64>,
    /// Edges per new node (Barabasi-Albert).
    #[arg(long)]
    pub m: Option<usize>,
    /// Edge-list file (kind edge-list).
    #[arg(long)]
    pub path: Option<PathBuf>,
    /// Edge-list node numbering.
    #[arg(long, value_enum, default_value_t = IndexingArg::ZeroBased)]
    pub indexing: IndexingArg,

    /// Coupling strength.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Attention mixing weight in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Attention decay rate.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Noise intensity D.
    #[arg(long)]
    pub noise: Option<f64>,
    /// Integrator step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Integration horizon (default set by --scale: desk 2000, paper 10000).
    #[arg(long)]
    pub t_end: Option<f64>,
    /// What the attention term reads.
    #[arg(long, value_enum)]
    pub attention: Option<AttentionArg>,
    /// Natural frequency distribution: delta | normal:VAR | tabulated:...
    #[arg(long)]
    pub freq: Option<String>,
    /// Attention initial condition.
    #[arg(long, value_enum)]
    pub m_init: Option<MInitArg>,
    /// Record observables every this many steps.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Tail fraction averaged into the reported order parameter.
    #[arg(long)]
    pub measure_window: Option<f64>,
}

/// A fully resolved system plus the scenario it came from.
pub struct ResolvedSystem {
    pub scenario: Scenario,
    pub net: NetworkSpec,
    pub config: ExperimentConfig,
}

impl SystemArgs {
    fn inline_flags_used(&self) -> bool {
        self.n.is_some()
            || self.k.is_some()
            || self.p.is_some()
            || self.m.is_some()
            || self.path.is_some()
            || self.lambda.is_some()
            || self.alpha.is_some()
            || self.beta.is_some()
            || self.noise.is_some()
            || self.dt.is_some()
            || self.t_end.is_some()
            || self.attention.is_some()
            || self.freq.is_some()
            || self.m_init.is_some()
            || self.stride.is_some()
            || self.measure_window.is_some()
    }

    /// Resolve to a scenario, network spec, and full config. Flag-driven
    /// invocations always produce the phase scenario.
    pub fn resolve(&self, ctx: &Ctx) -> CliResult<ResolvedSystem> {
        if let Some(path) = &self.config {
            if self.inline_flags_used() {
                return Err(CliError::usage(
                    "--config and inline system flags are mutually exclusive",
                ));
            }
            let mut config = ExperimentConfig::load(path)?;
            let net = config.network.resolve(ctx.seed, ctx.scale.default_n())?;
            // Mix the master seed into the dynamics seed as documented.
            if let Some(run) = &mut config.run {
                run.seed ^= ctx.seed;
            }
            if let Some(op) = &mut config.opinion {
                op.sim.seed ^= ctx.seed;
            }
            if let Some(sl) = &mut config.sl {
                sl.seed ^= ctx.seed;
            }
            return Ok(ResolvedSystem { scenario: config.scenario, net, config });
        }

        let n = self.n.unwrap_or(ctx.scale.default_n());
        let kind = match self.kind {
            KindArg::Complete => NetworkKind::Complete,
            KindArg::WattsStrogatz => NetworkKind::WattsStrogatz {
                k: self.k.ok_or_else(|| CliError::usage("--kind watts-strogatz needs --k"))?,
                p: self.p.ok_or_else(|| CliError::usage("--kind watts-strogatz needs --p"))?,
            },
            KindArg::ErdosRenyi => NetworkKind::ErdosRenyi {
                p: self.p.ok_or_else(|| CliError::usage("--kind erdos-renyi needs --p"))?,
            },
            KindArg::BarabasiAlbert => NetworkKind::BarabasiAlbert {
                m: self.m.ok_or_else(|| CliError::usage("--kind barabasi-albert needs --m"))?,
            },
            KindArg::EdgeList => NetworkKind::EdgeList {
                path: self
                    .path
                    .clone()
                    .ok_or_else(|| CliError::usage("--kind edge-list needs --path"))?,
                indexing: match self.indexing {
                    IndexingArg::ZeroBased => Indexing::ZeroBased,
                    IndexingArg::OneBased => Indexing::OneBased,
                },
            },
        };
        let net = NetworkSpec { kind, n, seed: ctx.seed };

        let mut run = SimConfig { seed: ctx.seed, t_end: ctx.scale.default_t_end(), ..SimConfig::default() };
        if let Some(v) = self.lambda {
            run.lambda = v;
        }
        if let Some(v) = self.alpha {
            run.alpha = v;
        }
        if let Some(v) = self.beta {
            run.beta = v;
        }
        if let Some(v) = self.noise {
            run.noise = v;
        }
        if let Some(v) = self.dt {
            run.dt = v;
        }
        if let Some(v) = self.t_end {
            run.t_end = v;
        }
        if let Some(v) = self.attention {
            run.attention = v.into();
        }
        if let Some(text) = &self.freq {
            run.freq = parse_freq(text)?;
        }
        if let Some(v) = self.m_init {
            run.m_init = match v {
                MInitArg::PhaseLocked => MInit::PhaseLocked,
                MInitArg::Zero => MInit::Zero,
            };
        }
        if let Some(v) = self.stride {
            run.sample_stride = v;
        }
        if let Some(v) = self.measure_window {
            run.measure_window = v;
        }
        run.validate()?;

        let config = ExperimentConfig {
            scenario: Scenario::Phase,
            network: crate::config::NetworkSection {
                kind: match self.kind {
                    KindArg::Complete => "complete",
                    KindArg::WattsStrogatz => "watts-strogatz",
                    KindArg::ErdosRenyi => "erdos-renyi",
                    KindArg::BarabasiAlbert => "barabasi-albert",
                    KindArg::EdgeList => "edge-list",
                }
                .into(),
                n: Some(n),
                seed: Some(net.seed),
                k: self.k,
                p: self.p,
                m: self.m,
                path: self.path.clone(),
                indexing: None,
            },
            run: Some(run),
            opinion: None,
            sl: None,
            label: None,
        };
        Ok(ResolvedSystem { scenario: Scenario::Phase, net, config })
    }

    /// Resolve and require the phase scenario (sweeps and estimation work
    /// on the phase model).
    pub fn resolve_phase(&self, ctx: &Ctx) -> CliResult<(NetworkSpec, SimConfig, ExperimentConfig)> {
        let resolved = self.resolve(ctx)?;
        match resolved.scenario {
            Scenario::Phase => {}
            _ => {
                return Err(CliError::usage(
                    "this command works on the phase scenario; the config selects another",
                ))
            }
        }
        let run = resolved
            .config
            .run
            .clone()
            .ok_or_else(|| CliError::usage("phase scenario needs a [run] section"))?;
        Ok((resolved.net, run, resolved.config))
    }
}
