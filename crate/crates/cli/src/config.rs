//! The experiment configuration file.
//!
//! A single TOML document selects a scenario and provides its parameters:
//!
//! ```toml
//! scenario = "phase"            # phase | opinion | stuart-landau
//!
//! [network]
//! kind = "watts-strogatz"       # complete | watts-strogatz | erdos-renyi
//! n = 200                       #   | barabasi-albert | edge-list
//! k = 4
//! p = 0.1
//!
//! [run]                         # phase scenario (fields of SimConfig)
//! lambda = 1.5
//! alpha = 0.5
//! beta = 1.0
//! attention = "neighbor"        # neighbor | self | none
//! freq = { kind = "delta" }     # or { kind = "normal", variance = 1.0 }
//! ```
//!
//! The opinion scenario replaces `[run]` with `[opinion]` (holding a
//! nested `sim` table plus `pull` and `anchors`); the Stuart-Landau
//! scenario uses `[sl]`. Unknown keys anywhere are rejected with the key
//! named.
//!
//! Seeds compose: the effective seed of each component is the file's value
//! XOR the command line `--seed`, so a config file is a reusable template
//! and the flag shifts the whole experiment to fresh randomness
//! deterministically.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use phasekit::dynamics::{OpinionConfig, SimConfig, SlConfig};
use phasekit::net::{Indexing, NetworkKind, NetworkSpec};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Phase,
    Opinion,
    StuartLandau,
}

/// Network section: one flat table covering every family, validated by
/// kind. Keeping the fields flat (rather than an internally tagged enum)
/// lets unknown keys be rejected by name here too.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct NetworkSection {
    pub kind: String,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub k: Option<usize>,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub indexing: Option<String>,
}

fn reject_extras(kind: &str, extras: &[(&str, bool)]) -> CliResult<()> {
    for (name, present) in extras {
        if *present {
            return Err(CliError::usage(format!(
                "network kind `{kind}` does not take `{name}`"
            )));
        }
    }
    Ok(())
}

impl NetworkSection {
    /// Resolve into a generation spec. `master_seed` is XOR-mixed into the
    /// section's seed (absent = 0); `default_n` fills a missing size.
    pub fn resolve(&self, master_seed: u64, default_n: usize) -> CliResult<NetworkSpec> {
        let n = self.n.unwrap_or(default_n);
        let seed = self.seed.unwrap_or(0) ^ master_seed;
        let kind = match self.kind.as_str() {
            "complete" => {
                reject_extras(
                    "complete",
                    &[
                        ("k", self.k.is_some()),
                        ("p", self.p.is_some()),
                        ("m", self.m.is_some()),
                        ("path", self.path.is_some()),
                        ("indexing", self.indexing.is_some()),
                    ],
                )?;
                NetworkKind::Complete
            }
            "watts-strogatz" => {
                reject_extras(
                    "watts-strogatz",
                    &[
                        ("m", self.m.is_some()),
                        ("path", self.path.is_some()),
                        ("indexing", self.indexing.is_some()),
                    ],
                )?;
                let k = self
                    .k
                    .ok_or_else(|| CliError::usage("watts-strogatz needs `k` (even degree)"))?;
                let p = self
                    .p
                    .ok_or_else(|| CliError::usage("watts-strogatz needs `p` (rewiring)"))?;
                NetworkKind::WattsStrogatz { k, p }
            }
            "erdos-renyi" => {
                reject_extras(
                    "erdos-renyi",
                    &[
                        ("k", self.k.is_some()),
                        ("m", self.m.is_some()),
                        ("path", self.path.is_some()),
                        ("indexing", self.indexing.is_some()),
                    ],
                )?;
                let p = self
                    .p
                    .ok_or_else(|| CliError::usage("erdos-renyi needs `p` (edge probability)"))?;
                NetworkKind::ErdosRenyi { p }
            }
            "barabasi-albert" => {
                reject_extras(
                    "barabasi-albert",
                    &[
                        ("k", self.k.is_some()),
                        ("p", self.p.is_some()),
                        ("path", self.path.is_some()),
                        ("indexing", self.indexing.is_some()),
                    ],
                )?;
                let m = self
                    .m
                    .ok_or_else(|| CliError::usage("barabasi-albert needs `m` (edges per node)"))?;
                NetworkKind::BarabasiAlbert { m }
            }
            "edge-list" => {
                reject_extras(
                    "edge-list",
                    &[("k", self.k.is_some()), ("p", self.p.is_some()), ("m", self.m.is_some())],
                )?;
                let path = self
                    .path
                    .clone()
                    .ok_or_else(|| CliError::usage("edge-list needs `path`"))?;
                let indexing = match self.indexing.as_deref() {
                    None | Some("zero-based") => Indexing::ZeroBased,
                    Some("one-based") => Indexing::OneBased,
                    Some(other) => {
                        return Err(CliError::usage(format!(
                            "indexing must be zero-based or one-based, got `{other}`"
                        )))
                    }
                };
                // For edge lists a missing n means "take it from the file".
                return Ok(NetworkSpec {
                    kind: NetworkKind::EdgeList { path, indexing },
                    n: self.n.unwrap_or(0),
                    seed,
                });
            }
            other => {
                return Err(CliError::usage(format!(
                    "unknown network kind `{other}`; expected complete, watts-strogatz, \
                     erdos-renyi, barabasi-albert, or edge-list"
                )))
            }
        };
        if n == 0 {
            return Err(CliError::usage("network size must be positive"));
        }
        Ok(NetworkSpec { kind, n, seed })
    }
}

/// The full experiment file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub network: NetworkSection,
    #[serde(default)]
    pub run: Option<SimConfig>,
    #[serde(default)]
    pub opinion: Option<OpinionConfig>,
    #[serde(default)]
    pub sl: Option<SlConfig>,
    /// Free-form tag echoed into the manifest.
    #[serde(default)]
    pub label: Option<String>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))?;
        cfg.check_sections()?;
        Ok(cfg)
    }

    fn check_sections(&self) -> CliResult<()> {
        let need = |have: bool, section: &str, scenario: &str| {
            if have {
                Ok(())
            } else {
                Err(CliError::usage(format!(
                    "scenario `{scenario}` needs a [{section}] section"
                )))
            }
        };
        match self.scenario {
            Scenario::Phase => need(self.run.is_some(), "run", "phase")?,
            Scenario::Opinion => need(self.opinion.is_some(), "opinion", "opinion")?,
            Scenario::StuartLandau => need(self.sl.is_some(), "sl", "stuart-landau")?,
        }
        let stray = match self.scenario {
            Scenario::Phase => [
                (self.opinion.is_some(), "opinion"),
                (self.sl.is_some(), "sl"),
            ],
            Scenario::Opinion => [(self.run.is_some(), "run"), (self.sl.is_some(), "sl")],
            Scenario::StuartLandau => {
                [(self.run.is_some(), "run"), (self.opinion.is_some(), "opinion")]
            }
        };
        for (present, name) in stray {
            if present {
                return Err(CliError::usage(format!(
                    "section [{name}] does not belong to this scenario"
                )));
            }
        }
        Ok(())
    }
}
