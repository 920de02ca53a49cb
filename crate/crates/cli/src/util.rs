//! Output plumbing: atomic file writes, digests, and grid parsing.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Write a file atomically: to a dot-prefixed temporary in the same
/// directory, then rename over the destination.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| CliError::usage(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Records every file written into an output directory, with its digest,
/// for the run manifest.
pub struct OutputCollector {
    dir: PathBuf,
    files: Vec<(String, String, u64)>,
}

impl OutputCollector {
    pub fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputCollector { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Write `name` under the output directory and record its digest.
    pub fn write(&mut self, name: &str, content: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        write_atomic(&path, content.as_bytes())?;
        self.files.push((name.to_string(), sha256_hex(content.as_bytes()), content.len() as u64));
        Ok(())
    }

    pub fn files(&self) -> &[(String, String, u64)] {
        &self.files
    }
}

/// Deterministic float formatting for CSV cells: the shortest
/// representation that round-trips.
pub fn fmt_f(v: f64) -> String {
    format!("{v}")
}

/// Parse either a comma list `0.1,0.2,0.5` or an inclusive range
/// `start:step:stop`.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let text = text.trim();
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(CliError::usage(format!(
                "grid `{text}` must be start:step:stop or a comma list"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("bad number `{p}` in grid `{text}`")))
            })
            .collect::<CliResult<_>>()?;
        let (start, step, stop) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || stop < start {
            return Err(CliError::usage(format!(
                "grid `{text}`: need positive step and stop >= start"
            )));
        }
        let count = ((stop - start) / step).round() as usize + 1;
        let mut values: Vec<f64> = (0..count).map(|i| start + step * i as f64).collect();
        // Snap the endpoint if rounding left it inside the range.
        if let Some(last) = values.last_mut() {
            if (*last - stop).abs() < step * 1e-9 {
                *last = stop;
            }
        }
        values.retain(|v| *v <= stop + step * 1e-9);
        Ok(values)
    } else {
        text.split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::usage(format!("bad number `{p}` in list `{text}`")))
            })
            .collect()
    }
}

/// Parse a comma list of positive integers.
pub fn parse_sizes(text: &str) -> CliResult<Vec<usize>> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| CliError::usage(format!("bad size `{p}` in list `{text}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_parse() {
        assert_eq!(parse_grid("0.5:0.25:1.5").unwrap(), vec![0.5, 0.75, 1.0, 1.25, 1.5]);
        assert_eq!(parse_grid("1,2,2.5").unwrap(), vec![1.0, 2.0, 2.5]);
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("a,b").is_err());
        // Endpoint not on the lattice: stop short of it.
        assert_eq!(parse_grid("0:0.4:1.0").unwrap(), vec![0.0, 0.4, 0.8]);
    }

    #[test]
    fn digests_are_stable() {
        assert_eq!(
            sha256_hex(b"phasekit"),
            "fa3492b71f11d45464eef84d473d1adea50d4d9b77fa5669d2f0aacef99d749b"
        );
    }
}
