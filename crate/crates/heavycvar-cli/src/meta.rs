//! Run metadata sidecar written next to every CSV.

use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Write `<csv>.meta` with tool version, RNG identity, seed derivation rule
/// and the full configuration. Timing lines are appended last so the
/// deterministic part of the file stays prefix-stable.
pub fn write_sidecar(
    csv_path: &Path,
    command: &str,
    config_lines: &[String],
    timing_lines: &[String],
) -> Result<PathBuf, CliError> {
    let mut out = String::new();
    out.push_str(&format!("tool=heavycvar {}\n", env!("CARGO_PKG_VERSION")));
    out.push_str(&format!("command={command}\n"));
    out.push_str(&format!("rng={}\n", heavycvar::rng::RNG_NAME));
    out.push_str(
        "seed_derivation=fnv1a64(base_seed_le || experiment_id || 0x1f || method || 0x1f || trial_le)\n",
    );
    for line in config_lines {
        out.push_str("config.");
        out.push_str(line);
        out.push('\n');
    }
    for line in timing_lines {
        out.push_str(line);
        out.push('\n');
    }
    let mut path = csv_path.as_os_str().to_owned();
    path.push(".meta");
    let path = PathBuf::from(path);
    std::fs::write(&path, out)
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}
