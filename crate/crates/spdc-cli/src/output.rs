//! Artifact writing: CSV data files plus JSON metadata side files.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::config::RunConfig;

/// Write `<stem>.csv` and `<stem>.meta.json` under `dir`.
///
/// The metadata carries the config hash, tool and format versions, the full
/// configuration, and extra command-specific fields; `generated-unix-seconds`
/// is informational only and never part of the hash.
pub fn write_artifact(
    dir: &Path,
    stem: &str,
    csv: &str,
    config: &RunConfig,
    extra: serde_json::Value,
) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut f = std::fs::File::create(&csv_path)?;
    f.write_all(csv.as_bytes())?;

    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = serde_json::json!({
        "format-version": spdc_core::export::FORMAT_VERSION,
        "tool-version": env!("CARGO_PKG_VERSION"),
        "config-hash": config.hash(),
        "generated-unix-seconds": timestamp,
        "config": config,
        "result": extra,
    });
    let meta_path = dir.join(format!("{stem}.meta.json"));
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;
    Ok(csv_path)
}
