//! Runs blindspin experiments from JSON configurations and writes result tables.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod figures;
pub mod table;

use std::path::{Path, PathBuf};

use blindspin_core::eigensolve::SpectralCache;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};

/// Environment variable overriding the cache directory.
pub const CACHE_ENV: &str = "BLINDSPIN_CACHE";

/// Cache directory by precedence: explicit flag, environment, configuration.
pub fn resolve_cache(flag: Option<&Path>, cfg: &ExperimentConfig) -> Option<PathBuf> {
    flag.map(Path::to_path_buf)
        .or_else(|| std::env::var_os(CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.cache_dir.clone())
}

/// Computes every table first and writes files only if all succeed.
pub fn execute(cfg: ExperimentConfig, cache: Option<PathBuf>) -> CliResult<Vec<PathBuf>> {
    let cache = cache.map(SpectralCache::new).transpose()?;
    let stem = cfg.output_path.clone();
    let prov = table::Provenance::new(cfg.hash_hex());
    let ctx = experiments::Context::new(cfg, cache);
    let (tables, mut plot) = experiments::run(&ctx)?;
    if let Some(parent) = stem.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut written = Vec::new();
    for t in &tables {
        written.extend(t.write(&stem, &prov)?);
    }
    plot.table = tables[0].paths(&stem).0.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let mut plot_path = stem.into_os_string();
    plot_path.push(".plot.json");
    let plot_path = PathBuf::from(plot_path);
    std::fs::write(&plot_path, serde_json::to_string_pretty(&plot)?)?;
    written.push(plot_path);
    Ok(written)
}
