//! Desk-scale dataset synthesis, guidance test sets, batch evaluation and
//! stability reporting.
//!
//! On-disk layout: `<root>/{image,alpha,trimap,guidance,pred,fg,bg}/<id>.png`.
//! Per-scene randomness is keyed by `(seed, id)`, so results never depend on
//! worker count or processing order.

mod eval;
mod stability;
mod synth;
mod testset;

pub use eval::{EvalReport, EvalRow, MeanMetrics, mean_metrics, run_eval, write_report};
pub use stability::{
    BlurOracle, GroundTruth, Predictor, StabilityReport, VariantSummary, population_std,
    stability_report,
};
pub use synth::{Scene, eval_trimap, load_scenes, synth_scenes, write_scenes};
pub use testset::{
    GuidanceKind, ManifestEntry, TestSet, TestSetManifest, TestsetParams, build_testset,
    write_testset,
};

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const IMAGE_DIR: &str = "image";
pub const ALPHA_DIR: &str = "alpha";
pub const TRIMAP_DIR: &str = "trimap";
pub const GUIDANCE_DIR: &str = "guidance";
pub const PRED_DIR: &str = "pred";
pub const FG_DIR: &str = "fg";
pub const BG_DIR: &str = "bg";

pub fn map_path(root: &Path, dir: &str, id: &str) -> PathBuf {
    root.join(dir).join(format!("{id}.png"))
}

/// Sorted stems of the `.png` files in `dir`.
pub fn list_ids(dir: &Path) -> Result<Vec<String>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::from(e).at(dir))?;
    let mut ids = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::from(e).at(dir))?.path();
        if path.extension().is_some_and(|e| e == "png")
            && let Some(stem) = path.file_stem().and_then(|s| s.to_str())
        {
            ids.push(stem.to_string());
        }
    }
    ids.sort();
    Ok(ids)
}

/// Runs `f` on a pool of `jobs` workers (0 = one per logical core).
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
