use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{encode_labels, write_atomic};
use crate::error::{Error, Result};
use crate::guidance::{
    CLICK_DIAMETER, SamplingParams, ThicknessSchedule, deform_with_thickness, no_guidance,
    synth_clickmap,
};
use crate::harness::Scene;
use crate::raster::{Dims, GuidanceMap};
use crate::rng::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuidanceKind {
    Trimap,
    Scribblemap,
    Clickmap,
    NoGuidance,
}

impl GuidanceKind {
    pub const ALL: [GuidanceKind; 4] = [
        GuidanceKind::Trimap,
        GuidanceKind::Scribblemap,
        GuidanceKind::Clickmap,
        GuidanceKind::NoGuidance,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GuidanceKind::Trimap => "trimap",
            GuidanceKind::Scribblemap => "scribblemap",
            GuidanceKind::Clickmap => "clickmap",
            GuidanceKind::NoGuidance => "no_guidance",
        }
    }
}

impl std::str::FromStr for GuidanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GuidanceKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown guidance kind `{s}`")))
    }
}

impl std::fmt::Display for GuidanceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestsetParams {
    /// Scribbles use the thickness at the end of the decay.
    pub schedule: ThicknessSchedule,
    pub click_diameter: u32,
    pub sampling: SamplingParams,
}

impl Default for TestsetParams {
    fn default() -> Self {
        TestsetParams {
            schedule: ThicknessSchedule::default(),
            click_diameter: CLICK_DIAMETER,
            sampling: SamplingParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub path: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSetManifest {
    pub kind: GuidanceKind,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

/// Guidance maps in scene order, with their manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct TestSet {
    pub kind: GuidanceKind,
    pub seed: u64,
    pub maps: Vec<(String, GuidanceMap)>,
}

fn guidance_for(
    scene: &Scene,
    kind: GuidanceKind,
    params: &TestsetParams,
    seed: u64,
) -> Result<GuidanceMap> {
    let mut rng = Rng::derive(seed, &format!("{kind}/{}", scene.id));
    match kind {
        GuidanceKind::Trimap => Ok(scene.trimap.clone()),
        GuidanceKind::Scribblemap => {
            let s = &params.schedule;
            s.validate()?;
            deform_with_thickness(
                &scene.trimap,
                s.thickness_at(s.decay_steps),
                &params.sampling,
                &mut rng,
            )
        }
        GuidanceKind::Clickmap => synth_clickmap(
            &scene.trimap,
            params.click_diameter,
            &params.sampling,
            &mut rng,
        ),
        GuidanceKind::NoGuidance => Ok(no_guidance(scene.alpha.width(), scene.alpha.height())),
    }
}

/// One guidance map per scene, derived from each scene's evaluation trimap.
pub fn build_testset(
    scenes: &[Scene],
    kind: GuidanceKind,
    params: &TestsetParams,
    seed: u64,
) -> Result<TestSet> {
    let maps = scenes
        .par_iter()
        .map(|s| Ok((s.id.clone(), guidance_for(s, kind, params, seed)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(TestSet { kind, seed, maps })
}

/// Writes `<dir>/<id>.png` for each map and `<dir>/manifest.json`; entry
/// paths are relative to `root` when `dir` lies under it.
pub fn write_testset(root: &Path, dir: &Path, set: &TestSet) -> Result<TestSetManifest> {
    let rel = dir.strip_prefix(root).unwrap_or(dir);
    let entries = set
        .maps
        .par_iter()
        .map(|(id, map)| {
            let file = format!("{id}.png");
            write_atomic(&dir.join(&file), &encode_labels(map)?)?;
            Ok(ManifestEntry {
                id: id.clone(),
                path: rel.join(&file).to_string_lossy().replace('\\', "/"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = TestSetManifest {
        kind: set.kind,
        seed: set.seed,
        entries,
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    write_atomic(&dir.join("manifest.json"), &json)?;
    Ok(manifest)
}
