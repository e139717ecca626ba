//! Progressive trimap deformation: turning trimaps into scribblemaps,
//! clickmaps, and the no-guidance map.
//!
//! The pipeline per region is sample points → fit cubic scribbles → clip to
//! the trimap region; the two clipped masks are then merged as
//! `G = 0.5 + 0.5·P_fg − 0.5·P_bg`.

mod sampling;
mod schedule;
mod scribble;

pub use sampling::{ATTEMPTS_PER_POINT, PointSet, Region, sample_points};
pub use schedule::{ThicknessSchedule, thickness_at};
pub use scribble::{CubicCurve, STAMP_SPACING, ScribbleMask, fit_cubic, fit_scribble, stamp_disk};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::raster::{BinaryMask, Dims, GuidanceMap, Label, LabelMap, Trimap, ensure_same_dims};
use crate::rng::Rng;
use crate::trimap::masks;

/// Point-sampling parameters shared by scribble and click synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingParams {
    /// Per region (foreground and background each).
    pub max_points: usize,
    pub min_dist: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams {
            max_points: 10,
            min_dist: 50.0,
        }
    }
}

/// Diameter of synthesized clicks, in pixels.
pub const CLICK_DIAMETER: u32 = 40;

/// `P = S ∧ region`.
pub fn clip_scribble(s: &ScribbleMask, region_mask: &BinaryMask) -> Result<BinaryMask> {
    ensure_same_dims("region_mask", s, region_mask)?;
    s.and(region_mask)
}

/// 1 on `p_fg`, 0 on `p_bg`, 0.5 elsewhere. The masks must not overlap.
pub fn compose_guidance(p_fg: &BinaryMask, p_bg: &BinaryMask) -> Result<GuidanceMap> {
    ensure_same_dims("p_bg", p_fg, p_bg)?;
    if let Some((x, y)) = p_fg.and(p_bg)?.ones().next() {
        return Err(Error::Overlap { x, y });
    }
    Ok(LabelMap::from_fn(
        p_fg.width(),
        p_fg.height(),
        |x, y| match (p_fg.get(x, y), p_bg.get(x, y)) {
            (true, _) => Label::Foreground,
            (_, true) => Label::Background,
            _ => Label::Unknown,
        },
    ))
}

/// The constant-0.5 map used when no guidance is given.
pub fn no_guidance(width: usize, height: usize) -> GuidanceMap {
    LabelMap::filled(width, height, Label::Unknown)
}

fn stamp_points(points: &PointSet, diameter: u32, width: usize, height: usize) -> BinaryMask {
    let mut mask = BinaryMask::empty(width, height);
    for &(x, y) in &points.points {
        stamp_disk(&mut mask, x as f64, y as f64, diameter as f64 / 2.0);
    }
    mask
}

/// Draws filled disks of `diameter` at the given points, clipped to the
/// trimap's foreground and background masks respectively.
pub fn make_clickmap(
    fg_pts: &PointSet,
    bg_pts: &PointSet,
    diameter: u32,
    trimap: &Trimap,
) -> Result<GuidanceMap> {
    if diameter < 1 {
        return Err(Error::InvalidParameter(
            "click diameter must be >= 1".into(),
        ));
    }
    let (w, h) = (trimap.width(), trimap.height());
    let (fg_mask, bg_mask) = masks(trimap);
    let p_fg = stamp_points(fg_pts, diameter, w, h).and(&fg_mask)?;
    let p_bg = stamp_points(bg_pts, diameter, w, h).and(&bg_mask)?;
    compose_guidance(&p_fg, &p_bg)
}

fn sample_regions(
    trimap: &Trimap,
    params: &SamplingParams,
    rng: &mut Rng,
) -> (PointSet, PointSet, BinaryMask, BinaryMask) {
    let (fg_mask, bg_mask) = masks(trimap);
    let fg = sample_points(
        &fg_mask,
        params.max_points,
        params.min_dist,
        Region::Foreground,
        rng,
    );
    let bg = sample_points(
        &bg_mask,
        params.max_points,
        params.min_dist,
        Region::Background,
        rng,
    );
    (fg, bg, fg_mask, bg_mask)
}

/// Samples click points in each trimap region and draws a clickmap.
pub fn synth_clickmap(
    trimap: &Trimap,
    diameter: u32,
    params: &SamplingParams,
    rng: &mut Rng,
) -> Result<GuidanceMap> {
    let (fg, bg, _, _) = sample_regions(trimap, params, rng);
    make_clickmap(&fg, &bg, diameter, trimap)
}

/// Scribblemap at an explicit stroke thickness.
pub fn deform_with_thickness(
    trimap: &Trimap,
    thickness: u32,
    params: &SamplingParams,
    rng: &mut Rng,
) -> Result<GuidanceMap> {
    let (w, h) = (trimap.width(), trimap.height());
    // Points are drawn before the thickness is used, so for a fixed seed the
    // strokes at different thicknesses share their centerlines.
    let (fg, bg, fg_mask, bg_mask) = sample_regions(trimap, params, rng);
    let s_fg = fit_scribble(&fg, thickness, w, h)?;
    let s_bg = fit_scribble(&bg, thickness, w, h)?;
    let p_fg = clip_scribble(&s_fg, &fg_mask)?;
    let p_bg = clip_scribble(&s_bg, &bg_mask)?;
    compose_guidance(&p_fg, &p_bg)
}

/// Deforms a trimap into the scribblemap for training step `step`.
pub fn deform(
    trimap: &Trimap,
    step: u64,
    sched: &ThicknessSchedule,
    rng: &mut Rng,
) -> Result<GuidanceMap> {
    sched.validate()?;
    deform_with_thickness(
        trimap,
        sched.thickness_at(step),
        &SamplingParams::default(),
        rng,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_cases() {
        let e = BinaryMask::empty(4, 3);
        let f = BinaryMask::full(4, 3);
        assert_eq!(compose_guidance(&e, &e).unwrap(), no_guidance(4, 3));
        assert_eq!(
            compose_guidance(&f, &e).unwrap().count(Label::Foreground),
            12
        );
        assert!(matches!(
            compose_guidance(&f, &f),
            Err(Error::Overlap { x: 0, y: 0 })
        ));
    }

    #[test]
    fn clip_cases() {
        let s = BinaryMask::from_fn(5, 5, |x, y| (x * y) % 3 == 0);
        assert_eq!(clip_scribble(&s, &BinaryMask::full(5, 5)).unwrap(), s);
        assert!(clip_scribble(&s, &BinaryMask::empty(5, 5)).unwrap().none());
        assert!(clip_scribble(&s, &BinaryMask::empty(4, 5)).is_err());
    }

    #[test]
    fn clickmap_without_points() {
        let t = LabelMap::filled(8, 8, Label::Foreground);
        let g = make_clickmap(
            &PointSet::empty(Region::Foreground),
            &PointSet::empty(Region::Background),
            40,
            &t,
        )
        .unwrap();
        assert_eq!(g, no_guidance(8, 8));
    }

    #[test]
    fn deform_all_unknown() {
        let t = no_guidance(32, 32);
        let g = deform(&t, 0, &ThicknessSchedule::default(), &mut Rng::new(5)).unwrap();
        assert_eq!(g, t);
    }

    #[test]
    fn deform_at_start_recovers_trimap_on_small_canvas() {
        // an 800 px stroke covers a 64 px canvas entirely, so the clipped
        // scribbles are the trimap regions themselves
        let t = LabelMap::from_fn(64, 64, |x, _| match x {
            0..20 => Label::Background,
            20..40 => Label::Unknown,
            _ => Label::Foreground,
        });
        let g = deform(&t, 0, &ThicknessSchedule::default(), &mut Rng::new(11)).unwrap();
        assert_eq!(g, t);
    }
}
