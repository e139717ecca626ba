//! Trimaps from ground-truth alpha, and the known/transition partition.

use crate::morphology::erode;
use crate::raster::{AlphaMatte, BinaryMask, Dims, Label, LabelMap, Trimap};
use crate::rng::Rng;

/// Alpha within this distance of 0 or 1 counts as pure background or foreground.
pub const PURE_EPS: f64 = 1.0 / 255.0;

/// Radius range, at 512 px, for randomized trimap generation.
pub const RANDOM_RADIUS_RANGE: (u32, u32) = (5, 30);

pub fn pure_foreground(alpha: &AlphaMatte) -> BinaryMask {
    BinaryMask::from_fn(alpha.width(), alpha.height(), |x, y| {
        alpha.get(x, y) >= 1.0 - PURE_EPS
    })
}

pub fn pure_background(alpha: &AlphaMatte) -> BinaryMask {
    BinaryMask::from_fn(alpha.width(), alpha.height(), |x, y| {
        alpha.get(x, y) <= PURE_EPS
    })
}

/// Shrinks the pure-foreground set by a disk of `fg_shrink` px and the
/// pure-background set by a disk of `bg_shrink` px; everything else is unknown.
pub fn make_trimap(alpha: &AlphaMatte, fg_shrink: u32, bg_shrink: u32) -> Trimap {
    let fg = erode(&pure_foreground(alpha), fg_shrink);
    let bg = erode(&pure_background(alpha), bg_shrink);
    LabelMap::from_fn(alpha.width(), alpha.height(), |x, y| {
        if fg.get(x, y) {
            Label::Foreground
        } else if bg.get(x, y) {
            Label::Background
        } else {
            Label::Unknown
        }
    })
}

/// Draws `(fg_shrink, bg_shrink)` uniformly from [`RANDOM_RADIUS_RANGE`],
/// scaled linearly from 512 px to `size` and floored at 1.
pub fn random_radii(rng: &mut Rng, size: usize) -> (u32, u32) {
    let (lo, hi) = RANDOM_RADIUS_RANGE;
    let mut draw = || {
        let r = rng.range_inclusive(lo as u64, hi as u64) as f64;
        ((r * size as f64 / 512.0).round() as u32).max(1)
    };
    let fg = draw();
    let bg = draw();
    (fg, bg)
}

/// Known (FG ∪ BG) and transition pixels of a trimap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegionPartition {
    pub known: BinaryMask,
    pub transition: BinaryMask,
}

pub fn partition(trimap: &Trimap) -> RegionPartition {
    let transition = trimap.mask_of(Label::Unknown);
    RegionPartition {
        known: transition.not(),
        transition,
    }
}

/// `(fg, bg)` masks of a trimap.
pub fn masks(trimap: &Trimap) -> (BinaryMask, BinaryMask) {
    (
        trimap.mask_of(Label::Foreground),
        trimap.mask_of(Label::Background),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_alpha_gives_background() {
        let t = make_trimap(&AlphaMatte::filled(9, 9, 0.0), 3, 4);
        assert_eq!(t.count(Label::Background), 81);
    }

    #[test]
    fn zero_radii_threshold_binary_alpha() {
        let a = AlphaMatte::from_fn(8, 8, |x, _| if x < 3 { 1.0 } else { 0.0 });
        let t = make_trimap(&a, 0, 0);
        assert_eq!(t.count(Label::Unknown), 0);
        assert_eq!(t.count(Label::Foreground), 24);
    }

    #[test]
    fn constant_mid_alpha_is_all_unknown() {
        let t = make_trimap(&AlphaMatte::filled(5, 5, 0.5), 1, 1);
        assert_eq!(t.count(Label::Unknown), 25);
    }

    #[test]
    fn partition_cases() {
        let p = partition(&LabelMap::filled(4, 4, Label::Unknown));
        assert!(p.known.none());
        assert_eq!(p.transition.count(), 16);

        let p = partition(&LabelMap::filled(4, 4, Label::Foreground));
        assert_eq!(p.known.count(), 16);

        let checker = LabelMap::from_fn(4, 4, |x, y| {
            if (x + y) % 2 == 0 {
                Label::Background
            } else {
                Label::Unknown
            }
        });
        let p = partition(&checker);
        assert_eq!(p.known.count(), 8);
        assert_eq!(p.transition.count(), 8);
    }

    #[test]
    fn mask_cases() {
        let (fg, bg) = masks(&LabelMap::filled(3, 3, Label::Unknown));
        assert!(fg.none() && bg.none());
        let (fg, bg) = masks(&LabelMap::filled(3, 3, Label::Foreground));
        assert_eq!(fg.count(), 9);
        assert!(bg.none());
    }

    #[test]
    fn random_radii_scale_with_size() {
        let mut rng = Rng::new(3);
        for _ in 0..50 {
            let (f, b) = random_radii(&mut rng, 512);
            assert!((5..=30).contains(&f) && (5..=30).contains(&b));
            let (f, b) = random_radii(&mut rng, 64);
            assert!((1..=4).contains(&f) && (1..=4).contains(&b));
        }
    }
}
