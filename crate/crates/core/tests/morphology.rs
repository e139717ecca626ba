mod common;

use common::*;
use matteforge::morphology::{dilate, erode};
use matteforge::trimap::{make_trimap, random_radii};
use matteforge::{BinaryMask, Dims, Rng};
use proptest::prelude::*;

#[test]
fn erode_and_dilate_match_brute_force() {
    let mut rng = Rng::new(11);
    for _ in 0..60 {
        let (w, h) = (
            rng.range_inclusive(1, 24) as usize,
            rng.range_inclusive(1, 24) as usize,
        );
        let density = rng.uniform(0.3, 0.95);
        let m = random_mask(&mut rng, w, h, density);
        for r in [0, 1, 2, 3, 5, 9] {
            assert_eq!(erode(&m, r), brute_erode(&m, r), "erode r={r} {w}x{h}");
            assert_eq!(dilate(&m, r), brute_dilate(&m, r), "dilate r={r} {w}x{h}");
        }
    }
}

#[test]
fn make_trimap_matches_brute_force() {
    let mut rng = Rng::new(12);
    for _ in 0..40 {
        let (w, h) = (
            rng.range_inclusive(8, 40) as usize,
            rng.range_inclusive(8, 40) as usize,
        );
        let a = random_alpha(&mut rng, w, h);
        let (rf, rb) = (
            rng.range_inclusive(0, 8) as u32,
            rng.range_inclusive(0, 8) as u32,
        );
        assert_eq!(make_trimap(&a, rf, rb), brute_trimap(&a, rf, rb));
    }
}

#[test]
fn random_radii_scale_with_size() {
    let mut rng = Rng::new(3);
    for _ in 0..200 {
        let (f, b) = random_radii(&mut rng, 512);
        assert!((5..=30).contains(&f) && (5..=30).contains(&b));
        let (f, b) = random_radii(&mut rng, 64);
        assert!((1..=4).contains(&f) && (1..=4).contains(&b), "{f} {b}");
    }
}

fn mask_strategy() -> impl Strategy<Value = BinaryMask> {
    (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), w * h)
            .prop_map(move |v| BinaryMask::new(w, h, v).unwrap())
    })
}

proptest! {
    #[test]
    fn erosion_shrinks_dilation_grows(m in mask_strategy(), r in 0u32..6) {
        let e = erode(&m, r);
        let d = dilate(&m, r);
        prop_assert!(e.is_subset_of(&m));
        prop_assert!(m.is_subset_of(&d));
        prop_assert!(erode(&m, r + 1).is_subset_of(&e));
    }

    #[test]
    fn dilation_is_dual_of_erosion(m in mask_strategy(), r in 0u32..6) {
        prop_assert_eq!(dilate(&m, r), erode(&m.not(), r).not());
    }

    #[test]
    fn trimap_labels_respect_alpha(seed in any::<u64>(), rf in 0u32..6, rb in 0u32..6) {
        let mut rng = Rng::new(seed);
        let a = random_alpha(&mut rng, 24, 20);
        let t = make_trimap(&a, rf, rb);
        for y in 0..t.height() {
            for x in 0..t.width() {
                match t.get(x, y) {
                    matteforge::Label::Foreground => prop_assert!(a.get(x, y) >= 1.0 - 1.0 / 255.0),
                    matteforge::Label::Background => prop_assert!(a.get(x, y) <= 1.0 / 255.0),
                    matteforge::Label::Unknown => {}
                }
            }
        }
    }
}
