//! Binary erosion and dilation by a Euclidean disk, with replicate borders.
//!
//! The disk of radius `r` is every integer offset `(dx, dy)` with
//! `dx² + dy² <= r²`. Out-of-bounds reads take the nearest border pixel.
//! Each disk row is a horizontal run, so erosion reduces to `2r + 1` run
//! queries per pixel against per-row prefix counts.

use crate::raster::{BinaryMask, Dims};

/// Half-width of each disk row: `widths[|dy|]` is the largest `w` with `w² + dy² <= r²`.
pub fn disk_row_widths(radius: u32) -> Vec<usize> {
    let r2 = (radius as u64) * (radius as u64);
    (0..=radius as u64)
        .map(|dy| {
            let rem = r2 - dy * dy;
            let mut w = (rem as f64).sqrt() as u64;
            while w * w > rem {
                w -= 1;
            }
            while (w + 1) * (w + 1) <= rem {
                w += 1;
            }
            w as usize
        })
        .collect()
}

pub fn erode(mask: &BinaryMask, radius: u32) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    if radius == 0 || w == 0 || h == 0 {
        return mask.clone();
    }
    // misses[y][x] = number of unset pixels in row y strictly before x
    let misses: Vec<Vec<u32>> = (0..h)
        .map(|y| {
            let mut acc = Vec::with_capacity(w + 1);
            acc.push(0u32);
            for x in 0..w {
                acc.push(acc[x] + u32::from(!mask.get(x, y)));
            }
            acc
        })
        .collect();
    let widths = disk_row_widths(radius);
    let r = radius as isize;
    BinaryMask::from_fn(w, h, |x, y| {
        (-r..=r).all(|dy| {
            let row = (y as isize + dy).clamp(0, h as isize - 1) as usize;
            let half = widths[dy.unsigned_abs()];
            let lo = x.saturating_sub(half);
            let hi = (x + half).min(w - 1);
            misses[row][hi + 1] == misses[row][lo]
        })
    })
}

pub fn dilate(mask: &BinaryMask, radius: u32) -> BinaryMask {
    erode(&mask.not(), radius).not()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_widths_match_disk_definition() {
        assert_eq!(disk_row_widths(0), vec![0]);
        assert_eq!(disk_row_widths(1), vec![1, 0]);
        assert_eq!(disk_row_widths(5), vec![5, 4, 4, 4, 3, 0]);
    }

    #[test]
    fn erosion_of_full_plane_is_full() {
        let m = BinaryMask::full(7, 5);
        assert_eq!(erode(&m, 3), m);
    }

    #[test]
    fn dilate_single_pixel_gives_disk() {
        let mut m = BinaryMask::empty(11, 11);
        m.set(5, 5, true);
        let d = dilate(&m, 3);
        // lattice points with dx²+dy² <= 9
        assert_eq!(d.count(), 29);
        assert!(d.get(5, 2) && d.get(8, 5) && d.get(7, 7) && !d.get(8, 7));
    }

    #[test]
    fn replicate_border_keeps_edge_pixels() {
        // a set touching the left border is not eroded from that side
        let m = BinaryMask::from_fn(10, 3, |x, _| x < 4);
        let e = erode(&m, 2);
        for y in 0..3 {
            assert!(e.get(0, y) && e.get(1, y));
            assert!(!e.get(2, y) && !e.get(3, y));
        }
    }
}
