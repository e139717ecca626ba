use crate::raster::BinaryMask;
use crate::rng::Rng;

/// Rejection attempts allowed per accepted point.
pub const ATTEMPTS_PER_POINT: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Foreground,
    Background,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    /// `(x, y)` pixel coordinates in sampling order.
    pub points: Vec<(usize, usize)>,
    pub region: Region,
}

impl PointSet {
    pub fn empty(region: Region) -> Self {
        PointSet {
            points: Vec::new(),
            region,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Draws up to `max_points` distinct mask pixels, pairwise at least
/// `min_dist` apart.
///
/// Each point gets [`ATTEMPTS_PER_POINT`] uniform draws over the mask; if all
/// of them land too close to an accepted point (or on one), sampling stops.
pub fn sample_points(
    mask: &BinaryMask,
    max_points: usize,
    min_dist: f64,
    region: Region,
    rng: &mut Rng,
) -> PointSet {
    let candidates: Vec<(usize, usize)> = mask.ones().collect();
    let mut points: Vec<(usize, usize)> = Vec::new();
    if candidates.is_empty() {
        return PointSet { points, region };
    }
    let min_d2 = min_dist * min_dist;
    'outer: while points.len() < max_points {
        for _ in 0..ATTEMPTS_PER_POINT {
            let c = candidates[rng.below(candidates.len() as u64) as usize];
            let ok = points.iter().all(|&p| {
                if p == c {
                    return false;
                }
                let dx = p.0 as f64 - c.0 as f64;
                let dy = p.1 as f64 - c.1 as f64;
                dx * dx + dy * dy >= min_d2
            });
            if ok {
                points.push(c);
                continue 'outer;
            }
        }
        break;
    }
    PointSet { points, region }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mask_gives_no_points() {
        let m = BinaryMask::empty(10, 10);
        assert!(sample_points(&m, 10, 5.0, Region::Foreground, &mut Rng::new(0)).is_empty());
    }

    #[test]
    fn single_pixel_mask() {
        let mut m = BinaryMask::empty(10, 10);
        m.set(3, 7, true);
        for min_dist in [0.0, 50.0] {
            let p = sample_points(&m, 10, min_dist, Region::Background, &mut Rng::new(9));
            assert_eq!(p.points, vec![(3, 7)]);
        }
    }

    #[test]
    fn respects_budget_and_distance() {
        let m = BinaryMask::full(64, 64);
        let p = sample_points(&m, 5, 10.0, Region::Foreground, &mut Rng::new(1));
        assert_eq!(p.len(), 5);
        for (i, a) in p.points.iter().enumerate() {
            for b in &p.points[i + 1..] {
                let d2 = (a.0 as f64 - b.0 as f64).powi(2) + (a.1 as f64 - b.1 as f64).powi(2);
                assert!(d2 >= 100.0);
            }
        }
    }
}
