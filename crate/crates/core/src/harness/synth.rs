use std::path::Path;

use rayon::prelude::*;

use crate::codec::{
    dequantize, encode_labels, encode_matte, encode_rgb, quantize, read_labels, read_matte,
    read_rgb, write_atomic,
};
use crate::error::{Error, Result};
use crate::filter::gaussian_blur;
use crate::harness::{ALPHA_DIR, BG_DIR, FG_DIR, IMAGE_DIR, TRIMAP_DIR, list_ids, map_path};
use crate::raster::{AlphaMatte, Dims, ImageRgb, Label, Trimap, composite};
use crate::rng::Rng;
use crate::trimap::{make_trimap, random_radii};

/// One matting sample. `fg`/`bg` are absent for datasets that ship only the
/// composited image.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub id: String,
    pub fg: Option<ImageRgb>,
    pub bg: Option<ImageRgb>,
    pub alpha: AlphaMatte,
    pub image: ImageRgb,
    /// Evaluation trimap.
    pub trimap: Trimap,
}

fn quantized(v: f64) -> f64 {
    dequantize(quantize(v))
}

fn random_color(rng: &mut Rng) -> [f64; 3] {
    [rng.unit(), rng.unit(), rng.unit()]
}

fn mix(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    std::array::from_fn(|i| a[i] + t * (b[i] - a[i]))
}

/// Diagonal gradient between two colors, overlaid with a checker of a third.
fn foreground_texture(size: usize, rng: &mut Rng) -> ImageRgb {
    let (a, b, c) = (random_color(rng), random_color(rng), random_color(rng));
    let cell = rng.range_inclusive(4, 16) as usize;
    let s = (2 * size).max(1) as f64;
    ImageRgb::from_fn(size, size, |x, y| {
        let base = mix(a, b, (x + y) as f64 / s);
        let v = if (x / cell + y / cell).is_multiple_of(2) {
            mix(base, c, 0.3)
        } else {
            base
        };
        v.map(quantized)
    })
}

/// Stripes at a random period and orientation over a vertical gradient.
fn background_texture(size: usize, rng: &mut Rng) -> ImageRgb {
    let (a, b, c) = (random_color(rng), random_color(rng), random_color(rng));
    let period = rng.range_inclusive(6, 24) as usize;
    let diagonal = rng.below(2) == 1;
    ImageRgb::from_fn(size, size, |x, y| {
        let base = mix(a, b, y as f64 / size.max(1) as f64);
        let k = if diagonal { x + y } else { x };
        let v = if (k / period).is_multiple_of(2) {
            mix(base, c, 0.5)
        } else {
            base
        };
        v.map(quantized)
    })
}

enum Shape {
    Disk {
        cx: f64,
        cy: f64,
        r: f64,
    },
    /// Star-shaped polygon around a center; vertices in angular order.
    Polygon {
        verts: Vec<(f64, f64)>,
    },
}

impl Shape {
    fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Shape::Disk { cx, cy, r } => (x - cx).powi(2) + (y - cy).powi(2) <= r * r,
            Shape::Polygon { verts } => {
                let mut inside = false;
                let n = verts.len();
                for i in 0..n {
                    let (xi, yi) = verts[i];
                    let (xj, yj) = verts[(i + n - 1) % n];
                    if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }
}

fn random_shape(
    size: f64,
    min_r: f64,
    max_r: f64,
    margin: f64,
    rng: &mut Rng,
    disk: bool,
) -> Shape {
    let r = rng.uniform(min_r, max_r.max(min_r + 1e-9));
    let lo = r + margin;
    let hi = (size - r - margin).max(lo);
    let cx = rng.uniform(lo, hi + 1e-9);
    let cy = rng.uniform(lo, hi + 1e-9);
    if disk {
        return Shape::Disk { cx, cy, r };
    }
    let n = rng.range_inclusive(5, 8) as usize;
    let verts = (0..n)
        .map(|i| {
            let theta = std::f64::consts::TAU * (i as f64 + rng.uniform(-0.3, 0.3)) / n as f64;
            let rr = r * rng.uniform(0.6, 1.0);
            (cx + rr * theta.cos(), cy + rr * theta.sin())
        })
        .collect();
    Shape::Polygon { verts }
}

const MAX_ALPHA_ATTEMPTS: usize = 64;

/// Union of one to three disks/polygons, Gaussian-blurred at a random
/// radius in [1, 8] px, quantized to 8 bits. Always holds both pure
/// foreground and pure background pixels.
fn synth_alpha(size: usize, rng: &mut Rng) -> Result<AlphaMatte> {
    let s = size as f64;
    for _ in 0..MAX_ALPHA_ATTEMPTS {
        let blur_radius = rng.uniform(1.0, 8.0);
        let sigma = blur_radius / 2.0;
        let core = 3.0 * sigma + 3.0;
        let margin = 3.0 * sigma + 2.0;
        let max_r = (0.3 * s).max(core);
        let n_shapes = rng.range_inclusive(1, 3);
        // the first shape is a disk large enough to keep a pure interior
        let mut shapes = vec![random_shape(s, core, max_r, margin, rng, true)];
        for _ in 1..n_shapes {
            let disk = rng.below(2) == 0;
            shapes.push(random_shape(s, 0.08 * s, max_r, margin, rng, disk));
        }
        let hard: Vec<f64> = (0..size * size)
            .map(|i| {
                let (x, y) = ((i % size) as f64, (i / size) as f64);
                if shapes.iter().any(|sh| sh.contains(x, y)) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let soft = gaussian_blur(&hard, size, size, sigma);
        let alpha = AlphaMatte::from_fn(size, size, |x, y| quantized(soft[y * size + x]));
        let has_fg = alpha
            .data()
            .iter()
            .any(|&a| a >= 1.0 - crate::trimap::PURE_EPS);
        let has_bg = alpha.data().iter().any(|&a| a <= crate::trimap::PURE_EPS);
        if has_fg && has_bg {
            return Ok(alpha);
        }
    }
    Err(Error::InvalidParameter(format!(
        "could not synthesize a nondegenerate alpha at size {size}"
    )))
}

/// Canonical evaluation trimap: radii drawn from a generator keyed only by
/// the scene id, so every test set of a scene shares it.
pub fn eval_trimap(id: &str, alpha: &AlphaMatte) -> Trimap {
    let mut rng = Rng::derive(0, &format!("trimap/{id}"));
    let (fg, bg) = random_radii(&mut rng, alpha.width().max(alpha.height()));
    let t = make_trimap(alpha, fg, bg);
    if t.count(Label::Unknown) > 0 {
        return t;
    }
    // hard-edged alphas can leave no band at small radii
    make_trimap(alpha, fg + 1, bg + 1)
}

fn synth_one(id: String, size: usize, seed: u64) -> Result<Scene> {
    let mut rng = Rng::derive(seed, &id);
    let alpha = synth_alpha(size, &mut rng)?;
    let fg = foreground_texture(size, &mut rng);
    let bg = background_texture(size, &mut rng);
    let image = composite(&fg, &bg, &alpha)?;
    let trimap = eval_trimap(&id, &alpha);
    Ok(Scene {
        id,
        fg: Some(fg),
        bg: Some(bg),
        alpha,
        image,
        trimap,
    })
}

/// `n` procedural scenes of `size × size` pixels, ids `scene-0000`, ...
pub fn synth_scenes(n: usize, size: usize, seed: u64) -> Result<Vec<Scene>> {
    if n < 1 {
        return Err(Error::InvalidParameter("need at least one scene".into()));
    }
    if size < 64 {
        return Err(Error::InvalidParameter(format!(
            "scene size must be >= 64, got {size}"
        )));
    }
    (0..n)
        .into_par_iter()
        .map(|i| synth_one(format!("scene-{i:04}"), size, seed))
        .collect()
}

pub fn write_scenes(root: &Path, scenes: &[Scene]) -> Result<()> {
    scenes.par_iter().try_for_each(|s| {
        write_atomic(&map_path(root, IMAGE_DIR, &s.id), &encode_rgb(&s.image)?)?;
        write_atomic(&map_path(root, ALPHA_DIR, &s.id), &encode_matte(&s.alpha)?)?;
        write_atomic(
            &map_path(root, TRIMAP_DIR, &s.id),
            &encode_labels(&s.trimap)?,
        )?;
        if let Some(fg) = &s.fg {
            write_atomic(&map_path(root, FG_DIR, &s.id), &encode_rgb(fg)?)?;
        }
        if let Some(bg) = &s.bg {
            write_atomic(&map_path(root, BG_DIR, &s.id), &encode_rgb(bg)?)?;
        }
        Ok(())
    })
}

/// Reads every scene listed under `<root>/alpha`; `image` and `trimap` are
/// required, `fg`/`bg` are picked up when present.
pub fn load_scenes(root: &Path) -> Result<Vec<Scene>> {
    let ids = list_ids(&root.join(ALPHA_DIR))?;
    ids.into_par_iter()
        .map(|id| {
            let alpha = read_matte(&map_path(root, ALPHA_DIR, &id))?;
            let image = read_rgb(&map_path(root, IMAGE_DIR, &id))?;
            let trimap = read_labels(&map_path(root, TRIMAP_DIR, &id))?;
            let optional = |dir| {
                let p = map_path(root, dir, &id);
                if p.exists() {
                    read_rgb(&p).map(Some)
                } else {
                    Ok(None)
                }
            };
            let fg = optional(FG_DIR)?;
            let bg = optional(BG_DIR)?;
            crate::raster::ensure_same_dims("image", &alpha, &image)?;
            crate::raster::ensure_same_dims("trimap", &alpha, &trimap)?;
            Ok(Scene {
                id,
                fg,
                bg,
                alpha,
                image,
                trimap,
            })
        })
        .collect()
}
