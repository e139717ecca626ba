//! Guidance synthesis, losses, metrics and a toy semantic fusion module for
//! flexible-guidance alpha matting.
//!
//! - [`raster`], [`codec`]: images, mattes, three-valued maps and PNG I/O.
//! - [`trimap`], [`morphology`]: trimaps from ground-truth alpha.
//! - [`guidance`]: progressive trimap deformation into scribble and click maps.
//! - [`metrics`], [`losses`], [`filter`]: evaluation metrics and the training loss.
//! - [`sfm`]: forward-only FPEM + JPU over a four-level pyramid.
//! - [`harness`]: synthetic scenes, test sets, batch evaluation, stability.

pub mod codec;
pub mod error;
pub mod filter;
pub mod guidance;
pub mod harness;
pub mod losses;
pub mod metrics;
pub mod morphology;
pub mod raster;
pub mod rng;
pub mod sfm;
pub mod trimap;

pub use error::{Error, Result};
pub use raster::{
    AlphaMatte, BinaryMask, Dims, GuidanceMap, ImageRgb, Label, LabelMap, Trimap, composite,
};
pub use rng::Rng;
