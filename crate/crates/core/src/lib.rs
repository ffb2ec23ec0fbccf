//! Hybrid image segmentation: optimal thresholding, binary gradient masking,
//! dilation and a flooding watershed, with every intermediate image kept.
//!
//! ```
//! use floodseg::pipeline::{run_pipeline, PipelineConfig};
//! use floodseg::raster::{AnyImage, GrayImage};
//!
//! // Two bright squares on a dark background.
//! let img = GrayImage::from_fn(48, 32, |x, y| {
//!     let in_sq = |x0: usize| (x0..x0 + 10).contains(&x) && (11..21).contains(&y);
//!     if in_sq(8) || in_sq(30) { 220 } else { 30 }
//! });
//! let result = run_pipeline(&AnyImage::Gray(img), &PipelineConfig::default()).unwrap();
//!
//! // Outside background plus the inside of each square.
//! assert_eq!(result.s5_labels.basin_count(), 3);
//! ```
//!
//! Modules mirror the stages: [`raster`] (buffers and Netpbm files),
//! [`threshold`], [`gradient`], [`morphology`], [`watershed`] and the
//! orchestrating [`pipeline`]. The `book/` directory next to the crates has a
//! chapter per stage; its code samples run as doc-tests of this crate.

pub mod gradient;
pub mod morphology;
pub mod pipeline;
pub mod raster;
pub mod threshold;
pub mod watershed;

pub use gradient::{binary_gradient_mask, sobel, GradientField, GradientMask};
pub use morphology::{dilate, se_square3, StructuringElement};
pub use pipeline::{compare_modes, run_pipeline, Mode, PipelineConfig, PipelineResult};
pub use raster::{to_grayscale, AnyImage, BinaryImage, ColorImage, GrayImage};
pub use threshold::{apply_threshold, binarize_fixed, histogram, otsu_threshold, Histogram};
pub use watershed::{regional_minima, watershed_transform, Connectivity, LabelImage, MinimaSet};

// The guide's code samples run as doc-tests of this crate.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/raster.md")]
    mod raster {}
    #[doc = include_str!("../../../book/src/thresholding.md")]
    mod thresholding {}
    #[doc = include_str!("../../../book/src/gradient.md")]
    mod gradient {}
    #[doc = include_str!("../../../book/src/dilation.md")]
    mod dilation {}
    #[doc = include_str!("../../../book/src/watershed.md")]
    mod watershed {}
    #[doc = include_str!("../../../book/src/pipeline.md")]
    mod pipeline {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
