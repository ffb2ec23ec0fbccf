//! Sobel gradients and the binary gradient mask.
//!
//! Kernels (x to the right, y downward):
//!
//! ```text
//!        -1  0  1            -1 -2 -1
//!   gx = -2  0  2       gy =  0  0  0
//!        -1  0  1             1  2  1
//! ```
//!
//! Pixels outside the frame replicate the nearest edge pixel.

use thiserror::Error;

use crate::raster::{AsGray, BinaryImage, GrayImage};
use crate::threshold::{histogram, otsu_threshold, ThresholdError, ThresholdReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GradientError {
    #[error("fudge factor must be a positive finite number, got {0}")]
    InvalidFudge(f64),

    /// Every pixel has the same non-zero quantized magnitude, so there is
    /// nothing to separate.
    #[error("gradient magnitude is uniform and non-zero: {0}")]
    UniformGradient(ThresholdError),
}

/// Per-pixel Sobel responses and their Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
    magnitude: Vec<f64>,
}

impl GradientField {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self) -> &[f64] {
        &self.gx
    }

    pub fn gy(&self) -> &[f64] {
        &self.gy
    }

    pub fn magnitude(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn max_magnitude(&self) -> f64 {
        self.magnitude.iter().copied().fold(0.0, f64::max)
    }

    /// Rescales the magnitude linearly so the maximum maps to 255, rounding
    /// half up. An all-zero field stays all zero.
    pub fn quantized_magnitude(&self) -> GrayImage {
        let max = self.max_magnitude();
        let pixels = if max > 0.0 {
            let scale = 255.0 / max;
            self.magnitude
                .iter()
                .map(|&m| (m * scale + 0.5).floor().min(255.0) as u8)
                .collect()
        } else {
            vec![0; self.magnitude.len()]
        };
        GrayImage::new(self.width, self.height, pixels).expect("same dimensions as the field")
    }
}

/// Applies both Sobel kernels with edge replication.
pub fn sobel(img: &impl AsGray) -> GradientField {
    let img = img.as_gray();
    let (w, h) = (img.width(), img.height());
    let src = img.pixels();

    // Replicated one-pixel border.
    let pw = w + 2;
    let mut padded = vec![0i32; pw * (h + 2)];
    for py in 0..h + 2 {
        let sy = py.saturating_sub(1).min(h - 1);
        let row = &src[sy * w..(sy + 1) * w];
        let dst = &mut padded[py * pw..(py + 1) * pw];
        dst[0] = row[0] as i32;
        dst[pw - 1] = row[w - 1] as i32;
        for (d, &s) in dst[1..=w].iter_mut().zip(row) {
            *d = s as i32;
        }
    }

    let n = w * h;
    let mut gx = Vec::with_capacity(n);
    let mut gy = Vec::with_capacity(n);
    let mut magnitude = Vec::with_capacity(n);
    for y in 0..h {
        let top = &padded[y * pw..(y + 1) * pw];
        let mid = &padded[(y + 1) * pw..(y + 2) * pw];
        let bot = &padded[(y + 2) * pw..(y + 3) * pw];
        for x in 0..w {
            let (l, c, r) = (x, x + 1, x + 2);
            let dx = (top[r] + 2 * mid[r] + bot[r]) - (top[l] + 2 * mid[l] + bot[l]);
            let dy = (bot[l] + 2 * bot[c] + bot[r]) - (top[l] + 2 * top[c] + top[r]);
            gx.push(dx as f64);
            gy.push(dy as f64);
            magnitude.push(((dx * dx + dy * dy) as f64).sqrt());
        }
    }

    GradientField {
        width: w,
        height: h,
        gx,
        gy,
        magnitude,
    }
}

/// Result of [`binary_gradient_mask`].
#[derive(Debug, Clone, PartialEq)]
pub struct GradientMask {
    pub mask: BinaryImage,
    /// Magnitude rescaled to 0–255; the image the threshold was chosen on.
    pub quantized: GrayImage,
    /// Otsu's choice on `quantized`, before tuning. Marked degenerate for a
    /// flat gradient.
    pub report: ThresholdReport,
    /// `report.threshold × fudge`, rounded half up and clamped to 255.
    pub tuned_threshold: u8,
}

impl GradientMask {
    /// True when the input had no edges at all.
    pub fn is_flat(&self) -> bool {
        self.report.degenerate
    }
}

fn tune(threshold: u8, fudge: f64) -> u8 {
    (threshold as f64 * fudge + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Marks pixels whose quantized Sobel magnitude strictly exceeds Otsu's
/// threshold on that magnitude, scaled by `fudge`.
///
/// A constant input has zero gradient everywhere; that yields an
/// all-background mask with a degenerate report rather than an error.
pub fn binary_gradient_mask(img: &impl AsGray, fudge: f64) -> Result<GradientMask, GradientError> {
    if !(fudge.is_finite() && fudge > 0.0) {
        return Err(GradientError::InvalidFudge(fudge));
    }
    let quantized = sobel(img).quantized_magnitude();
    let hist = histogram(&quantized);

    if hist.counts()[0] == hist.total() {
        return Ok(GradientMask {
            mask: BinaryImage::empty(quantized.width(), quantized.height()),
            report: ThresholdReport {
                threshold: 0,
                criterion_value: 0.0,
                histogram: hist,
                degenerate: true,
            },
            quantized,
            tuned_threshold: 0,
        });
    }

    let report = otsu_threshold(&hist).map_err(GradientError::UniformGradient)?;
    let tuned_threshold = tune(report.threshold, fudge);
    let mask = BinaryImage::from_gray(&quantized, |v| v > tuned_threshold);
    Ok(GradientMask {
        mask,
        quantized,
        report,
        tuned_threshold,
    })
}
