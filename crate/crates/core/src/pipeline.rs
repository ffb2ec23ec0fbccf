//! The six-stage segmentation pipeline and its two-mode comparison.
//!
//! | stage | image | produced by |
//! |-------|-------|-------------|
//! | S0 | gray | [`to_grayscale`] (identity on gray input) |
//! | S1 | binary | Otsu + [`apply_threshold`], or [`binarize_fixed`] |
//! | S2 | binary gradient mask | [`binary_gradient_mask`] of S1 |
//! | S3 | gradient magnitude | [`sobel`] of S2, quantized to 0–255 |
//! | S4 | dilated | [`dilate`] of the non-zero pixels of S3 |
//! | S5 | labels | [`watershed_transform`] of S4 rendered as 0/255 |

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::gradient::{binary_gradient_mask, sobel, GradientError};
use crate::morphology::{dilate, StructuringElement};
use crate::raster::{to_grayscale, AnyImage, BinaryImage, GrayImage};
use crate::threshold::{
    apply_threshold, binarize_fixed, histogram, otsu_threshold, ThresholdReport,
    DEFAULT_FIXED_THRESHOLD,
};
use crate::watershed::{watershed_transform, Connectivity, LabelImage, WATERSHED};

/// Which branch produces the S1 binary image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Mode {
    #[serde(rename = "threshold")]
    WithThreshold,
    #[serde(rename = "no-threshold")]
    WithoutThreshold,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::WithThreshold, Mode::WithoutThreshold];

    pub fn name(self) -> &'static str {
        match self {
            Mode::WithThreshold => "threshold",
            Mode::WithoutThreshold => "no-threshold",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "threshold" => Ok(Mode::WithThreshold),
            "no-threshold" => Ok(Mode::WithoutThreshold),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Stage {
    #[serde(rename = "s0_gray")]
    Gray,
    #[serde(rename = "s1_binary")]
    Binary,
    #[serde(rename = "s2_bgm")]
    Bgm,
    #[serde(rename = "s3_gradmag")]
    GradMag,
    #[serde(rename = "s4_dilated")]
    Dilated,
    #[serde(rename = "s5_labels")]
    Labels,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Gray,
        Stage::Binary,
        Stage::Bgm,
        Stage::GradMag,
        Stage::Dilated,
        Stage::Labels,
    ];

    /// Stable identifier, also the stem of the stage's dump file.
    pub fn name(self) -> &'static str {
        match self {
            Stage::Gray => "s0_gray",
            Stage::Binary => "s1_binary",
            Stage::Bgm => "s2_bgm",
            Stage::GradMag => "s3_gradmag",
            Stage::Dilated => "s4_dilated",
            Stage::Labels => "s5_labels",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("pipeline degenerate at stage {stage}: {reason}")]
    Degenerate { stage: Stage, reason: String },
}

impl PipelineError {
    pub fn stage(&self) -> Option<Stage> {
        match self {
            PipelineError::Degenerate { stage, .. } => Some(*stage),
            PipelineError::InvalidConfig(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub connectivity: Connectivity,
    pub se: StructuringElement,
    /// Scales the gradient-mask threshold; must be positive.
    pub fudge: f64,
    /// S1 threshold when running without Otsu.
    pub fixed_binarize_t: u8,
    /// Seed for label colorization.
    pub color_seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::WithThreshold,
            connectivity: Connectivity::Four,
            se: StructuringElement::default(),
            fudge: 1.0,
            fixed_binarize_t: DEFAULT_FIXED_THRESHOLD,
            color_seed: 1,
        }
    }
}

impl PipelineConfig {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if !(self.fudge.is_finite() && self.fudge > 0.0) {
            return Err(PipelineError::InvalidConfig(format!(
                "fudge must be positive, got {}",
                self.fudge
            )));
        }
        Ok(())
    }
}

/// Wall-clock time per stage plus the whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StageTimes {
    pub stages: [Duration; 6],
    pub total: Duration,
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

impl StageTimes {
    pub fn stage_ms(&self) -> [f64; 6] {
        self.stages.map(millis)
    }

    pub fn total_ms(&self) -> f64 {
        millis(self.total)
    }
}

/// Every intermediate image of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub mode: Mode,
    pub s0_gray: GrayImage,
    pub s1_binary: BinaryImage,
    pub s2_bgm: BinaryImage,
    pub s3_gradmag: GrayImage,
    pub s4_dilated: BinaryImage,
    pub s5_labels: LabelImage,
    /// Otsu's choice for S1; `None` without thresholding.
    pub threshold_report: Option<ThresholdReport>,
    /// Otsu's choice on the S2 magnitude histogram, before tuning.
    pub bgm_report: ThresholdReport,
    /// The tuned threshold actually applied in S2.
    pub bgm_threshold: u8,
    pub stage_times: StageTimes,
}

impl PipelineResult {
    /// True when S1 had no edges, so S2 onward are empty.
    pub fn flat_gradient(&self) -> bool {
        self.bgm_report.degenerate
    }

    pub fn summary(&self) -> ModeSummary {
        ModeSummary {
            mode: self.mode,
            threshold: self.threshold_report.as_ref().map(|r| r.threshold),
            basin_count: self.s5_labels.basin_count(),
            watershed_pixels: self.s5_labels.watershed_pixel_count(),
            stage_ms: self.stage_times.stage_ms(),
            total_ms: self.stage_times.total_ms(),
        }
    }

    /// Equality of every stage image, ignoring timings.
    pub fn same_images(&self, other: &Self) -> bool {
        self.s0_gray == other.s0_gray
            && self.s1_binary == other.s1_binary
            && self.s2_bgm == other.s2_bgm
            && self.s3_gradmag == other.s3_gradmag
            && self.s4_dilated == other.s4_dilated
            && self.s5_labels == other.s5_labels
    }
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed();
    out
}

/// Runs S0–S5 on `input`.
///
/// Fails with [`PipelineError::Degenerate`] when Otsu cannot split S1 (a
/// constant image in threshold mode) or when S2's magnitude is the same
/// non-zero value everywhere. An S1 without any edge is not an error: S2–S4
/// come out empty and S5 is a single basin.
pub fn run_pipeline(
    input: &AnyImage,
    cfg: &PipelineConfig,
) -> Result<PipelineResult, PipelineError> {
    cfg.validate()?;
    let run_start = Instant::now();
    let mut times = StageTimes::default();

    let s0_gray = timed(&mut times.stages[0], || match input {
        AnyImage::Gray(g) => g.clone(),
        AnyImage::Color(c) => to_grayscale(c),
    });

    let (s1_binary, threshold_report) = timed(&mut times.stages[1], || match cfg.mode {
        Mode::WithThreshold => {
            let report =
                otsu_threshold(&histogram(&s0_gray)).map_err(|e| PipelineError::Degenerate {
                    stage: Stage::Binary,
                    reason: e.to_string(),
                })?;
            Ok((apply_threshold(&s0_gray, report.threshold), Some(report)))
        }
        Mode::WithoutThreshold => Ok((binarize_fixed(&s0_gray, cfg.fixed_binarize_t), None)),
    })?;

    let bgm = timed(&mut times.stages[2], || {
        binary_gradient_mask(&s1_binary, cfg.fudge)
    })
    .map_err(|e| match e {
        GradientError::InvalidFudge(_) => PipelineError::InvalidConfig(e.to_string()),
        GradientError::UniformGradient(_) => PipelineError::Degenerate {
            stage: Stage::Bgm,
            reason: e.to_string(),
        },
    })?;

    let s3_gradmag = timed(&mut times.stages[3], || {
        sobel(&bgm.mask).quantized_magnitude()
    });

    let s4_dilated = timed(&mut times.stages[4], || {
        dilate(&BinaryImage::from_gray(&s3_gradmag, |v| v > 0), &cfg.se)
    });

    let (s5_labels, _) = timed(&mut times.stages[5], || {
        watershed_transform(&s4_dilated.to_gray(), cfg.connectivity)
    });

    times.total = run_start.elapsed();
    Ok(PipelineResult {
        mode: cfg.mode,
        s0_gray,
        s1_binary,
        s2_bgm: bgm.mask,
        s3_gradmag,
        s4_dilated,
        s5_labels,
        threshold_report,
        bgm_report: bgm.report,
        bgm_threshold: bgm.tuned_threshold,
        stage_times: times,
    })
}

/// Headline numbers of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub mode: Mode,
    pub threshold: Option<u8>,
    pub basin_count: u32,
    pub watershed_pixels: usize,
    pub stage_ms: [f64; 6],
    pub total_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegenerateRun {
    pub mode: Mode,
    pub stage: Option<Stage>,
    pub reason: String,
}

/// Both modes side by side.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub with_threshold: Option<ModeSummary>,
    pub without_threshold: Option<ModeSummary>,
    /// Runs that failed, with the stage that stopped them.
    pub degenerate: Vec<DegenerateRun>,
    /// [`label_agreement`] of the two S5 images; absent if either run failed.
    pub agreement: Option<f64>,
}

impl ComparisonReport {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }
}

/// Builds a report from two finished (or failed) runs.
pub fn compare_outcomes(
    with_threshold: &Result<PipelineResult, PipelineError>,
    without_threshold: &Result<PipelineResult, PipelineError>,
) -> ComparisonReport {
    let mut degenerate = Vec::new();
    for (mode, outcome) in [
        (Mode::WithThreshold, with_threshold),
        (Mode::WithoutThreshold, without_threshold),
    ] {
        if let Err(e) = outcome {
            degenerate.push(DegenerateRun {
                mode,
                stage: e.stage(),
                reason: e.to_string(),
            });
        }
    }
    let agreement = match (with_threshold, without_threshold) {
        (Ok(a), Ok(b)) => Some(label_agreement(&a.s5_labels, &b.s5_labels)),
        _ => None,
    };
    ComparisonReport {
        with_threshold: with_threshold.as_ref().ok().map(PipelineResult::summary),
        without_threshold: without_threshold.as_ref().ok().map(PipelineResult::summary),
        degenerate,
        agreement,
    }
}

/// Runs both modes with otherwise identical settings.
///
/// Only an invalid configuration is an error; degenerate runs are listed in
/// the report.
pub fn compare_modes(
    input: &AnyImage,
    cfg: &PipelineConfig,
) -> Result<ComparisonReport, PipelineError> {
    cfg.validate()?;
    let with = run_pipeline(input, &cfg.clone().with_mode(Mode::WithThreshold));
    let without = run_pipeline(input, &cfg.clone().with_mode(Mode::WithoutThreshold));
    Ok(compare_outcomes(&with, &without))
}

/// Fraction of pixels on which two labelings agree after matching labels.
///
/// Dams only match dams. Basins are paired one-to-one greedily by overlap,
/// largest overlap first, ties to the smaller label of `a` and then of `b`.
/// Unpaired basins agree nowhere.
///
/// Panics if the images differ in size.
pub fn label_agreement(a: &LabelImage, b: &LabelImage) -> f64 {
    assert_eq!(
        (a.width(), a.height()),
        (b.width(), b.height()),
        "label images must have the same dimensions"
    );
    let mut overlap: HashMap<(u32, u32), usize> = HashMap::new();
    for (&la, &lb) in a.labels().iter().zip(b.labels()) {
        *overlap.entry((la, lb)).or_default() += 1;
    }

    let mut pairs: Vec<((u32, u32), usize)> = overlap
        .iter()
        .filter(|((la, lb), _)| *la != WATERSHED && *lb != WATERSHED)
        .map(|(&k, &c)| (k, c))
        .collect();
    pairs.sort_unstable_by(|(ka, ca), (kb, cb)| cb.cmp(ca).then(ka.cmp(kb)));

    let mut used_a = HashMap::new();
    let mut used_b = HashMap::new();
    let mut agree = overlap.get(&(WATERSHED, WATERSHED)).copied().unwrap_or(0);
    for ((la, lb), count) in pairs {
        if used_a.contains_key(&la) || used_b.contains_key(&lb) {
            continue;
        }
        used_a.insert(la, lb);
        used_b.insert(lb, la);
        agree += count;
    }
    agree as f64 / a.labels().len() as f64
}
