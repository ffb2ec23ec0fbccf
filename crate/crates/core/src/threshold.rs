//! Global thresholding: gray-level histograms, Otsu's between-class-variance
//! criterion, and the binarization rule `src > t ⇒ foreground`.

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::raster::{BinaryImage, GrayImage};

/// Foreground value used when binary stages are rendered as gray.
pub const MAX_VALUE: u8 = 255;

/// Threshold used by the branch that binarizes without Otsu.
pub const DEFAULT_FIXED_THRESHOLD: u8 = 127;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThresholdError {
    #[error("histogram is empty")]
    EmptyHistogram,

    #[error("histogram has {distinct} distinct gray level(s); at least 2 are needed")]
    DegenerateHistogram { distinct: usize },
}

/// Pixel counts per gray level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Histogram {
    #[serde(with = "counts_serde")]
    counts: [u64; 256],
    total: u64,
}

mod counts_serde {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(counts: &[u64; 256], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(counts.iter())
    }
}

impl Histogram {
    pub fn from_counts(counts: [u64; 256]) -> Result<Self, ThresholdError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(ThresholdError::EmptyHistogram);
        }
        Ok(Self { counts, total })
    }

    pub fn of(img: &GrayImage) -> Self {
        let mut counts = [0u64; 256];
        for &v in img.pixels() {
            counts[v as usize] += 1;
        }
        Self {
            counts,
            total: img.len() as u64,
        }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn distinct_levels(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

/// Tallies gray levels.
pub fn histogram(img: &GrayImage) -> Histogram {
    Histogram::of(img)
}

/// Outcome of an automatic threshold selection.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdReport {
    /// Levels `<= threshold` are background.
    pub threshold: u8,
    /// Between-class variance at `threshold`.
    pub criterion_value: f64,
    #[serde(skip)]
    pub histogram: Histogram,
    /// Set when no threshold could be chosen and `threshold` is a placeholder.
    pub degenerate: bool,
}

/// Selects the level maximizing the between-class variance
/// `ω₀·ω₁·(μ₀ − μ₁)²`, class 0 being levels `<= t`.
///
/// Candidates are restricted to `t` with both classes non-empty. Ties go to
/// the smallest `t`. Comparisons are done on exact integers: with `n₀`, `s₀`
/// the count and level sum of class 0 and `N`, `S` those of the whole image,
///
/// ```text
/// N² · σ²_b(t) = (N·s₀ − n₀·S)² / (n₀ · (N − n₀))
/// ```
///
/// so equal variances compare equal regardless of floating-point rounding.
pub fn otsu_threshold(h: &Histogram) -> Result<ThresholdReport, ThresholdError> {
    let distinct = h.distinct_levels();
    if distinct < 2 {
        return Err(ThresholdError::DegenerateHistogram { distinct });
    }

    // n·s0 <= 255·n² stays within u128 for any histogram of an in-memory image.
    let n = h.total as u128;
    let sum: u128 = h
        .counts
        .iter()
        .enumerate()
        .map(|(v, &c)| v as u128 * c as u128)
        .sum();

    let mut n0: u128 = 0;
    let mut s0: u128 = 0;
    // Best (numerator, denominator) of the scaled criterion.
    let mut best: Option<(u8, BigUint, BigUint)> = None;

    for t in 0..255usize {
        let c = h.counts[t] as u128;
        n0 += c;
        s0 += t as u128 * c;
        if n0 == 0 {
            continue;
        }
        if n0 == n {
            break;
        }
        // An empty level repeats the previous split; the earlier one wins ties.
        if c == 0 && best.is_some() {
            continue;
        }
        let diff = (n * s0).abs_diff(n0 * sum);
        let num = BigUint::from(diff) * BigUint::from(diff);
        let den = BigUint::from(n0) * BigUint::from(n - n0);
        let better = match &best {
            None => true,
            Some((_, bn, bd)) => &num * bd > bn * &den,
        };
        if better {
            best = Some((t as u8, num, den));
        }
    }

    // Two distinct levels guarantee at least one valid candidate.
    let (threshold, _, _) = best.expect("at least one split with both classes non-empty");
    Ok(ThresholdReport {
        threshold,
        criterion_value: between_class_variance(h, threshold),
        histogram: h.clone(),
        degenerate: false,
    })
}

/// `ω₀·ω₁·(μ₀ − μ₁)²` at threshold `t`, in floating point. Zero if either
/// class is empty.
pub fn between_class_variance(h: &Histogram, t: u8) -> f64 {
    let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
    for (v, &c) in h.counts.iter().enumerate() {
        if v <= t as usize {
            n0 += c;
            s0 += v as u64 * c;
        } else {
            n1 += c;
            s1 += v as u64 * c;
        }
    }
    if n0 == 0 || n1 == 0 {
        return 0.0;
    }
    let total = h.total as f64;
    let (w0, w1) = (n0 as f64 / total, n1 as f64 / total);
    let (m0, m1) = (s0 as f64 / n0 as f64, s1 as f64 / n1 as f64);
    w0 * w1 * (m0 - m1) * (m0 - m1)
}

/// Foreground iff `src > t`. Foreground renders as `max_value` via
/// [`BinaryImage::to_gray_with`].
pub fn apply_threshold(img: &GrayImage, t: u8) -> BinaryImage {
    BinaryImage::from_gray(img, |v| v > t)
}

/// Binarization for the branch without optimal thresholding; same rule as
/// [`apply_threshold`] with a caller-chosen level.
pub fn binarize_fixed(img: &GrayImage, t: u8) -> BinaryImage {
    apply_threshold(img, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(pairs: &[(usize, u64)]) -> Histogram {
        let mut counts = [0u64; 256];
        for &(v, c) in pairs {
            counts[v] += c;
        }
        Histogram::from_counts(counts).unwrap()
    }

    #[test]
    fn histogram_counts() {
        let h = histogram(&GrayImage::filled(2, 2, 0));
        assert_eq!(h.counts()[0], 4);
        assert_eq!(h.total(), 4);
        assert!(h.counts()[1..].iter().all(|&c| c == 0));

        let h = histogram(&GrayImage::new(2, 1, vec![0, 255]).unwrap());
        assert_eq!((h.counts()[0], h.counts()[255]), (1, 1));
    }

    #[test]
    fn bimodal_picks_lower_mode() {
        let r = otsu_threshold(&hist(&[(10, 50), (200, 50)])).unwrap();
        assert_eq!(r.threshold, 10);
        // ω₀ = ω₁ = 0.5, μ₀ − μ₁ = 190
        assert!((r.criterion_value - 0.25 * 190.0 * 190.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_histogram_splits_at_midpoint() {
        let counts = [3u64; 256];
        let r = otsu_threshold(&Histogram::from_counts(counts).unwrap()).unwrap();
        assert_eq!(r.threshold, 127);
    }

    #[test]
    fn constant_image_is_degenerate() {
        let h = histogram(&GrayImage::filled(4, 4, 77));
        assert_eq!(
            otsu_threshold(&h),
            Err(ThresholdError::DegenerateHistogram { distinct: 1 })
        );
        assert_eq!(
            Histogram::from_counts([0; 256]),
            Err(ThresholdError::EmptyHistogram)
        );
    }

    #[test]
    fn adjacent_top_levels() {
        let r = otsu_threshold(&hist(&[(254, 1), (255, 9)])).unwrap();
        assert_eq!(r.threshold, 254);
    }

    #[test]
    fn strict_inequality_at_boundary() {
        let img = GrayImage::new(3, 1, vec![100, 150, 200]).unwrap();
        assert_eq!(apply_threshold(&img, 150).pixels(), &[false, false, true]);
        assert_eq!(apply_threshold(&img, 255).foreground_count(), 0);
    }

    #[test]
    fn fixed_binarization() {
        assert_eq!(
            binarize_fixed(&GrayImage::filled(3, 3, 0), 127).foreground_count(),
            0
        );
        assert_eq!(
            binarize_fixed(&GrayImage::filled(3, 3, 255), 127).foreground_count(),
            9
        );
        let ramp = GrayImage::from_fn(256, 1, |x, _| x as u8);
        assert_eq!(binarize_fixed(&ramp, 127).foreground_count(), 128);
    }

    #[test]
    fn otsu_on_bimodal_image_keeps_exactly_the_bright_mode() {
        let img = GrayImage::from_fn(10, 10, |x, _| if x < 5 { 10 } else { 200 });
        let t = otsu_threshold(&histogram(&img)).unwrap().threshold;
        let bin = apply_threshold(&img, t);
        for (v, fg) in img.pixels().iter().zip(bin.pixels()) {
            assert_eq!(*fg, *v == 200);
        }
    }
}
