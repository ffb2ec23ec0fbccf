use std::time::Instant;

use floodseg::pipeline::{run_pipeline, PipelineConfig, PipelineError};
use floodseg::raster::AnyImage;

/// Wall-clock samples of repeated pipeline runs, in milliseconds.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchStats {
    pub samples: Vec<f64>,
}

impl BenchStats {
    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.samples.len() as f64
    }

    /// Middle sample, or the mean of the two middle samples for even counts.
    pub fn median(&self) -> f64 {
        let mut s = self.samples.clone();
        s.sort_by(f64::total_cmp);
        let n = s.len();
        if n % 2 == 1 {
            s[n / 2]
        } else {
            (s[n / 2 - 1] + s[n / 2]) / 2.0
        }
    }
}

/// Runs the pipeline `reps` times on an already-loaded image. File I/O is
/// outside the timed region.
pub fn bench(
    input: &AnyImage,
    cfg: &PipelineConfig,
    reps: usize,
) -> Result<BenchStats, PipelineError> {
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        run_pipeline(input, cfg)?;
        samples.push(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(BenchStats { samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_statistics() {
        let s = BenchStats {
            samples: vec![4.0, 1.0, 3.0, 2.0],
        };
        assert_eq!(s.min(), 1.0);
        assert_eq!(s.max(), 4.0);
        assert_eq!(s.median(), 2.5);
        assert_eq!(s.mean(), 2.5);
        let odd = BenchStats {
            samples: vec![9.0, 1.0, 2.0],
        };
        assert_eq!(odd.median(), 2.0);
        assert_eq!(odd.mean(), 4.0);
    }
}
