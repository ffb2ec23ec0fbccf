use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LabelImage, WATERSHED};
use crate::raster::ColorImage;

/// Paints dams black and each basin a distinct non-black color drawn from a
/// generator seeded with `seed`.
pub fn colorize_labels(labels: &LabelImage, seed: u64) -> ColorImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = labels.basin_count() as usize;
    // 2^24 - 1 non-black colors exist; beyond that colors repeat.
    let distinct = n < (1 << 24);
    let mut used = HashSet::with_capacity(n + 1);
    used.insert([0u8; 3]);
    let mut palette = Vec::with_capacity(n + 1);
    palette.push([0u8; 3]);
    for _ in 0..n {
        let color = loop {
            let c: [u8; 3] = rng.gen();
            if c == [0, 0, 0] {
                continue;
            }
            if !distinct || used.insert(c) {
                break c;
            }
        };
        palette.push(color);
    }

    let pixels = labels
        .labels()
        .iter()
        .map(|&l| {
            if l == WATERSHED {
                [0, 0, 0]
            } else {
                palette[l as usize]
            }
        })
        .collect();
    ColorImage::new(labels.width(), labels.height(), pixels).expect("same dimensions")
}
