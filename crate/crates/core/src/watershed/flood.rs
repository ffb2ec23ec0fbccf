use std::collections::VecDeque;

use super::{for_each_neighbor, regional_minima, Connectivity, LabelImage, MinimaSet, WATERSHED};
use crate::raster::GrayImage;

const UNLABELED: u32 = u32::MAX;

/// FIFO queue per gray level. Pops the oldest entry of the lowest non-empty
/// level, which is the same order as a heap keyed by `(level, insertion)`.
struct LevelQueue {
    buckets: Vec<VecDeque<u32>>,
    current: usize,
    len: usize,
}

impl LevelQueue {
    fn new() -> Self {
        Self {
            buckets: (0..256).map(|_| VecDeque::new()).collect(),
            current: 0,
            len: 0,
        }
    }

    fn push(&mut self, level: u8, idx: usize) {
        let level = level as usize;
        self.buckets[level].push_back(idx as u32);
        self.current = self.current.min(level);
        self.len += 1;
    }

    fn pop(&mut self) -> Option<usize> {
        if self.len == 0 {
            return None;
        }
        while self.buckets[self.current].is_empty() {
            self.current += 1;
        }
        self.len -= 1;
        self.buckets[self.current].pop_front().map(|i| i as usize)
    }
}

/// Running agreement among neighbour labels. A dam label or two different
/// basins turn the vote into `Dam`.
#[derive(Clone, Copy)]
enum Vote {
    Nobody,
    Basin(u32),
    Dam,
}

impl Vote {
    fn add(self, label: u32) -> Self {
        match (self, label) {
            (_, WATERSHED) | (Vote::Dam, _) => Vote::Dam,
            (Vote::Nobody, l) => Vote::Basin(l),
            (Vote::Basin(a), l) if a == l => self,
            (Vote::Basin(_), _) => Vote::Dam,
        }
    }
}

/// Floods `f` from its regional minima.
///
/// Each minimum seeds its own basin. Pixels are then taken in order of
/// increasing gray level, first in first out within a level, and labelled
/// from the neighbours already labelled:
///
/// * If some of those neighbours are strictly lower, only the ones of
///   steepest descent (largest drop per unit step length) vote. The pixel
///   joins their basin when they all agree and none is a dam; otherwise it
///   becomes a dam. This is the discrete drop-of-water rule: on images
///   without plateaus a pixel joins basin `i` exactly when every steepest
///   descent path from it ends in minimum `i`.
/// * On a plateau, where every labelled neighbour is at the same level,
///   dams are ignored and the pixel joins the one basin that reached it, or
///   becomes a dam when two different basins arrive. Plateaus are therefore
///   split by arrival order.
///
/// Dams keep propagating the flood, so every pixel ends up labelled.
pub fn watershed_transform(f: &GrayImage, conn: Connectivity) -> (LabelImage, MinimaSet) {
    let minima = regional_minima(f, conn);
    let (w, h) = (f.width(), f.height());
    let px = f.pixels();
    let mut labels = vec![UNLABELED; px.len()];
    let mut queued = vec![false; px.len()];
    let mut queue = LevelQueue::new();

    for (k, comp) in minima.components().iter().enumerate() {
        for &p in comp {
            labels[p] = k as u32 + 1;
            queued[p] = true;
        }
    }
    for comp in minima.components() {
        for &p in comp {
            for_each_neighbor(p, w, h, conn, |q, _| {
                if !queued[q] {
                    queued[q] = true;
                    queue.push(px[q], q);
                }
            });
        }
    }

    while let Some(p) = queue.pop() {
        let level = px[p];
        // Steepness compared exactly: an edge step of drop d scores 2·d², a
        // corner step d² (since (d/√2)² = d²/2).
        let mut steepest = 0u32;
        let mut descent = Vote::Nobody;
        let mut plateau = Vote::Nobody;

        for_each_neighbor(p, w, h, conn, |q, diagonal| {
            let l = labels[q];
            if l == UNLABELED {
                return;
            }
            let v = px[q];
            if v < level {
                let d = (level - v) as u32;
                let score = if diagonal { d * d } else { 2 * d * d };
                if score > steepest {
                    steepest = score;
                    descent = Vote::Nobody.add(l);
                } else if score == steepest {
                    descent = descent.add(l);
                }
            } else if l != WATERSHED {
                plateau = plateau.add(l);
            }
        });

        labels[p] = if steepest > 0 {
            match descent {
                Vote::Basin(l) => l,
                _ => WATERSHED,
            }
        } else {
            match plateau {
                Vote::Basin(l) => l,
                _ => WATERSHED,
            }
        };

        for_each_neighbor(p, w, h, conn, |q, _| {
            if !queued[q] {
                queued[q] = true;
                queue.push(px[q], q);
            }
        });
    }

    debug_assert!(labels.iter().all(|&l| l != UNLABELED));
    let basins = minima.len() as u32;
    (LabelImage::from_parts(w, h, labels, basins), minima)
}
