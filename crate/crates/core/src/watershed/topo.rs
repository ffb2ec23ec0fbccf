//! Topographical distance on the pixel grid.
//!
//! A path is charged for every step by the lower slope of the pixel it
//! descends from: stepping from `u` down to `v` costs `LS(u)·d(u, v)`,
//! stepping up costs `LS(v)·d(u, v)`, and a level step costs the mean of
//! the two lower slopes times `d(u, v)`. `LS(x)` is the largest drop per unit
//! length from `x` to any neighbour and `d` is 1 for edge neighbours and √2
//! for corner neighbours. The distance is the cheapest such path.
//!
//! This is a reference computation (Dijkstra over the whole image) used to
//! check the flood; it refuses images larger than [`ORACLE_MAX_PIXELS`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use super::{for_each_neighbor, Connectivity};
use crate::raster::GrayImage;

/// 64×64.
pub const ORACLE_MAX_PIXELS: usize = 64 * 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopoError {
    #[error("pixel ({x}, {y}) is outside the {width}x{height} image")]
    OutOfBounds {
        x: usize,
        y: usize,
        width: usize,
        height: usize,
    },

    #[error("image has {pixels} pixels; the reference distance is limited to {ORACLE_MAX_PIXELS}")]
    ImageTooLargeForOracle { pixels: usize },
}

fn step_length(diagonal: bool) -> f64 {
    if diagonal {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

/// `LS(x)` for every pixel.
pub fn lower_slopes(f: &GrayImage, conn: Connectivity) -> Vec<f64> {
    let (w, h) = (f.width(), f.height());
    let px = f.pixels();
    (0..px.len())
        .map(|i| {
            let mut ls = 0.0f64;
            for_each_neighbor(i, w, h, conn, |j, diag| {
                let drop = px[i] as f64 - px[j] as f64;
                if drop > 0.0 {
                    ls = ls.max(drop / step_length(diag));
                }
            });
            ls
        })
        .collect()
}

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check(f: &GrayImage, p: (usize, usize)) -> Result<usize, TopoError> {
    if f.len() > ORACLE_MAX_PIXELS {
        return Err(TopoError::ImageTooLargeForOracle { pixels: f.len() });
    }
    let (x, y) = p;
    if x >= f.width() || y >= f.height() {
        return Err(TopoError::OutOfBounds {
            x,
            y,
            width: f.width(),
            height: f.height(),
        });
    }
    Ok(y * f.width() + x)
}

/// Distances from pixel `p = (x, y)` to every pixel, row-major.
pub fn topographical_distances_from(
    f: &GrayImage,
    p: (usize, usize),
    conn: Connectivity,
) -> Result<Vec<f64>, TopoError> {
    let src = check(f, p)?;
    let (w, h) = (f.width(), f.height());
    let px = f.pixels();
    let ls = lower_slopes(f, conn);

    let mut dist = vec![f64::INFINITY; px.len()];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        idx: src,
    });

    while let Some(Entry { cost, idx: u }) = heap.pop() {
        if cost > dist[u] {
            continue;
        }
        for_each_neighbor(u, w, h, conn, |v, diag| {
            let d = step_length(diag);
            let step = match px[u].cmp(&px[v]) {
                Ordering::Greater => ls[u] * d,
                Ordering::Less => ls[v] * d,
                Ordering::Equal => 0.5 * (ls[u] + ls[v]) * d,
            };
            let next = cost + step;
            if next < dist[v] {
                dist[v] = next;
                heap.push(Entry { cost: next, idx: v });
            }
        });
    }
    Ok(dist)
}

/// Topographical distance between pixels `p` and `q`, each `(x, y)`.
pub fn topographical_distance(
    f: &GrayImage,
    p: (usize, usize),
    q: (usize, usize),
    conn: Connectivity,
) -> Result<f64, TopoError> {
    let qi = check(f, q)?;
    Ok(topographical_distances_from(f, p, conn)?[qi])
}

/// Distance from `p` to the nearest pixel of `set`. Infinite for an empty set.
pub fn topographical_distance_to_set(
    f: &GrayImage,
    p: (usize, usize),
    set: &[(usize, usize)],
    conn: Connectivity,
) -> Result<f64, TopoError> {
    let dist = topographical_distances_from(f, p, conn)?;
    set.iter().try_fold(f64::INFINITY, |best, &q| {
        let qi = check(f, q)?;
        Ok(best.min(dist[qi]))
    })
}
