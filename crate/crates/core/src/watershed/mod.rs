//! Discrete watershed transform.
//!
//! The gray image is read as a relief. [`regional_minima`] finds the flat
//! pits, [`watershed_transform`] floods from them in order of increasing
//! height, and [`topographical_distance`] provides the shortest-path
//! definition the flood is checked against.

mod flood;
mod minima;
mod render;
mod topo;

pub use flood::watershed_transform;
pub use minima::regional_minima;
pub use render::colorize_labels;
pub use topo::{
    lower_slopes, topographical_distance, topographical_distance_to_set,
    topographical_distances_from, TopoError, ORACLE_MAX_PIXELS,
};

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::raster::GrayImage;

/// Label given to dam pixels.
pub const WATERSHED: u32 = 0;

/// Pixel adjacency on the square grid.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Connectivity {
    /// Edge neighbours only.
    #[default]
    Four,
    /// Edge and corner neighbours.
    Eight,
}

const FOUR: [(i32, i32); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
const EIGHT: [(i32, i32); 8] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

impl Connectivity {
    /// Neighbour offsets `(dx, dy)` in row-major order.
    pub fn offsets(self) -> &'static [(i32, i32)] {
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }

    pub fn count(self) -> u8 {
        match self {
            Connectivity::Four => 4,
            Connectivity::Eight => 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("connectivity must be 4 or 8, got {0:?}")]
pub struct ConnectivityError(pub String);

impl TryFrom<u8> for Connectivity {
    type Error = ConnectivityError;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            other => Err(ConnectivityError(other.to_string())),
        }
    }
}

impl FromStr for Connectivity {
    type Err = ConnectivityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "4" => Ok(Connectivity::Four),
            "8" => Ok(Connectivity::Eight),
            other => Err(ConnectivityError(other.to_string())),
        }
    }
}

impl fmt::Display for Connectivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.count())
    }
}

impl Serialize for Connectivity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(self.count())
    }
}

/// Calls `visit(neighbour_index, is_diagonal)` for every in-frame neighbour
/// of `idx`, in the order of [`Connectivity::offsets`].
#[inline]
pub(crate) fn for_each_neighbor(
    idx: usize,
    width: usize,
    height: usize,
    conn: Connectivity,
    mut visit: impl FnMut(usize, bool),
) {
    let (x, y) = ((idx % width) as i64, (idx / width) as i64);
    for &(dx, dy) in conn.offsets() {
        let (nx, ny) = (x + dx as i64, y + dy as i64);
        if nx >= 0 && ny >= 0 && (nx as usize) < width && (ny as usize) < height {
            visit(ny as usize * width + nx as usize, dx != 0 && dy != 0);
        }
    }
}

/// Regional minima, one pixel list per plateau.
///
/// Component `k` seeds basin label `k + 1`. Components are ordered by their
/// smallest row-major pixel index and each list is sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimaSet {
    components: Vec<Vec<usize>>,
}

impl MinimaSet {
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// Per-pixel basin labels; [`WATERSHED`] (0) marks dams, `1..=basin_count`
/// the catchment basins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelImage {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    basin_count: u32,
}

/// JSON-friendly digest of a [`LabelImage`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LabelSummary {
    pub basin_count: u32,
    pub watershed_pixel_count: usize,
    /// Pixel count of basin `i + 1` at index `i`.
    pub basin_areas: Vec<usize>,
}

impl LabelImage {
    pub(crate) fn from_parts(
        width: usize,
        height: usize,
        labels: Vec<u32>,
        basin_count: u32,
    ) -> Self {
        debug_assert_eq!(labels.len(), width * height);
        Self {
            width,
            height,
            labels,
            basin_count,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn basin_count(&self) -> u32 {
        self.basin_count
    }

    pub fn watershed_pixel_count(&self) -> usize {
        self.labels.iter().filter(|&&l| l == WATERSHED).count()
    }

    pub fn basin_areas(&self) -> Vec<usize> {
        let mut areas = vec![0usize; self.basin_count as usize];
        for &l in &self.labels {
            if l != WATERSHED {
                areas[l as usize - 1] += 1;
            }
        }
        areas
    }

    pub fn summary(&self) -> LabelSummary {
        LabelSummary {
            basin_count: self.basin_count,
            watershed_pixel_count: self.watershed_pixel_count(),
            basin_areas: self.basin_areas(),
        }
    }

    /// Diagnostic rendering: label `l` maps to `round(255·l / basin_count)`,
    /// so dams are black and the last basin is white.
    pub fn to_scaled_gray(&self) -> GrayImage {
        let n = self.basin_count.max(1) as u64;
        let pixels = self
            .labels
            .iter()
            .map(|&l| ((l as u64 * 255 + n / 2) / n).min(255) as u8)
            .collect();
        GrayImage::new(self.width, self.height, pixels).expect("same dimensions")
    }
}
