//! Binary dilation by an arbitrary structuring element.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::raster::BinaryImage;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuringElementError {
    #[error("structuring element has no offsets")]
    Empty,

    #[error("duplicate offset ({0}, {1})")]
    Duplicate(i32, i32),

    #[error("cannot parse structuring element {0:?}: expected `square3` or `offsets:(dx,dy);(dx,dy);...`")]
    Syntax(String),
}

/// A set of `(dx, dy)` displacements from the origin, `dy` growing downward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(i32, i32)>,
    name: Option<String>,
}

impl StructuringElement {
    pub fn new(offsets: Vec<(i32, i32)>) -> Result<Self, StructuringElementError> {
        if offsets.is_empty() {
            return Err(StructuringElementError::Empty);
        }
        let mut seen = HashSet::with_capacity(offsets.len());
        for &(dx, dy) in &offsets {
            if !seen.insert((dx, dy)) {
                return Err(StructuringElementError::Duplicate(dx, dy));
            }
        }
        Ok(Self {
            offsets,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn contains(&self, offset: (i32, i32)) -> bool {
        self.offsets.contains(&offset)
    }

    /// Point reflection through the origin.
    pub fn reflected(&self) -> Self {
        Self {
            offsets: self.offsets.iter().map(|&(dx, dy)| (-dx, -dy)).collect(),
            name: self.name.clone(),
        }
    }
}

/// The 3×3 square centred on the origin.
pub fn se_square3() -> StructuringElement {
    let offsets = (-1..=1)
        .flat_map(|dy| (-1..=1).map(move |dx| (dx, dy)))
        .collect();
    StructuringElement::new(offsets)
        .expect("nine distinct offsets")
        .with_name("square3")
}

impl Default for StructuringElement {
    fn default() -> Self {
        se_square3()
    }
}

impl fmt::Display for StructuringElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(name) = &self.name {
            return f.write_str(name);
        }
        f.write_str("offsets:")?;
        for (i, (dx, dy)) in self.offsets.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "({dx},{dy})")?;
        }
        Ok(())
    }
}

impl FromStr for StructuringElement {
    type Err = StructuringElementError;

    /// Accepts `square3` or `offsets:(dx,dy);(dx,dy);...`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "square3" {
            return Ok(se_square3());
        }
        let syntax = || StructuringElementError::Syntax(s.to_string());
        let list = s.strip_prefix("offsets:").ok_or_else(syntax)?;
        let mut offsets = Vec::new();
        for item in list.split(';').map(str::trim).filter(|i| !i.is_empty()) {
            let inner = item
                .strip_prefix('(')
                .and_then(|i| i.strip_suffix(')'))
                .ok_or_else(syntax)?;
            let (dx, dy) = inner.split_once(',').ok_or_else(syntax)?;
            let dx = dx.trim().parse().map_err(|_| syntax())?;
            let dy = dy.trim().parse().map_err(|_| syntax())?;
            offsets.push((dx, dy));
        }
        StructuringElement::new(offsets)
    }
}

/// Dilates `img` by `se`: the union of `se` translated to every foreground
/// pixel, clipped to the frame.
///
/// Equivalently, output pixel `p` is foreground iff some `p − o`, `o ∈ se`,
/// is an in-frame foreground pixel. Out-of-frame pixels count as background.
pub fn dilate(img: &BinaryImage, se: &StructuringElement) -> BinaryImage {
    let (w, h) = (img.width() as i64, img.height() as i64);
    let src = img.pixels();
    let mut out = vec![false; src.len()];

    for &(dx, dy) in se.offsets() {
        let (dx, dy) = (dx as i64, dy as i64);
        // Output columns whose source column x − dx is in frame.
        let x_lo = dx.max(0);
        let x_hi = (w + dx).min(w);
        if x_lo >= x_hi {
            continue;
        }
        let y_lo = dy.max(0);
        let y_hi = (h + dy).min(h);
        for y in y_lo..y_hi {
            let sy = y - dy;
            let dst_row = (y * w) as usize;
            let src_row = (sy * w) as usize;
            let dst = &mut out[dst_row + x_lo as usize..dst_row + x_hi as usize];
            let from = &src[src_row + (x_lo - dx) as usize..src_row + (x_hi - dx) as usize];
            for (d, &s) in dst.iter_mut().zip(from) {
                *d |= s;
            }
        }
    }

    BinaryImage::new(img.width(), img.height(), out).expect("same dimensions as the input")
}
