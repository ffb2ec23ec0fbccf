//! Slow, literal reference implementations.
//!
//! Everything here works on plain slices and follows the textbook definition
//! of each operation as directly as possible. Nothing depends on `floodseg`,
//! so a test comparing the two compares two independent computations.
//!
//! Images are row-major, `index = y * width + x`.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;

fn neighbor_offsets(eight: bool) -> Vec<(i64, i64)> {
    let mut v = Vec::new();
    for dy in -1..=1i64 {
        for dx in -1..=1i64 {
            if (dx, dy) == (0, 0) {
                continue;
            }
            if eight || dx == 0 || dy == 0 {
                v.push((dx, dy));
            }
        }
    }
    v
}

/// In-frame neighbours of `idx` as `(index, step_length_squared)`.
pub fn neighbors(idx: usize, width: usize, height: usize, eight: bool) -> Vec<(usize, u32)> {
    let (x, y) = ((idx % width) as i64, (idx / width) as i64);
    neighbor_offsets(eight)
        .into_iter()
        .filter_map(|(dx, dy)| {
            let (nx, ny) = (x + dx, y + dy);
            (nx >= 0 && ny >= 0 && nx < width as i64 && ny < height as i64).then(|| {
                (
                    ny as usize * width + nx as usize,
                    (dx * dx + dy * dy) as u32,
                )
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Otsu
// ---------------------------------------------------------------------------

/// `ω₀·ω₁·(μ₀ − μ₁)²` as an exact rational, or `None` if a class is empty.
pub fn between_class_variance_exact(counts: &[u64; 256], t: usize) -> Option<BigRational> {
    let total: u64 = counts.iter().sum();
    let (mut n0, mut s0, mut n1, mut s1) = (0u64, 0u64, 0u64, 0u64);
    for (v, &c) in counts.iter().enumerate() {
        if v <= t {
            n0 += c;
            s0 += v as u64 * c;
        } else {
            n1 += c;
            s1 += v as u64 * c;
        }
    }
    if n0 == 0 || n1 == 0 {
        return None;
    }
    let r = |a: u64, b: u64| BigRational::new(BigInt::from(a), BigInt::from(b));
    let w0 = r(n0, total);
    let w1 = r(n1, total);
    let diff = r(s0, n0) - r(s1, n1);
    Some(w0 * w1 * &diff * &diff)
}

/// Exhaustive argmax over all 256 candidate thresholds, smallest `t` on ties.
pub fn otsu_exhaustive(counts: &[u64; 256]) -> Option<u8> {
    let mut best: Option<(usize, BigRational)> = None;
    for t in 0..256 {
        if let Some(v) = between_class_variance_exact(counts, t) {
            if best.as_ref().is_none_or(|(_, b)| v > *b) {
                best = Some((t, v));
            }
        }
    }
    best.map(|(t, _)| t as u8)
}

// ---------------------------------------------------------------------------
// Dilation
// ---------------------------------------------------------------------------

/// `A ⊕ B = { a + b : a ∈ A, b ∈ B }`, clipped to the frame.
pub fn dilate_minkowski(
    width: usize,
    height: usize,
    fg: &[bool],
    offsets: &[(i32, i32)],
) -> Vec<bool> {
    let mut out = vec![false; fg.len()];
    for (a, _) in fg.iter().enumerate().filter(|(_, &f)| f) {
        let (ax, ay) = ((a % width) as i64, (a / width) as i64);
        for &(bx, by) in offsets {
            let (x, y) = (ax + bx as i64, ay + by as i64);
            if x >= 0 && y >= 0 && x < width as i64 && y < height as i64 {
                out[y as usize * width + x as usize] = true;
            }
        }
    }
    out
}

/// The probing procedure: place the reflected element on every pixel and
/// mark it if any covered pixel is foreground.
pub fn dilate_by_probe(
    width: usize,
    height: usize,
    fg: &[bool],
    offsets: &[(i32, i32)],
) -> Vec<bool> {
    (0..fg.len())
        .map(|p| {
            let (px, py) = ((p % width) as i64, (p / width) as i64);
            offsets.iter().any(|&(dx, dy)| {
                let (x, y) = (px - dx as i64, py - dy as i64);
                x >= 0
                    && y >= 0
                    && x < width as i64
                    && y < height as i64
                    && fg[y as usize * width + x as usize]
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sobel
// ---------------------------------------------------------------------------

pub const SOBEL_X: [[i32; 3]; 3] = [[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]];
pub const SOBEL_Y: [[i32; 3]; 3] = [[-1, -2, -1], [0, 0, 0], [1, 2, 1]];

/// Correlates with both kernels, reading out-of-frame pixels from the
/// nearest edge pixel. Returns `(gx, gy)`.
pub fn sobel_direct(width: usize, height: usize, px: &[u8]) -> (Vec<i32>, Vec<i32>) {
    let at = |x: i64, y: i64| {
        let cx = x.clamp(0, width as i64 - 1) as usize;
        let cy = y.clamp(0, height as i64 - 1) as usize;
        px[cy * width + cx] as i32
    };
    let mut gx = Vec::with_capacity(px.len());
    let mut gy = Vec::with_capacity(px.len());
    for y in 0..height as i64 {
        for x in 0..width as i64 {
            let (mut sx, mut sy) = (0, 0);
            for (ky, (row_x, row_y)) in SOBEL_X.iter().zip(&SOBEL_Y).enumerate() {
                for kx in 0..3 {
                    let v = at(x + kx as i64 - 1, y + ky as i64 - 1);
                    sx += row_x[kx] * v;
                    sy += row_y[kx] * v;
                }
            }
            gx.push(sx);
            gy.push(sy);
        }
    }
    (gx, gy)
}

/// Quantized magnitude `round_half_up(255·m / max)`.
pub fn quantize(magnitude: &[f64]) -> Vec<u8> {
    let max = magnitude.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return vec![0; magnitude.len()];
    }
    magnitude
        .iter()
        .map(|m| ((m * 255.0 / max) + 0.5).floor().min(255.0) as u8)
        .collect()
}

pub fn histogram(px: &[u8]) -> [u64; 256] {
    let mut h = [0u64; 256];
    for &v in px {
        h[v as usize] += 1;
    }
    h
}

/// The binary gradient mask computed from the definitions: Sobel magnitude,
/// quantization, exhaustive Otsu, threshold scaled by `fudge`. `None` if the
/// quantized magnitude has fewer than two levels.
pub fn gradient_mask(width: usize, height: usize, px: &[u8], fudge: f64) -> Option<Vec<bool>> {
    let (gx, gy) = sobel_direct(width, height, px);
    let mag: Vec<f64> = gx
        .iter()
        .zip(&gy)
        .map(|(&a, &b)| ((a * a + b * b) as f64).sqrt())
        .collect();
    let q = quantize(&mag);
    let t = otsu_exhaustive(&histogram(&q))?;
    let tuned = (t as f64 * fudge + 0.5).floor().clamp(0.0, 255.0) as u8;
    Some(q.iter().map(|&v| v > tuned).collect())
}

// ---------------------------------------------------------------------------
// Connectivity and minima
// ---------------------------------------------------------------------------

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Groups pixels for which `same(a, b)` holds between neighbours, via
/// union-find. Groups are ordered by smallest member, members sorted.
pub fn groups(
    width: usize,
    height: usize,
    eight: bool,
    mut include: impl FnMut(usize) -> bool,
    mut same: impl FnMut(usize, usize) -> bool,
) -> Vec<Vec<usize>> {
    let n = width * height;
    let mut parent: Vec<usize> = (0..n).collect();
    for a in 0..n {
        if !include(a) {
            continue;
        }
        for (b, _) in neighbors(a, width, height, eight) {
            if include(b) && same(a, b) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for a in 0..n {
        if include(a) {
            let r = find(&mut parent, a);
            by_root.entry(r).or_default().push(a);
        }
    }
    let mut out: Vec<Vec<usize>> = by_root.into_values().collect();
    out.sort_by_key(|g| g[0]);
    out
}

/// Equal-value plateaus that touch no strictly lower pixel.
pub fn regional_minima(width: usize, height: usize, px: &[u8], eight: bool) -> Vec<Vec<usize>> {
    groups(width, height, eight, |_| true, |a, b| px[a] == px[b])
        .into_iter()
        .filter(|plateau| {
            plateau.iter().all(|&p| {
                neighbors(p, width, height, eight)
                    .iter()
                    .all(|&(q, _)| px[q] >= px[p])
            })
        })
        .collect()
}

/// Number of connected components of the pixels selected by `mask`.
pub fn component_count(width: usize, height: usize, mask: &[bool], eight: bool) -> usize {
    groups(width, height, eight, |i| mask[i], |_, _| true).len()
}

/// True if the pixels carrying `label` form one connected set.
pub fn label_is_connected(
    width: usize,
    height: usize,
    labels: &[u32],
    label: u32,
    eight: bool,
) -> bool {
    groups(width, height, eight, |i| labels[i] == label, |_, _| true).len() == 1
}

// ---------------------------------------------------------------------------
// Topographical distance
// ---------------------------------------------------------------------------

fn lower_slope(width: usize, height: usize, px: &[u8], eight: bool, i: usize) -> f64 {
    neighbors(i, width, height, eight)
        .into_iter()
        .map(|(j, d2)| (px[i] as f64 - px[j] as f64).max(0.0) / (d2 as f64).sqrt())
        .fold(0.0, f64::max)
}

fn step_cost(
    width: usize,
    height: usize,
    px: &[u8],
    eight: bool,
    u: usize,
    v: usize,
    d2: u32,
) -> f64 {
    let d = (d2 as f64).sqrt();
    let (lu, lv) = (
        lower_slope(width, height, px, eight, u),
        lower_slope(width, height, px, eight, v),
    );
    if px[u] > px[v] {
        lu * d
    } else if px[v] > px[u] {
        lv * d
    } else {
        0.5 * (lu + lv) * d
    }
}

/// Topographical distance from `src` to every pixel by Bellman-Ford
/// relaxation (no priority queue).
pub fn topographical_bellman_ford(
    width: usize,
    height: usize,
    px: &[u8],
    eight: bool,
    src: usize,
) -> Vec<f64> {
    let n = px.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for u in 0..n {
            if !dist[u].is_finite() {
                continue;
            }
            for (v, d2) in neighbors(u, width, height, eight) {
                let c = dist[u] + step_cost(width, height, px, eight, u, v, d2);
                if c < dist[v] - 1e-15 {
                    dist[v] = c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

/// Cheapest simple path from `p` to `q` by enumerating every simple path.
/// Exponential; only for images of a handful of pixels.
pub fn topographical_by_enumeration(
    width: usize,
    height: usize,
    px: &[u8],
    eight: bool,
    p: usize,
    q: usize,
) -> f64 {
    fn walk(
        ctx: (usize, usize, &[u8], bool),
        at: usize,
        target: usize,
        cost: f64,
        seen: &mut HashSet<usize>,
        best: &mut f64,
    ) {
        if at == target {
            *best = best.min(cost);
            return;
        }
        let (w, h, px, eight) = ctx;
        for (next, d2) in neighbors(at, w, h, eight) {
            if seen.insert(next) {
                let c = cost + step_cost(w, h, px, eight, at, next, d2);
                walk(ctx, next, target, c, seen, best);
                seen.remove(&next);
            }
        }
    }
    assert!(px.len() <= 12, "path enumeration is exponential");
    let mut best = f64::INFINITY;
    let mut seen = HashSet::from([p]);
    walk((width, height, px, eight), p, q, 0.0, &mut seen, &mut best);
    best
}

/// True if no two neighbouring pixels share a value.
pub fn is_plateau_free(width: usize, height: usize, px: &[u8], eight: bool) -> bool {
    (0..px.len()).all(|i| {
        neighbors(i, width, height, eight)
            .iter()
            .all(|&(j, _)| px[i] != px[j])
    })
}
