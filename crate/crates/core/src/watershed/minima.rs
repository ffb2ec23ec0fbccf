use super::{for_each_neighbor, Connectivity, MinimaSet};
use crate::raster::GrayImage;

/// Finds every maximal connected plateau with no strictly lower neighbour.
pub fn regional_minima(f: &GrayImage, conn: Connectivity) -> MinimaSet {
    let (w, h) = (f.width(), f.height());
    let px = f.pixels();
    let mut visited = vec![false; px.len()];
    let mut components = Vec::new();
    let mut stack = Vec::new();
    let mut plateau = Vec::new();

    for start in 0..px.len() {
        if visited[start] {
            continue;
        }
        let level = px[start];
        let mut is_minimum = true;
        visited[start] = true;
        stack.push(start);
        plateau.clear();

        while let Some(p) = stack.pop() {
            plateau.push(p);
            for_each_neighbor(p, w, h, conn, |q, _| {
                let v = px[q];
                if v < level {
                    is_minimum = false;
                } else if v == level && !visited[q] {
                    visited[q] = true;
                    stack.push(q);
                }
            });
        }

        if is_minimum {
            let mut pixels = plateau.clone();
            pixels.sort_unstable();
            components.push(pixels);
        }
    }

    MinimaSet { components }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_is_one_minimum() {
        let m = regional_minima(&GrayImage::filled(4, 3, 9), Connectivity::Four);
        assert_eq!(m.len(), 1);
        assert_eq!(m.components()[0], (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn valley_in_a_row() {
        let f = GrayImage::new(3, 1, vec![2, 1, 2]).unwrap();
        let m = regional_minima(&f, Connectivity::Four);
        assert_eq!(m.components(), &[vec![1]]);
    }

    #[test]
    fn plateau_touching_lower_pixel_is_not_a_minimum() {
        // The 3-plateau on the left drains into the 1 at its right end.
        let f = GrayImage::new(5, 1, vec![3, 3, 3, 1, 4]).unwrap();
        let m = regional_minima(&f, Connectivity::Four);
        assert_eq!(m.components(), &[vec![3]]);
    }

    #[test]
    fn diagonal_contact_depends_on_connectivity() {
        // Two zeros touching only at a corner.
        let f = GrayImage::new(2, 2, vec![0, 5, 5, 0]).unwrap();
        assert_eq!(regional_minima(&f, Connectivity::Four).len(), 2);
        assert_eq!(
            regional_minima(&f, Connectivity::Eight).components(),
            &[vec![0, 3]]
        );
    }

    #[test]
    fn components_ordered_by_first_pixel() {
        let f = GrayImage::new(3, 2, vec![5, 5, 1, 0, 5, 5]).unwrap();
        let m = regional_minima(&f, Connectivity::Four);
        assert_eq!(m.components(), &[vec![2], vec![3]]);
    }
}
