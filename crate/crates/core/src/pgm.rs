//! Binary portable graymap (P5) output for grids and ranking layers.

use crate::raster::{Label, OccupancyGrid};

/// Encodes row-major bottom-up `values` as a P5 image, top row first,
/// scaled linearly so the maximum maps to 255. An all-zero layer is black.
pub fn heatmap(values: &[f64], width: usize, height: usize) -> Vec<u8> {
    assert_eq!(values.len(), width * height);
    let max = values
        .iter()
        .copied()
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let pixels = (0..height).rev().flat_map(|row| {
        values[row * width..(row + 1) * width]
            .iter()
            .map(move |&v| {
                if max > 0.0 && v.is_finite() {
                    (v.max(0.0) / max * 255.0).round() as u8
                } else {
                    0
                }
            })
    });
    encode(width, height, pixels)
}

/// Flat label image: air white, wood/ice/stone in decreasing gray, pigs black.
pub fn label_image(grid: &OccupancyGrid) -> Vec<u8> {
    let shade = |l: Label| match l {
        Label::Air => 255,
        Label::Wood => 191,
        Label::Ice => 127,
        Label::Stone => 63,
        Label::Pig => 0,
    };
    let (w, h) = (grid.width(), grid.height());
    let pixels = (0..h)
        .rev()
        .flat_map(|row| (0..w).map(move |col| shade(grid.get(row, col))));
    encode(w, h, pixels)
}

fn encode(width: usize, height: usize, pixels: impl Iterator<Item = u8>) -> Vec<u8> {
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend(pixels);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scales_to_max_and_flips_rows() {
        // bottom row [0, 2], top row [4, 1]
        let img = heatmap(&[0.0, 2.0, 4.0, 1.0], 2, 2);
        let header = b"P5\n2 2\n255\n";
        assert_eq!(&img[..header.len()], header);
        assert_eq!(&img[header.len()..], &[255, 64, 0, 128]);
    }

    #[test]
    fn zero_layer_is_black() {
        let img = heatmap(&[0.0; 6], 3, 2);
        assert!(img[img.len() - 6..].iter().all(|&p| p == 0));
    }
}
