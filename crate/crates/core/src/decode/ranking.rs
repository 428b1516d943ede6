//! Hit-probability, size-ranking and selection-ranking surfaces.

use super::{BinaryMask, DecoderLayer, Kernel};

/// Hit probabilities below this are discarded before ranking.
pub const DEFAULT_CLIP: f64 = 0.98;

/// Summed-area table with one extra leading row and column of zeros.
struct IntegralImage {
    width: usize,
    sums: Vec<u32>,
}

impl IntegralImage {
    fn new(mask: &BinaryMask) -> Self {
        let w = mask.width() + 1;
        let mut sums = vec![0u32; w * (mask.height() + 1)];
        for row in 0..mask.height() {
            let mut run = 0;
            for col in 0..mask.width() {
                run += mask.get(row, col) as u32;
                sums[(row + 1) * w + col + 1] = sums[row * w + col + 1] + run;
            }
        }
        IntegralImage { width: w, sums }
    }

    /// Sum over rows `[row, row + h)` and columns `[col, col + w)`.
    fn rect(&self, row: usize, col: usize, h: usize, w: usize) -> u32 {
        let at = |r: usize, c: usize| self.sums[r * self.width + c];
        at(row + h, col + w) + at(row, col) - at(row + h, col) - at(row, col + w)
    }
}

/// Per-kernel placement scores over every anchor of a grid.
///
/// Anchors are the bottom-left cell of the kernel's bounding box. Anchors where
/// the kernel would leave the grid score zero everywhere.
#[derive(Clone, Debug)]
pub struct SelectionRanking {
    width: usize,
    height: usize,
    kernels: Vec<Kernel>,
    clip: f64,
    hit: Vec<f64>,
    size: Vec<f64>,
    selection: Vec<f64>,
}

impl SelectionRanking {
    /// Slides every kernel over `mask`. `clip` is the minimum hit probability
    /// a placement needs to keep its score; `0.0` disables clipping.
    pub fn build(mask: &BinaryMask, kernels: Vec<Kernel>, clip: f64) -> Self {
        let (width, height) = (mask.width(), mask.height());
        let plane = width * height;
        let n = kernels.len() * plane;
        let mut hit = vec![0.0; n];
        let mut size = vec![0.0; n];
        let mut selection = vec![0.0; n];
        let integral = IntegralImage::new(mask);

        for (k, kernel) in kernels.iter().enumerate() {
            if kernel.width > width || kernel.height > height {
                continue;
            }
            let area = kernel.area() as f64;
            for row in 0..=height - kernel.height {
                for col in 0..=width - kernel.width {
                    let covered = if kernel.is_rectangle() {
                        integral.rect(row, col, kernel.height, kernel.width)
                    } else {
                        kernel
                            .cells
                            .iter()
                            .filter(|&&(dr, dc)| mask.get(row + dr, col + dc))
                            .count() as u32
                    } as f64;
                    let i = k * plane + row * width + col;
                    let h = covered / area;
                    hit[i] = h;
                    size[i] = covered;
                    selection[i] = if h >= clip { h * covered } else { 0.0 };
                }
            }
        }
        SelectionRanking {
            width,
            height,
            kernels,
            clip,
            hit,
            size,
            selection,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn clip(&self) -> f64 {
        self.clip
    }

    fn index(&self, layer: usize, row: usize, col: usize) -> usize {
        (layer * self.height + row) * self.width + col
    }

    /// Fraction of the kernel covered by the mask.
    pub fn hit(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.hit[self.index(layer, row, col)]
    }

    /// Number of mask cells covered by the kernel.
    pub fn size(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.size[self.index(layer, row, col)]
    }

    /// Clipped hit probability times size.
    pub fn value(&self, layer: usize, row: usize, col: usize) -> f64 {
        self.selection[self.index(layer, row, col)]
    }

    pub fn layer_values(&self, layer: usize) -> &[f64] {
        let plane = self.width * self.height;
        &self.selection[layer * plane..(layer + 1) * plane]
    }

    pub(crate) fn values(&self) -> &[f64] {
        &self.selection
    }

    pub fn max_value(&self) -> f64 {
        self.selection.iter().copied().fold(0.0, f64::max)
    }
}

/// Selection ranking over the 13 block layers.
pub fn build_selection_ranking(mask: &BinaryMask, clip: f64) -> SelectionRanking {
    let kernels = DecoderLayer::ALL.iter().map(|l| l.kernel()).collect();
    SelectionRanking::build(mask, kernels, clip)
}
