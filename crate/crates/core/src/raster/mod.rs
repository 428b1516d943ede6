//! Discretization of structures onto a fixed cell grid.
//!
//! Grids are stored row-major with row 0 at the bottom (ground) and column 0 at
//! the left. A structure is placed bottom-aligned and horizontally centered,
//! with its left edge snapped to a cell boundary and its painted width
//! centered, so that the result depends only
//! on the shape of the structure and not on where it sits in the level.

pub mod abg1;

use crate::error::{Error, Result};
use crate::level::{Block, BlockType, Material, Orientation, Structure, PIG_DIAMETER};

pub const DEFAULT_RASTER_SIZE: f64 = 0.07;
pub const DEFAULT_GRID_SIZE: usize = 128;

/// Number of layers in a one-hot encoding: air, wood, ice, stone, pig.
pub const LAYER_COUNT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RasterConfig {
    pub raster_size: f64,
    pub grid_width: usize,
    pub grid_height: usize,
}

impl Default for RasterConfig {
    fn default() -> Self {
        RasterConfig {
            raster_size: DEFAULT_RASTER_SIZE,
            grid_width: DEFAULT_GRID_SIZE,
            grid_height: DEFAULT_GRID_SIZE,
        }
    }
}

impl RasterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.raster_size > 0.0 && self.raster_size.is_finite()) {
            return Err(Error::Params(format!(
                "raster size must be positive, got {}",
                self.raster_size
            )));
        }
        let (need_w, need_h) = BlockType::ALL
            .iter()
            .flat_map(|&t| {
                [Orientation::Horizontal, Orientation::Vertical]
                    .map(|o| canonical_footprint_at(t, o, self.raster_size))
            })
            .fold((0, 0), |(w, h), f| (w.max(f.width), h.max(f.height)));
        if self.grid_width < need_w || self.grid_height < need_h {
            return Err(Error::Params(format!(
                "grid {}x{} cannot hold the largest footprint {}x{}",
                self.grid_width, self.grid_height, need_w, need_h
            )));
        }
        Ok(())
    }

    /// Cell diameter of a rasterized pig.
    pub fn pig_cells(&self) -> usize {
        cells(PIG_DIAMETER, self.raster_size)
    }
}

fn cells(extent: f64, raster_size: f64) -> usize {
    (extent / raster_size).round() as usize
}

/// Cell label of an occupancy grid; the discriminant is the layer index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Label {
    #[default]
    Air = 0,
    Wood = 1,
    Ice = 2,
    Stone = 3,
    Pig = 4,
}

impl Label {
    pub const ALL: [Label; LAYER_COUNT] = [
        Label::Air,
        Label::Wood,
        Label::Ice,
        Label::Stone,
        Label::Pig,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    pub fn material(self) -> Option<Material> {
        match self {
            Label::Wood => Some(Material::Wood),
            Label::Ice => Some(Material::Ice),
            Label::Stone => Some(Material::Stone),
            Label::Air | Label::Pig => None,
        }
    }
}

impl From<Material> for Label {
    fn from(m: Material) -> Self {
        match m {
            Material::Wood => Label::Wood,
            Material::Ice => Label::Ice,
            Material::Stone => Label::Stone,
        }
    }
}

/// Integer cell extent of a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Footprint {
    pub width: usize,
    pub height: usize,
}

impl Footprint {
    pub fn area(&self) -> usize {
        self.width * self.height
    }
}

/// Footprint of a block type at the default raster size.
pub fn canonical_footprint(block_type: BlockType, orientation: Orientation) -> Footprint {
    canonical_footprint_at(block_type, orientation, DEFAULT_RASTER_SIZE)
}

pub fn canonical_footprint_at(
    block_type: BlockType,
    orientation: Orientation,
    raster_size: f64,
) -> Footprint {
    let (w, h) = block_type.dimensions();
    let (w, h) = match orientation {
        Orientation::Horizontal => (w, h),
        Orientation::Vertical => (h, w),
    };
    Footprint {
        width: cells(w, raster_size),
        height: cells(h, raster_size),
    }
}

/// Offsets `(row, col)` of the cells in an `n`-cell disc, relative to the
/// bottom-left corner of its bounding square. A cell is included when its
/// center lies within `n / 2` of the square's center.
pub fn disc_offsets(n: usize) -> Vec<(usize, usize)> {
    let radius = n as f64 / 2.0;
    let mut out = Vec::new();
    for r in 0..n {
        for c in 0..n {
            let dy = r as f64 + 0.5 - radius;
            let dx = c as f64 + 0.5 - radius;
            if dx * dx + dy * dy <= radius * radius {
                out.push((r, c));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OccupancyGrid {
    width: usize,
    height: usize,
    cells: Vec<Label>,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize) -> Self {
        OccupancyGrid {
            width,
            height,
            cells: vec![Label::Air; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> Label {
        self.cells[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, label: Label) {
        self.cells[row * self.width + col] = label;
    }

    /// Cells in storage order: bottom row first, left to right.
    pub fn cells(&self) -> &[Label] {
        &self.cells
    }

    pub fn count(&self, label: Label) -> usize {
        self.cells.iter().filter(|&&l| l == label).count()
    }

    pub fn occupied(&self) -> usize {
        self.cells.len() - self.count(Label::Air)
    }

    /// Inclusive `(min_row, min_col, max_row, max_col)` of non-air cells.
    pub fn occupied_bounds(&self) -> Option<(usize, usize, usize, usize)> {
        let mut bounds: Option<(usize, usize, usize, usize)> = None;
        for row in 0..self.height {
            for col in 0..self.width {
                if self.get(row, col) != Label::Air {
                    bounds = Some(match bounds {
                        None => (row, col, row, col),
                        Some((r0, c0, r1, c1)) => {
                            (r0.min(row), c0.min(col), r1.max(row), c1.max(col))
                        }
                    });
                }
            }
        }
        bounds
    }

    /// Binary mask of cells carrying `label`.
    pub fn mask(&self, label: Label) -> Vec<bool> {
        self.cells.iter().map(|&l| l == label).collect()
    }

    /// Labelled intersection-over-union: a cell counts as shared when both
    /// grids hold the same non-air label there.
    pub fn iou(&self, other: &OccupancyGrid) -> f64 {
        assert_eq!((self.width, self.height), (other.width, other.height));
        let mut inter = 0usize;
        let mut union = 0usize;
        for (&a, &b) in self.cells.iter().zip(&other.cells) {
            if a != Label::Air || b != Label::Air {
                union += 1;
                if a == b {
                    inter += 1;
                }
            }
        }
        if union == 0 {
            1.0
        } else {
            inter as f64 / union as f64
        }
    }
}

/// `layers × height × width` tensor stored layer-major, bottom row first.
#[derive(Clone, Debug, PartialEq)]
pub struct LayerTensor {
    layers: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl LayerTensor {
    pub fn zeros(layers: usize, height: usize, width: usize) -> Self {
        LayerTensor {
            layers,
            height,
            width,
            data: vec![0.0; layers * height * width],
        }
    }

    pub fn from_vec(layers: usize, height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != layers * height * width {
            return Err(Error::Format(format!(
                "expected {} values for {layers}x{height}x{width}, got {}",
                layers * height * width,
                data.len()
            )));
        }
        Ok(LayerTensor {
            layers,
            height,
            width,
            data,
        })
    }

    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    fn offset(&self, layer: usize, row: usize, col: usize) -> usize {
        (layer * self.height + row) * self.width + col
    }

    pub fn get(&self, layer: usize, row: usize, col: usize) -> f32 {
        self.data[self.offset(layer, row, col)]
    }

    pub fn set(&mut self, layer: usize, row: usize, col: usize, value: f32) {
        let i = self.offset(layer, row, col);
        self.data[i] = value;
    }

    pub fn layer(&self, layer: usize) -> &[f32] {
        let n = self.height * self.width;
        &self.data[layer * n..(layer + 1) * n]
    }
}

#[derive(Clone, Copy, Debug)]
struct CellRect {
    row0: i64,
    col0: i64,
    row1: i64,
    col1: i64,
}

/// Encodes a structure into a label grid.
///
/// Each object covers the half-open cell range between its rounded start and
/// end positions. Blocks are painted in list order, then pigs as discs; later
/// objects overwrite earlier ones.
pub fn rasterize(structure: &Structure, config: &RasterConfig) -> Result<OccupancyGrid> {
    config.validate()?;
    let mut grid = OccupancyGrid::new(config.grid_width, config.grid_height);
    let bbox = match structure.bounding_box() {
        Ok(b) => b,
        Err(Error::EmptyStructure) => return Ok(grid),
        Err(e) => return Err(e),
    };
    let r = config.raster_size;
    // center the painted width, which is what the bbox rounds to in cells
    let painted_width = (bbox.width() / r).round() as i64;
    let left_col = (config.grid_width as i64 - painted_width).div_euclid(2);
    let to_col = |x: f64| ((x - bbox.min_x) / r).round() as i64 + left_col;
    let to_row = |y: f64| ((y - bbox.min_y) / r).round() as i64;

    let block_rects: Vec<CellRect> = structure
        .blocks
        .iter()
        .map(|b: &Block| CellRect {
            row0: to_row(b.bottom()),
            col0: to_col(b.left()),
            row1: to_row(b.top()),
            col1: to_col(b.right()),
        })
        .collect();
    let pig_rects: Vec<(CellRect, usize)> = structure
        .pigs
        .iter()
        .map(|p| {
            let n = cells(p.diameter, r);
            let row0 = to_row(p.cy - p.diameter / 2.0);
            let col0 = to_col(p.cx - p.diameter / 2.0);
            let rect = CellRect {
                row0,
                col0,
                row1: row0 + n as i64,
                col1: col0 + n as i64,
            };
            (rect, n)
        })
        .collect();

    let all = block_rects
        .iter()
        .chain(pig_rects.iter().map(|(rect, _)| rect));
    let (mut min_row, mut min_col, mut max_row, mut max_col) = (0i64, i64::MAX, 0i64, i64::MIN);
    for rect in all {
        min_row = min_row.min(rect.row0);
        min_col = min_col.min(rect.col0);
        max_row = max_row.max(rect.row1);
        max_col = max_col.max(rect.col1);
    }
    let (w, h) = (config.grid_width as i64, config.grid_height as i64);
    if min_col < 0 || max_col > w || max_row > h {
        return Err(Error::Capacity {
            required_width: (max_col - min_col).max(0) as usize,
            required_height: (max_row - min_row).max(0) as usize,
            grid_width: config.grid_width,
            grid_height: config.grid_height,
        });
    }

    for (rect, block) in block_rects.iter().zip(&structure.blocks) {
        let label = Label::from(block.material);
        for row in rect.row0.max(0)..rect.row1 {
            for col in rect.col0..rect.col1 {
                grid.set(row as usize, col as usize, label);
            }
        }
    }
    for (rect, n) in &pig_rects {
        for (dr, dc) in disc_offsets(*n) {
            let row = rect.row0 + dr as i64;
            if row >= 0 {
                grid.set(row as usize, (rect.col0 + dc as i64) as usize, Label::Pig);
            }
        }
    }
    Ok(grid)
}

/// One-hot encoding with layers `[air, wood, ice, stone, pig]`.
pub fn to_multilayer(grid: &OccupancyGrid) -> LayerTensor {
    let mut t = LayerTensor::zeros(LAYER_COUNT, grid.height, grid.width);
    for row in 0..grid.height {
        for col in 0..grid.width {
            t.set(grid.get(row, col).index(), row, col, 1.0);
        }
    }
    t
}

/// Per-cell argmax over the five layers; ties go to the lowest layer index.
pub fn from_multilayer(tensor: &LayerTensor) -> Result<OccupancyGrid> {
    if tensor.layers != LAYER_COUNT {
        return Err(Error::Format(format!(
            "expected {LAYER_COUNT} layers, got {}",
            tensor.layers
        )));
    }
    let mut grid = OccupancyGrid::new(tensor.width, tensor.height);
    for row in 0..tensor.height {
        for col in 0..tensor.width {
            let mut best = 0;
            let mut best_value = f32::NEG_INFINITY;
            for layer in 0..LAYER_COUNT {
                let v = tensor.get(layer, row, col);
                // NaN never wins
                if v > best_value {
                    best = layer;
                    best_value = v;
                }
            }
            grid.set(row, col, Label::ALL[best]);
        }
    }
    Ok(grid)
}
