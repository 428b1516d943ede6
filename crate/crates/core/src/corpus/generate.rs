//! Seeded structure generators.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decode::DecoderLayer;
use crate::error::{Error, Result};
use crate::level::{Block, Material, Pig, Structure, PIG_DIAMETER};
use crate::raster::{canonical_footprint_at, RasterConfig};
use crate::stability::MIN_CONTACT_WIDTH;

/// Space left free beside and above generated structures, in level units.
const MARGIN: f64 = 0.3;

/// Parameters for the row-stacking generator.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorParams {
    /// Base seed of a corpus; structure `i` uses `seed + i`.
    pub seed: u64,
    pub min_rows: usize,
    pub max_rows: usize,
    pub min_row_width: f64,
    pub max_row_width: f64,
    /// Relative weights for wood, ice and stone.
    pub material_weights: [f64; 3],
    pub pig_probability: f64,
    /// Block kinds a row may be built from.
    pub layers: Vec<DecoderLayer>,
    pub raster: RasterConfig,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            seed: 0,
            min_rows: 2,
            max_rows: 7,
            min_row_width: 1.0,
            max_row_width: 6.5,
            material_weights: [0.5, 0.25, 0.25],
            pig_probability: 0.6,
            layers: DecoderLayer::ALL.to_vec(),
            raster: RasterConfig::default(),
        }
    }
}

impl GeneratorParams {
    fn capacity(&self) -> (f64, f64) {
        let r = self.raster.raster_size;
        (
            self.raster.grid_width as f64 * r - 2.0 * MARGIN,
            self.raster.grid_height as f64 * r - PIG_DIAMETER - MARGIN,
        )
    }

    pub fn validate(&self) -> Result<()> {
        self.raster.validate()?;
        if self.min_rows == 0 || self.min_rows > self.max_rows {
            return Err(Error::Params(format!(
                "row range {}..={} is empty",
                self.min_rows, self.max_rows
            )));
        }
        if !(self.min_row_width > 0.0 && self.min_row_width <= self.max_row_width) {
            return Err(Error::Params(format!(
                "row width range {}..={} is empty",
                self.min_row_width, self.max_row_width
            )));
        }
        if self
            .material_weights
            .iter()
            .any(|w| !(*w >= 0.0 && w.is_finite()))
            || self.material_weights.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::Params(
                "material weights must be non-negative and not all zero".into(),
            ));
        }
        if self.layers.is_empty() {
            return Err(Error::Params("no block kinds to build rows from".into()));
        }
        if !(0.0..=1.0).contains(&self.pig_probability) {
            return Err(Error::Params(format!(
                "pig probability {} outside [0, 1]",
                self.pig_probability
            )));
        }
        let (cap_w, cap_h) = self.capacity();
        let lowest_row = 0.2;
        if self.min_row_width > cap_w || self.min_rows as f64 * lowest_row > cap_h {
            return Err(Error::Capacity {
                required_width: (self.min_row_width / self.raster.raster_size).ceil() as usize,
                required_height: (self.min_rows as f64 * lowest_row / self.raster.raster_size)
                    .ceil() as usize,
                grid_width: self.raster.grid_width,
                grid_height: self.raster.grid_height,
            });
        }
        Ok(())
    }
}

/// Builds a structure from rows of equal-height blocks stacked from the ground
/// up, each row centered on `x = 0`. Rows are either packed edge to edge or
/// spread out as evenly spaced pillars; blocks the row beneath cannot hold up
/// are left out. Pigs may sit in pillar gaps or on top.
pub fn generate_structure(params: &GeneratorParams, seed: u64) -> Result<Structure> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let materials = WeightedIndex::new(params.material_weights).expect("validated weights");
    let (cap_w, cap_h) = params.capacity();
    let max_width = params.max_row_width.min(cap_w);

    let rows = rng.gen_range(params.min_rows..=params.max_rows);
    let mut structure = Structure::default();
    let mut base = 0.0;
    let mut prev_width = max_width;
    let mut row_start = 0;
    for row in 0..rows {
        let layer = params.layers[rng.gen_range(0..params.layers.len())];
        let probe = Block::new(
            layer.block_type(),
            Material::Wood,
            layer.orientation(),
            0.0,
            0.0,
        );
        let (bw, bh) = (probe.effective_width(), probe.effective_height());
        if base + bh > cap_h {
            break;
        }
        // upper rows tend to be no wider than the row beneath
        let hi = if row == 0 {
            max_width
        } else {
            prev_width.max(params.min_row_width)
        };
        let target = rng.gen_range(params.min_row_width..=hi.max(params.min_row_width));
        let count = ((target / bw).floor() as usize).max(1);
        let spaced = count >= 2 && rng.gen_bool(0.4);
        let (count, gap) = if spaced {
            let n = rng.gen_range(2..=count.clamp(2, 4));
            let gap = ((target - n as f64 * bw) / (n - 1) as f64).max(0.0);
            (n, gap)
        } else {
            (count, 0.0)
        };
        let row_width = count as f64 * bw + (count - 1) as f64 * gap;
        if row_width > cap_w {
            break;
        }
        let row_material = Material::ALL[materials.sample(&mut rng)];
        let left = -row_width / 2.0;
        let below = structure.blocks[row_start..].to_vec();
        row_start = structure.blocks.len();
        for i in 0..count {
            let material = if rng.gen_bool(0.15) {
                Material::ALL[materials.sample(&mut rng)]
            } else {
                row_material
            };
            let cx = left + bw / 2.0 + i as f64 * (bw + gap);
            if row > 0 && !rests_on(&below, cx, bw) {
                continue;
            }
            structure.blocks.push(Block::new(
                layer.block_type(),
                material,
                layer.orientation(),
                cx,
                base + bh / 2.0,
            ));
        }
        if structure.blocks.len() == row_start {
            break;
        }
        if gap >= PIG_DIAMETER + 0.02 && bh >= PIG_DIAMETER {
            for i in 0..count - 1 {
                if rng.gen_bool(params.pig_probability / 2.0) {
                    let cx = left + (i + 1) as f64 * (bw + gap) - gap / 2.0;
                    structure.pigs.push(Pig::new(cx, base + PIG_DIAMETER / 2.0));
                }
            }
        }
        base += bh;
        prev_width = row_width;
    }
    if !structure.blocks.is_empty() && rng.gen_bool(params.pig_probability) {
        let top = structure
            .blocks
            .iter()
            .filter(|b| (b.top() - base).abs() < 1e-9)
            .min_by(|a, b| a.cx.abs().total_cmp(&b.cx.abs()))
            .copied()
            .expect("top row exists");
        structure
            .pigs
            .push(Pig::new(top.cx, base + PIG_DIAMETER / 2.0));
    }
    Ok(structure)
}

/// Whether a block centered at `cx` with width `w` has its center over the
/// span of the blocks it touches in `below`.
fn rests_on(below: &[Block], cx: f64, w: f64) -> bool {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for b in below {
        let (x0, x1) = (b.left().max(cx - w / 2.0), b.right().min(cx + w / 2.0));
        if x1 - x0 >= MIN_CONTACT_WIDTH {
            lo = lo.min(x0);
            hi = hi.max(x1);
        }
    }
    lo <= cx && cx <= hi
}

/// Blocks and pigs laid out on whole cells with at least one empty cell
/// between any two objects, in shelves from the ground up. Every object
/// rasterizes to exactly its canonical footprint.
pub fn generate_grid_aligned(raster: &RasterConfig, seed: u64) -> Structure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = raster.raster_size;
    let pig_cells = raster.pig_cells();
    let max_col = raster.grid_width.saturating_sub(8);
    let max_row = raster.grid_height.saturating_sub(4);
    let objects = rng.gen_range(1..=14);

    let mut structure = Structure::default();
    let (mut col, mut row, mut shelf) = (0usize, 0usize, 0usize);
    for _ in 0..objects {
        let pig = rng.gen_bool(0.15);
        let (w, h, layer) = if pig {
            (pig_cells, pig_cells, None)
        } else {
            let layer = DecoderLayer::ALL[rng.gen_range(0..DecoderLayer::ALL.len())];
            let f = canonical_footprint_at(layer.block_type(), layer.orientation(), r);
            (f.width, f.height, Some(layer))
        };
        if col + w > max_col {
            row += shelf + 1 + rng.gen_range(0..3);
            col = rng.gen_range(0..3);
            shelf = 0;
        }
        if row + h > max_row || col + w > max_col {
            break;
        }
        let (left, bottom) = (col as f64 * r, row as f64 * r);
        match layer {
            None => structure.pigs.push(Pig::new(
                left + PIG_DIAMETER / 2.0,
                bottom + PIG_DIAMETER / 2.0,
            )),
            Some(layer) => {
                let material = Material::ALL[rng.gen_range(0..3)];
                let probe = Block::new(layer.block_type(), material, layer.orientation(), 0.0, 0.0);
                structure.blocks.push(Block::new(
                    layer.block_type(),
                    material,
                    layer.orientation(),
                    left + probe.effective_width() / 2.0,
                    bottom + probe.effective_height() / 2.0,
                ));
            }
        }
        shelf = shelf.max(h);
        col += w + 1 + rng.gen_range(0..3);
    }
    structure
}
