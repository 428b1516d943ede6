//! Turning (possibly noisy) layer tensors back into block structures.
//!
//! The pipeline labels each cell by argmax, builds a selection ranking per
//! material over the 13 block layers, greedily picks non-overlapping
//! placements, places pigs the same way with a disc kernel, maps everything
//! to level coordinates and finally pushes apart blocks whose true extents
//! overlap.

mod adjust;
pub mod ranking;
pub mod select;

pub use adjust::{adjust_overlaps, MAX_SWEEPS};
pub use ranking::{build_selection_ranking, SelectionRanking, DEFAULT_CLIP};
pub use select::{greedy_select, GreedyTrace, Pick};

use crate::error::{Error, Result};
use crate::level::{Block, BlockType, Material, Orientation, Pig, Structure};
use crate::raster::{
    canonical_footprint_at, disc_offsets, from_multilayer, Label, LayerTensor, RasterConfig,
    DEFAULT_RASTER_SIZE,
};

/// The 13 placement layers: every block type, with separate horizontal and
/// vertical layers for non-square types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DecoderLayer {
    SquareHole,
    RectBigH,
    RectBigV,
    RectMediumH,
    RectMediumV,
    RectSmallH,
    RectSmallV,
    RectFatH,
    RectFatV,
    RectTinyH,
    RectTinyV,
    SquareTiny,
    SquareSmall,
}

impl DecoderLayer {
    pub const ALL: [DecoderLayer; 13] = [
        DecoderLayer::SquareHole,
        DecoderLayer::RectBigH,
        DecoderLayer::RectBigV,
        DecoderLayer::RectMediumH,
        DecoderLayer::RectMediumV,
        DecoderLayer::RectSmallH,
        DecoderLayer::RectSmallV,
        DecoderLayer::RectFatH,
        DecoderLayer::RectFatV,
        DecoderLayer::RectTinyH,
        DecoderLayer::RectTinyV,
        DecoderLayer::SquareTiny,
        DecoderLayer::SquareSmall,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn block_type(self) -> BlockType {
        use DecoderLayer::*;
        match self {
            SquareHole => BlockType::SquareHole,
            RectBigH | RectBigV => BlockType::RectBig,
            RectMediumH | RectMediumV => BlockType::RectMedium,
            RectSmallH | RectSmallV => BlockType::RectSmall,
            RectFatH | RectFatV => BlockType::RectFat,
            RectTinyH | RectTinyV => BlockType::RectTiny,
            SquareTiny => BlockType::SquareTiny,
            SquareSmall => BlockType::SquareSmall,
        }
    }

    pub fn orientation(self) -> Orientation {
        use DecoderLayer::*;
        match self {
            RectBigV | RectMediumV | RectSmallV | RectFatV | RectTinyV => Orientation::Vertical,
            _ => Orientation::Horizontal,
        }
    }

    /// Layer of a block; squares always map to their single layer.
    pub fn of(block_type: BlockType, orientation: Orientation) -> DecoderLayer {
        let orientation = if block_type.is_square() {
            Orientation::Horizontal
        } else {
            orientation
        };
        DecoderLayer::ALL
            .into_iter()
            .find(|l| l.block_type() == block_type && l.orientation() == orientation)
            .expect("every block type has a layer")
    }

    /// Short id as used in frequency tables: `1`, `2h`, `2v`, ... `8`.
    pub fn table_id(self) -> String {
        let id = self.block_type().id();
        if self.block_type().is_square() {
            id.to_string()
        } else if self.orientation() == Orientation::Vertical {
            format!("{id}v")
        } else {
            format!("{id}h")
        }
    }

    pub fn table_name(self) -> String {
        match self.orientation() {
            Orientation::Vertical => format!("{} (Vert)", self.block_type()),
            Orientation::Horizontal => self.block_type().to_string(),
        }
    }

    pub fn kernel_at(self, raster_size: f64) -> Kernel {
        let f = canonical_footprint_at(self.block_type(), self.orientation(), raster_size);
        Kernel::rectangle(f.width, f.height)
    }

    pub fn kernel(self) -> Kernel {
        self.kernel_at(DEFAULT_RASTER_SIZE)
    }
}

/// Set of cells swept over a mask, relative to its bottom-left anchor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub width: usize,
    pub height: usize,
    /// `(row, col)` offsets inside the `width × height` box.
    pub cells: Vec<(usize, usize)>,
}

impl Kernel {
    pub fn rectangle(width: usize, height: usize) -> Kernel {
        let cells = (0..height)
            .flat_map(|r| (0..width).map(move |c| (r, c)))
            .collect();
        Kernel {
            width,
            height,
            cells,
        }
    }

    pub fn disc(diameter: usize) -> Kernel {
        Kernel {
            width: diameter,
            height: diameter,
            cells: disc_offsets(diameter),
        }
    }

    pub fn area(&self) -> usize {
        self.cells.len()
    }

    pub fn is_rectangle(&self) -> bool {
        self.cells.len() == self.width * self.height
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaterialMasks {
    pub wood: BinaryMask,
    pub ice: BinaryMask,
    pub stone: BinaryMask,
    pub pig: BinaryMask,
}

impl MaterialMasks {
    pub fn material(&self, material: Material) -> &BinaryMask {
        match material {
            Material::Wood => &self.wood,
            Material::Ice => &self.ice,
            Material::Stone => &self.stone,
        }
    }
}

/// Argmax-labels every cell and splits the non-air labels into masks.
pub fn material_masks(tensor: &LayerTensor) -> Result<MaterialMasks> {
    let grid = from_multilayer(tensor)?;
    let (w, h) = (grid.width(), grid.height());
    let mut masks = MaterialMasks {
        wood: BinaryMask::new(w, h),
        ice: BinaryMask::new(w, h),
        stone: BinaryMask::new(w, h),
        pig: BinaryMask::new(w, h),
    };
    for row in 0..h {
        for col in 0..w {
            let target = match grid.get(row, col) {
                Label::Air => continue,
                Label::Wood => &mut masks.wood,
                Label::Ice => &mut masks.ice,
                Label::Stone => &mut masks.stone,
                Label::Pig => &mut masks.pig,
            };
            target.set(row, col, true);
        }
    }
    Ok(masks)
}

/// A chosen block position on the grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement {
    pub layer: DecoderLayer,
    pub material: Material,
    /// Bottom-left cell of the footprint.
    pub row: usize,
    pub col: usize,
    pub value: f64,
    pub hit: f64,
}

impl Placement {
    /// Block centered on the footprint, in level units. Column `grid_width / 2`
    /// maps to `x = 0` and row 0 to the ground.
    pub fn to_block(&self, config: &RasterConfig) -> Block {
        let f = canonical_footprint_at(
            self.layer.block_type(),
            self.layer.orientation(),
            config.raster_size,
        );
        let r = config.raster_size;
        let cx = (self.col as f64 + f.width as f64 / 2.0 - config.grid_width as f64 / 2.0) * r;
        let cy = (self.row as f64 + f.height as f64 / 2.0) * r;
        Block::new(
            self.layer.block_type(),
            self.material,
            self.layer.orientation(),
            cx,
            cy,
        )
    }

    pub fn footprint_cells(&self, raster_size: f64) -> (usize, usize, usize, usize) {
        let f = canonical_footprint_at(
            self.layer.block_type(),
            self.layer.orientation(),
            raster_size,
        );
        (self.row, self.col, f.height, f.width)
    }
}

/// Greedy block selection over one material's ranking.
pub fn select_blocks(ranking: &SelectionRanking, material: Material) -> Vec<Placement> {
    greedy_select(ranking)
        .picks
        .into_iter()
        .map(|p| placement(p, material))
        .collect()
}

fn placement(p: Pick, material: Material) -> Placement {
    Placement {
        layer: DecoderLayer::ALL[p.layer],
        material,
        row: p.row,
        col: p.col,
        value: p.value,
        hit: p.hit,
    }
}

/// Pig positions from a pig mask, using a disc kernel of the rasterized pig size.
pub fn place_pigs(mask: &BinaryMask, config: &DecodeConfig) -> Vec<Pig> {
    let n = config.raster.pig_cells();
    let ranking = SelectionRanking::build(mask, vec![Kernel::disc(n)], config.clip);
    let r = config.raster.raster_size;
    let half = n as f64 / 2.0;
    greedy_select(&ranking)
        .picks
        .into_iter()
        .map(|p| {
            Pig::new(
                (p.col as f64 + half - config.raster.grid_width as f64 / 2.0) * r,
                (p.row as f64 + half) * r,
            )
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecodeConfig {
    pub raster: RasterConfig,
    /// Minimum hit probability; `0.0` disables clipping.
    pub clip: f64,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            raster: RasterConfig::default(),
            clip: DEFAULT_CLIP,
        }
    }
}

/// Everything the decoder produced for one tensor.
#[derive(Clone, Debug)]
pub struct Decoded {
    pub structure: Structure,
    /// Grid placements in selection order, wood then ice then stone.
    pub placements: Vec<Placement>,
    /// Greedy iterations summed over materials.
    pub iterations: usize,
}

/// Decodes a five-layer tensor into a structure.
pub fn decode(tensor: &LayerTensor, config: &DecodeConfig) -> Result<Structure> {
    decode_detailed(tensor, config).map(|d| d.structure)
}

pub fn decode_detailed(tensor: &LayerTensor, config: &DecodeConfig) -> Result<Decoded> {
    if tensor.width() != config.raster.grid_width || tensor.height() != config.raster.grid_height {
        return Err(Error::Format(format!(
            "tensor is {}x{} but the grid is {}x{}",
            tensor.width(),
            tensor.height(),
            config.raster.grid_width,
            config.raster.grid_height
        )));
    }
    let masks = material_masks(tensor)?;
    let r = config.raster.raster_size;
    let kernels: Vec<Kernel> = DecoderLayer::ALL.iter().map(|l| l.kernel_at(r)).collect();

    let mut placements = Vec::new();
    let mut iterations = 0;
    for material in Material::ALL {
        let mask = masks.material(material);
        if mask.is_empty() {
            continue;
        }
        let ranking = SelectionRanking::build(mask, kernels.clone(), config.clip);
        let trace = greedy_select(&ranking);
        iterations += trace.iterations();
        placements.extend(trace.picks.into_iter().map(|p| placement(p, material)));
    }

    let mut blocks: Vec<Block> = placements
        .iter()
        .map(|p| p.to_block(&config.raster))
        .collect();
    // footprints are rounded, so a block can poke slightly below row 0
    for b in &mut blocks {
        if b.bottom() < 0.0 {
            b.cy -= b.bottom();
        }
    }
    let pigs = place_pigs(&masks.pig, config);
    let structure = adjust_overlaps(&Structure::new(blocks, pigs))?;
    Ok(Decoded {
        structure,
        placements,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::{rasterize, to_multilayer, OccupancyGrid};

    fn fill(mask: &mut BinaryMask, row: usize, col: usize, h: usize, w: usize) {
        for r in row..row + h {
            for c in col..col + w {
                mask.set(r, c, true);
            }
        }
    }

    #[test]
    fn layer_table() {
        assert_eq!(DecoderLayer::ALL.len(), 13);
        let ids: Vec<String> = DecoderLayer::ALL.iter().map(|l| l.table_id()).collect();
        assert_eq!(
            ids,
            ["1", "2h", "2v", "3h", "3v", "4h", "4v", "5h", "5v", "6h", "6v", "7", "8"]
        );
        assert_eq!(DecoderLayer::RectBigV.table_name(), "RectBig (Vert)");
        assert_eq!(
            DecoderLayer::of(BlockType::SquareTiny, Orientation::Vertical),
            DecoderLayer::SquareTiny
        );
        for l in DecoderLayer::ALL {
            assert_eq!(DecoderLayer::of(l.block_type(), l.orientation()), l);
        }
    }

    #[test]
    fn masks_from_one_hot_and_air() {
        let mut g = OccupancyGrid::new(128, 128);
        g.set(3, 4, Label::Wood);
        g.set(3, 5, Label::Wood);
        let m = material_masks(&to_multilayer(&g)).unwrap();
        assert_eq!(m.wood.count(), 2);
        assert!(m.ice.is_empty() && m.stone.is_empty() && m.pig.is_empty());

        let mut t = LayerTensor::zeros(5, 128, 128);
        for v in t.data_mut().iter_mut().take(128 * 128) {
            *v = 0.9;
        }
        let m = material_masks(&t).unwrap();
        assert!(m.wood.is_empty() && m.ice.is_empty() && m.stone.is_empty() && m.pig.is_empty());
    }

    #[test]
    fn masks_are_disjoint_on_noise() {
        let mut t = LayerTensor::zeros(5, 128, 128);
        let mut state = 0x9e37_79b9_u32;
        for v in t.data_mut() {
            state ^= state << 13;
            state ^= state >> 17;
            state ^= state << 5;
            *v = (state % 2000) as f32 / 1000.0 - 1.0;
        }
        let m = material_masks(&t).unwrap();
        let g = from_multilayer(&t).unwrap();
        for row in 0..128 {
            for col in 0..128 {
                let hits = [&m.wood, &m.ice, &m.stone, &m.pig]
                    .iter()
                    .filter(|mask| mask.get(row, col))
                    .count();
                assert_eq!(hits, usize::from(g.get(row, col) != Label::Air));
            }
        }
    }

    #[test]
    fn isolated_square_small() {
        let mut m = BinaryMask::new(128, 128);
        fill(&mut m, 0, 60, 6, 6);
        let p = select_blocks(&build_selection_ranking(&m, DEFAULT_CLIP), Material::Ice);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].layer, DecoderLayer::SquareSmall);
        assert_eq!((p[0].row, p[0].col, p[0].material), (0, 60, Material::Ice));
    }

    #[test]
    fn full_strip_is_one_rect_big() {
        let mut m = BinaryMask::new(128, 128);
        fill(&mut m, 5, 20, 3, 29);
        let p = select_blocks(&build_selection_ranking(&m, DEFAULT_CLIP), Material::Wood);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].layer, DecoderLayer::RectBigH);
        assert_eq!(p[0].value, 87.0);
    }

    #[test]
    fn all_zero_ranking_selects_nothing() {
        let m = BinaryMask::new(128, 128);
        assert!(
            select_blocks(&build_selection_ranking(&m, DEFAULT_CLIP), Material::Wood).is_empty()
        );
    }

    #[test]
    fn pigs_from_discs() {
        let cfg = DecodeConfig::default();
        assert!(place_pigs(&BinaryMask::new(128, 128), &cfg).is_empty());

        let mut m = BinaryMask::new(128, 128);
        for &(row, col) in &[(0usize, 30usize), (0, 50)] {
            for (dr, dc) in disc_offsets(7) {
                m.set(row + dr, col + dc, true);
            }
        }
        let pigs = place_pigs(&m, &cfg);
        assert_eq!(pigs.len(), 2);
        assert!((pigs[0].cy - 0.245).abs() < 1e-9);
    }

    #[test]
    fn pig_round_trip_within_a_cell() {
        let s = Structure::new(vec![], vec![Pig::new(0.3, 0.25)]);
        let cfg = DecodeConfig::default();
        let g = rasterize(&s, &cfg.raster).unwrap();
        let out = decode(&to_multilayer(&g), &cfg).unwrap();
        assert_eq!(out.pigs.len(), 1);
        // rasterize recenters, so compare against the re-encoded position
        let back = rasterize(&out, &cfg.raster).unwrap();
        assert_eq!(back, g);
        assert!((out.pigs[0].cy - 0.25).abs() <= 0.07);
    }

    #[test]
    fn all_air_decodes_empty() {
        let t = to_multilayer(&OccupancyGrid::new(128, 128));
        let s = decode(&t, &DecodeConfig::default()).unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn scaling_confidences_changes_nothing() {
        let mut t = LayerTensor::zeros(5, 128, 128);
        let mut state = 0x1234_5678_u32;
        for v in t.data_mut() {
            state ^= state << 13;
            state ^= state >> 17;
            state ^= state << 5;
            *v = (state % 1000) as f32 / 1000.0;
        }
        // bias wood upward in a patch so something decodes
        for r in 0..10 {
            for c in 40..80 {
                t.set(1, r, c, 5.0);
            }
        }
        let cfg = DecodeConfig::default();
        let a = decode(&t, &cfg).unwrap();
        let mut scaled = t.clone();
        for v in scaled.data_mut() {
            *v *= 3.5;
        }
        assert_eq!(decode(&scaled, &cfg).unwrap(), a);
        assert!(!a.blocks.is_empty());
    }

    #[test]
    fn decoded_blocks_rest_above_ground() {
        let mut g = OccupancyGrid::new(128, 128);
        for c in 10..39 {
            for r in 0..3 {
                g.set(r, c, Label::Stone);
            }
        }
        let s = decode(&to_multilayer(&g), &DecodeConfig::default()).unwrap();
        assert_eq!(s.blocks.len(), 1);
        assert!(s.blocks[0].bottom() >= -1e-9);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let t = LayerTensor::zeros(5, 64, 64);
        assert!(decode(&t, &DecodeConfig::default()).is_err());
    }
}
