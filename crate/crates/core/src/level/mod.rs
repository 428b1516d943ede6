//! Blocks, pigs and structures in continuous level coordinates.
//!
//! Coordinates use x to the right and y upward, with the ground at `y = 0`.

mod xml;

pub use xml::{parse_level, serialize_level, LevelMeta, ParsedLevel};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Two blocks may share this much depth on both axes without counting as overlapping.
pub const OVERLAP_EPSILON: f64 = 1e-6;

/// Diameter used for every pig, in level units.
pub const PIG_DIAMETER: f64 = 0.5;

/// The eight regular block shapes available in Science Birds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockType {
    SquareHole,
    RectBig,
    RectMedium,
    RectSmall,
    RectFat,
    RectTiny,
    SquareTiny,
    SquareSmall,
}

impl BlockType {
    pub const ALL: [BlockType; 8] = [
        BlockType::SquareHole,
        BlockType::RectBig,
        BlockType::RectMedium,
        BlockType::RectSmall,
        BlockType::RectFat,
        BlockType::RectTiny,
        BlockType::SquareTiny,
        BlockType::SquareSmall,
    ];

    /// `(width, height)` in level units for the horizontal orientation.
    pub fn dimensions(self) -> (f64, f64) {
        match self {
            BlockType::SquareHole => (0.85, 0.85),
            BlockType::RectBig => (2.06, 0.22),
            BlockType::RectMedium => (1.68, 0.22),
            BlockType::RectSmall => (0.85, 0.2),
            BlockType::RectFat => (0.85, 0.43),
            BlockType::RectTiny => (0.42, 0.22),
            BlockType::SquareTiny => (0.22, 0.22),
            BlockType::SquareSmall => (0.43, 0.43),
        }
    }

    pub fn width(self) -> f64 {
        self.dimensions().0
    }

    pub fn height(self) -> f64 {
        self.dimensions().1
    }

    /// Squares look the same in both orientations.
    pub fn is_square(self) -> bool {
        let (w, h) = self.dimensions();
        w == h
    }

    /// Catalog id, 1 through 8.
    pub fn id(self) -> u8 {
        self as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            BlockType::SquareHole => "SquareHole",
            BlockType::RectBig => "RectBig",
            BlockType::RectMedium => "RectMedium",
            BlockType::RectSmall => "RectSmall",
            BlockType::RectFat => "RectFat",
            BlockType::RectTiny => "RectTiny",
            BlockType::SquareTiny => "SquareTiny",
            BlockType::SquareSmall => "SquareSmall",
        }
    }
}

impl fmt::Display for BlockType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BlockType {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        BlockType::ALL
            .iter()
            .copied()
            .find(|t| t.name() == s)
            .ok_or(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Material {
    Wood,
    Ice,
    Stone,
}

impl Material {
    pub const ALL: [Material; 3] = [Material::Wood, Material::Ice, Material::Stone];

    pub fn name(self) -> &'static str {
        match self {
            Material::Wood => "wood",
            Material::Ice => "ice",
            Material::Stone => "stone",
        }
    }
}

impl fmt::Display for Material {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Material {
    type Err = ();

    fn from_str(s: &str) -> std::result::Result<Self, ()> {
        Material::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

impl Orientation {
    pub fn degrees(self) -> u32 {
        match self {
            Orientation::Horizontal => 0,
            Orientation::Vertical => 90,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block {
    pub block_type: BlockType,
    pub material: Material,
    pub orientation: Orientation,
    pub cx: f64,
    pub cy: f64,
}

impl Block {
    pub fn new(
        block_type: BlockType,
        material: Material,
        orientation: Orientation,
        cx: f64,
        cy: f64,
    ) -> Self {
        Block {
            block_type,
            material,
            orientation,
            cx,
            cy,
        }
    }

    /// Width after applying the orientation.
    pub fn effective_width(&self) -> f64 {
        match self.orientation {
            Orientation::Horizontal => self.block_type.width(),
            Orientation::Vertical => self.block_type.height(),
        }
    }

    pub fn effective_height(&self) -> f64 {
        match self.orientation {
            Orientation::Horizontal => self.block_type.height(),
            Orientation::Vertical => self.block_type.width(),
        }
    }

    pub fn left(&self) -> f64 {
        self.cx - self.effective_width() / 2.0
    }

    pub fn right(&self) -> f64 {
        self.cx + self.effective_width() / 2.0
    }

    pub fn bottom(&self) -> f64 {
        self.cy - self.effective_height() / 2.0
    }

    pub fn top(&self) -> f64 {
        self.cy + self.effective_height() / 2.0
    }

    /// Overlap depths `(dx, dy)` of the two rectangles; either is ≤ 0 when they are apart.
    pub fn overlap_depths(&self, other: &Block) -> (f64, f64) {
        let dx = self.right().min(other.right()) - self.left().max(other.left());
        let dy = self.top().min(other.top()) - self.bottom().max(other.bottom());
        (dx, dy)
    }

    /// True when the interiors share more than [`OVERLAP_EPSILON`] on both axes.
    pub fn interpenetrates(&self, other: &Block) -> bool {
        let (dx, dy) = self.overlap_depths(other);
        dx > OVERLAP_EPSILON && dy > OVERLAP_EPSILON
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pig {
    pub cx: f64,
    pub cy: f64,
    pub diameter: f64,
}

impl Pig {
    pub fn new(cx: f64, cy: f64) -> Self {
        Pig {
            cx,
            cy,
            diameter: PIG_DIAMETER,
        }
    }
}

/// Axis-aligned box `(min_x, min_y, max_x, max_y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BoundingBox {
    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    fn include(&mut self, min_x: f64, min_y: f64, max_x: f64, max_y: f64) {
        self.min_x = self.min_x.min(min_x);
        self.min_y = self.min_y.min(min_y);
        self.max_x = self.max_x.max(max_x);
        self.max_y = self.max_y.max(max_y);
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Structure {
    pub blocks: Vec<Block>,
    pub pigs: Vec<Pig>,
}

impl Structure {
    pub fn new(blocks: Vec<Block>, pigs: Vec<Pig>) -> Self {
        Structure { blocks, pigs }
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty() && self.pigs.is_empty()
    }

    /// Tight box around every block rectangle and pig circle.
    pub fn bounding_box(&self) -> Result<BoundingBox> {
        let mut bbox: Option<BoundingBox> = None;
        let rects = self
            .blocks
            .iter()
            .map(|b| (b.left(), b.bottom(), b.right(), b.top()))
            .chain(self.pigs.iter().map(|p| {
                let r = p.diameter / 2.0;
                (p.cx - r, p.cy - r, p.cx + r, p.cy + r)
            }));
        for (x0, y0, x1, y1) in rects {
            match bbox.as_mut() {
                Some(b) => b.include(x0, y0, x1, y1),
                None => {
                    bbox = Some(BoundingBox {
                        min_x: x0,
                        min_y: y0,
                        max_x: x1,
                        max_y: y1,
                    })
                }
            }
        }
        bbox.ok_or(Error::EmptyStructure)
    }

    /// Returns a copy shifted by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Structure {
        Structure {
            blocks: self
                .blocks
                .iter()
                .map(|b| Block {
                    cx: b.cx + dx,
                    cy: b.cy + dy,
                    ..*b
                })
                .collect(),
            pigs: self
                .pigs
                .iter()
                .map(|p| Pig {
                    cx: p.cx + dx,
                    cy: p.cy + dy,
                    ..*p
                })
                .collect(),
        }
    }

    /// Index pairs `(i, j)`, `i < j`, of blocks whose interiors overlap.
    pub fn overlapping_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.blocks.len() {
            for j in i + 1..self.blocks.len() {
                if self.blocks[i].interpenetrates(&self.blocks[j]) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn count_material(&self, material: Material) -> usize {
        self.blocks
            .iter()
            .filter(|b| b.material == material)
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn catalog_matches_table() {
        assert_eq!(BlockType::ALL.len(), 8);
        assert_eq!(BlockType::RectSmall.dimensions(), (0.85, 0.2));
        assert_eq!(BlockType::RectTiny.dimensions(), (0.42, 0.22));
        assert!(BlockType::SquareHole.is_square());
        assert!(!BlockType::RectFat.is_square());
        let ids: Vec<u8> = BlockType::ALL.iter().map(|t| t.id()).collect();
        assert_eq!(ids, vec![1, 2, 3, 4, 5, 6, 7, 8]);
    }

    #[test]
    fn names_round_trip() {
        for t in BlockType::ALL {
            assert_eq!(t.name().parse::<BlockType>(), Ok(t));
        }
        assert!("RectBigg".parse::<BlockType>().is_err());
        assert_eq!("ice".parse::<Material>(), Ok(Material::Ice));
    }

    #[test]
    fn bbox_square_tiny() {
        let s = Structure::new(
            vec![Block::new(
                BlockType::SquareTiny,
                Material::Wood,
                Orientation::Horizontal,
                0.0,
                0.0,
            )],
            vec![],
        );
        let b = s.bounding_box().unwrap();
        assert!(close(b.min_x, -0.11) && close(b.min_y, -0.11));
        assert!(close(b.max_x, 0.11) && close(b.max_y, 0.11));
    }

    #[test]
    fn bbox_rect_big() {
        let s = Structure::new(
            vec![Block::new(
                BlockType::RectBig,
                Material::Stone,
                Orientation::Horizontal,
                0.0,
                0.0,
            )],
            vec![],
        );
        let b = s.bounding_box().unwrap();
        assert!(close(b.min_x, -1.03) && close(b.max_x, 1.03));
        assert!(close(b.min_y, -0.11) && close(b.max_y, 0.11));
    }

    #[test]
    fn bbox_stacked_squares() {
        let blocks = [0.215, 0.645]
            .iter()
            .map(|&y| {
                Block::new(
                    BlockType::SquareSmall,
                    Material::Ice,
                    Orientation::Horizontal,
                    0.0,
                    y,
                )
            })
            .collect();
        let b = Structure::new(blocks, vec![]).bounding_box().unwrap();
        assert!((b.height() - 0.86).abs() < 1e-12);
    }

    #[test]
    fn bbox_includes_pig_circle() {
        let s = Structure::new(vec![], vec![Pig::new(1.0, 2.0)]);
        let b = s.bounding_box().unwrap();
        assert!(close(b.min_x, 0.75) && close(b.max_y, 2.25));
    }

    #[test]
    fn bbox_empty_is_error() {
        assert!(matches!(
            Structure::default().bounding_box(),
            Err(Error::EmptyStructure)
        ));
    }

    #[test]
    fn vertical_swaps_extents() {
        let b = Block::new(
            BlockType::RectBig,
            Material::Wood,
            Orientation::Vertical,
            0.0,
            1.03,
        );
        assert_eq!(b.effective_width(), 0.22);
        assert_eq!(b.effective_height(), 2.06);
        assert!(close(b.bottom(), 0.0));
    }

    #[test]
    fn touching_blocks_do_not_interpenetrate() {
        let a = Block::new(
            BlockType::SquareSmall,
            Material::Wood,
            Orientation::Horizontal,
            0.0,
            0.215,
        );
        let b = Block::new(
            BlockType::SquareSmall,
            Material::Wood,
            Orientation::Horizontal,
            0.43,
            0.215,
        );
        assert!(!a.interpenetrates(&b));
        let c = Block { cx: 0.42, ..b };
        assert!(a.interpenetrates(&c));
    }
}
