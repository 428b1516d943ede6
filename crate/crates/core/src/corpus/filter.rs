//! Near-duplicate removal for training corpora.

use std::collections::HashSet;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::level::{Material, Structure};
use crate::raster::{rasterize, Label, OccupancyGrid, RasterConfig};

/// Width and height are bucketed at this granularity, in level units.
pub const SIZE_BUCKET: f64 = 0.1;

/// Per-material block counts plus bucketed bounding-box size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MetadataKey {
    pub wood: usize,
    pub ice: usize,
    pub stone: usize,
    pub width_bucket: i64,
    pub height_bucket: i64,
}

fn bucket(extent: f64) -> i64 {
    // the nudge keeps exact multiples like 0.3 from landing one bucket low
    (extent / SIZE_BUCKET + 1e-9).floor() as i64
}

impl MetadataKey {
    pub fn of(structure: &Structure) -> MetadataKey {
        let (w, h) = match structure.bounding_box() {
            Ok(b) => (b.width(), b.height()),
            Err(_) => (0.0, 0.0),
        };
        MetadataKey {
            wood: structure.count_material(Material::Wood),
            ice: structure.count_material(Material::Ice),
            stone: structure.count_material(Material::Stone),
            width_bucket: bucket(w),
            height_bucket: bucket(h),
        }
    }
}

/// SHA-256 of the material-blind occupancy outline of an encoded structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ShapeKey(pub [u8; 32]);

impl ShapeKey {
    pub fn of_grid(grid: &OccupancyGrid) -> ShapeKey {
        let mut hasher = Sha256::new();
        hasher.update((grid.width() as u32).to_le_bytes());
        hasher.update((grid.height() as u32).to_le_bytes());
        let mut packed = vec![0u8; grid.cells().len().div_ceil(8)];
        for (i, &l) in grid.cells().iter().enumerate() {
            if l != Label::Air {
                packed[i / 8] |= 1 << (i % 8);
            }
        }
        hasher.update(&packed);
        ShapeKey(hasher.finalize().into())
    }

    pub fn of(structure: &Structure, raster: &RasterConfig) -> Result<ShapeKey> {
        Ok(ShapeKey::of_grid(&rasterize(structure, raster)?))
    }

    pub fn hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Display for ShapeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.hex())
    }
}

/// Which inputs survived filtering, as indices into the input list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FilterOutcome {
    pub kept: Vec<usize>,
    pub dropped_metadata: Vec<usize>,
    pub dropped_shape: Vec<usize>,
}

impl FilterOutcome {
    pub fn dropped(&self) -> usize {
        self.dropped_metadata.len() + self.dropped_shape.len()
    }
}

/// Drops structures whose metadata key was already seen, then, among the
/// survivors, those whose shape key was already seen. First occurrences are
/// kept and input order is preserved.
pub fn filter_keys(keys: &[(MetadataKey, ShapeKey)]) -> FilterOutcome {
    let mut out = FilterOutcome::default();
    let mut seen_meta = HashSet::new();
    let mut survivors = Vec::new();
    for (i, (meta, _)) in keys.iter().enumerate() {
        if seen_meta.insert(*meta) {
            survivors.push(i);
        } else {
            out.dropped_metadata.push(i);
        }
    }
    let mut seen_shape = HashSet::new();
    for i in survivors {
        if seen_shape.insert(keys[i].1) {
            out.kept.push(i);
        } else {
            out.dropped_shape.push(i);
        }
    }
    out
}

pub fn corpus_keys(
    structures: &[Structure],
    raster: &RasterConfig,
) -> Result<Vec<(MetadataKey, ShapeKey)>> {
    structures
        .iter()
        .map(|s| Ok((MetadataKey::of(s), ShapeKey::of(s, raster)?)))
        .collect()
}

/// Filtered copy of `structures` and the number of structures dropped.
pub fn filter_corpus(
    structures: &[Structure],
    raster: &RasterConfig,
) -> Result<(Vec<Structure>, usize)> {
    let keys = corpus_keys(structures, raster)?;
    let outcome = filter_keys(&keys);
    let kept = outcome
        .kept
        .iter()
        .map(|&i| structures[i].clone())
        .collect();
    Ok((kept, outcome.dropped()))
}

/// One manifest record: path, the metadata key fields and the shape digest,
/// tab separated.
pub fn manifest_line(path: &str, meta: &MetadataKey, shape: &ShapeKey) -> String {
    format!(
        "{path}\t{}\t{}\t{}\t{}\t{}\t{shape}",
        meta.wood, meta.ice, meta.stone, meta.width_bucket, meta.height_bucket
    )
}

/// Parses a line written by [`manifest_line`].
pub fn parse_manifest_line(line: &str) -> Result<(String, MetadataKey, ShapeKey)> {
    let bad = || Error::Format(format!("bad manifest line `{line}`"));
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 7 {
        return Err(bad());
    }
    let int = |s: &str| s.parse::<i64>().map_err(|_| bad());
    let meta = MetadataKey {
        wood: int(fields[1])? as usize,
        ice: int(fields[2])? as usize,
        stone: int(fields[3])? as usize,
        width_bucket: int(fields[4])?,
        height_bucket: int(fields[5])?,
    };
    let digest = hex::decode(fields[6]).map_err(|_| bad())?;
    let shape = ShapeKey(digest.try_into().map_err(|_| bad())?);
    Ok((fields[0].to_string(), meta, shape))
}
