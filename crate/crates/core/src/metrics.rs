//! Diversity statistics for single structures and whole corpora.

use std::fmt::Write as _;

use crate::decode::DecoderLayer;
use crate::error::{Error, Result};
use crate::level::Structure;
use crate::raster::{rasterize, RasterConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct StructureMetrics {
    pub width: f64,
    pub height: f64,
    /// Occupied cells over the cells of the encoding's own bounding box.
    pub density: f64,
    pub block_count: usize,
    pub pig_count: usize,
    /// Share of blocks in each of the 13 decoder layers.
    pub frequencies: [f64; 13],
    pub empty: bool,
}

impl StructureMetrics {
    fn empty() -> Self {
        StructureMetrics {
            width: 0.0,
            height: 0.0,
            density: 0.0,
            block_count: 0,
            pig_count: 0,
            frequencies: [0.0; 13],
            empty: true,
        }
    }
}

pub fn structure_metrics(structure: &Structure, raster: &RasterConfig) -> Result<StructureMetrics> {
    let bbox = match structure.bounding_box() {
        Ok(b) => b,
        Err(Error::EmptyStructure) => return Ok(StructureMetrics::empty()),
        Err(e) => return Err(e),
    };
    let grid = rasterize(structure, raster)?;
    let density = match grid.occupied_bounds() {
        Some((r0, c0, r1, c1)) => grid.occupied() as f64 / ((r1 - r0 + 1) * (c1 - c0 + 1)) as f64,
        None => 0.0,
    };
    let mut frequencies = [0.0; 13];
    for b in &structure.blocks {
        frequencies[DecoderLayer::of(b.block_type, b.orientation).index()] += 1.0;
    }
    if !structure.blocks.is_empty() {
        let n = structure.blocks.len() as f64;
        frequencies.iter_mut().for_each(|f| *f /= n);
    }
    Ok(StructureMetrics {
        width: bbox.width(),
        height: bbox.height(),
        density,
        block_count: structure.blocks.len(),
        pig_count: structure.pigs.len(),
        frequencies,
        empty: false,
    })
}

/// Mean and population standard deviation.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(values: impl Iterator<Item = f64> + Clone) -> Stat {
        let n = values.clone().count() as f64;
        if n == 0.0 {
            return Stat::default();
        }
        let mean = values.clone().sum::<f64>() / n;
        let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Stat {
            mean,
            sd: var.sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSummary {
    pub count: usize,
    pub width: Stat,
    pub height: Stat,
    pub density: Stat,
    pub block_count: Stat,
    pub pig_count: Stat,
    pub frequencies: [Stat; 13],
    pub zero_pig_fraction: f64,
}

pub fn corpus_summary(metrics: &[StructureMetrics]) -> Result<CorpusSummary> {
    if metrics.is_empty() {
        return Err(Error::EmptyStructure);
    }
    let field = |f: fn(&StructureMetrics) -> f64| Stat::of(metrics.iter().map(f));
    let mut frequencies = [Stat::default(); 13];
    for (k, stat) in frequencies.iter_mut().enumerate() {
        *stat = Stat::of(metrics.iter().map(move |m| m.frequencies[k]));
    }
    let zero_pigs = metrics.iter().filter(|m| m.pig_count == 0).count();
    Ok(CorpusSummary {
        count: metrics.len(),
        width: field(|m| m.width),
        height: field(|m| m.height),
        density: field(|m| m.density),
        block_count: field(|m| m.block_count as f64),
        pig_count: field(|m| m.pig_count as f64),
        frequencies,
        zero_pig_fraction: zero_pigs as f64 / metrics.len() as f64,
    })
}

impl CorpusSummary {
    /// Aligned text: the scalar fields, then one row per decoder layer.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "structures: {}", self.count);
        for (name, s) in [
            ("width", self.width),
            ("height", self.height),
            ("blocks", self.block_count),
            ("pigs", self.pig_count),
        ] {
            let _ = writeln!(out, "{name:<10} {:>9.2} (±{:.2})", s.mean, s.sd);
        }
        let _ = writeln!(
            out,
            "{:<10} {:>8.2}% (±{:.2}%)",
            "density",
            self.density.mean * 100.0,
            self.density.sd * 100.0
        );
        let _ = writeln!(
            out,
            "{:<10} {:>8.2}%",
            "zero-pig",
            self.zero_pig_fraction * 100.0
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<4} {:<20} Frequency", "Id", "Name");
        for (layer, s) in DecoderLayer::ALL.iter().zip(&self.frequencies) {
            let _ = writeln!(
                out,
                "{:<4} {:<20} {:.2}% (±{:.2}%)",
                layer.table_id(),
                layer.table_name(),
                s.mean * 100.0,
                s.sd * 100.0
            );
        }
        out
    }

    /// `id,name,frequency_mean,frequency_sd` with one record per decoder layer.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,name,frequency_mean,frequency_sd\n");
        for (layer, s) in DecoderLayer::ALL.iter().zip(&self.frequencies) {
            let _ = writeln!(
                out,
                "{},{},{:.6},{:.6}",
                layer.table_id(),
                layer.table_name(),
                s.mean,
                s.sd
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::{Block, BlockType, Material, Orientation, Pig};

    fn one(t: BlockType, o: Orientation) -> Structure {
        Structure::new(vec![Block::new(t, Material::Wood, o, 0.0, 0.5)], vec![])
    }

    #[test]
    fn single_square_hole() {
        let m = structure_metrics(
            &one(BlockType::SquareHole, Orientation::Horizontal),
            &RasterConfig::default(),
        )
        .unwrap();
        assert!((m.width - 0.85).abs() < 1e-12 && (m.height - 0.85).abs() < 1e-12);
        assert!((m.density - 1.0).abs() < 1e-12);
        assert_eq!(m.frequencies[DecoderLayer::SquareHole.index()], 1.0);
        assert_eq!(m.frequencies.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn empty_is_zero() {
        let m = structure_metrics(&Structure::default(), &RasterConfig::default()).unwrap();
        assert!(m.empty);
        assert_eq!(m.block_count, 0);
        assert_eq!(m.frequencies, [0.0; 13]);
    }

    #[test]
    fn stacked_rect_fat() {
        let s = Structure::new(
            vec![
                Block::new(
                    BlockType::RectFat,
                    Material::Ice,
                    Orientation::Horizontal,
                    0.0,
                    0.215,
                ),
                Block::new(
                    BlockType::RectFat,
                    Material::Ice,
                    Orientation::Horizontal,
                    0.0,
                    0.645,
                ),
            ],
            vec![],
        );
        let m = structure_metrics(&s, &RasterConfig::default()).unwrap();
        assert_eq!(m.block_count, 2);
        assert_eq!(m.frequencies[DecoderLayer::RectFatH.index()], 1.0);
    }

    #[test]
    fn single_structure_has_zero_sd() {
        let m = structure_metrics(
            &one(BlockType::RectBig, Orientation::Vertical),
            &RasterConfig::default(),
        )
        .unwrap();
        let s = corpus_summary(&[m]).unwrap();
        assert_eq!(s.width.sd, 0.0);
        assert_eq!(s.density.sd, 0.0);
        assert!(s.frequencies.iter().all(|f| f.sd == 0.0));
    }

    #[test]
    fn pig_mean_and_zero_fraction() {
        let cfg = RasterConfig::default();
        let a = one(BlockType::SquareSmall, Orientation::Horizontal);
        let mut b = a.clone();
        b.pigs = vec![Pig::new(2.0, 0.25), Pig::new(3.0, 0.25)];
        let ms = [
            structure_metrics(&a, &cfg).unwrap(),
            structure_metrics(&b, &cfg).unwrap(),
        ];
        let s = corpus_summary(&ms).unwrap();
        assert_eq!(s.pig_count.mean, 1.0);
        assert_eq!(s.pig_count.sd, 1.0);
        assert_eq!(s.zero_pig_fraction, 0.5);
    }

    #[test]
    fn empty_corpus_is_error() {
        assert!(corpus_summary(&[]).is_err());
    }

    #[test]
    fn duplicated_list_keeps_mean() {
        let cfg = RasterConfig::default();
        let ms: Vec<_> = [
            BlockType::RectTiny,
            BlockType::RectMedium,
            BlockType::SquareTiny,
        ]
        .iter()
        .map(|&t| structure_metrics(&one(t, Orientation::Horizontal), &cfg).unwrap())
        .collect();
        let doubled: Vec<_> = ms.iter().chain(ms.iter()).cloned().collect();
        let a = corpus_summary(&ms).unwrap();
        let b = corpus_summary(&doubled).unwrap();
        assert!((a.width.mean - b.width.mean).abs() < 1e-12);
        assert!((a.block_count.mean - b.block_count.mean).abs() < 1e-12);
    }

    #[test]
    fn table_has_thirteen_rows() {
        let m = structure_metrics(
            &one(BlockType::RectFat, Orientation::Vertical),
            &RasterConfig::default(),
        )
        .unwrap();
        let s = corpus_summary(&[m]).unwrap();
        let csv = s.to_csv();
        assert_eq!(csv.lines().count(), 14);
        assert!(csv.contains("5v,RectFat (Vert),1.000000,0.000000"));
        assert!(s.to_table().contains("2v   RectBig (Vert)"));
    }
}
