//! Training corpus generation and deduplication.

mod filter;
mod generate;

pub use filter::{
    corpus_keys, filter_corpus, filter_keys, manifest_line, parse_manifest_line, FilterOutcome,
    MetadataKey, ShapeKey, SIZE_BUCKET,
};
pub use generate::{generate_grid_aligned, generate_structure, GeneratorParams};
