use std::path::{Path, PathBuf};

use rayon::prelude::*;

use structforge::corpus::{
    filter_keys, generate_structure, manifest_line, GeneratorParams, MetadataKey, ShapeKey,
};
use structforge::decode::{
    build_selection_ranking, decode, material_masks, DecodeConfig, DecoderLayer,
};
use structforge::level::{parse_level, serialize_level, LevelMeta, Material, Structure};
use structforge::metrics::{corpus_summary, structure_metrics};
use structforge::pgm;
use structforge::raster::{
    abg1, from_multilayer, rasterize, to_multilayer, LayerTensor, RasterConfig,
};
use structforge::stability::check_stability;

use crate::error::{CliError, Result};
use crate::files::{ensure_dir, inputs, output_for, read, read_text, stem, write_atomic};
use crate::{Cli, Command, GlobalArgs, EXIT_NEGATIVE};

pub fn dispatch(cli: &Cli) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.parallel)
        .build()
        .map_err(|e| {
            CliError::Usage(format!("cannot start {} workers: {e}", cli.global.parallel))
        })?;
    pool.install(|| match &cli.command {
        Command::Encode { input, out } => encode(&cli.global, input, out),
        Command::Decode {
            input,
            out,
            heatmap,
        } => decode_cmd(&cli.global, input, out, heatmap.as_deref()),
        Command::GenCorpus {
            count,
            out,
            min_rows,
            max_rows,
            min_width,
            max_width,
            pig_probability,
        } => {
            let params = GeneratorParams {
                seed: cli.global.seed,
                min_rows: *min_rows,
                max_rows: *max_rows,
                min_row_width: *min_width,
                max_row_width: *max_width,
                pig_probability: *pig_probability,
                raster: cli.global.raster_config()?,
                ..GeneratorParams::default()
            };
            gen_corpus(&params, *count, out)
        }
        Command::Filter { input, out } => filter(&cli.global, input, out),
        Command::Stats { input, csv, out } => stats(&cli.global, input, *csv, out.as_deref()),
        Command::Stability { input, record } => stability(input, *record),
        Command::Render { input, out } => render(&cli.global, input, out),
        Command::Validate { input } => validate(&cli.global, input),
    })
}

fn load_structure(path: &Path) -> Result<Structure> {
    let parsed = parse_level(&read_text(path)?).map_err(|e| CliError::core(path, e))?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(parsed.structure)
}

fn load_tensor(path: &Path) -> Result<LayerTensor> {
    abg1::from_bytes(&read(path)?).map_err(|e| CliError::core(path, e))
}

/// Runs `f` on every input in parallel, keeping input order, and reports
/// failures on stderr as they are collected.
fn each<T: Send>(
    paths: &[PathBuf],
    f: impl Fn(&Path) -> Result<T> + Sync,
) -> Vec<(PathBuf, Option<T>)> {
    let results: Vec<Result<T>> = paths.par_iter().map(|p| f(p)).collect();
    paths
        .iter()
        .cloned()
        .zip(results)
        .map(|(p, r)| match r {
            Ok(v) => (p, Some(v)),
            Err(e) => {
                eprintln!("{}", e.line());
                (p, None)
            }
        })
        .collect()
}

fn batch_status<T>(results: &[(PathBuf, Option<T>)]) -> Result<()> {
    let failed = results.iter().filter(|(_, r)| r.is_none()).count();
    if failed > 0 {
        return Err(CliError::Batch {
            failed,
            total: results.len(),
        });
    }
    Ok(())
}

fn prepare_outputs(input: &Path, out: &Path) -> Result<bool> {
    let batch = input.is_dir();
    if batch {
        ensure_dir(out)?;
    }
    Ok(batch)
}

fn no_inputs(input: &Path, ext: &str) -> CliError {
    CliError::Usage(format!("no .{ext} files in {}", input.display()))
}

fn encode(global: &GlobalArgs, input: &Path, out: &Path) -> Result<i32> {
    let raster = global.raster_config()?;
    let paths = inputs(input, "xml")?;
    if paths.is_empty() {
        return Err(no_inputs(input, "xml"));
    }
    let batch = prepare_outputs(input, out)?;
    let results = each(&paths, |p| {
        let structure = load_structure(p)?;
        let grid = rasterize(&structure, &raster).map_err(|e| CliError::core(p, e))?;
        write_atomic(
            &output_for(p, out, batch, "abg1"),
            &abg1::to_bytes(&to_multilayer(&grid)),
        )
    });
    batch_status(&results)?;
    log::info!("encoded {} structures", results.len());
    Ok(0)
}

fn find_layer(id: &str) -> Result<DecoderLayer> {
    DecoderLayer::ALL
        .iter()
        .copied()
        .find(|l| l.table_id().eq_ignore_ascii_case(id))
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown decoder layer `{id}`, expected one of 1, 2h, 2v, ..., 8"
            ))
        })
}

fn decode_cmd(global: &GlobalArgs, input: &Path, out: &Path, heatmap: Option<&str>) -> Result<i32> {
    let cfg = global.decode_config()?;
    let heatmap = heatmap.map(find_layer).transpose()?;
    let paths = inputs(input, "abg1")?;
    if paths.is_empty() {
        return Err(no_inputs(input, "abg1"));
    }
    let batch = prepare_outputs(input, out)?;
    let results = each(&paths, |p| {
        let tensor = load_tensor(p)?;
        let structure = decode(&tensor, &cfg).map_err(|e| CliError::core(p, e))?;
        let target = output_for(p, out, batch, "xml");
        write_atomic(
            &target,
            serialize_level(&structure, &LevelMeta::default()).as_bytes(),
        )?;
        if let Some(layer) = heatmap {
            write_heatmaps(p, &tensor, &cfg, layer, &target)?;
        }
        Ok(())
    });
    batch_status(&results)?;
    Ok(0)
}

fn write_heatmaps(
    input: &Path,
    tensor: &LayerTensor,
    cfg: &DecodeConfig,
    layer: DecoderLayer,
    xml: &Path,
) -> Result<()> {
    let masks = material_masks(tensor).map_err(|e| CliError::core(input, e))?;
    for material in Material::ALL {
        let ranking = build_selection_ranking(masks.material(material), cfg.clip);
        let image = pgm::heatmap(
            ranking.layer_values(layer.index()),
            ranking.width(),
            ranking.height(),
        );
        let target = xml.with_extension(format!("{material}.{}.pgm", layer.table_id()));
        write_atomic(&target, &image)?;
    }
    Ok(())
}

fn gen_corpus(params: &GeneratorParams, count: usize, out: &Path) -> Result<i32> {
    params.validate()?;
    ensure_dir(out)?;
    let width = count.saturating_sub(1).to_string().len().max(4);
    let records: Vec<Result<String>> = (0..count)
        .into_par_iter()
        .map(|i| {
            let structure = generate_structure(params, params.seed.wrapping_add(i as u64))?;
            let name = format!("structure_{i:0width$}.xml");
            write_atomic(
                &out.join(&name),
                serialize_level(&structure, &LevelMeta::default()).as_bytes(),
            )?;
            let shape = ShapeKey::of(&structure, &params.raster)?;
            Ok(manifest_line(&name, &MetadataKey::of(&structure), &shape))
        })
        .collect();
    let mut manifest = String::new();
    for r in records {
        manifest.push_str(&r?);
        manifest.push('\n');
    }
    write_atomic(&out.join("manifest.tsv"), manifest.as_bytes())?;
    println!("generated {count} structures in {}", out.display());
    Ok(0)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Raw file bytes with the keys of the structure they hold.
type Keyed = (Vec<u8>, MetadataKey, ShapeKey);

fn filter(global: &GlobalArgs, input: &Path, out: &Path) -> Result<i32> {
    let raster = global.raster_config()?;
    if !input.is_dir() {
        return Err(CliError::Usage(format!(
            "{} is not a directory",
            input.display()
        )));
    }
    let paths = inputs(input, "xml")?;
    let loaded = each(&paths, |p| {
        let bytes = read(p)?;
        let structure = load_structure(p)?;
        let shape = ShapeKey::of(&structure, &raster).map_err(|e| CliError::core(p, e))?;
        Ok((bytes, MetadataKey::of(&structure), shape))
    });
    let ok: Vec<(&PathBuf, &Keyed)> = loaded
        .iter()
        .filter_map(|(p, r)| r.as_ref().map(|v| (p, v)))
        .collect();
    let keys: Vec<(MetadataKey, ShapeKey)> = ok.iter().map(|(_, v)| (v.1, v.2)).collect();
    let outcome = filter_keys(&keys);

    ensure_dir(out)?;
    let mut manifest = String::new();
    for &i in &outcome.kept {
        let (path, (bytes, meta, shape)) = ok[i];
        let name = file_name(path);
        write_atomic(&out.join(&name), bytes)?;
        manifest.push_str(&manifest_line(&name, meta, shape));
        manifest.push('\n');
    }
    let mut report = String::new();
    let mut dropped: Vec<(usize, &str)> = outcome
        .dropped_metadata
        .iter()
        .map(|&i| (i, "metadata"))
        .chain(outcome.dropped_shape.iter().map(|&i| (i, "shape")))
        .collect();
    dropped.sort();
    for (i, reason) in dropped {
        report.push_str(&format!("{}\t{reason}\n", file_name(ok[i].0)));
    }
    write_atomic(&out.join("manifest.tsv"), manifest.as_bytes())?;
    write_atomic(&out.join("dropped.tsv"), report.as_bytes())?;
    println!(
        "kept {}, dropped {} ({} metadata, {} shape)",
        outcome.kept.len(),
        outcome.dropped(),
        outcome.dropped_metadata.len(),
        outcome.dropped_shape.len()
    );
    batch_status(&loaded)?;
    Ok(0)
}

fn stats(global: &GlobalArgs, input: &Path, csv: bool, out: Option<&Path>) -> Result<i32> {
    let raster = global.raster_config()?;
    let paths = inputs(input, "xml")?;
    let results = each(&paths, |p| {
        structure_metrics(&load_structure(p)?, &raster).map_err(|e| CliError::core(p, e))
    });
    let metrics: Vec<_> = results.iter().filter_map(|(_, m)| m.clone()).collect();
    if metrics.is_empty() {
        return Err(no_inputs(input, "xml"));
    }
    let summary = corpus_summary(&metrics)?;
    let text = if csv {
        summary.to_csv()
    } else {
        summary.to_table()
    };
    match out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    batch_status(&results)?;
    Ok(0)
}

fn stability(input: &Path, record: bool) -> Result<i32> {
    let paths = inputs(input, "xml")?;
    if paths.is_empty() {
        return Err(no_inputs(input, "xml"));
    }
    let results = each(&paths, |p| Ok(check_stability(&load_structure(p)?)));
    let mut unstable = 0;
    for (path, report) in &results {
        let Some(report) = report else { continue };
        if !report.stable {
            unstable += 1;
        }
        if record {
            println!("{}\t{}", path.display(), report.to_record());
        } else {
            print!("== {}\n{}", path.display(), report.to_text());
        }
    }
    batch_status(&results)?;
    Ok(if unstable > 0 { EXIT_NEGATIVE } else { 0 })
}

const LAYER_NAMES: [&str; 5] = ["air", "wood", "ice", "stone", "pig"];

fn render(global: &GlobalArgs, input: &Path, out: &Path) -> Result<i32> {
    let raster = global.raster_config()?;
    let mut paths = inputs(input, "abg1")?;
    if input.is_dir() {
        paths.extend(inputs(input, "xml")?);
        paths.sort();
    }
    if paths.is_empty() {
        return Err(no_inputs(input, "abg1"));
    }
    ensure_dir(out)?;
    let results = each(&paths, |p| {
        let tensor = if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("xml")) {
            let grid = rasterize(&load_structure(p)?, &raster).map_err(|e| CliError::core(p, e))?;
            to_multilayer(&grid)
        } else {
            load_tensor(p)?
        };
        let grid = from_multilayer(&tensor).map_err(|e| CliError::core(p, e))?;
        let name = stem(p);
        for (k, layer) in LAYER_NAMES.iter().enumerate() {
            let values: Vec<f64> = tensor.layer(k).iter().map(|&v| v as f64).collect();
            let image = pgm::heatmap(&values, tensor.width(), tensor.height());
            write_atomic(&out.join(format!("{name}.{layer}.pgm")), &image)?;
        }
        write_atomic(
            &out.join(format!("{name}.labels.pgm")),
            &pgm::label_image(&grid),
        )
    });
    batch_status(&results)?;
    Ok(0)
}

fn problems(structure: &Structure, raster: &RasterConfig) -> Vec<String> {
    let mut found = Vec::new();
    for (i, j) in structure.overlapping_pairs() {
        found.push(format!("blocks {i} and {j} overlap"));
    }
    for (i, b) in structure.blocks.iter().enumerate() {
        if b.bottom() < -1e-6 {
            found.push(format!("block {i} is below the ground"));
        }
    }
    if let Err(e) = rasterize(structure, raster) {
        found.push(e.to_string());
    }
    if structure.is_empty() {
        found.push("no blocks or pigs".into());
    }
    found
}

fn validate(global: &GlobalArgs, input: &Path) -> Result<i32> {
    let raster = global.raster_config()?;
    let paths = inputs(input, "xml")?;
    if paths.is_empty() {
        return Err(no_inputs(input, "xml"));
    }
    let results = each(&paths, |p| {
        let parsed = parse_level(&read_text(p)?).map_err(|e| CliError::core(p, e))?;
        Ok((parsed.warnings, problems(&parsed.structure, &raster)))
    });
    let mut invalid = 0;
    for (path, r) in &results {
        let Some((warnings, found)) = r else { continue };
        for w in warnings {
            println!("{}: warning: {w}", path.display());
        }
        if found.is_empty() {
            println!("{}: ok", path.display());
        } else {
            invalid += 1;
            println!("{}: invalid: {}", path.display(), found.join("; "));
        }
    }
    batch_status(&results)?;
    Ok(if invalid > 0 { EXIT_NEGATIVE } else { 0 })
}
