//! The `structforge` command-line tool.
//!
//! Every subcommand accepts a single file or a directory; directories are
//! processed file by file in path order, and a bad file is reported without
//! stopping the rest of the batch.

mod commands;
pub mod error;
mod files;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use structforge::decode::DecodeConfig;
use structforge::raster::{RasterConfig, DEFAULT_GRID_SIZE, DEFAULT_RASTER_SIZE};

pub use error::{CliError, Result};

/// Exit status for "ran, but some structure failed the check".
pub const EXIT_NEGATIVE: i32 = 1;
/// Exit status for usage, input and pipeline errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "structforge",
    version,
    about = "Encode, decode and analyse Science Birds structures"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Cell edge length in level units.
    #[arg(long, global = true, default_value_t = DEFAULT_RASTER_SIZE)]
    pub raster: f64,

    /// Grid width and height in cells.
    #[arg(long, global = true, default_value_t = DEFAULT_GRID_SIZE)]
    pub grid: usize,

    /// Minimum hit probability for a block placement; 0 disables clipping.
    #[arg(long, global = true, default_value_t = structforge::decode::DEFAULT_CLIP)]
    pub clip: f64,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    pub parallel: usize,
}

impl GlobalArgs {
    pub fn raster_config(&self) -> Result<RasterConfig> {
        let cfg = RasterConfig {
            raster_size: self.raster,
            grid_width: self.grid,
            grid_height: self.grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn decode_config(&self) -> Result<DecodeConfig> {
        if !(0.0..=1.0).contains(&self.clip) {
            return Err(CliError::Usage(format!(
                "--clip must be in [0, 1], got {}",
                self.clip
            )));
        }
        Ok(DecodeConfig {
            raster: self.raster_config()?,
            clip: self.clip,
        })
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Level XML to a one-hot ABG1 tensor.
    Encode {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// ABG1 tensor to level XML.
    Decode {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the selection ranking of this decoder layer (e.g. `2h`) as PGM.
        #[arg(long)]
        heatmap: Option<String>,
    },
    /// Generate a corpus of row-stacked structures.
    GenCorpus {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        min_rows: usize,
        #[arg(long, default_value_t = 7)]
        max_rows: usize,
        #[arg(long, default_value_t = 1.0)]
        min_width: f64,
        #[arg(long, default_value_t = 6.5)]
        max_width: f64,
        #[arg(long, default_value_t = 0.6)]
        pig_probability: f64,
    },
    /// Drop metadata and outline duplicates from a corpus directory.
    Filter {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Diversity statistics over a file or directory of levels.
    Stats {
        input: PathBuf,
        #[arg(long)]
        csv: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Support-graph stability report; exits 1 if any structure is unstable.
    Stability {
        input: PathBuf,
        /// One `key=value` line per file instead of the full report.
        #[arg(long)]
        record: bool,
    },
    /// Grayscale PGM images of each layer and of the label grid.
    Render {
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Check levels for parse problems, overlaps and grid fit; exits 1 if any fail.
    Validate { input: PathBuf },
}

fn init_logging() {
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("STRUCTFORGE_LOG"))
        .format_timestamp(None)
        .try_init();
}

/// Runs the tool on `argv` (including the program name) and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    init_logging();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            let err = CliError::Usage(first.trim_start_matches("error: ").to_string());
            eprintln!("{}", err.line());
            return EXIT_ERROR;
        }
    };
    match commands::dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            log::debug!("{e:?}");
            eprintln!("{}", e.line());
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn help_and_version_succeed() {
        assert_eq!(run(["structforge", "--version"]), 0);
        assert_eq!(run(["structforge", "stats", "--help"]), 0);
    }

    #[test]
    fn missing_subcommand_is_a_usage_error() {
        assert_eq!(run(["structforge"]), EXIT_ERROR);
    }

    #[test]
    fn error_lines_carry_the_kind() {
        let e = CliError::core(
            std::path::Path::new("a.xml"),
            structforge::Error::Validation {
                line: 3,
                attribute: "type".into(),
                message: "unknown block type `Foo`".into(),
            },
        );
        assert_eq!(
            e.line(),
            "error[validation]: a.xml: invalid level at line 3: attribute `type`: unknown block type `Foo`"
        );
        assert_eq!(
            CliError::Batch {
                failed: 1,
                total: 3
            }
            .line(),
            "error[batch]: 1 of 3 inputs failed"
        );
    }

    #[test]
    fn clip_outside_unit_interval_rejected() {
        let cli = Cli::try_parse_from(["structforge", "--clip=-0.5", "validate", "x.xml"]).unwrap();
        assert!(matches!(
            cli.global.decode_config(),
            Err(CliError::Usage(_))
        ));
    }
}
