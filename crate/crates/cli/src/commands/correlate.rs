//! `tpi correlate` — coincidence histogram between two tag files.
//!
//! Inputs may be binary or text tag files in any combination; the format is
//! auto-detected from the magic bytes. Text files holding several channels
//! need `--channel-a` / `--channel-b` to select one. Binning defaults come
//! from the `[correlator]` section and can be overridden per run.

use std::path::{Path, PathBuf};

use tpi_core::correlator::{self, io};
use tpi_core::TagStream;

use crate::config::{self, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{write_json, write_to, OutFormat};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Detector-A tag file.
    pub file_a: PathBuf,

    /// Detector-B tag file.
    pub file_b: PathBuf,

    /// Channel to read from a text-format A file.
    #[arg(long, value_name = "CH")]
    pub channel_a: Option<u8>,

    /// Channel to read from a text-format B file.
    #[arg(long, value_name = "CH")]
    pub channel_b: Option<u8>,

    /// Histogram bin width (e.g. `4ns`); overrides [correlator] bin_width.
    #[arg(long, value_name = "TIME")]
    pub bin_width: Option<String>,

    /// Histogram half-span (e.g. `1.5us`); overrides [correlator] max_lag.
    #[arg(long, value_name = "TIME")]
    pub max_lag: Option<String>,

    /// `rate` (g2 + error bars) or `raw` (counts only).
    #[arg(long, value_name = "N")]
    pub normalization: Option<String>,

    /// Process in parallel segments of this length (e.g. `1s`); the result
    /// is bit-identical to the single-pass path.
    #[arg(long, value_name = "TIME")]
    pub segment: Option<String>,
}

fn load(path: &Path, channel: Option<u8>) -> CliResult<TagStream> {
    if io::is_binary_tag_file(path)? {
        if channel.is_some() {
            return Err(CliError::Usage(format!(
                "{}: --channel-* selects from text files; binary files carry one channel",
                path.display()
            )));
        }
        Ok(io::read_tags(path)?)
    } else {
        Ok(io::read_tags_text(path, channel)?)
    }
}

pub fn run(
    args: &Args,
    settings: &Settings,
    out: Option<&Path>,
    format: OutFormat,
) -> CliResult<()> {
    let mut settings = settings.clone();
    if let Some(v) = &args.bin_width {
        settings.apply("correlator", "bin_width", v)?;
    }
    if let Some(v) = &args.max_lag {
        settings.apply("correlator", "max_lag", v)?;
    }
    if let Some(v) = &args.normalization {
        settings.apply("correlator", "normalization", v)?;
    }
    let cfg = settings.correlator_config()?;

    let a = load(&args.file_a, args.channel_a)?;
    let b = load(&args.file_b, args.channel_b)?;

    let hist = match &args.segment {
        None => correlator::correlate(&a, &b, &cfg)?,
        Some(spec) => {
            let seg = config::parse_time_s(spec)?;
            correlator::correlate_batched(&a, &b, &cfg, seg)?
        }
    };

    match format {
        OutFormat::Csv => write_to(out, |mut w| io::write_histogram_csv_to(&mut w, &hist)),
        OutFormat::Json => {
            let value = serde_json::json!({
                "bin_width_s": cfg.bin_width_ps() as f64 * 1e-12,
                "max_lag_s": cfg.max_lag_ps() as f64 * 1e-12,
                "bin_centers_s": hist.bin_centers,
                "counts": hist.counts,
                "g2": hist.g2,
                "sigma": hist.sigma,
                "meta": {
                    "rate_a_hz": hist.meta.rate_a_hz,
                    "rate_b_hz": hist.meta.rate_b_hz,
                    "duration_a_s": hist.meta.duration_a_s,
                    "duration_b_s": hist.meta.duration_b_s,
                    "pairs": hist.meta.pairs,
                },
            });
            write_to(out, |w| write_json(w, &value))
        }
    }
}
