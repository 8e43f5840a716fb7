//! `tpi simulate` — seeded synthetic time-tag streams.
//!
//! Three generators:
//!
//! * `poisson` — one Poisson stream at `[simulation] rate1`,
//! * `renewal` — one antibunched renewal stream with the `[source]`
//!   statistics,
//! * `pair` — two streams whose cross-correlation follows the configured
//!   closed-form curve (`--target`, defaulting to the preset's mode).
//!
//! Single streams write to `--out`; the pair kind writes binary files via
//! `--out-a`/`--out-b` or, with `--text`, both channels interleaved into one
//! text file at `--out`. Identical settings and seed produce byte-identical
//! files.

use std::path::Path;

use clap::ValueEnum;
use tpi_core::correlator::io;
use tpi_core::{analytic, tagsim, PolarizationMode, TagStream};

use crate::config::Settings;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Poisson,
    Pair,
    Renewal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Cross,
    Parallel,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Generator to run.
    #[arg(long, value_enum, default_value_t = Kind::Pair)]
    pub kind: Kind,

    /// Curve the pair generator reproduces; defaults to the preset's mode
    /// (cross when no preset is active).
    #[arg(long, value_enum)]
    pub target: Option<Target>,

    /// Write the interleaved text format instead of binary.
    #[arg(long)]
    pub text: bool,

    /// Detector-A output path (pair kind, binary).
    #[arg(long, value_name = "PATH")]
    pub out_a: Option<std::path::PathBuf>,

    /// Detector-B output path (pair kind, binary).
    #[arg(long, value_name = "PATH")]
    pub out_b: Option<std::path::PathBuf>,
}

fn write_single(stream: &TagStream, out: Option<&Path>, text: bool) -> CliResult<()> {
    let path = out.ok_or_else(|| CliError::Usage("simulate requires --out PATH".into()))?;
    if text {
        io::write_tags_text(path, &[stream])?;
    } else {
        io::write_tags(path, stream)?;
    }
    log::info!("wrote {} tags to {}", stream.len(), path.display());
    Ok(())
}

pub fn run(
    args: &Args,
    settings: &Settings,
    preset_mode: Option<PolarizationMode>,
    out: Option<&Path>,
) -> CliResult<()> {
    match args.kind {
        Kind::Poisson => {
            let stream =
                tagsim::generate_poisson(settings.rate1, settings.duration, settings.seed)?;
            write_single(&stream, out, args.text)
        }
        Kind::Renewal => {
            let stream = tagsim::generate_antibunched_renewal(
                settings.rate1,
                settings.g2_zero,
                settings.tau_corr,
                settings.duration,
                settings.seed,
            )?;
            write_single(&stream, out, args.text)
        }
        Kind::Pair => {
            let sim = settings.sim_config()?;
            let cfg = settings.interferometer()?;
            let model = settings.source_model()?;
            let mode = match args.target {
                Some(Target::Cross) => PolarizationMode::Cross,
                Some(Target::Parallel) => PolarizationMode::Parallel,
                None => preset_mode.unwrap_or(PolarizationMode::Cross),
            };
            // Surface parameter problems before the generator runs; inside
            // the closure the same evaluation cannot fail anymore.
            analytic::g2_for_mode(&cfg, &model, mode, 0.0)?;
            let target = move |tau: f64| {
                analytic::g2_for_mode(&cfg, &model, mode, tau)
                    .expect("validated at tau = 0; errors depend only on parameters")
            };
            let (a, b) = tagsim::generate_pair_correlated(&sim, target)?;
            if args.text {
                let path = out.ok_or_else(|| {
                    CliError::Usage("pair --text requires --out PATH".into())
                })?;
                io::write_tags_text(path, &[&a, &b])?;
                log::info!(
                    "wrote {} + {} tags to {}",
                    a.len(),
                    b.len(),
                    path.display()
                );
                Ok(())
            } else {
                let (Some(pa), Some(pb)) = (&args.out_a, &args.out_b) else {
                    return Err(CliError::Usage(
                        "pair kind requires --out-a and --out-b (or --text with --out)".into(),
                    ));
                };
                io::write_tags(pa, &a)?;
                io::write_tags(pb, &b)?;
                log::info!(
                    "wrote {} tags to {} and {} tags to {}",
                    a.len(),
                    pa.display(),
                    b.len(),
                    pb.display()
                );
                Ok(())
            }
        }
    }
}
