//! `tpi analytic` — closed-form correlation curves on a lag grid.

use std::path::Path;

use clap::ValueEnum;
use tpi_core::{analytic, PolarizationMode};

use crate::config::Settings;
use crate::error::CliResult;
use crate::output::{write_to, Cell, OutFormat, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Cross-polarized coincidence curve (statistics features only).
    Cross,
    /// Parallel-polarized curve (interference active).
    Parallel,
    /// Both curves on a shared grid.
    Both,
    /// Two-photon interference visibility 1 − parallel/cross.
    Visibility,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Curve(s) to evaluate.
    #[arg(long, value_enum, default_value_t = Mode::Both)]
    pub mode: Mode,
}

pub fn run(
    args: &Args,
    settings: &Settings,
    out: Option<&Path>,
    format: OutFormat,
) -> CliResult<()> {
    let cfg = settings.interferometer()?;
    let model = settings.source_model()?;
    let grid = settings.lag_grid()?;

    let table = match args.mode {
        Mode::Cross | Mode::Parallel => {
            let mode = if args.mode == Mode::Cross {
                PolarizationMode::Cross
            } else {
                PolarizationMode::Parallel
            };
            let series = analytic::sample_series(&cfg, &model, mode, &grid)?;
            let mut t = Table::new(&["tau_s", "g2"]);
            for (tau, g2) in series.taus.iter().zip(&series.values) {
                t.push(vec![Cell::Float(*tau), Cell::Float(*g2)]);
            }
            t
        }
        Mode::Both => {
            let cross = analytic::sample_series(&cfg, &model, PolarizationMode::Cross, &grid)?;
            let par = analytic::sample_series(&cfg, &model, PolarizationMode::Parallel, &grid)?;
            let mut t = Table::new(&["tau_s", "g2_cross", "g2_parallel"]);
            for i in 0..grid.len() {
                t.push(vec![
                    Cell::Float(grid[i]),
                    Cell::Float(cross.values[i]),
                    Cell::Float(par.values[i]),
                ]);
            }
            t
        }
        Mode::Visibility => {
            let mut t = Table::new(&["tau_s", "visibility"]);
            for &tau in &grid {
                t.push(vec![
                    Cell::Float(tau),
                    Cell::Float(analytic::visibility(&cfg, &model, tau)?),
                ]);
            }
            t
        }
    };
    write_to(out, |w| table.write(w, format))
}
