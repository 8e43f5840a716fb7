//! `tpi classify` — peak/dip prediction for the ±Δt coincidence features.
//!
//! One row per (arm delay, frequency shift) combination. Besides the
//! predicted kind and signed margin at each side, every row carries the
//! threshold delay τ* beyond which that side's peak flips to a dip, and the
//! inverse question: the coherence time that would place *this* delay
//! exactly on the boundary (useful for asking how coherent a source must be
//! to keep a peak after a given length of fibre).
//!
//! Non-finite table entries are deliberate: threshold `NaN` means no
//! positive delay ever gives a peak, `inf` means every delay keeps one;
//! boundary `NaN` means no coherence time puts this delay on the boundary.

use std::path::Path;

use tpi_core::{analytic, Error, FeatureKind, InterferometerConfig, SideLocation};

use crate::config::{self, Settings};
use crate::error::{CliError, CliResult};
use crate::output::{write_to, Cell, OutFormat, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Arm delays to scan, comma-separated with unit suffixes
    /// (e.g. `0.6us,5us,40us`). Defaults to the configured delay.
    #[arg(long, value_delimiter = ',', value_name = "TIMES")]
    pub delta_t: Vec<String>,

    /// Fibre lengths to scan in km at 5 us/km (e.g. `0.12,1,2,8`);
    /// appended to --delta-t values.
    #[arg(long, value_delimiter = ',', value_name = "KM")]
    pub fibre_km: Vec<String>,

    /// Frequency shifts Omega/2pi to scan (e.g. `48kHz,101.6kHz`).
    /// Defaults to the configured shift.
    #[arg(long, value_delimiter = ',', value_name = "FREQS")]
    pub shift: Vec<String>,
}

const COLUMNS: &[&str] = &[
    "delta_t_s",
    "fibre_km",
    "shift_hz",
    "cos_omega_dt",
    "kind_plus",
    "margin_plus",
    "kind_minus",
    "margin_minus",
    "threshold_plus_s",
    "threshold_minus_s",
    "boundary_tau_coh_plus_s",
    "boundary_tau_coh_minus_s",
];

fn kind_str(kind: FeatureKind) -> &'static str {
    match kind {
        FeatureKind::Peak => "peak",
        FeatureKind::Dip => "dip",
        FeatureKind::Flat => "flat",
    }
}

/// Threshold delay for one side: NaN when no delay yields a peak, inf when
/// every delay does.
fn threshold_cell(
    cfg: &InterferometerConfig,
    model: &tpi_core::SourceModel,
    side: SideLocation,
) -> CliResult<f64> {
    match analytic::side_threshold(cfg, model, side) {
        Ok(v) => Ok(v),
        Err(Error::UndefinedThreshold { .. }) => Ok(f64::NAN),
        Err(Error::PreconditionViolated(_)) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

/// Coherence time that would place `delta_t` exactly on this side's
/// peak/dip boundary: τ_c = 2Δt / ln(R·V₀ / (T·g²(0))).
fn boundary_tau_coh(
    cfg: &InterferometerConfig,
    g2_zero: f64,
    side: SideLocation,
) -> f64 {
    let (r_loc, t_loc) = match side {
        SideLocation::Plus => (cfg.r_b, cfg.t_b),
        SideLocation::Minus => (cfg.t_b, cfg.r_b),
    };
    if g2_zero <= 0.0 || t_loc == 0.0 {
        return f64::NAN;
    }
    let arg = r_loc * cfg.v0 / (t_loc * g2_zero);
    if arg <= 1.0 {
        return f64::NAN;
    }
    2.0 * cfg.delta_t / arg.ln()
}

pub fn run(
    args: &Args,
    settings: &Settings,
    out: Option<&Path>,
    format: OutFormat,
) -> CliResult<()> {
    let model = settings.source_model()?;

    let mut delays: Vec<f64> = Vec::new();
    for spec in &args.delta_t {
        delays.push(config::parse_time_s(spec)?);
    }
    for spec in &args.fibre_km {
        delays.push(config::parse_length_km(spec)? * config::SECONDS_PER_KM);
    }
    if delays.is_empty() {
        delays.push(settings.delta_t);
    }

    let mut omegas: Vec<f64> = Vec::new();
    for spec in &args.shift {
        omegas.push(std::f64::consts::TAU * config::parse_freq_hz(spec)?);
    }
    if omegas.is_empty() {
        omegas.push(settings.omega);
    }

    let mut table = Table::new(COLUMNS);
    for &delta_t in &delays {
        for &omega in &omegas {
            let cfg = InterferometerConfig::new(
                settings.r_a, settings.t_a, settings.r_b, settings.t_b, delta_t, omega,
                settings.v0,
            )
            .map_err(|e| CliError::Invalid(format!("delta_t = {delta_t:e} s: {e}")))?;
            let plus = analytic::classify_side_feature(
                &cfg,
                &model,
                SideLocation::Plus,
                tpi_core::DEFAULT_CLASSIFY_EPSILON,
            );
            let minus = analytic::classify_side_feature(
                &cfg,
                &model,
                SideLocation::Minus,
                tpi_core::DEFAULT_CLASSIFY_EPSILON,
            );
            table.push(vec![
                Cell::Float(delta_t),
                Cell::Float(delta_t / config::SECONDS_PER_KM),
                Cell::Float(omega / std::f64::consts::TAU),
                Cell::Float((omega * delta_t).cos()),
                Cell::Text(kind_str(plus.kind).into()),
                Cell::Float(plus.contrast),
                Cell::Text(kind_str(minus.kind).into()),
                Cell::Float(minus.contrast),
                Cell::Float(threshold_cell(&cfg, &model, SideLocation::Plus)?),
                Cell::Float(threshold_cell(&cfg, &model, SideLocation::Minus)?),
                Cell::Float(boundary_tau_coh(&cfg, model.g2_zero, SideLocation::Plus)),
                Cell::Float(boundary_tau_coh(&cfg, model.g2_zero, SideLocation::Minus)),
            ]);
        }
    }
    write_to(out, |w| table.write(w, format))
}
