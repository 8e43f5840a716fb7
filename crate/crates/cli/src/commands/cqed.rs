//! `tpi cqed` — cavity-QED figures of merit.
//!
//! Computes the cooperativity C = 2g²/(κγ⊥) and the critical photon number
//! n₀ = γ⊥γ∥/(4g²), with γ⊥ = γ∥/2 + γ*. Rates accept frequency suffixes;
//! both outputs are dimensionless ratios, so the unit choice cancels as long
//! as it is consistent. Defaults reproduce the reference device point.

use std::path::Path;

use tpi_core::CqedParams;

use crate::config::parse_freq_hz;
use crate::error::CliResult;
use crate::output::{write_to, Cell, OutFormat, Table};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Emitter-cavity coupling g.
    #[arg(long, default_value = "4.7 GHz", value_name = "FREQ")]
    pub g: String,

    /// Cavity field decay kappa.
    #[arg(long, default_value = "36.8 GHz", value_name = "FREQ")]
    pub kappa: String,

    /// Emitter population decay gamma_parallel.
    #[arg(long, default_value = "0.35 GHz", value_name = "FREQ")]
    pub gamma_par: String,

    /// Pure dephasing gamma_star.
    #[arg(long, default_value = "0 Hz", value_name = "FREQ")]
    pub gamma_star: String,
}

pub fn run(args: &Args, out: Option<&Path>, format: OutFormat) -> CliResult<()> {
    let params = CqedParams::new(
        parse_freq_hz(&args.g)?,
        parse_freq_hz(&args.kappa)?,
        parse_freq_hz(&args.gamma_par)?,
        parse_freq_hz(&args.gamma_star)?,
    )?;
    let mut table = Table::new(&["quantity", "value"]);
    table.push(vec![
        Cell::Text("cooperativity".into()),
        Cell::Float(params.cooperativity()?),
    ]);
    table.push(vec![
        Cell::Text("critical_photon_number".into()),
        Cell::Float(params.critical_photon_number()?),
    ]);
    // Same units as the inputs (hertz when suffixes were used).
    table.push(vec![
        Cell::Text("gamma_perp".into()),
        Cell::Float(params.gamma_perp()),
    ]);
    write_to(out, |w| table.write(w, format))
}
