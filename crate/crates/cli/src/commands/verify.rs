//! `tpi verify` — built-in cross-checks with a tolerance-gated exit code.
//!
//! * `oracle` — sweeps random configurations and compares the closed-form
//!   curves against the independent path-enumeration evaluation.
//! * `montecarlo` — runs the full seeded pipeline (simulate → write → read →
//!   correlate) with a flat unit target and checks the histogram is
//!   statistically flat at 1.
//! * `all` — both.
//!
//! Any failed gate exits with code 5 after the report is written.
//! `--inject-deviation X` adds X to every oracle value — a deliberate fault
//! so the sweep's ability to detect disagreement can itself be tested.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use tpi_core::correlator::{self, io};
use tpi_core::{oracle, tagsim, CorrelatorConfig, Normalization, SimConfig};

use crate::config::Settings;
use crate::error::{CliError, CliResult};
use crate::output::write_to;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Scope {
    Oracle,
    Montecarlo,
    All,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Which checks to run.
    #[arg(value_enum, default_value_t = Scope::All)]
    pub scope: Scope,

    /// Random configurations in the oracle sweep.
    #[arg(long, default_value_t = 250)]
    pub configs: usize,

    /// Lags evaluated per configuration (each in both polarization modes).
    #[arg(long, default_value_t = 12)]
    pub lags: usize,

    /// Self-test fault injection: add X to every oracle value. Nonzero X
    /// must make the sweep fail (exit 5).
    #[arg(long, value_name = "X", default_value_t = 0.0)]
    pub inject_deviation: f64,
}

/// Montecarlo gates: fraction of bins within 3σ and the grand-mean window.
const MIN_WITHIN_3_SIGMA: f64 = 0.99;
const MEAN_TOLERANCE: f64 = 0.01;

fn run_oracle(args: &Args, seed: u64, w: &mut dyn Write) -> std::io::Result<bool> {
    let report = match oracle::equivalence_sweep(seed, args.configs, args.lags, args.inject_deviation)
    {
        Ok(r) => r,
        Err(e) => {
            writeln!(w, "oracle sweep failed to run: {e}")?;
            return Ok(false);
        }
    };
    let passed = report.passed();
    writeln!(
        w,
        "oracle: {} configs x {} lags -> {} evaluations",
        args.configs, args.lags, report.evaluations
    )?;
    writeln!(
        w,
        "oracle: max relative deviation {:.3e} at tau = {:.6e} s (tolerance {:.1e})",
        report.max_deviation, report.worst_tau, report.tolerance
    )?;
    writeln!(w, "oracle: {}", if passed { "PASS" } else { "FAIL" })?;
    Ok(passed)
}

fn run_montecarlo(seed: u64, w: &mut dyn Write) -> CliResult<bool> {
    // Flat unit target: the pair generator reduces to two independent
    // Poisson streams, so every bin of the normalized histogram estimates 1.
    let sim = SimConfig::new(5e4, 5e4, 20.0, 1e-6, seed)?;
    let (a, b) = tagsim::generate_pair_correlated(&sim, |_| 1.0)?;

    let dir = tempfile::tempdir().map_err(|e| CliError::Io(format!("tempdir: {e}")))?;
    let path_a = dir.path().join("a.ttg");
    let path_b = dir.path().join("b.ttg");
    io::write_tags(&path_a, &a)?;
    io::write_tags(&path_b, &b)?;
    let a = io::read_tags(&path_a)?;
    let b = io::read_tags(&path_b)?;

    let cfg = CorrelatorConfig::new(20_000, 1_000_000, Normalization::RateNormalized)?;
    let hist = correlator::correlate(&a, &b, &cfg)?;
    let g2 = hist.g2.as_ref().expect("rate-normalized");
    let sigma = hist.sigma.as_ref().expect("rate-normalized");

    let within = g2
        .iter()
        .zip(sigma)
        .filter(|(g, s)| (**g - 1.0).abs() <= 3.0 * **s)
        .count();
    let frac = within as f64 / g2.len() as f64;
    let mean = g2.iter().sum::<f64>() / g2.len() as f64;
    let pass_frac = frac >= MIN_WITHIN_3_SIGMA;
    let pass_mean = (mean - 1.0).abs() <= MEAN_TOLERANCE;

    let r = (|| -> std::io::Result<()> {
        writeln!(
            w,
            "montecarlo: flat-target pipeline, {} + {} tags, {} bins",
            a.len(),
            b.len(),
            g2.len()
        )?;
        writeln!(
            w,
            "montecarlo: {}/{} bins within 3 sigma of 1 ({:.1}%, gate {:.0}%)",
            within,
            g2.len(),
            100.0 * frac,
            100.0 * MIN_WITHIN_3_SIGMA
        )?;
        writeln!(
            w,
            "montecarlo: mean g2 = {:.6} (gate 1 +/- {MEAN_TOLERANCE})",
            mean
        )?;
        writeln!(
            w,
            "montecarlo: {}",
            if pass_frac && pass_mean { "PASS" } else { "FAIL" }
        )
    })();
    r.map_err(|e| CliError::Io(format!("report: {e}")))?;
    Ok(pass_frac && pass_mean)
}

pub fn run(args: &Args, settings: &Settings, out: Option<&Path>) -> CliResult<()> {
    let seed = settings.seed;
    let mut all_passed = true;
    let mut failure: Option<CliError> = None;

    write_to(out, |w| {
        if matches!(args.scope, Scope::Oracle | Scope::All) {
            all_passed &= run_oracle(args, seed, w)?;
        }
        if matches!(args.scope, Scope::Montecarlo | Scope::All) {
            match run_montecarlo(seed, w) {
                Ok(passed) => all_passed &= passed,
                Err(e) => failure = Some(e),
            }
        }
        Ok(())
    })?;

    if let Some(e) = failure {
        return Err(e);
    }
    if !all_passed {
        return Err(CliError::Tolerance(
            "one or more verification gates failed".into(),
        ));
    }
    Ok(())
}
