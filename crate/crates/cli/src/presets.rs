//! Named parameter presets.
//!
//! Every preset starts from the same baseline source — g²(0) = 0.03,
//! τ_corr = 115 ps, τ_coh = 10 µs, symmetric 50:50 splitters — and overrides
//! what its scenario needs. `tpi presets` lists them together with the
//! features each one is expected to show, so a run can be eyeballed against
//! the expectation without consulting anything else.
//!
//! * `short-delay*` — nanosecond arm imbalance, coincidence features merge
//!   around zero lag.
//! * `fibre-<L>km` — long fibre delay lines at 5 µs/km; the ±Δt features
//!   move across the peak/dip threshold as the delay grows.
//! * `beat-<f>khz` — 1 km delay imbalance plus a frequency shift in the long
//!   arm; cos(ΩΔt) decides the ±Δt feature and a beat rides the envelope.
//! * `desk-*` — scaled-down numbers (τ_coh = 1 µs) tuned so a seeded
//!   simulate → correlate run resolves the features in about a second of
//!   synthetic acquisition setup and ~10⁷ tags.

use tpi_core::PolarizationMode;

use crate::config::Settings;

/// A named settings transform plus its expected observable features.
pub struct Preset {
    pub name: &'static str,
    pub summary: &'static str,
    /// Features a run with this preset should reproduce.
    pub expect: &'static [&'static str],
    /// Curve the scenario is about; `simulate --kind pair` targets it.
    pub mode: PolarizationMode,
    apply: fn(&mut Settings),
}

impl Preset {
    pub fn apply(&self, s: &mut Settings) {
        (self.apply)(s)
    }
}

const TAU: f64 = std::f64::consts::TAU;

fn fibre(s: &mut Settings, km: f64) {
    s.delta_t = km * crate::config::SECONDS_PER_KM;
    s.tau_min = -2.0 * s.delta_t;
    s.tau_max = 2.0 * s.delta_t;
    s.points = 4001;
}

fn beat(s: &mut Settings, f_hz: f64) {
    s.delta_t = 5e-6;
    s.omega = TAU * f_hz;
    s.tau_min = -15e-6;
    s.tau_max = 15e-6;
    s.points = 6001;
}

fn desk(s: &mut Settings) {
    s.tau_coh = 1e-6;
    s.tau_corr = 10e-9;
    s.delta_t = 0.5e-6;
    s.tau_min = -1.5e-6;
    s.tau_max = 1.5e-6;
    s.points = 751;
}

/// All built-in presets, in listing order.
pub static PRESETS: &[Preset] = &[
    Preset {
        name: "short-delay",
        summary: "2.1 ns arm imbalance, ideal overlap (v0 = 1)",
        expect: &[
            "cross-polarized zero-lag value 0.515",
            "parallel zero-lag value 0.015, background 0.5",
            "overlapping statistics features at 0 and +/-2.1 ns",
        ],
        mode: PolarizationMode::Parallel,
        apply: |_| {},
    },
    Preset {
        name: "short-delay-device",
        summary: "2.1 ns arm imbalance with measured mode overlap v0 = 0.971",
        expect: &[
            "zero-lag two-photon visibility 0.9427 = 0.971/(1 + 0.03)",
            "background visibility 0.5 for tau_corr << |tau| << tau_coh",
        ],
        mode: PolarizationMode::Parallel,
        apply: |s| s.v0 = 0.971,
    },
    Preset {
        name: "short-delay-ideal",
        summary: "2.1 ns arm imbalance with an ideal single-photon source",
        expect: &[
            "parallel zero-lag value 0 (g2_zero = 0, v0 = 1)",
            "cross-polarized zero-lag value 0.5",
        ],
        mode: PolarizationMode::Parallel,
        apply: |s| s.g2_zero = 0.0,
    },
    Preset {
        name: "fibre-0.12km",
        summary: "0.12 km delay fibre (delta_t = 0.6 us)",
        expect: &["side features at +/-0.6 us are peaks (margin +0.43)"],
        mode: PolarizationMode::Parallel,
        apply: |s| fibre(s, 0.12),
    },
    Preset {
        name: "fibre-1km",
        summary: "1 km delay fibre (delta_t = 5 us)",
        expect: &["side features at +/-5 us are peaks (margin +0.17)"],
        mode: PolarizationMode::Parallel,
        apply: |s| fibre(s, 1.0),
    },
    Preset {
        name: "fibre-2km",
        summary: "2 km delay fibre (delta_t = 10 us)",
        expect: &["side features at +/-10 us are still peaks (margin +0.05)"],
        mode: PolarizationMode::Parallel,
        apply: |s| fibre(s, 2.0),
    },
    Preset {
        name: "fibre-8km",
        summary: "8 km delay fibre (delta_t = 40 us), past the threshold",
        expect: &[
            "side features at +/-40 us flip to dips (margin -0.015)",
            "peak/dip threshold delay 17.5 us ~ 3.5 km of fibre",
        ],
        mode: PolarizationMode::Parallel,
        apply: |s| fibre(s, 8.0),
    },
    Preset {
        name: "beat-48.0khz",
        summary: "1 km fibre + 48.0 kHz shift, cos(omega dt) = -1",
        expect: &["side features are dips; beat period 20.8 us"],
        mode: PolarizationMode::Parallel,
        apply: |s| beat(s, 48.0e3),
    },
    Preset {
        name: "beat-101.6khz",
        summary: "1 km fibre + 101.6 kHz shift, cos(omega dt) ~ -0.95",
        expect: &["side features are dips; beat period 9.8 us"],
        mode: PolarizationMode::Parallel,
        apply: |s| beat(s, 101.6e3),
    },
    Preset {
        name: "beat-147.1khz",
        summary: "1 km fibre + 147.1 kHz shift, cos(omega dt) ~ -0.2",
        expect: &["side features are dips; beat period 6.8 us"],
        mode: PolarizationMode::Parallel,
        apply: |s| beat(s, 147.1e3),
    },
    Preset {
        name: "beat-194.7khz",
        summary: "1 km fibre + 194.7 kHz shift, cos(omega dt) ~ +0.93",
        expect: &["side features recover to peaks; beat period 5.1 us"],
        mode: PolarizationMode::Parallel,
        apply: |s| beat(s, 194.7e3),
    },
    Preset {
        name: "beat-246.0khz",
        summary: "1 km fibre + 246.0 kHz shift, cos(omega dt) ~ -1",
        expect: &["side features are dips again; beat period 4.1 us"],
        mode: PolarizationMode::Parallel,
        apply: |s| beat(s, 246.0e3),
    },
    Preset {
        name: "beat-laser",
        summary: "beat-101.6khz with Poissonian statistics (g2_zero = 1)",
        expect: &[
            "cross-polarized curve flat at 1 (no statistics features)",
            "pure first-order beat on the parallel curve",
        ],
        mode: PolarizationMode::Parallel,
        apply: |s| {
            beat(s, 101.6e3);
            s.g2_zero = 1.0;
        },
    },
    Preset {
        name: "desk-cross",
        summary: "desk-scale cross-polarized run (tau_coh = 1 us, delta_t = 0.5 us)",
        expect: &[
            "statistics dips at 0 and +/-0.5 us, depths 0.485 and 0.2425",
            "simulate/correlate defaults resolve each bin to ~5% in 1000 s",
        ],
        mode: PolarizationMode::Cross,
        apply: desk,
    },
    Preset {
        name: "desk-parallel",
        summary: "desk-scale parallel run, interference active, no shift",
        expect: &[
            "deep zero-lag dip to 0.015 over a 0.5 background",
            "side features at +/-0.5 us are peaks",
        ],
        mode: PolarizationMode::Parallel,
        apply: desk,
    },
    Preset {
        name: "desk-beat",
        summary: "desk-scale parallel run with shift omega = 2 pi / delta_t",
        expect: &[
            "beat period equal to delta_t = 0.5 us",
            "side features at +/-0.5 us are peaks (cos(omega dt) = 1)",
        ],
        mode: PolarizationMode::Parallel,
        apply: |s| {
            desk(s);
            s.omega = TAU / s.delta_t;
        },
    },
];

/// Look up a preset by name.
pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}
