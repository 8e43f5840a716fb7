//! Run settings: defaults, preset/config-file/flag merging, unit parsing.
//!
//! Configuration files are plain UTF-8 text, read line by line:
//!
//! ```text
//! # comment
//! [source]
//! g2_zero  = 0.03
//! tau_corr = 115 ps
//! tau_coh  = 10 us
//!
//! [interferometer]
//! delta_t = 2.1 ns        # or: fibre_length = 1 km  (5 us per km)
//! shift   = 101.6 kHz     # beat frequency Omega / 2pi
//! v0      = 0.971
//! ```
//!
//! Keys take `key = value` form inside `[section]` headers. Times accept the
//! suffixes `ps`, `ns`, `us`, `ms`, `s`; frequencies accept `Hz`, `kHz`,
//! `MHz`, `GHz`; fibre lengths accept `km` and convert at 5 µs of arm delay
//! per kilometre. Bare numbers are SI base units (seconds / hertz).
//! `#` starts a comment, full-line or trailing; blank lines are skipped;
//! unknown sections or keys are errors so typos cannot silently fall back to
//! defaults.
//!
//! Merge precedence, lowest to highest: built-in defaults, `--preset`,
//! `--config FILE`, repeated `--set section.key=value` (same grammar as a
//! file line), then command-specific flags.

use tpi_core::{
    CorrelatorConfig, InterferometerConfig, Normalization, SimConfig, SourceModel,
};

/// Arm delay per kilometre of fibre, seconds (group velocity ≈ c/1.47).
pub const SECONDS_PER_KM: f64 = 5e-6;

/// A configuration error with enough context to locate the offending line.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Every tunable the commands read, flattened. Values are SI base units.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    // [source]
    pub g2_zero: f64,
    pub tau_corr: f64,
    pub tau_coh: f64,
    // [interferometer]
    pub r_a: f64,
    pub t_a: f64,
    pub r_b: f64,
    pub t_b: f64,
    pub delta_t: f64,
    /// Angular beat frequency Ω, rad/s (`shift` key is Ω/2π).
    pub omega: f64,
    pub v0: f64,
    // [grid]
    pub tau_min: f64,
    pub tau_max: f64,
    pub points: usize,
    // [simulation]
    pub rate1: f64,
    pub rate2: f64,
    pub duration: f64,
    pub window: f64,
    pub seed: u64,
    // [correlator]
    pub bin_width: f64,
    pub max_lag: f64,
    pub rate_normalized: bool,
}

impl Default for Settings {
    /// Short-delay device numbers with an ideal overlap, desk-scale
    /// simulation rates; every command runs sensibly out of the box.
    fn default() -> Self {
        Settings {
            g2_zero: 0.03,
            tau_corr: 115e-12,
            tau_coh: 10e-6,
            r_a: 0.5,
            t_a: 0.5,
            r_b: 0.5,
            t_b: 0.5,
            delta_t: 2.1e-9,
            omega: 0.0,
            v0: 1.0,
            tau_min: -25e-9,
            tau_max: 25e-9,
            points: 2001,
            rate1: 1e4,
            rate2: 1e4,
            duration: 1000.0,
            window: 4e-6,
            seed: 1,
            bin_width: 4e-9,
            max_lag: 1.5e-6,
            rate_normalized: true,
        }
    }
}

/// Strip a trailing `#` comment and surrounding whitespace.
fn strip_comment(s: &str) -> &str {
    match s.find('#') {
        Some(i) => s[..i].trim(),
        None => s.trim(),
    }
}

/// Parse a number with an optional suffix from `scales` (longest first).
fn parse_scaled(value: &str, scales: &[(&str, f64)], what: &str) -> Result<f64, ConfigError> {
    let v = value.trim();
    let (number, factor) = scales
        .iter()
        .find_map(|&(suffix, factor)| {
            v.strip_suffix(suffix).map(|rest| (rest.trim_end(), factor))
        })
        .unwrap_or((v, 1.0));
    let x: f64 = number.parse().map_err(|_| {
        ConfigError(format!("cannot parse {what} value `{value}`"))
    })?;
    if !x.is_finite() {
        return Err(ConfigError(format!("{what} value `{value}` is not finite")));
    }
    Ok(x * factor)
}

/// Time in seconds; bare numbers are seconds.
pub fn parse_time_s(value: &str) -> Result<f64, ConfigError> {
    // "ms" before "s" etc.: longest suffix must win.
    parse_scaled(
        value,
        &[
            ("ps", 1e-12),
            ("ns", 1e-9),
            ("us", 1e-6),
            ("ms", 1e-3),
            ("s", 1.0),
        ],
        "time",
    )
}

/// Frequency in hertz; bare numbers are hertz.
pub fn parse_freq_hz(value: &str) -> Result<f64, ConfigError> {
    parse_scaled(
        value,
        &[("GHz", 1e9), ("MHz", 1e6), ("kHz", 1e3), ("Hz", 1.0)],
        "frequency",
    )
}

/// Fibre length in kilometres; bare numbers are kilometres.
pub fn parse_length_km(value: &str) -> Result<f64, ConfigError> {
    parse_scaled(value, &[("km", 1.0)], "length")
}

/// Dimensionless float.
pub fn parse_plain(value: &str) -> Result<f64, ConfigError> {
    let x: f64 = value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse number `{value}`")))?;
    if !x.is_finite() {
        return Err(ConfigError(format!("number `{value}` is not finite")));
    }
    Ok(x)
}

fn parse_usize(value: &str) -> Result<usize, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse integer `{value}`")))
}

fn parse_u64(value: &str) -> Result<u64, ConfigError> {
    value
        .trim()
        .parse()
        .map_err(|_| ConfigError(format!("cannot parse integer `{value}`")))
}

impl Settings {
    /// Apply one `section` / `key` / `value` triple.
    pub fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        match (section, key) {
            ("source", "g2_zero") => self.g2_zero = parse_plain(value)?,
            ("source", "tau_corr") => self.tau_corr = parse_time_s(value)?,
            ("source", "tau_coh") => self.tau_coh = parse_time_s(value)?,
            ("interferometer", "r_a") => self.r_a = parse_plain(value)?,
            ("interferometer", "t_a") => self.t_a = parse_plain(value)?,
            ("interferometer", "r_b") => self.r_b = parse_plain(value)?,
            ("interferometer", "t_b") => self.t_b = parse_plain(value)?,
            ("interferometer", "delta_t") => self.delta_t = parse_time_s(value)?,
            ("interferometer", "fibre_length") => {
                self.delta_t = parse_length_km(value)? * SECONDS_PER_KM;
            }
            ("interferometer", "shift") => {
                self.omega = std::f64::consts::TAU * parse_freq_hz(value)?;
            }
            ("interferometer", "v0") => self.v0 = parse_plain(value)?,
            ("grid", "tau_min") => self.tau_min = parse_time_s(value)?,
            ("grid", "tau_max") => self.tau_max = parse_time_s(value)?,
            ("grid", "points") => self.points = parse_usize(value)?,
            ("simulation", "rate1") => self.rate1 = parse_freq_hz(value)?,
            ("simulation", "rate2") => self.rate2 = parse_freq_hz(value)?,
            ("simulation", "duration") => self.duration = parse_time_s(value)?,
            ("simulation", "window") => self.window = parse_time_s(value)?,
            ("simulation", "seed") => self.seed = parse_u64(value)?,
            ("correlator", "bin_width") => self.bin_width = parse_time_s(value)?,
            ("correlator", "max_lag") => self.max_lag = parse_time_s(value)?,
            ("correlator", "normalization") => {
                self.rate_normalized = match value.trim() {
                    "rate" => true,
                    "raw" => false,
                    other => {
                        return Err(ConfigError(format!(
                            "normalization must be `rate` or `raw`, got `{other}`"
                        )))
                    }
                }
            }
            ("", _) => {
                return Err(ConfigError(format!(
                    "key `{key}` appears before any [section] header"
                )))
            }
            _ => {
                return Err(ConfigError(format!(
                    "unknown setting `{section}.{key}`"
                )))
            }
        }
        Ok(())
    }

    /// Apply a whole config file.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut section = String::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(inner) = line.strip_prefix('[') {
                let Some(name) = inner.strip_suffix(']') else {
                    return Err(ConfigError(format!(
                        "line {lineno}: unterminated section header `{line}`"
                    )));
                };
                section = name.trim().to_ascii_lowercase();
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(ConfigError(format!(
                    "line {lineno}: expected `key = value`, got `{line}`"
                )));
            };
            self.apply(&section, key.trim(), value.trim())
                .map_err(|e| ConfigError(format!("line {lineno}: {e}")))?;
        }
        Ok(())
    }

    /// Apply one `--set section.key=value` override.
    pub fn apply_set(&mut self, spec: &str) -> Result<(), ConfigError> {
        let Some((path, value)) = spec.split_once('=') else {
            return Err(ConfigError(format!(
                "--set expects section.key=value, got `{spec}`"
            )));
        };
        let Some((section, key)) = path.trim().split_once('.') else {
            return Err(ConfigError(format!(
                "--set expects section.key=value, got `{spec}`"
            )));
        };
        self.apply(
            &section.trim().to_ascii_lowercase(),
            key.trim(),
            strip_comment(value),
        )
    }

    /// Source statistics model for these settings.
    pub fn source_model(&self) -> tpi_core::Result<SourceModel> {
        SourceModel::new(self.g2_zero, self.tau_corr, self.tau_coh)
    }

    /// Interferometer configuration for these settings.
    pub fn interferometer(&self) -> tpi_core::Result<InterferometerConfig> {
        InterferometerConfig::new(
            self.r_a, self.t_a, self.r_b, self.t_b, self.delta_t, self.omega, self.v0,
        )
    }

    /// Pair-simulation configuration for these settings.
    pub fn sim_config(&self) -> tpi_core::Result<SimConfig> {
        SimConfig::new(self.rate1, self.rate2, self.duration, self.window, self.seed)
    }

    /// Correlator configuration; times round to integer picoseconds.
    pub fn correlator_config(&self) -> tpi_core::Result<CorrelatorConfig> {
        let norm = if self.rate_normalized {
            Normalization::RateNormalized
        } else {
            Normalization::Raw
        };
        CorrelatorConfig::new(
            seconds_to_ps(self.bin_width, "bin_width")?,
            seconds_to_ps(self.max_lag, "max_lag")?,
            norm,
        )
    }

    /// Inclusive lag grid over [tau_min, tau_max] with `points` samples.
    pub fn lag_grid(&self) -> Result<Vec<f64>, ConfigError> {
        if self.points < 2 {
            return Err(ConfigError(format!(
                "grid needs at least 2 points, got {}",
                self.points
            )));
        }
        if !(self.tau_min < self.tau_max) {
            return Err(ConfigError(format!(
                "grid needs tau_min < tau_max, got [{:e}, {:e}]",
                self.tau_min, self.tau_max
            )));
        }
        let n = self.points;
        let span = self.tau_max - self.tau_min;
        Ok((0..n)
            .map(|i| self.tau_min + span * i as f64 / (n - 1) as f64)
            .collect())
    }
}

/// Convert a positive time in seconds to integer picoseconds.
pub fn seconds_to_ps(seconds: f64, what: &str) -> tpi_core::Result<i64> {
    let ps = (seconds * 1e12).round();
    if !(ps >= 1.0) || ps > i64::MAX as f64 {
        return Err(tpi_core::Error::InvalidInput(format!(
            "{what} = {seconds:e} s does not round to a positive picosecond count"
        )));
    }
    Ok(ps as i64)
}
