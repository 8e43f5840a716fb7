//! Closed-form AMZI coincidence curves, visibilities, and the side-feature
//! classifier.
//!
//! With intensity coefficients R/T per splitter, arm delay Δt, shift Ω and
//! visibility V₀, the normalized cross-polarized coincidence rate is
//!
//! ```text
//! g²⊥(τ) = [ (R_A²+T_A²)·R_B·T_B·g²(τ)
//!          + R_A·T_A·R_B²·g²(τ+Δt)
//!          + R_A·T_A·T_B²·g²(τ−Δt) ] / N
//! ```
//!
//! and the parallel-polarized rate subtracts the exchange (interference) term
//!
//! ```text
//! g²∥(τ) = g²⊥(τ) − (2/N)·R_A·T_A·R_B·T_B·V₀·|g¹(τ)|²·cos(Ωτ)·√(g²(τ−Δt)·g²(τ+Δt))
//! ```
//!
//! with N = (R_A²+T_A²)·R_B·T_B + (R_B²+T_B²)·R_A·T_A. Grouping the three
//! τ±Δt terms with the exchange term as
//! R_A·T_A·[R_B·u·(R_B·u − T_B·c·v) + T_B·v·(T_B·v − R_B·c·u)] with
//! u = √g²(τ+Δt), v = √g²(τ−Δt), c = V₀|g¹|²cos Ωτ shows
//! g²∥ ≥ R_A·T_A·(R_B·u − T_B·v)²/N ≥ 0 whenever |c| ≤ 1.

use crate::error::{Error, Result};
use crate::model::{InterferometerConfig, PolarizationMode, SourceModel};

/// Default contrast tolerance separating Peak/Dip from Flat.
pub const DEFAULT_CLASSIFY_EPSILON: f64 = 1e-3;

/// Multiple of τ_corr used as the exclusion half-width around the narrow
/// photon-statistics features at 0 and ±Δt.
pub const FEATURE_EXCLUSION_TAU_CORR: f64 = 20.0;

/// Smallest normalization N accepted before curve evaluation is refused.
const MIN_NORMALIZATION: f64 = 1e-12;

/// Which side feature (at +Δt or −Δt) an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideLocation {
    Plus,
    Minus,
}

impl SideLocation {
    /// Signed feature position in lag units of the given config.
    pub fn tau(&self, cfg: &InterferometerConfig) -> f64 {
        match self {
            SideLocation::Plus => cfg.delta_t,
            SideLocation::Minus => -cfg.delta_t,
        }
    }
}

/// Peak/dip/flat verdict for one side feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Peak,
    Dip,
    Flat,
}

/// Classification of the coincidence feature at ±Δt.
///
/// `contrast` is the signed peak margin: the strength of the surviving
/// interference term at the feature minus the photon-statistics penalty
/// (R_loc·V₀·|g¹(Δt)|²·w(cos ΩΔt) − T_loc·g²(0), coefficients swapped for the
/// −Δt side). Its sign determines `kind` under the tolerance ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideFeature {
    pub location: SideLocation,
    pub kind: FeatureKind,
    pub contrast: f64,
}

/// A sampled correlation curve together with the configuration it came from.
#[derive(Debug, Clone)]
pub struct CorrelationSeries {
    pub cfg: InterferometerConfig,
    pub model: SourceModel,
    pub mode: PolarizationMode,
    /// Strictly increasing lags, seconds.
    pub taus: Vec<f64>,
    /// g² values, all finite and ≥ 0.
    pub values: Vec<f64>,
}

/// Path-weight coefficients of the closed-form curves.
#[derive(Debug, Clone, Copy)]
struct Coeffs {
    /// Same-arm weight (R_A²+T_A²)·R_B·T_B, multiplies g²(τ).
    a: f64,
    /// Long/short weight R_A·T_A·R_B², multiplies g²(τ+Δt).
    b: f64,
    /// Short/long weight R_A·T_A·T_B², multiplies g²(τ−Δt).
    c: f64,
    /// Exchange weight R_A·T_A·R_B·T_B.
    d: f64,
    /// Normalization N = a + b + c.
    n: f64,
}

fn coeffs(cfg: &InterferometerConfig) -> Result<Coeffs> {
    let a = (cfg.r_a * cfg.r_a + cfg.t_a * cfg.t_a) * cfg.r_b * cfg.t_b;
    let b = cfg.r_a * cfg.t_a * cfg.r_b * cfg.r_b;
    let c = cfg.r_a * cfg.t_a * cfg.t_b * cfg.t_b;
    let d = cfg.r_a * cfg.t_a * cfg.r_b * cfg.t_b;
    let n = a + b + c;
    if n < MIN_NORMALIZATION {
        return Err(Error::DegenerateDenominator(format!(
            "normalization N = {n:.3e}; both detectors see light from only one arm"
        )));
    }
    Ok(Coeffs { a, b, c, d, n })
}

/// Normalization N = (R_A²+T_A²)·R_B·T_B + (R_B²+T_B²)·R_A·T_A.
pub fn normalization(cfg: &InterferometerConfig) -> f64 {
    (cfg.r_a * cfg.r_a + cfg.t_a * cfg.t_a) * cfg.r_b * cfg.t_b
        + (cfg.r_b * cfg.r_b + cfg.t_b * cfg.t_b) * cfg.r_a * cfg.t_a
}

fn eval_cross(k: &Coeffs, cfg: &InterferometerConfig, model: &SourceModel, tau: f64) -> f64 {
    let diag = k.a * model.g2_auto(tau)
        + k.b * model.g2_auto(tau + cfg.delta_t)
        + k.c * model.g2_auto(tau - cfg.delta_t);
    diag / k.n
}

fn eval_parallel(k: &Coeffs, cfg: &InterferometerConfig, model: &SourceModel, tau: f64) -> f64 {
    let g2p = model.g2_auto(tau + cfg.delta_t);
    let g2m = model.g2_auto(tau - cfg.delta_t);
    let diag = k.a * model.g2_auto(tau) + k.b * g2p + k.c * g2m;
    let g1 = model.g1_magnitude(tau);
    let exchange =
        2.0 * k.d * cfg.v0 * g1 * g1 * (cfg.omega * tau).cos() * (g2p * g2m).sqrt();
    let val = (diag - exchange) / k.n;
    // The quadratic-form bound keeps the exact value >= 0; only rounding dust
    // can land just below zero.
    if val < 0.0 {
        debug_assert!(val > -1e-12, "parallel curve {val} below the positivity bound");
        0.0
    } else {
        val
    }
}

/// Cross-polarized normalized coincidence rate g²⊥(τ).
pub fn g2_cross(cfg: &InterferometerConfig, model: &SourceModel, tau: f64) -> Result<f64> {
    let k = coeffs(cfg)?;
    Ok(eval_cross(&k, cfg, model, tau))
}

/// Parallel-polarized normalized coincidence rate g²∥(τ).
pub fn g2_parallel(cfg: &InterferometerConfig, model: &SourceModel, tau: f64) -> Result<f64> {
    let k = coeffs(cfg)?;
    Ok(eval_parallel(&k, cfg, model, tau))
}

/// Either curve, selected by polarization mode.
pub fn g2_for_mode(
    cfg: &InterferometerConfig,
    model: &SourceModel,
    mode: PolarizationMode,
    tau: f64,
) -> Result<f64> {
    let k = coeffs(cfg)?;
    Ok(match mode {
        PolarizationMode::Cross => eval_cross(&k, cfg, model, tau),
        PolarizationMode::Parallel => eval_parallel(&k, cfg, model, tau),
    })
}

/// Two-photon interference visibility V(τ) = [g²⊥(τ) − g²∥(τ)] / g²⊥(τ).
pub fn visibility(cfg: &InterferometerConfig, model: &SourceModel, tau: f64) -> Result<f64> {
    let k = coeffs(cfg)?;
    let cross = eval_cross(&k, cfg, model, tau);
    if cross < MIN_NORMALIZATION {
        return Err(Error::DegenerateDenominator(format!(
            "g2_cross({tau:.3e}) = {cross:.3e} too small to divide by"
        )));
    }
    Ok((cross - eval_parallel(&k, cfg, model, tau)) / cross)
}

/// Closed-form central visibility V(0) = V₀/(1 + g²(0)) for symmetric
/// splitters with Δt ≫ τ_corr.
pub fn visibility_zero(cfg: &InterferometerConfig, model: &SourceModel) -> Result<f64> {
    if !cfg.is_symmetric() {
        return Err(Error::PreconditionViolated(
            "visibility_zero requires 50/50 splitters on both ports".into(),
        ));
    }
    Ok(cfg.v0 / (1.0 + model.g2_zero))
}

/// Largest arm delay for which the ±Δt feature is still a peak:
/// Δt < (τ_coh/2)·ln[R_loc·V₀/(T_loc·g²(0))], where (R_loc, T_loc) is
/// (R_B, T_B) for the +Δt side and (T_B, R_B) for −Δt.
///
/// Returns the threshold delay in seconds; 0 means a peak would need Δt < 0
/// (never). An argument below 1 makes the logarithm negative, so no positive
/// delay ever produces a peak: that is reported as `UndefinedThreshold`.
pub fn side_threshold(
    cfg: &InterferometerConfig,
    model: &SourceModel,
    location: SideLocation,
) -> Result<f64> {
    if model.g2_zero <= 0.0 {
        return Err(Error::PreconditionViolated(
            "side_threshold requires g2_zero > 0".into(),
        ));
    }
    let (r_loc, t_loc) = match location {
        SideLocation::Plus => (cfg.r_b, cfg.t_b),
        SideLocation::Minus => (cfg.t_b, cfg.r_b),
    };
    if t_loc == 0.0 {
        // all side-position light reaches one detector only; the statistics
        // penalty vanishes and any delay keeps the peak
        return Ok(f64::INFINITY);
    }
    let arg = r_loc * cfg.v0 / (t_loc * model.g2_zero);
    if arg < 1.0 {
        return Err(Error::UndefinedThreshold { arg });
    }
    Ok(0.5 * model.tau_coh * arg.ln())
}

/// Interference weight surviving at the side feature for a given beat phase.
///
/// cos ΩΔt = −1 and 0 always give dips; near +1 the Ω=0 changeover applies.
/// The +1 basin is taken as cos > 1/2 (nearest of the three regimes); inside
/// it the weight follows cos, elsewhere only a non-positive weight survives.
fn beat_phase_weight(cos_phase: f64) -> f64 {
    if cos_phase > 0.5 {
        cos_phase
    } else {
        cos_phase.min(0.0)
    }
}

/// Classify the coincidence feature at ±Δt as a peak, dip, or flat.
///
/// The signed margin compares the interference gain that survives at the
/// feature, R_loc·V₀·|g¹(Δt)|²·w(cos ΩΔt), against the photon-statistics
/// penalty T_loc·g²(0). At Ω = 0 its sign reproduces the [`side_threshold`]
/// inequality exactly for every parameter set.
pub fn classify_side_feature(
    cfg: &InterferometerConfig,
    model: &SourceModel,
    location: SideLocation,
    epsilon: f64,
) -> SideFeature {
    let (r_loc, t_loc) = match location {
        SideLocation::Plus => (cfg.r_b, cfg.t_b),
        SideLocation::Minus => (cfg.t_b, cfg.r_b),
    };
    let g1 = model.g1_magnitude(cfg.delta_t);
    let w = beat_phase_weight((cfg.omega * cfg.delta_t).cos());
    let contrast = r_loc * cfg.v0 * g1 * g1 * w - t_loc * model.g2_zero;
    let kind = if contrast > epsilon {
        FeatureKind::Peak
    } else if contrast < -epsilon {
        FeatureKind::Dip
    } else {
        FeatureKind::Flat
    };
    SideFeature {
        location,
        kind,
        contrast,
    }
}

/// Beat-envelope visibility (max−min)/(max+min) of g²∥ over `window`.
///
/// The window must span at least one beat period, stay well inside the
/// coherence time (|τ| < τ_coh/10), and keep clear of the narrow
/// photon-statistics features at 0 and ±Δt (±20·τ_corr). For symmetric
/// splitters and |g¹| ≈ 1 the result is V₀/2.
pub fn beat_visibility(
    cfg: &InterferometerConfig,
    model: &SourceModel,
    window: (f64, f64),
) -> Result<f64> {
    let (w0, w1) = window;
    if cfg.omega == 0.0 {
        return Err(Error::PreconditionViolated(
            "beat_visibility requires a nonzero frequency shift".into(),
        ));
    }
    if !(w0 < w1) {
        return Err(Error::PreconditionViolated(format!(
            "empty window [{w0:.3e}, {w1:.3e}]"
        )));
    }
    let period = std::f64::consts::TAU / cfg.omega.abs();
    if w1 - w0 < period {
        return Err(Error::PreconditionViolated(format!(
            "window span {:.3e} s shorter than one beat period {:.3e} s",
            w1 - w0,
            period
        )));
    }
    let edge = model.tau_coh / 10.0;
    if w0.abs() >= edge || w1.abs() >= edge {
        return Err(Error::PreconditionViolated(
            "window must lie inside (−tau_coh/10, tau_coh/10)".into(),
        ));
    }
    let guard = FEATURE_EXCLUSION_TAU_CORR * model.tau_corr;
    for center in [0.0, cfg.delta_t, -cfg.delta_t] {
        if w0 <= center + guard && center - guard <= w1 {
            return Err(Error::PreconditionViolated(format!(
                "window overlaps the feature exclusion zone around {center:.3e} s"
            )));
        }
    }
    let k = coeffs(cfg)?;
    // 256 samples per beat period resolves the extrema to ~1e-4 relative,
    // well inside every stated tolerance.
    let n = (256.0 * (w1 - w0) / period).ceil() as usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..=n {
        let tau = w0 + (w1 - w0) * i as f64 / n as f64;
        let v = eval_parallel(&k, cfg, model, tau);
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if hi + lo < MIN_NORMALIZATION {
        return Err(Error::DegenerateDenominator(
            "beat envelope max+min vanishes".into(),
        ));
    }
    Ok((hi - lo) / (hi + lo))
}

/// Evaluate one curve on a strictly increasing lag grid.
pub fn sample_series(
    cfg: &InterferometerConfig,
    model: &SourceModel,
    mode: PolarizationMode,
    taus: &[f64],
) -> Result<CorrelationSeries> {
    if let Some(i) = taus.windows(2).position(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(format!(
            "lag grid not strictly increasing at index {}",
            i + 1
        )));
    }
    let k = coeffs(cfg)?;
    let values = taus
        .iter()
        .map(|&tau| match mode {
            PolarizationMode::Cross => eval_cross(&k, cfg, model, tau),
            PolarizationMode::Parallel => eval_parallel(&k, cfg, model, tau),
        })
        .collect();
    Ok(CorrelationSeries {
        cfg: *cfg,
        model: *model,
        mode,
        taus: taus.to_vec(),
        values,
    })
}
