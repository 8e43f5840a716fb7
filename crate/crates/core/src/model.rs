//! Source, interferometer, and cavity-QED parameter models.
//!
//! The photon source is described by two time scales and one number:
//!
//! * `tau_coh` — first-order coherence time; |g¹(τ)| = exp(−|τ|/τ_coh),
//! * `tau_corr` — intensity-correlation recovery time,
//! * `g2_zero` — residual equal-time autocorrelation; the autocorrelation is
//!   modelled as g²(τ) = 1 − (1 − g²(0))·exp(−|τ|/τ_corr).
//!
//! The model targets the regime τ_coh ≫ τ_corr (long coherence relative to
//! the antibunching recovery); a ratio below 10 is accepted with a warning.

use crate::error::{Error, Result};

/// Ratio τ_coh/τ_corr below which the model leaves its intended regime.
pub const REGIME_RATIO_WARN: f64 = 10.0;

/// Tolerance on R + T = 1 for each beamsplitter.
pub const SPLITTER_SUM_TOL: f64 = 1e-9;

/// Which relative polarization the two interfering paths carry.
///
/// Cross-polarized paths cannot interfere, so only photon statistics remain;
/// parallel polarization adds the first-order interference (exchange) term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarizationMode {
    Cross,
    Parallel,
}

/// Photon-source coherence and counting statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceModel {
    /// Equal-time autocorrelation g²(0), in [0, 2] (0 ideal single photons,
    /// 1 Poissonian, 2 thermal).
    pub g2_zero: f64,
    /// Intensity-correlation recovery time, seconds.
    pub tau_corr: f64,
    /// First-order coherence time, seconds.
    pub tau_coh: f64,
}

impl SourceModel {
    pub fn new(g2_zero: f64, tau_corr: f64, tau_coh: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&g2_zero) {
            return Err(Error::InvalidInput(format!(
                "g2_zero must lie in [0, 2], got {g2_zero}"
            )));
        }
        if !(tau_corr > 0.0) || !tau_corr.is_finite() {
            return Err(Error::InvalidInput(format!(
                "tau_corr must be positive and finite, got {tau_corr}"
            )));
        }
        if !(tau_coh > 0.0) || !tau_coh.is_finite() {
            return Err(Error::InvalidInput(format!(
                "tau_coh must be positive and finite, got {tau_coh}"
            )));
        }
        if tau_coh / tau_corr < REGIME_RATIO_WARN {
            log::warn!(
                "tau_coh/tau_corr = {:.3} < {}: outside the long-coherence regime the \
                 closed-form curves assume",
                tau_coh / tau_corr,
                REGIME_RATIO_WARN
            );
        }
        Ok(SourceModel {
            g2_zero,
            tau_corr,
            tau_coh,
        })
    }

    /// |g¹(τ)| = exp(−|τ|/τ_coh).
    pub fn g1_magnitude(&self, tau: f64) -> f64 {
        (-tau.abs() / self.tau_coh).exp()
    }

    /// g²(τ) = 1 − (1 − g²(0))·exp(−|τ|/τ_corr).
    pub fn g2_auto(&self, tau: f64) -> f64 {
        1.0 - (1.0 - self.g2_zero) * (-tau.abs() / self.tau_corr).exp()
    }
}

/// Asymmetric Mach-Zehnder configuration.
///
/// `r_a`/`t_a` are the intensity reflection/transmission of the input
/// beamsplitter, `r_b`/`t_b` of the recombining one. The long arm adds a
/// delay `delta_t` and an angular frequency shift `omega`; `v0` is the
/// single-photon interference visibility (mode overlap) of the two arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerConfig {
    pub r_a: f64,
    pub t_a: f64,
    pub r_b: f64,
    pub t_b: f64,
    /// Long-arm excess delay, seconds (≥ 0).
    pub delta_t: f64,
    /// Long-arm angular frequency shift Ω, rad/s.
    pub omega: f64,
    /// Interference visibility V₀ in [0, 1].
    pub v0: f64,
}

impl InterferometerConfig {
    pub fn new(
        r_a: f64,
        t_a: f64,
        r_b: f64,
        t_b: f64,
        delta_t: f64,
        omega: f64,
        v0: f64,
    ) -> Result<Self> {
        for (name, v) in [("r_a", r_a), ("t_a", t_a), ("r_b", r_b), ("t_b", t_b)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidInput(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
        }
        if (r_a + t_a - 1.0).abs() > SPLITTER_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "splitter A not lossless: r_a + t_a = {}",
                r_a + t_a
            )));
        }
        if (r_b + t_b - 1.0).abs() > SPLITTER_SUM_TOL {
            return Err(Error::InvalidInput(format!(
                "splitter B not lossless: r_b + t_b = {}",
                r_b + t_b
            )));
        }
        if !(delta_t >= 0.0) || !delta_t.is_finite() {
            return Err(Error::InvalidInput(format!(
                "delta_t must be finite and >= 0, got {delta_t}"
            )));
        }
        if !omega.is_finite() {
            return Err(Error::InvalidInput(format!("omega must be finite, got {omega}")));
        }
        if !(0.0..=1.0).contains(&v0) {
            return Err(Error::InvalidInput(format!("v0 must lie in [0, 1], got {v0}")));
        }
        Ok(InterferometerConfig {
            r_a,
            t_a,
            r_b,
            t_b,
            delta_t,
            omega,
            v0,
        })
    }

    /// 50/50 splitters on both ports.
    pub fn symmetric(delta_t: f64, omega: f64, v0: f64) -> Result<Self> {
        Self::new(0.5, 0.5, 0.5, 0.5, delta_t, omega, v0)
    }

    /// True when both splitters are balanced to within the validation tolerance.
    pub fn is_symmetric(&self) -> bool {
        (self.r_a - self.t_a).abs() <= SPLITTER_SUM_TOL
            && (self.r_b - self.t_b).abs() <= SPLITTER_SUM_TOL
    }
}

/// Cavity-QED rates of the emitter-cavity system, all in the same angular
/// or ordinary frequency unit (the derived figures are unit-free).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CqedParams {
    /// Emitter-cavity coupling g.
    pub g: f64,
    /// Cavity field decay κ.
    pub kappa: f64,
    /// Emitter population decay γ∥.
    pub gamma_par: f64,
    /// Pure dephasing γ*.
    pub gamma_star: f64,
}

impl CqedParams {
    pub fn new(g: f64, kappa: f64, gamma_par: f64, gamma_star: f64) -> Result<Self> {
        for (name, v) in [("g", g), ("kappa", kappa), ("gamma_star", gamma_star)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        if !(gamma_par > 0.0) || !gamma_par.is_finite() {
            return Err(Error::InvalidInput(format!(
                "gamma_par must be positive and finite, got {gamma_par}"
            )));
        }
        Ok(CqedParams {
            g,
            kappa,
            gamma_par,
            gamma_star,
        })
    }

    /// Transverse dephasing rate γ⊥ = γ∥/2 + γ*.
    pub fn gamma_perp(&self) -> f64 {
        self.gamma_par / 2.0 + self.gamma_star
    }

    /// Cooperativity C = 2g²/(κ·γ⊥).
    pub fn cooperativity(&self) -> Result<f64> {
        let denom = self.kappa * self.gamma_perp();
        if denom == 0.0 {
            return Err(Error::DivisionByZero(
                "cooperativity needs kappa * gamma_perp > 0".into(),
            ));
        }
        Ok(2.0 * self.g * self.g / denom)
    }

    /// Critical photon number n₀ = γ⊥·γ∥/(4g²).
    pub fn critical_photon_number(&self) -> Result<f64> {
        if self.g == 0.0 {
            return Err(Error::DivisionByZero(
                "critical photon number needs g > 0".into(),
            ));
        }
        Ok(self.gamma_perp() * self.gamma_par / (4.0 * self.g * self.g))
    }
}
