//! Independent path-enumeration reconstruction of the AMZI coincidence
//! curves, used to cross-check [`crate::analytic`].
//!
//! A coincidence joins one photon at each output detector. Each detected
//! photon took either the short or the long arm, so a detected pair belongs
//! to one of four route pairings. Instead of starting from the grouped
//! closed-form expressions, this module:
//!
//! 1. enumerates the pairings explicitly,
//! 2. weights each by the product of the four traversed splitter intensity
//!    coefficients,
//! 3. evaluates the source autocorrelation at the emission-time lag implied
//!    by the routes (detection lag corrected by the arm-delay difference),
//! 4. in parallel polarization, adds the single surviving exchange
//!    interference term between the two path-swapped pairings
//!    (short/long vs long/short) — cross terms involving a same-arm pairing
//!    carry a residual optical-frequency phase that averages to zero over
//!    the detection-time integration and are dropped.
//!
//! [`equivalence_sweep`] drives both evaluations over randomized
//! configurations and lags and reports the worst deviation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic;
use crate::error::{Error, Result};
use crate::model::{InterferometerConfig, PolarizationMode, SourceModel};

/// Maximum deviation (relative, floored at 1e-12 absolute scale) tolerated
/// by [`equivalence_sweep`].
pub const SWEEP_TOLERANCE: f64 = 1e-9;

/// Floor applied to the deviation denominator so the metric stays defined at
/// the curve's exact zeros (ideal HOM minima).
const DEVIATION_FLOOR: f64 = 1e-12;

/// Interferometer arm taken by one photon of a detected pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arm {
    Short,
    Long,
}

/// Output-port label; detector One is the port whose lag enters with a plus
/// sign (τ = t_two − t_one... detector Two's click minus detector One's).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Detector {
    One,
    Two,
}

impl Arm {
    fn delay(self, cfg: &InterferometerConfig) -> f64 {
        match self {
            Arm::Short => 0.0,
            Arm::Long => cfg.delta_t,
        }
    }

    /// Intensity fraction the input splitter sends into this arm.
    fn enter_weight(self, cfg: &InterferometerConfig) -> f64 {
        match self {
            Arm::Short => cfg.t_a,
            Arm::Long => cfg.r_a,
        }
    }

    /// Intensity fraction the recombining splitter routes from this arm to
    /// the given detector (transmission pairs the short arm with detector
    /// One; reflection crosses over).
    fn exit_weight(self, cfg: &InterferometerConfig, det: Detector) -> f64 {
        match (self, det) {
            (Arm::Short, Detector::One) => cfg.t_b,
            (Arm::Short, Detector::Two) => cfg.r_b,
            (Arm::Long, Detector::One) => cfg.r_b,
            (Arm::Long, Detector::Two) => cfg.t_b,
        }
    }
}

/// One of the four route assignments for a detected pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathPairing {
    /// Arm taken by the photon at detector One.
    pub first: Arm,
    /// Arm taken by the photon at detector Two.
    pub second: Arm,
}

/// All four pairings for one detector ordering. Signed-τ evaluation covers
/// the opposite ordering: swapping the detectors relabels τ → −τ and maps
/// this list onto itself with first/second exchanged.
pub const PAIRINGS: [PathPairing; 4] = [
    PathPairing {
        first: Arm::Short,
        second: Arm::Short,
    },
    PathPairing {
        first: Arm::Short,
        second: Arm::Long,
    },
    PathPairing {
        first: Arm::Long,
        second: Arm::Short,
    },
    PathPairing {
        first: Arm::Long,
        second: Arm::Long,
    },
];

impl PathPairing {
    /// Product of the four traversed intensity coefficients.
    pub fn weight(&self, cfg: &InterferometerConfig) -> f64 {
        self.first.enter_weight(cfg)
            * self.first.exit_weight(cfg, Detector::One)
            * self.second.enter_weight(cfg)
            * self.second.exit_weight(cfg, Detector::Two)
    }

    /// Square root of the intensity-coefficient product (amplitude scale).
    pub fn amplitude_weight(&self, cfg: &InterferometerConfig) -> f64 {
        self.weight(cfg).sqrt()
    }

    /// Emission-time lag that produces detection lag `tau` through these
    /// routes: each photon's detection time is its emission time plus its
    /// arm delay, so the emitter-side lag is τ + delay(first) − delay(second).
    pub fn emission_lag(&self, cfg: &InterferometerConfig, tau: f64) -> f64 {
        tau + self.first.delay(cfg) - self.second.delay(cfg)
    }

    /// True when this pairing and `other` are the same routes with the two
    /// photons exchanged — the only pair of pairings whose interference term
    /// survives detection-time integration.
    pub fn is_exchange_partner(&self, other: &PathPairing) -> bool {
        self.first == other.second && self.second == other.first && self.first != self.second
    }
}

/// Coincidence rate reconstructed from the path enumeration, normalized to 1
/// at large lags. Must agree with the closed-form engine to [`SWEEP_TOLERANCE`].
pub fn oracle_g2(
    cfg: &InterferometerConfig,
    model: &SourceModel,
    mode: PolarizationMode,
    tau: f64,
) -> Result<f64> {
    let mut norm = 0.0;
    let mut sum = 0.0;
    for p in PAIRINGS {
        let w = p.weight(cfg);
        norm += w;
        sum += w * model.g2_auto(p.emission_lag(cfg, tau));
    }
    if norm < 1e-12 {
        return Err(Error::DegenerateDenominator(format!(
            "total pairing weight {norm:.3e}; both detectors see light from only one arm"
        )));
    }
    if mode == PolarizationMode::Parallel {
        let g1 = model.g1_magnitude(tau);
        let phase = (cfg.omega * tau).cos();
        for (i, p) in PAIRINGS.iter().enumerate() {
            for q in PAIRINGS.iter().skip(i + 1) {
                if p.is_exchange_partner(q) {
                    let stat = (model.g2_auto(p.emission_lag(cfg, tau))
                        * model.g2_auto(q.emission_lag(cfg, tau)))
                    .sqrt();
                    sum -= 2.0
                        * p.amplitude_weight(cfg)
                        * q.amplitude_weight(cfg)
                        * cfg.v0
                        * g1
                        * g1
                        * phase
                        * stat;
                }
            }
        }
    }
    Ok((sum / norm).max(0.0))
}

/// Outcome of one randomized oracle-vs-closed-form comparison sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepReport {
    /// Total curve evaluations compared (configs × lags × both modes).
    pub evaluations: usize,
    /// Worst deviation |oracle − analytic| / max(|analytic|, 1e-12).
    pub max_deviation: f64,
    /// Lag at which the worst deviation occurred.
    pub worst_tau: f64,
    /// Tolerance the sweep was judged against.
    pub tolerance: f64,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.max_deviation <= self.tolerance
    }
}

fn deviation(oracle: f64, reference: f64) -> f64 {
    (oracle - reference).abs() / reference.abs().max(DEVIATION_FLOOR)
}

/// Compare [`oracle_g2`] against the closed-form engine on `configs`
/// randomized parameter sets, each probed at structured feature lags plus
/// `lags_per_config` random lags, in both polarization modes.
///
/// `extra_offset` is added to every oracle value; zero for a genuine check.
/// A nonzero value is a deliberate fault injection so callers can prove the
/// sweep actually detects disagreement (negative control).
pub fn equivalence_sweep(
    seed: u64,
    configs: usize,
    lags_per_config: usize,
    extra_offset: f64,
) -> Result<SweepReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SweepReport {
        evaluations: 0,
        max_deviation: 0.0,
        worst_tau: 0.0,
        tolerance: SWEEP_TOLERANCE,
    };
    for _ in 0..configs {
        let r_a: f64 = rng.gen_range(0.02..0.98);
        let r_b: f64 = rng.gen_range(0.02..0.98);
        let v0: f64 = rng.gen_range(0.0..=1.0);
        let g2_zero: f64 = rng.gen_range(0.0..2.0);
        let tau_coh = 10f64.powf(rng.gen_range(-7.0..-3.0));
        let tau_corr = tau_coh * 10f64.powf(rng.gen_range(-5.0..-1.5));
        let delta_t = rng.gen_range(0.0..4.0) * tau_coh;
        let omega = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.1..20.0) * std::f64::consts::TAU / tau_coh
        };
        let cfg =
            InterferometerConfig::new(r_a, 1.0 - r_a, r_b, 1.0 - r_b, delta_t, omega, v0)?;
        let model = SourceModel::new(g2_zero, tau_corr, tau_coh)?;

        let mut lags = vec![
            0.0,
            delta_t,
            -delta_t,
            delta_t + tau_corr,
            delta_t - tau_corr,
            -delta_t + 0.5 * tau_corr,
            0.5 * delta_t,
            3.0 * tau_coh,
        ];
        for _ in 0..lags_per_config {
            lags.push(rng.gen_range(-1.5..1.5) * (delta_t + 20.0 * tau_corr + 0.2 * tau_coh));
        }
        for &tau in &lags {
            for mode in [PolarizationMode::Cross, PolarizationMode::Parallel] {
                let reference = analytic::g2_for_mode(&cfg, &model, mode, tau)?;
                let probe = oracle_g2(&cfg, &model, mode, tau)? + extra_offset;
                let dev = deviation(probe, reference);
                report.evaluations += 1;
                if dev > report.max_deviation {
                    report.max_deviation = dev;
                    report.worst_tau = tau;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn long_coh_model() -> SourceModel {
        SourceModel::new(0.03, 115e-12, 10.0).unwrap()
    }

    #[test]
    fn pairing_weights_sum_to_normalization() {
        for (r_a, r_b) in [(0.5, 0.5), (0.3, 0.8), (0.97, 0.03), (1.0, 0.5)] {
            let cfg =
                InterferometerConfig::new(r_a, 1.0 - r_a, r_b, 1.0 - r_b, 1e-6, 0.0, 1.0).unwrap();
            let total: f64 = PAIRINGS.iter().map(|p| p.weight(&cfg)).sum();
            assert_relative_eq!(
                total,
                analytic::normalization(&cfg),
                max_relative = 1e-14
            );
        }
    }

    #[test]
    fn exactly_one_exchange_partner_pair() {
        let mut partners = 0;
        for (i, p) in PAIRINGS.iter().enumerate() {
            for q in PAIRINGS.iter().skip(i + 1) {
                if p.is_exchange_partner(q) {
                    partners += 1;
                }
            }
        }
        assert_eq!(partners, 1);
    }

    #[test]
    fn emission_lags_cover_three_signatures() {
        let cfg = InterferometerConfig::symmetric(5e-6, 0.0, 1.0).unwrap();
        let mut lags: Vec<f64> = PAIRINGS
            .iter()
            .map(|p| p.emission_lag(&cfg, 0.0))
            .collect();
        lags.sort_by(f64::total_cmp);
        assert_eq!(lags, vec![-5e-6, 0.0, 0.0, 5e-6]);
    }

    #[test]
    fn matches_frozen_point_values() {
        let cfg = InterferometerConfig::symmetric(2.1e-9, 0.0, 1.0).unwrap();
        let m = long_coh_model();
        assert_relative_eq!(
            oracle_g2(&cfg, &m, PolarizationMode::Cross, 0.0).unwrap(),
            0.515,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            oracle_g2(&cfg, &m, PolarizationMode::Cross, 2.1e-9).unwrap(),
            0.7575,
            epsilon = 1e-6
        );
        assert_relative_eq!(
            oracle_g2(&cfg, &m, PolarizationMode::Parallel, 0.0).unwrap(),
            0.015,
            epsilon = 1e-6
        );
    }

    #[test]
    fn zero_visibility_collapses_to_cross() {
        let cfg = InterferometerConfig::symmetric(2.1e-9, 0.0, 0.0).unwrap();
        let m = long_coh_model();
        for tau in [-3e-9, 0.0, 1e-10, 2.1e-9, 9e-9] {
            assert_eq!(
                oracle_g2(&cfg, &m, PolarizationMode::Parallel, tau).unwrap(),
                oracle_g2(&cfg, &m, PolarizationMode::Cross, tau).unwrap(),
            );
        }
    }

    #[test]
    fn exchange_term_vanishing_limits() {
        // coherence lost, quarter-phase, and zero overlap each kill the
        // interference term independently
        let m = SourceModel::new(0.03, 115e-12, 1e-6).unwrap();
        let dt = 2.1e-9;
        let far = 25e-6; // 25 tau_coh
        let cfg = InterferometerConfig::symmetric(dt, 0.0, 1.0).unwrap();
        let cross = oracle_g2(&cfg, &m, PolarizationMode::Cross, far).unwrap();
        let par = oracle_g2(&cfg, &m, PolarizationMode::Parallel, far).unwrap();
        assert!((par - cross).abs() < 1e-12);

        let tau = 0.35e-6;
        let quarter = InterferometerConfig::symmetric(
            dt,
            std::f64::consts::FRAC_PI_2 / tau,
            1.0,
        )
        .unwrap();
        assert_relative_eq!(
            oracle_g2(&quarter, &m, PolarizationMode::Parallel, tau).unwrap(),
            oracle_g2(&quarter, &m, PolarizationMode::Cross, tau).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn degenerate_weights_rejected() {
        let cfg = InterferometerConfig::new(1.0, 0.0, 0.0, 1.0, 1e-6, 0.0, 1.0).unwrap();
        assert!(matches!(
            oracle_g2(&cfg, &long_coh_model(), PolarizationMode::Cross, 0.0),
            Err(Error::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn sweep_agrees_with_analytic_engine() {
        let report = equivalence_sweep(0xC0FFEE, 250, 12, 0.0).unwrap();
        assert!(report.evaluations >= 10_000, "{}", report.evaluations);
        assert!(
            report.passed(),
            "max deviation {:.3e} at tau {:.3e}",
            report.max_deviation,
            report.worst_tau
        );
    }

    #[test]
    fn sweep_detects_injected_fault() {
        let report = equivalence_sweep(0xC0FFEE, 20, 4, 1e-6).unwrap();
        assert!(!report.passed());
    }
}
