//! Two-photon interference of long-coherence single photons in an
//! asymmetric Mach-Zehnder interferometer (AMZI).
//!
//! A photon stream split at beamsplitter A travels a short arm and a long arm
//! (extra delay `delta_t`, optional frequency shift `omega`) before
//! recombining at beamsplitter B. Coincidences between the two output
//! detectors show photon-statistics dips at lags 0 and ±Δt and, with parallel
//! polarizations, a first-order interference term that turns the ±Δt features
//! into peaks or dips depending on Δt/τ_coh and cos(ΩΔt).
//!
//! The crate is organized as:
//!
//! * [`model`] — source coherence/statistics models and cavity-QED figures,
//! * [`analytic`] — closed-form correlation curves, visibilities, and the
//!   side-feature classifier,
//! * [`oracle`] — an independent path-pairing evaluation of the same curves,
//!   used to cross-check the analytic engine,
//! * [`tags`] / [`tagsim`] — time-tag streams and seeded Monte-Carlo
//!   generators (Poisson, pair-correlated, antibunched renewal),
//! * [`correlator`] — the sweep-line coincidence correlator plus tag-file and
//!   histogram I/O.

pub mod analytic;
pub mod correlator;
pub mod error;
pub mod model;
pub mod oracle;
pub mod tags;
pub mod tagsim;

pub use analytic::{
    CorrelationSeries, FeatureKind, SideFeature, SideLocation, DEFAULT_CLASSIFY_EPSILON,
};
pub use correlator::{CorrelationHistogram, CorrelatorConfig, Normalization};
pub use error::{Error, Result};
pub use model::{CqedParams, InterferometerConfig, PolarizationMode, SourceModel};
pub use tags::TagStream;
pub use tagsim::SimConfig;
