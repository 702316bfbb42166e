//! Outage probability of uplink power-domain NOMA with successive interference
//! cancellation.
//!
//! The strongest received signal `X_(1)` can be extracted only when it exceeds the
//! sum of all other received signals by at least a threshold `P`; otherwise SIC
//! cannot start and every superimposed signal is lost. The outage probability
//!
//! ```text
//! P_out = Pr{ X_(1) - X_(2) - ... - X_(n) < P }
//! ```
//!
//! is computed here along three independent routes:
//!
//! - [`analytic`]: closed forms for Rayleigh fading (exponential `X_i`), in both the
//!   literal published form and a corrected form.
//! - [`orderstat`]: the joint density of the ordered received powers (a matrix
//!   permanent) integrated by nested adaptive quadrature.
//! - [`montecarlo`]: a seeded, worker-count independent simulation.
//!
//! [`scenario`] converts cell geometry (distances, SNRs, carrier frequency) into the
//! mean received-power metrics, and [`sweep`] / [`validate`] drive parameter studies
//! and cross-method checks.

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod orderstat;
pub mod quadrature;
pub mod scenario;
pub mod sweep;
pub mod validate;

pub use analytic::{pout2, pout3, pout_rayleigh, pout_scenario, ClosedFormVariant, Method, OutageResult, Variant};
pub use error::{Error, Result};

pub use montecarlo::{sample_outage, sample_outage_protocol, McConfig, McModel};
pub use orderstat::{integral_i, joint_pdf_ordered, permanent, pout_quadrature, QuadratureRegion};
pub use scenario::{linearize, LinearScenario, ScenarioSpec, UeSpec};
