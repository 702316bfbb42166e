//! Closed-form outage probabilities under Rayleigh fading.
//!
//! With exponential `X_i` of means `X̄_i`, the probability that signal `k` clears
//! every other signal plus the threshold is
//!
//! ```text
//! T_k = Pr{ X_k ≥ Σ_{j≠k} X_j + P } = e^(-P/X̄_k) / Π_{i≠k} (1 + X̄_i/X̄_k)
//! ```
//!
//! These events are disjoint, so `P_out = 1 - Σ_k T_k`
//! ([`ClosedFormVariant::Corrected`]). The published general-`n` expression carries
//! an extra `(n-1)!` in front of the sum ([`ClosedFormVariant::PaperEq25`]); it
//! coincides with the corrected form for `n ≤ 2` and drops below zero for `n ≥ 3`
//! at small thresholds. The factor is what integrating the symmetric joint density
//! over the unordered region `{x_2 + … + x_n < x_1 - P}` produces, since that region
//! counts every ordered configuration `(n-1)!` times.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::montecarlo::McModel;
use crate::orderstat::QuadratureRegion;
use crate::scenario::{linearize, ScenarioSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormVariant {
    /// The general-`n` expression exactly as published, `(n-1)!` factor included.
    PaperEq25,
    /// The same expression without the `(n-1)!` factor.
    #[default]
    Corrected,
}

impl ClosedFormVariant {
    pub fn label(self) -> &'static str {
        match self {
            ClosedFormVariant::PaperEq25 => "paper_eq25",
            ClosedFormVariant::Corrected => "corrected",
        }
    }
}

impl fmt::Display for ClosedFormVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// What produced an [`OutageResult`], beyond the method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    ClosedForm(ClosedFormVariant),
    Region(QuadratureRegion),
    Model(McModel),
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::ClosedForm(v) => v.fmt(f),
            Variant::Region(r) => r.fmt(f),
            Variant::Model(m) => m.fmt(f),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageResult {
    /// Outage probability. Only the literal published form (and the quadrature
    /// over its integration region) may leave `[0, 1]`.
    pub value: f64,
    pub method: Method,
    pub variant: Variant,
    /// Standard error; present exactly for Monte Carlo estimates.
    pub stderr: Option<f64>,
}

impl OutageResult {
    pub(crate) fn closed_form(value: f64, variant: ClosedFormVariant) -> Self {
        Self { value, method: Method::ClosedForm, variant: Variant::ClosedForm(variant), stderr: None }
    }
}

pub(crate) fn check_means(means: &[f64], pthres: f64) -> Result<()> {
    if means.is_empty() {
        return Err(Error::invalid("means must not be empty"));
    }
    if let Some(m) = means.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        return Err(Error::invalid(format!("means must be positive and finite, got {m}")));
    }
    if !(pthres.is_finite() && pthres >= 0.0) {
        return Err(Error::invalid(format!("threshold must be nonnegative and finite, got {pthres}")));
    }
    Ok(())
}

/// `T_k` for every `k`, evaluated in log space so that mean ratios spanning many
/// decades neither overflow nor underflow the product.
pub fn clearance_terms(means: &[f64], pthres: f64) -> Result<Vec<f64>> {
    check_means(means, pthres)?;
    Ok(means
        .iter()
        .enumerate()
        .map(|(k, &mk)| {
            let log_denominator: f64 = means
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, &mi)| (mi / mk).ln_1p())
                .sum();
            (-pthres / mk - log_denominator).exp()
        })
        .collect())
}

/// `ln((n-1)!)`, exact summation of logs.
fn ln_factorial(m: usize) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

fn factorial(m: usize) -> Option<f64> {
    // 20! is the largest factorial that fits in u64 (and is exact in f64).
    (m <= 20).then(|| (1..=m as u64).product::<u64>() as f64)
}

pub fn pout_rayleigh(means: &[f64], pthres: f64, variant: ClosedFormVariant) -> Result<OutageResult> {
    let sum: f64 = clearance_terms(means, pthres)?.iter().sum();
    let value = match variant {
        ClosedFormVariant::Corrected => 1.0 - sum,
        ClosedFormVariant::PaperEq25 => {
            let n = means.len();
            let scaled = match factorial(n - 1) {
                Some(f) => f * sum,
                None if sum == 0.0 => 0.0,
                None => (ln_factorial(n - 1) + sum.ln()).exp(),
            };
            if !scaled.is_finite() {
                return Err(Error::invalid(format!("(n-1)! · Σ T_k overflows for n = {n}")));
            }
            1.0 - scaled
        }
    };
    Ok(OutageResult::closed_form(value, variant))
}

/// Two-signal outage, identical to [`pout_rayleigh`] with `n = 2` (both variants
/// agree there).
pub fn pout2(mean1: f64, mean2: f64, pthres: f64) -> Result<f64> {
    Ok(pout_rayleigh(&[mean1, mean2], pthres, ClosedFormVariant::Corrected)?.value)
}

/// Three-signal outage in its expanded form
/// `1 - c · Σ_k X̄_k² e^(-P/X̄_k) / Π_{i≠k}(X̄_k + X̄_i)`, with `c = 3!/3 = 2` for the
/// published variant and `c = 1` for the corrected one.
pub fn pout3(mean1: f64, mean2: f64, mean3: f64, pthres: f64, variant: ClosedFormVariant) -> Result<f64> {
    let m = [mean1, mean2, mean3];
    check_means(&m, pthres)?;
    let prefactor = match variant {
        ClosedFormVariant::PaperEq25 => 2.0,
        ClosedFormVariant::Corrected => 1.0,
    };
    let sum: f64 = (0..3)
        .map(|k| {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            m[k] * m[k] * (-pthres / m[k]).exp() / ((m[k] + m[i]) * (m[k] + m[j]))
        })
        .sum();
    Ok(1.0 - prefactor * sum)
}

pub fn pout_scenario(spec: &ScenarioSpec, variant: ClosedFormVariant) -> Result<OutageResult> {
    let lin = linearize(spec)?;
    pout_rayleigh(&lin.means, lin.pthres_linear, variant)
}
