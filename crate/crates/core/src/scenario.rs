//! Cell scenarios and the mapping from geometry to mean received-power metrics.
//!
//! Each UE contributes `X̄_i = SNR_i · k_p · D_i^(-α)` where
//! `k_p = (c / (4π f_c))²` is the isotropic free-space reference gain. Noise
//! power never appears on its own; it is folded into the per-UE SNR.
//!
//! The threshold is given in dBm and compared, after conversion to watts,
//! directly against the dimensionless `X̄_i` values. This mirrors the model it
//! reproduces; the two quantities are not reconciled dimensionally.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UeSpec {
    pub id: String,
    pub distance_m: f64,
    /// SNR assigned to this UE, in dB.
    pub snr_db: f64,
}

impl UeSpec {
    pub fn new(id: impl Into<String>, distance_m: f64, snr_db: f64) -> Self {
        Self { id: id.into(), distance_m, snr_db }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub carrier_hz: f64,
    pub alpha: f64,
    pub pthres_dbm: f64,
    pub cell_radius_m: f64,
    pub ues: Vec<UeSpec>,
}

/// Non-fatal observations about a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioWarning {
    /// UE placed beyond the cell radius.
    OutsideCell { id: String, distance_m: f64 },
    /// The listed SNR order disagrees with the order of the resulting mean
    /// received powers, so power ranking and channel ranking do not line up.
    SnrOrderMismatch,
}

impl std::fmt::Display for ScenarioWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioWarning::OutsideCell { id, distance_m } => {
                write!(f, "UE `{id}` at {distance_m} m lies outside the cell radius")
            }
            ScenarioWarning::SnrOrderMismatch => {
                write!(f, "SNR order of the UEs disagrees with the order of their mean received powers")
            }
        }
    }
}

impl ScenarioSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: ScenarioSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn n(&self) -> usize {
        self.ues.len()
    }

    /// Checks the hard invariants. Field-level problems are reported as parse
    /// errors naming the field.
    pub fn validate(&self) -> Result<()> {
        fn field(name: &str, ok: bool, what: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::Parse(format!("field `{name}`: {what}")))
            }
        }
        field("carrier_hz", self.carrier_hz.is_finite() && self.carrier_hz > 0.0, "must be a positive number")?;
        field("alpha", self.alpha.is_finite() && self.alpha > 0.0, "must be a positive number")?;
        field("pthres_dbm", self.pthres_dbm.is_finite(), "must be finite")?;
        field(
            "cell_radius_m",
            self.cell_radius_m.is_finite() && self.cell_radius_m > 0.0,
            "must be a positive number",
        )?;
        field("ues", !self.ues.is_empty(), "at least one UE is required")?;
        let mut seen = HashSet::new();
        for ue in &self.ues {
            field("ues.id", seen.insert(ue.id.as_str()), &format!("duplicate id `{}`", ue.id))?;
            field(
                "ues.distance_m",
                ue.distance_m.is_finite() && ue.distance_m > 0.0,
                &format!("UE `{}` must have a positive distance", ue.id),
            )?;
            field("ues.snr_db", ue.snr_db.is_finite(), &format!("UE `{}` must have a finite SNR", ue.id))?;
        }
        Ok(())
    }

    pub fn warnings(&self) -> Vec<ScenarioWarning> {
        let mut out: Vec<_> = self
            .ues
            .iter()
            .filter(|ue| ue.distance_m > self.cell_radius_m)
            .map(|ue| ScenarioWarning::OutsideCell { id: ue.id.clone(), distance_m: ue.distance_m })
            .collect();
        if let Ok(lin) = linearize(self) {
            let mut by_snr: Vec<usize> = (0..self.n()).collect();
            by_snr.sort_by(|&a, &b| self.ues[b].snr_db.total_cmp(&self.ues[a].snr_db));
            let mut by_mean: Vec<usize> = (0..self.n()).collect();
            by_mean.sort_by(|&a, &b| lin.means[b].total_cmp(&lin.means[a]));
            if by_snr != by_mean {
                out.push(ScenarioWarning::SnrOrderMismatch);
            }
        }
        out
    }
}

/// Linear-domain view of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearScenario {
    /// Mean received-power metric per UE, in the order of `ScenarioSpec::ues`.
    pub means: Vec<f64>,
    /// Threshold in watts.
    pub pthres_linear: f64,
}

fn finite(value: f64, name: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {value}")))
    }
}

pub fn db_to_linear(value_db: f64) -> Result<f64> {
    Ok(10f64.powf(finite(value_db, "value_db")? / 10.0))
}

pub fn linear_to_db(value: f64) -> Result<f64> {
    if !(value.is_finite() && value > 0.0) {
        return Err(Error::invalid(format!("linear value must be positive and finite, got {value}")));
    }
    Ok(10.0 * value.log10())
}

pub fn dbm_to_linear(value_dbm: f64) -> Result<f64> {
    Ok(10f64.powf((finite(value_dbm, "value_dbm")? - 30.0) / 10.0))
}

/// `k_p = (c / (4π f_c))²`.
pub fn free_space_gain(carrier_hz: f64) -> Result<f64> {
    if !(carrier_hz.is_finite() && carrier_hz > 0.0) {
        return Err(Error::invalid(format!("carrier frequency must be positive, got {carrier_hz}")));
    }
    let k = SPEED_OF_LIGHT / (4.0 * std::f64::consts::PI * carrier_hz);
    Ok(k * k)
}

/// Mean squared channel envelope `k_p · D^(-α)`.
pub fn pathloss_mean_gain(carrier_hz: f64, distance_m: f64, alpha: f64) -> Result<f64> {
    let kp = free_space_gain(carrier_hz)?;
    if !(distance_m.is_finite() && distance_m > 0.0) {
        return Err(Error::invalid(format!("distance must be positive, got {distance_m}")));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("path-loss exponent must be positive, got {alpha}")));
    }
    Ok(kp * distance_m.powf(-alpha))
}

pub fn linearize(spec: &ScenarioSpec) -> Result<LinearScenario> {
    if spec.ues.is_empty() {
        return Err(Error::invalid("scenario has no UEs"));
    }
    let means = spec
        .ues
        .iter()
        .map(|ue| Ok(db_to_linear(ue.snr_db)? * pathloss_mean_gain(spec.carrier_hz, ue.distance_m, spec.alpha)?))
        .collect::<Result<Vec<_>>>()?;
    if let Some(bad) = means.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
        return Err(Error::invalid(format!("mean received power {bad} is not a positive finite number")));
    }
    let pthres_linear = dbm_to_linear(spec.pthres_dbm)?;
    Ok(LinearScenario { means, pthres_linear })
}
