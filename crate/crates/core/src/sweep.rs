//! Parameter sweeps over a scenario, written out as CSV.
//!
//! A sweep varies one field of a base scenario over a grid and evaluates both
//! closed-form variants at every point. The built-in presets reproduce the two
//! published studies: two UEs with the second at the cell edge (`fig1`), and three
//! UEs at 28 GHz with fixed second/third placements (`fig2`).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analytic::{pout_scenario, ClosedFormVariant, Method};
use crate::error::{Error, Result};
use crate::scenario::{ScenarioSpec, UeSpec};

/// Cell radius of both studies, m.
pub const CELL_RADIUS_M: f64 = 100.0;
/// Path-loss exponent of both studies.
pub const ALPHA: f64 = 4.0;
/// Minimum received-power difference for SIC, dBm.
pub const PTHRES_DBM: f64 = -75.0;
/// Points on the default `D1` grid, log-spaced over `[1 m, R]`.
pub const D1_POINTS: usize = 100;

/// fig1: SNR of UE1 in dB; UE2 at the cell edge with 6 dB.
pub const FIG1_SNR1_DB: [f64; 3] = [11.0, 8.0, 6.0];
pub const FIG1_SNR2_DB: f64 = 6.0;
pub const FIG1_CARRIERS_HZ: [f64; 2] = [2e9, 28e9];

/// fig2: SNR triplets, UE2 at 0.2 R, UE3 at one of three fractions of R, 28 GHz.
pub const FIG2_SNR_TRIPLETS_DB: [[f64; 3]; 3] = [[10.0, 10.0, 10.0], [12.0, 10.0, 8.0], [15.0, 10.0, 8.0]];
pub const FIG2_D2_FRACTION: f64 = 0.2;
pub const FIG2_D3_FRACTIONS: [f64; 3] = [0.5, 0.7, 0.9];
pub const FIG2_CARRIER_HZ: f64 = 28e9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweptField {
    /// Distance of the UE with this id.
    UeDistance(String),
    /// SNR of the UE with this id.
    UeSnr(String),
    CarrierHz,
    PthresDbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl Grid {
    pub fn log(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points, log: true }
    }

    pub fn linear(start: f64, stop: f64, points: usize) -> Self {
        Self { start, stop, points, log: false }
    }

    fn validate(&self) -> Result<()> {
        if self.points < 2 {
            return Err(Error::Parse("field `grid.points`: at least 2 points are required".into()));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(Error::Parse("field `grid.start`: must be finite and below `grid.stop`".into()));
        }
        if self.log && self.start <= 0.0 {
            return Err(Error::Parse("field `grid.start`: log spacing needs a positive start".into()));
        }
        Ok(())
    }

    /// Grid values; the end points are exactly `start` and `stop`.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    return self.stop;
                }
                let t = i as f64 / last;
                if self.log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: ScenarioSpec,
    pub swept: SweptField,
    pub grid: Grid,
    /// Curve label for the CSV; defaults to `sweep`.
    #[serde(default)]
    pub label: Option<String>,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: SweepSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        self.grid.validate()?;
        if let SweptField::UeDistance(id) | SweptField::UeSnr(id) = &self.swept {
            if !self.base.ues.iter().any(|ue| &ue.id == id) {
                return Err(Error::Parse(format!("field `swept`: no UE with id `{id}` in the base scenario")));
            }
        }
        Ok(())
    }

    /// The base scenario with the swept field set to `value`.
    pub fn at(&self, value: f64) -> ScenarioSpec {
        let mut spec = self.base.clone();
        match &self.swept {
            SweptField::UeDistance(id) => spec.ues.iter_mut().filter(|ue| &ue.id == id).for_each(|ue| ue.distance_m = value),
            SweptField::UeSnr(id) => spec.ues.iter_mut().filter(|ue| &ue.id == id).for_each(|ue| ue.snr_db = value),
            SweptField::CarrierHz => spec.carrier_hz = value,
            SweptField::PthresDbm => spec.pthres_dbm = value,
        }
        spec
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub label: String,
    pub sweep: SweepSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub curves: Vec<Curve>,
}

impl From<SweepSpec> for SweepPlan {
    fn from(sweep: SweepSpec) -> Self {
        let label = sweep.label.clone().unwrap_or_else(|| "sweep".to_string());
        SweepPlan { curves: vec![Curve { label, sweep }] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig1,
    Fig2,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            other => Err(Error::Parse(format!("unknown preset `{other}` (expected fig1 or fig2)"))),
        }
    }
}

fn d1_sweep(base: ScenarioSpec) -> SweepSpec {
    SweepSpec {
        base,
        swept: SweptField::UeDistance("UE1".into()),
        grid: Grid::log(1.0, CELL_RADIUS_M, D1_POINTS),
        label: None,
    }
}

fn db_label(v: f64) -> String {
    format!("{v}")
}

impl Preset {
    pub fn plan(self) -> SweepPlan {
        let curves = match self {
            Preset::Fig1 => FIG1_CARRIERS_HZ
                .iter()
                .flat_map(|&carrier_hz| {
                    FIG1_SNR1_DB.iter().map(move |&snr1| Curve {
                        label: format!("fc={}GHz snr={}/{}dB", carrier_hz / 1e9, db_label(snr1), db_label(FIG1_SNR2_DB)),
                        sweep: d1_sweep(ScenarioSpec {
                            carrier_hz,
                            alpha: ALPHA,
                            pthres_dbm: PTHRES_DBM,
                            cell_radius_m: CELL_RADIUS_M,
                            ues: vec![
                                UeSpec::new("UE1", CELL_RADIUS_M, snr1),
                                UeSpec::new("UE2", CELL_RADIUS_M, FIG1_SNR2_DB),
                            ],
                        }),
                    })
                })
                .collect(),
            Preset::Fig2 => FIG2_D3_FRACTIONS
                .iter()
                .flat_map(|&d3| {
                    FIG2_SNR_TRIPLETS_DB.iter().map(move |snr| Curve {
                        label: format!("d3={d3}R snr={}/{}/{}dB", snr[0], snr[1], snr[2]),
                        sweep: d1_sweep(ScenarioSpec {
                            carrier_hz: FIG2_CARRIER_HZ,
                            alpha: ALPHA,
                            pthres_dbm: PTHRES_DBM,
                            cell_radius_m: CELL_RADIUS_M,
                            ues: vec![
                                UeSpec::new("UE1", CELL_RADIUS_M, snr[0]),
                                UeSpec::new("UE2", FIG2_D2_FRACTION * CELL_RADIUS_M, snr[1]),
                                UeSpec::new("UE3", d3 * CELL_RADIUS_M, snr[2]),
                            ],
                        }),
                    })
                })
                .collect(),
        };
        SweepPlan { curves }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sweep_value: f64,
    pub curve_label: String,
    pub pout_corrected: f64,
    pub pout_paper: f64,
    pub method: Method,
}

pub fn run(plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for curve in &plan.curves {
        curve.sweep.validate()?;
        for value in curve.sweep.grid.values() {
            let spec = curve.sweep.at(value);
            rows.push(SweepRow {
                sweep_value: value,
                curve_label: curve.label.clone(),
                pout_corrected: pout_scenario(&spec, ClosedFormVariant::Corrected)?.value,
                pout_paper: pout_scenario(&spec, ClosedFormVariant::PaperEq25)?.value,
                method: Method::ClosedForm,
            });
        }
    }
    Ok(rows)
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn round_trip(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["sweep_value", "curve_label", "pout_corrected", "pout_paper", "method"])?;
    for row in rows {
        w.write_record([
            round_trip(row.sweep_value),
            row.curve_label.clone(),
            round_trip(row.pout_corrected),
            round_trip(row.pout_paper),
            row.method.label().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
