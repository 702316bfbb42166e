//! Cross-method validation on randomized instances.
//!
//! Every row evaluates one instance with both closed-form variants, both
//! quadrature regions and the Monte Carlo estimator, then sets agreement flags
//! from the fixed tolerances below. The first row is always the three-signal,
//! equal-means, zero-threshold instance where the two closed-form variants part.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{pout_rayleigh, ClosedFormVariant};
use crate::error::{Error, Result};
use crate::montecarlo::{sample_outage, McConfig};
use crate::orderstat::{pout_quadrature, QuadratureRegion};
use crate::sweep::round_trip;

/// Monte Carlo agrees when within this many standard errors of the closed form.
pub const MC_SIGMAS: f64 = 3.0;
/// Fraction of rows on which Monte Carlo must agree.
pub const MC_PASS_FRACTION: f64 = 0.95;
/// Ordered-region quadrature vs. corrected closed form, absolute.
pub const QUAD_ABS_TOL: f64 = 1e-5;
/// Quadrature agreement is checked up to this many signals.
pub const QUAD_CHECK_MAX_N: usize = 3;

const LOG10_MEAN_RANGE: (f64, f64) = (-2.0, 2.0);
const THRESHOLD_RATIO_MAX: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationConfig {
    pub instances: usize,
    pub seed: u64,
    pub samples: u64,
    pub workers: usize,
    /// Quadrature tolerance for `n ≤ 3`.
    pub quad_tol: f64,
    /// Quadrature tolerance for `n = 4`, where a tight tolerance gets expensive.
    pub quad_tol_n4: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self { instances: 100, seed: 0, samples: 1_000_000, workers: 1, quad_tol: 1e-8, quad_tol_n4: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub means: Vec<f64>,
    pub pthres: f64,
    mc_seed: u64,
}

/// The headline instance followed by `count` random ones: `n ∈ {2, 3, 4}`, means
/// log-uniform on `[1e-2, 1e2]`, threshold uniform on `[0, 5 · max mean]`.
pub fn instances(count: usize, seed: u64) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let headline = Instance { means: vec![1.0; 3], pthres: 0.0, mc_seed: rng.random() };
    let mut out = vec![headline];
    for _ in 0..count {
        let n = rng.random_range(2..=4usize);
        let means: Vec<f64> =
            (0..n).map(|_| 10f64.powf(rng.random_range(LOG10_MEAN_RANGE.0..LOG10_MEAN_RANGE.1))).collect();
        let max = means.iter().copied().fold(0.0, f64::max);
        let pthres = rng.random_range(0.0..THRESHOLD_RATIO_MAX) * max;
        out.push(Instance { means, pthres, mc_seed: rng.random() });
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub id: usize,
    pub means: Vec<f64>,
    pub pthres: f64,
    pub closed_paper: f64,
    pub closed_corrected: f64,
    pub quad_paper: f64,
    pub quad_ordered: f64,
    pub mc: f64,
    pub mc_stderr: f64,
    pub mc_agrees: bool,
    /// `None` where quadrature agreement is not checked (`n > 3`).
    pub quad_agrees: Option<bool>,
}

impl ValidationRow {
    pub fn n(&self) -> usize {
        self.means.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn mc_agreement(&self) -> f64 {
        self.rows.iter().filter(|r| r.mc_agrees).count() as f64 / self.rows.len() as f64
    }

    pub fn quad_failures(&self) -> usize {
        self.rows.iter().filter(|r| r.quad_agrees == Some(false)).count()
    }

    /// Monte Carlo agrees on enough rows and no checked quadrature row disagrees.
    pub fn passed(&self) -> bool {
        self.mc_agreement() >= MC_PASS_FRACTION && self.quad_failures() == 0
    }
}

/// Monte Carlo agreement; an estimate of exactly 0 or 1 has zero sample stderr,
/// so the resolution `1/samples` stands in for it.
pub fn mc_agrees(closed: f64, mc: f64, stderr: f64, samples: u64) -> bool {
    (closed - mc).abs() <= MC_SIGMAS * stderr.max(1.0 / samples as f64)
}

pub fn run(cfg: &ValidationConfig) -> Result<ValidationReport> {
    if cfg.instances == 0 {
        return Err(Error::invalid("at least one instance is required"));
    }
    let rows = instances(cfg.instances, cfg.seed)
        .into_iter()
        .enumerate()
        .map(|(id, inst)| evaluate(id, inst, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport { rows })
}

fn evaluate(id: usize, inst: Instance, cfg: &ValidationConfig) -> Result<ValidationRow> {
    let Instance { means, pthres, mc_seed } = inst;
    let closed_paper = pout_rayleigh(&means, pthres, ClosedFormVariant::PaperEq25)?.value;
    let closed_corrected = pout_rayleigh(&means, pthres, ClosedFormVariant::Corrected)?.value;
    let tol = if means.len() <= QUAD_CHECK_MAX_N { cfg.quad_tol } else { cfg.quad_tol_n4 };
    let quad_paper = pout_quadrature(&means, pthres, QuadratureRegion::PaperBounds, tol)?.value;
    let quad_ordered = pout_quadrature(&means, pthres, QuadratureRegion::OrderedRegion, tol)?.value;
    let mc_cfg = McConfig::new(cfg.samples, mc_seed).with_workers(cfg.workers);
    let mc = sample_outage(&means, pthres, &mc_cfg)?;
    let mc_stderr = mc.stderr.unwrap_or(0.0);
    Ok(ValidationRow {
        id,
        mc_agrees: mc_agrees(closed_corrected, mc.value, mc_stderr, cfg.samples),
        quad_agrees: (means.len() <= QUAD_CHECK_MAX_N).then(|| (quad_ordered - closed_corrected).abs() <= QUAD_ABS_TOL),
        means,
        pthres,
        closed_paper,
        closed_corrected,
        quad_paper,
        quad_ordered,
        mc: mc.value,
        mc_stderr,
    })
}

/// Six significant digits, switching to exponent form outside `[1e-3, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-3..6).contains(&magnitude) {
        format!("{:.*}", (5 - magnitude) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "NO"
    }
}

pub fn write_table<W: Write>(report: &ValidationReport, mut out: W) -> Result<()> {
    writeln!(
        out,
        "{:>4} {:>2} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>11} {:>6} {:>6}",
        "id", "n", "pthres", "paper_eq25", "corrected", "quad_paper", "quad_ordered", "monte_carlo", "mc_stderr", "mc_ok", "quad_ok"
    )?;
    for r in &report.rows {
        writeln!(
            out,
            "{:>4} {:>2} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>11} {:>6} {:>6}",
            r.id,
            r.n(),
            sig6(r.pthres),
            sig6(r.closed_paper),
            sig6(r.closed_corrected),
            sig6(r.quad_paper),
            sig6(r.quad_ordered),
            sig6(r.mc),
            sig6(r.mc_stderr),
            flag(r.mc_agrees),
            r.quad_agrees.map_or("n/a", flag),
        )?;
    }
    writeln!(
        out,
        "monte carlo agreement: {}/{} rows (need {}%); quadrature disagreements: {}; overall: {}",
        report.rows.iter().filter(|r| r.mc_agrees).count(),
        report.rows.len(),
        MC_PASS_FRACTION * 100.0,
        report.quad_failures(),
        if report.passed() { "PASS" } else { "FAIL" }
    )?;
    Ok(())
}

pub fn write_csv<W: Write>(report: &ValidationReport, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record([
        "id",
        "n",
        "means",
        "pthres",
        "closed_paper_eq25",
        "closed_corrected",
        "quad_paper_bounds",
        "quad_ordered_region",
        "monte_carlo",
        "mc_stderr",
        "mc_agrees",
        "quad_agrees",
    ])?;
    for r in &report.rows {
        let means = r.means.iter().map(|m| round_trip(*m)).collect::<Vec<_>>().join(";");
        w.write_record([
            r.id.to_string(),
            r.n().to_string(),
            means,
            round_trip(r.pthres),
            round_trip(r.closed_paper),
            round_trip(r.closed_corrected),
            round_trip(r.quad_paper),
            round_trip(r.quad_ordered),
            round_trip(r.mc),
            round_trip(r.mc_stderr),
            r.mc_agrees.to_string(),
            r.quad_agrees.map_or_else(String::new, |b| b.to_string()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig6(0.632_120_558_828_557_7), "0.632121");
        assert_eq!(sig6(-0.5), "-0.500000");
        assert_eq!(sig6(2.080_196_753e-4), "2.08020e-4");
        assert_eq!(sig6(123.456_789), "123.457");
        assert_eq!(sig6(0.0), "0");
    }

    #[test]
    fn instance_generation_is_seeded() {
        let a = instances(20, 5);
        assert_eq!(a, instances(20, 5));
        assert_ne!(a, instances(20, 6));
        assert_eq!(a.len(), 21);
        assert_eq!(a[0].means, vec![1.0; 3]);
        for inst in &a[1..] {
            assert!((2..=4).contains(&inst.means.len()));
            assert!(inst.means.iter().all(|m| (1e-2..=1e2).contains(m)));
            let max = inst.means.iter().copied().fold(0.0, f64::max);
            assert!(inst.pthres >= 0.0 && inst.pthres <= 5.0 * max);
        }
    }

    #[test]
    fn small_report() {
        let cfg = ValidationConfig { instances: 6, seed: 3, samples: 100_000, workers: 2, ..Default::default() };
        let report = run(&cfg).unwrap();
        let head = &report.rows[0];
        assert!((head.closed_paper + 0.5).abs() < 1e-12);
        assert!((head.closed_corrected - 0.25).abs() < 1e-12);
        assert!((head.mc - 0.25).abs() < 5e-3);
        for r in report.rows.iter().filter(|r| r.n() == 2) {
            assert_eq!(r.closed_paper, r.closed_corrected);
        }
        let mut table = Vec::new();
        write_table(&report, &mut table).unwrap();
        let table = String::from_utf8(table).unwrap();
        assert!(table.contains("corrected") && table.contains("paper_eq25"));
        let mut csv = Vec::new();
        write_csv(&report, &mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 8);
    }

    #[test]
    fn agreement_floor_for_degenerate_estimates() {
        assert!(mc_agrees(1e-7, 0.0, 0.0, 1_000_000));
        assert!(!mc_agrees(1e-4, 0.0, 0.0, 1_000_000));
    }
}
