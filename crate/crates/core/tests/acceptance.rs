//! Acceptance criteria, one test each. Every test prints a single
//! `[PASS]`/`[FAIL]` line before asserting. Run with
//! `cargo test -p noma-outage --test acceptance -- --nocapture`.

use std::time::{Duration, Instant};

use noma_outage::analytic::{pout2, pout_rayleigh, ClosedFormVariant};
use noma_outage::montecarlo::{sample_outage, McConfig};
use noma_outage::orderstat::{joint_pdf_mass, permanent, permanent_naive, pout_quadrature, QuadratureRegion};
use noma_outage::sweep::{self, Preset, SweepRow};
use noma_outage::validate;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CORR: ClosedFormVariant = ClosedFormVariant::Corrected;
const PAPER: ClosedFormVariant = ClosedFormVariant::PaperEq25;
const ORDERED: QuadratureRegion = QuadratureRegion::OrderedRegion;
const BOUNDS: QuadratureRegion = QuadratureRegion::PaperBounds;

fn verdict(criterion: u32, name: &str, ok: bool, detail: String) {
    println!("[{}] criterion {criterion} ({name}): {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {criterion} ({name}) failed: {detail}");
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Means log-uniform on [1e-2, 1e2]; threshold uniform on [0, 5 · max mean].
fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, f64) {
    let means: Vec<f64> = (0..n).map(|_| 10f64.powf(rng.random_range(-2.0..2.0))).collect();
    let max = means.iter().copied().fold(0.0, f64::max);
    let p = rng.random_range(0.0..5.0) * max;
    (means, p)
}

fn pout(means: &[f64], p: f64, v: ClosedFormVariant) -> f64 {
    pout_rayleigh(means, p, v).unwrap().value
}

#[test]
fn criterion_1_two_signal_exactness() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (m, p) = random_instance(&mut rng, 2);
        let values = [
            pout(&m, p, CORR),
            pout(&m, p, PAPER),
            pout2(m[0], m[1], p).unwrap(),
            pout_quadrature(&m, p, BOUNDS, 1e-8).unwrap().value,
            pout_quadrature(&m, p, ORDERED, 1e-8).unwrap().value,
        ];
        for a in &values {
            for b in &values {
                worst = worst.max((a - b).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "n=2 exactness",
        worst <= 1e-6 && elapsed < Duration::from_secs(10),
        format!("max pairwise gap {worst:.3e} (tol 1e-6), runtime {elapsed:.2?} (limit 10 s)"),
    );
}

#[test]
fn criterion_2_three_signal_discrepancy() {
    let means = [1.0; 3];
    let paper = pout(&means, 0.0, PAPER);
    let corrected = pout(&means, 0.0, CORR);
    let quad = pout_quadrature(&means, 0.0, BOUNDS, 1e-8).unwrap().value;
    let mc = sample_outage(&means, 0.0, &McConfig::new(1_000_000, 2024).with_workers(workers())).unwrap();
    let se = mc.stderr.unwrap();
    let ok = (paper + 0.5).abs() <= 1e-12
        && (quad + 0.5).abs() <= 1e-3
        && (corrected - 0.25).abs() <= 1e-12
        && (mc.value - 0.25).abs() <= 3.0 * se;
    verdict(
        2,
        "n=3 discrepancy",
        ok,
        format!("paper_eq25 {paper}, paper-bounds quadrature {quad:.6}, corrected {corrected}, monte carlo {:.5} ± {se:.2e}", mc.value),
    );
}

#[test]
fn criterion_3_oracle_agreement() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut mc_ok = 0;
    let mut quad_checked = 0;
    let mut quad_worst = 0.0f64;
    for i in 0..100u64 {
        let n = rng.random_range(2..=4usize);
        let (m, p) = random_instance(&mut rng, n);
        let closed = pout(&m, p, CORR);
        let mc = sample_outage(&m, p, &McConfig::new(1_000_000, 1000 + i).with_workers(workers())).unwrap();
        if validate::mc_agrees(closed, mc.value, mc.stderr.unwrap(), 1_000_000) {
            mc_ok += 1;
        }
        if n <= 3 {
            let quad = pout_quadrature(&m, p, ORDERED, 1e-8).unwrap().value;
            quad_worst = quad_worst.max((quad - closed).abs());
            quad_checked += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        3,
        "oracle agreement",
        mc_ok >= 95 && quad_worst <= 1e-5 && elapsed < Duration::from_secs(300),
        format!(
            "monte carlo within 3 stderr on {mc_ok}/100 (need 95); ordered quadrature max gap {quad_worst:.3e} over {quad_checked} rows (tol 1e-5); runtime {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_4_identity_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_abs = 0.0f64;
    let mut worst_rel = 0.0f64;
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    for _ in 0..200 {
        let (m, p) = random_instance(&mut rng, 1);
        let expected = 1.0 - (-p / m[0]).exp();
        for v in [CORR, PAPER] {
            worst_abs = worst_abs.max((pout(&m, p, v) - expected).abs());
            worst_abs = worst_abs.max((pout(&[m[0], m[0]], p, v) - expected).abs());
        }

        let n = rng.random_range(2..=6usize);
        let (means, p) = random_instance(&mut rng, n);
        let mut shuffled = means.clone();
        for i in (1..n).rev() {
            shuffled.swap(i, rng.random_range(0..=i));
        }
        let c = 10f64.powf(rng.random_range(-6.0..6.0));
        let scaled: Vec<f64> = means.iter().map(|x| x * c).collect();
        for v in [CORR, PAPER] {
            let base = pout(&means, p, v);
            worst_rel = worst_rel.max(rel(base, pout(&shuffled, p, v)));
            worst_rel = worst_rel.max(rel(base, pout(&scaled, p * c, v)));
        }
    }
    verdict(
        4,
        "identity suite",
        worst_abs <= 1e-12 && worst_rel <= 1e-12,
        format!("reduction identities max abs gap {worst_abs:.3e}; permutation/scale invariance max rel gap {worst_rel:.3e} (tol 1e-12)"),
    );
}

#[test]
fn criterion_5_permanent_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for _ in 0..50 {
            let m: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(0.0..2.0)).collect()).collect();
            let fast = permanent(&m).unwrap();
            let slow = permanent_naive(&m).unwrap();
            worst = worst.max((fast - slow).abs() / slow.abs());
        }
    }
    let masses = [
        joint_pdf_mass(&[0.5, 2.0], 1e-8).unwrap(),
        joint_pdf_mass(&[0.05, 1.0, 30.0], 1e-8).unwrap(),
        joint_pdf_mass(&[1.0, 1.0, 1.0], 1e-8).unwrap(),
    ];
    let mass_gap = masses.iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
    verdict(
        5,
        "permanent correctness",
        worst <= 1e-12 && mass_gap <= 1e-4,
        format!("Ryser vs expansion max rel gap {worst:.3e} (tol 1e-12); ordered-cone mass max |m - 1| {mass_gap:.3e} (tol 1e-4)"),
    );
}

fn curves(rows: &[SweepRow]) -> Vec<(&str, Vec<&SweepRow>)> {
    let mut out: Vec<(&str, Vec<&SweepRow>)> = Vec::new();
    for row in rows {
        match out.last_mut() {
            Some((label, v)) if *label == row.curve_label => v.push(row),
            _ => out.push((row.curve_label.as_str(), vec![row])),
        }
    }
    out
}

#[test]
fn criterion_6_figure_preset_properties() {
    let fig1 = sweep::run(&Preset::Fig1.plan()).unwrap();
    let fig1_curves = curves(&fig1);
    assert_eq!(fig1_curves.len(), 6);
    let mut freq_violations = 0;
    let mut mono_violations = 0;
    for snr in ["11", "8", "6"] {
        let low = fig1_curves.iter().find(|(l, _)| l.starts_with("fc=2GHz") && l.contains(&format!("snr={snr}/"))).unwrap();
        let high = fig1_curves.iter().find(|(l, _)| l.starts_with("fc=28GHz") && l.contains(&format!("snr={snr}/"))).unwrap();
        for (a, b) in low.1.iter().zip(&high.1) {
            assert_eq!(a.sweep_value, b.sweep_value);
            if b.pout_corrected < a.pout_corrected {
                freq_violations += 1;
            }
        }
    }
    for (_, rows) in &fig1_curves {
        mono_violations += rows.windows(2).filter(|w| w[1].pout_corrected < w[0].pout_corrected).count();
    }

    let fig2 = sweep::run(&Preset::Fig2.plan()).unwrap();
    let fig2_curves = curves(&fig2);
    assert_eq!(fig2_curves.len(), 9);
    let mut sep_violations = 0;
    let mut sep_checked = 0;
    for d3 in ["0.5R", "0.7R", "0.9R"] {
        let find = |snr: &str| fig2_curves.iter().find(|(l, _)| l.contains(d3) && l.ends_with(snr)).unwrap();
        let wide = find("snr=15/10/8dB");
        let flat = find("snr=10/10/10dB");
        for (a, b) in wide.1.iter().zip(&flat.1) {
            if a.pout_corrected < 0.5 && b.pout_corrected < 0.5 {
                sep_checked += 1;
                if a.pout_corrected > b.pout_corrected {
                    sep_violations += 1;
                }
            }
        }
    }
    verdict(
        6,
        "figure-preset properties",
        freq_violations == 0 && mono_violations == 0 && sep_violations == 0 && sep_checked > 0,
        format!(
            "fig1: 28 GHz below 2 GHz at {freq_violations} points, D1 monotonicity breaks {mono_violations}; fig2: (15,10,8) above (10,10,10) at {sep_violations}/{sep_checked} low-outage points"
        ),
    );
}

fn sweep_bytes(preset: Preset) -> Vec<u8> {
    let mut buf = Vec::new();
    sweep::write_csv(&sweep::run(&preset.plan()).unwrap(), &mut buf).unwrap();
    buf
}

#[test]
fn criterion_7_determinism() {
    let sweeps_equal = [Preset::Fig1, Preset::Fig2].iter().all(|&p| sweep_bytes(p) == sweep_bytes(p));
    let means = [0.3, 1.0, 2.5];
    let mc_bits = |workers: usize| {
        let r = sample_outage(&means, 0.7, &McConfig::new(300_001, 77).with_workers(workers)).unwrap();
        (r.value.to_bits(), r.stderr.unwrap().to_bits())
    };
    let runs = [mc_bits(1), mc_bits(1), mc_bits(8), mc_bits(8)];
    let mc_equal = runs.iter().all(|r| *r == runs[0]);
    verdict(
        7,
        "determinism",
        sweeps_equal && mc_equal,
        format!("preset CSVs byte-identical: {sweeps_equal}; monte carlo bit-identical across runs and workers 1/8: {mc_equal}"),
    );
}

#[test]
fn criterion_8_performance() {
    let start = Instant::now();
    let rows = sweep::run(&Preset::Fig1.plan()).unwrap().len() + sweep::run(&Preset::Fig2.plan()).unwrap().len();
    let sweeps = start.elapsed();

    let start = Instant::now();
    let r = sample_outage(&[1.0, 0.5, 0.25], 0.1, &McConfig::new(10_000_000, 8)).unwrap();
    let mc = start.elapsed();
    verdict(
        8,
        "performance",
        rows == 1500 && sweeps < Duration::from_secs(1) && mc < Duration::from_secs(10),
        format!("fig1+fig2 closed-form sweeps ({rows} rows) in {sweeps:.2?} (limit 1 s); 1e7-sample n=3 monte carlo on one worker in {mc:.2?} (limit 10 s), estimate {:.5}", r.value),
    );
}
