//! Order statistics of independent, non-identically distributed received powers.
//!
//! For independent `X_1 … X_n` with densities `f_1 … f_n`, the joint density of
//! the descending order statistics `x_(1) ≥ … ≥ x_(n)` is the permanent of the
//! matrix `F[r][c] = f_c(x_(r))`. Integrating that density over the non-outage
//! region and subtracting from one gives the outage probability independently of
//! any closed form.
//!
//! Two regions are offered. [`QuadratureRegion::PaperBounds`] uses the nested
//! limits `x_(k) ∈ [0, x_(1) - x_(2) - … - x_(k-1) - P]` with no ordering
//! constraint; [`QuadratureRegion::OrderedRegion`] intersects in
//! `x_(k) ≤ x_(k-1)`, the support of the ordered density.
//!
//! The innermost coordinate is always integrated analytically: the permanent is
//! linear in its last row, so replacing the pdf row by `cdf(hi) - cdf(lo)` gives the
//! inner integral exactly. The remaining `n - 1` levels use nested adaptive
//! Gauss–Kronrod quadrature.

mod permanent;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use permanent::{permanent, permanent_naive, MAX_NAIVE_N, MAX_PERMANENT_N};
pub(crate) use permanent::{for_each_permutation, ryser};

use crate::analytic::{check_means, OutageResult, Method, Variant};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Tolerance};

/// Largest `n` accepted by the nested quadrature.
pub const MAX_QUADRATURE_N: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureRegion {
    PaperBounds,
    OrderedRegion,
}

impl QuadratureRegion {
    pub fn label(self) -> &'static str {
        match self {
            QuadratureRegion::PaperBounds => "paper_bounds",
            QuadratureRegion::OrderedRegion => "ordered_region",
        }
    }
}

impl fmt::Display for QuadratureRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A one-dimensional distribution usable as a column of the pdf matrix.
///
/// Experimental: only [`Exponential`] is exercised by the public entry points.
pub trait Marginal {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    /// Characteristic length, used to place quadrature breakpoints.
    fn scale(&self) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub mean: f64,
}

impl Marginal for Exponential {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            (-x / self.mean).exp() / self.mean
        }
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x / self.mean).exp_m1()
        }
    }

    fn scale(&self) -> f64 {
        self.mean
    }
}

/// `entries[r * n + c] = f_c(x_(r))`.
#[derive(Debug, Clone, PartialEq)]
pub struct PdfMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl PdfMatrix {
    pub fn build<M: Marginal>(points: &[f64], marginals: &[M]) -> Result<Self> {
        let n = points.len();
        if n == 0 || marginals.len() != n {
            return Err(Error::invalid(format!(
                "pdf matrix needs as many points as marginals (got {} and {})",
                n,
                marginals.len()
            )));
        }
        if n > MAX_PERMANENT_N {
            return Err(Error::UnsupportedSize { what: "pdf matrix", n, max: MAX_PERMANENT_N });
        }
        let entries: Vec<f64> = points.iter().flat_map(|&x| marginals.iter().map(move |m| m.pdf(x))).collect();
        if entries.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
            return Err(Error::invalid("pdf evaluations must be finite and nonnegative"));
        }
        Ok(Self { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn permanent(&self) -> f64 {
        ryser(&self.entries, self.n)
    }
}

fn exponentials(means: &[f64]) -> Vec<Exponential> {
    means.iter().map(|&mean| Exponential { mean }).collect()
}

fn check_descending(x: &[f64]) -> Result<()> {
    if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::invalid("ordered points must be positive and finite"));
    }
    if x.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid("points must be sorted in descending order"));
    }
    Ok(())
}

/// Joint density of the descending order statistics of independent exponentials,
/// as the permanent of the pdf matrix.
pub fn joint_pdf_ordered(x: &[f64], means: &[f64]) -> Result<f64> {
    if x.len() != means.len() {
        return Err(Error::invalid(format!("{} points for {} means", x.len(), means.len())));
    }
    check_means(means, 0.0)?;
    check_descending(x)?;
    Ok(PdfMatrix::build(x, &exponentials(means))?.permanent())
}

/// Same density as [`joint_pdf_ordered`], written as the explicit sum over
/// permutations `Σ_σ f_1(x_(σ1)) · … · f_n(x_(σn))`.
pub fn joint_pdf_permutation_sum(x: &[f64], means: &[f64]) -> Result<f64> {
    if x.len() != means.len() {
        return Err(Error::invalid(format!("{} points for {} means", x.len(), means.len())));
    }
    check_means(means, 0.0)?;
    check_descending(x)?;
    if x.len() > MAX_NAIVE_N {
        return Err(Error::UnsupportedSize { what: "permutation sum", n: x.len(), max: MAX_NAIVE_N });
    }
    let marginals = exponentials(means);
    let mut total = 0.0;
    for_each_permutation(x.len(), |perm| {
        total += perm.iter().enumerate().map(|(c, &r)| marginals[c].pdf(x[r])).product::<f64>();
    });
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Bounds {
    Paper,
    Ordered,
    /// The whole ordered cone `x_(1) ≥ … ≥ x_(n) ≥ 0`, no threshold.
    Cone,
}

enum Integrand<'a> {
    /// Permanent of the pdf matrix.
    Joint,
    /// `Π_c f_{slots[c]}(x_(c))`, one slot of the permutation sum.
    Slot(&'a [usize]),
}

/// Fixed outer coordinates and their pdf rows.
#[derive(Debug, Clone, Copy, Default)]
struct Rows {
    x: [f64; MAX_QUADRATURE_N],
    pdf: [[f64; MAX_QUADRATURE_N]; MAX_QUADRATURE_N],
}

struct Nested<'a, M: Marginal> {
    marginals: &'a [M],
    pthres: f64,
    bounds: Bounds,
    integrand: Integrand<'a>,
    upper: f64,
    outer_tol: Tolerance,
    inner_tol: Tolerance,
}

impl<M: Marginal> Nested<'_, M> {
    fn n(&self) -> usize {
        self.marginals.len()
    }

    /// Limits of coordinate `d` given `xs[..d]`. The outermost coordinate runs to
    /// infinity only when it is also the innermost (analytic) one.
    fn limits(&self, xs: &[f64], d: usize) -> (f64, f64) {
        if d == 0 {
            let lo = if self.bounds == Bounds::Cone { 0.0 } else { self.pthres };
            let hi = if self.n() == 1 { f64::INFINITY } else { self.upper };
            return (lo, hi);
        }
        let slack = xs[0] - self.pthres - xs[1..d].iter().sum::<f64>();
        let hi = match self.bounds {
            Bounds::Paper => slack,
            Bounds::Ordered => slack.min(xs[d - 1]),
            Bounds::Cone => xs[d - 1],
        };
        (0.0, hi)
    }

    fn breakpoints(&self, xs: &[f64], d: usize, lo: f64, hi: f64) -> Vec<f64> {
        if d == 0 {
            let mut points: Vec<f64> =
                self.marginals.iter().flat_map(|m| [1.0, 8.0].map(|k| lo + k * m.scale())).collect();
            points.retain(|&p| p > lo && p < hi);
            return points;
        }
        // Narrow marginals make the integrand change sharply within a few scale
        // lengths of 0 and, through the next limit `slack - x_d`, of `slack`.
        // Geometric breakpoints at both ends spare the bisection walk down to them.
        let slack = xs[0] - self.pthres - xs[1..d].iter().sum::<f64>();
        let span = hi - lo;
        let mut points: Vec<f64> = self
            .marginals
            .iter()
            .flat_map(|m| (0..8).map(move |k| m.scale() * 4f64.powi(k)))
            .filter(|&offset| offset < span / 4.0)
            .flat_map(|offset| [lo + offset, slack - offset])
            .collect();
        if self.bounds == Bounds::Ordered {
            // The next limit min(x_d, slack - x_d) kinks at slack/2; deeper ones at
            // slack/3 and slack/4.
            points.extend([slack / 2.0, slack / 3.0, slack / 4.0].iter().take(self.n() - d));
        }
        points.retain(|&p| p > lo && p < hi);
        points
    }

    /// Integral over the last coordinate, with the pdf rows of the outer
    /// coordinates already evaluated.
    fn innermost(&self, rows: &Rows, lo: f64, hi: f64) -> f64 {
        let n = self.n();
        let last = |m: &M| m.cdf(hi) - m.cdf(lo);
        match self.integrand {
            Integrand::Joint => {
                let mut a = [0.0f64; MAX_QUADRATURE_N * MAX_QUADRATURE_N];
                for r in 0..n - 1 {
                    a[r * n..(r + 1) * n].copy_from_slice(&rows.pdf[r][..n]);
                }
                for (c, m) in self.marginals.iter().enumerate() {
                    a[(n - 1) * n + c] = last(m);
                }
                ryser(&a[..n * n], n)
            }
            Integrand::Slot(slots) => {
                let head: f64 = (0..n - 1).map(|c| rows.pdf[c][0]).product();
                head * last(&self.marginals[slots[n - 1]])
            }
        }
    }

    /// Fixes coordinate `d` at `t` and caches the pdf values the integrand needs.
    fn set(&self, rows: &mut Rows, d: usize, t: f64) {
        rows.x[d] = t;
        match self.integrand {
            Integrand::Joint => {
                for (c, m) in self.marginals.iter().enumerate() {
                    rows.pdf[d][c] = m.pdf(t);
                }
            }
            Integrand::Slot(slots) => rows.pdf[d][0] = self.marginals[slots[d]].pdf(t),
        }
    }

    fn level(&self, rows: &Rows, d: usize) -> f64 {
        let (lo, hi) = self.limits(&rows.x, d);
        if !(hi > lo) {
            return 0.0;
        }
        if d + 1 == self.n() {
            return self.innermost(rows, lo, hi);
        }
        let breaks = self.breakpoints(&rows.x, d, lo, hi);
        let tol = if d == 0 { self.outer_tol } else { self.inner_tol };
        let mut local = *rows;
        integrate(
            |t| {
                self.set(&mut local, d, t);
                self.level(&local, d + 1)
            },
            lo,
            hi,
            &breaks,
            tol,
        )
        .value
    }

    fn run(&self) -> f64 {
        self.level(&Rows::default(), 0)
    }
}

fn check_quadrature_args(means: &[f64], pthres: f64, tol: f64) -> Result<()> {
    check_means(means, pthres)?;
    if means.len() > MAX_QUADRATURE_N {
        return Err(Error::UnsupportedSize { what: "nested quadrature", n: means.len(), max: MAX_QUADRATURE_N });
    }
    if !(1e-10..=1e-3).contains(&tol) {
        return Err(Error::invalid(format!("quadrature tolerance must lie in [1e-10, 1e-3], got {tol}")));
    }
    Ok(())
}

/// Truncation point for the outermost coordinate:
/// `U = P + Σ X̄_i · ln(n · Σ X̄_i / (tol · min X̄_i))`.
pub fn truncation_point(means: &[f64], pthres: f64, tol: f64) -> f64 {
    let sum: f64 = means.iter().sum();
    let min = means.iter().copied().fold(f64::INFINITY, f64::min);
    pthres + sum * (means.len() as f64 * sum / (tol * min)).ln()
}

fn nested<'a>(
    marginals: &'a [Exponential],
    pthres: f64,
    bounds: Bounds,
    integrand: Integrand<'a>,
    tol: f64,
) -> Nested<'a, Exponential> {
    let means: Vec<f64> = marginals.iter().map(|m| m.mean).collect();
    let upper = truncation_point(&means, pthres, tol);
    let span = (upper - pthres).max(f64::MIN_POSITIVE);
    Nested {
        marginals,
        pthres,
        bounds,
        integrand,
        upper,
        outer_tol: Tolerance { epsabs: 0.5 * tol, epsrel: 0.0, limit: 2000 },
        // Every integrand is nonnegative, so a relative bound at each inner level
        // carries straight through to the total.
        inner_tol: Tolerance { epsabs: 1e-3 * tol / span, epsrel: 0.1 * tol, limit: 400 },
    }
}

/// Outage probability `1 - ∫ (joint density over the non-outage region)`.
pub fn pout_quadrature(means: &[f64], pthres: f64, region: QuadratureRegion, tol: f64) -> Result<OutageResult> {
    check_quadrature_args(means, pthres, tol)?;
    let marginals = exponentials(means);
    let bounds = match region {
        QuadratureRegion::PaperBounds => Bounds::Paper,
        QuadratureRegion::OrderedRegion => Bounds::Ordered,
    };
    let mass = nested(&marginals, pthres, bounds, Integrand::Joint, tol).run();
    Ok(OutageResult { value: 1.0 - mass, method: Method::Quadrature, variant: Variant::Region(region), stderr: None })
}

/// One term of the permutation sum integrated over the published nested limits:
/// slot `c` of `permutation` names the marginal evaluated at ordered coordinate `c`.
/// Indices are zero-based.
pub fn integral_i(permutation: &[usize], means: &[f64], pthres: f64, tol: f64) -> Result<f64> {
    check_quadrature_args(means, pthres, tol)?;
    let n = means.len();
    let mut seen = vec![false; n];
    if permutation.len() != n || !permutation.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true)) {
        return Err(Error::invalid(format!("{permutation:?} is not a permutation of 0..{n}")));
    }
    let marginals = exponentials(means);
    Ok(nested(&marginals, pthres, Bounds::Paper, Integrand::Slot(permutation), tol).run())
}

/// Total mass of [`joint_pdf_ordered`] over the ordered cone; 1 up to quadrature
/// and truncation error.
pub fn joint_pdf_mass(means: &[f64], tol: f64) -> Result<f64> {
    check_quadrature_args(means, 0.0, tol)?;
    let marginals = exponentials(means);
    Ok(nested(&marginals, 0.0, Bounds::Cone, Integrand::Joint, tol).run())
}
