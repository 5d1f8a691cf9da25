use alloc::vec::Vec;

use super::spectral::{build_spectral_data, SpectralData};
use crate::error::{Error, Result};
use crate::gallery::{GalleryOperator, Verdict};
use crate::lattice::{margins, MarginReport};
use crate::numerics::{shifted_factor, sigma_min_from_lu};

/// Empirical decision thresholds; none of these come from the theory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// Margins within `±eps_cls·ĉ` are never called strong.
    pub eps_cls: f64,
    pub uniform_low: f64,
    pub uniform_high: f64,
    /// Minimum `ĉ` growth per doubling for a divergent verdict.
    pub divergent_growth: f64,
    /// Points closer than `gap · proximity_fraction` to a spectral dip are skipped.
    pub proximity_fraction: f64,
    pub min_doublings: usize,
    /// Points with `σ_min(μ − A) < singular_sigma · ‖A‖_∞` are skipped.
    pub singular_sigma: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            eps_cls: 1e-9,
            uniform_low: 0.8,
            uniform_high: 1.25,
            divergent_growth: 1.4,
            proximity_fraction: 1.0 / 50.0,
            min_doublings: 3,
            singular_sigma: 1e-13,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    StrongPositive,
    StrongNegative,
    Mixed,
    SkippedNearSpectrum,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::StrongPositive => "strong_positive",
            Classification::StrongNegative => "strong_negative",
            Classification::Mixed => "mixed",
            Classification::SkippedNearSpectrum => "skipped_near_spectrum",
        }
    }

    pub fn is_skipped(self) -> bool {
        self == Classification::SkippedNearSpectrum
    }
}

pub fn classify(m: &MarginReport, eps_cls: f64) -> Classification {
    let eps = eps_cls * m.two_sided_constant;
    if m.lower_margin > eps {
        Classification::StrongPositive
    } else if m.upper_margin < -eps {
        Classification::StrongNegative
    } else {
        Classification::Mixed
    }
}

/// Raw result of one grid point, before the proximity rules are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEvaluation {
    pub mu: f64,
    pub sigma_min: f64,
    pub margins: Option<MarginReport>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRecord {
    pub mu: f64,
    pub sigma_min: f64,
    pub margins: Option<MarginReport>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub lambda0: f64,
    pub gap: f64,
    pub proximity_radius: f64,
    pub records: Vec<ScanRecord>,
    /// `δ⁺` of the window `(λ₀, λ₀ + δ⁺]`.
    pub right_width: f64,
    /// `δ⁻` of the window `[λ₀ − δ⁻, λ₀)`.
    pub left_width: f64,
}

impl ScanReport {
    pub fn right_window(&self) -> (f64, f64) {
        (self.lambda0, self.lambda0 + self.right_width)
    }

    pub fn left_window(&self) -> (f64, f64) {
        (self.lambda0 - self.left_width, self.lambda0)
    }

    pub fn count(&self, c: Classification) -> usize {
        self.records.iter().filter(|r| r.classification == c).count()
    }

    fn side_verdict(&self, right: bool) -> Verdict {
        let (width, strong) = if right {
            (self.right_width, Classification::StrongPositive)
        } else {
            (self.left_width, Classification::StrongNegative)
        };
        if width > 0.0 {
            return Verdict::Holds;
        }
        let mut side: Vec<&ScanRecord> = self
            .records
            .iter()
            .filter(|r| if right { r.mu > self.lambda0 } else { r.mu < self.lambda0 })
            .filter(|r| !r.classification.is_skipped())
            .collect();
        side.sort_by(|a, b| (a.mu - self.lambda0).abs().total_cmp(&(b.mu - self.lambda0).abs()));
        match side.first() {
            Some(r) if r.classification != strong => Verdict::Fails,
            _ => Verdict::Untested,
        }
    }

    /// Maximum principle evidence right of `λ₀`.
    pub fn max_verdict(&self) -> Verdict {
        self.side_verdict(true)
    }

    /// Anti-maximum principle evidence left of `λ₀`.
    pub fn antimax_verdict(&self) -> Verdict {
        self.side_verdict(false)
    }
}

/// Uniform grid of `steps` points on `[mu_min, mu_max]`.
pub fn mu_grid(mu_min: f64, mu_max: f64, steps: usize) -> Result<Vec<f64>> {
    if !(mu_min.is_finite() && mu_max.is_finite() && mu_min < mu_max) {
        return Err(Error::InvalidParameter { name: "mu range", reason: "need finite mu_min < mu_max".into() });
    }
    if steps < 2 {
        return Err(Error::InvalidParameter { name: "steps", reason: "need at least 2".into() });
    }
    let d = (mu_max - mu_min) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if k + 1 == steps { mu_max } else { mu_min + d * k as f64 })
        .collect())
}

/// Everything a scan needs that is shared between grid points.
pub struct ScanContext<'a> {
    pub op: &'a GalleryOperator,
    pub spectral: &'a SpectralData,
    pub thresholds: Thresholds,
    norm: f64,
}

impl<'a> ScanContext<'a> {
    pub fn new(op: &'a GalleryOperator, spectral: &'a SpectralData, thresholds: Thresholds) -> Self {
        Self { op, spectral, thresholds, norm: op.matrix.inf_norm() }
    }

    pub fn evaluate(&self, mu: f64) -> PointEvaluation {
        match shifted_factor(&self.op.matrix, mu) {
            Ok(lu) => {
                let sigma = sigma_min_from_lu(&lu);
                let r = lu.inverse();
                let m = if r.is_finite() { margins(&r, &self.op.frame).ok() } else { None };
                PointEvaluation { mu, sigma_min: sigma, margins: m }
            }
            Err(_) => PointEvaluation { mu, sigma_min: 0.0, margins: None },
        }
    }

    pub fn proximity_radius(&self) -> f64 {
        if self.spectral.gap.is_finite() {
            self.spectral.gap * self.thresholds.proximity_fraction
        } else {
            0.0
        }
    }

    /// Applies the proximity rules, classifies, and reads off the windows.
    pub fn assemble(&self, mut points: Vec<PointEvaluation>) -> ScanReport {
        points.sort_by(|a, b| a.mu.total_cmp(&b.mu));
        let lambda0 = self.spectral.lambda0();
        let radius = self.proximity_radius();
        let mut dips: Vec<f64> = self.spectral.known_dips().collect();
        for k in 1..points.len().saturating_sub(1) {
            let s = points[k].sigma_min;
            if s < points[k - 1].sigma_min && s <= points[k + 1].sigma_min {
                dips.push(points[k].mu);
            }
        }
        let records: Vec<ScanRecord> = points
            .iter()
            .map(|p| {
                let near_dip = radius > 0.0 && dips.iter().any(|d| (p.mu - d).abs() < radius);
                let at_lambda0 = (p.mu - lambda0).abs() <= 1e-12 * lambda0.abs().max(1.0);
                let singular = p.sigma_min < self.thresholds.singular_sigma * self.norm;
                let classification = match p.margins {
                    Some(m) if !(near_dip || at_lambda0 || singular) => classify(&m, self.thresholds.eps_cls),
                    _ => Classification::SkippedNearSpectrum,
                };
                ScanRecord { mu: p.mu, sigma_min: p.sigma_min, margins: p.margins, classification }
            })
            .collect();
        let width = |right: bool| {
            let strong = if right { Classification::StrongPositive } else { Classification::StrongNegative };
            let mut side: Vec<&ScanRecord> =
                records.iter().filter(|r| if right { r.mu > lambda0 } else { r.mu < lambda0 }).collect();
            if !right {
                side.reverse();
            }
            let mut w = 0.0f64;
            for r in side {
                if r.classification.is_skipped() {
                    continue;
                }
                if r.classification != strong {
                    break;
                }
                w = (r.mu - lambda0).abs();
            }
            w
        };
        ScanReport {
            lambda0,
            gap: self.spectral.gap,
            proximity_radius: radius,
            right_width: width(true),
            left_width: width(false),
            records,
        }
    }

    pub fn run(&self, grid: &[f64]) -> ScanReport {
        self.assemble(grid.iter().map(|&mu| self.evaluate(mu)).collect())
    }
}

pub fn scan_with(
    op: &GalleryOperator,
    spectral: &SpectralData,
    mu_min: f64,
    mu_max: f64,
    steps: usize,
    thresholds: Thresholds,
) -> Result<ScanReport> {
    let grid = mu_grid(mu_min, mu_max, steps)?;
    Ok(ScanContext::new(op, spectral, thresholds).run(&grid))
}

pub fn scan(op: &GalleryOperator, mu_min: f64, mu_max: f64, steps: usize, thresholds: Thresholds) -> Result<ScanReport> {
    let grid = mu_grid(mu_min, mu_max, steps)?;
    let spectral = build_spectral_data(op)?;
    Ok(ScanContext::new(op, &spectral, thresholds).run(&grid))
}
