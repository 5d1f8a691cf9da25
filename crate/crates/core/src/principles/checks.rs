//! Executable versions of the resolvent estimates: each check recomputes the
//! constants produced by the corresponding argument and compares them with
//! the margins of the actual matrices.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::refine::{refinement_study, RefinementStudy, RefinementVerdict};
use super::scan::{classify, mu_grid, Classification, ScanContext, Thresholds};
use super::spectral::{build_spectral_data, SpectralData};
use crate::error::{Error, Result};
use crate::gallery::{odd_order_symbol, GalleryOperator, OperatorSpec, Verdict};
use crate::lattice::{margins, phi_to_u_norm, DenseMatrix, RankOneFrame};
use crate::numerics::{refined_resolvent, resolvent, shifted_factor, sigma_min_from_lu, symmetric_eigen};

const SLACK: f64 = 1e-9;

pub const SINGLE_MESH_LABEL: &str = "single-mesh (not a uniformity certificate)";

fn c_hat(t: &DenseMatrix, frame: &RankOneFrame) -> Result<f64> {
    phi_to_u_norm(t, frame)
}

// ---------------------------------------------------------------------------
// Resolvent identity and finite expansion

/// `‖R(μ) − R(μ₀) − (μ₀ − μ)R(μ)R(μ₀)‖ / (‖R(μ)‖ + ‖R(μ₀)‖)` in the max norm.
pub fn resolvent_identity_residual(a: &DenseMatrix, mu: f64, mu0: f64) -> Result<f64> {
    let r = resolvent(a, mu)?;
    let r0 = resolvent(a, mu0)?;
    let rhs = r.matmul(&r0).scaled(mu0 - mu);
    let lhs = r.sub(&r0);
    Ok(lhs.sub(&rhs).max_abs() / (r.max_abs() + r0.max_abs()))
}

/// Relative residual of
/// `R(μ) = Σ_{k<n} (μ₀−μ)^k R(μ₀)^{k+1} + (μ₀−μ)^n R(μ₀)^n R(μ)`,
/// normalized by `‖R(μ)‖` plus the norms of all terms.
pub fn finite_expansion_residual(a: &DenseMatrix, mu: f64, mu0: f64, order: u32) -> Result<f64> {
    let r = resolvent(a, mu)?;
    let r0 = resolvent(a, mu0)?;
    let delta = mu0 - mu;
    let mut power = DenseMatrix::identity(a.dim());
    let mut coef = 1.0;
    let mut sum = DenseMatrix::zeros(a.dim());
    let mut scale = r.max_abs();
    for _ in 0..order {
        power = power.matmul(&r0);
        let term = power.scaled(coef);
        scale += term.max_abs();
        sum = sum.add(&term);
        coef *= delta;
    }
    let tail = power.matmul(&r).scaled(coef);
    scale += tail.max_abs();
    sum = sum.add(&tail);
    Ok(r.sub(&sum).max_abs() / scale)
}

/// Radius around `λ₀` from which expansion test points are drawn.
pub fn expansion_radius(lambda0: f64, gap: f64) -> f64 {
    let r = 1.0 + lambda0.abs();
    if gap.is_finite() {
        r.min(gap / 2.0)
    } else {
        r
    }
}

/// Seeded pairs `(μ, μ₀)` with `0.2r ≤ |μ − λ₀| ≤ r`.
pub fn expansion_pairs(lambda0: f64, radius: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || {
        let side = if rng.random::<bool>() { 1.0 } else { -1.0 };
        lambda0 + side * radius * (0.2 + 0.8 * rng.random::<f64>())
    };
    (0..count).map(|_| (draw(), draw())).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionEntry {
    pub mu: f64,
    pub mu0: f64,
    pub order: u32,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionReport {
    pub entries: Vec<ExpansionEntry>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn check_finite_expansion(op: &GalleryOperator, pairs: &[(f64, f64)], orders: &[u32]) -> Result<ExpansionReport> {
    let tolerance = 1e-8;
    let mut entries = Vec::new();
    for &(mu, mu0) in pairs {
        for &order in orders {
            let residual = finite_expansion_residual(&op.matrix, mu, mu0, order)?;
            entries.push(ExpansionEntry { mu, mu0, order, residual });
        }
    }
    let max_residual = entries.iter().map(|e| e.residual).fold(0.0, f64::max);
    Ok(ExpansionReport { passed: max_residual <= tolerance, entries, max_residual, tolerance })
}

// ---------------------------------------------------------------------------
// Two-sided extension

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSidedEntry {
    pub mu: f64,
    pub power: u32,
    pub c_hat: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSidedReport {
    pub mu0: f64,
    pub c_hat0: f64,
    /// `‖u‖_∞ Σ w φ`
    pub embedding: f64,
    pub entries: Vec<TwoSidedEntry>,
    pub max_ratio: f64,
    pub passed: bool,
}

/// Checks `ĉ(R(μ)ⁿ) ≤ B₁ⁿ Jⁿ⁻¹` with
/// `B₁ = ĉ₀ + |Δ|ĉ₀²J + Δ²ĉ₀²‖R(μ)‖_∞J`, the constant of the two-term expansion.
pub fn check_two_sided_extension(
    op: &GalleryOperator,
    mu0: f64,
    mu_list: &[f64],
    n_max_power: u32,
) -> Result<TwoSidedReport> {
    let frame = &op.frame;
    let j = frame.embedding_constant();
    let r0 = resolvent(&op.matrix, mu0)?;
    let c0 = c_hat(&r0, frame)?;
    let mut entries = Vec::new();
    for &mu in mu_list {
        let r = resolvent(&op.matrix, mu)?;
        let d = (mu0 - mu).abs();
        let b1 = c0 + d * c0 * c0 * j + d * d * c0 * c0 * r.inf_norm() * j;
        let mut power = r.clone();
        for n in 1..=n_max_power.max(1) {
            if n > 1 {
                power = power.matmul(&r);
            }
            let c = c_hat(&power, frame)?;
            let bound = libm::pow(b1, f64::from(n)) * libm::pow(j, f64::from(n - 1));
            entries.push(TwoSidedEntry { mu, power: n, c_hat: c, bound, ratio: c / bound });
        }
    }
    let max_ratio = entries.iter().map(|e| e.ratio).fold(0.0, f64::max);
    Ok(TwoSidedReport {
        mu0,
        c_hat0: c0,
        embedding: j,
        passed: entries.iter().all(|e| e.c_hat <= e.bound * (1.0 + SLACK)),
        entries,
        max_ratio,
    })
}

// ---------------------------------------------------------------------------
// One-sided extension

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Lower bounds, propagated to `μ ≤ μ₀`.
    LeftLower,
    /// Upper bounds, propagated to `μ ≥ μ₀`.
    RightUpper,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::LeftLower => "left_lower",
            Direction::RightUpper => "right_upper",
        }
    }

    fn sign(self) -> f64 {
        match self {
            Direction::LeftLower => 1.0,
            Direction::RightUpper => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtensionMode {
    /// `μ` must lie on the permitted side of `μ₀`.
    Directed,
    /// Both sides allowed; requires `m₁ = m₂ = 1`.
    DirectionFree,
    /// Both sides allowed for any operator; results are reported, not asserted.
    Exploratory,
}

impl ExtensionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtensionMode::Directed => "directed",
            ExtensionMode::DirectionFree => "direction_free",
            ExtensionMode::Exploratory => "exploratory",
        }
    }
}

/// For `left_lower`, `margin` is a lower margin and `limit` a lower limit;
/// for `right_upper` both are upper. Powers carry the alternating sign
/// `(−1)^{n−1}` in the `right_upper` case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBound {
    pub power: u32,
    pub margin: f64,
    pub limit: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedEntry {
    pub mu: f64,
    pub margin: f64,
    pub limit: f64,
    pub satisfied: bool,
    pub powers: Vec<PowerBound>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedReport {
    pub direction: Direction,
    pub mode: ExtensionMode,
    pub mu0: f64,
    /// Margin of `R(μ₀)` in the checked direction.
    pub hypothesis_margin: f64,
    /// Power bounds at `μ₀`; empty when the projection is not strictly positive.
    pub powers_at_mu0: Vec<PowerBound>,
    pub entries: Vec<OneSidedEntry>,
    /// Largest `|limit|` over the entries.
    pub max_limit: f64,
    pub label: &'static str,
    /// `None` in exploratory mode.
    pub passed: Option<bool>,
}

fn satisfied_lower(margin: f64, limit: f64, scale: f64) -> bool {
    margin >= limit - SLACK * (limit.abs() + scale)
}

/// Lower bounds on the margins of `Rⁿ`, `n ≤ 4`, obtained from `sR ⪰ −cP`
/// (`s > 0`) or `sR ⪯ cP` (`s < 0`) by the binomial expansion of
/// `(sR + cP)ⁿ` resp. `(cP − sR)ⁿ` and `sRP = P`.
fn power_bounds(r: &DenseMatrix, p: &DenseMatrix, frame: &RankOneFrame, s: f64) -> Result<Vec<PowerBound>> {
    let n = r.dim();
    if (0..n).any(|i| p.row(i).iter().any(|&x| x <= 0.0)) || s == 0.0 {
        return Ok(Vec::new());
    }
    let pm = margins(p, frame)?;
    let mut c = if s > 0.0 { 0.0 } else { f64::NEG_INFINITY };
    for i in 0..n {
        for (x, q) in r.row(i).iter().zip(p.row(i)) {
            c = c.max(if s > 0.0 { -s * x / q } else { s * x / q });
        }
    }
    let mut out = Vec::new();
    let mut power = r.clone();
    for k in 1..=4u32 {
        if k > 1 {
            power = power.matmul(r);
        }
        let kf = f64::from(k);
        let sk = libm::pow(s.abs(), kf);
        let limit = if s > 0.0 {
            -(libm::pow(1.0 + c, kf) - 1.0) * pm.upper_margin / sk
        } else {
            let coef = libm::pow(c - 1.0, kf) - libm::pow(-1.0, kf);
            let reference = if coef >= 0.0 { pm.upper_margin } else { pm.lower_margin };
            -coef * reference / sk
        };
        let m = margins(&power, frame)?;
        out.push(PowerBound {
            power: k,
            margin: m.lower_margin,
            limit,
            satisfied: satisfied_lower(m.lower_margin, limit, m.two_sided_constant),
        });
    }
    Ok(out)
}

fn flip(bounds: Vec<PowerBound>, sign: f64) -> Vec<PowerBound> {
    bounds
        .into_iter()
        .map(|b| PowerBound { margin: sign * b.margin, limit: sign * b.limit, ..b })
        .collect()
}

/// Propagates a one-sided bound on `R(μ₀)` to `R(μ)` through the finite
/// expansion with `m = m₁ + m₂` terms, and checks the power bounds.
pub fn check_one_sided_extension(
    op: &GalleryOperator,
    spectral: &SpectralData,
    mu0: f64,
    direction: Direction,
    mu_list: &[f64],
    mode: ExtensionMode,
) -> Result<OneSidedReport> {
    if mode == ExtensionMode::DirectionFree && (op.continuum_m1 != 1 || op.continuum_m2 != 1) {
        return Err(Error::PreconditionFailed(format!(
            "direction-free extension needs m1 = m2 = 1, {} has m1 = {}, m2 = {}",
            op.name, op.continuum_m1, op.continuum_m2
        )));
    }
    let sigma = direction.sign();
    let b = op.matrix.scaled(sigma);
    let frame = &op.frame;
    let p = &spectral.projection;
    let lambda0 = sigma * spectral.lambda0();
    let m = op.power();
    let nu0 = sigma * mu0;
    let r0 = resolvent(&b, nu0)?;
    let mut r0_powers = Vec::new();
    let mut acc = r0.clone();
    for k in 1..=m {
        if k > 1 {
            acc = acc.matmul(&r0);
        }
        r0_powers.push(margins(&acc, frame)?);
    }
    let r0m = acc;
    let hypothesis = r0_powers[0];
    let powers_at_mu0 = power_bounds(&r0, p, frame, nu0 - lambda0)?;

    let mut entries = Vec::new();
    for &mu in mu_list {
        let nu = sigma * mu;
        if mode == ExtensionMode::Directed && nu > nu0 {
            return Err(Error::DirectionViolated { mu, mu0 });
        }
        let r = resolvent(&b, nu)?;
        let delta = nu0 - nu;
        let limit = if mode == ExtensionMode::DirectionFree {
            hypothesis.lower_margin.min(0.0) - delta.abs() * c_hat(&r.matmul(&r0), frame)?
        } else {
            let mut lower = 0.0;
            let mut coef = 1.0;
            for pm in &r0_powers {
                lower += if coef >= 0.0 { coef * pm.lower_margin } else { coef * pm.upper_margin };
                coef *= delta;
            }
            lower.min(0.0) - coef.abs() * c_hat(&r0m.matmul(&r), frame)?
        };
        let mr = margins(&r, frame)?;
        let powers = power_bounds(&r, p, frame, nu - lambda0)?;
        entries.push(OneSidedEntry {
            mu,
            margin: sigma * mr.lower_margin,
            limit: sigma * limit,
            satisfied: satisfied_lower(mr.lower_margin, limit, mr.two_sided_constant),
            powers: flip(powers, sigma),
        });
    }
    let ok = entries.iter().all(|e| e.satisfied && e.powers.iter().all(|p| p.satisfied))
        && powers_at_mu0.iter().all(|p| p.satisfied);
    Ok(OneSidedReport {
        direction,
        mode,
        mu0,
        hypothesis_margin: sigma * hypothesis.lower_margin,
        powers_at_mu0: flip(powers_at_mu0, sigma),
        max_limit: entries.iter().map(|e| e.limit.abs()).fold(0.0, f64::max),
        entries,
        label: SINGLE_MESH_LABEL,
        passed: if mode == ExtensionMode::Exploratory { None } else { Some(ok) },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneSidedRefinement {
    pub meshes: Vec<(usize, OneSidedReport)>,
    /// Growth of `max_limit` between consecutive meshes.
    pub growth: Vec<f64>,
    pub verdict: RefinementVerdict,
    pub passed: Option<bool>,
}

/// The same check repeated over a mesh list; the verdict follows the growth
/// of the propagated constant.
#[allow(clippy::too_many_arguments)]
pub fn check_one_sided_extension_refined(
    spec: &OperatorSpec,
    n_list: &[usize],
    mu0: f64,
    direction: Direction,
    mu_list: &[f64],
    mode: ExtensionMode,
    thresholds: &Thresholds,
) -> Result<OneSidedRefinement> {
    let ns = super::refine::normalize_n_list(n_list)?;
    let mut meshes = Vec::new();
    for &n in &ns {
        let op = spec.build(n)?;
        let sd = build_spectral_data(&op)?;
        meshes.push((n, check_one_sided_extension(&op, &sd, mu0, direction, mu_list, mode)?));
    }
    let growth: Vec<f64> = meshes.windows(2).map(|w| w[1].1.max_limit / w[0].1.max_limit).collect();
    let ratio = meshes[meshes.len() - 1].1.max_limit / meshes[0].1.max_limit;
    let verdict = if !growth.is_empty() && growth.iter().all(|&g| g >= thresholds.divergent_growth) {
        RefinementVerdict::Divergent
    } else if growth.len() >= thresholds.min_doublings && ratio >= thresholds.uniform_low && ratio <= thresholds.uniform_high
    {
        RefinementVerdict::Uniform
    } else {
        RefinementVerdict::Inconclusive
    };
    let passed = if mode == ExtensionMode::Exploratory {
        None
    } else {
        Some(meshes.iter().all(|(_, r)| r.passed == Some(true)))
    };
    Ok(OneSidedRefinement { meshes, growth, verdict, passed })
}

// ---------------------------------------------------------------------------
// Convergence of (μ − λ₀)^m R(μ)^m to the spectral projection

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionReport {
    pub m: u32,
    /// `(μ, c(μ))`
    pub values: Vec<(f64, f64)>,
    pub eventually_decreasing: bool,
    pub final_ratio: f64,
    pub passed: bool,
}

/// `λ₀ + sign·2^{-k}` for `k = 1..=k_max`.
pub fn geometric_sequence(lambda0: f64, sign: f64, k_max: u32) -> Vec<f64> {
    (1..=k_max).map(|k| lambda0 + sign * libm::exp2(-f64::from(k))).collect()
}

pub fn check_projection_convergence(
    op: &GalleryOperator,
    spectral: &SpectralData,
    m: u32,
    mu_sequence: &[f64],
) -> Result<ProjectionReport> {
    if mu_sequence.is_empty() {
        return Err(Error::InvalidParameter { name: "mu_sequence", reason: "empty".into() });
    }
    let m = m.max(1);
    let lambda0 = spectral.lambda0();
    let mut values = Vec::new();
    for &mu in mu_sequence {
        let t = refined_resolvent(&op.matrix, mu, 1)?.scaled(mu - lambda0);
        let d = t.pow(m).sub(&spectral.projection);
        values.push((mu, phi_to_u_norm(&d, &op.frame)?));
    }
    let half = values.len() / 2;
    let eventually_decreasing = values[half..].windows(2).all(|w| w[1].1 < w[0].1);
    let final_ratio = values[values.len() - 1].1 / values[0].1;
    Ok(ProjectionReport { m, passed: eventually_decreasing && final_ratio < 1e-2, values, eventually_decreasing, final_ratio })
}

// ---------------------------------------------------------------------------
// Powers of the resolvent near λ₀

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowersPoint {
    pub mu: f64,
    /// Lower margin of `R(μ)^m` on the right; upper margin of
    /// `(−1)^{m−1} R(μ)^m` on the left.
    pub margin: Option<f64>,
    pub classification: Classification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowersReport {
    pub m: u32,
    /// `P ⪰ c·u⊗φ` for some `c > 0`.
    pub assumption_holds: bool,
    pub right: Vec<PowersPoint>,
    pub left: Vec<PowersPoint>,
    pub right_width: f64,
    pub left_width: f64,
    pub verdict: Verdict,
}

/// Probes `λ₀ ± δ 2^{-k}`, `k = 0..10`, for `u⊗φ ⪯ R(μ)^m` on the right and
/// `(−1)^{m−1} R(μ)^m ⪯ −u⊗φ` on the left.
pub fn check_powers_theorem(op: &GalleryOperator, spectral: &SpectralData, thresholds: &Thresholds) -> Result<PowersReport> {
    let m = op.power();
    let lambda0 = spectral.lambda0();
    let delta = if spectral.gap.is_finite() {
        (spectral.gap / 4.0).min(lambda0.abs().max(1.0))
    } else {
        lambda0.abs().max(1.0)
    };
    let ctx = ScanContext::new(op, spectral, *thresholds);
    let radius = ctx.proximity_radius();
    let norm = op.matrix.inf_norm();
    let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
    let probe = |mu: f64, right: bool| -> Result<PowersPoint> {
        let near = radius > 0.0 && spectral.known_dips().any(|d| (mu - d).abs() < radius);
        let lu = match shifted_factor(&op.matrix, mu) {
            Ok(lu) => lu,
            Err(Error::MuInSpectrum { .. }) => {
                return Ok(PowersPoint { mu, margin: None, classification: Classification::SkippedNearSpectrum })
            }
            Err(e) => return Err(e),
        };
        if near || sigma_min_from_lu(&lu) < thresholds.singular_sigma * norm {
            return Ok(PowersPoint { mu, margin: None, classification: Classification::SkippedNearSpectrum });
        }
        let rm = lu.inverse().pow(m);
        let rep = if right { margins(&rm, &op.frame)? } else { margins(&rm.scaled(sign), &op.frame)? };
        let c = classify(&rep, thresholds.eps_cls);
        let margin = if right { rep.lower_margin } else { rep.upper_margin };
        Ok(PowersPoint { mu, margin: Some(margin), classification: c })
    };
    let mut right = Vec::new();
    let mut left = Vec::new();
    for k in (0..10).rev() {
        let d = delta * libm::exp2(-f64::from(k));
        right.push(probe(lambda0 + d, true)?);
        left.push(probe(lambda0 - d, false)?);
    }
    let width = |pts: &[PowersPoint], strong: Classification| {
        let mut w = 0.0f64;
        for p in pts {
            if p.classification.is_skipped() {
                continue;
            }
            if p.classification != strong {
                break;
            }
            w = (p.mu - lambda0).abs();
        }
        w
    };
    let right_width = width(&right, Classification::StrongPositive);
    let left_width = width(&left, Classification::StrongNegative);
    let pm = margins(&spectral.projection, &op.frame)?;
    Ok(PowersReport {
        m,
        assumption_holds: classify(&pm, thresholds.eps_cls) == Classification::StrongPositive,
        verdict: if right_width > 0.0 && left_width > 0.0 { Verdict::Holds } else { Verdict::Fails },
        right,
        left,
        right_width,
        left_width,
    })
}

// ---------------------------------------------------------------------------
// Anti-maximum characterization

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterizationReport {
    pub operator: &'static str,
    pub n: usize,
    pub mu1: f64,
    pub lambda0: f64,
    /// `lower_margin(R(μ₁)) / ĉ(R(μ₁))`
    pub precondition_ratio: f64,
    /// (i) a strongly negative window left of `λ₀`.
    pub window_exists: bool,
    pub left_width: f64,
    /// (ii) some `μ₀ < λ₀` with `R(μ₀) ≤ 0` entrywise.
    pub negative_point: Option<f64>,
    /// (iii) `ĉ(R(μ₁))` stays bounded under refinement.
    pub upper_stable: bool,
    pub refinement: RefinementStudy,
    pub consistent: bool,
}

impl CharacterizationReport {
    pub fn conditions(&self) -> [bool; 3] {
        [self.window_exists, self.negative_point.is_some(), self.upper_stable]
    }
}

pub fn check_antimax_characterization(
    spec: &OperatorSpec,
    n: usize,
    mu1: f64,
    n_list: &[usize],
    thresholds: &Thresholds,
) -> Result<CharacterizationReport> {
    let op = spec.build(n)?;
    let spectral = build_spectral_data(&op)?;
    let lambda0 = spectral.lambda0();
    if !(mu1 > lambda0) {
        return Err(Error::PreconditionFailed(format!("mu1 = {mu1} must exceed lambda0 = {lambda0}")));
    }
    let r1 = margins(&resolvent(&op.matrix, mu1)?, &op.frame)?;
    let precondition_ratio = r1.lower_margin / r1.two_sided_constant;
    if precondition_ratio < -thresholds.eps_cls {
        return Err(Error::PreconditionFailed(format!(
            "Res({mu1}) has negative entries (lower margin {:e})",
            r1.lower_margin
        )));
    }
    let reach = expansion_radius(lambda0, spectral.gap);
    let span = 1.8 * reach;
    let steps = 60;
    let grid = mu_grid(lambda0 - span, lambda0 - span / steps as f64, steps)?;
    let report = ScanContext::new(&op, &spectral, *thresholds).run(&grid);
    let negative_point = report
        .records
        .iter()
        .rev()
        .filter(|r| !r.classification.is_skipped())
        .find(|r| r.margins.is_some_and(|m| m.upper_margin <= thresholds.eps_cls * m.two_sided_constant))
        .map(|r| r.mu);
    let refinement = refinement_study(spec, mu1, n_list, thresholds)?;
    let upper_stable = refinement.verdict != RefinementVerdict::Divergent
        && refinement.max_growth() < thresholds.divergent_growth
        && refinement.c_hat_ratio() <= thresholds.uniform_high;
    let window_exists = report.left_width > 0.0;
    let consistent = window_exists == negative_point.is_some() && window_exists == upper_stable;
    Ok(CharacterizationReport {
        operator: spec.name(),
        n,
        mu1,
        lambda0,
        precondition_ratio,
        window_exists,
        left_width: report.left_width,
        negative_point,
        upper_stable,
        refinement,
        consistent,
    })
}

// ---------------------------------------------------------------------------
// The group generated by an odd-order operator

#[derive(Debug, Clone, PartialEq)]
pub struct GroupPositivityReport {
    pub ell: u32,
    pub n: usize,
    pub threshold: f64,
    /// Largest grid time at which `e^{tA}f` has an entry below `−threshold`.
    pub witness: Option<f64>,
    pub most_negative: f64,
    pub most_negative_t: f64,
    /// Whether `2 = k^{2ℓ+1}` has an integer solution; `None` for `ℓ = 0`,
    /// where the group is a positive shift group and the question is vacuous.
    pub cyclic: Option<bool>,
}

/// Whether `2 = k^{2ℓ+1}` for some integer `k`.
pub fn two_is_odd_power(ell: u32) -> bool {
    let p = 2 * ell + 1;
    let mut k: i64 = -2;
    while k <= 2 {
        if k.checked_pow(p) == Some(2) {
            return true;
        }
        k += 1;
    }
    false
}

/// Nonnegative trigonometric bump `((1 + cos 2π(x − centre)) / 2)^p`.
pub fn periodic_bump(n: usize, centre: f64, p: u32) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let x = j as f64 / n as f64;
            libm::pow(0.5 * (1.0 + libm::cos(2.0 * PI * (x - centre))), f64::from(p))
        })
        .collect()
}

/// Evaluates `e^{tA} f` through the exact multiplier `e^{t s(k)}`.
pub fn check_group_not_eventually_positive(
    ell: u32,
    t_grid: &[f64],
    f: &[f64],
    threshold: f64,
) -> Result<GroupPositivityReport> {
    let n = f.len();
    if n % 2 == 0 {
        return Err(Error::InvalidParameter { name: "n", reason: "must be odd".into() });
    }
    if f.iter().any(|&x| !(x >= 0.0)) || f.iter().all(|&x| x == 0.0) {
        return Err(Error::PreconditionFailed("f must be nonnegative and nonzero".into()));
    }
    let symbol = odd_order_symbol(ell);
    let half = ((n - 1) / 2) as i64;
    let ks: Vec<i64> = (-half..=half).collect();
    let angle = |k: i64, j: usize| 2.0 * PI * ((k * j as i64).rem_euclid(n as i64)) as f64 / n as f64;
    let fhat: Vec<Complex64> = ks
        .iter()
        .map(|&k| f.iter().enumerate().map(|(j, &x)| Complex64::from_polar(x, -angle(k, j))).sum())
        .collect();
    let freq: Vec<f64> = ks.iter().map(|&k| symbol(k).im).collect();
    let mut witness = None;
    let mut most_negative = f64::INFINITY;
    let mut most_negative_t = 0.0;
    for &t in t_grid {
        let coeffs: Vec<Complex64> = fhat
            .iter()
            .zip(&freq)
            .map(|(c, &w)| c * Complex64::from_polar(1.0, libm::fmod(t * w, 2.0 * PI)))
            .collect();
        let mut lowest = f64::INFINITY;
        for j in 0..n {
            let v: f64 = ks
                .iter()
                .zip(&coeffs)
                .map(|(&k, c)| (c * Complex64::from_polar(1.0, angle(k, j))).re)
                .sum::<f64>()
                / n as f64;
            lowest = lowest.min(v);
        }
        if lowest < most_negative {
            most_negative = lowest;
            most_negative_t = t;
        }
        if lowest < -threshold {
            witness = Some(witness.map_or(t, |w: f64| w.max(t)));
        }
    }
    Ok(GroupPositivityReport {
        ell,
        n,
        threshold,
        witness,
        most_negative,
        most_negative_t,
        cyclic: if ell == 0 { None } else { Some(two_is_odd_power(ell)) },
    })
}

// ---------------------------------------------------------------------------
// Form-domain estimate for self-adjoint operators

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormDomainReport {
    pub mu: f64,
    pub c_hat: f64,
    /// `‖R^{1/2}‖_{L²→E_u} · ‖R^{1/2}‖_{E^φ→L²}`
    pub factor_bound: f64,
    /// `‖R^{1/2}R^{1/2} − R‖ / ‖R‖`
    pub sqrt_residual: f64,
    pub min_eigenvalue: f64,
    pub satisfied: bool,
}

/// Factors `R(μ) = R^{1/2} R^{1/2}` in the weighted `L²` structure and bounds
/// `ĉ(R(μ))` by the product of the two factor norms.
pub fn check_form_domain_estimate(op: &GalleryOperator, mu: f64) -> Result<FormDomainReport> {
    let defect = op.weighted_asymmetry();
    if defect > 1e-10 {
        return Err(Error::NotSymmetric { defect });
    }
    if op.frame.u() != op.frame.phi() {
        return Err(Error::PreconditionFailed("form-domain estimate needs phi = u".into()));
    }
    let n = op.dim();
    let w = op.frame.weights().as_slice();
    let sw: Vec<f64> = w.iter().map(|&x| libm::sqrt(x)).collect();
    let r = resolvent(&op.matrix, mu)?;
    let s = DenseMatrix::from_fn(n, |i, j| 0.5 * (sw[i] * r[(i, j)] / sw[j] + sw[j] * r[(j, i)] / sw[i]));
    let eig = symmetric_eigen(&s)?;
    let min_eigenvalue = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_eigenvalue > 0.0) {
        return Err(Error::NotPositiveDefinite { eigenvalue: min_eigenvalue });
    }
    let q = &eig.vectors;
    let roots: Vec<f64> = eig.values.iter().map(|&x| libm::sqrt(x)).collect();
    let sqrt_s = DenseMatrix::from_fn(n, |i, j| (0..n).map(|k| q[(i, k)] * roots[k] * q[(j, k)]).sum());
    let half = DenseMatrix::from_fn(n, |i, j| sqrt_s[(i, j)] * sw[j] / sw[i]);
    let sqrt_residual = half.matmul(&half).sub(&r).max_abs() / r.max_abs();
    let u = op.frame.u().as_slice();
    let phi = op.frame.phi().as_slice();
    let to_u = (0..n)
        .map(|i| libm::sqrt((0..n).map(|j| half[(i, j)] * half[(i, j)] / w[j]).sum()) / u[i])
        .fold(0.0, f64::max);
    let from_phi = (0..n)
        .map(|j| libm::sqrt((0..n).map(|i| w[i] * half[(i, j)] * half[(i, j)]).sum()) / (w[j] * phi[j]))
        .fold(0.0, f64::max);
    let factor_bound = to_u * from_phi;
    let c = c_hat(&r, &op.frame)?;
    Ok(FormDomainReport {
        mu,
        c_hat: c,
        factor_bound,
        sqrt_residual,
        min_eigenvalue,
        satisfied: c <= factor_bound * (1.0 + SLACK) && sqrt_residual < 1e-8,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormDomainRefinement {
    pub mu: f64,
    pub meshes: Vec<(usize, FormDomainReport)>,
    /// Extreme values of `ĉ(h)/ĉ(h_0)`.
    pub ratio_range: (f64, f64),
    pub stable: bool,
}

pub fn check_form_domain_refined(
    spec: &OperatorSpec,
    mu: f64,
    n_list: &[usize],
    thresholds: &Thresholds,
) -> Result<FormDomainRefinement> {
    let ns = super::refine::normalize_n_list(n_list)?;
    let meshes = ns
        .iter()
        .map(|&n| Ok((n, check_form_domain_estimate(&spec.build(n)?, mu)?)))
        .collect::<Result<Vec<_>>>()?;
    let c0 = meshes[0].1.c_hat;
    let (lo, hi) = meshes
        .iter()
        .map(|(_, r)| r.c_hat / c0)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
    Ok(FormDomainRefinement {
        mu,
        stable: lo >= thresholds.uniform_low && hi <= thresholds.uniform_high && meshes.iter().all(|(_, r)| r.satisfied),
        ratio_range: (lo, hi),
        meshes,
    })
}
