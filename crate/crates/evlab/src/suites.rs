//! Seeded theorem-check suites. Every assertion is recomputed from scratch,
//! so a suite is a pure function of its name, seed and thresholds.

use std::f64::consts::PI;

use evlab_core::gallery::{
    build_delay_operator, build_interval_laplacian, build_odd_order, default_gallery, BoundaryCondition,
    GalleryOperator, OperatorSpec, Verdict,
};
use evlab_core::lattice::{margins, phi_to_u_norm, rank_one_matrix, DenseMatrix, RankOneFrame};
use evlab_core::principles::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{reals, Real};
use crate::Failure;

pub const SUITE_NAMES: [&str; 7] =
    ["core", "resolvent-identity", "extension", "projection", "powers", "characterization", "group-positivity"];

pub const REFINEMENT_MESHES: [usize; 4] = [50, 100, 200, 400];
pub const GROUP_T_STEP: f64 = 0.01;
pub const GROUP_T_MAX: f64 = 10.0;
pub const GROUP_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub suite: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

fn assertion(suite: &'static str, name: impl Into<String>, passed: bool, detail: Value) -> Assertion {
    Assertion { suite, name: name.into(), passed, detail }
}

/// Runs one suite, or every suite for `"all"`, in a fixed order.
pub fn run(name: &str, seed: u64, th: &Thresholds) -> Result<Vec<Assertion>, Failure> {
    let names: Vec<&'static str> = if name == "all" {
        SUITE_NAMES.to_vec()
    } else if let Some(&s) = SUITE_NAMES.iter().find(|&&s| s == name) {
        vec![s]
    } else {
        return Err(Failure::Usage(format!("unknown suite {name:?}; expected one of {} or all", SUITE_NAMES.join(", "))));
    };
    let parts = names.par_iter().map(|s| run_one(s, seed, th)).collect::<Result<Vec<_>, Failure>>()?;
    Ok(parts.into_iter().flatten().collect())
}

fn run_one(name: &'static str, seed: u64, th: &Thresholds) -> Result<Vec<Assertion>, Failure> {
    match name {
        "core" => Ok(core_suite(seed)),
        "resolvent-identity" => resolvent_identity_suite(seed),
        "extension" => extension_suite(th),
        "projection" => projection_suite(),
        "powers" => powers_suite(th),
        "characterization" => characterization_suite(th),
        "group-positivity" => group_positivity_suite(seed),
        _ => unreachable!(),
    }
}

/// Random frame and matrix with `n ≤ max_n`.
pub fn random_case(rng: &mut ChaCha8Rng, max_n: usize) -> (RankOneFrame, DenseMatrix) {
    let n = rng.random_range(1..=max_n);
    let mut pos = || (0..n).map(|_| rng.random_range(0.05..20.0)).collect::<Vec<f64>>();
    let (u, phi, w) = (pos(), pos(), pos());
    let frame = RankOneFrame::from_vecs(u, phi, w).expect("positive frame");
    (frame, random_matrix(rng, n, 50.0))
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DenseMatrix {
    let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-scale..scale)).collect();
    DenseMatrix::from_row_major(n, data).expect("square data")
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Largest relative gap between `phi_to_u_norm` and the two-sided constant.
pub fn norm_identity_defect(seed: u64, cases: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..cases)
        .map(|_| {
            let (frame, t) = random_case(&mut rng, 20);
            let m = margins(&t, &frame).expect("matching dimensions");
            rel(phi_to_u_norm(&t, &frame).expect("matching dimensions"), m.two_sided_constant)
        })
        .fold(0.0, f64::max)
}

fn core_suite(seed: u64) -> Vec<Assertion> {
    let cases = 100;
    let defect = norm_identity_defect(seed, cases);
    let mut out = vec![assertion(
        "core",
        "norm_identity",
        defect <= 1e-12,
        json!({ "cases": cases, "max_relative_defect": Real(defect), "tolerance": Real(1e-12) }),
    )];

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut worst = 0.0f64;
    for _ in 0..cases {
        let (frame, t1) = random_case(&mut rng, 12);
        let n = t1.dim();
        let t2 = random_matrix(&mut rng, n, 5.0);
        let s = random_matrix(&mut rng, n, 5.0);
        let c = phi_to_u_norm(&t2.matmul(&s).matmul(&t1), &frame).expect("dims");
        let bound = phi_to_u_norm(&t1, &frame).expect("dims")
            * phi_to_u_norm(&t2, &frame).expect("dims")
            * s.inf_norm()
            * frame.embedding_constant();
        worst = worst.max(c / bound);
    }
    out.push(assertion(
        "core",
        "composition_bound",
        worst <= 1.0 + 1e-12,
        json!({ "cases": cases, "max_ratio": Real(worst) }),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let mut dev = 0.0f64;
    for _ in 0..cases {
        let (frame, _) = random_case(&mut rng, 20);
        let m = margins(&rank_one_matrix(&frame), &frame).expect("dims");
        dev = dev.max((m.lower_margin - 1.0).abs()).max((m.upper_margin - 1.0).abs());
    }
    out.push(assertion("core", "rank_one_unit_margins", dev <= 1e-14, json!({ "max_deviation": Real(dev) })));
    out
}

fn expansion_for(op: &GalleryOperator, seed: u64) -> Result<(Vec<(f64, f64)>, ExpansionReport), Failure> {
    let sd = build_spectral_data(op)?;
    let radius = expansion_radius(sd.lambda0(), sd.gap);
    let pairs = expansion_pairs(sd.lambda0(), radius, 3, seed);
    let report = check_finite_expansion(op, &pairs, &[1, 2, 5])?;
    Ok((pairs, report))
}

fn resolvent_identity_suite(seed: u64) -> Result<Vec<Assertion>, Failure> {
    let ops = default_gallery()?;
    ops.par_iter()
        .enumerate()
        .map(|(k, op)| {
            let (pairs, report) = expansion_for(op, seed.wrapping_add(k as u64))?;
            let identity = pairs
                .iter()
                .map(|&(mu, mu0)| resolvent_identity_residual(&op.matrix, mu, mu0))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(assertion(
                "resolvent-identity",
                format!("expansion/{}", op.name),
                report.passed && identity <= report.tolerance,
                json!({
                    "pairs": pairs.iter().map(|&(a, b)| [Real(a), Real(b)]).collect::<Vec<_>>(),
                    "orders": [1, 2, 5],
                    "max_residual": Real(report.max_residual),
                    "identity_residual": Real(identity),
                    "tolerance": Real(report.tolerance),
                }),
            ))
        })
        .collect()
}

fn one_sided_detail(r: &OneSidedReport) -> Value {
    json!({
        "direction": r.direction.as_str(),
        "mode": r.mode.as_str(),
        "mu0": Real(r.mu0),
        "hypothesis_margin": Real(r.hypothesis_margin),
        "powers_at_mu0": r.powers_at_mu0.iter().map(|p| json!({
            "power": p.power, "margin": Real(p.margin), "limit": Real(p.limit), "satisfied": p.satisfied
        })).collect::<Vec<_>>(),
        "entries": r.entries.iter().map(|e| json!({
            "mu": Real(e.mu), "margin": Real(e.margin), "limit": Real(e.limit), "satisfied": e.satisfied
        })).collect::<Vec<_>>(),
        "label": r.label,
        "passed": r.passed,
    })
}

fn two_sided_detail(r: &TwoSidedReport) -> Value {
    json!({
        "mu0": Real(r.mu0),
        "c_hat0": Real(r.c_hat0),
        "embedding": Real(r.embedding),
        "max_ratio": Real(r.max_ratio),
        "entries": r.entries.iter().map(|e| json!({
            "mu": Real(e.mu), "power": e.power, "c_hat": Real(e.c_hat), "bound": Real(e.bound)
        })).collect::<Vec<_>>(),
    })
}

fn extension_suite(th: &Thresholds) -> Result<Vec<Assertion>, Failure> {
    let mut out = Vec::new();
    let neumann = build_interval_laplacian(BoundaryCondition::Neumann, 200)?;
    let neumann_sd = build_spectral_data(&neumann)?;
    let odd = build_odd_order(1, 127)?;
    let odd_sd = build_spectral_data(&odd)?;

    let r = check_two_sided_extension(&neumann, 1.0, &[-0.3, 0.5, 2.0], 3)?;
    out.push(assertion("extension", "two_sided/neumann", r.passed, two_sided_detail(&r)));
    let r = check_two_sided_extension(&odd, 1.0, &[-1.0], 3)?;
    let finite = r.entries.iter().all(|e| e.c_hat.is_finite());
    out.push(assertion("extension", "two_sided/odd_order", r.passed && finite, two_sided_detail(&r)));

    let r = check_one_sided_extension(&neumann, &neumann_sd, 1.0, Direction::RightUpper, &[2.0, 5.0], ExtensionMode::Directed)?;
    out.push(assertion("extension", "one_sided/neumann/right_upper", r.passed == Some(true), one_sided_detail(&r)));

    let r = evlab_core::numerics::resolvent(&neumann.matrix, -0.25)?;
    let mut power = r.clone();
    let mut uppers = Vec::new();
    for k in 1..=4u32 {
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        uppers.push(margins(&power.scaled(sign), &neumann.frame)?.upper_margin);
        power = power.matmul(&r);
    }
    out.push(assertion(
        "extension",
        "alternating_powers/neumann",
        uppers.iter().all(|&m| m < 0.0),
        json!({ "mu": Real(-0.25), "signed_upper_margins": reals(&uppers) }),
    ));

    let r = check_one_sided_extension(&neumann, &neumann_sd, -1.0, Direction::LeftLower, &[], ExtensionMode::Directed)?;
    out.push(assertion("extension", "one_sided/empty", r.passed == Some(true), one_sided_detail(&r)));

    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann, BoundaryCondition::Periodic] {
        let op = build_interval_laplacian(bc, 200)?;
        let sd = build_spectral_data(&op)?;
        let mu0 = sd.lambda0() + 1.0;
        let list = [sd.lambda0() + 0.5, sd.lambda0() + 2.0, sd.lambda0() + 5.0];
        let r = check_one_sided_extension(&op, &sd, mu0, Direction::RightUpper, &list, ExtensionMode::DirectionFree)?;
        out.push(assertion("extension", format!("direction_free/{}", op.name), r.passed == Some(true), one_sided_detail(&r)));
    }

    let spec = OperatorSpec::Interval(BoundaryCondition::Neumann);
    let r = check_one_sided_extension_refined(
        &spec,
        &REFINEMENT_MESHES,
        1.0,
        Direction::RightUpper,
        &[2.0, 5.0],
        ExtensionMode::Directed,
        th,
    )?;
    out.push(assertion(
        "extension",
        "one_sided_refined/neumann",
        r.passed == Some(true),
        json!({
            "meshes": r.meshes.iter().map(|(n, m)| json!({ "n": n, "max_limit": Real(m.max_limit), "passed": m.passed })).collect::<Vec<_>>(),
            "growth": reals(&r.growth),
            "verdict": r.verdict.as_str(),
        }),
    ));

    let delay = build_delay_operator(PI / 16.0, 64)?;
    let delay_sd = build_spectral_data(&delay)?;
    let r = check_one_sided_extension(&delay, &delay_sd, 1.0, Direction::RightUpper, &[0.5, 2.0], ExtensionMode::Exploratory)?;
    let mut detail = one_sided_detail(&r);
    detail["asserted"] = json!(false);
    out.push(assertion("extension", "exploratory/delay", true, detail));
    let r = check_one_sided_extension(&odd, &odd_sd, 1.0, Direction::LeftLower, &[0.5, 2.0], ExtensionMode::Exploratory)?;
    let mut detail = one_sided_detail(&r);
    detail["asserted"] = json!(false);
    out.push(assertion("extension", "exploratory/odd_order", true, detail));
    Ok(out)
}

/// `c(μ_k)` along `λ₀ ± 2^{-k}` for the operators whose decay is checked.
pub fn projection_cases() -> Result<Vec<GalleryOperator>, Failure> {
    Ok(vec![
        build_interval_laplacian(BoundaryCondition::Neumann, 200)?,
        build_odd_order(1, 127)?,
        build_delay_operator(PI / 16.0, 64)?,
    ])
}

pub fn projection_report(op: &GalleryOperator, sign: f64) -> Result<ProjectionReport, Failure> {
    let sd = build_spectral_data(op)?;
    let mus = geometric_sequence(sd.lambda0(), sign, 8);
    Ok(check_projection_convergence(op, &sd, op.power(), &mus)?)
}

fn projection_detail(r: &ProjectionReport) -> Value {
    json!({
        "m": r.m,
        "values": r.values.iter().map(|&(mu, c)| [Real(mu), Real(c)]).collect::<Vec<_>>(),
        "eventually_decreasing": r.eventually_decreasing,
        "final_ratio": Real(r.final_ratio),
    })
}

fn projection_suite() -> Result<Vec<Assertion>, Failure> {
    let mut out = Vec::new();
    for op in projection_cases()? {
        for (sign, side) in [(1.0, "right"), (-1.0, "left")] {
            let r = projection_report(&op, sign)?;
            out.push(assertion("projection", format!("{}/{side}", op.name), r.passed, projection_detail(&r)));
        }
    }
    let frame = RankOneFrame::unit(vec![1.0; 2])?;
    let diag = GalleryOperator::custom("diag(0,-4)", DenseMatrix::diagonal(&[0.0, -4.0]), frame, 0.0, 1, 0)?;
    let sd = build_spectral_data(&diag)?;
    let r = check_projection_convergence(&diag, &sd, 1, &geometric_sequence(0.0, 1.0, 8))?;
    let exact = r.values.iter().map(|&(mu, c)| (c - (mu / (mu + 4.0)).abs()).abs()).fold(0.0, f64::max);
    out.push(assertion("projection", "diag(0,-4)/closed_form", exact <= 1e-12 && r.passed, {
        let mut d = projection_detail(&r);
        d["closed_form_error"] = json!(Real(exact));
        d
    }));
    Ok(out)
}

fn powers_detail(r: &PowersReport, expected: Verdict) -> Value {
    json!({
        "m": r.m,
        "assumption_holds": r.assumption_holds,
        "right_width": Real(r.right_width),
        "left_width": Real(r.left_width),
        "verdict": r.verdict.as_str(),
        "expected": expected.as_str(),
    })
}

/// The gallery projections are strictly positive, so every operator is
/// expected to show both windows for `R(μ)^m`; `diag(0, −4)` violates the
/// assumption and must not.
fn powers_suite(th: &Thresholds) -> Result<Vec<Assertion>, Failure> {
    let ops = default_gallery()?;
    let mut out = ops
        .par_iter()
        .map(|op| {
            let sd = build_spectral_data(op)?;
            let r = check_powers_theorem(op, &sd, th)?;
            let passed = r.assumption_holds && r.verdict == Verdict::Holds;
            Ok(assertion("powers", op.name.clone(), passed, powers_detail(&r, Verdict::Holds)))
        })
        .collect::<Result<Vec<_>, Failure>>()?;
    let frame = RankOneFrame::unit(vec![1.0; 2])?;
    let diag = GalleryOperator::custom("diag(0,-4)", DenseMatrix::diagonal(&[0.0, -4.0]), frame, 0.0, 1, 0)?;
    let sd = build_spectral_data(&diag)?;
    let r = check_powers_theorem(&diag, &sd, th)?;
    let passed = !r.assumption_holds && r.verdict == Verdict::Fails;
    out.push(assertion("powers", "diag(0,-4)", passed, powers_detail(&r, Verdict::Fails)));
    Ok(out)
}

/// The three reference characterizations with their expected conditions.
pub fn characterization_cases() -> [(OperatorSpec, f64, bool); 3] {
    [
        (OperatorSpec::Interval(BoundaryCondition::Neumann), 1.0, true),
        (OperatorSpec::Thermostat { beta: 0.2 }, 0.0, true),
        (OperatorSpec::Interval(BoundaryCondition::Dirichlet), 0.0, false),
    ]
}

pub fn characterization_detail(r: &CharacterizationReport) -> Value {
    json!({
        "n": r.n,
        "mu1": Real(r.mu1),
        "lambda0": Real(r.lambda0),
        "precondition_ratio": Real(r.precondition_ratio),
        "conditions": r.conditions(),
        "left_width": Real(r.left_width),
        "negative_point": r.negative_point.map(Real),
        "refinement_verdict": r.refinement.verdict.as_str(),
        "c_hat_growth": reals(&r.refinement.c_hat_growth),
        "consistent": r.consistent,
    })
}

fn characterization_suite(th: &Thresholds) -> Result<Vec<Assertion>, Failure> {
    characterization_cases()
        .par_iter()
        .map(|(spec, mu1, expected)| {
            let r = check_antimax_characterization(spec, 200, *mu1, &REFINEMENT_MESHES, th)?;
            let passed = r.consistent && r.conditions() == [*expected; 3];
            Ok(assertion("characterization", spec.name(), passed, characterization_detail(&r)))
        })
        .collect()
}

pub fn group_t_grid() -> Vec<f64> {
    let steps = (GROUP_T_MAX / GROUP_T_STEP).round() as usize;
    (1..=steps).map(|k| k as f64 * GROUP_T_STEP).collect()
}

/// Nonnegative bump with a seeded centre on the 127-point circle grid.
pub fn seeded_bump(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    periodic_bump(n, rng.random::<f64>(), 8)
}

fn group_positivity_suite(seed: u64) -> Result<Vec<Assertion>, Failure> {
    let n = 127;
    let f = seeded_bump(seed, n);
    let grid = group_t_grid();
    [0u32, 1, 2]
        .par_iter()
        .map(|&ell| {
            let r = check_group_not_eventually_positive(ell, &grid, &f, GROUP_THRESHOLD)?;
            let passed = if ell == 0 {
                r.witness.is_none() && r.cyclic.is_none()
            } else {
                r.witness.is_some_and(|t| t <= GROUP_T_MAX) && r.most_negative < -GROUP_THRESHOLD && r.cyclic == Some(false)
            };
            Ok(assertion(
                "group-positivity",
                format!("ell={ell}"),
                passed,
                json!({
                    "n": r.n,
                    "witness": r.witness.map(Real),
                    "most_negative": Real(r.most_negative),
                    "most_negative_t": Real(r.most_negative_t),
                    "cyclic": r.cyclic,
                    "threshold": Real(r.threshold),
                }),
            ))
        })
        .collect()
}
