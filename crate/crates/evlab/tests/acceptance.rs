//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use evlab::commands::default_scan_range;
use evlab::report::strip_timing;
use evlab::suites::{
    characterization_cases, group_t_grid, norm_identity_defect, projection_cases, projection_report, seeded_bump,
    GROUP_THRESHOLD, GROUP_T_MAX,
};
use evlab_core::gallery::{
    build_delay_operator, build_graph_laplacian, build_interval_laplacian, build_odd_order, build_thermostat,
    default_gallery, three_star, BoundaryCondition, GalleryOperator, OperatorSpec,
};
use evlab_core::lattice::margins;
use evlab_core::numerics::{eigenpair_near, resolvent};
use evlab_core::oracles::{
    delay_left_eigenvector_study, dirichlet_convergence, periodic_first_order_error, thermostat_convergence,
};
use evlab_core::principles::*;

type Outcome = Result<(bool, Vec<String>), String>;

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn scan_op(op: &GalleryOperator, lo: f64, hi: f64, steps: usize, th: Thresholds) -> Result<ScanReport, String> {
    let sd = build_spectral_data(op).map_err(e)?;
    scan_with(op, &sd, lo, hi, steps, th).map_err(e)
}

fn scan_default(op: &GalleryOperator) -> Result<ScanReport, String> {
    let sd = build_spectral_data(op).map_err(e)?;
    let (lo, hi) = default_scan_range(op, &sd);
    scan_with(op, &sd, lo, hi, 81, Thresholds::default()).map_err(e)
}

fn classified(r: &ScanReport) -> usize {
    r.records.iter().filter(|x| !x.classification.is_skipped()).count()
}

fn c1() -> Outcome {
    let t = Instant::now();
    let defect = norm_identity_defect(42, 100);
    let dt = t.elapsed();
    Ok((
        defect <= 1e-12 && dt < Duration::from_secs(1),
        vec![format!("100 pairs, max relative defect {defect:.3e} (<= 1e-12), {:.3} s (< 1 s)", dt.as_secs_f64())],
    ))
}

fn c2() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for (k, op) in default_gallery().map_err(e)?.iter().enumerate() {
        let sd = build_spectral_data(op).map_err(e)?;
        let radius = expansion_radius(sd.lambda0(), sd.gap);
        let pairs = expansion_pairs(sd.lambda0(), radius, 3, 42 + k as u64);
        let r = check_finite_expansion(op, &pairs, &[1, 2, 5]).map_err(e)?;
        ok &= r.max_residual <= 1e-8;
        lines.push(format!("{:<20} max residual {:.3e}", op.name, r.max_residual));
    }
    let dt = t.elapsed();
    ok &= dt < Duration::from_secs(10);
    lines.push(format!("runtime {:.2} s (< 10 s)", dt.as_secs_f64()));
    Ok((ok, lines))
}

fn c3() -> Outcome {
    let op = build_interval_laplacian(BoundaryCondition::Dirichlet, 200).map_err(e)?;
    let pair = eigenpair_near(&op.matrix, -PI * PI).map_err(e)?;
    let v = pair.right_vector.as_slice();
    let s = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let positive = v.iter().all(|&x| s * x > 0.0);
    let target = -PI * PI;
    let in_range = (pair.value - target).abs() <= 0.02;
    Ok((
        in_range && positive,
        vec![format!("lambda0 = {:.8} (target {target:.8} +- 0.02), eigenvector positive: {positive}", pair.value)],
    ))
}

fn c4() -> Outcome {
    let th = Thresholds::default();
    let mut ok = true;
    let mut lines = Vec::new();
    let mut total = 0;
    for bc in [BoundaryCondition::Neumann, BoundaryCondition::Periodic] {
        let op = build_interval_laplacian(bc, 200).map_err(e)?;
        let r = scan_op(&op, -0.5, -0.01, 50, th)?;
        let n = classified(&r);
        let neg = r.count(Classification::StrongNegative);
        total += n;
        ok &= neg == n;
        lines.push(format!(
            "{} scan: {neg}/{n} classified points strong_negative, {} skipped (proximity radius {:.3})",
            op.name,
            r.count(Classification::SkippedNearSpectrum),
            r.proximity_radius
        ));
        if n == 0 {
            let free = Thresholds { proximity_fraction: 1e-12, ..th };
            let r = scan_op(&op, -0.5, -0.01, 50, free)?;
            let neg = r.count(Classification::StrongNegative);
            ok &= neg == r.records.len();
            lines.push(format!(
                "{} scan is vacuous under the proximity rule; with the exclusion disabled {neg}/{} points strong_negative",
                op.name,
                r.records.len()
            ));
        }
        let study = refinement_study(&OperatorSpec::Interval(bc), -0.25, &[50, 100, 200, 400], &th).map_err(e)?;
        let drift = study.tracked_ratio.unwrap_or(f64::NAN);
        let stable = (0.8..=1.2).contains(&drift);
        ok &= study.verdict == RefinementVerdict::Uniform && stable;
        lines.push(format!(
            "{} refinement at -0.25: {} ({} margin ratio {drift:.6}, band [0.8, 1.2])",
            op.name,
            study.verdict.as_str(),
            study.tracked.as_str()
        ));
    }
    ok &= total > 0;
    Ok((ok, lines))
}

fn c5() -> Outcome {
    let th = Thresholds::default();
    let study = refinement_study(&OperatorSpec::Interval(BoundaryCondition::Dirichlet), 0.0, &[50, 100, 200, 400], &th)
        .map_err(e)?;
    let growth_ok = study.c_hat_growth.len() == 3 && study.c_hat_growth.iter().all(|&g| g >= 1.4);
    let op = build_interval_laplacian(BoundaryCondition::Dirichlet, 200).map_err(e)?;
    let r = scan_op(&op, -15.0, -PI * PI - 0.05, 81, th)?;
    let neg = r.count(Classification::StrongNegative);
    Ok((
        study.verdict == RefinementVerdict::Divergent && growth_ok && neg == 0,
        vec![
            format!(
                "refinement at 0: {}, c_hat growth {:?}",
                study.verdict.as_str(),
                study.c_hat_growth.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>()
            ),
            format!("scan [-15, -pi^2-0.05]: {neg} strong_negative of {} classified", classified(&r)),
        ],
    ))
}

fn c6() -> Outcome {
    let ns = [50, 100, 200];
    let d = dirichlet_convergence(&ns).map_err(e)?;
    let t = thermostat_convergence(0.2, &ns).map_err(e)?;
    let p = periodic_first_order_error(127, 1.0).map_err(e)?;
    Ok((
        d.observed_order() >= 1.7 && t.observed_order() >= 1.7 && p.error <= 1e-6,
        vec![
            format!("dirichlet_green order {:.4} (>= 1.7)", d.observed_order()),
            format!("thermostat order {:.4} (>= 1.7)", t.observed_order()),
            format!("periodic_first_order n = 127, mu = 1: sup error {:.3e} (<= 1e-6)", p.error),
        ],
    ))
}

fn c7() -> Outcome {
    let mut lowers = Vec::new();
    for n in [100, 200, 400] {
        let op = build_thermostat(0.2, n).map_err(e)?;
        let m = margins(&resolvent(&op.matrix, 0.0).map_err(e)?, &op.frame).map_err(e)?;
        lowers.push(m.lower_margin);
    }
    let positive = lowers.iter().all(|&x| x > 0.0);
    let stable = lowers.iter().all(|&x| (0.8..=1.2).contains(&(x / lowers[0])));
    let op = build_thermostat(0.2, 200).map_err(e)?;
    let r = scan_default(&op)?;
    Ok((
        positive && stable && r.left_width > 0.0,
        vec![
            format!("lower margins of R(0) at n = 100, 200, 400: {lowers:?} (positive, within +-20%)"),
            format!("spb = {:.6}, strong_negative window [{:.6}, {:.6})", r.lambda0, r.lambda0 - r.left_width, r.lambda0),
        ],
    ))
}

fn c8() -> Outcome {
    let th = Thresholds::default();
    let op = build_graph_laplacian(&three_star(), 40).map_err(e)?;
    let defect = sup_abs(&op.matrix.mul_vec(&vec![1.0; op.dim()]));
    let sd = build_spectral_data(&op).map_err(e)?;
    let r = scan_default(&op)?;
    let spec = op.spec.clone();
    let meshes = [10, 20, 40]
        .iter()
        .map(|&n| mesh_record(&spec, n, -0.05))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    let uppers: Vec<f64> = meshes.iter().map(|m| m.margins.upper_margin).collect();
    let stable = uppers.iter().all(|&x| x < 0.0 && (th.uniform_low..=th.uniform_high).contains(&(x / uppers[0])));
    Ok((
        defect <= 1e-10 && sd.lambda0().abs() <= 1e-10 && sd.simple && r.left_width > 0.0 && stable,
        vec![
            format!("|A1| = {defect:.3e}, lambda0 = {:.3e}, simple {}, gap {:.4}", sd.lambda0(), sd.simple, sd.gap),
            format!("antimax window [{:.4}, 0)", -r.left_width),
            format!("upper margins of R(-0.05) at 10, 20, 40 per unit: {uppers:?}"),
        ],
    ))
}

fn c9() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for ell in [1, 2] {
        let op = build_odd_order(ell, 127).map_err(e)?;
        let r = scan_default(&op)?;
        ok &= r.right_width > 0.0 && r.left_width > 0.0;
        lines.push(format!("ell = {ell}: right width {:.4}, left width {:.4}", r.right_width, r.left_width));
    }
    let op = build_odd_order(0, 127).map_err(e)?;
    let mut classes = Vec::new();
    for (mu, want) in [
        (0.1, Classification::StrongPositive),
        (1.0, Classification::StrongPositive),
        (5.0, Classification::StrongPositive),
        (20.0, Classification::StrongPositive),
        (-0.1, Classification::StrongNegative),
        (-1.0, Classification::StrongNegative),
        (-5.0, Classification::StrongNegative),
    ] {
        let m = margins(&resolvent(&op.matrix, mu).map_err(e)?, &op.frame).map_err(e)?;
        let c = classify(&m, Thresholds::default().eps_cls);
        ok &= c == want;
        classes.push(format!(
            "{mu}: {} (lower {:.3e}, upper {:.3e})",
            c.as_str(),
            m.lower_margin / m.two_sided_constant,
            m.upper_margin / m.two_sided_constant
        ));
    }
    lines.push("ell = 0, margins relative to c_hat:".to_string());
    lines.extend(classes.into_iter().map(|c| format!("  mu = {c}")));
    Ok((ok, lines))
}

fn c10() -> Outcome {
    let grid = group_t_grid();
    let f = seeded_bump(42, 127);
    let one = check_group_not_eventually_positive(1, &grid, &f, GROUP_THRESHOLD).map_err(e)?;
    let two = check_group_not_eventually_positive(2, &grid, &f, GROUP_THRESHOLD).map_err(e)?;
    let zero = check_group_not_eventually_positive(0, &grid, &f, GROUP_THRESHOLD).map_err(e)?;
    let ok = one.witness.is_some_and(|t| t <= GROUP_T_MAX)
        && one.most_negative < -GROUP_THRESHOLD
        && zero.witness.is_none()
        && one.cyclic == Some(false)
        && two.cyclic == Some(false)
        && zero.cyclic.is_none();
    Ok((
        ok,
        vec![
            format!(
                "ell = 1: witness t = {:?}, most negative {:.3e} at t = {}, cyclic {:?}",
                one.witness, one.most_negative, one.most_negative_t, one.cyclic
            ),
            format!("ell = 2: cyclic {:?}", two.cyclic),
            format!("ell = 0: witness {:?}, cyclic {:?}", zero.witness, zero.cyclic),
        ],
    ))
}

fn c11() -> Outcome {
    let c = PI / 16.0;
    let op = build_delay_operator(c, 64).map_err(e)?;
    let defect = sup_abs(&op.matrix.mul_vec(&vec![1.0; op.dim()]));
    let study = delay_left_eigenvector_study(c, &[32, 64, 128, 256]).map_err(e)?;
    let order = study.observed_order();
    let r = scan_default(&op)?;
    let errors: Vec<String> = study.points.iter().map(|p| format!("n={}: {:.3e}", p.n, p.error)).collect();
    Ok((
        defect == 0.0 && order >= 1.7 && r.right_width > 0.0 && r.left_width > 0.0,
        vec![
            format!("|A1| = {defect:e}"),
            format!("left eigenvector l1 error {}; observed order {order:.4} (need >= 1.7)", errors.join(", ")),
            format!("windows: right width {:.4}, left width {:.4}", r.right_width, r.left_width),
        ],
    ))
}

fn c12() -> Outcome {
    let th = Thresholds::default();
    let mut ok = true;
    let mut lines = Vec::new();
    for (spec, mu1, expected) in characterization_cases() {
        let r = check_antimax_characterization(&spec, 200, mu1, &[50, 100, 200, 400], &th).map_err(e)?;
        let conds = r.conditions();
        let mut good = r.consistent && conds == [expected; 3];
        if !expected {
            good &= r.refinement.verdict == RefinementVerdict::Divergent;
        }
        ok &= good;
        lines.push(format!(
            "{}: conditions {conds:?}, refinement {}, consistent {}",
            r.operator,
            r.refinement.verdict.as_str(),
            r.consistent
        ));
    }
    Ok((ok, lines))
}

fn c13() -> Outcome {
    let mut ok = true;
    let mut lines = Vec::new();
    for op in projection_cases().map_err(e)? {
        for sign in [1.0, -1.0] {
            let r = projection_report(&op, sign).map_err(e)?;
            ok &= r.passed;
            lines.push(format!(
                "{} {}: m = {}, eventually decreasing {}, final/initial {:.3e}",
                op.name,
                if sign > 0.0 { "right" } else { "left" },
                r.m,
                r.eventually_decreasing,
                r.final_ratio
            ));
        }
    }
    Ok((ok, lines))
}

fn c14() -> Outcome {
    let run = || -> Result<(Option<i32>, String), String> {
        let out = Command::new(env!("CARGO_BIN_EXE_evlab"))
            .args(["check", "--suite", "all", "--seed", "42", "--json"])
            .output()
            .map_err(e)?;
        Ok((out.status.code(), String::from_utf8(out.stdout).map_err(e)?))
    };
    let (code_a, a) = run()?;
    let (code_b, b) = run()?;
    let same = !a.is_empty() && strip_timing(&a) == strip_timing(&b);
    Ok((
        same,
        vec![format!("two runs, exit codes {code_a:?}/{code_b:?}, identical modulo timing: {same}")],
    ))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 14] = [
        (1, "norm identity", c1),
        (2, "finite resolvent expansion", c2),
        (3, "dirichlet spectral bound", c3),
        (4, "neumann and periodic anti-maximum", c4),
        (5, "dirichlet non-uniformity", c5),
        (6, "oracle convergence", c6),
        (7, "thermostat", c7),
        (8, "three-star graph", c8),
        (9, "odd-order operators", c9),
        (10, "group not eventually positive", c10),
        (11, "delay operator", c11),
        (12, "anti-maximum characterization", c12),
        (13, "projection decay", c13),
        (14, "determinism", c14),
    ];
    let mut failed = Vec::new();
    for (k, name, f) in criteria {
        let t = Instant::now();
        let (pass, lines) = match f() {
            Ok(x) => x,
            Err(msg) => (false, vec![format!("error: {msg}")]),
        };
        println!("criterion {k}: {} {name} ({:.2} s)", if pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64());
        for l in lines {
            println!("    {l}");
        }
        if !pass {
            failed.push(k);
        }
    }
    if failed.is_empty() {
        println!("all 14 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
