use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use evlab_core::gallery::{default_gallery, GalleryOperator, OperatorSpec, Verdict};
use evlab_core::oracles::{
    constant_identity_error, delay_left_eigenvector_study, dirichlet_convergence, periodic_first_order_error,
    thermostat_convergence, ConvergenceStudy,
};
use evlab_core::principles::{
    assemble_study, build_spectral_data, classify, mesh_record, mu_grid, normalize_n_list, Classification,
    MeshRecord, RefinementStudy, RefinementVerdict, ScanContext, ScanReport, SpectralData, TrackedMargin,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cli::{CheckArgs, GalleryArgs, OracleArgs, RefineArgs, ScanArgs};
use crate::config::{require_finite, RunConfig};
use crate::output::{csv_path, records_csv, write_atomic};
use crate::report::{reals, MuRecord, OperatorInfo, ReportDocument, Real, VerdictEntry, Windows};
use crate::suites;
use crate::{Failure, EXIT_MISMATCH, EXIT_OK};

pub const DEFAULT_SCAN_STEPS: usize = 81;
pub const ORDER_SLACK: f64 = 0.3;
pub const PERIODIC_ORACLE_TOLERANCE: f64 = 1e-6;
pub const CONSTANT_ORACLE_TOLERANCE: f64 = 1e-8;

const CONSTANT_OPERATORS: [&str; 5] = ["neumann", "periodic", "graph", "odd_order", "delay"];

fn emit(mut doc: ReportDocument, cfg: &RunConfig, start: Instant, summary: String, code: u8) -> Result<u8, Failure> {
    doc.timing.elapsed_ms = Real(start.elapsed().as_secs_f64() * 1e3);
    let text = doc.to_json()?;
    if let Some(path) = &cfg.out {
        if !doc.records.is_empty() {
            write_atomic(&csv_path(path), &records_csv(&doc.records)?)?;
        }
        write_atomic(path, text.as_bytes())?;
    }
    if cfg.json {
        print!("{text}");
    } else {
        print!("{summary}");
    }
    Ok(code)
}

fn operator_info(op: &GalleryOperator, n: usize, sd: Option<&SpectralData>) -> OperatorInfo {
    OperatorInfo {
        name: op.name.clone(),
        grid: op.grid.kind.as_str().to_string(),
        n,
        dim: op.dim(),
        lambda0: Real(sd.map_or(op.lambda0, |s| s.lambda0())),
        gap: sd.map(|s| Real(s.gap)),
        m1: op.continuum_m1,
        m2: op.continuum_m2,
        predicted_max: op.predicted.uniform_max.as_str().to_string(),
        predicted_antimax: op.predicted.uniform_antimax.as_str().to_string(),
        notes: op.predicted.notes.clone(),
    }
}

/// A disagreement counts only when both sides are definite.
pub fn consistent(computed: Verdict, predicted: Verdict) -> bool {
    computed == Verdict::Untested || predicted == Verdict::Untested || computed == predicted
}

fn verdict_entry(subject: &str, computed: Verdict, predicted: Verdict, note: String) -> VerdictEntry {
    VerdictEntry {
        subject: subject.to_string(),
        computed: computed.as_str().to_string(),
        predicted: (predicted != Verdict::Untested).then(|| predicted.as_str().to_string()),
        consistent: consistent(computed, predicted),
        note,
    }
}

// ---------------------------------------------------------------------------
// gallery

pub fn gallery(args: &GalleryArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    let cfg = RunConfig::new("gallery", &args.output);
    let ops = default_gallery()?;
    let mut doc = ReportDocument::new(cfg.echo());
    let mut rows = Vec::new();
    let mut text = String::new();
    let _ = writeln!(text, "{:<20} {:<13} {:>5} {:>12}  {:<14} {:<18} source", "operator", "grid", "n", "lambda0", "max", "antimax");
    for op in &ops {
        let p = &op.predicted;
        let source = p.citations.join("; ");
        let params: BTreeMap<&str, Real> = op.params.iter().map(|(k, v)| (k.as_str(), Real(*v))).collect();
        rows.push(json!({
            "name": op.name,
            "grid": op.grid.kind.as_str(),
            "n": op.grid.n,
            "dim": op.dim(),
            "params": params,
            "lambda0": Real(op.lambda0),
            "m1": op.continuum_m1,
            "m2": op.continuum_m2,
            "predicted_max": p.uniform_max.as_str(),
            "predicted_antimax": p.uniform_antimax.as_str(),
            "notes": p.notes,
            "citations": p.citations,
        }));
        let _ = writeln!(
            text,
            "{:<20} {:<13} {:>5} {:>12.6}  {:<14} {:<18} {}",
            op.name,
            op.grid.kind.as_str(),
            op.grid.n,
            op.lambda0,
            format!("max {}", p.uniform_max),
            format!("antimax {}", p.uniform_antimax),
            source
        );
        for c in &p.citations {
            if !doc.citations.contains(c) {
                doc.citations.push(c.clone());
            }
        }
    }
    doc.details = json!({ "operators": rows });
    emit(doc, &cfg, start, text, EXIT_OK)
}

// ---------------------------------------------------------------------------
// scan

/// `λ₀ ± gap/4`. Without a finite gap the half-width is `1 + |λ₀|`, widened
/// past `10⁴·ε·‖A‖_∞` where the LU singularity signal covers the neighbourhood.
pub fn default_scan_range(op: &GalleryOperator, sd: &SpectralData) -> (f64, f64) {
    let l = sd.lambda0();
    let half = if sd.gap.is_finite() {
        sd.gap / 4.0
    } else {
        (1.0 + l.abs()).max(1e4 * f64::EPSILON * op.matrix.inf_norm())
    };
    (l - half, l + half)
}

pub fn mu_records(report: &ScanReport) -> Vec<MuRecord> {
    report
        .records
        .iter()
        .map(|r| MuRecord {
            mu: Real(r.mu),
            sigma_min: Real(r.sigma_min),
            lower_margin: r.margins.map(|m| Real(m.lower_margin)),
            upper_margin: r.margins.map(|m| Real(m.upper_margin)),
            c_hat: r.margins.map(|m| Real(m.two_sided_constant)),
            classification: r.classification.as_str().to_string(),
        })
        .collect()
}

pub fn scan(args: &ScanArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    let mut cfg = RunConfig::new("scan", &args.output)
        .with_operator(&args.operator, true)?
        .with_thresholds(&args.thresholds)?;
    let n = args.n.unwrap_or_else(|| cfg.spec().default_n());
    let mu_min = require_finite("mu-min", args.mu_min)?;
    let mu_max = require_finite("mu-max", args.mu_max)?;
    let steps = args.steps.unwrap_or(DEFAULT_SCAN_STEPS);
    if steps < 2 {
        return Err(Failure::Usage("--steps must be at least 2".into()));
    }
    let op = cfg.spec().build(n)?;
    let sd = build_spectral_data(&op)?;
    let (lo, hi) = default_scan_range(&op, &sd);
    let (mu_min, mu_max) = (mu_min.unwrap_or(lo), mu_max.unwrap_or(hi));
    let grid = mu_grid(mu_min, mu_max, steps)?;
    cfg.n = Some(n);
    cfg.mu_min = Some(mu_min);
    cfg.mu_max = Some(mu_max);
    cfg.steps = Some(steps);

    let ctx = ScanContext::new(&op, &sd, cfg.thresholds);
    let points = grid.par_iter().map(|&mu| ctx.evaluate(mu)).collect();
    let report = ctx.assemble(points);

    let mut doc = ReportDocument::new(cfg.echo());
    doc.operator = Some(operator_info(&op, n, Some(&sd)));
    doc.records = mu_records(&report);
    let (r0, r1) = report.right_window();
    let (l0, l1) = report.left_window();
    doc.windows = Some(Windows { right: [Real(r0), Real(r1)], left: [Real(l0), Real(l1)] });
    let p = &op.predicted;
    doc.verdicts.push(verdict_entry(
        "max",
        report.max_verdict(),
        p.uniform_max,
        format!("strong_positive window of width {:e} right of lambda0", report.right_width),
    ));
    doc.verdicts.push(verdict_entry(
        "antimax",
        report.antimax_verdict(),
        p.uniform_antimax,
        format!("strong_negative window of width {:e} left of lambda0", report.left_width),
    ));
    doc.citations = p.citations.clone();
    let counts: BTreeMap<&str, usize> = [
        Classification::StrongPositive,
        Classification::StrongNegative,
        Classification::Mixed,
        Classification::SkippedNearSpectrum,
    ]
    .iter()
    .map(|&c| (c.as_str(), report.count(c)))
    .collect();
    doc.details = json!({
        "lambda0": Real(report.lambda0),
        "gap": Real(report.gap),
        "proximity_radius": Real(report.proximity_radius),
        "right_width": Real(report.right_width),
        "left_width": Real(report.left_width),
        "simple": sd.simple,
        "counts": counts,
    });
    let ok = doc.all_consistent();
    doc.status = if ok { "consistent" } else { "mismatch" }.to_string();

    let mut text = String::new();
    let _ = writeln!(text, "{} (n = {n}, dim = {}): lambda0 = {:.10}, gap = {:.6e}", op.name, op.dim(), report.lambda0, report.gap);
    let _ = writeln!(text, "scanned {steps} points on [{mu_min}, {mu_max}]");
    for (k, v) in &counts {
        let _ = writeln!(text, "  {k:<22} {v}");
    }
    let _ = writeln!(text, "right window [{r0:.6}, {r1:.6}]  left window [{l0:.6}, {l1:.6}]");
    for v in &doc.verdicts {
        let _ = writeln!(
            text,
            "{:<8} computed {:<9} predicted {:<9} {}",
            v.subject,
            v.computed,
            v.predicted.as_deref().unwrap_or("-"),
            if v.consistent { "ok" } else { "MISMATCH" }
        );
    }
    emit(doc, &cfg, start, text, if ok { EXIT_OK } else { EXIT_MISMATCH })
}

// ---------------------------------------------------------------------------
// refine

/// Evidence for the principle on the probe's side of `λ₀`: a sign-definite
/// tracked margin inside the uniform band holds, a wrong sign on the finest
/// mesh fails, anything else is untested.
pub fn refine_side_verdict(study: &RefinementStudy, right: bool, eps_cls: f64) -> Verdict {
    let (want, strong) = if right {
        (TrackedMargin::Lower, Classification::StrongPositive)
    } else {
        (TrackedMargin::Upper, Classification::StrongNegative)
    };
    let last = &study.meshes[study.meshes.len() - 1].margins;
    if study.verdict == RefinementVerdict::Uniform && study.tracked == want {
        Verdict::Holds
    } else if classify(last, eps_cls) != strong {
        Verdict::Fails
    } else {
        Verdict::Untested
    }
}

fn mesh_json(m: &MeshRecord) -> Value {
    json!({
        "n": m.n,
        "dim": m.dim,
        "h": Real(m.h),
        "lower_margin": Real(m.margins.lower_margin),
        "upper_margin": Real(m.margins.upper_margin),
        "c_hat": Real(m.margins.two_sided_constant),
    })
}

pub fn refine(args: &RefineArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    let mut cfg = RunConfig::new("refine", &args.output)
        .with_operator(&args.operator, true)?
        .with_thresholds(&args.thresholds)?;
    let probe = require_finite("probe-mu", args.probe_mu)?.ok_or_else(|| Failure::Usage("--probe-mu is required".into()))?;
    let spec = cfg.spec().clone();
    let ns = normalize_n_list(&args.n_list.clone().unwrap_or_else(|| spec.default_n_list()))?;
    if ns.contains(&0) {
        return Err(Failure::Usage("--n-list entries must be positive".into()));
    }
    cfg.n_list = Some(ns.clone());
    cfg.probe_mu = Some(probe);

    let meshes = ns.par_iter().map(|&n| mesh_record(&spec, n, probe)).collect::<Result<Vec<_>, _>>()?;
    let study = assemble_study(&spec, probe, meshes, &cfg.thresholds);
    let op = spec.build(ns[ns.len() - 1])?;
    let sd = build_spectral_data(&op)?;
    let right = probe > sd.lambda0();
    let side = refine_side_verdict(&study, right, cfg.thresholds.eps_cls);
    let p = &op.predicted;
    let (subject, predicted) = if right { ("max", p.uniform_max) } else { ("antimax", p.uniform_antimax) };

    let mut doc = ReportDocument::new(cfg.echo());
    doc.operator = Some(operator_info(&op, ns[ns.len() - 1], Some(&sd)));
    doc.verdicts.push(verdict_entry(
        subject,
        side,
        predicted,
        format!(
            "refinement verdict {} tracking the {} margin",
            study.verdict.as_str(),
            study.tracked.as_str()
        ),
    ));
    doc.citations = p.citations.clone();
    doc.details = json!({
        "verdict": study.verdict.as_str(),
        "probe_mu": Real(probe),
        "side": if right { "right" } else { "left" },
        "tracked": study.tracked.as_str(),
        "tracked_ratio": study.tracked_ratio.map(Real),
        "c_hat_growth": reals(&study.c_hat_growth),
        "c_hat_ratio": Real(study.c_hat_ratio()),
        "meshes": study.meshes.iter().map(mesh_json).collect::<Vec<_>>(),
    });
    let ok = doc.all_consistent();
    doc.status = if ok { "consistent" } else { "mismatch" }.to_string();

    let mut text = String::new();
    let _ = writeln!(text, "{} at mu = {probe}: verdict {}", study.operator, study.verdict.as_str());
    let _ = writeln!(text, "{:>6} {:>12} {:>16} {:>16} {:>14}", "n", "h", "lower", "upper", "c_hat");
    for m in &study.meshes {
        let r = &m.margins;
        let _ = writeln!(
            text,
            "{:>6} {:>12.4e} {:>16.8e} {:>16.8e} {:>14.6e}",
            m.n, m.h, r.lower_margin, r.upper_margin, r.two_sided_constant
        );
    }
    if let Some(r) = study.tracked_ratio {
        let _ = writeln!(text, "tracked {} margin ratio {r:.6}", study.tracked.as_str());
    }
    let v = &doc.verdicts[0];
    let _ = writeln!(
        text,
        "{} computed {} predicted {} {}",
        v.subject,
        v.computed,
        v.predicted.as_deref().unwrap_or("-"),
        if v.consistent { "ok" } else { "MISMATCH" }
    );
    emit(doc, &cfg, start, text, if ok { EXIT_OK } else { EXIT_MISMATCH })
}

// ---------------------------------------------------------------------------
// check

pub fn check(args: &CheckArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    let mut cfg = RunConfig::new("check", &args.output).with_thresholds(&args.thresholds)?;
    cfg.suite = Some(args.suite.clone());
    cfg.seed = Some(args.seed);
    let assertions = suites::run(&args.suite, args.seed, &cfg.thresholds)?;
    let failed = assertions.iter().filter(|a| !a.passed).count();

    let mut doc = ReportDocument::new(cfg.echo());
    doc.verdicts = assertions
        .iter()
        .map(|a| VerdictEntry {
            subject: format!("{}/{}", a.suite, a.name),
            computed: if a.passed { "pass" } else { "fail" }.to_string(),
            predicted: Some("pass".to_string()),
            consistent: a.passed,
            note: String::new(),
        })
        .collect();
    doc.details = json!({
        "assertions": assertions,
        "passed": assertions.len() - failed,
        "failed": failed,
    });
    doc.status = if failed == 0 { "pass" } else { "fail" }.to_string();

    let mut text = String::new();
    for a in &assertions {
        let _ = writeln!(text, "{} {}/{}", if a.passed { "PASS" } else { "FAIL" }, a.suite, a.name);
    }
    let _ = writeln!(text, "{} passed, {failed} failed", assertions.len() - failed);
    emit(doc, &cfg, start, text, if failed == 0 { EXIT_OK } else { EXIT_MISMATCH })
}

// ---------------------------------------------------------------------------
// oracle

fn study_json(s: &ConvergenceStudy) -> Value {
    json!({
        "points": s.points.iter().map(|p| json!({ "n": p.n, "h": Real(p.h), "error": Real(p.error) })).collect::<Vec<_>>(),
        "pairwise_orders": reals(&s.pairwise_orders),
        "observed_order": Real(s.observed_order()),
        "declared_order": Real(s.declared_order),
        "max_error": Real(s.max_error()),
    })
}

fn expect_op(cfg: &RunConfig, oracle: &str, allowed: &[&str]) -> Result<(), Failure> {
    match &cfg.op {
        Some(op) if !allowed.contains(&op.as_str()) => {
            Err(Failure::Usage(format!("oracle {oracle} does not apply to operator {op}; expected one of {}", allowed.join(", "))))
        }
        _ => Ok(()),
    }
}

fn reject_single_n(name: &str, args: &OracleArgs) -> Result<(), Failure> {
    if args.n.is_some() || args.mu.is_some() {
        return Err(Failure::Usage(format!("oracle {name} takes --n-list, not --n or --mu")));
    }
    Ok(())
}

pub fn oracle(args: &OracleArgs) -> Result<u8, Failure> {
    let start = Instant::now();
    let mut cfg = RunConfig::new("oracle", &args.output).with_operator(&args.operator, false)?;
    cfg.oracle = Some(args.name.clone());
    let mu = require_finite("mu", args.mu)?;
    let name = args.name.as_str();

    let (passed, details, summary) = match name {
        "dirichlet_green" | "thermostat" | "delay_left_eigenvector" => {
            reject_single_n(name, args)?;
            let (op_name, default_list) = match name {
                "dirichlet_green" => ("dirichlet", vec![50, 100, 200]),
                "thermostat" => ("thermostat", vec![50, 100, 200]),
                _ => ("delay", vec![32, 64, 128, 256]),
            };
            expect_op(&cfg, name, &[op_name])?;
            let spec = match &cfg.spec {
                Some(s) => s.clone(),
                None => OperatorSpec::from_parts(op_name, &BTreeMap::new(), None)?,
            };
            let ns = normalize_n_list(&args.n_list.clone().unwrap_or(default_list))?;
            let study = match spec {
                OperatorSpec::Thermostat { beta } => {
                    spec.build(ns[0])?;
                    thermostat_convergence(beta, &ns)?
                }
                OperatorSpec::Delay { c } => delay_left_eigenvector_study(c, &ns)?,
                _ => dirichlet_convergence(&ns)?,
            };
            cfg.n_list = Some(ns);
            let p = study.observed_order();
            let passed = p >= study.declared_order - ORDER_SLACK;
            let mut text = String::new();
            for pt in &study.points {
                let _ = writeln!(text, "n = {:>5}  h = {:.4e}  error = {:.6e}", pt.n, pt.h, pt.error);
            }
            let _ = writeln!(text, "observed order {p:.4} (declared {}, minimum {})", study.declared_order, study.declared_order - ORDER_SLACK);
            (passed, study_json(&study), text)
        }
        "periodic_first_order" => {
            if cfg.op.is_some() || args.n_list.is_some() {
                return Err(Failure::Usage("oracle periodic_first_order takes only --n and --mu".into()));
            }
            let n = args.n.unwrap_or(127);
            let mu = mu.unwrap_or(1.0);
            cfg.n = Some(n);
            cfg.mu = Some(mu);
            let pt = periodic_first_order_error(n, mu)?;
            let passed = pt.error <= PERIODIC_ORACLE_TOLERANCE;
            let text = format!("n = {n}  mu = {mu}  sup error = {:.6e} (tolerance {PERIODIC_ORACLE_TOLERANCE:e})\n", pt.error);
            (passed, json!({ "n": n, "h": Real(pt.h), "mu": Real(mu), "error": Real(pt.error), "tolerance": Real(PERIODIC_ORACLE_TOLERANCE) }), text)
        }
        "neumann_constant" => {
            if args.n_list.is_some() {
                return Err(Failure::Usage("oracle neumann_constant takes --n, not --n-list".into()));
            }
            let Some(op_name) = cfg.op.clone() else {
                return Err(Failure::Usage(format!("oracle neumann_constant needs --op, one of {}", CONSTANT_OPERATORS.join(", "))));
            };
            expect_op(&cfg, name, &CONSTANT_OPERATORS)?;
            if let OperatorSpec::OddOrder { ell } = cfg.spec() {
                if *ell == 0 {
                    return Err(Failure::Usage("oracle neumann_constant needs ell >= 1 for odd_order".into()));
                }
            }
            let mu = mu.ok_or_else(|| Failure::Usage("--mu is required".into()))?;
            let n = args.n.unwrap_or_else(|| cfg.spec().default_n());
            cfg.n = Some(n);
            cfg.mu = Some(mu);
            let op = cfg.spec().build(n)?;
            let error = constant_identity_error(&op, mu)?;
            let passed = error <= CONSTANT_ORACLE_TOLERANCE;
            let text = format!("{op_name} n = {n}  mu = {mu}  |R(mu)1 - 1/mu| = {error:.6e} (tolerance {CONSTANT_ORACLE_TOLERANCE:e})\n");
            (passed, json!({ "n": n, "mu": Real(mu), "error": Real(error), "tolerance": Real(CONSTANT_ORACLE_TOLERANCE) }), text)
        }
        other => {
            return Err(Failure::Usage(format!(
                "unknown oracle {other:?}; expected dirichlet_green, thermostat, periodic_first_order, neumann_constant or delay_left_eigenvector"
            )))
        }
    };

    let mut doc = ReportDocument::new(cfg.echo());
    doc.verdicts.push(VerdictEntry {
        subject: name.to_string(),
        computed: if passed { "pass" } else { "fail" }.to_string(),
        predicted: Some("pass".to_string()),
        consistent: passed,
        note: String::new(),
    });
    doc.details = details;
    doc.status = if passed { "pass" } else { "fail" }.to_string();
    let text = format!("{summary}{}\n", if passed { "PASS" } else { "FAIL" });
    emit(doc, &cfg, start, text, if passed { EXIT_OK } else { EXIT_MISMATCH })
}
