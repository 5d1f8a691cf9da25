use alloc::vec::Vec;

use super::scan::Thresholds;
use crate::error::{Error, Result};
use crate::gallery::OperatorSpec;
use crate::lattice::{margins, MarginReport};
use crate::numerics::resolvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefinementVerdict {
    Uniform,
    Divergent,
    Inconclusive,
}

impl RefinementVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            RefinementVerdict::Uniform => "uniform",
            RefinementVerdict::Divergent => "divergent",
            RefinementVerdict::Inconclusive => "inconclusive",
        }
    }
}

/// Which margin the uniformity verdict follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackedMargin {
    Lower,
    Upper,
    Neither,
}

impl TrackedMargin {
    pub fn as_str(self) -> &'static str {
        match self {
            TrackedMargin::Lower => "lower",
            TrackedMargin::Upper => "upper",
            TrackedMargin::Neither => "neither",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshRecord {
    pub n: usize,
    pub dim: usize,
    pub h: f64,
    pub margins: MarginReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefinementStudy {
    pub operator: &'static str,
    pub probe_mu: f64,
    pub meshes: Vec<MeshRecord>,
    /// `ĉ(h_{k+1}) / ĉ(h_k)`
    pub c_hat_growth: Vec<f64>,
    pub tracked: TrackedMargin,
    /// Final over initial value of the tracked margin.
    pub tracked_ratio: Option<f64>,
    pub verdict: RefinementVerdict,
}

impl RefinementStudy {
    pub fn max_growth(&self) -> f64 {
        self.c_hat_growth.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Final over initial `ĉ`.
    pub fn c_hat_ratio(&self) -> f64 {
        let first = self.meshes[0].margins.two_sided_constant;
        let last = self.meshes[self.meshes.len() - 1].margins.two_sided_constant;
        last / first
    }
}

pub fn mesh_record(spec: &OperatorSpec, n: usize, probe_mu: f64) -> Result<MeshRecord> {
    let op = spec.build(n)?;
    let r = resolvent(&op.matrix, probe_mu)?;
    Ok(MeshRecord { n, dim: op.dim(), h: op.h(), margins: margins(&r, &op.frame)? })
}

pub fn normalize_n_list(n_list: &[usize]) -> Result<Vec<usize>> {
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.len() < 2 {
        return Err(Error::InvalidParameter { name: "n_list", reason: "need at least two distinct meshes".into() });
    }
    Ok(ns)
}

/// Applies the verdict rules to per-mesh records sorted by `n`.
pub fn assemble_study(
    spec: &OperatorSpec,
    probe_mu: f64,
    mut meshes: Vec<MeshRecord>,
    thresholds: &Thresholds,
) -> RefinementStudy {
    meshes.sort_by_key(|m| m.n);
    let growth: Vec<f64> = meshes
        .windows(2)
        .map(|w| w[1].margins.two_sided_constant / w[0].margins.two_sided_constant)
        .collect();
    let first = meshes[0].margins;
    let tracked = if first.lower_margin > 0.0 {
        TrackedMargin::Lower
    } else if first.upper_margin < 0.0 {
        TrackedMargin::Upper
    } else {
        TrackedMargin::Neither
    };
    let value = |m: &MarginReport| match tracked {
        TrackedMargin::Lower => m.lower_margin,
        _ => m.upper_margin,
    };
    let sign_definite = match tracked {
        TrackedMargin::Lower => meshes.iter().all(|m| m.margins.lower_margin > 0.0),
        TrackedMargin::Upper => meshes.iter().all(|m| m.margins.upper_margin < 0.0),
        TrackedMargin::Neither => false,
    };
    let tracked_ratio = match tracked {
        TrackedMargin::Neither => None,
        _ => Some(value(&meshes[meshes.len() - 1].margins) / value(&first)),
    };
    let divergent = !growth.is_empty() && growth.iter().all(|&g| g >= thresholds.divergent_growth);
    let uniform = sign_definite
        && growth.len() >= thresholds.min_doublings
        && tracked_ratio.is_some_and(|r| r >= thresholds.uniform_low && r <= thresholds.uniform_high);
    let verdict = if divergent {
        RefinementVerdict::Divergent
    } else if uniform {
        RefinementVerdict::Uniform
    } else {
        RefinementVerdict::Inconclusive
    };
    RefinementStudy {
        operator: spec.name(),
        probe_mu,
        meshes,
        c_hat_growth: growth,
        tracked,
        tracked_ratio,
        verdict,
    }
}

pub fn refinement_study(
    spec: &OperatorSpec,
    probe_mu: f64,
    n_list: &[usize],
    thresholds: &Thresholds,
) -> Result<RefinementStudy> {
    let ns = normalize_n_list(n_list)?;
    let meshes = ns.iter().map(|&n| mesh_record(spec, n, probe_mu)).collect::<Result<Vec<_>>>()?;
    Ok(assemble_study(spec, probe_mu, meshes, thresholds))
}
