//! Discretized operators together with their comparison frames, eigendata and
//! the verdicts the continuum theory predicts for them.

mod delay;
mod graph;
mod interval;
mod nonlocal;
mod odd_order;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

pub use delay::{build_delay_operator, delay_left_eigenfunction};
pub use graph::{build_graph_laplacian, parse_edge_list, three_star, Edge};
pub use interval::{build_interval_laplacian, interval_laplacian_matrix, BoundaryCondition};
pub use nonlocal::{
    build_nonlocal_laplacian, build_nonlocal_symmetric, build_thermostat, symmetric_root,
    thermostat_root,
};
pub use odd_order::{build_odd_order, odd_order_symbol};

use crate::error::{Error, Result};
use crate::lattice::{DenseMatrix, OrderedVector, RankOneFrame};

pub const DEFAULT_INTERVAL_N: usize = 200;
pub const DEFAULT_FOURIER_N: usize = 127;
pub const DEFAULT_DELAY_N: usize = 64;
pub const DEFAULT_GRAPH_N_PER_UNIT: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Interval,
    Graph,
    DelayProduct,
    Fourier,
}

impl GridKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GridKind::Interval => "interval",
            GridKind::Graph => "graph",
            GridKind::DelayProduct => "delay_product",
            GridKind::Fourier => "fourier",
        }
    }
}

/// Grid layout. For graphs `spacing` holds one entry per edge and `nodes`
/// the arc position of each unknown along its edge (vertices report `0`).
#[derive(Debug, Clone, PartialEq)]
pub struct GridMeta {
    pub kind: GridKind,
    pub n: usize,
    pub spacing: Vec<f64>,
    pub nodes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Untested,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::Untested => "untested",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdicts predicted by the continuum theory, never by computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictedVerdicts {
    pub uniform_max: Verdict,
    pub uniform_antimax: Verdict,
    pub notes: String,
    pub citations: Vec<String>,
}

impl PredictedVerdicts {
    fn new(max: Verdict, antimax: Verdict, notes: &str, citations: &[&str]) -> Self {
        Self {
            uniform_max: max,
            uniform_antimax: antimax,
            notes: notes.to_string(),
            citations: citations.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn untested() -> Self {
        Self::new(Verdict::Untested, Verdict::Untested, "no prediction for this parameter choice", &[])
    }
}

/// Builder identity plus parameters; enough to rebuild an operator at any mesh.
#[derive(Debug, Clone, PartialEq)]
pub enum OperatorSpec {
    Interval(BoundaryCondition),
    NonlocalSymmetric,
    Thermostat { beta: f64 },
    Nonlocal { b: [[f64; 2]; 2], alpha: f64, beta: f64 },
    Graph { edges: Vec<Edge> },
    OddOrder { ell: u32 },
    Delay { c: f64 },
    /// Hand-built operator; cannot be rebuilt at another mesh.
    Custom,
}

pub const GALLERY_NAMES: [&str; 8] = [
    "dirichlet",
    "neumann",
    "periodic",
    "nonlocal_symmetric",
    "thermostat",
    "graph",
    "odd_order",
    "delay",
];

fn param(params: &BTreeMap<String, f64>, key: &str, default: f64) -> f64 {
    params.get(key).copied().unwrap_or(default)
}

impl OperatorSpec {
    /// Resolves a gallery name and `key=value` parameters.
    pub fn from_parts(name: &str, params: &BTreeMap<String, f64>, edges: Option<Vec<Edge>>) -> Result<Self> {
        let allowed: &[&str] = match name {
            "dirichlet" | "neumann" | "periodic" | "nonlocal_symmetric" => &[],
            "thermostat" => &["beta"],
            "nonlocal" => &["b11", "b12", "b21", "b22", "alpha", "beta"],
            "graph" => &[],
            "odd_order" => &["ell"],
            "delay" => &["c"],
            _ => {
                return Err(Error::InvalidParameter { name: "op", reason: alloc::format!("unknown operator {name}") })
            }
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidParameter { name: "param", reason: alloc::format!("{name} has no parameter {k}") });
        }
        if edges.is_some() && name != "graph" {
            return Err(Error::InvalidParameter { name: "edges", reason: "only the graph operator takes edges".into() });
        }
        Ok(match name {
            "dirichlet" => OperatorSpec::Interval(BoundaryCondition::Dirichlet),
            "neumann" => OperatorSpec::Interval(BoundaryCondition::Neumann),
            "periodic" => OperatorSpec::Interval(BoundaryCondition::Periodic),
            "nonlocal_symmetric" => OperatorSpec::NonlocalSymmetric,
            "thermostat" => OperatorSpec::Thermostat { beta: param(params, "beta", 0.2) },
            "nonlocal" => OperatorSpec::Nonlocal {
                b: [
                    [param(params, "b11", 0.0), param(params, "b12", 0.0)],
                    [param(params, "b21", 0.0), param(params, "b22", 0.0)],
                ],
                alpha: param(params, "alpha", 0.0),
                beta: param(params, "beta", 1.0),
            },
            "graph" => OperatorSpec::Graph { edges: edges.unwrap_or_else(graph::three_star) },
            "odd_order" => {
                let ell = param(params, "ell", 1.0);
                if !(ell >= 0.0 && ell <= 8.0 && libm::floor(ell) == ell) {
                    return Err(Error::InvalidParameter { name: "ell", reason: "must be an integer in 0..=8".into() });
                }
                OperatorSpec::OddOrder { ell: ell as u32 }
            }
            "delay" => OperatorSpec::Delay { c: param(params, "c", core::f64::consts::PI / 16.0) },
            _ => unreachable!(),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorSpec::Interval(bc) => bc.as_str(),
            OperatorSpec::NonlocalSymmetric => "nonlocal_symmetric",
            OperatorSpec::Thermostat { .. } => "thermostat",
            OperatorSpec::Nonlocal { .. } => "nonlocal",
            OperatorSpec::Graph { .. } => "graph",
            OperatorSpec::OddOrder { .. } => "odd_order",
            OperatorSpec::Delay { .. } => "delay",
            OperatorSpec::Custom => "custom",
        }
    }

    pub fn default_n(&self) -> usize {
        match self {
            OperatorSpec::Graph { .. } => DEFAULT_GRAPH_N_PER_UNIT,
            OperatorSpec::OddOrder { .. } => DEFAULT_FOURIER_N,
            OperatorSpec::Delay { .. } => DEFAULT_DELAY_N,
            _ => DEFAULT_INTERVAL_N,
        }
    }

    /// Default mesh list for refinement studies.
    pub fn default_n_list(&self) -> Vec<usize> {
        match self {
            OperatorSpec::Graph { .. } => alloc::vec![10, 20, 40, 80],
            OperatorSpec::OddOrder { .. } => alloc::vec![31, 63, 127, 255],
            OperatorSpec::Delay { .. } => alloc::vec![32, 64, 128, 256],
            _ => alloc::vec![50, 100, 200, 400],
        }
    }

    /// `n` is the number of grid points, or points per unit length for graphs.
    pub fn build(&self, n: usize) -> Result<GalleryOperator> {
        match self {
            OperatorSpec::Interval(bc) => build_interval_laplacian(*bc, n),
            OperatorSpec::NonlocalSymmetric => build_nonlocal_symmetric(n),
            OperatorSpec::Thermostat { beta } => build_thermostat(*beta, n),
            OperatorSpec::Nonlocal { b, alpha, beta } => build_nonlocal_laplacian(*b, (*alpha, *beta), n),
            OperatorSpec::Graph { edges } => build_graph_laplacian(edges, n),
            OperatorSpec::OddOrder { ell } => build_odd_order(*ell, n),
            OperatorSpec::Delay { c } => build_delay_operator(*c, n),
            OperatorSpec::Custom => Err(Error::InvalidParameter {
                name: "op",
                reason: "custom operators cannot be rebuilt".into(),
            }),
        }
    }

    pub fn build_default(&self) -> Result<GalleryOperator> {
        self.build(self.default_n())
    }
}

/// A discretized operator with its comparison frame and declared continuum data.
#[derive(Debug, Clone, PartialEq)]
pub struct GalleryOperator {
    pub name: String,
    pub spec: OperatorSpec,
    pub matrix: DenseMatrix,
    pub frame: RankOneFrame,
    /// Eigensolver shift: the continuum value where one is known.
    pub lambda0: f64,
    pub continuum_m1: u32,
    pub continuum_m2: u32,
    pub grid: GridMeta,
    pub predicted: PredictedVerdicts,
    pub params: BTreeMap<String, f64>,
    /// Continuum eigenfunction sampled on the grid.
    pub declared_eigenvector: Option<OrderedVector>,
    /// Order `p` of `‖A v_h − λ₀ v_h‖_∞ = O(h^p)`; `None` means exact up to roundoff.
    pub consistency_order: Option<u32>,
    /// Self-adjoint under the weighted inner product.
    pub symmetric: bool,
}

impl GalleryOperator {
    /// Wraps a hand-built matrix with unit-spaced grid metadata.
    pub fn custom(
        name: &str,
        matrix: DenseMatrix,
        frame: RankOneFrame,
        lambda0: f64,
        m1: u32,
        m2: u32,
    ) -> Result<Self> {
        let n = matrix.dim();
        if frame.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: frame.len() });
        }
        let mut op = Self {
            name: name.to_string(),
            spec: OperatorSpec::Custom,
            matrix,
            frame,
            lambda0,
            continuum_m1: m1,
            continuum_m2: m2,
            grid: GridMeta { kind: GridKind::Interval, n, spacing: alloc::vec![1.0], nodes: (0..n).map(|i| i as f64).collect() },
            predicted: PredictedVerdicts::untested(),
            params: BTreeMap::new(),
            declared_eigenvector: None,
            consistency_order: None,
            symmetric: false,
        };
        op.symmetric = op.weighted_asymmetry() <= 1e-12;
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `m = m₁ + m₂`, at least 1.
    pub fn power(&self) -> u32 {
        (self.continuum_m1 + self.continuum_m2).max(1)
    }

    /// Representative mesh width (largest edge spacing for graphs).
    pub fn h(&self) -> f64 {
        self.grid.spacing.iter().copied().fold(0.0, f64::max)
    }

    pub fn with_frame(&self, frame: RankOneFrame) -> Result<Self> {
        if frame.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: frame.len() });
        }
        let mut out = self.clone();
        out.frame = frame;
        Ok(out)
    }

    /// `‖W·A − Aᵀ·W‖_∞ / ‖W·A‖_∞`
    pub fn weighted_asymmetry(&self) -> f64 {
        let w = self.frame.weights().as_slice();
        let wa = DenseMatrix::from_fn(self.dim(), |i, j| w[i] * self.matrix[(i, j)]);
        wa.sub(&wa.transpose()).inf_norm() / wa.inf_norm().max(f64::MIN_POSITIVE)
    }

    /// `‖A·v_h − λ₀·v_h‖_∞` for the declared eigenvector.
    pub fn consistency_residual(&self) -> Option<f64> {
        let v = self.declared_eigenvector.as_ref()?;
        let av = self.matrix.mul_vec(v.as_slice());
        Some(
            av.iter()
                .zip(v.as_slice())
                .fold(0.0f64, |m, (a, x)| m.max((a - self.lambda0 * x).abs())),
        )
    }
}

pub(crate) fn params_of(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub(crate) fn require(cond: bool, name: &'static str, reason: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: reason.to_string() })
    }
}

/// Every gallery operator at its default mesh.
pub fn default_gallery() -> Result<Vec<GalleryOperator>> {
    GALLERY_NAMES
        .iter()
        .map(|name| OperatorSpec::from_parts(name, &BTreeMap::new(), None)?.build_default())
        .collect()
}
