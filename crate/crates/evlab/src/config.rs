use std::collections::BTreeMap;
use std::path::PathBuf;

use evlab_core::gallery::{parse_edge_list, OperatorSpec};
use evlab_core::principles::Thresholds;

use crate::cli::{OperatorArgs, OutputArgs, ThresholdArgs};
use crate::report::{ConfigEcho, Real, ThresholdEcho};
use crate::Failure;

/// Validated settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: &'static str,
    pub op: Option<String>,
    pub spec: Option<OperatorSpec>,
    pub params: BTreeMap<String, f64>,
    pub edges: Option<String>,
    pub n: Option<usize>,
    pub n_list: Option<Vec<usize>>,
    pub mu_min: Option<f64>,
    pub mu_max: Option<f64>,
    pub steps: Option<usize>,
    pub probe_mu: Option<f64>,
    pub mu: Option<f64>,
    pub suite: Option<String>,
    pub oracle: Option<String>,
    pub seed: Option<u64>,
    pub thresholds: Thresholds,
    pub out: Option<PathBuf>,
    pub json: bool,
}

impl RunConfig {
    pub fn new(command: &'static str, output: &OutputArgs) -> Self {
        Self {
            command,
            op: None,
            spec: None,
            params: BTreeMap::new(),
            edges: None,
            n: None,
            n_list: None,
            mu_min: None,
            mu_max: None,
            steps: None,
            probe_mu: None,
            mu: None,
            suite: None,
            oracle: None,
            seed: None,
            thresholds: Thresholds::default(),
            out: output.out.clone(),
            json: output.json,
        }
    }

    /// Resolves `--op`, `--param` and `--edges`; the builder checks ranges later.
    pub fn with_operator(mut self, args: &OperatorArgs, required: bool) -> Result<Self, Failure> {
        let Some(name) = args.op.clone() else {
            if required {
                return Err(Failure::Usage("--op is required".into()));
            }
            if !args.params.is_empty() || args.edges.is_some() {
                return Err(Failure::Usage("--param and --edges need --op".into()));
            }
            return Ok(self);
        };
        let mut params = BTreeMap::new();
        for (k, v) in &args.params {
            if !v.is_finite() {
                return Err(Failure::Usage(format!("parameter {k} must be finite")));
            }
            if params.insert(k.clone(), *v).is_some() {
                return Err(Failure::Usage(format!("parameter {k} given twice")));
            }
        }
        let edges = args.edges.as_deref().map(parse_edge_list).transpose()?;
        self.spec = Some(OperatorSpec::from_parts(&name, &params, edges)?);
        self.op = Some(name);
        self.params = params;
        self.edges = args.edges.clone();
        Ok(self)
    }

    pub fn with_thresholds(mut self, t: &ThresholdArgs) -> Result<Self, Failure> {
        let mut th = Thresholds::default();
        let positive = |name: &str, v: Option<f64>| -> Result<Option<f64>, Failure> {
            match v {
                Some(x) if !(x.is_finite() && x > 0.0) => Err(Failure::Usage(format!("--{name} must be positive"))),
                _ => Ok(v),
            }
        };
        if let Some(x) = positive("eps-cls", t.eps_cls)? {
            th.eps_cls = x;
        }
        if let Some(x) = positive("uniform-low", t.uniform_low)? {
            th.uniform_low = x;
        }
        if let Some(x) = positive("uniform-high", t.uniform_high)? {
            th.uniform_high = x;
        }
        if let Some(x) = positive("divergent-growth", t.divergent_growth)? {
            th.divergent_growth = x;
        }
        if let Some(x) = positive("proximity-fraction", t.proximity_fraction)? {
            th.proximity_fraction = x;
        }
        if let Some(k) = t.min_doublings {
            th.min_doublings = k;
        }
        if th.uniform_low > 1.0 || th.uniform_high < 1.0 {
            return Err(Failure::Usage("the uniform band must contain 1".into()));
        }
        self.thresholds = th;
        Ok(self)
    }

    pub fn spec(&self) -> &OperatorSpec {
        self.spec.as_ref().expect("operator resolved during validation")
    }

    pub fn echo(&self) -> ConfigEcho {
        let th = &self.thresholds;
        ConfigEcho {
            command: self.command.to_string(),
            op: self.op.clone(),
            params: self.params.iter().map(|(k, v)| (k.clone(), Real(*v))).collect(),
            edges: self.edges.clone(),
            n: self.n,
            n_list: self.n_list.clone(),
            mu_min: self.mu_min.map(Real),
            mu_max: self.mu_max.map(Real),
            steps: self.steps,
            probe_mu: self.probe_mu.map(Real),
            mu: self.mu.map(Real),
            suite: self.suite.clone(),
            oracle: self.oracle.clone(),
            seed: self.seed,
            thresholds: ThresholdEcho {
                eps_cls: Real(th.eps_cls),
                uniform_low: Real(th.uniform_low),
                uniform_high: Real(th.uniform_high),
                divergent_growth: Real(th.divergent_growth),
                proximity_fraction: Real(th.proximity_fraction),
                min_doublings: th.min_doublings,
                singular_sigma: Real(th.singular_sigma),
            },
        }
    }
}

pub fn require_finite(name: &str, v: Option<f64>) -> Result<Option<f64>, Failure> {
    match v {
        Some(x) if !x.is_finite() => Err(Failure::Usage(format!("--{name} must be finite"))),
        _ => Ok(v),
    }
}
