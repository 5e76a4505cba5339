use std::path::Path;

use serde::{Deserialize, Serialize};

use super::load_matrix;
use crate::error::{Error, Result};
use crate::landscape::{
    build_ql1m_minimizer, build_qomm_minimizer, build_qomm_stationary, build_qtpm_minimizer, build_qtpm_stationary,
    classify_point, saddle_escape, verify_qomm_stationary, verify_qtpm_stationary, BasisColumn, Block, BlockBasis,
    BlockSpec, EscapeKind, PointClass, STATIONARY_TOL,
};
use crate::linalg::{eigh, HermitianOperator};
use crate::models::{reference_value, Model, ModelConfig};
use crate::sampling;

/// Operator A, either Q·diag(spectrum)·Q* with a seeded random unitary Q or a matrix file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default)]
    pub spectrum: Option<Vec<f64>>,
    #[serde(default)]
    pub seed: u64,
    /// Path relative to the scenario file.
    #[serde(default)]
    pub matrix: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub size: usize,
    pub columns: Vec<BasisColumn>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Minimizer,
    Saddle,
}

fn default_epsilon() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub name: String,
    #[serde(default)]
    pub model: Option<Model>,
    #[serde(default)]
    pub mu: Option<f64>,
    pub blocks: Vec<BlockEntry>,
    #[serde(default)]
    pub expect: Option<Expect>,
    /// Expected objective value.
    #[serde(default)]
    pub value: Option<f64>,
    /// Expected diagonal of D.
    #[serde(default)]
    pub multipliers: Option<Vec<f64>>,
    #[serde(default)]
    pub escape: bool,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: Model,
    #[serde(default)]
    pub mu: Option<f64>,
    #[serde(default)]
    pub mu1: Option<f64>,
    pub operator: OperatorSpec,
    #[serde(default)]
    pub cases: Vec<CaseSpec>,
    /// Columns for the minimizer checks.
    #[serde(default)]
    pub p: Option<usize>,
    /// One minimizer check with a random unitary V per seed.
    #[serde(default)]
    pub seeds: Vec<u64>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("scenario: {}", e)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EscapeReport {
    pub kind: Option<EscapeKind>,
    pub value_before: Option<f64>,
    pub value_after: Option<f64>,
    pub eps_used: Option<f64>,
    pub distance: Option<f64>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub model: Model,
    pub residual: f64,
    pub relative_residual: f64,
    pub value: f64,
    pub multipliers: Vec<f64>,
    pub class: PointClass,
    pub escape: Option<EscapeReport>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimizerReport {
    pub seed: u64,
    pub value: f64,
    pub reference: f64,
    pub class: PointClass,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandscapeReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
    pub model: Model,
    pub n: usize,
    pub cases: Vec<CaseReport>,
    pub minimizers: Vec<MinimizerReport>,
    pub pass: bool,
}

impl LandscapeReport {
    pub fn checks_total(&self) -> usize {
        self.cases.len() + self.minimizers.len()
    }

    pub fn checks_passed(&self) -> usize {
        self.cases.iter().filter(|c| c.pass).count() + self.minimizers.iter().filter(|m| m.pass).count()
    }
}

fn operator(spec: &OperatorSpec, base: &Path) -> Result<HermitianOperator> {
    match (&spec.spectrum, &spec.matrix) {
        (Some(d), None) => {
            if d.is_empty() {
                return Err(Error::InvalidInput("empty spectrum".into()));
            }
            let mut rng = sampling::rng(spec.seed);
            let q = sampling::random_unitary(d.len(), &mut rng);
            HermitianOperator::from_spectrum(&q, d)
        }
        (None, Some(path)) => load_matrix(&base.join(path)),
        _ => Err(Error::InvalidInput("operator needs exactly one of spectrum or matrix".into())),
    }
}

fn config_for(model: Model, mu: Option<f64>, mu1: Option<f64>) -> Result<ModelConfig> {
    match model {
        Model::Qomm => Ok(ModelConfig::qomm()),
        Model::Qtpm => Ok(ModelConfig::qtpm(mu.ok_or_else(|| Error::InvalidInput("qtpm needs mu".into()))?)),
        Model::Ql1m => Ok(ModelConfig::ql1m(mu1.unwrap_or(1.0))),
        Model::Wql1m => Err(Error::InvalidInput("weighted qL1M has no landscape scenario".into())),
    }
}

fn close(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= 1e-9 * scale.max(1.0)
}

fn run_case(case: &CaseSpec, scenario: &Scenario, a: &HermitianOperator) -> Result<CaseReport> {
    let model = case.model.unwrap_or(scenario.model);
    let mu = case.mu.or(scenario.mu);
    let config = config_for(model, mu, scenario.mu1)?;
    let spec = BlockSpec::new(
        model,
        case.blocks
            .iter()
            .map(|b| Block {
                size: b.size,
                basis: BlockBasis::Columns(b.columns.clone()),
            })
            .collect(),
    );
    let scale = a.fro_norm() + if model == Model::Qtpm { config.mu } else { 0.0 };
    let (cert, residual) = match model {
        Model::Qomm => {
            let c = build_qomm_stationary(a, &spec)?;
            let r = verify_qomm_stationary(a, c.x.matrix(), &c.d);
            (c, r)
        }
        Model::Qtpm => {
            let c = build_qtpm_stationary(a, config.mu, &spec)?;
            let r = verify_qtpm_stationary(a, c.x.matrix(), &c.d, config.mu);
            (c, r)
        }
        _ => return Err(Error::InvalidInput(format!("no stationary-point builder for {}", model))),
    };
    let value = config.value(a, cert.x.matrix())?;
    let class = classify_point(&config, a, cert.x.matrix())?;
    let mut pass = residual <= STATIONARY_TOL * scale;
    if let Some(v) = case.value {
        pass &= close(value, v, v.abs());
    }
    if let Some(d) = &case.multipliers {
        pass &= d.len() == cert.d.len() && d.iter().zip(&cert.d).all(|(x, y)| close(*x, *y, x.abs()));
    }
    match case.expect {
        Some(Expect::Minimizer) => pass &= class == PointClass::Minimizer,
        Some(Expect::Saddle) => pass &= class == PointClass::Saddle,
        None => {}
    }
    let escape = if case.escape {
        let r = match saddle_escape(model, a, &cert, config.mu, case.epsilon) {
            Ok(e) => EscapeReport {
                kind: Some(e.kind),
                value_before: Some(e.value_before),
                value_after: Some(e.value_after),
                eps_used: Some(e.eps_used),
                distance: Some(e.distance),
                error: None,
                pass: e.value_after < e.value_before,
            },
            Err(err) => EscapeReport {
                kind: None,
                value_before: None,
                value_after: None,
                eps_used: None,
                distance: None,
                error: Some(err.to_string()),
                pass: matches!(err, Error::AlreadyMinimal) && case.expect == Some(Expect::Minimizer),
            },
        };
        pass &= r.pass;
        Some(r)
    } else {
        None
    };
    Ok(CaseReport {
        name: case.name.clone(),
        model,
        relative_residual: residual / scale,
        residual,
        value,
        multipliers: cert.d,
        class,
        escape,
        pass,
    })
}

fn run_minimizer(scenario: &Scenario, a: &HermitianOperator, p: usize, seed: u64) -> Result<MinimizerReport> {
    let config = config_for(scenario.model, scenario.mu, scenario.mu1)?;
    let mut rng = sampling::rng(seed);
    let v = sampling::random_unitary(p, &mut rng);
    let x = match scenario.model {
        Model::Qomm => build_qomm_minimizer(a, p, &v)?,
        Model::Qtpm => build_qtpm_minimizer(a, config.mu, p, &v)?,
        _ => build_ql1m_minimizer(a, p, &v)?,
    };
    let value = config.value(a, x.matrix())?;
    let reference = reference_value(&config, &eigh(a).values[..p]);
    let class = classify_point(&config, a, x.matrix())?;
    Ok(MinimizerReport {
        seed,
        value,
        reference,
        class,
        pass: (value - reference).abs() <= 1e-10 * reference.abs().max(1.0) && class == PointClass::Minimizer,
    })
}

/// Runs every case and minimizer check; input problems are errors, failed checks are not.
pub fn run_scenario(scenario: &Scenario, base: &Path) -> Result<LandscapeReport> {
    let a = operator(&scenario.operator, base)?;
    let mut cases = Vec::with_capacity(scenario.cases.len());
    for c in &scenario.cases {
        cases.push(run_case(c, scenario, &a)?);
    }
    let mut minimizers = Vec::new();
    if !scenario.seeds.is_empty() {
        let p = scenario
            .p
            .ok_or_else(|| Error::InvalidInput("minimizer seeds need p".into()))?;
        for &s in &scenario.seeds {
            minimizers.push(run_minimizer(scenario, &a, p, s)?);
        }
    }
    let pass = cases.iter().all(|c| c.pass) && minimizers.iter().all(|m| m.pass);
    Ok(LandscapeReport {
        timestamp: None,
        model: scenario.model,
        n: a.dim(),
        cases,
        minimizers,
        pass,
    })
}
