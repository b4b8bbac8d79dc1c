use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use super::GlobalArgs;
use crate::corpus::Corpus;
use crate::dirichlet::{
    verify_difference_identities, verify_dilation_contractivity, verify_embeddings, verify_multiplier_bound,
    verify_refined_quadrature, IdentityConfig, IdentityReport, EXACT_TOL,
};
use crate::error::{Error, Result};
use crate::io::{self, GramJson, MeasureJson, OperatorJson, PolynomialJson, TupleJson};
use crate::linalg::CMat;
use crate::measures::{MomentSequence, SemiSpectralMeasure};
use crate::operators::{classify, wold_split, OperatorMatrix, DEFAULT_CAP, DEFAULT_TOL};
use crate::polynomials::VectorPolynomial;
use crate::quadrature::Grid;
use crate::recovery::{recover_tuple, roundtrip_verify, GramOracle, OperatorOracle};
use crate::spaces::{gram, MeasureTuple};

pub const DEFAULT_ORDER: usize = 4;
pub const DEFAULT_DEGREE: usize = 16;
pub const DEFAULT_RADIUS: f64 = 0.9;
pub const ROUNDTRIP_TOL: f64 = 1e-8;
const CONTRACTIVITY_RADII: [f64; 5] = [0.25, 0.5, 0.75, 0.9, 0.99];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobKind {
    Identities,
    Quadrature,
    Gram,
    Recover,
    Roundtrip,
    Classify,
    Wold,
}

impl JobKind {
    fn label(self) -> &'static str {
        match self {
            JobKind::Identities => "identities",
            JobKind::Quadrature => "quadrature",
            JobKind::Gram => "gram",
            JobKind::Recover => "recover",
            JobKind::Roundtrip => "roundtrip",
            JobKind::Classify => "classify",
            JobKind::Wold => "wold",
        }
    }
}

/// One entry of a scenario file. Input paths are relative to the file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub kind: JobKind,
    #[serde(default)]
    pub measure: Option<String>,
    #[serde(default)]
    pub polynomial: Option<String>,
    #[serde(default)]
    pub tuple: Option<String>,
    #[serde(default)]
    pub operator: Option<String>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub order: Option<usize>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub cap: Option<usize>,
    #[serde(default)]
    pub radius: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    scenarios: Vec<Scenario>,
}

/// A scenario with its inputs loaded and validated.
#[derive(Debug, Clone)]
pub struct Job {
    pub name: String,
    pub kind: JobKind,
    pub measure: Option<SemiSpectralMeasure<f64>>,
    pub polynomial: Option<VectorPolynomial<f64>>,
    pub tuple: Option<MeasureTuple<f64>>,
    pub operator: Option<(OperatorMatrix<f64>, Option<CMat<f64>>)>,
    pub tol: Option<f64>,
    pub degree: Option<usize>,
    pub order: Option<usize>,
    pub m: Option<usize>,
    pub cap: Option<usize>,
    pub radius: Option<f64>,
}

/// Records emitted by one job and whether all of its checks passed.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub records: Vec<Value>,
    pub pass: bool,
}

fn missing(name: &str, kind: JobKind, key: &str) -> Error {
    Error::Parse(format!(
        "scenario '{name}': kind '{}' requires key '{key}'",
        kind.label()
    ))
}

impl Scenario {
    pub fn empty(kind: JobKind) -> Self {
        Self {
            name: None,
            kind,
            measure: None,
            polynomial: None,
            tuple: None,
            operator: None,
            tol: None,
            degree: None,
            order: None,
            m: None,
            cap: None,
            radius: None,
        }
    }

    /// Reads every referenced input and checks the keys the kind needs.
    pub fn load(&self, base: &Path) -> Result<Job> {
        let name = self.name.clone().unwrap_or_else(|| self.kind.label().to_string());
        let path = |p: &String| base.join(p);
        let measure = match &self.measure {
            Some(p) => Some(io::read_file::<MeasureJson>("measure", &path(p))?.build()?),
            None => None,
        };
        let polynomial = match &self.polynomial {
            Some(p) => Some(io::read_file::<PolynomialJson>("polynomial", &path(p))?.build()?),
            None => None,
        };
        let tuple = match &self.tuple {
            Some(p) => Some(io::read_file::<TupleJson>("tuple", &path(p))?.build()?),
            None => None,
        };
        let operator = match &self.operator {
            Some(p) => Some(io::read_file::<OperatorJson>("operator", &path(p))?.build()?),
            None => None,
        };
        let job = Job {
            name,
            kind: self.kind,
            measure,
            polynomial,
            tuple,
            operator,
            tol: self.tol,
            degree: self.degree,
            order: self.order,
            m: self.m,
            cap: self.cap,
            radius: self.radius,
        };
        job.validate()?;
        Ok(job)
    }
}

/// Loads a scenario file: `{"scenarios": [...]}`, a bare array, or one scenario.
pub fn load_scenarios(path: &Path) -> Result<Vec<Job>> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("scenario file {}: {e}", path.display())))?;
    let value: Value = io::from_str("scenario file", &text)?;
    let scenarios: Vec<Scenario> = match value {
        Value::Array(_) => serde_json::from_value(value),
        Value::Object(ref o) if o.contains_key("scenarios") => {
            serde_json::from_value::<ScenarioFile>(value).map(|f| f.scenarios)
        }
        _ => serde_json::from_value(value).map(|s| vec![s]),
    }
    .map_err(|e| Error::Parse(format!("scenario file: {e}")))?;
    let base = path.parent().unwrap_or(Path::new("."));
    scenarios.iter().map(|s| s.load(base)).collect()
}

/// The seeded corpus behind `verify --corpus builtin`.
pub fn builtin_jobs(seed: u64) -> Vec<Job> {
    let mut c = Corpus::new(seed);
    let mut jobs = Vec::new();
    for i in 0..24 {
        let dim = c.index(1, 3);
        let mu = c.measure::<f64>(dim);
        let deg = c.index(1, 8);
        let f = c.polynomial::<f64>(dim, deg);
        let mut job = Job::bare(format!("identities-{i:02}"), JobKind::Identities);
        job.measure = Some(mu);
        job.polynomial = Some(f);
        jobs.push(job);
    }
    for i in 0..4 {
        let m = c.index(2, 4);
        let dim = c.index(1, 2);
        let mut job = Job::bare(format!("recover-{i:02}"), JobKind::Recover);
        job.tuple = Some(c.tuple::<f64>(m, dim, false));
        jobs.push(job);
    }
    jobs
}

fn record(job: &Job, seed: u64, body: impl Serialize) -> Value {
    let mut obj = match serde_json::to_value(body).expect("serializable report") {
        Value::Object(o) => o,
        other => {
            let mut o = Map::new();
            o.insert("value".into(), other);
            o
        }
    };
    obj.insert("scenario".into(), Value::String(job.name.clone()));
    obj.insert("kind".into(), Value::String(job.kind.label().into()));
    obj.insert("seed".into(), json!(seed));
    Value::Object(obj)
}

fn moments_json(seq: &MomentSequence<f64>) -> BTreeMap<String, io::JsonMatrix> {
    let top = seq.max_order() as i64;
    (-top..=top)
        .filter_map(|s| seq.get(s).map(|m| (s.to_string(), io::matrix_to(m))))
        .collect()
}

impl Job {
    fn bare(name: String, kind: JobKind) -> Self {
        Self {
            name,
            kind,
            measure: None,
            polynomial: None,
            tuple: None,
            operator: None,
            tol: None,
            degree: None,
            order: None,
            m: None,
            cap: None,
            radius: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let need = |present: bool, key: &str| {
            if present {
                Ok(())
            } else {
                Err(missing(&self.name, self.kind, key))
            }
        };
        match self.kind {
            JobKind::Identities | JobKind::Quadrature => {
                need(self.measure.is_some(), "measure")?;
                need(self.polynomial.is_some(), "polynomial")
            }
            JobKind::Gram => need(self.tuple.is_some(), "tuple"),
            JobKind::Recover | JobKind::Roundtrip => need(self.tuple.is_some() || self.operator.is_some(), "tuple"),
            JobKind::Classify | JobKind::Wold => need(self.operator.is_some(), "operator"),
        }
    }

    /// Runs the job. Command-line values take precedence over scenario values.
    pub fn run(&self, g: &GlobalArgs) -> Result<Outcome> {
        let tol = g.tol.or(self.tol);
        let degree = g.degree.or(self.degree);
        let order = g.order.or(self.order);
        let seed = g.seed;
        let one = |body: Value, pass: bool| Outcome {
            records: vec![record(self, seed, body)],
            pass,
        };
        match self.kind {
            JobKind::Identities => {
                let (mu, f) = (
                    self.measure.as_ref().expect("validated"),
                    self.polynomial.as_ref().expect("validated"),
                );
                let nmax = order.unwrap_or(DEFAULT_ORDER);
                let cfg = IdentityConfig {
                    exact_tol: tol.unwrap_or(EXACT_TOL),
                    radius: self.radius.unwrap_or(DEFAULT_RADIUS),
                    ..IdentityConfig::default()
                };
                let mut reports = verify_difference_identities(mu, f, nmax, &cfg)?;
                reports.push(verify_multiplier_bound(mu, f)?);
                reports.push(verify_dilation_contractivity(mu, f, nmax, &CONTRACTIVITY_RADII)?.report);
                for n in 1..=nmax.max(1) {
                    reports.extend(verify_embeddings(mu, f, n, Grid::default())?);
                }
                Ok(identity_outcome(self, seed, reports))
            }
            JobKind::Quadrature => {
                let (mu, f) = (
                    self.measure.as_ref().expect("validated"),
                    self.polynomial.as_ref().expect("validated"),
                );
                let radius = self.radius.unwrap_or(DEFAULT_RADIUS);
                let grid = Grid {
                    radial: 64,
                    angular: if radius > 0.95 { 16384 } else { 256 },
                };
                let rep = verify_refined_quadrature(mu, f, order.unwrap_or(1), radius, grid)?;
                Ok(identity_outcome(self, seed, vec![rep]))
            }
            JobKind::Gram => {
                let tuple = self.tuple.as_ref().expect("validated");
                let g = GramJson::from_gram(&gram(tuple, degree.unwrap_or(DEFAULT_DEGREE)));
                Ok(one(to_value(&g), true))
            }
            JobKind::Recover | JobKind::Roundtrip => self.recover(degree, order, tol, seed),
            JobKind::Classify => {
                let (t, _) = self.operator.as_ref().expect("validated");
                let c = classify(t, self.cap.unwrap_or(DEFAULT_CAP), tol.unwrap_or(DEFAULT_TOL))?;
                Ok(one(to_value(&c), true))
            }
            JobKind::Wold => {
                let (t, _) = self.operator.as_ref().expect("validated");
                let w = wold_split(t, tol.unwrap_or(DEFAULT_TOL))?;
                let pass = w.pass;
                Ok(one(to_value(&w), pass))
            }
        }
    }

    fn recover(&self, degree: Option<usize>, order: Option<usize>, tol: Option<f64>, seed: u64) -> Result<Outcome> {
        let d = degree.unwrap_or(DEFAULT_DEGREE);
        let tol = tol.unwrap_or(ROUNDTRIP_TOL);
        match (&self.tuple, &self.operator) {
            (Some(tuple), _) => {
                let m = self.m.unwrap_or(tuple.m());
                self.recover_with(&gram(tuple, d), m, d, order, tol, seed)
            }
            (None, Some((t, basis))) => {
                let m = match self.m {
                    Some(m) => m,
                    None => classify(t, DEFAULT_CAP, DEFAULT_TOL)?.isometric_order.ok_or_else(|| {
                        Error::Precondition(format!("operator has no isometric order ≤ {DEFAULT_CAP}; pass --m"))
                    })?,
                };
                let oracle = OperatorOracle::new(t, basis.clone(), d)?;
                self.recover_with(&oracle, m, d, order, tol, seed)
            }
            (None, None) => Err(missing(&self.name, self.kind, "tuple")),
        }
    }

    fn recover_with(
        &self,
        o: &impl GramOracle<f64>,
        m: usize,
        d: usize,
        order: Option<usize>,
        tol: f64,
        seed: u64,
    ) -> Result<Outcome> {
        if m < 2 {
            return Err(Error::Precondition(format!("recovery needs m ≥ 2, got {m}")));
        }
        let s = order.unwrap_or(d.saturating_sub(m));
        let failed = |e: Error| {
            json!({
                "m": m, "S": s, "d": d, "pass": false, "feasible": [],
                "diagnostics": [e.to_string()],
            })
        };
        let body = match roundtrip_verify(o, m, s, tol) {
            Ok(cert) => {
                let mut v = serde_json::to_value(&cert).expect("serializable certificate");
                if self.kind == JobKind::Recover {
                    if let Ok(rec) = recover_tuple(o, m, s) {
                        let seqs: Vec<Value> = rec
                            .sequences
                            .iter()
                            .enumerate()
                            .map(|(i, q)| json!({ "r": i + 1, "moments": moments_json(q) }))
                            .collect();
                        v["sequences"] = Value::Array(seqs);
                        v["minEigenvalues"] =
                            json!(rec.feasibility.iter().map(|f| f.min_eigenvalue).collect::<Vec<_>>());
                    }
                }
                v
            }
            Err(
                e @ (Error::DiagonalInconsistent { .. } | Error::InfeasibleSequence { .. } | Error::IllConditioned(_)),
            ) => failed(e),
            Err(e) => return Err(e),
        };
        let pass = body["pass"].as_bool().unwrap_or(false);
        Ok(Outcome {
            records: vec![record(self, seed, &body)],
            pass,
        })
    }
}

fn identity_outcome(job: &Job, seed: u64, reports: Vec<IdentityReport>) -> Outcome {
    let pass = reports.iter().all(|r| r.pass);
    Outcome {
        records: reports.iter().map(|r| record(job, seed, r)).collect(),
        pass,
    }
}

fn to_value(body: &impl Serialize) -> Value {
    serde_json::to_value(body).expect("serializable report")
}
