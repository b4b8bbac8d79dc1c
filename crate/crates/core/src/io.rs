//! Strict JSON formats for measures, polynomials, tuples, operators and Gram
//! matrices. Complex scalars are `[re, im]` pairs; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMat, CVec};
use crate::measures::{make_atomic, make_trig, MeasureBody, MomentSource, SemiSpectralMeasure};
use crate::operators::OperatorMatrix;
use crate::polynomials::VectorPolynomial;
use crate::scalar::{cx, lit, to_f64, Cx, Real};
use crate::spaces::{GramModel, MeasureTuple};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Atomic,
    Trig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomJson {
    pub angle: f64,
    pub weight: JsonMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureJson {
    #[serde(rename = "dimE")]
    pub dim_e: usize,
    pub kind: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<AtomJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<BTreeMap<String, JsonMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    #[serde(rename = "dimE")]
    pub dim_e: usize,
    pub coeffs: Vec<Vec<JsonComplex>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleJson {
    pub m: usize,
    pub measures: Vec<MeasureJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub matrix: JsonMatrix,
    /// Columns spanning the designated wandering subspace, one vector each.
    #[serde(rename = "kernelBasis", default, skip_serializing_if = "Option::is_none")]
    pub kernel_basis: Option<Vec<Vec<JsonComplex>>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GramJson {
    pub d: usize,
    #[serde(rename = "dimE")]
    pub dim_e: usize,
    pub ordering: String,
    pub matrix: JsonMatrix,
}

fn parse_err(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

pub fn from_str<D: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| parse_err(what, e))
}

pub fn read_file<D: for<'de> Deserialize<'de>>(what: &str, path: &Path) -> Result<D> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    from_str(what, &text)
}

pub fn complex_from<T: Real>(z: JsonComplex) -> Result<Cx<T>> {
    if !(z[0].is_finite() && z[1].is_finite()) {
        return Err(Error::Parse(format!("non-finite complex entry [{}, {}]", z[0], z[1])));
    }
    Ok(cx(lit(z[0]), lit(z[1])))
}

pub fn complex_to<T: Real>(z: Cx<T>) -> JsonComplex {
    [to_f64(z.re), to_f64(z.im)]
}

pub fn matrix_from<T: Real>(key: &str, rows: &JsonMatrix, nrows: usize, ncols: usize) -> Result<CMat<T>> {
    if rows.len() != nrows || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse(format!("{key}: expected a {nrows}×{ncols} matrix")));
    }
    let mut m = CMat::zeros(nrows, ncols);
    for (i, row) in rows.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = complex_from(*z)?;
        }
    }
    Ok(m)
}

pub fn matrix_to<T: Real>(m: &CMat<T>) -> JsonMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| complex_to(m[(i, j)])).collect()).collect()
}

fn vector_from<T: Real>(key: &str, v: &[JsonComplex], dim: usize) -> Result<CVec<T>> {
    if v.len() != dim {
        return Err(Error::Parse(format!("{key}: expected length {dim}, found {}", v.len())));
    }
    Ok(CVec::from_iterator(dim, v.iter().map(|z| complex_from(*z)).collect::<Result<Vec<_>>>()?))
}

impl MeasureJson {
    pub fn build<T: Real>(&self) -> Result<SemiSpectralMeasure<T>> {
        let d = self.dim_e;
        match self.kind {
            MeasureKind::Atomic => {
                if self.coeffs.is_some() {
                    return Err(Error::Parse("coeffs: not allowed for kind \"atomic\"".into()));
                }
                let atoms = self.atoms.as_ref().ok_or_else(|| Error::Parse("atoms: missing for kind \"atomic\"".into()))?;
                let parsed = atoms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| Ok((lit(a.angle), matrix_from(&format!("atoms[{i}].weight"), &a.weight, d, d)?)))
                    .collect::<Result<Vec<_>>>()?;
                make_atomic(d, parsed)
            }
            MeasureKind::Trig => {
                if self.atoms.is_some() {
                    return Err(Error::Parse("atoms: not allowed for kind \"trig\"".into()));
                }
                let coeffs = self.coeffs.as_ref().ok_or_else(|| Error::Parse("coeffs: missing for kind \"trig\"".into()))?;
                let mut out = BTreeMap::new();
                for (k, m) in coeffs {
                    let s: i64 = k.parse().map_err(|_| Error::Parse(format!("coeffs: key \"{k}\" is not an integer")))?;
                    out.insert(s, matrix_from(&format!("coeffs[{k}]"), m, d, d)?);
                }
                make_trig(d, out)
            }
        }
    }

    pub fn from_measure<T: Real>(mu: &SemiSpectralMeasure<T>) -> Self {
        match mu.body() {
            MeasureBody::Atomic(atoms) => Self {
                dim_e: mu.dim(),
                kind: MeasureKind::Atomic,
                atoms: Some(
                    atoms.iter().map(|a| AtomJson { angle: to_f64(a.angle), weight: matrix_to(a.weight.matrix()) }).collect(),
                ),
                coeffs: None,
            },
            MeasureBody::TrigDensity(c) => Self {
                dim_e: mu.dim(),
                kind: MeasureKind::Trig,
                atoms: None,
                coeffs: Some(c.iter().map(|(s, m)| (s.to_string(), matrix_to(m))).collect()),
            },
        }
    }
}

impl PolynomialJson {
    pub fn build<T: Real>(&self) -> Result<VectorPolynomial<T>> {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, v)| vector_from(&format!("coeffs[{k}]"), v, self.dim_e))
            .collect::<Result<Vec<_>>>()?;
        if coeffs.is_empty() {
            return Ok(VectorPolynomial::zero(self.dim_e));
        }
        VectorPolynomial::new(self.dim_e, coeffs)
    }

    pub fn from_polynomial<T: Real>(f: &VectorPolynomial<T>) -> Self {
        Self { dim_e: f.dim(), coeffs: f.coeffs().iter().map(|c| c.iter().map(|z| complex_to(*z)).collect()).collect() }
    }
}

impl TupleJson {
    pub fn build<T: Real>(&self) -> Result<MeasureTuple<T>> {
        let ms = self.measures.iter().map(|m| m.build()).collect::<Result<Vec<_>>>()?;
        MeasureTuple::new(self.m, ms)
    }

    pub fn from_tuple<T: Real>(t: &MeasureTuple<T>) -> Self {
        Self { m: t.m(), measures: t.measures().iter().map(MeasureJson::from_measure).collect() }
    }
}

impl OperatorJson {
    pub fn build<T: Real>(&self) -> Result<(OperatorMatrix<T>, Option<CMat<T>>)> {
        let t = OperatorMatrix::new(matrix_from("matrix", &self.matrix, self.dim, self.dim)?)?;
        let basis = match &self.kernel_basis {
            None => None,
            Some(cols) => {
                let vs = cols
                    .iter()
                    .enumerate()
                    .map(|(i, c)| vector_from(&format!("kernelBasis[{i}]"), c, self.dim))
                    .collect::<Result<Vec<_>>>()?;
                Some(CMat::from_columns(&vs))
            }
        };
        Ok((t, basis))
    }

    pub fn from_operator<T: Real>(t: &OperatorMatrix<T>) -> Self {
        Self { dim: t.dim(), matrix: matrix_to(t.matrix()), kernel_basis: None }
    }
}

impl GramJson {
    pub fn from_gram<T: Real>(g: &GramModel<T>) -> Self {
        Self { d: g.degree, dim_e: g.dim, ordering: "k-major".into(), matrix: matrix_to(&g.matrix) }
    }
}

/// Writes `contents` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    use std::io::Write;
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let io = |e: std::io::Error| Error::Parse(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
