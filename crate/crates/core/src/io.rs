//! JSON file formats for quivers, representations and σ-morphisms.
//!
//! Quiver: `{"vertices": 3, "arrows": [{"id": "a", "src": 1, "tgt": 2}], "first_vertex": 1}`
//! with endpoints given as vertex labels.
//!
//! Representation: `{"quiver": <path or inline quiver>, "field": "Q" | {"p": 3},
//! "dim": [1, 2], "matrices": {"a": [["1/2", "0"]]}}`. Entries may be JSON
//! integers or rational strings. A relative quiver path is resolved against the
//! representation file's directory.
//!
//! σ-morphism: `{"domain": [2], "codomain": [1], "entries": [[[{"coeff": "1",
//! "path": ["x"]}]]]}` where each path lists arrow ids in the order they are
//! walked and `[]` is the trivial path. A file holds one object or an array.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{parse_rational, Field, FieldTag, PrimeField, Rationals};
use crate::localization::{PathCombination, SigmaMorphism};
use crate::matrix::Matrix;
use crate::quiver::{Arrow, DimVector, Path, Quiver};
use crate::rep::Representation;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct QuiverFile {
    vertices: usize,
    arrows: Vec<ArrowFile>,
    #[serde(default = "default_first", skip_serializing_if = "is_default_first")]
    first_vertex: usize,
}

fn default_first() -> usize {
    1
}

fn is_default_first(v: &usize) -> bool {
    *v == 1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ArrowFile {
    id: String,
    src: i64,
    tgt: i64,
}

impl QuiverFile {
    fn build(self) -> Result<Quiver> {
        let arrows: Vec<(&str, i64, i64)> =
            self.arrows.iter().map(|a| (a.id.as_str(), a.src, a.tgt)).collect();
        Quiver::from_labels_with_first(self.vertices, self.first_vertex, &arrows)
    }
}

pub fn quiver_from_value(v: Value) -> Result<Quiver> {
    let file: QuiverFile = serde_json::from_value(v)?;
    file.build()
}

pub fn quiver_to_value(q: &Quiver) -> Value {
    let file = QuiverFile {
        vertices: q.vertex_count(),
        first_vertex: q.first_label(),
        arrows: q
            .arrows()
            .iter()
            .map(|a: &Arrow| ArrowFile {
                id: a.id.clone(),
                src: q.label(a.src) as i64,
                tgt: q.label(a.tgt) as i64,
            })
            .collect(),
    };
    serde_json::to_value(file).expect("quiver serializes")
}

pub fn parse_quiver(text: &str) -> Result<Quiver> {
    quiver_from_value(serde_json::from_str(text)?)
}

pub fn load_quiver(path: &FsPath) -> Result<Quiver> {
    parse_quiver(&fs::read_to_string(path)?)
}

/// A representation over whichever field its file names.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyRepresentation {
    Rational(Representation<Rationals>),
    Prime(Representation<PrimeField>),
}

impl AnyRepresentation {
    pub fn field_tag(&self) -> FieldTag {
        match self {
            AnyRepresentation::Rational(r) => r.field().tag(),
            AnyRepresentation::Prime(r) => r.field().tag(),
        }
    }

    pub fn quiver(&self) -> &Arc<Quiver> {
        match self {
            AnyRepresentation::Rational(r) => r.quiver(),
            AnyRepresentation::Prime(r) => r.quiver(),
        }
    }

    pub fn dim(&self) -> &DimVector {
        match self {
            AnyRepresentation::Rational(r) => r.dim(),
            AnyRepresentation::Prime(r) => r.dim(),
        }
    }
}

fn parse_field(v: &Value) -> Result<FieldTag> {
    match v {
        Value::String(s) if s == "Q" => Ok(FieldTag::Rationals),
        Value::Object(o) => {
            let p = o
                .get("p")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::Parse("field object needs an integer `p`".into()))?;
            PrimeField::new(p)?;
            Ok(FieldTag::PrimeField(p))
        }
        _ => Err(Error::Parse(r#"field must be "Q" or {"p": <prime>}"#.into())),
    }
}

fn field_value(tag: FieldTag) -> Value {
    match tag {
        FieldTag::Rationals => Value::String("Q".into()),
        FieldTag::PrimeField(p) => serde_json::json!({ "p": p }),
    }
}

fn parse_entry(v: &Value) -> Result<BigRational> {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(i) => Ok(BigRational::from_integer(i.into())),
            None => Err(Error::Parse(format!("matrix entry `{n}` is not an integer; quote rationals"))),
        },
        Value::String(s) => parse_rational(s),
        other => Err(Error::Parse(format!("bad matrix entry `{other}`"))),
    }
}

fn build_rep<F: Field>(
    quiver: Arc<Quiver>,
    field: F,
    dim: DimVector,
    matrices: &BTreeMap<String, Value>,
) -> Result<Representation<F>> {
    quiver.check_dim(&dim)?;
    for id in matrices.keys() {
        quiver.arrow_by_id(id)?;
    }
    let mut maps = Vec::with_capacity(quiver.arrows().len());
    for a in quiver.arrows() {
        let (r, c) = (dim[a.tgt], dim[a.src]);
        let Some(m) = matrices.get(&a.id) else {
            if r * c == 0 {
                maps.push(Matrix::zeros(&field, r, c));
                continue;
            }
            return Err(Error::Parse(format!("no matrix given for arrow `{}`", a.id)));
        };
        let rows = m
            .as_array()
            .ok_or_else(|| Error::Parse(format!("matrix of `{}` must be a list of rows", a.id)))?;
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            let row = row
                .as_array()
                .ok_or_else(|| Error::Parse(format!("matrix of `{}` must be a list of rows", a.id)))?;
            if row.len() != c {
                return Err(Error::ShapeMismatch(format!(
                    "arrow `{}` needs rows of length {c}, got {}",
                    a.id,
                    row.len()
                )));
            }
            for e in row {
                let q = parse_entry(e)?;
                data.push(field.from_rational(&q).ok_or_else(|| Error::NotInField {
                    value: q.to_string(),
                    field: field.tag().to_string(),
                })?);
            }
        }
        if rows.len() != r && !(r * c == 0 && rows.is_empty()) {
            return Err(Error::ShapeMismatch(format!(
                "arrow `{}` needs {r} rows, got {}",
                a.id,
                rows.len()
            )));
        }
        maps.push(Matrix::from_rows(r, c, data)?);
    }
    Representation::new(quiver, field, dim, maps)
}

/// Parse a representation. `base_dir` resolves a quiver given by path;
/// `quiver` is used when the file carries none and overrides nothing otherwise.
pub fn parse_representation(
    text: &str,
    base_dir: Option<&FsPath>,
    quiver: Option<Arc<Quiver>>,
) -> Result<AnyRepresentation> {
    let v: Value = serde_json::from_str(text)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("representation must be a JSON object".into()))?;
    let q = match obj.get("quiver") {
        Some(Value::String(p)) => {
            let path = match base_dir {
                Some(d) => d.join(p),
                None => PathBuf::from(p),
            };
            Arc::new(load_quiver(&path)?)
        }
        Some(inline @ Value::Object(_)) => Arc::new(quiver_from_value(inline.clone())?),
        Some(_) => return Err(Error::Parse("`quiver` must be a path or an object".into())),
        None => quiver.ok_or_else(|| {
            Error::Parse("representation names no quiver and none was supplied".into())
        })?,
    };
    let tag = parse_field(obj.get("field").unwrap_or(&Value::Null))?;
    let dim: Vec<usize> = serde_json::from_value(
        obj.get("dim")
            .cloned()
            .ok_or_else(|| Error::Parse("representation needs `dim`".into()))?,
    )?;
    let matrices: BTreeMap<String, Value> = match obj.get("matrices") {
        Some(m) => serde_json::from_value(m.clone())?,
        None => BTreeMap::new(),
    };
    let dim = DimVector(dim);
    match tag {
        FieldTag::Rationals => Ok(AnyRepresentation::Rational(build_rep(q, Rationals, dim, &matrices)?)),
        FieldTag::PrimeField(p) => Ok(AnyRepresentation::Prime(build_rep(
            q,
            PrimeField::new(p)?,
            dim,
            &matrices,
        )?)),
    }
}

pub fn load_representation(path: &FsPath, quiver: Option<Arc<Quiver>>) -> Result<AnyRepresentation> {
    let text = fs::read_to_string(path)?;
    parse_representation(&text, path.parent(), quiver)
}

/// Serialize with the quiver inlined.
pub fn representation_to_value<F: Field>(rep: &Representation<F>) -> Value {
    let f = rep.field();
    let matrices: serde_json::Map<String, Value> = rep
        .quiver()
        .arrows()
        .iter()
        .zip(rep.maps())
        .map(|(a, m)| {
            let rows: Vec<Value> = (0..m.rows())
                .map(|i| Value::Array(m.row(i).iter().map(|e| Value::String(f.format(e))).collect()))
                .collect();
            (a.id.clone(), Value::Array(rows))
        })
        .collect();
    serde_json::json!({
        "quiver": quiver_to_value(rep.quiver()),
        "field": field_value(f.tag()),
        "dim": rep.dim().0,
        "matrices": matrices,
    })
}

#[derive(Clone, Debug, Deserialize)]
struct TermFile {
    coeff: Value,
    path: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
struct SigmaFile {
    domain: Vec<i64>,
    codomain: Vec<i64>,
    entries: Vec<Vec<Vec<TermFile>>>,
}

fn build_sigma(q: &Arc<Quiver>, file: SigmaFile) -> Result<SigmaMorphism> {
    let domain = file
        .domain
        .iter()
        .map(|&l| q.index_of_label(l))
        .collect::<Result<Vec<_>>>()?;
    let codomain = file
        .codomain
        .iter()
        .map(|&l| q.index_of_label(l))
        .collect::<Result<Vec<_>>>()?;
    if file.entries.len() != domain.len() {
        return Err(Error::ShapeMismatch(format!(
            "sigma has {} domain summands but {} entry rows",
            domain.len(),
            file.entries.len()
        )));
    }
    let mut entries = Vec::with_capacity(domain.len());
    for (p, row) in file.entries.into_iter().enumerate() {
        if row.len() != codomain.len() {
            return Err(Error::ShapeMismatch(format!(
                "entry row {} has {} columns, expected {}",
                p + 1,
                row.len(),
                codomain.len()
            )));
        }
        let mut out_row = Vec::with_capacity(row.len());
        for (qi, terms) in row.into_iter().enumerate() {
            let (src, tgt) = (codomain[qi], domain[p]);
            let mut parsed = Vec::with_capacity(terms.len());
            for t in terms {
                let path = if t.path.is_empty() {
                    if src != tgt {
                        return Err(Error::InvalidArgument(format!(
                            "trivial path in entry ({}, {}) joins different vertices",
                            p + 1,
                            qi + 1
                        )));
                    }
                    Path::trivial(src)
                } else {
                    let ids: Vec<&str> = t.path.iter().map(String::as_str).collect();
                    Path::from_ids(q, &ids)?
                };
                parsed.push((parse_entry(&t.coeff)?, path));
            }
            out_row.push(PathCombination::new(q, src, tgt, parsed)?);
        }
        entries.push(out_row);
    }
    SigmaMorphism::new(q.clone(), domain, codomain, entries)
}

/// One σ-object or an array of them.
pub fn parse_sigmas(text: &str, q: &Arc<Quiver>) -> Result<Vec<SigmaMorphism>> {
    let v: Value = serde_json::from_str(text)?;
    let items = match v {
        Value::Array(items) => items,
        other => vec![other],
    };
    items
        .into_iter()
        .map(|item| build_sigma(q, serde_json::from_value(item)?))
        .collect()
}

pub fn load_sigmas(path: &FsPath, q: &Arc<Quiver>) -> Result<Vec<SigmaMorphism>> {
    parse_sigmas(&fs::read_to_string(path)?, q)
}

pub fn sigma_to_value(sigma: &SigmaMorphism) -> Value {
    let q = sigma.quiver();
    let entries: Vec<Vec<Vec<Value>>> = sigma
        .entries()
        .iter()
        .map(|row| {
            row.iter()
                .map(|c| {
                    c.terms()
                        .iter()
                        .map(|(coeff, p)| {
                            serde_json::json!({
                                "coeff": coeff.to_string(),
                                "path": p.ids(q),
                            })
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    serde_json::json!({
        "domain": sigma.domain().iter().map(|&v| q.label(v)).collect::<Vec<_>>(),
        "codomain": sigma.codomain().iter().map(|&v| q.label(v)).collect::<Vec<_>>(),
        "entries": entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::examples::kronecker;

    #[test]
    fn quiver_round_trip() {
        let q = kronecker(3);
        let back = quiver_from_value(quiver_to_value(&q)).unwrap();
        assert_eq!(q, back);
        let bad = r#"{"vertices": 2, "arrows": [{"id": "a", "src": 1, "tgt": 5}]}"#;
        assert!(matches!(parse_quiver(bad), Err(Error::VertexOutOfRange { vertex: 5, .. })));
        let dup = r#"{"vertices": 2, "arrows": [{"id": "a", "src": 1, "tgt": 2}, {"id": "a", "src": 1, "tgt": 2}]}"#;
        assert!(matches!(parse_quiver(dup), Err(Error::DuplicateArrow(_))));
    }

    #[test]
    fn representation_parse() {
        let text = r#"{
            "quiver": {"vertices": 2, "arrows": [{"id": "a", "src": 1, "tgt": 2}]},
            "field": {"p": 3},
            "dim": [1, 2],
            "matrices": {"a": [["1/2"], [4]]}
        }"#;
        let AnyRepresentation::Prime(r) = parse_representation(text, None, None).unwrap() else {
            panic!("expected F_3");
        };
        assert_eq!(r.maps()[0].entries(), &[2, 1]);
        let back = representation_to_value(&r);
        let again = parse_representation(&back.to_string(), None, None).unwrap();
        assert_eq!(again, AnyRepresentation::Prime(r));

        let bad = text.replace("\"1/2\"", "\"1/3\"");
        assert!(matches!(parse_representation(&bad, None, None), Err(Error::NotInField { .. })));
        let short = text.replace(r#"[["1/2"], [4]]"#, r#"[["1/2"]]"#);
        assert!(matches!(parse_representation(&short, None, None), Err(Error::ShapeMismatch(_))));
        let unknown = text.replace(r#""a": "#, r#""b": "#);
        assert!(parse_representation(&unknown, None, None).is_err());
    }

    #[test]
    fn quiver_by_relative_path() {
        let dir = std::env::temp_dir().join(format!("qm-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        fs::write(dir.join("k3.json"), quiver_to_value(&kronecker(3)).to_string()).unwrap();
        let rep = r#"{"quiver": "k3.json", "field": "Q", "dim": [1, 1],
                      "matrices": {"x": [[1]], "y": [[0]], "z": [["-2/3"]]}}"#;
        fs::write(dir.join("m.json"), rep).unwrap();
        let r = load_representation(&dir.join("m.json"), None).unwrap();
        assert_eq!(r.field_tag(), FieldTag::Rationals);
        assert_eq!(r.dim(), &DimVector(vec![1, 1]));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn sigma_round_trip() {
        let q = Arc::new(kronecker(3));
        let text = r#"{"domain": [2], "codomain": [1],
                       "entries": [[[{"coeff": "1", "path": ["x"]}, {"coeff": 2, "path": ["y"]}]]]}"#;
        let s = parse_sigmas(text, &q).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].entry(0, 0).display(&q).to_string(), "x + (2) y");
        let back = parse_sigmas(&sigma_to_value(&s[0]).to_string(), &q).unwrap();
        assert_eq!(back, s);
        let wrong = text.replace(r#""domain": [2], "codomain": [1]"#, r#""domain": [1], "codomain": [2]"#);
        assert!(parse_sigmas(&wrong, &q).is_err());
    }
}
