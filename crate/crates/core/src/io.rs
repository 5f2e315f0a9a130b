//! JSON documents and their conversion to domain objects.
//!
//! One document per file:
//!
//! ```json
//! {"kind":"function","name":"phi","body":{"complex":"interval","ring":"p1","values":{"e":[1,2]}}}
//! ```
//!
//! References to complexes and rings are either the `name` of another
//! document in the same workspace or an inline body. Output is canonical:
//! compact, object keys sorted, integers only.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cellspace::{CellComplex, ComplexSpec, LocallyClosedSet, ProductComplex};
use crate::cfun::CFunction;
use crate::error::Error;
use crate::kring::{RingModel, RingValue};
use crate::ksheaf::{CellwiseComplex, ElementaryTerm, NormalForm, VirtualSheaf};
use crate::xform::{IncidenceGeometry, Kernel};

/// Either a workspace name or an inline body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ref<T> {
    Name(String),
    Inline(T),
}

pub type Coords = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionBody {
    pub complex: Ref<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<Ref<RingModel>>,
    #[serde(default)]
    pub values: BTreeMap<String, Coords>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermBody {
    pub coeff: i64,
    pub support: Vec<String>,
    pub class: Coords,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VSheafBody {
    pub complex: Ref<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<Ref<RingModel>>,
    pub terms: Vec<TermBody>,
}

/// Kernel values are keyed first by the left cell, then by the right cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelBody {
    pub left: Ref<ComplexSpec>,
    pub right: Ref<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<Ref<RingModel>>,
    #[serde(default)]
    pub values: BTreeMap<String, BTreeMap<String, Coords>>,
}

/// Per cell, per cohomological degree, the class of `H^j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellwiseBody {
    pub complex: Ref<ComplexSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring: Option<Ref<RingModel>>,
    #[serde(default, deserialize_with = "degree_maps")]
    pub cells: BTreeMap<String, BTreeMap<i32, Coords>>,
}

// Integer map keys arrive as strings once a tagged enum has buffered them.
fn degree_maps<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> Result<BTreeMap<String, BTreeMap<i32, Coords>>, D::Error> {
    let raw = BTreeMap::<String, BTreeMap<String, Coords>>::deserialize(d)?;
    raw.into_iter()
        .map(|(cell, degrees)| {
            let degrees = degrees
                .into_iter()
                .map(|(j, coords)| {
                    j.parse::<i32>().map(|j| (j, coords)).map_err(|_| {
                        serde::de::Error::custom(format!(
                            "degree `{j}` of cell `{cell}` is not an integer"
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
            Ok((cell, degrees))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Document {
    Complex { name: String, body: ComplexSpec },
    Ring { name: String, body: RingModel },
    Function { name: String, body: FunctionBody },
    Vsheaf { name: String, body: VSheafBody },
    Kernel { name: String, body: KernelBody },
    Cellwise { name: String, body: CellwiseBody },
}

impl Document {
    pub fn name(&self) -> &str {
        match self {
            Document::Complex { name, .. }
            | Document::Ring { name, .. }
            | Document::Function { name, .. }
            | Document::Vsheaf { name, .. }
            | Document::Kernel { name, .. }
            | Document::Cellwise { name, .. } => name,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Document::Complex { .. } => "complex",
            Document::Ring { .. } => "ring",
            Document::Function { .. } => "function",
            Document::Vsheaf { .. } => "vsheaf",
            Document::Kernel { .. } => "kernel",
            Document::Cellwise { .. } => "cellwise",
        }
    }

    /// Parses a document; every error carries the line and column where it
    /// was detected in `text`.
    pub fn parse(text: &str) -> Result<Self, DocError> {
        let raw: RawDocument<'_> = serde_json::from_str(text).map_err(DocError::from_json)?;
        let body = raw.body.get();
        let body_err = |e: serde_json::Error| {
            let err = DocError::from_json(e);
            relocate(err, text, body)
        };
        let name = raw.name;
        Ok(match raw.kind {
            DocKind::Complex => Document::Complex {
                name,
                body: serde_json::from_str(body).map_err(body_err)?,
            },
            DocKind::Ring => Document::Ring {
                name,
                body: serde_json::from_str(body).map_err(body_err)?,
            },
            DocKind::Function => Document::Function {
                name,
                body: serde_json::from_str(body).map_err(body_err)?,
            },
            DocKind::Vsheaf => Document::Vsheaf {
                name,
                body: serde_json::from_str(body).map_err(body_err)?,
            },
            DocKind::Kernel => Document::Kernel {
                name,
                body: serde_json::from_str(body).map_err(body_err)?,
            },
            DocKind::Cellwise => Document::Cellwise {
                name,
                body: serde_json::from_str(body).map_err(body_err)?,
            },
        })
    }

    /// Compact JSON with sorted keys.
    pub fn to_canonical(&self) -> String {
        canonical(self)
    }
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum DocKind {
    Complex,
    Ring,
    Function,
    Vsheaf,
    Kernel,
    Cellwise,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument<'a> {
    kind: DocKind,
    name: String,
    #[serde(borrow)]
    body: &'a serde_json::value::RawValue,
}

// Shifts a position reported relative to `inner` (a subslice of `outer`) to
// a position in `outer`.
fn relocate(err: DocError, outer: &str, inner: &str) -> DocError {
    let DocError::Parse {
        message,
        line,
        column,
    } = err
    else {
        return err;
    };
    let offset = (inner.as_ptr() as usize).saturating_sub(outer.as_ptr() as usize);
    let before = &outer[..offset.min(outer.len())];
    let start_line = before.matches('\n').count() + 1;
    let start_col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    let (line, column) = if line == 0 {
        (start_line, start_col)
    } else if line == 1 {
        (start_line, start_col + column.saturating_sub(1))
    } else {
        (start_line + line - 1, column)
    };
    // serde_json appends " at line L column C"; restate it with the shifted position.
    let message = match message.rfind(" at line ") {
        Some(i) => format!("{} at line {line} column {column}", &message[..i]),
        None => message,
    };
    DocError::Parse {
        message,
        line,
        column,
    }
}

/// Serializes any value as compact JSON with object keys sorted.
pub fn canonical<T: Serialize>(value: &T) -> String {
    // `serde_json::Value` objects are BTreeMaps, so this sorts every level.
    let v: Value = serde_json::to_value(value).expect("documents serialize");
    serde_json::to_string(&v).expect("values serialize")
}

/// Errors from reading and interpreting documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DocError {
    Parse {
        message: String,
        line: usize,
        column: usize,
    },
    Io {
        path: String,
        message: String,
    },
    Unresolved {
        kind: &'static str,
        name: String,
    },
    DuplicateName {
        name: String,
    },
    WrongKind {
        expected: &'static str,
        got: &'static str,
    },
    MissingRing,
    Invalid(Error),
}

impl DocError {
    fn from_json(e: serde_json::Error) -> Self {
        DocError::Parse {
            message: e.to_string(),
            line: e.line(),
            column: e.column(),
        }
    }

    /// Short machine-readable category.
    pub fn category(&self) -> &'static str {
        match self {
            DocError::Parse { .. } => "parse",
            DocError::Io { .. } => "io",
            DocError::Unresolved { .. } => "unresolved",
            DocError::DuplicateName { .. } => "duplicate_name",
            DocError::WrongKind { .. } => "wrong_kind",
            DocError::MissingRing => "missing_ring",
            DocError::Invalid(Error::ModelMismatch { .. })
            | DocError::Invalid(Error::ComplexMismatch) => "mismatch",
            DocError::Invalid(_) => "invariant",
        }
    }

    /// `{"error":{"kind":..,"message":..,...}}`.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("kind".into(), self.category().into());
        obj.insert("message".into(), self.to_string().into());
        match self {
            DocError::Parse { line, column, .. } => {
                obj.insert("line".into(), (*line).into());
                obj.insert("column".into(), (*column).into());
            }
            DocError::Io { path, .. } => {
                obj.insert("path".into(), path.clone().into());
            }
            DocError::Invalid(inner) => {
                obj.insert("violation".into(), variant_name(inner).into());
            }
            _ => {}
        }
        serde_json::json!({ "error": Value::Object(obj) })
    }
}

fn variant_name(e: &Error) -> &'static str {
    match e {
        Error::ModelMismatch { .. } => "model_mismatch",
        Error::Arity { .. } => "arity",
        Error::InvalidTorsionOrder(_) => "invalid_torsion_order",
        Error::UnsupportedModel { .. } => "unsupported_model",
        Error::DuplicateId(_) => "duplicate_id",
        Error::UnknownCell(_) => "unknown_cell",
        Error::NonGradedCover { .. } => "non_graded_cover",
        Error::RegularityFailure { .. } => "regularity_failure",
        Error::NonEulerianInterval { .. } => "non_eulerian_interval",
        Error::NotLocallyClosed { .. } => "not_locally_closed",
        Error::NotRelativelyOpen { .. } => "not_relatively_open",
        Error::NotASubset { .. } => "not_a_subset",
        Error::ComplexMismatch => "complex_mismatch",
        Error::NotMonotone { .. } => "not_monotone",
        Error::DimensionIncrease { .. } => "dimension_increase",
        Error::BadAssignment => "bad_assignment",
        Error::FactorMismatch(_) => "factor_mismatch",
        Error::MalformedGeometry(_) => "malformed_geometry",
        Error::Document(_) => "document",
    }
}

impl fmt::Display for DocError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocError::Parse { message, .. } => write!(f, "{message}"),
            DocError::Io { path, message } => write!(f, "{path}: {message}"),
            DocError::Unresolved { kind, name } => {
                write!(f, "no {kind} named `{name}` in the workspace")
            }
            DocError::DuplicateName { name } => {
                write!(f, "document name `{name}` is used twice in the workspace")
            }
            DocError::WrongKind { expected, got } => {
                write!(f, "expected a {expected} document, got {got}")
            }
            DocError::MissingRing => write!(f, "no ring given (add a `ring` field or pass --ring)"),
            DocError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DocError {}

impl From<Error> for DocError {
    fn from(e: Error) -> Self {
        DocError::Invalid(e)
    }
}

/// A directory of documents, indexed by name, with resolved objects cached so
/// that one name always maps to one shared complex or ring.
#[derive(Debug, Default)]
pub struct Workspace {
    docs: HashMap<String, (PathBuf, Document)>,
    complexes: Mutex<HashMap<String, Arc<CellComplex>>>,
    rings: Mutex<HashMap<String, Arc<RingModel>>>,
    default_ring: Option<Arc<RingModel>>,
}

pub fn read_document(path: &Path) -> Result<Document, DocError> {
    let text = std::fs::read_to_string(path).map_err(|e| DocError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Document::parse(&text)
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Loads every `*.json` document in `dir`.
    pub fn open(dir: &Path) -> Result<Self, DocError> {
        let mut ws = Self::new();
        let io_err = |e: std::io::Error| DocError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        };
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io_err)?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
            .collect();
        paths.sort();
        for path in paths {
            // Files that are not documents (e.g. demo parameters) are skipped.
            if let Ok(doc) = read_document(&path) {
                ws.insert(path, doc)?;
            }
        }
        Ok(ws)
    }

    pub fn insert(&mut self, path: PathBuf, doc: Document) -> Result<(), DocError> {
        let name = doc.name().to_owned();
        if let Some((existing, _)) = self.docs.get(&name) {
            if *existing != path {
                return Err(DocError::DuplicateName { name });
            }
        }
        self.docs.insert(name, (path, doc));
        Ok(())
    }

    /// Adds an in-memory document; names must be new.
    pub fn add(&mut self, doc: Document) -> Result<(), DocError> {
        if self.docs.contains_key(doc.name()) {
            return Err(DocError::DuplicateName {
                name: doc.name().to_owned(),
            });
        }
        let path = PathBuf::from(format!("<memory>/{}", doc.name()));
        self.insert(path, doc)
    }

    /// Ring used when a document has no `ring` field.
    pub fn set_default_ring(&mut self, ring: RingModel) {
        self.default_ring = Some(Arc::new(ring));
    }

    pub fn get(&self, name: &str) -> Option<&Document> {
        self.docs.get(name).map(|(_, d)| d)
    }

    pub fn complex(&self, r: &Ref<ComplexSpec>) -> Result<Arc<CellComplex>, DocError> {
        match r {
            Ref::Inline(spec) => Ok(Arc::new(CellComplex::from_spec(spec)?)),
            Ref::Name(name) => {
                if let Some(c) = self.complexes.lock().expect("cache lock").get(name) {
                    return Ok(Arc::clone(c));
                }
                let spec = match self.get(name) {
                    Some(Document::Complex { body, .. }) => body,
                    Some(other) => {
                        return Err(DocError::WrongKind {
                            expected: "complex",
                            got: other.kind(),
                        })
                    }
                    None => {
                        return Err(DocError::Unresolved {
                            kind: "complex",
                            name: name.clone(),
                        })
                    }
                };
                let c = Arc::new(CellComplex::from_spec(spec)?);
                self.complexes
                    .lock()
                    .expect("cache lock")
                    .insert(name.clone(), Arc::clone(&c));
                Ok(c)
            }
        }
    }

    pub fn ring(&self, r: Option<&Ref<RingModel>>) -> Result<Arc<RingModel>, DocError> {
        match r {
            None => self.default_ring.clone().ok_or(DocError::MissingRing),
            Some(Ref::Inline(model)) => Ok(Arc::new(model.clone())),
            Some(Ref::Name(name)) => {
                if let Some(m) = self.rings.lock().expect("cache lock").get(name) {
                    return Ok(Arc::clone(m));
                }
                let model = match self.get(name) {
                    Some(Document::Ring { body, .. }) => body.clone(),
                    Some(other) => {
                        return Err(DocError::WrongKind {
                            expected: "ring",
                            got: other.kind(),
                        })
                    }
                    None => {
                        return Err(DocError::Unresolved {
                            kind: "ring",
                            name: name.clone(),
                        })
                    }
                };
                let m = Arc::new(model);
                self.rings
                    .lock()
                    .expect("cache lock")
                    .insert(name.clone(), Arc::clone(&m));
                Ok(m)
            }
        }
    }

    pub fn function(&self, body: &FunctionBody) -> Result<CFunction, DocError> {
        let complex = self.complex(&body.complex)?;
        let ring = self.ring(body.ring.as_ref())?;
        let pairs = body
            .values
            .iter()
            .map(|(id, coords)| Ok((id.as_str(), RingValue::new(&ring, coords.clone())?)))
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(CFunction::from_pairs(&complex, &ring, pairs)?)
    }

    pub fn vsheaf(&self, body: &VSheafBody) -> Result<VirtualSheaf, DocError> {
        let complex = self.complex(&body.complex)?;
        let ring = self.ring(body.ring.as_ref())?;
        let terms = body
            .terms
            .iter()
            .map(|t| {
                let support = LocallyClosedSet::from_ids(&complex, &t.support)?;
                let klass = RingValue::new(&ring, t.class.clone())?;
                Ok((t.coeff, ElementaryTerm::new(support, klass)))
            })
            .collect::<Result<Vec<_>, Error>>()?;
        Ok(VirtualSheaf::new(&complex, &ring, terms)?)
    }

    pub fn kernel(&self, body: &KernelBody) -> Result<Kernel, DocError> {
        let left = self.complex(&body.left)?;
        let right = self.complex(&body.right)?;
        let ring = self.ring(body.ring.as_ref())?;
        let product = Arc::new(ProductComplex::new(&left, &right));
        let mut values = vec![RingValue::zero(&ring); product.complex().len()];
        for (l, row) in &body.values {
            let s = left.index_of(l)?;
            for (r, coords) in row {
                let t = right.index_of(r)?;
                values[product.pair(s, t)] = RingValue::new(&ring, coords.clone())?;
            }
        }
        let function = CFunction::from_values(product.complex(), &ring, values)?;
        Ok(Kernel::new(&product, function)?)
    }

    pub fn cellwise(&self, body: &CellwiseBody) -> Result<CellwiseComplex, DocError> {
        let complex = self.complex(&body.complex)?;
        let ring = self.ring(body.ring.as_ref())?;
        let mut out = CellwiseComplex::new(&complex, &ring);
        for (id, degrees) in &body.cells {
            for (&j, coords) in degrees {
                out.set_by_id(id, j, RingValue::new(&ring, coords.clone())?)?;
            }
        }
        Ok(out)
    }

    /// Checks that a document converts to a valid domain object.
    pub fn check(&self, doc: &Document) -> Result<(), DocError> {
        match doc {
            Document::Complex { body, .. } => {
                CellComplex::from_spec(body).map(|_| ()).map_err(Into::into)
            }
            Document::Ring { .. } => Ok(()),
            Document::Function { body, .. } => self.function(body).map(|_| ()),
            Document::Vsheaf { body, .. } => self.vsheaf(body).map(|_| ()),
            Document::Kernel { body, .. } => self.kernel(body).map(|_| ()),
            Document::Cellwise { body, .. } => self.cellwise(body).map(|_| ()),
        }
    }
}

/// Nonzero values keyed by cell id.
pub fn function_values(phi: &CFunction) -> BTreeMap<String, Coords> {
    phi.to_open_basis()
        .into_iter()
        .map(|(id, v)| (id, v.coords().to_vec()))
        .collect()
}

/// A function document on a referenced complex.
pub fn function_document(
    name: &str,
    complex: Ref<ComplexSpec>,
    ring: Option<Ref<RingModel>>,
    phi: &CFunction,
) -> Document {
    Document::Function {
        name: name.to_owned(),
        body: FunctionBody {
            complex,
            ring,
            values: function_values(phi),
        },
    }
}

/// `[{"cell":..,"class":..}, ...]`.
pub fn normal_form_json(nf: &NormalForm) -> Value {
    Value::Array(
        nf.iter()
            .map(|(id, v)| serde_json::json!({ "cell": id, "class": v.coords() }))
            .collect(),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GeometryRepr {
    points: usize,
    lines: Vec<Vec<usize>>,
}

/// `{"points":7,"lines":[[0,1,2],...]}`.
pub fn parse_geometry(text: &str) -> Result<IncidenceGeometry, DocError> {
    let repr: GeometryRepr = serde_json::from_str(text).map_err(DocError::from_json)?;
    Ok(IncidenceGeometry::new(repr.points, repr.lines)?)
}
