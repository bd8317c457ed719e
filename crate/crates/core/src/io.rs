//! JSON input files.
//!
//! * poset: `{"kind":"finite","elements":[..],"leq":[["p","q"],..]}`,
//!   `{"kind":"builtin","name":"powerset"|"chain","param":n}` or
//!   `{"kind":"symbolic","name":"omega","probe":n}`
//! * system: `{"poset":..,"fibers":{"p":["a",..]},"maps":{"p<q":{"a":"c"}}}`
//!   or `{"builtin":"restriction","param":n}`
//! * tree: `{"nodes":[..],"parent":{"child":"parent"}}`
//! * group system: `{"poset":..,"groups":{"p":{"elements":[..],"mul":[[..]],"id":0}},"homs":{"p<q":[..]}}`
//! * limit element: `{"system":"path","variant":"free"|"abelian","words":{"p":"a^2.b^-1"}}`
//!
//! A `"poset"` or `"system"` field may be given inline or as a path relative
//! to the file that mentions it.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::Value;
use thiserror::Error;

use crate::grouplimit::{GroupSystem, LimitElement, LimitError, Variant};
use crate::invsys::{InverseSystem, SystemError, Tree};
use crate::model::{CayleyTable, FiniteGroupSystem, Hom, ModelError};
use crate::poset::{DirectedSet, Point, PosetError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path} is not valid JSON: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Schema(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn schema(e: serde_json::Error, what: &str) -> IoError {
    IoError::Schema(format!("malformed {what}: {e}"))
}

/// Reads and parses a JSON file.
pub fn read_json(path: &Path) -> Result<Value, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: path.to_owned(), source })?;
    serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.to_owned(), source })
}

/// An inline value, or the contents of the file a string value names.
fn resolve(v: &Value, dir: &Path) -> Result<(Value, PathBuf), IoError> {
    match v {
        Value::String(rel) => {
            let path = dir.join(rel);
            let parent = path.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok((read_json(&path)?, parent))
        }
        other => Ok((other.clone(), dir.to_path_buf())),
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum PosetSpec {
    Finite {
        elements: Vec<String>,
        #[serde(default)]
        leq: Vec<(String, String)>,
    },
    Builtin {
        name: String,
        param: usize,
    },
    Symbolic {
        name: String,
        probe: usize,
    },
}

pub fn poset_from_json(v: &Value) -> Result<DirectedSet, IoError> {
    let spec: PosetSpec = serde_json::from_value(v.clone()).map_err(|e| schema(e, "poset"))?;
    Ok(match spec {
        PosetSpec::Finite { elements, leq } => DirectedSet::from_pairs(&elements, &leq)?,
        PosetSpec::Builtin { name, param } => match name.as_str() {
            "powerset" => DirectedSet::powerset(param)?,
            "chain" => DirectedSet::chain(param)?,
            _ => return Err(PosetError::UnknownBuiltin(name).into()),
        },
        PosetSpec::Symbolic { name, probe } => match name.as_str() {
            "omega" => DirectedSet::omega(probe)?,
            _ => return Err(PosetError::UnknownBuiltin(name).into()),
        },
    })
}

pub fn load_poset(path: &Path) -> Result<DirectedSet, IoError> {
    poset_from_json(&read_json(path)?)
}

/// Splits a `"p<q"` key into loaded points. Ids may themselves contain
/// `<`, so every split is tried and exactly one must name two points.
pub fn parse_pair_key(base: &DirectedSet, key: &str) -> Result<(Point, Point), IoError> {
    let splits: Vec<(Point, Point)> = key
        .match_indices('<')
        .filter_map(|(i, _)| Some((base.lookup(&key[..i]).ok()?, base.lookup(&key[i + 1..]).ok()?)))
        .collect();
    match splits.as_slice() {
        [one] => Ok(*one),
        [] => Err(IoError::Schema(format!("`{key}` is not of the form p<q over known points"))),
        _ => Err(IoError::Schema(format!("`{key}` splits into points in more than one way"))),
    }
}

#[derive(Deserialize)]
struct SystemSpec {
    poset: Value,
    fibers: HashMap<String, Vec<String>>,
    #[serde(default)]
    maps: HashMap<String, HashMap<String, String>>,
}

#[derive(Deserialize)]
struct TreeSpec {
    nodes: Vec<String>,
    #[serde(default)]
    parent: HashMap<String, String>,
}

pub fn tree_from_json(v: &Value) -> Result<Tree, IoError> {
    let spec: TreeSpec = serde_json::from_value(v.clone()).map_err(|e| schema(e, "tree"))?;
    Ok(Tree::from_named(spec.nodes, &spec.parent)?)
}

pub fn load_tree(path: &Path) -> Result<Tree, IoError> {
    tree_from_json(&read_json(path)?)
}

/// A system file, a builtin restriction system, or a tree (read as its
/// level system).
pub fn system_from_json(v: &Value, dir: &Path) -> Result<InverseSystem, IoError> {
    if let Some(name) = v.get("builtin") {
        let param = v.get("param").and_then(Value::as_u64).ok_or_else(|| IoError::Schema("builtin system needs an integer `param`".into()))?;
        return match name.as_str() {
            Some("restriction") => Ok(InverseSystem::restriction(param as usize)?),
            _ => Err(PosetError::UnknownBuiltin(name.to_string()).into()),
        };
    }
    if v.get("nodes").is_some() {
        return Ok(tree_from_json(v)?.inverse_system()?);
    }
    let spec: SystemSpec = serde_json::from_value(v.clone()).map_err(|e| schema(e, "system"))?;
    let (poset, _) = resolve(&spec.poset, dir)?;
    let base = poset_from_json(&poset)?;
    let mut maps = Vec::with_capacity(spec.maps.len());
    for (key, m) in spec.maps {
        let (p, q) = parse_pair_key(&base, &key)?;
        maps.push((base.name(p).to_string(), base.name(q).to_string(), m));
    }
    // deterministic order for error reporting
    maps.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    Ok(InverseSystem::from_named(base, &spec.fibers, &maps)?)
}

pub fn load_system(path: &Path) -> Result<InverseSystem, IoError> {
    system_from_json(&read_json(path)?, &parent_dir(path))
}

fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

#[derive(Deserialize)]
struct TableSpec {
    elements: Vec<String>,
    mul: Vec<Vec<usize>>,
    id: usize,
}

#[derive(Deserialize)]
struct GroupSystemSpec {
    poset: Value,
    groups: HashMap<String, TableSpec>,
    #[serde(default)]
    homs: HashMap<String, Vec<usize>>,
}

pub fn group_system_from_json(v: &Value, dir: &Path) -> Result<FiniteGroupSystem, IoError> {
    let spec: GroupSystemSpec = serde_json::from_value(v.clone()).map_err(|e| schema(e, "group system"))?;
    let (poset, _) = resolve(&spec.poset, dir)?;
    let base = poset_from_json(&poset)?;
    for id in spec.groups.keys() {
        base.lookup(id)?;
    }
    let mut groups = Vec::with_capacity(base.len());
    for id in base.names() {
        let t = spec.groups.get(id).ok_or_else(|| SystemError::MissingFiber(id.clone()))?;
        let table = CayleyTable::new(t.elements.clone(), t.mul.clone(), t.id)
            .map_err(|reason| ModelError::NotAGroup { point: id.clone(), reason })?;
        groups.push(table);
    }
    let mut homs = Vec::with_capacity(spec.homs.len());
    for (key, map) in spec.homs {
        let (lower, upper) = parse_pair_key(&base, &key)?;
        homs.push(Hom { lower, upper, map });
    }
    homs.sort_by_key(|h| (h.lower, h.upper));
    Ok(FiniteGroupSystem::new(base, groups, homs)?)
}

pub fn load_group_system(path: &Path) -> Result<FiniteGroupSystem, IoError> {
    group_system_from_json(&read_json(path)?, &parent_dir(path))
}

#[derive(Deserialize)]
struct ElementSpec {
    #[serde(default)]
    system: Option<Value>,
    variant: String,
    words: HashMap<String, String>,
}

/// Reads a limit element. `system` overrides the file's own `"system"`.
pub fn element_from_json(
    v: &Value,
    dir: &Path,
    system: Option<InverseSystem>,
) -> Result<(GroupSystem, LimitElement), IoError> {
    let spec: ElementSpec = serde_json::from_value(v.clone()).map_err(|e| schema(e, "limit element"))?;
    let variant: Variant = spec.variant.parse().map_err(IoError::Schema)?;
    let carrier = match (system, &spec.system) {
        (Some(sys), _) => sys,
        (None, Some(s)) => {
            let (sv, sdir) = resolve(s, dir)?;
            system_from_json(&sv, &sdir)?
        }
        (None, None) => return Err(IoError::Schema("limit element names no system".into())),
    };
    let g = GroupSystem::new(carrier, variant);
    let el = g.eager_from_literals(&spec.words)?;
    Ok((g, el))
}

pub fn load_element(path: &Path, system: Option<InverseSystem>) -> Result<(GroupSystem, LimitElement), IoError> {
    element_from_json(&read_json(path)?, &parent_dir(path), system)
}

/// Any input file, recognized by its keys.
#[derive(Debug)]
pub enum Document {
    Poset(DirectedSet),
    System(InverseSystem),
    Tree(Tree),
    GroupSystem(FiniteGroupSystem),
    Element(GroupSystem, LimitElement),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Poset(_) => "poset",
            Document::System(_) => "system",
            Document::Tree(_) => "tree",
            Document::GroupSystem(_) => "group-system",
            Document::Element(..) => "limit-element",
        }
    }
}

pub fn load_document(path: &Path) -> Result<Document, IoError> {
    let v = read_json(path)?;
    let dir = parent_dir(path);
    let has = |k: &str| v.get(k).is_some();
    if has("words") {
        let (g, el) = element_from_json(&v, &dir, None)?;
        Ok(Document::Element(g, el))
    } else if has("groups") {
        Ok(Document::GroupSystem(group_system_from_json(&v, &dir)?))
    } else if has("nodes") {
        Ok(Document::Tree(tree_from_json(&v)?))
    } else if has("fibers") || has("builtin") {
        Ok(Document::System(system_from_json(&v, &dir)?))
    } else if has("kind") {
        Ok(Document::Poset(poset_from_json(&v)?))
    } else {
        Err(IoError::Schema("unrecognized input file".into()))
    }
}
