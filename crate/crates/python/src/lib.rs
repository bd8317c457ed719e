//! Python bindings: directed sets and the game, inverse systems and trees,
//! free and free abelian limit groups, and the automorphism model check.
//!
//! Structured results (threads, decompositions, reports) come back as plain
//! dicts and lists.

use std::collections::HashMap;
use std::path::Path;
use std::sync::Arc;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::{json, Value};

use invlim_core::grouplimit::{GroupSystem, LimitElement, Variant};
use invlim_core::invsys::{check_good, InverseSystem, Thread, Tree};
use invlim_core::io;
use invlim_core::model::{verify_phi_isomorphism, FiniteGroupSystem};
use invlim_core::poset::{play_bounded, player_one_bound_strategy, DirectedSet, SeededRandomStrategy, Side};
use invlim_core::words::Word;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

#[pyclass(name = "DirectedSet", module = "invlim", frozen)]
struct PyDirectedSet(DirectedSet);

impl PyDirectedSet {
    fn point(&self, id: &str) -> PyResult<usize> {
        self.0.lookup(id).map_err(err)
    }
}

#[pymethods]
impl PyDirectedSet {
    /// Finite preorder from elements and `(lower, upper)` pairs; must be directed.
    #[staticmethod]
    fn from_pairs(elements: Vec<String>, leq: Vec<(String, String)>) -> PyResult<Self> {
        DirectedSet::from_pairs(&elements, &leq).map(Self).map_err(err)
    }

    #[staticmethod]
    fn powerset(n: usize) -> PyResult<Self> {
        DirectedSet::powerset(n).map(Self).map_err(err)
    }

    #[staticmethod]
    fn chain(n: usize) -> PyResult<Self> {
        DirectedSet::chain(n).map(Self).map_err(err)
    }

    /// The naturals, with the first `probe` loaded.
    #[staticmethod]
    fn omega(probe: usize) -> PyResult<Self> {
        DirectedSet::omega(probe).map(Self).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        io::load_poset(Path::new(path)).map(Self).map_err(err)
    }

    #[getter]
    fn names(&self) -> Vec<String> {
        self.0.names().to_vec()
    }

    #[getter]
    fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn leq(&self, a: &str, b: &str) -> PyResult<bool> {
        Ok(self.0.leq(self.point(a)?, self.point(b)?))
    }

    /// First element in load order above every given element.
    fn upper_bound(&self, ids: Vec<String>) -> PyResult<String> {
        let pts = ids.iter().map(|s| self.point(s)).collect::<PyResult<Vec<_>>>()?;
        Ok(self.0.name(self.0.upper_bound(&pts).map_err(err)?).to_string())
    }

    fn maximum(&self) -> Option<String> {
        self.0.maximum().map(|m| self.0.name(m).to_string())
    }

    /// Bound strategy against a seeded random opponent.
    #[pyo3(signature = (rounds = 8, seed = 0))]
    fn play_game<'py>(&self, py: Python<'py>, rounds: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let one = player_one_bound_strategy(&self.0);
        let two = SeededRandomStrategy { side: Side::II, seed, elements: self.0.len() };
        let t = play_bounded(&self.0, &one, &two, rounds).map_err(err)?;
        let moves: Vec<&str> = t.moves.iter().map(|&p| self.0.name(p)).collect();
        to_py(py, &json!({ "moves": moves, "verdict": t.verdict.as_str(), "round": t.round }))
    }

    fn __repr__(&self) -> String {
        format!("DirectedSet({} loaded, finite={})", self.0.len(), self.0.is_finite())
    }
}

#[pyclass(name = "InverseSystem", module = "invlim", frozen)]
struct PyInverseSystem(InverseSystem);

fn thread_dict(sys: &InverseSystem, t: &Thread) -> Value {
    Value::Object(sys.thread_names(t).into_iter().map(|(p, a)| (p, Value::String(a))).collect())
}

#[pymethods]
impl PyInverseSystem {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        io::load_system(Path::new(path)).map(Self).map_err(err)
    }

    /// From the text of a system file; relative paths resolve against the
    /// working directory.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: Value = serde_json::from_str(text).map_err(err)?;
        io::system_from_json(&v, Path::new(".")).map(Self).map_err(err)
    }

    /// Functions from subsets of `{0..n-1}` to `{0,1}`, restricted downward.
    #[staticmethod]
    fn restriction(n: usize) -> PyResult<Self> {
        InverseSystem::restriction(n).map(Self).map_err(err)
    }

    #[getter]
    fn base(&self) -> PyDirectedSet {
        PyDirectedSet(self.0.base().clone())
    }

    /// Every thread as a dict from point to fiber element.
    fn threads<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let ts = self.0.enumerate_threads().map_err(err)?;
        to_py(py, &Value::Array(ts.iter().map(|t| thread_dict(&self.0, t)).collect()))
    }

    fn check_good<'py>(&self, py: Python<'py>, lam: usize, nu: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &serde_json::to_value(check_good(&self.0, lam, nu)).map_err(err)?)
    }

    fn __repr__(&self) -> String {
        format!("InverseSystem({} points, largest fiber {})", self.0.base().len(), self.0.max_fiber())
    }
}

#[pyclass(name = "Tree", module = "invlim", frozen)]
struct PyTree(Tree);

#[pymethods]
impl PyTree {
    #[staticmethod]
    fn from_parents(nodes: Vec<String>, parent: HashMap<String, String>) -> PyResult<Self> {
        Tree::from_named(nodes, &parent).map(Self).map_err(err)
    }

    #[staticmethod]
    fn full_binary(height: usize) -> PyResult<Self> {
        Tree::full_binary(height).map(Self).map_err(err)
    }

    fn cofinal_branches(&self) -> Vec<Vec<String>> {
        self.0
            .cofinal_branches()
            .into_iter()
            .map(|b| b.into_iter().map(|t| self.0.name(t).to_string()).collect())
            .collect()
    }

    fn inverse_system(&self) -> PyResult<PyInverseSystem> {
        self.0.inverse_system().map(PyInverseSystem).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "LimitElement", module = "invlim", frozen)]
struct PyLimitElement {
    system: Arc<GroupSystem>,
    inner: LimitElement,
}

#[pyclass(name = "GroupSystem", module = "invlim", frozen)]
struct PyGroupSystem(Arc<GroupSystem>);

impl PyGroupSystem {
    fn wrap(&self, inner: LimitElement) -> PyLimitElement {
        PyLimitElement { system: Arc::clone(&self.0), inner }
    }

    fn own<'a>(&self, x: &'a PyLimitElement) -> PyResult<&'a LimitElement> {
        if Arc::ptr_eq(&self.0, &x.system) {
            Ok(&x.inner)
        } else {
            Err(PyValueError::new_err("element belongs to a different group system"))
        }
    }

    fn thread(&self, names: HashMap<String, String>) -> PyResult<Thread> {
        self.0.carrier().thread_from_names(&names).map_err(err)
    }
}

#[pymethods]
impl PyGroupSystem {
    /// The free (`"free"`) or free abelian (`"abelian"`) groups on the fibers.
    #[new]
    #[pyo3(signature = (system, variant = "free"))]
    fn new(system: &PyInverseSystem, variant: &str) -> PyResult<Self> {
        let v: Variant = variant.parse().map_err(PyValueError::new_err)?;
        Ok(Self(Arc::new(GroupSystem::new(system.0.clone(), v))))
    }

    #[getter]
    fn variant(&self) -> &'static str {
        match self.0.variant() {
            Variant::Free => "free",
            Variant::Abelian => "abelian",
        }
    }

    /// An element from one literal per point, checked for coherence.
    fn element(&self, words: HashMap<String, String>) -> PyResult<PyLimitElement> {
        Ok(self.wrap(self.0.eager_from_literals(&words).map_err(err)?))
    }

    fn identity(&self) -> PyLimitElement {
        self.wrap(self.0.identity())
    }

    fn basis_element(&self, thread: HashMap<String, String>) -> PyResult<PyLimitElement> {
        let t = self.thread(thread)?;
        Ok(self.wrap(self.0.basis_element(&t).map_err(err)?))
    }

    fn multiply(&self, a: &PyLimitElement, b: &PyLimitElement) -> PyResult<PyLimitElement> {
        Ok(self.wrap(self.0.multiply(self.own(a)?, self.own(b)?).map_err(err)?))
    }

    fn invert(&self, a: &PyLimitElement) -> PyResult<PyLimitElement> {
        Ok(self.wrap(self.0.invert(self.own(a)?).map_err(err)?))
    }

    fn equal(&self, a: &PyLimitElement, b: &PyLimitElement) -> PyResult<bool> {
        self.0.equal(self.own(a)?, self.own(b)?).map_err(err)
    }

    /// The value at a point, as a literal.
    fn evaluate(&self, a: &PyLimitElement, point: &str) -> PyResult<String> {
        let p = self.0.carrier().base().lookup(point).map_err(err)?;
        let v = self.0.evaluate(self.own(a)?, p).map_err(err)?;
        Ok(self.0.format_elem(p, &v))
    }

    /// `(point, length)` from which the length no longer grows.
    fn stabilization_point(&self, a: &PyLimitElement) -> PyResult<(String, usize)> {
        let s = self.0.stabilization_point(self.own(a)?).map_err(err)?;
        Ok((self.0.carrier().base().name(s.point).to_string(), s.length))
    }

    /// `{"stabilizer": id, "terms": [{"thread": {..}, "exp": k}, ..]}`.
    fn decompose<'py>(&self, py: Python<'py>, a: &PyLimitElement) -> PyResult<Bound<'py, PyAny>> {
        let d = self.0.decompose(self.own(a)?).map_err(err)?;
        to_py(py, &self.0.decomposition_json(&d))
    }

    /// Product of basis elements, from `(thread, exponent)` pairs.
    fn recompose(&self, terms: Vec<(HashMap<String, String>, i64)>) -> PyResult<PyLimitElement> {
        let terms = terms.into_iter().map(|(t, k)| Ok((self.thread(t)?, k))).collect::<PyResult<Vec<_>>>()?;
        let top = self.0.carrier().base().maximum().unwrap_or(0);
        let d = invlim_core::grouplimit::Decomposition { stabilizer: top, terms };
        Ok(self.wrap(self.0.recompose(&d).map_err(err)?))
    }

    /// A point where the product of the given basis powers is visibly
    /// nontrivial, with the value there.
    fn freeness_certificate(&self, terms: Vec<(HashMap<String, String>, i64)>) -> PyResult<(String, String)> {
        let terms = terms.into_iter().map(|(t, k)| Ok((self.thread(t)?, k))).collect::<PyResult<Vec<_>>>()?;
        let c = self.0.freeness_certificate(&terms).map_err(err)?;
        Ok((self.0.carrier().base().name(c.point).to_string(), self.0.format_elem(c.point, &c.value)))
    }
}

#[pymethods]
impl PyLimitElement {
    fn __repr__(&self) -> String {
        let base = self.system.carrier().base();
        let parts: Vec<String> = base
            .points()
            .take(8)
            .filter_map(|p| {
                let v = self.system.evaluate(&self.inner, p).ok()?;
                Some(format!("{}: {:?}", base.name(p), self.system.format_elem(p, &v)))
            })
            .collect();
        format!("LimitElement({{{}}})", parts.join(", "))
    }
}

#[pyclass(name = "FiniteGroupSystem", module = "invlim", frozen)]
struct PyFiniteGroupSystem(FiniteGroupSystem);

#[pymethods]
impl PyFiniteGroupSystem {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        io::load_group_system(Path::new(path)).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: Value = serde_json::from_str(text).map_err(err)?;
        io::group_system_from_json(&v, Path::new(".")).map(Self).map_err(err)
    }

    /// Number of coherent families.
    #[getter]
    fn limit_size(&self) -> PyResult<usize> {
        Ok(self.0.limit_elements().map_err(err)?.len())
    }

    /// Automorphism search and the isomorphism checks, as a dict.
    fn verify_phi<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let r = verify_phi_isomorphism(&self.0).map_err(err)?;
        to_py(py, &serde_json::to_value(r).map_err(err)?)
    }
}

/// Free reduction of a word literal such as `a.a^-1.b^2`.
#[pyfunction]
fn reduce_word(word: &str) -> PyResult<String> {
    let w: Word<String> = word.parse().map_err(err)?;
    Ok(w.to_string())
}

#[pymodule]
pub fn invlim(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDirectedSet>()?;
    m.add_class::<PyInverseSystem>()?;
    m.add_class::<PyTree>()?;
    m.add_class::<PyGroupSystem>()?;
    m.add_class::<PyLimitElement>()?;
    m.add_class::<PyFiniteGroupSystem>()?;
    m.add_function(wrap_pyfunction!(reduce_word, m)?)?;
    Ok(())
}
