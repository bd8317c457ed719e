use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    pyo3::append_to_inittab!(invlim);
    Python::attach(|py| {
        let globals = PyDict::new(py);
        globals.set_item("FIX", concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/")).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, Some(&globals), None).unwrap_or_else(|e| panic!("{e}"));
    });
}

use invlim::invlim;

#[test]
fn bindings_round_trip() {
    run(r#"
import invlim
sys = invlim.InverseSystem.load(FIX + "collapse_system.json")
g = invlim.GroupSystem(sys, "free")
x = g.element({"p": "c^2", "q": "a.b"})
d = g.decompose(x)
assert d["stabilizer"] == "q"
assert g.equal(g.recompose([(t["thread"], t["exp"]) for t in d["terms"]]), x)
try:
    g.element({"p": "c", "q": "a.b"})
    raise AssertionError("incoherent element accepted")
except ValueError:
    pass
assert invlim.FiniteGroupSystem.load(FIX + "z2_group.json").verify_phi()["pass"]
assert invlim.DirectedSet.chain(3).upper_bound(["0", "1"]) == "1"
"#);
}
