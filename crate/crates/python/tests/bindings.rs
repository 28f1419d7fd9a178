use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<F: FnOnce(Python<'_>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "beltrami").unwrap();
        beltrami_py::beltrami_module(&m).unwrap();
        py.import("sys").unwrap().getattr("modules").unwrap().set_item("beltrami", m).unwrap();
        f(py)
    })
}

#[test]
fn grid_and_transforms() {
    with_module(|py| {
        py.run(
            cr#"
import beltrami as b, math
g = b.Grid(1.0, 64, [math.exp(-abs(z) ** 2 / 0.05) for z in b.Grid(1.0, 64).points()])
psi = g - b.Grid(1.0, 64, [g.mean()] * 4096)
assert abs(b.beurling_global(psi).l2_norm() - psi.l2_norm()) < 1e-10
fz, fzb = b.cauchy_global(psi).wirtinger()
assert (fzb - psi).max_abs() < 1e-9
try:
    b.Grid(1.0, 64, [0j] * 10)
    raise SystemExit("size mismatch accepted")
except ValueError:
    pass
"#,
            None,
            None,
        )
        .unwrap();
    });
}

#[test]
fn solvers_and_commands() {
    with_module(|py| {
        py.run(
            cr#"
import beltrami as b, json, tempfile
h = b.FieldH("linear", 0.3)
s = b.solve_beltrami(h, b.Grid(1.0, 64))
assert s.residual < 1e-9 and s.iterations >= 1
u, v, ll = b.solve_leray_lions(b.FieldA("diag:K=2"), b.Grid(1.0, 64))
assert ll.residual < 1e-9
with tempfile.TemporaryDirectory() as out:
    r = json.loads(b.run_command("probe-alpha-table", json.dumps({"out": out})))
assert r["command"] == "probe-alpha-table"
try:
    b.run_command("nope")
    raise SystemExit("unknown command accepted")
except ValueError:
    pass
"#,
            None,
            None,
        )
        .unwrap();
    });
}
