"""Smoke test for the beltrami extension module.

Build and install first:
    pip install --no-build-isolation -e crates/python
"""
import json
import math
import tempfile

import beltrami as b


def close(x, y, tol):
    assert abs(x - y) <= tol, (x, y, tol)


def main():
    n, L = 128, 1.0
    g = b.Grid(L, n)
    pts = g.points()
    assert len(pts) == n * n and g.max_abs() == 0.0

    bump = b.Grid(L, n, [math.exp(-abs(z) ** 2 / 0.02) for z in pts])
    psi = bump - b.Grid(L, n, [bump.mean()] * (n * n))
    close(b.beurling_global(psi).l2_norm(), psi.l2_norm(), 1e-8)
    fz, fzb = b.cauchy_global(psi).wirtinger()
    close((fzb - psi).max_abs(), 0.0, 1e-8)
    local = b.beurling_local(bump, 0.1 + 0.05j, 0.3)
    assert local.n == n
    b.cauchy_local(bump, 0.0, 0.3)

    power = b.CorpusEntry("power:K=2")
    jet = power.jet(0.2 + 0.1j)
    assert b.directional_check(jet, power.k) <= 1e-8
    lin, quad = b.mu_nu_check(jet, power.k)
    assert lin >= -1e-8 and quad >= -1e-8
    close(b.alpha_k(2.0), 0.5, 0.5)

    a = b.FieldA("diag:K=2")
    hstar, _ = a.to_hstar()
    assert hstar.k <= 1.0 / 3.0 + 1e-12
    g1, g2 = b.ellipticity_gaps(0.3, -0.1j, a(0.0, 0.3), a(0.0, -0.1j), hstar.k)
    assert g1 >= -1e-12 and g2 >= -1e-12

    h = b.FieldH("holder-cubic:k=1/3")
    sol = b.solve_beltrami(h, b.Grid(L, n, [0.1 * z for z in bump.values()]))
    assert sol.residual < 1e-9, sol.residual
    assert max(sol.contraction_ratios) <= h.k + 1e-6
    json.loads(sol.report_json())

    rh = b.solve_rh(h, b.Grid(L, n, pts), 0.0, 0.3)
    assert rh.residual < 1e-8, rh.residual

    u, v, ll = b.solve_leray_lions(b.FieldA("identity"), b.Grid(L, n))
    assert ll.residual < 1e-9
    assert u.n == n and v.n == n

    with tempfile.TemporaryDirectory() as out:
        report = json.loads(b.run_command("probe-suite", json.dumps({"out": out})))
    assert report["command"] == "probe-suite"
    bad = [r for r in report["records"] if r["assertion"] and not r["pass"]]
    assert not bad, bad
    print("python smoke test passed")


if __name__ == "__main__":
    main()
