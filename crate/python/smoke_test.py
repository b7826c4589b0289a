"""Smoke test for the qriccati_py extension module.

Build and install first, e.g. `maturin develop -m crates/python/Cargo.toml`,
then run `python python/smoke_test.py`.
"""

import math
import sys

import qriccati_py as q


def check(label, ok):
    print(("ok   " if ok else "FAIL ") + label)
    return ok


def main():
    results = []
    i1, i2, i3 = (q.CQuat.basis(k) for k in (1, 2, 3))
    one = q.CQuat.basis(0)
    results.append(check("i1 i2 = i3", i1 * i2 == i3))
    results.append(check("i2 i1 = -i3", i2 * i1 == -i3))
    results.append(check("i1^2 = -1", i1 * i1 == -one))
    zd = q.CQuat(1, 1j)
    results.append(check("(1 + i i1)(1 - i i1) = 0", (zd * zd.conj()).magnitude() == 0.0))

    x1, x2 = q.ScalarField.x1(), q.ScalarField.x2()
    region = q.Region.cube(-1.0, 1.0)
    pair = q.from_schrodinger(x1.exp(), q.ScalarField.constant(-1), region)
    rep = q.riccati_residual(pair, samples=100)
    results.append(check("exp(x1), v = -1: residual %.2e" % rep["sup_norm"], rep["sup_norm"] <= 1e-12))

    shell = q.Region.cube(-2.0, 2.0).shell(0.5, 2.0)
    fund = 1 / (4 * math.pi * q.ScalarField.radius())
    pair = q.eikonal_solution(fund, shell)
    rep = q.riccati_residual(pair)
    p = [0.6, -0.4, 0.9]
    r2 = sum(c * c for c in p)
    results.append(check("fundamental example residual %.2e" % rep["sup_norm"], rep["sup_norm"] <= 1e-12))
    results.append(check("v = -2/|x|^2", abs(pair.v.value(p) + 2 / r2) < 1e-14))

    fam = q.euler_two(x1, x2, q.ScalarField.constant(-1), 1 + 1j, region, pole_margin=0.1)
    rep = q.riccati_residual(fam)
    results.append(check("two-solution family, A = 1+i: %.2e" % rep["sup_norm"], rep["sup_norm"] <= 1e-10))

    sep = q.separable([q.ScalarField.constant(-1)] * 3, [0.0] * 3, [0.0] * 3, region)
    f = sep.f.value([0.3, -0.2, 0.5]).components
    results.append(check("separable tanh", abs(f[1] - math.tanh(0.3)) < 1e-8))

    psi = q.transport_solve(x1, (-2 * x1).exp(), [0.0] * 3, [1.0] * 3, 9)
    err = max(abs(psi.get(i, 4, 4) - math.exp(-2 * psi.node(i, 4, 4)[0])) for i in range(9))
    results.append(check("transport solve reproduces exp(-2 x1): %.1e" % err, err < 1e-8))
    results.append(check("csv header", psi.to_csv().splitlines()[0] == "x1,x2,x3,re,im"))

    report = q.run_scenario("euler2-family", params={"A": "2"}, samples=50)
    results.append(check("scenario euler2-family passes", report["passed"]))

    try:
        q.run_scenario("no-such-scenario")
        results.append(check("unknown scenario rejected", False))
    except ValueError:
        results.append(check("unknown scenario rejected", True))

    return 0 if all(results) else 1


if __name__ == "__main__":
    sys.exit(main())
