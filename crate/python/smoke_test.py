"""Smoke test for the dqgraph_py extension module.

Build the module first, e.g. ``maturin develop -m crates/python/Cargo.toml``
or ``cargo build -p dqgraph-python --release`` and put the resulting shared
library on ``PYTHONPATH`` as ``dqgraph_py.so``.
"""

import json

import dqgraph_py as dq


def main() -> None:
    classes, labeled = dq.enumerate(2, 2)
    assert labeled == 28 and len(classes) == 4, (labeled, len(classes))
    _, wheels = dq.enumerate(2, 2, "wheels_only")
    assert wheels == 8

    g = dq.Graph("1 2 ; 3: 2 1")
    rep, sign = g.canonical()
    assert str(rep) == "1 2 ; 3: 1 2" and sign == -1

    p = dq.GraphSum.from_graph(rep)
    so3 = dq.Poisson("so3")
    assert so3.is_poisson()
    assert p.apply(so3, ["x1", "x2"]) == "x3"

    assert len(p.delta()) == 0
    s = dq.GraphSum("1\t2 2 ; 3: 1 2 / 4: 1 2\n")
    ds = s.delta()
    assert str(ds) == "-2/1\t2 3 ; 4: 1 2 / 5: 1 3\n2/1\t2 3 ; 4: 1 3 / 5: 2 3\n", str(ds)
    assert len(ds.delta()) == 0
    assert p.bracket(p) == p.compose(p).scale("2")

    gens = dq.leibniz(2, 3)
    assert len(gens) == 1
    assert gens[0][1].apply(so3, ["x1^2", "x2*x3", "x3^2"]) == "0"

    failing = dq.verify_assoc("kontsevich-k2", 2, "symplectic2", 4)
    assert failing == 0
    assert len(dq.cocycle_kernel(1)) == 1
    assert len(dq.cocycle_kernel(2)) == 0

    reports = json.loads(dq.solve_mc(3))
    assert [r["status"] for r in reports] == ["solved"] * 3
    assert all(r["verified"] for r in reports)

    try:
        dq.Graph("1 2 ; 3: 3 1")
    except ValueError as e:
        assert str(e).startswith("invalid_graph") or str(e).startswith("parse"), str(e)
    else:
        raise AssertionError("self-loop accepted")

    print(f"dqgraph_py {dq.__version__}: smoke test passed")


if __name__ == "__main__":
    main()
