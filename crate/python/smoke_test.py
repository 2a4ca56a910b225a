"""Smoke test for the vortigen Python extension.

Build first:

    cargo build --release -p vortigen-py --features extension-module

then run `python3 python/smoke_test.py`. The script copies the built library
into a temporary directory under the importable name `vortigen_py.so`.
"""

import importlib
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    for profile in ("release", "debug"):
        lib = ROOT / "target" / profile / "libvortigen_py.so"
        if lib.exists():
            break
    else:
        sys.exit("libvortigen_py.so not found; build with "
                 "`cargo build --release -p vortigen-py --features extension-module`")
    tmp = Path(tempfile.mkdtemp())
    shutil.copy(lib, tmp / "vortigen_py.so")
    sys.path.insert(0, str(tmp))
    return importlib.import_module("vortigen_py")


def main():
    vg = load_module()
    gas = vg.GasModel(1.4, 1.0)

    d = vg.derive_state(1.0, 0.3, 0.0, 1.0, gas)
    assert abs(d["sound_speed"] - math.sqrt(1.4)) < 1e-14
    assert abs(d["total_enthalpy"] - (3.5 + 0.045)) < 1e-12

    try:
        vg.derive_state(-1.0, 0.0, 0.0, 1.0, gas)
    except ValueError:
        pass
    else:
        raise AssertionError("negative density must raise ValueError")

    # compressive simple wave: lambda = 1 - 0.1 sin(2 pi x0) breaks at 1/(0.2 pi)
    nodes = []
    for i in range(201):
        x = -1.0 + 4.5 * i / 200
        lam = 1.0 - 0.1 * math.sin(2 * math.pi * x)
        a = (lam + 5.0) / 6.0
        nodes.append(vg.CharNode(x, 0.0, -5.0 + 5.0 * a, a, 1.0))
    net = vg.advance_net(nodes, 10.0, gas)
    exact = 1.0 / (0.2 * math.pi)
    event = net.envelope
    assert event is not None and event.family == "C+"
    assert abs(event.t_star - exact) / exact < 0.02, event
    assert net.pseudostructure_residual("C+") < 1e-12
    jp, jm = net.levels[-1][0].riemann_invariants(gas)
    assert abs(jm - nodes[0].riemann_invariants(gas)[1]) < 1e-10

    x0 = [n.x for n in nodes]
    analytic = vg.detect_envelope_analytic(x0, [n.u + n.a for n in nodes], "C+")
    assert abs(analytic.t_star - exact) / exact < 0.02

    r = vg.contact_jump_check(gas, 1.0, 200)
    assert r.passed and r.relation == "contact", r

    node = vg.CharNode(0.0, 0.0, 0.2, 1.1, 1.0)
    state = (1.0, 0.2, 1.0)
    a = gas.sound_speed(1.0, 1.0)
    for slope in (0.2 + a, 0.2 - a, 0.2):
        assert abs(vg.consistency_determinant(*state, slope, gas)) < 1e-12
    assert abs(vg.consistency_determinant(*state, 3.0, gas)) > 0.1
    assert node.a == 1.1

    # uniform flow: the commutator vanishes
    n = 11
    size = n * n
    fs = vg.FieldSet(n, n, 0.0, 0.0, 0.1, 0.1, [1.0] * size, [0.5] * size, [0.0] * size, [1.0] * size)
    out = fs.commutator_along(gas, (0.1, 0.5), 0.7)
    assert out["classification"] == "locally_equilibrium" and out["max_k"] < 1e-12, out

    print("vortigen_py smoke test passed")


if __name__ == "__main__":
    main()
