#!/usr/bin/env python3
"""Smoke test for the qmbs_py extension module.

Builds nothing itself: run `cargo build -p qmbs-py --release` (or a debug
build) first, then `python3 python/smoke_test.py`. The script copies the
built cdylib into a temp directory under the importable name and checks the
main entry points end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def locate_library(repo_root: Path) -> Path:
    names = ["libqmbs_py.so", "libqmbs_py.dylib", "qmbs_py.dll"]
    candidates = [
        repo_root / "target" / profile / name
        for profile in ("release", "debug")
        for name in names
    ]
    for path in candidates:
        if path.exists():
            return path
    sys.exit(
        "qmbs_py library not found; run `cargo build -p qmbs-py --release` first"
    )


def import_module(repo_root: Path, scratch: Path):
    lib = locate_library(repo_root)
    suffix = ".pyd" if lib.suffix == ".dll" else ".so"
    shutil.copy2(lib, scratch / f"qmbs_py{suffix}")
    sys.path.insert(0, str(scratch))
    import qmbs_py

    return qmbs_py


def close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol


def main() -> None:
    repo_root = Path(__file__).resolve().parent.parent
    with tempfile.TemporaryDirectory() as scratch:
        qmbs = import_module(repo_root, Path(scratch))

        # Demo graph: 2x2, edges (v1,u1), (v2,u1), (v2,u2).
        g = qmbs.Graph(2, 2, [(1, 1), (2, 1), (2, 2)])
        assert g.left_count == 2 and g.right_count == 2
        assert g.vertex_count == 4
        assert g.edge_count == 3
        assert sorted(g.edges()) == [(1, 1), (2, 1), (2, 2)]
        assert "left=2" in repr(g)

        # Text format round trip.
        assert qmbs.Graph.parse(g.to_text()).to_text() == g.to_text()

        # Exact counting: three 1-edge bicliques, two 2-edge, none larger.
        assert g.count_bicliques("edges", 1) == 3
        assert g.count_bicliques("edges", 2) == 2
        assert g.count_bicliques("edges", 3) == 0
        assert g.count_bicliques("edges", 1, at_least=True) == 5

        # Classical optimum and membership checks.
        label, size = g.brute_force_max("edges")
        assert (label, size) == ("0111", 2), (label, size)
        assert g.satisfies("0111", "edges", 2)
        assert not g.satisfies("1010", "edges", 2)
        assert g.biclique_size("0111", "edges") == 2
        assert g.biclique_size("1111", "edges") is None

        # Fixed-size search: k = 2 has 2 solutions in a space of 16, so the
        # plan runs 2 rounds and lands on one of the two witnesses.
        r = qmbs.search_fixed(g, 2)
        assert r["solutions"] == 2
        assert r["iterations"] == 2
        assert r["verified"] and r["subset"] in ("0111", "1110"), r

        # Maximum search under each objective.
        m = qmbs.search_max(g, "edges", seed=1)
        assert m["size"] == 2 and m["verified"], m
        assert g.satisfies(m["subset"], "edges", 2)
        assert [p["target"] for p in m["probes"]][0].startswith(">=")
        m = qmbs.search_max(g, "vertices")
        assert m["size"] == 3 and m["verified"], m
        m = qmbs.search_max(g, "balanced")
        assert m["size"] == 2 and m["verified"], m

        # Snapshot distributions: after one round the three 1-edge
        # bicliques each hold 81/256, totalling 243/256.
        snaps = qmbs.distributions(g, 1)
        assert len(snaps) == 2
        assert all(close(sum(s.values()), 1.0) for s in snaps)
        peak = sum(snaps[1][l] for l in ("1010", "0101", "0110"))
        assert close(peak, 243 / 256), peak

        # Dense engine agrees with the tracked one on a plan narrow enough
        # for a full statevector (the demo graph needs 28 qubits, which is
        # past the default dense cap).
        path = qmbs.Graph(1, 2, [(1, 1), (1, 2)])
        tracked = qmbs.distributions(path, 1)
        dense = qmbs.distributions(path, 1, engine="dense")
        assert len(tracked) == len(dense) == 2
        worst = max(
            abs(dense[i][l] - tracked[i][l])
            for i in range(len(tracked))
            for l in tracked[i]
        )
        assert worst <= 1e-10, worst

        # Iteration math matches the closed form.
        assert qmbs.iteration_count(16, 2) == 2
        assert close(qmbs.success_probability(16, 3, 1), 243 / 256)
        assert close(
            qmbs.success_probability(16, 2, 2),
            math.sin(5 * math.asin(math.sqrt(2 / 16))) ** 2,
        )

        # Seeded generator is deterministic.
        a = qmbs.Graph.synthetic(3, 3, 5, seed=7)
        b = qmbs.Graph.synthetic(3, 3, 5, seed=7)
        assert a.edge_count == 5 and a.to_text() == b.to_text()

        # Input errors surface as ValueError, engine limits as RuntimeError.
        for bad in (
            lambda: qmbs.Graph(0, 2, []),
            lambda: qmbs.Graph(20, 20, []),
            lambda: qmbs.Graph.parse("not a graph"),
            lambda: g.count_bicliques("area", 1),
            lambda: g.satisfies("01", "edges", 1),
            lambda: qmbs.search_fixed(g, 9),
            lambda: qmbs.iteration_count(16, 0),
        ):
            try:
                bad()
            except ValueError:
                pass
            else:
                raise AssertionError(f"expected ValueError from {bad}")

        wide = qmbs.Graph.synthetic(8, 8, 20, seed=1)
        try:
            qmbs.search_max(wide, "edges", engine="dense")
        except RuntimeError as e:
            assert "width cap" in str(e), e
        else:
            raise AssertionError("expected RuntimeError from the dense cap")

    print("PASS: qmbs_py smoke test")


if __name__ == "__main__":
    main()
