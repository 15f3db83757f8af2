"""Pure and compiled kernels must agree to float round-off."""
import subprocess
import sys

import numpy as np
import pytest

from stresslab.graphs import generate_graph
from stresslab.kernels import pure

compiled = pytest.importorskip(
    "stresslab.kernels._ckern", reason="compiled kernel not built"
)


def _evaluators(graph):
    pairs = graph.distance_sorted_pairs()
    args = (pairs.i, pairs.j, pairs.block_starts)
    return pure.StressEvaluator(*args), compiled.StressEvaluator(*args)


def test_parity_random_layouts(rng):
    for n in (6, 10, 25, 50):
        g = generate_graph(n, seed=np.random.SeedSequence([31, n]))
        pe, ce = _evaluators(g)
        for _ in range(50):
            pos = rng.random((n, 2))
            assert ce(pos) == pytest.approx(pe(pos), rel=1e-12, abs=1e-14)


def test_parity_adversarial_layouts(rng):
    g = generate_graph(12, seed=np.random.SeedSequence([32]))
    pe, ce = _evaluators(g)
    collinear = np.column_stack([np.linspace(0, 1, 12), np.zeros(12)])
    tight = rng.random((12, 2)) * 1e-9
    huge = rng.random((12, 2)) * 1e9
    mixed = rng.random((12, 2))
    mixed[3] = mixed[7] + 1e-12  # nearly coincident pair
    for pos in (collinear, tight, huge, mixed):
        assert ce(pos) == pytest.approx(pe(pos), rel=1e-12, abs=1e-14)


def test_compiled_accepts_read_only_input(rng):
    g = generate_graph(8, seed=np.random.SeedSequence([33]))
    _, ce = _evaluators(g)
    pos = rng.random((8, 2))
    pos.setflags(write=False)
    assert np.isfinite(ce(pos))


def test_both_flag_all_coincident_as_degenerate():
    g = generate_graph(6, seed=np.random.SeedSequence([34]))
    pe, ce = _evaluators(g)
    pos = np.full((6, 2), 0.25)
    assert pe(pos) == -1.0
    assert ce(pos) == -1.0


def test_module_level_entry_points_agree(rng):
    g = generate_graph(9, seed=np.random.SeedSequence([35]))
    pairs = g.distance_sorted_pairs()
    pos = rng.random((9, 2))
    a = pure.kruskal_stress_sorted(pos, pairs.i, pairs.j, pairs.block_starts)
    b = compiled.kruskal_stress_sorted(pos, pairs.i, pairs.j, pairs.block_starts)
    assert a == pytest.approx(b, rel=1e-12)


def test_backend_env_selection():
    snippet = (
        "import stresslab.kernels as k; print(k.BACKEND_NAME)"
    )
    for want in ("pure", "compiled"):
        out = subprocess.run(
            [sys.executable, "-c", snippet],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "STRESSLAB_BACKEND": want},
        )
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == want


def test_backend_env_rejects_unknown():
    out = subprocess.run(
        [sys.executable, "-c", "import stresslab.kernels"],
        capture_output=True,
        text=True,
        env={"PATH": "/usr/bin:/bin", "STRESSLAB_BACKEND": "turbo"},
    )
    assert out.returncode != 0
    assert "STRESSLAB_BACKEND" in out.stderr


def test_evaluator_does_not_mutate_input(rng):
    g = generate_graph(10, seed=np.random.SeedSequence([36]))
    pe, ce = _evaluators(g)
    pos = rng.random((10, 2))
    keep = pos.copy()
    pe(pos)
    ce(pos)
    assert np.array_equal(pos, keep)
