"""Shared fixtures. The stimulus corpus is built once per test session."""
from __future__ import annotations

import numpy as np
import pytest

from stresslab.corpus import CorpusBuilder, CorpusView
from stresslab.graphs import generate_graph


@pytest.fixture(scope="session")
def full_corpus(tmp_path_factory) -> CorpusView:
    """The real thing: sizes 10/25/50, 5 graphs x 3 sets x 9 targets each."""
    root = tmp_path_factory.mktemp("corpus-full")
    CorpusBuilder(root, seed=42).build([10, 25, 50])
    return CorpusView(root)


@pytest.fixture(scope="session")
def small_graphs():
    """A spread of generated graphs with n <= 8 for oracle comparisons."""
    out = []
    for idx, n in enumerate([5, 6, 7, 8] * 3):
        out.append(generate_graph(n, seed=np.random.SeedSequence([9090, idx])))
    return out


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    import acceptance_report

    if acceptance_report._RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_report.lines():
            terminalreporter.write_line(line)
