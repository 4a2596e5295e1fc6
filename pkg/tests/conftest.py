from __future__ import annotations

import os
from pathlib import Path

import pytest
import sympy
from hypothesis import settings

from exohom.linalg import SparseMatrix

settings.register_profile("repo", deadline=None, max_examples=60, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "repo"))

DATA = Path(__file__).parent / "data"


def to_sympy(m: SparseMatrix) -> sympy.Matrix:
    out = sympy.zeros(m.nrows, m.ncols)
    for (i, j), c in m.entries().items():
        out[i, j] = sympy.Rational(c.numerator, c.denominator)
    return out


def reorder(model, oracle_model, m: sympy.Matrix) -> sympy.Matrix:
    """Express an oracle matrix in the package's basis order."""
    perm = [oracle_model.pos[(tuple(freq), tuple(idx))] for freq, idx in model.basis]
    return m.extract(perm, perm)


@pytest.fixture
def data_dir() -> Path:
    return DATA


def oracle_for(model):
    from oracle import DenseModel

    return DenseModel(model.dim, structure=model.structure, window=model.window or None)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import VERDICTS
    except ImportError:
        return
    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
