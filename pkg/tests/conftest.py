import json
import pathlib

import numpy as np
import pytest

GOLDEN_DIR = pathlib.Path(__file__).parent / "golden"

# Filled by tests/test_acceptance.py; echoed after the run so the
# per-criterion verdict lines survive pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def golden():
    with open(GOLDEN_DIR / "vectors.json") as fh:
        return json.load(fh)


def kronecker_generator(n_codeword: int) -> np.ndarray:
    """Independent GF(2) generator-matrix oracle: G = F^{(x)n}."""
    factor = np.array([[1, 0], [1, 1]], dtype=np.uint8)
    g = np.array([[1]], dtype=np.uint8)
    while g.shape[0] < n_codeword:
        g = np.kron(g, factor)
    return g


def bec_ordering(n_codeword: int) -> np.ndarray:
    """Independent construction oracle: erasure-probability evolution.

    Starting from erasure probability 0.5, a check-side child erases with
    2z - z^2 and a repetition-side child with z^2.  Returns bit indices
    sorted worst-first (descending erasure probability), i.e. ascending
    reliability, with stable ties.
    """
    z = np.array([0.5])
    length = 1
    while length < n_codeword:
        z = np.concatenate([2.0 * z - z * z, z * z]).reshape(2, -1).T.reshape(-1)
        length *= 2
    return np.argsort(-z, kind="stable")
