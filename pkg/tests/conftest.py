"""Shared test helpers: random state sampling and acceptance reporting."""
from __future__ import annotations

import numpy as np

from steerscan import DensityMatrix

DIM_PAIRS = [(2, 2), (2, 3), (3, 3)]


def random_pure(rng, d):
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return v / np.linalg.norm(v)


def random_density(rng, dim_a, dim_b):
    """Mixture of up to (dA*dB)**2 random pure states with Dirichlet weights."""
    d = dim_a * dim_b
    k = int(rng.integers(1, d * d + 1))
    weights = rng.dirichlet(np.ones(k))
    mat = np.zeros((d, d), dtype=np.complex128)
    for w in weights:
        v = random_pure(rng, d)
        mat += w * np.outer(v, v.conj())
    return DensityMatrix(dim_a, dim_b, mat)


def random_separable(rng, dim_a, dim_b):
    """Mixture of random product pure states (separable by construction)."""
    k = int(rng.integers(1, dim_a * dim_b + 3))
    weights = rng.dirichlet(np.ones(k))
    d = dim_a * dim_b
    mat = np.zeros((d, d), dtype=np.complex128)
    for w in weights:
        v = np.kron(random_pure(rng, dim_a), random_pure(rng, dim_b))
        mat += w * np.outer(v, v.conj())
    return DensityMatrix(dim_a, dim_b, mat)


def random_single_party_density(rng, d):
    k = int(rng.integers(1, d + 2))
    weights = rng.dirichlet(np.ones(k))
    mat = np.zeros((d, d), dtype=np.complex128)
    for w in weights:
        v = random_pure(rng, d)
        mat += w * np.outer(v, v.conj())
    return mat


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance test at the end of the run."""
    entries = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            if outcome == "passed" and getattr(report, "when", "call") != "call":
                continue
            status = "PASS" if outcome == "passed" else "FAIL"
            if entries.get(name) != "FAIL":
                entries[name] = status
    if entries:
        terminalreporter.section("acceptance criteria")
        for name in sorted(entries):
            terminalreporter.write_line(f"{entries[name]}: {name}")
