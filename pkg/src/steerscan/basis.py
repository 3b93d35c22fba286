"""Orthonormal traceless generator bases for d-dimensional systems.

Builds the standard basis of d**2 - 1 Hermitian traceless matrices that
every Bloch decomposition and steering bound in this package relies on.
The canonical ordering is fixed: diagonal generators first, then the
symmetric off-diagonal pairs, then the antisymmetric ones, each family in
lexicographic (k, l) order. For d = 2 this yields
(sigma_z, sigma_x, sigma_y) / sqrt(2).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

CANONICAL_ORDERING = "diagonal,symmetric,antisymmetric"


class InvalidDimensionError(ValueError):
    """Raised when a local dimension smaller than 2 is requested."""


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    """Ordered collection of d**2 - 1 generator matrices for one party.

    Attributes
    ----------
    dim : int
        Local Hilbert-space dimension d.
    generators : tuple of ndarray
        d**2 - 1 complex d x d matrices, Hermitian, traceless and
        orthonormal under the Hilbert-Schmidt inner product.
    ordering_tag : str
        Label of the ordering convention used to enumerate the matrices.
    """

    dim: int
    generators: tuple
    ordering_tag: str = CANONICAL_ORDERING

    def __len__(self) -> int:
        return len(self.generators)

    def stacked(self) -> np.ndarray:
        """Return the generators as a single (d**2 - 1, d, d) array."""
        return np.stack(self.generators)


@dataclass(frozen=True)
class BasisDiagnostics:
    """Worst-case deviations of a basis from its defining invariants."""

    dim: int
    count: int
    expected_count: int
    hermiticity: float
    trace: float
    orthonormality: float
    sum_square: float

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "count": self.count,
            "expected_count": self.expected_count,
            "hermiticity": self.hermiticity,
            "trace": self.trace,
            "orthonormality": self.orthonormality,
            "sum_square": self.sum_square,
        }


@lru_cache(maxsize=None)
def _generators(d: int) -> tuple:
    mats = []
    for k in range(d - 1):
        m = np.zeros((d, d), dtype=np.complex128)
        for j in range(k + 1):
            m[j, j] = 1.0
        m[k + 1, k + 1] = -(k + 1)
        mats.append(np.sqrt(1.0 / ((k + 1) * (k + 2))) * m)
    for k in range(d):
        for l in range(k + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[k, l] = 1.0
            m[l, k] = 1.0
            mats.append(m / np.sqrt(2.0))
    for k in range(d):
        for l in range(k + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[k, l] = -1.0j
            m[l, k] = 1.0j
            mats.append(m / np.sqrt(2.0))
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def generator_basis(d: int) -> GeneratorBasis:
    """Construct the canonical generator basis for local dimension d.

    Parameters
    ----------
    d : int
        Local dimension, must be at least 2.

    Returns
    -------
    GeneratorBasis
        The d**2 - 1 canonical generators in the fixed ordering. The
        arrays are cached per dimension and marked read-only.
    """
    if int(d) != d or d < 2:
        raise InvalidDimensionError(f"local dimension must be an integer >= 2, got {d!r}")
    return GeneratorBasis(dim=int(d), generators=_generators(int(d)))


def verify_basis(b: GeneratorBasis) -> BasisDiagnostics:
    """Measure how far a basis deviates from each defining invariant.

    Returns the worst-case absolute deviation for Hermiticity, trace,
    pairwise orthonormality and the completeness sum
    sum_i G_i**2 = (d - 1/d) I. Never raises; diagnostics of a broken
    basis simply carry large deviations.
    """
    d = b.dim
    gens = [np.asarray(g, dtype=np.complex128) for g in b.generators]
    herm = max(np.abs(g - g.conj().T).max() for g in gens)
    trace = max(abs(np.trace(g)) for g in gens)
    stack = np.stack(gens)
    gram = np.einsum("aij,bji->ab", stack, stack)
    ortho = np.abs(gram - np.eye(len(gens))).max()
    total = sum(g @ g for g in gens)
    target = (d - 1.0 / d) * np.eye(d)
    sum_sq = np.abs(total - target).max()
    return BasisDiagnostics(
        dim=d,
        count=len(gens),
        expected_count=d * d - 1,
        hermiticity=float(herm),
        trace=float(trace),
        orthonormality=float(ortho),
        sum_square=float(sum_sq),
    )
