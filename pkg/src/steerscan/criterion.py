"""Trace-norm steering criteria for bipartite states.

The detector borders the correlation matrix T of a state with its Bloch
vectors, weighted by free nonnegative parameters, and compares the trace
norm of the bordered matrix against a bound that every unsteerable state
must satisfy. Exceeding the bound certifies steerability in the tested
direction; staying below it is inconclusive.

Three parameterizations are supported: a pair (x, y) weighting the
border row and column, a quadruple (x, y, g, h) that additionally scales
the correlation block, and a vector form whose trace norm depends only
on the Euclidean norms of its vectors. The vector form exists to make
that reduction testable; searches use the scalar forms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .bloch import BlochForm, DensityMatrix, bloch_decompose

DEFAULT_MARGIN = 1e-9

DIRECTIONS = ("ab", "ba")


def _require_nonnegative(**scalars):
    for name, value in scalars.items():
        if not np.isfinite(value) or value < 0.0:
            raise ValueError(f"parameter {name} must be a finite nonnegative real, got {value!r}")


def _as_weight_vector(name: str, value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"parameter {name} must be a nonempty 1-d vector")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise ValueError(f"parameter {name} must have finite nonnegative entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PairParams:
    """Border weights (x, y) for the two-parameter criterion."""

    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        _require_nonnegative(x=self.x, y=self.y)

    kind = "pair"

    def reversed(self) -> "PairParams":
        """Parameter roles for the opposite steering direction."""
        return PairParams(self.y, self.x)

    def to_dict(self) -> dict:
        return {"kind": "pair", "x": self.x, "y": self.y}


@dataclass(frozen=True)
class QuadParams:
    """Border weights (x, y) plus correlation scalings (g, h)."""

    x: float
    y: float
    g: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "g", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _require_nonnegative(x=self.x, y=self.y, g=self.g, h=self.h)

    kind = "quad"

    def reversed(self) -> "QuadParams":
        """Parameter roles for the opposite steering direction."""
        return QuadParams(self.y, self.x, self.h, self.g)

    def to_dict(self) -> dict:
        return {"kind": "quad", "x": self.x, "y": self.y, "g": self.g, "h": self.h}


@dataclass(frozen=True, eq=False)
class VectorParams:
    """Vector border weights; detection power matches the scalar forms.

    alpha and beta weight the border blocks. When eta and gamma are also
    given the correlation block is expanded by their outer product. The
    trace norm of the resulting matrix depends on the vectors only
    through their Euclidean norms.
    """

    alpha: np.ndarray
    beta: np.ndarray
    eta: np.ndarray = None
    gamma: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, "alpha", _as_weight_vector("alpha", self.alpha))
        object.__setattr__(self, "beta", _as_weight_vector("beta", self.beta))
        if (self.eta is None) != (self.gamma is None):
            raise ValueError("eta and gamma must be given together")
        if self.eta is not None:
            object.__setattr__(self, "eta", _as_weight_vector("eta", self.eta))
            object.__setattr__(self, "gamma", _as_weight_vector("gamma", self.gamma))

    kind = "vector"

    def reversed(self) -> "VectorParams":
        """Parameter roles for the opposite steering direction."""
        return VectorParams(self.beta, self.alpha, self.gamma, self.eta)

    def to_dict(self) -> dict:
        out = {"kind": "vector", "alpha": [float(v) for v in self.alpha], "beta": [float(v) for v in self.beta]}
        out["eta"] = None if self.eta is None else [float(v) for v in self.eta]
        out["gamma"] = None if self.gamma is None else [float(v) for v in self.gamma]
        return out


CriterionParams = Union[PairParams, QuadParams, VectorParams]


@dataclass(frozen=True, eq=False)
class CriterionReport:
    """Outcome of one criterion evaluation for one direction."""

    direction: str
    params: CriterionParams
    lhs: float
    rhs: float
    violation: float
    steerable: bool

    def to_dict(self) -> dict:
        return {
            "direction": self.direction,
            "params": self.params.to_dict(),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violation": self.violation,
            "steerable": self.steerable,
        }


def bordered_matrix(b: BlochForm, x: float, y: float) -> np.ndarray:
    """Correlation matrix bordered by Bloch vectors: [[x*y, x*s^T], [y*r, T]]."""
    _require_nonnegative(x=x, y=y)
    na, nb = b.r.size, b.s.size
    m = np.zeros((1 + na, 1 + nb))
    m[0, 0] = x * y
    m[0, 1:] = x * b.s
    m[1:, 0] = y * b.r
    m[1:, 1:] = b.t
    return m


def scaled_bordered_matrix(b: BlochForm, x: float, y: float, g: float, h: float) -> np.ndarray:
    """Bordered matrix with scaled correlation block: [[x*y, x*h*s^T], [y*g*r, g*h*T]]."""
    _require_nonnegative(x=x, y=y, g=g, h=h)
    na, nb = b.r.size, b.s.size
    m = np.zeros((1 + na, 1 + nb))
    m[0, 0] = x * y
    m[0, 1:] = x * h * b.s
    m[1:, 0] = y * g * b.r
    m[1:, 1:] = g * h * b.t
    return m


def vector_bordered_matrix(b: BlochForm, alpha, beta, eta=None, gamma=None) -> np.ndarray:
    """Bordered matrix with vector weights.

    Without eta/gamma: [[alpha beta^T, alpha s^T], [r beta^T, T]].
    With eta/gamma: [[alpha beta^T, alpha (gamma kron s)^T],
    [(eta kron r) beta^T, (eta gamma^T) kron T]].
    """
    p = VectorParams(alpha, beta, eta, gamma)
    if p.eta is None:
        top = np.hstack([np.outer(p.alpha, p.beta), np.outer(p.alpha, b.s)])
        bottom = np.hstack([np.outer(b.r, p.beta), b.t])
        return np.vstack([top, bottom])
    left_col = np.kron(p.eta, b.r)
    right_row = np.kron(p.gamma, b.s)
    top = np.hstack([np.outer(p.alpha, p.beta), np.outer(p.alpha, right_row)])
    bottom = np.hstack([np.outer(left_col, p.beta), np.kron(np.outer(p.eta, p.gamma), b.t)])
    return np.vstack([top, bottom])


def criterion_matrix(b: BlochForm, params: CriterionParams) -> np.ndarray:
    """Build the bordered matrix for any parameter variant."""
    if isinstance(params, PairParams):
        return bordered_matrix(b, params.x, params.y)
    if isinstance(params, QuadParams):
        return scaled_bordered_matrix(b, params.x, params.y, params.g, params.h)
    if isinstance(params, VectorParams):
        return vector_bordered_matrix(b, params.alpha, params.beta, params.eta, params.gamma)
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values of a matrix (nuclear norm)."""
    arr = np.asarray(m)
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix entries must be finite")
    return float(np.linalg.svd(arr, compute_uv=False).sum())


def unsteerable_bound(dim_a: int, dim_b: int, params: CriterionParams) -> float:
    """Largest bordered-matrix trace norm compatible with unsteerability.

    The two factors are asymmetric: the steering party contributes
    dim_a - 1/dim_a while the steered party contributes 1 - 1/dim_b.
    """
    ca = dim_a - 1.0 / dim_a
    cb = 1.0 - 1.0 / dim_b
    if isinstance(params, PairParams):
        return float(np.sqrt(params.x**2 + ca) * np.sqrt(params.y**2 + cb))
    if isinstance(params, QuadParams):
        return float(np.sqrt(params.x**2 + params.g**2 * ca) * np.sqrt(params.y**2 + params.h**2 * cb))
    if isinstance(params, VectorParams):
        a = float(np.linalg.norm(params.alpha))
        bb = float(np.linalg.norm(params.beta))
        if params.eta is None:
            return float(np.sqrt(a**2 + ca) * np.sqrt(bb**2 + cb))
        e = float(np.linalg.norm(params.eta))
        c = float(np.linalg.norm(params.gamma))
        return float(np.sqrt(a**2 + e**2 * ca) * np.sqrt(bb**2 + c**2 * cb))
    raise TypeError(f"unsupported parameter type {type(params).__name__}")


def evaluate_bloch(
    b: BlochForm,
    params: CriterionParams,
    direction: str = "ab",
    margin: float = DEFAULT_MARGIN,
) -> CriterionReport:
    """Evaluate the criterion on a precomputed Bloch form.

    Direction "ab" tests steering of the second party by the first.
    Direction "ba" relabels the parties: the Bloch form is swapped and
    the parameter roles are reversed, so the bound's asymmetric factors
    follow the steering party in both cases.
    """
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    eb, ep = (b, params) if direction == "ab" else (b.swapped(), params.reversed())
    lhs = trace_norm(criterion_matrix(eb, ep))
    rhs = unsteerable_bound(eb.dim_a, eb.dim_b, ep)
    violation = lhs - rhs
    return CriterionReport(
        direction=direction,
        params=params,
        lhs=lhs,
        rhs=rhs,
        violation=violation,
        steerable=bool(violation > margin),
    )


def evaluate(
    rho: DensityMatrix,
    params: CriterionParams,
    direction: str = "ab",
    margin: float = DEFAULT_MARGIN,
) -> CriterionReport:
    """Evaluate the criterion on a density matrix for one direction."""
    return evaluate_bloch(bloch_decompose(rho), params, direction, margin)
