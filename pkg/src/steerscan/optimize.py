"""Parameter search and threshold location for the steering criteria.

The criterion parameters enter the violation nonlinearly and the best
values for a given state can be very large, so the search combines a
fixed logarithmic grid (always including zero) with a derivative-free
simplex polish started from the best grid point. Threshold scans bisect
the violation sign over a one-parameter state family, re-optimizing the
parameters at every probe when requested; the previous probe's best
values seed the polish so the search tracks the optimum as the mixing
parameter approaches the threshold.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .bloch import FAMILIES, BlochForm, DensityMatrix, bloch_decompose
from .criterion import (
    DIRECTIONS,
    CriterionParams,
    PairParams,
    QuadParams,
    criterion_matrix,
    evaluate_bloch,
    trace_norm,
    unsteerable_bound,
)

DEFAULT_BISECT_TOL = 1e-9
THREADS_ENV = "STEERSCAN_THREADS"

_CHUNK = 65536

VARIANTS = ("t1", "t2")


@dataclass(frozen=True)
class ParamSearchConfig:
    """Search space and budget for criterion-parameter optimization.

    Attributes
    ----------
    variant : str
        "t1" searches the pair (x, y); "t2" searches the quadruple
        (x, y, g, h).
    cap : float
        Upper limit of each scalar's range [0, cap].
    grid_points : int
        Points per scalar on the coarse grid: zero plus a logarithmic
        sweep from 1e-2 to cap.
    polish_iters : int
        Iteration budget of the simplex polish.
    polish_tol : float
        Simplex convergence tolerance (both coordinates and values).
    """

    variant: str = "t1"
    cap: float = 1e4
    grid_points: int = 25
    polish_iters: int = 200
    polish_tol: float = 1e-10

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not self.cap > 0.0:
            raise ValueError(f"cap must be positive, got {self.cap}")
        if self.grid_points < 3:
            raise ValueError(f"grid points must be >= 3, got {self.grid_points}")

    @property
    def n_scalars(self) -> int:
        return 2 if self.variant == "t1" else 4

    def axis(self) -> np.ndarray:
        """Per-scalar grid values: {0} plus a log sweep up to cap."""
        return np.concatenate([[0.0], np.geomspace(1e-2, self.cap, self.grid_points - 1)])


@dataclass(frozen=True, eq=False)
class ThresholdResult:
    """Outcome of a threshold scan over a one-parameter family."""

    p_star: float
    direction: str
    params: CriterionParams
    tol: float
    bracket: tuple

    def to_dict(self) -> dict:
        return {
            "p_star": self.p_star,
            "bracket": [self.bracket[0], self.bracket[1]],
            "params": self.params.to_dict(),
            "tol": self.tol,
            "direction": self.direction,
        }


class BracketError(RuntimeError):
    """Raised when the violation sign does not change over the family."""

    def __init__(self, message: str, probes):
        super().__init__(message)
        self.probes = list(probes)


class NonMonotoneError(RuntimeError):
    """Raised when probes contradict a single sign change in the family."""

    def __init__(self, message: str, probes):
        super().__init__(message)
        self.probes = list(probes)


def _max_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 0
        if n == 1:
            return 1
        if n > 1:
            return n
    return min(8, os.cpu_count() or 1)


def _violation_at(b: BlochForm, variant: str, values) -> float:
    params = PairParams(*values) if variant == "t1" else QuadParams(*values)
    lhs = trace_norm(criterion_matrix(b, params))
    return lhs - unsteerable_bound(b.dim_a, b.dim_b, params)


def _batch_matrices(b: BlochForm, variant: str, cols) -> np.ndarray:
    na, nb = b.r.size, b.s.size
    n = cols[0].size
    m = np.zeros((n, 1 + na, 1 + nb))
    if variant == "t1":
        x, y = cols
        m[:, 0, 0] = x * y
        m[:, 0, 1:] = x[:, None] * b.s[None, :]
        m[:, 1:, 0] = y[:, None] * b.r[None, :]
        m[:, 1:, 1:] = b.t[None, :, :]
    else:
        x, y, g, h = cols
        m[:, 0, 0] = x * y
        m[:, 0, 1:] = (x * h)[:, None] * b.s[None, :]
        m[:, 1:, 0] = (y * g)[:, None] * b.r[None, :]
        m[:, 1:, 1:] = (g * h)[:, None, None] * b.t[None, :, :]
    return m


def _batch_bounds(dim_a: int, dim_b: int, variant: str, cols) -> np.ndarray:
    ca = dim_a - 1.0 / dim_a
    cb = 1.0 - 1.0 / dim_b
    if variant == "t1":
        x, y = cols
        return np.sqrt(x * x + ca) * np.sqrt(y * y + cb)
    x, y, g, h = cols
    return np.sqrt(x * x + g * g * ca) * np.sqrt(y * y + h * h * cb)


def _grid_search(b: BlochForm, cfg: ParamSearchConfig):
    axis = cfg.axis()
    grids = np.meshgrid(*([axis] * cfg.n_scalars), indexing="ij")
    cols = tuple(g.ravel() for g in grids)
    n = cols[0].size
    spans = [(i, min(i + _CHUNK, n)) for i in range(0, n, _CHUNK)]

    def eval_span(span):
        i, j = span
        chunk = tuple(c[i:j] for c in cols)
        mats = _batch_matrices(b, cfg.variant, chunk)
        lhs = np.linalg.svd(mats, compute_uv=False).sum(axis=-1)
        return lhs - _batch_bounds(b.dim_a, b.dim_b, cfg.variant, chunk)

    workers = _max_workers()
    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=min(workers, len(spans))) as pool:
            parts = list(pool.map(eval_span, spans))
    else:
        parts = [eval_span(span) for span in spans]
    violations = np.concatenate(parts)
    k = int(np.argmax(violations))
    return tuple(float(c[k]) for c in cols), float(violations[k])


def _polish(b: BlochForm, cfg: ParamSearchConfig, start):
    def objective(v):
        return -_violation_at(b, cfg.variant, np.clip(v, 0.0, cfg.cap))

    res = minimize(
        objective,
        np.asarray(start, dtype=float),
        method="Nelder-Mead",
        options={"maxiter": cfg.polish_iters, "xatol": cfg.polish_tol, "fatol": cfg.polish_tol},
    )
    values = tuple(float(v) for v in np.clip(res.x, 0.0, cfg.cap))
    return values, _violation_at(b, cfg.variant, values)


def _search_bloch(b: BlochForm, cfg: ParamSearchConfig, warm=None):
    """Best parameter values (evaluation orientation) for one Bloch form.

    Runs the full grid, then polishes from the best grid point and, when
    given, from the warm-start values of a previous search. Only
    improvements are accepted, so the result never falls below the best
    grid point.
    """
    best_values, best_violation = _grid_search(b, cfg)
    starts = [best_values]
    if warm is not None:
        warm = tuple(float(v) for v in warm)
        warm_violation = _violation_at(b, cfg.variant, warm)
        if warm_violation > best_violation:
            best_values, best_violation = warm, warm_violation
        starts.append(warm)
    for start in starts:
        values, violation = _polish(b, cfg, start)
        if violation > best_violation:
            best_values, best_violation = values, violation
    return best_values, best_violation


def _optimize_bloch(b: BlochForm, direction: str, cfg: ParamSearchConfig, warm=None):
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    eval_form = b if direction == "ab" else b.swapped()
    values, _ = _search_bloch(eval_form, cfg, warm)
    eval_params = PairParams(*values) if cfg.variant == "t1" else QuadParams(*values)
    params = eval_params if direction == "ab" else eval_params.reversed()
    report = evaluate_bloch(b, params, direction)
    return params, report, values


def optimize_params(rho: DensityMatrix, direction: str = "ab", cfg: ParamSearchConfig = None):
    """Search for the criterion parameters maximizing the violation.

    Returns the best parameters found (in the caller's orientation for
    the given direction) together with the corresponding report. The
    search is deterministic for a fixed configuration and returns the
    best candidate even when every violation is negative.
    """
    cfg = cfg or ParamSearchConfig()
    b = bloch_decompose(rho)
    params, report, _ = _optimize_bloch(b, direction, cfg)
    return params, report


def _resolve_family(family):
    if callable(family):
        return family
    try:
        return FAMILIES[family]
    except (KeyError, TypeError):
        known = ", ".join(sorted(FAMILIES))
        raise ValueError(f"unknown family {family!r}; known families: {known}") from None


def mixture_family(rho1: DensityMatrix, rho0: DensityMatrix = None):
    """Interpolation family p -> p * rho1 + (1 - p) * rho0.

    rho0 defaults to the maximally mixed state of matching dimensions.
    """
    if rho0 is None:
        d = rho1.dim_a * rho1.dim_b
        rho0 = DensityMatrix(rho1.dim_a, rho1.dim_b, np.eye(d) / d)
    if (rho0.dim_a, rho0.dim_b) != (rho1.dim_a, rho1.dim_b):
        raise ValueError(
            f"interpolation endpoints must share dimensions, got ({rho1.dim_a}, {rho1.dim_b}) and ({rho0.dim_a}, {rho0.dim_b})"
        )

    def ctor(p: float) -> DensityMatrix:
        p = float(p)
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"mixing parameter must lie in [0, 1], got {p}")
        return DensityMatrix(rho1.dim_a, rho1.dim_b, p * rho1.mat + (1.0 - p) * rho0.mat)

    return ctor


def threshold_scan(
    family,
    direction: str = "ab",
    params="auto",
    bisect_tol: float = DEFAULT_BISECT_TOL,
    cfg: ParamSearchConfig = None,
) -> ThresholdResult:
    """Bisect the violation sign of a one-parameter family over [0, 1].

    Parameters
    ----------
    family : str or callable
        Registered family name or a callable p -> DensityMatrix.
    direction : str
        "ab" or "ba".
    params : CriterionParams or "auto"
        Fixed criterion parameters, or "auto" to re-optimize at every
        probe (warm-started from the previous probe).
    bisect_tol : float
        Maximum bracket width of the returned threshold.

    Returns
    -------
    ThresholdResult
        Threshold estimate with certifying parameters and bracket.

    Raises
    ------
    BracketError
        If the violation sign does not change between p = 0 and p = 1.
    NonMonotoneError
        If probes just outside the final bracket contradict a single
        sign change; the probe log is attached to the error.
    """
    ctor = _resolve_family(family)
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    bisect_tol = float(bisect_tol)
    if not bisect_tol > 0.0:
        raise ValueError(f"bisection tolerance must be positive, got {bisect_tol}")
    auto = isinstance(params, str)
    if auto and params != "auto":
        raise ValueError(f"params must be criterion parameters or 'auto', got {params!r}")
    cfg = cfg or ParamSearchConfig()

    probes = []
    state = {"warm": None, "last": params if not auto else None}

    def probe(p: float) -> float:
        b = bloch_decompose(ctor(p))
        if auto:
            best, report, warm_values = _optimize_bloch(b, direction, cfg, state["warm"])
            state["warm"] = warm_values
            state["last"] = best
        else:
            report = evaluate_bloch(b, params, direction)
        probes.append((p, report.violation))
        return report.violation

    v_lo, v_hi = probe(0.0), probe(1.0)
    if not (v_lo <= 0.0 < v_hi):
        raise BracketError("no threshold in range: violation sign does not change on [0, 1]", probes)
    lo, hi = 0.0, 1.0
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if probe(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    p_star = 0.5 * (lo + hi)

    # sign stability just outside the bracket; guards against families
    # with more than one sign change near the located threshold
    v_above = probe(min(1.0, p_star + bisect_tol))
    certifying = state["last"]
    v_below = probe(max(0.0, p_star - bisect_tol))
    if not (v_above > 0.0 and v_below <= 0.0):
        raise NonMonotoneError(
            "violation sign is not monotone around the located threshold", probes
        )
    return ThresholdResult(
        p_star=p_star,
        direction=direction,
        params=certifying,
        tol=bisect_tol,
        bracket=(lo, hi),
    )


def detection_curve(family, direction: str, params: CriterionParams, p_grid):
    """Evaluate the criterion along a family at fixed parameters.

    Returns one (p, lhs, rhs, violation) tuple per grid point, in input
    order.
    """
    ctor = _resolve_family(family)
    if isinstance(params, str):
        raise ValueError("detection_curve requires fixed criterion parameters")
    rows = []
    for p in p_grid:
        b = bloch_decompose(ctor(float(p)))
        report = evaluate_bloch(b, params, direction)
        rows.append((float(p), report.lhs, report.rhs, report.violation))
    return rows
