"""scikit-learn style wrappers around the steering detector.

These estimators adapt the functional core to the fit/transform/predict
idiom so states can flow through sklearn pipelines: BlochFeatures turns
density matrices into flat Bloch-coefficient feature vectors, and
SteeringDetector labels states by whether the criterion certifies
steering. Both accept DensityMatrix objects or raw complex matrices of
the configured dimensions.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .bloch import DensityMatrix, bloch_decompose, validate_density
from .criterion import DEFAULT_MARGIN, PairParams, QuadParams, evaluate_bloch
from .optimize import ParamSearchConfig, _optimize_bloch


def _coerce_state(x, dim_a: int, dim_b: int) -> DensityMatrix:
    if isinstance(x, DensityMatrix):
        if (x.dim_a, x.dim_b) != (dim_a, dim_b):
            raise ValueError(
                f"state has dimensions ({x.dim_a}, {x.dim_b}), estimator is configured for ({dim_a}, {dim_b})"
            )
        return x
    return validate_density(np.asarray(x), dim_a, dim_b)


def _iter_states(X):
    if isinstance(X, np.ndarray) and X.ndim == 3:
        return [X[i] for i in range(X.shape[0])]
    return list(X)


class BlochFeatures(TransformerMixin, BaseEstimator):
    """Transform bipartite states into flat Bloch-coefficient vectors.

    Each sample becomes the concatenation [r, s, vec(T)] of its Bloch
    form, giving (dA**2 - 1) + (dB**2 - 1) + (dA**2 - 1)(dB**2 - 1)
    features.

    Parameters
    ----------
    dim_a, dim_b : int
        Subsystem dimensions of the input states.
    """

    def __init__(self, dim_a=2, dim_b=2):
        self.dim_a = dim_a
        self.dim_b = dim_b

    def fit(self, X=None, y=None):
        na = self.dim_a * self.dim_a - 1
        nb = self.dim_b * self.dim_b - 1
        if na < 3 or nb < 3:
            raise ValueError(f"subsystem dimensions must be >= 2, got ({self.dim_a}, {self.dim_b})")
        self.n_output_features_ = na + nb + na * nb
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "n_output_features_"):
            self.fit()
        rows = []
        for item in _iter_states(X):
            b = bloch_decompose(_coerce_state(item, self.dim_a, self.dim_b))
            rows.append(np.concatenate([b.r, b.s, b.t.ravel()]))
        return np.array(rows).reshape(len(rows), self.n_output_features_)


class SteeringDetector(BaseEstimator):
    """Binary detector: does the criterion certify steering for a state?

    Parameters
    ----------
    params : "auto", criterion parameters, or tuple
        Fixed parameters ((x, y) or (x, y, g, h)) or "auto" to search
        per sample.
    direction : str
        "ab" or "ba".
    margin : float
        A sample is labeled 1 only when violation > margin.
    dim_a, dim_b : int
        Subsystem dimensions used when samples are raw matrices.
    cap, grid_points : float, int
        Search range and grid density for the "auto" mode.
    """

    def __init__(self, params="auto", direction="ab", margin=DEFAULT_MARGIN,
                 dim_a=2, dim_b=2, cap=1e4, grid_points=25):
        self.params = params
        self.direction = direction
        self.margin = margin
        self.dim_a = dim_a
        self.dim_b = dim_b
        self.cap = cap
        self.grid_points = grid_points

    def fit(self, X=None, y=None):
        if self.direction not in ("ab", "ba"):
            raise ValueError(f"direction must be 'ab' or 'ba', got {self.direction!r}")
        params = self.params
        if isinstance(params, str):
            if params != "auto":
                raise ValueError(f"params must be 'auto', criterion parameters or a tuple, got {params!r}")
            self.params_ = "auto"
        elif isinstance(params, (PairParams, QuadParams)):
            self.params_ = params
        else:
            values = tuple(float(v) for v in params)
            if len(values) == 2:
                self.params_ = PairParams(*values)
            elif len(values) == 4:
                self.params_ = QuadParams(*values)
            else:
                raise ValueError(f"expected 2 or 4 parameter values, got {len(values)}")
        self.cfg_ = ParamSearchConfig(variant="t1", cap=self.cap, grid_points=self.grid_points)
        return self

    def decision_function(self, X) -> np.ndarray:
        """Criterion violation per sample; positive values certify steering."""
        if not hasattr(self, "params_"):
            self.fit()
        out = []
        for item in _iter_states(X):
            b = bloch_decompose(_coerce_state(item, self.dim_a, self.dim_b))
            if self.params_ == "auto":
                _, report, _ = _optimize_bloch(b, self.direction, self.cfg_)
            else:
                report = evaluate_bloch(b, self.params_, self.direction, self.margin)
            out.append(report.violation)
        return np.asarray(out)

    def predict(self, X) -> np.ndarray:
        """1 where the violation exceeds the margin, else 0."""
        return (self.decision_function(X) > self.margin).astype(int)
