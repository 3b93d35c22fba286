"""Bipartite density matrices and their Bloch-form representation.

A bipartite state on dimensions (d_A, d_B) is stored row-major over the
tensor product basis |i>_A |j>_B with flat index i * d_B + j. The Bloch
form collects the local expansion coefficients r and s and the joint
correlation matrix T over the canonical generator bases, so that

    rho = I/d_A x I/d_B + sum_i r_i G_i x I/d_B
        + sum_j s_j I/d_A x H_j + sum_ij T_ij G_i x H_j.

This module also provides the built-in one-parameter state families used
by the scan commands, state validation with explicit diagnostics, party
swapping, a partial-transpose entanglement check and the JSON wire
format for states.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .basis import generator_basis

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
IMAG_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Bipartite state with recorded subsystem dimensions.

    Attributes
    ----------
    dim_a, dim_b : int
        Local dimensions of the two parties.
    mat : ndarray
        Complex (dim_a * dim_b) x (dim_a * dim_b) matrix, row-major over
        |i>_A |j>_B with flat index i * dim_b + j.
    """

    dim_a: int
    dim_b: int
    mat: np.ndarray

    def __post_init__(self):
        m = np.array(self.mat, dtype=np.complex128)
        d = self.dim_a * self.dim_b
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} does not match dimensions ({self.dim_a}, {self.dim_b})")
        m.setflags(write=False)
        object.__setattr__(self, "mat", m)


@dataclass(frozen=True, eq=False)
class BlochForm:
    """Local Bloch vectors r, s and correlation matrix t of a state."""

    dim_a: int
    dim_b: int
    r: np.ndarray
    s: np.ndarray
    t: np.ndarray

    def swapped(self) -> "BlochForm":
        """Bloch form of the party-swapped state: (s, r, t transposed)."""
        return BlochForm(self.dim_b, self.dim_a, self.s, self.r, self.t.T)


@dataclass(frozen=True)
class StateDiagnostics:
    """Deviations of a candidate matrix from the density-matrix invariants."""

    hermiticity: float
    trace_deviation: float
    min_eigenvalue: float

    def failures(self) -> tuple:
        out = []
        if self.hermiticity > HERMITICITY_TOL:
            out.append(f"hermiticity deviation {self.hermiticity:.3e}")
        if self.trace_deviation > TRACE_TOL:
            out.append(f"trace deviation {self.trace_deviation:.3e}")
        if self.min_eigenvalue < -PSD_TOL:
            out.append(f"PSD violation {-self.min_eigenvalue:.3e}")
        return tuple(out)

    @property
    def ok(self) -> bool:
        return not self.failures()


class StateValidationError(ValueError):
    """Raised when a matrix fails the density-matrix invariants."""

    def __init__(self, message: str, diagnostics: StateDiagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


def state_diagnostics(mat: np.ndarray) -> StateDiagnostics:
    """Measure Hermiticity, trace and positivity deviations of a matrix."""
    m = np.asarray(mat, dtype=np.complex128)
    herm = float(np.abs(m - m.conj().T).max())
    trace_dev = float(abs(np.trace(m) - 1.0))
    sym = 0.5 * (m + m.conj().T)
    min_eig = float(np.linalg.eigvalsh(sym).min())
    return StateDiagnostics(herm, trace_dev, min_eig)


def validate_density(mat: np.ndarray, dim_a: int, dim_b: int) -> DensityMatrix:
    """Check the density-matrix invariants and wrap the matrix.

    Accepts matrices Hermitian within 1e-10, unit trace within 1e-10 and
    minimum eigenvalue >= -1e-9. On failure raises StateValidationError
    whose ``diagnostics`` attribute records every deviation.
    """
    m = np.asarray(mat, dtype=np.complex128)
    d = dim_a * dim_b
    if m.ndim != 2 or m.shape != (d, d):
        raise ValueError(f"expected a {d} x {d} matrix for dimensions ({dim_a}, {dim_b}), got shape {m.shape}")
    diag = state_diagnostics(m)
    if not diag.ok:
        raise StateValidationError("not a valid density matrix: " + "; ".join(diag.failures()), diag)
    return DensityMatrix(dim_a, dim_b, m)


def reduced_states(rho: DensityMatrix) -> tuple:
    """Partial traces (rho_A, rho_B) of a bipartite state."""
    R = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    return np.einsum("ijkj->ik", R), np.einsum("ijil->jl", R)


def bloch_decompose(rho: DensityMatrix) -> BlochForm:
    """Expand a state over the canonical generator bases.

    Computes r_i = tr(rho G_i x I), s_j = tr(rho I x H_j) and
    T_ij = tr(rho G_i x H_j). The input must satisfy the density-matrix
    invariants; the computed coefficients are checked to be real within
    1e-10 before the imaginary parts are discarded.
    """
    if not isinstance(rho, DensityMatrix):
        raise TypeError("bloch_decompose expects a DensityMatrix")
    diag = state_diagnostics(rho.mat)
    if not diag.ok:
        raise StateValidationError("not a valid density matrix: " + "; ".join(diag.failures()), diag)
    ga = generator_basis(rho.dim_a).stacked()
    gb = generator_basis(rho.dim_b).stacked()
    rho_a, rho_b = reduced_states(rho)
    r = np.einsum("ij,aji->a", rho_a, ga)
    s = np.einsum("ij,aji->a", rho_b, gb)
    R = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    t = np.einsum("ijkl,aki,blj->ab", R, ga, gb)
    worst = max(np.abs(r.imag).max(), np.abs(s.imag).max(), np.abs(t.imag).max())
    if worst > IMAG_TOL:
        raise StateValidationError(
            f"Bloch coefficients have imaginary residue {worst:.3e}", diag
        )
    return BlochForm(rho.dim_a, rho.dim_b, r.real.copy(), s.real.copy(), t.real.copy())


def bloch_reconstruct(b: BlochForm) -> DensityMatrix:
    """Rebuild the density matrix from a Bloch form.

    The output is Hermitian with unit trace by construction; positivity
    is not guaranteed for arbitrary coefficient choices and is not
    checked here.
    """
    na, nb = b.dim_a * b.dim_a - 1, b.dim_b * b.dim_b - 1
    r = np.asarray(b.r, dtype=float)
    s = np.asarray(b.s, dtype=float)
    t = np.asarray(b.t, dtype=float)
    if r.shape != (na,) or s.shape != (nb,) or t.shape != (na, nb):
        raise ValueError(
            f"coefficient shapes {r.shape}, {s.shape}, {t.shape} do not match dimensions ({b.dim_a}, {b.dim_b})"
        )
    ga = generator_basis(b.dim_a).stacked()
    gb = generator_basis(b.dim_b).stacked()
    eye_a = np.eye(b.dim_a)
    eye_b = np.eye(b.dim_b)
    mat = np.kron(eye_a, eye_b) / (b.dim_a * b.dim_b)
    mat = mat + np.kron(np.einsum("a,aij->ij", r, ga), eye_b / b.dim_b)
    mat = mat + np.kron(eye_a / b.dim_a, np.einsum("b,bij->ij", s, gb))
    corr = np.einsum("ab,aik,bjl->ijkl", t, ga, gb)
    d = b.dim_a * b.dim_b
    mat = mat + corr.reshape(d, d)
    return DensityMatrix(b.dim_a, b.dim_b, mat)


def swap_parties(rho: DensityMatrix) -> DensityMatrix:
    """Exchange the tensor factors: <ij|rho'|kl> = <ji|rho|lk>."""
    R = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    swapped = R.transpose(1, 0, 3, 2).reshape(rho.mat.shape)
    return DensityMatrix(rho.dim_b, rho.dim_a, swapped)


def ppt_min_eigenvalue(rho: DensityMatrix) -> float:
    """Minimum eigenvalue of the partial transpose on the second party.

    A negative value certifies entanglement; nonnegative means the state
    is PPT.
    """
    R = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    pt = R.transpose(0, 3, 2, 1).reshape(rho.mat.shape)
    return float(np.linalg.eigvalsh(pt).min())


def _check_mixing(p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"mixing parameter must lie in [0, 1], got {p}")
    return p


def _ket(d: int, amplitudes: dict) -> np.ndarray:
    v = np.zeros(d, dtype=np.complex128)
    for idx, amp in amplitudes.items():
        v[idx] = amp
    return v


_PSI_MINUS = _ket(4, {1: 1.0 / np.sqrt(2.0), 2: -1.0 / np.sqrt(2.0)})
_PHI_PLUS = _ket(4, {0: 1.0 / np.sqrt(2.0), 3: 1.0 / np.sqrt(2.0)})
_ASYM_KET = _ket(4, {0: 2.0 / 3.0, 2: 1.0 / 3.0, 3: 2.0 / 3.0})


def example1_state(p: float) -> DensityMatrix:
    """Singlet mixed with |0><0| x I/2: p |psi-><psi-| + (1-p) |0><0| x I/2."""
    p = _check_mixing(p)
    e00 = np.zeros((2, 2))
    e00[0, 0] = 1.0
    mat = p * np.outer(_PSI_MINUS, _PSI_MINUS.conj()) + (1.0 - p) * np.kron(e00, np.eye(2) / 2.0)
    return DensityMatrix(2, 2, mat)


def example2_state(p: float) -> DensityMatrix:
    """Asymmetric pure state mixed with white noise.

    p |psi><psi| + (1-p) I/4 with |psi> = (2/3)(|00> + |11>) + (1/3)|10>.
    """
    p = _check_mixing(p)
    mat = p * np.outer(_ASYM_KET, _ASYM_KET.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(2, 2, mat)


def werner_state(p: float) -> DensityMatrix:
    """Two-qubit Werner family: p |psi-><psi-| + (1-p) I/4."""
    p = _check_mixing(p)
    mat = p * np.outer(_PSI_MINUS, _PSI_MINUS.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(2, 2, mat)


def isotropic_state(p: float) -> DensityMatrix:
    """Two-qubit isotropic family: p |phi+><phi+| + (1-p) I/4."""
    p = _check_mixing(p)
    mat = p * np.outer(_PHI_PLUS, _PHI_PLUS.conj()) + (1.0 - p) * np.eye(4) / 4.0
    return DensityMatrix(2, 2, mat)


FAMILIES = {
    "example1": example1_state,
    "example2": example2_state,
    "werner": werner_state,
    "isotropic": isotropic_state,
}


def family_state(name: str, p: float) -> DensityMatrix:
    """Build a registered one-parameter family member by name."""
    try:
        ctor = FAMILIES[name]
    except KeyError:
        known = ", ".join(sorted(FAMILIES))
        raise ValueError(f"unknown family {name!r}; known families: {known}") from None
    return ctor(p)


def complex_to_pairs(mat: np.ndarray) -> list:
    """Encode a complex matrix as nested [real, imag] pairs."""
    m = np.asarray(mat, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def pairs_to_complex(rows) -> np.ndarray:
    """Decode a nested [real, imag] pair listing into a complex matrix."""
    arr = np.asarray(rows, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix entries must be [real, imag] pairs")
    return arr[..., 0] + 1.0j * arr[..., 1]


def state_to_dict(rho: DensityMatrix) -> dict:
    """Serialize a state to the JSON wire format."""
    return {"dA": rho.dim_a, "dB": rho.dim_b, "matrix": complex_to_pairs(rho.mat)}


def state_from_dict(obj: dict) -> DensityMatrix:
    """Parse and validate a state from the JSON wire format.

    Expects {"dA": int, "dB": int, "matrix": [[[re, im], ...], ...]} with
    rows in the i * dB + j index convention.
    """
    if not isinstance(obj, dict):
        raise ValueError("state document must be a JSON object")
    missing = [k for k in ("dA", "dB", "matrix") if k not in obj]
    if missing:
        raise ValueError(f"state document is missing keys: {', '.join(missing)}")
    dim_a, dim_b = int(obj["dA"]), int(obj["dB"])
    if dim_a < 2 or dim_b < 2:
        raise ValueError(f"subsystem dimensions must be >= 2, got ({dim_a}, {dim_b})")
    mat = pairs_to_complex(obj["matrix"])
    return validate_density(mat, dim_a, dim_b)


def load_state(path) -> DensityMatrix:
    """Load a state from a JSON file in the wire format."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"invalid JSON in {path}: {exc}") from exc
    return state_from_dict(obj)
