"""Tests for bordered criterion matrices, bounds and evaluation."""
from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose

from steerscan import (
    BlochForm,
    DensityMatrix,
    PairParams,
    QuadParams,
    VectorParams,
    bloch_decompose,
    bordered_matrix,
    criterion_matrix,
    evaluate,
    evaluate_bloch,
    example1_state,
    scaled_bordered_matrix,
    swap_parties,
    trace_norm,
    unsteerable_bound,
    vector_bordered_matrix,
    werner_state,
)
from conftest import DIM_PAIRS, random_density

SQ3 = np.sqrt(3.0)


def zero_bloch(dim_a=2, dim_b=2) -> BlochForm:
    na, nb = dim_a * dim_a - 1, dim_b * dim_b - 1
    return BlochForm(dim_a, dim_b, np.zeros(na), np.zeros(nb), np.zeros((na, nb)))


def singlet_bloch() -> BlochForm:
    return bloch_decompose(example1_state(1.0))


class TestParams:
    def test_pair_negative(self):
        with pytest.raises(ValueError, match="nonnegative"):
            PairParams(-1.0, 2.0)

    def test_quad_negative(self):
        with pytest.raises(ValueError, match="nonnegative"):
            QuadParams(1.0, 1.0, -0.1, 1.0)

    def test_vector_negative_entry(self):
        with pytest.raises(ValueError, match="nonnegative"):
            VectorParams([1.0, -1.0], [1.0])

    def test_vector_empty(self):
        with pytest.raises(ValueError, match="nonempty"):
            VectorParams([], [1.0])

    def test_vector_partial_expansion(self):
        with pytest.raises(ValueError, match="together"):
            VectorParams([1.0], [1.0], eta=[1.0])

    def test_reversed(self):
        assert PairParams(1.0, 2.0).reversed() == PairParams(2.0, 1.0)
        assert QuadParams(1.0, 2.0, 3.0, 4.0).reversed() == QuadParams(2.0, 1.0, 4.0, 3.0)
        v = VectorParams([1.0], [2.0], [3.0], [4.0]).reversed()
        assert v.alpha[0] == 2.0 and v.beta[0] == 1.0
        assert v.eta[0] == 4.0 and v.gamma[0] == 3.0

    def test_to_dict(self):
        assert PairParams(1.0, 2.0).to_dict() == {"kind": "pair", "x": 1.0, "y": 2.0}
        d = QuadParams(1.0, 2.0, 3.0, 4.0).to_dict()
        assert d == {"kind": "quad", "x": 1.0, "y": 2.0, "g": 3.0, "h": 4.0}


class TestBorderedMatrix:
    def test_zero_bloch_corner(self):
        m = bordered_matrix(zero_bloch(), 2.0, 3.0)
        expected = np.zeros((4, 4))
        expected[0, 0] = 6.0
        assert_allclose(m, expected, atol=1e-15)

    def test_zero_params_keep_correlations(self):
        p = 0.4
        m = bordered_matrix(bloch_decompose(example1_state(p)), 0.0, 0.0)
        expected = np.zeros((4, 4))
        expected[1:, 1:] = -(p / 2.0) * np.eye(3)
        assert_allclose(m, expected, atol=1e-12)

    def test_singlet_unit_params(self):
        m = bordered_matrix(singlet_bloch(), 1.0, 1.0)
        assert_allclose(m, np.diag([1.0, -0.5, -0.5, -0.5]), atol=1e-12)

    def test_negative_parameter(self):
        with pytest.raises(ValueError):
            bordered_matrix(zero_bloch(), -1.0, 0.0)


class TestScaledBorderedMatrix:
    def test_unit_scalings_reduce(self):
        b = bloch_decompose(example1_state(0.3))
        assert_allclose(
            scaled_bordered_matrix(b, 2.0, 3.0, 1.0, 1.0),
            bordered_matrix(b, 2.0, 3.0),
            atol=1e-15,
        )

    def test_zero_scalings(self):
        b = bloch_decompose(example1_state(0.3))
        m = scaled_bordered_matrix(b, 1.0, 1.0, 0.0, 0.0)
        expected = np.zeros((4, 4))
        expected[0, 0] = 1.0
        assert_allclose(m, expected, atol=1e-15)

    def test_blocks(self):
        x, y, g, h = 64.8, 38.7, 0.02, 0.02
        b = bloch_decompose(example1_state(0.6))
        m = scaled_bordered_matrix(b, x, y, g, h)
        assert m[0, 0] == pytest.approx(x * y)
        assert_allclose(m[0, 1:], x * h * b.s, atol=1e-15)
        assert_allclose(m[1:, 0], y * g * b.r, atol=1e-15)
        assert_allclose(m[1:, 1:], g * h * b.t, atol=1e-15)


class TestVectorBorderedMatrix:
    def test_singleton_equals_pair(self):
        b = bloch_decompose(example1_state(0.5))
        assert_allclose(
            vector_bordered_matrix(b, [2.0], [3.0]),
            bordered_matrix(b, 2.0, 3.0),
            atol=1e-15,
        )

    def test_vector_norm_reduction(self):
        b = bloch_decompose(example1_state(0.5))
        plain = trace_norm(vector_bordered_matrix(b, [3.0, 4.0], [1.0]))
        scalar = trace_norm(bordered_matrix(b, 5.0, 1.0))
        assert plain == pytest.approx(scalar, abs=1e-12)

    def test_unit_expansion_equals_plain(self):
        b = bloch_decompose(example1_state(0.5))
        assert_allclose(
            vector_bordered_matrix(b, [1.5], [2.5], [1.0], [1.0]),
            vector_bordered_matrix(b, [1.5], [2.5]),
            atol=1e-15,
        )

    def test_block_shape(self):
        b = zero_bloch(2, 3)
        m = vector_bordered_matrix(b, [1.0, 2.0], [1.0], [1.0, 1.0, 1.0], [1.0, 2.0])
        assert m.shape == (2 + 3 * 3, 1 + 2 * 8)


class TestTraceNorm:
    def test_diagonal(self):
        assert trace_norm(np.diag([1.0, -2.0, 3.0])) == pytest.approx(6.0, abs=1e-12)

    def test_nilpotent(self):
        assert trace_norm(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(1.0, abs=1e-12)

    def test_singlet_bordered(self):
        m = bordered_matrix(singlet_bloch(), 1.0, 1.0)
        assert trace_norm(m) == pytest.approx(2.5, abs=1e-12)

    def test_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            trace_norm(np.array([[np.nan, 0.0], [0.0, 1.0]]))

    def test_against_gram_eigenvalues(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            # redraw near-singular matrices, where the Gram-based
            # reference itself loses half its precision
            while True:
                m = rng.normal(size=(int(rng.integers(1, 10)), int(rng.integers(1, 10))))
                if np.linalg.svd(m, compute_uv=False).min() >= 1e-3:
                    break
            # Gram matrix on the smaller side avoids structural zeros
            gram = m.T @ m if m.shape[1] <= m.shape[0] else m @ m.T
            eigs = np.linalg.eigvalsh(gram)
            oracle = np.sqrt(np.clip(eigs, 0.0, None)).sum()
            assert trace_norm(m) == pytest.approx(oracle, abs=1e-10)


class TestUnsteerableBound:
    def test_zero_pair(self):
        assert unsteerable_bound(2, 2, PairParams(0.0, 0.0)) == pytest.approx(SQ3 / 2.0, abs=1e-12)

    def test_quad_reduces_to_pair(self):
        assert unsteerable_bound(2, 2, QuadParams(3.0, 4.0, 1.0, 1.0)) == pytest.approx(
            unsteerable_bound(2, 2, PairParams(3.0, 4.0)), abs=1e-12
        )

    def test_arithmetic(self):
        expected = np.sqrt(64.8**2 + 1.5) * np.sqrt(38.7**2 + 0.5)
        assert unsteerable_bound(2, 2, PairParams(64.8, 38.7)) == pytest.approx(expected, rel=1e-14)

    def test_vector_uses_norms(self):
        v = VectorParams([3.0, 4.0], [1.0, 2.0, 2.0], [6.0, 8.0], [0.3, 0.4])
        assert unsteerable_bound(2, 2, v) == pytest.approx(
            unsteerable_bound(2, 2, QuadParams(5.0, 3.0, 10.0, 0.5)), rel=1e-14
        )

    def test_party_asymmetry(self):
        lhs_heavy = unsteerable_bound(3, 2, PairParams(0.0, 0.0))
        rhs_heavy = unsteerable_bound(2, 3, PairParams(0.0, 0.0))
        assert lhs_heavy == pytest.approx(np.sqrt(8.0 / 3.0) * np.sqrt(0.5), rel=1e-14)
        assert rhs_heavy == pytest.approx(np.sqrt(1.5) * np.sqrt(2.0 / 3.0), rel=1e-14)
        assert lhs_heavy != pytest.approx(rhs_heavy)


class TestEvaluate:
    def test_singlet_zero_params(self):
        report = evaluate(example1_state(1.0), PairParams(0.0, 0.0), "ab")
        assert report.lhs == pytest.approx(1.5, abs=1e-12)
        assert report.rhs == pytest.approx(SQ3 / 2.0, abs=1e-12)
        assert report.violation == pytest.approx(1.5 - SQ3 / 2.0, abs=1e-12)
        assert report.steerable

    def test_maximally_mixed_never_detected(self):
        mm = DensityMatrix(2, 2, np.eye(4) / 4.0)
        for params in (PairParams(0.0, 0.0), PairParams(3.0, 7.0), QuadParams(2.0, 5.0, 1.0, 2.0)):
            for direction in ("ab", "ba"):
                report = evaluate(mm, params, direction)
                assert not report.steerable
                assert report.violation < 0.0

    def test_threshold_sign_flip(self):
        params = PairParams(64.8, 38.7)
        assert evaluate(example1_state(0.56), params, "ab").violation > 0.0
        assert evaluate(example1_state(0.55), params, "ab").violation < 0.0

    def test_direction_validation(self):
        with pytest.raises(ValueError, match="direction"):
            evaluate(example1_state(0.5), PairParams(0.0, 0.0), "sideways")

    def test_margin(self):
        report = evaluate(example1_state(1.0), PairParams(0.0, 0.0), "ab", margin=10.0)
        assert report.violation > 0.0
        assert not report.steerable

    def test_evaluate_matches_bloch_path(self):
        rho = example1_state(0.7)
        b = bloch_decompose(rho)
        for direction in ("ab", "ba"):
            full = evaluate(rho, PairParams(2.0, 3.0), direction)
            fast = evaluate_bloch(b, PairParams(2.0, 3.0), direction)
            assert full.lhs == pytest.approx(fast.lhs, abs=1e-14)
            assert full.rhs == pytest.approx(fast.rhs, abs=1e-14)

    def test_reverse_direction_via_swapped_state(self):
        rng = np.random.default_rng(21)
        for dims in DIM_PAIRS:
            rho = random_density(rng, *dims)
            params = QuadParams(1.3, 0.4, 2.0, 0.7)
            via_ba = evaluate(rho, params, "ba")
            via_swap = evaluate(swap_parties(rho), params.reversed(), "ab")
            assert via_ba.lhs == pytest.approx(via_swap.lhs, abs=1e-12)
            assert via_ba.rhs == pytest.approx(via_swap.rhs, abs=1e-12)

    def test_symmetric_state_direction_consistency(self):
        rho = werner_state(0.7)
        for params in (PairParams(0.0, 0.0), PairParams(1.0, 1.0), QuadParams(2.0, 2.0, 0.5, 0.5)):
            ab = evaluate(rho, params, "ab")
            ba = evaluate(rho, params, "ba")
            assert ab.lhs == pytest.approx(ba.lhs, abs=1e-12)
            assert ab.rhs == pytest.approx(ba.rhs, abs=1e-12)

    def test_report_dict(self):
        report = evaluate(example1_state(0.6), PairParams(1.0, 2.0), "ab")
        d = report.to_dict()
        assert list(d) == ["direction", "params", "lhs", "rhs", "violation", "steerable"]
        assert d["params"] == {"kind": "pair", "x": 1.0, "y": 2.0}


class TestReductionChain:
    def test_quad_unit_equals_pair(self):
        b = bloch_decompose(example1_state(0.6))
        for direction in ("ab", "ba"):
            pair = evaluate_bloch(b, PairParams(7.0, 11.0), direction)
            quad = evaluate_bloch(b, QuadParams(7.0, 11.0, 1.0, 1.0), direction)
            assert pair.lhs == quad.lhs
            assert pair.rhs == quad.rhs

    def test_zero_pair_is_plain_trace_norm(self):
        b = bloch_decompose(example1_state(0.6))
        report = evaluate_bloch(b, PairParams(0.0, 0.0), "ab")
        assert report.lhs == pytest.approx(trace_norm(b.t), abs=1e-14)

    def test_dispatch(self):
        b = bloch_decompose(example1_state(0.4))
        assert_allclose(
            criterion_matrix(b, PairParams(1.0, 2.0)),
            bordered_matrix(b, 1.0, 2.0),
            atol=1e-15,
        )
        assert_allclose(
            criterion_matrix(b, VectorParams([1.0], [2.0])),
            bordered_matrix(b, 1.0, 2.0),
            atol=1e-15,
        )
        with pytest.raises(TypeError):
            criterion_matrix(b, (1.0, 2.0))
