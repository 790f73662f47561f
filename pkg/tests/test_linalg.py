"""Tests for the dense symmetric spectral core."""

import math

import numpy as np
import pytest

from specprod.errors import ContractError, DomainError, InputError
from specprod.linalg import (
    SchattenIndex,
    SpectralWindow,
    SymmetricOperator,
    apply_function,
    eigendecompose,
    kernel_equiv_check,
    schatten_norm,
    spectral_projection,
    trace_function,
)

EXCHANGE = np.array([[0.0, 1.0], [1.0, 0.0]])


def test_symmetrization_is_exact():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((7, 7))
    a = SymmetricOperator(m)
    assert np.array_equal(a.matrix, a.matrix.T)


def test_rejects_nonfinite_and_nonsquare():
    with pytest.raises(InputError):
        SymmetricOperator([[1.0, np.nan], [np.nan, 1.0]])
    with pytest.raises(InputError):
        SymmetricOperator(np.zeros((2, 3)))


def test_eigendecompose_identity():
    dec = eigendecompose(SymmetricOperator(np.eye(2)))
    assert np.allclose(dec.eigenvalues, [1.0, 1.0])
    assert np.abs(dec.eigenvectors.T @ dec.eigenvectors - np.eye(2)).max() < 1e-12


def test_eigendecompose_diagonal_sorted():
    dec = eigendecompose(SymmetricOperator(np.diag([3.0, -1.0])))
    assert np.allclose(dec.eigenvalues, [-1.0, 3.0])


def test_eigendecompose_exchange_matrix():
    # 2x2 hand computation: eigenvalues -1, 1 with vectors (1, -+1)/sqrt(2)
    dec = eigendecompose(SymmetricOperator(EXCHANGE))
    assert np.allclose(dec.eigenvalues, [-1.0, 1.0], atol=1e-14)
    for k, lam in enumerate(dec.eigenvalues):
        v = dec.eigenvectors[:, k]
        assert np.abs(EXCHANGE @ v - lam * v).max() < 1e-14
        assert abs(abs(v[0]) - 1 / math.sqrt(2)) < 1e-12


def test_eigendecompose_tridiagonal_path_matches_dense():
    rng = np.random.default_rng(1)
    n = 40
    m = np.diag(rng.standard_normal(n)) + np.diag(rng.standard_normal(n - 1), 1)
    a = SymmetricOperator(m)
    dec = eigendecompose(a)
    assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh(a.matrix), atol=1e-12)


def test_spectral_projection_separated_spectrum():
    dec = eigendecompose(SymmetricOperator(np.diag([-2.0, 5.0])))
    p = spectral_projection(dec, SpectralWindow(-math.inf, 0.0))
    assert np.allclose(p.matrix, np.diag([1.0, 0.0]), atol=1e-14)


def test_spectral_projection_whole_line_is_identity():
    dec = eigendecompose(SymmetricOperator(np.diag([-2.0, 5.0])))
    p = spectral_projection(dec, SpectralWindow())
    assert np.allclose(p.matrix, np.eye(2), atol=1e-14)


def test_spectral_projection_exchange_positive_part():
    # rank-1 projector onto (1,1)/sqrt(2)
    dec = eigendecompose(SymmetricOperator(EXCHANGE))
    p = spectral_projection(dec, SpectralWindow(0.0, math.inf))
    assert np.allclose(p.matrix, 0.5 * np.ones((2, 2)), atol=1e-14)


def test_window_tie_rule_excludes_open_endpoint():
    dec = eigendecompose(SymmetricOperator(np.diag([1.0, 2.0])))
    # eigenvalue 1.0 sits within 1e-12 of the open endpoint: excluded
    p = spectral_projection(dec, SpectralWindow(1.0 - 5e-13, math.inf))
    assert np.isclose(np.trace(p.matrix), 1.0)
    # closed endpoint keeps it
    p = spectral_projection(dec, SpectralWindow(1.0 - 5e-13, math.inf, lo_open=False))
    assert np.isclose(np.trace(p.matrix), 2.0)


def test_window_requires_order():
    with pytest.raises(InputError):
        SpectralWindow(2.0, 1.0)


def test_projection_idempotent_and_symmetric_random():
    rng = np.random.default_rng(42)
    for _ in range(200):
        n = int(rng.integers(2, 51))
        a = SymmetricOperator(rng.standard_normal((n, n)))
        dec = eigendecompose(a)
        lo, hi = np.sort(rng.standard_normal(2) * 2.0)
        if hi - lo < 1e-6:
            hi = lo + 1.0
        p = spectral_projection(dec, SpectralWindow(lo, hi)).matrix
        assert np.abs(p @ p - p).max() < 1e-9
        assert np.abs(p - p.T).max() < 1e-9


def test_apply_function_identity_reconstructs():
    rng = np.random.default_rng(3)
    a = SymmetricOperator(rng.standard_normal((12, 12)))
    dec = eigendecompose(a)
    back = apply_function(dec, lambda t: t)
    assert np.abs(back.matrix - a.matrix).max() < 1e-8 * max(1.0, a.max_norm())


def test_apply_function_square_of_exchange_is_identity():
    dec = eigendecompose(SymmetricOperator(EXCHANGE))
    sq = apply_function(dec, lambda t: t * t)
    assert np.allclose(sq.matrix, np.eye(2), atol=1e-14)


def test_apply_function_indicator_matches_projection():
    rng = np.random.default_rng(4)
    a = SymmetricOperator(rng.standard_normal((9, 9)))
    dec = eigendecompose(a)
    p1 = spectral_projection(dec, SpectralWindow(0.0, math.inf))
    p2 = apply_function(dec, lambda t: 1.0 if t > 0.0 else 0.0)
    assert np.abs(p1.matrix - p2.matrix).max() < 1e-12


def test_apply_function_domain_error_names_eigenvalue():
    dec = eigendecompose(SymmetricOperator(np.diag([0.0, 2.0])))
    with pytest.raises(DomainError, match="0.0"):
        apply_function(dec, lambda t: 1.0 / t if t != 0 else math.inf)


def test_schatten_norms():
    assert schatten_norm(SymmetricOperator(np.zeros((3, 3))), 2.0) == 0.0
    d = SymmetricOperator(np.diag([3.0, -4.0]))
    assert abs(schatten_norm(d, 1.0) - 7.0) < 1e-14
    assert abs(schatten_norm(d, 2.0) - 5.0) < 1e-14
    assert abs(schatten_norm(d, math.inf) - 4.0) < 1e-14
    assert abs(schatten_norm(d, SchattenIndex(2.0)) - 5.0) < 1e-14


def test_schatten_norm_rejects_small_q():
    with pytest.raises(InputError):
        schatten_norm(np.eye(2), 0.5)
    with pytest.raises(InputError):
        SchattenIndex(0.99)


def test_trace_function_values():
    p = SymmetricOperator(np.diag([1.0, 1.0, 0.0]))
    assert abs(trace_function(p, lambda t: t) - 2.0) < 1e-12
    d = SymmetricOperator(np.diag([0.5, 0.25]))
    assert abs(trace_function(d, lambda t: t * t) - 0.3125) < 1e-14
    z = SymmetricOperator(np.zeros((4, 4)))
    assert trace_function(z, lambda t: t) == 0.0


def test_trace_function_requires_vanishing_at_zero():
    with pytest.raises(ContractError):
        trace_function(SymmetricOperator(np.eye(2)), lambda t: t + 1.0)


def test_trace_function_matches_apply_function():
    rng = np.random.default_rng(5)
    for _ in range(20):
        n = int(rng.integers(2, 20))
        a = SymmetricOperator(rng.standard_normal((n, n)))
        f = lambda t: t**3 - 2.0 * t
        via_trace = trace_function(a, f)
        via_matrix = float(np.trace(apply_function(eigendecompose(a), f).matrix))
        assert abs(via_trace - via_matrix) < 1e-10 * max(1.0, abs(via_matrix))


def test_kernel_equiv_row_vector():
    rep = kernel_equiv_check(np.array([[1.0, 2.0]]))
    assert np.allclose(rep.left_spectrum, [5.0])
    assert np.allclose(rep.right_spectrum, [5.0])
    assert rep.equivalent


def test_kernel_equiv_zero():
    rep = kernel_equiv_check(np.zeros((3, 2)))
    assert len(rep.left_spectrum) == 0
    assert len(rep.right_spectrum) == 0
    assert rep.equivalent


def test_kernel_equiv_random_rectangular():
    rng = np.random.default_rng(6)
    for _ in range(50):
        rows, cols = rng.integers(1, 9, 2)
        rep = kernel_equiv_check(rng.standard_normal((rows, cols)))
        assert rep.max_discrepancy <= 1e-9


def test_schatten_hoelder_inequality():
    # ||AB||_p <= ||A||_2p ||B||_2p on random pairs
    rng = np.random.default_rng(7)
    for _ in range(60):
        n = int(rng.integers(2, 16))
        a = rng.standard_normal((n, n))
        b = rng.standard_normal((n, n))
        for p in (1.0, 1.5, 2.0, 3.0):
            lhs = schatten_norm(a @ b, p)
            rhs = schatten_norm(a, 2 * p) * schatten_norm(b, 2 * p)
            assert lhs <= rhs + 1e-12


def test_norm_perturbation_inequality_nonnegative_pairs():
    # |  ||Y||_q^q - ||X||_q^q | <= q max(||X||_q, ||Y||_q)^{q-1} ||Y - X||_q
    rng = np.random.default_rng(8)
    for _ in range(60):
        n = int(rng.integers(2, 14))
        mx = rng.standard_normal((n, n))
        my = rng.standard_normal((n, n))
        x = mx @ mx.T
        y = my @ my.T
        for q in (1.0, 2.0, 2.5, 4.0):
            nx, ny = schatten_norm(x, q), schatten_norm(y, q)
            lhs = abs(ny**q - nx**q)
            rhs = q * max(nx, ny) ** (q - 1.0) * schatten_norm(y - x, q)
            assert lhs <= rhs * (1.0 + 1e-12) + 1e-12
