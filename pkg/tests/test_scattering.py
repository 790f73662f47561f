"""Tests for 1D scattering data and limit constants."""

import cmath
import math

import numpy as np
import pytest

from specprod.errors import ContractError, DomainError, InputError
from specprod.hankel import pi_moment_constant
from specprod.scattering import (
    ScatteringData,
    eigenphases,
    indicator_limit_constant,
    limit_constant,
    limit_constant_density,
    limit_density,
    logdet_constant,
    logdet_constant_quadrature,
    scattering_table,
    transfer_matrix_smatrix,
    unitarity_defect,
)
from specprod.schrodinger import Potential

# high-precision oracle values (mpmath, 30 digits)
DENSITY_AT_HALF = 0.14328979206268907       # (1/2pi^2) / (0.5 sqrt(0.5)); a = 1
BAND_MASS = 0.10950696973866148             # (1/pi^2) arccosh(0.9 / sqrt(0.3))
SQRT_HALF = 0.7071067811865476
INV_PI_SQ = 0.10132118364233777


def square_well_transmission(depth, half_width, lam):
    """Closed-form |t|^2 for the attractive square well (independent oracle)."""
    kp_sq = lam + depth
    return 1.0 / (1.0 + depth**2 / (4.0 * lam * kp_sq)
                  * math.sin(2.0 * math.sqrt(kp_sq) * half_width) ** 2)


def test_zero_potential_identity():
    data = transfer_matrix_smatrix(Potential.zero(), 1.3)
    assert np.allclose(data.s_matrix, np.eye(2))
    assert data.amplitudes == (0.0, 0.0)


def test_rejects_nonpositive_energy():
    with pytest.raises(InputError):
        transfer_matrix_smatrix(Potential.square_well(2.0, 1.0), 0.0)


def test_square_well_transmission_oracle():
    pot = Potential.square_well(2.0, 1.0)
    for lam in np.linspace(0.2, 5.0, 50):
        data = transfer_matrix_smatrix(pot, float(lam))
        t = data.s_matrix[0, 0]
        assert abs(abs(t) ** 2 - square_well_transmission(2.0, 1.0, lam)) < 1e-6
        assert unitarity_defect(data.s_matrix) <= 1e-9


def test_symmetric_potential_even_odd_channels():
    # for a symmetric potential the eigenvalues of S are t + r and t - r
    pot = Potential.square_well(1.5, 0.8)
    data = transfer_matrix_smatrix(pot, 0.9)
    t, r = data.s_matrix[0, 0], data.s_matrix[1, 0]
    rp = data.s_matrix[0, 1]
    assert abs(r - rp) < 1e-10  # symmetric potential reflects equally both ways
    expected = sorted([t + r, t - r], key=lambda z: -abs(np.sin(np.angle(z) / 2)))
    evs = np.linalg.eigvals(data.s_matrix)
    evs = sorted(evs, key=lambda z: -abs(np.sin(np.angle(z) / 2)))
    assert np.allclose(evs, expected, atol=1e-10)


def test_gaussian_potential_unitary_and_converged():
    pot = Potential.gaussian(-1.0, 0.7)
    d1 = transfer_matrix_smatrix(pot, 1.1)
    d2 = transfer_matrix_smatrix(pot, 1.1, step=0.05)
    assert unitarity_defect(d1.s_matrix) <= 1e-9
    assert np.abs(d1.s_matrix - d2.s_matrix).max() < 1e-8


def test_eigenphases_identity_and_antipode():
    t1, t2, a1, a2 = eigenphases(np.eye(2, dtype=complex))
    assert a1 == a2 == 0.0
    s = np.diag([cmath.exp(1j * math.pi), 1.0])
    t1, t2, a1, a2 = eigenphases(s)
    assert abs(a1 - 1.0) < 1e-12
    s = np.diag([cmath.exp(1j * math.pi / 2.0), 1.0])
    t1, t2, a1, a2 = eigenphases(s)
    assert abs(a1 - SQRT_HALF) < 1e-12
    assert a2 == 0.0


def test_eigenphases_rejects_non_unitary():
    with pytest.raises(InputError):
        eigenphases(np.array([[1.0, 0.0], [0.0, 2.0]], dtype=complex))


def test_scattering_data_invariants():
    with pytest.raises(Exception):
        ScatteringData(lam=1.0, s_matrix=np.diag([2.0, 1.0]).astype(complex),
                       eigenphases=(0.0, 0.0), amplitudes=(0.0, 0.0))


def test_limit_density_values():
    assert abs(limit_density([1.0], 0.5) - DENSITY_AT_HALF) < 1e-15
    assert limit_density([0.6], 0.5) == 0.0  # above the band top 0.36
    with pytest.raises(DomainError):
        limit_density([1.0], 0.0)
    with pytest.raises(DomainError):
        limit_density([1.0], 1.0)


def test_limit_density_band_edge_convention():
    a = 0.8
    top = a * a
    assert limit_density([a], top - 1e-13) == 0.0   # one-sided limit: excluded
    assert limit_density([a], top - 1e-6) > 0.0


def test_limit_density_band_mass():
    # integral over (alpha, a^2) equals (1/pi^2) arccosh(a/sqrt(alpha));
    # substituting u = sqrt(a^2 - t) removes the edge singularity.  The
    # 1e-12 exclusion zone at the edge carries ~1e-7 of mass (inverse
    # square root), so the oracle stops at its boundary.
    import scipy.integrate as si
    a, alpha = 0.9, 0.3
    top = a * a
    edge = 1e-12
    val, err = si.quad(
        lambda u: 2.0 * u * limit_density([a], top - u * u),
        math.sqrt(edge) * 1.001, math.sqrt(top - alpha),
        epsabs=1e-11, epsrel=1e-12, limit=400)
    oracle = (math.acosh(a / math.sqrt(alpha))
              - math.acosh(a / math.sqrt(top - edge * 1.002))) / math.pi**2
    assert err < 1e-9
    assert abs(val - oracle) < 1e-8
    assert abs(oracle - BAND_MASS) < 1e-6  # the excluded sliver is tiny


def test_limit_density_full_band_mass_via_weighted_rule():
    # the same identity to 1e-8 once the formula (not the guarded evaluator)
    # supplies the excluded sliver: integrate mu * sqrt(top - t) against the
    # algebraic weight, patching the guard zone with the formula value
    import scipy.integrate as si
    a, alpha = 0.9, 0.3
    top = a * a

    def smooth_part(t):
        if t >= top - 1e-9:
            return a / (t * 2.0 * math.pi**2)  # limiting value of mu sqrt(top - t)
        return limit_density([a], t) * math.sqrt(top - t)

    val, err = si.quad(smooth_part, alpha, top, weight="alg", wvar=(0.0, -0.5),
                       epsabs=1e-11, limit=400)
    assert err < 1e-8
    assert abs(val - BAND_MASS) < 1e-8


def test_limit_constant_single_channel():
    assert abs(limit_constant(lambda t: t, [1.0]) - INV_PI_SQ) < 1e-10


def test_limit_constant_powers_match_moment_constants():
    amps = (0.75, 0.4)
    for n in (1, 2, 3):
        closed = sum(a ** (2 * n) for a in amps) * pi_moment_constant(n)
        assert abs(limit_constant(lambda t, _n=n: t**_n, amps) - closed) < 1e-10


def test_limit_constant_zero_functional_and_contract():
    assert limit_constant(lambda t: 0.0, [0.9, 0.2]) == 0.0
    with pytest.raises(ContractError):
        limit_constant(lambda t: t + 1.0, [0.5])


def test_limit_constant_two_routes_agree():
    amps = (0.9, 0.55)
    funcs = [lambda t: t, lambda t: t**2, lambda t: t**3, lambda t: t * (1 - t)]
    for f in funcs:
        assert abs(limit_constant(f, amps) - limit_constant_density(f, amps)) < 1e-8


def test_indicator_limit_constant_matches_density_mass():
    amps = (0.9,)
    val = indicator_limit_constant(0.3, 0.81, amps)
    assert abs(val - BAND_MASS) < 1e-12
    assert indicator_limit_constant(0.82, 0.9, amps) == 0.0
    with pytest.raises(InputError):
        indicator_limit_constant(0.5, 0.2, amps)


def test_logdet_constant_values():
    assert abs(logdet_constant([1.0]) - (-0.25)) < 1e-15
    assert logdet_constant([0.0]) == 0.0
    with pytest.raises(InputError):
        logdet_constant([1.5])


def test_logdet_quadrature_matches_closed_form():
    for a in (0.1, 0.5, 0.9, 1.0):
        assert abs(logdet_constant_quadrature([a]) - logdet_constant([a])) < 1e-8


def test_logdet_series_expansion():
    # -(1/pi^2) arcsin^2(a) = -sum_n (a^{2n}/n) pi_moment_constant(n)
    a = 0.5
    series = -sum(a ** (2 * n) / n * pi_moment_constant(n) * math.pi**2 / math.pi**2
                  for n in range(1, 61))
    assert abs(series - logdet_constant([a])) < 1e-8


def test_scattering_table_schema():
    rows = scattering_table(Potential.square_well(2.0, 1.0), [0.5, 1.0])
    assert len(rows) == 2
    assert list(rows[0]) == ["lambda", "theta1", "theta2", "a1", "a2",
                             "logdet_constant", "delta_1", "delta_2", "delta_3"]
    for row in rows:
        closed = sum(a**2 for a in (row["a1"], row["a2"])) * pi_moment_constant(1)
        assert abs(row["delta_1"] - closed) < 1e-8
