"""1D scattering data and the limit constants it predicts.

The 2x2 scattering matrix of a short-range potential at positive energy
is assembled from transmission and reflection coefficients obtained by
propagating the stationary equation across the support with
piecewise-constant transfer matrices (step halved until convergence).
Its eigenphases yield the channel amplitudes a = |sin(theta/2)|, and
those amplitudes feed every limiting constant used by the sweep drivers:

* the limiting eigenvalue density, a sum of inverse-square-root band
  profiles supported on (0, a^2];
* trace functionals as hyperbolic-secant integrals (with the equivalent
  density-side integral available as an independent cross-check);
* the log-determinant constant, both as a quadrature and in the
  -(1/pi^2) sum-of-arcsin^2 closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .errors import ContractError, DomainError, InputError, NumericalError
from .schrodinger import Potential

UNITARITY_TOL = 1e-9
BAND_EDGE_TOL = 1e-12


def _sech_sq_pi(x: float) -> float:
    """cosh(pi x)^-2 without overflow for large |x|."""
    e = math.exp(-abs(math.pi * x))
    s = 2.0 * e / (1.0 + e * e)
    return s * s


@dataclass(frozen=True)
class ScatteringData:
    """Energy, unitary 2x2 matrix, eigenphases and channel amplitudes."""

    lam: float
    s_matrix: np.ndarray
    eigenphases: tuple[float, float]
    amplitudes: tuple[float, float]

    def __post_init__(self):
        defect = unitarity_defect(self.s_matrix)
        if defect > UNITARITY_TOL:
            raise NumericalError(f"scattering matrix unitarity defect {defect:.3e}")
        for theta, a in zip(self.eigenphases, self.amplitudes):
            if abs(abs(math.sin(theta / 2.0)) - a) > 1e-12:
                raise NumericalError("amplitudes inconsistent with eigenphases")
        self.s_matrix.setflags(write=False)


def unitarity_defect(s: np.ndarray) -> float:
    return float(np.abs(s.conj().T @ s - np.eye(s.shape[0])).max())


def eigenphases(s: np.ndarray) -> tuple[float, float, float, float]:
    """Eigenphases and amplitudes (theta1, theta2, a1, a2), descending in a.

    The amplitudes a = |sin(theta/2)| are basis-independent; ordering by
    amplitude makes channel labels stable across energies.
    """
    s = np.asarray(s, dtype=complex)
    if s.shape != (2, 2):
        raise InputError(f"expected a 2x2 matrix, got shape {s.shape}")
    if unitarity_defect(s) > UNITARITY_TOL:
        raise InputError("matrix is not unitary within 1e-9")
    evs = np.linalg.eigvals(s)
    thetas = np.angle(evs)
    amps = np.abs(np.sin(thetas / 2.0))
    order = np.argsort(-amps)
    t1, t2 = (float(thetas[i]) for i in order)
    a1, a2 = (float(amps[i]) for i in order)
    return t1, t2, a1, a2


def _cell_matrix(kappa_sq: complex, width: float) -> np.ndarray:
    """Transfer matrix of psi'' = -kappa_sq psi over one constant cell,
    acting on (psi, psi')."""
    kappa = np.sqrt(complex(kappa_sq))
    z = kappa * width
    c = np.cos(z)
    if abs(z) > 1e-8:
        s = np.sin(z) / kappa
    else:
        s = width * (1.0 - z * z / 6.0)
    return np.array([[c, s], [-kappa_sq * s, c]], dtype=complex)


def _propagate(potential: Potential, lam: float, n_cells: int) -> np.ndarray:
    """Total transfer matrix across the support with piecewise-constant cells."""
    radius = potential.support_radius
    edges = np.linspace(-radius, radius, n_cells + 1)
    cuts = [d for d in potential.discontinuities if -radius < d < radius]
    if cuts:
        edges = np.unique(np.concatenate([edges, np.asarray(cuts)]))
    m = np.eye(2, dtype=complex)
    mids = 0.5 * (edges[:-1] + edges[1:])
    widths = np.diff(edges)
    values = potential(mids)
    for v, width in zip(values, widths):
        m = _cell_matrix(lam - v, width) @ m
    return m


def _solve_amplitudes(m: np.ndarray, k: float, radius: float):
    """Reflection/transmission for left and right incidence from one transfer matrix."""
    eika = np.exp(1j * k * radius)
    emika = np.exp(-1j * k * radius)
    # left incidence: psi = e^{ikx} + r e^{-ikx} (x < -R), t e^{ikx} (x > R)
    a_left = np.array([
        [(m[0, 0] - 1j * k * m[0, 1]) * eika, -eika],
        [(m[1, 0] - 1j * k * m[1, 1]) * eika, -1j * k * eika],
    ])
    b_left = -np.array([
        (m[0, 0] + 1j * k * m[0, 1]) * emika,
        (m[1, 0] + 1j * k * m[1, 1]) * emika,
    ])
    r, t = np.linalg.solve(a_left, b_left)
    # right incidence: psi = e^{-ikx} + r' e^{ikx} (x > R), t' e^{-ikx} (x < -R);
    # matching (e^{-ikR} + r' e^{ikR}, -ik e^{-ikR} + ik r' e^{ikR})
    #        = M (t' e^{ikR}, -ik t' e^{ikR}) gives a 2x2 system in (r', t').
    a_right = np.array([
        [-eika, (m[0, 0] - 1j * k * m[0, 1]) * eika],
        [-1j * k * eika, (m[1, 0] - 1j * k * m[1, 1]) * eika],
    ])
    b_right = np.array([emika, -1j * k * emika])
    rp, tp = np.linalg.solve(a_right, b_right)
    return r, t, rp, tp


def transfer_matrix_smatrix(potential: Potential, lam: float, *,
                            step: float = 0.1, tol: float = 1e-10,
                            max_refinements: int = 14) -> ScatteringData:
    """Scattering matrix at energy lam > 0, convention S = [[t, r'], [r, t]].

    The support is covered with piecewise-constant cells of the requested
    step (split exactly at potential discontinuities, which makes square
    wells exact); the step is halved until successive matrices agree to
    ``tol`` and the unitarity defect is below 1e-9.
    """
    if lam <= 0:
        raise InputError(f"energy must be positive, got {lam}")
    k = math.sqrt(lam)
    radius = potential.support_radius
    if radius == 0.0:
        s = np.eye(2, dtype=complex)
        return ScatteringData(lam=lam, s_matrix=s, eigenphases=(0.0, 0.0),
                              amplitudes=(0.0, 0.0))
    n_cells = max(int(math.ceil(2.0 * radius / step)), 2)
    prev = None
    for _ in range(max_refinements):
        m = _propagate(potential, lam, n_cells)
        r, t, rp, tp = _solve_amplitudes(m, k, radius)
        s = np.array([[t, rp], [r, tp]], dtype=complex)
        if prev is not None and np.abs(s - prev).max() <= tol \
                and unitarity_defect(s) <= UNITARITY_TOL:
            t1, t2, a1, a2 = eigenphases(s)
            return ScatteringData(lam=lam, s_matrix=s, eigenphases=(t1, t2),
                                  amplitudes=(a1, a2))
        prev = s
        n_cells *= 2
    raise NumericalError(
        f"transfer matrix did not converge at lam={lam} "
        f"(last defect {unitarity_defect(prev):.3e})"
    )


def limit_density(amplitudes, t: float) -> float:
    """Limiting eigenvalue density at t in (0, 1).

    Sum over channels of (1/(2 pi^2)) / (t sqrt(1 - t/a^2)), each band
    supported on the open interval (0, a^2); a point within 1e-12 of a
    band edge is excluded from that band.
    """
    if not (0.0 < t < 1.0):
        raise DomainError(f"density is defined on (0, 1), got t={t}")
    total = 0.0
    for a in amplitudes:
        if a <= 0.0:
            continue
        band_top = a * a
        if t < band_top - BAND_EDGE_TOL:
            total += 1.0 / (t * math.sqrt(1.0 - t / band_top))
    return total / (2.0 * math.pi**2)


def _quad_strict(f, lo, hi, *, epsabs, points=None):
    val, err = scipy.integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=1e-12,
                                    limit=400, points=points)
    if err > max(100.0 * epsabs, 1e-7):
        raise NumericalError(
            f"quadrature did not converge: estimated error {err:.3e} on ({lo}, {hi})"
        )
    return val


def limit_constant(f, amplitudes, *, epsabs: float = 1e-10) -> float:
    """Sum over channels of (1/2pi) * integral f(a^2 / cosh^2(pi x)) dx.

    ``f`` must be continuous on [0, 1] with f(0) = 0.
    """
    if abs(f(0.0)) > 1e-12:
        raise ContractError("functional must vanish at 0")
    total = 0.0
    for a in amplitudes:
        if a <= 0.0:
            continue
        top = a * a

        def integrand(x, _top=top):
            return f(_top * _sech_sq_pi(x))

        total += 2.0 * _quad_strict(integrand, 0.0, np.inf, epsabs=epsabs / 2.0)
    return total / (2.0 * math.pi)


def limit_constant_density(f, amplitudes) -> float:
    """The same constant as integral of f against the limiting density.

    Written per band as a weighted quadrature with the inverse-square-root
    endpoint factor handled by the algebraic-weight rule, so the two
    routes are numerically independent.
    """
    total = 0.0
    for a in amplitudes:
        if a <= 0.0:
            continue
        top = a * a

        def integrand(t, _a=a):
            if t <= 0.0:
                return 0.0
            return _a * f(t) / t / (2.0 * math.pi**2)

        val, err = scipy.integrate.quad(integrand, 0.0, top, weight="alg",
                                        wvar=(0.0, -0.5), epsabs=1e-11,
                                        epsrel=1e-12, limit=400)
        if err > 1e-7:
            raise NumericalError(f"density-side quadrature error {err:.3e}")
        total += val
    return total


def indicator_limit_constant(alpha: float, beta: float, amplitudes) -> float:
    """Limit constant for the indicator of (alpha, beta), 0 < alpha < beta <= 1.

    Per band this is the density mass (1/pi^2)(arccosh(a/sqrt(alpha)) -
    arccosh(a/sqrt(min(beta, a^2)))) for alpha < a^2.
    """
    if not (0.0 < alpha < beta <= 1.0):
        raise InputError(f"requires 0 < alpha < beta <= 1, got ({alpha}, {beta})")
    total = 0.0
    for a in amplitudes:
        top = a * a
        if top <= alpha:
            continue
        hi = min(beta, top)
        total += math.acosh(a / math.sqrt(alpha)) - math.acosh(a / math.sqrt(hi))
    return total / math.pi**2


def logdet_constant(amplitudes) -> float:
    """Closed form -(1/pi^2) * sum of arcsin^2(a) over channels."""
    total = 0.0
    for a in amplitudes:
        if not 0.0 <= a <= 1.0 + 1e-12:
            raise InputError(f"amplitudes must lie in [0, 1], got {a}")
        total += math.asin(min(a, 1.0)) ** 2
    return -total / math.pi**2


def logdet_constant_quadrature(amplitudes) -> float:
    """(1/2pi) * sum of integral ln(1 - a^2 / cosh^2(pi x)) dx.

    For a = 1 the integrand has an integrable log singularity at 0, so the
    integral is split there.
    """
    total = 0.0
    for a in amplitudes:
        if a <= 0.0:
            continue
        top = a * a

        def integrand(x, _top=top):
            arg = _top * _sech_sq_pi(x)
            return math.log1p(-arg) if arg < 1.0 else -math.inf

        total += 2.0 * (_quad_strict(integrand, 0.0, 1.0, epsabs=1e-11)
                        + _quad_strict(integrand, 1.0, np.inf, epsabs=1e-11))
    return total / (2.0 * math.pi)


def scattering_table(potential: Potential, energies, *, step: float = 0.1):
    """Rows (lambda, theta1, theta2, a1, a2, logdet_constant, delta_1..3)."""
    rows = []
    for lam in energies:
        data = transfer_matrix_smatrix(potential, lam, step=step)
        a = data.amplitudes
        row = {
            "lambda": lam,
            "theta1": data.eigenphases[0],
            "theta2": data.eigenphases[1],
            "a1": a[0],
            "a2": a[1],
            "logdet_constant": logdet_constant(a),
        }
        for n in (1, 2, 3):
            row[f"delta_{n}"] = limit_constant(lambda t, _n=n: t**_n, a)
        rows.append(row)
    return rows
