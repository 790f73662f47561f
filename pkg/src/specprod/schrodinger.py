"""Discretized 1D Schrodinger pair and its projection products.

The free operator is the three-point finite-difference Laplacian on a
Dirichlet box [-L, L]; the perturbed one adds a diagonal short-range
potential.  From their spectral decompositions the module assembles the
three flavours of projection product around a reference energy:

* ``pi1``          -- hard spectral windows (below / above the gap),
* ``pi2``          -- continuous plateau regularizers instead of steps,
* ``pi1_windowed`` -- both windows truncated at distance ``delta``.

Products are stored in factored form (orthonormal frame times a small
symmetric core carrying the nonzero spectrum), which keeps sweeps over
many window widths cheap on grids with thousands of points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InputError, NumericalError
from .linalg import (
    ENDPOINT_TIE_TOL,
    SpectralDecomposition,
    SpectralWindow,
    SymmetricOperator,
)

# A window edge colliding with a grid eigenvalue within this distance is
# snapped away (open-interval semantics would otherwise be ambiguous).
EDGE_COLLISION_TOL = 1e-9

PRODUCT_EIGENVALUE_SLACK = 1e-9


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [-L, L] with Dirichlet endpoints excluded."""

    half_length: float
    n_points: int

    def __post_init__(self):
        if self.half_length <= 0:
            raise InputError(f"half_length must be positive, got {self.half_length}")
        if self.n_points < 3:
            raise InputError(f"n_points must be at least 3, got {self.n_points}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / (self.n_points + 1)

    @property
    def points(self) -> np.ndarray:
        h = self.spacing
        return -self.half_length + h * np.arange(1, self.n_points + 1)


@dataclass(frozen=True)
class Potential:
    """Short-range potential from a small catalog of certified-decay shapes.

    ``square_well(depth, half_width)`` is -depth on |x| <= half_width
    (attractive for depth > 0), ``gaussian(amplitude, width)`` is
    amplitude * exp(-x^2 / (2 width^2)), and ``zero()`` is the free case.
    All three decay faster than any inverse power.
    """

    kind: str
    params: tuple

    @classmethod
    def square_well(cls, depth: float, half_width: float) -> "Potential":
        if half_width <= 0:
            raise InputError(f"half_width must be positive, got {half_width}")
        return cls("square_well", (float(depth), float(half_width)))

    @classmethod
    def gaussian(cls, amplitude: float, width: float) -> "Potential":
        if width <= 0:
            raise InputError(f"width must be positive, got {width}")
        return cls("gaussian", (float(amplitude), float(width)))

    @classmethod
    def zero(cls) -> "Potential":
        return cls("zero", ())

    def __call__(self, x):
        xv = np.asarray(x, dtype=float)
        if self.kind == "square_well":
            depth, a = self.params
            out = np.where(np.abs(xv) <= a, -depth, 0.0)
        elif self.kind == "gaussian":
            amp, width = self.params
            out = amp * np.exp(-(xv**2) / (2.0 * width**2))
        elif self.kind == "zero":
            out = np.zeros_like(xv)
        else:  # pragma: no cover
            raise InputError(f"unknown potential kind {self.kind!r}")
        return float(out) if np.isscalar(x) else out

    @property
    def support_radius(self) -> float:
        """Radius beyond which the potential is zero to double precision."""
        if self.kind == "square_well":
            return self.params[1]
        if self.kind == "gaussian":
            return 12.0 * self.params[1]
        return 0.0

    @property
    def discontinuities(self) -> tuple[float, ...]:
        if self.kind == "square_well":
            a = self.params[1]
            return (-a, a)
        return ()

    @property
    def decay_exponent(self) -> float:
        """Certified decay rate: all catalog shapes beat every inverse power."""
        return math.inf

    def describe(self) -> dict:
        return {"kind": self.kind, "params": list(self.params)}


@dataclass(frozen=True)
class Regularizer:
    """Continuous 0/1 plateau pair replacing the hard spectral steps.

    The upper ramp vanishes for x <= eps and is 1 for x >= 2 eps; the
    lower ramp mirrors it (1 below -2 eps, 0 above -eps).  ``shape`` is
    ``"linear"`` for the piecewise-linear interpolation or ``"step"`` for
    the degenerate hard-window limit.
    """

    eps: float
    shape: str = "linear"

    def __post_init__(self):
        if self.eps <= 0:
            raise InputError(f"eps must be positive, got {self.eps}")
        if self.shape not in ("linear", "step"):
            raise InputError(f"shape must be 'linear' or 'step', got {self.shape!r}")

    def upper(self, x):
        """Ramp from 0 (x <= eps) to 1 (x >= 2 eps)."""
        xv = np.asarray(x, dtype=float)
        if self.shape == "step":
            out = (xv > self.eps).astype(float)
        else:
            out = np.clip(xv / self.eps - 1.0, 0.0, 1.0)
        return float(out) if np.isscalar(x) else out

    def lower(self, x):
        """Ramp from 1 (x <= -2 eps) to 0 (x >= -eps)."""
        return self.upper(-np.asarray(x, dtype=float)) if not np.isscalar(x) \
            else self.upper(-x)

    def describe(self) -> str:
        return f"{self.shape} plateaus at (+-{self.eps}, +-{2 * self.eps})"


def band_edge_check(grid: Grid1D, energy_cap: float) -> None:
    """Require energy_cap well below the discrete-Laplacian band edge.

    The three-point stencil resolves energies only far below 1/spacing^2;
    the driver must keep every window edge under a tenth of that.
    """
    h = grid.spacing
    limit = 0.1 / h**2
    if energy_cap > limit:
        h_needed = math.sqrt(0.1 / energy_cap)
        n_needed = int(math.ceil(2.0 * grid.half_length / h_needed)) - 1
        raise InputError(
            f"energy {energy_cap} exceeds resolved band {limit:.4g} at spacing "
            f"{h:.4g}; increase n_points to at least {n_needed}"
        )


def build_hamiltonians(grid: Grid1D, potential: Potential,
                       ) -> tuple[SymmetricOperator, SymmetricOperator]:
    """Free and perturbed operators on the Dirichlet box.

    The free operator is the standard (1/h^2) tridiag(-1, 2, -1) stencil;
    the perturbed one adds diag(V(x_i)).  With the zero potential the two
    returned operators are equal entry for entry.
    """
    n = grid.n_points
    h = grid.spacing
    main = np.full(n, 2.0 / h**2)
    off = np.full(n - 1, -1.0 / h**2)
    h0 = np.diag(main) + np.diag(off, 1) + np.diag(off, -1)
    v = potential(grid.points)
    return SymmetricOperator(h0), SymmetricOperator(h0 + np.diag(v))


def _snap_epsilon(eigs0: np.ndarray, eigs1: np.ndarray, lambda_star: float,
                  eps: float) -> tuple[float, bool]:
    """Move eps off eigenvalue collisions at the window edges.

    Both edges (below against the free spectrum, above against the
    perturbed one) are tested; on a collision within EDGE_COLLISION_TOL,
    eps is increased in small steps, by at most half the local level
    spacing.
    """

    def collides(e):
        lo, hi = lambda_star - e, lambda_star + e
        return (np.any(np.abs(eigs0 - lo) < EDGE_COLLISION_TOL)
                or np.any(np.abs(eigs1 - hi) < EDGE_COLLISION_TOL))

    if not collides(eps):
        return eps, False
    near = np.abs(eigs0 - lambda_star) < 50.0 * eps
    gaps = np.diff(np.sort(eigs0[near])) if np.count_nonzero(near) > 2 else np.diff(eigs0)
    gaps = gaps[gaps > 0]
    local_gap = float(np.median(gaps)) if len(gaps) else 8.0 * EDGE_COLLISION_TOL
    step = local_gap / 16.0
    for k in range(1, 9):  # total movement capped at local_gap / 2
        cand = eps + k * step
        if not collides(cand):
            return cand, True
    raise NumericalError(
        f"could not snap eps={eps} away from spectrum collisions near {lambda_star}"
    )


class ProjectionProduct:
    """A realized projection product in factored form.

    The operator equals ``frame @ core @ frame.T`` with an orthonormal
    ``frame`` (columns drawn from the free eigenbasis) and a small
    symmetric ``core`` whose spectrum carries every nonzero eigenvalue of
    the product.  Trace functionals with f(0) = 0 therefore reduce to the
    core spectrum.
    """

    def __init__(self, frame: np.ndarray, core: np.ndarray, *, lambda_star: float,
                 eps: float, variant: str, delta: Optional[float] = None,
                 regularizer_shape: Optional[str] = None, snapped: bool = False,
                 frame_indices: Optional[np.ndarray] = None):
        core = np.asarray(core, dtype=float)
        core = (core + core.T) / 2.0
        self.frame = frame
        self.core = core
        self.frame_indices = frame_indices
        self.lambda_star = float(lambda_star)
        self.eps = float(eps)
        self.delta = delta
        self.variant = variant
        self.regularizer_shape = regularizer_shape
        self.snapped = snapped
        self.eigenvalues = (np.linalg.eigvalsh(core) if core.size
                            else np.zeros(0))
        lo = float(self.eigenvalues[0]) if len(self.eigenvalues) else 0.0
        hi = float(self.eigenvalues[-1]) if len(self.eigenvalues) else 0.0
        if lo < -PRODUCT_EIGENVALUE_SLACK or hi > 1.0 + PRODUCT_EIGENVALUE_SLACK:
            raise NumericalError(
                f"projection-product spectrum [{lo:.3e}, {hi:.3e}] escapes [0, 1]"
            )

    @property
    def rank_bound(self) -> int:
        return self.core.shape[0]

    @property
    def source_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def matrix(self) -> SymmetricOperator:
        """Materialize the full operator (meant for small grids / checks)."""
        n = self.source_dim
        if self.core.size == 0:
            return SymmetricOperator(np.zeros((n, n)))
        return SymmetricOperator(self.frame @ self.core @ self.frame.T)

    def clipped_spectrum(self) -> np.ndarray:
        return np.clip(self.eigenvalues, 0.0, None)

    def trace_power(self, q: float) -> float:
        """tr of the q-th power (nonzero spectrum only; negatives clipped)."""
        if not q >= 1.0:
            raise InputError(f"requires q >= 1, got {q}")
        return float(np.sum(self.clipped_spectrum() ** q))

    def trace_function(self, f: Callable[[float], float]) -> float:
        """Sum of f over the spectrum; requires f(0) = 0."""
        if not abs(f(0.0)) <= 1e-14:
            raise InputError("trace functional must vanish at 0")
        return float(np.sum([f(t) for t in self.clipped_spectrum()]))

    def __repr__(self):
        return (f"ProjectionProduct({self.variant}, lambda_star={self.lambda_star}, "
                f"eps={self.eps}, rank<={self.rank_bound})")


def _low_frame(dec0: SpectralDecomposition, lo: float, hi: float):
    window = SpectralWindow(lo, hi)
    indices = np.flatnonzero(window.contains(dec0.eigenvalues))
    return dec0.eigenvectors[:, indices], indices


def _upper_projection_core(frame: np.ndarray, dec1: SpectralDecomposition,
                           threshold: float) -> np.ndarray:
    """Core of the compression of the projection onto (threshold, infinity).

    Uses whichever of the window or its complement has fewer columns:
    the compression equals N N^T for the window and I - N N^T for the
    complement, N being the frame overlap with the selected columns.
    """
    above = SpectralWindow(threshold, math.inf).contains(dec1.eigenvalues)
    k = frame.shape[1]
    if np.count_nonzero(above) <= np.count_nonzero(~above):
        n = frame.T @ dec1.eigenvectors[:, above]
        return n @ n.T
    n = frame.T @ dec1.eigenvectors[:, ~above]
    return np.eye(k) - n @ n.T


def build_pi1(dec0: SpectralDecomposition, dec1: SpectralDecomposition,
              lambda_star: float, eps: float) -> ProjectionProduct:
    """Hard-window product: project below lambda*-eps (free), above
    lambda*+eps (perturbed), below again."""
    if eps <= 0:
        raise InputError(f"eps must be positive, got {eps}")
    eps, snapped = _snap_epsilon(dec0.eigenvalues, dec1.eigenvalues, lambda_star, eps)
    frame, idx = _low_frame(dec0, -math.inf, lambda_star - eps)
    core = _upper_projection_core(frame, dec1, lambda_star + eps)
    return ProjectionProduct(frame, core, lambda_star=lambda_star, eps=eps,
                             variant="pi1", snapped=snapped, frame_indices=idx)


def build_pi2(dec0: SpectralDecomposition, dec1: SpectralDecomposition,
              lambda_star: float, reg: Regularizer) -> ProjectionProduct:
    """Regularized product with the continuous plateau pair."""
    eps, snapped = _snap_epsilon(dec0.eigenvalues, dec1.eigenvalues,
                                 lambda_star, reg.eps)
    reg = Regularizer(eps, reg.shape) if snapped else reg
    d0_all = reg.lower(dec0.eigenvalues - lambda_star)
    keep = np.flatnonzero(d0_all > 0.0)
    frame = dec0.eigenvectors[:, keep]
    d0 = d0_all[keep]
    k = frame.shape[1]
    # upper factor = I - g(H - lambda*), g = 1 - upper ramp, supported low
    g_all = 1.0 - reg.upper(dec1.eigenvalues - lambda_star)
    low = g_all > 0.0
    n = frame.T @ dec1.eigenvectors[:, low]
    inner = np.eye(k) - (n * g_all[low]) @ n.T
    core = (inner * d0[None, :]) * d0[:, None]
    return ProjectionProduct(frame, core, lambda_star=lambda_star, eps=eps,
                             variant="pi2", regularizer_shape=reg.describe(),
                             snapped=snapped, frame_indices=keep)


def build_pi1_windowed(dec0: SpectralDecomposition, dec1: SpectralDecomposition,
                       lambda_star: float, eps: float, delta: float,
                       ) -> ProjectionProduct:
    """Hard-window product with both windows truncated at distance delta."""
    if not 0 < eps < delta:
        raise InputError(f"requires 0 < eps < delta, got ({eps}, {delta})")
    eps, snapped = _snap_epsilon(dec0.eigenvalues, dec1.eigenvalues, lambda_star, eps)
    frame, idx = _low_frame(dec0, lambda_star - delta, lambda_star - eps)
    if math.isinf(delta):
        core = _upper_projection_core(frame, dec1, lambda_star + eps)
    else:
        inside = SpectralWindow(lambda_star + eps, lambda_star + delta)
        n = frame.T @ dec1.eigenvectors[:, inside.contains(dec1.eigenvalues)]
        core = n @ n.T
    return ProjectionProduct(frame, core, lambda_star=lambda_star, eps=eps,
                             delta=delta, variant="pi1_windowed", snapped=snapped,
                             frame_indices=idx)
