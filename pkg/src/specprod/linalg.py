"""Dense real-symmetric spectral core.

Eigendecomposition, spectral projections onto intervals, functional
calculus, Schatten norms and the kernel-equivalence check (the nonzero
spectra of C^T C and C C^T coincide).  Every operator here is a dense
real symmetric matrix; tridiagonal structure is detected and exploited
inside :func:`eigendecompose` only, never in the type contracts.

All values are immutable after construction and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ContractError, DomainError, InputError, NumericalError

# Eigenvalues closer than this to an open window endpoint are treated as
# sitting on the cut and excluded (open-interval semantics).
ENDPOINT_TIE_TOL = 1e-12

# Relative singular-value threshold below which a direction counts as kernel.
KERNEL_THRESHOLD = 1e-10

# Invariant checks on decompositions are exhaustive up to this dimension;
# above it a randomized spot check is used (the full Gram matrix would cost
# an extra O(n^3)).
_FULL_CHECK_DIM = 800


class SymmetricOperator:
    """A dense real symmetric matrix, exactly symmetrized at construction."""

    __slots__ = ("matrix",)

    def __init__(self, entries):
        m = np.asarray(entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 1:
            raise InputError("operator dimension must be at least 1")
        if not np.all(np.isfinite(m)):
            raise InputError("operator entries must be finite")
        # (a+b)/2 == (b+a)/2 in IEEE arithmetic, so this is exactly symmetric.
        sym = (m + m.T) / 2.0
        sym.setflags(write=False)
        object.__setattr__(self, "matrix", sym)

    def __setattr__(self, name, value):
        raise AttributeError("SymmetricOperator is immutable")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def max_norm(self) -> float:
        return float(np.abs(self.matrix).max())

    def __repr__(self):
        return f"SymmetricOperator(dim={self.dim})"


@dataclass(frozen=True)
class SpectralWindow:
    """An interval (lo, hi) of the real line; endpoints may be infinite.

    Open endpoints follow the tie-breaking rule: an eigenvalue within
    ``ENDPOINT_TIE_TOL`` of an open endpoint is excluded.
    """

    lo: float = -math.inf
    hi: float = math.inf
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise InputError(f"window requires lo < hi, got ({self.lo}, {self.hi})")

    def contains(self, values) -> np.ndarray:
        """Boolean mask of which values lie inside the window."""
        v = np.asarray(values, dtype=float)
        if self.lo_open:
            mask = v > self.lo + ENDPOINT_TIE_TOL
        else:
            mask = v >= self.lo - ENDPOINT_TIE_TOL
        if self.hi_open:
            mask &= v < self.hi - ENDPOINT_TIE_TOL
        else:
            mask &= v <= self.hi + ENDPOINT_TIE_TOL
        return mask


@dataclass(frozen=True)
class SchattenIndex:
    """A Schatten exponent q >= 1; ``math.inf`` selects the operator norm."""

    q: float

    def __post_init__(self):
        if not (self.q >= 1.0):
            raise InputError(f"Schatten index must satisfy q >= 1, got {self.q}")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvectors of a symmetric matrix."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    source_dim: int

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.eigenvectors.setflags(write=False)

    def columns_in(self, window: SpectralWindow) -> np.ndarray:
        """Eigenvector columns whose eigenvalues fall inside the window."""
        return self.eigenvectors[:, window.contains(self.eigenvalues)]


def _is_tridiagonal(m: np.ndarray) -> bool:
    if m.shape[0] < 3:
        return False
    band = np.tril(np.triu(m, -1), 1)
    return np.array_equal(band, m)


def eigendecompose(a: SymmetricOperator) -> SpectralDecomposition:
    """Full eigendecomposition, ascending eigenvalues.

    Tridiagonal matrices are routed to the dedicated LAPACK solver, which
    is dramatically faster for the large discretized Hamiltonians.
    """
    m = a.matrix
    try:
        if _is_tridiagonal(m):
            w, v = scipy.linalg.eigh_tridiagonal(np.diag(m).copy(), np.diag(m, 1).copy())
        else:
            w, v = np.linalg.eigh(m)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:  # pragma: no cover
        raise NumericalError(
            f"symmetric eigensolver failed on dim={a.dim}: {exc}"
        ) from exc
    dec = SpectralDecomposition(eigenvalues=w, eigenvectors=v, source_dim=a.dim)
    _validate_decomposition(dec, a)
    return dec


def _validate_decomposition(dec: SpectralDecomposition, a: SymmetricOperator) -> None:
    w, v = dec.eigenvalues, dec.eigenvectors
    if np.any(np.diff(w) < 0):
        raise NumericalError("eigenvalues not ascending")
    scale = max(1.0, a.max_norm())
    n = a.dim
    if n <= _FULL_CHECK_DIM:
        gram_err = np.abs(v.T @ v - np.eye(n)).max()
        recon_err = np.abs((v * w) @ v.T - a.matrix).max()
    else:
        # Spot check: orthonormality and eigen-residual on a random column subset.
        rng = np.random.default_rng(0)
        idx = rng.choice(n, size=64, replace=False)
        sub = v[:, idx]
        gram_err = np.abs(sub.T @ sub - np.eye(len(idx))).max()
        recon_err = np.abs(a.matrix @ sub - sub * w[idx]).max()
    if gram_err > 1e-10:
        raise NumericalError(f"eigenvector orthonormality defect {gram_err:.3e}")
    if recon_err > 1e-8 * scale:
        raise NumericalError(f"spectral reconstruction defect {recon_err:.3e}")


def spectral_projection(dec: SpectralDecomposition, window: SpectralWindow) -> SymmetricOperator:
    """Orthogonal projection onto the eigenspaces inside ``window``."""
    cols = dec.columns_in(window)
    return SymmetricOperator(cols @ cols.T)


def apply_function(dec: SpectralDecomposition, f) -> SymmetricOperator:
    """Functional calculus: Q diag(f(eigenvalues)) Q^T."""
    fw = np.array([f(t) for t in dec.eigenvalues], dtype=float)
    bad = ~np.isfinite(fw)
    if np.any(bad):
        t = dec.eigenvalues[bad][0]
        raise DomainError(f"scalar map is not finite at eigenvalue {t!r}")
    v = dec.eigenvectors
    return SymmetricOperator((v * fw) @ v.T)


def _as_matrix(a) -> np.ndarray:
    return a.matrix if isinstance(a, SymmetricOperator) else np.asarray(a, dtype=float)


def singular_values(a) -> np.ndarray:
    """Descending singular values; symmetric input uses the eigensolver."""
    m = _as_matrix(a)
    if m.shape[0] == m.shape[1] and np.array_equal(m, m.T):
        return np.sort(np.abs(np.linalg.eigvalsh(m)))[::-1]
    return np.linalg.svd(m, compute_uv=False)


def schatten_norm(a, q) -> float:
    """Schatten q-norm (sum of q-th powers of singular values)^(1/q).

    ``q`` may be a float >= 1, ``math.inf`` (operator norm) or a
    :class:`SchattenIndex`.
    """
    qv = q.q if isinstance(q, SchattenIndex) else float(q)
    if not (qv >= 1.0):
        raise InputError(f"Schatten index must satisfy q >= 1, got {qv}")
    sv = singular_values(a)
    if len(sv) == 0 or sv[0] == 0.0:
        return 0.0
    if math.isinf(qv):
        return float(sv[0])
    # Factor out the top singular value to avoid overflow for large q.
    top = sv[0]
    return float(top * np.sum((sv / top) ** qv) ** (1.0 / qv))


def trace_function(a: SymmetricOperator, f) -> float:
    """Sum of f over the spectrum; requires f(0) = 0 so kernel terms vanish."""
    f0 = f(0.0)
    if not abs(f0) <= 1e-14:
        raise ContractError(f"scalar map must vanish at 0, got f(0)={f0!r}")
    w = np.linalg.eigvalsh(a.matrix)
    vals = np.array([f(t) for t in w], dtype=float)
    if not np.all(np.isfinite(vals)):
        t = w[~np.isfinite(vals)][0]
        raise DomainError(f"scalar map is not finite at eigenvalue {t!r}")
    return float(vals.sum())


@dataclass(frozen=True)
class KernelEquivalenceReport:
    """Nonzero spectra of C^T C and C C^T and their pairwise discrepancy."""

    left_spectrum: np.ndarray   # nonzero eigenvalues of C^T C, descending
    right_spectrum: np.ndarray  # nonzero eigenvalues of C C^T, descending
    max_discrepancy: float      # max relative difference over paired entries
    threshold: float = field(default=KERNEL_THRESHOLD)

    @property
    def equivalent(self) -> bool:
        if len(self.left_spectrum) != len(self.right_spectrum):
            return False
        return self.max_discrepancy <= 1e-9


def kernel_equiv_check(c) -> KernelEquivalenceReport:
    """Compare the nonzero spectra of C^T C and C C^T.

    The rank is read off the singular values of C (kept while above
    ``KERNEL_THRESHOLD`` times the largest); the two Gram spectra are then
    computed by independent symmetric eigensolves and compared pairwise on
    the top-rank entries.
    """
    m = np.asarray(c, dtype=float)
    if m.ndim == 1:
        m = m[None, :]
    if not np.all(np.isfinite(m)):
        raise InputError("operator entries must be finite")
    sv = np.linalg.svd(m, compute_uv=False)
    rank = int(np.count_nonzero(sv > KERNEL_THRESHOLD * sv[0])) if sv.size and sv[0] > 0 else 0
    left = np.linalg.eigvalsh(m.T @ m)[::-1][:rank]
    right = np.linalg.eigvalsh(m @ m.T)[::-1][:rank]
    if rank == 0:
        disc = 0.0
    else:
        num = np.abs(left - right)
        den = np.maximum(np.maximum(left, right), 1e-300)
        disc = float((num / den).max())
    return KernelEquivalenceReport(left, right, disc)
