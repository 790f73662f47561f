"""Model Hankel operator machinery.

The central object is the positive Hankel-type integral operator on the
half line whose kernel is the windowed Laplace integral

    gamma(t) = integral_{eps..delta} exp(-t*lam) dlam = (e^{-t eps} - e^{-t delta}) / t.

Conjugating with the Laplace transform and the logarithmic substitution
turns it into the window-compressed convolution with 1/(2 cosh((x-y)/2)),
whose Fourier symbol is pi/cosh(pi*xi).  That compressed convolution on a
uniform grid in the log variable is the discretization used throughout:
the kernel is bounded and smooth, so a trapezoid Nystrom matrix is
spectrally faithful.

The module also provides: the symmetric quadrature matrix of the Laplace
transform (top singular value sqrt(pi)), trace moments and their limit
constants, eigenvalue counting against the symbol level set, the Schatten
bound for operator-valued Hankel kernels, the Hilbert-Schmidt commutator
estimate for the window/convolution pair, and the trace inequality
|tr f(PBP) - tr P f(B) P| <= (1/2) ||f''||_inf ||PB(1-P)||_2^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate

from .errors import ContractError, DomainError, InputError
from .linalg import SymmetricOperator, schatten_norm

MAX_LOG_SPACING = 0.05

# Default truncation of the Laplace-transform quadrature domain.  The top
# of the spectrum is carried by Mellin modes spread uniformly in log x, so
# the window truncation error decays only like 1/ln(hi)^2; [1e-13, 1e13]
# brings the top singular value within 0.5% of sqrt(pi).
LAPLACE_DOMAIN = (1e-13, 1e13)
LAPLACE_NODES = 400


def _sech(y):
    """Numerically safe sech, no overflow for large |y|."""
    a = np.abs(y)
    e = np.exp(-a)
    return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True)
class HankelModel:
    """Window (eps, delta] plus the uniform log-grid discretization size."""

    eps: float
    delta: float
    n_grid: int

    def __post_init__(self):
        if not (0.0 < self.eps <= self.delta):
            raise InputError(
                f"model window requires 0 < eps <= delta, got ({self.eps}, {self.delta})"
            )
        if self.n_grid < 2:
            raise InputError(f"n_grid must be at least 2, got {self.n_grid}")

    @classmethod
    def from_spacing(cls, eps: float, delta: float, spacing: float = 0.02) -> "HankelModel":
        """Choose n_grid so the log-grid step does not exceed ``spacing``."""
        if not (0.0 < eps <= delta):
            raise InputError(
                f"model window requires 0 < eps <= delta, got ({eps}, {delta})"
            )
        span = math.log(delta) - math.log(eps)
        n = max(int(math.ceil(span / spacing)) + 1, 2)
        return cls(eps=eps, delta=delta, n_grid=n)

    @property
    def log_span(self) -> float:
        return math.log(self.delta) - math.log(self.eps)

    @property
    def spacing(self) -> float:
        return self.log_span / (self.n_grid - 1)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(math.log(self.eps), math.log(self.delta), self.n_grid)


@dataclass(frozen=True)
class LaplaceGrid:
    """Positive quadrature nodes and weights for the half-line."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or nodes.shape != weights.shape:
            raise InputError("nodes and weights must be 1-d arrays of equal length")
        if len(nodes) and (np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0)):
            raise InputError("nodes must be positive and strictly increasing")
        if np.any(weights < 0):
            raise InputError("weights must be nonnegative")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def count(self) -> int:
        return len(self.nodes)

    @classmethod
    def log_spaced(cls, lo: float = LAPLACE_DOMAIN[0], hi: float = LAPLACE_DOMAIN[1],
                   count: int = LAPLACE_NODES) -> "LaplaceGrid":
        """Log-uniform nodes on [lo, hi] with trapezoid weights for dx."""
        u = np.linspace(math.log(lo), math.log(hi), count)
        x = np.exp(u)
        w = x * (u[1] - u[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return cls(nodes=x, weights=w)


@dataclass(frozen=True)
class OperatorSymbolSample:
    """One sample of the convolution symbol pi/cosh(pi*xi)."""

    xi: float
    value: float

    def __post_init__(self):
        if not (0.0 < self.value <= math.pi):
            raise InputError(f"symbol values lie in (0, pi], got {self.value}")


def carleman_symbol(xi: float) -> float:
    """Fourier symbol of convolution with 1/(2 cosh(x/2)): pi/cosh(pi*xi)."""
    return float(math.pi * _sech(math.pi * xi))


def sample_carleman_symbol(xi_values) -> list[OperatorSymbolSample]:
    return [OperatorSymbolSample(float(x), carleman_symbol(x)) for x in xi_values]


def gamma_kernel(t, eps: float, delta: float):
    """Windowed Laplace kernel (e^{-t eps} - e^{-t delta})/t, with t=0 -> delta-eps.

    Vectorized over ``t``; evaluated in the cancellation-free form
    e^{-t eps} * (1 - e^{-t (delta-eps)}) / t.
    """
    if eps > delta:
        raise InputError(f"requires eps <= delta, got ({eps}, {delta})")
    if eps < 0:
        raise InputError(f"requires eps >= 0, got {eps}")
    tv = np.asarray(t, dtype=float)
    if np.any(tv < 0):
        raise InputError("t must be nonnegative")
    width = delta - eps
    with np.errstate(invalid="ignore", divide="ignore", under="ignore"):
        core = np.where(tv > 0.0, -np.expm1(-tv * width) / np.where(tv > 0, tv, 1.0), width)
        out = np.exp(-tv * eps) * core
    if np.isscalar(t) or tv.ndim == 0:
        return float(out)
    return out


def _trapezoid_sqrt_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] *= 0.5
    w[-1] *= 0.5
    return np.sqrt(w)


def build_gamma_operator(model: HankelModel) -> SymmetricOperator:
    """Discretize the model operator on its log grid.

    Returns the symmetric Nystrom matrix sqrt(w_i w_j) / (2 cosh((x_i-x_j)/2))
    with trapezoid weights.  Its nonzero spectrum approximates that of the
    half-line integral operator; the trapezoid sum makes the first trace
    moment (1/2) log(delta/eps) exact.
    """
    if model.eps == model.delta:
        return SymmetricOperator(np.zeros((1, 1)))
    if model.spacing > MAX_LOG_SPACING + 1e-12:
        need = int(math.ceil(model.log_span / MAX_LOG_SPACING)) + 1
        raise InputError(
            f"log-grid spacing {model.spacing:.4f} exceeds {MAX_LOG_SPACING}; "
            f"use n_grid >= {need}"
        )
    x = model.grid
    sw = _trapezoid_sqrt_weights(model.n_grid, model.spacing)
    kernel = 0.5 * _sech((x[:, None] - x[None, :]) / 2.0)
    return SymmetricOperator(sw[:, None] * sw[None, :] * kernel)


def gamma_eigenvalues(model: HankelModel) -> np.ndarray:
    """Ascending eigenvalues of the discretized model operator."""
    return np.linalg.eigvalsh(build_gamma_operator(model).matrix)


def build_laplace_matrix(grid: LaplaceGrid) -> np.ndarray:
    """Symmetric quadrature matrix sqrt(w_i w_j) e^{-x_i x_j} of the Laplace transform.

    As the grid widens and refines, the top singular value approaches
    sqrt(pi), the operator norm of the Laplace transform on the half line.
    """
    if grid.count == 0:
        return np.zeros((0, 0))
    x = grid.nodes
    sw = np.sqrt(grid.weights)
    with np.errstate(under="ignore"):
        expo = np.exp(-np.minimum(np.outer(x, x), 745.0))
    return sw[:, None] * sw[None, :] * expo


def gamma_trace_moment(model: HankelModel, q: float) -> float:
    """tr of the q-th power of the discretized model operator.

    Eigenvalues are clipped at zero before fractional powers: the operator
    is nonnegative, and negative eigenvalues of the discretization are
    noise below 1e-10.
    """
    if not q >= 1.0:
        raise InputError(f"requires q >= 1, got {q}")
    ev = np.clip(gamma_eigenvalues(model), 0.0, None)
    return float(np.sum(ev**q))


def gamma_moment_constant(q: float) -> float:
    """(1/2pi) * integral over R of (pi/cosh(pi x))^q dx, by adaptive quadrature."""
    if not q >= 1.0:
        raise InputError(f"requires q >= 1, got {q}")

    def integrand(x):
        return (math.pi * _sech(math.pi * x)) ** q

    val, _ = scipy.integrate.quad(integrand, 0.0, np.inf, epsabs=5e-11, epsrel=1e-12,
                                  limit=200)
    return 2.0 * val / (2.0 * math.pi)


def pi_moment_constant(n: int) -> float:
    """(1/2pi) * integral of cosh(pi x)^{-2n} dx in closed form.

    Equals B(n, 1/2)/(2 pi^2) = n ((n-1)!)^2 4^n / (2 (2n)! pi^2).
    """
    if n < 1 or int(n) != n:
        raise InputError(f"requires a positive integer, got {n}")
    n = int(n)
    rational = n * math.factorial(n - 1) ** 2 * 4**n / math.factorial(2 * n)
    return rational / (2.0 * math.pi**2)


def counting_slope(tau: float) -> float:
    """Predicted coefficient of |ln eps| for #\\{eigenvalues > tau\\}.

    Phase-space volume of the symbol level set {pi/cosh(pi xi) > tau}
    per unit window length: arccosh(pi/tau)/pi^2; zero once tau >= pi.
    """
    if tau <= 0:
        raise InputError(f"threshold must be positive, got {tau}")
    if tau >= math.pi:
        return 0.0
    return math.acosh(math.pi / tau) / math.pi**2


def gamma_eigen_counting(model: HankelModel, tau: float) -> tuple[int, float]:
    """Count eigenvalues above tau; return (count, predicted |ln eps| slope)."""
    slope = counting_slope(tau)
    count = int(np.count_nonzero(gamma_eigenvalues(model) > tau))
    return count, slope


# ---------------------------------------------------------------------------
# Operator-valued Hankel operators: K f(t) = int k(t+s) f(s) ds with
# k(t) = int e^{-lam t} sigma(lam) dlam.
# ---------------------------------------------------------------------------

def log_t_grid(eps: float, delta: float, spacing: float,
                lo_margin: float, hi_margin: float):
    """Log grid in t covering the mass of e^{-lam t} for lam in [eps, delta].

    The integrand in u = ln t decays like e^u to the left of the peak and
    double-exponentially to the right, so a trapezoid rule here converges
    exponentially (the tanh-sinh phenomenon).
    """
    u_lo = math.log(1.0 / (2.0 * delta)) - lo_margin
    u_hi = math.log(1.0 / (2.0 * eps)) + hi_margin
    n = int(math.ceil((u_hi - u_lo) / spacing)) + 1
    u = np.linspace(u_lo, u_hi, n)
    t = np.exp(u)
    w = t * (u[1] - u[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return t, w


def gauss_log_nodes(eps: float, delta: float, count: int):
    """Gauss-Legendre nodes/weights for integrals d(lam) in the variable ln(lam)."""
    xg, wg = np.polynomial.legendre.leggauss(count)
    a, b = math.log(eps), math.log(delta)
    u = 0.5 * (b - a) * xg + 0.5 * (a + b)
    lam = np.exp(u)
    return lam, 0.5 * (b - a) * wg * lam


def symbol_samples(sigma, lam_nodes) -> np.ndarray:
    """Evaluate the symbol at the nodes; always returns (m, d, d)."""
    vals = []
    for lam in lam_nodes:
        v = np.asarray(sigma(lam), dtype=float)
        if v.ndim == 0:
            v = v[None, None]
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise InputError("symbol values must be scalars or square matrices")
        vals.append((v + v.T) / 2.0)
    out = np.array(vals)
    if not np.all(np.isfinite(out)):
        raise InputError("symbol must be finite (bounded) on its support window")
    return out


def hankel_block_matrix(t, w, lam_nodes, lam_weights, sig) -> np.ndarray:
    """Symmetric Nystrom block matrix of the Hankel operator with quadrature kernel."""
    nt, d = len(t), sig.shape[1]
    ts = t[:, None] + t[None, :]
    blocks = np.zeros((nt, nt, d, d))
    with np.errstate(under="ignore"):
        for lam, lw, s in zip(lam_nodes, lam_weights, sig):
            blocks += (lw * np.exp(-lam * ts))[:, :, None, None] * s[None, None, :, :]
    sw = np.sqrt(w)
    blocks *= (sw[:, None] * sw[None, :])[:, :, None, None]
    return blocks.transpose(0, 2, 1, 3).reshape(nt * d, nt * d)


@dataclass(frozen=True)
class HankelBoundReport:
    """One Schatten-bound comparison ||K||_q^q vs pi^{q-1} int ||sigma||_q^q dlam/(2 lam)."""

    q: float
    lhs: float
    rhs: float
    support: tuple[float, float]
    block_dim: int

    @property
    def ratio(self) -> float:
        if self.rhs == 0.0:
            return 0.0 if self.lhs == 0.0 else math.inf
        return self.lhs / self.rhs

    @property
    def satisfied(self) -> bool:
        return self.ratio <= 1.0 + 1e-3


def hankel_schatten_bound_profile(sigma, support, q_list, *, n_lambda: int = 80,
                                  t_spacing: float = 0.06,
                                  t_margins: tuple[float, float] = (14.0, 8.0),
                                  ) -> list[HankelBoundReport]:
    """Schatten-bound reports for several exponents sharing one discretization.

    ``sigma`` is a callable lam -> scalar or symmetric (d, d) array,
    supported on ``support = (a, b)`` with 0 < a < b.
    """
    a, b = support
    if not (0.0 < a < b):
        raise InputError(f"support must satisfy 0 < a < b, got {support}")
    for q in q_list:
        if not q >= 1.0:
            raise InputError(f"requires q >= 1, got {q}")
    lam_nodes, lam_weights = gauss_log_nodes(a, b, n_lambda)
    sig = symbol_samples(sigma, lam_nodes)
    t, w = log_t_grid(a, b, t_spacing, *t_margins)
    block = hankel_block_matrix(t, w, lam_nodes, lam_weights, sig)
    sv = np.abs(np.linalg.eigvalsh(block))
    sym_q = {q: np.array([schatten_norm(s, q) for s in sig]) for q in q_list}
    reports = []
    for q in q_list:
        lhs = float(np.sum(sv**q))
        rhs = float(math.pi ** (q - 1.0)
                    * np.sum(lam_weights * sym_q[q] ** q / (2.0 * lam_nodes)))
        reports.append(HankelBoundReport(q=float(q), lhs=lhs, rhs=rhs,
                                         support=(a, b), block_dim=block.shape[0]))
    return reports


def hankel_schatten_bound_check(sigma, support, q: float, **kwargs) -> HankelBoundReport:
    """Single-exponent Schatten bound check; see :func:`hankel_schatten_bound_profile`."""
    return hankel_schatten_bound_profile(sigma, support, [q], **kwargs)[0]


COMMUTATOR_HS_BOUND = 4.0 * math.log(2.0)  # integral of |z| / (2 cosh^2(z/2)) dz


def commutator_hs_check(model: HankelModel, *, margin: float = 40.0,
                        ) -> tuple[float, float]:
    """Squared Hilbert-Schmidt norm of [window indicator, sech-convolution].

    Discretizes the convolution with 1/(2 cosh((x-y)/2)) on the log grid
    extended ``margin`` beyond the window on both sides (the kernel decays
    like e^{-|x|/2}); returns (value, bound) with bound = 4 ln 2, the
    eps-uniform majorant.
    """
    if model.eps == model.delta:
        return 0.0, COMMUTATOR_HS_BOUND
    h = min(model.spacing, MAX_LOG_SPACING)
    lo = math.log(model.eps) - margin
    hi = math.log(model.delta) + margin
    n = int(math.ceil((hi - lo) / h)) + 1
    x = np.linspace(lo, hi, n)
    sw = _trapezoid_sqrt_weights(n, x[1] - x[0])
    b = sw[:, None] * sw[None, :] * 0.5 * _sech((x[:, None] - x[None, :]) / 2.0)
    inside = (x > math.log(model.eps)) & (x < math.log(model.delta))
    p = inside.astype(float)
    diff = p[:, None] - p[None, :]
    value = float(np.sum((diff * b) ** 2))
    return value, COMMUTATOR_HS_BOUND


@dataclass(frozen=True)
class TraceInequalityReport:
    """|tr f(PBP) - tr P f(B) P| against (1/2) ||f''||_inf ||PB(1-P)||_2^2."""

    lhs: float
    rhs: float
    f_second_norm: float
    offdiagonal_hs_sq: float

    @property
    def satisfied(self) -> bool:
        return self.lhs <= self.rhs + 1e-9


def _second_derivative_sup(f, radius: float, f_second, n_samples: int) -> float:
    """sup |f''| on [-radius, radius], sampled densely.

    Without an explicit second derivative, central second differences are
    used; these are exact for cubics and second-order accurate otherwise,
    which is adequate for the smooth test functions this check targets.
    """
    if radius == 0.0:
        radius = 1.0
    xs = np.linspace(0.0, radius, n_samples)
    xs = np.concatenate([-xs[:0:-1], xs])
    if f_second is not None:
        vals = np.array([f_second(x) for x in xs], dtype=float)
        return float(np.abs(vals).max())
    h = radius / (n_samples - 1)
    fm = np.array([f(x - h) for x in xs], dtype=float)
    f0 = np.array([f(x) for x in xs], dtype=float)
    fp = np.array([f(x + h) for x in xs], dtype=float)
    approx = (fp - 2.0 * f0 + fm) / h**2
    if not np.all(np.isfinite(approx)):
        raise DomainError("scalar map must be twice differentiable on [-||B||, ||B||]")
    return float(np.abs(approx).max())


def laptev_safarov_check(p, b, f, *, f_second=None,
                         n_samples: int = 4096) -> TraceInequalityReport:
    """Check |tr f(PBP) - tr P f(B) P| <= (1/2) ||f''||_inf ||PB(1-P)||_2^2.

    ``p`` must be an orthogonal projection, ``b`` symmetric, ``f`` a C^2
    map with f(0) = 0 on [-||B||, ||B||].  Passing ``f_second`` overrides
    the finite-difference estimate of ||f''||_inf.
    """
    pm = p.matrix if isinstance(p, SymmetricOperator) else np.asarray(p, dtype=float)
    bm = b.matrix if isinstance(b, SymmetricOperator) else np.asarray(b, dtype=float)
    if np.abs(pm - pm.T).max() > 1e-10 or np.abs(pm @ pm - pm).max() > 1e-10:
        raise InputError("p must be an orthogonal projection (symmetric idempotent)")
    if not abs(f(0.0)) <= 1e-14:
        raise ContractError("scalar map must vanish at 0")
    wb, vb = np.linalg.eigh((bm + bm.T) / 2.0)
    radius = float(np.abs(wb).max()) if len(wb) else 0.0

    pbp = pm @ bm @ pm
    w1 = np.linalg.eigvalsh((pbp + pbp.T) / 2.0)
    tr_f_pbp = float(np.sum([f(t) for t in w1]))
    f_b = (vb * np.array([f(t) for t in wb])) @ vb.T
    tr_p_f_b = float(np.trace(pm @ f_b))
    lhs = abs(tr_f_pbp - tr_p_f_b)

    off = pm @ bm @ (np.eye(pm.shape[0]) - pm)
    hs_sq = float(np.sum(off * off))
    f2 = _second_derivative_sup(f, radius, f_second, n_samples)
    return TraceInequalityReport(lhs=lhs, rhs=0.5 * f2 * hs_sq,
                                 f_second_norm=f2, offdiagonal_hs_sq=hs_sq)


def moment_table(eps_list, delta: float, q_list, *, spacing: float = 0.02):
    """Rows (eps, delta, q, trace, trace_over_ln, predicted_constant) for CSV."""
    rows = []
    constants = {q: gamma_moment_constant(q) for q in q_list}
    for eps in eps_list:
        model = HankelModel.from_spacing(eps, delta, spacing)
        ev = np.clip(gamma_eigenvalues(model), 0.0, None)
        ln_abs = abs(math.log(eps))
        for q in q_list:
            tr = float(np.sum(ev**q))
            rows.append({
                "eps": eps,
                "delta": delta,
                "q": q,
                "trace": tr,
                "trace_over_ln": tr / ln_abs if ln_abs > 0 else math.nan,
                "predicted_constant": constants[q],
            })
    return rows
