"""
Fast fractional wavelet transform.

Each band kernel K_j is replaced by a truncated Fourier series
p_j(x) = sum_{|k| <= M_j} c_{j,k} exp(i 2 pi k x / P) in the spectral
variable, so p_j(L_theta) is a combination of powers of the propagator
F_plus = exp(i 2 pi L_theta / P) and of F_minus = F_plus^H. Applying it costs
2 M_j matrix-vector products and never touches the eigenbasis again.

Two expansions are supported:

- ``periodic``: P = r_max, the kernel restricted to [0, r_max] is expanded as
  a P-periodic function.
- ``even`` (default): the kernel on [0, P/2] is mirrored about P/2 with
  P = period_factor * r_max. The extended function has no jump at the ends
  of the period, so the series converges uniformly on the spectrum.
"""

import logging
import threading
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.sparse.linalg import expm_multiply

from .config import get_config_value
from .exact import CoefficientPyramid
from .exceptions import (
    DimensionMismatchError,
    FrameFailureError,
    InvalidParameterError,
    NumericalFailureError,
)
from .kernels import FilterBank
from .spectral import FractionalOperator

logger = logging.getLogger(__name__)

EXTENSIONS = ("even", "periodic")
PROPAGATOR_BACKENDS = ("dense", "expm")
CG_METHODS = ("cg", "cr")


# ============================================================================
# Fourier coefficients
# ============================================================================


def _extended_samples(kernel, t, period, extension, panels):
    """Kernel samples K(t x) on the Q+1 nodes x_q = q P / Q."""
    x = np.linspace(0.0, period, panels + 1)
    if extension == "even":
        x = np.minimum(x, period - x)
    return np.asarray(kernel(t * x), dtype=float)


def fourier_coefficients(kernel, t, r_max, M, Q, period=None, extension="periodic"):
    """
    Trapezoid-rule Fourier coefficients of x -> kernel(t x).

    c_k = (1/P) int_0^P K(t x) exp(-i 2 pi k x / P) dx on Q+1 nodes, computed
    as a real FFT of the periodized samples.

    Args:
        kernel: Callable evaluated elementwise on arrays
        t: Scale multiplying the spectral variable
        r_max: Spectral bound
        M: Truncation order (coefficients for k = 0..M are returned)
        Q: Number of trapezoid panels, at least 8 M
        period: Series period P; defaults to r_max
        extension: "periodic" or "even"

    Returns:
        Complex array c_0..c_M; c_{-k} = conj(c_k)

    Raises:
        InvalidParameterError
    """
    if M < 1:
        raise InvalidParameterError("M", M, "must be at least 1")
    if Q < 8 * M:
        raise InvalidParameterError("Q", Q, f"must be at least 8*M = {8 * M}")
    if not (r_max > 0):
        raise InvalidParameterError("r_max", r_max, "must be positive")
    if extension not in EXTENSIONS:
        raise InvalidParameterError("extension", extension, f"must be one of {', '.join(EXTENSIONS)}")
    period = float(period or r_max)
    if period < r_max:
        raise InvalidParameterError("period", period, f"must cover r_max={r_max}")
    samples = _extended_samples(kernel, t, period, extension, int(Q))
    folded = samples[:-1].copy()
    folded[0] = 0.5 * (samples[0] + samples[-1])
    return np.fft.rfft(folded)[: M + 1] / Q


def accepted_coefficients(kernel, t, r_max, M, period=None, extension="periodic", tol=None, max_panels=None):
    """
    Fourier coefficients with Q doubled from max(8M, 1024) until a doubling
    changes no coefficient by more than ``tol``.

    Returns:
        (coefficients, Q used)
    """
    if tol is None:
        tol = float(get_config_value("fast.quadrature_tol", 1e-9))
    if max_panels is None:
        max_panels = int(get_config_value("fast.max_panels", 2 ** 22))
    panels = max(8 * M, 1024)
    current = fourier_coefficients(kernel, t, r_max, M, panels, period, extension)
    while True:
        refined = fourier_coefficients(kernel, t, r_max, M, 2 * panels, period, extension)
        change = float(np.max(np.abs(refined - current)))
        panels *= 2
        if change < tol:
            return refined, panels
        if 2 * panels > max_panels:
            logger.warning("quadrature not settled at Q=%d (change %.3g > %.3g)", panels, change, tol)
            return refined, panels
        current = refined


def series_value(coeffs, x, period):
    """Evaluate the real series c_0 + 2 Re sum_{k>=1} c_k exp(i 2 pi k x / P)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    k = np.arange(1, coeffs.shape[0])
    waves = np.exp(2j * np.pi * np.outer(x, k) / period)
    return coeffs[0].real + 2.0 * np.real(waves @ coeffs[1:])


@dataclass(frozen=True)
class FourierApprox:
    """
    Truncated Fourier approximation of a filter bank.

    ``coeffs[j]`` holds c_{j,0..M_j}; ``bounds[j]`` is the sup error of band
    j on [0, r_max].
    """

    r_max: float
    period: float
    extension: str
    scales: Tuple[float, ...]
    orders: Tuple[int, ...]
    coeffs: Tuple[np.ndarray, ...]
    bounds: Tuple[float, ...] = ()
    panels: Tuple[int, ...] = ()

    @property
    def n_bands(self):
        return len(self.coeffs)

    @property
    def max_order(self):
        return max(self.orders) if self.orders else 0

    def full_coefficients(self, band):
        """c_{band,k} for k = -M..M."""
        c = np.asarray(self.coeffs[band], dtype=complex)
        return np.concatenate([np.conj(c[:0:-1]), c])

    def padded(self):
        """(J+1, max M + 1) array of nonnegative-k coefficients, zero padded."""
        table = np.zeros((self.n_bands, self.max_order + 1), dtype=complex)
        for j, c in enumerate(self.coeffs):
            table[j, : len(c)] = c
        return table

    def evaluate(self, band, x):
        """Scalar truncated series of ``band`` at x."""
        return series_value(self.coeffs[band], x, self.period)

    def frame_function(self, x):
        """Truncated frame function sum_j p_j(x)^2."""
        return sum(self.evaluate(j, x) ** 2 for j in range(self.n_bands))

    def frame_bounds(self, grid_points=1000):
        values = self.frame_function(np.linspace(0.0, self.r_max, int(grid_points)))
        return float(values.min()), float(values.max())


def error_bound(fa: FourierApprox, band, kernel, t, grid=None):
    """
    Sup error max |K(t x) - p(x)| over a uniform grid on [0, r_max].

    Raises:
        InvalidParameterError: grid < 1000
    """
    if grid is None:
        grid = int(get_config_value("fast.error_grid", 4096))
    if grid < 1000:
        raise InvalidParameterError("grid", grid, "must be at least 1000")
    x = np.linspace(0.0, fa.r_max, int(grid))
    exact = np.asarray(kernel(t * x), dtype=float)
    return float(np.max(np.abs(exact - fa.evaluate(band, x))))


def _band_kernels(bank: FilterBank):
    """(kernel, t) per band, band 0 first."""
    return [(bank.h, 1.0)] + [(bank.g, t) for t in bank.scales]


def make_fourier_approx(
    bank: FilterBank,
    orders=None,
    extension=None,
    period_factor=None,
    tol=None,
    max_panels=None,
    error_grid=None,
) -> FourierApprox:
    """
    Expand every band of ``bank`` and measure its sup error.

    Args:
        bank: Filter bank on [0, r_max]
        orders: One order for every band, or a sequence of J+1 orders
        extension: "even" or "periodic" (config ``fast.extension``)
        period_factor: P / r_max for the even extension

    Raises:
        InvalidParameterError
    """
    if orders is None:
        orders = int(get_config_value("fast.order", 40))
    if extension is None:
        extension = get_config_value("fast.extension", "even")
    if period_factor is None:
        period_factor = float(get_config_value("fast.period_factor", 3.0))
    if extension not in EXTENSIONS:
        raise InvalidParameterError("extension", extension, f"must be one of {', '.join(EXTENSIONS)}")
    if isinstance(orders, (int, np.integer)):
        orders = [int(orders)] * (bank.J + 1)
    orders = tuple(int(m) for m in orders)
    if len(orders) != bank.J + 1:
        raise InvalidParameterError("orders", orders, f"needs {bank.J + 1} entries")
    if extension == "even":
        if not (period_factor >= 2.0):
            raise InvalidParameterError("period_factor", period_factor, "must be at least 2")
        period = period_factor * bank.r_max
    else:
        period = bank.r_max

    kernels = _band_kernels(bank)
    coeffs, panels = [], []
    for (kernel, t), order in zip(kernels, orders):
        c, q = accepted_coefficients(kernel, t, bank.r_max, order, period, extension, tol, max_panels)
        coeffs.append(c)
        panels.append(q)
    fa = FourierApprox(
        r_max=bank.r_max,
        period=period,
        extension=extension,
        scales=tuple(bank.scales),
        orders=orders,
        coeffs=tuple(coeffs),
        panels=tuple(panels),
    )
    bounds = tuple(error_bound(fa, j, kernel, t, error_grid) for j, (kernel, t) in enumerate(kernels))
    logger.debug("fourier approx: orders=%s period=%.6g bounds=%s", orders, period, bounds)
    return replace(fa, bounds=bounds)


# ============================================================================
# Propagators
# ============================================================================


class MatvecCounter:
    """Thread-safe count of propagator matrix-vector products."""

    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    def add(self, n=1):
        with self._lock:
            self._count += n

    def reset(self):
        with self._lock:
            self._count = 0

    @property
    def value(self):
        with self._lock:
            return self._count


@dataclass(frozen=True)
class PropagatorPair:
    """
    F_plus = exp(i 2 pi L_theta / P) and F_minus = F_plus^H.

    The dense backend stores F_plus; the expm backend applies the exponential
    action to L_theta directly. A product with an (N, m) block counts as m
    matvecs.
    """

    theta: float
    period: float
    n: int
    backend: str
    f_plus: Optional[np.ndarray] = None
    l_theta: Optional[np.ndarray] = None
    real_operator: bool = False
    conjugate_shortcut: bool = False
    counter: MatvecCounter = field(default_factory=MatvecCounter, compare=False)

    @property
    def f_minus(self):
        return None if self.f_plus is None else self.f_plus.conj().T

    def _count(self, v):
        self.counter.add(1 if v.ndim == 1 else v.shape[1])

    def advance(self, v):
        """F_plus v."""
        self._count(v)
        if self.backend == "dense":
            return self.f_plus @ v
        return expm_multiply((2j * np.pi / self.period) * self.l_theta, v)

    def retreat(self, v):
        """F_minus v."""
        self._count(v)
        if self.backend == "dense":
            return self.f_plus.conj().T @ v
        return expm_multiply((-2j * np.pi / self.period) * self.l_theta, v)


def build_propagators(op: FractionalOperator, period=None, backend=None, conjugate_shortcut=None) -> PropagatorPair:
    """
    Build the propagator pair of ``op``.

    Args:
        period: Series period P (defaults to op.r_max_bound); must equal the
            FourierApprox period it is used with
        backend: "dense" (spectral construction) or "expm"
        conjugate_shortcut: Use conj(F_plus^k f) for F_minus^k f when L_theta
            is real and f is real

    Raises:
        InvalidParameterError, NumericalFailureError
    """
    if backend is None:
        backend = get_config_value("fast.propagator", "dense")
    if conjugate_shortcut is None:
        conjugate_shortcut = bool(get_config_value("fast.conjugate_shortcut", False))
    if backend not in PROPAGATOR_BACKENDS:
        raise InvalidParameterError("propagator", backend, f"must be one of {', '.join(PROPAGATOR_BACKENDS)}")
    period = float(period or op.r_max_bound)
    if not period > 0:
        raise InvalidParameterError("period", period, "must be positive")
    f_plus = None
    if backend == "dense":
        phases = np.exp(2j * np.pi * op.r / period)
        f_plus = (op.gamma * phases) @ op.gamma.conj().T
        if not np.all(np.isfinite(f_plus)):
            raise NumericalFailureError("Non-finite propagator")
    return PropagatorPair(
        theta=op.theta,
        period=period,
        n=op.n,
        backend=backend,
        f_plus=f_plus,
        l_theta=op.l_theta,
        real_operator=bool(op.is_real),
        conjugate_shortcut=bool(conjugate_shortcut),
    )


# ============================================================================
# Series application
# ============================================================================


def _check_vector(f, n, what="signal"):
    f = np.asarray(f)
    if f.ndim != 1 or f.shape[0] != n:
        raise DimensionMismatchError(what, (n,), f.shape)
    return f.astype(complex)


def _check_period(pp: PropagatorPair, fa: FourierApprox):
    if not np.isclose(pp.period, fa.period, rtol=1e-12, atol=0.0):
        raise InvalidParameterError("period", pp.period, f"propagators and series disagree (series P={fa.period})")


def series_apply(pp: PropagatorPair, coeffs, f):
    """
    sum_{k=-M}^{M} c_k F_k f with c_{-k} = conj(c_k), given c_0..c_M.

    Costs 2M propagator products.
    """
    v = _check_vector(f, pp.n)
    coeffs = np.asarray(coeffs, dtype=complex)
    u = v
    out = coeffs[0] * v
    for c in coeffs[1:]:
        v = pp.advance(v)
        u = pp.retreat(u)
        out = out + c * v + np.conj(c) * u
    return out


def forward_fast(f, pp: PropagatorPair, fa: FourierApprox) -> CoefficientPyramid:
    """
    Approximate transform; one v/u sweep up to max M_j shared by every band.

    Raises:
        DimensionMismatchError, InvalidParameterError (period mismatch)
    """
    _check_period(pp, fa)
    real_input = not np.iscomplexobj(f)
    v = _check_vector(f, pp.n)
    table = fa.padded()
    shortcut = pp.conjugate_shortcut and pp.real_operator and real_input
    u = v
    bands = np.outer(table[:, 0], v)
    for k in range(1, table.shape[1]):
        v = pp.advance(v)
        u = np.conj(v) if shortcut else pp.retreat(u)
        bands += np.outer(table[:, k], v) + np.outer(np.conj(table[:, k]), u)
    return CoefficientPyramid(theta=pp.theta, scales=fa.scales, bands=bands)


def adjoint(eta, pp: PropagatorPair, fa: FourierApprox):
    """
    sum_j p_j^*(L_theta) eta_j, the adjoint of forward_fast.

    p_j^* carries conj(c_{j,k}) on F_{-k}: conj(c_{j,k}) multiplies powers of
    F_minus and c_{j,k} multiplies powers of F_plus. The bands are pushed
    through the recursion together as an (N, J+1) block.

    Raises:
        DimensionMismatchError: eta not (J+1, N)
    """
    _check_period(pp, fa)
    eta = np.asarray(eta.bands if isinstance(eta, CoefficientPyramid) else eta)
    if eta.shape != (fa.n_bands, pp.n):
        raise DimensionMismatchError("coefficients", (fa.n_bands, pp.n), eta.shape)
    table = fa.padded()
    v = eta.T.astype(complex)
    u = v
    out = v @ np.conj(table[:, 0])
    for k in range(1, table.shape[1]):
        v = pp.advance(v)
        u = pp.retreat(u)
        out = out + v @ table[:, k] + u @ np.conj(table[:, k])
    return out


def product_coefficients(fa: FourierApprox):
    """
    Coefficients of P(x) = sum_j |p_j(x)|^2, of order M* = 2 max M_j.

    Returns:
        Complex array d_k for k = -M*..M*; d_{-k} = conj(d_k), d_0 >= 0
    """
    top = 2 * fa.max_order
    d = np.zeros(2 * top + 1, dtype=complex)
    for j in range(fa.n_bands):
        c = fa.full_coefficients(j)
        order = (len(c) - 1) // 2
        prod = np.convolve(c, np.conj(c[::-1]))
        d[top - 2 * order: top + 2 * order + 1] += prod
    d[top] = d[top].real
    return d


def wtw_apply(f, pp: PropagatorPair, d):
    """P(L_theta) f = sum_k d_k F_k f, one expansion of order M*."""
    d = np.asarray(d, dtype=complex)
    top = (len(d) - 1) // 2
    return series_apply(pp, d[top:], f)


# ============================================================================
# Reconstruction
# ============================================================================


@dataclass(frozen=True)
class CGResult:
    """Outcome of an iterative reconstruction."""

    signal: np.ndarray
    iterations: int
    residual: float
    residual_history: Tuple[float, ...]
    converged: bool
    imag_residue: float
    method: str = "cg"


def _cg(apply, b, tol, max_iter):
    b_norm = np.linalg.norm(b)
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = float(np.vdot(r, r).real)
    history = [1.0]
    iterations = 0
    for iterations in range(1, max_iter + 1):
        ap = apply(p)
        curvature = float(np.vdot(p, ap).real)
        if curvature <= 0:
            iterations -= 1
            break
        alpha = rs / curvature
        x = x + alpha * p
        r = r - alpha * ap
        rs_new = float(np.vdot(r, r).real)
        history.append(np.sqrt(rs_new) / b_norm)
        if history[-1] <= tol:
            break
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, iterations, history


def _cr(apply, b, tol, max_iter):
    """Conjugate residuals: minimizes ||r|| over the Krylov space, so the history never increases."""
    b_norm = np.linalg.norm(b)
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    ar = apply(r)
    ap = ar.copy()
    r_ar = float(np.vdot(r, ar).real)
    history = [1.0]
    iterations = 0
    for iterations in range(1, max_iter + 1):
        ap_norm = float(np.vdot(ap, ap).real)
        if ap_norm <= 0 or r_ar <= 0:
            iterations -= 1
            break
        alpha = r_ar / ap_norm
        x = x + alpha * p
        r = r - alpha * ap
        history.append(np.linalg.norm(r) / b_norm)
        if history[-1] <= tol:
            break
        ar = apply(r)
        r_ar_new = float(np.vdot(r, ar).real)
        beta = r_ar_new / r_ar
        p = r + beta * p
        ap = ar + beta * ap
        r_ar = r_ar_new
    return x, iterations, history


def reconstruct_cg(pyramid, pp: PropagatorPair, fa: FourierApprox, tol=None, max_iter=None, method=None) -> CGResult:
    """
    Solve (W* W) f = W* c iteratively from f = 0 with the single-expansion
    operator P(L_theta).

    Plain CG minimizes the error in the operator norm; its residual history
    may rise between iterations. "cr" minimizes the residual itself.

    Returns:
        CGResult; ``converged`` is False if the relative residual is above
        ``tol`` after ``max_iter`` iterations

    Raises:
        FrameFailureError: Truncated frame lower bound <= 0
        InvalidParameterError: tol <= 0, max_iter < 0 or unknown method
    """
    if tol is None:
        tol = float(get_config_value("cg.tol", 1e-10))
    if max_iter is None:
        max_iter = int(get_config_value("cg.max_iter", 200))
    if method is None:
        method = get_config_value("cg.method", "cg")
    if not tol > 0:
        raise InvalidParameterError("tol", tol, "must be positive")
    if max_iter < 0:
        raise InvalidParameterError("max_iter", max_iter, "must be nonnegative")
    if method not in CG_METHODS:
        raise InvalidParameterError("method", method, f"must be one of {', '.join(CG_METHODS)}")

    lower, _ = fa.frame_bounds()
    if not lower > 0:
        raise FrameFailureError(lower)

    b = adjoint(pyramid, pp, fa)
    if not np.any(b):
        return CGResult(np.zeros(pp.n), 0, 0.0, (0.0,), True, 0.0, method)

    d = product_coefficients(fa)
    solver = _cr if method == "cr" else _cg
    x, iterations, history = solver(lambda v: wtw_apply(v, pp, d), b, tol, max_iter)

    residual = float(history[-1])
    converged = residual <= tol
    signal = np.real(x)
    imag_residue = float(np.linalg.norm(np.imag(x)))
    if imag_residue > 1e-6 * max(np.linalg.norm(signal), np.finfo(float).tiny):
        logger.warning("reconstruction has imaginary residue %.3g", imag_residue)
    if any(later > earlier for earlier, later in zip(history, history[1:])):
        logger.debug("%s residual history is not monotone", method)
    if not converged:
        logger.warning("%s stopped at residual %.3g after %d iterations (tol %.3g)", method, residual, iterations, tol)
    return CGResult(
        signal=signal,
        iterations=iterations,
        residual=residual,
        residual_history=tuple(float(h) for h in history),
        converged=converged,
        imag_residue=imag_residue,
        method=method,
    )
