"""
Filter bank design: the cubic-spline wavelet kernel g, the scaling kernel h,
log-spaced scales, and the frame function G(r) = h(r)^2 + sum_j g(t_j r)^2.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import (
    InvalidParameterError,
    NegativeArgumentError,
    NonConvergentError,
    SingularSystemError,
)
from .helpers import parse_float_list, read_key_value_file

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 2
DEFAULT_BETA = 2
DEFAULT_X1 = 1.0
DEFAULT_X2 = 2.0
# Width factor of the scaling kernel, h(x) = rho exp(-(x / (0.6 lambda_min))^4).
SCALING_WIDTH = 0.6


@dataclass(frozen=True)
class SplineKernel:
    """
    Band-pass kernel: x1^-alpha x^alpha below x1, a cubic s(x) on [x1, x2],
    x2^beta x^-beta above x2.
    """

    alpha: int
    beta: int
    x1: float
    x2: float
    coeffs: Tuple[float, float, float, float]

    def cubic(self, x):
        a0, a1, a2, a3 = self.coeffs
        return a0 + x * (a1 + x * (a2 + x * a3))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty_like(x)
        low = x < self.x1
        high = x > self.x2
        mid = ~(low | high)
        out[low] = self.x1 ** (-self.alpha) * x[low] ** self.alpha
        out[mid] = self.cubic(x[mid])
        out[high] = self.x2 ** self.beta * x[high] ** (-self.beta)
        return out if out.ndim else float(out)

    def peak(self):
        """Maximum of g, attained at a critical point of s inside [x1, x2]."""
        a0, a1, a2, a3 = self.coeffs
        candidates = [self.x1, self.x2]
        for root in np.roots([3 * a3, 2 * a2, a1]) if a3 or a2 else []:
            if abs(root.imag) < 1e-12 and self.x1 <= root.real <= self.x2:
                candidates.append(root.real)
        return max(float(self.cubic(c)) for c in candidates)


@dataclass(frozen=True)
class ScalingKernel:
    """Low-pass kernel h(x) = rho exp(-(x / (0.6 lambda_min))^4)."""

    rho: float
    lambda_min: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = self.rho * np.exp(-((x / (SCALING_WIDTH * self.lambda_min)) ** 4))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class FilterBank:
    """Wavelet kernel, scaling kernel and scales t_1 > ... > t_J on [0, r_max]."""

    g: SplineKernel
    h: ScalingKernel
    scales: Tuple[float, ...]
    r_max: float
    K: float

    @property
    def J(self):
        return len(self.scales)

    def kernel_values(self, r):
        """(J+1, len(r)) matrix: row 0 is h(r), row j is g(t_j r)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        rows = [np.broadcast_to(self.h(r), r.shape)]
        rows.extend(self.g(t * r) for t in self.scales)
        return np.vstack(rows)

    def band_kernel(self, band):
        """Callable x -> value of band ``band`` (0 = scaling)."""
        if band == 0:
            return self.h
        t = self.scales[band - 1]
        return lambda x: self.g(t * np.asarray(x, dtype=float))

    def frame_function(self, r):
        """G(r) = h(r)^2 + sum_j g(t_j r)^2."""
        return np.sum(self.kernel_values(r) ** 2, axis=0)

    def params(self):
        """Parameters identifying this bank (cache keys, headers)."""
        return {
            "alpha": self.g.alpha,
            "beta": self.g.beta,
            "x1": self.g.x1,
            "x2": self.g.x2,
            "J": self.J,
            "K": self.K,
            "r_max": self.r_max,
            "scales": list(self.scales),
        }


def make_spline_kernel(alpha=DEFAULT_ALPHA, beta=DEFAULT_BETA, x1=DEFAULT_X1, x2=DEFAULT_X2) -> SplineKernel:
    """
    Solve for the cubic with s(x1) = s(x2) = 1, s'(x1) = alpha/x1,
    s'(x2) = -beta/x2.

    Raises:
        InvalidParameterError: alpha, beta < 1 or x1, x2 not positive and ordered
        SingularSystemError: Interpolation system is singular (x1 == x2)
    """
    if int(alpha) != alpha or alpha < 1:
        raise InvalidParameterError("alpha", alpha, "must be an integer >= 1")
    if int(beta) != beta or beta < 1:
        raise InvalidParameterError("beta", beta, "must be an integer >= 1")
    if not (x1 > 0 and x2 > 0):
        raise InvalidParameterError("x1/x2", (x1, x2), "must be positive")
    system = np.array(
        [
            [1.0, x1, x1 ** 2, x1 ** 3],
            [1.0, x2, x2 ** 2, x2 ** 3],
            [0.0, 1.0, 2 * x1, 3 * x1 ** 2],
            [0.0, 1.0, 2 * x2, 3 * x2 ** 2],
        ]
    )
    rhs = np.array([1.0, 1.0, alpha / x1, -beta / x2])
    try:
        if np.linalg.cond(system) > 1e14:
            raise np.linalg.LinAlgError("ill-conditioned")
        coeffs = np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError:
        raise SingularSystemError(f"Spline system is singular for x1={x1}, x2={x2}")
    if x1 > x2:
        raise InvalidParameterError("x1", x1, f"must be below x2={x2}")
    return SplineKernel(int(alpha), int(beta), float(x1), float(x2), tuple(float(c) for c in coeffs))


def eval_kernel(kernel: SplineKernel, x):
    """Evaluate g at x >= 0; raises NegativeArgumentError otherwise."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise NegativeArgumentError(float(arr.min()))
    return kernel(arr)


def kernel_peak(kernel: SplineKernel, r_max):
    """max of g over [0, r_max]."""
    grid = np.linspace(0.0, r_max, 2001)
    best = float(np.max(kernel(grid)))
    if r_max >= kernel.x1:
        interior = kernel.peak() if r_max >= kernel.x2 else float(np.max(kernel(np.linspace(kernel.x1, r_max, 2001))))
        best = max(best, interior)
    return best


def make_scaling_kernel(r_max, K, g: Optional[SplineKernel] = None) -> ScalingKernel:
    """
    Scaling kernel with lambda_min = r_max / K and rho = max of g on [0, r_max].

    Raises:
        InvalidParameterError: r_max <= 0 or K <= 1
    """
    if not (r_max > 0):
        raise InvalidParameterError("r_max", r_max, "must be positive")
    if not (K > 1):
        raise InvalidParameterError("K", K, "must exceed 1")
    g = g or make_spline_kernel()
    return ScalingKernel(rho=kernel_peak(g, r_max), lambda_min=r_max / K)


def select_scales(r_max, J, K, x1=DEFAULT_X1, x2=DEFAULT_X2):
    """
    Log-spaced scales from t_1 = x2 K / r_max down to t_J = x1 / r_max.

    Raises:
        InvalidParameterError
    """
    if J < 1:
        raise InvalidParameterError("J", J, "must be at least 1")
    if not (K > 1):
        raise InvalidParameterError("K", K, "must exceed 1")
    if not (r_max > 0):
        raise InvalidParameterError("r_max", r_max, "must be positive")
    t_coarse = x2 * K / r_max
    t_fine = x1 / r_max
    if J == 1:
        return (t_coarse,)
    scales = np.exp(np.linspace(np.log(t_coarse), np.log(t_fine), J))
    scales[0], scales[-1] = t_coarse, t_fine
    return tuple(float(t) for t in scales)


def make_filter_bank(
    r_max,
    J=4,
    K=20.0,
    alpha=DEFAULT_ALPHA,
    beta=DEFAULT_BETA,
    x1=DEFAULT_X1,
    x2=DEFAULT_X2,
    scales: Optional[Sequence[float]] = None,
) -> FilterBank:
    """
    Assemble a filter bank on [0, r_max]; explicit ``scales`` override the
    log-spaced rule.

    Raises:
        InvalidParameterError: Scales not positive and strictly decreasing
    """
    g = make_spline_kernel(alpha, beta, x1, x2)
    h = make_scaling_kernel(r_max, K, g)
    if scales:
        scales = tuple(float(t) for t in scales)
        if any(t <= 0 for t in scales):
            raise InvalidParameterError("scales", scales, "must be positive")
        if any(a <= b for a, b in zip(scales, scales[1:])):
            raise InvalidParameterError("scales", scales, "must be strictly decreasing")
    else:
        scales = select_scales(r_max, J, K, x1, x2)
    return FilterBank(g=g, h=h, scales=scales, r_max=float(r_max), K=float(K))


def frame_bounds(bank: FilterBank, grid_points=1000):
    """
    (A, B) = (min, max) of G(r) on a uniform grid over [0, r_max].

    Raises:
        InvalidParameterError: grid_points < 100
    """
    if grid_points < 100:
        raise InvalidParameterError("grid_points", grid_points, "must be at least 100")
    values = bank.frame_function(np.linspace(0.0, bank.r_max, int(grid_points)))
    return float(values.min()), float(values.max())


def _origin_limit(kernel):
    """lim_{x->0} g(x)/x^2 for the spline; 0 for other kernels."""
    if isinstance(kernel, SplineKernel):
        return kernel.x1 ** -2 if kernel.alpha == 2 else 0.0
    return 0.0


def admissibility_integral(kernel, upper=100.0, steps=200000):
    """
    Trapezoid estimate of the admissibility constant int_0^upper g(x)/x^2 dx.

    Raises:
        NonConvergentError: alpha = 1 (integrand ~ 1/x at the origin)
        InvalidParameterError: upper not beyond x2, or too few steps
    """
    if isinstance(kernel, SplineKernel):
        if kernel.alpha < 2:
            raise NonConvergentError(f"Admissibility integral diverges for alpha={kernel.alpha}")
        if not (upper > kernel.x2):
            raise InvalidParameterError("upper", upper, f"must exceed x2={kernel.x2}")
    if steps < 2:
        raise InvalidParameterError("steps", steps, "must be at least 2")
    x = np.linspace(0.0, upper, int(steps) + 1)
    integrand = np.empty_like(x)
    integrand[0] = _origin_limit(kernel)
    integrand[1:] = np.asarray(kernel(x[1:]), dtype=float) / x[1:] ** 2
    return float(trapezoid(integrand, x))


def load_bank_file(path):
    """
    Read a key=value bank config (alpha, beta, x1, x2, J, K, scales).

    Returns:
        Dict of parsed values, only the keys present in the file
    """
    raw = read_key_value_file(path)
    parsed = {}
    for key, value in raw.items():
        if key in ("alpha", "beta", "J", "j"):
            parsed[key if key != "j" else "J"] = int(float(value))
        elif key in ("x1", "x2", "K", "k"):
            parsed[key if key != "k" else "K"] = float(value)
        elif key == "scales":
            parsed["scales"] = tuple(parse_float_list(value))
        else:
            logger.warning("%s: ignoring unknown bank key '%s'", path, key)
    return parsed
