"""
Exact fractional wavelet transform through the full fractional spectral
decomposition. Band j of the pyramid is g(t_j L_theta) f, band 0 is
h(L_theta) f; this is the reference the fast transform is checked against.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DimensionMismatchError, FrameFailureError, IndexOutOfRangeError
from .kernels import FilterBank
from .spectral import FractionalOperator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoefficientPyramid:
    """(J+1) complex bands of length N; band 0 is the scaling band."""

    theta: float
    scales: Tuple[float, ...]
    bands: np.ndarray

    @property
    def J(self):
        return self.bands.shape[0] - 1

    @property
    def n(self):
        return self.bands.shape[1]

    @property
    def size(self):
        return self.bands.size

    def magnitude(self):
        return np.abs(self.bands)

    def real(self):
        return self.bands.real.copy()

    def phase(self):
        return np.angle(self.bands)


def _check_bank(op: FractionalOperator, bank: FilterBank):
    """Frame lower bound at the actual fractional spectrum must be positive."""
    lower = float(bank.frame_function(op.r).min())
    if not lower > 0:
        raise FrameFailureError(lower)


def _check_signal(f, n):
    f = np.asarray(f)
    if f.ndim != 1 or f.shape[0] != n:
        raise DimensionMismatchError("signal", (n,), f.shape)
    return f


def forward_exact(f, op: FractionalOperator, bank: FilterBank) -> CoefficientPyramid:
    """
    Exact transform: band j at vertex n is sum_l K_j(r_l) f_hat(l) gamma_l(n).

    Raises:
        DimensionMismatchError: len(f) != N
        FrameFailureError: Frame function vanishes somewhere on the spectrum
    """
    f = _check_signal(f, op.n)
    _check_bank(op, bank)
    spectrum = op.gamma.conj().T @ f
    kernels = bank.kernel_values(op.r)
    bands = (kernels * spectrum) @ op.gamma.T
    return CoefficientPyramid(theta=op.theta, scales=tuple(bank.scales), bands=bands)


def forward_exact_batch(signals, op: FractionalOperator, bank: FilterBank):
    """
    Transform the rows of an (S, N) array at once.

    Returns:
        (S, J+1, N) complex array of bands
    """
    signals = np.atleast_2d(np.asarray(signals))
    if signals.shape[1] != op.n:
        raise DimensionMismatchError("signals", ("S", op.n), signals.shape)
    _check_bank(op, bank)
    spectra = signals @ op.gamma.conj()
    kernels = bank.kernel_values(op.r)
    return np.einsum("jl,sl,nl->sjn", kernels, spectra, op.gamma, optimize=True)


def band_operator(op: FractionalOperator, bank: FilterBank, band):
    """Dense matrix of band ``band``: gamma diag(K_band(r)) gamma^H."""
    values = bank.kernel_values(op.r)[band]
    return (op.gamma * values) @ op.gamma.conj().T


def atom(op: FractionalOperator, bank: FilterBank, band, vertex):
    """
    Atom of band ``band`` centered at ``vertex``.

    psi(m) = sum_l K(r_l) gamma_l(m) conj(gamma_l(vertex)), which is the
    exact transform of the delta at ``vertex``. Band values are inner
    products W_f(n) = sum_m f(m) conj(psi_n(m)).

    Raises:
        IndexOutOfRangeError: band outside 0..J or vertex outside 0..N-1
    """
    if band < 0 or band > bank.J:
        raise IndexOutOfRangeError(band, bank.J + 1, what="band")
    if vertex < 0 or vertex >= op.n:
        raise IndexOutOfRangeError(vertex, op.n)
    values = bank.kernel_values(op.r)[band]
    return op.gamma @ (values * op.gamma[vertex].conj())


def inverse_exact(pyramid: CoefficientPyramid, op: FractionalOperator, bank: FilterBank):
    """
    Spectral-domain pseudoinverse: f_hat = sum_j K_j(r) W_hat_j / G(r).

    Returns:
        Real part of gamma f_hat

    Raises:
        DimensionMismatchError: Band count or length mismatch
        FrameFailureError: G(r) vanishes on the spectrum
    """
    bands = np.asarray(pyramid.bands)
    if bands.shape != (bank.J + 1, op.n):
        raise DimensionMismatchError("pyramid", (bank.J + 1, op.n), bands.shape)
    kernels = bank.kernel_values(op.r)
    frame = np.sum(kernels ** 2, axis=0)
    if not frame.min() > 0:
        raise FrameFailureError(float(frame.min()))
    band_spectra = bands @ op.gamma.conj()
    spectrum = np.sum(kernels * band_spectra, axis=0) / frame
    return np.real(op.gamma @ spectrum)
