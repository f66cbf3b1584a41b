"""
Spectral engine: Laplacian eigendecomposition, the fractional basis
gamma = chi^theta, the fractional Laplacian L_theta = gamma diag(r) gamma^H,
and the forward/inverse graph fractional Fourier transform.

The matrix power of the orthogonal eigenvector matrix chi is taken through its
real Schur form chi = Z blockdiag(R(phi), +-1) Z^T, factored once per
decomposition and shared by every theta. Phases are principal, in (-pi, pi];
an eigenvalue at -1 always takes phase +pi.
"""

import logging
import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg

from .config import get_config_value
from .exceptions import (
    DataFormatError,
    DimensionMismatchError,
    GraphTooLargeError,
    InvalidOrderError,
    NumericalFailureError,
    BadMagicError,
    TruncatedFileError,
)

logger = logging.getLogger(__name__)

OPERATOR_MAGIC = b"FGW1"
OPERATOR_HEADER = struct.Struct("<4sQd")
# Relative tolerance under which eigenvalues are treated as tied or as zero.
EIG_TIE_TOL = 1e-10
# Phases within this distance of +-pi are snapped to +pi.
PHASE_SNAP = 1e-9
# Sources of the spectral bound r_max used to build filter banks.
R_MAX_MODES = ("exact", "estimate")


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenpairs of a graph Laplacian, eigenvalues ascending."""

    chi: np.ndarray
    lam: np.ndarray

    @property
    def n(self):
        return self.lam.shape[0]

    @cached_property
    def rotation(self):
        """Real Schur form of chi, factored on first use."""
        return rotation_form(self.chi)


@dataclass(frozen=True)
class FractionalOperator:
    """
    Fractional basis, fractional spectrum and fractional Laplacian for one order theta.

    ``l_theta`` is None when the operator was built for exact transforms only.
    """

    theta: float
    gamma: np.ndarray
    r: np.ndarray
    l_theta: Optional[np.ndarray]
    r_max_bound: float
    zero_power_convention: bool = True

    @property
    def n(self):
        return self.r.shape[0]

    @property
    def is_real(self):
        """True when gamma (hence L_theta) has no imaginary part."""
        if np.any(self.gamma.imag):
            return False
        return self.l_theta is None or not np.any(self.l_theta.imag)


def check_size(n):
    """Refuse dense operators above ``spectral.max_vertices``."""
    limit = int(get_config_value("spectral.max_vertices", 5000))
    if n > limit:
        raise GraphTooLargeError(n, limit)


def _normalize_sign(vec):
    """Make the first entry of (near-)largest magnitude positive."""
    mags = np.abs(vec)
    pivot = int(np.argmax(mags >= mags.max() - 1e-12))
    return -vec if vec[pivot] < 0 else vec


def eig_decompose(lap) -> SpectralDecomposition:
    """
    Eigendecompose a symmetric Laplacian.

    Eigenvalues are ascending and clipped to be nonnegative; those below
    ``EIG_TIE_TOL * ||L||`` are set to exactly 0. Each eigenvector is sign
    normalized, and eigenvectors sharing an eigenvalue are ordered
    lexicographically so the basis is reproducible.

    Raises:
        DimensionMismatchError: L not square
        NumericalFailureError: Eigensolver did not converge
    """
    lap = np.asarray(lap, dtype=float)
    if lap.ndim != 2 or lap.shape[0] != lap.shape[1]:
        raise DimensionMismatchError("Laplacian", "(N, N)", lap.shape)
    check_size(lap.shape[0])
    try:
        lam, chi = scipy.linalg.eigh(lap)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailureError(f"Laplacian eigendecomposition failed: {e}")

    scale = max(1.0, float(np.abs(lap).max()))
    lam = np.where(lam < EIG_TIE_TOL * scale, 0.0, lam)
    chi = np.column_stack([_normalize_sign(chi[:, idx]) for idx in range(chi.shape[1])])

    # Order ties lexicographically by eigenvector entries.
    order = []
    start = 0
    n = lam.shape[0]
    while start < n:
        stop = start + 1
        while stop < n and lam[stop] - lam[start] <= EIG_TIE_TOL * scale:
            stop += 1
        block = list(range(start, stop))
        if len(block) > 1:
            block.sort(key=lambda col: tuple(np.round(chi[:, col], 12)))
        order.extend(block)
        start = stop
    order = np.array(order)
    return SpectralDecomposition(chi=chi[:, order], lam=lam[order])


def eigenphases(matrix):
    """
    Unitarily diagonalize a normal matrix.

    Returns:
        (U, phi): unitary U and principal phases phi in (-pi, pi] with
        matrix = U diag(exp(i phi)) U^H

    Raises:
        NumericalFailureError: Schur factorization failed
    """
    try:
        tri, unitary = scipy.linalg.schur(np.asarray(matrix, dtype=complex), output="complex")
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailureError(f"Schur factorization failed: {e}")
    phi = np.angle(np.diag(tri))
    phi = np.where(np.abs(phi) > np.pi - PHASE_SNAP, np.pi, phi)
    return unitary, phi


@dataclass(frozen=True)
class RotationForm:
    """
    chi = Z blockdiag(R(phi_b), -1, +1) Z^T for a real orthogonal chi.

    ``first`` holds the leading column of each 2x2 rotation block, ``angles``
    its phase in (-pi, pi), and ``reflections`` the columns with eigenvalue -1.
    Remaining columns are fixed (eigenvalue +1).
    """

    basis: np.ndarray
    first: np.ndarray
    angles: np.ndarray
    reflections: np.ndarray


def rotation_form(chi) -> RotationForm:
    """
    Real Schur factorization of an orthogonal matrix.

    For a normal matrix the quasi-triangular factor is block diagonal, so
    only its diagonal blocks are read.

    Raises:
        NumericalFailureError: Schur factorization failed
    """
    try:
        tri, basis = scipy.linalg.schur(np.asarray(chi, dtype=float), output="real")
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalFailureError(f"Schur factorization failed: {e}")
    n = tri.shape[0]
    first, angles, reflections = [], [], []
    col = 0
    while col < n:
        if col + 1 < n and tri[col + 1, col] != 0:
            phi = float(np.arctan2(tri[col + 1, col], tri[col, col]))
            if abs(phi) > np.pi - PHASE_SNAP:
                reflections.extend((col, col + 1))
            else:
                first.append(col)
                angles.append(phi)
            col += 2
            continue
        if tri[col, col] < 0:
            reflections.append(col)
        col += 1
    logger.debug("rotation form: n=%d blocks=%d reflections=%d", n, len(first), len(reflections))
    return RotationForm(
        basis=basis,
        first=np.array(first, dtype=int),
        angles=np.array(angles, dtype=float),
        reflections=np.array(reflections, dtype=int),
    )


def fractional_power(chi, theta, form: Optional[RotationForm] = None):
    """
    Principal power chi^theta of an orthogonal matrix.

    Args:
        chi: Real orthogonal matrix
        theta: Exponent
        form: Precomputed ``rotation_form(chi)``; factored here when omitted
    """
    if theta == 0:
        return np.eye(chi.shape[0], dtype=complex)
    if theta == 1:
        return np.asarray(chi, dtype=complex)
    form = form if form is not None else rotation_form(chi)
    basis = form.basis
    scaled = basis.copy()
    lead, trail = form.first, form.first + 1
    cos, sin = np.cos(theta * form.angles), np.sin(theta * form.angles)
    scaled[:, lead] = basis[:, lead] * cos + basis[:, trail] * sin
    scaled[:, trail] = basis[:, trail] * cos - basis[:, lead] * sin
    flips = form.reflections
    scaled[:, flips] = basis[:, flips] * np.cos(np.pi * theta)
    power = (scaled @ basis.T).astype(complex)
    if flips.size:
        power += 1j * np.sin(np.pi * theta) * (basis[:, flips] @ basis[:, flips].T)
    return power


def fractional_spectrum(lam, theta):
    """r = lam^theta with 0^theta := 0 (also for theta = 0)."""
    lam = np.asarray(lam, dtype=float)
    r = np.zeros_like(lam)
    positive = lam > 0
    r[positive] = lam[positive] ** theta
    return r


def _bound_from_spectrum(r):
    top = float(np.max(r)) if r.size else 0.0
    return top * (1.0 + 1e-9) if top > 0 else 1.0


def fractional_basis(dec: SpectralDecomposition, theta: float, laplacian=True) -> FractionalOperator:
    """
    Build gamma = chi^theta, r = lam^theta and L_theta = gamma diag(r) gamma^H.

    The Schur factorization of chi is cached on ``dec``, so a theta sweep
    over one decomposition factors chi once.

    Args:
        dec: Laplacian eigendecomposition
        theta: Fractional order in [0, 1]; 0 is accepted as the identity case
        laplacian: Also form L_theta (needed by the fast path and FGW1 files)

    Raises:
        InvalidOrderError: theta outside [0, 1]
        NumericalFailureError: Matrix power failed
    """
    theta = float(theta)
    if not (0.0 <= theta <= 1.0):
        raise InvalidOrderError(theta)
    form = dec.rotation if theta not in (0.0, 1.0) else None
    gamma = fractional_power(dec.chi, theta, form)
    if not np.all(np.isfinite(gamma)):
        raise NumericalFailureError(f"Non-finite fractional basis for theta={theta}")
    r = fractional_spectrum(dec.lam, theta)
    l_theta = None
    if laplacian:
        l_theta = (gamma * r) @ gamma.conj().T
        l_theta = 0.5 * (l_theta + l_theta.conj().T)
        if not np.all(np.isfinite(l_theta)):
            raise NumericalFailureError(f"Non-finite fractional Laplacian for theta={theta}")
    logger.debug("fractional basis: n=%d theta=%.3f r_max=%.6g", dec.n, theta, r.max() if r.size else 0.0)
    return FractionalOperator(
        theta=theta,
        gamma=gamma,
        r=r,
        l_theta=l_theta,
        r_max_bound=_bound_from_spectrum(r),
        zero_power_convention=bool(np.any(dec.lam == 0)),
    )


def estimate_r_max(lap, theta, iterations=None, seed=0):
    """
    Upper-bound estimate of max lam^theta by power iteration on L.

    The Rayleigh quotient from power iteration is a lower estimate of
    lam_max, so a 1% margin is added before raising to theta.
    """
    if iterations is None:
        iterations = int(get_config_value("spectral.power_iterations", 100))
    lap = np.asarray(lap, dtype=float)
    rng = np.random.default_rng(seed)
    vec = rng.standard_normal(lap.shape[0])
    vec /= np.linalg.norm(vec)
    estimate = 0.0
    for _ in range(iterations):
        nxt = lap @ vec
        norm = np.linalg.norm(nxt)
        if norm == 0:
            break
        estimate = float(vec @ nxt)
        vec = nxt / norm
    lam_max = max(estimate, 0.0) * 1.01
    if lam_max == 0:
        return 1.0
    return lam_max ** theta if theta > 0 else 1.0


def _check_length(vec, n, what):
    vec = np.asarray(vec)
    if vec.ndim != 1 or vec.shape[0] != n:
        raise DimensionMismatchError(what, (n,), vec.shape)
    return vec


def gfrft(f, op: FractionalOperator):
    """Forward graph fractional Fourier transform, gamma^H f."""
    f = _check_length(f, op.n, "signal")
    return op.gamma.conj().T @ f


def igfrft(spectrum, op: FractionalOperator):
    """Inverse graph fractional Fourier transform, gamma f_hat."""
    spectrum = _check_length(spectrum, op.n, "spectrum")
    return op.gamma @ spectrum


def spectral_function(op: FractionalOperator, values):
    """Dense matrix gamma diag(values) gamma^H, a function of L_theta."""
    values = _check_length(values, op.n, "spectral values")
    return (op.gamma * values) @ op.gamma.conj().T


# ============================================================================
# FGW1 container
# ============================================================================


def save_operator(op: FractionalOperator, path):
    """
    Write the FGW1 container: magic, N (uint64), theta (float64), then gamma
    and L_theta as row-major complex128, all little-endian.
    """
    if op.l_theta is None:
        raise DataFormatError(f"Operator for theta={op.theta} was built without L_theta")
    with open(path, "wb") as f:
        f.write(OPERATOR_HEADER.pack(OPERATOR_MAGIC, op.n, op.theta))
        f.write(np.ascontiguousarray(op.gamma, dtype="<c16").tobytes())
        f.write(np.ascontiguousarray(op.l_theta, dtype="<c16").tobytes())


def load_operator(path) -> FractionalOperator:
    """Read an FGW1 container; r is recovered from diag(gamma^H L_theta gamma)."""
    with open(path, "rb") as f:
        head = f.read(OPERATOR_HEADER.size)
        if len(head) < OPERATOR_HEADER.size:
            raise TruncatedFileError(path, OPERATOR_HEADER.size, len(head))
        magic, n, theta = OPERATOR_HEADER.unpack(head)
        if magic != OPERATOR_MAGIC:
            raise BadMagicError(path, magic)
        expected = 2 * n * n * 16
        payload = f.read()
    if len(payload) < expected:
        raise TruncatedFileError(path, expected, len(payload))
    if len(payload) > expected:
        raise DataFormatError(f"{path}: {len(payload) - expected} trailing bytes after operator payload")
    block = n * n * 16
    gamma = np.frombuffer(payload[:block], dtype="<c16").reshape(n, n).astype(complex)
    l_theta = np.frombuffer(payload[block:], dtype="<c16").reshape(n, n).astype(complex)
    r = np.real(np.einsum("ij,ik,kj->j", gamma.conj(), l_theta, gamma))
    r = np.clip(r, 0.0, None)
    r[r < EIG_TIE_TOL * max(1.0, float(r.max(initial=0.0)))] = 0.0
    return FractionalOperator(
        theta=float(theta),
        gamma=gamma,
        r=r,
        l_theta=l_theta,
        r_max_bound=_bound_from_spectrum(r),
        zero_power_convention=bool(np.any(r == 0)),
    )
