"""
Datasets: the Swiss roll point cloud, IDX and PGM image files, and
wavelet-band augmentation of image datasets.
"""

import gzip
import logging
import os
import struct
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exact import forward_exact_batch
from .exceptions import (
    BadMagicError,
    DimensionMismatchError,
    InvalidParameterError,
    TruncatedFileError,
    UnsupportedFormatError,
)
from .graph import image_grid_graph, laplacian
from .helpers import theta_tag
from .kernels import FilterBank, make_filter_bank
from .spectral import FractionalOperator, eig_decompose, fractional_basis

logger = logging.getLogger(__name__)

# ============================================================================
# Swiss roll
# ============================================================================


@dataclass(frozen=True)
class PointCloud:
    """3-D point coordinates and the seed that generated them."""

    points: np.ndarray
    seed: Optional[int] = None

    def __len__(self):
        return self.points.shape[0]


def swiss_roll_point(s, t):
    """(t cos t / 4 pi, s, t sin t / 4 pi)."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    return np.stack([t * np.cos(t) / (4 * np.pi), s, t * np.sin(t) / (4 * np.pi)], axis=-1)


def swiss_roll(n, seed=0) -> PointCloud:
    """
    n points with s ~ U[-1, 1], t ~ U[pi, 4 pi].

    Raises:
        InvalidParameterError: n < 1
    """
    if n < 1:
        raise InvalidParameterError("n", n, "must be at least 1")
    rng = np.random.default_rng(seed)
    s = rng.uniform(-1.0, 1.0, size=n)
    t = rng.uniform(np.pi, 4 * np.pi, size=n)
    return PointCloud(points=swiss_roll_point(s, t), seed=seed)


# ============================================================================
# IDX
# ============================================================================

IDX_TYPES = {
    0x08: np.dtype("u1"),
    0x09: np.dtype("i1"),
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}
IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


@dataclass(frozen=True)
class ImageDataset:
    """
    count x H x W uint8 images with optional labels.

    ``indices`` maps each row to its index in the source file when the
    dataset is a subsample. ``variants`` tags rows that are transformed
    copies of a source image ("flip", "rot90", ...; "" for the original).
    """

    images: np.ndarray
    labels: Optional[np.ndarray] = None
    indices: Optional[np.ndarray] = None
    variants: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.images.ndim != 3:
            raise DimensionMismatchError("images", ("count", "H", "W"), self.images.shape)
        if self.labels is not None and len(self.labels) != len(self.images):
            raise DimensionMismatchError("labels", (len(self.images),), np.shape(self.labels))
        if self.indices is not None and len(self.indices) != len(self.images):
            raise DimensionMismatchError("indices", (len(self.images),), np.shape(self.indices))
        if self.variants is not None and len(self.variants) != len(self.images):
            raise DimensionMismatchError("variants", (len(self.images),), (len(self.variants),))

    def __len__(self):
        return self.images.shape[0]

    @property
    def shape(self):
        return self.images.shape[1:]

    def source_index(self, row):
        return int(self.indices[row]) if self.indices is not None else row

    def label(self, row):
        return None if self.labels is None else int(self.labels[row])

    def variant(self, row):
        return "" if self.variants is None else self.variants[row]


def _open_maybe_gzip(path):
    with open(path, "rb") as f:
        head = f.read(2)
    if head == b"\x1f\x8b":
        return gzip.open(path, "rb")
    return open(path, "rb")


def read_idx_array(path):
    """
    Parse an IDX file (optionally gzip compressed).

    Returns:
        (magic, array)

    Raises:
        BadMagicError: Magic not 0x0000TTDD with a known type code TT
        TruncatedFileError: Header or payload shorter than declared
        DimensionMismatchError: Payload longer than declared
    """
    with _open_maybe_gzip(path) as f:
        data = f.read()
    if len(data) < 4:
        raise TruncatedFileError(path, 4, len(data))
    (magic,) = struct.unpack(">I", data[:4])
    type_code = (magic >> 8) & 0xFF
    ndim = magic & 0xFF
    if magic >> 16 != 0 or type_code not in IDX_TYPES or ndim == 0:
        raise BadMagicError(path, data[:4])
    header_size = 4 + 4 * ndim
    if len(data) < header_size:
        raise TruncatedFileError(path, header_size, len(data))
    dims = struct.unpack(f">{ndim}I", data[4:header_size])
    dtype = IDX_TYPES[type_code]
    expected = int(np.prod(dims, dtype=np.int64)) * dtype.itemsize
    actual = len(data) - header_size
    if actual < expected:
        raise TruncatedFileError(path, expected, actual)
    if actual > expected:
        raise DimensionMismatchError(f"IDX payload of {path}", expected, actual)
    array = np.frombuffer(data, dtype=dtype, offset=header_size).reshape(dims)
    return magic, array.astype(dtype.newbyteorder("="))


def read_idx(images_path, labels_path=None) -> ImageDataset:
    """
    Read an image file (magic 0x00000803) and an optional label file
    (magic 0x00000801).
    """
    magic, images = read_idx_array(images_path)
    if magic != IDX_IMAGES_MAGIC:
        raise BadMagicError(images_path, struct.pack(">I", magic))
    labels = None
    if labels_path:
        magic, labels = read_idx_array(labels_path)
        if magic != IDX_LABELS_MAGIC:
            raise BadMagicError(labels_path, struct.pack(">I", magic))
    logger.info("read %d images of %s from %s", images.shape[0], images.shape[1:], images_path)
    return ImageDataset(images=images, labels=labels)


def write_idx(array, path):
    """Write an array as IDX; gzip compressed when ``path`` ends in .gz."""
    array = np.asarray(array)
    codes = {dtype.kind + str(dtype.itemsize): code for code, dtype in IDX_TYPES.items()}
    code = codes.get(array.dtype.kind + str(array.dtype.itemsize))
    if code is None:
        raise UnsupportedFormatError(f"No IDX type code for dtype {array.dtype}")
    header = struct.pack(">I", (code << 8) | array.ndim) + struct.pack(f">{array.ndim}I", *array.shape)
    payload = array.astype(IDX_TYPES[code]).tobytes()
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "wb") as f:
        f.write(header + payload)


# ============================================================================
# PGM
# ============================================================================


def _pgm_header(data, path):
    """Return the four header tokens and the offset of the raster."""
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace() and data[pos:pos + 1] != b"#":
            pos += 1
        if start == pos:
            raise TruncatedFileError(path, "PGM header", len(data))
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    return tokens, pos + 1


def read_pgm(path):
    """
    Read a binary P5 image with maxval <= 255 as floats in [0, 1].

    Raises:
        UnsupportedFormatError: Not P5, or maxval > 255
        TruncatedFileError: Raster shorter than W x H
    """
    with open(path, "rb") as f:
        data = f.read()
    if not data.startswith(b"P5"):
        raise UnsupportedFormatError(f"{path}: only binary PGM (P5) is supported")
    tokens, offset = _pgm_header(data, path)
    try:
        width, height, maxval = (int(tok) for tok in tokens[1:])
    except ValueError:
        raise UnsupportedFormatError(f"{path}: malformed PGM header")
    if maxval > 255 or maxval < 1:
        raise UnsupportedFormatError(f"{path}: maxval {maxval} is not supported (8-bit only)")
    raster = data[offset:offset + width * height]
    if len(raster) < width * height:
        raise TruncatedFileError(path, width * height, len(raster))
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(height, width)
    return pixels.astype(float) / maxval


def to_uint8(matrix):
    """uint8 arrays pass through; floats in [0, 1] are scaled to 0..255."""
    matrix = np.asarray(matrix)
    if matrix.dtype == np.uint8:
        return matrix
    return np.rint(np.clip(matrix, 0.0, 1.0) * 255.0).astype(np.uint8)


def write_pgm(matrix, path):
    """Write a 2-D array as binary P5 with maxval 255."""
    pixels = to_uint8(matrix)
    if pixels.ndim != 2:
        raise DimensionMismatchError("image", ("H", "W"), pixels.shape)
    height, width = pixels.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(pixels).tobytes())


# ============================================================================
# Augmentation
# ============================================================================


@dataclass(frozen=True)
class ManifestRow:
    src_index: int
    theta: float
    band: int
    label: Optional[int]
    path: str


class OperatorCache:
    """
    Grid-graph operators keyed by (H, W, theta_w, k, theta, bank parameters).

    The Laplacian eigendecomposition is shared by every theta on the same
    lattice.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._decompositions = {}
        self._entries: Dict[Tuple, Tuple[FractionalOperator, FilterBank]] = {}

    def __len__(self):
        return len(self._entries)

    def get(self, shape, theta, theta_w=1.0, k=1.0, J=5, K=20.0, alpha=2, beta=2, x1=1.0, x2=2.0):
        key = (tuple(shape), float(theta_w), float(k), float(theta), int(J), float(K), alpha, beta, float(x1), float(x2))
        with self._lock:
            if key in self._entries:
                logger.debug("operator cache hit: %s", key)
                return self._entries[key]
            lattice = (tuple(shape), float(theta_w), float(k))
            if lattice not in self._decompositions:
                graph = image_grid_graph(np.zeros(shape), theta_w=theta_w, k=k)
                self._decompositions[lattice] = eig_decompose(laplacian(graph))
            op = fractional_basis(self._decompositions[lattice], theta, laplacian=False)
            bank = make_filter_bank(op.r_max_bound, J=J, K=K, alpha=alpha, beta=beta, x1=x1, x2=x2)
            self._entries[key] = (op, bank)
            return op, bank


def augmented_count(n_images, n_thetas, J):
    """Number of band images produced: n_images * n_thetas * (J + 1)."""
    return n_images * n_thetas * (J + 1)


def rescale_band(values):
    """Min-max rescale to uint8 0..255; a constant band maps to 0."""
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return np.zeros(values.shape, dtype=np.uint8)
    return np.rint((values - lo) * (255.0 / (hi - lo))).astype(np.uint8)


def band_filename(src_index, theta, band, variant=""):
    tag = f"_{variant}" if variant else ""
    return f"{src_index:06d}{tag}_t{theta_tag(theta)}_b{band}.pgm"


def _augment_chunk(ds, rows, theta, op, bank, out_dir, mode):
    height, width = ds.shape
    signals = ds.images[rows].reshape(len(rows), -1).astype(float) / 255.0
    bands = forward_exact_batch(signals, op, bank)
    values = np.abs(bands) if mode == "magnitude" else np.real(bands)
    manifest = []
    for local, row in enumerate(rows):
        src = ds.source_index(row)
        for band in range(bank.J + 1):
            name = band_filename(src, theta, band, ds.variant(row))
            write_pgm(rescale_band(values[local, band]).reshape(height, width), os.path.join(out_dir, name))
            manifest.append(ManifestRow(src, theta, band, ds.label(row), name))
    return manifest


def augment_dataset(
    ds: ImageDataset,
    thetas: Sequence[float],
    J: int,
    out_dir,
    K=20.0,
    alpha=2,
    beta=2,
    x1=1.0,
    x2=2.0,
    theta_w=1.0,
    k=1.0,
    mode="magnitude",
    threads=1,
    chunk_size=256,
    cache: Optional[OperatorCache] = None,
) -> List[ManifestRow]:
    """
    Write (J+1) band images per (image, theta) and return the manifest rows.

    Band images are the per-band min-max rescaled magnitude (or real part)
    of the exact transform on the pixel grid graph. Rows are ordered by
    (source index, theta order, band).

    Raises:
        InvalidParameterError: theta outside (0, 1] or unknown mode
    """
    thetas = [float(t) for t in thetas]
    if not thetas:
        raise InvalidParameterError("thetas", thetas, "must not be empty")
    for theta in thetas:
        if not (0.0 < theta <= 1.0):
            raise InvalidParameterError("theta", theta, "must lie in (0, 1]")
    if mode not in ("magnitude", "real"):
        raise InvalidParameterError("mode", mode, "must be magnitude or real")
    cache = cache or OperatorCache()
    os.makedirs(out_dir, exist_ok=True)

    # Build every operator before fanning out, so workers only read the cache.
    operators = [
        cache.get(ds.shape, theta, theta_w=theta_w, k=k, J=J, K=K, alpha=alpha, beta=beta, x1=x1, x2=x2)
        for theta in thetas
    ]
    chunks = [list(range(start, min(start + chunk_size, len(ds)))) for start in range(0, len(ds), chunk_size)]
    jobs = [(rows, theta, op, bank) for theta, (op, bank) in zip(thetas, operators) for rows in chunks]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda job: _augment_chunk(ds, *job, out_dir, mode), jobs))
    else:
        results = [_augment_chunk(ds, *job, out_dir, mode) for job in jobs]

    order = {theta: idx for idx, theta in enumerate(thetas)}
    manifest = [row for chunk in results for row in chunk]
    manifest.sort(key=lambda row: (row.src_index, order[row.theta], row.band, row.path))
    logger.info("augmented %d images into %d band images", len(ds), len(manifest))
    return manifest


TRADITIONAL_OPS = ("flip", "rot90", "noise")


def traditional_augment(ds: ImageDataset, ops=TRADITIONAL_OPS, seed=0, noise_std=8.0) -> ImageDataset:
    """
    Originals followed by one transformed copy per op: horizontal flip,
    quarter turn (square images only) and seeded Gaussian pixel noise.
    """
    rng = np.random.default_rng(seed)
    blocks = [ds.images]
    tags = [""]
    for op in ops:
        if op == "flip":
            blocks.append(ds.images[:, :, ::-1])
        elif op == "rot90":
            if ds.shape[0] != ds.shape[1]:
                raise InvalidParameterError("ops", op, "rot90 needs square images")
            blocks.append(np.rot90(ds.images, axes=(1, 2)))
        elif op == "noise":
            noisy = ds.images.astype(float) + rng.normal(0.0, noise_std, size=ds.images.shape)
            blocks.append(np.clip(np.rint(noisy), 0, 255).astype(np.uint8))
        else:
            raise InvalidParameterError("ops", op, f"must be among {', '.join(TRADITIONAL_OPS)}")
        tags.append(op)
    copies = len(blocks)
    labels = None if ds.labels is None else np.tile(ds.labels, copies)
    indices = np.tile(np.array([ds.source_index(i) for i in range(len(ds))]), copies)
    base = [ds.variant(i) for i in range(len(ds))]
    variants = tuple("_".join(part for part in (b, tag) if part) for tag in tags for b in base)
    return ImageDataset(
        images=np.ascontiguousarray(np.concatenate(blocks)), labels=labels, indices=indices, variants=variants
    )


def subsample_indices(n, count, seed=0):
    """Sorted uniform sample of ``count`` distinct indices from range(n)."""
    if count < 0 or count > n:
        raise InvalidParameterError("count", count, f"must lie in 0..{n}")
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=count, replace=False))


def subsample(ds: ImageDataset, count, seed=0) -> ImageDataset:
    """Seeded uniform subsample; source indices are kept for the manifest."""
    picked = subsample_indices(len(ds), count, seed)
    labels = None if ds.labels is None else ds.labels[picked]
    indices = np.array([ds.source_index(i) for i in picked], dtype=np.int64)
    variants = None if ds.variants is None else tuple(ds.variants[i] for i in picked)
    return ImageDataset(images=ds.images[picked], labels=labels, indices=indices, variants=variants)
