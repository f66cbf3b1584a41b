"""
Undirected weighted graphs, their combinatorial Laplacian, and the two
constructions used by the experiments: Gaussian point-cloud graphs and
pixel-lattice graphs.

Graphs are immutable. Edges are stored once per unordered pair as
``(i, j, w)`` with ``i < j`` and sorted by ``(i, j)``, so Laplacian assembly
is deterministic.
"""

import logging
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree
from scipy.spatial.distance import pdist

from .exceptions import (
    ConflictingDuplicateEdgeError,
    DataFormatError,
    DegenerateInputError,
    EmptyGraphError,
    IndexOutOfRangeError,
    InvalidParameterError,
    NonPositiveWeightError,
    SelfLoopError,
)

logger = logging.getLogger(__name__)

SPARSIFY_MODES = ("dense", "threshold", "knn")


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph with strictly positive edge weights."""

    n_vertices: int
    edges: Tuple[Tuple[int, int, float], ...]

    @property
    def n_edges(self):
        return len(self.edges)

    def weight_matrix(self):
        """Symmetric weight matrix W as a CSR matrix."""
        n = self.n_vertices
        if not self.edges:
            return sparse.csr_matrix((n, n))
        rows, cols, weights = (np.array(col) for col in zip(*self.edges))
        w = sparse.coo_matrix(
            (np.concatenate([weights, weights]), (np.concatenate([rows, cols]), np.concatenate([cols, rows]))),
            shape=(n, n),
        )
        return w.tocsr()

    def degrees(self):
        """Weighted degree d_m = sum_n w_{m,n}, accumulated in edge order."""
        d = np.zeros(self.n_vertices)
        for i, j, w in self.edges:
            d[i] += w
            d[j] += w
        return d

    def n_components(self):
        count, _ = connected_components(self.weight_matrix(), directed=False)
        return int(count)

    def is_connected(self):
        return self.n_components() == 1


def build_graph(n: int, edge_list: Iterable[Sequence]) -> Graph:
    """
    Build a graph from an edge list, merging consistent duplicates.

    Args:
        n: Number of vertices
        edge_list: Iterable of (i, j, w)

    Returns:
        Graph with each unordered pair stored once, sorted by (i, j)

    Raises:
        IndexOutOfRangeError, SelfLoopError, NonPositiveWeightError,
        ConflictingDuplicateEdgeError
    """
    if n < 1:
        raise DegenerateInputError(f"Graph needs at least one vertex, got n={n}")
    merged = {}
    for entry in edge_list:
        i, j, w = int(entry[0]), int(entry[1]), float(entry[2])
        for v in (i, j):
            if v < 0 or v >= n:
                raise IndexOutOfRangeError(v, n)
        if i == j:
            raise SelfLoopError(i)
        if not (w > 0) or not math.isfinite(w):
            raise NonPositiveWeightError(i, j, w)
        key = (min(i, j), max(i, j))
        if key in merged:
            if not math.isclose(merged[key], w, rel_tol=1e-12, abs_tol=0.0):
                raise ConflictingDuplicateEdgeError(key[0], key[1], merged[key], w)
            continue
        merged[key] = w
    edges = tuple((i, j, merged[(i, j)]) for i, j in sorted(merged))
    return Graph(n_vertices=n, edges=edges)


def laplacian(g: Graph) -> np.ndarray:
    """
    Dense combinatorial Laplacian L = D - W.

    The diagonal is the sum of the off-diagonal weights of each row, so row
    sums vanish up to rounding.
    """
    n = g.n_vertices
    lap = np.zeros((n, n))
    for i, j, w in g.edges:
        lap[i, j] -= w
        lap[j, i] -= w
    lap[np.diag_indices(n)] = g.degrees()
    return lap


def graph_stats(g: Graph):
    """Return (N, |E|, number of connected components)."""
    return g.n_vertices, g.n_edges, g.n_components()


# ============================================================================
# Constructions
# ============================================================================


def gaussian_weight(distance_sq, sigma):
    """exp(-d^2 / 2 sigma^2)."""
    return np.exp(-np.asarray(distance_sq) / (2.0 * sigma * sigma))


def gaussian_point_cloud_graph(points, sigma=0.1, sparsify="dense", epsilon=1e-8, knn=10) -> Graph:
    """
    Gaussian-weighted graph on a point cloud.

    Args:
        points: (n, d) array of coordinates
        sigma: Gaussian width
        sparsify: "dense" keeps every pair whose weight is representable
            (> 0), "threshold" drops weights below ``epsilon``, "knn" keeps
            the union of each point's ``knn`` nearest neighbors
        epsilon: Threshold for "threshold" mode
        knn: Neighbor count for "knn" mode

    Raises:
        DegenerateInputError: Fewer than two points
        InvalidParameterError: Bad sigma or mode
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.shape[0] < 2:
        raise DegenerateInputError(f"Point cloud graph needs at least 2 points, got {pts.shape[0]}")
    if not (sigma > 0):
        raise InvalidParameterError("sigma", sigma, "must be positive")
    if sparsify not in SPARSIFY_MODES:
        raise InvalidParameterError("sparsify", sparsify, f"must be one of {', '.join(SPARSIFY_MODES)}")
    n = pts.shape[0]

    if sparsify == "knn":
        if knn < 1:
            raise InvalidParameterError("knn", knn, "must be at least 1")
        neighbors = min(knn, n - 1)
        tree = cKDTree(pts)
        dist, idx = tree.query(pts, k=neighbors + 1)
        pairs = {}
        for i in range(n):
            for d, j in zip(dist[i], idx[i]):
                if j == i:
                    continue
                key = (min(i, int(j)), max(i, int(j)))
                pairs[key] = d * d
        keys = sorted(pairs)
        weights = gaussian_weight([pairs[key] for key in keys], sigma)
        edges = [(i, j, w) for (i, j), w in zip(keys, weights) if w > 0]
    else:
        iu, ju = np.triu_indices(n, k=1)
        weights = gaussian_weight(pdist(pts, "sqeuclidean"), sigma)
        keep = weights > 0
        if sparsify == "threshold":
            keep &= weights >= epsilon
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist(), weights[keep].tolist()))

    if not edges:
        raise EmptyGraphError("No pair of points passed the sparsification rule")
    logger.debug("point cloud graph: n=%d, edges=%d, mode=%s", n, len(edges), sparsify)
    return build_graph(n, edges)


def lattice_offsets(k):
    """Pixel offsets (dy, dx) with 0 < dy^2 + dx^2 <= k^2, one per unordered pair."""
    reach = int(math.floor(k))
    offsets = []
    for dy in range(0, reach + 1):
        for dx in range(-reach, reach + 1):
            if dy == 0 and dx <= 0:
                continue
            if dy * dy + dx * dx <= k * k:
                offsets.append((dy, dx))
    return offsets


def image_grid_graph(image, theta_w=1.0, k=1.0) -> Graph:
    """
    Graph on the pixel lattice of an image.

    Pixels within Euclidean lattice distance ``k`` are joined with weight
    exp(-dist^2 / 2 theta_w^2). With k = 1 this is the 4-neighbor lattice.
    Vertex index of pixel (r, c) is r * W + c.

    Raises:
        DegenerateInputError: Image smaller than 2x2
        EmptyGraphError: No pixel pair within the cutoff
    """
    img = np.asarray(image)
    if img.ndim != 2 or img.shape[0] < 2 or img.shape[1] < 2:
        raise DegenerateInputError(f"Image grid graph needs an H x W image with H, W >= 2, got {img.shape}")
    if not (theta_w > 0):
        raise InvalidParameterError("theta_w", theta_w, "must be positive")
    offsets = lattice_offsets(k)
    if not offsets:
        raise EmptyGraphError(f"No pixel pair lies within distance k={k}")
    height, width = img.shape
    index = np.arange(height * width).reshape(height, width)
    edges = []
    for dy, dx in offsets:
        weight = float(gaussian_weight(dy * dy + dx * dx, theta_w))
        if weight <= 0:
            continue
        c0, c1 = max(0, -dx), width - max(0, dx)
        src = index[: height - dy, c0:c1]
        dst = index[dy:, c0 + dx: c1 + dx]
        edges.extend((int(a), int(b), weight) for a, b in zip(src.ravel(), dst.ravel()))
    if not edges:
        raise EmptyGraphError(f"All lattice weights underflow for theta_w={theta_w}")
    return build_graph(height * width, edges)


# ============================================================================
# Edge-list text format
# ============================================================================


def write_edge_list(g: Graph, path, header=None):
    """
    Write ``#vertices N`` followed by one ``i<TAB>j<TAB>w`` line per edge.

    Args:
        header: Optional list of extra comment lines (written before the
            vertex count)
    """
    with open(path, "w") as f:
        for line in header or []:
            f.write(line if line.startswith("#") else f"# {line}")
            f.write("\n")
        f.write(f"#vertices {g.n_vertices}\n")
        for i, j, w in g.edges:
            f.write(f"{i}\t{j}\t{w!r}\n")


def read_edge_list(path) -> Graph:
    """Parse the edge-list text format; ``#vertices N`` is mandatory."""
    if not os.path.exists(path):
        raise DataFormatError(f"Edge list not found: {path}")
    n = None
    edges = []
    with open(path, "r") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "vertices":
                    n = int(parts[1])
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 3:
                raise DataFormatError(f"{path}:{lineno}: expected 'i<TAB>j<TAB>w', got {line!r}")
            try:
                edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
            except ValueError:
                raise DataFormatError(f"{path}:{lineno}: unparsable edge {line!r}")
    if n is None:
        raise DataFormatError(f"{path}: missing '#vertices N' header")
    return build_graph(n, edges)
