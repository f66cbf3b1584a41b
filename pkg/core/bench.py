"""
Benchmark harness: setup cost, exact and fast transform time, matvec
counts, fast-vs-exact error (overall and per band) against the truncation
order, and the single expansion W*W against the sequential
adjoint(forward) composition.
"""

import logging
import time

import numpy as np

from .exact import forward_exact
from .exceptions import SgfrwtError
from .fast import adjoint, build_propagators, forward_fast, make_fourier_approx, product_coefficients, wtw_apply
from .graph import gaussian_point_cloud_graph, laplacian
from .kernels import make_filter_bank
from .spectral import eig_decompose, fractional_basis

logger = logging.getLogger(__name__)

BENCH_COLUMNS = [
    "n",
    "edges",
    "theta",
    "M",
    "setup_s",
    "exact_s",
    "fast_s",
    "matvecs",
    "max_error",
    "band_errors",
    "bound",
    "wtw_s",
    "sequential_s",
    "composition_gap",
    "error",
]
TIMING_COLUMNS = ("setup_s", "exact_s", "fast_s", "wtw_s", "sequential_s")


def random_geometric_graph(n, seed=0, sigma=0.2, knn=8):
    """Gaussian knn graph on n seeded uniform points in the unit square."""
    rng = np.random.default_rng(seed)
    return gaussian_point_cloud_graph(rng.uniform(size=(n, 2)), sigma=sigma, sparsify="knn", knn=knn)


def _timed(func, *args):
    start = time.perf_counter()
    value = func(*args)
    return value, time.perf_counter() - start


def bench_cell(op, bank, signal, exact, order, extension="even", period_factor=3.0, propagator="dense"):
    """Measure one truncation order on a prepared operator."""
    fa = make_fourier_approx(bank, order, extension=extension, period_factor=period_factor)
    pp = build_propagators(op, fa.period, backend=propagator, conjugate_shortcut=False)
    pp.counter.reset()
    approx, fast_s = _timed(forward_fast, signal, pp, fa)
    matvecs = pp.counter.value
    d = product_coefficients(fa)
    single, wtw_s = _timed(wtw_apply, signal, pp, d)
    sequential, sequential_s = _timed(lambda f: adjoint(forward_fast(f, pp, fa), pp, fa), signal)
    norm = float(np.linalg.norm(signal))
    band_errors = np.max(np.abs(approx.bands - exact.bands), axis=1)
    return {
        "M": order,
        "fast_s": fast_s,
        "matvecs": matvecs,
        "max_error": float(band_errors.max()),
        "band_errors": [float(e) for e in band_errors],
        "bound": max(fa.bounds) * norm,
        "wtw_s": wtw_s,
        "sequential_s": sequential_s,
        "composition_gap": float(np.linalg.norm(single - sequential)) / max(norm, 1e-300),
    }


def run_bench(sizes=(64, 128), thetas=(1.0, 0.5), orders=(5, 10, 20, 40), J=4, K=20.0, seed=0, **fast_options):
    """
    Sweep graph sizes, orders theta and truncation orders M.

    A failing cell is recorded with its error message instead of stopping
    the sweep.

    Returns:
        List of row dicts keyed by BENCH_COLUMNS
    """
    rows = []
    rng = np.random.default_rng(seed)
    for n in sizes:
        try:
            graph = random_geometric_graph(n, seed=seed)
            dec, eig_s = _timed(eig_decompose, laplacian(graph))
        except SgfrwtError as e:
            rows.append({"n": n, "theta": float("nan"), "M": 0, "error": e.message})
            continue
        signal = rng.standard_normal(n)
        for theta in thetas:
            base = {"n": n, "edges": graph.n_edges, "theta": float(theta)}
            try:
                start = time.perf_counter()
                op = fractional_basis(dec, theta)
                bank = make_filter_bank(op.r_max_bound, J=J, K=K)
                setup_s = eig_s + time.perf_counter() - start
                exact, exact_s = _timed(forward_exact, signal, op, bank)
            except SgfrwtError as e:
                rows.append({**base, "M": 0, "error": e.message})
                continue
            for order in orders:
                row = {**base, "setup_s": setup_s, "exact_s": exact_s}
                try:
                    row.update(bench_cell(op, bank, signal, exact, order, **fast_options))
                except SgfrwtError as e:
                    row.update({"M": order, "error": e.message})
                logger.debug("bench n=%d theta=%.2f M=%d done", n, theta, order)
                rows.append(row)
    return rows


def strip_timings(rows):
    """Rows without timing columns, for determinism checks."""
    return [{k: v for k, v in row.items() if k not in TIMING_COLUMNS} for row in rows]
