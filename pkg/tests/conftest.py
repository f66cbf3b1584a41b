"""
Pytest fixtures for sgfrwt tests.

This module provides shared fixtures used across test modules.
"""

import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest
import yaml

from core import config
from core.graph import build_graph, gaussian_point_cloud_graph, laplacian
from core.kernels import make_filter_bank
from core.spectral import eig_decompose, fractional_basis


@pytest.fixture
def temp_dir():
    """Create a temporary directory that is cleaned up after the test."""
    tmpdir = tempfile.mkdtemp()
    yield tmpdir
    shutil.rmtree(tmpdir)


@pytest.fixture(autouse=True)
def isolated_config(temp_dir, monkeypatch):
    """Point the default config manager at an empty temporary home."""
    monkeypatch.setenv("SGFRWT_HOME", temp_dir)
    config.reset_config()
    yield
    config.reset_config()


@pytest.fixture
def user_config(temp_dir):
    """
    Write a user config/sgfrwt.yaml under the temporary config home.

    Returns a function taking the mapping to write.
    """

    def write(data):
        path = Path(temp_dir) / "config"
        path.mkdir(exist_ok=True)
        with open(path / "sgfrwt.yaml", "w") as f:
            yaml.dump(data, f, default_flow_style=False, sort_keys=False)
        config.reset_config()
        return str(path / "sgfrwt.yaml")

    return write


def synthetic_image(height=64, width=64):
    """Deterministic image in [0, 1]: a shaded background, a disc and a bar."""
    rows, cols = np.mgrid[0:height, 0:width]
    image = 0.2 + 0.3 * cols / max(width - 1, 1)
    disc = (rows - 0.4 * height) ** 2 + (cols - 0.35 * width) ** 2 <= (0.2 * min(height, width)) ** 2
    image[disc] = 0.9
    bar = (rows >= 0.65 * height) & (rows < 0.8 * height) & (cols >= 0.5 * width) & (cols < 0.9 * width)
    image[bar] = 0.05
    return image


def path_graph(n):
    """Unit-weight path 0 - 1 - ... - n-1."""
    return build_graph(n, [(i, i + 1, 1.0) for i in range(n - 1)])


def random_connected_graph(n, seed=0):
    """Gaussian knn graph on seeded random points, plus a path so it is connected."""
    rng = np.random.default_rng(seed)
    cloud = gaussian_point_cloud_graph(rng.uniform(size=(n, 2)), sigma=0.3, sparsify="knn", knn=5)
    edges = {(i, j): w for i, j, w in cloud.edges}
    for i in range(n - 1):
        edges.setdefault((i, i + 1), 0.5)
    return build_graph(n, [(i, j, w) for (i, j), w in edges.items()])


def operator_and_bank(graph, theta, J=4, K=20.0):
    op = fractional_basis(eig_decompose(laplacian(graph)), theta)
    return op, make_filter_bank(op.r_max_bound, J=J, K=K)


@pytest.fixture
def p3():
    """Path graph on three vertices (eigenvalues 0, 1, 3)."""
    return path_graph(3)


@pytest.fixture
def small_graph():
    """Connected 24-vertex graph."""
    return random_connected_graph(24, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
