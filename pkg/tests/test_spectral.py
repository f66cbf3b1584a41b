"""
Tests for core.spectral module.
"""

import math
from unittest.mock import patch

import numpy as np
import pytest

from core.exceptions import (
    BadMagicError,
    DataFormatError,
    DimensionMismatchError,
    GraphTooLargeError,
    InvalidOrderError,
    TruncatedFileError,
)
from core.graph import laplacian
from core.spectral import (
    OPERATOR_MAGIC,
    eig_decompose,
    eigenphases,
    estimate_r_max,
    fractional_basis,
    gfrft,
    igfrft,
    load_operator,
    rotation_form,
    save_operator,
    spectral_function,
)
from tests.conftest import path_graph, random_connected_graph


@pytest.fixture
def dec():
    return eig_decompose(laplacian(random_connected_graph(20, seed=5)))


class TestEigDecompose:
    """Tests for eig_decompose."""

    def test_path_two(self):
        d = eig_decompose(laplacian(path_graph(2)))
        np.testing.assert_allclose(d.lam, [0.0, 2.0], atol=1e-12)
        np.testing.assert_allclose(d.chi[:, 0], [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-12)
        np.testing.assert_allclose(np.abs(d.chi[:, 1]), [1 / math.sqrt(2)] * 2, atol=1e-12)
        assert d.chi[0, 1] * d.chi[1, 1] < 0

    def test_path_three(self, p3):
        d = eig_decompose(laplacian(p3))
        np.testing.assert_allclose(d.lam, [0.0, 1.0, 3.0], atol=1e-12)

    def test_orthonormal_eigenpairs(self, dec):
        lap = laplacian(random_connected_graph(20, seed=5))
        np.testing.assert_allclose(dec.chi.T @ dec.chi, np.eye(20), atol=1e-10)
        residual = lap @ dec.chi - dec.chi * dec.lam
        assert np.abs(residual).max() <= 1e-8 * np.abs(lap).max()

    def test_null_vector_constant_sign(self, dec):
        assert dec.lam[0] == 0.0
        assert np.all(dec.chi[:, 0] > 0)

    def test_deterministic(self):
        lap = laplacian(random_connected_graph(15, seed=2))
        a = eig_decompose(lap)
        b = eig_decompose(lap.copy())
        np.testing.assert_array_equal(a.chi, b.chi)

    def test_size_limit(self, user_config):
        user_config({"spectral": {"max_vertices": 2}})
        with pytest.raises(GraphTooLargeError):
            eig_decompose(laplacian(path_graph(3)))

    def test_not_square(self):
        with pytest.raises(DimensionMismatchError):
            eig_decompose(np.zeros((2, 3)))


class TestFractionalBasis:
    """Tests for fractional_basis."""

    def test_theta_one_is_plain_gft(self, dec):
        op = fractional_basis(dec, 1.0)
        np.testing.assert_allclose(op.gamma, dec.chi, atol=1e-10)
        lap = laplacian(random_connected_graph(20, seed=5))
        np.testing.assert_allclose(op.l_theta, lap, atol=1e-10)
        assert op.is_real

    def test_theta_zero_is_identity(self, dec):
        op = fractional_basis(dec, 0.0)
        np.testing.assert_array_equal(op.gamma, np.eye(20))
        assert op.r[0] == 0.0
        assert op.zero_power_convention

    @pytest.mark.parametrize("theta", [0.1, 0.35, 0.7, 1.0])
    def test_unitary_and_hermitian(self, dec, theta):
        op = fractional_basis(dec, theta)
        np.testing.assert_allclose(op.gamma @ op.gamma.conj().T, np.eye(20), atol=1e-10)
        np.testing.assert_allclose(op.l_theta, op.l_theta.conj().T, atol=1e-10)

    def test_fractional_spectrum(self, dec):
        op = fractional_basis(dec, 0.6)
        expected = np.where(dec.lam > 0, dec.lam ** 0.6, 0.0)
        np.testing.assert_allclose(np.linalg.eigvalsh(op.l_theta), np.sort(expected), rtol=1e-8, atol=1e-10)
        assert op.r_max_bound >= expected.max()

    def test_path_two_half(self):
        op = fractional_basis(eig_decompose(laplacian(path_graph(2))), 0.5)
        np.testing.assert_allclose(np.linalg.eigvalsh(op.l_theta), [0.0, math.sqrt(2.0)], atol=1e-12)

    def test_path_two_square_root(self):
        """chi of the two-vertex path has eigenvalue -1; its square root still squares back."""
        d = eig_decompose(laplacian(path_graph(2)))
        op = fractional_basis(d, 0.5)
        np.testing.assert_allclose(op.gamma @ op.gamma, d.chi, atol=1e-12)
        assert d.rotation.reflections.size == 1

    @pytest.mark.parametrize("theta", [0.25, 0.5, 0.9])
    def test_matches_complex_schur_power(self, dec, theta):
        unitary, phi = eigenphases(dec.chi)
        expected = (unitary * np.exp(1j * theta * phi)) @ unitary.conj().T
        np.testing.assert_allclose(fractional_basis(dec, theta).gamma, expected, atol=1e-9)

    def test_schur_factored_once_per_decomposition(self, dec):
        with patch("core.spectral.rotation_form", wraps=rotation_form) as factor:
            sweep = [fractional_basis(dec, theta, laplacian=False) for theta in (0.2, 0.5, 0.8)]
            fractional_basis(dec, 0.35)
        assert factor.call_count == 1
        np.testing.assert_allclose(sweep[1].gamma @ sweep[1].gamma, dec.chi, atol=1e-10)

    def test_without_laplacian(self, dec):
        op = fractional_basis(dec, 0.4, laplacian=False)
        assert op.l_theta is None
        np.testing.assert_array_equal(op.gamma, fractional_basis(dec, 0.4).gamma)
        assert not op.is_real

    @pytest.mark.parametrize("theta", [-0.1, 1.5])
    def test_invalid_order(self, dec, theta):
        with pytest.raises(InvalidOrderError):
            fractional_basis(dec, theta)

    def test_semigroup_eigenphases(self, dec):
        """gamma(0.3) gamma(0.4) has the eigenphases of gamma(0.7)."""
        product = fractional_basis(dec, 0.3).gamma @ fractional_basis(dec, 0.4).gamma
        _, phi_product = eigenphases(product)
        _, phi_direct = eigenphases(fractional_basis(dec, 0.7).gamma)
        np.testing.assert_allclose(np.sort(phi_product), np.sort(phi_direct), atol=1e-8)


class TestGfrft:
    """Tests for gfrft / igfrft."""

    def test_theta_one_basis_vector(self, dec):
        op = fractional_basis(dec, 1.0)
        np.testing.assert_allclose(gfrft(dec.chi[:, 3], op), np.eye(20)[3], atol=1e-12)

    def test_parseval(self, dec, rng):
        op = fractional_basis(dec, 0.7)
        f, h = rng.standard_normal(20), rng.standard_normal(20)
        inner = np.vdot(gfrft(h, op), gfrft(f, op))
        assert inner.real == pytest.approx(f @ h, abs=1e-10)
        assert abs(inner.imag) <= 1e-10

    def test_round_trip_real(self, dec, rng):
        op = fractional_basis(dec, 0.45)
        f = rng.standard_normal(20)
        back = igfrft(gfrft(f, op), op)
        np.testing.assert_allclose(back.real, f, atol=1e-10)
        assert np.abs(back.imag).max() <= 1e-10

    def test_zero_spectrum(self, dec):
        op = fractional_basis(dec, 0.5)
        np.testing.assert_array_equal(igfrft(np.zeros(20), op), np.zeros(20))

    def test_column_extraction(self, dec):
        op = fractional_basis(dec, 1.0)
        np.testing.assert_allclose(igfrft(np.eye(20)[5], op), dec.chi[:, 5], atol=1e-12)

    def test_length_mismatch(self, dec):
        op = fractional_basis(dec, 0.5)
        with pytest.raises(DimensionMismatchError):
            gfrft(np.zeros(19), op)

    def test_spectral_function_identity(self, dec):
        op = fractional_basis(dec, 0.8)
        np.testing.assert_allclose(spectral_function(op, op.r), op.l_theta, atol=1e-10)


class TestRMaxEstimate:
    def test_bounds_true_maximum(self):
        lap = laplacian(random_connected_graph(30, seed=4))
        true_max = np.linalg.eigvalsh(lap).max()
        estimate = estimate_r_max(lap, 0.5, iterations=500)
        assert estimate >= true_max ** 0.5 * (1 - 1e-6)


class TestOperatorContainer:
    """Tests for the FGW1 operator cache file."""

    def test_save_load(self, dec, temp_dir):
        op = fractional_basis(dec, 0.4)
        path = f"{temp_dir}/op.fgw"
        save_operator(op, path)
        loaded = load_operator(path)
        assert loaded.theta == 0.4
        np.testing.assert_array_equal(loaded.gamma, op.gamma)
        np.testing.assert_array_equal(loaded.l_theta, op.l_theta)
        np.testing.assert_allclose(loaded.r, op.r, atol=1e-9)

    def test_save_needs_laplacian(self, dec, temp_dir):
        with pytest.raises(DataFormatError):
            save_operator(fractional_basis(dec, 0.4, laplacian=False), f"{temp_dir}/op.fgw")

    def test_layout(self, dec, temp_dir):
        op = fractional_basis(dec, 0.4)
        path = f"{temp_dir}/op.fgw"
        save_operator(op, path)
        with open(path, "rb") as f:
            data = f.read()
        assert data[:4] == OPERATOR_MAGIC
        assert int.from_bytes(data[4:12], "little") == 20
        assert len(data) == 4 + 8 + 8 + 2 * 20 * 20 * 16

    def test_bad_magic(self, temp_dir):
        path = f"{temp_dir}/op.fgw"
        with open(path, "wb") as f:
            f.write(b"XXXX" + bytes(16))
        with pytest.raises(BadMagicError):
            load_operator(path)

    def test_truncated(self, dec, temp_dir):
        op = fractional_basis(dec, 0.4)
        path = f"{temp_dir}/op.fgw"
        save_operator(op, path)
        with open(path, "rb") as f:
            data = f.read()
        with open(path, "wb") as f:
            f.write(data[:-10])
        with pytest.raises(TruncatedFileError):
            load_operator(path)
