"""
Tests for core.exact module.
"""

import numpy as np
import pytest

from core.exact import atom, band_operator, forward_exact, forward_exact_batch, inverse_exact
from core.exceptions import DimensionMismatchError, FrameFailureError, IndexOutOfRangeError
from core.graph import laplacian
from core.kernels import FilterBank, ScalingKernel, frame_bounds, make_filter_bank, make_spline_kernel
from core.spectral import eig_decompose, fractional_basis
from tests.conftest import operator_and_bank


@pytest.fixture(params=[1.0, 0.5])
def setup(request, small_graph):
    return operator_and_bank(small_graph, request.param)


class TestForwardExact:
    """Tests for forward_exact."""

    def test_shape_and_metadata(self, setup, rng):
        op, bank = setup
        pyramid = forward_exact(rng.standard_normal(op.n), op, bank)
        assert pyramid.bands.shape == (bank.J + 1, op.n)
        assert pyramid.J == bank.J
        assert pyramid.theta == op.theta
        assert pyramid.scales == bank.scales

    def test_theta_one_is_ordinary_wavelet_transform(self, small_graph, rng):
        """At theta = 1 band j is chi diag(g(t_j lam)) chi^T f."""
        dec = eig_decompose(laplacian(small_graph))
        op = fractional_basis(dec, 1.0)
        bank = make_filter_bank(op.r_max_bound)
        f = rng.standard_normal(op.n)
        pyramid = forward_exact(f, op, bank)
        for j, t in enumerate(bank.scales, start=1):
            expected = dec.chi @ (bank.g(t * dec.lam) * (dec.chi.T @ f))
            np.testing.assert_allclose(pyramid.bands[j], expected, atol=1e-10)
        np.testing.assert_allclose(pyramid.bands[0], dec.chi @ (bank.h(dec.lam) * (dec.chi.T @ f)), atol=1e-10)

    def test_zero_signal(self, setup):
        op, bank = setup
        pyramid = forward_exact(np.zeros(op.n), op, bank)
        assert not np.any(pyramid.bands)

    def test_linear(self, setup, rng):
        op, bank = setup
        f, h = rng.standard_normal(op.n), rng.standard_normal(op.n)
        combined = forward_exact(2.0 * f - 3.0 * h, op, bank).bands
        separate = 2.0 * forward_exact(f, op, bank).bands - 3.0 * forward_exact(h, op, bank).bands
        np.testing.assert_allclose(combined, separate, atol=1e-10)

    def test_frame_inequality(self, setup, rng):
        op, bank = setup
        A, B = frame_bounds(bank, 2000)
        f = rng.standard_normal(op.n)
        energy = np.sum(np.abs(forward_exact(f, op, bank).bands) ** 2)
        norm_sq = f @ f
        lower = float(bank.frame_function(op.r).min())
        assert lower * norm_sq * (1 - 1e-10) <= energy
        assert energy <= max(B, float(bank.frame_function(op.r).max())) * norm_sq * (1 + 1e-10)
        assert A > 0

    def test_length_mismatch(self, setup):
        op, bank = setup
        with pytest.raises(DimensionMismatchError):
            forward_exact(np.zeros(op.n + 1), op, bank)

    def test_frame_failure(self, small_graph, rng):
        op, _ = operator_and_bank(small_graph, 1.0)
        bank = FilterBank(
            g=make_spline_kernel(),
            h=ScalingKernel(rho=0.0, lambda_min=1.0),
            scales=(1.0,),
            r_max=op.r_max_bound,
            K=20.0,
        )
        with pytest.raises(FrameFailureError):
            forward_exact(rng.standard_normal(op.n), op, bank)

    def test_batch_matches_single(self, setup, rng):
        op, bank = setup
        signals = rng.standard_normal((3, op.n))
        batch = forward_exact_batch(signals, op, bank)
        for s in range(3):
            np.testing.assert_allclose(batch[s], forward_exact(signals[s], op, bank).bands, atol=1e-10)

    def test_band_operator(self, setup, rng):
        op, bank = setup
        f = rng.standard_normal(op.n)
        np.testing.assert_allclose(band_operator(op, bank, 2) @ f, forward_exact(f, op, bank).bands[2], atol=1e-10)


class TestAtom:
    """Tests for atom."""

    def test_atom_is_transform_of_delta(self, setup):
        op, bank = setup
        delta = np.zeros(op.n)
        delta[7] = 1.0
        bands = forward_exact(delta, op, bank).bands
        for band in range(bank.J + 1):
            np.testing.assert_allclose(atom(op, bank, band, 7), bands[band], atol=1e-12)

    def test_coefficients_are_inner_products_with_atoms(self, setup, rng):
        op, bank = setup
        f = rng.standard_normal(op.n)
        pyramid = forward_exact(f, op, bank)
        for vertex in (0, 11):
            psi = atom(op, bank, 3, vertex)
            assert np.vdot(psi, f) == pytest.approx(pyramid.bands[3][vertex], abs=1e-10)

    def test_band_out_of_range(self, setup):
        op, bank = setup
        with pytest.raises(IndexOutOfRangeError):
            atom(op, bank, bank.J + 1, 0)

    def test_vertex_out_of_range(self, setup):
        op, bank = setup
        with pytest.raises(IndexOutOfRangeError):
            atom(op, bank, 0, op.n)


class TestInverseExact:
    """Tests for inverse_exact."""

    def test_round_trip(self, setup, rng):
        op, bank = setup
        f = rng.standard_normal(op.n)
        np.testing.assert_allclose(inverse_exact(forward_exact(f, op, bank), op, bank), f, atol=1e-9)

    def test_zero_pyramid(self, setup):
        op, bank = setup
        pyramid = forward_exact(np.zeros(op.n), op, bank)
        assert not np.any(inverse_exact(pyramid, op, bank))

    def test_band_count_mismatch(self, setup, small_graph, rng):
        op, bank = setup
        pyramid = forward_exact(rng.standard_normal(op.n), op, bank)
        other = make_filter_bank(op.r_max_bound, J=bank.J + 1)
        with pytest.raises(DimensionMismatchError):
            inverse_exact(pyramid, op, other)
