import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdbound.curvature import curvature, gamma
from cdbound.generators import generate_family
from cdbound.graph import laplacian_apply
from cdbound.heat import (
    cd_coefficient,
    decay_table,
    gradient_decay,
    heat_apply,
    semigroup_residual,
    spectral_decompose,
)
from cdbound.io import graph_from_edges

from conftest import single_edge, small_graphs
from oracles import dense_laplacian, heat_expm


class TestSpectral:
    def test_single_edge(self):
        D = spectral_decompose(single_edge())
        np.testing.assert_allclose(D.eigenvalues, [-2.0, 0.0], atol=1e-14)

    @pytest.mark.parametrize("N", [3, 5, 8])
    def test_complete(self, N):
        D = spectral_decompose(generate_family("complete", N))
        np.testing.assert_allclose(np.sort(D.eigenvalues), [-N] * (N - 1) + [0.0], atol=1e-12)

    def test_disconnected_has_two_zero_modes(self):
        G = graph_from_edges([("a", "b", 1.0), ("c", "d", 1.0)])
        assert spectral_decompose(G).zero_modes == 2

    @settings(max_examples=30, deadline=None)
    @given(small_graphs())
    def test_invariants(self, G):
        D = spectral_decompose(G)
        assert D.eigenvalues.max() <= 1e-10
        assert D.zero_modes == 1
        m = D.measure_root**2
        np.testing.assert_allclose(D.basis.T @ (m[:, None] * D.basis), np.eye(len(G)), atol=1e-10)
        L = dense_laplacian(G)
        assert np.abs(D.laplacian() - L).max() <= 1e-10 * np.abs(L).max()


class TestHeatApply:
    def test_constant_fixed(self):
        G = generate_family("cycle", 6)
        D = spectral_decompose(G)
        for t in (0.0, 0.3, 7.0):
            np.testing.assert_allclose(heat_apply(D, np.full(6, 1.5), t), 1.5, rtol=1e-13)

    @pytest.mark.parametrize("t", [0.0, 0.1, 1.0, 3.7])
    def test_single_edge_closed_form(self, t):
        D = spectral_decompose(single_edge())
        e = math.exp(-2 * t)
        np.testing.assert_allclose(heat_apply(D, [0.0, 1.0], t), [(1 - e) / 2, (1 + e) / 2], atol=1e-15)

    def test_negative_time(self):
        with pytest.raises(ValueError):
            heat_apply(spectral_decompose(single_edge()), [0, 1], -1.0)

    @settings(max_examples=30, deadline=None)
    @given(small_graphs(), st.floats(0, 5))
    def test_matches_expm(self, G, t):
        f = np.random.default_rng(1).standard_normal(len(G))
        np.testing.assert_allclose(heat_apply(spectral_decompose(G), f, t), heat_expm(G, f, t), atol=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(small_graphs(), st.floats(0, 5), st.floats(0, 5))
    def test_semigroup_law(self, G, s, t):
        D = spectral_decompose(G)
        f = np.random.default_rng(2).standard_normal(len(G))
        err = np.abs(heat_apply(D, heat_apply(D, f, t), s) - heat_apply(D, f, s + t)).max()
        assert err <= 1e-10 * np.abs(f).max()

    @settings(max_examples=30, deadline=None)
    @given(small_graphs(), st.floats(0, 20))
    def test_maximum_principle(self, G, t):
        f = np.random.default_rng(3).standard_normal(len(G))
        u = heat_apply(spectral_decompose(G), f, t)
        assert u.min() >= f.min() - 1e-12 and u.max() <= f.max() + 1e-12

    def test_derivative_identity(self, corpus):
        for G in corpus.values():
            D = spectral_decompose(G)
            f = np.random.default_rng(4).standard_normal(len(G))
            for t in (0.25, 1.0, 3.0):
                h = 1e-5 * max(1.0, t)
                fd = (heat_apply(D, f, t + h) - heat_apply(D, f, t - h)) / (2 * h)
                lap = laplacian_apply(G, heat_apply(D, f, t))
                assert np.abs(fd - lap).max() <= 1e-8 * (1 + np.abs(lap).max())

    def test_derivative_second_order(self):
        G = generate_family("hypercube", 3, "degree")
        D = spectral_decompose(G)
        f = np.random.default_rng(6).standard_normal(8)
        t = 0.7
        lap = laplacian_apply(G, heat_apply(D, f, t))
        hs = np.array([0.2, 0.1, 0.05, 0.025])
        errs = [np.abs((heat_apply(D, f, t + h) - heat_apply(D, f, t - h)) / (2 * h) - lap).max() for h in hs]
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert slope >= 1.9


class TestResidual:
    def test_zero_at_t0(self):
        G = generate_family("hypercube", 3)
        D = spectral_decompose(G)
        f = np.random.default_rng(0).standard_normal(8)
        assert np.all(semigroup_residual(G, D, f, 0.0, 2.0, 4.0) == 0.0)

    def test_single_edge_cd_holds(self, rng):
        G = single_edge()
        D = spectral_decompose(G)
        for _ in range(20):
            f = rng.standard_normal(2)
            for t in np.arange(0.1, 5.01, 0.1):
                assert semigroup_residual(G, D, f, t, 1.0, 2).min() >= -1e-10

    def test_single_edge_violation_found(self, rng):
        # K(x, 2) = 1 on the edge, so K = 2.5 must fail somewhere
        G = single_edge()
        D = spectral_decompose(G)
        worst = min(
            semigroup_residual(G, D, rng.standard_normal(2), t, 2.5, 2).min()
            for _ in range(10)
            for t in np.arange(0.1, 5.01, 0.1)
        )
        assert worst < -1e-3

    def test_coefficient_limits(self):
        assert cd_coefficient(0.0, 4.0, 2.0) == 1.0
        assert cd_coefficient(1e-13, 4.0, 2.0) == 1.0
        assert cd_coefficient(1e-6, 4.0, 2.0) == pytest.approx(1.0, rel=1e-5)
        assert cd_coefficient(3.0, math.inf, 2.0) == 0.0
        assert cd_coefficient(-1.0, 2.0, 1.0) == pytest.approx((1 - math.exp(2)) / -2.0)


class TestDecay:
    def test_constant(self):
        G = generate_family("cycle", 5)
        D = spectral_decompose(G)
        np.testing.assert_allclose(gradient_decay(G, D, np.ones(5), [0, 1, 2]), 0.0, atol=1e-28)

    def test_single_edge_closed_form(self):
        G = single_edge()
        ts = np.linspace(0, 3, 13)
        sup = gradient_decay(G, spectral_decompose(G), [0.0, 1.0], ts)
        np.testing.assert_allclose(sup, 0.5 * np.exp(-4 * ts), rtol=1e-12, atol=1e-16)
        np.testing.assert_array_less(sup / np.exp(-2 * ts), 0.5 + 1e-12)

    def test_unsorted_rejected(self):
        G = single_edge()
        with pytest.raises(ValueError):
            gradient_decay(G, spectral_decompose(G), [0, 1], [1.0, 0.5])

    def test_hypercube(self):
        G = generate_family("hypercube", 3)
        K = curvature(G, math.inf).global_k
        f = np.random.default_rng(8).standard_normal(8)
        ts = np.linspace(0, 5, 51)
        rows = decay_table(G, spectral_decompose(G), f, ts, K)
        sup = np.array([r[1] for r in rows])
        bound = np.array([r[2] for r in rows])
        assert np.all(np.diff(sup) <= 1e-14)
        assert np.all(sup <= bound * (1 + 1e-10) + 1e-15)
        assert sup[0] == pytest.approx(gamma(G, f).max())
