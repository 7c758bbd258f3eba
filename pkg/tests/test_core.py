import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from resspec.core import (EstimationConfig, MultiSeries, WINDOWS, make_grid,
                          window_constants)
from resspec.errors import InvalidArgumentError

# exact rational values of the Parzen window integrals
PARZEN_ETA2 = 151 / 280
PARZEN_ETA4 = 122559 / 320320


def test_grid_endpoints_and_spacing():
    g = make_grid(64)
    assert g.size == 64
    assert g.frequencies[-1] == pytest.approx(np.pi, abs=1e-15)
    assert np.allclose(np.diff(g.frequencies), 2 * np.pi / 64)
    assert g.frequencies[0] > -np.pi


def test_grid_weights_sum_to_two_pi():
    g = make_grid(512)
    assert abs(g.weights.sum() - 2 * np.pi) < 1e-12


@pytest.mark.parametrize("N", [63, 62, 0, -64, 65])
def test_grid_rejects_bad_sizes(N):
    with pytest.raises(InvalidArgumentError):
        make_grid(N)


@given(st.integers(32, 600).map(lambda k: 2 * k))
def test_grid_reflection_maps_to_negated_frequency(N):
    g = make_grid(N)
    lam = g.frequencies
    back = lam[g.reflection]
    # pi maps to itself, everything else to -lam
    expected = np.where(np.isclose(lam, np.pi), np.pi, -lam)
    assert np.allclose(back, expected, atol=1e-12)


def test_window_constants_bartlett_closed_form():
    w = window_constants("bartlett")
    assert w.eta2 == pytest.approx(2 / 3, abs=1e-14)
    assert w.eta4 == pytest.approx(2 / 5, abs=1e-14)


def test_window_constants_parzen_frozen():
    w = window_constants("parzen")
    assert w.eta2 == pytest.approx(0.539285, abs=1e-6)
    assert abs(w.eta2 - PARZEN_ETA2) < 1e-10
    assert abs(w.eta4 - PARZEN_ETA4) < 1e-10


def test_window_constants_daniell():
    w = window_constants("daniell")
    assert w.eta2 == 1.0
    assert w.eta4 == pytest.approx(2 / 3)


@pytest.mark.parametrize("name", ["parzen", "bartlett"])
def test_window_constants_match_adaptive_quadrature(name):
    w = window_constants(name)
    for power, eta in ((2, w.eta2), (4, w.eta4)):
        val, _ = quad(lambda x: w.omega(x) ** power, -1, 1, points=[-0.5, 0, 0.5],
                      epsabs=1e-14, epsrel=1e-13)
        assert abs(val - eta) <= 1e-10 * eta


@pytest.mark.parametrize("name", WINDOWS)
def test_window_constants_stable_under_finer_riemann_sums(name):
    w = window_constants(name)
    span = 1.0 if name != "daniell" else 4000.0
    for m in (200_000, 2_000_000):
        x = np.linspace(-span, span, m + 1)
        dx = x[1] - x[0]
        e2 = np.sum(w.omega(x) ** 2) * dx
        e4 = np.sum(w.omega(x) ** 4) * dx
    tol = 1e-8 if name != "daniell" else 1e-4  # sinc^2 tail beyond the cut ~ 1/(pi^2 span)
    assert abs(e2 - w.eta2) < tol
    assert abs(e4 - w.eta4) < tol


@pytest.mark.parametrize("name", WINDOWS)
def test_window_shape(name):
    w = window_constants(name)
    x = np.linspace(-3, 3, 1201)
    v = w.omega(x)
    assert w.omega(0.0) == 1.0
    assert np.allclose(v, w.omega(-x))
    assert np.all(np.abs(v) <= 1 + 1e-15)
    if w.compact:
        assert np.all(w.omega(np.array([1.0, 1.5, -2.0])) == 0)
    assert w.eta2 > 0 and w.eta4 > 0


def test_unknown_window():
    with pytest.raises(InvalidArgumentError):
        window_constants("hann")


def test_multiseries_validation():
    data = np.zeros((10, 2))
    x = MultiSeries(data, n_raw=12, max_construction_lag=2)
    assert x.n_eff == 10 and x.K == 1 and x.labels == ("X0", "X1")
    with pytest.raises(InvalidArgumentError):
        MultiSeries(data, n_raw=10, max_construction_lag=2)
    with pytest.raises(InvalidArgumentError):
        MultiSeries(np.zeros((7, 2)), n_raw=7)
    bad = data.copy()
    bad[3, 1] = np.nan
    with pytest.raises(InvalidArgumentError):
        MultiSeries(bad, n_raw=10)


def test_multiseries_is_read_only():
    x = MultiSeries.from_columns(np.arange(10.0), np.ones(10))
    with pytest.raises(ValueError):
        x.data[0, 0] = 5.0


def test_config_validation():
    EstimationConfig()
    with pytest.raises(InvalidArgumentError):
        EstimationConfig(window="boxcar")
    with pytest.raises(InvalidArgumentError):
        EstimationConfig(bandwidth=1)
    with pytest.raises(InvalidArgumentError):
        EstimationConfig(grid_size=100 + 1)
