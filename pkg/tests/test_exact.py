import numpy as np
import pytest

from stfosls.exact import (PI, _SineSeries, fourier_coefficient_1d, make_problem)
from stfosls.quadrature import gauss_interval


def hat(y):
    return 1.0 - 2.0 * np.abs(y - 0.5)


def coefficient_by_quadrature(n):
    """2 * int_0^1 hat(y) sin(n pi y) dy on composite panels fine enough for
    the oscillation, with a breakpoint at the kink."""
    rule = gauss_interval(20)
    panels = np.sort(np.append(np.linspace(0.0, 1.0, 2 * n + 2), 0.5))
    total = 0.0
    for a, b in zip(panels[:-1], panels[1:]):
        y = a + (b - a) * rule.points
        total += (b - a) * (rule.weights * hat(y) * np.sin(n * PI * y)).sum()
    return 2.0 * total


def test_even_coefficients_vanish():
    for n in (2, 4, 10, 40):
        assert fourier_coefficient_1d(n) == 0.0


def test_known_coefficients():
    assert fourier_coefficient_1d(1) == pytest.approx(8 / PI ** 2, abs=1e-15)
    assert fourier_coefficient_1d(1) == pytest.approx(0.81057, abs=1e-5)
    assert fourier_coefficient_1d(3) == pytest.approx(-8 / (9 * PI ** 2), abs=1e-15)


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13, 50])
def test_coefficients_match_quadrature_oracle(n):
    assert fourier_coefficient_1d(n) == pytest.approx(
        coefficient_by_quadrature(n), abs=1e-10)


def test_coefficient_rejects_nonpositive_index():
    with pytest.raises(ValueError):
        fourier_coefficient_1d(0)


@pytest.mark.parametrize("name,d", [("smooth_1d", 1), ("smooth_2d", 2)])
def test_smooth_residual_vanishes_pointwise(name, d):
    data = make_problem(name)
    rng = np.random.default_rng(0)
    ts = rng.uniform(0, 1, 1000)
    xs = rng.uniform(0, 1, (1000, d))
    # evaluate on matching (t_i, x_i) pairs via the diagonal of the grids
    dt = np.array([data.dt_u_grid(np.array([t]), x[None, :])[0, 0] for t, x in zip(ts, xs)])
    lap = np.array([data.lap_u_grid(np.array([t]), x[None, :])[0, 0] for t, x in zip(ts, xs)])
    f = np.array([data.f(np.array([t]), x[None, :])[0, 0] for t, x in zip(ts, xs)])
    assert np.abs(dt - lap - f).max() <= 1e-12


@pytest.mark.parametrize("name,d", [("nonsmooth_1d", 1), ("nonsmooth_2d", 2)])
def test_series_solves_heat_equation(name, d):
    # time-derivative and Laplacian series are coded independently (decay
    # factor vs. sine factor); with f = 0 the residual must cancel
    data = make_problem(name)
    rng = np.random.default_rng(1)
    ts = rng.uniform(0.01, 1, 200)
    xs = rng.uniform(0, 1, (200, d))
    dt = data.dt_u_grid(ts, xs)
    lap = data.lap_u_grid(ts, xs)
    assert np.abs(np.diag(dt) - np.diag(lap)).max() <= 1e-10


def test_series_derivatives_against_finite_differences():
    data = make_problem("nonsmooth_1d")
    t, x = 0.05, 0.37
    xs = np.array([[x]])
    eps = 1e-5
    u = lambda tt, xx: data.u_grid(np.array([tt]), np.array([[xx]]))[0, 0]
    dt_fd = (u(t + eps, x) - u(t - eps, x)) / (2 * eps)
    lap_fd = (u(t, x + eps) - 2 * u(t, x) + u(t, x - eps)) / eps ** 2
    assert data.dt_u_grid(np.array([t]), xs)[0, 0] == pytest.approx(dt_fd, rel=1e-4)
    assert data.lap_u_grid(np.array([t]), xs)[0, 0] == pytest.approx(lap_fd, rel=1e-4)
    grad_fd = (u(t, x + eps) - u(t, x - eps)) / (2 * eps)
    assert data.grad_u_grid(np.array([t]), xs)[0, 0, 0] == pytest.approx(grad_fd, rel=1e-6)


def test_truncation_is_stable():
    a = make_problem("nonsmooth_1d", fourier_terms=100)
    b = make_problem("nonsmooth_1d", fourier_terms=200)
    pt = np.array([[0.5]])
    t = np.array([0.1])
    assert abs(a.u_grid(t, pt)[0, 0] - b.u_grid(t, pt)[0, 0]) <= 1e-12


def test_smooth_point_values():
    d1 = make_problem("smooth_1d")
    assert d1.u_grid(np.array([0.0]), np.array([[0.5]]))[0, 0] == pytest.approx(1.0)
    d2 = make_problem("smooth_2d")
    assert d2.u_grid(np.array([1.0]), np.array([[0.5, 0.5]]))[0, 0] == pytest.approx(-1.0)


def test_initial_trace_bypasses_series():
    data = make_problem("nonsmooth_1d")
    xs = np.array([[0.25], [0.5], [0.75]])
    assert np.array_equal(data.u_at(0.0, xs), hat(xs[:, 0]))


def test_series_approaches_initial_datum_in_l2():
    data = make_problem("nonsmooth_1d")
    rule = gauss_interval(20)
    err_sq = 0.0
    for a, b in ((0.0, 0.5), (0.5, 1.0)):
        y = a + (b - a) * rule.points
        u_eps = data.u_grid(np.array([1e-4]), y[:, None])[0]
        err_sq += (b - a) * (rule.weights * (u_eps - hat(y)) ** 2).sum()
    assert np.sqrt(err_sq) <= 1e-2


def test_2d_series_factorizes_against_double_sum():
    # independent oracle: direct double sum over modes
    data = make_problem("nonsmooth_2d", fourier_terms=30)
    series = _SineSeries(30)
    t, x1, x2 = 0.03, 0.3, 0.7
    direct = 0.0
    for n1 in range(1, 31):
        for n2 in range(1, 31):
            c = fourier_coefficient_1d(n1) * fourier_coefficient_1d(n2)
            direct += (c * np.sin(n1 * PI * x1) * np.sin(n2 * PI * x2)
                       * np.exp(-(n1 ** 2 + n2 ** 2) * PI ** 2 * t))
    got = data.u_grid(np.array([t]), np.array([[x1, x2]]))[0, 0]
    assert got == pytest.approx(direct, abs=1e-13)


def test_unknown_problem_rejected():
    with pytest.raises(ValueError):
        make_problem("smooth_3d")
