"""Closed-form and Fourier-series reference solutions for the four
convergence experiments on the unit interval and unit square (end time T = 1).

Smooth cases prescribe u = cos(pi t) sin(pi x) (times sin(pi y) in 2D) and
derive f = du/dt - lap u.  Non-smooth cases have f = 0 and the hat initial
datum u0(x) = 1 - 2|x - 1/2| (tensorized in 2D); the solution is the sine
series with coefficients 8 sin(n pi / 2) / (n pi)^2 and decay factor
exp(-n^2 pi^2 t), truncated at a configurable number of terms per coordinate.
The 2D series factorizes as a product of two 1D series, which is what the
evaluators exploit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

PI = np.pi
DEFAULT_FOURIER_TERMS = 100

PROBLEM_NAMES = ("smooth_1d", "nonsmooth_1d", "smooth_2d", "nonsmooth_2d")


def fourier_coefficient_1d(n: int) -> float:
    """Sine coefficient of the hat 1 - 2|x - 1/2|: 8 sin(n pi/2) / (n pi)^2."""
    if n < 1:
        raise ValueError("mode index must be >= 1")
    if n % 2 == 0:
        return 0.0
    sign = 1.0 if (n % 4) == 1 else -1.0
    return sign * 8.0 / (n * n * PI * PI)


def _hat(x: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.abs(x - 0.5)


class _SineSeries:
    """Vectorized evaluation of sum_n c_n sin(n pi x) exp(-n^2 pi^2 t) and its
    x/t derivatives on a times-by-points grid."""

    def __init__(self, n_terms: int):
        self.n = np.arange(1, n_terms + 1)
        self.c = np.array([fourier_coefficient_1d(int(k)) for k in self.n])
        self.rate = (self.n * PI) ** 2

    def _decay(self, ts):
        return np.exp(-np.outer(np.atleast_1d(ts), self.rate))  # (nt, N)

    def value(self, ts, xs):
        S = np.sin(np.outer(np.atleast_1d(xs), self.n * PI))  # (np, N)
        return self._decay(ts) @ (S * self.c).T

    def dx(self, ts, xs):
        C = np.cos(np.outer(np.atleast_1d(xs), self.n * PI)) * (self.n * PI)
        return self._decay(ts) @ (C * self.c).T

    def dxx(self, ts, xs):
        S = np.sin(np.outer(np.atleast_1d(xs), self.n * PI)) * self.rate
        return -self._decay(ts) @ (S * self.c).T

    def dt(self, ts, xs):
        S = np.sin(np.outer(np.atleast_1d(xs), self.n * PI))
        return -self._decay(ts) @ (S * self.c * self.rate).T


@dataclass(frozen=True)
class ProblemData:
    """Pointwise evaluators for one experiment.

    Grid evaluators take times of shape (nt,) and points of shape (np, d) and
    return (nt, np) arrays (gradients: (nt, np, d)).  ``f`` is None when the
    heat source vanishes identically.
    """

    name: str
    dimension: int
    domain: str
    fourier_terms: int
    u0: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray, np.ndarray], np.ndarray] | None
    u_grid: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad_u_grid: Callable[[np.ndarray, np.ndarray], np.ndarray]
    dt_u_grid: Callable[[np.ndarray, np.ndarray], np.ndarray]
    lap_u_grid: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def u_at(self, t: float, points: np.ndarray) -> np.ndarray:
        """Time-slice evaluation; at t = 0 the initial datum is used directly
        (the series converges only in L2 there)."""
        if t == 0.0:
            return self.u0(points)
        return self.u_grid(np.array([t]), points)[0]


def _smooth_1d(_: int) -> ProblemData:
    def u(ts, xs):
        return np.outer(np.cos(PI * ts), np.sin(PI * xs[:, 0]))

    def grad(ts, xs):
        return (PI * np.outer(np.cos(PI * ts), np.cos(PI * xs[:, 0])))[:, :, None]

    def dt(ts, xs):
        return -PI * np.outer(np.sin(PI * ts), np.sin(PI * xs[:, 0]))

    def lap(ts, xs):
        return -PI * PI * u(ts, xs)

    def f(ts, xs):
        return np.outer(-PI * np.sin(PI * ts) + PI * PI * np.cos(PI * ts),
                        np.sin(PI * xs[:, 0]))

    return ProblemData("smooth_1d", 1, "unit_interval", 0,
                       u0=lambda xs: np.sin(PI * xs[:, 0]),
                       f=f, u_grid=u, grad_u_grid=grad, dt_u_grid=dt, lap_u_grid=lap)


def _smooth_2d(_: int) -> ProblemData:
    def shape(xs):
        return np.sin(PI * xs[:, 0]) * np.sin(PI * xs[:, 1])

    def u(ts, xs):
        return np.outer(np.cos(PI * ts), shape(xs))

    def grad(ts, xs):
        gx = np.cos(PI * xs[:, 0]) * np.sin(PI * xs[:, 1])
        gy = np.sin(PI * xs[:, 0]) * np.cos(PI * xs[:, 1])
        g = PI * np.stack([gx, gy], axis=-1)
        return np.cos(PI * np.atleast_1d(ts))[:, None, None] * g[None, :, :]

    def dt(ts, xs):
        return -PI * np.outer(np.sin(PI * ts), shape(xs))

    def lap(ts, xs):
        return -2.0 * PI * PI * u(ts, xs)

    def f(ts, xs):
        return np.outer(-PI * np.sin(PI * ts) + 2.0 * PI * PI * np.cos(PI * ts), shape(xs))

    return ProblemData("smooth_2d", 2, "unit_square", 0,
                       u0=shape, f=f, u_grid=u, grad_u_grid=grad, dt_u_grid=dt,
                       lap_u_grid=lap)


def _nonsmooth_1d(n_terms: int) -> ProblemData:
    series = _SineSeries(n_terms)

    def u(ts, xs):
        return series.value(ts, xs[:, 0])

    def grad(ts, xs):
        return series.dx(ts, xs[:, 0])[:, :, None]

    return ProblemData("nonsmooth_1d", 1, "unit_interval", n_terms,
                       u0=lambda xs: _hat(xs[:, 0]),
                       f=None, u_grid=u, grad_u_grid=grad,
                       dt_u_grid=lambda ts, xs: series.dt(ts, xs[:, 0]),
                       lap_u_grid=lambda ts, xs: series.dxx(ts, xs[:, 0]))


def _nonsmooth_2d(n_terms: int) -> ProblemData:
    series = _SineSeries(n_terms)

    def parts(ts, xs):
        return (series.value(ts, xs[:, 0]), series.value(ts, xs[:, 1]))

    def u(ts, xs):
        g1, g2 = parts(ts, xs)
        return g1 * g2

    def grad(ts, xs):
        g1, g2 = parts(ts, xs)
        d1 = series.dx(ts, xs[:, 0])
        d2 = series.dx(ts, xs[:, 1])
        return np.stack([d1 * g2, g1 * d2], axis=-1)

    def dt(ts, xs):
        g1, g2 = parts(ts, xs)
        return series.dt(ts, xs[:, 0]) * g2 + g1 * series.dt(ts, xs[:, 1])

    def lap(ts, xs):
        g1, g2 = parts(ts, xs)
        return series.dxx(ts, xs[:, 0]) * g2 + g1 * series.dxx(ts, xs[:, 1])

    return ProblemData("nonsmooth_2d", 2, "unit_square", n_terms,
                       u0=lambda xs: _hat(xs[:, 0]) * _hat(xs[:, 1]),
                       f=None, u_grid=u, grad_u_grid=grad, dt_u_grid=dt,
                       lap_u_grid=lap)


_FACTORIES = {
    "smooth_1d": _smooth_1d,
    "nonsmooth_1d": _nonsmooth_1d,
    "smooth_2d": _smooth_2d,
    "nonsmooth_2d": _nonsmooth_2d,
}


def make_problem(name: str, fourier_terms: int = DEFAULT_FOURIER_TERMS) -> ProblemData:
    if name not in _FACTORIES:
        raise ValueError(f"unknown problem {name!r}; choose from {PROBLEM_NAMES}")
    return _FACTORIES[name](fourier_terms)
