"""Quadrature rules on the unit interval and the reference triangle.

All rules are expressed on reference domains: the interval [0, 1] and the
triangle with vertices (0,0), (1,0), (0,1).  Weights sum to the reference
measure (1 and 1/2 respectively) and are all positive.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre


@dataclass(frozen=True)
class QuadratureRule:
    """Points (reference coordinates) and weights of a fixed rule.

    ``points`` has shape (n,) for interval rules and (n, 2) for triangle
    rules; ``degree`` is the guaranteed polynomial exactness.
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))

    @property
    def n_points(self) -> int:
        return len(self.weights)


@lru_cache(maxsize=None)
def gauss_interval(n_points: int) -> QuadratureRule:
    """Gauss-Legendre rule on [0, 1], exact for degree <= 2*n_points - 1."""
    if not 1 <= n_points <= 20:
        raise ValueError(f"interval rule needs 1 <= n_points <= 20, got {n_points}")
    x, w = roots_legendre(n_points)
    return QuadratureRule(points=(x + 1.0) / 2.0, weights=w / 2.0, degree=2 * n_points - 1)


def _orbit_center():
    return np.array([[1 / 3, 1 / 3, 1 / 3]])


def _orbit3(a: float) -> np.ndarray:
    b = 1.0 - 2.0 * a
    return np.array([[b, a, a], [a, b, a], [a, a, b]])


def _orbit6(a: float, b: float) -> np.ndarray:
    c = 1.0 - a - b
    return np.array(
        [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
    )


# Symmetric positive-weight rules, stored as (orbit kind, parameters, weight per
# point).  Weights are normalized so that each rule sums to 1 on the reference
# triangle (they get scaled by the area 1/2 on expansion).  Degrees 3 and 7 are
# intentionally absent: the classical 4- and 13-point rules of those degrees
# have a negative weight, so requests are promoted to the next degree.
_TRIANGLE_TABLES: dict[int, list[tuple[str, tuple[float, ...], float]]] = {
    1: [("c", (), 1.0)],
    2: [("3", (1 / 6,), 1 / 3)],
    4: [
        ("3", (0.445948490915965,), 0.223381589678011),
        ("3", (0.091576213509771,), 0.109951743655322),
    ],
    5: [
        ("c", (), 0.225),
        ("3", (0.470142064105115,), 0.132394152788506),
        ("3", (0.101286507323456,), 0.125939180544827),
    ],
    6: [
        ("3", (0.249286745170910,), 0.116786275726379),
        ("3", (0.063089014491502,), 0.050844906370207),
        ("6", (0.310352451033785, 0.053145049844816), 0.082851075618374),
    ],
    8: [
        ("c", (), 0.144315607677787),
        ("3", (0.459292588292723,), 0.095091634267285),
        ("3", (0.170569307751760,), 0.103217370534718),
        ("3", (0.050547228317031,), 0.032458497623198),
        ("6", (0.263112829634638, 0.008394777409958), 0.027230314174435),
    ],
    9: [
        ("c", (), 0.097135796282799),
        ("3", (0.489682519198738,), 0.031334700227139),
        ("3", (0.437089591492937,), 0.077827541004774),
        ("3", (0.188203535619033,), 0.079647738927210),
        ("3", (0.044729513394453,), 0.025577675658698),
        ("6", (0.221962989160766, 0.036838412054736), 0.043283539377289),
    ],
    10: [
        ("c", (), 0.090817990382754),
        ("3", (0.485577633383657,), 0.036725957756467),
        ("3", (0.109481575485037,), 0.045321059435528),
        ("6", (0.141707219414880, 0.307939838764121), 0.072757916845420),
        ("6", (0.025003534762686, 0.246672560639903), 0.028327242531057),
        ("6", (0.009540815400299, 0.066803251012200), 0.009421666963733),
    ],
}


@lru_cache(maxsize=None)
def triangle_rule(degree: int) -> QuadratureRule:
    """Symmetric rule on the reference triangle, exact to the given total degree."""
    if not 1 <= degree <= 10:
        raise ValueError(f"triangle rule supports degrees 1..10, got {degree}")
    table_degree = min(d for d in _TRIANGLE_TABLES if d >= degree)
    bary = []
    weights = []
    for kind, params, w in _TRIANGLE_TABLES[table_degree]:
        if kind == "c":
            orbit = _orbit_center()
        elif kind == "3":
            orbit = _orbit3(*params)
        else:
            orbit = _orbit6(*params)
        bary.append(orbit)
        weights.append(np.full(len(orbit), w))
    bary = np.vstack(bary)
    weights = np.concatenate(weights) * 0.5  # reference area
    points = bary[:, 1:]  # barycentric (l0, l1, l2) -> (x, y) = (l1, l2)
    return QuadratureRule(points=points, weights=weights, degree=table_degree)


def tensor_rule(time_rule: QuadratureRule, space_rule: QuadratureRule):
    """Product points/weights over a reference time x space cell.

    Returns (t_points, x_points, weights) with the time index varying slowest;
    ``x_points`` keeps the shape of the spatial rule's points.
    """
    nt, nx = time_rule.n_points, space_rule.n_points
    t = np.repeat(time_rule.points, nx)
    x = np.tile(space_rule.points, (nt,) + (1,) * (space_rule.points.ndim - 1))
    w = np.outer(time_rule.weights, space_rule.weights).ravel()
    return t, x, w
