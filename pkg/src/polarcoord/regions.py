"""Achievable (R, R0) regions for coordination with uniform binary X.

Curves are corner loci: for each parameter value the point
(r_min, sum_min) bounds R >= r_min and R + R0 >= sum_min, and the region is
the upward closure of all such corners.

Example 1 targets q_Y|X = BSC(p) followed by BEC(eps). With polar codes the
auxiliary V must make W_X|V = BSC(q), which forces
W_Y|V = BSC((p - q) / (1 - 2q)) followed by BEC(eps). The unconstrained
reference family erases V = BSC(p)(X) with probability nu.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .channels import ChannelSpec, cascade, capacity, joint_channel, make_bec, make_bsc
from .construction import check_conditions
from .errors import ConfigError
from .infotheory import binary_entropy, mutual_information

DEFAULT_POINTS = 201


class RatePoint(NamedTuple):
    r: float
    r0: float

    @property
    def total(self) -> float:
        return self.r + self.r0


@dataclass(frozen=True)
class RegionCurve:
    param: str
    grid: tuple
    r_min: tuple
    sum_min: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        if not (len(self.grid) == len(self.r_min) == len(self.sum_min)):
            raise ConfigError("curve columns have different lengths")
        if np.any(np.diff(g) <= 0):
            raise ConfigError(f"{self.param} grid must be strictly increasing")
        if not (np.all(np.isfinite(self.r_min)) and np.all(np.isfinite(self.sum_min))):
            raise ConfigError("curve has non-finite values")

    def rows(self) -> list:
        return list(zip(self.grid, self.r_min, self.sum_min))

    def r_at_sum(self, s: float) -> float:
        """Smallest r_min over corners with sum_min <= s (inf when none)."""
        ok = np.asarray(self.sum_min) <= s
        return float(np.min(np.asarray(self.r_min)[ok])) if ok.any() else float("inf")

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([self.param, "r_min", "sum_min"])
            for row in self.rows():
                w.writerow([repr(float(v)) for v in row])

    def sidecar(self) -> dict:
        return {"param": self.param, "points": len(self.grid),
                "columns": [self.param, "r_min", "sum_min"],
                "region": "upward closure of corners: R >= r_min and R + R0 >= sum_min",
                **self.meta}

    def write_sidecar(self, path):
        with open(path, "w") as fh:
            json.dump(self.sidecar(), fh, indent=1, sort_keys=True)


def default_grid(lo: float, hi: float, points: int = DEFAULT_POINTS) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    return np.linspace(lo, hi, points)


def _check_grid(grid, lo, hi, name):
    g = np.asarray(grid, dtype=float)
    if g.size == 0 or g.min() < lo - 1e-15 or g.max() > hi + 1e-15:
        raise ConfigError(f"{name} grid must lie in [{lo}, {hi}]")
    return np.clip(g, lo, hi)


def _inner_crossover(p: float, q: float) -> float:
    """p' with BSC(q) followed by BSC(p') equal to BSC(p)."""
    return (p - q) / (1.0 - 2.0 * q)


def polar_region_example1(p: float, eps: float, q_grid=None) -> RegionCurve:
    if not 0.0 <= p <= 0.5 or not 0.0 <= eps <= 1.0:
        raise ConfigError("need p in [0, 1/2] and eps in [0, 1]")
    hi = min(0.5, p)
    q = default_grid(0.0, hi) if q_grid is None else _check_grid(q_grid, 0.0, hi, "q")
    if np.any(q >= 0.5):
        raise ConfigError("q = 1/2 is a singular point of the boundary; exclude it")
    r = 1.0 - binary_entropy(q)
    s = (1.0 - eps) * (binary_entropy(p) - binary_entropy(np.clip(_inner_crossover(p, q), 0, 1))) + r
    return RegionCurve("q", tuple(q.tolist()), tuple(np.atleast_1d(r).tolist()),
                       tuple(np.atleast_1d(s).tolist()), {"p": p, "eps": eps, "family": "polar"})


def _third_term(eps, nu):
    nu = np.asarray(nu, dtype=float)
    out = np.zeros_like(nu)
    live = nu < 1.0
    a = (eps - nu[live]) / (1.0 - nu[live])
    out[live] = (1.0 - nu[live]) * binary_entropy(np.clip(a, 0.0, 1.0))
    return out


def reference_region_example1(p: float, eps: float, nu_grid=None) -> RegionCurve:
    """Reference corners with the sum bound h(eps) + (1-eps)h(p) + (1-nu)h((eps-nu)/(1-nu)) + (1-nu)(1-h(p)).

    This is the displayed four-term form. ``reference_sum_exact`` gives
    I(XY; V) for the same V; the two differ in the sign of the third term
    except at nu = eps.
    """
    if not 0.0 <= p <= 0.5 or not 0.0 <= eps <= 1.0:
        raise ConfigError("need p in [0, 1/2] and eps in [0, 1]")
    hi = min(1.0, eps)
    nu = default_grid(0.0, hi) if nu_grid is None else _check_grid(nu_grid, 0.0, hi, "nu")
    hp = float(binary_entropy(p))
    r = (1.0 - nu) * (1.0 - hp)
    s = float(binary_entropy(eps)) + (1.0 - eps) * hp + _third_term(eps, nu) + r
    return RegionCurve("nu", tuple(nu.tolist()), tuple(r.tolist()), tuple(s.tolist()),
                       {"p": p, "eps": eps, "family": "reference", "sum_form": "displayed"})


def reference_channels(p: float, eps: float, nu: float) -> tuple:
    """(W_X|V, W_Y|V) for V = BSC(p)(X) erased w.p. nu, Y = V erased further to total eps.

    V takes values (0, ?, 1); X is uniform so the reverse channels are used.
    """
    w_xv = np.array([[1 - p, p], [0.5, 0.5], [p, 1 - p]])       # rows v, cols x
    extra = 0.0 if nu >= 1.0 else (eps - nu) / (1.0 - nu)
    w_yv = np.array([[1 - extra, extra, 0.0], [0.0, 1.0, 0.0], [0.0, extra, 1 - extra]])
    q_v = np.array([(1 - nu) / 2, nu, (1 - nu) / 2])
    return q_v, w_xv, w_yv


def reference_sum_exact(p: float, eps: float, nu: float) -> tuple:
    """(I(X; V), I(XY; V)) computed from the joint law of the reference V."""
    if not 0.0 <= nu <= min(1.0, eps):
        raise ConfigError("nu must lie in [0, min(1, eps)]")
    q_v, w_xv, w_yv = reference_channels(p, eps, nu)
    rows_xy = np.einsum("vx,vy->vxy", w_xv, w_yv).reshape(3, -1)
    return float(mutual_information(q_v, w_xv)), float(mutual_information(q_v, rows_xy))


def reference_region_exact(p: float, eps: float, nu_grid=None) -> RegionCurve:
    hi = min(1.0, eps)
    nu = default_grid(0.0, hi) if nu_grid is None else _check_grid(nu_grid, 0.0, hi, "nu")
    pts = [reference_sum_exact(p, eps, v) for v in nu]
    return RegionCurve("nu", tuple(nu.tolist()), tuple(a for a, _ in pts), tuple(b for _, b in pts),
                       {"p": p, "eps": eps, "family": "reference", "sum_form": "exact"})


def reference_discrepancy(p: float, eps: float, nu_grid=None) -> dict:
    """Compare the displayed sum bound with exact I(XY; V) on a grid."""
    shown = reference_region_example1(p, eps, nu_grid)
    exact = reference_region_exact(p, eps, shown.grid)
    d_sum = np.asarray(shown.sum_min) - np.asarray(exact.sum_min)
    d_r = np.asarray(shown.r_min) - np.asarray(exact.r_min)
    k = int(np.argmax(np.abs(d_sum)))
    return {"max_abs_sum_gap": float(np.abs(d_sum[k])), "at_nu": float(shown.grid[k]),
            "max_abs_r_gap": float(np.max(np.abs(d_r))),
            "matches_with_negated_third_term": bool(np.allclose(
                np.asarray(shown.sum_min) - 2 * _third_term(eps, shown.grid),
                exact.sum_min, atol=1e-10))}


def polar_region_general(wx: ChannelSpec, wy: ChannelSpec) -> RatePoint:
    """Corner (C(W_X|V), C(W_YX|V) - C(W_X|V)) of the polar-achievable region."""
    check_conditions(wx, wy)
    cx = capacity(wx)
    return RatePoint(float(cx), float(capacity(joint_channel(wx, wy)) - cx))


def example1_channels(p: float, eps: float, q: float) -> tuple:
    """(W_X|V, W_Y|V) realising the example-1 target with W_X|V = BSC(q)."""
    return make_bsc(q), cascade(make_bsc(float(_inner_crossover(p, q))), make_bec(eps))


def polar_region_example2(eps: float) -> dict:
    """Target q_Y|X = BEC(eps): V = X is forced, so the region is {R >= 1, R0 >= 0}."""
    if not 0.0 <= eps <= 1.0:
        raise ConfigError("eps must lie in [0, 1]")
    corner = polar_region_general(make_bsc(0.0), make_bec(eps))
    return {"region": "R >= 1, R0 >= 0", "corner": RatePoint(1.0, 0.0),
            "corner_from_capacities": corner, "eps": eps}
