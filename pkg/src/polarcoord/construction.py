"""Good/bad index sets, the nested partition F1/F2/F3, and coordination codes.

Indices are 1-based throughout. For the joint channel V -> (X, Y) and its
marginal V -> X:

    F1 = bad(W_YX|V)                     frozen bits
    F2 = good(W_YX|V) & bad(W_X|V)       common randomness
    F3 = good(W_YX|V) & good(W_X|V)      message

Degradation of W_X|V with respect to W_YX|V makes good(W_X|V) a subset of
good(W_YX|V) when capacities are exact. Quantized capacities can break this,
so the partition forces the nesting by default and records that it did.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channels import ChannelSpec, bsc_crossover, capacity, joint_channel
from .errors import ChannelError, ConfigError, NestingViolation
from .polar import PolarParams, check_block_length
from .synthesis import QuantizationBudget, synthesize, synthesize_exact

MODES = ("threshold", "rate-target")
AUTO_EXACT_LIMIT = 1 << 20


def threshold(n: int, beta: float) -> float:
    """Capacity threshold 2^(-n^beta)."""
    return 2.0 ** (-(n ** beta))


@dataclass(frozen=True)
class ConstructionParams:
    """How good sets are chosen.

    In "threshold" mode an index is good when its capacity lower bound is at
    least 2^(-n^beta). In "rate-target" mode the round(n * rate) indices with
    the largest lower bounds are good; ``rate_yx`` / ``rate_x`` default to
    the capacities of the respective channels.
    """

    beta: float = 0.25
    mode: str = "threshold"
    frozen_values: Optional[tuple] = None
    rate_yx: Optional[float] = None
    rate_x: Optional[float] = None

    def __post_init__(self):
        if not 0.0 < self.beta < 0.5:
            raise ConfigError(f"beta must lie in (0, 0.5), got {self.beta}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        for r in (self.rate_yx, self.rate_x):
            if r is not None and not 0.0 <= r <= 1.0:
                raise ConfigError(f"target rate must lie in [0, 1], got {r}")
        if self.frozen_values is not None:
            vals = tuple(int(b) for b in self.frozen_values)
            if any(b not in (0, 1) for b in vals):
                raise ConfigError("frozen values must be bits")
            object.__setattr__(self, "frozen_values", vals)


def _sorted_set(indices) -> tuple:
    return tuple(sorted(int(i) for i in indices))


@dataclass(frozen=True)
class IndexPartition:
    n: int
    good_yx_v: tuple
    bad_yx_v: tuple
    good_x_v: tuple
    bad_x_v: tuple
    forced: bool = False

    def __post_init__(self):
        for name in ("good_yx_v", "bad_yx_v", "good_x_v", "bad_x_v"):
            object.__setattr__(self, name, _sorted_set(getattr(self, name)))
        full = set(range(1, self.n + 1))
        for good, bad in ((self.good_yx_v, self.bad_yx_v), (self.good_x_v, self.bad_x_v)):
            if set(good) & set(bad) or set(good) | set(bad) != full:
                raise ConfigError("good and bad sets must partition [1..n]")
        if not set(self.good_x_v) <= set(self.good_yx_v):
            raise NestingViolation("good set of W_X|V is not contained in that of W_YX|V")

    @property
    def f1(self) -> tuple:
        return self.bad_yx_v

    @property
    def f2(self) -> tuple:
        gx = set(self.good_x_v)
        return tuple(i for i in self.good_yx_v if i not in gx)

    @property
    def f3(self) -> tuple:
        return self.good_x_v

    def role(self, i: int) -> int:
        """1, 2 or 3 according to which of F1/F2/F3 holds index i."""
        if i in set(self.good_x_v):
            return 3
        return 2 if i in set(self.good_yx_v) else 1

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "good_yx_v": list(self.good_yx_v),
            "good_x_v": list(self.good_x_v),
            "f1": list(self.f1),
            "f2": list(self.f2),
            "f3": list(self.f3),
            "forced": self.forced,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "IndexPartition":
        n = int(doc["n"])
        gyx, gx = set(doc["good_yx_v"]), set(doc["good_x_v"])
        full = set(range(1, n + 1))
        return cls(n, gyx, full - gyx, gx, full - gx, bool(doc.get("forced", False)))


def _capacities(profile) -> np.ndarray:
    return np.array([b.capacity_lower for b in profile])


def select_good(profile, beta: float) -> tuple:
    """(good, bad) with good = {i : capacity_lower(i) >= 2^(-n^beta)}."""
    n = len(profile)
    check_block_length(n)
    t = threshold(n, beta)
    good = tuple(b.index for b in profile if b.capacity_lower >= t)
    bad = tuple(b.index for b in profile if b.capacity_lower < t)
    return good, bad


def select_best(profile, rate: float) -> tuple:
    """(good, bad) keeping the round(n * rate) indices with the largest lower bounds.

    Ties are broken towards the larger index, which tends to be the more
    reliable position under the natural-order transform.
    """
    n = len(profile)
    check_block_length(n)
    k = int(round(n * rate))
    caps = _capacities(profile)
    order = np.lexsort((-np.arange(n), -caps))
    good = set(int(j) + 1 for j in order[:k])
    return _sorted_set(good), _sorted_set(set(range(1, n + 1)) - good)


def build_partition(profile_yx, profile_x, beta: float = 0.25, strict: bool = False,
                    mode: str = "threshold", rate_yx: Optional[float] = None,
                    rate_x: Optional[float] = None) -> IndexPartition:
    """Form F1/F2/F3 from the two synthesized profiles.

    When the good set of W_X|V is not nested in that of W_YX|V, ``strict``
    raises NestingViolation; otherwise the former is intersected with the
    latter and ``forced`` is set on the result.
    """
    if len(profile_yx) != len(profile_x):
        raise ConfigError("profiles have different block lengths")
    n = len(profile_x)
    if mode == "threshold":
        gyx, _ = select_good(profile_yx, beta)
        gx, _ = select_good(profile_x, beta)
    elif mode == "rate-target":
        if rate_yx is None or rate_x is None:
            raise ConfigError("rate-target mode needs both target rates")
        gyx, _ = select_best(profile_yx, rate_yx)
        gx, _ = select_best(profile_x, rate_x)
    else:
        raise ConfigError(f"unknown construction mode {mode!r}")
    full = set(range(1, n + 1))
    gyx, gx = set(gyx), set(gx)
    forced = not gx <= gyx
    if forced:
        if strict:
            raise NestingViolation(f"indices {sorted(gx - gyx)} are good for W_X|V but bad for W_YX|V")
        gx &= gyx
    return IndexPartition(n, gyx, full - gyx, gx, full - gx, forced)


@dataclass(frozen=True, eq=False)
class CoordinationCode:
    params: PolarParams
    partition: IndexPartition
    frozen_values: tuple
    wx: ChannelSpec
    wy: ChannelSpec
    wyx: ChannelSpec
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.partition.n != self.params.n:
            raise ConfigError("partition length does not match block length")
        vals = tuple(int(b) for b in self.frozen_values)
        if len(vals) != len(self.partition.f1):
            raise ConfigError(f"need {len(self.partition.f1)} frozen values, got {len(vals)}")
        object.__setattr__(self, "frozen_values", vals)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def rate_r(self) -> float:
        return len(self.partition.f3) / self.n

    @property
    def rate_r0(self) -> float:
        return len(self.partition.f2) / self.n

    def with_frozen(self, values) -> "CoordinationCode":
        return CoordinationCode(self.params, self.partition, tuple(values), self.wx, self.wy,
                                self.wyx, dict(self.meta))

    def to_dict(self) -> dict:
        return {
            "m": self.params.m,
            "n": self.n,
            "partition": self.partition.to_dict(),
            "frozen_values": list(self.frozen_values),
            "rate_r": self.rate_r,
            "rate_r0": self.rate_r0,
            "wx_v": self.wx.to_dict(),
            "wy_v": self.wy.to_dict(),
            "meta": self.meta,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CoordinationCode":
        try:
            wx = ChannelSpec.from_dict(doc["wx_v"])
            wy = ChannelSpec.from_dict(doc["wy_v"])
            return cls(PolarParams(int(doc["m"])), IndexPartition.from_dict(doc["partition"]),
                       tuple(doc["frozen_values"]), wx, wy, joint_channel(wx, wy),
                       dict(doc.get("meta", {})))
        except KeyError as exc:
            raise ConfigError(f"code document missing key {exc}") from None


def save_code(path, code: CoordinationCode):
    with open(path, "w") as fh:
        json.dump(code.to_dict(), fh, indent=1, sort_keys=True)


def load_code(path) -> CoordinationCode:
    try:
        with open(path) as fh:
            return CoordinationCode.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read code file {path}: {exc}") from None


def auto_exact(ch: ChannelSpec, m: int) -> bool:
    """Whether |Y|^n * 2^n is small enough to skip quantization."""
    n = 1 << m
    return n * math.log2(max(ch.n_outputs, 1)) + n <= math.log2(AUTO_EXACT_LIMIT)


def synthesize_for(ch: ChannelSpec, m: int, budget: Optional[QuantizationBudget] = None,
                   exact: bool = False) -> list:
    """Synthesized profile: unquantized when requested or when the block is tiny."""
    if exact or budget is None or auto_exact(ch, m):
        return synthesize_exact(ch, m)
    return synthesize(ch, m, budget)


def check_conditions(wx: ChannelSpec, wy: ChannelSpec):
    """W_X|V must be a BSC and W_Y|V symmetric."""
    if bsc_crossover(wx) is None:
        raise ChannelError("W_X|V must be a binary symmetric channel")
    if not wy.is_symmetric:
        raise ChannelError("W_Y|V must be symmetric")


def build_code(params: PolarParams, wx: ChannelSpec, wy: ChannelSpec,
               construction: ConstructionParams = ConstructionParams(),
               budget: Optional[QuantizationBudget] = QuantizationBudget(),
               exact: bool = False, strict: bool = False) -> CoordinationCode:
    check_conditions(wx, wy)
    wyx = joint_channel(wx, wy)
    prof_yx = synthesize_for(wyx, params.m, budget, exact)
    prof_x = synthesize_for(wx, params.m, budget, exact)
    return code_from_profiles(params, wx, wy, prof_yx, prof_x, construction, strict, wyx=wyx)


def code_from_profiles(params: PolarParams, wx: ChannelSpec, wy: ChannelSpec, prof_yx, prof_x,
                       construction: ConstructionParams = ConstructionParams(),
                       strict: bool = False, wyx: Optional[ChannelSpec] = None) -> CoordinationCode:
    wyx = wyx if wyx is not None else joint_channel(wx, wy)
    rate_yx, rate_x = construction.rate_yx, construction.rate_x
    if construction.mode == "rate-target":
        rate_yx = capacity(wyx) if rate_yx is None else rate_yx
        rate_x = capacity(wx) if rate_x is None else rate_x
    part = build_partition(prof_yx, prof_x, construction.beta, strict, construction.mode,
                           rate_yx, rate_x)
    frozen = construction.frozen_values
    if frozen is None:
        frozen = (0,) * len(part.f1)
    meta = {"beta": construction.beta, "mode": construction.mode,
            "threshold": threshold(params.n, construction.beta)}
    return CoordinationCode(params, part, frozen, wx, wy, wyx, meta)
