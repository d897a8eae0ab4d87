"""Polar coset codes for channel resolvability.

Uniform bits go on the good indices, fixed bits on the bad ones. The block
u G_n is sent through the channel, and the output should look like n
independent draws from q_Y, the output law of a uniform input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .channels import ChannelSpec, sample_outputs
from .construction import select_good, synthesize_for
from .errors import ConfigError
from .polar import PolarParams, encode_transform
from .synthesis import QuantizationBudget

PINSKER = 2.0 * math.log(2.0)


@dataclass(frozen=True, eq=False)
class ResolvabilityCode:
    params: PolarParams
    good: tuple
    frozen: tuple
    channel: ChannelSpec

    def __post_init__(self):
        n = self.params.n
        good = tuple(sorted(int(i) for i in self.good))
        if len(set(good)) != len(good) or any(not 1 <= i <= n for i in good):
            raise ConfigError("good set must hold distinct indices in [1..n]")
        frozen = tuple(int(b) for b in self.frozen)
        if len(frozen) != n - len(good):
            raise ConfigError(f"need {n - len(good)} frozen bits, got {len(frozen)}")
        object.__setattr__(self, "good", good)
        object.__setattr__(self, "frozen", frozen)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def bad(self) -> tuple:
        g = set(self.good)
        return tuple(i for i in range(1, self.n + 1) if i not in g)

    @property
    def rate(self) -> float:
        return len(self.good) / self.n

    def target(self) -> np.ndarray:
        """Single-letter target q_Y."""
        return self.channel.output_dist()

    def with_frozen(self, values) -> "ResolvabilityCode":
        return ResolvabilityCode(self.params, self.good, tuple(values), self.channel)

    def to_dict(self) -> dict:
        return {"m": self.params.m, "n": self.n, "good": list(self.good),
                "frozen": list(self.frozen), "channel": self.channel.to_dict()}


def build_resolvability_code(ch: ChannelSpec, m: int, beta: float = 0.25,
                             budget: Optional[QuantizationBudget] = QuantizationBudget(),
                             exact: bool = False, frozen=None) -> tuple:
    """(code, profile) with good = indices whose capacity clears 2^(-n^beta)."""
    profile = synthesize_for(ch, m, budget, exact)
    good, bad = select_good(profile, beta)
    frozen = (0,) * len(bad) if frozen is None else tuple(frozen)
    return ResolvabilityCode(PolarParams(m), good, frozen, ch), profile


class ResolveSample(NamedTuple):
    u: np.ndarray
    x: np.ndarray
    y: np.ndarray      # output indices into channel.outputs


def resolve_encode_batch(code: ResolvabilityCode, trials: int, rng: np.random.Generator) -> ResolveSample:
    """``trials`` independent blocks, each row one (u, x, y)."""
    n = code.n
    u = np.zeros((trials, n), dtype=np.uint8)
    good = np.asarray(code.good, dtype=np.int64) - 1
    bad = np.asarray(code.bad, dtype=np.int64) - 1
    u[:, good] = rng.integers(0, 2, size=(trials, good.size), dtype=np.uint8)
    u[:, bad] = np.asarray(code.frozen, dtype=np.uint8)
    x = encode_transform(u)
    return ResolveSample(u, x, sample_outputs(code.channel, x, rng))


def resolve_encode(code: ResolvabilityCode, rng: np.random.Generator) -> ResolveSample:
    s = resolve_encode_batch(code, 1, rng)
    return ResolveSample(s.u[0], s.x[0], s.y[0])


def resolvability_bound(profile, good) -> tuple:
    """(KL bound in bits, L1 bound): sum of capacity upper bounds over the bad set, then Pinsker."""
    g = set(int(i) for i in good)
    kl = float(sum(b.capacity_upper for b in profile if b.index not in g))
    return kl, math.sqrt(PINSKER * kl)


def sequence_counts(code: ResolvabilityCode, y: np.ndarray) -> np.ndarray:
    """Histogram of output blocks, indexed like the oracle's lexicographic tables."""
    k = code.channel.n_outputs
    weights = k ** np.arange(code.n - 1, -1, -1, dtype=np.int64)
    return np.bincount(y.astype(np.int64) @ weights, minlength=k ** code.n)


def per_symbol_tv(code: ResolvabilityCode, y: np.ndarray) -> float:
    """Largest L1 gap between an empirical position marginal and q_Y."""
    k = code.channel.n_outputs
    q = code.target()
    worst = 0.0
    for j in range(code.n):
        emp = np.bincount(y[:, j], minlength=k) / y.shape[0]
        worst = max(worst, float(np.abs(emp - q).sum()))
    return worst
