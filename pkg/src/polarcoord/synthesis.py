"""Bit-channel capacities of the polar transform.

Symmetric binary-input channels are handled in likelihood-ratio profile form:
each conjugate output pair {y, perm(y)} becomes one entry (mass, delta) with
mass = W(y|0) + W(y|1) and delta = max(W(y|0), W(y|1)) / mass in [1/2, 1].
Capacity is sum(mass * (1 - h(delta))). The one-step transforms W -> W^-,
W -> W^+ act on these profiles in closed form.

Lower bounds come from degrading merges (two adjacent entries replaced by
their mass-weighted average), upper bounds from upgrading splits (a middle
entry pushed onto its two neighbours' deltas). When a profile never exceeds
the budget no quantization happens and both bounds are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .channels import ChannelSpec, capacity
from .errors import CapExceeded, ChannelError, ConfigError
from .infotheory import binary_entropy
from ._greedy import greedy_degrade, greedy_upgrade
from .polar import encode_transform, sc_likelihood_batch

TIE_TOL = 1e-13
MASS_FLOOR = 1e-300
PROFILE_CAP = 1 << 24


@dataclass(frozen=True)
class SynthesizedBitChannel:
    index: int
    capacity_lower: float
    capacity_upper: float
    bhattacharyya: Optional[float] = None

    def __post_init__(self):
        if not -1e-12 <= self.capacity_lower <= self.capacity_upper + 1e-12 <= 1 + 2e-12:
            raise ValueError(f"inconsistent capacity bounds for index {self.index}: "
                             f"[{self.capacity_lower}, {self.capacity_upper}]")


@dataclass(frozen=True)
class QuantizationBudget:
    """Maximum output-alphabet size kept per synthesized channel.

    ``mu=None`` disables quantization (exact, alphabet grows with n), and
    both bounds then equal the exact capacity. With a finite ``mu``,
    ``upgrade=False`` skips the upper-bound pass and capacity_upper is 1.
    """

    mu: Optional[int] = 64
    upgrade: bool = True

    def __post_init__(self):
        if self.mu is not None and (self.mu < 2 or self.mu % 2):
            raise ConfigError(f"mu must be an even integer >= 2, got {self.mu}")

    @property
    def max_pairs(self) -> float:
        return math.inf if self.mu is None else self.mu // 2


EXACT = QuantizationBudget(mu=None)


class Profile(NamedTuple):
    mass: np.ndarray
    delta: np.ndarray

    def capacity(self) -> float:
        return float(np.sum(self.mass * (1.0 - binary_entropy(self.delta))))

    def bhattacharyya(self) -> float:
        return float(np.sum(2.0 * self.mass * np.sqrt(self.delta * (1.0 - self.delta))))


def channel_profile(ch: ChannelSpec) -> Profile:
    """LR profile of a symmetric channel, built from its symmetry permutation."""
    if not ch.is_symmetric:
        raise ChannelError("LR profile requires a symmetric channel")
    w0, w1 = ch.transition
    mass, delta = [], []
    for y, py in enumerate(ch.perm):
        if py < y:
            continue
        if py == y:
            m = w0[y]
            mass.append(m)
            delta.append(0.5)
        else:
            m = w0[y] + w1[y]
            mass.append(m)
            delta.append(max(w0[y], w1[y]) / m if m > 0 else 0.5)
    return _canonical(np.array(mass), np.array(delta))


def _canonical(mass: np.ndarray, delta: np.ndarray) -> Profile:
    delta = np.where(delta < 0.5, 1.0 - delta, delta)
    keep = mass > MASS_FLOOR
    mass, delta = mass[keep], np.clip(delta[keep], 0.5, 1.0)
    order = np.argsort(delta, kind="stable")
    mass, delta = mass[order], delta[order]
    if mass.size > 1:
        start = np.concatenate([[True], np.diff(delta) > TIE_TOL])
        if not start.all():
            group = np.cumsum(start) - 1
            msum = np.bincount(group, weights=mass)
            delta = np.bincount(group, weights=mass * delta) / msum
            mass = msum
    return Profile(mass, delta)


def _check_size(p: Profile):
    if 2 * p.mass.size ** 2 > PROFILE_CAP:
        raise CapExceeded(f"profile with {p.mass.size} entries is too large to transform exactly; "
                          "use a finite quantization budget")


def transform_minus(p: Profile) -> Profile:
    _check_size(p)
    mi, mj = np.meshgrid(p.mass, p.mass, indexing="ij")
    di, dj = np.meshgrid(p.delta, p.delta, indexing="ij")
    return _canonical((mi * mj).ravel(), (di * dj + (1 - di) * (1 - dj)).ravel())


def transform_plus(p: Profile) -> Profile:
    _check_size(p)
    mi, mj = np.meshgrid(p.mass, p.mass, indexing="ij")
    di, dj = np.meshgrid(p.delta, p.delta, indexing="ij")
    same = di * dj + (1 - di) * (1 - dj)
    cross = di * (1 - dj) + (1 - di) * dj
    with np.errstate(divide="ignore", invalid="ignore"):
        d_same = np.where(same > 0, di * dj / np.where(same > 0, same, 1), 0.5)
        d_cross = np.where(cross > 0, di * (1 - dj) / np.where(cross > 0, cross, 1), 0.5)
    mass = np.concatenate([(mi * mj * same).ravel(), (mi * mj * cross).ravel()])
    delta = np.concatenate([d_same.ravel(), d_cross.ravel()])
    return _canonical(mass, delta)


def degrade(p: Profile, max_pairs) -> Profile:
    """Greedily merge the adjacent pair with the least capacity loss until at most ``max_pairs`` remain."""
    if p.mass.size <= max_pairs:
        return p
    mass, delta = greedy_degrade(p.mass, p.delta, int(max_pairs))
    return Profile(mass, np.clip(delta, 0.5, 1.0))


def upgrade(p: Profile, max_pairs) -> Profile:
    """Greedily split middle entries onto their neighbours' deltas until at most ``max_pairs`` remain.

    Splitting (m, d) into parts at the neighbouring deltas d_lo < d < d_hi,
    keeping the mean delta, is an upgrade: merging the two parts back yields
    the original entry. The two extreme entries are never removed.
    """
    if p.mass.size <= max_pairs:
        return p
    mass, delta = greedy_upgrade(p.mass, p.delta, max(int(max_pairs), 2))
    return Profile(mass, delta)


def _polarize(base: Profile, m: int, shrink) -> list:
    """Profiles of all 2^m bit channels; list position k is index k+1."""
    level = [shrink(base)]
    for _ in range(m):
        level = [shrink(f(p)) for p in level for f in (transform_minus, transform_plus)]
    return level


def synthesize_bec(eps: float, m: int) -> list:
    """Exact bit channels of BEC(eps) via the erasure recursion z- = 2z - z^2, z+ = z^2."""
    if not 0.0 <= eps <= 1.0:
        raise ChannelError(f"erasure probability must be in [0, 1], got {eps}")
    z = np.array([eps])
    for _ in range(m):
        z = np.stack([2 * z - z * z, z * z], axis=1).ravel()
    return [SynthesizedBitChannel(k + 1, 1.0 - zk, 1.0 - zk, zk) for k, zk in enumerate(z)]


def synthesize_general(ch: ChannelSpec, m: int, budget: QuantizationBudget = QuantizationBudget()) -> list:
    """Capacity brackets for every bit channel of a symmetric channel."""
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    base = channel_profile(ch)
    kmax = budget.max_pairs
    lower = _polarize(base, m, lambda p: degrade(p, kmax))
    if math.isinf(kmax):
        upper = lower
    elif budget.upgrade:
        upper = _polarize(base, m, lambda p: upgrade(p, kmax))
    else:
        upper = [None] * len(lower)
    out = []
    for k, (lo, up) in enumerate(zip(lower, upper)):
        c_lo = min(max(lo.capacity(), 0.0), 1.0)
        c_up = 1.0 if up is None else min(max(up.capacity(), c_lo), 1.0)
        out.append(SynthesizedBitChannel(k + 1, c_lo, c_up, lo.bhattacharyya()))
    return out


def synthesize_exact(ch: ChannelSpec, m: int) -> list:
    """Unquantized synthesis; lower and upper bounds coincide."""
    return synthesize_general(ch, m, EXACT)


def synthesize(ch: ChannelSpec, m: int, budget: QuantizationBudget = QuantizationBudget()) -> list:
    """Dispatch to the exact erasure recursion for BECs, the profile machinery otherwise."""
    eps = _bec_erasure(ch)
    if eps is not None:
        return synthesize_bec(eps, m)
    return synthesize_general(ch, m, budget)


def _bec_erasure(ch: ChannelSpec) -> Optional[float]:
    w = ch.transition
    if ch.n_outputs != 3 or ch.perm != (2, 1, 0):
        return None
    if w[0, 2] != 0 or w[1, 0] != 0:
        return None
    return float(w[0, 1])


def lower_capacities(profile) -> np.ndarray:
    return np.array([b.capacity_lower for b in profile])


def upper_capacities(profile) -> np.ndarray:
    return np.array([b.capacity_upper for b in profile])


class Estimate(NamedTuple):
    value: float
    stderr: float


def mc_bit_channel_estimate(ch: ChannelSpec, m: int, index: int, trials: int,
                            rng: np.random.Generator, batch: int = 1 << 16) -> Estimate:
    """Genie-aided Monte Carlo estimate of I(U_i; Y^n, U_1^{i-1}) with uniform inputs.

    Each trial draws u, sends u G_n through the channel, and scores
    1 - (-log2 P(u_i | y, u_1^{i-1})) using the SC posterior of the true bit.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = 1 << m
    if not 1 <= index <= n:
        raise IndexError(f"bit index {index} outside [1, {n}]")
    from .channels import sample_outputs

    scores = []
    done = 0
    while done < trials:
        b = min(batch, trials - done)
        u = rng.integers(0, 2, size=(b, n), dtype=np.uint8)
        y = sample_outputs(ch, encode_transform(u), rng)
        pairs = sc_likelihood_batch(ch, y, u[:, :index - 1], index)
        truth = u[:, index - 1].astype(np.int64)
        post = pairs[np.arange(b), truth] / pairs.sum(axis=1)
        scores.append(1.0 + np.log2(post))
        done += b
    s = np.concatenate(scores)
    err = float(s.std(ddof=1) / math.sqrt(s.size)) if s.size > 1 else 0.0
    return Estimate(float(s.mean()), err)


# --- serialization ----------------------------------------------------------

def profile_to_dict(profile, channel: ChannelSpec, budget: QuantizationBudget) -> dict:
    return {
        "n": len(profile),
        "channel": channel.to_dict(),
        "mu": budget.mu,
        "capacities_lower": [b.capacity_lower for b in profile],
        "capacities_upper": [b.capacity_upper for b in profile],
    }


def profile_from_dict(doc: dict) -> list:
    lo, up = doc["capacities_lower"], doc["capacities_upper"]
    if len(lo) != doc["n"] or len(up) != doc["n"]:
        raise ConfigError("profile document length mismatch")
    return [SynthesizedBitChannel(k + 1, a, b) for k, (a, b) in enumerate(zip(lo, up))]


def save_profile(path, profile, channel, budget):
    with open(path, "w") as fh:
        json.dump(profile_to_dict(profile, channel, budget), fh, indent=1)


def load_profile(path) -> list:
    with open(path) as fh:
        return profile_from_dict(json.load(fh))


def mean_capacity_check(ch: ChannelSpec, profile) -> tuple:
    """(mean lower, C(ch), mean upper) for the conservation check."""
    return float(np.mean(lower_capacities(profile))), capacity(ch), float(np.mean(upper_capacities(profile)))
