"""Polar transform x = u G_n and the successive-cancellation likelihood recursion.

G_n is the m-fold Kronecker power of [[1, 0], [1, 1]] in natural index order
(no bit reversal), so x = (a xor b, b) with a, b the transforms of the two
halves of u. The SC recursion below follows the same split: the first half of
u sees the "minus" pairs (y_j, y_{j+n/2}), the second half the "plus" pairs
once the first half is known.

Likelihoods are carried as probability pairs (P[. | 0], P[. | 1]). In exact
mode the pairs equal the bit-channel transition probabilities W_n^(i); in the
default mode each level rescales pairs by their max so long blocks do not
underflow, which leaves every ratio unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .channels import ChannelSpec
from .errors import ChannelError, DegenerateLikelihood

Decide = Callable[[int, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class PolarParams:
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"m must be >= 0, got {self.m}")

    @property
    def n(self) -> int:
        return 1 << self.m

    @classmethod
    def from_n(cls, n: int) -> "PolarParams":
        return cls(check_block_length(n))


def check_block_length(n: int) -> int:
    """Return m with n = 2**m, or raise ValueError."""
    if n < 1 or n & (n - 1):
        raise ValueError(f"block length must be a power of two, got {n}")
    return n.bit_length() - 1


def encode_transform(u) -> np.ndarray:
    """x = u G_n over GF(2) along the last axis (batches allowed).

    G_n is an involution, so this also inverts itself.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    n = x.shape[-1]
    check_block_length(n)
    lead = x.shape[:-1]
    h = 1
    while h < n:
        v = x.reshape(lead + (n // (2 * h), 2, h))
        v[..., 0, :] ^= v[..., 1, :]
        h *= 2
    return x


def leaf_likelihoods(ch: ChannelSpec, obs_idx) -> np.ndarray:
    """(..., n, 2) array of (W(y_j|0), W(y_j|1)) for output indices ``obs_idx``."""
    obs_idx = np.asarray(obs_idx, dtype=np.int64)
    if obs_idx.size and (obs_idx.min() < 0 or obs_idx.max() >= ch.n_outputs):
        raise ChannelError("observation index outside the channel alphabet")
    return np.moveaxis(ch.transition[:, obs_idx], 0, -1)


def _rescale(p: np.ndarray) -> np.ndarray:
    top = p.max(axis=-1, keepdims=True)
    return np.divide(p, top, out=np.zeros_like(p), where=top > 0)


def sc_pass(leaves: np.ndarray, decide: Decide, exact: bool = False) -> np.ndarray:
    """Run one successive-cancellation pass over a batch of observations.

    ``leaves`` has shape (B, n, 2). For each index i = 0..n-1 in order,
    ``decide(i, pairs)`` receives the (B, 2) likelihood pairs of bit i given
    the previously decided bits and must return the (B,) decided bits.
    Returns the codewords u G_n of the decided vectors, shape (B, n).
    """
    leaves = np.asarray(leaves, dtype=float)
    if leaves.ndim != 3 or leaves.shape[-1] != 2:
        raise ValueError(f"leaves must have shape (B, n, 2), got {leaves.shape}")
    check_block_length(leaves.shape[1])
    return _sc_recurse(leaves, decide, exact, 0)


def _sc_recurse(p, decide, exact, offset):
    n = p.shape[1]
    if n == 1:
        bits = np.asarray(decide(offset, p[:, 0, :]), dtype=np.uint8)
        return bits[:, None]
    h = n // 2
    p1, p2 = p[:, :h], p[:, h:]
    minus = np.stack([p1[..., 0] * p2[..., 0] + p1[..., 1] * p2[..., 1],
                      p1[..., 1] * p2[..., 0] + p1[..., 0] * p2[..., 1]], axis=-1)
    minus = 0.5 * minus if exact else _rescale(minus)
    a = _sc_recurse(minus, decide, exact, offset)
    p1a = np.where(a[..., None] == 0, p1, p1[..., ::-1])
    plus = p1a * p2
    plus = 0.5 * plus if exact else _rescale(plus)
    b = _sc_recurse(plus, decide, exact, offset + h)
    return np.concatenate([a ^ b, b], axis=1)


class _Found(Exception):
    def __init__(self, pairs):
        self.pairs = pairs


def sc_likelihood(ch: ChannelSpec, obs, past, i: int, exact: bool = False) -> tuple:
    """Bit-channel likelihood pair for u_i given the observation and u_1..u_{i-1}.

    ``obs`` holds output symbols of ``ch``; ``i`` is 1-based. With ``exact``
    the pair is (W_n^(i)(obs, past | 0), W_n^(i)(obs, past | 1)); otherwise it
    is proportional to it. Raises DegenerateLikelihood when both vanish.
    """
    obs = list(obs)
    n = len(obs)
    check_block_length(n)
    if not 1 <= i <= n:
        raise IndexError(f"bit index {i} outside [1, {n}]")
    past = np.asarray(past, dtype=np.uint8).reshape(-1)
    if past.size != i - 1:
        raise ValueError(f"need {i - 1} past bits, got {past.size}")
    idx = np.array([ch.symbol_index(s) for s in obs])
    pairs = sc_likelihood_batch(ch, idx[None, :], past[None, :], i, exact)[0]
    if not np.any(pairs > 0):
        raise DegenerateLikelihood(f"both likelihoods of bit {i} vanish for this past")
    return float(pairs[0]), float(pairs[1])


def sc_likelihood_batch(ch: ChannelSpec, obs_idx, past, i: int, exact: bool = False) -> np.ndarray:
    """Batched form of sc_likelihood over output indices; returns (B, 2). No degeneracy check."""
    obs_idx = np.atleast_2d(obs_idx)
    past = np.asarray(past, dtype=np.uint8).reshape(obs_idx.shape[0], -1)
    target = i - 1

    def decide(k, pairs):
        if k == target:
            raise _Found(pairs.copy())
        return past[:, k]

    try:
        sc_pass(leaf_likelihoods(ch, obs_idx), decide, exact)
    except _Found as hit:
        return hit.pairs
    raise AssertionError("unreachable: index never visited")


def likelihood_ratio(pair) -> float:
    p0, p1 = pair
    if p1 == 0:
        return float("inf") if p0 > 0 else float("nan")
    return p0 / p1
