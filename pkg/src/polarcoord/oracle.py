"""Exhaustive small-block-length oracles.

Everything here enumerates full sequence spaces with dense arrays. Nothing
calls the successive-cancellation recursion: bit-channel quantities come from
summing the sequence channel over the trailing input bits directly, so these
functions can serve as ground truth for the fast paths.

Index conventions: a bit vector (b_1, ..., b_n) maps to the integer with b_1
as the most significant bit; sequence tables are row-major with the first
coordinate most significant. Distances are raw L1 sums (range [0, 2]).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .channels import ChannelSpec
from .errors import CapExceeded, DegenerateLikelihood
from .infotheory import binary_entropy, kl_vector, mutual_information  # noqa: F401  (re-export)
from .polar import encode_transform

DEFAULT_CAP = 1 << 22
SUM_TOL = 1e-9


def _check_cap(entries: int, cap: int, what: str):
    if entries > cap:
        raise CapExceeded(f"{what} needs {entries} table entries, cap is {cap}")


@dataclass(frozen=True, eq=False)
class DistTable:
    """Dense distribution over a product of finite alphabets."""

    sizes: tuple
    probs: np.ndarray

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        p = np.asarray(self.probs, dtype=float).reshape(-1)
        if p.size != math.prod(sizes):
            raise ValueError(f"table has {p.size} entries, domain {sizes} needs {math.prod(sizes)}")
        if np.any(p < -1e-15):
            raise ValueError("negative probability in table")
        if abs(p.sum() - 1.0) > SUM_TOL:
            raise ValueError(f"table sums to {p.sum()!r}, not 1")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "probs", p)

    def array(self) -> np.ndarray:
        return self.probs.reshape(self.sizes)

    def marginal(self, coords) -> "DistTable":
        coords = tuple(coords)
        drop = tuple(k for k in range(len(self.sizes)) if k not in coords)
        arr = self.array().sum(axis=drop)
        # sum() keeps remaining axes in original order; reorder as requested
        kept = [k for k in range(len(self.sizes)) if k in coords]
        arr = np.transpose(arr, [kept.index(k) for k in coords])
        return DistTable(tuple(self.sizes[k] for k in coords), arr)


def tv(a: DistTable, b: DistTable) -> float:
    """L1 distance sum |a - b| (twice the usual total variation)."""
    if a.sizes != b.sizes:
        raise ValueError(f"tv: domain mismatch {a.sizes} vs {b.sizes}")
    return float(np.abs(a.probs - b.probs).sum())


def kl(a: DistTable, b: DistTable, strict: bool = True) -> float:
    """D(a || b) in bits; support violations raise unless ``strict`` is False."""
    if a.sizes != b.sizes:
        raise ValueError(f"kl: domain mismatch {a.sizes} vs {b.sizes}")
    return kl_vector(a.probs, b.probs, strict=strict)


def pinsker_holds(a: DistTable, b: DistTable, slack: float = 1e-12) -> bool:
    """(L1/2)^2 <= (ln 2 / 2) * D_bits, the L1 form of Pinsker's inequality."""
    return (tv(a, b) / 2) ** 2 <= math.log(2) / 2 * kl(a, b, strict=False) + slack


@lru_cache(maxsize=16)
def all_bit_vectors(n: int) -> np.ndarray:
    """(2^n, n) uint8 array; row k is the binary expansion of k, MSB first."""
    k = np.arange(1 << n, dtype=np.int64)
    bits = (k[:, None] >> np.arange(n - 1, -1, -1)) & 1
    out = bits.astype(np.uint8)
    out.setflags(write=False)
    return out


def _bits_to_int(bits: np.ndarray) -> np.ndarray:
    n = bits.shape[-1]
    return (bits.astype(np.int64) << np.arange(n - 1, -1, -1)).sum(axis=-1)


def sequence_matrix(ch: ChannelSpec, n: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """W^n as a (2^n, |Y|^n) matrix: row = input sequence, column = output sequence."""
    _check_cap((2 ** n) * ch.n_outputs ** n, cap, "sequence matrix")
    mat = np.ones((1, 1))
    for _ in range(n):
        mat = np.kron(mat, ch.transition)
    return mat


def _codeword_rows(n: int) -> np.ndarray:
    """Integer codeword u G_n for each integer u."""
    return _bits_to_int(encode_transform(all_bit_vectors(n)))


def _u_channel(ch: ChannelSpec, n: int, cap: int) -> np.ndarray:
    """A[u, y] = W^n(y | u G_n)."""
    return sequence_matrix(ch, n, cap)[_codeword_rows(n)]


@dataclass(frozen=True, eq=False)
class BitChannelTable:
    """Exact W_n^(i): table[past, u_i, y] over pasts u_1..u_{i-1} and outputs y."""

    index: int
    table: np.ndarray
    capacity: float


def brute_force_bit_channel(ch: ChannelSpec, m: int, i: int, cap: int = DEFAULT_CAP) -> BitChannelTable:
    """Exact bit channel i (1-based) of length n = 2^m by direct summation."""
    n = 1 << m
    if not 1 <= i <= n:
        raise IndexError(f"bit index {i} outside [1, {n}]")
    a = _u_channel(ch, n, cap)
    return _bit_channel_from_u_channel(a, n, i)


def _bit_channel_from_u_channel(a: np.ndarray, n: int, i: int) -> BitChannelTable:
    t = a.reshape(1 << (i - 1), 2, 1 << (n - i), -1).sum(axis=2) / 2 ** (n - 1)
    cap_i = mutual_information([0.5, 0.5], [t[:, 0, :].ravel(), t[:, 1, :].ravel()])
    return BitChannelTable(i, t, max(cap_i, 0.0))


def brute_force_capacities(ch: ChannelSpec, m: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Exact capacities of all n bit channels (array position k is index k+1)."""
    n = 1 << m
    a = _u_channel(ch, n, cap)
    return np.array([_bit_channel_from_u_channel(a, n, i).capacity for i in range(1, n + 1)])


# --- resolvability ----------------------------------------------------------

def _coset_rows(n: int, free, fixed, fixed_values) -> np.ndarray:
    """Integer u values with u[fixed] == fixed_values, free positions enumerated."""
    u = all_bit_vectors(n)
    fixed = np.asarray(fixed, dtype=np.int64) - 1
    vals = np.asarray(fixed_values, dtype=np.uint8)
    if fixed.size:
        mask = np.all(u[:, fixed] == vals, axis=1)
    else:
        mask = np.ones(u.shape[0], dtype=bool)
    return np.flatnonzero(mask)


def induced_resolvability_dist(code, cap: int = DEFAULT_CAP) -> DistTable:
    """Exact p_{Y^n} of a coset code: uniform bits on ``code.good``, frozen bits elsewhere."""
    n, ch = code.n, code.channel
    a = _u_channel(ch, n, cap)
    rows = _coset_rows(n, code.good, code.bad, code.frozen)
    return DistTable((ch.n_outputs,) * n, a[rows].mean(axis=0))


def target_output_dist(ch: ChannelSpec, n: int) -> DistTable:
    """q_Y^n for the uniform input."""
    q = np.ones(1)
    for _ in range(n):
        q = np.kron(q, ch.output_dist())
    return DistTable((ch.n_outputs,) * n, q)


def composite_channel_capacity(code, cap: int = DEFAULT_CAP) -> float:
    """C(W_{Y^n | S^{n-r}}): mutual information from frozen values to output, good bits uniform."""
    n, ch = code.n, code.channel
    a = _u_channel(ch, n, cap)
    bad = np.asarray(code.bad, dtype=np.int64)
    nb = bad.size
    rows = []
    for s in all_bit_vectors(nb) if nb else [np.zeros(0, dtype=np.uint8)]:
        rows.append(a[_coset_rows(n, code.good, bad, s)].mean(axis=0))
    rows = np.array(rows)
    prior = np.full(rows.shape[0], 1.0 / rows.shape[0])
    return max(mutual_information(prior, rows), 0.0)


# --- coordination -----------------------------------------------------------

def target_joint(wx: ChannelSpec, wy: ChannelSpec, n: int) -> DistTable:
    """q_{X^n Y^n} with q_XY(x, y) = sum_v 1/2 W_X(x|v) W_Y(y|v), ordered (x_1..x_n, y_1..y_n)."""
    qxy = 0.5 * wx.transition.T @ wy.transition
    arr = np.ones(1)
    for _ in range(n):
        arr = np.kron(arr, qxy.ravel())
    # arr is ordered (x1, y1, x2, y2, ...); move to (x1..xn, y1..yn)
    arr = arr.reshape((wx.n_outputs, wy.n_outputs) * n)
    order = list(range(0, 2 * n, 2)) + list(range(1, 2 * n, 2))
    arr = np.transpose(arr, order)
    return DistTable(arr.shape, arr)


def encoder_conditionals(wx: ChannelSpec, n: int, partition, frozen_values,
                         cap: int = DEFAULT_CAP) -> np.ndarray:
    """T[x, u] = prod_i p~(u_i | x, u_1^{i-1}) for the randomized SC encoder.

    F1 bits are deterministic, F2 bits fair, F3 bits follow the bit-channel
    posterior of W_X computed by direct summation. Zero-probability pasts get
    weight zero; a reachable degenerate past raises DegenerateLikelihood.
    """
    ax = _u_channel(wx, n, cap)               # (u, x)
    u = all_bit_vectors(n)
    nx = ax.shape[1]
    t = np.ones((nx, 1 << n))
    f1 = list(partition.f1)
    frozen = dict(zip(f1, np.asarray(frozen_values, dtype=np.uint8)))
    f3 = set(partition.f3)
    for i in range(1, n + 1):
        bit = u[:, i - 1]
        if i in frozen:
            t *= (bit == frozen[i])[None, :]
        elif i in f3:
            s = ax.reshape(1 << (i - 1), 2, 1 << (n - i), nx).sum(axis=2)  # (past, ui, x)
            denom = s.sum(axis=1)                                       # (past, x)
            past = np.arange(1 << n) >> (n - i + 1)
            num = s[past, bit, :].T                                     # (x, u)
            den = denom[past, :].T
            live = t > 0
            if np.any(live & (den <= 0)):
                raise DegenerateLikelihood(f"encoder past has zero probability at index {i}")
            t = np.where(live, t * np.divide(num, den, out=np.zeros_like(num), where=den > 0), 0.0)
        else:
            t *= 0.5
    return t


def _check_coord_cap(n, partition, ny, cap):
    free = len(partition.f2) + len(partition.f3)
    _check_cap((2 ** n) * (2 ** free) * ny ** n, cap, "coordination oracle")


def induced_coordination_joint(code, cap: int = DEFAULT_CAP) -> DistTable:
    """Exact p~(x, y) induced by the SC encoder at node X and channel simulation at node Y."""
    n, wx, wy = code.n, code.wx, code.wy
    _check_coord_cap(n, code.partition, wy.n_outputs, cap)
    t = encoder_conditionals(wx, n, code.partition, code.frozen_values, cap)
    ay = _u_channel(wy, n, cap)
    joint = (t / 2 ** n) @ ay
    return DistTable((wx.n_outputs,) * n + (wy.n_outputs,) * n, joint)


@dataclass(frozen=True, eq=False)
class EnsembleTables:
    """Uniform-input nested-code distributions p^ and the encoder's p~ on (u_F2, u_F3, x)."""

    xy: DistTable            # p^(x, y)
    ux_hat: np.ndarray       # p^(u_free, x), rows over free-bit assignments
    ux_tilde: np.ndarray     # p~(u_free, x)


def ensemble_joint(code, cap: int = DEFAULT_CAP) -> EnsembleTables:
    n, wx, wy, part = code.n, code.wx, code.wy, code.partition
    _check_coord_cap(n, part, wy.n_outputs, cap)
    ax = _u_channel(wx, n, cap)
    ay = _u_channel(wy, n, cap)
    free = sorted(set(part.f2) | set(part.f3))
    rows = _coset_rows(n, free, part.f1, code.frozen_values)
    weight = 1.0 / rows.size
    xy = (ax[rows].T * weight) @ ay[rows]
    t = encoder_conditionals(wx, n, part, code.frozen_values, cap)
    return EnsembleTables(
        xy=DistTable((wx.n_outputs,) * n + (wy.n_outputs,) * n, xy),
        ux_hat=ax[rows] * weight,
        ux_tilde=t[:, rows].T / 2 ** n,
    )


def ensemble_posteriors(wx: ChannelSpec, n: int, i: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """P^(u_i = 0 | x, u_1^{i-1}) under uniform u: array (past, x); NaN where undefined."""
    ax = _u_channel(wx, n, cap)
    s = ax.reshape(1 << (i - 1), 2, 1 << (n - i), -1).sum(axis=2)
    den = s.sum(axis=1)
    return np.divide(s[:, 0, :], den, out=np.full_like(den, np.nan), where=den > 0)


def telescoping_distance(code, cap: int = DEFAULT_CAP) -> tuple:
    """L1 distance between P~(u, x) and P^(u, x), and its bit-channel bound.

    P~ draws every F1 and F2 bit as a fair coin and F3 bits by SC encoding;
    P^ is uniform u through W_X. The bound is
    sum_{i in F1 u F2} sqrt(2 ln 2 C(W~_n^(i))) with exact capacities.
    """
    n, wx, part = code.n, code.wx, code.partition
    ax = _u_channel(wx, n, cap)
    relaxed = _Relaxed(part)
    t = encoder_conditionals(wx, n, relaxed, [], cap)
    p_tilde = t / 2 ** n                       # (x, u)
    p_hat = ax.T / 2 ** n
    dist = float(np.abs(p_tilde - p_hat).sum())
    caps = [_bit_channel_from_u_channel(ax, n, i).capacity for i in range(1, n + 1)]
    bound = sum(math.sqrt(2 * math.log(2) * caps[i - 1]) for i in sorted(set(part.f1) | set(part.f2)))
    return dist, bound


class _Relaxed:
    """Partition view with F1 moved into the fair-coin class."""

    def __init__(self, part):
        self.f1 = ()
        self.f2 = tuple(sorted(set(part.f1) | set(part.f2)))
        self.f3 = tuple(part.f3)
