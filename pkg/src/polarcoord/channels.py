"""Binary-input discrete memoryless channels.

A channel is stored as a 2 x |Y| transition matrix (row = input bit) together
with an optional output permutation ``perm`` witnessing symmetry in Gallager's
sense: ``perm`` is an involution and ``W(y|0) == W(perm[y]|1)`` for all y.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .errors import ChannelError, ConfigError, InvariantViolation
from .infotheory import kl_vector, mutual_information

ROW_TOL = 1e-12
DEGRADE_TOL = 1e-9
LEMMA1_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ChannelSpec:
    outputs: tuple
    transition: np.ndarray
    perm: Optional[tuple] = None
    name: str = field(default="", compare=False)

    def __post_init__(self):
        w = np.array(self.transition, dtype=float)
        if w.ndim != 2 or w.shape[0] != 2:
            raise ChannelError(f"transition must be 2 x |Y|, got shape {w.shape}")
        if w.shape[1] != len(self.outputs):
            raise ChannelError("transition columns do not match output alphabet")
        if np.any(w < 0) or np.any(w > 1):
            raise ChannelError("transition entries must lie in [0, 1]")
        if np.any(np.abs(w.sum(axis=1) - 1.0) > ROW_TOL):
            raise ChannelError(f"rows must sum to 1, got {w.sum(axis=1)}")
        w.setflags(write=False)
        object.__setattr__(self, "transition", w)
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if self.perm is not None:
            perm = tuple(int(k) for k in self.perm)
            if sorted(perm) != list(range(w.shape[1])):
                raise ChannelError(f"perm is not a permutation of the outputs: {perm}")
            if any(perm[perm[y]] != y for y in range(len(perm))):
                raise ChannelError("perm must be an involution")
            if np.any(np.abs(w[0] - w[1, list(perm)]) > ROW_TOL):
                raise ChannelError("W(y|0) != W(perm(y)|1): perm does not witness symmetry")
            object.__setattr__(self, "perm", perm)

    @property
    def n_outputs(self) -> int:
        return self.transition.shape[1]

    @property
    def is_symmetric(self) -> bool:
        return self.perm is not None

    def output_dist(self) -> np.ndarray:
        """q_Y for the uniform input."""
        return 0.5 * (self.transition[0] + self.transition[1])

    def symbol_index(self, symbol) -> int:
        try:
            return self.outputs.index(symbol)
        except ValueError:
            raise ChannelError(f"symbol {symbol!r} not in alphabet {self.outputs}") from None

    def to_dict(self) -> dict:
        return {
            "outputs": [o if isinstance(o, (int, str)) else str(o) for o in self.outputs],
            "rows": self.transition.tolist(),
            "perm": list(self.perm) if self.perm is not None else None,
            "name": self.name,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ChannelSpec":
        try:
            return cls(tuple(doc["outputs"]), np.asarray(doc["rows"], dtype=float),
                       doc.get("perm"), doc.get("name", ""))
        except KeyError as exc:
            raise ChannelError(f"channel document missing key {exc}") from None

    def __repr__(self):
        label = self.name or "ChannelSpec"
        return f"<{label} outputs={self.outputs}>"


@dataclass(frozen=True, eq=False)
class TargetSpec:
    """Target action channel q_{Y|X} with the input fixed to Bernoulli(1/2)."""

    action_channel: ChannelSpec
    input_dist: tuple = (0.5, 0.5)

    def __post_init__(self):
        if tuple(self.input_dist) != (0.5, 0.5):
            raise ConfigError("only the uniform input distribution q_X = B(1/2) is supported")

    def joint(self) -> np.ndarray:
        """q_{XY} as a 2 x |Y| table."""
        return 0.5 * self.action_channel.transition


def make_bsc(p: float) -> ChannelSpec:
    if not 0.0 <= p <= 0.5:
        raise ChannelError(f"BSC crossover must be in [0, 0.5], got {p}")
    return ChannelSpec((0, 1), np.array([[1 - p, p], [p, 1 - p]]), (1, 0), name=f"bsc:{p:g}")


def make_bec(eps: float) -> ChannelSpec:
    if not 0.0 <= eps <= 1.0:
        raise ChannelError(f"BEC erasure probability must be in [0, 1], got {eps}")
    w = np.array([[1 - eps, eps, 0.0], [0.0, eps, 1 - eps]])
    return ChannelSpec((0, "?", 1), w, (2, 1, 0), name=f"bec:{eps:g}")


def _find_symmetry(w: np.ndarray, candidates) -> Optional[tuple]:
    for perm in candidates:
        if perm is None:
            continue
        perm = tuple(perm)
        if all(perm[perm[y]] == y for y in range(len(perm))) and \
                np.all(np.abs(w[0] - w[1, list(perm)]) <= ROW_TOL):
            return perm
    return None


def cascade(first: ChannelSpec, second: ChannelSpec) -> ChannelSpec:
    """Feed the output of ``first`` into the binary-input channel ``second``."""
    if first.n_outputs != 2:
        raise ChannelError(
            f"cascade: first channel has {first.n_outputs} outputs but second takes binary input")
    w = first.transition @ second.transition
    w = w / w.sum(axis=1, keepdims=True)
    perm = None
    if first.is_symmetric and second.is_symmetric:
        identity = tuple(range(second.n_outputs))
        perm = _find_symmetry(w, [second.perm, identity])
    name = f"{first.name}>{second.name}" if first.name and second.name else ""
    return ChannelSpec(second.outputs, w, perm, name=name)


def joint_channel(wx: ChannelSpec, wy: ChannelSpec) -> ChannelSpec:
    """Channel V -> (X, Y) with X and Y conditionally independent given V."""
    if not (wx.is_symmetric and wy.is_symmetric):
        raise ChannelError("joint_channel requires symmetry permutations on both components")
    w = np.einsum("vx,vy->vxy", wx.transition, wy.transition).reshape(2, -1)
    ny = wy.n_outputs
    outputs = tuple(f"{a},{b}" for a in wx.outputs for b in wy.outputs)
    perm = tuple(wx.perm[k // ny] * ny + wy.perm[k % ny] for k in range(w.shape[1]))
    name = f"({wx.name})x({wy.name})" if wx.name and wy.name else ""
    return ChannelSpec(outputs, w, perm, name=name)


def marginal_x(joint: ChannelSpec, nx: int) -> np.ndarray:
    """Sum a joint_channel matrix over its Y component."""
    return joint.transition.reshape(2, nx, -1).sum(axis=2)


def lemma1_divergences(ch: ChannelSpec) -> tuple:
    """D(W(.|x) || q_Y) in bits for x = 0, 1."""
    q = ch.output_dist()
    return kl_vector(ch.transition[0], q), kl_vector(ch.transition[1], q)


def capacity(ch: ChannelSpec) -> float:
    """Capacity of a symmetric channel: I(X;Y) under the uniform input.

    For symmetric channels this equals D(W(.|x) || q_Y) for either x; the
    identity is checked and a mismatch raises InvariantViolation.
    """
    if not ch.is_symmetric:
        raise ChannelError("capacity() requires a symmetric channel")
    c = mutual_information([0.5, 0.5], ch.transition)
    d0, d1 = lemma1_divergences(ch)
    if abs(c - d0) > LEMMA1_TOL or abs(c - d1) > LEMMA1_TOL:
        raise InvariantViolation(
            f"symmetric-channel identity failed: I={c!r}, D0={d0!r}, D1={d1!r}")
    return max(c, 0.0)


def is_degraded(coarse: ChannelSpec, fine: ChannelSpec, tol: float = DEGRADE_TOL) -> bool:
    """True iff coarse = fine @ M for some row-stochastic M (|Y_fine| x |Y_coarse|).

    Solved as an LP minimising the total absolute residual.
    """
    a, b = fine.n_outputs, coarse.n_outputs
    nm = a * b
    # variables: M (a*b, row-major), then residual slacks t (2*b)
    nvar = nm + 2 * b
    c = np.concatenate([np.zeros(nm), np.ones(2 * b)])
    a_ub, b_ub = [], []
    for x in range(2):
        for z in range(b):
            row = np.zeros(nvar)
            for y in range(a):
                row[y * b + z] = fine.transition[x, y]
            slack = nm + x * b + z
            pos = row.copy()
            pos[slack] = -1.0
            neg = -row
            neg[slack] = -1.0
            a_ub += [pos, neg]
            b_ub += [coarse.transition[x, z], -coarse.transition[x, z]]
    a_eq = np.zeros((a, nvar))
    for y in range(a):
        a_eq[y, y * b:(y + 1) * b] = 1.0
    res = linprog(c, A_ub=np.array(a_ub), b_ub=np.array(b_ub), A_eq=a_eq, b_eq=np.ones(a),
                  bounds=[(0, None)] * nvar, method="highs")
    return bool(res.status == 0 and res.fun <= tol)


def sample_outputs(ch: ChannelSpec, inputs, rng: np.random.Generator) -> np.ndarray:
    """Vectorised channel simulation: one uniform draw per input symbol.

    Returns output indices (into ``ch.outputs``) with the shape of ``inputs``.
    """
    inputs = np.asarray(inputs, dtype=np.int64)
    cdf = np.cumsum(ch.transition, axis=1)
    cdf[:, -1] = 1.0
    draws = rng.random(inputs.shape)
    rows = cdf[inputs]
    return np.sum(draws[..., None] >= rows, axis=-1).clip(max=ch.n_outputs - 1)


def sample_output(ch: ChannelSpec, bit: int, rng: np.random.Generator):
    if bit not in (0, 1):
        raise ChannelError(f"input must be a bit, got {bit!r}")
    return ch.outputs[int(sample_outputs(ch, np.array([bit]), rng)[0])]


# --- presets and serialization ---------------------------------------------

def parse_preset(text: str) -> ChannelSpec:
    """Parse "bsc:p", "bec:eps" or "bsc-bec:p,eps"."""
    try:
        kind, _, arg = text.partition(":")
        values = [float(v) for v in arg.split(",")] if arg else []
    except ValueError:
        raise ConfigError(f"cannot parse channel preset {text!r}") from None
    if kind == "bsc" and len(values) == 1:
        return make_bsc(values[0])
    if kind == "bec" and len(values) == 1:
        return make_bec(values[0])
    if kind == "bsc-bec" and len(values) == 2:
        return cascade(make_bsc(values[0]), make_bec(values[1]))
    raise ConfigError(f"unknown channel preset {text!r}; expected bsc:p, bec:eps or bsc-bec:p,eps")


def load_channel(path) -> ChannelSpec:
    try:
        with open(path) as fh:
            return ChannelSpec.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read channel spec {path}: {exc}") from None


def bsc_crossover(ch: ChannelSpec) -> Optional[float]:
    """Return p if ``ch`` is a BSC with outputs (0, 1), else None."""
    w = ch.transition
    if ch.n_outputs != 2 or ch.perm != (1, 0):
        return None
    p = w[0, 1]
    if p > 0.5 + ROW_TOL or abs(w[1, 0] - p) > ROW_TOL:
        return None
    return float(p)
