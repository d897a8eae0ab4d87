"""Two-node strong coordination with polar codes.

Nature hands node X an i.i.d. uniform action block x. Node X builds u one
index at a time in SC order: frozen values on F1, common-randomness bits on
F2, and on F3 a random bit with P(u_i = 0) = L / (1 + L), where L is the SC
likelihood ratio of u_i given (x, u_1^{i-1}) under W_X|V. The F3 bits are
the message. Node Y rebuilds u from (frozen, common, message), forms
v = u G_n and draws y through W_Y|V.

Every routine has a batched form operating on (B, n) arrays; the
single-session helpers are thin wrappers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np

from .channels import sample_outputs
from .construction import CoordinationCode
from .errors import ConfigError, DegenerateLikelihood, InvariantViolation
from .polar import encode_transform, leaf_likelihoods, sc_pass


@dataclass
class RandomnessLedger:
    """Counts of random draws, not entropy: one uniform per biased bit or channel use."""

    sessions: int = 0
    x_draws: int = 0
    y_draws: int = 0
    common_bits: int = 0

    def to_dict(self) -> dict:
        return {"sessions": self.sessions, "x_draws": self.x_draws,
                "y_draws": self.y_draws, "common_bits": self.common_bits}


def _roles(code: CoordinationCode) -> np.ndarray:
    role = np.ones(code.n, dtype=np.int8)
    role[np.asarray(code.partition.f2, dtype=np.int64) - 1] = 2
    role[np.asarray(code.partition.f3, dtype=np.int64) - 1] = 3
    return role


def _check_width(arr, rows: int, width: int, what: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=np.uint8).reshape(rows, -1) if np.size(arr) else \
        np.zeros((rows, 0), dtype=np.uint8)
    if arr.shape[1] != width:
        raise ConfigError(f"{what} has length {arr.shape[1]}, expected {width}")
    return arr


def node_x_encode_batch(code: CoordinationCode, x, common, rng: np.random.Generator,
                        ledger: RandomnessLedger | None = None) -> tuple:
    """Randomized SC encoding of a (B, n) batch of x blocks; returns (u, message)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.int64))
    b, n = x.shape
    if n != code.n:
        raise ConfigError(f"x has length {n}, expected {code.n}")
    part = code.partition
    common = _check_width(common, b, len(part.f2), "common randomness")
    role = _roles(code)
    frozen = dict(zip(np.asarray(part.f1) - 1, code.frozen_values))
    col2 = {i - 1: j for j, i in enumerate(part.f2)}
    u = np.zeros((b, n), dtype=np.uint8)

    def decide(k, pairs):
        if role[k] == 1:
            bits = np.full(b, frozen[k], dtype=np.uint8)
        elif role[k] == 2:
            bits = common[:, col2[k]]
        else:
            tot = pairs.sum(axis=1)
            if np.any(tot <= 0):
                raise DegenerateLikelihood(f"both likelihoods vanish at index {k + 1}")
            p0 = pairs[:, 0] / tot
            bits = (rng.random(b) >= p0).astype(np.uint8)
        u[:, k] = bits
        return bits

    sc_pass(leaf_likelihoods(code.wx, x), decide)
    if ledger is not None:
        ledger.x_draws += b * len(part.f3)
    message = u[:, np.asarray(part.f3, dtype=np.int64) - 1]
    return u, message


def assemble_u(code: CoordinationCode, message, common) -> np.ndarray:
    part = code.partition
    message = np.atleast_2d(np.asarray(message, dtype=np.uint8))
    b = message.shape[0] if message.size else np.atleast_2d(common).shape[0]
    message = _check_width(message, b, len(part.f3), "message")
    common = _check_width(common, b, len(part.f2), "common randomness")
    u = np.zeros((b, code.n), dtype=np.uint8)
    u[:, np.asarray(part.f1, dtype=np.int64) - 1] = np.asarray(code.frozen_values, dtype=np.uint8)
    u[:, np.asarray(part.f2, dtype=np.int64) - 1] = common
    u[:, np.asarray(part.f3, dtype=np.int64) - 1] = message
    return u


def node_y_decode_batch(code: CoordinationCode, message, common, rng: np.random.Generator,
                        ledger: RandomnessLedger | None = None) -> np.ndarray:
    """Rebuild u, form v = u G_n, and simulate W_Y|V; returns output indices (B, n)."""
    v = encode_transform(assemble_u(code, message, common))
    if ledger is not None:
        ledger.y_draws += v.size
    return sample_outputs(code.wy, v, rng)


def node_x_encode(code, x_actions, common_randomness, rng_x, ledger=None) -> tuple:
    u, msg = node_x_encode_batch(code, np.asarray(x_actions)[None, :],
                                 np.asarray(common_randomness), rng_x, ledger)
    return u[0], msg[0]


def node_y_decode(code, message, common_randomness, rng_y, ledger=None) -> np.ndarray:
    """Single-session decode; returns output symbols of W_Y|V."""
    if len(message) != len(code.partition.f3):
        raise ConfigError(f"message has length {len(message)}, expected {len(code.partition.f3)}")
    idx = node_y_decode_batch(code, np.asarray(message)[None, :],
                              np.asarray(common_randomness)[None, :], rng_y, ledger)[0]
    return np.array([code.wy.outputs[k] for k in idx], dtype=object)


class SessionTranscript(NamedTuple):
    x_actions: np.ndarray
    u: np.ndarray
    message: np.ndarray
    v: np.ndarray
    y_actions: np.ndarray      # output indices of W_Y|V

    def check(self, code: CoordinationCode):
        part = code.partition
        f1 = np.asarray(part.f1, dtype=np.int64) - 1
        if np.any(self.u[..., f1] != np.asarray(code.frozen_values, dtype=np.uint8)):
            raise InvariantViolation("u on F1 differs from the frozen values")
        f3 = np.asarray(part.f3, dtype=np.int64) - 1
        if np.any(self.u[..., f3] != self.message):
            raise InvariantViolation("message differs from u on F3")


@dataclass
class CoordinationSession:
    """One session's shared and local randomness plus its draw ledger."""

    code: CoordinationCode
    common_randomness: np.ndarray
    rng_x: np.random.Generator
    rng_y: np.random.Generator
    ledger: RandomnessLedger = field(default_factory=RandomnessLedger)

    def __post_init__(self):
        self.common_randomness = np.asarray(self.common_randomness, dtype=np.uint8).reshape(-1)
        if self.common_randomness.size != len(self.code.partition.f2):
            raise ConfigError("common randomness length must equal |F2|")

    def run(self, x_actions) -> SessionTranscript:
        u, msg = node_x_encode(self.code, x_actions, self.common_randomness, self.rng_x, self.ledger)
        y = node_y_decode_batch(self.code, msg[None, :], self.common_randomness[None, :],
                                self.rng_y, self.ledger)[0]
        self.ledger.sessions += 1
        self.ledger.common_bits += self.common_randomness.size
        t = SessionTranscript(np.asarray(x_actions, dtype=np.uint8), u, msg, encode_transform(u), y)
        t.check(self.code)
        return t


def run_session(code: CoordinationCode, rng_nature, rng_common, rng_x, rng_y,
                ledger: RandomnessLedger | None = None) -> SessionTranscript:
    x = rng_nature.integers(0, 2, size=code.n, dtype=np.uint8)
    common = rng_common.integers(0, 2, size=len(code.partition.f2), dtype=np.uint8)
    session = CoordinationSession(code, common, rng_x, rng_y)
    t = session.run(x)
    if ledger is not None:
        for k, v in session.ledger.to_dict().items():
            setattr(ledger, k, getattr(ledger, k) + v)
    return t


def run_sessions(code: CoordinationCode, count: int, streams: dict, batch: int = 1 << 15,
                 ledger: RandomnessLedger | None = None) -> Iterator[SessionTranscript]:
    """Yield batched transcripts (leading axis = session) until ``count`` sessions ran.

    ``streams`` maps "nature", "common", "x", "y" to generators.
    """
    if count < 0:
        raise ConfigError("session count must be nonnegative")
    n, nf2 = code.n, len(code.partition.f2)
    done = 0
    while done < count:
        b = min(batch, count - done)
        x = streams["nature"].integers(0, 2, size=(b, n), dtype=np.uint8)
        common = streams["common"].integers(0, 2, size=(b, nf2), dtype=np.uint8)
        u, msg = node_x_encode_batch(code, x, common, streams["x"], ledger)
        y = node_y_decode_batch(code, msg, common, streams["y"], ledger)
        if ledger is not None:
            ledger.sessions += b
            ledger.common_bits += b * nf2
        t = SessionTranscript(x, u, msg, encode_transform(u), y)
        t.check(code)
        done += b
        yield t


def block_index(x: np.ndarray, y: np.ndarray, ny: int) -> np.ndarray:
    """Flat index of (x_1..x_n, y_1..y_n) in the oracle's lexicographic layout."""
    n = x.shape[1]
    wx = 2 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    wy = ny ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (x.astype(np.int64) @ wx) * ny ** n + y.astype(np.int64) @ wy


def tally_sessions(code: CoordinationCode, count: int, streams: dict, batch: int = 1 << 15,
                   block_cap: int = 1 << 22, ledger: RandomnessLedger | None = None) -> dict:
    """Run sessions and keep per-symbol pair counts and, when small enough, block counts."""
    ny = code.wy.n_outputs
    pair = np.zeros((2, ny), dtype=np.int64)
    size = 2 ** code.n * ny ** code.n
    blocks = np.zeros(size, dtype=np.int64) if size <= block_cap else None
    for t in run_sessions(code, count, streams, batch, ledger):
        np.add.at(pair, (t.x_actions.ravel().astype(np.int64), t.y_actions.ravel()), 1)
        if blocks is not None:
            blocks += np.bincount(block_index(t.x_actions, t.y_actions, ny), minlength=size)
    return {"pair_counts": pair, "block_counts": blocks}


def single_letter_target(code: CoordinationCode) -> np.ndarray:
    """q_XY(x, y) = sum_v 1/2 W_X(x|v) W_Y(y|v)."""
    return 0.5 * code.wx.transition.T @ code.wy.transition
