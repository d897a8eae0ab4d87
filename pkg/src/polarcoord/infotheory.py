"""Base-2 entropy helpers with the 0*log 0 = 0 convention."""

import numpy as np

from .errors import SupportViolation


def binary_entropy(p):
    """h(p) = -p log2 p - (1-p) log2(1-p), with h(0) = h(1) = 0.

    Accepts scalars or arrays.
    """
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError(f"binary_entropy: argument outside [0, 1]: {p}")
    out = -(xlog2x(p) + xlog2x(1.0 - p))
    return float(out) if out.ndim == 0 else out


def xlog2x(p):
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)


def kl_vector(a, b, strict=True):
    """KL divergence in bits between two probability vectors of equal shape.

    Terms with a == 0 contribute 0. If a > 0 where b == 0 the divergence is
    infinite; ``strict`` raises SupportViolation, otherwise ``inf`` is returned.
    """
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"kl: shape mismatch {a.shape} vs {b.shape}")
    pos = a > 0
    if np.any(b[pos] <= 0):
        if strict:
            raise SupportViolation("kl: support of first argument not contained in second")
        return float("inf")
    return float(np.sum(a[pos] * np.log2(a[pos] / b[pos])))


def mutual_information(prior, rows):
    """I(X;Y) in bits for input distribution ``prior`` and transition ``rows``."""
    prior = np.asarray(prior, dtype=float)
    rows = np.asarray(rows, dtype=float)
    out = prior @ rows
    live = out > 0      # columns whose output mass underflowed carry no information
    total = 0.0
    for px, row in zip(prior, rows):
        if px > 0:
            total += px * kl_vector(row[live], out[live], strict=False)
    return total
