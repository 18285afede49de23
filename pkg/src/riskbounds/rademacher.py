"""Empirical Rademacher complexity: exact enumeration, Monte-Carlo, and
finite-class bounds.

The complexity of a value table is E[max_j U . row_j] over uniform random
sign vectors U in {-1,+1}^n.  It is kept UNNORMALIZED (no 1/n factor); every
confidence-interval formula downstream consumes it in that convention.
"""

import json
import math
from dataclasses import dataclass, asdict

import numpy as np

from .hypothesis import FunctionTable

__all__ = [
    "RademacherEstimate",
    "rademacher_exact",
    "rademacher_mc",
    "massart_bound",
    "rademacher_cover_bound",
]

# 2^24 sign vectors is the safety limit for exact enumeration
EXACT_MAX_N = 24
_CHUNK_BITS = 18


@dataclass(frozen=True)
class RademacherEstimate:
    """Result of a complexity computation.

    ``std_error`` is 0 exactly when ``mode == 'exact'``; for Monte-Carlo it
    is the sample standard deviation of the per-draw maxima divided by
    sqrt(draws).
    """

    value: float
    std_error: float
    draws: int
    mode: str
    seed: int | None = None

    def __post_init__(self):
        if self.mode not in ("exact", "monte_carlo"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.std_error < 0:
            raise ValueError("std_error must be nonnegative")
        if self.mode == "exact" and self.std_error != 0.0:
            raise ValueError("exact mode must report std_error 0")

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _sign_matrix(start: int, stop: int, n: int) -> np.ndarray:
    """Rows = sign vectors for integers start..stop-1, bit k -> coordinate k."""
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return 2.0 * bits - 1.0


def rademacher_exact(table: FunctionTable, max_n: int = EXACT_MAX_N) -> RademacherEstimate:
    """Exact complexity by enumerating all 2^n sign vectors.

    Parameters
    ----------
    table : FunctionTable
        m x n value table.
    max_n : int
        Refusal threshold; tables with n above it must use rademacher_mc.

    Returns
    -------
    RademacherEstimate with mode='exact', draws=2^n, std_error=0.
    """
    n = table.n
    if n > min(max_n, EXACT_MAX_N):
        raise ValueError(
            f"n={n} too large for exact enumeration (limit {min(max_n, EXACT_MAX_N)}); "
            "use rademacher_mc"
        )
    vals = table.values
    total = 0.0
    chunk = 1 << _CHUNK_BITS
    for start in range(0, 1 << n, chunk):
        stop = min(start + chunk, 1 << n)
        signs = _sign_matrix(start, stop, n)
        total += float(np.sum(np.max(signs @ vals.T, axis=1)))
    return RademacherEstimate(
        value=total / (1 << n), std_error=0.0, draws=1 << n, mode="exact"
    )


def rademacher_mc(table: FunctionTable, draws: int, seed: int) -> RademacherEstimate:
    """Monte-Carlo complexity estimate from seeded uniform sign draws.

    Deterministic given the seed.  std_error is the sample standard
    deviation of the per-draw suprema divided by sqrt(draws).
    """
    if draws < 100:
        raise ValueError(f"draws must be >= 100, got {draws}")
    rng = np.random.default_rng(seed)
    sups = np.empty(draws)
    chunk = max(1, (1 << 22) // max(table.n, 1))
    for start in range(0, draws, chunk):
        stop = min(start + chunk, draws)
        signs = 2.0 * rng.integers(0, 2, size=(stop - start, table.n)) - 1.0
        sups[start:stop] = np.max(signs @ table.values.T, axis=1)
    value = float(np.mean(sups))
    std_error = float(np.std(sups, ddof=1) / math.sqrt(draws))
    return RademacherEstimate(
        value=value, std_error=std_error, draws=draws, mode="monte_carlo", seed=seed
    )


def massart_bound(table: FunctionTable) -> float:
    """Finite-class bound (max row l2 norm) * sqrt(2 log m).

    Always dominates the exact complexity; equals 0 for a single row.
    """
    norms = np.sqrt(np.sum(table.values**2, axis=1))
    return float(np.max(norms) * math.sqrt(2.0 * math.log(table.m)))


def rademacher_cover_bound(
    envelope_l2: float, r: float, n: int, cover_size: int
) -> float:
    """Cover-based complexity bound r*n + envelope_l2 * sqrt(2 log cover_size).

    ``r`` is the covering radius in the (1/n)-averaged L1 metric, so the
    radius contributes r*n in the unnormalized convention.
    """
    if cover_size < 1:
        raise ValueError(f"cover_size must be >= 1, got {cover_size}")
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    return float(r * n + envelope_l2 * math.sqrt(2.0 * math.log(cover_size)))
