"""Deterministic, counter-based random streams.

Every variate is a pure function of (seed, stream, index words..., attempt),
hashed through a splitmix64-style mixer and mapped to a normal via the
inverse CDF. Draws therefore never depend on evaluation order, chunking, or
worker count, and any single (replica, point) value can be reproduced in
isolation. Truncation to an interval is done by re-drawing with an
incremented attempt counter, never by clipping.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtri

from .errors import DomainError

_U64_MASK = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)

# Stream identifiers; each independent use of randomness gets its own lane.
STREAM_PSEUDODATA = 1       # per-(replica, point) pseudo-measurement draws
STREAM_SYS_AMPLITUDE = 2    # per-replica amplitude nuisance
STREAM_SYS_PHASE = 3        # per-replica phase-scale nuisance
STREAM_SYNTH_PROB = 4       # synthetic dataset probability noise
STREAM_SYNTH_ENERGY = 5     # synthetic dataset bin placement jitter


def _as_u64(word) -> np.ndarray:
    if isinstance(word, (int, np.integer)):
        return np.uint64(int(word) & _U64_MASK)
    arr = np.asarray(word)
    if not np.issubdtype(arr.dtype, np.integer):
        raise DomainError("index words must be integers")
    return arr.astype(np.uint64)


def _mix64(h: np.ndarray) -> np.ndarray:
    h = h ^ (h >> np.uint64(30))
    h = h * np.uint64(0xBF58476D1CE4E5B9)
    h = h ^ (h >> np.uint64(27))
    h = h * np.uint64(0x94D049BB133111EB)
    return h ^ (h >> np.uint64(31))


def _hash_words(*words) -> np.ndarray:
    """Avalanche-combine integer words (scalars or broadcastable arrays)."""
    h = np.uint64(0)
    # Wraparound is the mixer's working principle, not an error.
    with np.errstate(over="ignore"):
        for word in words:
            h = _mix64(h + _GOLDEN + _as_u64(word))
    return h


def uniform_open(seed: int, stream: int, *index_words) -> np.ndarray:
    """Uniform draw in the open interval (0, 1), one per broadcast element."""
    h = _hash_words(seed, stream, *index_words)
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normal(seed: int, stream: int, *index_words, mean=0.0, sd=1.0) -> np.ndarray:
    """Unbounded normal draw keyed by the given words."""
    return mean + sd * ndtri(uniform_open(seed, stream, *index_words, 0))


def truncated_normal(
    seed: int,
    stream: int,
    index_a,
    index_b,
    mean,
    sd,
    lo: float = 0.0,
    hi: float = 1.0,
    max_attempts: int = 10000,
) -> np.ndarray:
    """Normal draws truncated to [lo, hi] by resampling.

    index_a and index_b are integer arrays (broadcast together) keying each
    element, e.g. replica and point indices. Elements with sd == 0 return
    their mean clamped to the interval. Raises if an element fails to land
    inside the interval within max_attempts redraws, which for sane inputs
    (mean within a few sd of the interval) cannot happen.
    """
    idx_a, idx_b = np.broadcast_arrays(np.asarray(index_a), np.asarray(index_b))
    mean_b, sd_b = np.broadcast_arrays(
        np.asarray(mean, dtype=float), np.asarray(sd, dtype=float)
    )
    if np.any(sd_b < 0.0):
        raise DomainError("sd must be non-negative")
    shape = np.broadcast_shapes(idx_a.shape, mean_b.shape)
    out = np.empty(shape, dtype=np.float64)

    frozen = np.broadcast_to(sd_b == 0.0, shape)
    if frozen.any():
        out[frozen] = np.clip(np.broadcast_to(mean_b, shape)[frozen], lo, hi)

    active = ~frozen
    if not active.any():
        return out

    idx_a = np.broadcast_to(idx_a, shape)[active]
    idx_b = np.broadcast_to(idx_b, shape)[active]
    means = np.broadcast_to(mean_b, shape)[active]
    sds = np.broadcast_to(sd_b, shape)[active]
    flat_pos = np.flatnonzero(active.ravel())
    values = np.empty(means.shape, dtype=np.float64)
    pending = np.ones(means.shape, dtype=bool)

    for attempt in range(max_attempts):
        if not pending.any():
            break
        u = uniform_open(seed, stream, idx_a[pending], idx_b[pending], attempt)
        draw = means[pending] + sds[pending] * ndtri(u)
        ok = (draw >= lo) & (draw <= hi)
        sel = np.flatnonzero(pending)
        values[sel[ok]] = draw[ok]
        pending[sel[ok]] = False
    if pending.any():
        raise RuntimeError(
            f"truncated draw failed to land in [{lo}, {hi}] after {max_attempts} attempts"
        )

    out.ravel()[flat_pos] = values
    return out
