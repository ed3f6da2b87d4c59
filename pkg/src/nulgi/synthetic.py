"""Seeded synthetic survival spectra for end-to-end and power studies."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .oscillation import OscParams, accumulated_phase, survival_probability
from .sampling import STREAM_SYNTH_ENERGY, STREAM_SYNTH_PROB, truncated_normal, uniform_open
from .selection import MeasuredPoint

TRUTH_MODES = ("quantum", "classical_flat")

# Interior bins move by up to this fraction of one log-spacing step. An
# exactly geometric grid makes every phase ratio a power of one number, which
# quantizes the sum-rule residuals: for typical bin counts the smallest
# nonzero residual sits near 0.7%, so sub-percent tolerances would select
# nothing at all. The jitter restores the quasi-random phase coincidences a
# real binned spectrum has.
_PLACEMENT_JITTER = 0.25

# Relative errors reference at least this probability so bins near a deep
# oscillation minimum keep a usable uncertainty.
_REL_ERROR_FLOOR = 0.05


def generate_synthetic(
    params: OscParams,
    truth: str,
    bins: int,
    e_min_gev: float,
    e_max_gev: float,
    rel_error: float,
    seed: int,
    flat_p: float = 0.5,
) -> list[MeasuredPoint]:
    """Generate a noisy spectrum on a jittered log-spaced energy grid.

    Parameters
    ----------
    truth : str
        "quantum" samples around the survival curve of params;
        "classical_flat" samples around the constant flat_p.
    rel_error : float
        Per-bin relative uncertainty; the per-bin standard deviation is
        rel_error * max(p_true, 0.05). Zero gives exact curve values.
    seed : int
        Drives both the bin placement jitter and the probability noise;
        equal seeds reproduce the dataset bit for bit.

    Returns
    -------
    list of MeasuredPoint sorted by ascending energy, sigma_stat set to the
    generating standard deviation, phases not attached.
    """
    if truth not in TRUTH_MODES:
        raise DomainError(f"truth must be one of {TRUTH_MODES}, got {truth!r}")
    if not isinstance(bins, int) or bins < 3:
        raise DomainError(f"bins must be an integer >= 3, got {bins}")
    if not 0.0 < e_min_gev < e_max_gev:
        raise DomainError("need 0 < e_min_gev < e_max_gev")
    if rel_error < 0.0:
        raise DomainError("rel_error must be non-negative")
    if not 0.0 <= flat_p <= 1.0:
        raise DomainError(f"flat_p must lie in [0, 1], got {flat_p}")

    # Log-spaced grid positions; endpoints stay exact, interior bins jitter
    # by less than half a step so ordering and coverage are preserved.
    positions = np.arange(bins, dtype=float)
    shift = (2.0 * uniform_open(seed, STREAM_SYNTH_ENERGY, 0, positions.astype(int)) - 1.0)
    positions[1:-1] += _PLACEMENT_JITTER * shift[1:-1]
    energies = e_min_gev * (e_max_gev / e_min_gev) ** (positions / (bins - 1))

    if truth == "quantum":
        psis = np.array([accumulated_phase(params, e) for e in energies])
        p_true = np.asarray(survival_probability(params.sin2_2theta, psis))
    else:
        p_true = np.full(bins, flat_p)

    sds = rel_error * np.maximum(p_true, _REL_ERROR_FLOOR)
    p_obs = truncated_normal(
        seed, STREAM_SYNTH_PROB, 0, np.arange(bins), p_true, sds
    )
    return [
        MeasuredPoint(energy_gev=float(e), p_mumu=float(p), sigma_stat=float(s))
        for e, p, s in zip(energies, p_obs, sds)
    ]
