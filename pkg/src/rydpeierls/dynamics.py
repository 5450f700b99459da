"""Measured observables: detection patterns, center of mass, imbalance and
the residual-oscillation frequency.

The detector only tells whether a site is in ``|0>`` (bit 0) or in any
excited level (bit 1). A pattern is a bit string over the sites with site 0
first, e.g. ``"100"``; its integer index reads the string as binary.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import periodogram

from .geometry import SiteLayout
from .hilbert import levels_for


def pattern_labels(n_sites: int) -> list[str]:
    return ["".join(bits) for bits in itertools.product("01", repeat=n_sites)]


def pattern_index(label: str) -> int:
    if not label or set(label) - {"0", "1"}:
        raise ValueError(f"not a detection pattern: {label!r}")
    return int(label, 2)


def pattern_map(n_sites: int, model_kind: str = "v_structure") -> np.ndarray:
    """Detection-pattern index of every basis state."""
    base = len(levels_for(model_kind))
    digits = np.array(list(itertools.product(range(base), repeat=n_sites)), dtype=np.int64)
    weights = 1 << np.arange(n_sites - 1, -1, -1)
    return ((digits != 0).astype(np.int64) * weights).sum(axis=1)


def marginalize(populations: np.ndarray, n_sites: int, model_kind: str = "v_structure") -> np.ndarray:
    """Sum basis populations (..., dim) into pattern probabilities (..., 2**n)."""
    pops = np.asarray(populations, dtype=np.float64)
    mapping = pattern_map(n_sites, model_kind)
    out = np.zeros(pops.shape[:-1] + (1 << n_sites,))
    for k in range(1 << n_sites):
        out[..., k] = pops[..., mapping == k].sum(axis=-1)
    return out


@dataclass
class MeasuredProbabilities:
    """Pattern probabilities over time, optionally with standard errors.

    ``probs`` and ``sem`` have shape (len(times), 2**n_sites), columns in
    :func:`pattern_labels` order.
    """

    times: np.ndarray
    probs: np.ndarray
    sem: np.ndarray | None = None

    @property
    def n_sites(self) -> int:
        return int(round(math.log2(self.probs.shape[1])))

    @property
    def labels(self) -> list[str]:
        return pattern_labels(self.n_sites)

    def __getitem__(self, pattern: str) -> np.ndarray:
        if len(pattern) != self.n_sites:
            raise KeyError(pattern)
        return self.probs[:, pattern_index(pattern)]

    def error(self, pattern: str) -> np.ndarray:
        if self.sem is None:
            return np.zeros(len(self.times))
        return self.sem[:, pattern_index(pattern)]

    def single_site(self) -> np.ndarray:
        """Probabilities of the patterns with exactly one excited site,
        shape (T, n_sites)."""
        n = self.n_sites
        return np.column_stack([self.probs[:, 1 << (n - 1 - i)] for i in range(n)])


def detection_patterns(states, n_sites: int, times=None, model_kind: str = "v_structure") -> MeasuredProbabilities:
    """Pattern probabilities of a state vector or a trajectory (T, dim)."""
    states = np.asarray(states)
    if states.ndim == 1:
        states = states[None, :]
    probs = marginalize(np.abs(states) ** 2, n_sites, model_kind)
    if times is None:
        times = np.zeros(len(probs))
    return MeasuredProbabilities(np.atleast_1d(np.asarray(times, dtype=np.float64)), probs)


def center_of_mass(p, layout: SiteLayout) -> tuple[float, float]:
    """``(sum x_i p_i / sum p_i, sum y_i p_i / sum p_i)`` in um."""
    p = np.asarray(p, dtype=np.float64)
    if p.shape != (layout.n_sites,):
        raise ValueError(f"need one weight per site ({layout.n_sites}), got shape {p.shape}")
    total = p.sum()
    if not total > 0:
        raise ValueError("center of mass undefined: all site probabilities are zero")
    x, y = (p @ layout.positions) / total
    return float(x), float(y)


def imbalance(p_first, p_last):
    """``(P_first - P_last) / (P_first + P_last)``; NaN where the denominator
    vanishes."""
    a = np.asarray(p_first, dtype=np.float64)
    b = np.asarray(p_last, dtype=np.float64)
    den = a + b
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, (a - b) / np.where(den > 0, den, 1.0), np.nan)
    return float(out) if out.ndim == 0 else out


def residual_frequency(series, dt: float, reference=None, *, window: str = "hann", min_freq: float = 0.0):
    """Dominant frequency (MHz) of ``series - reference`` from a periodogram.

    The mean is removed and a Hann window applied. ``min_freq`` restricts the
    search to frequencies at or above it. Returns ``None`` when the residual
    is identically zero.
    """
    x = np.asarray(series, dtype=np.float64)
    if reference is not None:
        x = x - np.asarray(reference, dtype=np.float64)
    if x.ndim != 1 or x.size < 64:
        raise ValueError(f"need a uniformly sampled series of at least 64 points, got {x.size}")
    if not dt > 0:
        raise ValueError("dt must be positive")
    x = x - x.mean()
    if not np.any(np.abs(x) > 1e-14):
        return None
    freqs, power = periodogram(x, fs=1.0 / dt, window=window, detrend=False)
    keep = freqs >= min_freq
    if not np.any(keep):
        raise ValueError(f"no frequency bins at or above {min_freq} MHz")
    freqs, power = freqs[keep], power[keep]
    return float(freqs[np.argmax(power)])
