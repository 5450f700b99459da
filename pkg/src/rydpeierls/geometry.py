"""Planar site layouts, bond geometry and positional jitter.

Positions are in micrometers. Sites are indexed from 0 in code; every
generated plaquette is indexed counterclockwise and centered on the origin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

DEFAULT_JITTER_SIGMA = 0.2


@dataclass(frozen=True)
class SiteLayout:
    """Ordered site positions (um) and the reference distance at which the
    model couplings are quoted."""

    positions: np.ndarray
    r_ref: float

    def __post_init__(self):
        pos = np.array(self.positions, dtype=np.float64)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
            raise ValueError(f"positions must have shape (n, 2), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if not self.r_ref > 0:
            raise ValueError(f"r_ref must be positive, got {self.r_ref}")
        if pos.shape[0] > 1:
            d = distance_matrix(pos)
            off = d[~np.eye(len(pos), dtype=bool)]
            if np.any(off <= 0):
                raise ValueError("sites must be pairwise distinct")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "r_ref", float(self.r_ref))

    @property
    def n_sites(self) -> int:
        return self.positions.shape[0]

    def subset(self, sites: Sequence[int]) -> "SiteLayout":
        return SiteLayout(self.positions[list(sites)], self.r_ref)


class BondGeometry(NamedTuple):
    r: float
    phi: float


def distance_matrix(positions) -> np.ndarray:
    pos = np.asarray(positions, dtype=np.float64)
    diff = pos[None, :, :] - pos[:, None, :]
    return np.hypot(diff[..., 0], diff[..., 1])


def _check_side(side: float) -> None:
    if not side > 0:
        raise ValueError(f"side length must be positive, got {side}")


def regular_polygon(n: int, side: float, start_angle: float = math.pi / 2) -> SiteLayout:
    _check_side(side)
    radius = side / (2.0 * math.sin(math.pi / n))
    angles = start_angle + 2.0 * math.pi * np.arange(n) / n
    return SiteLayout(np.column_stack([radius * np.cos(angles), radius * np.sin(angles)]), side)


def equilateral(side: float) -> SiteLayout:
    """Three sites on an equilateral triangle; site 0 on the +y axis."""
    return regular_polygon(3, side)


def isosceles(gamma_deg: float, r: float) -> SiteLayout:
    """Isosceles triangle with ``r01 = r12 = r`` and ``r02 = 2 r cos(gamma/2)``.

    ``gamma`` is the deviation from collinearity: the apex angle at site 1 is
    ``180 - gamma`` degrees, ``gamma = 0`` puts the sites on a line 0-1-2 and
    ``gamma = 120`` gives the equilateral triangle.
    """
    if not 0.0 <= gamma_deg < 180.0:
        raise ValueError(f"gamma must lie in [0, 180) degrees, got {gamma_deg}")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    half = math.radians(gamma_deg) / 2.0
    c, s = r * math.cos(half), r * math.sin(half)
    pos = np.array([[c, -s], [0.0, 0.0], [-c, -s]])
    return SiteLayout(pos - pos.mean(axis=0), r)


def square(side: float) -> SiteLayout:
    return regular_polygon(4, side, start_angle=math.pi / 4)


def honeycomb(side: float) -> SiteLayout:
    """Regular hexagon (one honeycomb plaquette) with nearest distance ``side``."""
    return regular_polygon(6, side, start_angle=0.0)


def explicit(positions, r_ref: float) -> SiteLayout:
    return SiteLayout(np.asarray(positions, dtype=np.float64), r_ref)


def bond(layout: SiteLayout, i: int, j: int) -> BondGeometry:
    """Distance and polar angle in (-pi, pi] of the vector from site i to j."""
    n = layout.n_sites
    if i == j:
        raise ValueError("bond needs two different sites")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"site index out of range for {n} sites: ({i}, {j})")
    dx, dy = layout.positions[j] - layout.positions[i]
    return BondGeometry(float(math.hypot(dx, dy)), float(math.atan2(dy, dx)))


def bond_arrays(layout: SiteLayout) -> tuple[np.ndarray, np.ndarray]:
    """Matrices of distances and polar angles for every ordered pair."""
    pos = layout.positions
    diff = pos[None, :, :] - pos[:, None, :]
    return np.hypot(diff[..., 0], diff[..., 1]), np.arctan2(diff[..., 1], diff[..., 0])


def jitter(layout: SiteLayout, sigma: float, rng: np.random.Generator) -> SiteLayout:
    """Displace every coordinate by an independent Gaussian of width ``sigma``.

    Always draws ``2 * n_sites`` normals so that the stream layout does not
    depend on ``sigma``.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    noise = rng.standard_normal(layout.positions.shape)
    if sigma == 0:
        return layout
    return SiteLayout(layout.positions + sigma * noise, layout.r_ref)
