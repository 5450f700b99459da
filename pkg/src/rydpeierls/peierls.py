"""Perturbative complex hops and plaquette fluxes.

The closed-form couplings here come from adiabatically eliminating the
``+`` level (second order in ``w/mu``; fourth order for the blocked
two-excitation hop). ``field_sign = -1`` conjugates every virtual phase.
Fluxes are reported in (-pi, pi].
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .model import VModelParams

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


def wrap_phase(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    y = math.remainder(x, 2.0 * math.pi)
    return math.pi if y == -math.pi else y


@dataclass(frozen=True)
class ComplexHop:
    amplitude: complex

    @property
    def t(self) -> float:
        return abs(self.amplitude)

    @property
    def phi(self) -> float:
        return wrap_phase(cmath.phase(self.amplitude))


@dataclass(frozen=True)
class FluxReport:
    """Directed bond couplings around an oriented plaquette and their flux.

    ``bond_phases`` follow the plaquette orientation; ``total_flux`` is their
    sum reduced to (-pi, pi]. ``couplings`` keeps the named complex
    amplitudes that produced the report.
    """

    bond_phases: tuple[float, ...]
    total_flux: float
    alternating_flux: float | None = None
    couplings: dict = field(default_factory=dict)

    def reversed(self) -> "FluxReport":
        """Same plaquette traversed in the opposite direction."""
        phases = tuple(-p for p in reversed(self.bond_phases))
        alt = None if self.alternating_flux is None else wrap_phase(-self.alternating_flux)
        couplings = {k: np.conj(v) for k, v in self.couplings.items()}
        return FluxReport(phases, wrap_phase(sum(phases)), alt, couplings)


def plaquette_flux(amplitudes) -> FluxReport:
    phases = tuple(wrap_phase(cmath.phase(a)) for a in amplitudes)
    return FluxReport(phases, wrap_phase(sum(phases)), couplings={f"bond{k}": complex(a) for k, a in enumerate(amplitudes)})


def _require_mu(mu: float) -> None:
    if mu == 0:
        raise ValueError("mu = 0: the perturbative elimination of the + level is invalid")


def _sign(field_sign: int) -> int:
    if field_sign not in (1, -1):
        raise ValueError(f"field_sign must be +1 or -1, got {field_sign}")
    return field_sign


def triangle_hop(t_b: float, w: float, mu: float, field_sign: int = 1) -> ComplexHop:
    """Second-order hop on the equilateral triangle,
    ``t e^{i phi} = t_b + e^{4i pi/3} w^2 / mu``."""
    _require_mu(mu)
    s = _sign(field_sign)
    return ComplexHop(t_b + cmath.exp(s * 4j * math.pi / 3.0) * w * w / mu)


def two_excitation_hop(t_b: float, w: float, mu: float, field_sign: int = 1) -> ComplexHop:
    """Fourth-order hop when the third site is occupied,
    ``t_b + (w^4 / mu^3) e^{-4i pi/3}``."""
    _require_mu(mu)
    s = _sign(field_sign)
    return ComplexHop(t_b + w**4 / mu**3 * cmath.exp(-s * 4j * math.pi / 3.0))


def kappa(gamma_deg: float) -> float:
    """``(r_12 / r_13)**3 = 1 / (2 cos(gamma/2))**3``."""
    return 1.0 / (2.0 * math.cos(math.radians(gamma_deg) / 2.0)) ** 3


def isosceles_fluxes(gamma_deg: float, params: VModelParams) -> FluxReport:
    """Bond couplings and flux of the isosceles triangle.

    ``t12 = t23 = t_b + kappa w^2 e^{i gamma} / mu`` and
    ``t31 = kappa t_b + w^2 e^{-2i gamma} / mu``; the flux is
    ``arg t12 + arg t23 + arg t31``.
    """
    if not 0.0 <= gamma_deg < 180.0:
        raise ValueError(f"gamma must lie in [0, 180) degrees, got {gamma_deg}")
    _require_mu(params.mu)
    s = params.field_sign
    g = math.radians(gamma_deg)
    k = kappa(gamma_deg)
    w2 = params.w**2 / params.mu
    t12 = params.t_b + k * w2 * cmath.exp(s * 1j * g)
    t31 = k * params.t_b + w2 * cmath.exp(-s * 2j * g)
    report = plaquette_flux([t12, t12, t31])
    return FluxReport(report.bond_phases, report.total_flux, couplings={"t12": t12, "t23": t12, "t31": t31})


def square_couplings(params: VModelParams) -> FluxReport:
    """Square plaquette: ``t e^{i phi} = t_b + i w^2/(mu sqrt 2)`` on the
    edges, real diagonal ``t' = t_b/2^{3/2} - 2 w^2/mu``; flux ``4 phi``."""
    _require_mu(params.mu)
    s = params.field_sign
    w2 = params.w**2 / params.mu
    edge = params.t_b + s * 1j * w2 / SQRT2
    diagonal = params.t_b / 2.0**1.5 - 2.0 * w2
    phi = wrap_phase(cmath.phase(edge))
    return FluxReport((phi,) * 4, wrap_phase(4 * phi), couplings={"t": edge, "t_diag": diagonal})


def honeycomb_couplings(params: VModelParams) -> FluxReport:
    """Hexagonal plaquette couplings.

    Nearest ``t e^{i phi} = t_b + 3 w^2/(4 sqrt3 mu) e^{i pi/3}``,
    next-nearest ``t' e^{i phi'} = t_b/3^{3/2} + 139 w^2/(108 mu) e^{2i pi/3}``,
    opposite corners ``t'' = t_b/8 - 4 w^2/(3 sqrt3 mu)``. The homogeneous
    flux is ``6 phi``; the alternating flux is ``phi - phi'``.
    """
    _require_mu(params.mu)
    s = params.field_sign
    w2 = params.w**2 / params.mu
    nearest = params.t_b + 3.0 * w2 / (4.0 * SQRT3) * cmath.exp(s * 1j * math.pi / 3.0)
    next_nearest = params.t_b / 3.0**1.5 + 139.0 * w2 / 108.0 * cmath.exp(s * 2j * math.pi / 3.0)
    opposite = params.t_b / 8.0 - 4.0 * w2 / (3.0 * SQRT3)
    phi = wrap_phase(cmath.phase(nearest))
    phi2 = wrap_phase(cmath.phase(next_nearest))
    return FluxReport(
        (phi,) * 6,
        wrap_phase(6 * phi),
        alternating_flux=wrap_phase(phi - phi2),
        couplings={"t": nearest, "t_nn": next_nearest, "t_opp": opposite},
    )
