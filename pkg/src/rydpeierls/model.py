"""Hamiltonians: full three-level exchange model, single-excitation Peierls
ring, and the density-dependent many-body ring.

All energies are in h * MHz. Couplings in :class:`VModelParams` are quoted at
the layout's reference distance and scale as ``1/r**3``.

Phase convention
----------------
Layouts are indexed counterclockwise. With ``field_sign = +1`` the full
model realizes the perturbative hop ``t e^{i phi} = t_b + e^{4i pi/3} w^2/mu``
on the hops *against* the index order (site i+1 -> i), so the effective ring
Hamiltonians here attach ``e^{+i phi}`` to those hops::

    H_eff = -t sum_i [ e^{-i phi} b_{i+1}^dag b_i + e^{+i phi} b_i^dag b_{i+1} ]

With this choice a positive ``phi`` (``3 phi`` near ``pi/2``) drives an
excitation prepared on site 0 around the ring in the order 0 -> 2 -> 1 -> 0,
in agreement with the full model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .geometry import SiteLayout, bond_arrays
from .hilbert import excitation_counts

DEFAULT_VDW = 0.07


@dataclass(frozen=True)
class VModelParams:
    """Exchange couplings ``t_a``, ``t_b``, ``w`` (at ``r_ref``), the signed
    splitting ``mu = E_+ - E_-`` and the magnetic-field orientation."""

    t_a: float
    t_b: float
    w: float
    mu: float
    field_sign: int = 1

    def __post_init__(self):
        for name in ("t_a", "t_b", "w"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {value}")
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu}")
        if self.field_sign not in (1, -1):
            raise ValueError(f"field_sign must be +1 or -1, got {self.field_sign}")

    def reversed_field(self) -> "VModelParams":
        return VModelParams(self.t_a, self.t_b, self.w, self.mu, -self.field_sign)


# measured at r = 11 um, B_z < 0 (mu/h = -16 MHz)
MEASURED_PARAMS = VModelParams(t_a=1.5, t_b=0.55, w=2.7, mu=-16.0, field_sign=1)


@dataclass(frozen=True)
class EffectiveParams:
    t: float
    phi: float
    delta: float = 0.0

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"t must be non-negative, got {self.t}")

    @classmethod
    def from_hop(cls, amplitude: complex, t_b: float) -> "EffectiveParams":
        """Build from a complex single-excitation hop and the bare ``t_b``,
        with ``delta = (t_b - t) / t``."""
        t = abs(amplitude)
        return cls(t, float(np.angle(amplitude)), (t_b - t) / t)


def scale_coupling(x_ref: float, r_ref: float, r) -> float | np.ndarray:
    """``x_ref * (r_ref / r)**3``."""
    r = np.asarray(r, dtype=np.float64)
    if np.any(r <= 0):
        raise ValueError("distance must be positive")
    out = x_ref * (r_ref / r) ** 3
    return float(out) if out.ndim == 0 else out


def hop_tensor(layout: SiteLayout, params: VModelParams) -> np.ndarray:
    """Amplitudes ``hop[src, dst, a, b]`` for moving an excitation in level
    ``a`` on ``src`` to level ``b`` on ``dst`` (0 = ``-``, 1 = ``+``)."""
    n = layout.n_sites
    r, phi = bond_arrays(layout)
    hop = np.zeros((n, n, 2, 2), dtype=np.complex128)
    off = ~np.eye(n, dtype=bool)
    scale = np.zeros((n, n))
    scale[off] = (layout.r_ref / r[off]) ** 3
    flip = np.exp(-2j * params.field_sign * phi)
    hop[..., 0, 0] = -params.t_b * scale
    hop[..., 1, 1] = -params.t_a * scale
    hop[..., 0, 1] = params.w * scale * flip
    hop[..., 1, 0] = params.w * scale * flip.conj()
    hop[~off] = 0.0
    return hop


def v_hamiltonian(layout: SiteLayout, params: VModelParams, vdw: float = 0.0) -> np.ndarray:
    """Like :func:`full_v_hamiltonian` but accepts layouts of any size."""
    onsite = np.array([-params.mu / 2.0, params.mu / 2.0])
    return _backend.exchange_hamiltonian(layout.n_sites, hop_tensor(layout, params), onsite, float(vdw))


def full_v_hamiltonian(layout: SiteLayout, params: VModelParams, vdw: float = 0.0) -> np.ndarray:
    """Three-level exchange Hamiltonian on the ``3**n`` basis.

    An excitation hopping from site i to j keeps its internal state with
    amplitude ``-t_b`` (``-``) or ``-t_a`` (``+``), or flips ``- -> +`` with
    ``w exp(-2i s phi_ij)`` (``s = field_sign``) and ``+ -> -`` with the
    conjugate. Levels ``+`` and ``-`` sit at ``+mu/2`` and ``-mu/2``.
    Optional ``vdw`` adds a constant shift per excited pair.
    """
    if layout.n_sites < 2:
        raise ValueError("the exchange model needs at least two sites")
    return v_hamiltonian(layout, params, vdw)


def effective_single_hamiltonian(t: float, phi: float, n_sites: int = 3) -> np.ndarray:
    """One-excitation ring with hop ``-t e^{-i phi}`` for i -> i+1 (periodic)."""
    if n_sites < 2:
        raise ValueError("a ring needs at least two sites")
    H = np.zeros((n_sites, n_sites), dtype=np.complex128)
    forward = -t * np.exp(-1j * phi)
    for i in range(n_sites):
        j = (i + 1) % n_sites
        H[j, i] += forward
        H[i, j] += np.conj(forward)
    return H


def _hardcore_ops(n_sites: int):
    lower = np.array([[0.0, 1.0], [0.0, 0.0]])
    eye = np.eye(2)
    ops = []
    for k in range(n_sites):
        op = np.array([[1.0]])
        for m in range(n_sites):
            op = np.kron(op, lower if m == k else eye)
        ops.append(op)
    return ops


def many_body_effective(eff: EffectiveParams) -> np.ndarray:
    """Density-dependent ring on the 8-dimensional three-site hard-core space.

    The hop i -> i+1 has amplitude ``-t e^{-i phi}`` when site i+2 is empty
    and the real amplitude ``-t (1 + delta)`` when it is occupied.
    """
    b = _hardcore_ops(3)
    n = [op.T @ op for op in b]
    eye = np.eye(8)
    H = np.zeros((8, 8), dtype=np.complex128)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        hop = b[j].T @ b[i]
        term = np.exp(-1j * eff.phi) * hop @ (eye - n[k]) + (1.0 + eff.delta) * hop @ n[k]
        H += term + term.conj().T
    return -eff.t * H


def add_vdw_shift(H: np.ndarray, v: float, n_sites: int, model_kind: str = "v_structure") -> np.ndarray:
    """Return ``H + v * sum_{i<j} n_i n_j`` (constant shift per excited pair)."""
    if not math.isfinite(v):
        raise ValueError("vdW shift must be finite")
    counts = excitation_counts(n_sites, model_kind)
    if H.shape != (counts.size, counts.size):
        raise ValueError(f"operator of shape {H.shape} does not match {n_sites} sites ({model_kind})")
    pairs = counts * (counts - 1) // 2
    return H + np.diag(v * pairs).astype(H.dtype)
