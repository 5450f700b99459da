"""Basis enumeration, state vectors and exact propagation.

Basis states are tuples of per-site level labels. For the three-level
``"v_structure"`` model the labels are ``"0"``, ``"-"``, ``"+"``; for the
``"hardcore"`` model they are ``"0"`` (empty) and ``"1"`` (occupied).
States are ordered lexicographically with site 0 most significant and level
order ``0 < - < +`` (resp. ``0 < 1``), so the index of a state is its label
string read as a base-3 (resp. base-2) number.

Hamiltonian entries are frequencies in MHz (energies in units of h * MHz)
and times are in microseconds; the propagator is ``exp(-2j*pi*H*t)``.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

V_LEVELS = ("0", "-", "+")
HARDCORE_LEVELS = ("0", "1")
MODEL_KINDS = ("v_structure", "hardcore")

HERMITIAN_ATOL = 1e-10


class NonHermitianError(ValueError):
    """Raised when a generator passed to :func:`evolve` is not Hermitian."""


def levels_for(model_kind: str) -> tuple[str, ...]:
    if model_kind == "v_structure":
        return V_LEVELS
    if model_kind == "hardcore":
        return HARDCORE_LEVELS
    raise ValueError(f"unknown model kind {model_kind!r}; expected one of {MODEL_KINDS}")


def enumerate_basis(n_sites: int, model_kind: str = "v_structure") -> list[tuple[str, ...]]:
    """All basis states of ``n_sites`` sites in the documented order."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    return list(itertools.product(levels_for(model_kind), repeat=n_sites))


def parse_state(label: str) -> tuple[str, ...]:
    """``"-00"`` -> ``("-", "0", "0")``."""
    return tuple(label)


def state_label(state: Sequence[str]) -> str:
    return "".join(state)


def basis_index(state: Sequence[str], model_kind: str = "v_structure") -> int:
    levels = levels_for(model_kind)
    base = len(levels)
    index = 0
    for label in state:
        index = index * base + levels.index(label)
    return index


def excitation_number(state: Sequence[str]) -> int:
    """Number of sites that are not in the ground level ``"0"``."""
    return sum(1 for label in state if label != "0")


def basis_vector(state: Sequence[str] | str, model_kind: str = "v_structure") -> np.ndarray:
    if isinstance(state, str):
        state = parse_state(state)
    dim = len(levels_for(model_kind)) ** len(state)
    psi = np.zeros(dim, dtype=np.complex128)
    psi[basis_index(state, model_kind)] = 1.0
    return psi


def excitation_counts(n_sites: int, model_kind: str = "v_structure") -> np.ndarray:
    """Excitation number of every basis state, in basis order."""
    base = len(levels_for(model_kind))
    digits = np.array(list(itertools.product(range(base), repeat=n_sites)), dtype=np.int64)
    return (digits != 0).sum(axis=1)


def number_operator(n_sites: int, model_kind: str = "v_structure") -> np.ndarray:
    """Total excitation-number operator (diagonal in the basis)."""
    return np.diag(excitation_counts(n_sites, model_kind).astype(np.complex128))


def hermiticity_error(H: np.ndarray) -> float:
    H = np.asarray(H)
    return float(np.max(np.abs(H - H.conj().T))) if H.size else 0.0


def check_hermitian(H: np.ndarray, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NonHermitianError(f"generator must be a square matrix, got shape {H.shape}")
    err = hermiticity_error(H)
    if err > atol:
        raise NonHermitianError(f"generator is not Hermitian: max |H - H^dagger| = {err:.3e} > {atol:.1e}")
    return H


def evolve(H: np.ndarray, psi0: np.ndarray, times, *, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    """Exact propagation ``psi(t) = exp(-2j*pi*H*t) psi0`` for every time.

    One eigendecomposition of ``H`` is reused for all times.

    Returns
    -------
    ndarray, shape (len(times), dim)
    """
    H = check_hermitian(H, atol)
    psi0 = np.asarray(psi0, dtype=np.complex128)
    if psi0.shape != (H.shape[0],):
        raise ValueError(f"state of shape {psi0.shape} does not match generator of dimension {H.shape[0]}")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"initial state is not normalized (norm = {norm!r})")
    times = np.atleast_1d(np.asarray(times, dtype=np.float64))
    # symmetrize so eigh sees exactly the Hermitian part
    energies, vectors = np.linalg.eigh(0.5 * (H + H.conj().T))
    coeffs = vectors.conj().T @ psi0
    phases = np.exp(-2j * np.pi * np.outer(times, energies))
    return (phases * coeffs) @ vectors.T
