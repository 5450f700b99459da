"""Pure-Python implementations of the hot kernels.

These mirror ``_kernels.pyx`` operation for operation so that both backends
produce bit-identical output for identical inputs.
"""

import numpy as np


def exchange_hamiltonian(n_sites, hop, onsite, vdw):
    """Dense V-structure exchange Hamiltonian on the 3**n_sites basis.

    Parameters
    ----------
    n_sites : int
    hop : complex array, shape (n, n, 2, 2)
        ``hop[src, dst, a, b]`` is the amplitude for moving an excitation in
        internal level ``a`` on ``src`` to level ``b`` on ``dst``
        (level 0 is ``-``, level 1 is ``+``).
    onsite : float array, shape (2,)
        Energies of the ``-`` and ``+`` levels.
    vdw : float
        Constant shift per pair of excited sites.
    """
    hop = np.asarray(hop, dtype=np.complex128)
    onsite = np.asarray(onsite, dtype=np.float64)
    dim = 3 ** n_sites
    H = np.zeros((dim, dim), dtype=np.complex128)
    powers = [3 ** (n_sites - 1 - k) for k in range(n_sites)]
    digits = [0] * n_sites
    for s in range(dim):
        rem = s
        for k in range(n_sites):
            digits[k] = rem // powers[k]
            rem -= digits[k] * powers[k]
        diag = 0.0
        n_exc = 0
        for k in range(n_sites):
            if digits[k]:
                diag += onsite[digits[k] - 1]
                n_exc += 1
        diag += vdw * (n_exc * (n_exc - 1) // 2)
        H[s, s] += diag
        for src in range(n_sites):
            a = digits[src]
            if a == 0:
                continue
            for dst in range(n_sites):
                if dst == src or digits[dst] != 0:
                    continue
                base = s - a * powers[src]
                for b in (1, 2):
                    H[base + b * powers[dst], s] += hop[src, dst, a - 1, b - 1]
    return H


def sample_detect(pattern_probs, u_pattern, u_flip, eps_1to0, eps_0to1):
    """Draw one detection pattern per row and apply independent bit flips.

    Parameters
    ----------
    pattern_probs : float array, shape (T, 2**n)
        Pattern distribution per time; pattern index has site 0 as the most
        significant bit.
    u_pattern : float array, shape (T,)
        Uniforms for inverse-CDF sampling.
    u_flip : float array, shape (T, n)
        Uniforms for the per-site flip decisions.

    Returns
    -------
    int64 array, shape (T,)
        Observed pattern indices.
    """
    probs = np.asarray(pattern_probs, dtype=np.float64)
    n_times, n_patterns = probs.shape
    n_sites = u_flip.shape[1]
    cdf = np.cumsum(probs, axis=1)
    drawn = (u_pattern[:, None] >= cdf).sum(axis=1)
    drawn = np.minimum(drawn, n_patterns - 1).astype(np.int64)
    shifts = np.arange(n_sites - 1, -1, -1)
    bits = (drawn[:, None] >> shifts) & 1
    flip = np.where(bits == 1, u_flip < eps_1to0, u_flip < eps_0to1)
    bits = bits ^ flip.astype(np.int64)
    return (bits << shifts).sum(axis=1).astype(np.int64)
