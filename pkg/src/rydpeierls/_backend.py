"""Kernel backend selection.

The compiled Cython extension is used when it was built; otherwise, or when
``RYDPEIERLS_PURE_PYTHON`` is set to a non-empty value, the pure-Python
implementation is used. Both expose the same functions with identical output.
"""

import os

if os.environ.get("RYDPEIERLS_PURE_PYTHON"):
    from ._kernels_py import exchange_hamiltonian, sample_detect

    BACKEND = "python"
else:
    try:
        from ._kernels import exchange_hamiltonian, sample_detect

        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import exchange_hamiltonian, sample_detect

        BACKEND = "python"

__all__ = ["BACKEND", "exchange_hamiltonian", "sample_detect"]
