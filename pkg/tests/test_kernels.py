import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydpeierls import _backend, _kernels_py, geometry, model
from rydpeierls.hilbert import basis_index, enumerate_basis

try:
    from rydpeierls import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled kernels not built")


def naive_hamiltonian(layout, params, vdw):
    """Oracle: loop over basis states and apply each single hop explicitly."""
    n = layout.n_sites
    hop = model.hop_tensor(layout, params)
    basis = enumerate_basis(n)
    H = np.zeros((len(basis), len(basis)), dtype=complex)
    level = {"-": 0, "+": 1}
    for s in basis:
        col = basis_index(s)
        excited = [i for i in range(n) if s[i] != "0"]
        H[col, col] += sum(-params.mu / 2 if s[i] == "-" else params.mu / 2 for i in excited)
        H[col, col] += vdw * len(excited) * (len(excited) - 1) / 2
        for src in excited:
            for dst in range(n):
                if s[dst] != "0":
                    continue
                for new in "-+":
                    t = list(s)
                    t[src], t[dst] = "0", new
                    H[basis_index(t), col] += hop[src, dst, level[s[src]], level[new]]
    return H


@pytest.mark.parametrize("make", [lambda: geometry.equilateral(11), lambda: geometry.isosceles(37, 11), lambda: geometry.square(9)])
def test_builder_matches_oracle(make):
    lay = make()
    np.testing.assert_allclose(model.v_hamiltonian(lay, model.MEASURED_PARAMS, 0.07), naive_hamiltonian(lay, model.MEASURED_PARAMS, 0.07), atol=1e-14)


@needs_ext
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 5))
def test_exchange_backends_identical(seed, n):
    rng = np.random.default_rng(seed)
    hop = rng.normal(size=(n, n, 2, 2)) + 1j * rng.normal(size=(n, n, 2, 2))
    onsite = rng.normal(size=2)
    vdw = float(rng.normal())
    assert np.array_equal(_kernels.exchange_hamiltonian(n, hop, onsite, vdw), _kernels_py.exchange_hamiltonian(n, hop, onsite, vdw))


@needs_ext
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**31), n=st.integers(1, 6), T=st.integers(1, 50))
def test_sampling_backends_identical(seed, n, T):
    rng = np.random.default_rng(seed)
    p = rng.random((T, 2**n))
    p /= p.sum(axis=1, keepdims=True)
    u = rng.random(T)
    uf = rng.random((T, n))
    eps = rng.random(2) * 0.2
    a = _kernels.sample_detect(p, u, uf, eps[0], eps[1])
    b = _kernels_py.sample_detect(p, u, uf, eps[0], eps[1])
    assert np.array_equal(a, b)


def test_sampling_distribution():
    rng = np.random.default_rng(0)
    p = np.tile([0.1, 0.2, 0.3, 0.4], (200_000, 1))
    out = _backend.sample_detect(p, rng.random(200_000), rng.random((200_000, 2)), 0.0, 0.0)
    np.testing.assert_allclose(np.bincount(out, minlength=4) / 200_000, [0.1, 0.2, 0.3, 0.4], atol=0.005)


def test_sampling_handles_rounding():
    p = np.array([[0.5, 0.5 - 1e-12]])
    assert _backend.sample_detect(p, np.array([0.9999999999999]), np.ones((1, 1)), 0.0, 0.0)[0] == 1


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, RYDPEIERLS_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import rydpeierls; print(rydpeierls.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_benchmark_script_runs():
    script = os.path.join(os.path.dirname(__file__), "..", "benchmarks", "bench_kernels.py")
    out = subprocess.run([sys.executable, script, "--repeat", "1"], capture_output=True, text=True, check=True)
    assert "exchange_hamiltonian" in out.stdout and "sample_detect" in out.stdout
