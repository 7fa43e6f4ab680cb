import os
import subprocess
import sys

import numpy as np
import pytest

from xpjost import _fallback, kernels

try:
    from xpjost import _kernels
except ImportError:  # extension not built
    _kernels = None

needs_ext = pytest.mark.skipif(_kernels is None, reason="compiled extension not built")


def random_hermitian(n, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (X + X.conj().T)


@pytest.mark.parametrize("n", [1, 2, 5, 16, 33])
def test_fallback_jacobi_matches_lapack(n):
    A = random_hermitian(n, n)
    w, V, sweeps = _fallback.jacobi_hermitian(A)
    assert sweeps >= 0
    assert np.allclose(np.sort(w), np.linalg.eigvalsh(A), atol=1e-10)
    assert np.allclose(A @ V, V * w, atol=1e-9)


def test_fallback_zero_matrix():
    w, V, sweeps = _fallback.jacobi_hermitian(np.zeros((3, 3)))
    assert np.all(w == 0) and sweeps == 0


def test_sweep_budget_reported():
    _, _, sweeps = _fallback.jacobi_hermitian(random_hermitian(12, 1), max_sweeps=1)
    assert sweeps == -1


@needs_ext
@pytest.mark.parametrize("n", [2, 7, 40])
def test_compiled_matches_fallback(n):
    A = random_hermitian(n, 100 + n)
    w1 = np.sort(_kernels.jacobi_hermitian(A, 1e-12, 60)[0])
    w2 = np.sort(_fallback.jacobi_hermitian(A, 1e-12, 60)[0])
    assert np.allclose(w1, w2, atol=1e-10)


@needs_ext
def test_compiled_dirichlet_sum_matches_fallback():
    s = np.array([0.5 + 3j, 2.0, 0.7 - 14j])
    logs = np.log(np.arange(1, 200) + 1.0)
    coef = np.cos(np.arange(199.0))
    assert np.allclose(_kernels.dirichlet_sum(s, logs, coef),
                       _fallback.dirichlet_sum(s, logs, coef), rtol=1e-13)


def test_backend_flag():
    assert kernels.BACKEND in ("compiled", "python")
    if _kernels is not None and os.environ.get("XPJOST_PURE", "") in ("", "0"):
        assert kernels.BACKEND == "compiled"


def test_pure_environment_switch():
    env = dict(os.environ, XPJOST_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from xpjost import kernels; print(kernels.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
