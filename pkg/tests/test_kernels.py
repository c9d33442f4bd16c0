import os
import subprocess
import sys

import numpy as np
import pytest

from triunitary import _fallback, kernels
from triunitary.gates import haar_unitary
from triunitary.tensor import embed

try:
    from triunitary import _kernels
except ImportError:  # extension not built
    _kernels = None

IMPLS = [_fallback] + ([_kernels] if _kernels else [])


def _state(n, rng):
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize("impl", IMPLS)
@pytest.mark.parametrize("targets", [(0,), (3,), (0, 4), (4, 1), (2, 0, 3), (1, 2, 4)])
def test_apply_matrix_matches_dense(impl, targets, rng):
    n = 5
    m = haar_unitary(1 << len(targets), rng)
    psi = _state(n, rng)
    expect = embed(m, targets, n) @ psi
    out = kernels.apply_matrix(psi.copy(), m, targets, n, impl=impl)
    assert np.allclose(out, expect)


@pytest.mark.parametrize("impl", IMPLS)
def test_apply_diagonal(impl, rng):
    n = 4
    d = np.exp(1j * rng.uniform(size=4))
    psi = _state(n, rng)
    expect = embed(np.diag(d), (3, 1), n) @ psi
    assert np.allclose(kernels.apply_diagonal(psi.copy(), d, (3, 1), n, impl=impl), expect)


@pytest.mark.parametrize("impl", IMPLS)
def test_site_marginals(impl, rng):
    n = 4
    phi, psi = _state(n, rng), _state(n, rng)
    out = kernels.site_marginals(phi, psi, [0, 2, 3], n, impl=impl)
    rho = np.outer(phi, psi.conj()).reshape((2,) * 8)
    for k, s in enumerate([0, 2, 3]):
        rest = [q for q in range(n) if q != s]
        m = rho.transpose(rest + [q + n for q in rest] + [s, s + n]).reshape(8, 8, 2, 2)
        assert np.allclose(out[k], np.einsum("ii...->...", m))


def test_backends_agree(rng):
    if _kernels is None:
        pytest.skip("compiled extension not built")
    n = 10
    m = haar_unitary(8, rng)
    psi = _state(n, rng)
    a = kernels.apply_matrix(psi.copy(), m, (7, 2, 5), n, impl=_fallback)
    b = kernels.apply_matrix(psi.copy(), m, (7, 2, 5), n, impl=_kernels)
    assert np.allclose(a, b, atol=1e-13)


def test_input_validation(rng):
    psi = _state(3, rng)
    with pytest.raises(ValueError):
        kernels.apply_matrix(psi, np.eye(4), (0, 0), 3)
    with pytest.raises(ValueError):
        kernels.apply_matrix(psi, np.eye(2), (3,), 3)
    with pytest.raises(TypeError):
        kernels.apply_matrix(psi.astype(np.complex64), np.eye(2), (0,), 3)


def test_pure_python_switch():
    env = dict(os.environ, TRIUNITARY_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import triunitary.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_backend_name():
    assert kernels.BACKEND in ("cython", "numpy")
