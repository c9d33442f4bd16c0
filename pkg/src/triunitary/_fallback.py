"""Pure-numpy versions of the compiled kernels in ``_kernels.pyx``.

Same signatures and in-place semantics, so either module can back
:mod:`triunitary.kernels`.
"""

import numpy as np


def _as_tensor(psi, nqubits):
    return psi.reshape((2,) * nqubits)


def apply_matrix(psi, mat, targets, nqubits):
    k = len(targets)
    if mat.shape != (1 << k, 1 << k):
        raise ValueError("matrix shape does not match the number of targets")
    if psi.shape[0] != 1 << nqubits:
        raise ValueError("state length does not match qubit count")
    targets = [int(q) for q in targets]
    t = _as_tensor(psi, nqubits)
    g = mat.reshape((2,) * (2 * k))
    out = np.tensordot(g, t, axes=(list(range(k, 2 * k)), targets))
    # tensordot puts the gate outputs first; move them back into place
    out = np.moveaxis(out, list(range(k)), targets)
    psi[:] = out.reshape(-1)


def apply_diagonal(psi, diag, targets, nqubits):
    k = len(targets)
    if diag.shape[0] != 1 << k:
        raise ValueError("diagonal length does not match the number of targets")
    targets = [int(q) for q in targets]
    shape = [1] * nqubits
    for q in targets:
        shape[q] = 2
    d = diag.reshape((2,) * k)
    # order the diagonal's axes by ascending qubit index before broadcasting
    order = np.argsort(targets)
    d = np.transpose(d, order).reshape(shape)
    t = _as_tensor(psi, nqubits)
    t *= d


def site_marginals(phi, psi, sites, nqubits, out):
    a = phi.reshape((2,) * nqubits)
    b = psi.reshape((2,) * nqubits).conj()
    for j, s in enumerate(sites):
        s = int(s)
        rest = [q for q in range(nqubits) if q != s]
        out[j] = np.tensordot(a, b, axes=(rest, rest))
