"""Backend selection for the gate-application hot loop.

The compiled Cython extension is used when it was built; otherwise the numpy
fallback is imported. Setting ``TRIUNITARY_PURE_PYTHON=1`` forces the fallback.
"""

import os

import numpy as np

if os.environ.get("TRIUNITARY_PURE_PYTHON", "") not in ("", "0"):
    from . import _fallback as _impl

    BACKEND = "numpy"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        from . import _fallback as _impl

        BACKEND = "numpy"


def _prep(psi, targets, nqubits):
    if psi.dtype != np.complex128 or not psi.flags.c_contiguous or psi.ndim != 1:
        raise TypeError("state must be a flat, C-contiguous complex128 array")
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    if len(set(targets.tolist())) != len(targets):
        raise ValueError(f"repeated target qubits: {targets.tolist()}")
    if targets.size and (targets.min() < 0 or targets.max() >= nqubits):
        raise ValueError(f"targets {targets.tolist()} out of range for {nqubits} qubits")
    return targets


def apply_matrix(psi, mat, targets, nqubits, impl=None):
    """Apply ``mat`` to qubits ``targets`` of ``psi`` in place.

    ``targets[0]`` is the most significant qubit of ``mat``'s index.
    """
    targets = _prep(psi, targets, nqubits)
    mat = np.ascontiguousarray(mat, dtype=np.complex128)
    (impl or _impl).apply_matrix(psi, mat, targets, nqubits)
    return psi


def apply_diagonal(psi, diag, targets, nqubits, impl=None):
    targets = _prep(psi, targets, nqubits)
    diag = np.ascontiguousarray(diag, dtype=np.complex128)
    (impl or _impl).apply_diagonal(psi, diag, targets, nqubits)
    return psi


def conjugate_operator(op, mat, targets, nqubits, impl=None):
    """In place ``op -> mat_T op mat_T^dagger`` for a flat 2^n x 2^n operator.

    The operator is treated as a 2n-qubit vector: rows are qubits 0..n-1 and
    columns n..2n-1, so right-multiplication by ``mat^dagger`` is ``conj(mat)``
    acting on the column qubits.
    """
    targets = np.asarray(targets, dtype=np.int64)
    apply_matrix(op, mat, targets, 2 * nqubits, impl=impl)
    apply_matrix(op, np.conj(mat), targets + nqubits, 2 * nqubits, impl=impl)
    return op


def site_marginals(phi, psi, sites, nqubits, impl=None):
    """Per-site 2x2 blocks of ``Tr_{rest} |phi><psi|``, shape ``(len(sites), 2, 2)``."""
    for v in (phi, psi):
        if v.dtype != np.complex128 or not v.flags.c_contiguous or v.ndim != 1:
            raise TypeError("vectors must be flat, C-contiguous complex128 arrays")
    sites = _prep(phi, sites, nqubits)
    out = np.zeros((len(sites), 2, 2), dtype=np.complex128)
    (impl or _impl).site_marginals(phi, psi, sites, nqubits, out)
    return out
