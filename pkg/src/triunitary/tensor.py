"""Dense tensor primitives: Paulis, leg reshuffles, partial traces, gate application.

Leg convention for three-qubit gates
------------------------------------
A gate ``U`` is an 8x8 matrix mapping inputs ``(a1, a2, a3)`` to outputs
``(a4, a5, a6)``, row-major with the first leg as the most significant bit::

    U[(a4 a5 a6), (a1 a2 a3)]

``a1, a2, a3`` are the lower legs of the hexagon, left to right, and the
upper legs are ``a4`` (above ``a1``), ``a5`` (above ``a2``), ``a6`` (above
``a3``).  Going counterclockwise around the hexagon the legs read
``1, 2, 3, 6, 5, 4``.  As a rank-6 tensor (``gate_tensor``) the axes are
``(a4, a5, a6, a1, a2, a3)``: outputs first, then inputs.

The two rotated bipartitions are

    tilde:  (a5 a6 a3) <- (a4 a1 a2)
    breve:  (a6 a3 a2) <- (a5 a4 a1)

i.e. each is the previous one with the contiguous window of three input legs
slid one step around the hexagon.
"""

from enum import Enum

import numpy as np

from . import kernels

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)
PAULI_LABELS = ("I", "X", "Y", "Z")
PAULI_BY_NAME = dict(zip(PAULI_LABELS, PAULIS))

UNITARY_TOL = 1e-10


class Rotation(Enum):
    TILDE = "tilde"
    BREVE = "breve"


# axis permutations on the (a4,a5,a6,a1,a2,a3) tensor
_PERMS = {
    Rotation.TILDE: (1, 2, 5, 0, 3, 4),
    Rotation.BREVE: (2, 5, 4, 1, 0, 3),
}


def gate_tensor(g):
    """8x8 matrix -> rank-6 tensor with axes (a4, a5, a6, a1, a2, a3)."""
    g = np.asarray(g)
    if g.shape == (2,) * 6:
        return g
    if g.shape != (8, 8):
        raise ValueError(f"expected an 8x8 matrix or rank-6 tensor, got {g.shape}")
    return g.reshape((2,) * 6)


def gate_matrix(t):
    t = np.asarray(t)
    if t.shape == (8, 8):
        return t
    return t.reshape(8, 8)


def reshuffle(g, rotation):
    """Rotate the leg bipartition of a three-qubit gate by one or two steps.

    Returns an 8x8 matrix (not necessarily unitary).  ``TILDE`` gives
    ``Ũ[(a5 a6 a3), (a4 a1 a2)] = U[(a4 a5 a6), (a1 a2 a3)]`` and ``BREVE`` gives
    ``Ŭ[(a6 a3 a2), (a5 a4 a1)] = U[(a4 a5 a6), (a1 a2 a3)]``.
    """
    rotation = Rotation(rotation)
    t = gate_tensor(g)
    return np.ascontiguousarray(t.transpose(_PERMS[rotation])).reshape(8, 8)


def unitarity_residual(m):
    """Frobenius norm of ``M M^dagger - I``."""
    m = np.asarray(m)
    return float(np.linalg.norm(m @ m.conj().T - np.eye(m.shape[0])))


def is_unitary(m, tol=UNITARY_TOL):
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and unitarity_residual(m) < tol


def dagger(m):
    return np.asarray(m).conj().T


def kron(*ops):
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out


def embed(op, sites, n):
    """Dense 2^n operator acting as ``op`` on ``sites`` (first site = MSB of op)."""
    sites = list(sites)
    k = len(sites)
    op = np.asarray(op, dtype=complex)
    if op.shape != (1 << k, 1 << k):
        raise ValueError("operator shape does not match the site list")
    full = np.eye(1 << n, dtype=complex).reshape(-1)
    # apply to every column: act on row qubits of the identity viewed as a 2n-qubit vector
    kernels.apply_matrix(full, op, sites, 2 * n)
    return full.reshape(1 << n, 1 << n)


def partial_trace(op, keep, n=None):
    """Trace out every qubit not in ``keep``; the kept qubits stay in ascending order."""
    op = np.asarray(op)
    if n is None:
        n = int(round(np.log2(op.shape[0])))
    if op.shape != (1 << n, 1 << n):
        raise ValueError("operator is not 2^n x 2^n")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"keep set {keep} is not a subset of sites 0..{n - 1}")
    drop = [q for q in range(n) if q not in keep]
    t = op.reshape((2,) * (2 * n))
    # contract each dropped row axis with its column axis, highest first so
    # that the remaining axis numbers stay valid
    for q in sorted(drop, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + m)
    d = 1 << len(keep)
    return t.reshape(d, d)


def reduced_density_matrix(psi, keep, n):
    """Reduced density matrix of a pure state on the ``keep`` qubits (ascending)."""
    keep = sorted(int(k) for k in keep)
    if len(set(keep)) != len(keep) or any(k < 0 or k >= n for k in keep):
        raise ValueError(f"invalid region {keep} for {n} qubits")
    rest = [q for q in range(n) if q not in keep]
    t = np.asarray(psi).reshape((2,) * n).transpose(keep + rest)
    m = t.reshape(1 << len(keep), -1)
    return m @ m.conj().T


def apply_gate(state, g, sites):
    """Return a new state with ``g`` applied to ``sites`` (first site = MSB of g)."""
    state = np.array(state, dtype=np.complex128, order="C", copy=True).reshape(-1)
    n = int(round(np.log2(state.size)))
    if state.size != 1 << n:
        raise ValueError("state length is not a power of two")
    sites = [int(s) for s in sites]
    if len(set(sites)) != len(sites):
        raise ValueError(f"repeated sites: {sites}")
    kernels.apply_matrix(state, np.asarray(g), sites, n)
    return state


def basis_state(bits):
    bits = [int(b) for b in bits]
    psi = np.zeros(1 << len(bits), dtype=complex)
    psi[int("".join(map(str, bits)), 2) if bits else 0] = 1
    return psi


def pauli_decompose(a):
    """Coefficients c_alpha with ``a = sum_alpha c_alpha sigma_alpha`` (order I,X,Y,Z)."""
    a = np.asarray(a)
    return np.array([np.trace(p.conj().T @ a) / 2 for p in PAULIS])
