"""Gate constructors (dual-unitary, tri-unitary CP family, perfect tensor,
kicked Ising) and the predicates that check their defining properties.

All three-qubit gates follow the leg convention documented in
:mod:`triunitary.tensor`.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.linalg import expm

from . import kernels
from .tensor import (
    I2,
    X,
    Rotation,
    gate_tensor,
    is_unitary,
    kron,
    reshuffle,
    unitarity_residual,
)

TRIUNITARY_TOL = 1e-9
N_TRIUNITARY_PARAMS = 31

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def cp_gate(phi):
    """Controlled phase ``exp(-i phi/4 (Z1 - 1)(Z2 - 1)) = diag(1, 1, 1, e^{-i phi})``."""
    return np.diag([1, 1, 1, np.exp(-1j * phi)]).astype(complex)


def swap13():
    """SWAP of qubits 1 and 3, identity on qubit 2 (the ``SWAP_13 (x) 1_2`` gate)."""
    return on_three(SWAP, (0, 2))


def on_three(op2, pair):
    """Embed a two-qubit operator on ``pair`` of three qubits (ordered pair)."""
    out = np.eye(8, dtype=complex).reshape(-1)
    kernels.apply_matrix(out, np.asarray(op2, dtype=complex), list(pair), 6)
    return out.reshape(8, 8)


# -- single-qubit gates ------------------------------------------------------


def rz(a):
    return np.diag([np.exp(-0.5j * a), np.exp(0.5j * a)])


def ry(a):
    c, s = np.cos(a / 2), np.sin(a / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def zyz(alpha, beta, gamma):
    """SU(2) element ``Rz(alpha) Ry(beta) Rz(gamma)``."""
    return rz(alpha) @ ry(beta) @ rz(gamma)


def zyz_angles(u):
    """Euler angles and phase with ``u = e^{i delta} zyz(alpha, beta, gamma)``."""
    u = np.asarray(u, dtype=complex)
    det = np.linalg.det(u)
    delta = np.angle(det) / 2
    v = u * np.exp(-1j * delta)
    beta = 2 * np.arctan2(abs(v[1, 0]), abs(v[0, 0]))
    # v11 = e^{i(a+g)/2} cos, v10 = e^{i(a-g)/2} sin (cos, sin >= 0)
    s = 2 * np.angle(v[1, 1]) if abs(v[1, 1]) > 1e-12 else 0.0
    d = 2 * np.angle(v[1, 0]) if abs(v[1, 0]) > 1e-12 else 0.0
    alpha = (s + d) / 2
    gamma = (s - d) / 2
    w = zyz(alpha, beta, gamma)
    # branch fix: the half-angle representation is only defined up to -1
    if np.linalg.norm(w + v) < np.linalg.norm(w - v):
        delta += np.pi
    return alpha, beta, gamma, delta


def haar_su2(rng):
    """Haar-random SU(2) matrix from a normalized Gaussian quaternion."""
    q = rng.standard_normal(4)
    a, b, c, d = q / np.linalg.norm(q)
    return np.array([[a + 1j * b, c + 1j * d], [-c + 1j * d, a - 1j * b]])


def haar_dressed(g, rng):
    """``(u1 u2 u3) g (w1 w2 w3)`` with six independent Haar single-qubit gates.

    Single-qubit dressing preserves tri-unitarity and perfectness.
    """
    pre = kron(*(haar_su2(rng) for _ in range(3)))
    post = kron(*(haar_su2(rng) for _ in range(3)))
    return post @ np.asarray(g) @ pre


def haar_unitary(n, rng):
    """Haar-random ``n x n`` unitary (QR of a Ginibre matrix with phase fix)."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


# -- dual-unitary gates ------------------------------------------------------


def dual_reshuffle(u):
    """Space-time dual of a two-qubit gate: ``Ũ[(o1 o2),(i1 i2)] = U[(i2 o2),(i1 o1)]``.

    The gate is turned on its side, so the left legs (i1, o1) become inputs
    and the right legs (i2, o2) become outputs.
    """
    t = np.asarray(u).reshape(2, 2, 2, 2)  # (o1, o2, i1, i2)
    # Ũ[a, b, c, d] = U[d, b, c, a]
    return np.ascontiguousarray(t.transpose(3, 1, 2, 0)).reshape(4, 4)


def is_dual_unitary(u, tol=1e-10):
    return is_unitary(u, tol) and is_unitary(dual_reshuffle(u), tol)


def _check_unitary_1q(*ops):
    for op in ops:
        op = np.asarray(op)
        if op.shape != (2, 2) or not is_unitary(op, 1e-12):
            raise ValueError("single-qubit gate is not a 2x2 unitary")


def dual_unitary_gate(phi, u1=I2, u2=I2, v1=I2, v2=I2):
    """``(u1 u2) SWAP CP(phi) (v1 v2)``."""
    _check_unitary_1q(u1, u2, v1, v2)
    return np.kron(u1, u2) @ SWAP @ cp_gate(phi) @ np.kron(v1, v2)


# -- tri-unitary family ------------------------------------------------------


def _as_gate_tuple(gs, name):
    gs = tuple(np.asarray(g, dtype=complex) for g in gs)
    if len(gs) != 3:
        raise ValueError(f"{name} needs three single-qubit gates")
    _check_unitary_1q(*gs)
    return gs


@dataclass(frozen=True)
class TriUnitaryParams:
    """Parameters of the CP-based tri-unitary family.

    ``u``, ``v``, ``w`` hold three single-qubit unitaries each (qubits 1, 2, 3).
    Counting three Euler angles per single-qubit gate, three interaction
    angles and a global phase gives 31 real parameters.
    """

    phi: tuple = (0.0, 0.0, 0.0)
    u: tuple = (I2, I2, I2)
    v: tuple = (I2, I2, I2)
    w: tuple = (I2, I2, I2)
    global_phase: float = 0.0

    def __post_init__(self):
        phi = tuple(float(p) for p in self.phi)
        if len(phi) != 3 or not all(np.isfinite(phi)):
            raise ValueError("phi must be three finite angles")
        object.__setattr__(self, "phi", phi)
        for name in ("u", "v", "w"):
            object.__setattr__(self, name, _as_gate_tuple(getattr(self, name), name))
        if not np.isfinite(self.global_phase):
            raise ValueError("global phase must be finite")

    n_params = N_TRIUNITARY_PARAMS

    @classmethod
    def from_angles(cls, phi, euler, global_phase=0.0):
        """Build from a (9, 3) array of ZYZ angles ordered u1,u2,u3,v1,v2,v3,w1,w2,w3."""
        euler = np.asarray(euler, dtype=float)
        if euler.shape != (9, 3):
            raise ValueError("euler must have shape (9, 3)")
        gs = [zyz(*row) for row in euler]
        return cls(tuple(phi), tuple(gs[0:3]), tuple(gs[3:6]), tuple(gs[6:9]), global_phase)

    def to_vector(self):
        """The 31 real parameters: 3 interaction angles, 27 Euler angles, 1 phase.

        Phases of the single-qubit gates are folded into the global phase.
        """
        euler = []
        phase = self.global_phase
        for g in (*self.u, *self.v, *self.w):
            a, b, c, d = zyz_angles(g)
            euler.extend((a, b, c))
            phase += d
        return np.array([*self.phi, *euler, phase])

    @classmethod
    def from_vector(cls, vec):
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (N_TRIUNITARY_PARAMS,):
            raise ValueError(f"expected {N_TRIUNITARY_PARAMS} parameters")
        return cls.from_angles(vec[:3], vec[3:30].reshape(9, 3), vec[30])

    @classmethod
    def random(cls, rng, phi=None):
        """Haar single-qubit gates and uniform interaction angles in [0, 2 pi).

        A scalar ``phi`` sets all three angles (``phi_i = phi``).
        """
        if phi is None:
            phi = rng.uniform(0, 2 * np.pi, size=3)
        elif np.ndim(phi) == 0:
            phi = (float(phi),) * 3
        gs = [haar_su2(rng) for _ in range(9)]
        return cls(tuple(phi), tuple(gs[0:3]), tuple(gs[3:6]), tuple(gs[6:9]), 0.0)


def triunitary_gate(p):
    """The CP-family gate, rightmost factor applied first::

        e^{i theta} (u1 u2 u3) SWAP_13 CP_23(phi2) (1 v2 v3) CP_31(phi3)
            (v1 1 1) CP_12(phi1) (w1 w2 w3)

    Each qubit worldline meets the other two once through a controlled
    phase, with its ``v`` gate between the two meetings.  The three-step
    order 12 -> 31 -> 23 is what makes all three bipartitions unitary; see
    :func:`cp_family_alternate_order` for the 12 -> 23 -> 31 arrangement,
    which is unitary along only two of the three arrows.
    """
    if not isinstance(p, TriUnitaryParams):
        raise TypeError("expected TriUnitaryParams")
    phi1, phi2, phi3 = p.phi
    u1, u2, u3 = p.u
    v1, v2, v3 = p.v
    w1, w2, w3 = p.w
    g = kron(w1, w2, w3)
    g = on_three(cp_gate(phi1), (0, 1)) @ g
    g = kron(v1, I2, I2) @ g
    g = on_three(cp_gate(phi3), (0, 2)) @ g
    g = kron(I2, v2, v3) @ g
    g = on_three(cp_gate(phi2), (1, 2)) @ g
    g = swap13() @ g
    g = kron(u1, u2, u3) @ g
    return np.exp(1j * p.global_phase) * g


def cp_family_alternate_order(p):
    """Same ingredients as :func:`triunitary_gate` with the interactions in the
    order 12 -> 23 -> 31::

        (u1 u2 u3) SWAP_13 CP_31(phi3) (v1 1 v3) CP_23(phi2) (1 v2 1) CP_12(phi1) (w1 w2 w3)

    Unitary along the conventional and the tilde arrow but, for generic
    single-qubit gates, not along the breve arrow.  Kept as a reference point
    for tests.
    """
    phi1, phi2, phi3 = p.phi
    u1, u2, u3 = p.u
    v1, v2, v3 = p.v
    w1, w2, w3 = p.w
    g = kron(w1, w2, w3)
    g = on_three(cp_gate(phi1), (0, 1)) @ g
    g = kron(I2, v2, I2) @ g
    g = on_three(cp_gate(phi2), (1, 2)) @ g
    g = kron(v1, I2, v3) @ g
    g = on_three(cp_gate(phi3), (0, 2)) @ g
    g = swap13() @ g
    g = kron(u1, u2, u3) @ g
    return np.exp(1j * p.global_phase) * g


@dataclass(frozen=True)
class TriUnitarityReport:
    unitary: float
    tilde: float
    breve: float
    tol: float = TRIUNITARY_TOL
    residuals: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "residuals", {"U": self.unitary, "tilde": self.tilde, "breve": self.breve}
        )

    @property
    def ok(self):
        return max(self.unitary, self.tilde, self.breve) < self.tol

    def __bool__(self):
        return self.ok


def triunitarity_report(g, tol=TRIUNITARY_TOL):
    g = np.asarray(g).reshape(8, 8)
    return TriUnitarityReport(
        unitarity_residual(g),
        unitarity_residual(reshuffle(g, Rotation.TILDE)),
        unitarity_residual(reshuffle(g, Rotation.BREVE)),
        tol,
    )


def is_triunitary(g, tol=TRIUNITARY_TOL):
    """True iff U, Ũ and Ŭ are all unitary (Frobenius residuals below ``tol``).

    The returned report is truthy/falsy and carries the three residuals.
    """
    return triunitarity_report(g, tol)


# legs in tensor-axis order: a4 a5 a6 a1 a2 a3 -> leg numbers
_AXIS_LEGS = (4, 5, 6, 1, 2, 3)


def bipartition_matrix(g, out_legs):
    """Regroup a gate tensor into a map from the complementary legs to ``out_legs``.

    Legs are numbered 1..6 as in the module docstring; the order within each
    group is ascending leg number.
    """
    out_legs = sorted(out_legs)
    in_legs = sorted(set(range(1, 7)) - set(out_legs))
    if len(out_legs) != 3:
        raise ValueError("need exactly three output legs")
    ax = {leg: i for i, leg in enumerate(_AXIS_LEGS)}
    perm = [ax[leg] for leg in out_legs + in_legs]
    return np.ascontiguousarray(gate_tensor(g).transpose(perm)).reshape(8, 8)


def bipartitions():
    """The ten 3-vs-3 bipartitions of legs 1..6 (each listed once)."""
    return [c for c in combinations(range(1, 7), 3) if 1 in c]


def is_perfect(g, tol=TRIUNITARY_TOL):
    g = np.asarray(g).reshape(8, 8)
    return all(unitarity_residual(bipartition_matrix(g, legs)) < tol for legs in bipartitions())


def five_qubit_code_isometry():
    """Encoding isometry of the [[5,1,3]] code as a 32 x 2 matrix.

    Stabilizers are the cyclic shifts of XZZXI; logical X = XXXXX and
    logical Z = ZZZZZ.
    """
    from .tensor import PAULI_BY_NAME

    gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
    proj = np.eye(32, dtype=complex)
    for s in gens:
        op = kron(*(PAULI_BY_NAME[c] for c in s))
        proj = proj @ (np.eye(32) + op) / 2
    zero = np.zeros(32, dtype=complex)
    zero[0] = 1
    zl = proj @ zero
    zl /= np.linalg.norm(zl)
    xl = kron(*([X] * 5))
    ol = xl @ zl
    return np.stack([zl, ol], axis=1)


def perfect_tensor():
    """Three-qubit gate from the six-leg [[5,1,3]] code state.

    The logical leg is a1 and the five physical legs are, in order,
    a2, a3, a6, a5, a4 (i.e. they run counterclockwise around the hexagon).
    Normalized so the 8x8 matrix is unitary.
    """
    v = five_qubit_code_isometry()  # v[p1..p5, l]
    t = v.reshape((2,) * 5 + (2,)) * 2.0  # axes p1 p2 p3 p4 p5 l
    # target axes (a4, a5, a6, a1, a2, a3) <- (p5, p4, p3, l, p1, p2)
    out = t.transpose(4, 3, 2, 5, 0, 1)
    return np.ascontiguousarray(out).reshape(8, 8)


def appendix_gate(phi, g):
    """``SWAP_13 CP_31(phi) CP_23(phi) CP_12(phi) e^{-i phi/2 sum Z} e^{-i g sum X}``.

    Equivalently ``SWAP_13 exp(-i phi/4 (Z1Z2 + Z2Z3 + Z3Z1)) exp(-i g sum X)`` up to
    a global phase.
    """
    w = rz(phi) @ expm(-1j * g * X)  # e^{-i phi/2 Z} e^{-i g X}
    return triunitary_gate(TriUnitaryParams((phi, phi, phi), w=(w, w, w)))


# -- kicked Ising ----------------------------------------------------------------


@dataclass(frozen=True)
class KickedIsingParams:
    """Generalized kicked Ising chain with sublattices A (even) and B (odd).

    ``J``, ``b``: next-nearest-neighbor coupling and transverse field on A.
    ``b_prime``: per-site transverse fields on B (length L/2 or scalar).
    ``J_prime``: per-bond nearest-neighbor couplings, bond n joins n and n+1
    (length L or scalar).  ``h``: optional per-site longitudinal fields added
    to both Ising Hamiltonians (length L or scalar).
    """

    J: float = np.pi / 4
    b: float = np.pi / 4
    b_prime: object = 0.0
    J_prime: object = 0.0
    h: object = 0.0

    def at_triunitary_point(self, tol=1e-12):
        return abs(abs(self.J) - np.pi / 4) < tol and abs(abs(self.b) - np.pi / 4) < tol


def _per_site(v, n, name):
    v = np.broadcast_to(np.asarray(v, dtype=float), (n,)) if np.ndim(v) == 0 else np.asarray(v, float)
    if v.shape != (n,):
        raise ValueError(f"{name} must be a scalar or have length {n}")
    return v


class KickedIsingFloquet:
    """State transformer for ``U_F = e^{-iH_X} e^{-iH_AA} e^{-iH_X} e^{-i(H_AA + H_AB)}``.

    Diagonal Ising factors are applied as phases on the full computational
    basis; transverse kicks as single-qubit rotations.  One time step of
    the chain simulator is half a period (:meth:`apply_step`).
    """

    uniform_gate = None  # no brickwork gate: site-resolved correlation grids

    def __init__(self, L, p, boundary="periodic"):
        if L % 2 or L < 4:
            raise ValueError("kicked Ising chain needs an even number of sites >= 4")
        if boundary not in ("periodic", "open"):
            raise ValueError("boundary must be 'periodic' or 'open'")
        self.L, self.p, self.boundary = L, p, boundary
        bp = _per_site(p.b_prime, L // 2, "b_prime")
        fields = np.zeros(L)
        fields[0::2] = p.b
        fields[1::2] = bp
        self.kicks = [expm(-1j * f * X) for f in fields]
        jp = _per_site(p.J_prime, L, "J_prime")
        h = _per_site(p.h, L, "h")
        zs = 1 - 2 * ((np.arange(1 << L)[:, None] >> (L - 1 - np.arange(L))) & 1)
        e_aa = np.zeros(1 << L)
        e_ab = np.zeros(1 << L)
        for n in range(0, L, 2):
            m = n + 2
            if m >= L and boundary == "open":
                continue
            e_aa += p.J * zs[:, n] * zs[:, m % L]
        for n in range(L):
            m = n + 1
            if m >= L and boundary == "open":
                continue
            e_ab += jp[n] * zs[:, n] * zs[:, m % L]
        e_h = zs @ h
        self.phase_aa = np.exp(-1j * (e_aa + e_h))
        self.phase_full = np.exp(-1j * (e_aa + e_ab + e_h))

    def _kick(self, psi, offset, nqubits):
        for q, k in enumerate(self.kicks):
            kernels.apply_matrix(psi, k, [offset + q], nqubits)

    def apply(self, psi, half=None, offset=0, nqubits=None):
        """Apply one Floquet period in place (or only the first/second half).

        The first half is ``e^{-iH_X} e^{-i(H_AA + H_AB)}``, the second half
        ``e^{-iH_X} e^{-iH_AA}``.  The chain occupies qubits
        ``offset .. offset + L - 1`` of an ``nqubits`` register and must be
        the low-order block (``offset + L == nqubits``).
        """
        n = self.L if nqubits is None else nqubits
        if offset + self.L != n:
            raise ValueError("the chain must occupy the low-order qubits")
        view = psi.reshape(-1, 1 << self.L)
        if half in (None, 0):
            view *= self.phase_full
            self._kick(psi, offset, n)
        if half in (None, 1):
            view *= self.phase_aa
            self._kick(psi, offset, n)
        return psi

    def apply_step(self, psi, step, offset=0, nqubits=None):
        """Half-period ``step`` (1-based): odd steps are first halves."""
        return self.apply(psi, half=(step - 1) % 2, offset=offset, nqubits=nqubits)


def kicked_ising_floquet(L, p, boundary="periodic"):
    """Dense Floquet operator of the kicked Ising chain (L <= 12)."""
    if L % 2:
        raise ValueError("kicked Ising chain needs an even number of sites")
    if L > 12:
        raise ValueError("dense Floquet operator limited to L <= 12")
    f = KickedIsingFloquet(L, p, boundary)
    cols = np.eye(1 << L, dtype=complex)
    out = np.empty_like(cols)
    for j in range(1 << L):
        c = np.ascontiguousarray(cols[:, j])
        out[:, j] = f.apply(c)
    return out
