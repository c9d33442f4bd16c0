"""Single-qubit transfer channels of a three-qubit gate, their Pauli transfer
matrices and spectra, and the ergodic-hierarchy classifier.

For a gate ``U`` the three channels are

    M_-(a) = 1/4 Tr_{2,3}[U^dag (1 (x) 1 (x) a) U]
    M_0(a) = 1/4 Tr_{1,3}[U^dag (1 (x) a (x) 1) U]
    M_+(a) = 1/4 Tr_{1,2}[U^dag (a (x) 1 (x) 1) U]

An operator sitting on an output leg is pulled back to a single input leg.
In the brickwork this moves it by -2, 0 and +2 sites respectively (for
``M_+`` the operator enters on qubit 1 and is kept on qubit 3).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .gates import is_triunitary
from .tensor import PAULIS, embed, partial_trace, unitarity_residual

PTM_TOL = 1e-10
CP_TOL = -1e-9
HIERARCHY_TOL = 1e-9


class Direction(Enum):
    MINUS = "-"
    ZERO = "0"
    PLUS = "+"

    @property
    def shift(self):
        """Heisenberg-picture site displacement per gated step."""
        return {"-": -2, "0": 0, "+": 2}[self.value]


# (operator site, kept site) for each direction
_LEGS = {Direction.MINUS: (2, 0), Direction.ZERO: (1, 1), Direction.PLUS: (0, 2)}


def _direction(mu):
    if isinstance(mu, Direction):
        return mu
    aliases = {"-": Direction.MINUS, "minus": Direction.MINUS, "0": Direction.ZERO,
               "zero": Direction.ZERO, "+": Direction.PLUS, "plus": Direction.PLUS}
    key = str(mu).lower()
    if key not in aliases:
        raise ValueError(f"unknown direction {mu!r}")
    return aliases[key]


def apply_transfer(g, mu, a):
    """Evaluate ``M_mu(a)`` straight from the partial-trace definition."""
    mu = _direction(mu)
    src, keep = _LEGS[mu]
    g = np.asarray(g).reshape(8, 8)
    big = embed(np.asarray(a, dtype=complex), [src], 3)
    return partial_trace(g.conj().T @ big @ g, [keep], 3) / 4


@dataclass(frozen=True)
class SingleQubitChannel:
    """A single-qubit channel stored as its 4x4 Pauli transfer matrix.

    ``ptm[alpha, beta] = Tr(sigma_alpha M(sigma_beta)) / 2`` with the basis
    ordered (I, X, Y, Z).
    """

    ptm: np.ndarray
    direction: Direction = None

    def __post_init__(self):
        ptm = np.asarray(self.ptm, dtype=float)
        if ptm.shape != (4, 4):
            raise ValueError("a Pauli transfer matrix is 4x4")
        ptm.setflags(write=False)
        object.__setattr__(self, "ptm", ptm)

    def __call__(self, a):
        a = np.asarray(a, dtype=complex)
        coeffs = np.array([np.trace(p @ a) / 2 for p in PAULIS])
        out = self.ptm @ coeffs
        return sum(c * p for c, p in zip(out, PAULIS))

    def power(self, t):
        return SingleQubitChannel(np.linalg.matrix_power(self.ptm, int(t)), self.direction)

    def choi(self):
        """Choi matrix ``sum_ij |i><j| (x) M(|i><j|)``."""
        out = np.zeros((4, 4), dtype=complex)
        for i in range(2):
            for j in range(2):
                e = np.zeros((2, 2), dtype=complex)
                e[i, j] = 1
                out += np.kron(e, self(e))
        return out

    def is_trace_preserving(self, tol=PTM_TOL):
        return np.allclose(self.ptm[0], [1, 0, 0, 0], atol=tol)

    def is_unital(self, tol=PTM_TOL):
        return np.allclose(self.ptm[:, 0], [1, 0, 0, 0], atol=tol)

    def is_completely_positive(self, tol=CP_TOL):
        c = self.choi()
        return np.linalg.eigvalsh((c + c.conj().T) / 2).min() >= tol

    def validate(self):
        if not self.is_trace_preserving():
            raise ValueError("channel is not trace preserving")
        if not self.is_unital():
            raise ValueError("channel is not unital")
        if not self.is_completely_positive():
            raise ValueError("channel is not completely positive")
        return self


def ptm_of(fn):
    """Pauli transfer matrix of a linear map on 2x2 matrices."""
    out = np.empty((4, 4))
    for b, pb in enumerate(PAULIS):
        image = fn(pb)
        for a, pa in enumerate(PAULIS):
            out[a, b] = np.real(np.trace(pa @ image)) / 2
    return out


def transfer_channel(g, mu):
    """The channel ``M_mu`` of a unitary three-qubit gate."""
    g = np.asarray(g).reshape(8, 8)
    res = unitarity_residual(g)
    if res > 1e-8:
        raise ValueError(f"gate is not unitary (residual {res:.2e})")
    mu = _direction(mu)
    return SingleQubitChannel(ptm_of(lambda a: apply_transfer(g, mu, a)), mu)


def sort_spectrum(vals):
    """Descending modulus, ties by descending real then imaginary part."""
    vals = np.asarray(vals, dtype=complex)
    r = lambda v: np.round(v, 12)  # noqa: E731 - stabilize ties against rounding noise
    order = np.lexsort((-r(vals.imag), -r(vals.real), -r(np.abs(vals))))
    return vals[order]


def channel_spectrum(c):
    """Eigenvalues of the 3x3 block acting on traceless operators."""
    ptm = c.ptm if isinstance(c, SingleQubitChannel) else np.asarray(c)
    return sort_spectrum(np.linalg.eigvals(ptm[1:, 1:]))


class HierarchyLabel(Enum):
    NON_INTERACTING = "NonInteracting"
    INTERACTING_NON_ERGODIC = "InteractingNonErgodic"
    ERGODIC_NON_MIXING = "ErgodicNonMixing"
    ERGODIC_MIXING = "ErgodicMixing"
    BERNOULLI = "Bernoulli"


@dataclass(frozen=True)
class HierarchyReport:
    label: HierarchyLabel
    eigenvalues: dict  # Direction -> three complex eigenvalues

    def all_eigenvalues(self):
        return np.concatenate([self.eigenvalues[d] for d in Direction])


def label_from_eigenvalues(lams, tol=HIERARCHY_TOL):
    lams = np.asarray(lams, dtype=complex)
    is_one = np.abs(lams - 1) < tol
    mods = np.abs(lams)
    if is_one.all():
        return HierarchyLabel.NON_INTERACTING
    if is_one.any():
        return HierarchyLabel.INTERACTING_NON_ERGODIC
    if (mods < tol).all():
        return HierarchyLabel.BERNOULLI
    if (np.abs(mods - 1) < tol).any():
        return HierarchyLabel.ERGODIC_NON_MIXING
    return HierarchyLabel.ERGODIC_MIXING


def classify_hierarchy(g, tol=HIERARCHY_TOL):
    if not is_triunitary(g):
        raise ValueError("classification requires a tri-unitary gate")
    eig = {d: channel_spectrum(transfer_channel(g, d)) for d in Direction}
    lams = np.concatenate([eig[d] for d in Direction])
    return HierarchyReport(label_from_eigenvalues(lams, tol), eig)


def _check_traceless(op, name):
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"{name} must be a 2x2 operator")
    if abs(np.trace(op)) > 1e-12:
        raise ValueError(f"{name} must be traceless")
    return op


def predicted_ray_correlator(g, mu, a, b, t):
    """``Tr(b M_mu^t(a)) / 2`` — the on-ray correlator after ``t`` gated steps.

    ``t`` counts gates the operator passes through on its way along the ray;
    :func:`triunitary.chain.ray_prediction` converts brickwork half-layers into
    this count.
    """
    a = _check_traceless(a, "a")
    b = _check_traceless(b, "b")
    if int(t) != t or t < 0:
        raise ValueError("t must be a non-negative integer")
    ch = transfer_channel(g, mu).power(int(t))
    return complex(np.trace(b @ ch(a)) / 2)


# -- closed forms for the two-parameter appendix family ----------------------------


def appendix_ptm(phi, g):
    """Closed-form transfer matrix of ``appendix_gate(phi, g)`` (same for every mu)."""
    c2 = np.cos(phi / 2) ** 2
    c, s = np.cos(2 * g), np.sin(2 * g)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, c2, 0, 0],
            [0, 0, c * c2, s],
            [0, 0, -s * c2, c],
        ]
    )


def appendix_f(phi, g):
    """``f(phi, g) = sqrt(-13 - 20 cos(phi) + 2 cos(4g)(3 + cos(phi))^2 + cos(2 phi))``.

    Complex square root: the radicand is negative where the pair is complex.
    """
    rad = -13 - 20 * np.cos(phi) + 2 * np.cos(4 * g) * (3 + np.cos(phi)) ** 2 + np.cos(2 * phi)
    return np.sqrt(complex(rad))


def appendix_eigenvalues(phi, g):
    """Traceless-block eigenvalues of the appendix family from the closed forms."""
    c2 = np.cos(phi / 2) ** 2
    mid = 0.25 * np.cos(2 * g) * (3 + np.cos(phi))
    f = appendix_f(phi, g) / 8
    return sort_spectrum([c2, mid + f, mid - f])
