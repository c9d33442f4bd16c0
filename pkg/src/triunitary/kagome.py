"""2+1D tri-unitary circuits: gates on the vertices of a cubic lattice, run as a
three-layer Floquet circuit on a static kagome array with ancillas.

Geometry
--------
Gates sit on vertices ``v = (x, y, z)`` of the cubic lattice and act at time
``x + y + z``.  Every gate has input legs x̄, ȳ, z̄ (from ``v - e_x``,
``v - e_y``, ``v - e_z``) and output legs x, y, z.  With the leg convention
of :mod:`triunitary.tensor`::

    a1 = z̄,  a2 = ȳ,  a3 = x̄        (inputs)
    a4 = x,  a5 = y,  a6 = z         (outputs)

so the three contiguous hexagon bipartitions are the three cube-diagonal
arrows of time, and ``SWAP_13`` sends x, y and z straight through.  An
operator on output leg x (y, z) is pulled back by ``M_+`` (``M_0``, ``M_-``).

The segment leaving vertex ``v`` along ``d`` carries one qubit.  Quotienting
by the time translation (1, 1, 1), vertices are labelled by
``(a, b) = (x - z, y - z)`` and coloured by ``(a + b) mod 3`` (blue, red,
green).  The output segments of one colour form a kagome lattice.  A
periodic sample has ``n1 x n2`` cells of the colour-preserving lattice spanned
by ``A1 = (2, 1)`` and ``A2 = (-1, 1)``: per colour ``n1 n2`` vertices and
``3 n1 n2`` sites (one per direction per vertex), so ``9 n1 n2`` physical
qubits in total.

Layer ``k`` (k = 1, 2, 3 within a cycle) fires the vertices of colour
``k mod 3``; they read input sites of colour ``k - 1`` and write to sites of
colour ``k``.  Physically this is ``SWAP_13 U`` on the input triplet followed
by a SWAP of every input with the diametrically opposite output site, which
holds an ancilla in ``|0>``.  The system qubits start on blue, move to red,
green and return to blue after one cycle.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .channels import Direction, transfer_channel
from .gates import SWAP, swap13
from .tensor import unitarity_residual

DIRS = ("x", "y", "z")
COLORS = ("blue", "red", "green")
# unit vectors in cubic coordinates and their projections in (a, b) coordinates
UNIT = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
PLANAR = {"x": (1, 0), "y": (0, 1), "z": (-1, -1)}
# plane-wave labels of the three rays (projections of x, y, z)
RAY_NAME = {"x": "xi", "y": "eta", "z": "zeta"}
RAY_CHANNEL = {"x": Direction.PLUS, "y": Direction.ZERO, "z": Direction.MINUS}
INPUT_ORDER = ("z", "y", "x")  # gate qubits 1, 2, 3 read z̄, ȳ, x̄
OUTPUT_ORDER = ("x", "y", "z")  # and write x, y, z
A1, A2 = (2, 1), (-1, 1)
ROTATE = {"x": "y", "y": "z", "z": "x"}
ANCILLA_TOL = 1e-10
MAX_SYSTEM_QUBITS = 12
MAX_CONE_INPUTS = 13


# -- lattice ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Site:
    color: int  # 0 blue, 1 red, 2 green
    i: int
    j: int
    d: str  # direction of the segment: "x", "y" or "z"

    @property
    def sublattice(self):
        return COLORS[self.color]


class KagomeLattice:
    """Vertices and segment sites of an ``n1 x n2`` periodic sample."""

    def __init__(self, n1, n2):
        if n1 < 1 or n2 < 1:
            raise ValueError("n1 and n2 must be positive")
        self.n1, self.n2 = int(n1), int(n2)
        self.cells = self.n1 * self.n2

    # vertices are (color, i, j) with planar coordinates (color, 0) + i A1 + j A2
    def vertex_ab(self, color, i, j):
        return (color + i * A1[0] + j * A2[0], i * A1[1] + j * A2[1])

    def reduce(self, a, b):
        """Canonical ``(color, i, j)`` of the vertex at planar coordinates (a, b)."""
        color = (a + b) % 3
        i = (a - color + b) // 3
        j = b - i
        return color, i % self.n1, j % self.n2

    def shift(self, vertex, da, db):
        a, b = self.vertex_ab(*vertex)
        return self.reduce(a + da, b + db)

    def sites(self, color):
        return [Site(color, i, j, d) for i in range(self.n1) for j in range(self.n2) for d in DIRS]

    def all_sites(self):
        return [s for c in range(3) for s in self.sites(c)]

    def site_index(self, s):
        """Index of ``s`` within its colour (``0 .. 3 n1 n2 - 1``)."""
        return (s.i * self.n2 + s.j) * 3 + DIRS.index(s.d)

    def vertices(self, color):
        return [(color, i, j) for i in range(self.n1) for j in range(self.n2)]

    def inputs(self, vertex):
        """Input sites of ``vertex`` in gate-qubit order (z̄, ȳ, x̄)."""
        out = []
        for d in INPUT_ORDER:
            da, db = PLANAR[d]
            c, i, j = self.shift(vertex, -da, -db)
            out.append(Site(c, i, j, d))
        return out

    def outputs(self, vertex):
        c, i, j = vertex
        return [Site(c, i, j, d) for d in OUTPUT_ORDER]

    def position(self, s):
        """Cartesian position of a site (segment midpoint) in the plane."""
        a, b = self.vertex_ab(s.color, s.i, s.j)
        da, db = PLANAR[s.d]
        a, b = a + da / 2, b + db / 2  # midpoint of the segment leaving the vertex
        return np.array([a - b / 2, b * np.sqrt(3) / 2])

    def advance(self, s, layers=1):
        """Site reached by following the straight worldline of ``s``."""
        for _ in range(layers):
            da, db = PLANAR[s.d]
            c, i, j = self.shift((s.color, s.i, s.j), da, db)
            s = Site(c, i, j, s.d)
        return s


# -- circuit ---------------------------------------------------------------------------


class KagomeCircuit:
    """Uniform tri-unitary Floquet circuit on an ``n1 x n2`` kagome sample.

    Acts as a chain-like circuit on the ``L = 3 n1 n2`` system qubits (one
    time step = one layer), so it can be driven by
    :class:`triunitary.chain.PurifiedEvolution`.
    """

    boundary = "periodic"
    uniform_gate = None

    def __init__(self, n1, n2, gate):
        g = np.asarray(gate, dtype=complex)
        if g.shape != (8, 8):
            raise ValueError("gate must be an 8x8 matrix")
        res = unitarity_residual(g)
        if res > 1e-8:
            raise ValueError(f"gate is not unitary (residual {res:.2e})")
        self.lattice = KagomeLattice(n1, n2)
        self.gate = g
        self.L = 3 * self.lattice.cells
        self.n1, self.n2 = self.lattice.n1, self.lattice.n2

    @property
    def n_physical(self):
        return 3 * self.L

    def system_sites(self):
        return self.lattice.sites(0)

    # slot bookkeeping: after each layer the outputs are relabelled in place
    def slots(self, step):
        """Map from the sites of colour ``step mod 3`` to system register slots
        after ``step`` layers (slot = register qubit)."""
        return _slot_maps(self.n1, self.n2, step)

    def apply_step(self, psi, step, offset=0, nqubits=None):
        """Layer ``step`` (1-based) on the system-only register."""
        n = self.L if nqubits is None else nqubits
        before = self.slots(step - 1)
        for v in self.lattice.vertices(step % 3):
            targets = [offset + before[s] for s in self.lattice.inputs(v)]
            kernels.apply_matrix(psi, self.gate, targets, n)
        return psi

    def evolve(self, psi, cycles=1):
        """System state (blue sites, canonical order) after whole cycles."""
        psi = np.array(psi, dtype=complex).reshape(-1)
        if psi.size != 1 << self.L:
            raise ValueError(f"expected a state on {self.L} qubits")
        for step in range(1, 3 * cycles + 1):
            self.apply_step(psi, step)
        return _to_canonical(psi, self.L, [self.slots(3 * cycles)[s] for s in self.system_sites()])


@lru_cache(maxsize=None)
def _slot_maps_list(n1, n2, steps):
    lat = KagomeLattice(n1, n2)
    cur = {s: lat.site_index(s) for s in lat.sites(0)}
    maps = [cur]
    for step in range(1, steps + 1):
        nxt = {}
        for v in lat.vertices(step % 3):
            for s_in, s_out in zip(lat.inputs(v), lat.outputs(v)):
                nxt[s_out] = cur[s_in]
        maps.append(nxt)
        cur = nxt
    return maps


def _slot_maps(n1, n2, step):
    steps = 3 * (step // 3 + 1)
    return _slot_maps_list(n1, n2, steps)[step]


def _to_canonical(psi, n, slot_of_site):
    """Reorder register qubits so that qubit k holds canonical site k."""
    if slot_of_site == list(range(n)):
        return psi
    return psi.reshape((2,) * n).transpose(slot_of_site).reshape(-1).copy()


def build_kagome(n1, n2, gate):
    return KagomeCircuit(n1, n2, gate)


# -- physical circuit with ancillas --------------------------------------------------


@dataclass
class AncillaReport:
    fidelities: list  # ancilla-return fidelity after each layer
    state: np.ndarray  # system state on the blue sites (canonical order)

    @property
    def min_fidelity(self):
        return min(self.fidelities)


def floquet_cycle(c, psi, cycles=1, tol=ANCILLA_TOL):
    """Run the physical kagome circuit with ancillas.

    Only the two colours touched by a layer are kept in the register: the
    third colour is not acted on and stays exactly ``|0>``.  After every
    layer the vacated colour is projected onto ``|0>``; the squared norm of
    that projection is the ancilla-return fidelity.  Raises if it deviates
    from 1 by more than ``tol``.
    """
    n = c.L
    if n > MAX_SYSTEM_QUBITS:
        raise ValueError(f"ancilla simulation limited to {MAX_SYSTEM_QUBITS} system qubits")
    psi = np.array(psi, dtype=complex).reshape(-1)
    if psi.size != 1 << n:
        raise ValueError(f"expected a state on {n} qubits")
    lat = c.lattice
    g_phys = swap13() @ c.gate
    fids = []
    for step in range(1, 3 * cycles + 1):
        color = step % 3
        src = {s: lat.site_index(s) for s in lat.sites((color - 1) % 3)}
        dst = {s: n + lat.site_index(s) for s in lat.sites(color)}
        # register: [source colour | destination colour], destination in |0>
        full = np.zeros(1 << (2 * n), dtype=complex)
        full[:: 1 << n] = psi
        for v in lat.vertices(color):
            ins = lat.inputs(v)
            kernels.apply_matrix(full, g_phys, [src[s] for s in ins], 2 * n)
            for s_in in ins:
                # opposite vertex of the hexagon: same direction, output side
                s_out = Site(v[0], v[1], v[2], s_in.d)
                kernels.apply_matrix(full, SWAP, [src[s_in], dst[s_out]], 2 * n)
        block = full.reshape(1 << n, 1 << n)
        psi = block[0].copy()
        fid = float(np.vdot(psi, psi).real)
        fids.append(fid)
        if abs(fid - 1) > tol:
            raise RuntimeError(f"ancillas not returned to |0> after layer {step} (fidelity {fid})")
    return AncillaReport(fids, psi)


# -- correlators on the periodic sample ------------------------------------------------


def light_cone_wraps(lattice, layers):
    """True if the forward light cone of a site overlaps itself on the torus
    within ``layers`` layers (distinct cubic vertices landing on one torus vertex)."""
    for t in range(1, layers + 1):
        seen = set()
        for n in cone_offsets(t):
            for d in DIRS:
                v = _add(UNIT[d], n)
                key = lattice.reduce(v[0] - v[2], v[1] - v[2])
                seen.add((v, key))
        if len({v for v, _ in seen}) != len({k for _, k in seen}):
            return True
    return False


def on_ray(lattice, b_site, a_site, layers):
    """True if ``a_site`` lies on the straight worldline from ``b_site``."""
    return lattice.advance(b_site, layers) == a_site


@dataclass
class KagomeGrid:
    values: dict  # (b_site, a_site, cycles) -> complex
    n1: int
    n2: int

    def rows(self, lattice):
        out = []
        for (sb, sa, cyc), v in sorted(self.values.items(), key=lambda kv: (
                kv[0][2], lattice.site_index(kv[0][0]), lattice.site_index(kv[0][1]))):
            out.append((sb, sa, cyc, v, int(on_ray(lattice, sb, sa, 3 * cyc))))
        return out

    def max_off_ray(self, lattice):
        return max((abs(v) for (sb, sa, cyc), v in self.values.items()
                    if not on_ray(lattice, sb, sa, 3 * cyc)), default=0.0)


def correlator_grid_2d(c, a, b, cycles=1, b_sites=None, check_window=True):
    """``2^-N Tr(a_s(t) b_y)`` over the system qubits for every ``a`` site ``s``.

    ``b_sites`` defaults to the three sites of one vertex, which is enough by
    translation invariance of a uniform circuit.  Exact (purification).
    Raises if the light cone wraps around the torus within ``cycles``
    (override with ``check_window=False`` for exploratory runs: the values
    are then exact for the torus but not the infinite lattice).
    """
    from .chain import PurifiedEvolution

    if c.L > MAX_SYSTEM_QUBITS:
        raise ValueError(f"dense correlators limited to {MAX_SYSTEM_QUBITS} system qubits")
    if check_window and light_cone_wraps(c.lattice, 3 * cycles):
        raise ValueError(
            f"the light cone wraps around the {c.n1}x{c.n2} torus within {cycles} cycle(s); "
            "use cone_grid for the infinite lattice or pass check_window=False")
    lat = c.lattice
    if b_sites is None:
        b_sites = [Site(0, 0, 0, d) for d in DIRS]
    ev = PurifiedEvolution(c)
    values = {}
    sites = c.system_sites()
    for cyc in range(1, cycles + 1):
        for _ in range(3):
            ev.step()
        slots = c.slots(3 * cyc)
        reg = np.array([slots[s] for s in sites])
        for sb in b_sites:
            m = ev.marginals(b, lat.site_index(sb), reg)
            cs = np.einsum("rc,scr->s", np.asarray(a, dtype=complex), m)
            for sa, v in zip(sites, cs):
                values[(sb, sa, cyc)] = complex(v)
    return KagomeGrid(values, c.n1, c.n2)


def correlator_2d(c, a, b, b_site, a_site, cycles=1, check_window=True):
    grid = correlator_grid_2d(c, a, b, cycles, b_sites=[b_site], check_window=check_window)
    return grid.values[(b_site, a_site, cycles)]


# -- exact infinite-lattice evaluator on the causal box ------------------------------


def _add(u, v, k=1):
    return tuple(p + k * q for p, q in zip(u, v))


def causal_box(d_b, delta):
    """Vertices between the gate fed by ``b`` and the gate emitting ``a``.

    ``b`` sits on the segment leaving the origin along ``d_b``; ``a`` on a
    segment leaving ``e_{d_b} + delta``.  Only these gates survive in
    ``Tr(a(t) b)`` for any unitary gate (plain causality in both directions).
    """
    base = UNIT[d_b]
    return [_add(base, (i, j, k)) for i in range(delta[0] + 1)
            for j in range(delta[1] + 1) for k in range(delta[2] + 1)]


def cone_correlator(gate, a, b, d_b, d_a, delta):
    """Infinite-lattice ``C`` between ``b`` on segment (0, d_b) and ``a`` on the
    segment leaving ``e_{d_b} + delta`` along ``d_a``.

    The number of layers between the two is ``1 + sum(delta)``.  Returns 0
    outside the light cone (any negative component of ``delta``).
    """
    delta = tuple(int(q) for q in delta)
    if min(delta) < 0:
        return 0.0j
    box = sorted(causal_box(d_b, delta), key=sum)
    inside = set(box)
    slot, n_in = {}, 0
    for v in box:
        for d in DIRS:
            seg = (_add(v, UNIT[d], -1), d)
            if seg[0] not in inside and seg not in slot:
                slot[seg] = n_in
                n_in += 1
    if n_in > MAX_CONE_INPUTS:
        raise ValueError(f"causal box has {n_in} open inputs (limit {MAX_CONE_INPUTS})")
    y = slot[((0, 0, 0), d_b)]
    dim = 1 << n_in
    psi = np.zeros(dim * dim, dtype=complex)
    idx = np.arange(dim)
    psi[idx * dim + idx] = dim**-0.5
    for v in box:
        ins = [slot[(_add(v, UNIT[d], -1), d)] for d in INPUT_ORDER]
        kernels.apply_matrix(psi, gate, [n_in + q for q in ins], 2 * n_in)
        for q, d in zip(ins, OUTPUT_ORDER):
            slot[(v, d)] = q
    top = _add(UNIT[d_b], delta)
    s_a = slot[(top, d_a)]
    buf = psi.copy()
    kernels.apply_matrix(buf, np.ascontiguousarray(np.asarray(b, dtype=complex).T), [y], 2 * n_in)
    m = kernels.site_marginals(buf, psi, np.array([n_in + s_a]), 2 * n_in)[0]
    return complex(np.trace(np.asarray(a, dtype=complex) @ m))


def cone_offsets(layers):
    """All ``delta`` with non-negative entries summing to ``layers - 1``."""
    n = layers - 1
    return [(i, j, n - i - j) for i in range(n + 1) for j in range(n + 1 - i)]


def cone_grid(gate, a, b, layers):
    """``{(d_b, d_a, delta): C}`` over the whole light cone after ``layers`` layers."""
    return {(d_b, d_a, delta): cone_correlator(gate, a, b, d_b, d_a, delta)
            for d_b in DIRS for d_a in DIRS for delta in cone_offsets(layers)}


def cone_on_ray(d_b, d_a, delta, layers):
    return d_a == d_b and tuple(delta) == tuple((layers - 1) * q for q in UNIT[d_b])


def predicted_ray_correlator_2d(gate, a, b, d, layers):
    """Channel-iteration value on the ray along ``d`` (M_+, M_0, M_- for x, y, z)."""
    ch = transfer_channel(gate, RAY_CHANNEL[d]).power(layers)
    return complex(np.trace(np.asarray(b) @ ch(np.asarray(a))) / 2)


# -- symmetry ----------------------------------------------------------------------------


def rotate_gate(gate):
    """Gate of the lattice relabelled by the 2 pi / 3 rotation x -> y -> z -> x.

    Input qubits (z̄, ȳ, x̄) become (x̄, z̄, ȳ) and outputs (x, y, z) become
    (y, z, x): qubit 1 takes the role of old qubit 3 on the input side and
    old qubit 2 on the output side.
    """
    t = np.asarray(gate).reshape((2,) * 6)
    # new tensor axes (out1, out2, out3, in1, in2, in3)
    # new out (x, y, z) = old out (z, x, y) = old axes (2, 0, 1)
    # new in (z̄, ȳ, x̄) = old in (ȳ, x̄, z̄) = old axes (4, 5, 3)
    return t.transpose(2, 0, 1, 4, 5, 3).reshape(8, 8)


def rotate_key(d_b, d_a, delta):
    """Image of a cone-grid key under the rotation x -> y -> z -> x."""
    rb = ROTATE[d_b]
    # delta is measured from e_{d_b}; rotate the vector componentwise
    dx, dy, dz = delta
    return rb, ROTATE[d_a], (dz, dx, dy)
