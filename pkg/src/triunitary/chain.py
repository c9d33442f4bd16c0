"""The 1+1D triangular brickwork of three-qubit gates.

Even half-layers act on sites ``(4k, 4k+1, 4k+2)`` and odd half-layers on
``(4k+2, 4k+3, 4k+4)``; one site in four idles in each half-layer.  A Floquet
period is an even half-layer followed by an odd one, and time ``t`` counts
half-layers.

Correlators ``C_s(x, t) = 2^-L Tr(a_s(t) b_{s+x})`` with ``a_s(t) = 𝕌^dag a_s 𝕌``
are computed two ways:

* :func:`heisenberg_correlator` conjugates the dense ``2^L x 2^L`` operator;
* :class:`PurifiedEvolution` evolves ``(𝕌 (x) 1)|Φ>`` with ``|Φ>`` maximally
  entangled between the chain and a reference copy, and reads off every
  anchor site at once from single-site marginals.  Both are exact.

In the SWAP limit sites ``0, 2 mod 4`` carry moving operators (velocity 2)
and sites ``1, 3 mod 4`` are inert.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channels import Direction, transfer_channel
from .tensor import X, Y, Z, dagger

PERIODIC = "periodic"
OPEN = "open"
MAX_DENSE_L = 12
MAX_STATE_L = 24
VELOCITY = 2


def _check_op(op, name):
    op = np.asarray(op, dtype=complex)
    if op.shape != (2, 2):
        raise ValueError(f"{name} must be a 2x2 operator")
    return op


class ChainCircuit:
    """Brickwork geometry plus a gate assignment.

    ``gate`` is either one 8x8 matrix (spatially uniform Floquet circuit) or a
    callable ``gate(parity, cell, step)`` returning the gate for a given
    half-layer parity (0 even, 1 odd), cell index and half-layer number.
    """

    def __init__(self, L, gate, boundary=PERIODIC):
        if boundary not in (PERIODIC, OPEN):
            raise ValueError(f"unknown boundary {boundary!r}")
        if L < 3:
            raise ValueError("need at least three sites")
        if boundary == PERIODIC and L % 4:
            raise ValueError("periodic brickwork needs L to be a multiple of 4")
        self.L, self.boundary = L, boundary
        if callable(gate):
            self._gate_fn, self.uniform_gate = gate, None
        else:
            g = np.ascontiguousarray(gate, dtype=complex).reshape(8, 8)
            self._gate_fn, self.uniform_gate = (lambda parity, cell, step: g), g

    def cells(self, parity):
        """Site triplets of the half-layer with the given parity."""
        out = []
        for x0 in range(2 * parity, self.L, 4):
            trip = [x0 + j for j in range(3)]
            if trip[-1] >= self.L:
                if self.boundary == OPEN:
                    continue
                trip = [q % self.L for q in trip]
            out.append(tuple(trip))
        return out

    def idle_sites(self, parity):
        used = {q for c in self.cells(parity) for q in c}
        return [q for q in range(self.L) if q not in used]

    def gate(self, parity, cell, step=0):
        return np.ascontiguousarray(self._gate_fn(parity, cell, step), dtype=complex)

    def layer(self, step):
        """Gates of half-layer ``step`` (1-based): list of (sites, matrix)."""
        parity = (step - 1) % 2
        return [(c, self.gate(parity, i, step)) for i, c in enumerate(self.cells(parity))]

    def apply_step(self, psi, step, offset=0, nqubits=None):
        return apply_half_layer(self, psi, step, offset=offset, nqubits=nqubits)

    def mirrored(self):
        """The spatially reflected circuit ``x -> 2 - x (mod L)``.

        The reflection maps every cell onto a cell of the same parity with its
        legs reversed, so the mirrored circuit is the same brickwork with each
        gate conjugated by the qubit-order reversal.
        """
        if self.uniform_gate is None or self.boundary != PERIODIC:
            raise ValueError("mirroring is implemented for uniform periodic circuits")
        return ChainCircuit(self.L, reverse_qubits(self.uniform_gate), self.boundary)

    def reflect(self, x):
        return (2 - x) % self.L


def reverse_qubits(g):
    """``R g R`` with ``R`` reversing the order of the three qubits."""
    return np.ascontiguousarray(np.asarray(g).reshape((2,) * 6).transpose(2, 1, 0, 5, 4, 3)).reshape(8, 8)


def apply_half_layer(c, psi, step, offset=0, nqubits=None, dag=False):
    """Apply half-layer ``step`` in place to qubits ``offset .. offset + L - 1``."""
    n = c.L if nqubits is None else nqubits
    for sites, g in c.layer(step):
        m = dagger(g) if dag else g
        kernels.apply_matrix(psi, m, [offset + q for q in sites], n)
    return psi


def half_layer(c, parity):
    """Dense unitary of an even (0) or odd (1) half-layer, L <= 12."""
    if c.L > MAX_DENSE_L:
        raise ValueError(f"dense half-layer limited to L <= {MAX_DENSE_L}")
    d = 1 << c.L
    u = np.eye(d, dtype=complex).reshape(-1)
    # act on the row index of the identity seen as a 2L-qubit vector
    apply_half_layer(c, u, parity + 1, nqubits=2 * c.L)
    return u.reshape(d, d)


def evolve_state(c, psi, t, start=1):
    """Apply half-layers ``start .. start + t - 1`` to a copy of ``psi``."""
    if c.L > MAX_STATE_L:
        raise ValueError(f"state evolution limited to L <= {MAX_STATE_L}")
    psi = np.array(psi, dtype=complex, copy=True).reshape(-1)
    for step in range(start, start + t):
        apply_half_layer(c, psi, step)
    return psi


def _check_window(c, t, check):
    if check and c.boundary == PERIODIC and 2 * VELOCITY * t + 1 > c.L:
        raise ValueError(f"t={t} is outside the wrap-free window for L={c.L} (need 4t+1 <= L)")


def heisenberg_operator(c, a, site, t):
    """Dense ``a_site(t)`` as a flat ``4^L`` vector (row-major operator)."""
    L = c.L
    if L > MAX_DENSE_L:
        raise ValueError(f"dense operator evolution limited to L <= {MAX_DENSE_L}")
    op = np.zeros(1 << 2 * L, dtype=complex)
    # a (x) identity: entries a[r, s] on the site, delta on the rest
    eye = np.eye(1 << L, dtype=complex).reshape(-1)
    kernels.apply_matrix(eye, _check_op(a, "a"), [site], 2 * L)
    op[:] = eye
    support = {site}
    for step in range(t, 0, -1):
        for sites, g in c.layer(step):
            if support.isdisjoint(sites):
                continue  # U^dag 1 U = 1 on these sites
            kernels.conjugate_operator(op, dagger(g), list(sites), L)
            support.update(sites)
    return op


def _site_blocks(op, L, sites):
    """2x2 blocks ``Tr_{rest}(op)`` for each site (op flat, row-major)."""
    t = op.reshape((2,) * (2 * L))
    out = []
    for s in sites:
        rest = [q for q in range(L) if q != s]
        # move (row s, col s) to the end, then take the diagonal over the rest
        perm = rest + [q + L for q in rest] + [s, s + L]
        m = t.transpose(perm).reshape(1 << (L - 1), 1 << (L - 1), 2, 2)
        out.append(np.einsum("ii...->...", m))
    return np.array(out)


def heisenberg_correlator(c, a, b, x, t, site=0, check_window=True):
    """``2^-L Tr(a_site(t) b_{site+x})`` by dense operator conjugation (L <= 12)."""
    _check_window(c, t, check_window)
    y = site + x
    if c.boundary == PERIODIC:
        y %= c.L
    elif not 0 <= y < c.L:
        raise ValueError("site outside the open chain")
    op = heisenberg_operator(c, a, site, t)
    block = _site_blocks(op, c.L, [y])[0]
    return complex(np.trace(block @ _check_op(b, "b")) / (1 << c.L))


class PurifiedEvolution:
    """Incremental evolution of ``(1 (x) 𝕌_t)|Φ>`` on 2L qubits.

    Qubits ``0..L-1`` are a reference copy and ``L..2L-1`` the chain (the
    chain sits on the low-order bits, which keeps the marginal kernel in
    cache).  For any single-site ``b`` at site y,

        2^-L Tr(a_s(t) b_y) = <Ψ| (b^T)_y (x) a_{L+s} |Ψ>

    and the right-hand side is read off for all s from the single-site
    marginals of ``|Ψ'><Ψ|`` with ``Ψ' = (b^T)_y Ψ``.
    """

    def __init__(self, c):
        if 2 * c.L > 26:
            raise ValueError("purified evolution limited to L <= 13")
        self.c, self.L, self.t = c, c.L, 0
        d = 1 << c.L
        self.psi = np.zeros(d * d, dtype=complex)
        idx = np.arange(d)
        self.psi[idx * d + idx] = d ** -0.5
        self._buf = np.empty_like(self.psi)

    def step(self):
        self.t += 1
        self.c.apply_step(self.psi, self.t, offset=self.L, nqubits=2 * self.L)
        return self

    def marginals(self, b, y, sites=None):
        """2x2 blocks ``M_s`` with ``C_s = Tr(a M_s)`` for the given ``b`` at site y."""
        sites = np.arange(self.L) if sites is None else np.asarray(sites)
        np.copyto(self._buf, self.psi)
        kernels.apply_matrix(self._buf, np.ascontiguousarray(_check_op(b, "b").T), [y], 2 * self.L)
        return kernels.site_marginals(self._buf, self.psi, sites + self.L, 2 * self.L)

    def correlators(self, a, b, y, sites=None):
        """``C`` for every anchor site s against ``b`` at y (array over s)."""
        m = self.marginals(b, y, sites)
        return np.einsum("rc,scr->s", _check_op(a, "a"), m)


@dataclass
class CorrelationGrid:
    """``C_s(x, t)`` indexed by anchor site, offset and half-layer count."""

    values: dict  # (s, x, t) -> complex
    a_label: str
    b_label: str
    L: int
    boundary: str
    meta: dict = field(default_factory=dict)

    def offsets(self, t):
        return sorted({x for (_, x, tt) in self.values if tt == t})

    def on_ray(self, x, t):
        return x in (0, VELOCITY * t, -VELOCITY * t)

    def max_off_ray(self):
        vals = [abs(v) for (s, x, t), v in self.values.items() if not self.on_ray(x, t)]
        return max(vals, default=0.0)

    def max_outside_cone(self):
        vals = [abs(v) for (s, x, t), v in self.values.items() if abs(x) > VELOCITY * t]
        return max(vals, default=0.0)

    def rows(self):
        """Sorted (s, x, t, value, on_ray) tuples."""
        return [
            (s, x, t, v, int(self.on_ray(x, t)))
            for (s, x, t), v in sorted(self.values.items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1]))
        ]


def _offset(c, s, y):
    x = y - s
    if c.boundary == PERIODIC:
        x = (x + c.L // 2) % c.L - c.L // 2
    return x


def correlation_grid(c, a, b, t_max, anchors=None, check_window=True, a_label="a", b_label="b"):
    """All ``C_s(x, t)`` for ``1 <= t <= t_max`` and every ``|x| <= 2t + 1``.

    ``anchors`` defaults to one unit cell (sites 0..3) for spatially uniform
    periodic circuits, where translation by 4 sites is a symmetry, and to
    every site otherwise.  Exact: uses :class:`PurifiedEvolution`.
    """
    grids = correlation_grids(c, {a_label: a}, {b_label: b}, t_max, anchors, check_window)
    return grids[(a_label, b_label)]


def correlation_grids(c, a_ops, b_ops, t_max, anchors=None, check_window=True):
    """:func:`correlation_grid` for every pair of ``a_ops`` x ``b_ops`` (dicts
    label -> operator), sharing one purified evolution."""
    _check_window(c, t_max, check_window)
    a_ops = {k: _check_op(v, "a") for k, v in a_ops.items()}
    b_ops = {k: _check_op(v, "b") for k, v in b_ops.items()}
    uniform = c.uniform_gate is not None and c.boundary == PERIODIC
    if anchors is None:
        anchors = range(4) if uniform else range(c.L)
    anchors = list(anchors)
    cell_anchors = {q % 4 for q in anchors}
    ev = PurifiedEvolution(c)
    values = {(la, lb): {} for la in a_ops for lb in b_ops}

    def record(lb, y, keep):
        m = ev.marginals(b_ops[lb], y)
        for la, a in a_ops.items():
            cs = np.einsum("rc,scr->s", a, m)
            for s, key in keep:
                values[(la, lb)][key] = complex(cs[s])

    for t in range(1, t_max + 1):
        ev.step()
        reach = VELOCITY * t + 1
        for lb in b_ops:
            if uniform:
                # C_s(y) = C_{s+4k}(y+4k): sweep b over one cell, all anchors at once
                for y0 in range(4):
                    keep = []
                    for s in range(c.L):
                        x = _offset(c, s, y0)
                        if abs(x) <= reach and s % 4 in cell_anchors:
                            keep.append((s, (s % 4, x, t)))
                    record(lb, y0, keep)
            else:
                ys = sorted({(s + x) % c.L if c.boundary == PERIODIC else s + x
                             for s in anchors for x in range(-reach, reach + 1)})
                for y in ys:
                    if not 0 <= y < c.L:
                        continue
                    keep = [(s, (s, _offset(c, s, y), t)) for s in anchors
                            if abs(_offset(c, s, y)) <= reach]
                    record(lb, y, keep)
    return {(la, lb): CorrelationGrid(v, la, lb, c.L, c.boundary,
                                      {"t_max": t_max, "anchors": anchors})
            for (la, lb), v in values.items()}


# -- channel predictions along rays ---------------------------------------------


def worldline(c, site, t):
    """Heisenberg path of a single-site operator that started at ``site``.

    Walks half-layers ``t, t-1, ..., 1`` and returns the list of
    (step, direction or None) plus the final site.  An operator on output leg
    1 of a gate is moved by ``M_+``, leg 2 by ``M_0``, leg 3 by ``M_-``; idle
    sites are left alone (None).
    """
    path = []
    x = site
    for step in range(t, 0, -1):
        parity = (step - 1) % 2
        hit = None
        for cell in c.cells(parity):
            if x in cell:
                hit = (cell, cell.index(x))
                break
        if hit is None:
            path.append((step, None))
            continue
        cell, leg = hit
        mu = (Direction.PLUS, Direction.ZERO, Direction.MINUS)[leg]
        path.append((step, mu))
        x = cell[{0: 2, 1: 1, 2: 0}[leg]]
    return path, x


def ray_prediction(c, a, b, site, t):
    """Predicted ``(x, C)`` for the on-ray correlator anchored at ``site``.

    The operator ``a`` is pushed through the channels met along its
    worldline (the exponent is the number of gated steps); the result is
    ``Tr(b M(a)) / 2`` at the worldline's end point ``site + x``.
    """
    if c.uniform_gate is None:
        raise ValueError("ray predictions need a spatially uniform circuit")
    path, end = worldline(c, site, t)
    op = _check_op(a, "a")
    chans = {}
    for _, mu in path:
        if mu is None:
            continue
        if mu not in chans:
            chans[mu] = transfer_channel(c.uniform_gate, mu)
        op = chans[mu](op)
    return _offset(c, site, end), complex(np.trace(_check_op(b, "b") @ op) / 2)


def ray_channel_match(c, ops, t_max, grids=None):
    """Compare brute-force on-ray correlators with channel predictions.

    ``ops`` maps labels to single-qubit operators; every (a, b) pair is
    checked, sharing one evolution unless ``grids`` is given.  Returns
    ``{"max_error": float, "by_ray": {Direction: err}, "rows": [...]}``.
    """
    by_ray = {d: 0.0 for d in Direction}
    rows = []
    labels = list(ops)
    if grids is None:
        grids = correlation_grids(c, ops, ops, t_max)
    for la in labels:
        for lb in labels:
            grid = grids[(la, lb)]
            anchors = grid.meta["anchors"]
            for t in range(1, t_max + 1):
                for s in anchors:
                    x, pred = ray_prediction(c, ops[la], ops[lb], s, t)
                    brute = grid.values[(s, x, t)]
                    err = abs(brute - pred)
                    path, _ = worldline(c, s, t)
                    mus = {mu for _, mu in path if mu is not None}
                    mu = mus.pop() if len(mus) == 1 else None
                    if mu is not None:
                        by_ray[mu] = max(by_ray[mu], err)
                    rows.append((la, lb, s, t, x, mu, brute, pred, err))
    return {"max_error": max(r[-1] for r in rows), "by_ray": by_ray, "rows": rows}


def random_traceless(rng):
    """A random Hermitian traceless single-qubit operator with Tr(a^2) = 2."""
    v = rng.standard_normal(3)
    v /= np.linalg.norm(v)
    return v[0] * X + v[1] * Y + v[2] * Z
