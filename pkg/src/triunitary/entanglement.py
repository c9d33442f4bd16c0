"""Entanglement growth from the solvable Bell-pair initial state.

The initial state puts Bell pairs ``(|00> + |11>)/sqrt 2`` on sites
``(4k - 2, 4k)`` and ``|0>`` on the sites in between.  For tri-unitary
brickwork circuits the Renyi entropies across a cut far from everything
else are exactly ``t + 1`` bits when the last half-layer has a gate across
the cut and ``t`` otherwise, with a flat entanglement spectrum.
"""

from dataclasses import dataclass, field

import numpy as np

from .chain import OPEN, PERIODIC, ChainCircuit, apply_half_layer
from .tensor import reduced_density_matrix

MAX_DENSE_REGION = 14
SPECTRUM_CUTOFF = 1e-12


@dataclass
class SolvableState:
    L: int
    boundary: str
    amplitudes: np.ndarray
    pairs: list  # Bell-pair site pairs
    product_sites: list


def bell_pairs(L, boundary=PERIODIC):
    """Site pairs ``(4k - 2, 4k)`` that fit the chain."""
    pairs = []
    for x in range(0, L + 2, 4):
        a, b = x - 2, x
        if boundary == PERIODIC:
            if x >= L:
                continue
            pairs.append((a % L, b))
        elif 0 <= a and b < L:
            pairs.append((a, b))
    return pairs


def solvable_state(L, boundary=PERIODIC):
    if L < 4:
        raise ValueError("the solvable state needs L >= 4")
    if boundary == PERIODIC and L % 4:
        raise ValueError("periodic chains need L to be a multiple of 4")
    if boundary not in (PERIODIC, OPEN):
        raise ValueError(f"unknown boundary {boundary!r}")
    pairs = bell_pairs(L, boundary)
    paired = {q for p in pairs for q in p}
    product = [q for q in range(L) if q not in paired]
    psi = np.zeros(1 << L, dtype=complex)
    # sum over the 2^npairs bit patterns of the Bell pairs
    for pattern in range(1 << len(pairs)):
        idx = 0
        for k, (a, b) in enumerate(pairs):
            if (pattern >> k) & 1:
                idx |= (1 << (L - 1 - a)) | (1 << (L - 1 - b))
        psi[idx] = 1.0
    psi /= np.linalg.norm(psi)
    return SolvableState(L, boundary, psi, pairs, product)


def _spectrum(psi, region, L):
    region = sorted(int(q) for q in region)
    if not region or len(region) >= L:
        raise ValueError("region must be a non-empty proper subset of the chain")
    if len(set(region)) != len(region) or region[0] < 0 or region[-1] >= L:
        raise ValueError(f"invalid region {region}")
    side = region
    if len(region) > L - len(region):
        side = [q for q in range(L) if q not in region]
    if len(side) > MAX_DENSE_REGION:
        raise ValueError(f"reduced density matrix limited to {MAX_DENSE_REGION} qubits")
    lam = np.linalg.eigvalsh(reduced_density_matrix(psi, side, L))
    return np.clip(lam, 0, None)


def renyi_from_spectrum(lam, n):
    lam = lam[lam > SPECTRUM_CUTOFF]
    if n == 1:
        return float(-np.sum(lam * np.log2(lam)))
    if n == np.inf:
        return float(-np.log2(lam.max()))
    return float(np.log2(np.sum(lam**n)) / (1 - n))


def entropy(psi, region, n=1, L=None):
    """Renyi-``n`` entanglement entropy of ``region`` in bits (``n = 1``: von Neumann)."""
    psi = np.asarray(psi).reshape(-1)
    L = int(round(np.log2(psi.size))) if L is None else L
    if n < 1 and n != np.inf:
        raise ValueError("Renyi index must be >= 1")
    return max(renyi_from_spectrum(_spectrum(psi, region, L), n), 0.0)


def flatness_from_spectrum(lam):
    lam = np.sort(lam)[::-1]
    keep = lam > SPECTRUM_CUTOFF
    s = renyi_from_spectrum(lam, 1)
    dropped = float(lam[~keep].sum())
    return float(np.max(np.abs(lam[keep] * 2.0**s - 1))) + dropped


def spectrum_flatness(psi, region, L=None):
    """``max |lambda 2^S - 1|`` over nonzero eigenvalues plus the mass below the cutoff.

    Zero for a spectrum that is flat on its support (``rho = P / 2^S``).
    """
    psi = np.asarray(psi).reshape(-1)
    L = int(round(np.log2(psi.size))) if L is None else L
    return flatness_from_spectrum(_spectrum(psi, region, L))


def page_value(l, L):
    """Mean entanglement of a random pure state, ``l - 2^(2l - L - 1) / ln 2`` bits."""
    if l < 0 or 2 * l > L:
        raise ValueError("need 0 <= 2l <= L")
    return l - 2.0 ** (2 * l - L - 1) / np.log(2)


def page_value_exact(l, L):
    """Exact mean (Page's sum) in bits, for cross-checking the large-L formula."""
    m, n = 2**l, 2 ** (L - l)
    return (sum(1.0 / k for k in range(n + 1, m * n + 1)) - (m - 1) / (2 * n)) / np.log(2)


# -- cut bookkeeping -----------------------------------------------------------------


def cut_straddled(c, cut, step):
    """True if half-layer ``step`` has a gate acting on both sides of ``cut``.

    ``cut`` is the bond between sites ``cut - 1`` and ``cut``.
    """
    parity = (step - 1) % 2
    left, right = (cut - 1) % c.L, cut % c.L
    return any(left in cell and right in cell for cell in c.cells(parity))


def pair_straddles(pairs, cut, L):
    """Number of Bell pairs ``(a, a + 2)`` with one member on each side of the cut."""
    return sum(1 for a, _ in pairs if (cut - a) % L in (1, 2))


def predicted_cut_entropy(c, cut, t, pairs=None):
    """Solvable-regime entropy across a single isolated cut after ``t`` half-layers."""
    if t == 0:
        pairs = bell_pairs(c.L, c.boundary) if pairs is None else pairs
        return pair_straddles(pairs, cut, c.L)
    return t + (1 if cut_straddled(c, cut, t) else 0)


def region_cuts(region, L, boundary=PERIODIC):
    """Cuts bounding a contiguous region ``lo..hi-1`` (chain ends are not cuts)."""
    region = sorted(int(q) for q in region)
    lo, hi = region[0], region[-1] + 1
    if region != list(range(lo, hi)):
        raise ValueError("region must be contiguous")
    cuts = [lo, hi % L] if boundary == PERIODIC else [q for q in (lo, hi) if 0 < q < L]
    return sorted(set(cuts))


def predicted_region_entropy(c, region, t):
    """Sum of the single-cut predictions over the region's boundary cuts."""
    return sum(predicted_cut_entropy(c, cut, t) for cut in region_cuts(region, c.L, c.boundary))


def region_offset(entropy_bits, t, n_cuts):
    """The finite-region offset ``c = S - n_cuts * t`` (an integer in the solvable regime)."""
    return int(round(entropy_bits - n_cuts * t))


# -- experiments -----------------------------------------------------------------------


@dataclass
class EntropyPoint:
    t: int
    region: tuple
    values: dict  # Renyi index -> bits
    flatness: float


@dataclass
class EntropySeries:
    seed: object
    label: str
    points: list = field(default_factory=list)

    def curve(self, n=2):
        return np.array([p.values[n] for p in self.points])


def measure(psi, region, L, renyi=(2, 3, 1)):
    lam = _spectrum(psi, region, L)
    vals = {n: max(renyi_from_spectrum(lam, n), 0.0) for n in renyi}
    return vals, flatness_from_spectrum(lam)


def growth_experiment(gate_source, L, region, t_max, seeds, boundary=PERIODIC,
                      renyi=(2, 3, 1), label=""):
    """Evolve the solvable state and record entropies of ``region`` for t = 0..t_max.

    ``gate_source(rng)`` returns either an 8x8 gate (uniform Floquet circuit)
    or a ``gate(parity, cell, step)`` callable; each seed gets its own
    ``numpy.random.default_rng(seed)``.
    """
    if L > 22:
        raise ValueError("growth experiments limited to L <= 22")
    region = tuple(sorted(region))
    out = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        c = ChainCircuit(L, gate_source(rng), boundary)
        psi = solvable_state(L, boundary).amplitudes.copy()
        series = EntropySeries(seed, label)
        for t in range(t_max + 1):
            if t:
                apply_half_layer(c, psi, t)
            vals, flat = measure(psi, region, L, renyi)
            series.points.append(EntropyPoint(t, region, vals, flat))
        out.append(series)
    return out


# -- SWAP-limit kinematics -----------------------------------------------------------


def swap_limit_positions(c, sites, t):
    """Positions after ``t`` half-layers of qubit states that started on ``sites``
    when every gate is ``SWAP_13`` (up to single-qubit dressing): legs 1 and 3
    of each cell exchange, the middle leg and idle sites stay put."""
    pos = list(sites)
    for step in range(1, t + 1):
        swap = {}
        for a, _, b in c.cells((step - 1) % 2):
            swap[a], swap[b] = b, a
        pos = [swap.get(x, x) for x in pos]
    return pos


def swap_limit_entropy(c, region, t, pairs=None):
    """Entropy (bits) of ``region`` in the SWAP limit: the number of Bell pairs
    with exactly one member inside after ``t`` half-layers."""
    pairs = bell_pairs(c.L, c.boundary) if pairs is None else pairs
    region = set(region)
    count = 0
    for a, b in pairs:
        pa, pb = swap_limit_positions(c, (a, b), t)
        count += (pa in region) != (pb in region)
    return count


def kinematic_period(c, max_steps=1000):
    """Smallest even number of half-layers after which the SWAP-limit site
    permutation is the identity (whole Floquet periods only)."""
    sites = list(range(c.L))
    for t in range(2, max_steps + 1, 2):
        if swap_limit_positions(c, sites, t) == sites:
            return t
    raise ValueError("no period found")
