"""Compare the compiled kernels against the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--n 16] [--repeat 5]

Times one brickwork half-layer of three-qubit gates, a diagonal phase layer,
and the per-site marginal reduction used by the purified correlator
evaluation.  Prints best-of-``repeat`` wall times and the speedup.
"""

import argparse
import timeit

import numpy as np

from triunitary import _fallback, kernels
from triunitary.gates import TriUnitaryParams, triunitary_gate

try:
    from triunitary import _kernels
except ImportError:
    _kernels = None


def _state(n, rng):
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return psi / np.linalg.norm(psi)


def cases(n, rng):
    g = triunitary_gate(TriUnitaryParams.random(rng))
    diag = np.exp(1j * rng.uniform(0, 2 * np.pi, 4))
    cells = [(s, s + 1, s + 2) for s in range(0, n - 2, 2)]
    psi = _state(n, rng)
    phi = _state(n, rng)

    def layer(impl):
        for cell in cells:
            kernels.apply_matrix(psi, g, cell, n, impl=impl)

    def phases(impl):
        for q in range(n - 1):
            kernels.apply_diagonal(psi, diag, (q, q + 1), n, impl=impl)

    def marginals(impl):
        kernels.site_marginals(phi, psi, list(range(n)), n, impl=impl)

    return {"gate half-layer": layer, "ZZ phase layer": phases, "site marginals": marginals}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=16, help="number of qubits")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    impls = [("numpy", _fallback)] + ([("cython", _kernels)] if _kernels else [])
    print(f"n = {args.n} qubits; active backend: {kernels.BACKEND}")
    print(f"{'kernel':<18}" + "".join(f"{name:>12}" for name, _ in impls) + "     speedup")
    for label, fn in cases(args.n, rng).items():
        times = [min(timeit.repeat(lambda: fn(impl), number=1, repeat=args.repeat))
                 for _, impl in impls]
        speed = f"{times[0] / times[1]:10.2f}x" if len(times) > 1 else "         -"
        print(f"{label:<18}" + "".join(f"{t * 1e3:10.2f}ms" for t in times) + speed)


if __name__ == "__main__":
    main()
