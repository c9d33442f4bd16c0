"""Command-line front end.

Subcommands::

    verify-gate           tri-unitarity / perfectness report (JSON)
    classify              ergodic-hierarchy label and channel spectra (JSON)
    correlations          1+1D correlation grid (CSV)
    entanglement          entropy growth from the solvable state (CSV)
    kagome-correlations   2+1D correlators on a periodic kagome sample (CSV)

Exit status: 0 on success, 1 when an input fails validation, 2 when a
resource bound (system size, window) is exceeded.  Angles are in radians.
Seed sweeps in ``entanglement`` run on ``TRIUNITARY_WORKERS`` processes
(default 1); results are merged in seed order, so output does not depend on
the worker count.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .chain import MAX_DENSE_L, ChainCircuit, correlation_grid
from .channels import Direction, classify_hierarchy
from .csvio import write_csv
from .entanglement import growth_experiment, page_value
from .gates import (
    KickedIsingFloquet,
    KickedIsingParams,
    TriUnitaryParams,
    appendix_gate,
    haar_dressed,
    haar_unitary,
    is_perfect,
    perfect_tensor,
    swap13,
    triunitarity_report,
    triunitary_gate,
)
from .kagome import MAX_SYSTEM_QUBITS, build_kagome, correlator_grid_2d
from .serialize import gate_hash, load_gate
from .tensor import PAULI_BY_NAME, unitarity_residual

WORKERS_ENV = "TRIUNITARY_WORKERS"
PRESETS = ("swap", "appendix", "perfect", "random", "haar", "kicked-ising")


class ValidationError(Exception):
    exit_code = 1


class ResourceError(Exception):
    exit_code = 2


@dataclass
class RunConfig:
    subcommand: str
    preset: str = None
    gate_file: str = None
    phi: float = None
    g: float = None
    seed: int = 0
    L: int = None
    n1: int = None
    n2: int = None
    boundary: str = "periodic"
    t_max: int = None
    cycles: int = None
    seeds: list = field(default_factory=list)
    region: list = None
    a: str = "Z"
    b: str = "Z"
    ki: dict = None
    dressing: bool = False
    allow_wrap: bool = False
    output: str = None

    def header(self):
        d = {k: v for k, v in asdict(self).items() if v is not None and k != "output"}
        return d


# -- gate construction -------------------------------------------------------------------


def build_gate(cfg, rng=None):
    """The 8x8 gate named by ``cfg`` (``rng`` drives the random presets)."""
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    if cfg.gate_file:
        try:
            g = load_gate(cfg.gate_file)
        except (OSError, ValueError, KeyError) as exc:
            raise ValidationError(f"cannot read gate file: {exc}") from exc
    elif cfg.preset == "swap":
        g = swap13()
    elif cfg.preset == "appendix":
        if cfg.phi is None or cfg.g is None:
            raise ValidationError("preset appendix needs --phi and --g")
        g = appendix_gate(cfg.phi, cfg.g)
    elif cfg.preset == "perfect":
        g = perfect_tensor()
    elif cfg.preset == "random":
        g = triunitary_gate(TriUnitaryParams.random(rng, phi=cfg.phi))
    elif cfg.preset == "haar":
        g = haar_unitary(8, rng)
    elif cfg.preset == "kicked-ising":
        raise ValidationError("kicked-ising is a chain Hamiltonian, not a single gate")
    else:
        raise ValidationError(f"unknown or missing gate preset {cfg.preset!r}")
    if cfg.dressing and cfg.preset != "haar":
        g = haar_dressed(g, rng)
    res = unitarity_residual(g)
    if res > 1e-8:
        raise ValidationError(f"gate is not unitary (residual {res:.2e})")
    return g


def _op(name):
    try:
        return PAULI_BY_NAME[name.upper()]
    except KeyError:
        raise ValidationError(f"operator must be one of X, Y, Z (got {name!r})") from None


# -- subcommands ------------------------------------------------------------------------


def run_verify(cfg):
    g = build_gate(cfg)
    rep = triunitarity_report(g)
    return json.dumps({
        "gate_hash": gate_hash(g),
        "unitary": bool(rep.unitary < rep.tol),
        "tri_unitary": bool(rep.ok),
        "perfect": bool(is_perfect(g)),
        "residuals": {k: float(v) for k, v in rep.residuals.items()},
    }, indent=1, sort_keys=True) + "\n"


def run_classify(cfg):
    g = build_gate(cfg)
    try:
        rep = classify_hierarchy(g)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    eig = {d.value: [[float(z.real) + 0.0, float(z.imag) + 0.0] for z in rep.eigenvalues[d]]
           for d in Direction}
    return json.dumps({"gate_hash": gate_hash(g), "label": rep.label.value, "eigenvalues": eig},
                      indent=1, sort_keys=True) + "\n"


def _ki_params(cfg, rng):
    k = dict(cfg.ki or {})
    L = cfg.L
    # per-site disorder is drawn from the seed when a spread is requested
    def field_(name, n):
        val = k.get(name, 0.0)
        spread = k.get(name + "_spread", 0.0)
        return val + spread * rng.uniform(-1, 1, n) if spread else val
    return KickedIsingParams(J=k.get("J", np.pi / 4), b=k.get("b", np.pi / 4),
                             b_prime=field_("b_prime", L // 2), J_prime=field_("J_prime", L),
                             h=field_("h", L))


def run_correlations(cfg):
    if cfg.L is None or cfg.t_max is None:
        raise ValidationError("correlations needs --L and --tmax")
    if cfg.L > MAX_DENSE_L:
        raise ResourceError(f"L={cfg.L} exceeds the dense limit L <= {MAX_DENSE_L}")
    a, b = _op(cfg.a), _op(cfg.b)
    rng = np.random.default_rng(cfg.seed)
    try:
        if cfg.preset == "kicked-ising":
            p = _ki_params(cfg, rng)
            c = KickedIsingFloquet(cfg.L, p, cfg.boundary)
            ghash = gate_hash(np.concatenate([c.phase_full, c.phase_aa]))
        else:
            g = build_gate(cfg, rng)
            c = ChainCircuit(cfg.L, g, cfg.boundary)
            ghash = gate_hash(g)
        grid = correlation_grid(c, a, b, cfg.t_max, a_label=cfg.a, b_label=cfg.b)
    except ValueError as exc:
        if "window" in str(exc):
            raise ResourceError(str(exc)) from exc
        raise ValidationError(str(exc)) from exc
    header = {"config": cfg.header(), "gate_hash": ghash, "L": cfg.L, "boundary": cfg.boundary,
              "seed": cfg.seed}
    rows = [(s, x, t, v.real, v.imag, on) for s, x, t, v, on in grid.rows()]
    return write_csv(cfg.output, header, ["site", "x", "t", "re", "im", "on_ray"], rows)


def _entanglement_task(args):
    cfg, seed = args
    L = cfg.L
    region = cfg.region if cfg.region is not None else list(range(L // 2))

    def source(rng):
        return build_gate(cfg, rng)

    series = growth_experiment(source, L, region, cfg.t_max, [seed], cfg.boundary, renyi=(2, 1))[0]
    g = build_gate(cfg, np.random.default_rng(seed))
    return seed, gate_hash(g), [(p.t, p.values[2], p.values[1], p.flatness) for p in series.points]


def run_entanglement(cfg):
    if cfg.L is None or cfg.t_max is None:
        raise ValidationError("entanglement needs --L and --tmax")
    if cfg.L > 22:
        raise ResourceError(f"L={cfg.L} exceeds the state-vector limit L <= 22")
    if cfg.preset == "kicked-ising":
        raise ValidationError("entanglement takes a three-qubit gate preset")
    seeds = cfg.seeds or [cfg.seed]
    region = cfg.region if cfg.region is not None else list(range(cfg.L // 2))
    if not region or min(region) < 0 or max(region) >= cfg.L:
        raise ValidationError(f"region {region} does not fit in L={cfg.L}")
    build_gate(cfg, np.random.default_rng(seeds[0]))  # validate before spawning work
    tri = triunitarity_report(build_gate(cfg, np.random.default_rng(seeds[0]))).ok
    workers = max(1, int(os.environ.get(WORKERS_ENV, "1")))
    tasks = [(cfg, s) for s in seeds]
    try:
        if workers > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_entanglement_task, tasks))
        else:
            results = [_entanglement_task(t) for t in tasks]
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    results.sort(key=lambda r: r[0])
    phi = cfg.phi if cfg.phi is not None else ""
    rows = [(t, seed, phi, s2, svn, fl) for seed, _, pts in results for t, s2, svn, fl in pts]
    header = {"config": cfg.header(), "L": cfg.L, "region": region, "boundary": cfg.boundary,
              "gate_hash": {str(seed): h for seed, h, _ in results}, "tri_unitary": bool(tri)}
    if 2 * len(region) <= cfg.L:
        header["page_value_bits"] = page_value(len(region), cfg.L)
    return write_csv(cfg.output, header,
                     ["t", "seed", "phi", "S2_bits", "SvN_bits", "flatness_residual"], rows)


def run_kagome(cfg):
    n1, n2 = cfg.n1 or 2, cfg.n2 or 2
    cycles = cfg.cycles or 1
    if 3 * n1 * n2 > MAX_SYSTEM_QUBITS:
        raise ResourceError(f"{3 * n1 * n2} system qubits exceed the limit {MAX_SYSTEM_QUBITS}")
    g = build_gate(cfg)
    c = build_kagome(n1, n2, g)
    try:
        grid = correlator_grid_2d(c, _op(cfg.a), _op(cfg.b), cycles, check_window=not cfg.allow_wrap)
    except ValueError as exc:
        raise ResourceError(str(exc)) from exc
    lat = c.lattice
    rows = []
    for sb, sa, cyc, v, on in grid.rows(lat):
        rows.append((sb.d, sa.i, sa.j, sa.d, cyc, v.real, v.imag, on))
    header = {"config": cfg.header(), "n1": n1, "n2": n2, "gate_hash": gate_hash(g),
              "system_sublattice": "blue", "wraps": bool(cfg.allow_wrap)}
    return write_csv(cfg.output, header,
                     ["b_sublattice", "i1", "i2", "sublattice", "cycles", "re", "im", "on_ray"], rows)


RUNNERS = {
    "verify-gate": run_verify,
    "classify": run_classify,
    "correlations": run_correlations,
    "entanglement": run_entanglement,
    "kagome-correlations": run_kagome,
}


# -- argument parsing --------------------------------------------------------------------


def _seeds(text):
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi)))
    return [int(s) for s in text.split(",") if s]


def _region(text):
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi)))
    return [int(s) for s in text.split(",") if s]


def _gate_args(p):
    p.add_argument("--preset", choices=PRESETS)
    p.add_argument("--gate-file", help="JSON gate file")
    p.add_argument("--phi", type=float, help="interaction angle (radians)")
    p.add_argument("--g", type=float, help="transverse angle for the appendix preset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dressing", action="store_true",
                   help="wrap the gate in Haar single-qubit gates on every leg")


def make_parser():
    ap = argparse.ArgumentParser(prog="triunitary", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify-gate", help="tri-unitarity and perfectness report")
    _gate_args(p)
    p.add_argument("-o", "--output")

    p = sub.add_parser("classify", help="ergodic-hierarchy classification")
    _gate_args(p)
    p.add_argument("-o", "--output")

    p = sub.add_parser("correlations", help="1+1D correlation grid")
    _gate_args(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--tmax", type=int, required=True, dest="t_max")
    p.add_argument("--boundary", choices=("periodic", "open"), default="periodic")
    p.add_argument("--a", default="Z")
    p.add_argument("--b", default="Z")
    p.add_argument("--J", type=float, default=np.pi / 4)
    p.add_argument("--b-field", type=float, default=np.pi / 4, dest="b_field")
    p.add_argument("--b-prime", type=float, default=0.0)
    p.add_argument("--J-prime", type=float, default=0.0)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--disorder", type=float, default=0.0,
                   help="uniform spread of b', J', h drawn from --seed (kicked-ising)")
    p.add_argument("-o", "--output")

    p = sub.add_parser("entanglement", help="entanglement growth from the solvable state")
    _gate_args(p)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--tmax", type=int, required=True, dest="t_max")
    p.add_argument("--boundary", choices=("periodic", "open"), default="periodic")
    p.add_argument("--region", type=_region, help="'lo:hi' or comma list (default first half)")
    p.add_argument("--seeds", type=_seeds, default=None, help="'lo:hi' or comma list")
    p.add_argument("-o", "--output")

    p = sub.add_parser("kagome-correlations", help="2+1D correlators on a kagome sample")
    _gate_args(p)
    p.add_argument("--n1", type=int, default=2)
    p.add_argument("--n2", type=int, default=2)
    p.add_argument("--cycles", type=int, default=1)
    p.add_argument("--a", default="Z")
    p.add_argument("--b", default="Z")
    p.add_argument("--allow-wrap", action="store_true",
                   help="accept windows where the light cone wraps around the torus")
    p.add_argument("-o", "--output")
    return ap


def config_from_args(ns):
    d = vars(ns).copy()
    cfg = RunConfig(subcommand=d.pop("subcommand"))
    for k in ("preset", "gate_file", "phi", "g", "seed", "L", "n1", "n2", "boundary", "t_max",
              "cycles", "region", "a", "b", "dressing", "allow_wrap", "output"):
        if k in d and d[k] is not None:
            setattr(cfg, k, d[k])
    if d.get("seeds"):
        cfg.seeds = d["seeds"]
    if cfg.preset == "kicked-ising":
        s = d.get("disorder", 0.0)
        cfg.ki = {"J": d["J"], "b": d["b_field"], "b_prime": d["b_prime"], "J_prime": d["J_prime"],
                  "h": d["h"]}
        if s:
            cfg.ki.update({"b_prime_spread": s, "J_prime_spread": s, "h_spread": s})
    if cfg.preset is None and cfg.gate_file is None:
        raise ValidationError("give a gate with --preset or --gate-file")
    return cfg


def run(cfg):
    """Execute a configuration; returns the text that was produced."""
    return RUNNERS[cfg.subcommand](cfg)


def main(argv=None):
    ap = make_parser()
    ns = ap.parse_args(argv)
    try:
        cfg = config_from_args(ns)
        text = run(cfg)
    except (ValidationError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    if cfg.output in (None, "-"):
        sys.stdout.write(text)
    elif cfg.subcommand in ("verify-gate", "classify"):
        with open(cfg.output, "w") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
