"""JSON import/export of three-qubit gates and a content hash for provenance."""

import hashlib
import json

import numpy as np

LEG_CONVENTION = "triunitary-legs-v1"
HASH_DECIMALS = 12


def gate_to_dict(g):
    g = np.asarray(g, dtype=complex).reshape(8, 8)
    return {
        "leg_convention": LEG_CONVENTION,
        "shape": [8, 8],
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in g],
    }


def gate_from_dict(d):
    if d.get("leg_convention") != LEG_CONVENTION:
        raise ValueError(
            f"unsupported leg convention {d.get('leg_convention')!r}; expected {LEG_CONVENTION!r}"
        )
    arr = np.asarray(d["entries"], dtype=float)
    if arr.shape != (8, 8, 2):
        raise ValueError("gate entries must be an 8x8 array of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def dump_gate(g, path):
    with open(path, "w") as fh:
        json.dump(gate_to_dict(g), fh, indent=1)


def load_gate(path):
    with open(path) as fh:
        return gate_from_dict(json.load(fh))


def gate_hash(g):
    """sha256 over entries rounded to 12 decimals (so -0.0 and 0.0 agree)."""
    g = np.asarray(g, dtype=complex).reshape(-1)
    parts = np.round(np.stack([g.real, g.imag], axis=1), HASH_DECIMALS) + 0.0
    text = ",".join(f"{x:.12f}" for x in parts.reshape(-1))
    return hashlib.sha256(text.encode()).hexdigest()[:16]
