import numpy as np
import pytest

from conftest import random_tu
from triunitary.gates import haar_unitary, perfect_tensor, swap13
from triunitary.kagome import (
    DIRS, INPUT_ORDER, OUTPUT_ORDER, KagomeLattice, Site, build_kagome, cone_correlator, cone_grid,
    cone_offsets, cone_on_ray, correlator_2d, correlator_grid_2d, floquet_cycle,
    light_cone_wraps, on_ray, predicted_ray_correlator_2d, rotate_gate, rotate_key,
)
from triunitary.tensor import X, Y, Z, basis_state, embed

OPS = (X, Y, Z)


def test_counting():
    c = build_kagome(2, 2, swap13())
    assert c.L == 12 and c.n_physical == 36
    sites = c.system_sites()
    assert len(sites) == 12 and all(s.sublattice == "blue" for s in sites)
    for d in DIRS:
        assert sum(s.d == d for s in sites) == 4


def test_lattice_reduce_roundtrip():
    lat = KagomeLattice(2, 3)
    for color in range(3):
        for v in lat.vertices(color):
            assert lat.reduce(*lat.vertex_ab(*v)) == v
    assert len({lat.site_index(s) for s in lat.sites(1)}) == 18


def test_layer_schedule():
    lat = KagomeLattice(2, 2)
    c = build_kagome(2, 2, swap13())
    colours = [next(iter(c.slots(step))).color for step in range(4)]
    assert colours == [0, 1, 2, 0]  # blue -> red -> green -> blue
    for color in range(3):
        for v in lat.vertices(color):
            assert all(s.color == (color - 1) % 3 for s in lat.inputs(v))
            assert [s.d for s in lat.inputs(v)] == list(INPUT_ORDER)
            assert [s.d for s in lat.outputs(v)] == list(OUTPUT_ORDER)


def test_straight_worldlines_are_lattice_translations():
    lat = KagomeLattice(3, 3)
    s = Site(0, 0, 0, "x")
    moved = lat.advance(s, 3)
    assert moved.color == 0 and moved.d == "x"
    step = lat.position(moved) - lat.position(s)
    for d in DIRS:
        s = Site(0, 1, 1, d)
        # one cycle moves every site by the same length, along its own direction
        assert np.isclose(np.linalg.norm(lat.position(lat.advance(s, 1)) - lat.position(s)), 1)
    assert np.isclose(np.linalg.norm(step), 3)


def test_swap_limit_worldlines():
    c = build_kagome(2, 2, swap13())
    grid = correlator_grid_2d(c, Z, Z, 1, check_window=False)
    lat = c.lattice
    for (sb, sa, cyc), v in grid.values.items():
        expect = 1.0 if lat.advance(sb, 3) == sa else 0.0
        assert abs(v - expect) < 1e-12


@pytest.mark.parametrize("n", [(1, 1), (1, 2)])
def test_zero_state_and_excitation_tracking(n):
    c = build_kagome(*n, swap13())
    lat = c.lattice
    zero = basis_state([0] * c.L)
    rep = floquet_cycle(c, zero)
    assert np.allclose(rep.state, zero) and rep.min_fidelity == 1
    for s in c.system_sites():
        bits = [0] * c.L
        bits[lat.site_index(s)] = 1
        out = floquet_cycle(c, basis_state(bits)).state
        bits = [0] * c.L
        bits[lat.site_index(lat.advance(s, 3))] = 1
        assert np.allclose(out, basis_state(bits))


@pytest.mark.parametrize("seed", range(2))
def test_ancilla_circuit_matches_system_map(seed, rng):
    c = build_kagome(1, 2, random_tu(seed))
    psi = rng.normal(size=1 << c.L) + 1j * rng.normal(size=1 << c.L)
    psi /= np.linalg.norm(psi)
    rep = floquet_cycle(c, psi, cycles=2)
    assert all(abs(f - 1) < 1e-10 for f in rep.fidelities) and len(rep.fidelities) == 6
    assert np.allclose(rep.state, c.evolve(psi, cycles=2))


def test_ancilla_return_failure_raises():
    c = build_kagome(1, 1, swap13())
    # an unnormalised input makes the projected norm differ from 1
    with pytest.raises(RuntimeError):
        floquet_cycle(c, 2 * basis_state([0, 0, 0]))
    with pytest.raises(ValueError):
        floquet_cycle(c, basis_state([0, 0]))


def test_light_cone_wraps():
    assert light_cone_wraps(KagomeLattice(2, 2), 3)
    assert not light_cone_wraps(KagomeLattice(4, 4), 3)
    with pytest.raises(ValueError):
        correlator_grid_2d(build_kagome(2, 2, swap13()), Z, Z, 1)


@pytest.mark.parametrize("a", OPS)
@pytest.mark.parametrize("b", OPS)
def test_cone_single_gate_oracle(a, b):
    g = haar_unitary(8, np.random.default_rng(9))
    for d_b in DIRS:
        for d_a in DIRS:
            b_in = embed(b, (INPUT_ORDER.index(d_b),), 3)
            a_out = embed(a, (OUTPUT_ORDER.index(d_a),), 3)
            expect = np.trace(g.conj().T @ a_out @ g @ b_in) / 8
            assert np.isclose(cone_correlator(g, a, b, d_b, d_a, (0, 0, 0)), expect)


def test_cone_outside_light_cone():
    assert cone_correlator(swap13(), Z, Z, "x", "x", (-1, 0, 1)) == 0


@pytest.mark.parametrize("seed", range(2))
def test_cone_confinement(seed):
    g = random_tu(seed)
    for layers in (1, 2, 3):
        grid = cone_grid(g, Z, X, layers)
        for (d_b, d_a, delta), v in grid.items():
            if cone_on_ray(d_b, d_a, delta, layers):
                assert np.isclose(v, predicted_ray_correlator_2d(g, Z, X, d_b, layers), atol=1e-10)
            else:
                assert abs(v) < 1e-10


def test_cone_negative_control():
    grid = cone_grid(haar_unitary(8, np.random.default_rng(3)), Z, Z, 2)
    assert max(abs(v) for k, v in grid.items() if not cone_on_ray(*k, 2)) > 1e-3


def test_cone_perfect_tensor_vanishes():
    for layers in (1, 2, 3):
        assert max(abs(v) for v in cone_grid(perfect_tensor(), Z, Y, layers).values()) < 1e-10


def test_cone_offsets():
    assert cone_offsets(1) == [(0, 0, 0)]
    assert len(cone_offsets(3)) == 6 and all(sum(d) == 2 for d in cone_offsets(3))


def test_rotation_symmetry():
    g = random_tu(7)
    grid = cone_grid(g, X, Z, 2)
    rot = cone_grid(rotate_gate(g), X, Z, 2)
    for key, v in grid.items():
        assert np.isclose(rot[rotate_key(*key)], v)


def test_correlator_2d_single_entry():
    c = build_kagome(1, 1, swap13())
    s = c.system_sites()[0]
    assert np.isclose(correlator_2d(c, Z, Z, s, c.lattice.advance(s, 3), check_window=False), 1)
    assert on_ray(c.lattice, s, c.lattice.advance(s, 3), 3)


def test_circuit_validation():
    with pytest.raises(ValueError):
        build_kagome(2, 2, np.ones((8, 8)))
    with pytest.raises(ValueError):
        build_kagome(0, 2, swap13())
