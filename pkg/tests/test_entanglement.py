import numpy as np
import pytest

from conftest import random_tu
from triunitary.chain import OPEN, ChainCircuit, evolve_state
from triunitary.entanglement import (
    bell_pairs, cut_straddled, entropy, growth_experiment, kinematic_period, measure,
    page_value, page_value_exact, pair_straddles, predicted_cut_entropy, predicted_region_entropy,
    region_cuts, region_offset, renyi_from_spectrum, solvable_state, spectrum_flatness, swap_limit_entropy,
)
from triunitary.gates import (
    TriUnitaryParams, haar_dressed, haar_unitary, perfect_tensor, swap13, triunitary_gate,
)
from triunitary.tensor import I2, basis_state, reduced_density_matrix


def _count_straddling(pairs, region):
    region = set(region)
    return sum((a in region) != (b in region) for a, b in pairs)


def test_solvable_state_layout():
    st = solvable_state(8)
    assert st.pairs == [(6, 0), (2, 4)]
    assert st.product_sites == [1, 3, 5, 7]
    assert np.isclose(np.linalg.norm(st.amplitudes), 1)
    assert bell_pairs(9, OPEN) == [(2, 4), (6, 8)]
    with pytest.raises(ValueError):
        solvable_state(10)


@pytest.mark.parametrize("region", [[0], [0, 1], [1, 2, 3], [2, 3, 4, 5], [7, 0, 1], [3]])
def test_solvable_state_entropies(region):
    st = solvable_state(8)
    # independent oracle: count Bell pairs with exactly one member inside
    expect = _count_straddling(st.pairs, region)
    for n in (1, 2, 3):
        assert np.isclose(entropy(st.amplitudes, region, n), expect)


def test_bell_member_marginal():
    st = solvable_state(8)
    assert np.allclose(reduced_density_matrix(st.amplitudes, [2], 8), I2 / 2)
    assert np.allclose(reduced_density_matrix(st.amplitudes, [1], 8), np.diag([1, 0]))


def test_entropy_examples():
    assert entropy(basis_state([0, 1, 0, 0]), [0, 1]) == 0
    bell = np.array([1, 0, 0, 1]) / np.sqrt(2)
    for n in (1, 2, 3, np.inf):
        assert np.isclose(entropy(bell, [0], n), 1)
    two_bells = np.kron(bell, bell).reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(-1)
    for n in (1, 2, 5):
        assert np.isclose(entropy(two_bells, [0, 1], n), 2)
    with pytest.raises(ValueError):
        entropy(bell, [0], 0.5)
    with pytest.raises(ValueError):
        entropy(bell, [0, 1])


def test_renyi_ordering(rng):
    psi = rng.normal(size=64) + 1j * rng.normal(size=64)
    psi /= np.linalg.norm(psi)
    s = [entropy(psi, [0, 1, 2], n) for n in (1, 2, 3, np.inf)]
    assert s[0] >= s[1] >= s[2] >= s[3] > 0


def test_flatness():
    assert spectrum_flatness(basis_state([0, 0, 0]), [0]) == 0
    st = solvable_state(8)
    assert spectrum_flatness(st.amplitudes, [0, 1, 2]) < 1e-12
    assert renyi_from_spectrum(np.array([0.5, 0.5]), 2) == 1


def test_cut_rules():
    c = ChainCircuit(12, swap13())
    assert cut_straddled(c, 1, 1) and cut_straddled(c, 2, 1) and not cut_straddled(c, 3, 1)
    assert cut_straddled(c, 3, 2) and not cut_straddled(c, 1, 2)
    pairs = bell_pairs(12)
    assert pair_straddles(pairs, 0, 12) == 1  # pair (10, 0) wraps
    assert pair_straddles(pairs, 3, 12) == 1 and pair_straddles(pairs, 2, 12) == 0
    assert predicted_cut_entropy(c, 6, 1) == 2 and predicted_cut_entropy(c, 6, 2) == 2
    assert predicted_cut_entropy(c, 6, 3) == 4


@pytest.mark.parametrize("seed", range(3))
def test_entanglement_law_isolated_cut(seed):
    # open L=13, cut 6: far enough from the walls for t <= 2
    L, cut = 13, 6
    c = ChainCircuit(L, random_tu(seed), OPEN)
    psi = solvable_state(L, OPEN).amplitudes
    for t in (1, 2):
        psi_t = evolve_state(c, psi, t)
        vals, flat = measure(psi_t, range(cut), L, renyi=(1, 2, 3))
        pred = predicted_cut_entropy(c, cut, t)
        assert all(abs(v - pred) < 1e-8 for v in vals.values())
        assert flat < 1e-8


def test_growth_experiment_periodic_two_cuts():
    L = 12
    ser = growth_experiment(lambda rng: triunitary_gate(TriUnitaryParams.random(rng)),
                            L, range(6), 1, seeds=[0, 1])
    c = ChainCircuit(L, swap13())
    pred = predicted_cut_entropy(c, 0, 1) + predicted_cut_entropy(c, 6, 1)
    for s in ser:
        assert abs(s.points[1].values[2] - pred) < 1e-8
        assert s.points[1].flatness < 1e-8


def test_flatness_negative_control():
    ser = growth_experiment(lambda rng: haar_unitary(8, rng), 12, range(6), 12, [0], OPEN)
    assert ser[0].points[-1].flatness > 0.5


def test_page_value():
    assert np.isclose(page_value(13, 27), 13 - 1 / (4 * np.log(2)))
    assert np.isclose(page_value(13, 27), 12.639, atol=1e-3)
    assert np.isclose(page_value(1, 2), 0.279, atol=1e-3)
    assert np.isclose(page_value(7, 14), 6.279, atol=1e-3)
    assert np.isclose(page_value(9, 19), 8.639, atol=1e-3)
    # the large-L formula agrees with the exact finite-size mean
    assert abs(page_value(7, 14) - page_value_exact(7, 14)) < 0.01
    with pytest.raises(ValueError):
        page_value(8, 14)


def test_page_value_haar_states():
    rng = np.random.default_rng(11)
    vals = []
    for _ in range(50):
        psi = rng.normal(size=1 << 14) + 1j * rng.normal(size=1 << 14)
        vals.append(entropy(psi / np.linalg.norm(psi), range(7)))
    assert abs(np.mean(vals) - page_value(7, 14)) < 0.05


def test_perfect_tensor_reaches_page_value():
    # in an open chain of 14 sites the last site belongs to no cell and never
    # interacts, so the coupled system has 13 qubits
    c = ChainCircuit(14, swap13(), OPEN)
    assert 13 in c.idle_sites(0) and 13 in c.idle_sites(1)
    ser = growth_experiment(lambda rng: haar_dressed(perfect_tensor(), rng), 14, range(7), 24,
                            seeds=[0, 1], boundary=OPEN, renyi=(1,))
    for s in ser:
        late = np.mean(s.curve(1)[-6:])
        assert abs(late - page_value(6, 13)) < 0.5


def test_swap_limit_kinematics():
    L, region = 11, range(5)
    c = ChainCircuit(L, swap13(), OPEN)
    psi = solvable_state(L, OPEN).amplitudes
    period = kinematic_period(c)
    for t in range(period + 1):
        assert np.isclose(entropy(evolve_state(c, psi, t), region), swap_limit_entropy(c, region, t))
    assert swap_limit_entropy(c, region, period) == swap_limit_entropy(c, region, 0)


def test_growth_experiment_validation():
    with pytest.raises(ValueError):
        growth_experiment(lambda rng: swap13(), 24, range(4), 1, [0])


def test_region_cuts():
    assert region_cuts(range(3, 8), 20) == [3, 8]
    assert region_cuts(range(0, 10), 20) == [0, 10]
    assert region_cuts(range(0, 9), 19, OPEN) == [9]
    assert region_cuts(range(4, 19), 19, OPEN) == [4]
    with pytest.raises(ValueError):
        region_cuts([1, 2, 4], 20)


@pytest.mark.slow
def test_finite_region_offsets():
    """Record the offset c = S - 2t of finite periodic regions per configuration.

    The offset depends on where both ends sit in the brickwork and on the
    parity of t.  At t = 1 every configuration follows two-cut additivity with
    c in {0, 1, 2}.  At t = 2 additivity still holds whenever at most one cut is
    straddled; when both are, the two light cones interact through the
    region and S falls below 2t + 2 (non-integer, gate dependent).
    """
    L = 20
    table = {}
    for seed in range(2):
        c = ChainCircuit(L, random_tu(50 + seed))
        psi = solvable_state(L).amplitudes
        for t in (1, 2):
            psi = c.apply_step(psi, t)
            for lo in range(4):
                for ell in range(8, 12):
                    region = range(lo, lo + ell)
                    s2 = measure(psi, region, L, renyi=(2,))[0][2]
                    pred = predicted_region_entropy(c, region, t)
                    straddled = pred - 2 * t
                    if t == 1 or straddled < 2:
                        assert abs(s2 - pred) < 1e-8
                        table[(t, lo % 4, (lo + ell) % 4)] = region_offset(s2, t, 2)
                    else:
                        assert s2 < pred - 0.5
                        table.setdefault((t, lo % 4, (lo + ell) % 4), None)
    assert {v for v in table.values() if v is not None} == {0, 1, 2}
    assert all(v is not None for (t, _, _), v in table.items() if t == 1)
    print("c per (t, lo mod 4, hi mod 4):", table)


@pytest.mark.slow
def test_decoupled_gate_halts_growth():
    # phi1 = phi2 = 0: the middle legs never interact, growth stops below l/2
    L, region = 16, range(8)

    def curve(phi, seed):
        src = lambda rng: triunitary_gate(TriUnitaryParams.random(rng, phi=phi))  # noqa: E731
        return growth_experiment(src, L, region, 24, [seed], OPEN, renyi=(1,))[0].curve(1)

    for seed in range(2):
        assert curve((0.0, 0.0, np.pi / 2), seed).max() <= len(region) / 2 + 1e-9
        assert curve((np.pi / 2,) * 3, seed)[-6:].mean() > len(region) / 2 + 1
