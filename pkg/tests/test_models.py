"""Instances, Hamiltonian construction, classical energies, ground-state oracles."""
import numpy as np
import pytest

from cdqaoa import models, sim
from cdqaoa.pauli import PauliString, PauliSum, to_dense

from conftest import dense_of_pauli_sum, dense_sum


def test_lfim_l3_terms():
    t = models.build(models.IsingChain(L=3, J=1.0, h_z=1.0, h_x=0.0))
    expected = PauliSum(3, (
        (-1.0, PauliString("ZZI")), (-1.0, PauliString("IZZ")),
        (-1.0, PauliString("ZIZ")),
        (-1.0, PauliString("ZII")), (-1.0, PauliString("IZI")),
        (-1.0, PauliString("IIZ")),
    ))
    assert t.h_prob == expected
    assert t.diagonal


def test_mixer_is_uniform_x():
    t = models.build(models.lfim(4))
    assert t.h_mixer == PauliSum(4, tuple(
        (1.0, PauliString.single(4, i, "X")) for i in range(4)))


def test_maxcut_triangle_terms():
    inst = models.MaxCut(L=3, edges=((0, 1), (1, 2), (0, 2)))
    t = models.build(inst)
    expected = PauliSum(3, (
        (1.0, PauliString("ZZI")), (1.0, PauliString("IZZ")),
        (1.0, PauliString("ZIZ")),
    ))
    assert t.h_prob == expected


def test_pspin_p2_l2_expansion():
    # -(1/2)(Z0+Z1)^2 = -I - Z0Z1
    t = models.build(models.PSpin(L=2, P=2, h=0.0))
    assert t.h_prob == PauliSum(2, (
        (-1.0, PauliString("II")), (-1.0, PauliString("ZZ")),
    ))
    np.testing.assert_allclose(
        dense_of_pauli_sum(t.h_prob), np.diag([-2.0, 0.0, 0.0, -2.0]), atol=1e-12)


@pytest.mark.parametrize("L,P", [(2, 2), (4, 3), (6, 4), (5, 2)])
def test_pspin_expansion_matches_dense_formula(L, P):
    t = models.build(models.PSpin(L=L, P=P, h=0.5))
    sum_z = dense_sum([(1.0, "I" * k + "Z" + "I" * (L - k - 1)) for k in range(L)], L)
    sum_x = dense_sum([(1.0, "I" * k + "X" + "I" * (L - k - 1)) for k in range(L)], L)
    expected = -np.linalg.matrix_power(sum_z, P) / L ** (P - 1) - 0.5 * sum_x
    np.testing.assert_allclose(dense_of_pauli_sum(t.h_prob), expected, atol=1e-10)


def test_tfim_is_not_diagonal():
    t = models.build(models.tfim(4))
    assert not t.diagonal


def test_instance_validation():
    with pytest.raises(ValueError):
        models.IsingChain(L=2, periodic=True)
    with pytest.raises(ValueError):
        models.MaxCut(L=3, edges=((0, 0),))
    with pytest.raises(ValueError):
        models.MaxCut(L=3, edges=((0, 1), (1, 0)))
    with pytest.raises(ValueError):
        models.MaxCut(L=2, edges=((0, 5),))
    with pytest.raises(ValueError):
        models.SK(L=3, couplings=(1.0, -1.0))
    with pytest.raises(ValueError):
        models.SK(L=3, couplings=(1.0, -1.0, 0.5))
    with pytest.raises(ValueError):
        models.PSpin(L=3, P=1)


def test_classical_energy_maxcut_ring():
    inst = models.MaxCut(L=4, edges=((0, 1), (1, 2), (2, 3), (0, 3)))
    assert models.classical_energy(inst, "0101") == -4.0
    assert models.cut_value(inst, "0101") == 4.0
    assert models.cut_value(inst, "0000") == 0.0


def test_classical_energy_pspin_aligned():
    inst = models.PSpin(L=6, P=4, h=0.0)
    assert models.classical_energy(inst, "000000") == pytest.approx(-6.0)
    assert models.classical_energy(inst, 0) == pytest.approx(-6.0)


def test_classical_energy_ghz_ring():
    inst = models.ghz_chain(4)
    assert models.classical_energy(inst, "0000") == -4.0


def test_classical_energy_rejects_non_diagonal():
    with pytest.raises(ValueError):
        models.classical_energy(models.tfim(3), 0)
    with pytest.raises(ValueError):
        models.classical_energy(models.PSpin(L=3, P=2, h=1.0), 0)


@pytest.mark.parametrize("make", [
    lambda: models.lfim(5),
    lambda: models.ghz_chain(4),
    lambda: models.random_sk(5, seed=1),
    lambda: models.random_maxcut_3_regular(6, seed=2),
    lambda: models.PSpin(L=4, P=3, h=0.0),
])
def test_classical_energy_matches_dense_diagonal(make):
    inst = make()
    h = models.build(inst).h_prob
    dense = dense_of_pauli_sum(h)
    for z in range(2**inst.L):
        expected = dense[z, z].real
        assert models.classical_energy(inst, z) == pytest.approx(expected, abs=1e-12)


def test_cut_energy_affine_relation():
    inst = models.random_maxcut_3_regular(8, seed=4)
    total_w = sum(inst.weights)
    for z in (0, 17, 133, 255):
        e = models.classical_energy(inst, z)
        c = models.cut_value(inst, z)
        assert c == pytest.approx((total_w - e) / 2, abs=1e-12)


def test_ground_energy_ghz_ring():
    e0, deg = models.ground_energy(models.ghz_chain(4))
    assert e0 == -4.0
    assert deg == 2


def test_ground_energy_single_qubit_transverse():
    # H = -Z - X on one qubit: E0 = -sqrt(2)
    inst = models.IsingChain(L=1, J=0.0, h_z=1.0, h_x=1.0, periodic=False)
    e0, _ = models.ground_energy(inst)
    assert e0 == pytest.approx(-np.sqrt(2), abs=1e-10)


def test_ground_energy_diagonal_equals_bitstring_sweep():
    inst = models.random_sk(6, seed=7)
    e0, deg = models.ground_energy(inst)
    energies = [models.classical_energy(inst, z) for z in range(2**6)]
    assert e0 == pytest.approx(min(energies), abs=1e-12)
    assert deg == sum(1 for e in energies if e <= min(energies) + 1e-8)


def test_ground_energy_pspin_even_degeneracy():
    e0, deg = models.ground_energy(models.PSpin(L=6, P=4, h=0.0))
    assert e0 == pytest.approx(-6.0)
    assert deg == 2


@pytest.mark.parametrize("L", [4, 6, 8, 10])
def test_iterative_solver_matches_dense(L):
    inst = models.tfim(L)
    h = models.build(inst).h_prob
    dense_e0 = models.ground_energy_of_sum(h, method="dense").e0 if L <= 10 else None
    iter_e0 = models.ground_energy_of_sum(h, method="iterative").e0
    assert iter_e0 == pytest.approx(dense_e0, abs=1e-8)


def test_tfim_l6_against_independent_dense():
    inst = models.tfim(6)
    h = models.build(inst).h_prob
    evals = np.linalg.eigvalsh(dense_of_pauli_sum(h))
    assert models.ground_energy(inst).e0 == pytest.approx(evals[0], abs=1e-8)


def test_random_maxcut_k4_unique():
    for seed in range(5):
        inst = models.random_maxcut_3_regular(4, seed)
        assert inst.edges == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def test_random_maxcut_degrees_and_edge_count():
    inst = models.random_maxcut_3_regular(10, seed=11)
    assert len(inst.edges) == 15  # 3L/2
    degree = [0] * 10
    for i, j in inst.edges:
        degree[i] += 1
        degree[j] += 1
    assert all(d == 3 for d in degree)


def test_random_maxcut_rejects_odd_or_small():
    with pytest.raises(ValueError):
        models.random_maxcut_3_regular(5, seed=0)
    with pytest.raises(ValueError):
        models.random_maxcut_3_regular(2, seed=0)


def test_random_instances_deterministic():
    a = models.random_sk(6, seed=9)
    b = models.random_sk(6, seed=9)
    assert a == b
    c = models.random_instance("maxcut-3-regular", 8, seed=5)
    d = models.random_instance("maxcut-3-regular", 8, seed=5)
    assert c == d


def test_sk_couplings_are_pm_one():
    inst = models.random_sk(7, seed=3)
    assert set(inst.couplings) <= {-1.0, 1.0}
    assert len(inst.couplings) == 21


def test_default_cd_operators():
    lf = models.default_cd_operator(models.lfim(3))
    assert lf.label == "Y"
    assert [s.letters for _, s in lf.terms] == ["YII", "IYI", "IIY"]

    gz = models.default_cd_operator(models.ghz_chain(3))
    assert gz.label == "ZY"
    assert [s.letters for _, s in gz.terms] == ["ZYI", "IZY", "YIZ"]

    ps = models.default_cd_operator(models.PSpin(L=3, P=3, h=1.0))
    assert ps.label == "Y"

    sk = models.default_cd_operator(models.SK(L=3, couplings=(-1.0, 1.0, 1.0)))
    weights = {s.letters: w for w, s in sk.terms}
    assert weights["ZYI"] == -1.0  # J_01 weighted Z0 Y1
    assert weights["ZIY"] == 1.0
    assert weights["IZY"] == 1.0


def test_cd_operator_rejects_even_y():
    with pytest.raises(ValueError):
        models.CdOperator("XX", ((1.0, PauliString("XX")),))


def test_cd_override_label():
    inst = models.tfim(4)
    cd = models.make_cd_operator(inst, "Y")
    assert all(s.shape == "Y" for _, s in cd.terms)
    cd2 = models.make_cd_operator(inst, "YX")
    assert all(s.shape == "YX" for _, s in cd2.terms)


def test_instance_serialization_round_trip():
    for inst in [
        models.lfim(5),
        models.tfim(4, J=0.7),
        models.random_maxcut_3_regular(8, seed=1),
        models.random_sk(5, seed=2),
        models.PSpin(L=6, P=4, h=1.0),
    ]:
        text = models.instance_to_json(inst, seed=3)
        back = models.instance_from_json(text)
        assert back == inst
        assert models.instance_to_json(back, seed=3) == text  # bit-exact
