"""Statevector engine: rotations, diagonal phases, expectations, unitarity."""
import numpy as np
import pytest
from scipy.linalg import expm

from cdqaoa import models
from cdqaoa.pauli import PauliString, PauliSum
from cdqaoa import sim

from conftest import dense_of_pauli_sum, kron_letters, random_letters


def random_state(rng, L: int) -> sim.StateVector:
    amps = rng.normal(size=2**L) + 1j * rng.normal(size=2**L)
    amps /= np.linalg.norm(amps)
    return sim.StateVector(L, amps)


def test_init_plus_amplitudes():
    s = sim.init_plus(1)
    np.testing.assert_allclose(s.amplitudes, [1 / np.sqrt(2)] * 2)
    s = sim.init_plus(2)
    np.testing.assert_allclose(s.amplitudes, [0.5] * 4)


def test_init_plus_is_x_eigenstate():
    L = 5
    s = sim.init_plus(L)
    h = models.build(models.lfim(L)).h_mixer
    assert sim.expectation(s, h) == pytest.approx(L, abs=1e-12)


def test_init_plus_range_guard():
    with pytest.raises(ValueError):
        sim.init_plus(0)
    with pytest.raises(ValueError):
        sim.init_plus(25)


def test_rotation_x_half_pi():
    s = sim.basis_state(1, 0)
    sim.apply_pauli_rotation(s, PauliString("X"), np.pi / 2)
    np.testing.assert_allclose(s.amplitudes, [0, -1j], atol=1e-15)


def test_rotation_zero_angle_is_identity():
    rng = np.random.default_rng(0)
    s = random_state(rng, 3)
    before = s.amplitudes.copy()
    sim.apply_pauli_rotation(s, PauliString("ZYX"), 0.0)
    np.testing.assert_array_equal(s.amplitudes, before)


def test_rotation_matches_expm_oracle(rng):
    L = 3
    p = PauliString.from_sites(L, [(0, "Z"), (1, "Y")])
    theta = 0.37
    s = random_state(rng, L)
    expected = expm(-1j * theta * kron_letters(p.letters)) @ s.amplitudes
    sim.apply_pauli_rotation(s, p, theta)
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-12)


@pytest.mark.parametrize("length", [1, 2, 4])
def test_rotation_random_strings_vs_expm(rng, length):
    for _ in range(10):
        letters = random_letters(rng, length)
        theta = rng.uniform(-2, 2)
        s = random_state(rng, length)
        expected = expm(-1j * theta * kron_letters(letters)) @ s.amplitudes
        sim.apply_pauli_rotation(s, PauliString(letters), theta)
        np.testing.assert_allclose(s.amplitudes, expected, atol=1e-12)


def test_rotation_negative_phase_folds_into_angle(rng):
    s1 = random_state(rng, 2)
    s2 = s1.copy()
    sim.apply_pauli_rotation(s1, PauliString("XY", phase=-1), 0.4)
    sim.apply_pauli_rotation(s2, PauliString("XY"), -0.4)
    np.testing.assert_array_equal(s1.amplitudes, s2.amplitudes)


def test_rotation_rejects_imaginary_phase():
    s = sim.init_plus(1)
    with pytest.raises(ValueError):
        sim.apply_pauli_rotation(s, PauliString("Y", phase=1j), 0.1)


def test_diagonal_phase_identity_and_basis_state():
    h = models.build(models.ghz_chain(4)).h_prob
    e = sim.diagonal_energies(h)
    s = sim.basis_state(4, 5)
    sim.apply_diagonal_phase(s, e, 0.0)
    assert s.amplitudes[5] == 1.0
    sim.apply_diagonal_phase(s, e, 0.7)
    probs = sim.probabilities(s)
    assert probs[5] == pytest.approx(1.0, abs=1e-12)


def test_diagonal_phase_equals_per_term_rotations(rng):
    # all diagonal terms commute, so exact phase == product of rotations
    # up to global phase
    inst = models.lfim(4)
    h = models.build(inst).h_prob
    gamma = 0.83
    s1 = random_state(rng, 4)
    s2 = s1.copy()
    sim.apply_diagonal_phase(s1, sim.diagonal_energies(h), gamma)
    for c, term in h.terms:
        sim.apply_pauli_rotation(s2, term, gamma * c.real)
    overlap = np.vdot(s1.amplitudes, s2.amplitudes)
    assert abs(abs(overlap) - 1) < 1e-12
    np.testing.assert_allclose(s2.amplitudes * np.conj(overlap),
                               s1.amplitudes, atol=1e-12)


def test_diagonal_phase_accepts_callable():
    s = sim.init_plus(2)
    sim.apply_diagonal_phase(s, lambda idx: idx.astype(float), 0.3)
    expected = np.exp(-0.3j * np.arange(4)) * 0.5
    np.testing.assert_allclose(s.amplitudes, expected, atol=1e-15)


def test_expectation_plus_state():
    s = sim.init_plus(1)
    h = PauliSum(1, ((1.0, PauliString("X")),))
    assert sim.expectation(s, h) == pytest.approx(1.0, abs=1e-12)


def test_expectation_ghz_ring_all_zeros():
    inst = models.ghz_chain(4)
    h = models.build(inst).h_prob
    s = sim.basis_state(4, 0)
    assert sim.expectation(s, h) == pytest.approx(-4.0, abs=1e-12)


def test_expectation_matches_dense_oracle(rng):
    L = 4
    for _ in range(10):
        h = PauliSum(L, tuple(
            (rng.normal(), PauliString(random_letters(rng, L))) for _ in range(3)
        )).as_hermitian()
        s = random_state(rng, L)
        dense = dense_of_pauli_sum(h)
        expected = np.vdot(s.amplitudes, dense @ s.amplitudes).real
        assert sim.expectation(s, h) == pytest.approx(expected, abs=1e-12)


def test_expectation_rejects_non_hermitian():
    s = sim.init_plus(1)
    h = PauliSum(1, ((1j, PauliString("X")),))
    with pytest.raises(ValueError):
        sim.expectation(s, h)


def test_probabilities():
    np.testing.assert_allclose(sim.probabilities(sim.init_plus(2)), [0.25] * 4)
    one_hot = sim.probabilities(sim.basis_state(3, 6))
    assert one_hot[6] == 1.0 and one_hot.sum() == 1.0


def test_h_action_matches_dense(rng):
    L = 4
    h = models.build(models.tfim(L)).h_prob
    v = random_state(rng, L).amplitudes
    np.testing.assert_allclose(
        sim.h_action(h, v), dense_of_pauli_sum(h) @ v, atol=1e-12)


def test_norm_preservation_random_sequence(rng):
    L = 4
    s = sim.init_plus(L)
    for _ in range(50):
        letters = random_letters(rng, L)
        if set(letters) == {"I"}:
            continue
        sim.apply_pauli_rotation(s, PauliString(letters), rng.uniform(-3, 3))
    assert abs(s.norm() - 1.0) < 1e-12


def test_composition_matches_dense_unitaries(rng):
    # any op sequence equals the product of dense matrix exponentials
    L = 3
    s = sim.init_plus(L)
    v = s.amplitudes.copy()
    h_diag = models.build(models.ghz_chain(L)).h_prob
    table = sim.diagonal_energies(h_diag)
    ops = []
    for _ in range(8):
        if rng.random() < 0.3:
            gamma = rng.uniform(-1, 1)
            sim.apply_diagonal_phase(s, table, gamma)
            ops.append(expm(-1j * gamma * dense_of_pauli_sum(h_diag)))
        else:
            letters = random_letters(rng, L)
            theta = rng.uniform(-1, 1)
            sim.apply_pauli_rotation(s, PauliString(letters), theta)
            ops.append(expm(-1j * theta * kron_letters(letters)))
    for u in ops:
        v = u @ v
    np.testing.assert_allclose(s.amplitudes, v, atol=1e-10)


def test_global_phase_covariance(rng):
    L = 3
    s1 = random_state(rng, L)
    s2 = sim.StateVector(L, np.exp(0.91j) * s1.amplitudes.copy())
    p = PauliString(random_letters(rng, L))
    sim.apply_pauli_rotation(s1, p, 0.5)
    sim.apply_pauli_rotation(s2, p, 0.5)
    np.testing.assert_allclose(s2.amplitudes, np.exp(0.91j) * s1.amplitudes,
                               atol=1e-12)


def test_length_mismatch_errors():
    s = sim.init_plus(2)
    with pytest.raises(ValueError):
        sim.apply_pauli_rotation(s, PauliString("XYZ"), 0.1)
    with pytest.raises(ValueError):
        sim.expectation(s, PauliSum(3, ((1.0, PauliString("XII")),)))
