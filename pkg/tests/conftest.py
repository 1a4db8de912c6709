"""Shared test oracles: an independent dense-matrix route for small systems.

These helpers deliberately avoid pauli.to_dense / sim internals so oracle
comparisons stay dual-route: the symbolic/statevector code on one side,
plain Kronecker products and numpy linear algebra on the other.
"""
from __future__ import annotations

from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
X2 = np.array([[0, 1], [1, 0]], dtype=complex)
Y2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z2 = np.array([[1, 0], [0, -1]], dtype=complex)
MATS = {"I": I2, "X": X2, "Y": Y2, "Z": Z2}


def kron_letters(letters: str, phase: complex = 1.0) -> np.ndarray:
    """Dense matrix of a letter string; qubit 0 is the low bit (last factor)."""
    return phase * reduce(np.kron, [MATS[c] for c in reversed(letters)])


def dense_sum(terms, length: int) -> np.ndarray:
    """Dense matrix of [(coeff, letters)] pairs."""
    out = np.zeros((2**length, 2**length), dtype=complex)
    for coeff, letters in terms:
        out += coeff * kron_letters(letters)
    return out


def dense_of_pauli_sum(s) -> np.ndarray:
    """Dense matrix of a PauliSum via the independent kron route."""
    return dense_sum([(c, ps.letters) for c, ps in s.terms], s.length)


def random_letters(rng, length: int) -> str:
    return "".join(rng.choice(list("IXYZ")) for _ in range(length))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
