"""Exact statevector engine: Pauli rotations, diagonal phases, expectations.

Basis index ``i`` encodes qubit ``k`` in bit ``(i >> k) & 1`` (qubit 0 is
the low bit). All operations preserve the norm up to double-precision
rounding and mutate the state in place, returning it for chaining.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .pauli import PauliString, PauliSum

MAX_QUBITS = 24
NORM_TOL = 1e-10
IMAG_TOL = 1e-10


@dataclass
class StateVector:
    """2^L complex amplitudes with unit norm."""

    L: int
    amplitudes: np.ndarray

    def copy(self) -> StateVector:
        return StateVector(self.L, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@lru_cache(maxsize=32)
def _indices(L: int) -> np.ndarray:
    idx = np.arange(2**L, dtype=np.uint64)
    idx.setflags(write=False)
    return idx


def init_plus(L: int) -> StateVector:
    """Uniform superposition |+>^L, every amplitude 2^(-L/2)."""
    if not 1 <= L <= MAX_QUBITS:
        raise ValueError(f"L must be in [1, {MAX_QUBITS}], got {L}")
    amps = np.full(2**L, 2.0 ** (-L / 2), dtype=complex)
    return StateVector(L, amps)


def basis_state(L: int, index: int) -> StateVector:
    amps = np.zeros(2**L, dtype=complex)
    amps[index] = 1.0
    return StateVector(L, amps)


def _string_masks(p: PauliString) -> tuple[int, int, int]:
    """(flip mask for X/Y, sign mask for Z/Y, number of Y letters)."""
    flip = sign = 0
    for k, c in enumerate(p.letters):
        if c in ("X", "Y"):
            flip |= 1 << k
        if c in ("Z", "Y"):
            sign |= 1 << k
    return flip, sign, p.y_count


@lru_cache(maxsize=256)
def _action_tables(p: PauliString):
    """Precomputed (perm, signs, const) for P|z> = const*signs[z]*|perm[z]>.

    perm/signs are None when the string has no flip/sign part. Cached per
    string; the arrays are read-only.
    """
    flip, sign, n_y = _string_masks(p)
    idx = _indices(p.length)
    const = p.phase * (1j**n_y)
    signs = None
    if sign:
        parity = np.bitwise_count(idx & np.uint64(sign)).astype(np.int64) & 1
        signs = 1.0 - 2.0 * parity
        signs.setflags(write=False)
    perm = None
    if flip:
        perm = (idx ^ np.uint64(flip)).astype(np.intp)
        perm.setflags(write=False)
    return perm, signs, const


def pauli_action(p: PauliString, amps: np.ndarray) -> np.ndarray:
    """Return P|psi> as a new array.

    P|z> = phase * i^{n_Y} * (-1)^{popcount(z & sign_mask)} |z ^ flip_mask>.
    """
    if amps.shape[0] != 2**p.length:
        raise ValueError(f"state dimension {amps.shape[0]} != 2^{p.length}")
    perm, signs, const = _action_tables(p)
    w = amps * signs if signs is not None else amps.copy()
    if const != 1:
        w *= const
    return w[perm] if perm is not None else w


def h_action(h: PauliSum, amps: np.ndarray) -> np.ndarray:
    """Return H|psi> for a Pauli sum (diagonal sums use their energy table)."""
    if h.is_diagonal:
        return diagonal_energies(h) * amps
    out = np.zeros_like(amps)
    for c, s in h.terms:
        out += c * pauli_action(s, amps)
    return out


def apply_pauli_rotation(state: StateVector, p: PauliString, theta: float) -> StateVector:
    """Apply exp(-i*theta*P) using P^2 = I: cos(theta) - i sin(theta) P.

    The generator must be Hermitian: a phase of -1 is folded into the angle,
    imaginary phases are rejected. theta == 0 is an exact no-op.
    """
    if p.length != state.L:
        raise ValueError(f"string length {p.length} != state length {state.L}")
    if p.phase == -1 + 0j:
        p, theta = PauliString(p.letters), -theta
    elif p.phase != 1 + 0j:
        raise ValueError("rotation generator must have real phase")
    if theta == 0.0:
        return state
    pv = pauli_action(p, state.amplitudes)
    state.amplitudes *= np.cos(theta)
    state.amplitudes -= 1j * np.sin(theta) * pv
    return state


def apply_diagonal_phase(state: StateVector, energies, gamma: float) -> StateVector:
    """Apply exp(-i*gamma*E(z)) per basis state; exact for diagonal operators.

    ``energies`` is either a 2^L array or a callable mapping the basis-index
    array to energies.
    """
    if gamma == 0.0:
        return state
    e = energies(_indices(state.L)) if callable(energies) else energies
    e = np.asarray(e)
    if e.shape[0] != state.amplitudes.shape[0]:
        raise ValueError("energy table size mismatch")
    state.amplitudes *= np.exp(-1j * gamma * e)
    return state


def expectation(state: StateVector, h: PauliSum) -> float:
    """<psi|H|psi> for Hermitian H; asserts the imaginary residue is noise."""
    if h.length != state.L:
        raise ValueError(f"sum length {h.length} != state length {state.L}")
    v = state.amplitudes
    if h.is_diagonal:
        total = complex(np.vdot(v, diagonal_energies(h) * v))
    else:
        total = 0j
        for c, s in h.terms:
            if abs(c.imag) > IMAG_TOL:
                raise ValueError(f"non-Hermitian coefficient {c} on {s.letters}")
            total += c * np.vdot(v, pauli_action(s, v))
    if abs(total.imag) > IMAG_TOL:
        raise ValueError(f"expectation has imaginary residue {total.imag:g}")
    return float(total.real)


def probabilities(state: StateVector) -> np.ndarray:
    return np.abs(state.amplitudes) ** 2


@lru_cache(maxsize=64)
def diagonal_energies(h: PauliSum) -> np.ndarray:
    """Eigenvalue table E(z) of a diagonal (I/Z-only) sum, indexed by basis state.

    Cached per sum; the returned array is read-only.
    """
    if not h.is_diagonal:
        raise ValueError("sum contains non-diagonal letters")
    idx = _indices(h.length)
    out = np.zeros(2**h.length, dtype=float)
    for c, s in h.terms:
        if abs(c.imag) > IMAG_TOL:
            raise ValueError(f"non-Hermitian coefficient {c} on {s.letters}")
        _, sign, _ = _string_masks(s)
        if sign:
            parity = np.bitwise_count(idx & np.uint64(sign)).astype(np.int64) & 1
            out += c.real * (1.0 - 2.0 * parity)
        else:
            out += c.real
    out.setflags(write=False)
    return out


def dump_amplitudes(state: StateVector) -> str:
    """Debug listing: one `index re im` line per basis state."""
    lines = [
        f"{i} {a.real!r} {a.imag!r}" for i, a in enumerate(state.amplitudes)
    ]
    return "\n".join(lines)
