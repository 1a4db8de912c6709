"""Phase-tracked Pauli-string algebra and the nested-commutator CD operator pool.

Conventions used throughout the package:

* a string of letters ``"IXYZ"`` has one letter per qubit, ``letters[k]``
  acting on qubit ``k`` (qubit 0 is the low bit of a basis index);
* phases live in the multiplicative group ``{+1, -1, +i, -i}``;
* sums keep complex coefficients internally but fold every phase into the
  coefficient, so a Hermitian operator ends up with purely real ones.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

PAULI_LETTERS = "IXYZ"

# Coefficients below this magnitude are treated as exact cancellations
# (double-precision noise floor, see also HERMITIAN_TOL).
ZERO_TOL = 1e-12
# Imaginary residue allowed when folding a Hermitian sum to real coefficients.
HERMITIAN_TOL = 1e-12

_UNIT_PHASES = (1 + 0j, -1 + 0j, 1j, -1j)

# P*Q -> (phase, letter) for non-identity letters; identities handled inline.
_PRODUCT = {
    ("X", "X"): (1 + 0j, "I"),
    ("Y", "Y"): (1 + 0j, "I"),
    ("Z", "Z"): (1 + 0j, "I"),
    ("X", "Y"): (1j, "Z"),
    ("Y", "Z"): (1j, "X"),
    ("Z", "X"): (1j, "Y"),
    ("Y", "X"): (-1j, "Z"),
    ("Z", "Y"): (-1j, "X"),
    ("X", "Z"): (-1j, "Y"),
}

_DENSE_LIMIT = 10

_LETTER_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _canon_phase(p: complex) -> complex:
    for unit in _UNIT_PHASES:
        if p == unit:
            return unit
    raise ValueError(f"phase must be one of +1, -1, +i, -i, got {p!r}")


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Pauli operators with a tracked phase.

    ``letters`` is a string over ``IXYZ`` with one letter per qubit; the
    phase is one of the four units and is closed under multiplication.
    Instances are immutable and hashable, so they can key dictionaries and
    live in sets.
    """

    letters: str
    phase: complex = 1 + 0j

    def __post_init__(self):
        if not set(self.letters) <= set(PAULI_LETTERS):
            raise ValueError(f"letters must be over 'IXYZ', got {self.letters!r}")
        object.__setattr__(self, "phase", _canon_phase(self.phase))

    @classmethod
    def identity(cls, length: int) -> PauliString:
        return cls("I" * length)

    @classmethod
    def single(cls, length: int, site: int, letter: str) -> PauliString:
        """One non-identity letter at ``site``, identity elsewhere."""
        return cls.from_sites(length, [(site, letter)])

    @classmethod
    def from_sites(cls, length: int, sites) -> PauliString:
        """Build from (site, letter) pairs; unlisted sites are identity."""
        letters = ["I"] * length
        for site, letter in sites:
            if not 0 <= site < length:
                raise ValueError(f"site {site} out of range for length {length}")
            if letters[site] != "I":
                raise ValueError(f"duplicate site {site}")
            letters[site] = letter
        return cls("".join(letters))

    @property
    def length(self) -> int:
        return len(self.letters)

    @property
    def weight(self) -> int:
        """Number of non-identity letters."""
        return sum(1 for c in self.letters if c != "I")

    @property
    def y_count(self) -> int:
        return self.letters.count("Y")

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.letters) if c != "I")

    @property
    def shape(self) -> str:
        """Non-identity letters in ascending site order, e.g. 'ZY' for Z0Y3."""
        return "".join(c for c in self.letters if c != "I")

    def commutes_with(self, other: PauliString) -> bool:
        """True iff the strings commute.

        Two strings anticommute exactly when the number of sites where both
        letters are non-identity and different is odd.
        """
        if self.length != other.length:
            raise ValueError("length mismatch")
        clashes = sum(
            1
            for a, b in zip(self.letters, other.letters)
            if a != "I" and b != "I" and a != b
        )
        return clashes % 2 == 0

    def dense(self) -> np.ndarray:
        """Kronecker-product matrix (small lengths only; test oracle)."""
        if self.length > _DENSE_LIMIT:
            raise ValueError(f"dense() limited to length <= {_DENSE_LIMIT}")
        # qubit 0 is the low bit, so it is the *last* Kronecker factor
        mats = [_LETTER_MATS[c] for c in reversed(self.letters)]
        return self.phase * reduce(np.kron, mats, np.eye(1, dtype=complex))

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __str__(self) -> str:
        prefix = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return prefix + self.letters


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Group product a*b with the accumulated phase."""
    if a.length != b.length:
        raise ValueError(f"length mismatch: {a.length} != {b.length}")
    phase = a.phase * b.phase
    out = []
    for p, q in zip(a.letters, b.letters):
        if p == "I":
            out.append(q)
        elif q == "I":
            out.append(p)
        else:
            ph, r = _PRODUCT[(p, q)]
            phase *= ph
            out.append(r)
    return PauliString("".join(out), phase)


@dataclass(frozen=True)
class PauliSum:
    """Weighted sum of Pauli strings in canonical form.

    Canonical form: every stored string has phase +1 (phases are folded into
    the coefficients on construction), duplicate strings are merged, terms
    with negligible coefficient are dropped, and terms are ordered
    lexicographically by letters. Coefficients are complex in general; a sum
    representing a Hermitian operator can be folded to real coefficients
    with :meth:`as_hermitian`.
    """

    length: int
    terms: tuple = field(default=())

    def __post_init__(self):
        merged: dict[str, complex] = {}
        for coeff, string in self.terms:
            if string.length != self.length:
                raise ValueError(
                    f"term length {string.length} != sum length {self.length}"
                )
            c = complex(coeff) * string.phase
            merged[string.letters] = merged.get(string.letters, 0j) + c
        canon = tuple(
            (c, PauliString(letters))
            for letters, c in sorted(merged.items())
            if abs(c) > ZERO_TOL
        )
        object.__setattr__(self, "terms", canon)

    @classmethod
    def zero(cls, length: int) -> PauliSum:
        return cls(length, ())

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    @property
    def is_diagonal(self) -> bool:
        """True iff every term uses only I/Z letters."""
        return all(set(s.letters) <= {"I", "Z"} for _, s in self.terms)

    def simplify(self) -> PauliSum:
        """Re-canonicalize (idempotent; construction already canonicalizes)."""
        return PauliSum(self.length, self.terms)

    def as_hermitian(self, tol: float = HERMITIAN_TOL) -> PauliSum:
        """Fold to real coefficients, erroring on imaginary residue above tol."""
        folded = []
        for c, s in self.terms:
            if abs(c.imag) > tol:
                raise ValueError(
                    f"non-Hermitian sum: term {s.letters} has coefficient {c}"
                )
            folded.append((complex(c.real), s))
        return PauliSum(self.length, tuple(folded))

    def coefficient(self, letters: str) -> complex:
        for c, s in self.terms:
            if s.letters == letters:
                return c
        return 0j

    def __add__(self, other: PauliSum) -> PauliSum:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return PauliSum(self.length, self.terms + other.terms)

    def __sub__(self, other: PauliSum) -> PauliSum:
        return self + (-1.0) * other

    def __neg__(self) -> PauliSum:
        return (-1.0) * self

    def __rmul__(self, scalar) -> PauliSum:
        return PauliSum(self.length, tuple((scalar * c, s) for c, s in self.terms))

    def __matmul__(self, other: PauliSum) -> PauliSum:
        """Operator product of two sums."""
        if self.length != other.length:
            raise ValueError("length mismatch")
        acc: dict[str, complex] = {}
        for ca, sa in self.terms:
            for cb, sb in other.terms:
                prod = multiply(sa, sb)
                c = ca * cb * prod.phase
                acc[prod.letters] = acc.get(prod.letters, 0j) + c
        return PauliSum(
            self.length, tuple((c, PauliString(k)) for k, c in acc.items())
        )

    def to_text(self) -> str:
        """Golden-test format: one `<coeff> <letters>` line per term."""
        lines = []
        for c, s in self.terms:
            if abs(c.imag) > HERMITIAN_TOL:
                raise ValueError("text format supports real coefficients only")
            lines.append(f"{c.real!r} {s.letters}")
        return "\n".join(lines)

    @classmethod
    def from_text(cls, text: str) -> PauliSum:
        terms = []
        length = None
        for line in text.strip().splitlines():
            if not line.strip():
                continue
            coeff_str, letters = line.split()
            if length is None:
                length = len(letters)
            terms.append((float(coeff_str), PauliString(letters)))
        if length is None:
            raise ValueError("empty text; length is undeterminable")
        return cls(length, tuple(terms))


def commutator(a: PauliSum | PauliString, b: PauliSum | PauliString) -> PauliSum:
    """[a, b] = ab - ba in canonical form.

    For single strings the result is empty when they commute and 2ab when
    they anticommute; the ``2ab`` shortcut is applied pairwise for sums.
    """
    a = _as_sum(a)
    b = _as_sum(b)
    if a.length != b.length:
        raise ValueError("length mismatch")
    acc: dict[str, complex] = {}
    for ca, sa in a.terms:
        for cb, sb in b.terms:
            if sa.commutes_with(sb):
                continue
            prod = multiply(sa, sb)
            c = 2.0 * ca * cb * prod.phase
            acc[prod.letters] = acc.get(prod.letters, 0j) + c
    return PauliSum(a.length, tuple((c, PauliString(k)) for k, c in acc.items()))


def _as_sum(x: PauliSum | PauliString) -> PauliSum:
    if isinstance(x, PauliString):
        return PauliSum(x.length, ((1.0, x),))
    return x


@dataclass(frozen=True)
class OperatorPool:
    """CD operator pool: translation-invariant shapes plus concrete strings.

    ``shapes`` holds patterns such as ``"Y"`` or ``"ZY"`` (non-identity
    letters in ascending site order); ``strings`` holds every concrete
    phase-normalized string the nested-commutator expansion produced, after
    deduplication and the locality filter.
    """

    length: int
    order: int
    max_weight: int | None
    shapes: frozenset
    strings: tuple


def agp_pool(
    h_mixer: PauliSum,
    h_prob: PauliSum,
    order: int = 2,
    max_weight: int | None = 2,
    lambdas: tuple = (0.25, 0.5, 0.75),
) -> OperatorPool:
    """Operator pool from the nested-commutator gauge-potential expansion.

    The annealing Hamiltonian ``(1-lam)*h_mixer + lam*h_prob`` is
    instantiated at each ``lam`` (several values, and the union of the
    results, to dodge accidental cancellations at special points). For each
    expansion order k = 1..order the term with 2k-1 nested commutators of
    the annealing Hamiltonian acting on ``h_prob - h_mixer`` is evaluated,
    and every string appearing with a nonzero coefficient is collected; the
    time-dependent expansion coefficients are discarded because they are
    promoted to variational parameters downstream.

    ``max_weight`` keeps only strings supported on at most that many sites
    (default 2: the per-site CD unitaries downstream use one- and two-local
    generators). Pass ``None`` to disable the filter.
    """
    if h_mixer.length != h_prob.length:
        raise ValueError("length mismatch")
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    d_h = h_prob - h_mixer
    collected: dict[str, PauliString] = {}
    for lam in lambdas:
        h_a = (1.0 - lam) * h_mixer + lam * h_prob
        nested = d_h
        for k in range(1, order + 1):
            if k == 1:
                nested = commutator(h_a, nested)
            else:
                nested = commutator(h_a, commutator(h_a, nested))
            for _, s in nested.terms:
                if max_weight is not None and s.weight > max_weight:
                    continue
                collected[s.letters] = s
    strings = tuple(collected[k] for k in sorted(collected))
    for s in strings:
        if s.y_count % 2 == 0:
            raise RuntimeError(
                f"pool string {s.letters} has even Y-count; "
                "expansion produced a non-CD generator"
            )
    shapes = frozenset(s.shape for s in strings)
    return OperatorPool(
        length=h_mixer.length,
        order=order,
        max_weight=max_weight,
        shapes=shapes,
        strings=strings,
    )


def to_dense(s: PauliSum | PauliString) -> np.ndarray:
    """Kronecker-product matrix of a sum or string (L <= 10; test oracle)."""
    s = _as_sum(s)
    if s.length > _DENSE_LIMIT:
        raise ValueError(f"to_dense limited to L <= {_DENSE_LIMIT}, got {s.length}")
    dim = 2**s.length
    out = np.zeros((dim, dim), dtype=complex)
    for c, string in s.terms:
        out += c * string.dense()
    return out
