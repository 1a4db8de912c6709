"""Problem instances, Hamiltonian construction, and exact ground-energy oracles.

Spin convention: basis bit 0 is the +1 eigenstate of Z, so a bitstring z
maps to spins s_i = 1 - 2*z_i. This is fixed everywhere and the tests
depend on it.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from typing import NamedTuple

import numpy as np
import scipy.sparse.linalg as spla

from .pauli import PauliString, PauliSum
from . import sim

DIAGONAL_SWEEP_LIMIT = 20
ITERATIVE_LIMIT = 14
DENSE_SOLVER_LIMIT = 10
DEGENERACY_TOL = 1e-8
EIGSH_TOL = 1e-10


@dataclass(frozen=True)
class IsingChain:
    """Homogeneous 1D Ising ring/chain: H = -J sum ZZ - h_z sum Z - h_x sum X.

    The named special cases are LFIM (h_x = 0), TFIM (h_z = 0) and the
    GHZ case (h_z = h_x = 0).
    """

    L: int
    J: float = 1.0
    h_z: float = 0.0
    h_x: float = 0.0
    periodic: bool = True

    def __post_init__(self):
        if self.periodic and self.L < 3:
            raise ValueError("periodic chain needs L >= 3 (L=2 double-counts its edge)")
        if self.L < 1:
            raise ValueError("L must be >= 1")

    @property
    def kind(self) -> str:
        return "ising_chain"

    def bonds(self) -> list[tuple[int, int]]:
        n = self.L if self.periodic else self.L - 1
        return [(i, (i + 1) % self.L) for i in range(n)]


def lfim(L: int, J: float = 1.0, h_z: float = 1.0) -> IsingChain:
    return IsingChain(L=L, J=J, h_z=h_z, h_x=0.0)


def tfim(L: int, J: float = 1.0, h_x: float = 1.0) -> IsingChain:
    return IsingChain(L=L, J=J, h_z=0.0, h_x=h_x)


def ghz_chain(L: int, J: float = 1.0) -> IsingChain:
    return IsingChain(L=L, J=J, h_z=0.0, h_x=0.0)


@dataclass(frozen=True)
class MaxCut:
    """MaxCut graph encoded as H = sum_ij w_ij Z_i Z_j (ground state = max cut)."""

    L: int
    edges: tuple
    weights: tuple = ()

    def __post_init__(self):
        canon = []
        seen = set()
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < self.L and 0 <= j < self.L):
                raise ValueError(f"edge ({i},{j}) references vertex >= L={self.L}")
            e = (min(i, j), max(i, j))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            canon.append(e)
        object.__setattr__(self, "edges", tuple(sorted(canon)))
        w = self.weights or tuple(1.0 for _ in canon)
        if len(w) != len(canon):
            raise ValueError("weights length != edges length")
        object.__setattr__(self, "weights", tuple(float(x) for x in w))

    @property
    def kind(self) -> str:
        return "maxcut"


@dataclass(frozen=True)
class SK:
    """Sherrington-Kirkpatrick instance: couplings J_ij in {-1,+1} for all i<j.

    ``couplings`` is flattened in lexicographic pair order
    (0,1), (0,2), ..., (L-2,L-1).
    """

    L: int
    couplings: tuple

    def __post_init__(self):
        n_pairs = self.L * (self.L - 1) // 2
        if len(self.couplings) != n_pairs:
            raise ValueError(f"expected {n_pairs} couplings, got {len(self.couplings)}")
        if any(c not in (-1.0, 1.0, -1, 1) for c in self.couplings):
            raise ValueError("SK couplings must be drawn from {-1, +1}")
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))

    @property
    def kind(self) -> str:
        return "sk"

    def pairs(self):
        """Yield ((i, j), J_ij) in lexicographic order."""
        it = iter(self.couplings)
        for i in range(self.L):
            for j in range(i + 1, self.L):
                yield (i, j), next(it)


@dataclass(frozen=True)
class PSpin:
    """Fully connected P-spin model: H = -(sum Z)^P / L^(P-1) - h sum X."""

    L: int
    P: int
    h: float = 0.0

    def __post_init__(self):
        if self.P < 2:
            raise ValueError("P must be >= 2")
        if self.L < 2:
            raise ValueError("L must be >= 2")

    @property
    def kind(self) -> str:
        return "pspin"


ProblemInstance = IsingChain | MaxCut | SK | PSpin
_INSTANCE_TYPES = (IsingChain, MaxCut, SK, PSpin)


@dataclass(frozen=True)
class ModelTriple:
    """Problem/mixer Hamiltonian pair plus the diagonality flag."""

    h_prob: PauliSum
    h_mixer: PauliSum
    diagonal: bool

    @property
    def length(self) -> int:
        return self.h_prob.length


def _mixer(L: int) -> PauliSum:
    return PauliSum(L, tuple((1.0, PauliString.single(L, i, "X")) for i in range(L)))


def _zz(L: int, i: int, j: int) -> PauliString:
    return PauliString.from_sites(L, [(i, "Z"), (j, "Z")])


def build(instance: ProblemInstance) -> ModelTriple:
    """Construct (H_prob, H_mixer) for an instance; mixer is sum X with unit weights."""
    L = instance.L
    terms: list[tuple[float, PauliString]] = []
    if isinstance(instance, IsingChain):
        for i, j in instance.bonds():
            terms.append((-instance.J, _zz(L, i, j)))
        for i in range(L):
            if instance.h_z:
                terms.append((-instance.h_z, PauliString.single(L, i, "Z")))
            if instance.h_x:
                terms.append((-instance.h_x, PauliString.single(L, i, "X")))
        h_prob = PauliSum(L, tuple(terms))
    elif isinstance(instance, MaxCut):
        for (i, j), w in zip(instance.edges, instance.weights):
            terms.append((w, _zz(L, i, j)))
        h_prob = PauliSum(L, tuple(terms))
    elif isinstance(instance, SK):
        for (i, j), coupling in instance.pairs():
            terms.append((coupling, _zz(L, i, j)))
        h_prob = PauliSum(L, tuple(terms))
    elif isinstance(instance, PSpin):
        sum_z = PauliSum(
            L, tuple((1.0, PauliString.single(L, i, "Z")) for i in range(L))
        )
        power = reduce(lambda a, b: a @ b, [sum_z] * instance.P)
        h_prob = (-1.0 / L ** (instance.P - 1)) * power
        if instance.h:
            h_prob = h_prob + (-instance.h) * _mixer(L)
    else:
        raise TypeError(f"unknown instance type {type(instance).__name__}")
    h_prob = h_prob.as_hermitian()
    return ModelTriple(h_prob=h_prob, h_mixer=_mixer(L), diagonal=h_prob.is_diagonal)


def _as_index(instance: ProblemInstance, bits: int | str) -> int:
    """Accept a basis index or a bitstring with position k = qubit k."""
    if isinstance(bits, str):
        if len(bits) != instance.L or set(bits) - {"0", "1"}:
            raise ValueError(f"bad bitstring {bits!r} for L={instance.L}")
        return sum(int(b) << k for k, b in enumerate(bits))
    if not 0 <= bits < 2**instance.L:
        raise ValueError(f"basis index {bits} out of range")
    return bits


def _spins(instance: ProblemInstance, bits: int | str) -> np.ndarray:
    z = _as_index(instance, bits)
    return np.array([1 - 2 * ((z >> k) & 1) for k in range(instance.L)])


def classical_energy(instance: ProblemInstance, bits: int | str) -> float:
    """H_prob eigenvalue of a computational-basis state (diagonal instances only)."""
    s = _spins(instance, bits)
    if isinstance(instance, IsingChain):
        if instance.h_x != 0.0:
            raise ValueError("transverse field makes the instance non-diagonal")
        e = -instance.J * sum(s[i] * s[j] for i, j in instance.bonds())
        return float(e - instance.h_z * s.sum())
    if isinstance(instance, MaxCut):
        return float(
            sum(w * s[i] * s[j] for (i, j), w in zip(instance.edges, instance.weights))
        )
    if isinstance(instance, SK):
        return float(sum(c * s[i] * s[j] for (i, j), c in instance.pairs()))
    if isinstance(instance, PSpin):
        if instance.h != 0.0:
            raise ValueError("transverse field makes the instance non-diagonal")
        return float(-(s.sum() ** instance.P) / instance.L ** (instance.P - 1))
    raise TypeError(f"unknown instance type {type(instance).__name__}")


def cut_value(instance: MaxCut, bits: int | str) -> float:
    """Cut weight C(z) = 1/2 sum w_ij (1 - s_i s_j)."""
    s = _spins(instance, bits)
    return float(
        0.5
        * sum(w * (1 - s[i] * s[j]) for (i, j), w in zip(instance.edges, instance.weights))
    )


class GroundEnergy(NamedTuple):
    e0: float
    degeneracy: int | None  # None = unresolved


def ground_energy(instance: ProblemInstance, method: str = "auto") -> GroundEnergy:
    """Exact ground energy and degeneracy.

    Diagonal instances are swept over all 2^L bitstrings (L <= 20), which is
    definitionally exact. Non-diagonal ones go to a dense eigensolver for
    small L or a matrix-free iterative one up to L <= 14 (``method`` pins
    the route: "dense" | "iterative" | "auto"). Degeneracy counts
    eigenvalues within 1e-8 of E0; None means the iterative solver could
    not bound it.
    """
    triple = build(instance)
    if triple.diagonal:
        if instance.L > DIAGONAL_SWEEP_LIMIT:
            raise ValueError(f"diagonal sweep limited to L <= {DIAGONAL_SWEEP_LIMIT}")
        energies = sim.diagonal_energies(triple.h_prob)
        e0 = float(energies.min())
        deg = int(np.sum(energies <= e0 + DEGENERACY_TOL))
        return GroundEnergy(e0, deg)
    return ground_energy_of_sum(triple.h_prob, method=method)


def ground_energy_of_sum(h: PauliSum, method: str = "auto") -> GroundEnergy:
    """Ground energy of an arbitrary Hermitian sum (see ground_energy)."""
    L = h.length
    if h.is_diagonal:
        energies = sim.diagonal_energies(h)
        e0 = float(energies.min())
        return GroundEnergy(e0, int(np.sum(energies <= e0 + DEGENERACY_TOL)))
    if method == "auto":
        method = "dense" if L <= 6 else "iterative"
    if method == "dense":
        if L > DENSE_SOLVER_LIMIT:
            raise ValueError(f"dense solver limited to L <= {DENSE_SOLVER_LIMIT}")
        from .pauli import to_dense

        evals = np.linalg.eigvalsh(to_dense(h))
        e0 = float(evals[0])
        return GroundEnergy(e0, int(np.sum(evals <= e0 + DEGENERACY_TOL)))
    if method != "iterative":
        raise ValueError(f"unknown method {method!r}")
    if L > ITERATIVE_LIMIT:
        raise ValueError(f"iterative solver limited to L <= {ITERATIVE_LIMIT}")
    dim = 2**L
    op = spla.LinearOperator(
        (dim, dim), matvec=lambda v: sim.h_action(h, v), dtype=complex
    )
    k = min(4, dim - 1)
    try:
        evals = spla.eigsh(
            op,
            k=k,
            which="SA",
            tol=EIGSH_TOL,
            maxiter=10 * dim,
            return_eigenvectors=False,
        )
    except spla.ArpackNoConvergence as err:
        raise RuntimeError(f"eigensolver did not converge for L={L}") from err
    evals = np.sort(evals)
    e0 = float(evals[0])
    near = int(np.sum(evals <= e0 + DEGENERACY_TOL))
    # if every computed eigenvalue sits at E0 the multiplicity is unbounded
    degeneracy = near if near < k else None
    return GroundEnergy(e0, degeneracy)


def random_instance(kind: str, L: int, seed: int) -> ProblemInstance:
    """Seeded random instance; kind is 'maxcut-3-regular' or 'sk'."""
    if kind == "maxcut-3-regular":
        return random_maxcut_3_regular(L, seed)
    if kind == "sk":
        return random_sk(L, seed)
    raise ValueError(f"unknown random instance kind {kind!r}")


def random_maxcut_3_regular(L: int, seed: int) -> MaxCut:
    """Simple 3-regular graph via configuration-model pairing with rejection."""
    if L % 2 != 0 or L < 4:
        raise ValueError("3-regular graphs need even L >= 4")
    rng = np.random.default_rng(seed)
    for round_ in range(100):
        for _ in range(1000):
            edges = _pair_stubs(L, 3, rng)
            if edges is not None:
                return MaxCut(L=L, edges=tuple(sorted(edges)))
        # deterministic internal re-seed; in practice unreachable for d=3
        rng = np.random.default_rng((seed, round_ + 1))
    raise RuntimeError("configuration-model pairing failed to converge")


def _pair_stubs(n: int, d: int, rng) -> set | None:
    stubs = np.repeat(np.arange(n), d)
    rng.shuffle(stubs)
    edges = set()
    for a, b in zip(stubs[0::2], stubs[1::2]):
        i, j = int(min(a, b)), int(max(a, b))
        if i == j or (i, j) in edges:
            return None
        edges.add((i, j))
    return edges


def random_sk(L: int, seed: int) -> SK:
    rng = np.random.default_rng(seed)
    n_pairs = L * (L - 1) // 2
    couplings = rng.choice((-1.0, 1.0), size=n_pairs)
    return SK(L=L, couplings=tuple(couplings))


@dataclass(frozen=True)
class CdOperator:
    """Per-site CD term family: the generators of one U_CD layer.

    ``terms`` are (weight, string) pairs applied in ascending site order;
    one shared layer angle multiplies every weight. Every string must have
    an odd number of Y letters.
    """

    label: str
    terms: tuple

    def __post_init__(self):
        if not self.terms:
            raise ValueError("CD operator needs at least one term")
        for _, s in self.terms:
            if s.y_count % 2 == 0:
                raise ValueError(f"CD string {s.letters} must have odd Y-count")


def default_cd_operator(instance: ProblemInstance) -> CdOperator:
    """Per-model default CD choice (overridable via make_cd_operator).

    LFIM gets the local Y family; TFIM/GHZ get ZY on ring-adjacent pairs;
    MaxCut gets ZY per edge; SK gets coupling-weighted ZY on all pairs;
    P-spin gets the local Y family.
    """
    if isinstance(instance, IsingChain):
        if instance.h_z != 0.0 and instance.h_x == 0.0:
            return make_cd_operator(instance, "Y")
        return make_cd_operator(instance, "ZY")
    if isinstance(instance, MaxCut):
        return make_cd_operator(instance, "ZY")
    if isinstance(instance, SK):
        return make_cd_operator(instance, "ZY")
    if isinstance(instance, PSpin):
        return make_cd_operator(instance, "Y")
    raise TypeError(f"unknown instance type {type(instance).__name__}")


def make_cd_operator(instance: ProblemInstance, label: str) -> CdOperator:
    """CD family by shape label ('Y' per site, 'ZY'/'YZ'/'XY'/'YX' per bond/edge/pair)."""
    L = instance.L
    if label == "Y":
        terms = tuple(
            (1.0, PauliString.single(L, i, "Y")) for i in range(L)
        )
        return CdOperator(label, terms)
    if len(label) == 2 and set(label) <= {"X", "Y", "Z"}:
        a, b = label
        if isinstance(instance, IsingChain):
            pairs = [((i, j), 1.0) for i, j in instance.bonds()]
        elif isinstance(instance, MaxCut):
            pairs = [(e, w) for e, w in zip(instance.edges, instance.weights)]
        elif isinstance(instance, SK):
            pairs = list(instance.pairs())
        elif isinstance(instance, PSpin):
            pairs = [((i, j), 1.0) for i in range(L) for j in range(i + 1, L)]
        else:
            raise TypeError(f"unknown instance type {type(instance).__name__}")
        terms = tuple(
            (w, PauliString.from_sites(L, [(i, a), (j, b)])) for (i, j), w in pairs
        )
        return CdOperator(label, terms)
    raise ValueError(f"unknown CD label {label!r}")


def instance_to_json(instance: ProblemInstance, seed: int | None = None) -> str:
    """Canonical single-line JSON; round-trips bit-exactly."""
    d: dict = {"kind": instance.kind, "L": instance.L}
    if isinstance(instance, IsingChain):
        d.update(J=instance.J, h_z=instance.h_z, h_x=instance.h_x,
                 periodic=instance.periodic)
    elif isinstance(instance, MaxCut):
        d.update(edges=[list(e) for e in instance.edges],
                 weights=list(instance.weights))
    elif isinstance(instance, SK):
        d.update(couplings=list(instance.couplings))
    elif isinstance(instance, PSpin):
        d.update(P=instance.P, h=instance.h)
    if seed is not None:
        d["seed"] = seed
    return json.dumps(d, sort_keys=True)


def instance_from_json(text: str) -> ProblemInstance:
    d = json.loads(text)
    kind = d["kind"]
    if kind == "ising_chain":
        return IsingChain(L=d["L"], J=d["J"], h_z=d["h_z"], h_x=d["h_x"],
                          periodic=d["periodic"])
    if kind == "maxcut":
        return MaxCut(L=d["L"], edges=tuple(tuple(e) for e in d["edges"]),
                      weights=tuple(d["weights"]))
    if kind == "sk":
        return SK(L=d["L"], couplings=tuple(d["couplings"]))
    if kind == "pspin":
        return PSpin(L=d["L"], P=d["P"], h=d["h"])
    raise ValueError(f"unknown instance kind {kind!r}")
