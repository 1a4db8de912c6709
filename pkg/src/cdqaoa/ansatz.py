"""Layered QAOA / DC-QAOA circuits and the depth/parameter accounting.

Layer structure, fixed and recorded in result metadata: problem phase,
then mixer, then (DC-QAOA only) the CD block. Within the problem unitary a
non-diagonal H_prob is digitized as [exact diagonal phase] followed by
[per-site X rotations] - a first-order split. Sites are always visited in
ascending index order.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .pauli import PauliString, PauliSum
from .models import CdOperator, ModelTriple
from . import sim

VARIANTS = ("qaoa", "dcqaoa")
LAYER_ORDER = ("problem", "mixer", "cd")
SPLIT_ORDER = "diagonal-then-x"


@dataclass(frozen=True)
class AnsatzSpec:
    """Circuit layout: variant, layer count, and the CD operator family."""

    variant: str
    p: int
    cd_operator: CdOperator | None = None

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.variant == "dcqaoa" and self.cd_operator is None:
            raise ValueError("dcqaoa requires a cd_operator")
        if self.variant == "qaoa" and self.cd_operator is not None:
            raise ValueError("qaoa takes no cd_operator")

    def metadata(self) -> dict:
        return {
            "variant": self.variant,
            "p": self.p,
            "cd_operator": self.cd_operator.label if self.cd_operator else None,
            "layer_order": list(LAYER_ORDER),
            "split_order": SPLIT_ORDER,
        }


@dataclass(frozen=True)
class ParameterVector:
    """Angles (gamma, beta, alpha) as tuples of length p (alpha empty for QAOA)."""

    gamma: tuple
    beta: tuple
    alpha: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "gamma", tuple(float(x) for x in self.gamma))
        object.__setattr__(self, "beta", tuple(float(x) for x in self.beta))
        object.__setattr__(self, "alpha", tuple(float(x) for x in self.alpha))

    def check(self, spec: AnsatzSpec) -> None:
        if len(self.gamma) != spec.p or len(self.beta) != spec.p:
            raise ValueError("gamma/beta length != p")
        want_alpha = spec.p if spec.variant == "dcqaoa" else 0
        if len(self.alpha) != want_alpha:
            raise ValueError(f"alpha length {len(self.alpha)} != {want_alpha}")

    def to_flat(self) -> np.ndarray:
        """Canonical flat layout [gamma | beta | alpha]."""
        return np.array(self.gamma + self.beta + self.alpha, dtype=float)

    @classmethod
    def from_flat(cls, spec: AnsatzSpec, flat) -> ParameterVector:
        flat = np.asarray(flat, dtype=float)
        p = spec.p
        n = parameter_count(spec)
        if flat.shape != (n,):
            raise ValueError(f"expected {n} parameters, got shape {flat.shape}")
        alpha = tuple(flat[2 * p:]) if spec.variant == "dcqaoa" else ()
        return cls(gamma=tuple(flat[:p]), beta=tuple(flat[p:2 * p]), alpha=alpha)

    @classmethod
    def zeros(cls, spec: AnsatzSpec) -> ParameterVector:
        return cls.from_flat(spec, np.zeros(parameter_count(spec)))


def parameter_count(spec: AnsatzSpec) -> int:
    """2p for QAOA, 3p for DC-QAOA."""
    return (3 if spec.variant == "dcqaoa" else 2) * spec.p


@dataclass(frozen=True)
class CircuitOp:
    """One elementary factor: a diagonal phase or a Pauli rotation.

    The applied angle is (parameter value) * scale, where the parameter is
    identified by (name, layer). ``generator`` is an energy table for kind
    "diag" and a PauliString for kind "rot".
    """

    kind: str
    generator: object
    param: tuple
    scale: float = 1.0


def _split_problem(h_prob: PauliSum):
    """Split H_prob into its diagonal part and per-site X coefficients.

    Models in this package only ever produce I/Z monomials plus single-site
    X terms; anything else is rejected rather than silently mis-digitized.
    """
    diag_terms = []
    x_coeffs: dict[int, float] = {}
    for c, s in h_prob.terms:
        kinds = set(s.letters)
        if kinds <= {"I", "Z"}:
            diag_terms.append((c, s))
        elif s.weight == 1 and "X" in kinds:
            x_coeffs[s.support[0]] = x_coeffs.get(s.support[0], 0.0) + c.real
        else:
            raise ValueError(
                f"cannot digitize problem term {s.letters}; "
                "expected Z-monomials plus single-site X"
            )
    diag = PauliSum(h_prob.length, tuple(diag_terms))
    return diag, sorted(x_coeffs.items())


def build_ops(spec: AnsatzSpec, model: ModelTriple) -> list[CircuitOp]:
    """Flat factor list for the full p-layer circuit, in application order."""
    L = model.length
    diag, x_coeffs = _split_problem(model.h_prob)
    energies = sim.diagonal_energies(diag) if diag.terms else None
    ops: list[CircuitOp] = []
    for j in range(spec.p):
        if energies is not None:
            ops.append(CircuitOp("diag", energies, ("gamma", j)))
        for site, c in x_coeffs:
            ops.append(
                CircuitOp("rot", PauliString.single(L, site, "X"), ("gamma", j), c)
            )
        for site in range(L):
            ops.append(
                CircuitOp("rot", PauliString.single(L, site, "X"), ("beta", j))
            )
        if spec.variant == "dcqaoa":
            for weight, s in spec.cd_operator.terms:
                ops.append(CircuitOp("rot", s, ("alpha", j), weight))
    return ops


def _angle(params: ParameterVector, op: CircuitOp) -> float:
    name, j = op.param
    return getattr(params, name)[j] * op.scale


def apply_op(state: sim.StateVector, op: CircuitOp, params: ParameterVector,
             adjoint: bool = False) -> sim.StateVector:
    theta = _angle(params, op)
    if adjoint:
        theta = -theta
    if op.kind == "diag":
        return sim.apply_diagonal_phase(state, op.generator, theta)
    return sim.apply_pauli_rotation(state, op.generator, theta)


def run(spec: AnsatzSpec, params: ParameterVector, model: ModelTriple) -> sim.StateVector:
    """Execute the circuit from |+>^L and return the final state."""
    params.check(spec)
    state = sim.init_plus(model.length)
    for op in build_ops(spec, model):
        apply_op(state, op, params)
    return state


class Depth(NamedTuple):
    d_layer: int
    d_cd_layer: int
    total: int


def depth(spec: AnsatzSpec, model: ModelTriple) -> Depth:
    """Per-layer depth accounting; total = (d + d_cd) * p.

    Counting unit is one homogeneous rotation family applied across the
    system: single-qubit families cost 1, a two-qubit CD family costs 4
    (basis change plus entangling ladder), and a k-body diagonal family
    costs 2(k-1)+1 (CNOT ladder, phase rotation, ladder back).
    """
    diag, x_coeffs = _split_problem(model.h_prob)
    d = 1  # mixer
    if x_coeffs:
        d += 1
    for w in sorted({s.weight for _, s in diag.terms if s.weight > 0}):
        d += 2 * (w - 1) + 1
    d_cd = 0
    if spec.variant == "dcqaoa":
        d_cd = 1 if max(s.weight for _, s in spec.cd_operator.terms) == 1 else 4
    return Depth(d, d_cd, (d + d_cd) * spec.p)
