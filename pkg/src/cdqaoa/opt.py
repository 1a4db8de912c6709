"""Cost, approximation ratio, analytic adjoint gradients, and SGD loops.

The gradient is exact: one forward sweep builds the final state, one
backward sweep walks the factor list in reverse, un-applying each unitary
from both the state and the H-propagated costate and accumulating
dF/d(theta) = 2 Im <costate| G |state> per generator. Shared layer angles
(one alpha multiplying many CD factors) sum their per-factor
contributions, which handles non-commuting CD orderings correctly.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from . import ansatz as anz
from . import sim
from .models import ModelTriple, ground_energy_of_sum

DEFAULT_LEARNING_RATE = {"momentum": 0.01, "adagrad": 0.05}
METHODS = ("momentum", "adagrad")


@dataclass(frozen=True)
class OptimizerConfig:
    """Gradient-descent configuration; learning_rate None picks the method default."""

    method: str = "adagrad"
    learning_rate: float | None = None
    momentum_coefficient: float = 0.9
    epsilon: float = 1e-8
    max_iterations: int = 500
    gradient_tolerance: float = 1e-6
    init_low: float = 0.0
    init_high: float = 0.1
    explicit_init: tuple | None = None
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.momentum_coefficient < 1:
            raise ValueError("momentum_coefficient must be in [0, 1)")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.gradient_tolerance <= 0:
            raise ValueError("gradient_tolerance must be positive")

    @property
    def resolved_learning_rate(self) -> float:
        if self.learning_rate is not None:
            return self.learning_rate
        return DEFAULT_LEARNING_RATE[self.method]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "learning_rate": self.resolved_learning_rate,
            "momentum_coefficient": self.momentum_coefficient,
            "epsilon": self.epsilon,
            "max_iterations": self.max_iterations,
            "gradient_tolerance": self.gradient_tolerance,
            "init_low": self.init_low,
            "init_high": self.init_high,
            "explicit_init": list(self.explicit_init) if self.explicit_init else None,
            "seed": self.seed,
        }


def cost(spec: anz.AnsatzSpec, params: anz.ParameterVector, model: ModelTriple) -> float:
    """F = <psi(params)| H_prob |psi(params)>."""
    state = anz.run(spec, params, model)
    return sim.expectation(state, model.h_prob)


def approximation_ratio(f: float, e0: float) -> float:
    """R = F / E0; an exactly zero ground energy leaves R undefined."""
    if e0 == 0.0:
        raise ValueError("approximation ratio undefined for E0 = 0")
    return f / e0


def _flat_index(spec: anz.AnsatzSpec, param: tuple) -> int:
    name, j = param
    offset = {"gamma": 0, "beta": spec.p, "alpha": 2 * spec.p}[name]
    return offset + j


def _generator_action(op: anz.CircuitOp, amps: np.ndarray) -> np.ndarray:
    if op.kind == "diag":
        return op.generator * amps
    return sim.pauli_action(op.generator, amps)


def value_and_gradient(
    spec: anz.AnsatzSpec,
    params: anz.ParameterVector,
    model: ModelTriple,
    ops: list | None = None,
) -> tuple[float, np.ndarray]:
    """(F, dF/dparams) in the flat [gamma | beta | alpha] layout.

    ``ops`` lets loops reuse a prebuilt factor list; it must come from
    ``ansatz.build_ops(spec, model)``.
    """
    params.check(spec)
    if ops is None:
        ops = anz.build_ops(spec, model)
    ket = sim.init_plus(model.length)
    for op in ops:
        anz.apply_op(ket, op, params)
    bra = sim.StateVector(ket.L, sim.h_action(model.h_prob, ket.amplitudes))
    f = np.vdot(ket.amplitudes, bra.amplitudes)
    if abs(f.imag) > sim.IMAG_TOL:
        raise ValueError(f"cost has imaginary residue {f.imag:g}")
    grad = np.zeros(anz.parameter_count(spec))
    for op in reversed(ops):
        g = _generator_action(op, ket.amplitudes)
        grad[_flat_index(spec, op.param)] += (
            2.0 * op.scale * np.vdot(bra.amplitudes, g).imag
        )
        anz.apply_op(ket, op, params, adjoint=True)
        anz.apply_op(bra, op, params, adjoint=True)
    return float(f.real), grad


def gradient(
    spec: anz.AnsatzSpec, params: anz.ParameterVector, model: ModelTriple
) -> np.ndarray:
    return value_and_gradient(spec, params, model)[1]


def step_momentum(params: np.ndarray, grad: np.ndarray, state: np.ndarray | None,
                  config: OptimizerConfig) -> tuple[np.ndarray, np.ndarray]:
    """v' = mu*v - eta*grad; params' = params + v'."""
    v = np.zeros_like(params) if state is None else state
    v = config.momentum_coefficient * v - config.resolved_learning_rate * grad
    return params + v, v


def step_adagrad(params: np.ndarray, grad: np.ndarray, state: np.ndarray | None,
                 config: OptimizerConfig) -> tuple[np.ndarray, np.ndarray]:
    """G' = G + grad^2; params' = params - eta*grad/sqrt(G' + eps)."""
    g2 = np.zeros_like(params) if state is None else state
    g2 = g2 + grad * grad
    step = config.resolved_learning_rate * grad / np.sqrt(g2 + config.epsilon)
    return params - step, g2


_STEPPERS = {"momentum": step_momentum, "adagrad": step_adagrad}


class OptimizationDiverged(RuntimeError):
    pass


@dataclass(frozen=True)
class TrajectoryPoint:
    iteration: int
    parameters: tuple
    f: float
    r: float
    gradient_norm: float


@dataclass(frozen=True)
class Trajectory:
    """Full optimization record; final point carries the result."""

    points: tuple
    status: str  # "converged" | "max_iter"
    e0: float
    wall_time: float
    config: OptimizerConfig
    ansatz_metadata: dict = field(default_factory=dict)

    @property
    def final(self) -> TrajectoryPoint:
        return self.points[-1]

    @property
    def iterations(self) -> int:
        return self.final.iteration

    def to_json_lines(self, include_parameters: bool = False) -> list[str]:
        import json

        lines = []
        for pt in self.points:
            rec = {
                "iteration": pt.iteration,
                "F": pt.f,
                "R": pt.r,
                "gradient_norm": pt.gradient_norm,
            }
            if include_parameters:
                rec["parameters"] = list(pt.parameters)
            lines.append(json.dumps(rec))
        terminal = {
            "status": self.status,
            "E0": self.e0,
            "wall_time": self.wall_time,
            "config": self.config.to_dict(),
            "ansatz": self.ansatz_metadata,
        }
        lines.append(json.dumps(terminal))
        return lines


def initial_parameters(spec: anz.AnsatzSpec, config: OptimizerConfig) -> np.ndarray:
    if config.explicit_init is not None:
        x0 = np.asarray(config.explicit_init, dtype=float)
        if x0.shape != (anz.parameter_count(spec),):
            raise ValueError("explicit_init length mismatch")
        return x0
    rng = np.random.default_rng(config.seed)
    return rng.uniform(config.init_low, config.init_high, anz.parameter_count(spec))


def optimize(
    spec: anz.AnsatzSpec,
    model: ModelTriple,
    config: OptimizerConfig,
    e0: float | None = None,
) -> Trajectory:
    """Run the configured stepper until the gradient norm or iteration cap.

    Deterministic under the config seed. A non-finite cost (diverged
    learning rate) aborts with a diagnostic rather than recording NaNs.
    """
    start = time.perf_counter()
    if e0 is None:
        e0 = ground_energy_of_sum(model.h_prob).e0
    x = initial_parameters(spec, config)
    ops = anz.build_ops(spec, model)
    stepper = _STEPPERS[config.method]
    opt_state = None
    points = []
    status = "max_iter"
    for it in range(config.max_iterations + 1):
        pv = anz.ParameterVector.from_flat(spec, x)
        f, grad = value_and_gradient(spec, pv, model, ops=ops)
        if not np.isfinite(f) or not np.all(np.isfinite(grad)):
            raise OptimizationDiverged(
                f"non-finite cost/gradient at iteration {it} "
                f"(method={config.method}, lr={config.resolved_learning_rate})"
            )
        gnorm = float(np.linalg.norm(grad))
        points.append(
            TrajectoryPoint(it, tuple(x), f, approximation_ratio(f, e0), gnorm)
        )
        if gnorm <= config.gradient_tolerance:
            status = "converged"
            break
        if it == config.max_iterations:
            break
        x, opt_state = stepper(x, grad, opt_state, config)
    return Trajectory(
        points=tuple(points),
        status=status,
        e0=e0,
        wall_time=time.perf_counter() - start,
        config=replace(config, learning_rate=config.resolved_learning_rate),
        ansatz_metadata=spec.metadata(),
    )
