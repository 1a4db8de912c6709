"""Experiment harness: seeded sweeps, aggregation with standard error, persistence.

A sweep is a pure function of its config (all seeds included); cells run
independently, failures are recorded as failed rows without aborting, and
the emitted CSV/JSON-lines plus the metadata sidecar are enough to
re-derive every row.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from . import __version__
from . import ansatz as anz
from . import models, opt

MODEL_KINDS = ("lfim", "tfim", "ghz", "ising", "maxcut3", "sk", "pspin")
RANDOM_KINDS = ("maxcut3", "sk")
FLOAT_FMT = "%.12g"


@dataclass(frozen=True)
class ModelSelector:
    """Which problem family a sweep runs on, before instance seeding."""

    kind: str
    L: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"model kind must be one of {MODEL_KINDS}")

    def instantiate(self, instance_seed: int) -> models.ProblemInstance:
        p = self.params
        if self.kind == "lfim":
            return models.lfim(self.L, p.get("J", 1.0), p.get("h_z", 1.0))
        if self.kind == "tfim":
            return models.tfim(self.L, p.get("J", 1.0), p.get("h_x", 1.0))
        if self.kind == "ghz":
            return models.ghz_chain(self.L, p.get("J", 1.0))
        if self.kind == "ising":
            return models.IsingChain(
                self.L, p.get("J", 1.0), p.get("h_z", 0.0), p.get("h_x", 0.0)
            )
        if self.kind == "maxcut3":
            return models.random_maxcut_3_regular(self.L, instance_seed)
        if self.kind == "sk":
            return models.random_sk(self.L, instance_seed)
        if self.kind == "pspin":
            return models.PSpin(self.L, int(p.get("P", 2)), p.get("h", 0.0))
        raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def label(self) -> str:
        """Row label; carries the non-default parameters so groups stay distinct."""
        if not self.params:
            return self.kind
        inner = ",".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({inner})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "L": self.L, "params": dict(self.params)}


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: model x variants x p values x instance seeds x init seeds."""

    model: ModelSelector
    variants: tuple = ("qaoa", "dcqaoa")
    p_values: tuple = (1,)
    optimizer: opt.OptimizerConfig = field(default_factory=opt.OptimizerConfig)
    instance_seeds: tuple = (0,)
    init_seeds: tuple = (0,)
    cd_label: str | None = None
    record_trajectories: bool = False
    workers: int = 1

    def __post_init__(self):
        if not self.variants:
            raise ValueError("need at least one variant")
        for v in self.variants:
            if v not in anz.VARIANTS:
                raise ValueError(f"unknown variant {v!r}")
        if not self.p_values or any(p < 1 for p in self.p_values):
            raise ValueError("p_values must be non-empty with entries >= 1")
        if not self.instance_seeds or not self.init_seeds:
            raise ValueError("seed lists must be non-empty")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "variants": list(self.variants),
            "p_values": list(self.p_values),
            "optimizer": self.optimizer.to_dict(),
            "instance_seeds": list(self.instance_seeds),
            "init_seeds": list(self.init_seeds),
            "cd_label": self.cd_label,
            "record_trajectories": self.record_trajectories,
            "workers": self.workers,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> ExperimentConfig:
        opt_d = dict(d.get("optimizer", {}))
        explicit = opt_d.get("explicit_init")
        if explicit is not None:
            opt_d["explicit_init"] = tuple(explicit)
        return cls(
            model=ModelSelector(**d["model"]),
            variants=tuple(d.get("variants", ("qaoa", "dcqaoa"))),
            p_values=tuple(d.get("p_values", (1,))),
            optimizer=opt.OptimizerConfig(**opt_d),
            instance_seeds=tuple(d.get("instance_seeds", (0,))),
            init_seeds=tuple(d.get("init_seeds", (0,))),
            cd_label=d.get("cd_label"),
            record_trajectories=bool(d.get("record_trajectories", False)),
            workers=int(d.get("workers", 1)),
        )

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        return cls.from_dict(json.loads(text))


ROW_COLUMNS = (
    "model", "L", "variant", "p", "instance_seed", "init_seed",
    "F", "R", "iterations", "depth", "parameter_count", "status", "error",
)
AGGREGATE_COLUMNS = ("model", "L", "variant", "p", "mean_R", "std_error", "n")


@dataclass(frozen=True)
class ResultRow:
    model: str
    L: int
    variant: str
    p: int
    instance_seed: int
    init_seed: int
    F: float
    R: float
    iterations: int
    depth: int
    parameter_count: int
    status: str
    error: str | None = None


@dataclass(frozen=True)
class AggregateRow:
    model: str
    L: int
    variant: str
    p: int
    mean_R: float
    std_error: float
    n: int


@dataclass
class ResultTable:
    rows: list
    aggregates: list
    metadata: dict
    trajectories: list = field(default_factory=list)

    @property
    def failed(self) -> list:
        return [r for r in self.rows if r.status == "failed"]


def _cell_key(cell: dict) -> tuple:
    return (cell["instance_seed"], cell["variant"], cell["p"], cell["init_seed"])


def _run_cell(cell: dict):
    """Execute one (instance, variant, p, init) optimization; returns (key, row, traj)."""
    spec = anz.AnsatzSpec(
        variant=cell["variant"],
        p=cell["p"],
        cd_operator=cell["cd"] if cell["variant"] == "dcqaoa" else None,
    )
    config = replace(cell["optimizer"], seed=cell["init_seed"])
    try:
        traj = opt.optimize(spec, cell["triple"], config, e0=cell["e0"])
        d = anz.depth(spec, cell["triple"])
        row = ResultRow(
            model=cell["model"], L=cell["L"], variant=cell["variant"], p=cell["p"],
            instance_seed=cell["instance_seed"], init_seed=cell["init_seed"],
            F=traj.final.f, R=traj.final.r, iterations=traj.iterations,
            depth=d.total, parameter_count=anz.parameter_count(spec),
            status=traj.status,
        )
        return _cell_key(cell), row, traj
    except Exception as err:  # failed cells must not abort the sweep
        row = ResultRow(
            model=cell["model"], L=cell["L"], variant=cell["variant"], p=cell["p"],
            instance_seed=cell["instance_seed"], init_seed=cell["init_seed"],
            F=math.nan, R=math.nan, iterations=0, depth=0,
            parameter_count=0, status="failed", error=f"{type(err).__name__}: {err}",
        )
        return _cell_key(cell), row, None


def run_sweep(config: ExperimentConfig) -> ResultTable:
    """Run every cell; deterministic under the config's seeds."""
    instances = {}
    for inst_seed in config.instance_seeds:
        instance = config.model.instantiate(inst_seed)
        triple = models.build(instance)
        e0 = models.ground_energy(instance).e0
        cd = None
        if "dcqaoa" in config.variants:
            if config.cd_label:
                cd = models.make_cd_operator(instance, config.cd_label)
            else:
                cd = models.default_cd_operator(instance)
        instances[inst_seed] = (instance, triple, e0, cd)

    cells = []
    for inst_seed in config.instance_seeds:
        instance, triple, e0, cd = instances[inst_seed]
        for variant in config.variants:
            for p in config.p_values:
                for init_seed in config.init_seeds:
                    cells.append({
                        "model": config.model.label, "L": config.model.L,
                        "variant": variant, "p": p,
                        "instance_seed": inst_seed, "init_seed": init_seed,
                        "triple": triple, "e0": e0, "cd": cd,
                        "optimizer": config.optimizer,
                    })

    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(_run_cell, cells))
    else:
        outcomes = [_run_cell(c) for c in cells]
    outcomes.sort(key=lambda item: item[0])

    rows = [row for _, row, _ in outcomes]
    trajectories = []
    if config.record_trajectories:
        trajectories = [
            (key, traj) for key, _, traj in outcomes if traj is not None
        ]
    metadata = {
        "config": config.to_dict(),
        "instances": {
            str(seed): models.instance_to_json(inst, seed)
            for seed, (inst, _, _, _) in instances.items()
        },
        "ground_energies": {
            str(seed): instances[seed][2] for seed in config.instance_seeds
        },
        "cdqaoa_version": __version__,
    }
    table = ResultTable(
        rows=rows,
        aggregates=aggregate(rows),
        metadata=metadata,
        trajectories=trajectories,
    )
    return table


def aggregate(rows, group_keys=("model", "L", "variant", "p")) -> list:
    """Mean final R and standard error (sample std / sqrt(N)) per group.

    Failed rows are excluded; a single-row group gets std_error 0 with its
    n=1 flagging the convention.
    """
    groups: dict[tuple, list] = {}
    for row in rows:
        if row.status == "failed":
            continue
        key = tuple(getattr(row, k) for k in group_keys)
        groups.setdefault(key, []).append(row.R)
    out = []
    for key in sorted(groups):
        values = groups[key]
        if not values:
            raise ValueError("empty aggregation group")
        n = len(values)
        mean = sum(values) / n
        if n > 1:
            var = sum((v - mean) ** 2 for v in values) / (n - 1)
            se = math.sqrt(var / n)
        else:
            se = 0.0
        named = dict(zip(group_keys, key))
        out.append(AggregateRow(mean_R=mean, std_error=se, n=n, **named))
    return out


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return FLOAT_FMT % value
    return str(value)


def emit(table: ResultTable, directory: str, formats=("csv", "json-lines")) -> list[str]:
    """Write rows/aggregates/metadata (and trajectories when recorded).

    Stable column order, floats at 12 significant digits; returns the
    written paths. I/O failures carry the offending path.
    """
    os.makedirs(directory, exist_ok=True)
    written = []

    def _write(name: str, text: str):
        path = os.path.join(directory, name)
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as err:
            raise OSError(f"writing {path}: {err}") from err
        written.append(path)

    if "csv" in formats:
        lines = [",".join(ROW_COLUMNS)]
        for row in table.rows:
            lines.append(",".join(_fmt(getattr(row, c)) for c in ROW_COLUMNS))
        _write("rows.csv", "\n".join(lines) + "\n")
        lines = [",".join(AGGREGATE_COLUMNS)]
        for agg in table.aggregates:
            lines.append(",".join(_fmt(getattr(agg, c)) for c in AGGREGATE_COLUMNS))
        _write("aggregates.csv", "\n".join(lines) + "\n")
    if "json-lines" in formats:
        lines = []
        for row in table.rows:
            rec = {c: getattr(row, c) for c in ROW_COLUMNS}
            rec = {k: (None if isinstance(v, float) and math.isnan(v) else v)
                   for k, v in rec.items()}
            lines.append(json.dumps(rec, sort_keys=True))
        _write("rows.jsonl", "\n".join(lines) + "\n")
    _write("metadata.json", json.dumps(table.metadata, indent=2, sort_keys=True) + "\n")
    if table.trajectories:
        lines = []
        for key, traj in table.trajectories:
            cell = {"instance_seed": key[0], "variant": key[1],
                    "p": key[2], "init_seed": key[3]}
            for line in traj.to_json_lines():
                rec = json.loads(line)
                rec["cell"] = cell
                lines.append(json.dumps(rec, sort_keys=True))
        _write("trajectories.jsonl", "\n".join(lines) + "\n")
    return written


def read_rows_csv(path: str) -> list[ResultRow]:
    """Parse an emitted rows.csv back into rows (round-trip check)."""
    import csv as _csv

    rows = []
    with open(path) as fh:
        reader = _csv.DictReader(fh)
        for rec in reader:
            rows.append(ResultRow(
                model=rec["model"], L=int(rec["L"]), variant=rec["variant"],
                p=int(rec["p"]), instance_seed=int(rec["instance_seed"]),
                init_seed=int(rec["init_seed"]),
                F=float(rec["F"]) if rec["F"] else math.nan,
                R=float(rec["R"]) if rec["R"] else math.nan,
                iterations=int(rec["iterations"]), depth=int(rec["depth"]),
                parameter_count=int(rec["parameter_count"]),
                status=rec["status"], error=rec["error"] or None,
            ))
    return rows


# Built-in figure protocols. Paper-pinned values (system sizes, layer
# ranges, instance counts) are spelled out here; optimizer knobs come from
# the package defaults and are echoed in metadata.
def figure_configs(name: str, scale: dict | None = None) -> list[ExperimentConfig]:
    scale = dict(scale or {})
    n_inits = int(scale.get("inits", 10))
    n_instances = int(scale.get("instances", 10))
    optimizer = opt.OptimizerConfig(
        max_iterations=int(scale.get("iters", opt.OptimizerConfig().max_iterations))
    )
    init_seeds = tuple(range(n_inits))

    def _ising_fig(kind: str, p_max: int) -> list[ExperimentConfig]:
        return [ExperimentConfig(
            model=ModelSelector(kind, int(scale.get("L", 12))),
            p_values=tuple(range(1, int(scale.get("p_max", p_max)) + 1)),
            optimizer=optimizer,
            init_seeds=init_seeds,
        )]

    if name == "fig2a":
        return _ising_fig("lfim", 6)
    if name == "fig2b":
        return _ising_fig("tfim", 6)
    if name == "fig2c":
        return _ising_fig("ghz", 6)
    if name == "fig3a":
        sizes = [int(s) for s in str(scale.get("sizes", "4,6,8,10,12,14")).split(",")]
        return [
            ExperimentConfig(
                model=ModelSelector("maxcut3", L),
                p_values=(1,),
                optimizer=optimizer,
                instance_seeds=tuple(range(n_instances)),
                init_seeds=init_seeds,
            )
            for L in sizes
        ]
    if name == "fig3b":
        return [ExperimentConfig(
            model=ModelSelector("sk", int(scale.get("L", 6))),
            p_values=tuple(range(1, int(scale.get("p_max", 4)) + 1)),
            optimizer=optimizer,
            instance_seeds=tuple(range(n_instances)),
            init_seeds=init_seeds,
        )]
    if name == "fig4":
        return [
            ExperimentConfig(
                model=ModelSelector("pspin", int(scale.get("L", 6)),
                                    {"P": 4, "h": h}),
                p_values=(1,),
                optimizer=optimizer,
                init_seeds=init_seeds,
                record_trajectories=True,
            )
            for h in (0.0, 1.0)
        ]
    if name == "fig5":
        return [ExperimentConfig(
            model=ModelSelector("pspin", int(scale.get("L", 6)), {"P": 3, "h": 1.0}),
            p_values=tuple(range(1, int(scale.get("p_max", 3)) + 1)),
            optimizer=optimizer,
            init_seeds=init_seeds,
        )]
    raise ValueError(f"unknown figure {name!r}")


FIGURES = ("fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig4", "fig5")


def run_figure(name: str, scale: dict | None = None) -> ResultTable:
    """Run a named built-in protocol, merging multi-config figures into one table."""
    tables = [run_sweep(cfg) for cfg in figure_configs(name, scale)]
    merged = ResultTable(rows=[], aggregates=[], metadata={"figure": name,
                         "sweeps": []}, trajectories=[])
    for t in tables:
        merged.rows.extend(t.rows)
        merged.trajectories.extend(t.trajectories)
        merged.metadata["sweeps"].append(t.metadata)
    merged.aggregates = aggregate(merged.rows)
    return merged
