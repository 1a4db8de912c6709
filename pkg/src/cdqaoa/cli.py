"""Command-line interface: pool, exact, solve, sweep, figure.

Exit codes: 0 success, 1 usage error, 2 partial failure (some sweep cells
failed).
"""
from __future__ import annotations

import argparse
import sys

from . import ansatz as anz
from . import bench, models, opt
from .pauli import agp_pool


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--model", required=True, choices=bench.MODEL_KINDS)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--hz", type=float, default=None)
    p.add_argument("--hx", type=float, default=None)
    p.add_argument("--P", type=int, default=2)
    p.add_argument("--h", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0, help="instance seed for random models")
    p.add_argument("--instance-file", default=None,
                   help="load the instance from a JSON file instead")


def _instance_from_args(args) -> models.ProblemInstance:
    if args.instance_file:
        with open(args.instance_file) as fh:
            return models.instance_from_json(fh.read())
    params = {}
    if args.model in ("lfim", "tfim", "ghz", "ising"):
        params["J"] = args.J
        if args.hz is not None:
            params["h_z"] = args.hz
        if args.hx is not None:
            params["h_x"] = args.hx
        if args.model == "lfim" and "h_z" not in params:
            params["h_z"] = 1.0
        if args.model == "tfim" and "h_x" not in params:
            params["h_x"] = 1.0
    elif args.model == "pspin":
        params = {"P": args.P, "h": args.h}
    selector = bench.ModelSelector(args.model, args.L, params)
    return selector.instantiate(args.seed)


def _cmd_pool(args) -> int:
    instance = _instance_from_args(args)
    triple = models.build(instance)
    pool = agp_pool(triple.h_mixer, triple.h_prob, order=args.order,
                    max_weight=args.max_weight)
    print(f"shapes: {{{', '.join(sorted(pool.shapes))}}}")
    for s in pool.strings:
        print(s.letters)
    return 0


def _cmd_exact(args) -> int:
    instance = _instance_from_args(args)
    e0, degeneracy = models.ground_energy(instance)
    deg = "unknown" if degeneracy is None else degeneracy
    print(f"E0 = {e0:.12g}")
    print(f"degeneracy = {deg}")
    return 0


def _cmd_solve(args) -> int:
    instance = _instance_from_args(args)
    triple = models.build(instance)
    cd = None
    if args.variant == "dcqaoa":
        if args.cd:
            cd = models.make_cd_operator(instance, args.cd)
        else:
            cd = models.default_cd_operator(instance)
    spec = anz.AnsatzSpec(args.variant, args.p, cd)
    config = opt.OptimizerConfig(
        method=args.optimizer, learning_rate=args.lr,
        max_iterations=args.iters, seed=args.init_seed,
    )
    traj = opt.optimize(spec, triple, config)
    for pt in traj.points:
        print(f"{pt.iteration:5d}  F={pt.f: .9f}  R={pt.r:.9f}  "
              f"|grad|={pt.gradient_norm:.3e}")
    d = anz.depth(spec, triple)
    print(f"status={traj.status}  E0={traj.e0:.9f}  "
          f"depth={d.total}  parameters={anz.parameter_count(spec)}")
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config) as fh:
        config = bench.ExperimentConfig.from_json(fh.read())
    table = bench.run_sweep(config)
    out = args.output or "sweep_results"
    paths = bench.emit(table, out)
    for p in paths:
        print(p)
    if table.failed:
        print(f"{len(table.failed)} cell(s) failed", file=sys.stderr)
        return 2
    return 0


def _parse_scale(text: str | None) -> dict:
    if not text:
        return {}
    out = {}
    for pair in text.split(","):
        key, _, value = pair.partition("=")
        if not value:
            raise _UsageError(f"bad scale entry {pair!r}; expected key=value")
        out[key.strip()] = value.strip()
    return out


def _cmd_figure(args) -> int:
    table = bench.run_figure(args.name, _parse_scale(args.scale))
    out = args.output or f"{args.name}_results"
    paths = bench.emit(table, out)
    for p in paths:
        print(p)
    for agg in table.aggregates:
        print(f"{agg.model} L={agg.L} {agg.variant} p={agg.p}: "
              f"mean R = {agg.mean_R:.6f} +- {agg.std_error:.6f} (n={agg.n})")
    if table.failed:
        print(f"{len(table.failed)} cell(s) failed", file=sys.stderr)
        return 2
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="cdqaoa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pool", help="print the CD operator pool for a model")
    _add_model_args(p)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--max-weight", type=int, default=2)
    p.set_defaults(fn=_cmd_pool)

    p = sub.add_parser("exact", help="print ground energy and degeneracy")
    _add_model_args(p)
    p.set_defaults(fn=_cmd_exact)

    p = sub.add_parser("solve", help="run one optimization and print the trajectory")
    _add_model_args(p)
    p.add_argument("--variant", choices=anz.VARIANTS, default="dcqaoa")
    p.add_argument("--p", type=int, default=1)
    p.add_argument("--cd", default=None, help="CD label override (Y, ZY, ...)")
    p.add_argument("--optimizer", choices=opt.METHODS, default="adagrad")
    p.add_argument("--lr", type=float, default=None)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--init-seed", type=int, default=0)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("sweep", help="execute an experiment config file")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("figure", help="run a named built-in figure protocol")
    p.add_argument("name", choices=bench.FIGURES)
    p.add_argument("--scale", default=None,
                   help="comma-separated overrides, e.g. L=8,inits=3,iters=200")
    p.add_argument("--output", default=None)
    p.set_defaults(fn=_cmd_figure)
    return parser


def cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _UsageError as err:
        print(err, file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def main():
    sys.exit(cli())


if __name__ == "__main__":
    main()
