"""Command-line interface.

Subcommands: solve one instance, generate a random instance file, run a
benchmark grid to CSV, render figures from a benchmark CSV, and verify the
solver against its exact references.  Exit codes: 0 success, 2 solved but
no feasible solution found, 1 usage or input errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields as dataclass_fields

from .bench import (
    BenchConfig,
    ablation_grid,
    bench,
    crossover_grid,
    default_workers,
    mean_gap,
    write_csv,
)
from .evaluation import RelaxMode
from .genetic import CROSSOVER_KINDS, HgaParams, run_hga
from .instances import generate_instance, parse_instance, write_instance
from .model import Instance, Objective

OBJECTIVES = {"cost": Objective.MIN_COST, "time": Objective.MIN_TIME}
RELAX = {"all": RelaxMode.ALL, "truck": RelaxMode.TRUCK,
         "drone": RelaxMode.DRONE, "none": RelaxMode.NONE}


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; the contract wants 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(1)


def _parse_params(spec: str | None) -> dict:
    """Parse 'key=value[,key=value...]' overrides for HgaParams."""

    if not spec:
        return {}
    types = {f.name: f.type for f in dataclass_fields(HgaParams)}
    numeric = {"mu": int, "lam": int, "nb_elite": int, "iter_ni": int, "insertion_k": int,
               "xi_ref": float, "n_close_frac": float, "omega0": float,
               "iter_div_frac": float, "p_rep": float, "h": float}
    out = {}
    for item in spec.replace(",", " ").split():
        if "=" not in item:
            raise ValueError(f"bad params item {item!r}, expected key=value")
        key, _, raw = item.partition("=")
        if key not in types:
            raise ValueError(f"unknown params key {key!r}")
        if key in numeric:
            out[key] = numeric[key](raw)
        elif key == "crossover_kind":
            out[key] = raw
        elif key in ("no_inf", "no_div", "no_repair", "no_restore"):
            out[key] = raw.lower() in ("1", "true", "yes")
        elif key == "relax_mode":
            out[key] = RELAX[raw]
        else:
            raise ValueError(f"params key {key!r} is not settable from the command line")
    return out


def _parse_seeds(spec: str) -> list[int]:
    out = []
    for part in spec.split(","):
        part = part.strip()
        if "-" in part[1:]:
            lo, _, hi = part.partition("-")
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _load_instance(args) -> Instance:
    return parse_instance(args.instance, fmt=args.format, endurance=args.endurance)


def _build_params(args) -> HgaParams:
    overrides = _parse_params(args.params)
    if args.crossover:
        overrides["crossover_kind"] = args.crossover
    if args.relax:
        overrides["relax_mode"] = RELAX[args.relax]
    for flag in ("no_inf", "no_div", "no_repair", "no_restore"):
        if getattr(args, flag):
            overrides[flag] = True
    return HgaParams(**overrides)


def _machine_record(inst: Instance, args, params: HgaParams, res) -> str:
    tour = ">".join(str(v) for v in res.solution.truck_tour)
    dels = "|".join(f"{d.launch},{d.drone_node},{d.rendezvous}"
                    for d in res.solution.deliveries)
    return (
        f"TSPD-SOLUTION instance={inst.name} objective={args.objective} seed={args.seed}"
        f" crossover={params.crossover_kind} relax={params.relax_mode.value}"
        f" no_inf={int(params.no_inf)} no_div={int(params.no_div)}"
        f" no_repair={int(params.no_repair)} no_restore={int(params.no_restore)}"
        f" feasible={int(res.feasible)} value={res.value:.12g}"
        f" iterations={res.stats.iterations}"
        f" tour={tour} deliveries={dels if dels else '-'}"
    )


def cmd_solve(args) -> int:
    inst = _load_instance(args)
    params = _build_params(args)
    res = run_hga(inst, params, OBJECTIVES[args.objective], args.seed)
    tour = " -> ".join(str(v) for v in res.solution.truck_tour)
    dels = "  ".join(f"<{d.launch},{d.drone_node},{d.rendezvous}>"
                     for d in res.solution.deliveries) or "(none)"
    print(f"instance    {inst.name}  (n={inst.n})")
    print(f"objective   min-{args.objective}")
    print(f"seed        {args.seed}")
    print(f"truck tour  {tour}")
    print(f"deliveries  {dels}")
    print(f"value       {res.value:.6f}")
    print(f"feasible    {'yes' if res.feasible else 'NO'}")
    for v in res.violations:
        print(f"  violation: {v}")
    print(f"iterations  {res.stats.iterations}")
    print(f"wall time   {res.stats.wall_time:.2f} s")
    print(_machine_record(inst, args, params, res))
    return 0 if res.feasible else 2


def cmd_generate(args) -> int:
    inst = generate_instance(args.n, args.seed, area=args.area,
                             drone_eligible_frac=args.eligible_frac,
                             endurance=args.endurance)
    write_instance(inst, args.out)
    print(f"wrote {args.out}  (n={inst.n}, {len(inst.drone_eligible)} drone-eligible)")
    return 0


def _bench_instances(args) -> list[Instance]:
    if args.instances:
        return [parse_instance(p, fmt=args.format, endurance=args.endurance)
                for p in args.instances]
    if not args.generate:
        raise ValueError("bench needs --instances or --generate N COUNT SEED0")
    n, count, seed0 = args.generate
    return [generate_instance(n, seed0 + i) for i in range(count)]


def cmd_bench(args) -> int:
    instances = _bench_instances(args)
    objectives = ([OBJECTIVES[args.objective]] if args.objective != "both"
                  else [Objective.MIN_COST, Objective.MIN_TIME])
    base = HgaParams(**_parse_params(args.params))
    if args.grid == "ablation":
        configs = ablation_grid(objectives, base)
    elif args.grid == "crossover":
        kinds = (args.crossover or "dx,pmx,obx").split(",")
        configs = crossover_grid(objectives, kinds, base)
    else:
        params = _build_params(args)
        configs = [BenchConfig(params.crossover_kind, obj, params) for obj in objectives]
    seeds = _parse_seeds(args.seeds)
    records = bench(instances, configs, seeds, workers=args.workers)
    write_csv(args.out, records)
    failed = sum(1 for r in records if r.status.startswith("error"))
    print(f"wrote {args.out}: {len(records)} runs "
          f"({failed} failed) over {len(instances)} instances")
    for obj in objectives:
        for label in sorted({c.label for c in configs}):
            g = mean_gap(records, label, obj)
            print(f"  {obj.value:4s} {label:12s} mean gap {g:7.3f}%")
    return 0


def cmd_report(args) -> int:
    from .report import render_report

    paths = render_report(args.csv, args.out_dir)
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_verify(args) -> int:
    from .verify import run_verification

    ok = run_verification(quick=not args.full)
    return 0 if ok else 1


def build_parser() -> _Parser:
    parser = _Parser(prog="tspd", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve one instance")
    ps.add_argument("--instance", required=True)
    ps.add_argument("--format", choices=("native", "murray"), default="native")
    ps.add_argument("--endurance", type=float, default=20.0,
                    help="drone endurance for murray-format files")
    ps.add_argument("--objective", choices=tuple(OBJECTIVES), default="cost")
    ps.add_argument("--seed", type=int, default=1)
    ps.add_argument("--params", help="HgaParams overrides, e.g. 'mu=10,iter_ni=500'")
    ps.add_argument("--crossover", choices=CROSSOVER_KINDS)
    ps.add_argument("--relax", choices=tuple(RELAX))
    ps.add_argument("--no-inf", dest="no_inf", action="store_true")
    ps.add_argument("--no-div", dest="no_div", action="store_true")
    ps.add_argument("--no-repair", dest="no_repair", action="store_true")
    ps.add_argument("--no-restore", dest="no_restore", action="store_true")
    ps.set_defaults(func=cmd_solve)

    pg = sub.add_parser("generate", help="generate a random instance file")
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--seed", type=int, required=True)
    pg.add_argument("--out", required=True)
    pg.add_argument("--area", type=float, default=10.0)
    pg.add_argument("--eligible-frac", type=float, default=0.8)
    pg.add_argument("--endurance", type=float, default=20.0)
    pg.set_defaults(func=cmd_generate)

    pb = sub.add_parser("bench", help="run a benchmark grid to CSV")
    pb.add_argument("--instances", nargs="*", help="instance file paths")
    pb.add_argument("--generate", nargs=3, type=int, metavar=("N", "COUNT", "SEED0"),
                    help="generate COUNT random instances of size N instead")
    pb.add_argument("--format", choices=("native", "murray"), default="native")
    pb.add_argument("--endurance", type=float, default=20.0)
    pb.add_argument("--objective", choices=("cost", "time", "both"), default="both")
    pb.add_argument("--grid", choices=("single", "crossover", "ablation"), default="single")
    pb.add_argument("--crossover", help="crossover kind(s), comma-separated for --grid crossover")
    pb.add_argument("--relax", choices=tuple(RELAX))
    pb.add_argument("--no-inf", dest="no_inf", action="store_true")
    pb.add_argument("--no-div", dest="no_div", action="store_true")
    pb.add_argument("--no-repair", dest="no_repair", action="store_true")
    pb.add_argument("--no-restore", dest="no_restore", action="store_true")
    pb.add_argument("--params", help="base HgaParams overrides")
    pb.add_argument("--seeds", default="1-10", help="e.g. '1-10' or '1,2,5'")
    pb.add_argument("--out", default="results.csv")
    pb.add_argument("--workers", type=int, default=None,
                    help="process count (default: TSPD_WORKERS or all cores)")
    pb.set_defaults(func=cmd_bench)

    pr = sub.add_parser("report", help="render figures from a benchmark CSV")
    pr.add_argument("--csv", required=True)
    pr.add_argument("--out-dir", default=None,
                    help="figure directory (default: next to the CSV)")
    pr.set_defaults(func=cmd_report)

    pv = sub.add_parser("verify", help="check the solver against exact references")
    pv.add_argument("--full", action="store_true", help="larger sample sizes")
    pv.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError) as exc:
        print(f"tspd: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
