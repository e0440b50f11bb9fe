"""Command-line surface: fit, cluster, cover, reduce-ds, reduce-rmis, verify,
gen, plot, bench.

Exit codes: 0 success/YES/PASS, 1 NO/FAIL, 2 usage error, 3 resource guard.
All randomness flows from --seed through one counter-based generator, and
numeric outputs are byte-identical across repeated runs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from fractions import Fraction

from . import __version__
from .clustering import (
    HeuristicConfig,
    count_consistent_partitions,
    partition_count,
    solve_exact,
    solve_heuristic,
)
from .cover import solve_cover, solve_cover_kernelized
from .errors import GuardLimitError
from .fitting import best_fit_flat
from .generators import (
    matching_color_graph,
    planted_lines_cloud,
    random_cloud,
    random_exact_cloud,
)
from .geometry import MODE_FLOAT, MODE_RATIONAL
from .reductions import (
    audit_rmis_instance,
    cover_to_dominating_set,
    dominating_set_to_cover_witness,
    ds_to_hyperplane_cover,
    exact_solution_cost,
    independent_set_to_lines,
    rmis_to_line_clustering,
)
from . import io as fio
from .plotting import render_svg


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _load_cloud(path: str, csv_mult: bool = False):
    if path.endswith(".csv"):
        with open(path) as fh:
            return fio.cloud_from_csv(fh.read(), has_mult=csv_mult)
    return fio.cloud_from_obj(_load_json(path))


def _write_output(args, payload: dict, command: str, inputs: list,
                  seed: int | None, t0: float) -> None:
    payload = dict(payload)
    payload["manifest"] = fio.build_manifest(
        command, sys.argv[1:], inputs, seed, round(time.time() - t0, 6))
    text = fio.dumps_canonical(payload)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_fit(args) -> int:
    t0 = time.time()
    cloud = _load_cloud(args.input, args.csv_mult)
    res = best_fit_flat(cloud, args.r)
    payload = {
        "kind": "fit",
        "r": args.r,
        "cost": res.cost,
        "spectrum": list(res.spectrum),
        "flat": {"basis": [[float(c) for c in col] for col in res.flat.basis],
                 "offset": [float(c) for c in res.flat.offset]},
    }
    _write_output(args, payload, "fit", [args.input], None, t0)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(render_svg(cloud, [res.flat]))
    return 0


def cmd_cluster(args) -> int:
    t0 = time.time()
    cloud = _load_cloud(args.input, args.csv_mult)
    if args.heuristic:
        config = HeuristicConfig(restarts=args.restarts, max_iter=args.max_iter,
                                 rel_tol=args.tol, rng_seed=args.seed)
        sol = solve_heuristic(cloud, args.k, args.r, config, threads=args.threads)
        mode = "heuristic"
        if args.budget is not None and sol.budget_decision is None:
            sol = type(sol)(sol.flats, sol.assignment, sol.cost,
                            budget_decision=sol.cost <= args.budget)
    else:
        sol = solve_exact(cloud, args.k, args.r, budget=args.budget,
                          guard=args.guard)
        mode = "exact"
    payload = fio.clustering_solution_to_obj(sol, args.r)
    payload["kind"] = "clustering"
    payload["mode"] = mode
    decision = None
    if args.budget is not None:
        decision = "YES" if sol.budget_decision else "NO"
        payload["budget"] = args.budget
        payload["decision"] = decision
    _write_output(args, payload, "cluster", [args.input], args.seed, t0)
    if decision:
        print(decision)
        return 0 if decision == "YES" else 1
    return 0


def cmd_cover(args) -> int:
    t0 = time.time()
    cloud = _load_cloud(args.input)
    if cloud.mode != MODE_RATIONAL:
        print("cover requires a rational-mode cloud", file=sys.stderr)
        return 2
    if args.kernel:
        sol = solve_cover_kernelized(cloud, args.k, guard=args.guard)
    else:
        sol = solve_cover(cloud, args.k, strategy=args.strategy, guard=args.guard)
    if sol is None:
        payload = {"kind": "cover", "k": args.k, "answer": "NO"}
        _write_output(args, payload, "cover", [args.input], None, t0)
        print("NO")
        return 1
    payload = fio.cover_solution_to_obj(sol)
    payload["kind"] = "cover"
    payload["answer"] = "YES"
    _write_output(args, payload, "cover", [args.input], None, t0)
    print("YES")
    return 0


def cmd_reduce_ds(args) -> int:
    t0 = time.time()
    g = fio.graph_from_obj(_load_json(args.graph))
    inst = ds_to_hyperplane_cover(g, args.k, allow_trivial=args.allow_trivial)
    payload = fio.ds_instance_to_obj(inst)
    _write_output(args, payload, "reduce-ds", [args.graph], None, t0)
    return 0


def cmd_reduce_rmis(args) -> int:
    t0 = time.time()
    g = fio.graph_from_obj(_load_json(args.graph))
    overrides = {}
    for kv in args.override or []:
        key, _, val = kv.partition("=")
        overrides[key] = int(val)
    inst = rmis_to_line_clustering(
        g, faithful=args.faithful,
        constants=overrides or None,
        materialize=None if args.materialize == "auto" else args.materialize == "yes")
    payload = fio.rmis_instance_to_obj(inst)
    payload["audit"] = audit_rmis_instance(inst)
    _write_output(args, payload, "reduce-rmis", [args.graph], None, t0)
    return 0 if all(payload["audit"].values()) else 1


def cmd_verify(args) -> int:
    t0 = time.time()
    inst_data = _load_json(args.instance)
    witness = _load_json(args.witness)
    inst = fio.instance_from_obj(inst_data)
    checks: list[tuple[str, bool]] = []
    if inst_data["kind"] == "ds_cover":
        if witness.get("kind") == "dominating_set":
            planes = dominating_set_to_cover_witness(inst, witness["vertices"])
            checks.append(("witness dominates and covers", True))
            extracted = cover_to_dominating_set(inst, planes)
            checks.append(("cover maps back to a dominating set",
                           inst.graph.is_dominating(extracted)))
        elif witness.get("kind") == "cover":
            sol = fio.cover_solution_from_obj(witness)
            from .cover import verify_cover
            ok = verify_cover(inst.cloud, sol.hyperplanes)
            checks.append(("planes cover every point", ok))
            if ok:
                extracted = cover_to_dominating_set(inst, sol.hyperplanes)
                checks.append(("extracted set dominates",
                               inst.graph.is_dominating(extracted)))
        else:
            print("unsupported witness kind for a ds_cover instance", file=sys.stderr)
            return 2
    elif inst_data["kind"] == "rmis":
        report = audit_rmis_instance(inst)
        for name, ok in report.items():
            checks.append((f"audit: {name}", ok))
        if witness.get("kind") == "selection":
            lines = independent_set_to_lines(inst, tuple(witness["indices"]))
            cost = exact_solution_cost(inst, lines)
            checks.append((f"cost <= B ({cost} vs {inst.B})", cost <= inst.B))
    else:
        print("unknown instance kind", file=sys.stderr)
        return 2
    all_ok = all(ok for _, ok in checks)
    for name, ok in checks:
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    print("PASS" if all_ok else "FAIL")
    return 0 if all_ok else 1


def cmd_gen(args) -> int:
    t0 = time.time()
    if args.what == "planted":
        cloud, labels, _ = planted_lines_cloud(args.n, args.k, args.noise, args.seed,
                                               rotate=not args.no_rotate)
        payload = fio.cloud_to_obj(cloud)
        payload["planted_labels"] = list(labels)
    elif args.what == "random":
        cloud = random_cloud(args.n, args.dim, args.seed, max_mult=args.max_mult)
        payload = fio.cloud_to_obj(cloud)
    elif args.what == "random-exact":
        cloud = random_exact_cloud(args.n, args.dim, args.seed)
        payload = fio.cloud_to_obj(cloud)
    elif args.what == "matching-graph":
        g = matching_color_graph(args.ell, args.nu)
        payload = fio.graph_to_obj(g)
    else:
        print(f"unknown generator {args.what!r}", file=sys.stderr)
        return 2
    if args.format == "csv":
        if args.what in ("planted", "random"):
            text = fio.cloud_to_csv(cloud, include_mult=args.max_mult > 1)
            if args.output:
                with open(args.output, "w") as fh:
                    fh.write(text)
            else:
                print(text, end="")
            return 0
        print("CSV output is only available for float clouds", file=sys.stderr)
        return 2
    payload["kind"] = "cloud" if "points" in payload else "graph"
    _write_output(args, payload, "gen", [], args.seed, t0)
    return 0


def cmd_plot(args) -> int:
    cloud = _load_cloud(args.input, args.csv_mult)
    flats = []
    if args.solution:
        data = _load_json(args.solution)
        from .geometry import AffineFlat
        for f in data.get("flats", []):
            basis = tuple(tuple(float(c) for c in col) for col in f["basis"])
            offset = tuple(float(c) for c in f["offset"])
            flats.append(AffineFlat(cloud.dim, len(basis), basis, offset, MODE_FLOAT))
    with open(args.output, "w") as fh:
        fh.write(render_svg(cloud, flats))
    return 0


def cmd_bench(args) -> int:
    rows = ["n\tconsistent_partitions\ttotal_partitions\tseconds"]
    if args.suite != "partitions":
        print(f"unknown suite {args.suite!r}", file=sys.stderr)
        return 2
    counts = []
    for n in range(args.n_min, args.n_max + 1):
        cloud = random_cloud(n, 2, args.seed + n)
        t0 = time.time()
        c = count_consistent_partitions(cloud, args.k, args.r, guard=args.guard)
        dt = time.time() - t0
        counts.append((n, c))
        rows.append(f"{n}\t{c}\t{partition_count(n, args.k)}\t{dt:.3f}")
    if len(counts) >= 2:
        xs = [math.log(n) for n, _ in counts]
        ys = [math.log(max(c, 1)) for _, c in counts]
        mx = sum(xs) / len(xs)
        my = sum(ys) / len(ys)
        denom = sum((x - mx) ** 2 for x in xs)
        slope = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / denom
        rows.append(f"# log-log slope\t{slope:.3f}")
    text = "\n".join(rows) + "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flatcover",
                                 description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"flatcover {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, output=True):
        if output:
            p.add_argument("-o", "--output", default=None, help="output file")
        p.add_argument("--guard", type=int, default=None,
                       help="enumeration cap override (also FLATCOVER_GUARD)")

    p = sub.add_parser("fit", help="optimal single flat")
    p.add_argument("input")
    p.add_argument("-r", type=int, required=True)
    p.add_argument("--svg", default=None)
    p.add_argument("--csv-mult", action="store_true")
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("cluster", help="k-flat clustering")
    p.add_argument("input")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("-r", type=int, required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--heuristic", action="store_true")
    p.add_argument("--budget", type=float, default=None)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--csv-mult", action="store_true")
    common(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("cover", help="exact hyperplane cover")
    p.add_argument("input")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--kernel", action="store_true",
                   help="apply the d=2 forced-line kernel first")
    p.add_argument("--strategy", choices=("auto", "candidates", "partition"),
                   default="auto")
    common(p)
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("reduce-ds", help="Dominating Set -> Hyperplane Cover")
    p.add_argument("graph")
    p.add_argument("-k", type=int, required=True, help="dominating set size k'")
    p.add_argument("--allow-trivial", action="store_true")
    common(p)
    p.set_defaults(func=cmd_reduce_ds)

    p = sub.add_parser("reduce-rmis",
                       help="Multicolored Independent Set -> Line Clustering")
    p.add_argument("graph")
    p.add_argument("--faithful", action="store_true")
    p.add_argument("--materialize", choices=("auto", "yes", "no"), default="auto")
    p.add_argument("--override", action="append", metavar="NAME=INT",
                   help="relaxed-mode constant override (p, W, d_s, d_l)")
    common(p)
    p.set_defaults(func=cmd_reduce_rmis)

    p = sub.add_parser("verify", help="check a witness against an instance")
    p.add_argument("instance")
    p.add_argument("witness")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gen", help="instance generators")
    p.add_argument("what", choices=("planted", "random", "random-exact",
                                    "matching-graph"))
    p.add_argument("-n", type=int, default=12)
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--no-rotate", action="store_true",
                   help="keep planted lines axis-aligned")
    p.add_argument("--max-mult", type=int, default=1)
    p.add_argument("--ell", type=int, default=2)
    p.add_argument("--nu", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("plot", help="render an SVG of a planar instance")
    p.add_argument("input")
    p.add_argument("--solution", default=None)
    p.add_argument("--csv-mult", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("bench", help="measurement harness")
    p.add_argument("suite", choices=("partitions",))
    p.add_argument("--n-min", type=int, default=6)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("-k", type=int, default=2)
    p.add_argument("-r", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_bench)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except GuardLimitError as exc:
        print(f"guard: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
