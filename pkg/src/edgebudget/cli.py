"""Command-line entry point: trials, sweeps, oracle checks, witness
validation, hitting times.

Exit codes: 0 success, 1 operation failed (e.g. invalid witness),
2 usage error, 3 unreadable or invalid config, 4 malformed edge list.
"""

import argparse
import json
import sys

from edgebudget import harness
from edgebudget.graphstate import PurchasedGraph, degeneracy
from edgebudget.stream import hitting_time

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_EDGELIST = 4

_EPILOG = """\
exit codes: 0 ok, 1 operation failed, 2 usage error, 3 bad config,
4 malformed edge list.  Worker count comes from --jobs, falling back to
the EDGEBUDGET_JOBS environment variable (default 1).
"""


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="edgebudget",
        description="Budgeted online edge purchasing on the random graph process",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    run = sub.add_parser("run", help="run one experiment, write a trial CSV")
    run.add_argument("--config", help="INI config file")
    run.add_argument("--out", help="trial CSV output path")
    run.add_argument("--seeds", help="override: base:count or comma list")
    run.add_argument("--jobs", type=int, help="parallel worker count")
    run.add_argument("--n", type=int, help="override vertex count")
    run.add_argument("--strategy", help="override strategy name")
    run.add_argument("--time", help="override time spec (e.g. nlogn:0.75)")
    run.add_argument("--budget", help="override budget spec (e.g. n:9)")
    run.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                     help="override a strategy parameter (repeatable)")
    run.add_argument("--timing", action="store_true",
                     help="include wall_ms in the CSV (breaks byte determinism)")

    sw = sub.add_parser("sweep", help="run a coefficient grid, write a sweep CSV")
    sw.add_argument("--config", required=True, help="INI config with [sweep]")
    sw.add_argument("--out", required=True, help="sweep CSV output path")
    sw.add_argument("--seeds", help="override seeds")
    sw.add_argument("--jobs", type=int, help="parallel worker count")
    sw.add_argument("--n", type=int, help="override vertex count")
    sw.add_argument("--strategy", help="override strategy name")

    orc = sub.add_parser("oracle", help="run a brute-force oracle on a graph dump")
    orc.add_argument("name", choices=["traps", "boosters", "hamiltonian", "degeneracy"])
    orc.add_argument("--graph", required=True, help='edge-list file ("n m" header)')
    orc.add_argument("--target", help="trap target, e.g. C3, path:4, star:5")

    val = sub.add_parser("validate", help="re-check a stored witness")
    val.add_argument("--graph", required=True, help="edge-list file")
    val.add_argument("--witness", required=True, help="witness JSON file")

    hit = sub.add_parser("hitting", help="print a hitting time of the process")
    hit.add_argument("--n", type=int, required=True)
    hit.add_argument("--seed", type=int, required=True)
    hit.add_argument("--property", required=True,
                     help="mindegK (e.g. mindeg2) or connected")
    return parser


def _load_graph(path):
    try:
        return PurchasedGraph.load(path)
    except OSError as err:
        print(f"error: cannot read graph file: {err}", file=sys.stderr)
        raise SystemExit(EXIT_EDGELIST) from err
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        raise SystemExit(EXIT_EDGELIST) from err


def _fmt_pair(edge):
    return f"({edge[0]},{edge[1]})"


def _parse_target(label):
    from edgebudget.oracles import TargetGraph, tree_edges

    label = label.strip()
    if label.upper().startswith("C") and label[1:].isdigit():
        return TargetGraph.cycle(int(label[1:]))
    kind, _, num = label.partition(":")
    return TargetGraph.tree(tree_edges(kind, int(num)))


def _config_from_args(args, need_sweep=False):
    if args.config:
        cfg, sweep_spec = harness.parse_config(args.config)
    else:
        if args.strategy is None or args.n is None or args.time is None or args.budget is None:
            print("error: need --config or all of --strategy/--n/--time/--budget",
                  file=sys.stderr)
            raise SystemExit(EXIT_CONFIG)
        cfg = harness.ExperimentConfig(
            strategy=args.strategy, n=args.n,
            time_spec=args.time, budget_spec=args.budget,
        )
        sweep_spec = None
    if getattr(args, "strategy", None):
        cfg.strategy = args.strategy
    if getattr(args, "n", None):
        cfg.n = args.n
    if getattr(args, "time", None):
        cfg.time_spec = args.time
    if getattr(args, "budget", None):
        cfg.budget_spec = args.budget
    if args.seeds:
        cfg.seeds = args.seeds
    for item in getattr(args, "param", []):
        key, _, value = item.partition("=")
        cfg.params[key] = harness._parse_value(value)
    if need_sweep and sweep_spec is None:
        print("error: sweep needs a [sweep] section in the config", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)
    return cfg, sweep_spec


def _cmd_run(args):
    cfg, _ = _config_from_args(args)
    records, stats = harness.run_experiment(cfg, args.jobs)
    if args.out:
        harness.write_trial_csv(args.out, records, include_timing=args.timing)
    print(
        f"{cfg.strategy} n={cfg.n}: {stats.successes}/{stats.trials} ok "
        f"(rate {stats.rate:.3f}, ci [{stats.ci_lo:.3f}, {stats.ci_hi:.3f}])"
    )
    return EXIT_OK


def _cmd_sweep(args):
    cfg, sweep_spec = _config_from_args(args, need_sweep=True)
    rows = harness.sweep(
        cfg,
        sweep_spec["time_values"],
        sweep_spec["budget_values"],
        sweep_spec.get("n_values"),
        args.jobs,
    )
    harness.write_sweep_csv(args.out, rows)
    print(f"wrote {len(rows)} sweep rows to {args.out}")
    return EXIT_OK


def _cmd_oracle(args):
    from edgebudget import oracles

    g = _load_graph(args.graph)
    if args.name == "degeneracy":
        print(f"degeneracy: {degeneracy(g)}")
        return EXIT_OK
    if args.name == "hamiltonian":
        ok, cycle = oracles.hamiltonian_exact(g)
        print(f"hamiltonian: {ok}" + (f" cycle: {tuple(cycle)}" if ok else ""))
        return EXIT_OK
    if args.name == "boosters":
        found = sorted(oracles.exact_boosters(g))
        print(f"{len(found)} boosters: " + ", ".join(_fmt_pair(e) for e in found))
        return EXIT_OK
    if not args.target:
        print("error: traps oracle needs --target", file=sys.stderr)
        return EXIT_USAGE
    target = _parse_target(args.target)
    traps = sorted(oracles.enumerate_traps(g, target).traps)
    noun = "trap" if len(traps) == 1 else "traps"
    print(f"{len(traps)} {noun}: " + ", ".join(_fmt_pair(e) for e in traps))
    return EXIT_OK


def _cmd_validate(args):
    g = _load_graph(args.graph)
    try:
        with open(args.witness) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as err:
        print(f"error: cannot read witness: {err}", file=sys.stderr)
        return EXIT_CONFIG
    witness = data.get("witness", data)
    target = data.get("target")
    ok = harness.validate_witness(g, witness, target)
    print(f"witness {witness.get('kind')}: {'valid' if ok else 'INVALID'}")
    return EXIT_OK if ok else EXIT_FAIL


def _cmd_hitting(args):
    prop = args.property.strip()
    if prop == "connected":
        value = hitting_time(args.n, args.seed, "connected")
    elif prop.startswith("mindeg") and prop[6:].isdigit():
        value = hitting_time(args.n, args.seed, ("mindeg", int(prop[6:])))
    else:
        print(f"error: unknown property {prop!r}", file=sys.stderr)
        return EXIT_USAGE
    print(value)
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.verb == "run":
            return _cmd_run(args)
        if args.verb == "sweep":
            return _cmd_sweep(args)
        if args.verb == "oracle":
            return _cmd_oracle(args)
        if args.verb == "validate":
            return _cmd_validate(args)
        return _cmd_hitting(args)
    except harness.ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
