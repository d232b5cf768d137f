"""Seeded Monte Carlo experiment runner.

Runs (strategy, n, t, b) trials against fresh edge streams, in parallel
when asked, validates witnesses, aggregates Wilson-interval success
statistics and writes trial/sweep CSV tables.  Everything downstream of
(config, seed) is deterministic; wall-clock time is recorded but kept
out of the default CSV output so files compare byte-for-byte.
"""

import configparser
import csv
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from edgebudget.rotation import validate_cycle
from edgebudget.stream import EdgeStream, hitting_time
from edgebudget.strategies import _tree_canon, make_strategy, tree_from_label

JOBS_ENV = "EDGEBUDGET_JOBS"
DEFAULT_TIMEOUT = 120.0
CSV_HEADER_NOTE = "# ci=wilson-95"

SWEEP_COLUMNS = [
    "strategy",
    "n",
    "t_coeff",
    "b_coeff",
    "t_resolved",
    "b_resolved",
    "trials",
    "successes",
    "rate",
    "ci_lo",
    "ci_hi",
    "mean_purchased",
    "max_purchased",
    "mean_observed",
    "timeouts",
]

TRIAL_COLUMNS = [
    "seed",
    "t",
    "b",
    "success",
    "observed",
    "purchased",
    "stage",
    "failure",
    "counters",
    "witness_hash",
    "timeout",
]


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    strategy: str
    n: int
    time_spec: str
    budget_spec: str
    params: dict = field(default_factory=dict)
    seeds: str = "0:30"
    oracle_check: str = "off"
    timeout: float = DEFAULT_TIMEOUT

    def seed_list(self):
        spec = str(self.seeds)
        if ":" in spec:
            base, count = spec.split(":")
            return list(range(int(base), int(base) + int(count)))
        out = [int(s) for s in spec.split(",") if s.strip() != ""]
        if len(set(out)) != len(out):
            raise ConfigError("seeds must be distinct")
        return out


@dataclass
class TrialRecord:
    seed: int
    t: int
    b: int
    success: bool
    observed: int
    purchased: int
    stage: str
    failure: str
    counters: str  # JSON, sorted keys
    witness_hash: str
    timeout: bool
    wall_ms: float

    def row(self, include_timing=False):
        out = [
            self.seed,
            self.t,
            self.b,
            int(self.success),
            self.observed,
            self.purchased,
            self.stage,
            self.failure,
            self.counters,
            self.witness_hash,
            int(self.timeout),
        ]
        if include_timing:
            out.append(f"{self.wall_ms:.1f}")
        return out


@dataclass
class SummaryStats:
    trials: int
    successes: int
    rate: float
    ci_lo: float
    ci_hi: float
    mean_purchased: float
    max_purchased: int
    mean_observed: float
    timeouts: int


def wilson_interval(successes, trials, z=1.959963984540054):
    """95% score interval for a binomial proportion."""
    if trials == 0:
        raise ValueError("no trials")
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(
        phat * (1 - phat) / trials + z * z / (4 * trials * trials)
    )
    return max(0.0, center - half), min(1.0, center + half)


def resolve_spec(spec, n, seed=None):
    """Turn a time/budget spec into an integer cap.

    Formats: "abs:X", "n:C" (ceil of C*n), "nlogn:C" (ceil of C*n*ln n),
    "pow:A" (ceil of n**A), "hitting:connected", "hitting:mindeg:K", or
    a bare integer.  Hitting specs replay the seeded stream.
    """
    spec = str(spec)
    tag, _, rest = spec.partition(":")
    if tag == "abs":
        return int(rest)
    if tag == "n":
        return math.ceil(float(rest) * n)
    if tag == "nlogn":
        return math.ceil(float(rest) * n * math.log(n))
    if tag == "pow":
        return math.ceil(n ** float(rest))
    if tag == "hitting":
        if seed is None:
            raise ConfigError("hitting specs need a seed")
        if rest == "connected":
            return hitting_time(n, seed, "connected")
        kind, _, num = rest.partition(":")
        if kind == "mindeg":
            return hitting_time(n, seed, ("mindeg", int(num)))
        raise ConfigError(f"unknown hitting property {rest!r}")
    try:
        return int(spec)
    except ValueError:
        raise ConfigError(f"cannot parse spec {spec!r}") from None


def validate_witness(graph, witness, target=None):
    """Exact structural check of a success witness against the purchased
    graph.  Returns True iff the witness proves its claim."""
    n = graph.n
    kind = witness.get("kind")
    if kind == "spanning_tree":
        return graph.is_connected() and graph.edge_count == n - 1
    if kind == "mindeg":
        return graph.min_degree() >= int(witness["k"])
    if kind == "hamilton_cycle":
        return validate_cycle(graph.adj, witness["cycle"], universe=range(n))
    if kind == "perfect_matching":
        edges = [tuple(e) for e in witness["edges"]]
        covered = [v for e in edges for v in e]
        return (
            len(edges) == n // 2
            and len(set(covered)) == n
            and all(graph.has_edge(u, v) for u, v in edges)
        )
    if kind == "tree_embedding":
        verts = witness["vertices"]
        edges = [tuple(e) for e in witness["edges"]]
        if len(set(verts)) != len(verts):
            return False
        if not all(graph.has_edge(u, v) for u, v in edges):
            return False
        if target is not None:
            return _tree_canon(verts, edges) == _tree_canon(
                sorted({v for e in target for v in e}), [tuple(e) for e in target]
            )
        return True
    if kind == "cycle":
        cycle = witness["cycle"]
        return len(cycle) == int(witness["ell"]) and validate_cycle(graph.adj, cycle)
    return False


def _witness_target(cfg):
    target = cfg.params.get("tree")
    if isinstance(target, str):
        target = tree_from_label(target)
    return target


def run_trial(cfg, seed):
    """One full trial: resolve caps, stream edges, drive the strategy."""
    n = cfg.n
    t = resolve_spec(cfg.time_spec, n, seed)
    b = resolve_spec(cfg.budget_spec, n, seed)
    if t > n * (n - 1) // 2:
        raise ConfigError("t exceeds the number of edges of K_n")
    # budget beyond the observation cap is unusable; clamp rather than
    # reject so that over-provisioned configs (b > t) still run
    b = min(b, t)
    strat = make_strategy(cfg.strategy, n, t, b, cfg.params)
    stream = EdgeStream(n, seed)
    start = time.perf_counter()
    timed_out = False
    for i in range(t):
        if strat.done:
            break
        edge = stream.next_edge()
        if edge is None:
            break
        strat.observe(*edge)
        if (i & 1023) == 0 and time.perf_counter() - start > cfg.timeout:
            timed_out = True
            break
    if not strat.done and not timed_out:
        strat.finish()
    strat.ledger.check()
    success = bool(strat.success) and not timed_out
    failure = strat.failure or ""
    if timed_out:
        failure = failure or "timeout"
    witness_hash = ""
    if strat.witness is not None:
        if not validate_witness(strat.graph, strat.witness, _witness_target(cfg)):
            success = False
            failure = "witness-invalid"
        payload = json.dumps(strat.witness, sort_keys=True).encode()
        witness_hash = hashlib.sha256(payload).hexdigest()[:16]
    if cfg.oracle_check == "small-n" and success and strat.witness is not None:
        _oracle_cross_check(strat)
    wall_ms = (time.perf_counter() - start) * 1000.0
    return TrialRecord(
        seed=seed,
        t=t,
        b=b,
        success=success,
        observed=strat.ledger.observed,
        purchased=strat.ledger.purchased,
        stage=strat.stage_names[strat.stage],
        failure=failure,
        counters=json.dumps(strat.counters, sort_keys=True),
        witness_hash=witness_hash,
        timeout=timed_out,
        wall_ms=wall_ms,
    )


def _oracle_cross_check(strat):
    """Brute-force confirmation of small-n witnesses (assertion only)."""
    from edgebudget import oracles
    from edgebudget.oracles import ORACLE_LIMITS

    kind = strat.witness.get("kind")
    g = strat.graph
    if kind == "hamilton_cycle" and g.n <= ORACLE_LIMITS["hamiltonian"]:
        ok, _ = oracles.hamiltonian_exact(g)
        assert ok, "witnessed Hamilton cycle not confirmed by the exact oracle"


def _trial_worker(args):
    cfg, seed = args
    return run_trial(cfg, seed)


def summarize(records):
    if not records:
        raise ValueError("no trials")
    trials = len(records)
    successes = sum(1 for r in records if r.success)
    lo, hi = wilson_interval(successes, trials)
    return SummaryStats(
        trials=trials,
        successes=successes,
        rate=successes / trials,
        ci_lo=lo,
        ci_hi=hi,
        mean_purchased=sum(r.purchased for r in records) / trials,
        max_purchased=max(r.purchased for r in records),
        mean_observed=sum(r.observed for r in records) / trials,
        timeouts=sum(1 for r in records if r.timeout),
    )


def default_jobs():
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def run_experiment(cfg, parallelism=None):
    """All seeds of one config; results are ordered by seed and
    independent of the degree of parallelism."""
    seeds = cfg.seed_list()
    if not seeds:
        raise ConfigError("no seeds")
    jobs = parallelism if parallelism is not None else default_jobs()
    if jobs <= 1 or len(seeds) == 1:
        records = [run_trial(cfg, s) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_trial_worker, [(cfg, s) for s in seeds]))
    records.sort(key=lambda r: r.seed)
    return records, summarize(records)


def sweep(cfg, time_values, budget_values, n_values=None, parallelism=None):
    """Grid of experiments; one summary row per cell, ordered by
    (n, t coefficient, b coefficient)."""
    if not time_values or not budget_values:
        raise ConfigError("empty sweep grid")
    t_tag = str(cfg.time_spec).partition(":")[0]
    b_tag = str(cfg.budget_spec).partition(":")[0]
    if t_tag == "hitting" or b_tag == "hitting":
        raise ConfigError("sweeps need formula specs, not hitting specs")
    rows = []
    for n in n_values or [cfg.n]:
        for tc in time_values:
            for bc in budget_values:
                cell = ExperimentConfig(
                    strategy=cfg.strategy,
                    n=n,
                    time_spec=f"{t_tag}:{tc}",
                    budget_spec=f"{b_tag}:{bc}",
                    params=cfg.params,
                    seeds=cfg.seeds,
                    oracle_check=cfg.oracle_check,
                    timeout=cfg.timeout,
                )
                t_res = resolve_spec(cell.time_spec, n)
                b_res = min(resolve_spec(cell.budget_spec, n), t_res)
                records, stats = run_experiment(cell, parallelism)
                rows.append(
                    [
                        cfg.strategy,
                        n,
                        tc,
                        bc,
                        t_res,
                        b_res,
                        stats.trials,
                        stats.successes,
                        f"{stats.rate:.6f}",
                        f"{stats.ci_lo:.6f}",
                        f"{stats.ci_hi:.6f}",
                        f"{stats.mean_purchased:.3f}",
                        stats.max_purchased,
                        f"{stats.mean_observed:.3f}",
                        stats.timeouts,
                    ]
                )
    return rows


def write_sweep_csv(path, rows):
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER_NOTE + "\n")
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        writer.writerows(rows)


def write_trial_csv(path, records, include_timing=False):
    columns = TRIAL_COLUMNS + (["wall_ms"] if include_timing else [])
    with open(path, "w", newline="") as fh:
        fh.write(CSV_HEADER_NOTE + "\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for r in records:
            writer.writerow(r.row(include_timing))


def _parse_value(text):
    text = text.strip()
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def parse_config(path):
    """Read an INI config file.

    [experiment] holds the ExperimentConfig fields (strategy, n, time,
    budget, seeds, oracle_check, timeout); [strategy] holds strategy
    parameters; an optional [sweep] section lists time_values /
    budget_values / n_values (comma-separated) for the sweep verb.
    Returns (ExperimentConfig, sweep dict or None).
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    if "experiment" not in parser:
        raise ConfigError("config needs an [experiment] section")
    exp = parser["experiment"]
    try:
        cfg = ExperimentConfig(
            strategy=exp["strategy"],
            n=exp.getint("n"),
            time_spec=exp["time"],
            budget_spec=exp["budget"],
            seeds=exp.get("seeds", "0:30"),
            oracle_check=exp.get("oracle_check", "off"),
            timeout=exp.getfloat("timeout", DEFAULT_TIMEOUT),
        )
    except (KeyError, ValueError) as err:
        raise ConfigError(f"bad [experiment] section: {err}") from err
    if "strategy" in parser:
        cfg.params = {k: _parse_value(v) for k, v in parser["strategy"].items()}
    sweep_spec = None
    if "sweep" in parser:
        sw = parser["sweep"]
        try:
            sweep_spec = {
                "time_values": [float(x) for x in sw["time_values"].split(",")],
                "budget_values": [float(x) for x in sw["budget_values"].split(",")],
            }
            if "n_values" in sw:
                sweep_spec["n_values"] = [int(x) for x in sw["n_values"].split(",")]
        except (KeyError, ValueError) as err:
            raise ConfigError(f"bad [sweep] section: {err}") from err
    return cfg, sweep_spec
