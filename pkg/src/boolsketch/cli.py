"""Command-line entry point: ``boolsketch {gen,learn,sketch,ingest,bench}``.

Parameter precedence is flags, then the ``--config`` JSON file, then the
built-in defaults. A config file may hold flat keys, per-command sections
(``{"learn": {...}}``) or both; section keys win over flat ones.

Exit codes: 0 success, 1 usage or IO error, 2 algorithmic failure. Output
JSON is written with sorted keys; everything that depends on the clock sits
under a top-level ``"timing"`` key so reruns are comparable after dropping it.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import BoolSketchError, LearnFailed, MalformedLine
from .fourier import SparsePolynomial
from .generators import CONDITIONS, planted_polynomial, random_hypergraph, separated_polynomial, tail_polynomial
from .hypergraph import Hypergraph, c_cut_polynomial, cut_oracle, learn_graph
from .ingest import SynthParams, WindowSpec, build_window_hypergraph, parse_log, partition_windows, synth_log
from .learners import LearnConfig, learn_bool, learn_bool_noisy
from .sampling import NoiseSpec, ReplayOracle, SampleBatch, polynomial_oracle

log = logging.getLogger("boolsketch")

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2

POSITIVE = ("n", "s", "d", "m1", "m", "trials", "jobs", "cap", "dt", "context", "users", "zipcodes")
NON_NEGATIVE = ("eps", "nu", "rate", "duration", "retries")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _dump(obj) -> str:
    def default(o):
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return json.dumps(obj, indent=2, sort_keys=True, default=default) + "\n"


def _emit(obj, out):
    text = _dump(obj)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: invalid JSON ({e})") from None


def _split_timing(diag: dict) -> dict:
    return diag.pop("timing", {}) if isinstance(diag, dict) else {}


# -- gen ---------------------------------------------------------------------


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    out = Path(args.out) if args.out else None
    if args.kind == "log":
        params = SynthParams(
            users=args.users,
            zipcodes=args.zipcodes,
            rate=args.rate,
            duration=args.duration,
            dt=args.dt,
            d_max=args.d or 4,
        )
        synth = synth_log(params, seed=args.seed)
        truth = {
            str(k): [[tx, z, list(rx)] for tx, z, rx in bursts] for k, bursts in synth.bursts.items()
        }
        manifest = {"kind": "log", "params": vars(params), "seed": args.seed, "bursts": truth}
        if out is None:
            sys.stdout.write(synth.text)
            return EXIT_OK
        out.mkdir(parents=True, exist_ok=True)
        (out / "messages.log").write_text(synth.text)
        (out / "truth.json").write_text(_dump(manifest))
        return EXIT_OK

    _need(args, "n", "s")
    if args.kind == "poly":
        if args.condition == "separated":
            f = separated_polynomial(rng, args.n, args.s, mu=4 * (args.eps + args.nu))
        else:
            f = planted_polynomial(rng, args.n, args.s, args.condition)
        tail = None
        if args.nu > 0:
            tail = tail_polynomial(rng, args.n, args.tail_terms, args.nu, exclude=f.terms)
        noise = NoiseSpec(args.eps, args.nu, tail)
        planted = {"kind": "poly", "polynomial": f.to_json(), "noise": {"epsilon": args.eps, "nu": args.nu}}
        if tail is not None:
            planted["tail"] = tail.to_json()
        oracle = polynomial_oracle(f, noise, seed=args.seed)
    else:
        _need(args, "d")
        G = random_hypergraph(rng, args.n, args.s, args.d)
        planted = {"kind": "graph", "hypergraph": G.to_json(), "polynomial": c_cut_polynomial(G).to_json()}
        oracle = cut_oracle(G, seed=args.seed)

    if out is None:
        _emit(planted, None)
        return EXIT_OK
    out.mkdir(parents=True, exist_ok=True)
    (out / "planted.json").write_text(_dump(planted))
    if args.m:
        (out / "samples.csv").write_text(oracle.draw_batch(args.m).to_csv())
    return EXIT_OK


def _need(args, *names):
    missing = [f"--{k}" for k in names if getattr(args, k, None) is None]
    if missing:
        raise UsageError(f"{args.command} needs {', '.join(missing)}")


def _read_planted(path):
    obj = _load_json(path)
    kind = obj.get("kind")
    if kind == "poly" or ("terms" in obj and "n" in obj):
        f = SparsePolynomial.from_json(obj.get("polynomial", obj))
        tail = SparsePolynomial.from_json(obj["tail"]) if "tail" in obj else None
        return "poly", f, tail
    if kind == "graph" or "edges" in obj:
        return "graph", Hypergraph.from_json(obj.get("hypergraph", obj)), None
    raise UsageError(f"{path}: not a planted polynomial or hypergraph")


def _read_samples(path) -> SampleBatch:
    with open(path, newline="") as fh:
        try:
            return SampleBatch.from_csv(fh)
        except ValueError as e:
            raise UsageError(f"{path}: {e}") from None


# -- learn -------------------------------------------------------------------


def cmd_learn(args) -> int:
    if args.input is None and args.samples is None:
        raise UsageError("learn needs --input (planted polynomial) or --samples (CSV)")
    _need(args, "s")
    f = tail = None
    if args.input:
        kind, f, tail = _read_planted(args.input)
        if kind != "poly":
            raise UsageError("learn expects a polynomial; use sketch for hypergraphs")
    noisy = args.eps > 0 or args.nu > 0
    noise = NoiseSpec(args.eps, args.nu) if noisy else None
    if args.samples:
        oracle = ReplayOracle(_read_samples(args.samples))
    else:
        oracle = polynomial_oracle(f, NoiseSpec(args.eps, args.nu, tail), seed=args.seed)
    cfg = LearnConfig(s=args.s, m1=args.m1, m=args.m, cap=args.cap, noise=noise, retries=args.retries)
    run = learn_bool_noisy if noisy else learn_bool
    outcome = run(oracle, cfg)
    report = outcome.to_json()
    report["status"] = "ok"
    report["timing"] = _split_timing(report["diagnostics"])
    if f is not None:
        report["planted"] = f.to_json()
        report["exact"] = bool(outcome.v_opt.support == f.support and outcome.v_opt.max_abs_error(f) <= 1e-6)
        report["l2_error"] = outcome.v_opt.l2_distance(f)
    _emit(report, args.out)
    return EXIT_OK


# -- sketch ------------------------------------------------------------------


def cmd_sketch(args) -> int:
    if args.input is None and args.samples is None:
        raise UsageError("sketch needs --input (hypergraph) or --samples (CSV)")
    G = None
    if args.input:
        kind, G, _ = _read_planted(args.input)
        if kind != "graph":
            raise UsageError("sketch expects a hypergraph")
    s = args.s if args.s is not None else (G.s if G is not None else None)
    if s is None:
        raise UsageError("sketch needs --s with --samples")
    oracle = ReplayOracle(_read_samples(args.samples)) if args.samples else cut_oracle(G, seed=args.seed)
    res = learn_graph(oracle, s, args.d, m1=args.m1)
    report = res.to_json()
    report["status"] = "ok"
    report["timing"] = _split_timing(report["diagnostics"])
    if G is not None:
        report["exact"] = bool(res.edges == G and res.polynomial.max_abs_error(c_cut_polynomial(G)) == 0.0)
    _emit(report, args.out)
    return EXIT_OK


# -- ingest ------------------------------------------------------------------


def cmd_ingest(args) -> int:
    if args.log is None:
        raise UsageError("ingest needs --log")
    with open(args.log) as fh:
        records = parse_log(fh)
    if not args.zipcodes:
        raise UsageError("ingest needs --zipcodes")
    zips = frozenset(z.strip() for z in args.zipcodes.split(",") if z.strip())
    windows = sorted(partition_windows(records, args.dt))
    if args.window is not None:
        windows = [int(w) for w in args.window.split(",")]

    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    manifest = {"log": str(args.log), "records": len(records), "windows": []}
    timing = {}
    failed = 0
    for k in windows:
        spec = WindowSpec(args.dt, k, zips, args.context)
        wg = build_window_hypergraph(records, spec)
        entry = {"window": spec.to_json(), "diagnostics": wg.diagnostics}
        if args.learn and wg.graph.s > 0:
            seed = None if args.seed is None else [args.seed, k]
            try:
                res = learn_graph(cut_oracle(wg.graph, seed=seed), wg.graph.s, args.d)
                timing[str(k)] = _split_timing(res.diagnostics)
                entry["recovered"] = bool(res.edges == wg.graph)
                entry["learned_edges"] = sorted(sorted(e) for e in wg.labeled_edges(res.edges))
            except BoolSketchError as e:
                failed += 1
                entry["recovered"] = False
                entry["error"] = str(e)
        if out is not None:
            name = f"window_{k}.json"
            (out / name).write_text(_dump(wg.to_json()))
            entry["file"] = name
        else:
            entry["hypergraph"] = wg.to_json()
        manifest["windows"].append(entry)
    if args.learn:
        manifest["timing"] = timing
    _emit(manifest, out / "manifest.json" if out is not None else None)
    return EXIT_FAILED if failed else EXIT_OK


# -- bench -------------------------------------------------------------------

TRIAL_FIELDS = [
    "point",
    "value",
    "trial",
    "n",
    "s",
    "d",
    "m1",
    "success",
    "error",
    "stage",
    "samples",
    "seconds",
]


def run_trial(task: dict) -> dict:
    """One seeded benchmark trial; module-level so worker processes can run it."""
    seq = np.random.SeedSequence(task["seed"], spawn_key=(task["point"], task["trial"]))
    rng = np.random.default_rng(seq)
    n, s, d, kind = task["n"], task["s"], task["d"], task["kind"]
    m1 = task["m1"]
    row = {k: task.get(k) for k in ("point", "value", "trial", "n", "s", "d", "m1")}
    row.update(success=False, error="", stage="", samples=0, seconds=0.0)
    try:
        if kind == "graph":
            G = random_hypergraph(rng, n, s, d)
            oracle = cut_oracle(G, seed=rng.integers(2**63))
            res = learn_graph(oracle, s, d, m1=m1)
            row["success"] = bool(res.edges == G)
            row["error"] = float(res.polynomial.max_abs_error(c_cut_polynomial(G)))
            row["seconds"] = res.diagnostics["timing"]["algorithm"]
        else:
            f = planted_polynomial(rng, n, s, task["condition"])
            oracle = polynomial_oracle(f, seed=rng.integers(2**63))
            cfg = LearnConfig(s=s, m1=m1, m=task["m"], retries=0)
            t0 = time.perf_counter()
            out = learn_bool(oracle, cfg)
            row["seconds"] = time.perf_counter() - t0
            err = out.v_opt.max_abs_error(f)
            row["success"] = bool(out.v_opt.support == f.support and err <= 1e-6)
            row["error"] = float(err)
        row["samples"] = oracle.queries
    except BoolSketchError as e:
        row["stage"] = e.stage if isinstance(e, LearnFailed) else type(e).__name__
    return row


def summarize(rows: list[dict]) -> list[dict]:
    """Per-point aggregates, recomputable from the trial rows."""
    points: dict = {}
    for r in rows:
        points.setdefault(r["point"], []).append(r)
    out = []
    for p in sorted(points):
        rs = points[p]
        ok = sum(bool(r["success"]) for r in rs)
        secs = [float(r["seconds"]) for r in rs]
        out.append(
            {
                "point": p,
                "value": rs[0]["value"],
                "trials": len(rs),
                "successes": ok,
                "success_rate": ok / len(rs),
                "failure_rate": (len(rs) - ok) / len(rs),
                "mean_samples": float(np.mean([r["samples"] for r in rs])),
                "mean_seconds": float(np.mean(secs)),
            }
        )
    return out


def cmd_bench(args) -> int:
    _need(args, "s")
    if args.values is None:
        raise UsageError("bench needs --values")
    try:
        values = [int(float(v)) for v in args.values.split(",")]
    except ValueError:
        raise UsageError("--values must be a comma-separated list of numbers") from None
    if not values or min(values) < 1:
        raise UsageError("--values must be positive")
    if args.kind == "graph":
        _need(args, "d")
    seed = 0 if args.seed is None else args.seed
    tasks = []
    for i, v in enumerate(values):
        n = v if args.sweep == "n" else args.n
        if n is None:
            raise UsageError("bench --sweep alpha needs --n")
        m1 = v if args.sweep == "alpha" else args.m1
        for t in range(args.trials):
            tasks.append(
                {
                    "seed": seed,
                    "point": i,
                    "value": v,
                    "trial": t,
                    "kind": args.kind,
                    "n": n,
                    "s": args.s,
                    "d": args.d,
                    "m1": m1,
                    "m": args.m,
                    "condition": args.condition,
                }
            )
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run_trial, tasks, chunksize=max(1, len(tasks) // (4 * args.jobs))))
    else:
        rows = [run_trial(t) for t in tasks]
    rows.sort(key=lambda r: (r["point"], r["trial"]))
    summary = {
        "sweep": args.sweep,
        "kind": args.kind,
        "seed": seed,
        "values": values,
        "points": summarize(rows),
    }

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "trials.csv", "w", newline="") as fh:
            _write_rows(fh, rows)
        (out / "summary.json").write_text(_dump(summary))
    else:
        _write_rows(sys.stdout, rows)
        sys.stdout.write(_dump(summary))
    return EXIT_OK


def _write_rows(fh, rows):
    w = csv.DictWriter(fh, fieldnames=TRIAL_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r[k] for k in TRIAL_FIELDS})


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, help="seed for every random draw")
    common.add_argument("--n", type=int, help="number of variables / vertices")
    common.add_argument("--s", type=int, help="sparsity (terms or edges)")
    common.add_argument("--d", type=int, help="maximum edge size")
    common.add_argument("--m1", type=int, help="identification sample count")
    common.add_argument("--m", type=int, help="recovery sample count (gen: samples to write)")
    common.add_argument("--eps", type=float, default=0.0, help="bounded noise level")
    common.add_argument("--nu", type=float, default=0.0, help="L1 mass of the tail")
    common.add_argument("--trials", type=int, default=1)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--out", help="output file (learn, sketch) or directory (gen, ingest, bench)")
    common.add_argument("--config", help="JSON file of default parameters")

    p = _Parser(prog="boolsketch", description="Sparse polynomial learning and hypergraph sketching.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="write a planted instance and samples")
    g.add_argument("--kind", choices=("poly", "graph", "log"), default="poly")
    g.add_argument("--condition", choices=CONDITIONS + ("separated",), default="positive")
    g.add_argument("--tail-terms", type=int, default=8)
    g.add_argument("--users", type=int, default=2000)
    g.add_argument("--zipcodes", type=int, default=8)
    g.add_argument("--rate", type=float, default=20.0, help="mean transmitters per window")
    g.add_argument("--duration", type=float, default=6 * 3600)
    g.add_argument("--dt", type=float, default=600.0)

    lrn = sub.add_parser("learn", parents=[common], help="learn a sparse polynomial")
    lrn.add_argument("--input", help="planted polynomial JSON (samples drawn from it)")
    lrn.add_argument("--samples", help="recorded samples CSV, consumed in order")
    lrn.add_argument("--cap", type=int)
    lrn.add_argument("--retries", type=int, default=1)

    sk = sub.add_parser("sketch", parents=[common], help="recover a hypergraph from c-cut queries")
    sk.add_argument("--input", help="hypergraph JSON (queries drawn from it)")
    sk.add_argument("--samples", help="recorded c-cut queries CSV")

    ing = sub.add_parser("ingest", parents=[common], help="build window hypergraphs from a log")
    ing.add_argument("--log", help="6-column message log")
    ing.add_argument("--dt", type=float, default=600.0)
    ing.add_argument("--zipcodes", help="comma-separated zipcode set")
    ing.add_argument("--context", type=int, default=9, help="windows pooled for the vertex set")
    ing.add_argument("--window", help="comma-separated window indices (default: all)")
    ing.add_argument("--learn", action="store_true", help="also run the sketch learner per window")

    b = sub.add_parser("bench", parents=[common], help="seeded trial sweeps to CSV")
    b.add_argument("--kind", choices=("graph", "poly"), default="graph")
    b.add_argument("--sweep", choices=("alpha", "n"), default="alpha")
    b.add_argument("--values", help="comma-separated sweep values (sample counts or n)")
    b.add_argument("--condition", choices=CONDITIONS, default="positive")
    return p


COMMANDS = {"gen": cmd_gen, "learn": cmd_learn, "sketch": cmd_sketch, "ingest": cmd_ingest, "bench": cmd_bench}


def _apply_config(parser, argv):
    """Re-parse with config-file values installed as subparser defaults."""
    args = parser.parse_args(argv)
    if not args.config:
        return args
    cfg = _load_json(args.config)
    if not isinstance(cfg, dict):
        raise UsageError(f"{args.config}: expected a JSON object")
    flat = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    flat.update(cfg.get(args.command, {}))
    flat = {k.replace("-", "_"): v for k, v in flat.items()}
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in subparser._actions}
    unknown = sorted(set(flat) - known)
    if unknown:
        raise UsageError(f"{args.config}: unknown keys {unknown}")
    subparser.set_defaults(**flat)
    return parser.parse_args(argv)


def _validate(args):
    for k in POSITIVE:
        v = getattr(args, k, None)
        if isinstance(v, (int, float)) and not v > 0:
            raise UsageError(f"--{k} must be positive")
    for k in NON_NEGATIVE:
        v = getattr(args, k, None)
        if isinstance(v, (int, float)) and v < 0:
            raise UsageError(f"--{k} must be non-negative")


def main(argv=None) -> int:
    level = os.environ.get("BOOLSKETCH_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        _validate(args)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"boolsketch: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, MalformedLine) as e:
        print(f"boolsketch: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BoolSketchError as e:
        stage = e.stage if isinstance(e, LearnFailed) else type(e).__name__
        print(f"boolsketch: {args.command} failed: {e}", file=sys.stderr)
        _emit({"status": "failed", "stage": stage, "error": str(e)}, getattr(args, "out", None) if args.command in ("learn", "sketch") else None)
        return EXIT_FAILED
    except ValueError as e:
        print(f"boolsketch: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
