"""Command-line entry point for searches, block verification, and builds.

Every command prints one JSON report with a stable schema; the `runtime`
block (wall time, worker count) is the only part allowed to differ between
reruns of the same flags, so byte comparison after dropping it checks
determinism.  Exit codes: 0 success, 1 error, 2 search finished without a
witness.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from fractions import Fraction

from . import fixtures
from .builder import build_construction, verify_construction
from .chi_search import ChiSearchConfig
from .chi_search import search as chi_search
from .clump import (
    ClumpMatrix,
    block_ratio,
    block_violations,
    is_feasible_block,
    parse_matrix,
)
from .graph6 import decode_graph6, encode_graph6
from .layered import read_edge_list, write_edge_list
from .omega_search import OmegaSearchConfig, profile_by_name
from .omega_search import search as omega_search

SCHEMA = "1"


def _frac(f: Fraction | None) -> str | None:
    if f is None:
        return None
    return f"{f.numerator}/{f.denominator}"


def _report(command: str, config: dict, result: dict, conditional: list[str],
            t0: float, workers: int) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "config": config,
        "result": result,
        "conditional_flags": conditional,
        "runtime": {"wall_time": round(time.time() - t0, 3), "workers": workers},
    }


def emit(report: dict, stream=None) -> None:
    stream = stream or sys.stdout
    json.dump(report, stream, indent=2, sort_keys=True)
    stream.write("\n")


def _default_workers() -> int:
    return os.cpu_count() or 1


# -- commands ----------------------------------------------------------------


def cmd_search_chi(args) -> int:
    t0 = time.time()
    cfg = ChiSearchConfig(
        delta=args.delta,
        max_period=args.max_period,
        max_column_sum=args.max_column_sum,
        max_class_size=args.max_class_size,
        assume_missing_color=args.assume_missing_color,
        require_singleton_layer=args.require_singleton_layer,
    )
    res = chi_search(cfg, workers=args.threads)
    config = {
        "delta": cfg.delta,
        "max_period": cfg.max_period,
        "max_column_sum": cfg.max_column_sum,
        "max_class_size": cfg.max_class_size,
        "assume_missing_color": cfg.assume_missing_color,
        "require_singleton_layer": cfg.require_singleton_layer,
        "chi": cfg.chi,
    }
    result = {
        "best_ratio": _frac(res.best_ratio),
        "period": res.period,
        "witness_matrix": [list(col) for col in res.witness.columns] if res.witness else None,
        "states_expanded": res.states_expanded,
        "result_scope": f"optimal among repetition lengths <= {cfg.max_period}",
    }
    report = _report("search-chi", config, result, cfg.conditional_flags(), t0, args.threads)
    emit(report)
    return 0 if res.best_ratio is not None else 2


def cmd_search_omega(args) -> int:
    t0 = time.time()
    if args.delta not in (4, 5, 6):
        raise SystemExit("search-omega supports delta in {4, 5, 6}")
    profile = profile_by_name(args.profile)
    cfg = OmegaSearchConfig(
        delta=args.delta,
        max_period=args.max_period,
        max_layer_size=args.max_layer_size,
        profile=profile,
    )
    res = omega_search(cfg, workers=args.threads)
    config = {
        "delta": cfg.delta,
        "max_period": cfg.max_period,
        "max_layer_size": cfg.max_layer_size,
        "profile": args.profile,
    }
    witness = None
    if res.witness is not None:
        witness = {
            "graph6": encode_graph6(res.witness.rows),
            "layer_sizes": res.witness.layer_sizes(),
        }
    result = {
        "best_ratio": _frac(res.best_ratio),
        "period": res.period,
        "witness": witness,
        "states_expanded": res.states_expanded,
        "result_scope": f"optimal among repetition lengths <= {cfg.max_period}",
    }
    report = _report("search-omega", config, result, profile.names(), t0, args.threads)
    emit(report)
    if res.witness is not None and args.out:
        with open(args.out, "w") as fh:
            fh.write(witness["graph6"] + "\n")
            fh.write("layers=" + ",".join(map(str, witness["layer_sizes"])) + "\n")
    return 0 if res.best_ratio is not None else 2


def cmd_verify_block(args) -> int:
    t0 = time.time()
    with open(args.block) as fh:
        matrix = parse_matrix(fh.read())
    feasible = is_feasible_block(matrix, args.delta)
    violations = block_violations(matrix, args.delta)
    result = {
        "feasible": feasible,
        "mode": matrix.mode,
        "columns": matrix.ncols,
        "order": matrix.total(),
        "ratio": _frac(block_ratio(matrix)) if matrix.mode == "block" else None,
        "violations": [
            {"kind": kind, "column": col, "colour": colour, "degree": value}
            for kind, col, colour, value in violations[:20]
        ],
    }
    report = _report("verify-block", {"block": args.block, "delta": args.delta},
                     result, [], t0, 1)
    emit(report)
    return 0 if feasible else 1


def cmd_build(args) -> int:
    t0 = time.time()
    with open(args.block) as fh:
        matrix = parse_matrix(fh.read())
    lg, colours = build_construction(matrix, args.reps, args.delta,
                                     cap=args.cap, mode=args.mode)
    if args.out:
        if args.format == "graph6":
            with open(args.out, "w") as fh:
                fh.write(encode_graph6(lg.rows) + "\n")
                fh.write("layers=" + ",".join(str(len(l)) for l in lg.layers) + "\n")
                if colours is not None:
                    fh.write("colors=" + ",".join(map(str, colours)) + "\n")
        else:
            write_edge_list(lg.rows, args.out)
            with open(args.out + ".layers", "w") as fh:
                fh.write(",".join(str(len(l)) for l in lg.layers) + "\n")
            if colours is not None:
                with open(args.out + ".colors", "w") as fh:
                    fh.write(",".join(map(str, colours)) + "\n")
    result = {
        "n": lg.n,
        "layers": len(lg.layers),
        "layer_sizes": lg.layer_sizes(),
        "capped": args.cap,
        "out": args.out,
        "format": args.format,
    }
    report = _report("build", {
        "block": args.block, "reps": args.reps, "delta": args.delta,
        "cap": args.cap, "mode": args.mode,
    }, result, [], t0, 1)
    emit(report)
    return 0


def _read_graph_file(path: str) -> tuple[list[int], list[int] | None]:
    if path.endswith(".edges") or path.endswith(".edgelist"):
        return read_edge_list(path), None
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    _n, rows = decode_graph6(lines[0])
    colours = None
    for ln in lines[1:]:
        if ln.startswith("colors="):
            colours = [int(tok) for tok in ln[len("colors="):].split(",")]
    return rows, colours


def cmd_verify_graph(args) -> int:
    t0 = time.time()
    rows, colours = _read_graph_file(args.graph)
    if args.colors:
        with open(args.colors) as fh:
            colours = [int(tok) for tok in fh.read().strip().split(",")]
    rep = verify_construction(rows, args.delta, args.mode, colours=colours,
                              workers=args.threads)
    report = _report("verify", {
        "graph": args.graph, "delta": args.delta, "mode": args.mode,
    }, rep.as_dict(), [], t0, args.threads)
    emit(report)
    return 0 if rep.ok else 1


def cmd_selftest(args) -> int:
    t0 = time.time()
    from .selftest import run_selftest

    outcome = run_selftest(seed=args.seed)
    report = _report("selftest", {"seed": args.seed}, outcome, [], t0, 1)
    emit(report)
    return 0 if outcome["ok"] else 1


def _expected_table() -> dict:
    return json.loads(fixtures.fixture_text("table1_expected.json"))


def cmd_reproduce_table1(args) -> int:
    t0 = time.time()
    expected = _expected_table()
    got: dict = {"blocks": {}, "chi": {}, "omega": {}}
    for name in fixtures.BLOCK_NAMES:
        matrix = fixtures.load_block(name)
        delta = fixtures.BLOCK_DELTA[name]
        ok = is_feasible_block(matrix, delta)
        got["blocks"][name] = _frac(block_ratio(matrix)) if ok else "infeasible"
    chi_cells = {
        4: ChiSearchConfig(delta=4, max_period=20, max_column_sum=8),
        5: ChiSearchConfig(delta=5, max_period=20),
        6: ChiSearchConfig(delta=6, max_period=20),
        7: ChiSearchConfig(delta=7, max_period=40, max_column_sum=6),
        8: ChiSearchConfig(delta=8, max_period=40, max_column_sum=7),
    }
    if args.include_slow:
        chi_cells[16] = ChiSearchConfig(
            delta=16, max_period=100, max_column_sum=23,
            assume_missing_color=True, require_singleton_layer=True,
        )
    for delta, cfg in chi_cells.items():
        res = chi_search(cfg, workers=args.threads)
        got["chi"][str(delta)] = _frac(res.best_ratio)
    omega_cells = {4: OmegaSearchConfig(delta=4, max_period=12, max_layer_size=8)}
    if args.include_slow:
        omega_cells[5] = OmegaSearchConfig(delta=5, max_period=14, max_layer_size=10,
                                           profile=profile_by_name("delta5"))
        omega_cells[6] = OmegaSearchConfig(delta=6, max_period=18,
                                           profile=profile_by_name("delta6"))
    for delta, cfg in omega_cells.items():
        res = omega_search(cfg, workers=args.threads)
        got["omega"][str(delta)] = _frac(res.best_ratio)
    diffs = []
    for section, cells in got.items():
        for key, val in cells.items():
            want = expected.get(section, {}).get(key)
            if want is not None and want != val:
                diffs.append({"section": section, "cell": key, "expected": want, "got": val})
    result = {"cells": got, "diffs": diffs, "match": not diffs}
    report = _report("reproduce-table1", {"include_slow": args.include_slow},
                     result, [], t0, args.threads)
    emit(report)
    return 0 if not diffs else 1


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="diamsearch", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search-chi", help="best ratio over 3-colourable layer structures")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--max-period", type=int, required=True)
    p.add_argument("--max-column-sum", type=int, default=None)
    p.add_argument("--max-class-size", type=int, default=None)
    p.add_argument("--assume-missing-color", action="store_true")
    p.add_argument("--require-singleton-layer", action="store_true")
    p.add_argument("--threads", type=int, default=_default_workers())
    p.set_defaults(func=cmd_search_chi)

    p = sub.add_parser("search-omega", help="best ratio over K4-free layer structures")
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--max-period", type=int, required=True)
    p.add_argument("--max-layer-size", type=int, default=None)
    p.add_argument("--profile", default="none", choices=["none", "delta5", "delta6"])
    p.add_argument("--threads", type=int, default=_default_workers())
    p.add_argument("--out", default=None, help="write witness graph6 + layer sidecar")
    p.set_defaults(func=cmd_search_omega)

    p = sub.add_parser("verify-block", help="check a block file and report its ratio")
    p.add_argument("--block", required=True)
    p.add_argument("--delta", type=int, required=True)
    p.set_defaults(func=cmd_verify_block)

    p = sub.add_parser("build", help="expand a block into an explicit graph")
    p.add_argument("--block", required=True)
    p.add_argument("--reps", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--cap", action="store_true", help="attach end caps")
    p.add_argument("--mode", default="chi", choices=["chi", "omega"])
    p.add_argument("--format", default="graph6", choices=["graph6", "edgelist"])
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="verify a built graph file")
    p.add_argument("--graph", required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--mode", default="omega", choices=["chi", "omega"])
    p.add_argument("--colors", default=None, help="comma-separated colour file")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_verify_graph)

    p = sub.add_parser("selftest", help="run the brute-force oracle agreement suite")
    p.add_argument("--seed", type=int, default=12345)
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("reproduce-table1", help="recompute the known ratio table and diff")
    p.add_argument("--include-slow", action="store_true")
    p.add_argument("--threads", type=int, default=_default_workers())
    p.set_defaults(func=cmd_reproduce_table1)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
