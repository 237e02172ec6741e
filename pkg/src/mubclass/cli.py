"""Command-line front end.

JSON outputs have the shape {"meta": RunRecord, "result": ...}. The digest
in the record is the SHA-256 of the canonical JSON of ``result`` alone, so
it does not depend on wall time or thread count.

CSV outputs:
  table       generator,M_0,...,M_d   (one row per generator)
  complexity  d,s,log10_t_u,log10_t_s,log10_t_r

Exit codes: 0 success, 2 precondition error, 3 resource-guard refusal.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bounds import curves_to_csv, emit_complexity_curves, odd_primes, theorem1_bound
from .entropy_lb import EntropyConfig, entropy_partition
from .mub_core import PRIME_POWER_CAP, Dimension, DimensionError, build_family
from .orbits import ENUMERATION_CAP, ResourceGuardError, classify_all
from .prime_power import (SearchCapExceeded, cached_permutations, extended_table, family_for,
                          is_group)
from .transform_table import ClosureViolation, build_table_analytic

SCHEMA_VERSION = 1
EXIT_PRECONDITION = 2
EXIT_RESOURCE = 3

def digest(result) -> str:
    blob = json.dumps(result, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def run_record(command: str, params: dict, result, seed=None, wall: float = 0.0) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "command": command,
        "parameters": params,
        "version": __version__,
        "seed": seed,
        "wall_time_s": round(wall, 6),
        "digest": digest(result),
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(command, params, result, seed, t0, out, **extra_meta) -> None:
    meta = run_record(command, params, result, seed, time.perf_counter() - t0)
    meta.update(extra_meta)
    payload = {"meta": meta, "result": result}
    _emit(json.dumps(payload, indent=2), out)


def _dimension(args) -> Dimension:
    if args.d is not None:
        if args.p is not None or args.n is not None:
            raise DimensionError("give either --d or --p/--n, not both")
        return Dimension.parse(args.d, args.cap)
    if args.p is None:
        raise DimensionError("a dimension is required: --d D or --p P --n N")
    n = args.n if args.n is not None else 1
    if n == 1:
        return Dimension.odd_prime(args.p)
    return Dimension.prime_power(args.p, n, args.cap)


def _table_for(dim: Dimension, args):
    if dim.kind == "odd-prime":
        return build_table_analytic(dim.d)
    family = family_for(dim.p, dim.n, args.cap)
    perms, _ = cached_permutations(family, args.cache_dir)
    return extended_table(family, perms)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("MUBCLASS_THREADS")
    return int(env) if env else (os.cpu_count() or 1)


# ---------------------------------------------------------------- commands

def cmd_table(args) -> int:
    t0 = time.perf_counter()
    dim = _dimension(args)
    table = _table_for(dim, args)
    if args.format == "csv":
        _emit(table.to_csv(), args.out)
    else:
        _emit_json("table", {"d": dim.d}, table.to_dict(), None, t0, args.out)
    return 0


def cmd_classify(args) -> int:
    t0 = time.perf_counter()
    dim = _dimension(args)
    table = _table_for(dim, args)
    part = classify_all(dim.d, args.k, table, threads=_threads(args),
                        keep_members=args.members, member_limit=args.member_limit,
                        cap=args.max_subsets)
    result = part.to_dict(with_members=args.members)
    result["generators"] = len(table)
    _emit_json("classify", {"d": dim.d, "k": args.k, "members": args.members},
               result, None, t0, args.out)
    return 0


def cmd_bound(args) -> int:
    t0 = time.perf_counter()
    value = theorem1_bound(args.d, args.k)
    if args.json:
        _emit_json("bound", {"d": args.d, "k": args.k}, {"bound": value}, None, t0, args.out)
    else:
        _emit(str(value), args.out)
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def cmd_complexity(args) -> int:
    t0 = time.perf_counter()
    rows = emit_complexity_curves(odd_primes(args.dmin, args.dmax), args.s)
    if args.format == "csv":
        _emit(curves_to_csv(rows), args.out)
    else:
        result = {"columns": ["d", "s", "log10_t_u", "log10_t_s", "log10_t_r"],
                  "rows": [[d, s, round(a, 6), round(b, 6), round(c, 6)] for d, s, a, b, c in rows]}
        _emit_json("complexity", {"dmin": args.dmin, "dmax": args.dmax, "s": args.s},
                   result, None, t0, args.out)
    return 0


def _load_subsets(path: str) -> list[list[int]]:
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data.get("result", data)
        data = data.get("representatives", data.get("subsets"))
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a list of subsets or a classify output")
    return data


def cmd_entropy(args) -> int:
    t0 = time.perf_counter()
    dim = _dimension(args)
    family = build_family(dim.d, args.cap)
    cfg = EntropyConfig(starts=args.starts, seed=args.seed, max_iters=args.max_iters,
                        threads=_threads(args))
    subsets = _load_subsets(args.subsets) if args.subsets else None
    report = entropy_partition(dim.d, args.k, family, gap=args.gap, cfg=cfg, subsets=subsets)
    _emit_json("entropy", {"d": dim.d, "k": args.k, "gap": args.gap, "starts": args.starts,
                           "subsets": args.subsets},
               report.to_dict(), args.seed, t0, args.out)
    return 0


def cmd_perms(args) -> int:
    t0 = time.perf_counter()
    n = args.n if args.n is not None else 1
    if n == 1:
        Dimension.odd_prime(args.p)
    else:
        Dimension.prime_power(args.p, n, args.cap)
    family = family_for(args.p, n, args.cap)
    res, hit = cached_permutations(family, args.cache_dir,
                                   structured=True if args.structured else None)
    result = {
        "p": args.p, "n": n, "d": family.d,
        "order": res.order,
        "mode": res.mode,
        "candidates": res.candidates,
        "closed_under_composition": is_group(res.perms),
        "generators": [list(g.perm) for g in res.generators],
        "induced_images": [list(g.induced_images) for g in res.generators],
    }
    if n == 1:
        result["notice"] = ("prime dimension: permutations do not change the classification;"
                            " the extended set reduces to the plain finite set")
    _emit_json("perms", {"p": args.p, "n": n}, result, None, t0, args.out, cache_hit=hit)
    return 0


BENCH_CASES = [(5, 3), (7, 4), (11, 6), (13, 7), (17, 8), (19, 9)]


def cmd_bench(args) -> int:
    t0 = time.perf_counter()
    cases = []
    for d, k in BENCH_CASES:
        if d > args.dmax:
            continue
        t = time.perf_counter()
        part = classify_all(d, k, build_table_analytic(d), threads=_threads(args))
        cases.append({"d": d, "k": k, "classes": part.n_classes,
                      "seconds": round(time.perf_counter() - t, 4)})
    # timings vary run to run, so the digest covers class counts only
    result = {"cases": [{k: v for k, v in c.items() if k != "seconds"} for c in cases]}
    payload = {"meta": run_record("bench", {"dmax": args.dmax}, result, None,
                                  time.perf_counter() - t0),
               "result": {"cases": cases}}
    _emit(json.dumps(payload, indent=2), args.out)
    return 0


# ---------------------------------------------------------------- parser

def _add_dim(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, help="dimension (odd prime or prime power)")
    p.add_argument("--p", type=int, help="prime p for d = p^n")
    p.add_argument("--n", type=int, help="exponent n for d = p^n")
    p.add_argument("--cap", type=int, default=PRIME_POWER_CAP,
                   help="largest prime-power dimension accepted (default %(default)s)")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--cache-dir", default=None,
                   help="permutation cache directory (default $MUBCLASS_CACHE or ~/.cache/mubclass)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mubclass", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("table", help="transformation table (CSV columns: generator,M_0..M_d)")
    _add_dim(p)
    _add_common(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("classify", help="partition all k-subsets into equivalence classes")
    _add_dim(p)
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default $MUBCLASS_THREADS or CPU count)")
    p.add_argument("--members", action="store_true", help="include member lists")
    p.add_argument("--member-limit", type=int, default=10**6,
                   help="suppress member lists above this many subsets")
    p.add_argument("--max-subsets", type=int, default=ENUMERATION_CAP,
                   help="refuse (exit 3) when C(d+1,k) exceeds this (default 2^31)")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bound", help="closed-form upper bound on the number of classes")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("complexity", help="cost-model curves, k = (d+1)/2 "
                       "(CSV columns: d,s,log10_t_u,log10_t_s,log10_t_r)")
    p.add_argument("--dmin", type=int, default=3)
    p.add_argument("--dmax", type=int, default=37)
    p.add_argument("--s", type=_int_list, default=[2, 5, 10], help="sampling densities, e.g. 2,5,10")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_complexity)

    p = sub.add_parser("entropy", help="minimal entropy sums and their clustering")
    _add_dim(p)
    _add_common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--gap", type=float, default=0.05, help="cluster gap in bits")
    p.add_argument("--starts", type=int, default=64)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--subsets", help="JSON list of subsets (or a classify output) to evaluate")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("perms", help="completeness-preserving column permutations")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--cap", type=int, default=PRIME_POWER_CAP)
    p.add_argument("--structured", action="store_true", help="affine candidates only")
    _add_common(p)
    p.set_defaults(func=cmd_perms)

    p = sub.add_parser("bench", help="time a fixed set of classifications")
    p.add_argument("--dmax", type=int, default=19)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ResourceGuardError, SearchCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (DimensionError, ValueError, ClosureViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
