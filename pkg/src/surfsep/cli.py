"""Command line interface: ``gen``, ``separate``, ``verify`` and ``experiment``.

Exit codes: 0 success, 1 verification failed, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from .embedded import read_rot, to_rot
from .errors import SurfsepError
from .generators import FAMILIES, InstanceSpec

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2

CSV_COLUMNS = (
    "family",
    "size",
    "seed",
    "n",
    "g",
    "k",
    "separator_size",
    "balance",
    "removed_cycles",
    "wall_time",
)

log = logging.getLogger("surfsep")


class InputError(Exception):
    """Bad command line input (exit code 2)."""


def parse_size(text: str, family: str) -> tuple:
    """``"16"`` -> (16, 16) for grids, ``"8x12"`` -> (8, 12); genus-sum takes
    ``g`` or ``gxpatch``; random triangulations take the vertex count."""
    try:
        parts = tuple(int(x) for x in text.lower().split("x"))
    except ValueError as exc:
        raise InputError(f"bad size {text!r}") from exc
    if family in ("planar-grid", "torus-grid") and len(parts) == 1:
        parts = parts * 2
    return parts


def make_spec(family: str, size: str, seed: int | None) -> InstanceSpec:
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if family == "random-triangulation" and seed is None:
        raise InputError("--seed is required for random-triangulation")
    return InstanceSpec(family, parse_size(size, family), seed or 0)


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def run_one(spec: InstanceSpec, verify: bool = False, timing: bool = True) -> dict:
    from .separator import find_separator, verify_separator

    G = spec.build()
    start = time.perf_counter()
    res = find_separator(G)
    elapsed = time.perf_counter() - start
    if verify and not verify_separator(G, res.vertices).passed:
        raise SurfsepError(f"separator for {spec.label()} failed verification")
    ks = [s.k for s in res.trace if s.k]
    return {
        "family": spec.family,
        "size": "x".join(map(str, spec.size)),
        "seed": spec.seed,
        "n": G.n,
        "g": G.genus,
        "k": ks[0] if ks else 0,
        "separator_size": res.size,
        "balance": _fmt(res.balance),
        "removed_cycles": len(res.removed_cycles),
        "wall_time": _fmt(elapsed) if timing else "",
    }


def _run_packed(args):
    return run_one(*args)


def run_experiment(
    specs: Sequence[InstanceSpec], output=None, verify: bool = False, jobs: int = 1, timing: bool = True
) -> str:
    """Run every spec and return (and optionally write) the CSV text.

    Rows keep spec order even when a worker pool is used.
    """
    work = [(s, verify, timing) for s in specs]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_packed, work))
    else:
        rows = [_run_packed(w) for w in work]
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    text = buf.getvalue()
    if output is not None:
        Path(output).write_text(text)
    return text


# -- commands ------------------------------------------------------------------------------


def _load(path: str):
    try:
        return read_rot(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except SurfsepError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(path).write_text(text if text.endswith("\n") else text + "\n")


def cmd_gen(args) -> int:
    spec = make_spec(args.family, args.size, args.seed)
    try:
        G = spec.build()
    except SurfsepError as exc:
        raise InputError(str(exc)) from exc
    _write(to_rot(G), args.output)
    return EXIT_OK


def _parse_k(text: str) -> int | None:
    if text == "auto":
        return None
    try:
        k = int(text)
    except ValueError as exc:
        raise InputError("--k must be 'auto' or an integer") from exc
    if k < 4:
        raise InputError("--k must be at least 4")
    return k


def cmd_separate(args) -> int:
    from .separator import find_separator, trim_separator, verify_separator

    G = _load(args.input)
    if not 0 < args.alpha < 1:
        raise InputError("--alpha must lie in (0, 1)")
    k = _parse_k(args.k)
    dumps = []

    def hook(Gj, outcome):
        from .frame import dump_frame

        dumps.append(json.loads(dump_frame(Gj, outcome.loops, outcome.cycles, outcome.frame, outcome.report)))

    res = find_separator(G, alpha=args.alpha, k=k, frame_hook=hook if args.dump_frame else None)
    if args.trim:
        from .separator import _result

        trimmed = trim_separator(G, res.vertices, args.alpha)
        extra = dict(removed_cycles=res.removed_cycles, trace=res.trace, constants=dict(res.constants))
        extra["constants"]["untrimmed_size"] = res.size
        res = _result(G, trimmed, args.alpha, **extra)
    if args.dump_frame:
        Path(args.dump_frame).write_text(json.dumps(dumps, indent=1, sort_keys=True) + "\n")
    _write(res.to_json(), args.output)
    report = verify_separator(G, res.vertices, args.alpha)
    return EXIT_OK if report.passed else EXIT_FAILED


def _read_separator(path: str) -> list[int]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
        verts = doc["separator"] if isinstance(doc, dict) else doc
        return [int(v) for v in verts]
    except (ValueError, KeyError, TypeError):
        pass
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError as exc:
        raise InputError(f"{path}: not a separator file") from exc


def cmd_verify(args) -> int:
    from .separator import verify_separator

    G = _load(args.input)
    S = _read_separator(args.separator)
    try:
        rep = verify_separator(G, S, args.alpha)
    except SurfsepError as exc:
        raise InputError(str(exc)) from exc
    doc = {
        "passed": rep.passed,
        "alpha": rep.alpha,
        "separator_size": rep.separator_size,
        "total_weight": rep.total_weight,
        "max_component": rep.max_component,
        "components": len(rep.component_weights),
    }
    _write(json.dumps(doc, sort_keys=True), args.output)
    return EXIT_OK if rep.passed else EXIT_FAILED


def cmd_experiment(args) -> int:
    specs = [make_spec(args.family, size, args.seed) for size in args.sizes.split(",") if size]
    if args.family == "random-triangulation":
        specs = [InstanceSpec(s.family, s.size, args.seed + i) for i in range(args.repeat) for s in specs]
    try:
        run_experiment(specs, args.output or None, verify=args.verify, jobs=args.jobs, timing=not args.no_time)
    except SurfsepError as exc:
        log.error("%s", exc)
        return EXIT_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="surfsep", description="Balanced separators for graphs embedded on surfaces.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance in .rot format")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--size", required=True, help="e.g. 16, 8x12; genus-sum: g or gxpatch")
    g.add_argument("--seed", type=int, help="required for random-triangulation")
    g.add_argument("--output", "-o")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("separate", help="compute a separator of a .rot instance")
    s.add_argument("--input", "-i", required=True)
    s.add_argument("--alpha", type=float, default=2 / 3)
    s.add_argument("--k", default="auto", help="'auto' or an integer >= 4")
    s.add_argument("--dump-frame", metavar="PATH", help="write frame graphs as JSON")
    s.add_argument("--trim", action="store_true", help="greedily drop redundant separator vertices")
    s.add_argument("--output", "-o")
    s.set_defaults(func=cmd_separate)

    v = sub.add_parser("verify", help="check a separator against an instance")
    v.add_argument("--input", "-i", required=True)
    v.add_argument("--separator", "-s", required=True, help="result JSON or whitespace-separated vertex ids")
    v.add_argument("--alpha", type=float, default=2 / 3)
    v.add_argument("--output", "-o")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", help="run a family of instances and write CSV")
    e.add_argument("--family", required=True, choices=FAMILIES)
    e.add_argument("--sizes", required=True, help="comma-separated sizes")
    e.add_argument("--seed", type=int, help="required for random-triangulation")
    e.add_argument("--repeat", type=int, default=1, help="seeds per size (random families)")
    e.add_argument("--verify", action="store_true", help="fail if any separator is unbalanced")
    e.add_argument("--jobs", type=int, default=1)
    e.add_argument("--no-time", action="store_true", help="leave wall_time empty (for byte comparisons)")
    e.add_argument("--output", "-o", required=True)
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except InputError as exc:
        print(f"surfsep: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SurfsepError as exc:
        print(f"surfsep: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
