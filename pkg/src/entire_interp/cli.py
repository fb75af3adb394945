"""Command-line front end.

Exit codes: 0 success, 1 I/O or configuration error, 2 construction error
(or, for eval/invert, a point outside the certified data), 3 a failed
verification.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .exact_algebra import ParseError, format_rational, parse_gaussian, parse_rational
from .limit_eval import NotHandled, OutsideDisk, eval_limit, inverse_lookup
from .records import dumps, load_config, load_records, read_json, records_document, write_json
from .sparse_system import (
    SystemConfig,
    build_equiv_graph,
    build_finite_system,
    check_component_bounds,
    check_sparseness,
    check_upper_lower_sets,
)
from .stage_builder import ConfigError, ConstructionError, run
from .verifier import verify_document

OUTDIR_ENV = "ENTIRE_INTERP_OUTDIR"
CSV_HEADER = ["stage", "invariant", "status", "witness"]


class UsageError(Exception):
    pass


def _out_path(p: str) -> Path:
    """Relative output paths land under $ENTIRE_INTERP_OUTDIR when it is set."""
    path = Path(p)
    base = os.environ.get(OUTDIR_ENV)
    if base and not path.is_absolute():
        return Path(base) / path
    return path


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _read_doc(path: str):
    try:
        return read_json(path)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def config_digest(config_json: dict) -> str:
    return hashlib.sha256(dumps(config_json).encode("ascii")).hexdigest()


def manifest(config_json: dict, paths: dict) -> dict:
    return {
        "configDigest": config_digest(config_json),
        "version": __version__,
        "partition": config_json["partition"],
        "growth": config_json["growth"],
        "stages": config_json["stages"],
        "radius": config_json["radius"],
        "paths": paths,
    }


def _manifest_path(out: Path) -> Path:
    stem = out.name[:-5] if out.name.endswith(".json") else out.name
    return out.with_name(stem + ".manifest.json")


def cmd_construct(args) -> int:
    cfg = load_config(args.config)
    if args.stages is not None:
        cfg = cfg.with_stages(args.stages)
    if args.radius is not None:
        cfg = type(cfg)(cfg.x_p, cfg.y_p, cfg.w, cfg.stages, cfg.partition, cfg.growth,
                        parse_rational(args.radius, "--radius"))
    try:
        state = run(cfg)
    except ConstructionError as exc:
        _err(f"construction failed: {exc}")
        return 2
    out = _out_path(args.out)
    doc = records_document(state)
    write_json(out, doc)
    man = _manifest_path(out)
    write_json(man, manifest(doc["config"], {"records": str(out), "manifest": str(man)}))
    print(f"wrote {len(state.records)} stages to {out}")
    return 0


def _report_path(records_path: str, out) -> Path:
    if out:
        return _out_path(out)
    p = Path(records_path)
    stem = p.name[:-5] if p.name.endswith(".json") else p.name
    return _out_path(str(p.with_name(stem + ".report.json")))


def cmd_verify(args) -> int:
    doc = _read_doc(args.records)
    radius = parse_rational(args.radius, "--radius") if args.radius is not None else None
    report = verify_document(doc, radius=radius)
    out = _report_path(args.records, args.out)
    write_json(out, report.to_json())
    for n, inv, witness in report.failures():
        print(f"FAIL stage {n} invariant {inv}: {witness}", file=sys.stderr)
    for t in report.theorem:
        if not t.passed:
            print(f"FAIL conclusion {t.invariant}: {t.witness}", file=sys.stderr)
    if not report.base.passed:
        print(f"FAIL base: {report.base.witness}", file=sys.stderr)
    bad_cauchy = [c for c in report.cauchy if not c.passed]
    for c in bad_cauchy[:5]:
        print(f"FAIL cauchy {c.label}: {c.witness}", file=sys.stderr)
    status = "PASS" if report.passed else "FAIL"
    print(f"{status}: {len(report.stages)} stages, report at {out}")
    return 0 if report.passed else 3


def cmd_eval(args) -> int:
    cfg, _, stages = load_records(_read_doc(args.records))
    z = parse_gaussian(args.z, "--z")
    eps = parse_rational(args.eps, "--eps") if args.eps is not None else None
    radius = parse_rational(args.radius, "--radius") if args.radius is not None else None
    try:
        box = eval_limit(cfg, stages, z, eps, upto=args.stages, radius=radius)
    except OutsideDisk as exc:
        _err(str(exc))
        return 2
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(dumps(box.to_json(args.digits)))
    return 0


def cmd_invert(args) -> int:
    cfg, _, stages = load_records(_read_doc(args.records))
    w = parse_rational(args.w, "--w")
    try:
        x = inverse_lookup(cfg, stages, w, upto=args.stages)
    except NotHandled as exc:
        _err(str(exc))
        return 2
    print(format_rational(x))
    return 0


def _write_csv(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    path.write_text(buf.getvalue())


def cmd_sparse(args) -> int:
    sys_cfg = SystemConfig.from_json(_read_doc(args.config))
    outdir = _out_path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        sample = build_finite_system(sys_cfg, workers=args.workers)
    except ConstructionError as exc:
        _err(f"construction failed: {exc}")
        return 2
    for a, state in enumerate(sample.states):
        write_json(outdir / f"construction_{a}.json", records_document(state))
    sparse = check_sparseness(sample)
    graph = build_equiv_graph(sample)
    points = [check_upper_lower_sets(graph, sample, z) for z in graph.universe]
    bounds = check_component_bounds(graph)
    ok = sparse.passed and all(p.passed for p in points) and not bounds
    write_json(outdir / "sparseness.json", sparse.to_json())
    _write_csv(outdir / "sparseness.csv", sparse.csv_rows())
    comp = graph.to_json()
    comp["pointChecks"] = [
        {"z": format_rational(p.z), "status": "PASS" if p.passed else "FAIL", "failures": p.failures,
         "up": [format_rational(v) for v in p.up], "down": [format_rational(u) for u in p.down]}
        for p in points
    ]
    comp["componentBoundFailures"] = bounds
    comp["status"] = "PASS" if ok else "FAIL"
    write_json(outdir / "components.json", comp)
    print(f"{'PASS' if ok else 'FAIL'}: {len(sample.states)} constructions, "
          f"{len(graph.universe)} universe points, {len(graph.components())} components")
    return 0 if ok else 3


def cmd_report(args) -> int:
    rows = [CSV_HEADER]
    for path in args.inputs:
        doc = _read_doc(path)
        if isinstance(doc, dict) and "stages" in doc and "config" in doc:
            doc = verify_document(doc).to_json()
        if not isinstance(doc, dict) or "stages" not in doc:
            raise ConfigError(f"{path}: neither a records document nor a verification report")
        for st in doc["stages"]:
            for inv in st["invariants"]:
                rows.append([st["n"], inv["invariant"], inv["status"], inv["witness"]])
    out = _out_path(args.out)
    _write_csv(out, rows)
    print(f"wrote {len(rows) - 1} rows to {out}")
    return 0


def random_config(seed: int, size: int = 6, bound: int = 50, stages=None) -> dict:
    """A reproducible config: P and `size` distinct w with |num|, den <= bound."""
    rng = random.Random(seed)

    def draw():
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))

    ws: list = []
    while len(ws) < size:
        v = draw()
        if v not in ws:
            ws.append(v)
    return {
        "point": [format_rational(draw()), format_rational(draw())],
        "w": [format_rational(v) for v in ws],
        "partition": "dyadic-valuation",
        "growth": {"kind": "exp", "taylorTerms": 8},
        "stages": 2 * size if stages is None else stages,
        "radius": "2/1",
    }


def cmd_random_config(args) -> int:
    cfg = random_config(args.seed, args.size, stages=args.stages)
    out = _out_path(args.out)
    write_json(out, cfg)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="entire-interp",
        description="Exact staged construction of increasing entire interpolants, with certificates.",
        epilog=f"Relative --out paths are placed under ${OUTDIR_ENV} when that variable is set.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("construct", help="run the staged construction")
    s.add_argument("--config", required=True, help="run configuration (JSON)")
    s.add_argument("--out", default="records.json", help="records file to write (manifest goes alongside)")
    s.add_argument("--stages", type=int, help="override the stage count")
    s.add_argument("--radius", help="override the certified disk radius r")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("verify", help="re-check every stage invariant and the limit conclusions")
    s.add_argument("records")
    s.add_argument("--out", help="report path (default: <records>.report.json)")
    s.add_argument("--radius", help="disk radius for the Cauchy grid (default: from config)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("eval", help="certified box around the limit value f(z)")
    s.add_argument("records")
    s.add_argument("--z", required=True, help="point, e.g. 1/2 or 1/2+1/3i")
    s.add_argument("--eps", help="requested accuracy; reports how many more stages it needs")
    s.add_argument("--stages", type=int, help="use only the first N stages")
    s.add_argument("--radius", help="certified disk radius (default: from config)")
    s.add_argument("--digits", type=int, default=12, help="digits in the (non-certified) decimal approximation")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("invert", help="exact preimage of a handled value")
    s.add_argument("records")
    s.add_argument("--w", required=True)
    s.add_argument("--stages", type=int, help="use only the first N stages")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("sparse-system", help="build and check a finite family of constructions")
    s.add_argument("--config", required=True, help="system configuration (JSON)")
    s.add_argument("--out", default="system", help="output directory")
    s.add_argument("--workers", type=int, default=None, help="parallel constructions (default: CPU count)")
    s.set_defaults(func=cmd_sparse)

    s = sub.add_parser("report", help="flatten verification results to CSV (stage, invariant, status, witness)")
    s.add_argument("inputs", nargs="+", help="verification reports or records files")
    s.add_argument("--out", default="report.csv")
    s.set_defaults(func=cmd_report)

    s = sub.add_parser("random-config", help="write a reproducible random run configuration")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--size", type=int, default=6, help="number of w entries")
    s.add_argument("--stages", type=int)
    s.add_argument("--out", default="config.json")
    s.set_defaults(func=cmd_random_config)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, UsageError) as exc:
        _err(str(exc))
        return 1
    except OSError as exc:
        _err(f"{exc.filename or ''}: {exc.strerror or exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
