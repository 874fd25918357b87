"""Command-line interface (entry point ``kpdix``)."""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import Config
from .orbits import ConstructionFailure, InvalidPartition, OrbitSpec, normalize_group, validate
from .reports import (
    Session,
    VerificationReport,
    run_casimir,
    run_form,
    run_hilbert,
    run_koszul,
    run_model_build,
    run_oracle,
    run_orbits_info,
    run_orbits_list,
    run_verify_dixmier,
    run_verify_kp,
)

EXIT_OK, EXIT_MISMATCH, EXIT_INVALID = 0, 1, 2

# (group, n, partition, kp window, dixmier window)
DESK_CATALOG = (
    ("GL", 2, (2,), 3, 3),
    ("GL", 3, (2, 1), 3, 2),
    ("GL", 3, (3,), 3, 2),
    ("Sp", 2, (2,), 3, 3),
    ("O", 3, (3,), 3, 2),
    ("Sp", 4, (2, 2), 2, 2),
    ("O", 4, (2, 2), 2, 2),
)


class InputError(ValueError):
    pass


def parse_partition(text: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise InputError(f"bad partition {text!r}") from None
    if not parts:
        raise InputError("empty partition")
    return parts


def _spec_from(args) -> OrbitSpec:
    if args.group is None or args.n is None or args.partition is None:
        raise InputError("--group, --n and --partition are required")
    return validate(args.group, args.n, parse_partition(args.partition))


def _common(p: argparse.ArgumentParser, spec=True, window=True):
    if spec:
        p.add_argument("--group", type=str)
        p.add_argument("--n", type=int)
        p.add_argument("--partition", type=str)
    if window:
        p.add_argument("--dmax", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--json", metavar="PATH")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--stable", action="store_true", help="omit timing and cache statistics")
    p.add_argument("--config", metavar="PATH")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpdix", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    orbits = sub.add_parser("orbits").add_subparsers(dest="action", required=True)
    p = orbits.add_parser("list")
    _common(p, spec=False, window=False)
    p.add_argument("--group", type=str, required=True)
    p.add_argument("--n", type=int, required=True)
    _common(orbits.add_parser("info"), window=False)

    model = sub.add_parser("model").add_subparsers(dest="action", required=True)
    _common(model.add_parser("build"), window=False)

    _common(sub.add_parser("hilbert"))
    sub.choices["hilbert"].add_argument("--oracle", action="store_true")
    p = sub.add_parser("koszul")
    _common(p)
    p.add_argument("--tmax", type=int)

    oracle = sub.add_parser("oracle").add_subparsers(dest="action", required=True)
    _common(oracle.add_parser("dim"))

    verify = sub.add_parser("verify").add_subparsers(dest="action", required=True)
    _common(verify.add_parser("kp"))
    p = verify.add_parser("dixmier")
    _common(p)
    p.add_argument("--slack", type=int, default=0)

    p = sub.add_parser("form")
    _common(p, window=False)
    p.add_argument("--d", type=int, default=1)
    _common(sub.add_parser("casimir"), window=False)

    p = sub.add_parser("batch")
    _common(p, spec=False, window=False)
    p.add_argument("catalog", nargs="?", help="catalog file; omit for the desk catalog")
    return ap


def parse_catalog(text: str) -> list[tuple]:
    """Lines ``group n partition [kp=N] [dixmier=N] [dmax=N]``; '#' starts a comment."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        try:
            if len(fields) < 3:
                raise InputError("expected: group n partition [kp=N] [dixmier=N]")
            spec = validate(fields[0], int(fields[1]), parse_partition(fields[2]))
            opts = {}
            for f in fields[3:]:
                key, _, val = f.partition("=")
                if key not in ("kp", "dixmier", "dmax") or not val:
                    raise InputError(f"unknown option {f!r}")
                opts[key] = int(val)
        except (InputError, InvalidPartition, ConstructionFailure, ValueError) as exc:
            raise InputError(f"catalog line {lineno}: {raw.strip()!r}: {exc}") from None
        kp = opts.get("kp", opts.get("dmax"))
        dx = opts.get("dixmier", opts.get("dmax"))
        out.append((spec.group, spec.n, spec.partition, kp, dx))
    return out


def _run_one(entry, config: Config):
    group, n, partition, kp, dx = entry
    spec = validate(group, n, partition)
    session = Session(config)
    r1 = run_verify_kp(session, spec, kp)
    r2 = run_verify_dixmier(session, spec, dx)
    return {"spec": spec.label, "kp_window": r1.window["dmax"], "dixmier_window": r2.window["dmax"],
            "quotient_dims": [r["quotient"] for r in r1.rows], "gr_B_dims": [r["dim_gr"] for r in r2.rows],
            "kp_passed": r1.passed, "dixmier_passed": r2.passed, "passed": r1.passed and r2.passed,
            "exit": EXIT_OK if r1.passed and r2.passed else EXIT_MISMATCH}


def run_batch(entries, config: Config) -> VerificationReport:
    if config.workers > 1 and len(entries) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            rows = list(pool.map(_run_one, entries, [config] * len(entries)))
    else:
        rows = [_run_one(e, config) for e in entries]
    return VerificationReport(None, "batch", {}, rows, all(r["passed"] for r in rows))


def _emit(report: VerificationReport, args) -> int:
    sys.stdout.write(report.table_text())
    if getattr(args, "json", None):
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report.dumps(stable=args.stable))
    if getattr(args, "csv", None):
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.csv_text())
    return EXIT_OK if report.passed else EXIT_MISMATCH


def dispatch(args) -> VerificationReport:
    config = Config.load(args.config)
    if args.seed is not None:
        config.sample_seed = args.seed
    cmd, action = args.command, getattr(args, "action", None)
    if cmd == "orbits" and action == "list":
        normalize_group(args.group)
        if args.n < 1:
            raise InputError("--n must be positive")
        return run_orbits_list(normalize_group(args.group), args.n)
    if cmd == "batch":
        if args.catalog:
            with open(args.catalog, encoding="utf-8") as fh:
                entries = parse_catalog(fh.read())
        else:
            entries = list(DESK_CATALOG)
        return run_batch(entries, config)
    spec = _spec_from(args)
    if getattr(args, "dmax", None) is not None and args.dmax < 0:
        raise InputError("--dmax must be nonnegative")
    session = Session(config)
    if cmd == "orbits":
        return run_orbits_info(spec)
    if cmd == "model":
        return run_model_build(session, spec)
    if cmd == "hilbert":
        return run_hilbert(session, spec, args.dmax, with_oracle=args.oracle)
    if cmd == "koszul":
        return run_koszul(session, spec, args.dmax, args.tmax)
    if cmd == "oracle":
        return run_oracle(session, spec, args.dmax)
    if cmd == "verify" and action == "kp":
        return run_verify_kp(session, spec, args.dmax)
    if cmd == "verify" and action == "dixmier":
        if args.slack < 0:
            raise InputError("--slack must be nonnegative")
        return run_verify_dixmier(session, spec, args.dmax, args.slack)
    if cmd == "form":
        if args.d < 0:
            raise InputError("--d must be nonnegative")
        return run_form(session, spec, args.d)
    if cmd == "casimir":
        return run_casimir(session, spec)
    raise InputError(f"unknown command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = dispatch(args)
    except (InputError, InvalidPartition, ConstructionFailure, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return _emit(report, args)


if __name__ == "__main__":
    sys.exit(main())
