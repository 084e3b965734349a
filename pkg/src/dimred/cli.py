"""Command-line front end: ``dimred <command> [flags]``.

Exit status: 0 all checks pass, 1 some check failed (report still written),
2 usage error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Dict, List, Optional, Sequence

from .errors import SizeError, UnsupportedOperationError
from .report import CheckReport, to_csv, to_json
from .suites import COMMANDS, DEFAULTS, SUITES, RunConfig, all_tasks

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

# name -> converter for command parameters, shared by flags and config files
PARAMS = {
    "D": int, "d": int, "n": int, "r": str, "L": str, "z": str, "x": str,
    "delta": float, "xhat": str, "potential": str, "radius": float, "eps": float,
    "radii": str, "activities": str, "check": str, "method": str,
}
SHARED = {"seed": int, "samples": int, "tol": float, "nmax": int, "out": str,
          "format": str, "workers": int, "timing": lambda v: str(v).lower() in ("1", "true", "yes")}


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dimred", description="Run numerical check suites.")
    p.add_argument("command", choices=COMMANDS + ("all",))
    p.add_argument("--config", help="key=value file; flags override its keys")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="Monte Carlo sample budget")
    p.add_argument("--tol", type=float, help="override the per-check tolerance")
    p.add_argument("--nmax", type=int, help="highest order or size")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--workers", type=int, help="threads for independent suites")
    p.add_argument("--timing", action="store_const", const=True,
                   help="record wall time per check (breaks byte-identical output)")
    for name, conv in PARAMS.items():
        p.add_argument(f"--{name}", type=conv)
    return p


def read_config(path: str) -> Dict[str, str]:
    """Parse UTF-8 ``key=value`` lines; '#' starts a comment."""
    out: Dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in PARAMS and key not in SHARED:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = val
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge flags over config-file keys over defaults."""
    file_vals: Dict[str, object] = {}
    if args.config:
        for key, val in read_config(args.config).items():
            conv = PARAMS.get(key) or SHARED[key]
            try:
                file_vals[key] = conv(val)
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {val!r}") from exc

    def pick(key):
        flag = getattr(args, key)
        if flag is not None:
            return flag
        return file_vals.get(key, DEFAULTS.get(key))

    shared = {k: pick(k) for k in SHARED}
    params = {k: pick(k) for k in PARAMS if pick(k) is not None}
    try:
        return RunConfig(args.command, params=params, **shared)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _timed(cfg: RunConfig) -> List[CheckReport]:
    start = time.perf_counter()
    reports = SUITES[cfg.command](cfg)
    if not cfg.timing:
        return reports
    each = (time.perf_counter() - start) / max(len(reports), 1)
    return [replace(r, wall_time=each) for r in reports]


def run(cfg: RunConfig) -> List[CheckReport]:
    """Execute a command; report order follows the declared suite order."""
    tasks = all_tasks(cfg) if cfg.command == "all" else [cfg]
    if cfg.workers > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            chunks = list(pool.map(_timed, tasks))
    else:
        chunks = [_timed(t) for t in tasks]
    return [r for chunk in chunks for r in chunk]


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = build_config(args)
        reports = run(cfg)
    except (UsageError, SizeError, UnsupportedOperationError, ValueError) as exc:
        print(f"dimred: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dimred: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    text = to_json(reports) if cfg.format == "json" else to_csv(reports)
    try:
        if cfg.out is None:
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"dimred: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO

    failed = [r for r in reports if not r.passed]
    for r in failed:
        print(f"FAIL {r.check} {r.inputs} error={r.error:.3g} tol={r.tol:.3g}", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
