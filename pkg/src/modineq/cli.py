"""Command-line entry point.

Exit codes: 0 when every requested suite passed, 1 on a verification
failure, 2 on a usage error (bad id, dims or parameter).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import ModineqError
from .gfuncs import BASE_IDS, catalog, parse_g
from .tensor import SpaceDims
from .verify import (
    BUILDER_IDS,
    SEARCHES,
    TrialConfig,
    VerificationReport,
    builder_spec,
    convexity_trials,
    counterexample_search,
    monotonicity_trials,
    verify_equality_gamma,
    verify_psd,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

DEFAULT_OUT = "modineq-report.json"


@dataclass
class RunManifest:
    command: str
    config: dict
    version: str = __version__
    reports: list = field(default_factory=list)
    exit_status: int = EXIT_OK

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "exit_status": self.exit_status,
            "reports": [r.to_dict() for r in self.reports],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunManifest":
        reports = [VerificationReport.from_dict(r) for r in d["reports"]]
        return cls(d["command"], d["config"], d["version"], reports, d["exit_status"])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunManifest":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["report", "builder", "seed", "min_eig", "herm_defect", "verdict"])
        for rep in self.reports:
            for r in sorted(rep.records, key=lambda r: (r.seed, r.builder_id)):
                w.writerow([rep.name, r.builder_id, r.seed, repr(r.min_eig), repr(r.herm_defect), int(r.verdict)])
        return buf.getvalue()


def _split_ids(values: Optional[Sequence[str]]) -> list[str]:
    out = []
    for v in values or ():
        out.extend(p for p in v.split(",") if p.strip())
    return out


def _dims(text: str) -> SpaceDims:
    try:
        return SpaceDims.parse(text)
    except ModineqError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--builder", action="append", help="builder id(s), comma separated or repeated")
    common.add_argument("--g", action="append", help="g id(s), comma separated or repeated")
    common.add_argument("--dims", type=_dims, default=SpaceDims(2, 2, 2), help="dA,dB,dC (default 2,2,2)")
    common.add_argument("--trials", type=_positive_int, default=100)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=_positive_float, default=1e-9, help="PSD / inequality tolerance")
    common.add_argument("--tol-eq", type=_positive_float, default=1e-8, help="equality tolerance")
    common.add_argument("--normalize", choices=("on", "off"), default="on", help="normalize gamma / P inputs")
    common.add_argument("--out", default=DEFAULT_OUT, help="report path")
    common.add_argument("--format", choices=("json", "csv", "both"), default="json")

    parser = argparse.ArgumentParser(prog="modineq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="PSD checks on random instances")
    sub.add_parser("equality", parents=[common], help="equality on block-structured states")
    sub.add_parser("counterexample", parents=[common], help="witness the asserted failures")
    sub.add_parser("convexity", parents=[common], help="joint convexity and monotonicity of H_g")
    sub.add_parser("list", help="list g and builder ids")
    return parser


def _config(args) -> TrialConfig:
    return TrialConfig(
        dims=args.dims,
        trials=args.trials,
        seed=args.seed,
        tol_psd=args.tol,
        tol_eq=args.tol_eq,
        builders=tuple(_split_ids(args.builder)),
        gs=tuple(_split_ids(args.g)),
        normalize=args.normalize == "on",
    )


def _list() -> str:
    lines = ["g functions:"]
    lines += [f"  {gid}" for gid in BASE_IDS]
    lines += ["  tilde:<id>", "  sym:<id>", "  k:<bures|max|inv_sqrt|log>", "cataloged instances:"]
    lines += [f"  {g.id:<16} g(1) = {g.value_at_one + 0.0:g}  {g.description}" for g in catalog()]
    lines += ["builders:"] + [f"  {b}" for b in BUILDER_IDS]
    lines += ["counterexample searches:"] + [f"  {s}" for s in SEARCHES]
    return "\n".join(lines)


def _collect(command: str, cfg: TrialConfig) -> list[VerificationReport]:
    if command == "verify":
        ids = list(cfg.builders) or ["ssa"]
        specs = [builder_spec(b) for b in ids]  # validate all ids before running
        return [verify_psd(s.id, cfg) for s in specs]
    if command == "equality":
        return verify_equality_gamma(cfg)
    if command == "counterexample":
        names = list(cfg.builders) or list(SEARCHES)
        for n in names:
            if n not in SEARCHES:
                raise ModineqError(f"unknown counterexample search {n!r}; valid: {', '.join(SEARCHES)}")
        return [counterexample_search(n, cfg.seed, cfg.trials) for n in names]
    if command == "convexity":
        gids = list(cfg.gs) or [g.id for g in catalog()]
        gs = [parse_g(g).id for g in gids]
        out = []
        for gid in gs:
            out.append(convexity_trials(gid, cfg))
            out.append(monotonicity_trials(gid, cfg))
        return out
    raise ModineqError(f"unknown command {command!r}")


def _write(manifest: RunManifest, out: Path, fmt: str) -> list[Path]:
    written = []
    if fmt in ("json", "both"):
        out.write_text(manifest.to_json())
        written.append(out)
    if fmt in ("csv", "both"):
        path = out.with_suffix(".csv")
        path.write_text(manifest.to_csv())
        written.append(path)
    return written


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.command == "list":
        print(_list())
        return EXIT_OK

    try:
        cfg = _config(args)
        reports = _collect(args.command, cfg)
    except ModineqError as exc:
        print(f"modineq: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    status = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    manifest = RunManifest(args.command, cfg.to_dict(), reports=reports, exit_status=status)
    written = _write(manifest, Path(args.out), args.format)

    for r in reports:
        print(r.summary())
    print(f"{'PASS' if status == EXIT_OK else 'FAIL'}: {sum(r.passed for r in reports)}/{len(reports)} suites; "
          f"report -> {', '.join(map(str, written))}")
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
