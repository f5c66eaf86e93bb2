"""``qwalk`` command line: simulate | spectrum | eigvec | verify.

Exit codes: 0 ok, 1 verify found a failing check, 2 malformed config or
arguments, 3 model validation failure, 4 lambda is not an eigenvalue.
Every artifact carries the normalized run config; CSV files put it on a
leading ``# config: {...}`` comment line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import NotAnEigenvalue, analyze_spectrum, eigvec_analysis, verify_suite
from .config import ConfigError, RunConfig, load_config, parse_angle
from .errors import QWalkError, ValidationError
from .evolution import distribution, evolve

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_INVALID, EXIT_NOT_EIGEN = 0, 1, 2, 3, 4


def _provenance(cfg: RunConfig, command: str, extra: dict) -> dict:
    return {"qwalk_version": __version__, "command": command, "config": cfg.echo(), **extra}


def _csv_text(header: list[str], rows, prov: dict) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(prov) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _json_text(prov: dict, data) -> str:
    return json.dumps({**prov, "data": data}, indent=2) + "\n"


def _write(out: Path, name: str, text: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(text)
    return path


def cmd_simulate(cfg: RunConfig, args) -> int:
    t = cfg.t if args.t is None else args.t
    psi = evolve(cfg.profile, cfg.initial, t)
    dist = distribution(psi, t)
    prov = _provenance(cfg, "simulate", {"t": t})
    rows = [[int(x), repr(float(p))] for x, p in zip(dist.sites, dist.probs)]
    if args.format == "csv":
        path = _write(args.out, "distribution.csv", _csv_text(["x", "prob"], rows, prov))
    else:
        path = _write(args.out, "distribution.json", _json_text(prov, [[x, float(p)] for x, p in rows]))
    print(f"total_probability={dist.total():.15f}")
    print(f"mu_t(0)={dist.at(0):.15f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    an = analyze_spectrum(cfg.profile, cfg.model, grid=args.grid, window=args.window)
    prov = _provenance(cfg, "spectrum", {"settings": an.settings})
    if args.format == "csv":
        rows = [
            [
                repr(e.lam),
                repr(float(e.phase.real)),
                repr(float(e.phase.imag)),
                "" if e.residual is None else repr(e.residual),
                "+".join(e.sources),
                e.oracle,
                ";".join(e.flags),
            ]
            for e in an.entries
        ]
        header = ["lambda", "phase_re", "phase_im", "residual", "sources", "oracle", "flags"]
        path = _write(args.out, "spectrum.csv", _csv_text(header, rows, prov))
    else:
        path = _write(args.out, "spectrum.json", _json_text(prov, an.to_json()))
    for e in an.entries:
        status = "agree" if e.agree else ",".join(e.flags)
        res = "-" if e.residual is None else f"{e.residual:.2e}"
        print(f"lambda={e.lam:.12f} sources={'+'.join(e.sources)} residual={res} {status}")
    for p in an.unmatched_peaks:
        print(f"unmatched oracle peak lambda={p.lam:.6f} weight={p.weight:.3f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_eigvec(cfg: RunConfig, args) -> int:
    if args.lam is None:
        raise ConfigError("--lambda", "required for eigvec")
    lam = parse_angle(args.lam, "--lambda").radians
    try:
        res = eigvec_analysis(cfg.profile, lam, window=args.window)
    except NotAnEigenvalue as exc:
        sigma = "n/a" if exc.sigma is None else f"{exc.sigma:.6e}"
        print(f"error: {exc}", file=sys.stderr)
        print(f"decisive_sigma={sigma}")
        return EXIT_NOT_EIGEN
    prov = _provenance(cfg, "eigvec", {"lambda": res.lam, "window": args.window})
    if args.format == "csv":
        path = _write(args.out, "eigvec.csv", _csv_text(["x", "comp", "re", "im"], res.to_csv_rows(), prov))
        _write(args.out, "eigvec_fit.json", _json_text(prov, res.to_json()))
    else:
        data = {**res.to_json(), "vector": [[x, k, float(re), float(im)] for x, k, re, im in res.to_csv_rows()]}
        path = _write(args.out, "eigvec.json", _json_text(prov, data))
    print(f"kind={res.kind}")
    print(f"residual={res.residual:.3e}")
    for f in res.fits:
        print(f"decay_{f.side}: measured={f.measured:.12f} expected={f.expected:.12f} rel_error={f.rel_error:.2e}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    t = cfg.t if args.t is None else args.t
    rep = verify_suite(cfg.profile, cfg.model, cfg.initial, t, grid=args.grid, window=args.window)
    prov = _provenance(cfg, "verify", {"t": t})
    path = _write(args.out, "verify.json", _json_text(prov, rep.to_json()))
    for c in rep.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name}")
    print(f"wrote {path}")
    if not rep.passed:
        print(f"verify failed at check: {rep.first_failure}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "spectrum": cmd_spectrum, "eigvec": cmd_eigvec, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="run config JSON")
    common.add_argument("--t", type=int, default=None, help="horizon (overrides the config)")
    common.add_argument("--lambda", dest="lam", default=None, help="phase in radians or a/b pi shorthand")
    common.add_argument("--window", type=int, default=200, help="eigenvector half-width")
    common.add_argument("--grid", type=int, default=4096, help="spectrum scan grid size")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory (default ./out)")
    p = argparse.ArgumentParser(prog="qwalk", description="Three-state quantum walk spectra and dynamics.")
    p.add_argument("--version", action="version", version=f"qwalk {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="evolve and write the distribution at time t")
    sub.add_parser("spectrum", parents=[common], help="cross-checked point spectrum")
    sub.add_parser("eigvec", parents=[common], help="eigenvector at --lambda with decay fits")
    sub.add_parser("verify", parents=[common], help="one-shot consistency suite")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.t is not None and args.t < 0:
            raise ConfigError("--t", f"must be >= 0, got {args.t}")
        if args.window < 1:
            raise ConfigError("--window", f"must be >= 1, got {args.window}")
        if args.grid < 100:
            raise ConfigError("--grid", f"must be >= 100, got {args.grid}")
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if args.command == "verify":
            check = {"name": "validation", "pass": False, "detail": {"error": type(exc).__name__, "message": str(exc)}}
            report = {"pass": False, "first_failure": "validation", "checks": [check]}
            prov = {"qwalk_version": __version__, "command": "verify", "config_path": str(args.config)}
            _write(args.out, "verify.json", _json_text(prov, report))
            print("FAIL validation")
            print("verify failed at check: validation", file=sys.stderr)
        return EXIT_INVALID
    try:
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except QWalkError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
