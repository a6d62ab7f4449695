"""Command-line front end.

JSON goes to stdout (or ``--out``), a one-line human summary to stderr.
Exit status: 0 on success, 2 when a verdict is NOT_INTERSECTIVE, 1 on any
parse, configuration or budget error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .dynamics import (Observable, correlation, ghk_draws, ghk_estimate, ghk_spread,
                       parse_system, return_set_scan)
from .experiments import density_return_scan, gaussian_config_demo, partition_scan
from .intersectivity import (ConditionsNotMet, DepthRule, Status, certify_quadratic_plus_constant,
                             certify_three_quadratics, is_intersective_up_to,
                             jointly_intersective_up_to, GAUSSIAN)
from .largeness import Window, parse_setspec
from .number_field import parse_element, parse_field
from .poly_ring import decompose, parse_poly

SPEC_VERSION = "intersective-spec-1"
EXIT_OK, EXIT_ERROR, EXIT_NOT_INTERSECTIVE = 0, 1, 2

log = logging.getLogger("intersective")


class ConfigError(ValueError):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=False) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _say(msg: str):
    print(msg, file=sys.stderr)


def _load_config(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _require(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"config is missing {key!r}")
    return cfg[key]


def _polys(cfg: dict, F):
    texts = _require(cfg, "polys")
    if isinstance(texts, str):
        texts = [texts]
    return [parse_poly(t, F) for t in texts]


def _verdict_exit(verdict) -> int:
    return EXIT_NOT_INTERSECTIVE if verdict.status is Status.NOT_INTERSECTIVE else EXIT_OK


# ---------------------------------------------------------------------------
# subcommands


def cmd_check(args) -> int:
    F = parse_field(args.field)
    p = parse_poly(args.poly, F)
    rule = DepthRule(min_depth=args.depth_min)
    v = is_intersective_up_to(p, args.bound, rule, threads=args.threads)
    _emit(_dump({"poly": str(p), "field": str(F), **v.to_json()}), args.out)
    _say(f"{p} over {F}: {v.status.value}"
         + (f", witness {v.witness}" if v.witness is not None else ""))
    return _verdict_exit(v)


def cmd_certify(args) -> int:
    if args.kind == "quad-const":
        F = parse_field(args.field)
        v = certify_quadratic_plus_constant(parse_element(args.c, F), F)
        label = f"x^2+({args.c}) over {F}"
    else:
        alpha, beta = parse_element(args.alpha, GAUSSIAN), parse_element(args.beta, GAUSSIAN)
        try:
            v = certify_three_quadratics(alpha, beta)
        except ConditionsNotMet as exc:
            _emit(_dump({"status": "CONDITIONS_NOT_MET", "record": exc.record}), args.out)
            _say(f"conditions not met for alpha={args.alpha}, beta={args.beta}")
            return EXIT_ERROR
        label = f"three quadratics alpha={args.alpha} beta={args.beta}"
    _emit(_dump(v.to_json()), args.out)
    _say(f"{label}: {v.status.value}")
    return _verdict_exit(v)


def cmd_joint(args) -> int:
    F = parse_field(args.field)
    ps = [parse_poly(t, F) for t in args.polys]
    v = jointly_intersective_up_to(ps, args.bound, DepthRule(min_depth=args.depth_min),
                                   threads=args.threads)
    _emit(_dump({"polys": [str(p) for p in ps], "field": str(F), **v.to_json()}), args.out)
    _say(f"joint family of {len(ps)}: {v.status.value}")
    return _verdict_exit(v)


def cmd_decompose(args) -> int:
    F = parse_field(args.field)
    zv = decompose(parse_poly(args.poly, F))
    _emit(_dump({"components": zv.formatted(), "variables": zv.variable_names()}), args.out)
    _say(" , ".join(zv.formatted()))
    return EXIT_OK


def _system_and_polys(cfg: dict):
    sys_ = parse_system(_require(cfg, "system"))
    return sys_, _polys(cfg, sys_.field)


def cmd_scan_returns(args) -> int:
    cfg = _load_config(args.config)
    system, polys = _system_and_polys(cfg)
    W = Window.from_json(_require(cfg, "window"))
    scan = return_set_scan(system, polys, float(_require(cfg, "threshold")), W,
                           method=cfg.get("method", "auto"),
                           samples=int(cfg.get("samples", 10_000)), seed=cfg.get("seed"),
                           threads=args.threads)
    _emit(scan.jsonl() + _dump({"summary": scan.summary()}), args.out)
    s = scan.summary()
    _say(f"{s['good_count']} of {W.cardinality} u pass c={scan.threshold}; "
         f"gap {s['syndeticity_gap']}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = _load_config(args.config)
    system, polys = _system_and_polys(cfg)
    lines = []
    for u in _require(cfg, "u"):
        r = correlation(system, polys, u, method=cfg.get("method", "auto"),
                        samples=int(cfg.get("samples", 10_000)), seed=cfg.get("seed"))
        lines.append(_dump(r.to_json()))
    _emit("".join(lines), args.out)
    _say(f"{len(lines)} correlations")
    return EXIT_OK


def cmd_ghk(args) -> int:
    cfg = _load_config(args.config)
    system = parse_system(_require(cfg, "system"))
    f = Observable.from_json(_require(cfg, "observable"), system.dim)
    W = Window.from_json(_require(cfg, "window"))
    samples = int(_require(cfg, "samples"))
    seed = int(_require(cfg, "seed"))
    value = ghk_estimate(system, f, args.k, W, samples, seed)
    draws = ghk_draws(args.k, W.cardinality, samples) if args.k else 0
    replicates = int(cfg.get("replicates", 4))
    stderr = ghk_spread(system, f, args.k, W, samples, seed, replicates)
    _emit(_dump({"k": args.k, "estimate": value, "stderr": stderr, "replicates": replicates,
                 "samples": samples, "seed": seed, "draws_per_level": draws}), args.out)
    _say(f"seminorm estimate k={args.k}: {value:.6f}"
         + (f" +/- {stderr:.4f}" if stderr is not None else ""))
    return EXIT_OK


def cmd_density(args) -> int:
    cfg = _load_config(args.config)
    F = parse_field(cfg.get("field", "Q(sqrt -1)"))
    W_set = Window.from_json(_require(cfg, "window_set"))
    W_u = Window.from_json(_require(cfg, "window_u")) if "window_u" in cfg else None
    eps = float(cfg.get("epsilon", 0.05))
    mode = cfg.get("mode", "scan")
    if mode == "gaussian":
        E = parse_setspec(_require(cfg, "set"), 2)
        demo = gaussian_config_demo(E, W_set, W_u, epsilon=eps, threads=args.threads)
        scan, summary = demo.scan, demo.summary()
    elif mode == "partition":
        parts = [parse_setspec(s, W_set.dim) for s in _require(cfg, "parts")]
        res = partition_scan(parts, _polys(cfg, F), W_set, W_u, cfg.get("threshold"),
                             epsilon=eps, threads=args.threads)
        scan = res.scan
        summary = {"cell": res.cell, "cell_densities": [float(d) for d in res.cell_densities],
                   **scan.summary()}
    elif mode == "scan":
        E = parse_setspec(_require(cfg, "set"), W_set.dim)
        scan = density_return_scan(E, _polys(cfg, F), W_set, W_u,
                                   float(_require(cfg, "threshold")), threads=args.threads)
        summary = scan.summary()
    else:
        raise ConfigError(f"unknown mode {mode!r}")
    _emit(scan.jsonl() + _dump({"summary": summary}), args.out)
    _say(f"{summary['good_count']} good u, density {summary['density_of_good']:.4f}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--residue-cap", type=int,
                        help="largest residue system to enumerate (overrides the env var)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="intersective",
                                     description="Intersective polynomials and recurrence scans")
    parser.add_argument("--version", action="version", version=SPEC_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="intersectivity up to a norm bound")
    p.add_argument("poly")
    p.add_argument("--field", default="Q")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--depth-min", type=int, default=1)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("certify", help="structural certificates")
    csub = p.add_subparsers(dest="kind", required=True)
    q = csub.add_parser("quad-const", parents=[common], help="x^2 + c")
    q.add_argument("--c", required=True)
    q.add_argument("--field", default="Q")
    q.set_defaults(func=cmd_certify)
    q = csub.add_parser("three-quadratics", parents=[common],
                        help="(x^2-alpha)(x^2-beta)(x^2-alpha*beta) over Z[i]")
    q.add_argument("--alpha", required=True)
    q.add_argument("--beta", required=True)
    q.set_defaults(func=cmd_certify)

    p = sub.add_parser("joint", parents=[common], help="joint intersectivity of a family")
    p.add_argument("polys", nargs="+")
    p.add_argument("--field", default="Q")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--depth-min", type=int, default=1)
    p.set_defaults(func=cmd_joint)

    p = sub.add_parser("decompose", parents=[common], help="integer coordinate polynomials")
    p.add_argument("poly")
    p.add_argument("--field", default="Q")
    p.set_defaults(func=cmd_decompose)

    for name, func, helptext in (("scan-returns", cmd_scan_returns, "return-set scan"),
                                 ("simulate", cmd_simulate, "correlations at given u"),
                                 ("density", cmd_density, "density return experiments")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--config", required=True)
        p.set_defaults(func=func)

    p = sub.add_parser("ghk", parents=[common], help="seminorm estimate")
    p.add_argument("--config", required=True)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_ghk)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.residue_cap is not None:
        os.environ["INTERSECTIVE_RESIDUE_CAP"] = str(args.residue_cap)
    try:
        return args.func(args)
    except (ValueError, KeyError, TypeError, RuntimeError, OSError) as exc:
        _say(f"error: {exc}")
        return EXIT_ERROR


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
