"""Command-line entry point: build, verify, sample, line-check, plane-d."""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .errors import RadonKernelError
from .plane_quadrature import random_plane_d
from .radon_transform import UnitWeight, rwf_plane_d, rwf_reduced
from .verify import VerifyConfig, check_sign_change, sign_change_shell, load_or_build_weight, run_suite, write_csv
from .weight_local import AssembledWeight


def _config(args) -> VerifyConfig:
    cfg = VerifyConfig.from_file(args.config) if args.config else VerifyConfig()
    over = {}
    for key in ("k_max", "seed", "workers", "weight_path", "output_dir", "n_max"):
        val = getattr(args, key, None)
        if val is not None:
            over[key] = val
    return replace(cfg, **over) if over else cfg


def _progress(n, s, eps):
    if n % 500 == 0:
        print(f"  {n} local weights, s = {s:.6f}, eps = {eps:.3e}", file=sys.stderr)


def _weight(args, config: VerifyConfig) -> AssembledWeight:
    path = getattr(args, "weight", None) or config.weight_path
    if path and Path(path).exists() and getattr(args, "weight", None):
        return AssembledWeight.load(path)
    return load_or_build_weight(config.profile(), config.quadrature(), path, n_max=config.n_max, progress=_progress)


def cmd_build(args) -> int:
    config = _config(args)
    w = load_or_build_weight(
        config.profile(), config.quadrature(), config.weight_path, n_max=config.n_max, progress=_progress
    )
    w.save(args.out)
    print(json.dumps({"out": args.out, "N": w.N, "delta0": w.delta0, "s_end": w.cover.s_end}))
    return 0


def cmd_verify(args) -> int:
    config = _config(args)
    weight = AssembledWeight.load(args.weight) if args.weight else None
    only = args.only.split(",") if args.only else None
    report = run_suite(config, weight, only)
    path = report.write(config.output_dir)
    for c in report.checks:
        print(f"{c.status.upper():12s} {c.check_id:22s} measured={c.measured:.6g} bound={c.bound:.6g}")
    print(f"report: {path}")
    return 0 if report.passed else 1


def cmd_sample(args) -> int:
    config = _config(args)
    w = _weight(args, config)
    cfg = config.quadrature()
    r_grid = np.linspace(0.0, 1.2, args.n_r)
    rows = []
    for s in np.linspace(args.s_min, args.s_max, args.n):
        rr = r_grid[r_grid >= abs(s)]
        if rr.size == 0:
            rr = np.array([abs(s)])
        wv = w.eval_on_plane(rr, s)
        res = rwf_reduced(s, w, cfg)
        g = rwf_reduced(s, UnitWeight(w.profile), cfg)
        if abs(s) > 0.5:
            w0 = w.w0.eval_on_plane(rr, s)
            w0_min, w0_max = float(w0.min()), float(w0.max())
        else:
            w0_min = w0_max = math.nan
        rows.append([float(s), g.value, res.value, res.error, float(wv.min()), float(wv.max()), w0_min, w0_max])
    header = ["s", "G", "rwf", "rwf_error", "w_min", "w_max", "w0_min", "w0_max"]
    write_csv(args.out, header, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def cmd_line_check(args) -> int:
    x0 = np.array(args.x0, dtype=float)
    om = np.array(args.omega, dtype=float)
    om = om / np.linalg.norm(om)
    k = args.k if args.k is not None else sign_change_shell(float(np.linalg.norm(x0)))
    try:
        ev = check_sign_change(x0, om, k)
    except RadonKernelError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 2
    print(json.dumps(ev.to_dict(), indent=1))
    return 0 if ev.length_ok and ev.variation_ok else 1


def cmd_plane_d(args) -> int:
    config = _config(args)
    w = _weight(args, config)
    cfg = config.quadrature()
    rng = np.random.default_rng([config.seed, args.d])
    plane = random_plane_d(args.d, args.offset, rng)
    a = rwf_plane_d(plane, w, cfg)
    b = rwf_reduced(args.offset, w, cfg)
    out = {
        "d": args.d,
        "offset": args.offset,
        "rwf_plane_d": a.value,
        "rwf_reduced": b.value,
        "difference": a.value - b.value,
        "error_estimate": a.error,
    }
    print(json.dumps(out, indent=1))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radon-kernel", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, weight=True):
        p.add_argument("--config", help="JSON file with VerifyConfig keys")
        p.add_argument("--k-max", dest="k_max", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--n-max", dest="n_max", type=int)
        p.add_argument("--weight-path", dest="weight_path", help="weight cache, built when missing")
        if weight:
            p.add_argument("--weight", help="load this serialized weight instead of building")

    p = sub.add_parser("build", help="construct and serialize the assembled weight")
    common(p, weight=False)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="run the certification suite")
    common(p)
    p.add_argument("--workers", type=int)
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--only", help="comma-separated check ids")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", help="CSV of G, R_W f and weight ranges over offsets")
    common(p)
    p.add_argument("--s-min", type=float, default=0.0)
    p.add_argument("--s-max", type=float, default=1.2)
    p.add_argument("--n", type=int, default=25)
    p.add_argument("--n-r", type=int, default=241)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("line-check", help="sign change of f along one line")
    p.add_argument("--x0", type=float, nargs=3, required=True)
    p.add_argument("--omega", type=float, nargs=3, required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_line_check)

    p = sub.add_parser("plane-d", help="R_W f on a random 2-plane in R^d")
    common(p)
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--offset", type=float, default=0.85)
    p.set_defaults(func=cmd_plane_d)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
