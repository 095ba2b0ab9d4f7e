"""Command line front end.

Every capability is a subcommand emitting JSON (17 significant digits,
deterministic) or CSV.  Exit codes: 0 success, 1 numerical failure,
2 argument/domain errors.  Output files are only written after the
computation has finished, so a failing run never leaves partial files.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .errors import DomainError, NumericsError
from .flow import FlowState, run as flow_run
from .grids import Field, RadialGrid, save_field
from .jsonio import csv_string, dumps
from .minimize import detect_breaking, minimize_quotient, default_grid
from .params import CknParams, b_fs, derive, lambda_fs
from .profiles import (SelfSimilar, eval_radial, eval_self_similar, normalized_radial,
                       radial_constant, self_similar_from_profile)
from .spectrum import ModeOperator, lowest_eigenvalue, sphere_bifurcation, threshold_lambda
from .suites import SUITES, run_suite

DEFAULTS = {
    "nz": 1000,
    "nmu": 12,
    "nphi": 8,
    "ntheta": 16,
    "ns": 2000,
    "spectrum_nz": 4000,
    "threshold_nz": 2000,
    "z_factor": 30.0,
    "s_min": 1e-4,
    "s_max": 400.0,
    "dt": 1e-3,
    "max_iter": 20000,
    "seed": 0,
}

_INT_KEYS = {"nz", "nmu", "nphi", "ntheta", "ns", "spectrum_nz", "threshold_nz",
             "max_iter", "seed"}


def load_config(path):
    """key=value lines; '#' starts a comment."""
    out = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in DEFAULTS:
                raise DomainError(f"unknown config key {key!r}")
            out[key] = int(val) if key in _INT_KEYS else float(val)
    return out


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--json-indent", type=int, default=None)
    common.add_argument("--quiet", action="store_true")

    ap = argparse.ArgumentParser(prog="cknflow",
                                 description="weighted interpolation inequalities: "
                                             "constants, thresholds, flows, identities")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", parents=[common], help="derived parameters and region")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("curve", parents=[common], help="sample the stability curve")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a-min", type=float, required=True)
    p.add_argument("--a-max", type=float, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--out")

    p = sub.add_parser("radial-constant", parents=[common],
                       help="quotient value at the explicit radial optimizer")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("minimize", parents=[common], help="descend the cylinder quotient")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--radial-only", action="store_true")
    p.add_argument("--init", default="soliton-y1",
                   choices=["soliton", "soliton-y1", "gaussian"])
    p.add_argument("--out", help="write the minimizer snapshot here")

    p = sub.add_parser("detect-breaking", parents=[common],
                       help="compare full vs radial constants")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)

    p = sub.add_parser("spectrum", parents=[common],
                       help="lowest per-mode eigenvalues of the second variation")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--lmax", type=int, default=2)
    p.add_argument("--lam", type=float, default=None,
                   help="mass parameter; default: the stability threshold")
    p.add_argument("--out", help="write the l=1 eigenfunction snapshot here")

    p = sub.add_parser("threshold", parents=[common],
                       help="bisect the stability threshold in Lambda")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--ell", type=int, default=1)

    p = sub.add_parser("sphere-threshold", parents=[common],
                       help="rigidity threshold for the constant solution on S^d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)

    p = sub.add_parser("flow", parents=[common], help="integrate the fast-diffusion flow")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--init", default="self-similar", choices=["self-similar", "profile"])
    p.add_argument("--trace", help="write the trace CSV here (default: stdout)")
    p.add_argument("--out", help="write the final state snapshot here")

    p = sub.add_parser("verify", parents=[common], help="run a seeded identity suite")
    p.add_argument("--suite", required=True, choices=list(SUITES))
    p.add_argument("--seeds", type=int, default=5)

    return ap


def _emit(args, obj):
    if not args.quiet:
        sys.stdout.write(dumps(obj, indent=args.json_indent) + "\n")


def _settings(args):
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config(args.config))
    return cfg


def _dp(args):
    return derive(CknParams(d=args.d, a=args.a, b=args.b))


def cmd_derive(args, cfg):
    _emit(args, _dp(args).to_dict())
    return 0


def cmd_curve(args, cfg):
    if args.samples < 2 or args.a_max <= args.a_min:
        raise DomainError("curve needs a-min < a-max and samples >= 2")
    rows = []
    for a in np.linspace(args.a_min, args.a_max, args.samples):
        rows.append((float(a), float(b_fs(args.d, float(a)))))
    text = csv_string(["a", "b_fs"], rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)
    return 0


def cmd_radial_constant(args, cfg):
    dp = _dp(args)
    _emit(args, {"constant": radial_constant(dp), "region": dp.region.value,
                 "lambda": dp.lam, "p": dp.p})
    return 0


def cmd_minimize(args, cfg):
    dp = _dp(args)
    grid = default_grid(dp, nz=cfg["nz"], nmu=cfg["nmu"], nphi=cfg["nphi"],
                        ntheta=cfg["ntheta"], z_factor=cfg["z_factor"],
                        radial=args.radial_only)
    res = minimize_quotient(dp, grid=grid,
                            restriction="radial" if args.radial_only else "full",
                            init=args.init, max_iter=cfg["max_iter"])
    _emit(args, res.to_dict())
    if args.out:
        save_field(args.out, res.minimizer)
    return 0


def cmd_detect_breaking(args, cfg):
    dp = _dp(args)
    grid = default_grid(dp, nz=cfg["nz"], nmu=cfg["nmu"], nphi=cfg["nphi"],
                        ntheta=cfg["ntheta"], z_factor=cfg["z_factor"])
    _emit(args, detect_breaking(dp, grid=grid, max_iter=cfg["max_iter"]))
    return 0


def cmd_spectrum(args, cfg):
    lam = args.lam if args.lam is not None else lambda_fs(args.d, args.p)
    reports = []
    keep = None
    for ell in range(args.lmax + 1):
        op = ModeOperator(lam=lam, p=args.p, d=args.d, ell=ell, nz=cfg["spectrum_nz"])
        res = lowest_eigenvalue(op)
        if ell == 1:
            keep = res
        reports.append(res.to_dict())
    _emit(args, {"lambda": lam, "modes": reports})
    if args.out and keep is not None:
        rows = [(float(z), float(v)) for z, v in zip(keep.eigenfunction_z, keep.eigenfunction)]
        with open(args.out, "w", newline="") as fh:
            fh.write(csv_string(["z", "psi"], rows))
    return 0


def cmd_threshold(args, cfg):
    th = threshold_lambda(args.d, args.p, ell=args.ell, nz=cfg["threshold_nz"])
    closed = lambda_fs(args.d, args.p) if args.ell == 1 else None
    out = {"d": args.d, "p": args.p, "ell": args.ell, "threshold": th}
    if closed is not None:
        out["closed_form"] = closed
        out["relative_mismatch"] = abs(th - closed) / closed
    _emit(args, out)
    return 0


def cmd_sphere_threshold(args, cfg):
    analytic, numeric = sphere_bifurcation(args.d, args.p)
    _emit(args, {"d": args.d, "p": args.p, "threshold": analytic,
                 "eigenvalue_condition": numeric,
                 "agreement": abs(analytic - numeric) / analytic})
    return 0


def cmd_flow(args, cfg):
    dp = _dp(args)
    if dp.n <= 3.0:
        raise DomainError("flow defaults assume effective dimension n > 3 "
                          "(pick b so that n = d/(1-(b-a)) exceeds 3)")
    grid = RadialGrid(dp.n, dp.alpha, dp.d, cfg["s_min"], cfg["s_max"], cfg["ns"], None)
    if args.init == "self-similar":
        ss = self_similar_from_profile(dp)
        v0 = eval_self_similar(ss, 1.0, grid.s)
    else:
        prof = normalized_radial(dp)
        v0 = eval_radial(prof, grid.s) ** dp.p
    dt = args.dt if args.dt is not None else cfg["dt"]
    trace = flow_run(Field(grid, v0[:, None], positive=True), dp, args.t_end, dt)
    text = csv_string(["t", "J", "mass", "dJ_step"], trace.rows())
    if args.trace:
        with open(args.trace, "w", newline="") as fh:
            fh.write(text)
    elif not args.quiet:
        sys.stdout.write(text)
    if args.out:
        save_field(args.out, trace.final)
    if not args.quiet and args.trace:
        _emit(args, {"monotone": trace.monotone, "dJdt_at_0": trace.dJdt_at_0,
                     "mass_drift": float(abs(trace.mass[-1] - trace.mass[0]) / trace.mass[0])})
    return 0


def cmd_verify(args, cfg):
    reports = run_suite(args.suite, args.seeds, base_seed=cfg["seed"])
    _emit(args, [r.to_dict() for r in reports])
    return 0


_HANDLERS = {
    "derive": cmd_derive,
    "curve": cmd_curve,
    "radial-constant": cmd_radial_constant,
    "minimize": cmd_minimize,
    "detect-breaking": cmd_detect_breaking,
    "spectrum": cmd_spectrum,
    "threshold": cmd_threshold,
    "sphere-threshold": cmd_sphere_threshold,
    "flow": cmd_flow,
    "verify": cmd_verify,
}


def main(argv=None):
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _settings(args)
        return _HANDLERS[args.command](args, cfg)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
