"""khess: batch command line for eigenvalue runs, solves, and verifications.

Every run can write a manifest capturing the command, resolved
parameters, configuration hash, and output paths; re-running the same
manifest reproduces the output files byte for byte (wall time lives only
in the manifest).  Exit codes: 0 success, 1 usage or input error, 2
numerical inconsistency or failed verification.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .cones import eigenvalues, in_dual_sigma_k, in_sigma_k, load_matrix_json
from .dirichlet import (
    SolverConfig,
    SourceTerm,
    solution_residual,
    solve_radial_dirichlet,
)
from .eigen import (
    IterationConfig,
    domain_monotonicity_check,
    estimate_lambda1,
    lower_bound,
    minimum_principle_probe,
    upper_bound,
)
from .errors import ConvergenceError, DomainError, InconsistencyError, SearchError
from .geometry import (
    load_field_json,
    sphere_field,
    verify_exp_boundary_barrier,
    verify_log_boundary_barrier,
)
from .radial import RadialProfile, hopf_linear_bound, quartic_test_profile
from .symfun import in_gamma_k, sigma_all

_SOLVER_FIELDS = {
    "grid_size": int,
    "quadrature": str,
    "tol_residual": float,
    "refine_max": int,
    "graded": None,
}
_ITER_FIELDS = {
    "sup_cap": float,
    "n_max": int,
    "fixed_point_tol": float,
    "bisect_tol": float,
}


def _parse_bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "1", "yes", "on"):
        return True
    if low in ("false", "0", "no", "off"):
        return False
    raise DomainError(f"expected a boolean, got {text!r}")


def read_config(path: str) -> dict:
    """key=value config file; # comments and blank lines are skipped."""
    overrides = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise DomainError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise DomainError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip()
        val = val.strip().strip("\"'")
        if key in _SOLVER_FIELDS:
            conv = _SOLVER_FIELDS[key]
        elif key in _ITER_FIELDS:
            conv = _ITER_FIELDS[key]
        else:
            raise DomainError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            overrides[key] = _parse_bool(val) if conv is None else conv(val)
        except ValueError as exc:
            raise DomainError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
    return overrides


def resolve_configs(args) -> tuple:
    """Defaults, then --config file entries, then explicit flags."""
    overrides = read_config(args.config) if getattr(args, "config", None) else {}
    solver_kw = {k: v for k, v in overrides.items() if k in _SOLVER_FIELDS}
    iter_kw = {k: v for k, v in overrides.items() if k in _ITER_FIELDS}
    if getattr(args, "grid", None) is not None:
        solver_kw["grid_size"] = args.grid
    if getattr(args, "bisect_tol", None) is not None:
        iter_kw["bisect_tol"] = args.bisect_tol
    if getattr(args, "sup_cap", None) is not None:
        iter_kw["sup_cap"] = args.sup_cap
    return SolverConfig(**solver_kw), IterationConfig(**iter_kw)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return str(obj)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def write_manifest(out_dir: Path, command: str, parameters: dict,
                   configs: dict, outputs: list, t0: float) -> Path:
    identity = {"command": command, "parameters": parameters, "config": configs}
    blob = json.dumps(identity, sort_keys=True, separators=(",", ":"),
                      default=_jsonable)
    manifest = {
        "command": command,
        "parameters": parameters,
        "config": configs,
        "config_hash": hashlib.sha256(blob.encode()).hexdigest(),
        "version": __version__,
        "outputs": [str(p) for p in outputs],
        "wall_time_s": time.perf_counter() - t0,
    }
    path = out_dir / "manifest.json"
    _write_json(path, manifest)
    return path


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_eigen(args, t0: float) -> int:
    solver_cfg, iter_cfg = resolve_configs(args)
    est = estimate_lambda1(args.radius, args.dim, args.order, iter_cfg, solver_cfg)
    out = _out_dir(args)
    if args.format == "json":
        profile_name = "eigenfunction.json"
        est.eigenfunction.save_json(out / profile_name)
    else:
        profile_name = "eigenfunction.csv"
        est.eigenfunction.save_csv(out / profile_name)
    est_path = out / "estimate.json"
    _write_json(est_path, est.to_json_dict(profile_ref=profile_name))
    params = {"dim": args.dim, "order": args.order, "radius": args.radius,
              "format": args.format}
    manifest = write_manifest(
        out, "eigen", params,
        {"solver": asdict(solver_cfg), "iteration": asdict(iter_cfg)},
        [est_path, out / profile_name], t0,
    )
    print(f"lambda_best = {est.lambda_best!r}")
    print(f"bracket     [{est.lambda_lo!r}, {est.lambda_hi!r}]")
    print(f"bounds      [{est.bounds['lower']!r}, {est.bounds['upper']!r}]")
    print(f"rayleigh    {est.rayleigh!r}")
    print(f"residual_max {est.residual_max!r}")
    print(f"wrote {est_path}, {out / profile_name}, {manifest}")
    return 0


def cmd_solve(args, t0: float) -> int:
    solver_cfg, _ = resolve_configs(args)
    src = SourceTerm.parse(args.source)
    profile = solve_radial_dirichlet(src, args.radius, args.dim, args.order,
                                     solver_cfg)
    residual = solution_residual(profile, src)
    out = _out_dir(args)
    profile_path = out / "profile.csv"
    profile.save_csv(profile_path)
    report_path = out / "solve.json"
    _write_json(report_path, {
        "N": args.dim,
        "k": args.order,
        "R": args.radius,
        "source": args.source,
        "grid_size": profile.r.size - 1,
        "residual": residual,
        "tol_residual": solver_cfg.tol_residual,
        "sup_norm": profile.sup_norm,
        "profile_ref": "profile.csv",
    })
    params = {"dim": args.dim, "order": args.order, "radius": args.radius,
              "source": args.source}
    manifest = write_manifest(out, "solve", params,
                              {"solver": asdict(solver_cfg)},
                              [profile_path, report_path], t0)
    print(f"residual = {residual!r} (tol {solver_cfg.tol_residual!r})")
    print(f"sup norm = {profile.sup_norm!r}")
    print(f"wrote {profile_path}, {report_path}, {manifest}")
    return 0


def cmd_cone(args, t0: float) -> int:
    k = args.order
    if (args.matrix is None) == (args.lam_values is None):
        raise DomainError("provide exactly one of --matrix or --lambda")
    if args.matrix is not None:
        a = load_matrix_json(args.matrix)
        vals = eigenvalues(a)
        verdicts = {
            "in_sigma_k": in_sigma_k(a, k, strict=False),
            "in_sigma_k_open": in_sigma_k(a, k, strict=True),
            "in_dual_sigma_k": in_dual_sigma_k(a, k),
        }
        subject = f"matrix {args.matrix}"
    else:
        try:
            vals = np.array([float(t) for t in args.lam_values.split(",") if t.strip()])
        except ValueError as exc:
            raise DomainError(f"bad --lambda list {args.lam_values!r}") from exc
        if vals.size == 0:
            raise DomainError("empty --lambda list")
        verdicts = {
            "in_gamma_k": in_gamma_k(vals, k, strict=True),
            "in_gamma_k_closed": in_gamma_k(vals, k, strict=False),
        }
        subject = "eigenvalue list"
    if k < 1 or k > vals.size:
        raise DomainError(f"need 1 <= k <= {vals.size}")
    sig = sigma_all(np.sort(vals))
    print(f"{subject}, k = {k}")
    for j in range(1, vals.size + 1):
        print(f"sigma_{j} = {float(sig[j])!r}")
    for name, verdict in verdicts.items():
        print(f"{name}: {bool(verdict)}")
    if args.out is not None:
        out = _out_dir(args)
        report_path = out / "cone.json"
        _write_json(report_path, {
            "k": k,
            "eigenvalues": np.sort(vals),
            "sigma": sig[1:],
            "verdicts": verdicts,
        })
        params = {"order": k, "matrix": args.matrix, "lambda": args.lam_values}
        manifest = write_manifest(out, "cone", params, {}, [report_path], t0)
        print(f"wrote {report_path}, {manifest}")
    return 0


def _load_field(args):
    if (args.field is None) == (args.sphere is None):
        raise DomainError("provide exactly one of --field or --sphere")
    if args.field is not None:
        return load_field_json(args.field)
    return sphere_field(args.sphere, args.dim, n_samples=args.samples)


def _finish_verify(args, t0, check: str, params: dict, report: dict,
                   passed: bool) -> int:
    print(f"{check}: {'PASS' if passed else 'FAIL'}")
    if args.out is not None:
        out = _out_dir(args)
        report_path = out / "report.json"
        _write_json(report_path, report)
        manifest = write_manifest(out, f"verify {check}", params, {},
                                  [report_path], t0)
        print(f"wrote {report_path}, {manifest}")
    return 0 if passed else 2


def cmd_verify(args, t0: float) -> int:
    check = args.check
    if check == "bounds":
        solver_cfg, iter_cfg = resolve_configs(args)
        est = estimate_lambda1(args.radius, args.dim, args.order, iter_cfg,
                               solver_cfg)
        lb, ub = est.bounds["lower"], est.bounds["upper"]
        passed = lb <= est.lambda_best <= ub
        print(f"{lb!r} <= lambda_hat = {est.lambda_best!r} <= {ub!r}")
        report = est.to_json_dict()
        report["passed"] = passed
        params = {"dim": args.dim, "order": args.order, "radius": args.radius}
        return _finish_verify(args, t0, check, params, report, passed)

    if check == "monotone":
        solver_cfg, iter_cfg = resolve_configs(args)
        report = domain_monotonicity_check(args.dim, args.order, args.r1,
                                           args.r2, iter_cfg, solver_cfg)
        print(f"lambda({report['R_big']!r}) = {report['lambda_big']!r} "
              f"vs lambda({report['R_small']!r}) = {report['lambda_small']!r}")
        params = {"dim": args.dim, "order": args.order, "r1": args.r1,
                  "r2": args.r2}
        return _finish_verify(args, t0, check, params, report, report["passed"])

    if check == "hopf":
        solver_cfg, _ = resolve_configs(args)
        profile = solve_radial_dirichlet(SourceTerm.constant(1.0), args.radius,
                                         args.dim, args.order, solver_cfg)
        report = hopf_linear_bound(profile)
        print(f"h <= -C1 (R - r) on [{report['r_in']!r}, R] with "
              f"C1 = {report['C1']!r}, worst margin {report['worst_margin']!r}")
        params = {"dim": args.dim, "order": args.order, "radius": args.radius}
        return _finish_verify(args, t0, check, params, report, report["passed"])

    if check == "minprinciple":
        solver_cfg, _ = resolve_configs(args)
        if args.quartic:
            profile = quartic_test_profile(args.radius, args.dim, args.order,
                                           solver_cfg.grid_size)
        elif args.profile is not None:
            profile = RadialProfile.load_csv(args.profile, args.dim, args.order)
        else:
            raise DomainError("minprinciple needs --quartic or --profile FILE")
        lam = args.lam if args.lam is not None else upper_bound(
            args.dim, args.order, profile.R)
        report = minimum_principle_probe(profile, lam)
        print(f"supersolution at lam = {lam!r}: "
              f"{report['supersolution_everywhere']}, interior min "
              f"{report['interior_min']!r} at r = {report['argmin_r']!r}")
        params = {"dim": args.dim, "order": args.order,
                  "radius": getattr(args, "radius", None),
                  "quartic": args.quartic, "lam": lam}
        return _finish_verify(args, t0, check, params, report,
                              report["violates_minimum_principle"])

    if check == "barrier-exp":
        field = _load_field(args)
        report = verify_exp_boundary_barrier(field, args.order, args.lam,
                                             args.t, args.d0,
                                             n_depth=args.depth)
        print(f"min S_j margin {report['worst_margin']!r} over "
              f"{report['samples']} samples x {report['depth_nodes']} depths")
        params = {"dim": args.dim, "order": args.order, "lam": args.lam,
                  "t": args.t, "d0": args.d0, "field": args.field,
                  "sphere": args.sphere}
        return _finish_verify(args, t0, check, params, report, report["passed"])

    if check == "barrier-log":
        field = _load_field(args)
        M, report = verify_log_boundary_barrier(field, args.order, args.fsup,
                                                args.usup, args.t, args.d0,
                                                n_depth=args.depth)
        print(f"amplitude M = {M!r}, beta = {report['beta']!r}")
        params = {"dim": args.dim, "order": args.order, "fsup": args.fsup,
                  "usup": args.usup, "t": args.t, "d0": args.d0,
                  "field": args.field, "sphere": args.sphere}
        return _finish_verify(args, t0, check, params, report, report["passed"])

    raise DomainError(f"unknown verify subcommand {check!r}")


def _add_problem_flags(p, radius=True):
    p.add_argument("--dim", type=int, required=True, help="ambient dimension N")
    p.add_argument("--order", type=int, required=True, help="Hessian order k")
    if radius:
        p.add_argument("--radius", type=float, required=True, help="ball radius R")


def _add_config_flags(p):
    p.add_argument("--grid", type=int, default=None, help="grid intervals")
    p.add_argument("--config", default=None,
                   help="key=value file mirroring SolverConfig/IterationConfig")


def _add_iter_flags(p):
    p.add_argument("--bisect-tol", type=float, default=None, dest="bisect_tol")
    p.add_argument("--sup-cap", type=float, default=None, dest="sup_cap")


def _add_field_flags(p):
    p.add_argument("--field", default=None, help="curvature field JSON")
    p.add_argument("--sphere", type=float, default=None,
                   help="use a sphere of this radius instead of --field")
    p.add_argument("--samples", type=int, default=32,
                   help="boundary samples for --sphere")
    p.add_argument("--t", type=float, required=True, help="barrier rate")
    p.add_argument("--d0", type=float, required=True, help="collar depth")
    p.add_argument("--depth", type=int, default=64, help="depth grid nodes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="khess",
        description="k-Hessian principal eigenvalue toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="estimate the principal eigenvalue")
    _add_problem_flags(p)
    _add_config_flags(p)
    _add_iter_flags(p)
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), default="csv",
                   help="eigenfunction file format")
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("solve", help="solve the radial Dirichlet problem")
    _add_problem_flags(p)
    _add_config_flags(p)
    p.add_argument("--source", required=True,
                   help="const:<c>, poly:<c0,c1,...>, or file:<csv>")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("cone", help="cone membership for a matrix or spectrum")
    p.add_argument("--matrix", default=None, help='JSON {"n": N, "entries": [...]}')
    p.add_argument("--lambda", dest="lam_values", default=None,
                   help="comma-separated eigenvalues")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--out", default=None, help="optional output directory")
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("verify", help="run a verification harness")
    vsub = p.add_subparsers(dest="check", required=True)

    v = vsub.add_parser("bounds", help="certified bracket vs measured estimate")
    _add_problem_flags(v)
    _add_config_flags(v)
    _add_iter_flags(v)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("monotone", help="domain monotonicity on nested balls")
    _add_problem_flags(v, radius=False)
    v.add_argument("--r1", type=float, required=True)
    v.add_argument("--r2", type=float, required=True)
    _add_config_flags(v)
    _add_iter_flags(v)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("hopf", help="linear boundary decay of the f=1 solve")
    _add_problem_flags(v)
    _add_config_flags(v)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("minprinciple",
                        help="supersolution with a negative interior minimum")
    _add_problem_flags(v)
    _add_config_flags(v)
    v.add_argument("--quartic", action="store_true",
                   help="use the built-in quartic test profile")
    v.add_argument("--profile", default=None, help="profile CSV to probe")
    v.add_argument("--lam", type=float, default=None,
                   help="eigenvalue candidate (default: certified upper bound)")
    v.set_defaults(func=cmd_verify, out=None)

    v = vsub.add_parser("barrier-exp", help="exponential boundary barrier")
    _add_problem_flags(v, radius=False)
    v.add_argument("--lam", type=float, required=True)
    _add_field_flags(v)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    v = vsub.add_parser("barrier-log", help="logarithmic boundary barrier")
    _add_problem_flags(v, radius=False)
    v.add_argument("--fsup", type=float, required=True)
    v.add_argument("--usup", type=float, required=True)
    _add_field_flags(v)
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    t0 = time.perf_counter()
    try:
        return args.func(args, t0)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InconsistencyError, SearchError) as exc:
        print(f"inconsistency: {exc}", file=sys.stderr)
        detail = getattr(exc, "trace", None) or getattr(exc, "diagnostics", None)
        if detail:
            print(json.dumps(detail, sort_keys=True, default=_jsonable),
                  file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
