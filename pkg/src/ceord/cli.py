"""Command-line frontend: frontier sweeps, condition reports, KKT
verification, and Monte Carlo validation, as JSON or CSV.

Exit codes: 0 success, 2 domain/validation error, 3 internal inconsistency
(certificate and numerical oracle disagree), 4 statistical gate failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict
from typing import Any, Optional

from . import bergertung, converse, mcsim, rdcore, spectra
from .spectra import DomainError, ModelError

SCHEMA_VERSION = 1

EXIT_DOMAIN = 2
EXIT_INCONSISTENT = 3
EXIT_STATISTICAL = 4

LN2 = math.log(2.0)


def _round17(obj: Any) -> Any:
    """Normalize floats to 17 significant digits for the JSON interface."""
    if isinstance(obj, float):
        return float(f"{obj:.17g}")
    if isinstance(obj, dict):
        return {k: _round17(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round17(v) for v in obj]
    return obj


def _csv_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _emit(args, payload: dict, rows: Optional[tuple[list[str], list[list]]] = None):
    """Write JSON (always possible) or CSV (when the command is tabular)."""
    if args.format == "csv" and rows is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        header, data = rows
        writer.writerow(header)
        for row in data:
            writer.writerow([_csv_cell(v) for v in row])
        text = buf.getvalue()
    else:
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        text = json.dumps(_round17(payload), indent=2) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _model(args) -> spectra.SourceModel:
    x = spectra.SymmetricSpec(args.gamma_x, args.rho_x, args.ell)
    z = spectra.SymmetricSpec(args.gamma_z, args.rho_z, args.ell)
    return spectra.validate(x, z)


def _rate(args, nats: float) -> float:
    return nats / LN2 if args.bits else nats


def _model_dict(model: spectra.SourceModel) -> dict:
    return {
        "gamma_x": model.x.gamma,
        "rho_x": model.x.rho,
        "gamma_z": model.z.gamma,
        "rho_z": model.z.rho,
        "gamma_s": model.s.gamma,
        "rho_s": model.s.rho,
        "ell": model.ell,
    }


def _conditions_dict(rep: rdcore.ConditionReport) -> dict:
    return {
        "mu": rep.mu,
        "nu": rep.nu,
        "nu_kj": list(rep.nu_kj),
        "cond1": rep.cond1,
        "cond2": rep.cond2,
        "cond3": list(rep.cond3),
        "cond4": list(rep.cond4),
        "roots": list(rep.roots) if rep.roots is not None else None,
        "regime": rep.regime,
    }


def cmd_point(args) -> int:
    model = _model(args)
    pt = bergertung.achievable_point(model, args.k, args.dk)
    rep = rdcore.check_conditions(model, args.k, args.dk)
    _emit(
        args,
        {
            "model": _model_dict(model),
            "k": pt.k,
            "d_k": pt.d_k,
            "lambda_q": pt.lambda_q,
            "rate": _rate(args, pt.rate),
            "rate_units": "bits" if args.bits else "nats",
            "profile": {str(j): d for j, d in zip(range(args.k, model.ell + 1), pt.profile)},
            "conditions": _conditions_dict(rep),
        },
    )
    return 0


def cmd_sweep(args) -> int:
    model = _model(args)
    ks = args.k
    header = ["d_k", "lambda_q", "rate"] + [
        f"d_{j}" for j in range(ks, model.ell + 1)
    ] + ["cond1", "cond2"]
    data = []
    records = []
    for i in range(args.steps):
        if args.steps == 1:
            d = args.dk_min
        else:
            d = args.dk_min + (args.dk_max - args.dk_min) * i / (args.steps - 1)
        try:
            pt = bergertung.achievable_point(model, ks, d)
            rep = rdcore.check_conditions(model, ks, d)
        except DomainError as e:
            print(f"warning: skipping d_k={d:.12g}: {e}", file=sys.stderr)
            continue
        row = [d, pt.lambda_q, _rate(args, pt.rate), *pt.profile, rep.cond1, rep.cond2]
        data.append(row)
        records.append(dict(zip(header, row)))
    _emit(args, {"model": _model_dict(model), "k": ks, "rows": records}, (header, data))
    return 0


def cmd_region(args) -> int:
    model = _model(args)
    pt = bergertung.achievable_point(model, args.k, args.dk)
    header = ["j", "d_j"]
    data = [[j, d] for j, d in zip(range(args.k, model.ell + 1), pt.profile)]
    _emit(
        args,
        {
            "model": _model_dict(model),
            "k": args.k,
            "d_k": args.dk,
            "lambda_q": pt.lambda_q,
            "rows": [dict(zip(header, r)) for r in data],
        },
        (header, data),
    )
    return 0


def cmd_conditions(args) -> int:
    model = _model(args)
    rep = rdcore.check_conditions(model, args.k, args.dk)
    _emit(
        args,
        {
            "model": _model_dict(model),
            "k": args.k,
            "d_k": args.dk,
            "conditions": _conditions_dict(rep),
        },
    )
    return 0


def cmd_verify(args) -> int:
    model = _model(args)
    j = args.j if args.j is not None else args.k
    case = converse.select_case(model, j)
    cert = converse.verify_kkt(model, args.k, j, args.dk, case, tol=args.tol)
    point, opt = converse.solve_numeric(model, args.k, j, args.dk, case)
    rbar = rdcore.rate_bar(model, args.k, args.dk)
    gap = opt - rbar
    conditions_fail = not cert.multipliers.nonnegative
    if conditions_fail:
        status = "conditions-fail"
    elif cert.valid and abs(gap) <= 1e-6:
        status = "valid"
    else:
        status = "inconsistent"
    _emit(
        args,
        {
            "model": _model_dict(model),
            "k": args.k,
            "j": j,
            "d_k": args.dk,
            "case": case,
            "status": status,
            "certificate_valid": cert.valid,
            "violations": list(cert.violations),
            "point": asdict(cert.point),
            "multipliers": asdict(cert.multipliers),
            "residuals": cert.residuals,
            "objective": _rate(args, cert.objective),
            "rate_bar": _rate(args, rbar),
            "numeric_optimum": _rate(args, opt),
            "numeric_gap": gap,
            "numeric_argmin": asdict(point),
        },
    )
    return EXIT_INCONSISTENT if status == "inconsistent" else 0


def cmd_bt_check(args) -> int:
    model = _model(args)
    check = bergertung.check_symmetric_rate(model, args.k, args.dk)
    header = ["subset_size", "required_sum_rate", "provided_sum_rate", "satisfied"]
    data = [
        [b, _rate(args, req), _rate(args, b * check.rate), ok]
        for b, req, ok in check.constraints
    ]
    _emit(
        args,
        {
            "model": _model_dict(model),
            "k": args.k,
            "d_k": args.dk,
            "rate": _rate(args, check.rate),
            "all_satisfied": check.ok,
            "rows": [dict(zip(header, r)) for r in data],
        },
        (header, data),
    )
    return 0


def cmd_simulate(args) -> int:
    model = _model(args)
    lam = rdcore.solve_lambda_q(model, args.k, args.dk)
    profile = rdcore.distortion_profile(model, args.k, args.dk)
    header = ["j", "analytic", "empirical", "stderr", "sigmas", "pass"]
    data = []
    ok_all = True
    for j, analytic in zip(range(args.k, model.ell + 1), profile):
        emp = mcsim.empirical_distortion(model, args.k, lam, j, args.n, args.seed)
        sigmas = abs(emp.distortion - analytic) / emp.stderr
        ok = sigmas <= 3.0
        ok_all = ok_all and ok
        data.append([j, analytic, emp.distortion, emp.stderr, sigmas, ok])
    _emit(
        args,
        {
            "model": _model_dict(model),
            "k": args.k,
            "d_k": args.dk,
            "lambda_q": lam,
            "n": args.n,
            "seed": args.seed,
            "all_pass": ok_all,
            "rows": [dict(zip(header, r)) for r in data],
        },
        (header, data),
    )
    return 0 if ok_all else EXIT_STATISTICAL


def cmd_decomp_check(args) -> int:
    model = _model(args)
    j = args.j if args.j is not None else model.ell
    bound = min(model.s.lambda1(j), model.s.lambda2)
    lam_w = args.lambda_w if args.lambda_w is not None else 0.5 * bound
    rep = mcsim.decomposition_check(model, j, lam_w, args.lambda_q, args.n, args.seed)
    ok = rep.sigma_ok and rep.delta_diag_ok
    _emit(
        args,
        {
            "model": _model_dict(model),
            "j": j,
            **asdict(rep),
            "all_pass": ok,
        },
    )
    return 0 if ok else EXIT_STATISTICAL


def _add_model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gamma-x", type=float, required=True)
    p.add_argument("--rho-x", type=float, default=0.0)
    p.add_argument("--gamma-z", type=float, required=True)
    p.add_argument("--rho-z", type=float, default=0.0)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default=None)
    p.add_argument("--bits", action="store_true", help="report rates in bits")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument(
        "--seed",
        type=int,
        default=int(os.environ.get("CEO_RD_SEED", "0")),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceord",
        description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--params-json",
        default=None,
        help="JSON object of parameters, applied before flag parsing",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, **extra):
        p = sub.add_parser(name)
        _add_model_args(p)
        for flag, kw in extra.items():
            p.add_argument(flag, **kw)
        p.set_defaults(func=fn)
        return p

    add(
        "point",
        cmd_point,
        **{"--k": dict(type=int, required=True), "--dk": dict(type=float, required=True)},
    )
    add(
        "sweep",
        cmd_sweep,
        **{
            "--k": dict(type=int, required=True),
            "--dk-min": dict(type=float, required=True),
            "--dk-max": dict(type=float, required=True),
            "--steps": dict(type=int, required=True),
        },
    )
    add(
        "region",
        cmd_region,
        **{"--k": dict(type=int, required=True), "--dk": dict(type=float, required=True)},
    )
    add(
        "conditions",
        cmd_conditions,
        **{"--k": dict(type=int, required=True), "--dk": dict(type=float, required=True)},
    )
    add(
        "verify",
        cmd_verify,
        **{
            "--k": dict(type=int, required=True),
            "--dk": dict(type=float, required=True),
            "--j": dict(type=int, default=None),
        },
    )
    add(
        "bt-check",
        cmd_bt_check,
        **{"--k": dict(type=int, required=True), "--dk": dict(type=float, required=True)},
    )
    add(
        "simulate",
        cmd_simulate,
        **{
            "--k": dict(type=int, required=True),
            "--dk": dict(type=float, required=True),
            "--n": dict(type=int, default=1000000),
        },
    )
    add(
        "decomp-check",
        cmd_decomp_check,
        **{
            "--j": dict(type=int, default=None),
            "--lambda-w": dict(type=float, default=None),
            "--lambda-q": dict(type=float, required=True),
            "--n": dict(type=int, default=1000000),
        },
    )
    return parser


def _apply_params_json(argv: list[str]) -> list[str]:
    """Expand --params-json into equivalent flags (scripting convenience)."""
    if "--params-json" not in argv:
        return argv
    idx = argv.index("--params-json")
    blob = argv[idx + 1]
    rest = argv[:idx] + argv[idx + 2 :]
    params = json.loads(blob)
    extra: list[str] = []
    for key, val in params.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                extra.append(flag)
        else:
            extra.extend([flag, str(val)])
    return rest + extra


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _apply_params_json(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, ModelError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
