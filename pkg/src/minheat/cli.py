"""Command-line front end.

Subcommands reproduce the headline numbers (table1), run the constrained
optimizer, evaluate heating factors, emit decoherence curves, and drive the
measurement-plus-feedback correlator algebra.  All numeric output is
deterministic: 17 significant digits, LF line endings, no timestamps.

Exit codes: 0 success, 2 usage error, 3 numerical non-convergence,
4 model-undefined condition.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import decoherence as deco
from . import functionals as fn
from . import hybrid as hy
from . import optimizer as opt
from .errors import (DivergenceError, InfiniteRateError, InvalidProfileError,
                     InversionError, MinheatError, PldUndefinedError, UsageError)
from .params import ModelParams
from .profiles import (ClosedFormProfile, PROFILE_KINDS, RadialProfile,
                       decreasing_rearrangement, load_profile, make_closed_form,
                       save_profile)

_FORMATS = ("pretty", "csv", "json")

#: scaling exponent of each geometric heating factor with the smearing length
_LENGTH_POWER = {fn.GRW: -2, fn.CSL: -5, fn.DP: -3}

_PROFILE_ALIASES = {
    "gaussian": "gaussian", "gauss": "gaussian",
    "csl-optimal": "csl-optimal", "csl-opt": "csl-optimal",
    "dp-optimal": "dp-optimal", "dp-opt": "dp-optimal",
}


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render_table(rows: list[dict], fmt: str) -> str:
    if not rows:
        return "\n"
    headers = list(rows[0].keys())
    if fmt == "json":
        return json.dumps(rows, indent=2, default=float) + "\n"
    if fmt == "csv":
        lines = [",".join(headers)]
        for row in rows:
            lines.append(",".join(_fmt(row[h]) if not isinstance(row[h], str) else row[h]
                                   for h in headers))
        return "\n".join(lines) + "\n"
    cells = [[row[h] if isinstance(row[h], str) else _fmt(row[h]) for h in headers]
             for row in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    for c in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(c, widths)).rstrip())
    return "\n".join(lines) + "\n"


def _load_config(path) -> dict:
    if not path:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    return data


def _resolve(args, config, key, default):
    val = getattr(args, key, None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


class _Settings:
    def __init__(self, args):
        config = _load_config(args.config)
        self.fmt = _resolve(args, config, "format", "pretty")
        if self.fmt not in _FORMATS:
            raise UsageError(f"unknown format {self.fmt!r}; choose from {_FORMATS}")
        self.out = _resolve(args, config, "out", None)
        self.r_c = float(_resolve(args, config, "r_c", 1.0))
        self.r_g = float(_resolve(args, config, "r_g", self.r_c))
        if self.r_c <= 0 or self.r_g <= 0:
            raise UsageError("smearing lengths must be positive")
        try:
            self.params = ModelParams(
                g_newton=float(_resolve(args, config, "g_newton", 1.0)),
                hbar=float(_resolve(args, config, "hbar", 1.0)),
                m0=float(_resolve(args, config, "m0", 1.0)),
                gamma_csl=float(_resolve(args, config, "gamma_csl", 1.0)),
                total_mass=float(_resolve(args, config, "total_mass", 1.0)),
                grw_rates=(float(_resolve(args, config, "lambda_grw", 1.0)),),
                masses=(float(_resolve(args, config, "particle_mass", 1.0)),),
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    def profile(self, spec: str, r_c: float | None = None) -> RadialProfile:
        name = _PROFILE_ALIASES.get(spec.lower())
        if name is not None:
            return make_closed_form(ClosedFormProfile(name, r_c=r_c or self.r_c),
                                    n_points=241)
        try:
            return load_profile(spec)
        except FileNotFoundError as exc:
            raise UsageError(
                f"unknown profile {spec!r}: not one of {sorted(set(_PROFILE_ALIASES))} "
                "and no such file") from exc
        except InvalidProfileError as exc:
            raise UsageError(str(exc)) from exc


# -- subcommands --------------------------------------------------------------


def cmd_table1(args) -> int:
    """Per-model summary: Gaussian heating, optimal profile, penalty."""
    cfg = _Settings(args)
    rows = []
    for kind in (fn.GRW, fn.CSL, fn.DP):
        gauss = make_closed_form("gaussian", n_points=321)
        best = opt.optimal_profile(kind, n_points=321)
        scale = cfg.r_c ** _LENGTH_POWER[kind]
        rows.append({
            "model": kind,
            "gaussian_value": opt.functional_value(kind, gauss) * scale,
            "optimal_value": opt.functional_value(kind, best) * scale,
            "optimal_support_radius": (best.support_radius or 0.0) * cfg.r_c,
            "length_power": _LENGTH_POWER[kind],
            "penalty_percent": opt.gaussian_penalty(kind),
        })
    _emit(_render_table(rows, cfg.fmt), cfg.out)
    return 0


def cmd_optimize(args) -> int:
    cfg = _Settings(args)
    options = {}
    if args.options:
        try:
            options = json.loads(args.options)
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad solver options JSON: {exc}") from exc
    for key, flag in (("n_points", args.n), ("max_iter", args.max_iter),
                      ("tol_constraint", args.tol_constraint),
                      ("tol_objective", args.tol_objective), ("r_max", args.r_max)):
        if flag is not None:
            options[key] = flag
    try:
        solver_options = opt.SolverOptions.from_dict(options)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    kind = fn.validate_kind(args.kind)
    result = opt.minimize(kind, n_points=solver_options.n_points, options=solver_options)
    payload = result.to_dict()
    text = json.dumps(payload, indent=2, default=float) + "\n"
    _emit(text, cfg.out)
    if args.profile_out:
        save_profile(result.profile, args.profile_out)
    if not result.converged:
        sys.stderr.write(
            "optimization did not converge: residuals "
            f"norm_err={result.residuals[0]:.3e} var_err={result.residuals[1]:.3e} "
            f"after {result.iterations} iterations\n")
        return 3
    return 0


def cmd_heat(args) -> int:
    cfg = _Settings(args)
    kind = fn.validate_kind(args.kind)
    profile = cfg.profile(args.profile)
    heating = fn.evaluate_heating(kind, profile)
    payload = heating.to_dict()
    if not heating.divergent:
        payload["physical_rate"] = fn.physical_heating_rate(kind, heating, cfg.params)
    if cfg.fmt == "csv":
        headers = list(payload.keys())
        text = ",".join(headers) + "\n" + ",".join(_fmt(payload[h]) if not isinstance(payload[h], str)
                                                   else payload[h] for h in headers) + "\n"
    else:
        text = json.dumps(payload, indent=2, default=float) + "\n"
    _emit(text, cfg.out)
    return 0


def _d_grid(args) -> np.ndarray:
    d_min = args.d_min if args.d_min is not None else 0.0
    if args.d_max is None or args.d_max <= d_min or d_min < 0:
        raise UsageError("need a positive ascending distance range (--d-max > --d-min >= 0)")
    if args.n_d < 2:
        raise UsageError("need at least two distances")
    return np.linspace(d_min, args.d_max, args.n_d)


def cmd_decohere(args) -> int:
    cfg = _Settings(args)
    model = args.model.lower()
    if model not in (deco.GRW_MODEL, deco.CSL_MODEL):
        raise UsageError(f"unknown decoherence model {args.model!r}; choose grw or csl")
    profile = cfg.profile(args.profile)
    ds = _d_grid(args)
    curve = (deco.grw_curve if model == deco.GRW_MODEL else deco.csl_curve)(profile, ds)
    rows = []
    for i, d in enumerate(curve.distances):
        row = {"d": d, "gamma_over_rate_constant": curve.rates[i]}
        if args.closed_form:
            s = d / (3.0 * cfg.r_c)
            row["F_grw"] = float(deco.closed_form_F("grw", s))
            row["F_csl"] = float(deco.closed_form_F("csl", s))
        rows.append(row)
    if cfg.fmt == "json":
        payload = curve.to_dict()
        if args.closed_form:
            payload["F_grw"] = [r["F_grw"] for r in rows]
            payload["F_csl"] = [r["F_csl"] for r in rows]
        text = json.dumps(payload, indent=2, default=float) + "\n"
    else:
        text = _render_table(rows, "csv" if cfg.fmt != "pretty" else "pretty")
    _emit(text, cfg.out)
    return 0


def cmd_hybrid(args) -> int:
    cfg = _Settings(args)
    g_c = cfg.profile(args.g_c, r_c=cfg.r_c)
    g_g = cfg.profile(args.g_g, r_c=cfg.r_g)
    k_top = min(hy.safe_k_max(g_c), hy.safe_k_max(g_g))
    k_grid = np.geomspace(1e-3, k_top, args.n_k)
    gamma_c, gamma_g = hy.pld_correlators(fn.fourier_radial(g_c, k_grid),
                                          fn.fourier_radial(g_g, k_grid),
                                          params=cfg.params)
    e_c, e_g = hy.heating_split(gamma_c, g_c, g_g, params=cfg.params)
    ds = _d_grid(args) if args.d_max is not None else np.linspace(0.0, 10.0 * cfg.r_c, 11)
    curve = deco.hybrid_single_particle_curve(gamma_c, g_c, g_g, cfg.params.masses[0],
                                              ds, params=cfg.params)
    payload = {
        "correlators": {
            "k": list(map(float, gamma_c.k)),
            "gamma_c": list(map(float, gamma_c.values)),
            "gamma_g": list(map(float, gamma_g.values)),
        },
        "heating": {"measurement": e_c, "feedback": e_g, "total": e_c + e_g},
        "curve": curve.to_dict(),
    }
    if cfg.fmt == "csv":
        lines = ["# section: correlators", "k,gamma_c,gamma_g"]
        for k, vc, vg in zip(gamma_c.k, gamma_c.values, gamma_g.values):
            lines.append(f"{_fmt(k)},{_fmt(vc)},{_fmt(vg)}")
        lines += ["# section: heating", "measurement,feedback,total",
                  f"{_fmt(e_c)},{_fmt(e_g)},{_fmt(e_c + e_g)}"]
        lines += ["# section: curve", "d,gamma_over_rate_constant"]
        for d, g in zip(curve.distances, curve.rates):
            lines.append(f"{_fmt(d)},{_fmt(g)}")
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(payload, indent=2, default=float) + "\n"
    _emit(text, cfg.out)
    return 0


def cmd_rearrange(args) -> int:
    cfg = _Settings(args)
    profile = cfg.profile(args.profile)
    rearranged = decreasing_rearrangement(profile)
    if cfg.out:
        save_profile(rearranged, cfg.out)
    else:
        lines = ["# minheat-profile v1"]
        if rearranged.support_radius is not None:
            lines.append(f"# support_radius = {rearranged.support_radius:.17g}")
        lines += [f"{_fmt(r)} {_fmt(v)}" for r, v in zip(rearranged.grid, rearranged.values)]
        sys.stdout.write("\n".join(lines) + "\n")
    return 0


# -- entry point ----------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minheat",
        description="Heating functionals and optimal smearing distributions "
                    "of spontaneous-collapse and hybrid-gravity models.")
    parser.add_argument("--format", choices=_FORMATS, default=None)
    parser.add_argument("--out", default=None, help="write the report to this path")
    parser.add_argument("--r-c", dest="r_c", type=float, default=None,
                        help="measurement smearing length (default 1)")
    parser.add_argument("--r-g", dest="r_g", type=float, default=None,
                        help="feedback smearing length (default r_c)")
    parser.add_argument("--config", default=None, help="JSON file with defaults")
    for flag, dest in (("--g-newton", "g_newton"), ("--hbar", "hbar"), ("--m0", "m0"),
                       ("--gamma-csl", "gamma_csl"), ("--lambda-grw", "lambda_grw"),
                       ("--total-mass", "total_mass"), ("--particle-mass", "particle_mass")):
        parser.add_argument(flag, dest=dest, type=float, default=None)

    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("table1", help="summary table: Gaussian vs optimal heating per model")

    p_opt = sub.add_parser("optimize", help="minimize a heating functional")
    p_opt.add_argument("--kind", required=True)
    p_opt.add_argument("--n", type=int, default=None, help="grid points")
    p_opt.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p_opt.add_argument("--tol-constraint", dest="tol_constraint", type=float, default=None)
    p_opt.add_argument("--tol-objective", dest="tol_objective", type=float, default=None)
    p_opt.add_argument("--r-max", dest="r_max", type=float, default=None)
    p_opt.add_argument("--options", default=None, help="solver options JSON")
    p_opt.add_argument("--profile-out", dest="profile_out", default=None)

    p_heat = sub.add_parser("heat", help="evaluate a heating factor")
    p_heat.add_argument("--kind", required=True)
    p_heat.add_argument("--profile", required=True)

    p_dec = sub.add_parser("decohere", help="decoherence-rate curve")
    p_dec.add_argument("--model", required=True)
    p_dec.add_argument("--profile", required=True)
    p_dec.add_argument("--d-min", dest="d_min", type=float, default=None)
    p_dec.add_argument("--d-max", dest="d_max", type=float, required=True)
    p_dec.add_argument("--n-d", dest="n_d", type=int, default=51)
    p_dec.add_argument("--closed-form", dest="closed_form", action="store_true")

    p_hyb = sub.add_parser("hybrid", help="least-decoherence correlators and heating split")
    p_hyb.add_argument("--g-c", dest="g_c", required=True)
    p_hyb.add_argument("--g-g", dest="g_g", required=True)
    p_hyb.add_argument("--n-k", dest="n_k", type=int, default=128)
    p_hyb.add_argument("--d-min", dest="d_min", type=float, default=None)
    p_hyb.add_argument("--d-max", dest="d_max", type=float, default=None)
    p_hyb.add_argument("--n-d", dest="n_d", type=int, default=11)

    p_re = sub.add_parser("rearrange", help="symmetric decreasing rearrangement")
    p_re.add_argument("--profile", required=True)

    return parser


_COMMANDS = {
    "table1": cmd_table1,
    "optimize": cmd_optimize,
    "heat": cmd_heat,
    "decohere": cmd_decohere,
    "hybrid": cmd_hybrid,
    "rearrange": cmd_rearrange,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (PldUndefinedError, DivergenceError, InfiniteRateError, InversionError) as exc:
        sys.stderr.write(f"model-undefined condition: {exc}\n")
        return 4
    except MinheatError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
