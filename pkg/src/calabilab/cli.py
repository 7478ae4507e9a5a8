"""Command-line front end.

Commands: evaluate, invariance, solve, iterate, variation-check, sweep.
All randomness flows from --seed through the documented splitmix64
generator; identical config + seed produces byte-identical outputs.

Exit codes: 0 success, 1 numerical failure, 2 usage/parse error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import variation as var
from .config import RunConfig, load_config
from .conventions import KAPPA_PHI, KAPPA_THETA
from .errors import CalabiLabError, ConfigError, PathExitsClass
from .functions import identity, parse_function
from .geometry import (
    class_constants,
    make_cp1_geometry,
    make_cpm_geometry,
    random_admissible_profile,
    round_profile,
    scalar_curvature,
)
from .potentials import (
    HolomorphyPotential,
    el_potential,
    equivariant_integral,
    eval_S,
    futaki,
    holomorphy_defect,
    normalize_potential,
)
from .rng import SplitMix64
from .serialize import dump_json, fmt, profile_from_csv, profile_to_csv, sampled_to_csv
from .solver import iterate, solve_critical
from .spectral import SampledFunction


def _geometry(cfg: RunConfig):
    spec = cfg.geometry.strip().lower()
    if spec == "cp1":
        return make_cp1_geometry(cfg.nodes)
    if spec.startswith("cpm:"):
        try:
            m = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise ConfigError(f"bad geometry spec {cfg.geometry!r}") from exc
        return make_cpm_geometry(m, cfg.nodes)
    raise ConfigError(f"unknown geometry {cfg.geometry!r} (use cp1 or cpm:<m>)")


def _profile(geom, cfg: RunConfig):
    spec = cfg.profile.strip()
    if spec == "round":
        return round_profile(geom)
    if spec.startswith("random"):
        parts = spec.split(":")
        seed = int(parts[1]) if len(parts) > 1 else cfg.seed
        amp = float(parts[2]) if len(parts) > 2 else cfg.amplitude
        return random_admissible_profile(geom, seed, amp)
    if spec.startswith("file:"):
        with open(spec[5:]) as fh:
            return profile_from_csv(geom, fh.read())
    raise ConfigError(f"unknown profile spec {cfg.profile!r}")


def _potential(geom, cfg: RunConfig) -> HolomorphyPotential:
    return normalize_potential(geom, cfg.target)


def _outdir(cfg: RunConfig) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _random_direction(geom, seed: int, degree: int = 4, scale: float = 0.2) -> SampledFunction:
    rng = SplitMix64(seed)
    coeffs = np.array([rng.uniform(-scale, scale) for _ in range(degree + 1)])
    return SampledFunction(geom.grid, np.polynomial.chebyshev.chebval(geom.grid.t, coeffs))


def _safe_t_max(profile, path, t_max: float = 0.25) -> float:
    from .geometry import validate

    for _ in range(30):
        try:
            for sign in (1.0, -1.0):
                moved, _ = var.transport(profile, path, sign * t_max)
                if validate(moved):
                    raise PathExitsClass(sign * t_max)
            return t_max
        except CalabiLabError:
            t_max /= 2.0
    return 0.0


# -- commands ----------------------------------------------------------------
def cmd_evaluate(cfg: RunConfig) -> int:
    geom = _geometry(cfg)
    profile = _profile(geom, cfg)
    f = parse_function(cfg.f_expr)
    h = parse_function(cfg.h_expr)
    phi = _potential(geom, cfg)
    consts = class_constants(geom)
    s_val = eval_S(profile, f, h, phi)
    psi = el_potential(profile, f, h, phi)
    report = holomorphy_defect(profile, psi)
    out = _outdir(cfg)
    dump_json(
        {
            "S": s_val,
            "class_constants": {
                "total_volume": consts.total_volume,
                "total_scalar": consts.total_scalar,
                "s0": consts.s0,
            },
            "futaki": futaki(profile, phi),
            "el_report": report.as_dict(),
            "f": f.render(),
            "h": h.render(),
            "phi_shift": phi.shift,
        },
        os.path.join(out, "report.json"),
    )
    with open(os.path.join(out, "psi.csv"), "w") as fh:
        fh.write(sampled_to_csv(psi, "psi"))
    with open(os.path.join(out, "s.csv"), "w") as fh:
        fh.write(sampled_to_csv(scalar_curvature(profile), "s"))
    print(f"evaluate: S = {s_val}, is_critical = {report.is_critical}")
    return 0


def cmd_invariance(cfg: RunConfig) -> int:
    out = _outdir(cfg)
    path_json = os.path.join(out, "invariance.json")
    if cfg.samples <= 0:
        dump_json({"samples": 0, "results": {}}, path_json)
        print("invariance: empty report")
        return 0
    geom = _geometry(cfg)
    h = parse_function(cfg.h_expr)
    phi = _potential(geom, cfg)
    eq_vals, sphi_vals, fut_vals = [], [], []
    failures = []
    for i in range(cfg.samples):
        try:
            profile = random_admissible_profile(geom, cfg.seed + i, cfg.amplitude)
        except CalabiLabError as exc:
            failures.append({"sample": i, "error": str(exc)})
            continue
        eq_vals.append(equivariant_integral(profile, h, phi))
        sphi_vals.append(eval_S(profile, identity(), identity(), phi))
        fut_vals.append(futaki(profile, phi))
    # transport paths from the round profile
    base = round_profile(geom)
    eq_path, sphi_path, fut_path = [], [], []
    for k in range(3):
        u = _random_direction(geom, cfg.seed + 1000 + k)
        dpath = var.DeformationPath(u)
        t_max = _safe_t_max(base, dpath)
        for t in np.linspace(-t_max, t_max, 11):
            moved, phi_t = var.transport(base, dpath, float(t), phi)
            eq_path.append(equivariant_integral(moved, h, phi_t))
            sphi_path.append(eval_S(moved, identity(), identity(), phi_t))
            fut_path.append(futaki(moved, phi_t))

    def spread(vals):
        arr = np.array(vals)
        return float(np.abs(arr - arr.mean()).max()) if arr.size else 0.0

    report = {
        "samples": cfg.samples,
        "h": h.render(),
        "results": {
            "equivariant_spread": spread(eq_vals),
            "s_phi_spread": spread(sphi_vals),
            "futaki_max": float(np.abs(fut_vals).max()) if fut_vals else 0.0,
            "equivariant_path_spread": spread(eq_path),
            "s_phi_path_spread": spread(sphi_path),
            "futaki_path_spread": spread(fut_path),
        },
        "failures": failures,
    }
    dump_json(report, path_json)
    print(f"invariance: max spreads {report['results']}")
    return 0


def cmd_solve(cfg: RunConfig) -> int:
    geom = _geometry(cfg)
    f = parse_function(cfg.f_expr)
    h = parse_function(cfg.h_expr)
    phi = _potential(geom, cfg)
    result = solve_critical(geom, f, h, phi)
    out = _outdir(cfg)
    with open(os.path.join(out, "solution.csv"), "w") as fh:
        fh.write(profile_to_csv(result.profile))
    dump_json(
        {
            "alpha": result.alpha,
            "beta": result.beta,
            "iterations": result.iterations,
            "converged": result.converged,
            "status": result.status,
            "el_report": result.el_report.as_dict(),
        },
        os.path.join(out, "solve.json"),
    )
    print(
        f"solve: status={result.status} (alpha, beta)=({fmt(result.alpha)}, {fmt(result.beta)})"
    )
    return 0


def cmd_iterate(cfg: RunConfig) -> int:
    geom = _geometry(cfg)
    f = parse_function(cfg.f_expr)
    h = parse_function(cfg.h_expr)
    phi = _potential(geom, cfg)
    trace = iterate(geom, f, h, phi, cfg.max_steps)
    out = _outdir(cfg)
    dump_json(
        {
            "degenerate_direction": trace.degenerate_direction,
            "final_status": trace.final_status,
            "steps": [
                {
                    "index": s.index,
                    "alpha": s.alpha,
                    "beta": s.beta,
                    "status": s.status,
                    "summary": s.profile_summary,
                }
                for s in trace.steps
            ],
        },
        os.path.join(out, "iterate.json"),
    )
    print(f"iterate: {len(trace.steps)} step(s), final status {trace.final_status}")
    return 1 if trace.final_status == "failed" else 0


def cmd_variation_check(cfg: RunConfig) -> int:
    geom = _geometry(cfg)
    profile = _profile(geom, cfg) if cfg.profile != "round" else random_admissible_profile(
        geom, cfg.seed, cfg.amplitude
    )
    phi = normalize_potential(
        geom, 2.0 * class_constants(geom).total_volume  # shift c = 2 keeps h domains safe
    )
    fs = ["pow:2", "exp", "scaled:0.5:pow:2"]
    hs = ["const:1", "id", "pow:2"]
    x = geom.grid.x
    us = {
        "quadratic": SampledFunction(geom.grid, x ** 2),
        "cubic": SampledFunction(geom.grid, x ** 3 + 0.5 * x ** 2),
        "random": _random_direction(geom, cfg.seed + 77),
    }
    orders = {}
    for fe in fs:
        for he in hs:
            for uname, u in us.items():
                dpath = var.DeformationPath(u)
                orders[f"{fe}|{he}|{uname}"] = var.convergence_order(
                    profile, parse_function(fe), parse_function(he), phi, dpath
                )
    # first-order drift of the equivariant integrals along the transports
    drift = 0.0
    for he in hs + ["exp"]:
        hdesc = parse_function(he)
        for u in us.values():
            dpath = var.DeformationPath(u)
            t_max = _safe_t_max(profile, dpath, 0.25)
            step = t_max / 8 if t_max else 0.0
            if not step:
                continue
            plus, phi_p = var.transport(profile, dpath, step, phi)
            minus, phi_m = var.transport(profile, dpath, -step, phi)
            d = (
                equivariant_integral(plus, hdesc, phi_p)
                - equivariant_integral(minus, hdesc, phi_m)
            ) / (2 * step)
            drift = max(drift, abs(d))
    report = {
        "kappa_theta": KAPPA_THETA,
        "kappa_phi": KAPPA_PHI,
        "convergence_orders": orders,
        "max_invariance_drift": drift,
    }
    out = _outdir(cfg)
    dump_json(report, os.path.join(out, "variation.json"))
    worst = min(orders.values())
    print(f"variation-check: min order {worst:.3f}, max drift {drift:.3e}")
    return 0


def cmd_sweep(cfg: RunConfig, f_list: str, h_list: str, alpha_threshold: float) -> int:
    geom = _geometry(cfg)
    phi = _potential(geom, cfg)
    rows = []
    for fe in [s.strip() for s in f_list.split(";") if s.strip()]:
        for he in [s.strip() for s in h_list.split(";") if s.strip()]:
            try:
                f = parse_function(fe)
                h = parse_function(he)
            except ConfigError as exc:
                rows.append((fe, he, "", "", "", "", f"parse_error:{exc}", ""))
                continue
            try:
                res = solve_critical(geom, f, h, phi)
            except CalabiLabError as exc:
                rows.append((fe, he, "", "", "", "", f"error:{type(exc).__name__}", ""))
                continue
            flagged = abs(res.alpha) > alpha_threshold and h.constant_value() is None
            rows.append(
                (
                    fe,
                    he,
                    fmt(res.alpha),
                    fmt(res.beta),
                    fmt(res.el_report.defect_affine),
                    fmt(res.el_report.defect_operator),
                    res.status,
                    "yes" if flagged else "no",
                )
            )
    out = _outdir(cfg)
    with open(os.path.join(out, "sweep.csv"), "w") as fh:
        fh.write("f,h,alpha,beta,defect_affine,defect_operator,status,flagged\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")
    print(f"sweep: {len(rows)} grid point(s) written")
    return 0


# -- argument plumbing --------------------------------------------------------
def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="run-config file (flat dotted keys)")
    p.add_argument("--geometry", help="cp1 | cpm:<m>")
    p.add_argument("--profile", help="round | random[:seed[:amplitude]] | file:<path>")
    p.add_argument("--f", dest="f_expr", help="f expression, e.g. exp, pow:2, scaled:0.5:pow:2")
    p.add_argument("--h", dest="h_expr", help="h expression, e.g. const:1, id, pow:2")
    p.add_argument("--target", type=float, help="normalization target for phi")
    p.add_argument("--nodes", type=int, help="collocation nodes (default 129)")
    p.add_argument("--seed", type=int, help="seed for the splitmix64 generator")
    p.add_argument("--tol", type=float, help="boundary/criticality tolerance")
    p.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="calabilab",
        description=(
            "Desk-scale laboratory for scalar-curvature functionals on "
            "circle-symmetric Kahler profiles.  CSV columns: profiles are "
            "(x,theta); psi/s exports are (x,value[,value_im]); sweep rows "
            "are (f,h,alpha,beta,defect_affine,defect_operator,status,flagged)."
        ),
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("evaluate", "invariance", "solve", "iterate", "variation-check", "sweep"):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "invariance":
            p.add_argument("--samples", type=int, help="number of random profiles")
        if name == "iterate":
            p.add_argument("--max-steps", type=int, dest="max_steps")
        if name == "sweep":
            p.add_argument("--f-list", default="id;pow:2;exp", help="semicolon-separated f grid")
            p.add_argument("--h-list", default="const:1;id", help="semicolon-separated h grid")
            p.add_argument("--alpha-threshold", type=float, default=1e-8)
    return ap


def _config_from_args(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    cfg.override(
        geometry=args.geometry,
        profile=args.profile,
        f_expr=args.f_expr,
        h_expr=args.h_expr,
        target=args.target,
        nodes=args.nodes,
        seed=args.seed,
        tol=args.tol,
        out=args.out,
        samples=getattr(args, "samples", None),
        max_steps=getattr(args, "max_steps", None),
    )
    return cfg


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "invariance":
            return cmd_invariance(cfg)
        if args.command == "solve":
            return cmd_solve(cfg)
        if args.command == "iterate":
            return cmd_iterate(cfg)
        if args.command == "variation-check":
            return cmd_variation_check(cfg)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.f_list, args.h_list, args.alpha_threshold)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CalabiLabError, OSError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
