"""Command-line entry point: ``kkp <subcommand> [options] --out DIR``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from kkplab import ansatz
from kkplab.diagnostics import charges, claws, stability, symmetry
from kkplab.diagnostics.integrals import parse_f
from kkplab.io import ConfigError, atomic_write_text, format_value, parse_config, write_csv
from kkplab.model import (LineWave, ModelParams, NoSolitonError, c_of_theta, c_of_theta_extremum,
                          soliton_profile, stationary_angle)
from kkplab.spectral import SolverDivergence

log = logging.getLogger("kkplab")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _numbers(text: str, exact: bool = False) -> list:
    try:
        vals = [Fraction(s.strip()) for s in text.split(",") if s.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals if exact else [float(v) for v in vals]


def _exact_list(text):
    return _numbers(text, exact=True)


def _float_list(text):
    return _numbers(text)


def _number(text):
    return _numbers(text)[0]


def _report(out: Path, name: str, lines: list[str]):
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    atomic_write_text(out / name, text)


def _label(v) -> str:
    return format_value(v).replace("/", "_")


# soliton

def cmd_soliton(args) -> int:
    for b in args.beta:
        if not b < 0:
            raise UsageError(f"beta must be negative for sech-type solitons (got {format_value(b)})")
    xi = np.linspace(args.xi_min, args.xi_max, args.n)
    summary = []
    sweeps = [("kappa", k) for k in args.kappa] + ([("zero_background", None)] if args.zero_background else [])
    for kind, kappa in sweeps:
        cols, header = [xi], ["xi"]
        for b in args.beta:
            params = ModelParams(b, args.sigma)
            if kind == "kappa":
                wave = LineWave.from_kappa(params, kappa, args.mu)
            else:
                wave = LineWave.zero_background(params, args.mu)
            cols.append(soliton_profile(params, wave, xi))
            header.append(f"U_beta{_label(b)}")
            p = wave.p
            summary.append([kind, b, None if kappa is None else kappa, args.mu, wave.nu, p, wave.q,
                            wave.r, "positive" if p > 0 else "negative" if p < 0 else "zero"])
        fname = f"soliton_kappa_{_label(kappa)}.csv" if kind == "kappa" else "soliton_zero_background.csv"
        write_csv(args.out / fname, header, np.column_stack(cols).tolist())
    write_csv(args.out / "soliton_summary.csv",
              ["sweep", "beta", "kappa", "mu", "nu", "p", "q", "r", "background"], summary)
    for row in summary:
        print(f"{row[0]} beta={format_value(row[1])} kappa={format_value(row[2])}: "
              f"p={format_value(row[5])} q={format_value(row[6])} ({row[8]} background)")
    return EXIT_OK


# kinematics

def _beta_for_d(d: Fraction) -> float:
    """beta < 0 with (6 beta/13)^2 = d."""
    return -13.0 * math.sqrt(float(d)) / 6.0


def cmd_kinematics(args) -> int:
    n = args.n_theta
    half = 0.5 * math.pi
    theta = -half + math.pi * np.arange(1, n + 1) / (n + 1)
    features = []
    for sigma in args.sigma:
        cols, header = [theta], ["theta"]
        for d in args.d:
            params = ModelParams(_beta_for_d(d), sigma)
            cols.append(c_of_theta(params, theta))
            header.append(f"c_d{_label(d)}")
            ext = c_of_theta_extremum(params)
            zero = stationary_angle(params)
            features.append([sigma, d, float(params.beta), None if ext is None else ext[0],
                             None if ext is None else ext[1], zero])
        tag = "p1" if sigma == 1 else "m1"
        write_csv(args.out / f"kinematics_sigma_{tag}.csv", header, np.column_stack(cols).tolist())
    write_csv(args.out / "kinematics_features.csv",
              ["sigma", "d", "beta", "theta_max", "c_max", "theta_zero"], features)
    for s, d, b, tm, cm, tz in features:
        msg = f"sigma={s:+d} (6beta/13)^2={format_value(d)}:"
        if tm is not None:
            msg += f" c_max={format_value(cm)} at theta={format_value(tm)}"
        elif s == 1:
            msg += " c decreases monotonically in |theta|"
        if tz is not None:
            msg += f" c=0 at theta={format_value(tz)}"
        print(msg)
    return EXIT_OK


# verify-ansatz

def cmd_verify_ansatz(args) -> int:
    report = ansatz.verify_family(args.betas, args.kappas)
    lines = report.lines()
    _report(args.out, "ansatz_report.txt", lines)
    write_csv(args.out / "ansatz_grid.csv",
              ["beta", "kappa", "C1", "C2", "reference_C1", "reference_C2", "passed"],
              [[s.beta, s.kappa, s.C1, s.C2, s.reference_C1, s.reference_C2, s.passed]
               for s in report.samples])
    return EXIT_OK if report.passed else EXIT_FAIL


# verify-claws

def cmd_verify_claws(args) -> int:
    params = ModelParams(args.beta, args.sigma)
    params.require_soliton()
    wave = LineWave.zero_background(params, args.mu)
    claw_ids = (1, 2, 3, 4, 5) if args.claw == "all" else (int(args.claw),)
    fs = parse_f(args.f)
    point = tuple(args.point)
    studies = claws.all_studies(params, wave, point, fs, claw_ids, h0=args.h0, variant=args.variant)
    rows, summary, lines = [], [], []
    lines.append(f"conservation laws on the zero-background soliton beta={format_value(args.beta)} "
                 f"sigma={args.sigma:+d} mu={format_value(args.mu)} at (x,y,t)={point}, "
                 f"variant={args.variant}")
    ok_all = True
    for st in studies:
        for k, (h, r) in enumerate(zip(st.steps, st.residuals)):
            rows.append([st.claw_id, st.f_name, h, r, st.orders[k - 1] if k else None])
        ok = st.passed(args.min_order, args.tol)
        ok_all &= ok
        summary.append([st.claw_id, st.f_name, st.observed_order, st.best_residual, ok])
        lines.append(f"{'PASS' if ok else 'FAIL'} law {st.claw_id} f={st.f_name}: "
                     f"order {st.observed_order:.3f}, best |R| {st.best_residual:.3e}")
    write_csv(args.out / "claws_convergence.csv", ["claw", "f", "h", "residual", "order"], rows)
    write_csv(args.out / "claws_summary.csv", ["claw", "f", "order", "best_residual", "passed"], summary)

    if not args.skip_extras:
        rect = charges.Rectangle(-args.half_width, args.half_width, -args.half_height, args.half_height)
        crow = []
        for cid in charges.CHARGES:
            vals = [charges.closed_form_charge(cid, params, wave, rect.shrunk(s)) for s in (0.0, 0.25, 0.5)]
            spread = max(vals) - min(vals)
            ok = max(abs(v) for v in vals) <= args.tol_extras and spread <= args.tol_extras
            ok_all &= ok
            crow.append([cid] + vals + [spread, ok])
            lines.append(f"{'PASS' if ok else 'FAIL'} charge {cid}: "
                         + ", ".join(f"{v:.3e}" for v in vals) + f" (spread {spread:.3e})")
        write_csv(args.out / "charges.csv", ["charge", "outer", "middle", "inner", "spread", "passed"], crow)
        srow = []
        for gen in symmetry.GENERATORS:
            for f in fs:
                for eps in (0.1, 0.5):
                    rep = symmetry.symmetry_action_check(gen, f, eps, params, wave)
                    ok = rep.passed(args.tol_extras)
                    ok_all &= ok
                    srow.append([gen, f.name, eps, rep.max_residual, rep.n_points, ok])
                    lines.append(rep.line(args.tol_extras))
        write_csv(args.out / "symmetries.csv",
                  ["generator", "f", "eps", "max_residual", "points", "passed"], srow)
    lines.append("PASS" if ok_all else "FAIL")
    _report(args.out, "claws_report.txt", lines)
    return EXIT_OK if ok_all else EXIT_FAIL


# simulate

def cmd_simulate(args) -> int:
    from kkplab.experiments import run_simulation

    cfg = parse_config(args.config)
    try:
        result = run_simulation(cfg, args.out)
    except SolverDivergence as exc:
        print(f"FAIL: {exc}")
        return EXIT_FAIL
    lines = [f"simulated to t={format_value(result.final.t)} with {len(result.records)} records"]
    ok_all = True
    for name, value, limit, ok in result.checks():
        ok_all &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} drift {name}: {value:.3e} (limit {limit:g})")
    lines.append("PASS" if ok_all else "FAIL")
    _report(args.out, "simulate_report.txt", lines)
    return EXIT_OK if ok_all else EXIT_FAIL


# stability

def cmd_stability(args) -> int:
    speed = args.speed
    ode = ansatz.rescaled_ode_check(speed=speed)
    ks = [Fraction(j, 4) for j in range(-400, 401) if j]
    sym = ansatz.fourier_symbol_positivity(ks, speed)
    lines = ode.lines()
    lines.append(f"{'PASS' if sym.passed else 'FAIL'}: s(k) > 0 at {len(ks)} sampled k != 0 "
                 f"(min {sym.minimum}, s(0) = {sym.symbol_at_zero})")
    rows = []
    for L in args.L:
        rep = stability.stability_integral(int(round(L * args.points_per_unit)) // 2 * 2, L, float(speed))
        rows.append([rep.L, rep.n, rep.speed, rep.I, rep.projected_mean, rep.symbol_min])
        lines.extend(rep.lines())
    write_csv(args.out / "stability.csv", ["L", "n", "speed", "I", "projected_mean", "symbol_min"], rows)
    ok = ode.passed and sym.passed
    lines.append("PASS" if ok else "FAIL")
    _report(args.out, "stability_report.txt", lines)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kkp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.set_defaults(func=func)
        return p

    p = add("soliton", cmd_soliton, "soliton profiles for kappa sweeps and zero background")
    p.add_argument("--beta", type=_exact_list, default=[Fraction(-k) for k in (1, 2, 3, 4)])
    p.add_argument("--kappa", type=_exact_list, default=[Fraction(8), Fraction(-5)])
    p.add_argument("--no-zero-background", dest="zero_background", action="store_false")
    p.add_argument("--sigma", type=int, choices=(1, -1), default=1)
    p.add_argument("--mu", type=lambda s: _exact_list(s)[0], default=Fraction(0))
    p.add_argument("--xi-min", type=_number, default=-40.0)
    p.add_argument("--xi-max", type=_number, default=40.0)
    p.add_argument("--n", type=int, default=801)

    p = add("kinematics", cmd_kinematics, "c(theta) curves of zero-background waves")
    p.add_argument("--d", type=_exact_list, default=[Fraction(1), Fraction(2), Fraction(4), Fraction(10)],
                   help="values of (6 beta/13)^2")
    p.add_argument("--sigma", type=lambda s: [int(v) for v in s.split(",")], default=[1, -1])
    p.add_argument("--n-theta", type=int, default=719)

    p = add("verify-ansatz", cmd_verify_ansatz, "exact certification of the sech^4 family")
    p.add_argument("--betas", type=_exact_list, default=list(ansatz.DEFAULT_BETAS))
    p.add_argument("--kappas", type=_exact_list, default=list(ansatz.DEFAULT_KAPPAS))

    p = add("verify-claws", cmd_verify_claws, "conservation laws, charges and symmetry actions")
    p.add_argument("--claw", default="all", choices=("all", "1", "2", "3", "4", "5"))
    p.add_argument("--f", default="1,t,t2")
    p.add_argument("--beta", type=_number, default=-1.0)
    p.add_argument("--sigma", type=int, choices=(1, -1), default=1)
    p.add_argument("--mu", type=_number, default=0.5)
    p.add_argument("--point", type=_float_list, default=[0.7, 0.3, 0.4])
    p.add_argument("--h0", type=_number, default=None)
    p.add_argument("--variant", choices=claws.VARIANTS, default="corrected")
    p.add_argument("--min-order", type=_number, default=3.5)
    p.add_argument("--tol", type=_number, default=1e-7)
    p.add_argument("--tol-extras", type=_number, default=1e-8)
    p.add_argument("--half-width", type=_number, default=30.0)
    p.add_argument("--half-height", type=_number, default=10.0)
    p.add_argument("--skip-extras", action="store_true", help="conservation laws only")

    p = add("simulate", cmd_simulate, "pseudospectral line-soliton run from a config file")
    p.add_argument("--config", type=Path, required=True)

    p = add("stability", cmd_stability, "rescaled ODE, symbol positivity and the integral I")
    p.add_argument("--speed", type=lambda s: Fraction(s), default=Fraction(0),
                   help="speed term added to the operator (e.g. 12/35)")
    p.add_argument("--L", type=_float_list, default=[100.0, 200.0])
    p.add_argument("--points-per-unit", type=_number, default=40.0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "verify-claws" and len(args.point) != 3:
        print("error: --point needs x,y,t", file=sys.stderr)
        return EXIT_USAGE
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except (UsageError, ConfigError, NoSolitonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
