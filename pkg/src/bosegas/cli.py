"""Command-line front end.

Subcommands: scatlen, upper, lower, optimize, sweep, cells, verify, mc.
Output is JSON or CSV with full parameter provenance; identical inputs
and seed produce byte-identical output.  Exit codes: 0 ok, 2 config
error, 3 physics-domain error, 4 oracle failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import lower_bound as lb
from . import upper_bounds as ub
from .cells import brute_force_distribution, closed_form_minimum
from .oracles import McConfig, mc_expectation_WR, run_verification, trial_energy_mc
from .potentials import PotentialError, parse_potential_config
from .scattering import energy_identity, solve_zero_energy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_ORACLE = 4

SWEEP_COLUMNS = [
    "Y",
    "ratio_lower",
    "ratio_upper",
    "ratio_lhy",
    "ratio_dyson_lower",
    "eps",
    "R_over_a",
    "ell_over_a",
    "fitted_C",
]


class DomainError(ValueError):
    """Physically invalid request (dense gas, b <= a, ...)."""


def _load_potential(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise PotentialError(f"cannot read potential file {path}: {exc}") from exc
    return parse_potential_config(text)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serializable: {type(o)}")


def _json_dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=True, default=_json_default) + "\n"


def _rows_to_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def _bound_to_dict(bound: ub.BoundResult) -> dict:
    return {
        "kind": bound.kind,
        "ratio": bound.ratio,
        "energy_per_particle": bound.energy_per_particle,
        "valid": bound.valid,
        "reason": bound.reason,
        "params": bound.params,
    }


# -- subcommands ---------------------------------------------------------------


def cmd_scatlen(args) -> int:
    pot = _load_potential(args.potential)
    sol = solve_zero_energy(pot, mu=args.mu)
    try:
        born = pot.born_integral()
    except PotentialError:
        born = None
    check_R = 4.0 * pot.effective_range
    ident = energy_identity(sol, check_R)
    result = {
        "kind": pot.kind,
        "mu": args.mu,
        "a": sol.a,
        "a_consistency": sol.a_consistency,
        "born": born,
        "identity_R": check_R,
        "residual": ident.residual,
    }
    if args.format == "json":
        _emit(args, _json_dump(result))
    else:
        cols = list(result)
        _emit(args, _rows_to_csv(cols, [[result[c] for c in cols]]))
    return EXIT_OK


def cmd_upper(args) -> int:
    if args.N is not None:
        if args.L is None or args.a is None:
            raise DomainError("finite-box mode needs --N, --L and --a")
        box = ub.FiniteBox(N=args.N, L=args.L)
        periodic = ub.upper_bound_periodic(box, args.a, args.mu)
        if not periodic.valid:
            raise DomainError(f"upper bound invalid: {periodic.reason}")
        out = {"periodic": _bound_to_dict(periodic)}
        if args.R0 is not None:
            out["finite_range"] = _bound_to_dict(
                ub.upper_bound_finite_range(box, args.a, args.R0, args.mu)
            )
        out["dirichlet"] = _bound_to_dict(ub.dirichlet_correction(periodic, args.L, mu=args.mu))
        _emit(args, _json_dump(out))
        return EXIT_OK
    if args.Y is None:
        raise DomainError("need either --Y or the finite-box flags")
    thermo = ub.upper_bound_thermo(args.Y)
    if not thermo.valid:
        raise DomainError(f"upper bound invalid: {thermo.reason}")
    dy_low, dy_up = ub.dyson_hard_sphere(args.Y)
    out = {
        "thermo": _bound_to_dict(thermo),
        "dyson_lower": _bound_to_dict(dy_low),
        "dyson_upper": _bound_to_dict(dy_up),
        "lhy": _bound_to_dict(ub.lhy_expansion(args.Y)),
    }
    _emit(args, _json_dump(out))
    return EXIT_OK


def _params_from_args(args) -> lb.LowerBoundParams:
    return lb.LowerBoundParams(
        eps=args.eps, R=args.R, ell=args.ell, R0=args.R0 if args.R0 is not None else args.a
    )


def cmd_lower(args) -> int:
    params = _params_from_args(args)
    if args.N is not None:
        if args.L is None:
            raise DomainError("finite-box mode needs --L")
        bound = lb.finite_box_lower_bound(args.N, args.L, args.a, args.mu, params)
    else:
        if args.Y is None:
            raise DomainError("need either --Y or --N/--L")
        bound = lb.thermo_lower_bound(args.Y, args.a, args.mu, params)
    if not bound.valid:
        raise DomainError(f"lower bound invalid: {bound.reason}")
    _emit(args, _json_dump(_bound_to_dict(bound)))
    return EXIT_OK


def cmd_optimize(args) -> int:
    if not 0.0 < args.Y < 1.0:
        raise DomainError("need 0 < Y < 1")
    res = lb.optimize_parameters(
        args.Y, args.a, args.mu, strategy=args.strategy, budget=args.budget
    )
    out = {
        "Y": args.Y,
        "a": args.a,
        "mu": args.mu,
        "strategy": res.strategy,
        "ratio": res.ratio,
        "deficit_sum": res.deficit_sum,
        "diagnostic": res.diagnostic,
        "params": {
            "eps": res.params.eps,
            "R": res.params.R,
            "ell": res.params.ell,
            "R0": res.params.R0,
            "exponents": [str(e) for e in res.params.exponents] if res.params.exponents else None,
            "constants": list(res.params.constants) if res.params.constants else None,
        },
    }
    _emit(args, _json_dump(out))
    return EXIT_OK


def _sweep_rows(args):
    if not (0.0 < args.Y_min < args.Y_max < 1.0):
        raise DomainError("need 0 < Y-min < Y-max < 1")
    Ys = np.geomspace(args.Y_min, args.Y_max, args.points)
    rows = []
    for Y in Ys:
        Y = float(Y)
        product = lb.optimize_parameters(Y, args.a, args.mu, strategy="ansatz", budget=args.budget)
        linear = lb.optimize_parameters(
            Y, args.a, args.mu, strategy="ansatz", budget=args.budget, objective="linearized"
        )
        upper = ub.upper_bound_thermo(Y).ratio
        lhy = ub.lhy_expansion(Y).ratio
        dyson = ub.DYSON_LOWER_RATIO
        params = product.params if product.ratio > 0 else linear.params
        fitted_c = (
            linear.deficit_sum / Y ** (1.0 / 17.0) if linear.deficit_sum is not None else float("nan")
        )
        rows.append(
            [
                float(Y),
                float(product.ratio),
                float(upper),
                float(lhy),
                float(dyson),
                float(params.eps),
                float(params.R / args.a),
                float(params.ell / args.a),
                float(fitted_c),
            ]
        )
    return rows


def cmd_sweep(args) -> int:
    rows = _sweep_rows(args)
    if args.format == "json":
        _emit(args, _json_dump([dict(zip(SWEEP_COLUMNS, row)) for row in rows]))
    else:
        _emit(args, _rows_to_csv(SWEEP_COLUMNS, rows))
    if args.plot:
        _write_sweep_plot(args.plot, rows)
    return EXIT_OK


def _write_sweep_plot(path: str, rows) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    data = np.array(rows, dtype=float)
    Y = data[:, 0]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(Y, data[:, 2], "o-", label="upper")
    ax.plot(Y, data[:, 3], "s-", label="reference expansion")
    ax.plot(Y, np.maximum(data[:, 1], 1e-300), "^-", label="lower (cells)")
    ax.plot(Y, data[:, 4], "--", label="hard-sphere lower")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("Y")
    ax.set_ylabel("energy ratio")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def cmd_cells(args) -> int:
    ks = [float(x) for x in args.k.split(",")]
    ps = [int(x) for x in args.p.split(",")]
    rows = []
    for k in ks:
        for p in ps:
            _, closed = closed_form_minimum(k, p)
            lp = brute_force_distribution(k, p)
            rows.append([k, p, closed, lp])
    if args.format == "json":
        cols = ["k", "p", "closed_form", "lp_value"]
        _emit(args, _json_dump([dict(zip(cols, row)) for row in rows]))
    else:
        _emit(args, _rows_to_csv(["k", "p", "closed_form", "lp_value"], rows))
    return EXIT_OK


def cmd_verify(args) -> int:
    checks = run_verification(fast=not args.full, seed=args.seed)
    report = {
        "all_passed": all(c.passed for c in checks),
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
    }
    _emit(args, _json_dump(report))
    return EXIT_OK if report["all_passed"] else EXIT_ORACLE


def cmd_mc(args) -> int:
    if args.mode == "trial-energy":
        if not (args.potential and args.N and args.L and args.b):
            raise DomainError("trial-energy mode needs --potential, --N, --L, --b")
        pot = _load_potential(args.potential)
        sol = solve_zero_energy(pot, mu=args.mu, r_max=max(10.0 * pot.effective_range, 1.5 * args.b))
        cfg = McConfig(seed=args.seed, n_samples=args.samples, burn_in=args.burn_in)
        est = trial_energy_mc(args.N, args.L, pot, args.b, sol, cfg)
        out = {
            "mode": args.mode,
            "N": args.N,
            "L": args.L,
            "b": args.b,
            "mu": args.mu,
            "a": sol.a,
            "seed": args.seed,
            "samples": args.samples,
            "energy": est.mean,
            "sigma": est.sigma,
            "n_effective": est.n_effective,
        }
    else:
        if not (args.n and args.ell and args.R is not None):
            raise DomainError("wr mode needs --n, --ell, --R")
        U = lb.soft_potential(args.R0_shell, args.R)
        cfg = McConfig(
            seed=args.seed, n_samples=args.samples, burn_in=args.burn_in, boundary=args.boundary
        )
        w, w2 = mc_expectation_WR(args.n, args.ell, U, cfg)
        low, high = lb.first_order_brackets(args.n, args.ell, args.R, args.R0_shell)
        out = {
            "mode": args.mode,
            "n": args.n,
            "ell": args.ell,
            "R": args.R,
            "R0_shell": args.R0_shell,
            "seed": args.seed,
            "samples": args.samples,
            "w_per_particle": w.mean,
            "w_sigma": w.sigma,
            "w2": w2.mean,
            "w2_sigma": w2.sigma,
            "bracket_low": low,
            "bracket_high": high,
        }
    _emit(args, _json_dump(out))
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bosegas",
        description="Scattering lengths and rigorous energy bounds for the dilute Bose gas.",
        epilog=(
            "Potential files are key=value lines: kind=hard-core|square-well|shells|"
            "tabulated|power-tail, with R0, V0, edges, heights, table=r:v ..., C, "
            "tail_exponent, cutoff as applicable."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--mu", type=float, default=1.0, help="hbar^2/2m (default 1)")
        p.add_argument("--format", choices=["json", "csv"], default="json")
        p.add_argument("--out", help="write to file instead of stdout")

    p = sub.add_parser("scatlen", help="scattering length, Born integral, identity residual")
    p.add_argument("--potential", required=True, help="potential config file")
    add_common(p)
    p.set_defaults(func=cmd_scatlen)

    p = sub.add_parser("upper", help="closed-form upper bounds and references")
    p.add_argument("--Y", type=float, help="dimensionless density 4*pi*rho*a^3/3")
    p.add_argument("--N", type=int, help="finite-box particle count")
    p.add_argument("--L", type=float, help="finite-box side")
    p.add_argument("--a", type=float, help="scattering length (finite-box mode)")
    p.add_argument("--R0", type=float, help="potential range for the finite-range bound")
    add_common(p)
    p.set_defaults(func=cmd_upper)

    p = sub.add_parser("lower", help="evaluate the cell-method lower bound at given parameters")
    p.add_argument("--Y", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--L", type=float)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--R0", type=float, help="potential range (default: a)")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--R", type=float, required=True)
    p.add_argument("--ell", type=float, required=True)
    add_common(p)
    p.set_defaults(func=cmd_lower)

    p = sub.add_parser("optimize", help="optimize the lower-bound parameters at a given Y")
    p.add_argument("--Y", type=float, required=True)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--strategy", choices=["ansatz", "free"], default="ansatz")
    p.add_argument("--budget", type=int, default=1, help="search-grid multiplier")
    add_common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("sweep", help="bounds over a log-spaced Y grid (CSV)")
    p.add_argument("--Y-min", dest="Y_min", type=float, required=True)
    p.add_argument("--Y-max", dest="Y_max", type=float, required=True)
    p.add_argument("--points", type=int, default=9)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--budget", type=int, default=1)
    p.add_argument("--plot", help="write a log-log SVG to this path")
    add_common(p)
    p.set_defaults(func=cmd_sweep, format="csv")

    p = sub.add_parser("cells", help="distribution minimum: closed form vs LP oracle")
    p.add_argument("--k", required=True, help="mean occupancy, comma separated")
    p.add_argument("--p", required=True, help="split point(s), comma separated")
    add_common(p)
    p.set_defaults(func=cmd_cells)

    p = sub.add_parser("verify", help="run the oracle suite and report pass/fail")
    p.add_argument("--full", action="store_true", help="full trial counts (slower)")
    p.add_argument("--seed", type=int, default=20260809)
    add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mc", help="one configured Monte-Carlo estimate")
    p.add_argument("--mode", choices=["trial-energy", "wr"], default="trial-energy")
    p.add_argument("--potential", help="potential config file (trial-energy mode)")
    p.add_argument("--N", type=int, help="particles (trial-energy mode)")
    p.add_argument("--L", type=float, help="box side (trial-energy mode)")
    p.add_argument("--b", type=float, help="trial-function cutoff radius")
    p.add_argument("--n", type=int, help="particles (wr mode)")
    p.add_argument("--ell", type=float, help="cell side (wr mode)")
    p.add_argument("--R", type=float, help="soft-shell outer radius (wr mode)")
    p.add_argument("--R0-shell", dest="R0_shell", type=float, default=0.0)
    p.add_argument("--boundary", choices=["periodic", "free"], default="free")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--burn-in", dest="burn_in", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    add_common(p)
    p.set_defaults(func=cmd_mc)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PotentialError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
