"""Command-line interface: pricing, densities, smiles, MC, calibration, diagnostics.

Subcommands
    price      series prices with per-order terms and the imaginary residue
    density    series Feynman-Kac density on a z grid
    smile      implied vols via pricing + numerical inversion
    iv-series  implied-vol expansion partial sums per strike
    iv-approx  closed-form second-order implied vol per strike
    mc         Euler Monte Carlo estimate
    calibrate  least-squares surface fit (JSON output)
    eps-bound  admissible perturbation size diagnostic

Output is CSV (10 significant digits) or JSON, deterministic for identical
invocations, to stdout or --out.  Exit codes: 0 success, 1 numerical/config
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .black_scholes import implied_vol
from .calibration import CalibrationSpec, calibrate, load_surface
from .config import load_model_config
from .iv_expansion import sigma_closed_form, sigma_series
from .model import epsilon_bound
from .monte_carlo import McConfig, mc_price
from .pricer import OptionSpec, fk_density, price_strikes
from .quadrature import QuadratureSpec

_FMT = "%.10g"


def _fmt(x) -> str:
    return _FMT % float(x)


def _parse_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise SystemExit(f"error: expected a comma-separated number list, got {text!r}")


def _quad_from_args(args) -> QuadratureSpec | None:
    overrides = {}
    if args.contour_imag is not None:
        overrides["contour_imag"] = args.contour_imag
    if args.quad_halfwidth is not None:
        overrides["half_width"] = args.quad_halfwidth
    if args.quad_nodes is not None:
        overrides["n_nodes"] = args.quad_nodes
    return QuadratureSpec(**overrides) if overrides else None


def _emit(args, header: list[str], rows: list[list[str]]):
    if args.format == "json":
        payload = [dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = [",".join(header)]
        lines += [",".join(row) for row in rows]
        text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(args, payload: dict):
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_price(args):
    params = load_model_config(args.config)
    quad = _quad_from_args(args)
    ks = np.asarray(_parse_list(args.k))
    values, terms, imag = price_strikes(
        params, args.t, args.y, ks, args.N, quad, kind=args.kind
    )
    header = ["t", "y", "k", "kind", "N", "price", "imag_residue"]
    header += [f"term_{n}" for n in range(args.N + 1)]
    rows = []
    for i, k in enumerate(ks):
        row = [_fmt(args.t), _fmt(args.y), _fmt(k), args.kind, str(args.N),
               _fmt(values[i]), _fmt(imag[i])]
        row += [_fmt(x) for x in terms[i]]
        rows.append(row)
    _emit(args, header, rows)


def _cmd_density(args):
    params = load_model_config(args.config)
    quad = _quad_from_args(args) or QuadratureSpec(contour_imag=0.0)
    zs = np.asarray(_parse_list(args.k))
    dens = fk_density(params, args.t, args.y, zs, args.N, quad)
    rows = [[_fmt(args.t), _fmt(args.y), _fmt(z), str(args.N), _fmt(p)]
            for z, p in zip(zs, np.atleast_1d(dens))]
    _emit(args, ["t", "y", "z", "N", "density"], rows)


def _smile_rows(args, ivs, ks):
    rows = []
    for k, iv in zip(ks, ivs):
        rows.append([_fmt(args.t), _fmt(args.y), _fmt(k),
                     _fmt(k - args.y), _fmt((k - args.y) / args.t)] + iv)
    return rows


def _cmd_smile(args):
    params = load_model_config(args.config)
    quad = _quad_from_args(args)
    ks = np.asarray(_parse_list(args.k))
    values, _, _ = price_strikes(params, args.t, args.y, ks, args.N, quad)
    ivs = [[_fmt(implied_vol(v, args.t, args.y, k))] for v, k in zip(values, ks)]
    _emit(args, ["t", "y", "k", "LM", "LMMR", "iv"], _smile_rows(args, ivs, ks))


def _cmd_iv_series(args):
    params = load_model_config(args.config)
    quad = _quad_from_args(args)
    ks = _parse_list(args.k)
    header = ["t", "y", "k", "LM", "LMMR"]
    header += [f"sigma_{n}" for n in range(args.N + 1)] + ["diverging"]
    ivs = []
    for k in ks:
        series = sigma_series(params, OptionSpec(args.t, args.y, k), args.N, quad)
        ivs.append([_fmt(s) for s in series.partial_sums] + [str(int(series.diverging))])
    _emit(args, header, _smile_rows(args, ivs, ks))


def _cmd_iv_approx(args):
    params = load_model_config(args.config)
    ks = _parse_list(args.k)
    ivs = [
        [_fmt(sigma_closed_form(params, OptionSpec(args.t, args.y, k), args.M, args.q))]
        for k in ks
    ]
    _emit(args, ["t", "y", "k", "LM", "LMMR", "sigma_2M"], _smile_rows(args, ivs, ks))


def _cmd_mc(args):
    params = load_model_config(args.config)
    ks = _parse_list(args.k)
    cfg = McConfig(n_paths=args.paths, dt=args.dt, seed=args.seed)
    rows = []
    for k in ks:
        est = mc_price(params, OptionSpec(args.t, args.y, k, kind=args.kind), cfg)
        rows.append([
            _fmt(args.t), _fmt(args.y), _fmt(k), args.kind, str(args.paths),
            _fmt(args.dt), str(args.seed), _fmt(est.price), _fmt(est.std_error),
            _fmt(est.n_defaulted / args.paths),
        ])
    _emit(args, ["t", "y", "k", "kind", "paths", "dt", "seed",
                 "price", "std_error", "default_fraction"], rows)


def _cmd_calibrate(args):
    surface = load_surface(args.surface)
    with open(args.spec_json) as fh:
        raw = json.load(fh)
    spec = CalibrationSpec(
        initial=raw["initial"],
        bounds={k: tuple(v) for k, v in raw["bounds"].items()},
        fixed=raw.get("fixed", {}),
        shared_jump=raw.get("shared_jump", True),
        order=raw.get("order", args.N),
        max_evals=raw.get("max_evals", 6000),
    )
    result = calibrate(surface, spec)
    _emit_json(args, {
        "fitted": result.fitted,
        "sse": result.sse,
        "rmse": result.rmse,
        "residuals": list(result.residuals),
        "out_of_band_quotes": list(result.out_of_band),
        "n_evaluations": result.n_evaluations,
        "converged": result.converged,
    })


def _cmd_eps_bound(args):
    params = load_model_config(args.config)
    bound = epsilon_bound(params, args.A, args.B, args.eta_norm)
    _emit(args, ["A", "B", "eta_norm", "eps_max"],
          [[_fmt(args.A), _fmt(args.B), _fmt(args.eta_norm), _fmt(bound)]])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locallevy",
        description="Pricing and implied-vol toolkit for local Levy-type models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="model parameter file")
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--contour-imag", dest="contour_imag", type=float, default=None)
        p.add_argument("--quad-nodes", dest="quad_nodes", type=int, default=None)
        p.add_argument("--quad-halfwidth", dest="quad_halfwidth", type=float, default=None)

    def add_option_args(p, n_default=6):
        p.add_argument("--t", type=float, required=True, help="maturity, years")
        p.add_argument("--y", type=float, default=0.0, help="initial log-price")
        p.add_argument("--k", required=True,
                       help="comma list of log-strikes (z grid for density)")
        p.add_argument("--N", type=int, default=n_default, help="series order")

    p = sub.add_parser("price", help="series option prices")
    add_common(p)
    add_option_args(p)
    p.add_argument("--kind", choices=("call", "put"), default="call")
    p.set_defaults(func=_cmd_price)

    p = sub.add_parser("density", help="series Feynman-Kac density")
    add_common(p)
    add_option_args(p)
    p.set_defaults(func=_cmd_density)

    p = sub.add_parser("smile", help="implied vols via pricing + inversion")
    add_common(p)
    add_option_args(p)
    p.set_defaults(func=_cmd_smile)

    p = sub.add_parser("iv-series", help="implied-vol expansion partial sums")
    add_common(p)
    add_option_args(p, n_default=5)
    p.set_defaults(func=_cmd_iv_series)

    p = sub.add_parser("iv-approx", help="closed-form second-order implied vol")
    add_common(p)
    add_option_args(p)
    p.add_argument("--M", type=int, default=10, help="operator truncation order")
    p.add_argument("--q", type=int, default=None, help="jump moment truncation")
    p.set_defaults(func=_cmd_iv_approx)

    p = sub.add_parser("mc", help="Euler Monte Carlo price")
    add_common(p)
    add_option_args(p)
    p.add_argument("--kind", choices=("call", "put"), default="call")
    p.add_argument("--paths", type=int, default=100_000)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("calibrate", help="least-squares surface calibration")
    add_common(p, config=False)
    p.add_argument("--surface", required=True, help="surface CSV path")
    p.add_argument("--spec-json", dest="spec_json", required=True,
                   help="JSON file with initial/bounds/fixed parameter blocks")
    p.add_argument("--N", type=int, default=6)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("eps-bound", help="admissible perturbation size")
    add_common(p)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--eta-norm", dest="eta_norm", type=float, required=True)
    p.set_defaults(func=_cmd_eps_bound)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():  # console entry point
    raise SystemExit(run())
