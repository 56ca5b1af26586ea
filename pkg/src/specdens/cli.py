"""Command-line frontend: generate matrices, run estimators, emit CSV/JSON.

Subcommands: gen (write a generated matrix), bounds (spectral interval), dos
(one estimator run -> CSV + JSON sidecar), exact (dense-oracle blurred
density), compare (method x degree sweep table), heatcap (normalized C_v per
method). Outputs are deterministic for a fixed (config, seed): reruns are
byte-identical apart from the sidecar wall time.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 oracle-cap violation.
"""

import argparse
import json
import os
import sys

import numpy as np

from .compare import (
    ALL_METHODS,
    estimate_dos,
    run_method_comparison,
)
from .density import DEFAULT_GRID_POINTS, RegularizationKernel, interval_grid
from .errors import NumericalFailure, OracleCapExceeded
from .lanczos import RitzQuadrature
from .matrix import (
    DEFAULT_BUMP_HEIGHT,
    DEFAULT_BUMP_WIDTH,
    DEFAULT_BUMPS,
    as_operator,
    estimate_spectral_interval,
    generate_modified_laplacian_2d,
    load_matrix_market,
    save_matrix_market,
)
from .metrics import default_temperatures, heat_capacity
from .reference import dense_eigensolve, exact_regularized_dos
from .stochastic import ProbeVectorSource

THREADS_ENV_VAR = "SPECDENS_THREADS"


def _parse_grid_shape(text):
    try:
        nx, ny = text.lower().split("x")
        return int(nx), int(ny)
    except ValueError as exc:
        raise ValueError(f"expected NXxNY (e.g. 30x25), got {text!r}") from exc


def _parse_bump(text):
    parts = text.split(",")
    if len(parts) not in (2, 4):
        raise ValueError(
            f"expected CX,CY or CX,CY,HEIGHT,WIDTH for --bump, got {text!r}"
        )
    vals = [float(p) for p in parts]
    if len(vals) == 2:
        vals += [DEFAULT_BUMP_HEIGHT, DEFAULT_BUMP_WIDTH]
    return tuple(vals)


def _load_matrix(args):
    if args.matrix is not None:
        return load_matrix_market(args.matrix)
    if args.laplacian2d is not None:
        nx, ny = _parse_grid_shape(args.laplacian2d)
        bumps = tuple(_parse_bump(b) for b in args.bump) if args.bump else DEFAULT_BUMPS
        return generate_modified_laplacian_2d(nx, ny, bumps)
    raise ValueError("no matrix source: pass --matrix FILE or --laplacian2d NXxNY")


def _add_matrix_args(parser):
    parser.add_argument("--matrix", help="Matrix Market file to load")
    parser.add_argument("--laplacian2d", metavar="NXxNY",
                        help="generate the modified 2-D Laplacian, e.g. 30x25")
    parser.add_argument("--bump", action="append", metavar="CX,CY[,H,W]",
                        help="Gaussian potential bump (repeatable); "
                             "defaults to the bundled pair")


def _threads(args):
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV_VAR)
    return int(env) if env else None


def _interval(matrix, args):
    return estimate_spectral_interval(matrix, lanczos_steps=args.bound_steps,
                                      margin=args.margin, seed=args.seed)


def _add_bound_args(parser):
    parser.add_argument("--bound-steps", type=int, default=20,
                        help="Lanczos steps for the eigenvalue bounds")
    parser.add_argument("--margin", type=float, default=0.01,
                        help="relative widening of the estimated interval")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="ascii", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(repr(x) if isinstance(x, float) else str(x)
                              for x in row) + "\n")


def _write_sidecar(path, payload):
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_gen(args):
    nx, ny = _parse_grid_shape(args.laplacian2d)
    bumps = tuple(_parse_bump(b) for b in args.bump) if args.bump else DEFAULT_BUMPS
    mat = generate_modified_laplacian_2d(nx, ny, bumps)
    save_matrix_market(mat, args.out)
    print(f"wrote {mat.n} x {mat.n} matrix ({mat.csr.nnz} stored entries) to {args.out}")
    return 0


def cmd_bounds(args):
    matrix = _load_matrix(args)
    interval = _interval(matrix, args)
    print(json.dumps({"lambda_lb": interval.lambda_lb,
                      "lambda_ub": interval.lambda_ub}))
    return 0


def cmd_dos(args):
    matrix = _load_matrix(args)
    if args.method in ("dgl", "lanczos") and args.sigma is None:
        raise ValueError(f"method {args.method} requires --sigma")
    if args.nvec < 1:
        raise ValueError("--nvec must be at least 1")
    if args.degree < 0:
        raise ValueError("--degree must be non-negative")
    interval = _interval(matrix, args)
    source = ProbeVectorSource(args.probes, args.seed, matrix.n)
    est = estimate_dos(
        matrix, interval, args.method, args.degree, source, args.nvec,
        sigma=args.sigma, eta=args.eta, grid_points=args.grid_points,
        threads=_threads(args), product_formula=args.product_formula,
    )
    _write_csv(args.out, "lambda,phi",
               zip(est.lambda_grid.tolist(), est.density.tolist()))
    sidecar = {
        "method": args.method,
        "M": args.degree,
        "n_vec": args.nvec,
        "seed": args.seed,
        "matvec_count": est.params["matvec_count"],
        "wall_time_s": est.params["wall_time_s"],
    }
    if args.method == "haydock":
        sidecar["eta"] = est.params["eta"]
    elif args.sigma is not None:
        sidecar["sigma"] = args.sigma
    _write_sidecar(args.out + ".json", sidecar)
    print(f"wrote {args.out} ({len(est.lambda_grid)} points), "
          f"{est.params['matvec_count']} MATVECs")
    return 0


def cmd_exact(args):
    matrix = _load_matrix(args)
    spectrum = dense_eigensolve(matrix)
    interval = _interval(matrix, args)
    kernel = RegularizationKernel(args.kernel,
                                  args.sigma if args.kernel == "gaussian" else args.eta)
    grid = interval_grid(interval, args.grid_points)
    est = exact_regularized_dos(spectrum, kernel, grid, interval)
    _write_csv(args.out, "lambda,phi",
               zip(est.lambda_grid.tolist(), est.density.tolist()))
    _write_sidecar(args.out + ".json", {
        "method": "exact", "kernel": args.kernel, "width": kernel.width,
        "n": spectrum.n,
    })
    print(f"wrote {args.out} ({len(grid)} points)")
    return 0


def cmd_compare(args):
    matrix = _load_matrix(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    degrees = [int(d) for d in args.degrees.split(",") if d.strip()]
    interval = _interval(matrix, args)
    rows = run_method_comparison(
        matrix, methods, degrees, sigma=args.sigma, eta=args.eta,
        n_vec=args.nvec, reps=args.reps, seed=args.seed,
        probe_kind=args.probes, grid_points=args.grid_points,
        threads=_threads(args), interval=interval,
    )
    _write_csv(args.out, "method,degree,matvec_count,error_mean,error_std,mass_mean",
               [(r.method, r.degree, r.matvec_count,
                 r.error_mean, r.error_std, r.mass_mean) for r in rows])
    width = max(len(m) for m in methods)
    for r in rows:
        print(f"{r.method:<{width}}  M={r.degree:<4d} matvecs={r.matvec_count:<8d} "
              f"error={r.error_mean:.3e} +- {r.error_std:.1e}  mass={r.mass_mean:.4f}")
    return 0


def cmd_heatcap(args):
    matrix = _load_matrix(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    interval = _interval(matrix, args)
    temps = default_temperatures(args.t_min, args.t_max, args.t_points)
    os.makedirs(args.out_dir, exist_ok=True)
    written = []
    for method in methods:
        if method == "exact":
            spectrum = dense_eigensolve(matrix)
            curve = heat_capacity(spectrum, temps)
        else:
            source = ProbeVectorSource(args.probes, args.seed, matrix.n)
            est = estimate_dos(
                matrix, interval, method, args.degree, source, args.nvec,
                sigma=args.sigma, eta=args.eta, grid_points=args.grid_points,
                threads=_threads(args),
            )
            if "ritz_nodes" in est.params:
                quad = RitzQuadrature(theta=est.params["ritz_nodes"],
                                      tau_sq=est.params["ritz_weights"])
                curve = heat_capacity(quad, temps)
            else:
                curve = heat_capacity(est, temps)
        path = os.path.join(args.out_dir, f"heatcap_{method}.csv")
        _write_csv(path, "T,Cv_normalized", zip(temps.tolist(), curve.tolist()))
        written.append(path)
    print("wrote " + ", ".join(written))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="specdens",
        description="spectral density estimation for sparse symmetric matrices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a matrix and write it as Matrix Market")
    p.add_argument("--laplacian2d", metavar="NXxNY", required=True)
    p.add_argument("--bump", action="append", metavar="CX,CY[,H,W]")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bounds", help="estimate the spectral interval")
    _add_matrix_args(p)
    _add_bound_args(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("dos", help="run one density estimator")
    _add_matrix_args(p)
    _add_bound_args(p)
    p.add_argument("--method", required=True, choices=ALL_METHODS)
    p.add_argument("--degree", type=int, required=True,
                   help="polynomial degree / Lanczos steps M")
    p.add_argument("--nvec", type=int, default=100)
    p.add_argument("--sigma", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probes", default="gaussian",
                   choices=("gaussian", "rademacher", "basis"))
    p.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    p.add_argument("--product-formula", action="store_true",
                   help="compute Chebyshev moments from half the MATVECs")
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_dos)

    p = sub.add_parser("exact", help="dense-oracle blurred density (small matrices)")
    _add_matrix_args(p)
    _add_bound_args(p)
    p.add_argument("--kernel", default="gaussian", choices=("gaussian", "lorentzian"))
    p.add_argument("--sigma", type=float, default=0.35)
    p.add_argument("--eta", type=float, default=0.35)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("compare", help="method x degree sweep with repetitions")
    _add_matrix_args(p)
    _add_bound_args(p)
    p.add_argument("--methods", required=True,
                   help="comma-separated method names")
    p.add_argument("--degrees", required=True,
                   help="comma-separated degrees, e.g. 20,40,60,80,100")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--eta", type=float)
    p.add_argument("--nvec", type=int, default=100)
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probes", default="gaussian",
                   choices=("gaussian", "rademacher", "basis"))
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--threads", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("heatcap", help="normalized heat-capacity curves per method")
    _add_matrix_args(p)
    _add_bound_args(p)
    p.add_argument("--methods", required=True,
                   help="comma-separated methods; 'exact' uses the dense oracle")
    p.add_argument("--degree", type=int, default=40)
    p.add_argument("--nvec", type=int, default=100)
    p.add_argument("--sigma", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--probes", default="gaussian",
                   choices=("gaussian", "rademacher", "basis"))
    p.add_argument("--grid-points", type=int, default=DEFAULT_GRID_POINTS)
    p.add_argument("--t-min", type=float, default=0.05)
    p.add_argument("--t-max", type=float, default=5.0)
    p.add_argument("--t-points", type=int, default=40)
    p.add_argument("--threads", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_heatcap)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OracleCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericalFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
