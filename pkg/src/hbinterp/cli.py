"""Command-line entry point.

Subcommands::

    hbinterp eval         --nodes FILE (--points FILE | --grid-n N) [--out FILE]
    hbinterp basis-dump   --nodes FILE (--points FILE | --grid-n N) [--out FILE]
    hbinterp converge     --function NAME --q Q [--levels L] [--K K] [--out FILE]
    hbinterp fill-distance --nodes FILE [--grid-n N]

Exit codes: 0 success, 2 validation error, 3 uncovered point, 4 I/O error.
Every output file starts with ``#`` lines echoing the effective
configuration after command-line overrides.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

import numpy as np

from hbinterp import io
from hbinterp.analysis import convergence_study, fill_distance, separation_distance
from hbinterp.errors import ConfigurationError, HBError
from hbinterp.geometry import Manifold, Patch, sample_patch
from hbinterp.interpolant import GLOBAL, LOCALIZED, Interpolant
from hbinterp.testfunctions import BUILTINS, builtin

log = logging.getLogger("hbinterp")


def _fmt(x):
    if x is None:
        return "null"
    if isinstance(x, float):
        return io.format_float(x)
    return str(x)


def _reference_fill_distance(nf, seed, factor=100):
    pts = np.array([n.point for n in nf.nodes])
    ref = sample_patch(nf.patch, factor * len(pts), "quasi-uniform", seed=seed)
    return fill_distance(pts, ref, nf.manifold)


def _load_interpolant(args):
    nf = io.read_nodes(args.nodes)
    weights = nf.weights
    if args.mu is not None:
        weights = replace(weights, mu=args.mu)
    if args.delta is not None:
        weights = replace(weights, delta=args.delta)
    if args.eps is not None:
        weights = replace(weights, near_node_tol=args.eps)
    mode = args.mode or nf.mode
    if mode == LOCALIZED and weights.delta is None:
        weights = replace(weights, delta=args.K * _reference_fill_distance(nf, args.seed))
    H = Interpolant(nf.patch, nf.nodes, weights, mode=mode, chart=nf.chart,
                    fallback_global=args.fallback_global)
    return nf, H


def _points(args, nf):
    if args.points:
        return io.read_points(args.points, nf.manifold), f"file {args.points}"
    if args.grid_n:
        pts = sample_patch(nf.patch, args.grid_n, "quasi-uniform", seed=args.seed)
        return pts, f"quasi-uniform grid n={args.grid_n} seed={args.seed}"
    raise ConfigurationError("give evaluation points with --points FILE or --grid-n N")


def _config_lines(command, args, H, source):
    w = H.weights
    return [
        f"command: {command}",
        f"nodes: {args.nodes}",
        f"points: {source}",
        f"mode: {H.mode}",
        f"mu: {_fmt(w.mu)}",
        f"delta: {_fmt(w.delta)}",
        f"bump_exponent: {_fmt(w.bump_exponent)}",
        f"near_node_tol: {_fmt(w.near_node_tol)}",
        f"fallback_global: {H.fallback_global}",
        f"k: {H.k}",
        f"q: {H.q}",
    ]


def _coord_columns(manifold):
    return [f"u{j}" for j in range(manifold.ambient_dim)]


def _out_path(args):
    return args.out if args.out else "-"


def _write(args, rows, columns, comments, footer=None):
    path = _out_path(args)
    if path == "-":
        for line in comments:
            print(f"# {line}")
        print(",".join(columns))
        for row in rows:
            print(",".join(io.format_cell(x) for x in row))
        if footer is not None:
            print("# fit: " + json.dumps(footer, sort_keys=True))
    else:
        io.write_results(path, rows, columns, comments, footer)


def cmd_eval(args):
    nf, H = _load_interpolant(args)
    pts, source = _points(args, nf)
    values = H.evaluate_batch(pts, workers=args.workers)
    columns = _coord_columns(nf.manifold) + ["H"]
    rows = [list(p) + [h] for p, h in zip(pts, values)]
    comments = _config_lines("eval", args, H, source)
    if args.function:
        f = builtin(args.function, nf.manifold.dim)
        fv = f(H.chart.forward(pts))
        columns += ["f", "error"]
        rows = [r + [a, abs(a - r[-1])] for r, a in zip(rows, fv)]
        comments.append(f"function: {args.function}")
    _write(args, rows, columns, comments)
    return 0


def cmd_basis_dump(args):
    nf, H = _load_interpolant(args)
    pts, source = _points(args, nf)
    columns = _coord_columns(nf.manifold) + [f"g{i}" for i in range(H.n)] + ["pou_residual"]
    rows = []
    for p in pts:
        g = H.basis_values(p)
        rows.append(list(p) + list(g) + [abs(float(np.sum(g)) - 1.0)])
    _write(args, rows, columns, _config_lines("basis-dump", args, H, source))
    return 0


def _study_patch(args):
    if args.manifold == "sphere":
        M = Manifold.sphere(1.0)
        return Patch(M, [0.0, 0.0, 1.0], args.radius)
    if args.manifold == "torus":
        M = Manifold.torus([float(p) for p in args.periods.split(",")])
        return Patch(M, np.zeros(M.dim), args.radius)
    M = Manifold.euclidean(args.dim)
    return Patch(M, np.zeros(M.dim), args.radius)


def cmd_converge(args):
    if args.function is None:
        raise ConfigurationError("converge needs --function")
    patch = _study_patch(args)
    f = builtin(args.function, patch.manifold.dim)
    res = convergence_study(f, patch, args.q, levels=args.levels, seed=args.seed, K=args.K,
                            n0=args.n0, n_eval=args.n_eval, mu=args.mu, workers=args.workers)
    comments = ["command: converge", f"manifold: {args.manifold}",
                f"patch_radius: {_fmt(patch.radius)}"]
    comments += [f"{k}: {_fmt(v)}" for k, v in res.params.items()]
    comments.append(f"chart_lipschitz: {_fmt(res.chart_lipschitz)}")
    if res.fit is not None:
        footer = {"slope": res.fit.slope, "intercept": res.fit.intercept,
                  "r_squared": res.fit.r_squared, "levels_used": list(res.fit.levels_used),
                  "predicted_order": args.q + 1}
    else:
        footer = {"skipped": res.skip_reason, "predicted_order": args.q + 1}
    _write(args, io.convergence_rows(res.records), io.CONVERGENCE_COLUMNS, comments, footer)
    if args.out:
        if res.fit is not None:
            print(f"fitted order {res.fit.slope:.3f} (r^2 = {res.fit.r_squared:.4f}), "
                  f"predicted {args.q + 1}")
        else:
            print(f"fit skipped: {res.skip_reason}")
    return 0


def cmd_fill_distance(args):
    nf = io.read_nodes(args.nodes)
    pts = np.array([n.point for n in nf.nodes])
    n_ref = args.grid_n or 100 * len(pts)
    ref = sample_patch(nf.patch, n_ref, "quasi-uniform", seed=args.seed)
    h = fill_distance(pts, ref, nf.manifold)
    sep = separation_distance(pts, nf.manifold) if len(pts) > 1 else float("nan")
    comments = ["command: fill-distance", f"nodes: {args.nodes}",
                f"reference: quasi-uniform n={n_ref} seed={args.seed}"]
    _write(args, [(len(pts), h, sep)], ["n", "h", "separation"], comments)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hbinterp", description="Hermite-Birkhoff interpolation on manifolds")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, nodes=True):
        if nodes:
            p.add_argument("--nodes", required=True, help="node file (JSON)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="output CSV (default: stdout)")
        p.add_argument("--workers", type=int, default=None,
                       help="threads for batch evaluation; output does not depend on it")

    def weights(p):
        p.add_argument("--mu", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--K", type=float, default=2.0,
                       help="delta = K * fill distance when delta is unset (default 2)")
        p.add_argument("--mode", choices=[GLOBAL, LOCALIZED])
        p.add_argument("--eps", type=float, help="near-node tolerance (fraction of diameter)")
        p.add_argument("--fallback-global", action="store_true",
                       help="use global weights at uncovered points")

    def grid(p):
        p.add_argument("--points", help="points file, one point per line")
        p.add_argument("--grid-n", type=int, help="generate a quasi-uniform grid of N points")

    p = sub.add_parser("eval", help="evaluate the interpolant")
    common(p); weights(p); grid(p)
    p.add_argument("--function", choices=BUILTINS, help="add f and error columns")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("basis-dump", help="dump cardinal basis values")
    common(p); weights(p); grid(p)
    p.set_defaults(func=cmd_basis_dump)

    p = sub.add_parser("converge", help="empirical convergence study")
    common(p, nodes=False)
    p.add_argument("--function", choices=BUILTINS)
    p.add_argument("--q", type=int, required=True, help="complete Taylor order at every node")
    p.add_argument("--levels", type=int, default=4)
    p.add_argument("--K", type=float, default=2.0)
    p.add_argument("--mu", type=float)
    p.add_argument("--manifold", choices=["sphere", "torus", "euclidean"], default="sphere")
    p.add_argument("--radius", type=float, default=0.8, help="patch geodesic radius")
    p.add_argument("--periods", default="1,1", help="torus periods, comma separated")
    p.add_argument("--dim", type=int, default=2, help="euclidean dimension")
    p.add_argument("--n0", type=int, default=50)
    p.add_argument("--n-eval", type=int, default=2000)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("fill-distance", help="fill and separation distance of a node file")
    common(p)
    p.add_argument("--grid-n", type=int, help="reference sample size (default 100 x nodes)")
    p.set_defaults(func=cmd_fill_distance)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except HBError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
