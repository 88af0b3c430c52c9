"""Command-line pipeline: synth -> dgmap -> unmix -> eval -> render.

Exit status is 0 on success, 1 on a usage error and 2 on a data error
(bad file, invalid values, solver failure).
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .core import FactorPair, SolverConfig
from .dgmap import estimate_dgmap
from .errors import DgsnmfError
from .metrics import evaluate
from .synth import SceneSpec, generate
from .unmix import normalize_pixels, run

logger = logging.getLogger(__name__)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _out_dir(path):
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


def cmd_synth(args):
    spec = SceneSpec(args.width, args.height, args.channels, args.k, args.transition_width,
                     args.noise, args.seed, args.profile)
    cube, truth = generate(spec)
    out = _out_dir(args.out)
    io.write_cube(cube, out / "cube.hscube")
    io.write_matrix(truth.endmembers, out / "M_true.csv")
    io.write_matrix(truth.abundances, out / "A_true.csv")
    print(f"wrote {cube.width}x{cube.height}x{cube.channels} cube and K={spec.k} truth to {out}")


def _dgmap_kwargs(args):
    return dict(sigma=args.sigma, alpha=args.alpha, epsilon=args.epsilon,
                window=args.window, beta=args.beta, measure=args.measure)


def cmd_dgmap(args):
    cube = io.read_cube(args.cube)
    initial, refined = estimate_dgmap(cube, **_dgmap_kwargs(args))
    out = _out_dir(args.out)
    for name, m in (("initial", initial), ("refined", refined)):
        io.write_dgmap(m, out / f"dgmap_{name}.csv")
        io.write_ppm(io.render_gray(m.scaled, cube.width, cube.height), out / f"dgmap_{name}.pgm")
    print(f"refined map: min {refined.scaled.min():.4f}, mean {refined.scaled.mean():.4f}, "
          f"max {refined.scaled.max():.4f}")


def cmd_unmix(args):
    if args.reg == "dg" and args.dgmap is None and not args.auto_dgmap:
        raise UsageError("unmix: --reg dg needs --dgmap PATH or --auto-dgmap")
    cube = io.read_cube(args.cube)
    dgmap = None
    if args.reg == "dg":
        if args.dgmap is not None:
            dgmap = io.read_dgmap(args.dgmap)
        else:
            _, dgmap = estimate_dgmap(cube, **_dgmap_kwargs(args))
    config = SolverConfig(lam=args.lam, xi=args.xi, regularizer=args.reg, dgmap=dgmap,
                          seed=args.seed, max_iters=args.max_iters, rel_tol=args.rel_tol,
                          init=args.init)
    factors, trace = run(cube, args.k, config)
    out = _out_dir(args.out)
    A = normalize_pixels(factors.abundances) if args.normalize_pixels else factors.abundances
    io.write_matrix(factors.endmembers, out / "M.csv")
    io.write_matrix(A, out / "A.csv")
    io.write_trace(trace, out / "trace.csv")
    print(f"{trace.iterations_run} iterations ({trace.stop_reason}), "
          f"objective {trace.objective_per_iter[-1]:.6g}")


def cmd_eval(args):
    est = FactorPair(io.read_matrix(args.m_hat), io.read_matrix(args.a_hat))
    truth = FactorPair(io.read_matrix(args.m_true), io.read_matrix(args.a_true))
    report = evaluate(est, truth, normalize_pixels=args.normalize_pixels)
    rows = list(report.rows())
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["endmember", "truth", "sad_rad", "sad_deg", "rmse"])
            for r in rows:
                w.writerow([r[0], r[1], f"{r[2]:.17g}", f"{r[3]:.17g}", f"{r[4]:.17g}"])
            w.writerow(["mean", "", f"{report.mean_sad:.17g}",
                        f"{np.degrees(report.mean_sad):.17g}", f"{report.mean_rmse:.17g}"])
    print(f"{'est':>4} {'truth':>5} {'SAD (rad)':>10} {'SAD (deg)':>10} {'RMSE':>10}")
    for i, j, s, d, r in rows:
        print(f"{i:>4} {j:>5} {s:>10.5f} {d:>10.3f} {r:>10.5f}")
    print(f"{'mean':>10} {report.mean_sad:>10.5f} {np.degrees(report.mean_sad):>10.3f} "
          f"{report.mean_rmse:>10.5f}")


def cmd_render(args):
    A = io.read_matrix(args.abundances)
    if args.gray is not None:
        row = A[args.gray]
        vmax = args.vmax if args.vmax is not None else max(row.max(), np.finfo(float).tiny)
        img = io.render_gray(row, args.width, args.height, vmax=vmax)
    else:
        img = io.render_pseudo_color(A, args.width, args.height)
    io.write_ppm(img, args.out)
    print(f"wrote {args.out}")


def _add_dgmap_flags(p):
    p.add_argument("--sigma", type=float, default=0.02, help="heat-kernel bandwidth")
    p.add_argument("--alpha", type=float, default=1e-5, help="fine-tuning strength")
    p.add_argument("--epsilon", type=float, default=1e-5, help="window regularizer")
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--beta", type=float, default=1e-8)
    p.add_argument("--measure", choices=("heat", "dot"), default="heat")


def build_parser():
    parser = _Parser(prog="dgsnmf", description="Data-guided sparse NMF for hyperspectral unmixing")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic scene with ground truth")
    p.add_argument("--width", type=int, default=20)
    p.add_argument("--height", type=int, default=20)
    p.add_argument("--channels", type=int, default=30)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--transition-width", type=int, default=3)
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise std")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", choices=("hard_regions", "linear_gradient"), default="hard_regions")
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("dgmap", help="estimate the data-guided map of a cube")
    p.add_argument("--cube", required=True)
    _add_dgmap_flags(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_dgmap)

    p = sub.add_parser("unmix", help="factorize a cube into endmembers and abundances")
    p.add_argument("--cube", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=0.1)
    p.add_argument("--xi", type=float, default=1e-8)
    p.add_argument("--reg", choices=("none", "l1", "lhalf", "dg"), default="none")
    p.add_argument("--dgmap", default=None, help="map file written by the dgmap command")
    p.add_argument("--auto-dgmap", action="store_true", help="estimate the map inline")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--rel-tol", type=float, default=1e-6)
    p.add_argument("--init", choices=("random", "data_pixels"), default="random")
    p.add_argument("--normalize-pixels", action="store_true",
                   help="write A with columns summing to one")
    _add_dgmap_flags(p)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_unmix)

    p = sub.add_parser("eval", help="score estimated factors against ground truth")
    p.add_argument("--m-hat", required=True)
    p.add_argument("--a-hat", required=True)
    p.add_argument("--m-true", required=True)
    p.add_argument("--a-true", required=True)
    p.add_argument("--normalize-pixels", action="store_true")
    p.add_argument("--out", default=None, help="CSV report path")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="render abundances as a PPM/PGM image")
    p.add_argument("--abundances", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--height", type=int, required=True)
    p.add_argument("--gray", type=int, default=None, metavar="ROW",
                   help="render one abundance row as a grayscale PGM")
    p.add_argument("--vmax", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def cli(argv=None):
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (DgsnmfError, OSError, ValueError, IndexError) as exc:
        print(f"dgsnmf: {exc}", file=sys.stderr)
        return 2
    return 0


def main():
    sys.exit(cli())
