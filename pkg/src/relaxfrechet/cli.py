"""Command-line entry point: ``relaxfrechet {estimate,median1d,experiment,scan,diag}``.

Exit codes: 0 ok, 2 usage, 3 input validation, 4 resource cap, 5 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

import numpy as np

from .errors import InputError, NumericError, ResourceCapError
from .exact1d import SIGMA_MODES, median_interval, two_step_median_1d
from .frechet import EmpiricalMeasure, FrechetParams, covariance_kernel, load_samples_csv, relaxed_mean_set
from .metric_core import EuclideanPoints, diameter, dudley_report, load_matrix_csv, load_points_csv
from .rates import RelaxationSchedule, parse_rate
from .simulate import (
    config_from_dict,
    gaussian_sup_estimate,
    gnuplot_script,
    load_config,
    model_from_dict,
    run_experiment,
    threshold_scan,
)
from .twostep import DEFAULT_DELTA, two_step_estimate

EXIT_USAGE, EXIT_INPUT, EXIT_RESOURCE, EXIT_NUMERIC = 2, 3, 4, 5


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _space_and_samples(args):
    """Build (space, sample ids, candidate ids or None) from --space/--points/--data."""
    data = load_samples_csv(args.data)
    if args.space or args.points:
        space = load_matrix_csv(args.space) if args.space else load_points_csv(args.points)
        ids = space.ids(np.asarray(data).reshape(-1))
        cand = None
        if args.candidates:
            cand = space.ids(load_samples_csv(args.candidates).reshape(-1))
        return space, ids, cand
    # coordinates given directly: samples are points, candidates default to the samples
    pts = np.atleast_2d(np.asarray(data, dtype=float).T).T
    n = pts.shape[0]
    if args.candidates:
        extra = np.atleast_2d(np.asarray(load_samples_csv(args.candidates), dtype=float).T).T
        space = EuclideanPoints(np.vstack([pts, extra]))
        return space, np.arange(n), np.arange(n, n + extra.shape[0])
    return EuclideanPoints(pts), np.arange(n), np.arange(n)


def cmd_estimate(args) -> str:
    space, ids, cand = _space_and_samples(args)
    meas = EmpiricalMeasure.from_samples(space, ids)
    if args.epsilon is not None:
        return relaxed_mean_set(meas, FrechetParams(args.p, cand, args.epsilon)).to_json()
    return two_step_estimate(meas, cand, args.p, args.delta).to_json()


def cmd_median1d(args) -> str:
    y = np.asarray(load_samples_csv(args.data), dtype=float)
    if y.ndim != 1:
        raise InputError("median1d expects one real number per row")
    if args.two_step:
        return two_step_median_1d(y, args.delta, args.mode).to_json()
    if args.epsilon is None:
        raise InputError("median1d needs --epsilon or --two-step")
    return json.dumps(median_interval(y, args.epsilon).to_dict())


def cmd_experiment(args) -> str:
    raw = load_config(args.config)
    if args.threads is not None:
        raw["threads"] = args.threads
    cfg = config_from_dict(raw, os.path.dirname(os.path.abspath(args.config)))
    report = run_experiment(cfg)
    if args.plot:
        _emit(gnuplot_script(args.out or "results.csv"), args.plot)
    return report.to_csv()


def cmd_scan(args) -> str:
    raw = load_config(args.config)
    model = model_from_dict(raw["model"], os.path.dirname(os.path.abspath(args.config)))
    fam = raw["family"]
    family = parse_rate(fam) if isinstance(fam, str) else RelaxationSchedule.from_dict(fam)
    res = threshold_scan(
        model, family, raw["c_grid"], raw["n_grid"], int(raw["trials"]), int(raw["seed"]),
        raw.get("error_mode", "full_hausdorff"), float(raw.get("delta_h", 0.5)),
        float(raw.get("sign", 1.0)), int(raw.get("burn_in", 0)),
        args.threads if args.threads is not None else raw.get("threads"),
    )
    return res.to_csv()


def cmd_diag(args) -> str:
    if not (args.space or args.points):
        raise InputError("diag needs --space or --points")
    space = load_matrix_csv(args.space) if args.space else load_points_csv(args.points)
    ids = space.all_ids()
    diam = diameter(space, ids)
    if args.radii:
        grid = [float(r) for r in args.radii.split(",")]
    else:
        top = diam if diam > 0 else 1.0
        grid = list(np.linspace(top / args.n_radii, top, args.n_radii))
    out = {"diameter": diam, "covering": dudley_report(space, ids, grid).to_dict()}
    if args.data:
        meas = EmpiricalMeasure.from_samples(space, np.asarray(load_samples_csv(args.data)).reshape(-1))
        members = relaxed_mean_set(meas, FrechetParams(args.p, None, args.epsilon)).members
        kern = covariance_kernel(meas, members, args.p)
        est, se = gaussian_sup_estimate(kern, kern.pairs(), args.draws, args.seed)
        out["gaussian_sup"] = {"members": list(members), "estimate": est, "stderr": se,
                               "draws": args.draws, "seed": args.seed}
    return json.dumps(out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="relaxfrechet", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def space_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--space", help="CSV distance matrix (n rows x n columns, no header)")
        g.add_argument("--points", help="CSV of Euclidean points, one per row")

    e = sub.add_parser("estimate", help="two-step (or fixed-epsilon) relaxed Frechet mean set")
    space_args(e)
    e.add_argument("--data", required=True, help="samples: point ids, or coordinates if no space is given")
    e.add_argument("--candidates", help="candidate ids (or coordinates) restricting the search")
    e.add_argument("--p", type=float, default=2.0)
    e.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    e.add_argument("--epsilon", type=float, help="fixed relaxation instead of the two-step estimator")
    e.add_argument("--out")
    e.set_defaults(func=cmd_estimate)

    m = sub.add_parser("median1d", help="exact relaxed median interval on the real line")
    m.add_argument("--data", required=True)
    g = m.add_mutually_exclusive_group()
    g.add_argument("--epsilon", type=float)
    g.add_argument("--two-step", action="store_true")
    m.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    m.add_argument("--mode", choices=SIGMA_MODES, default="exact")
    m.add_argument("--out")
    m.set_defaults(func=cmd_median1d)

    x = sub.add_parser("experiment", help="Monte Carlo error frequencies from a JSON config")
    x.add_argument("--config", required=True)
    x.add_argument("--out")
    x.add_argument("--threads", type=int)
    x.add_argument("--plot", help="also write a gnuplot script reading --out")
    x.set_defaults(func=cmd_experiment)

    s = sub.add_parser("scan", help="error frequency and trajectory proxy across a c grid")
    s.add_argument("--config", required=True)
    s.add_argument("--out")
    s.add_argument("--threads", type=int)
    s.set_defaults(func=cmd_scan)

    d = sub.add_parser("diag", help="covering numbers, Dudley integral and Gaussian supremum")
    space_args(d)
    d.add_argument("--radii", help="comma-separated increasing radii")
    d.add_argument("--n-radii", type=int, default=20)
    d.add_argument("--data", help="sample ids; enables the Gaussian supremum estimate")
    d.add_argument("--p", type=float, default=2.0)
    d.add_argument("--epsilon", type=float, default=0.0)
    d.add_argument("--draws", type=int, default=100_000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--out")
    d.set_defaults(func=cmd_diag)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _emit(args.func(args), args.out)
    except ResourceCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, OSError, KeyError) as exc:
        msg = f"missing config key {exc}" if isinstance(exc, KeyError) else str(exc)
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
