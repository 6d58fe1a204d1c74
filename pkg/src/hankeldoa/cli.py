"""Command line front end: ``doa synth|sample|complete|doa|bench``.

Exit status is 0 on success, 2 for invalid input and 3 for I/O failures.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings

import numpy as np

from . import __version__
from .array_model import (SamplingMask, Snapshot, load_scene, parse_indices, project,
                          read_snapshot_csv, synthesize_snapshot, write_snapshot_csv)
from .completion import AdmmConfig, complete, write_trace_csv
from .doa import estimate_doa, match_detections, write_estimate_csv, write_report_json
from .exceptions import HankelDoaError
from .harness import COMPLETED_RANK_TOL, ExperimentConfig, emit_outputs, run_campaign
from .hankel import HankelShape
from .leverage import leverage_scores, select_elements, write_plan_csv, write_scores_csv

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 2, 3


class UsageError(ValueError):
    pass


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _cmd_synth(args):
    scene = load_scene(args.scene)
    snap = synthesize_snapshot(scene, args.n, seed=args.seed, noise_std=args.noise_std)
    write_snapshot_csv(snap, args.out)


def _cmd_sample(args):
    full = read_snapshot_csv(args.snapshot, args.n)
    if not full.is_full:
        raise UsageError(f"{args.snapshot} must hold every element")
    n = full.n
    chosen = [args.indices is not None, args.uniform is not None, args.scores_from is not None]
    if sum(chosen) != 1:
        raise UsageError("give exactly one of --indices, --uniform or --scores-from")
    if args.indices is not None:
        mask = SamplingMask(n, parse_indices([args.indices]))
    elif args.uniform is not None:
        if not 1 <= args.uniform <= n:
            raise UsageError(f"--uniform must lie in 1..{n}")
        rng = np.random.default_rng(args.seed)
        mask = SamplingMask(n, tuple(rng.choice(n, args.uniform, replace=False) + 1))
    else:
        if args.m is None:
            raise UsageError("--scores-from needs --m")
        partial = read_snapshot_csv(args.scores_from, n)
        shape = HankelShape.square(n)
        rank = args.rank
        if rank is None and not partial.is_full:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                rank = complete(partial, shape).factor_rank
        scores = leverage_scores(partial, shape, rank=rank)
        plan = select_elements(scores, args.m, args.mode, seed=args.seed)
        mask = plan.mask
        if args.scores_out:
            write_scores_csv(scores, args.scores_out)
        if args.plan_out:
            write_plan_csv(plan, args.plan_out)
    write_snapshot_csv(project(full, mask), args.out)


def _cmd_complete(args):
    obs = read_snapshot_csv(args.snapshot, args.n)
    if obs.is_full:
        obs = project(obs, SamplingMask.full(obs.n))
    cfg = AdmmConfig(rho=args.rho, factor_rank=args.factor_rank, max_iters=args.max_iters,
                     primal_tol=args.primal_tol)
    truth = None
    if args.truth:
        truth = read_snapshot_csv(args.truth, obs.n)
        if not truth.is_full:
            raise UsageError(f"{args.truth} must hold every element")
        truth = truth.values
    res = complete(obs, cfg=cfg, rank_estimate=args.rank_estimate, truth=truth,
                   trace=bool(args.trace))
    write_snapshot_csv(Snapshot(res.y_hat), args.out)
    if args.trace and res.state is not None:
        write_trace_csv(res.state, args.trace)
    info = {"converged": res.converged, "iters_used": res.iters_used,
            "final_residual": res.final_residual, "factor_rank": res.factor_rank,
            "nmse_vs_truth": res.nmse_vs_truth}
    print(json.dumps(info))


def _cmd_doa(args):
    snap = read_snapshot_csv(args.snapshot, args.n)
    if not snap.is_full:
        raise UsageError(f"{args.snapshot} has missing elements; run `doa complete` first")
    if args.r == "auto":
        r = leverage_scores(snap, rank_tolerance=COMPLETED_RANK_TOL).rank_used
        r = max(1, min(r, (snap.n - 1) // 2))
    else:
        try:
            r = int(args.r)
        except ValueError:
            raise UsageError(f"--r must be an integer or 'auto', got {args.r!r}") from None
    est = estimate_doa(snap.values, r, args.method)
    write_estimate_csv(est, args.out)
    if args.scene:
        report = match_detections(load_scene(args.scene), est, args.threshold)
        if args.report:
            write_report_json(report, args.report)
        print(json.dumps({"all_detected": report.all_detected,
                          "n_detected": report.n_detected,
                          "false_positives": len(report.false_positives)}))


def _cmd_bench(args):
    try:
        with open(args.config) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.config}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{args.config}: expected a JSON object")
    if args.seed is not None:
        data["base_seed"] = args.seed
    cfg = ExperimentConfig.from_dict(data)
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    records, summary = run_campaign(cfg, jobs=args.jobs)
    emit_outputs(records, summary, args.out, config=cfg, include_timing=args.timing)
    for row in summary:
        print(f"m={row['m']:<4d} {row['mode']:<24s} recovery={row['recovery_rate']:.3f} "
              f"mean_nmse={row['mean_nmse']:.3g}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="doa", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a full snapshot from a scene JSON")
    s.add_argument("--scene", required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--noise-std", type=float, default=0.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_synth)

    s = sub.add_parser("sample", help="keep a subset of a full snapshot")
    s.add_argument("--snapshot", required=True, help="full snapshot CSV")
    s.add_argument("--n", type=int)
    s.add_argument("--indices", help='explicit 1-based elements, e.g. "1,4,9-12"')
    s.add_argument("--uniform", type=int, metavar="M", help="M elements uniformly at random")
    s.add_argument("--scores-from", metavar="CSV",
                   help="partial snapshot whose leverage scores drive the selection")
    s.add_argument("--m", type=int)
    s.add_argument("--mode", choices=["top-m", "probabilistic"], default="top-m")
    s.add_argument("--rank", type=int)
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--scores-out")
    s.add_argument("--plan-out")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sample)

    s = sub.add_parser("complete", help="fill the missing elements of a snapshot")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--n", type=int, help="array size when trailing elements are missing")
    s.add_argument("--rho", type=float, default=1e3)
    s.add_argument("--factor-rank", type=int)
    s.add_argument("--rank-estimate", type=int)
    s.add_argument("--max-iters", type=int, default=2000)
    s.add_argument("--primal-tol", type=float, default=1e-7)
    s.add_argument("--truth", help="full snapshot CSV for the NMSE")
    s.add_argument("--trace", metavar="CSV", help="write the iteration trace here")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_complete)

    s = sub.add_parser("doa", help="estimate source directions from a full snapshot")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--n", type=int)
    s.add_argument("--r", default="auto")
    s.add_argument("--method", choices=["matrix-pencil", "prony"], default="matrix-pencil")
    s.add_argument("--scene", help="ground-truth scene JSON for matching")
    s.add_argument("--threshold", type=float, default=0.005)
    s.add_argument("--report", help="detection report JSON (needs --scene)")
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_doa)

    s = sub.add_parser("bench", help="run a Monte Carlo campaign")
    s.add_argument("--config", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--seed", type=_u64, help="overrides base_seed from the config")
    s.add_argument("--timing", action="store_true", help="add wall-clock seconds to trials.csv")
    s.set_defaults(func=_cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except OSError as exc:
        print(f"doa: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (HankelDoaError, ValueError, KeyError, TypeError) as exc:
        print(f"doa: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
