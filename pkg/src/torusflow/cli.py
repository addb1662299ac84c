"""Command-line entry point.

Subcommands:

    run                  drive a flow described by a config file
    resume               continue from a checkpoint (config embedded there)
    verify-collar        collar-geometry identities
    verify-poincare      empirical quadratic-differential Poincare ratios
    verify-mollify       mollification-estimate ratios on the disc
    verify-hopf-identity dbar(hopf) identity residuals and inequality
    verify-odes          lattice-velocity cross-consistency and decay rate

Exit codes: 0 success/convergence, 2 verification failure, 3 configuration
error, 4 runtime abort (energy guard, lattice floor, or projection leaving
its tube).  All state comes from flags and config files; environment
variables are never consulted.
"""

from __future__ import annotations

import argparse
import sys

from . import flow, harness, hyperbolic, mollify
from .config import parse_config
from .errors import ConfigError, FlowAbort, ProjectionError
from .generators import covering_map
from .lattice import LatticeParams

EXIT_OK = 0
EXIT_VERIFY_FAILED = 2
EXIT_CONFIG = 3
EXIT_ABORT = 4


def _cmd_run(args) -> int:
    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    cfg = cfg.with_overrides(seed=args.seed, out=args.out)
    try:
        result = flow.run(cfg, out_dir=cfg.out)
    except (FlowAbort, ProjectionError) as exc:
        print(f"abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    s = result.state
    print(f"stop={result.stop_reason} t={s.t!r} steps={s.step_index} "
          f"E={s.energy!r} a={s.a!r} b={s.b!r} "
          f"tension_l2={s.stats.tension_l2!r} projhopf_l2={s.stats.projhopf_l2!r} "
          f"gradient_minima={len(result.gradient_record)}")
    return EXIT_OK


def _cmd_resume(args) -> int:
    try:
        result = flow.resume(args.checkpoint, out_dir=args.out)
    except (FlowAbort, ProjectionError) as exc:
        print(f"abort: {exc}", file=sys.stderr)
        return EXIT_ABORT
    except (OSError, ValueError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    s = result.state
    print(f"stop={result.stop_reason} t={s.t!r} steps={s.step_index} "
          f"E={s.energy!r} a={s.a!r} b={s.b!r}")
    return EXIT_OK


def _cmd_verify_collar(args) -> int:
    lengths = tuple(float(p) for p in args.lengths.split(","))
    ok, rows = hyperbolic.verify_collar(lengths, c=args.systole)
    print("ell,X,w,integral,bound,width_residual,bound_residual")
    for r in rows:
        print(",".join(repr(float(v)) for v in r))
    print(f"identities={'ok' if ok else 'FAILED'} lengths={len(rows)}")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def _cmd_verify_poincare(args) -> int:
    grids = tuple(int(g) for g in args.grids.split(","))
    failed = False
    overall = 0.0
    total = skipped = 0
    print("grid,trial,ratio,status")
    for n in grids:
        spec = harness.TrialSpec(seed=args.seed, grid=(n, n), modes=args.modes,
                                 trials=args.trials)
        report = harness.run_poincare_trials(spec)
        for k, ratio in report.rows:
            status = "skipped" if ratio is None else "ok"
            print(f"{n},{k},{'' if ratio is None else repr(ratio)},{status}")
        overall = max(overall, report.max_value)
        total += report.trials
        skipped += report.skipped
        failed = failed or report.violations > 0
    print(f"max_ratio={overall!r} trials={total} skipped={skipped}")
    return EXIT_VERIFY_FAILED if failed else EXIT_OK


def _cmd_verify_mollify(args) -> int:
    eps_values = tuple(float(e) for e in args.eps.split(","))
    rows, max_ratio, skipped, violations = mollify.run_mollify_trials(
        args.grid_n, args.trials, args.seed, eps_values)
    print("eps,trial,ratio,status")
    for eps, k, ratio in rows:
        status = "skipped" if ratio is None else "ok"
        print(f"{eps!r},{k},{'' if ratio is None else repr(ratio)},{status}")
    print(f"max_ratio={max_ratio!r} trials={len(rows)} skipped={skipped}")
    return EXIT_VERIFY_FAILED if violations else EXIT_OK


def _cmd_verify_hopf(args) -> int:
    grids = tuple(int(g) for g in args.grids.split(","))
    resid = harness.residual_refinement(grids, args.seed)
    print("grid,residual")
    for n, r in resid:
        print(f"{n},{r!r}")
    for (n1, r1), (n2, r2) in zip(resid, resid[1:]):
        print(f"refinement {n1}->{n2}: residual ratio {r1 / r2!r}")
    report = harness.run_hopf_inequality_trials((args.trial_grid, args.trial_grid),
                                                args.trials, args.seed)
    print("trial,lhs_over_bound")
    for k, ratio in report.rows:
        print(f"{k},{ratio!r}")
    print(f"max_ratio={report.max_value!r} trials={report.trials} skipped={report.skipped}")
    if report.violations:
        print(f"inequality violated on {report.violations} trials", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def _cmd_verify_odes(args) -> int:
    # velocity-form cross-consistency along a short trajectory
    from .config import RunConfig

    cfg = RunConfig(target="flat-torus", grid_h=args.grid, grid_w=args.grid,
                    init="covering", degree_p=2, degree_q=1, a0=0.3, b0=1.4,
                    eta2=2.0, t_max=args.time, tol_converge=1e-12, cadence=50)
    result = flow.run(cfg)
    worst_a = worst_b = 0.0
    u = covering_map((args.grid, args.grid), 2, 1)
    for row in result.trace:
        lat = LatticeParams.from_ab(row.a, row.b)
        adot, bdot = flow.lattice_velocity_ab(u, lat, cfg.eta2)
        aldot, bedot = flow.lattice_velocity_alphabeta(u, lat, cfg.eta2)
        worst_a = max(worst_a, abs(adot - (aldot * lat.beta + lat.alpha * bedot)))
        worst_b = max(worst_b, abs(bdot - 2.0 * lat.beta * bedot))
    print(f"cross_consistency max |adot - (alphadot beta + alpha betadot)| = {worst_a!r}")
    print(f"cross_consistency max |bdot - 2 beta betadot| = {worst_b!r}")

    # decay-rate identity at a tenth of the stability bound
    state = flow.make_state(covering_map((args.grid, args.grid), 2, 1), 0.3, 1.4,
                            eta2=2.0, cfl_fraction=0.02)
    worst_rel = 0.0
    for _ in range(args.steps):
        rate = flow.energy_decay_rate(state)
        new = flow.step(state)
        rel = abs((new.energy - state.energy) / (new.t - state.t) - rate) / abs(rate)
        worst_rel = max(worst_rel, rel)
        state = new
    print(f"decay_rate max relative deviation over {args.steps} steps = {worst_rel!r}")

    ok = worst_a < 1e-10 and worst_b < 1e-10 and worst_rel < 0.05
    print(f"verify-odes {'ok' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="torusflow", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="drive a flow from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="output directory (trace, checkpoints)")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("resume", help="continue from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_resume)

    p = sub.add_parser("verify-collar", help="collar identities")
    p.add_argument("--lengths", default="0.01,0.1,0.5,1,2,5")
    p.add_argument("--systole", type=float, default=1.0)
    p.set_defaults(func=_cmd_verify_collar)

    p = sub.add_parser("verify-poincare", help="Poincare-ratio trials")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grids", default="64")
    p.add_argument("--modes", type=int, default=3)
    p.set_defaults(func=_cmd_verify_poincare)

    p = sub.add_parser("verify-mollify", help="mollification-ratio trials")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", default="0.05,0.1,0.2")
    p.add_argument("--grid-n", type=int, default=256)
    p.set_defaults(func=_cmd_verify_mollify)

    p = sub.add_parser("verify-hopf-identity", help="dbar(hopf) identity and inequality")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--grids", default="64,128")
    p.add_argument("--trial-grid", type=int, default=64)
    p.set_defaults(func=_cmd_verify_hopf)

    p = sub.add_parser("verify-odes", help="velocity cross-consistency, decay rate")
    p.add_argument("--grid", type=int, default=32)
    p.add_argument("--time", type=float, default=1.0)
    p.add_argument("--steps", type=int, default=50)
    p.set_defaults(func=_cmd_verify_odes)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


def entrypoint() -> None:
    sys.exit(main())
