"""Command-line interface.

Exit codes: 0 all assertions passed, 2 an asserted bound failed,
3 horizon or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .coding import allowed_blocks, build_towers, code_word, towers_to_csv
from .equidist import decay_profile
from .errors import BudgetError, DegenerateError, HorizonError, InvariantError
from .harness import ExperimentConfig, run_experiment, sample_points
from .iet import apply, rotation_iet
from .numbers import CFExpansion, cf_expand, diophantine_report, rat_from_str, rat_to_str
from .targets import RadiusSpec, hit_ratio_series, window_correlation
from .undetermined import spike_alpha, spike_witness, undetermined_series


def _alpha_arg(args) -> tuple[Fraction, CFExpansion]:
    if getattr(args, "alpha_cf", None):
        cf = CFExpansion.from_str(args.alpha_cf)
        return cf.value(), cf
    alpha = rat_from_str(args.alpha)
    return alpha, cf_expand(alpha)


def _emit(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_cf(args) -> int:
    if args.action == "expand":
        cf = cf_expand(rat_from_str(args.value), max_depth=args.max_depth)
        print(cf.to_str())
        if args.convergents:
            for k, (p, q) in enumerate(cf.convergents):
                print(f"{k}: {p}/{q}")
    else:
        cf = CFExpansion.from_str(args.value)
        rep = diophantine_report(cf, C=args.cutoff)
        print(f"max_quotient: {rep.max_quotient}")
        print(f"violations: {list(rep.violations)}")
        print(f"final_log_defect: {rep.log_defect[-1][1]!r}")
    return 0


def cmd_orbit(args) -> int:
    alpha, _ = _alpha_arg(args)
    T = rotation_iet(alpha)
    x = rat_from_str(args.x)
    if args.code:
        print(",".join(map(str, code_word(T, x, args.code))))
    else:
        print(rat_to_str(apply(T, x, args.k)))
    return 0


def cmd_blocks(args) -> int:
    alpha, _ = _alpha_arg(args)
    table = allowed_blocks(rotation_iet(alpha), args.n)
    _emit(table.to_csv(), args.out)
    return 0


def cmd_towers(args) -> int:
    alpha, _ = _alpha_arg(args)
    towers = build_towers(rotation_iet(alpha), args.n)
    _emit(towers_to_csv(towers), args.out)
    return 0


def cmd_hits(args) -> int:
    alpha, _ = _alpha_arg(args)
    T = rotation_iet(alpha)
    series = hit_ratio_series(
        T,
        rat_from_str(args.x),
        rat_from_str(args.center),
        RadiusSpec.parse(args.radius),
        [int(t) for t in args.checkpoints.split(",")],
    )
    _emit(series.to_csv(), args.out)
    return 0


def cmd_correlate(args) -> int:
    alpha, _ = _alpha_arg(args)
    val = window_correlation(
        rotation_iet(alpha),
        rat_from_str(args.center),
        RadiusSpec.parse(args.radius),
        args.ni,
        args.nj,
        budget=args.budget,
    )
    print(rat_to_str(val))
    return 0


def cmd_equidist(args) -> int:
    alpha, _ = _alpha_arg(args)
    T = rotation_iet(alpha)
    if args.x and args.x_prime:
        x, xp = rat_from_str(args.x), rat_from_str(args.x_prime)
    else:
        x, xp = sample_points(args.master_seed, 2)
    prof = decay_profile(T, rat_from_str(args.xi), args.base_index, x, xp, args.L_max)
    _emit(prof.to_csv(), args.out)
    print(json.dumps({"fitted_slope": prof.fitted_slope}))
    return 0


def cmd_undet(args) -> int:
    alpha, cf = _alpha_arg(args)
    x = rat_from_str(args.x) if args.x else sample_points(args.master_seed, 1)[0]
    series = undetermined_series(alpha, x, [int(t) for t in args.checkpoints.split(",")], cf=cf)
    _emit(series.to_csv(), args.out)
    return 0


def cmd_spike(args) -> int:
    base = CFExpansion.from_str(args.base_cf)
    spiked, achieved = spike_alpha(base, args.m, args.K)
    report = spike_witness(spiked, args.m)
    payload = json.loads(report.to_json())
    payload["C_achieved"] = rat_to_str(achieved)
    _emit(json.dumps(payload, indent=1) + "\n", args.out)
    return 0


def cmd_run(args) -> int:
    config = ExperimentConfig.parse(Path(args.config).read_text())
    if args.out:
        config = ExperimentConfig(**{**config.__dict__, "out": args.out})
    report = run_experiment(config)
    print(report.json_text())
    print(f"wall_time: {report.wall_time:.2f}s", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ietlab")
    sub = p.add_subparsers(dest="command", required=True)

    def add_alpha(sp):
        g = sp.add_mutually_exclusive_group(required=True)
        g.add_argument("--alpha", help="rotation angle p/q")
        g.add_argument("--alpha-cf", help="comma-separated partial quotients")

    sp = sub.add_parser("cf", help="continued fraction expand / diophantine report")
    sp.add_argument("action", choices=["expand", "report"])
    sp.add_argument("value", help="p/q for expand, quotient list for report")
    sp.add_argument("--max-depth", type=int, default=10**6)
    sp.add_argument("--convergents", action="store_true")
    sp.add_argument("--cutoff", type=int, default=2)
    sp.set_defaults(func=cmd_cf)

    sp = sub.add_parser("orbit", help="iterate or code an orbit")
    add_alpha(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--code", type=int, default=0, help="emit a word of this length instead")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("blocks", help="allowed blocks CSV")
    add_alpha(sp)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_blocks)

    sp = sub.add_parser("towers", help="tower partition CSV")
    add_alpha(sp)
    sp.add_argument("-n", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_towers)

    sp = sub.add_parser("hits", help="shrinking-target hit series CSV")
    add_alpha(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--center", default="1/2")
    sp.add_argument("--radius", required=True)
    sp.add_argument("--checkpoints", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_hits)

    sp = sub.add_parser("correlate", help="exact window correlation integral")
    add_alpha(sp)
    sp.add_argument("--center", default="1/2")
    sp.add_argument("--radius", required=True)
    sp.add_argument("--ni", type=int, required=True)
    sp.add_argument("--nj", type=int, required=True)
    sp.add_argument("--budget", type=int, default=2_000_000)
    sp.set_defaults(func=cmd_correlate)

    sp = sub.add_parser("equidist", help="two-orbit discrepancy decay profile")
    add_alpha(sp)
    sp.add_argument("--xi", default="1/10")
    sp.add_argument("--base-index", type=int, default=3)
    sp.add_argument("--L-max", type=int, default=8)
    sp.add_argument("--x")
    sp.add_argument("--x-prime")
    sp.add_argument("--master-seed", type=int, default=1)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_equidist)

    sp = sub.add_parser("undet", help="undetermined-point series CSV")
    add_alpha(sp)
    sp.add_argument("--x")
    sp.add_argument("--master-seed", type=int, default=1)
    sp.add_argument("--checkpoints", required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_undet)

    sp = sub.add_parser("spike", help="spiked-quotient no-limit witness JSON")
    sp.add_argument("--base-cf", required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--K", type=int, required=True)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spike)

    sp = sub.add_parser("run", help="run an experiment config file")
    sp.add_argument("config")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_run)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"assertion failed: {exc}", file=sys.stderr)
        return 2
    except (HorizonError, DegenerateError, BudgetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
