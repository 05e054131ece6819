"""Command-line surface tying the solvers together.

Subcommands: solve (exact and assisted optima on a channel file), approx
(certified approximation for deterministic channels), hardness (planted
value-query experiments), tensor (solve a tensor power).  Every command
emits one canonical JSON report; with --verify a failed inequality check
turns into exit code 4.

Exit codes: 0 success, 2 bad input, 3 size or enumeration cap exceeded,
4 failed checks under --verify.  Relative --out and --log paths land in
$BCC_WORKDIR when it is set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from .approx import approximate_dqg, degree_upper_bound
from .channels import (
    DeterministicChannel,
    NORMALIZATION_TOL,
    channel_graph,
    tensor_power,
    to_deterministic,
)
from .errors import (
    EnumerationCapExceededError,
    InvariantViolationError,
    NotDeterministicError,
    SizeCapExceededError,
    ToolkitError,
    ValidationError,
)
from .exact import (
    DEFAULT_ENUM_CAP,
    code_from_partitions,
    joint_success,
    solve_dqg,
    solve_joint,
    solve_ns_dec,
    solve_sum,
)
from .files import load_channel
from .hardness import (
    AdaptiveBisection,
    DEFAULT_DELTA,
    RandomSubsets,
    SingletonSweep,
    build_instance,
    leak_probability,
    materialize_channel,
    optimal_welfare,
    run_query_experiment,
    welfare_gap,
)
from .nsprograms import build_ns_joint, build_ns_sum, solve_ns
from .reporting import DEFAULT_CHECK_TOL, Report
from .simplex import lp_write_text

EXIT_OK, EXIT_INVALID, EXIT_CAP, EXIT_CHECK_FAILED = 0, 2, 3, 4
WORKDIR_ENV = "BCC_WORKDIR"
ALL_QUANTITIES = ("joint", "sum", "ns", "ns-sum", "ns-dec")


def _resolve(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    workdir = os.environ.get(WORKDIR_ENV)
    if workdir and not p.is_absolute():
        p = Path(workdir) / p
    return p


def _as_table(channel):
    """Dense table plus the deterministic view when one exists."""
    if isinstance(channel, DeterministicChannel):
        return channel.to_table(), channel
    try:
        return channel, to_deterministic(channel)
    except NotDeterministicError:
        return channel, None


def _expand_which(which) -> tuple[str, ...]:
    wanted = []
    for w in which:
        for name in ALL_QUANTITIES if w == "all" else (w,):
            if name not in wanted:
                wanted.append(name)
    return tuple(wanted)


def _code_witness(code) -> dict:
    return {"encoder": code.encoder, "decoder1": code.decoder1,
            "decoder2": code.decoder2}


def _solve_quantities(report: Report, table, det, k1: int, k2: int,
                      wanted, args) -> None:
    """Compute the requested optima and cross-check every pair the run admits."""
    q = report.quantities
    tol = args.check_tol
    exact = getattr(args, "exact", False)
    cap = getattr(args, "enum_cap", DEFAULT_ENUM_CAP)

    if "joint" in wanted:
        rep = solve_joint(table, k1, k2, cap=cap)
        q["S"] = rep.value
        report.witnesses["joint_code"] = _code_witness(rep.witness)
    if "sum" in wanted:
        rep = solve_sum(table, k1, k2, cap=cap)
        q["S_sum"] = rep.value
        report.witnesses["sum_code"] = _code_witness(rep.witness)
    if "ns" in wanted:
        ns = solve_ns(table, k1, k2, "joint", exact=exact)
        q["S_ns"] = float(ns.value)
        if exact:
            q["S_ns_exact"] = str(ns.value)
    if "ns-sum" in wanted:
        ns = solve_ns(table, k1, k2, "sum", exact=exact)
        q["S_ns_sum"] = float(ns.value)
        if exact:
            q["S_ns_sum_exact"] = str(ns.value)
    if "ns-dec" in wanted:
        rep = solve_ns_dec(table, k1, k2, "joint", cap=cap, exact=exact)
        q["S_ns_dec"] = float(rep.value)
        report.witnesses["ns_dec_encoder"] = rep.witness
        if "sum" in wanted:
            q["S_ns_dec_sum"] = float(
                solve_ns_dec(table, k1, k2, "sum", cap=cap, exact=exact).value)

    def have(*names):
        return all(name in q for name in names)

    if have("S", "S_sum"):
        report.add_check("joint_le_sum", "joint success never exceeds sum success",
                         "S", q["S"], "<=", "S_sum", q["S_sum"], tol)
        report.add_check("error_sandwich", "joint error at most twice sum error",
                         "2 S_sum - 1", 2 * q["S_sum"] - 1, "<=", "S", q["S"], tol)
    if have("S", "S_ns_dec"):
        report.add_check("decoder_box_helps", "a shared decoder box never hurts",
                         "S", q["S"], "<=", "S_ns_dec", q["S_ns_dec"], tol)
    if have("S_ns_dec", "S_ns"):
        report.add_check("full_assistance_helps", "sender-side assistance never hurts",
                         "S_ns_dec", q["S_ns_dec"], "<=", "S_ns", q["S_ns"], tol)
    if have("S_sum", "S_ns_dec_sum"):
        report.add_check("decoder_box_sum_idle",
                         "a decoder box adds nothing to the sum objective",
                         "S_ns_dec_sum", q["S_ns_dec_sum"], "=", "S_sum", q["S_sum"], tol)
    if have("S_ns", "S_ns_sum"):
        report.add_check("ns_sandwich_lower",
                         "assisted sum lower-bounds assisted joint",
                         "2 S_ns_sum - 1", 2 * q["S_ns_sum"] - 1, "<=",
                         "S_ns", q["S_ns"], tol)
        report.add_check("ns_sandwich_upper",
                         "assisted joint never exceeds assisted sum",
                         "S_ns", q["S_ns"], "<=", "S_ns_sum", q["S_ns_sum"], tol)
    if have("S_sum", "S_ns_sum"):
        report.add_check("ns_sum_helps", "assistance never hurts the sum objective",
                         "S_sum", q["S_sum"], "<=", "S_ns_sum", q["S_ns_sum"], tol)

    if det is not None:
        graph = channel_graph(det)
        if "joint" in wanted:
            dqg = solve_dqg(graph, k1, k2, cap=cap)
            q["dqg_value"] = dqg.value
            report.witnesses["dqg_partitions"] = [
                dqg.witness[0].assignment, dqg.witness[1].assignment]
            report.add_check("dqg_equivalence",
                             "scaled joint optimum equals densest quotient value",
                             "k1 k2 S", k1 * k2 * q["S"], "=",
                             "dqg_value", q["dqg_value"], max(tol, tol * k1 * k2))
        if "ns" in wanted:
            q["ns_degree_bound"] = degree_upper_bound(graph, k1, k2) / (k1 * k2)
            report.add_check("ns_degree_bound",
                             "assisted joint respects the degree bound",
                             "S_ns", q["S_ns"], "<=",
                             "ns_degree_bound", q["ns_degree_bound"], tol)

    export = getattr(args, "lp_export", None)
    if export:
        build = build_ns_sum if wanted == ("ns-sum",) else build_ns_joint
        with open(_resolve(export), "w") as fp:
            lp_write_text(build(table, k1, k2), fp)


def _provenance(args, **extra) -> dict:
    prov = {"solver": "dense-tableau-simplex", "check_tol": args.check_tol,
            "normalization_tol": NORMALIZATION_TOL}
    prov.update(extra)
    return prov


def cmd_solve(args) -> Report:
    channel = load_channel(args.channel)
    table, det = _as_table(channel)
    wanted = _expand_which(args.which)
    report = Report(
        "solve",
        inputs={"channel": str(args.channel), "k1": args.k1, "k2": args.k2,
                "which": list(wanted), "exact": bool(args.exact)},
        provenance=_provenance(args, enum_cap=args.enum_cap))
    _solve_quantities(report, table, det, args.k1, args.k2, wanted, args)
    return report


def cmd_tensor(args) -> Report:
    channel = load_channel(args.channel)
    base, _ = _as_table(channel)
    table = tensor_power(base, args.n, cap=args.entry_cap)
    _, det = _as_table(table)
    wanted = _expand_which(args.which)
    report = Report(
        "tensor",
        inputs={"channel": str(args.channel), "n": args.n, "k1": args.k1,
                "k2": args.k2, "which": list(wanted), "exact": bool(args.exact)},
        provenance=_provenance(args, enum_cap=args.enum_cap,
                               entry_cap=args.entry_cap))
    _solve_quantities(report, table, det, args.k1, args.k2, wanted, args)
    return report


def cmd_approx(args) -> Report:
    channel = load_channel(args.channel)
    table, det = _as_table(channel)
    if det is None:
        raise ValidationError("approximation requires a deterministic channel")
    graph = channel_graph(det)
    res = approximate_dqg(graph, args.k1, args.k2, seed=args.seed,
                          num_samples=args.samples, workers=args.workers)
    code = code_from_partitions(det, res.p1, res.p2)
    success = joint_success(table, code)
    report = Report(
        "approx",
        inputs={"channel": str(args.channel), "k1": args.k1, "k2": args.k2},
        quantities={"approx_value": res.value,
                    "upper_bound": res.upper_bound,
                    "ratio_certificate": res.ratio_certificate,
                    "S_approx": success},
        witnesses={"p1": res.p1.assignment, "p2": res.p2.assignment,
                   "code": _code_witness(code)},
        provenance=_provenance(args, seed=args.seed, samples=res.samples_used,
                               workers=args.workers))
    report.add_check("value_within_bound",
                     "approximate value stays within its certified upper bound",
                     "approx_value", res.value, "<=",
                     "upper_bound", res.upper_bound, args.check_tol)
    report.add_check("code_matches_partitions",
                     "derived code succeeds exactly as often as the partition pair",
                     "k1 k2 S_approx", args.k1 * args.k2 * success, "=",
                     "approx_value", res.value, args.check_tol)
    return report


def _make_strategy(args, m: int):
    if args.strategy == "singleton":
        return SingletonSweep(m)
    if args.strategy == "random":
        size = args.size if args.size is not None else max(1, int(math.isqrt(m)))
        return RandomSubsets(m, size, seed=args.seed + 1)
    return AdaptiveBisection(m, seed=args.seed + 1)


def cmd_hardness(args) -> Report:
    inst = build_instance(args.k1, args.delta, args.seed)
    strategy = _make_strategy(args, inst.m)
    log = run_query_experiment(inst, strategy, args.budget)
    planted = optimal_welfare(inst, "planted")
    flat = optimal_welfare(inst, "flat")
    report = Report(
        "hardness",
        inputs={"k1": args.k1, "delta": args.delta, "strategy": args.strategy,
                "budget": args.budget},
        quantities={"m": inst.m, "num_inputs": inst.num_inputs,
                    "planted_welfare": planted, "flat_welfare": flat,
                    "welfare_gap": welfare_gap(inst),
                    "leak_probability": leak_probability(inst),
                    "queries_used": log.num_queries,
                    "distinguished_at": log.distinguished_at},
        witnesses={"blocks": inst.blocks},
        provenance=_provenance(args, seed=args.seed))
    report.add_check("planted_welfare_closed_form",
                     "planted optimum equals the number of items",
                     "planted_welfare", planted, "=", "m", inst.m, args.check_tol)
    materialize = args.materialize
    if materialize == "auto":
        entries = inst.num_inputs**2 * inst.m
        materialize = "yes" if entries <= 10**6 else "no"
    if materialize == "yes":
        for which in ("planted", "flat"):
            table = materialize_channel(inst, which)
            worst = float(abs(table.probs.sum(axis=(1, 2)) - 1.0).max())
            report.add_check(f"{which}_rows_normalized",
                             "materialized rows sum to one under the closed-form constant",
                             "max row-sum deviation", worst, "<=",
                             "normalization_tol", NORMALIZATION_TOL, 0.0)
    if args.log:
        with open(_resolve(args.log), "w") as fp:
            for index, (subset, value) in enumerate(log.queries):
                fp.write(json.dumps(
                    {"index": index, "subset": sorted(subset), "value": value,
                     "distinguished": log.distinguished_at == index},
                    sort_keys=True) + "\n")
    return report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bcc",
        description="Two-receiver broadcast coding: exact solvers, "
                    "non-signaling linear programs, certified approximation, "
                    "and planted value-query experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--check-tol", type=float, default=DEFAULT_CHECK_TOL,
                        help="tolerance for inequality checks")
    common.add_argument("--verify", action="store_true",
                        help="exit with code 4 when any check fails")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("channel", help="channel JSON file")
    solver.add_argument("--k1", type=int, required=True)
    solver.add_argument("--k2", type=int, required=True)
    solver.add_argument("--which", nargs="+", default=["all"],
                        choices=ALL_QUANTITIES + ("all",))
    solver.add_argument("--exact", action="store_true",
                        help="solve linear programs in rational arithmetic")
    solver.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP,
                        help="abort enumeration beyond this many candidates")
    solver.add_argument("--lp-export",
                        help="also write the assisted program in LP text format")

    p = sub.add_parser("solve", parents=[common, solver],
                       help="exact and assisted optima of a channel")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("tensor", parents=[common, solver],
                       help="optima of the n-fold tensor power")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--entry-cap", type=int, default=10**8,
                   help="abort tensor powers beyond this many entries")
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("approx", parents=[common],
                       help="certified approximation for deterministic channels")
    p.add_argument("channel")
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=64)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_approx)

    p = sub.add_parser("hardness", parents=[common],
                       help="planted value-query experiment")
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategy", choices=("singleton", "random", "bisect"),
                   default="random")
    p.add_argument("--budget", type=int, default=100)
    p.add_argument("--size", type=int, default=None,
                   help="subset size for the random strategy (default sqrt(m))")
    p.add_argument("--materialize", choices=("auto", "yes", "no"), default="auto",
                   help="also build and validate the dense channels")
    p.add_argument("--log", help="write one JSON line per query here")
    p.set_defaults(func=cmd_hardness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (SizeCapExceededError, EnumerationCapExceededError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InvariantViolationError:
        raise
    except ToolkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = report.to_json()
    if args.out:
        _resolve(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.verify and not report.all_passed:
        for check in report.failed_checks:
            print(f"check failed: {check.name}: {check.lhs_name} = "
                  f"{check.lhs_value!r} {check.relation} {check.rhs_name} = "
                  f"{check.rhs_value!r} (slack {check.slack!r}): {check.claim}",
                  file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
