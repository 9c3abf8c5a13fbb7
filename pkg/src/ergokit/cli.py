"""Command-line surface: ingestion, generators, analysis, cross-validation.

Commands: analyze, stationary, mix, couple, generate, report.
Exit codes: 0 success / ergodic, 2 analysis-negative (not ergodic, methods
disagree), 1 usage or I/O error. All stdout reports are JSON; curve data
goes to --csv files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import chain as chain_mod
from . import coupling as coupling_mod
from . import doeblin as doeblin_mod
from . import envelope as envelope_mod
from . import generators
from . import stationary as stationary_mod
from . import structure as structure_mod
from .errors import ErgokitError, InvalidGeneratorParamsError

ALL_METHODS = (
    "linear_solve",
    "tree_enumeration",
    "tree_determinant",
    "return_time",
    "envelope",
    "power_iteration",
)

_PARAM_ALIASES = {
    "lazy_hypercube": {"d": "dim"},
    "cycle": {"L": "length", "l": "length"},
    "top_to_random": {"k": "deck"},
}


def _coerce(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def _parse_params(name: str, text: str | None) -> dict:
    params = {}
    if text:
        for item in text.split(","):
            if "=" not in item:
                raise InvalidGeneratorParamsError(f"bad param {item!r}, expected k=v")
            k, v = item.split("=", 1)
            k = k.strip()
            k = _PARAM_ALIASES.get(name, {}).get(k, k)
            params[k] = _coerce(v.strip())
    return params


def _resolve_chain(args) -> chain_mod.StochasticMatrix:
    if args.gen:
        return generators.generate(args.gen, **_parse_params(args.gen, args.params))
    if args.chain:
        return chain_mod.load_chain(args.chain, fmt=args.format)
    raise InvalidGeneratorParamsError("provide --chain <path> or --gen <name>")


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("ERGOKIT_THREADS", "1")))
    except ValueError:
        return 1


def _write_csv(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as f:
            f.write(text)


def _run_method(P, method: str, tol: float):
    if method == "linear_solve":
        return stationary_mod.stationary_linear(P)
    if method == "tree_enumeration":
        return stationary_mod.stationary_by_trees(P, mode="enumeration")
    if method == "tree_determinant":
        return stationary_mod.stationary_by_trees(P, mode="determinant")
    if method == "return_time":
        return stationary_mod.stationary_by_return_time(P)
    if method == "envelope":
        return envelope_mod.stationary_by_envelope(P, tol=tol)
    if method == "power_iteration":
        return stationary_mod.stationary_by_power(P)
    raise ValueError(f"unknown method {method!r}")


def _stationary_table(P, methods, tol):
    """Per-method results (errors surfaced inline, not aborting the rest)."""
    def run(m):
        try:
            return m, _run_method(P, m, tol)
        except ErgokitError as e:
            return m, e

    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            done = list(pool.map(run, methods))
    else:
        done = [run(m) for m in methods]
    return dict(done)


def _discrepancies(results):
    ok = {m: r for m, r in results.items() if not isinstance(r, Exception)}
    names = sorted(ok)
    table = {}
    worst = 0.0
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            d = float(np.abs(ok[a].pi.probs - ok[b].pi.probs).max())
            table[f"{a}/{b}"] = d
            worst = max(worst, d)
    return table, worst


def cmd_analyze(args) -> int:
    P = _resolve_chain(args)
    report = structure_mod.analyze(P)
    print(report.to_json())
    return 0 if report.ergodic else 2


def cmd_stationary(args) -> int:
    P = _resolve_chain(args)
    methods = args.methods.split(",") if args.methods else list(ALL_METHODS)
    for m in methods:
        if m not in ALL_METHODS:
            raise InvalidGeneratorParamsError(f"unknown method {m!r}")
    results = _stationary_table(P, methods, args.tol)
    table, worst = _discrepancies(results)
    out = {"methods": {}, "pairwise_max_discrepancy": table}
    n_ok = 0
    for m, r in results.items():
        if isinstance(r, Exception):
            out["methods"][m] = {"error": type(r).__name__, "message": str(r)}
        else:
            n_ok += 1
            out["methods"][m] = {
                "pi": r.pi.probs.tolist(),
                "residual": r.residual,
            }
    print(json.dumps(out))
    if args.csv and "envelope" in methods:
        _write_csv(args.csv, _envelope_trace_csv(P, args.tol))
    if n_ok == 0 or worst > 10.0 * args.tol:
        return 2
    return 0


def _envelope_trace_csv(P, tol) -> str:
    report = structure_mod.analyze(P)
    if not report.ergodic:
        return "column,i,m,M,delta\n"
    m = report.primitivity_exponent or 1
    lifted = chain_mod.power(P, m)
    lines = ["column,i,m,M,delta"]
    for col in range(P.n):
        trace = envelope_mod.envelope_iterate(lifted, col, tol=tol)
        for rec in trace.iterations:
            lines.append(
                f"{col},{rec.i},{rec.m:.17g},{rec.M:.17g},{rec.delta:.17g}"
            )
    return "\n".join(lines) + "\n"


def cmd_mix(args) -> int:
    P = _resolve_chain(args)
    est = envelope_mod.mixing_estimate(P, epsilon=args.epsilon)
    out = {
        "epsilon": est.epsilon,
        "empirical_tmix": est.empirical_tmix,
        "bound_tmix": est.bound_tmix,
        "primitivity_m": est.primitivity_m,
        "pmin_of_Pm": est.pmin_of_Pm,
    }
    print(json.dumps(out))
    if args.csv:
        pi = stationary_mod.stationary_linear(P).pi
        split = None
        if (P.entries > 0.0).all():
            split = doeblin_mod.doeblin_split(P, pi)
        horizon = max(args.horizon, est.empirical_tmix + 1)
        deltas = envelope_mod.delta_curve(P, horizon)
        lines = ["t,d,n_delta,theta_pow"]
        S = np.eye(P.n)
        for t in range(1, horizon + 1):
            S = S @ P.entries
            d = chain_mod._tv_rows(S, pi.probs)
            theta_pow = "" if split is None else f"{split.theta ** t:.17g}"
            lines.append(f"{t},{d:.17g},{P.n * deltas[t - 1]:.17g},{theta_pow}")
        _write_csv(args.csv, "\n".join(lines) + "\n")
    return 0


def cmd_couple(args) -> int:
    P = _resolve_chain(args)
    pi = stationary_mod.stationary_linear(P).pi
    report = coupling_mod.verify_coupling_lemma(
        P,
        pi,
        start_y=args.start,
        horizon=args.horizon,
        trials=args.trials,
        seed=args.seed,
    )
    _write_csv(args.csv, report.to_csv())
    print(
        json.dumps(
            {
                "passed": report.passed,
                "trials": report.trials,
                "seed": report.seed,
                "horizon": args.horizon,
            }
        )
    )
    return 0 if report.passed else 2


def cmd_generate(args) -> int:
    P = generators.generate(args.name, **_parse_params(args.name, args.params))
    if args.format == "csv":
        sys.stdout.write(P.to_csv())
    else:
        print(P.to_json())
    return 0


def cmd_report(args) -> int:
    P = _resolve_chain(args)
    erg = structure_mod.analyze(P)
    out = {"ergodicity": json.loads(erg.to_json()), "verdicts": {}}
    results = _stationary_table(P, list(ALL_METHODS), args.tol)
    table, worst = _discrepancies(results)
    out["stationary"] = {
        m: (
            {"error": type(r).__name__}
            if isinstance(r, Exception)
            else {"pi": r.pi.probs.tolist(), "residual": r.residual}
        )
        for m, r in results.items()
    }
    out["pairwise_max_discrepancy"] = table
    out["verdicts"]["methods_agree"] = worst <= 10.0 * args.tol

    failed = False
    if erg.ergodic:
        est = envelope_mod.mixing_estimate(P, epsilon=args.epsilon)
        out["mixing"] = {
            "epsilon": est.epsilon,
            "empirical_tmix": est.empirical_tmix,
            "bound_tmix": est.bound_tmix,
        }
        out["verdicts"]["mixing_bound_dominates"] = (
            est.empirical_tmix <= est.bound_tmix
        )
        pi = results["linear_solve"].pi
        lemma = coupling_mod.verify_coupling_lemma(
            P, pi, start_y=args.start, horizon=args.horizon,
            trials=args.trials, seed=args.seed,
        )
        out["verdicts"]["coupling_lemma"] = lemma.passed
        if (P.entries > 0.0).all():
            split = doeblin_mod.doeblin_split(P, pi)
            curve = doeblin_mod.tv_bound_doeblin(split, P, pi, max_n=args.horizon)
            rec = doeblin_mod.verify_error_recursion(split, P)
            out["doeblin"] = {"delta": split.delta, "theta": split.theta}
            out["verdicts"]["doeblin_tv_bound"] = curve.passed
            out["verdicts"]["doeblin_recursion"] = rec.passed
        failed = not all(out["verdicts"].values())
    print(json.dumps(out))
    return 2 if (failed or not erg.ergodic) else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ergokit",
        description="Finite Markov chain analysis and cross-validated "
        "stationary/convergence certificates.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def add_chain_flags(sp):
        sp.add_argument("--chain", help="chain file (JSON or CSV)")
        sp.add_argument("--gen", help="built-in generator name")
        sp.add_argument("--params", help="generator params k=v,...")
        sp.add_argument("--format", choices=["json", "csv"], default=None)

    sp = sub.add_parser("analyze", help="structural ergodicity report")
    add_chain_flags(sp)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("stationary", help="stationary distribution, cross-validated")
    add_chain_flags(sp)
    sp.add_argument("--methods", help="comma-separated subset of " + ",".join(ALL_METHODS))
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--csv", help="write envelope traces here (envelope method)")
    sp.set_defaults(func=cmd_stationary)

    sp = sub.add_parser("mix", help="mixing time: empirical scan vs contraction bound")
    add_chain_flags(sp)
    sp.add_argument("--epsilon", type=float, default=0.25)
    sp.add_argument("--horizon", type=int, default=50)
    sp.add_argument("--csv", help="write the (t, d, n*Delta, theta^t) curve here")
    sp.set_defaults(func=cmd_mix)

    sp = sub.add_parser("couple", help="coupling-lemma comparison")
    add_chain_flags(sp)
    sp.add_argument("--start", type=int, default=0, help="start state for the Y copy")
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--horizon", type=int, default=30)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", help="write the (step, exact_tv, tail, tail_se) table here")
    sp.set_defaults(func=cmd_couple)

    sp = sub.add_parser("generate", help="emit a built-in chain")
    sp.add_argument("name")
    sp.add_argument("--params", help="generator params k=v,...")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("report", help="full cross-validation report")
    add_chain_flags(sp)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--epsilon", type=float, default=0.25)
    sp.add_argument("--trials", type=int, default=20_000)
    sp.add_argument("--horizon", type=int, default=30)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--start", type=int, default=0)
    sp.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except ErgokitError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
