"""Compare the three convergence certificates on one chain.

Plots-ready table of the exact distance d(t) against the envelope bound
n * Delta^(t) and, when the matrix is entrywise positive, the Doeblin
bound theta^t.

Usage: python scripts/bound_comparison.py --gen two_state --params p=0.2,q=0.3
"""

import argparse
import sys

import numpy as np

from ergokit import chain as chain_mod
from ergokit import generators
from ergokit.cli import _parse_params
from ergokit.doeblin import doeblin_split
from ergokit.envelope import delta_curve
from ergokit.stationary import stationary_linear


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chain", help="chain file (JSON or CSV)")
    ap.add_argument("--gen", help="built-in generator name")
    ap.add_argument("--params", help="generator params k=v,...")
    ap.add_argument("--horizon", type=int, default=25)
    ap.add_argument("--csv", help="write the table here instead of stdout")
    args = ap.parse_args(argv)

    if args.gen:
        P = generators.generate(args.gen, **_parse_params(args.gen, args.params))
    elif args.chain:
        P = chain_mod.load_chain(args.chain)
    else:
        ap.error("provide --chain or --gen")

    pi = stationary_linear(P).pi
    positive = (P.entries > 0.0).all()
    theta = doeblin_split(P, pi).theta if positive else None
    deltas = delta_curve(P, args.horizon)

    lines = ["t,d_exact,envelope_bound,doeblin_bound"]
    S = np.eye(P.n)
    for t in range(1, args.horizon + 1):
        S = S @ P.entries
        d = chain_mod._tv_rows(S, pi.probs)
        doeblin = "" if theta is None else f"{theta ** t:.6g}"
        lines.append(f"{t},{d:.6g},{P.n * deltas[t - 1]:.6g},{doeblin}")

    text = "\n".join(lines) + "\n"
    if args.csv:
        with open(args.csv, "w") as f:
            f.write(text)
        print(f"wrote {args.csv}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
