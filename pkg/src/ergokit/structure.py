"""Structural ergodicity analysis of the transition graph.

Irreducibility via strongly connected components, per-state periods via a
BFS level-gcd, and the primitivity exponent (least m with P^m entrywise
positive) via boolean matrix powering. Structure is read off the exact
zero pattern of the matrix: a structural zero means exactly 0.0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .chain import StateSpace, StochasticMatrix
from .errors import NoClosedWalkError, NotErgodicError


@dataclass(frozen=True)
class TransitionGraph:
    """Directed graph with an edge (i, j) iff P(i, j) > 0."""

    vertices: StateSpace
    edges: tuple[tuple[int, ...], ...]  # out-neighbor indices per vertex

    @property
    def n(self) -> int:
        return self.vertices.size


@dataclass(frozen=True)
class ErgodicityReport:
    irreducible: bool
    periods: dict[str, int | None]  # None: state lies on no closed walk
    aperiodic: bool
    primitivity_exponent: int | None
    scc_decomposition: tuple[tuple[str, ...], ...]

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic

    def to_json(self) -> str:
        return json.dumps(
            {
                "irreducible": self.irreducible,
                "aperiodic": self.aperiodic,
                "periods": self.periods,
                "primitivity_exponent": self.primitivity_exponent,
                "sccs": [list(c) for c in self.scc_decomposition],
            }
        )


def build_graph(P: StochasticMatrix) -> TransitionGraph:
    adj = tuple(
        tuple(int(j) for j in np.flatnonzero(P.entries[i] > 0.0))
        for i in range(P.n)
    )
    return TransitionGraph(P.space, adj)


def strongly_connected_components(G: TransitionGraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative; components in reverse topological order."""
    n = G.n
    index = [-1] * n
    lowlink = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    sccs: list[list[int]] = []
    counter = 0

    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = lowlink[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            for k in range(ei, len(G.edges[v])):
                w = G.edges[v][k]
                if index[w] == -1:
                    work[-1] = (v, k + 1)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                lowlink[u] = min(lowlink[u], lowlink[v])
            if lowlink[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                sccs.append(comp)
    return sccs


def is_irreducible(G: TransitionGraph) -> tuple[bool, list[list[int]]]:
    sccs = strongly_connected_components(G)
    return len(sccs) == 1, sccs


def period_of(G: TransitionGraph, s: int) -> int:
    """gcd of the lengths of all closed walks through s.

    Computed as the gcd of level(u) + 1 - level(v) over intra-SCC edges
    (u, v) in a BFS from s restricted to s's SCC; this equals the
    closed-walk gcd for strongly connected components.
    """
    sccs = strongly_connected_components(G)
    comp = next(c for c in sccs if s in c)
    members = set(comp)
    level = {s: 0}
    queue = [s]
    g = 0
    while queue:
        nxt = []
        for u in queue:
            for w in G.edges[u]:
                if w not in members:
                    continue
                if w not in level:
                    level[w] = level[u] + 1
                    nxt.append(w)
        queue = nxt
    for u in level:
        for w in G.edges[u]:
            if w in members:
                g = math.gcd(g, level[u] + 1 - level[w])
    if g == 0:
        raise NoClosedWalkError(
            f"state {G.vertices.labels[s]!r} lies on no closed walk"
        )
    return g


def wielandt_bound(n: int) -> int:
    """Sharp classical cap on the primitivity exponent: (n-1)^2 + 1."""
    return (n - 1) ** 2 + 1


def primitivity_exponent(P: StochasticMatrix) -> int:
    """Least m with P^m entrywise positive.

    Requires ergodicity (checked first); for ergodic chains positivity of
    the boolean power is monotone in the exponent, so the minimal m is
    found by doubling plus binary search, capped at the Wielandt bound.
    Positivity is decided on the boolean pattern, never on float values,
    so numeric underflow cannot misreport a zero.
    """
    report = analyze(P, with_primitivity=False)
    if not report.ergodic:
        raise NotErgodicError(
            "no power of P is entrywise positive: chain is "
            + ("reducible" if not report.irreducible else "periodic")
        )
    A = (P.entries > 0.0).astype(np.float64)
    cap = wielandt_bound(P.n)

    cache: dict[int, np.ndarray] = {1: A}

    def boolean_power(k: int) -> np.ndarray:
        if k in cache:
            return cache[k]
        half = boolean_power(k // 2)
        out = (half @ half) > 0.0
        if k % 2:
            out = (out @ A) > 0.0
        cache[k] = out.astype(np.float64)
        return cache[k]

    def positive(k: int) -> bool:
        return bool(boolean_power(k).all())

    hi = 1
    while not positive(hi):
        if hi >= cap:
            raise NotErgodicError(
                f"no positive power up to the Wielandt bound {cap}"
            )
        hi = min(2 * hi, cap)
    lo = hi // 2 if hi > 1 else 0  # positive(lo) is False (or lo == 0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if positive(mid):
            hi = mid
        else:
            lo = mid
    return hi


def analyze(P: StochasticMatrix, with_primitivity: bool = True) -> ErgodicityReport:
    """Full structural report for a chain."""
    G = build_graph(P)
    irreducible, sccs = is_irreducible(G)
    periods: dict[str, int | None] = {}
    for s in range(P.n):
        try:
            periods[P.space.labels[s]] = period_of(G, s)
        except NoClosedWalkError:
            periods[P.space.labels[s]] = None
    defined = [p for p in periods.values() if p is not None]
    aperiodic = len(defined) == P.n and all(p == 1 for p in defined)
    m = None
    if with_primitivity and irreducible and aperiodic:
        m = primitivity_exponent(P)
    return ErgodicityReport(
        irreducible=irreducible,
        periods=periods,
        aperiodic=aperiodic,
        primitivity_exponent=m,
        scc_decomposition=tuple(
            tuple(P.space.labels[v] for v in sorted(c)) for c in sccs
        ),
    )
