"""Core chain types: state spaces, stochastic matrices, distributions, TV metrics.

All values are immutable after construction and all operations are pure, so
everything here is safe to share across threads.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ChainParseError,
    NegativeEntryError,
    NonSquareError,
    NotStationaryError,
    RowSumError,
    SpaceMismatchError,
)

#: Ingestion tolerance on row sums. File round-tripping produces sub-ulp
#: drift; anything worse than this is a real data problem.
ROW_SUM_TOL = 1e-12

#: Residual threshold for "pi is stationary for P" guards. Above accumulated
#: powering error at desk scale, below any real violation.
STATIONARY_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class StateSpace:
    """An ordered, labeled finite state space."""

    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise ValueError("state space must contain at least one state")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("state labels must be distinct")

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class StochasticMatrix:
    """A validated row-stochastic square matrix over a labeled state space.

    Construct via :func:`validate_stochastic`; the raw constructor trusts
    its input and is used internally for derived matrices (powers, products)
    whose stochasticity is guaranteed by closure.
    """

    space: StateSpace
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "entries", _freeze(self.entries))

    @property
    def n(self) -> int:
        return self.space.size

    def row(self, x: int) -> "Distribution":
        """The one-step distribution out of state x."""
        return Distribution(self.space, self.entries[x])

    def min_entry(self) -> float:
        return float(self.entries.min())

    def __matmul__(self, other: "StochasticMatrix") -> "StochasticMatrix":
        if self.space != other.space:
            raise SpaceMismatchError("matrix product across different state spaces")
        return StochasticMatrix(self.space, self.entries @ other.entries)

    def to_json(self) -> str:
        return json.dumps(
            {"states": list(self.space.labels), "matrix": self.entries.tolist()}
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf)
        w.writerow(self.space.labels)
        for r in self.entries:
            w.writerow([format(v, ".17g") for v in r])
        return buf.getvalue()


@dataclass(frozen=True)
class Distribution:
    """A validated probability row vector on a state space."""

    space: StateSpace
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.shape != (self.space.size,):
            raise SpaceMismatchError(
                f"probability vector of length {p.shape} on a "
                f"{self.space.size}-state space"
            )
        if (p < -ROW_SUM_TOL).any():
            raise NegativeEntryError("negative probability entry")
        s = float(p.sum())
        if abs(s - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {s}, not 1")
        object.__setattr__(self, "probs", _freeze(np.clip(p, 0.0, None) / s))

    @classmethod
    def point_mass(cls, space: StateSpace, x: int) -> "Distribution":
        p = np.zeros(space.size)
        p[x] = 1.0
        return cls(space, p)

    @classmethod
    def uniform(cls, space: StateSpace) -> "Distribution":
        return cls(space, np.full(space.size, 1.0 / space.size))


def validate_stochastic(
    raw_matrix,
    labels,
    tolerance: float = ROW_SUM_TOL,
    renormalize: bool = True,
) -> StochasticMatrix:
    """Validate a raw square matrix as row-stochastic and wrap it.

    Rows are renormalized (when ``renormalize``) only if every row sum is
    within ``tolerance`` of 1; a worse row rejects the whole matrix.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    a = np.asarray(raw_matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NonSquareError(f"matrix of shape {a.shape} is not square")
    space = StateSpace(tuple(labels))
    if a.shape[0] != space.size:
        raise NonSquareError(
            f"{a.shape[0]}x{a.shape[1]} matrix with {space.size} labels"
        )
    if (a < 0).any():
        i, j = np.argwhere(a < 0)[0]
        raise NegativeEntryError(f"negative entry {a[i, j]} at ({i}, {j})")
    sums = a.sum(axis=1)
    dev = np.abs(sums - 1.0)
    worst = int(np.argmax(dev))
    if dev[worst] > tolerance:
        raise RowSumError(
            f"row {worst} sums to {sums[worst]:.17g} "
            f"(deviation {dev[worst]:.3g} > tolerance {tolerance:.3g})"
        )
    if renormalize:
        a = a / sums[:, None]
    return StochasticMatrix(space, a)


def power(P: StochasticMatrix, k: int) -> StochasticMatrix:
    """The k-step transition matrix P^k; power(P, 0) is the identity."""
    if k < 0:
        raise ValueError("exponent must be nonnegative")
    return StochasticMatrix(P.space, np.linalg.matrix_power(P.entries, k))


def evolve(sigma: Distribution, P: StochasticMatrix, steps: int = 1) -> Distribution:
    """Push a distribution through `steps` transitions: sigma P^steps."""
    if sigma.space != P.space:
        raise SpaceMismatchError("distribution and matrix on different spaces")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    p = sigma.probs
    for _ in range(steps):
        p = p @ P.entries
    return Distribution(P.space, p)


def tv_distance(mu: Distribution, nu: Distribution) -> float:
    """Total variation distance: half the L1 difference. Always in [0, 1]."""
    if mu.space != nu.space:
        raise SpaceMismatchError("distributions on different spaces")
    return min(1.0, 0.5 * float(np.abs(mu.probs - nu.probs).sum()))


def _tv_rows(rows: np.ndarray, pi: np.ndarray) -> float:
    """max over rows of TV(row, pi), on raw arrays."""
    return float(0.5 * np.abs(rows - pi[None, :]).sum(axis=1).max())


def distance_from_stationary(P: StochasticMatrix, pi: Distribution, t: int) -> float:
    """Worst-case (over starting states) TV distance of P^t rows from pi."""
    check_stationary(P, pi)
    if t < 0:
        raise ValueError("t must be nonnegative")
    return _tv_rows(power(P, t).entries, pi.probs)


def check_stationary(
    P: StochasticMatrix, pi: Distribution, tol: float = STATIONARY_RESIDUAL_TOL
) -> None:
    if pi.space != P.space:
        raise SpaceMismatchError("distribution and matrix on different spaces")
    residual = float(np.abs(pi.probs @ P.entries - pi.probs).max())
    if residual > tol:
        raise NotStationaryError(
            f"residual ||pi P - pi||_inf = {residual:.3g} exceeds {tol:.3g}"
        )


def stationary_residual(P: StochasticMatrix, pi: np.ndarray) -> float:
    """||pi P - pi||_inf on a raw vector; helper for result reporting."""
    return float(np.abs(pi @ P.entries - pi).max())


# ---------------------------------------------------------------------------
# File ingestion / emission

def load_chain_json(text: str) -> StochasticMatrix:
    try:
        obj = json.loads(text)
        states = obj["states"]
        matrix = obj["matrix"]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ChainParseError(f"bad chain JSON: {e}") from e
    return validate_stochastic(matrix, states)


def load_chain_csv(text: str) -> StochasticMatrix:
    try:
        rows = list(csv.reader(io.StringIO(text)))
        rows = [r for r in rows if r]
        labels = [c.strip() for c in rows[0]]
        matrix = [[float(c) for c in r] for r in rows[1:]]
    except (IndexError, ValueError) as e:
        raise ChainParseError(f"bad chain CSV: {e}") from e
    if len(matrix) != len(labels):
        raise ChainParseError(
            f"{len(labels)} header names but {len(matrix)} matrix rows"
        )
    return validate_stochastic(matrix, labels)


def load_chain(path: str, fmt: str | None = None) -> StochasticMatrix:
    """Load a chain file; format inferred from the extension unless given."""
    if fmt is None:
        fmt = "csv" if path.lower().endswith(".csv") else "json"
    with open(path) as f:
        text = f.read()
    if fmt == "csv":
        return load_chain_csv(text)
    if fmt == "json":
        return load_chain_json(text)
    raise ValueError(f"unknown chain format {fmt!r}")
