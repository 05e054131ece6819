"""Dense linear programming: two-phase primal simplex with Bland's rule.

Models are maximization problems over variables with lower bounds (zero by
default), dense constraint rows, and relations <=, =, >=.  The solver runs on
a single tableau code path in one of two numeric modes:

* float mode: float64 tableau, pivot and feasibility tolerances 1e-9;
* exact mode: Fraction tableau (inputs converted exactly from their binary
  float representation), zero tolerances, intended for small certificates.

Bland's rule (lowest eligible index enters, ratio ties resolved by lowest
basis index) guarantees termination without cycling.  At an apparent optimum
in float mode the reduced costs are recomputed from scratch once before the
solver commits, which keeps incremental drift from stopping a run early.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionMismatchError,
    InfeasibleError,
    InvariantViolationError,
    IterationLimitError,
    SizeCapExceededError,
    UnboundedError,
    ValidationError,
)

LE, EQ, GE = "<=", "=", ">="

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9
CHECK_TOL = 1e-7
DEFAULT_PIVOT_LIMIT = 10**6
EXACT_VAR_CAP = 200


@dataclass
class LpModel:
    """max objective . x  subject to  rows[i] . x (rel_i) rhs[i],  x >= lower_bounds."""

    num_vars: int
    objective: np.ndarray
    rows: np.ndarray
    relations: tuple[str, ...]
    rhs: np.ndarray
    lower_bounds: np.ndarray | None = None
    var_names: tuple[str, ...] | None = None
    row_names: tuple[str, ...] | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        self.rows = np.asarray(self.rows, dtype=float).reshape(-1, self.num_vars)
        self.rhs = np.asarray(self.rhs, dtype=float)
        if self.objective.shape != (self.num_vars,):
            raise DimensionMismatchError("objective length must equal num_vars")
        if self.rhs.shape != (self.rows.shape[0],):
            raise DimensionMismatchError("one rhs entry per row required")
        if len(self.relations) != self.rows.shape[0]:
            raise DimensionMismatchError("one relation per row required")
        if any(rel not in (LE, EQ, GE) for rel in self.relations):
            raise ValidationError(f"relations must be one of {LE!r}, {EQ!r}, {GE!r}")
        if self.lower_bounds is not None:
            self.lower_bounds = np.asarray(self.lower_bounds, dtype=float)
            if self.lower_bounds.shape != (self.num_vars,):
                raise DimensionMismatchError("one lower bound per variable required")

    @property
    def num_rows(self) -> int:
        return self.rows.shape[0]


@dataclass
class LpSolution:
    status: str
    value: float | Fraction
    assignment: np.ndarray
    pivots: int


def constraint_violation(model: LpModel, x) -> float:
    """Largest violation of any row or lower bound at the point x."""
    x = np.asarray(x)
    worst = 0
    for i in range(model.num_rows):
        ax = model.rows[i] @ x if x.dtype != object else sum(
            Fraction(a) * v for a, v in zip(model.rows[i], x))
        gap = ax - (Fraction(model.rhs[i]) if x.dtype == object else model.rhs[i])
        rel = model.relations[i]
        if rel == LE:
            worst = max(worst, gap)
        elif rel == GE:
            worst = max(worst, -gap)
        else:
            worst = max(worst, abs(gap))
    lb = model.lower_bounds
    for j in range(model.num_vars):
        low = 0 if lb is None else (Fraction(lb[j]) if x.dtype == object else lb[j])
        worst = max(worst, low - x[j])
    return worst


def lp_solve(model: LpModel, exact: bool = False,
             max_pivots: int = DEFAULT_PIVOT_LIMIT,
             tol: float = PIVOT_TOL) -> LpSolution:
    """Solve to optimality or raise Infeasible / Unbounded / IterationLimit."""
    if exact and model.num_vars > EXACT_VAR_CAP:
        raise SizeCapExceededError(model.num_vars, EXACT_VAR_CAP)

    n = model.num_vars
    if exact:
        conv = Fraction
        A = np.array([[Fraction(v) for v in row] for row in model.rows], dtype=object)
        b = np.array([Fraction(v) for v in model.rhs], dtype=object)
        c = np.array([Fraction(v) for v in model.objective], dtype=object)
        zero, one = Fraction(0), Fraction(1)
        tol = zero
    else:
        conv = float
        A = np.array(model.rows, dtype=float)
        b = np.array(model.rhs, dtype=float)
        c = np.array(model.objective, dtype=float)
        zero, one = 0.0, 1.0

    # Shift out nonzero lower bounds: x = lb + x', x' >= 0.
    if model.lower_bounds is not None:
        lb = np.array([conv(v) for v in model.lower_bounds],
                      dtype=object if exact else float)
        b = b - A @ lb
    else:
        lb = None

    relations = list(model.relations)
    for i in range(len(b)):
        if b[i] < zero:
            A[i] = -A[i]
            b[i] = -b[i]
            relations[i] = {LE: GE, GE: LE, EQ: EQ}[relations[i]]

    m = len(b)
    n_slack = sum(1 for r in relations if r != EQ)
    n_art = sum(1 for r in relations if r != LE)
    ncols = n + n_slack + n_art
    dtype = object if exact else float
    T = np.zeros((m, ncols + 1), dtype=dtype)
    if exact:
        T[:, :] = zero
    T[:, :n] = A
    T[:, -1] = b

    basis = [0] * m
    slack_at, art_at = n, n + n_slack
    art_start = n + n_slack
    for i, rel in enumerate(relations):
        if rel == LE:
            T[i, slack_at] = one
            basis[i] = slack_at
            slack_at += 1
        elif rel == GE:
            T[i, slack_at] = -one
            slack_at += 1
            T[i, art_at] = one
            basis[i] = art_at
            art_at += 1
        else:
            T[i, art_at] = one
            basis[i] = art_at
            art_at += 1

    pivots = 0

    def pivot(p: int, q: int):
        nonlocal T
        piv = T[p, q]
        T[p] = T[p] / piv
        col = T[:, q].copy()
        col[p] = zero
        T -= np.outer(col, T[p])
        T[:, q] = zero
        T[p, q] = one
        basis[p] = q
        if not exact:
            np.maximum(T[:, -1], 0.0, out=T[:, -1])

    def reduced_costs(cost):
        r = cost.copy()
        for i, bi in enumerate(basis):
            if cost[bi] != zero:
                r = r - cost[bi] * T[i, :ncols]
        return r

    def entering(r) -> int:
        """Lowest index with positive reduced cost, or -1 at an optimum."""
        if exact:
            for j in range(ncols):
                if r[j] > tol:
                    return j
            return -1
        above = np.flatnonzero(r > tol)
        return int(above[0]) if above.size else -1

    def leaving(q: int) -> int:
        """Minimum-ratio row; ratio ties go to the lowest basis index."""
        if exact:
            p, best_ratio = -1, None
            for i in range(m):
                a = T[i, q]
                if a > tol:
                    ratio = T[i, -1] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and basis[i] < basis[p])):
                        p, best_ratio = i, ratio
            return p
        col = T[:m, q]
        rows = np.flatnonzero(col > tol)
        if not rows.size:
            return -1
        ratios = np.maximum(T[rows, -1], 0.0) / col[rows]
        ties = rows[ratios == ratios.min()]
        return int(ties[np.argmin(np.asarray(basis)[ties])])

    def run_phase(cost, phase: int):
        nonlocal pivots
        r = reduced_costs(cost)
        refreshed = False
        while True:
            q = entering(r)
            if q < 0:
                if exact or refreshed:
                    return
                r = reduced_costs(cost)  # guard against incremental drift
                refreshed = True
                continue
            refreshed = False
            p = leaving(q)
            if p < 0:
                if phase == 1:
                    raise InvariantViolationError("phase-1 objective unbounded")
                raise UnboundedError("objective is unbounded above")
            pivots += 1
            if pivots > max_pivots:
                raise IterationLimitError(pivots)
            pivot(p, q)
            r = r - r[q] * T[p, :ncols]
            r[q] = zero

    if n_art:
        cost1 = np.zeros(ncols, dtype=dtype)
        if exact:
            cost1[:] = zero
        cost1[art_start:] = -one
        run_phase(cost1, phase=1)
        infeas = sum(T[i, -1] for i in range(m) if basis[i] >= art_start)
        if infeas > (zero if exact else FEAS_TOL):
            raise InfeasibleError(f"phase-1 residual {infeas}")
        # Pivot surviving artificials out, dropping redundant rows.
        keep = []
        for i in range(m):
            if basis[i] < art_start:
                keep.append(i)
                continue
            q = next((j for j in range(art_start) if abs(T[i, j]) > tol), -1)
            if q >= 0:
                pivot(i, q)
                keep.append(i)
        if len(keep) < m:
            T = T[keep]
            basis = [basis[i] for i in keep]
            m = len(keep)
    T = np.concatenate([T[:, :art_start], T[:, -1:]], axis=1)
    ncols = art_start

    cost2 = np.zeros(ncols, dtype=dtype)
    if exact:
        cost2[:] = zero
    cost2[:n] = c
    run_phase(cost2, phase=2)

    x = np.zeros(n, dtype=dtype)
    if exact:
        x[:] = zero
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = T[i, -1]
    if lb is not None:
        x = x + lb
    value = sum(ci * xi for ci, xi in zip(c, x))

    check = zero if exact else CHECK_TOL
    violation = constraint_violation(model, x)
    if violation > check:
        raise InvariantViolationError(f"optimal point violates a constraint by {violation}")
    if not exact:
        value = float(value)
    return LpSolution("optimal", value, x, pivots)


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def lp_write_text(model: LpModel, fp) -> None:
    """Write the model in the conventional human-readable LP text format."""
    names = model.var_names or tuple(f"x{j}" for j in range(model.num_vars))
    rownames = model.row_names or tuple(f"c{i}" for i in range(model.num_rows))

    def terms(coeffs):
        parts = []
        for j, v in enumerate(coeffs):
            if v != 0:
                sign = "+" if v >= 0 else "-"
                parts.append(f"{sign} {_fmt(abs(v))} {names[j]}")
        return " ".join(parts) if parts else f"+ 0 {names[0]}"

    fp.write("Maximize\n")
    fp.write(f" obj: {terms(model.objective)}\n")
    fp.write("Subject To\n")
    for i in range(model.num_rows):
        fp.write(f" {rownames[i]}: {terms(model.rows[i])} {model.relations[i]} "
                 f"{_fmt(model.rhs[i])}\n")
    fp.write("Bounds\n")
    lb = model.lower_bounds
    for j in range(model.num_vars):
        low = 0.0 if lb is None else float(lb[j])
        fp.write(f" {names[j]} >= {_fmt(low)}\n")
    fp.write("End\n")
