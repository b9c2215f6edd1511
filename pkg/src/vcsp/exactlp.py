"""Exact rational linear programming.

A two-phase primal simplex on a sparse tableau of Fractions, with Bland's
rule for both the entering and the leaving variable.  Every outcome carries a
certificate that :func:`check_certificate` verifies without trusting the
solver:

* optimal: the point plus row multipliers ``y`` proving the bound,
* unbounded: a feasible point plus an improving ray,
* infeasible: row multipliers ``y`` forming a Farkas combination.

Multipliers always refer to the *maximization* of ``sign * objective``
(``sign = -1`` for minimization) and obey ``y >= 0`` on ``<=`` rows, ``y <= 0``
on ``>=`` rows, free on ``=`` rows.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .core import as_rational
from .errors import ValidationError

RELATIONS = ("<=", "=", ">=")
ZERO = Fraction(0)


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Row:
    id: str
    coeffs: tuple[tuple[str, Fraction], ...]
    relation: str
    rhs: Fraction

    def activity(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((a * point[c] for c, a in self.coeffs), ZERO)


def _row(spec) -> Row:
    if isinstance(spec, Row):
        return spec
    rid, coeffs, relation, rhs = spec
    if isinstance(coeffs, Mapping):
        coeffs = coeffs.items()
    return Row(rid, tuple((c, as_rational(a)) for c, a in coeffs), relation, as_rational(rhs))


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` ``objective`` subject to relational rows and per-column bounds.

    Columns without bounds are free.  ``bounds`` maps a column to a
    ``(lower, upper)`` pair where either side may be ``None``.
    """

    columns: tuple[str, ...]
    rows: tuple[Row, ...] = ()
    objective: Mapping[str, Fraction] = field(default_factory=dict)
    sense: str = "max"
    bounds: Mapping[str, tuple] = field(default_factory=dict)

    def __post_init__(self):
        columns = tuple(self.columns)
        if len(set(columns)) != len(columns):
            raise ValidationError("duplicate column id")
        known = set(columns)
        rows = []
        for spec in self.rows:
            row = _row(spec)
            if row.relation not in RELATIONS:
                raise ValidationError(f"row {row.id!r}: unknown relation {row.relation!r}")
            merged: dict[str, Fraction] = {}
            for c, a in row.coeffs:
                if c not in known:
                    raise ValidationError(f"row {row.id!r} references unknown column {c!r}")
                merged[c] = merged.get(c, ZERO) + a
            coeffs = tuple((c, a) for c, a in merged.items() if a)
            rows.append(Row(row.id, coeffs, row.relation, row.rhs))
        if len({r.id for r in rows}) != len(rows):
            raise ValidationError("duplicate row id")
        objective = {}
        for c, a in dict(self.objective).items():
            if c not in known:
                raise ValidationError(f"objective references unknown column {c!r}")
            a = as_rational(a)
            if a:
                objective[c] = a
        if self.sense not in ("max", "min"):
            raise ValidationError(f"sense must be 'max' or 'min', not {self.sense!r}")
        bounds = {}
        for c, (lo, hi) in dict(self.bounds).items():
            if c not in known:
                raise ValidationError(f"bounds reference unknown column {c!r}")
            lo = None if lo is None else as_rational(lo)
            hi = None if hi is None else as_rational(hi)
            if lo is not None and hi is not None and lo > hi:
                raise ValidationError(f"column {c!r}: lower bound exceeds upper bound")
            if lo is not None or hi is not None:
                bounds[c] = (lo, hi)
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "objective", {c: objective[c] for c in columns if c in objective})
        object.__setattr__(self, "bounds", {c: bounds[c] for c in columns if c in bounds})

    def lower(self, c):
        return self.bounds.get(c, (None, None))[0]

    def upper(self, c):
        return self.bounds.get(c, (None, None))[1]

    @property
    def matrix(self) -> dict[tuple[str, str], Fraction]:
        return {(r.id, c): a for r in self.rows for c, a in r.coeffs}

    @property
    def sign(self) -> int:
        return 1 if self.sense == "max" else -1

    def value(self, point: Mapping[str, Fraction]) -> Fraction:
        return sum((a * point[c] for c, a in self.objective.items()), ZERO)

    def with_bounds(self, changes: Mapping[str, tuple]) -> "LinearProgram":
        bounds = dict(self.bounds)
        bounds.update(changes)
        return LinearProgram(self.columns, self.rows, self.objective, self.sense, bounds)

    def is_feasible(self, point: Mapping[str, Fraction]) -> bool:
        for c in self.columns:
            lo, hi = self.bounds.get(c, (None, None))
            x = point[c]
            if (lo is not None and x < lo) or (hi is not None and x > hi):
                return False
        for row in self.rows:
            act = row.activity(point)
            if row.relation == "<=" and act > row.rhs:
                return False
            if row.relation == ">=" and act < row.rhs:
                return False
            if row.relation == "=" and act != row.rhs:
                return False
        return True


@dataclass(frozen=True)
class LPOutcome:
    status: Status
    value: Fraction | None = None
    point: Mapping[str, Fraction] | None = None
    duals: Mapping[str, Fraction] | None = None
    ray: Mapping[str, Fraction] | None = None


# ----------------------------------------------------------------------------
# standard form


@dataclass(frozen=True)
class StandardForm:
    """``max c.x, A x <= b, x >= 0`` equivalent of a program, with back-translation.

    ``substitution`` maps each original column to ``(offset, [(column, sign)])``
    meaning ``x = offset + sum(sign * x_std)``.
    """

    lp: LinearProgram
    substitution: Mapping[str, tuple]
    sign: int
    constant: Fraction

    def point(self, std_point: Mapping[str, Fraction]) -> dict[str, Fraction]:
        return {
            c: off + sum((s * std_point[k] for k, s in parts), ZERO)
            for c, (off, parts) in self.substitution.items()
        }

    def direction(self, std_ray: Mapping[str, Fraction]) -> dict[str, Fraction]:
        return {
            c: sum((s * std_ray[k] for k, s in parts), ZERO)
            for c, (_, parts) in self.substitution.items()
        }

    def value(self, std_value: Fraction) -> Fraction:
        return self.sign * (std_value + self.constant)


def is_standard(lp: LinearProgram) -> bool:
    return (
        lp.sense == "max"
        and all(r.relation == "<=" for r in lp.rows)
        and all(lp.bounds.get(c) == (0, None) for c in lp.columns)
    )


def to_standard_form(lp: LinearProgram) -> StandardForm:
    """Rewrite as a maximization with only ``<=`` rows and non-negative columns.

    Free columns split into ``id+``/``id-``; an upper bound becomes the row
    ``ub:id``; ``=`` rows split into ``id:le``/``id:ge``; ``>=`` rows are negated.
    """
    sign = lp.sign
    subst: dict[str, tuple] = {}
    columns: list[str] = []
    bound_rows = []
    for c in lp.columns:
        lo, hi = lp.bounds.get(c, (None, None))
        if lo is not None:
            subst[c] = (lo, [(c, 1)])
            columns.append(c)
            if hi is not None:
                bound_rows.append((f"ub:{c}", ((c, Fraction(1)),), "<=", hi - lo))
        elif hi is not None:
            subst[c] = (hi, [(c, -1)])
            columns.append(c)
        else:
            subst[c] = (ZERO, [(c + "+", 1), (c + "-", -1)])
            columns.extend([c + "+", c + "-"])
    if len(set(columns)) != len(columns):
        raise ValidationError("column ids collide after splitting free columns")

    def expand(coeffs):
        out: dict[str, Fraction] = {}
        shift = ZERO
        for c, a in coeffs:
            off, parts = subst[c]
            shift += a * off
            for k, s in parts:
                out[k] = out.get(k, ZERO) + a * s
        return out, shift

    rows = []
    for row in lp.rows:
        coeffs, shift = expand(row.coeffs)
        rhs = row.rhs - shift
        neg = {k: -a for k, a in coeffs.items()}
        if row.relation == "<=":
            rows.append((row.id, coeffs, "<=", rhs))
        elif row.relation == ">=":
            rows.append((row.id, neg, "<=", -rhs))
        else:
            rows.append((f"{row.id}:le", coeffs, "<=", rhs))
            rows.append((f"{row.id}:ge", neg, "<=", -rhs))
    rows.extend(bound_rows)
    obj, constant = expand((c, sign * a) for c, a in lp.objective.items())
    std = LinearProgram(
        tuple(columns), tuple(rows), obj, "max", {c: (ZERO, None) for c in columns}
    )
    return StandardForm(std, subst, sign, constant)


# ----------------------------------------------------------------------------
# simplex


def _axpy(target: dict, a: Fraction, src: dict) -> None:
    """target += a * src, dropping zeros."""
    for k, v in src.items():
        nv = target.get(k, ZERO) + a * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.obj: dict[int, Fraction] = {}
        self.value = ZERO
        # column -> rows with a nonzero entry, kept exact through pivots
        self.where: dict[int, set[int]] = {}
        for i, row in enumerate(rows):
            for k in row:
                self.where.setdefault(k, set()).add(i)

    def set_objective(self, costs: Mapping[int, Fraction]):
        obj = dict(costs)
        value = ZERO
        for i, b in enumerate(self.basis):
            cb = costs.get(b, ZERO)
            if cb:
                _axpy(obj, -cb, self.rows[i])
                value += cb * self.rhs[i]
        self.obj = obj
        self.value = value

    def pivot(self, r: int, j: int):
        row = self.rows[r]
        piv = row[j]
        if piv != 1:
            row = {k: v / piv for k, v in row.items()}
            self.rows[r] = row
            self.rhs[r] /= piv
        rhs_r = self.rhs[r]
        where = self.where
        for i in list(where.get(j, ())):
            if i == r:
                continue
            target = self.rows[i]
            f = target[j]
            for k, v in row.items():
                nv = target.get(k, ZERO) - f * v
                if nv:
                    if k not in target:
                        where.setdefault(k, set()).add(i)
                    target[k] = nv
                else:
                    del target[k]
                    where[k].discard(i)
            self.rhs[i] -= f * rhs_r
        f = self.obj.get(j)
        if f:
            _axpy(self.obj, -f, row)
            self.value += f * rhs_r
        self.basis[r] = j

    def entering(self, limit: int):
        return min((k for k, v in self.obj.items() if v > 0 and k < limit), default=None)

    def leaving(self, j: int):
        best = None
        for i in self.where.get(j, ()):
            a = self.rows[i][j]
            if a > 0:
                ratio = self.rhs[i] / a
                key = (ratio, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        return None if best is None else best[1]

    def run(self, limit: int):
        """Pivot to optimality; returns an unbounded entering column or None."""
        while True:
            j = self.entering(limit)
            if j is None:
                return None
            r = self.leaving(j)
            if r is None:
                return j
            self.pivot(r, j)


def simplex_solve(lp: LinearProgram) -> LPOutcome:
    """Solve exactly.  Deterministic for a given column and row order."""
    sign = lp.sign
    # structural columns: x_c = offset + sum(sign_k * p_k), p >= 0
    structural: list[tuple[str, int]] = []
    subst: dict[str, tuple] = {}
    bound_rows: list[tuple[dict, Fraction]] = []
    for c in lp.columns:
        lo, hi = lp.bounds.get(c, (None, None))
        k = len(structural)
        if lo is not None:
            structural.append((c, 1))
            subst[c] = (lo, [(k, 1)])
            if hi is not None:
                bound_rows.append(({k: Fraction(1)}, hi - lo))
        elif hi is not None:
            structural.append((c, -1))
            subst[c] = (hi, [(k, -1)])
        else:
            structural.extend([(c, 1), (c, -1)])
            subst[c] = (ZERO, [(k, 1), (k + 1, -1)])

    internal = []  # (coeffs, relation, rhs)
    for row in lp.rows:
        coeffs: dict[int, Fraction] = {}
        rhs = row.rhs
        for c, a in row.coeffs:
            off, parts = subst[c]
            rhs -= a * off
            for k, s in parts:
                nv = coeffs.get(k, ZERO) + a * s
                if nv:
                    coeffs[k] = nv
                else:
                    coeffs.pop(k, None)
        internal.append((coeffs, row.relation, rhs))
    for coeffs, bound in bound_rows:
        internal.append((dict(coeffs), "<=", bound))

    n_struct = len(structural)
    n_slack = sum(1 for _, rel, _ in internal if rel != "=")
    first_art = n_struct + n_slack
    rows, rhs, basis, flips, init_cols = [], [], [], [], []
    slack = n_struct
    art = first_art
    for coeffs, rel, b in internal:
        row = dict(coeffs)
        slack_col = None
        if rel != "=":
            slack_col = slack
            row[slack] = Fraction(1) if rel == "<=" else Fraction(-1)
            slack += 1
        flip = 1
        if b < 0:
            flip = -1
            row = {k: -v for k, v in row.items()}
            b = -b
        if slack_col is not None and row[slack_col] == 1:
            basic = slack_col
        else:
            basic = art
            row[art] = Fraction(1)
            art += 1
        rows.append(row)
        rhs.append(b)
        basis.append(basic)
        flips.append(flip)
        init_cols.append(basic)
    n_total = art

    tab = _Tableau(rows, rhs, basis)

    def row_duals(costs):
        # y_i = c_init - z_init, mapped back through the row flips
        duals = {}
        for i, row in enumerate(lp.rows):
            k = init_cols[i]
            y = costs.get(k, ZERO) - tab.obj.get(k, ZERO)
            duals[row.id] = flips[i] * y
        return duals

    def current_point():
        p = [ZERO] * n_struct
        for i, b in enumerate(tab.basis):
            if b < n_struct:
                p[b] = tab.rhs[i]
        return {c: off + sum((s * p[k] for k, s in parts), ZERO) for c, (off, parts) in subst.items()}

    if n_total > first_art:
        phase1 = {k: Fraction(-1) for k in range(first_art, n_total)}
        tab.set_objective(phase1)
        tab.run(first_art)
        if tab.value < 0:
            return LPOutcome(Status.INFEASIBLE, duals=row_duals(phase1))
        for r in range(len(tab.rows)):
            if tab.basis[r] >= first_art:
                cands = [k for k in tab.rows[r] if k < first_art]
                if cands:
                    tab.pivot(r, min(cands))

    costs: dict[int, Fraction] = {}
    constant = ZERO
    for c, a in lp.objective.items():
        off, parts = subst[c]
        constant += sign * a * off
        for k, s in parts:
            costs[k] = costs.get(k, ZERO) + sign * a * s
    costs = {k: v for k, v in costs.items() if v}
    tab.set_objective(costs)
    unbounded = tab.run(first_art)
    point = current_point()
    if unbounded is not None:
        dp = {unbounded: Fraction(1)}
        for i in tab.where.get(unbounded, ()):
            dp[tab.basis[i]] = -tab.rows[i][unbounded]
        ray = {
            c: sum((s * dp.get(k, ZERO) for k, s in parts), ZERO) for c, (_, parts) in subst.items()
        }
        return LPOutcome(Status.UNBOUNDED, point=point, ray=ray)
    value = sign * (tab.value + constant)
    assert value == lp.value(point)
    return LPOutcome(Status.OPTIMAL, value=value, point=point, duals=row_duals(costs))


# ----------------------------------------------------------------------------
# certificates


def _multiplier_signs_ok(lp: LinearProgram, duals: Mapping[str, Fraction]) -> bool:
    for row in lp.rows:
        y = duals[row.id]
        if row.relation == "<=" and y < 0:
            return False
        if row.relation == ">=" and y > 0:
            return False
    return True


def _combine(lp: LinearProgram, duals: Mapping[str, Fraction]):
    g = {c: ZERO for c in lp.columns}
    beta = ZERO
    for row in lp.rows:
        y = duals[row.id]
        if y:
            beta += y * row.rhs
            for c, a in row.coeffs:
                g[c] += y * a
    return g, beta


def check_certificate(lp: LinearProgram, outcome: LPOutcome) -> bool:
    """Verify ``outcome`` against ``lp`` from first principles."""
    try:
        if outcome.status is Status.OPTIMAL:
            return _check_optimal(lp, outcome)
        if outcome.status is Status.UNBOUNDED:
            return _check_unbounded(lp, outcome)
        return _check_infeasible(lp, outcome)
    except (KeyError, TypeError):
        # missing entries: malformed certificate
        return False


def _check_optimal(lp, outcome) -> bool:
    x, y = outcome.point, outcome.duals
    if x is None or y is None or outcome.value is None:
        return False
    if not lp.is_feasible(x) or lp.value(x) != outcome.value:
        return False
    if not _multiplier_signs_ok(lp, y):
        return False
    g, beta = _combine(lp, y)
    bound = beta
    for c in lp.columns:
        d = lp.sign * lp.objective.get(c, ZERO) - g[c]
        if d > 0:
            hi = lp.upper(c)
            if hi is None:
                return False
            bound += d * hi
        elif d < 0:
            lo = lp.lower(c)
            if lo is None:
                return False
            bound += d * lo
    return bound == lp.sign * outcome.value


def _check_unbounded(lp, outcome) -> bool:
    x, r = outcome.point, outcome.ray
    if x is None or r is None or not lp.is_feasible(x):
        return False
    for c in lp.columns:
        lo, hi = lp.bounds.get(c, (None, None))
        if (lo is not None and r[c] < 0) or (hi is not None and r[c] > 0):
            return False
    for row in lp.rows:
        act = row.activity(r)
        if row.relation == "<=" and act > 0:
            return False
        if row.relation == ">=" and act < 0:
            return False
        if row.relation == "=" and act != 0:
            return False
    return lp.sign * lp.value(r) > 0


def _check_infeasible(lp, outcome) -> bool:
    y = outcome.duals
    if y is None or not _multiplier_signs_ok(lp, y):
        return False
    g, beta = _combine(lp, y)
    low = ZERO
    for c in lp.columns:
        if g[c] > 0:
            lo = lp.lower(c)
            if lo is None:
                return False
            low += g[c] * lo
        elif g[c] < 0:
            hi = lp.upper(c)
            if hi is None:
                return False
            low += g[c] * hi
    return low > beta


def solve_and_check(lp: LinearProgram) -> LPOutcome:
    outcome = simplex_solve(lp)
    if not check_certificate(lp, outcome):
        raise AssertionError("simplex produced an invalid certificate")
    return outcome
