"""The basic LP relaxation (BLP) of a VCSP instance.

Columns ``lam:c:nu`` hold the distribution of constraint ``c`` over the tuples
``nu`` of its function; columns ``mu:x:a`` the distribution of variable ``x``
over labels.  Marginal rows ``marg:c:i:a`` tie the two together and
``one:x`` makes every ``mu`` distribution sum to one.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .core import DEFAULT_LIMIT, Instance, brute_optimum, cost, tuples
from .errors import ValidationError
from .exactlp import LinearProgram, Status, simplex_solve

MAX_ARITY = 4


def lam_id(c: int, nu) -> str:
    return f"lam:{c}:{'.'.join(map(str, nu))}"


def mu_id(x: int, a: int) -> str:
    return f"mu:{x}:{a}"


@dataclass(frozen=True)
class BlpIndex:
    lam_columns: tuple[tuple[int, tuple[int, ...]], ...]
    mu_columns: tuple[tuple[int, int], ...]
    marginal_rows: tuple[tuple[int, int, int], ...]
    sum_rows: tuple[int, ...]


def build_blp(instance: Instance, max_arity: int = MAX_ARITY) -> tuple[LinearProgram, BlpIndex]:
    lang = instance.language
    d = lang.domain
    columns, rows, objective = [], [], {}
    lam_cols, marg_rows = [], []
    for c, (scope, name, weight) in enumerate(instance.constraints):
        f = lang[name]
        if f.arity > max_arity:
            raise ValidationError(
                f"constraint {c} on {name!r} has arity {f.arity}, above the cap of {max_arity}"
            )
        for nu, value in f.items():
            col = lam_id(c, nu)
            columns.append(col)
            lam_cols.append((c, nu))
            if weight * value:
                objective[col] = weight * value
    mu_cols = [(x, a) for x in range(instance.n_vars) for a in range(d)]
    columns.extend(mu_id(x, a) for x, a in mu_cols)

    for c, (scope, name, _) in enumerate(instance.constraints):
        f = lang[name]
        for i in range(f.arity):
            for a in range(d):
                coeffs = [(lam_id(c, nu), 1) for nu in tuples(d, f.arity) if nu[i] == a]
                coeffs.append((mu_id(scope[i], a), -1))
                rows.append((f"marg:{c}:{i}:{a}", coeffs, "=", 0))
                marg_rows.append((c, i, a))
    for x in range(instance.n_vars):
        rows.append((f"one:{x}", [(mu_id(x, a), 1) for a in range(d)], "=", 1))

    bounds = {col: (0, 1) for col in columns}
    lp = LinearProgram(tuple(columns), tuple(rows), objective, "min", bounds)
    index = BlpIndex(tuple(lam_cols), tuple(mu_cols), tuple(marg_rows), tuple(range(instance.n_vars)))
    return lp, index


def integral_point(instance: Instance, assignment) -> dict[str, Fraction]:
    """The 0/1 BLP point induced by an assignment."""
    lp, index = build_blp(instance)
    point = {col: Fraction(0) for col in lp.columns}
    for c, (scope, _, _) in enumerate(instance.constraints):
        point[lam_id(c, tuple(assignment[v] for v in scope))] = Fraction(1)
    for x, a in enumerate(assignment):
        point[mu_id(x, a)] = Fraction(1)
    return point


def pin_bounds(instance: Instance, pins: Mapping[int, int]) -> dict[str, tuple]:
    out = {}
    for x, label in pins.items():
        for a in range(instance.language.domain):
            out[mu_id(x, a)] = (1, 1) if a == label else (0, 0)
    return out


def blp_optimum(instance: Instance, pins: Mapping[int, int] | None = None) -> Fraction:
    """``offset`` plus the exact optimum of the relaxation.

    ``pins`` fixes variables to labels through the bounds of their ``mu``
    columns.
    """
    lp, _ = build_blp(instance)
    if pins:
        lp = lp.with_bounds(pin_bounds(instance, pins))
    outcome = simplex_solve(lp)
    if outcome.status is not Status.OPTIMAL:
        # the relaxation polytope is non-empty and bounded
        raise RuntimeError(f"BLP solve returned {outcome.status.value}")
    return instance.offset + outcome.value


def round_by_self_reduction(instance: Instance) -> tuple[Fraction, tuple[int, ...]]:
    """Fix variables one at a time, keeping the relaxation value where possible.

    Each variable (ascending id) gets the smallest label that leaves the
    pinned relaxation value unchanged; if no label does, the label with the
    smallest pinned value.  Exact whenever the relaxation is tight.
    """
    target = blp_optimum(instance)
    pins: dict[int, int] = {}
    for x in range(instance.n_vars):
        best = None
        for a in range(instance.language.domain):
            value = blp_optimum(instance, {**pins, x: a})
            if value == target:
                best = (value, a)
                break
            if best is None or value < best[0]:
                best = (value, a)
        target, pins[x] = best
    h = tuple(pins[x] for x in range(instance.n_vars))
    return cost(instance, h), h


def gap_report(instance: Instance, limit: int = DEFAULT_LIMIT) -> tuple[Fraction, Fraction, bool]:
    brute, _ = brute_optimum(instance, limit)
    relaxed = blp_optimum(instance)
    return relaxed, brute, relaxed == brute
