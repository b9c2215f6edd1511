"""Optimum-preserving rewrites between valued constraint languages."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from ..core import (
    DEFAULT_LIMIT,
    Constraint,
    CostFunction,
    Gadget,
    Instance,
    Language,
    PinningSpec,
    apply_pinning,
    as_rational,
    brute_optimum,
    cost_grid,
    expressed_function,
    optimal_assignments,
    restrict_to_subdomain,
)
from ..errors import ValidationError


def expand_expressible(
    instance: Instance,
    gadgets: Mapping[str, Gadget],
    target: Language,
    limit: int = DEFAULT_LIMIT,
) -> Instance:
    """Replace every constraint by a weighted copy of the gadget expressing its function.

    Non-projection gadget variables become fresh variables numbered from
    ``instance.n_vars`` upwards, in constraint order.  The gadget offset,
    scaled by the constraint weight, moves into the output offset.
    """
    source = instance.language
    for name in {c.function for c in instance.constraints}:
        if name not in gadgets:
            raise ValidationError(f"no gadget for function {name!r}")
    for name, gadget in gadgets.items():
        if name not in source:
            continue
        if gadget.instance.language != target:
            raise ValidationError(f"gadget for {name!r} is not over the target language")
        want = source[name]
        got = expressed_function(gadget, name=name, limit=limit)
        if got.arity != want.arity or got.table != want.table:
            raise ValidationError(f"gadget for {name!r} does not express it")

    next_var = instance.n_vars
    out: list[Constraint] = []
    offset = instance.offset
    for scope, name, weight in instance.constraints:
        gadget = gadgets[name]
        ginst = gadget.instance
        rename = {}
        for i, v in enumerate(gadget.projection):
            rename[v] = scope[i]
        for v in range(ginst.n_vars):
            if v not in rename:
                rename[v] = next_var
                next_var += 1
        for gscope, gname, gweight in ginst.constraints:
            out.append(Constraint(tuple(rename[v] for v in gscope), gname, weight * gweight))
        offset += weight * ginst.offset
    return Instance(target, next_var, tuple(out), instance.threshold, offset)


@dataclass(frozen=True)
class ScaleEntry:
    target: str
    scale: Fraction
    shift: Fraction


class ScaleMap:
    """For each source function ``f``, a target ``g`` with ``f = scale * g + shift``.

    The identity is checked entry by entry on construction.
    """

    def __init__(self, source: Language, target: Language, entries: Mapping[str, tuple]):
        if source.domain != target.domain:
            raise ValidationError("scale map languages must share the domain")
        self.source = source
        self.target = target
        self.entries: dict[str, ScaleEntry] = {}
        for name in sorted(entries):
            g_name, a, b = entries[name]
            a, b = as_rational(a), as_rational(b)
            if a <= 0:
                raise ValidationError(f"scale for {name!r} must be positive")
            f, g = source[name], target[g_name]
            if f.arity != g.arity or any(fv != a * gv + b for fv, gv in zip(f.table, g.table)):
                raise ValidationError(f"{name!r} is not {a}*{g_name}+{b}")
            self.entries[name] = ScaleEntry(g_name, a, b)

    def __eq__(self, other):
        if not isinstance(other, ScaleMap):
            return NotImplemented
        return (self.source, self.target, self.entries) == (other.source, other.target, other.entries)


def find_scaling(f: CostFunction, g: CostFunction) -> tuple[Fraction, Fraction] | None:
    """``(a, b)`` with ``a > 0`` and ``f = a*g + b``, or None."""
    if f.arity != g.arity or f.domain != g.domain:
        return None
    gvals = sorted(set(g.table))
    if len(gvals) == 1:
        # constant g: any constant f works with a = 1
        if len(set(f.table)) == 1:
            return Fraction(1), f.table[0] - g.table[0]
        return None
    i = g.table.index(gvals[0])
    j = g.table.index(gvals[-1])
    a = (f.table[j] - f.table[i]) / (g.table[j] - g.table[i])
    if a <= 0:
        return None
    b = f.table[i] - a * g.table[i]
    if all(fv == a * gv + b for fv, gv in zip(f.table, g.table)):
        return a, b
    return None


def apply_scale_map(instance: Instance, scale_map: ScaleMap) -> Instance:
    """Rewrite ``(s, f, q)`` as ``(s, g, q*a)`` and add ``q*b`` to the offset.

    Every assignment keeps its exact cost.
    """
    if instance.language != scale_map.source:
        raise ValidationError("instance is not over the scale map's source language")
    out = []
    offset = instance.offset
    for scope, name, weight in instance.constraints:
        try:
            e = scale_map.entries[name]
        except KeyError:
            raise ValidationError(f"scale map has no entry for {name!r}") from None
        out.append(Constraint(scope, e.target, weight * e.scale))
        offset += weight * e.shift
    return Instance(scale_map.target, instance.n_vars, tuple(out), instance.threshold, offset)


def restrict_to_core_instance(
    instance: Instance, core: Language, subdomain=None
) -> Instance:
    """Reinterpret the instance over a sub-language with the same function names.

    ``subdomain`` (labels of the original domain) is searched for when
    omitted: the first subset whose restriction equals ``core``.
    """
    lang = instance.language
    if subdomain is None:
        subdomain = find_subdomain(lang, core)
        if subdomain is None:
            raise ValidationError("core is not a restriction of the instance language")
    restricted, _ = restrict_to_subdomain(lang, subdomain)
    if restricted != core:
        raise ValidationError("core is not the restriction of the language to the subdomain")
    return instance.replace(language=core)


def find_subdomain(language: Language, core: Language):
    """First subset of labels (in lexicographic order) whose restriction equals ``core``."""
    for sub in itertools.combinations(range(language.domain), core.domain):
        if restrict_to_subdomain(language, sub)[0] == core:
            return sub
    return None


def verify_perm_instance(perm: Instance, language: Language, limit: int = DEFAULT_LIMIT) -> bool:
    """Check the finitely checkable properties of a permutation instance.

    Variable ``a`` stands for ``x_a``.  The identity labelling must be optimal
    and every optimum must be injective.
    """
    d = language.domain
    if perm.n_vars != d or perm.language != language:
        return False
    optima = optimal_assignments(perm, limit)
    identity = tuple(range(d))
    return identity in optima and all(len(set(h)) == d for h in optima)


def perm_gap(perm: Instance, limit: int = DEFAULT_LIMIT) -> Fraction | None:
    """Smallest positive difference between a non-optimal and the optimal cost."""
    grid, scale = cost_grid(perm, limit)
    values = sorted(set(int(v) for v in grid.reshape(-1)))
    if len(values) < 2:
        return None
    return Fraction(values[1] - values[0], scale)


def dominance_factor(instance: Instance, perm: Instance, limit: int = DEFAULT_LIMIT) -> Fraction:
    """The multiplier for the permutation instance's weights.

    ``sum(|q|)`` over the input constraints times the largest table value of
    the base language (pinning never raises it), divided by the permutation
    instance's optimality gap when that gap is below one, and 1 when the
    product vanishes.
    """
    top = perm.language.max_value()
    m = sum((abs(q) * top for _, _, q in instance.constraints), Fraction(0))
    if m == 0:
        return Fraction(1)
    gap = perm_gap(perm, limit)
    if gap is not None and gap < 1:
        m = m / gap
    return m


def lift_gammac(
    instance: Instance,
    perm: Instance,
    pinnings: Mapping[str, PinningSpec],
    limit: int = DEFAULT_LIMIT,
) -> Instance:
    """Turn an instance over the pinning closure into one over the base language.

    Pinned argument positions are routed to helper variables ``x_a`` (ids
    ``n_vars + a``) and the permutation instance, weighted by
    :func:`dominance_factor`, forces ``x_a`` to behave like the label ``a``.
    """
    base = perm.language
    if not verify_perm_instance(perm, base, limit):
        raise ValidationError("permutation instance fails the optimality checks")
    n, d = instance.n_vars, base.domain
    out = []
    for scope, name, weight in instance.constraints:
        spec = pinnings.get(name)
        if spec is None:
            raise ValidationError(f"no pinning recorded for {name!r}")
        g = base[spec.base]
        f = instance.language[name]
        if apply_pinning(g, spec).table != f.table:
            raise ValidationError(f"pinning for {name!r} does not reproduce its table")
        args = spec.base_arguments(scope)
        for pos, value in spec.pinned:
            args[pos - 1] = n + value
        out.append(Constraint(tuple(args), spec.base, weight))
    factor = dominance_factor(instance, perm, limit)
    for scope, name, weight in perm.constraints:
        out.append(Constraint(tuple(n + v for v in scope), name, factor * weight))
    offset = instance.offset + factor * perm.offset
    threshold = instance.threshold
    if threshold is not None:
        threshold += factor * brute_optimum(perm, limit)[0]
    return Instance(base, n + d, tuple(out), threshold, offset)
