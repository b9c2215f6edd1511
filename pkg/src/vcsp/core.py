"""VCSP data model, exact cost evaluation and the brute-force oracle.

All values are :class:`fractions.Fraction`.  Exhaustive routines scale every
cost entry of an instance by the common denominator so the enumeration runs
on integers; nothing is ever rounded.
"""
from __future__ import annotations

import itertools
import math
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import SizeLimitError, ValidationError

Rational = Fraction

#: default cap on the number of assignments an exhaustive routine may visit
DEFAULT_LIMIT = 1 << 20

_RATIONAL_RE = re.compile(r"[+-]?\d+(/\d+)?\Z")


def as_rational(value) -> Fraction:
    """Coerce ``value`` to a Fraction.  Floats are refused, they are not exact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        if not _RATIONAL_RE.match(value):
            raise ValueError(f"not a rational literal: {value!r}")
        result = Fraction(value)
        return result
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return Fraction(int(value.numerator), int(value.denominator))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def tuples(domain: int, arity: int) -> Iterator[tuple[int, ...]]:
    """All ``arity``-tuples over ``0..domain-1`` in lexicographic order."""
    return itertools.product(range(domain), repeat=arity)


@dataclass(frozen=True)
class CostFunction:
    """A finite-valued cost table ``D^arity -> Q>=0``.

    ``table`` lists the values in lexicographic order of the argument tuples.
    """

    name: str
    arity: int
    domain: int
    table: tuple[Fraction, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise ValidationError(f"function {self.name!r}: arity must be positive")
        if self.domain < 1:
            raise ValidationError(f"function {self.name!r}: domain must be non-empty")
        table = tuple(as_rational(v) for v in self.table)
        if len(table) != self.domain ** self.arity:
            raise ValidationError(
                f"function {self.name!r}: table has {len(table)} entries, "
                f"expected {self.domain ** self.arity}"
            )
        if any(v < 0 for v in table):
            raise ValidationError(f"function {self.name!r}: negative cost value")
        object.__setattr__(self, "table", table)

    @classmethod
    def from_callable(cls, name, arity, domain, fn) -> "CostFunction":
        return cls(name, arity, domain, tuple(as_rational(fn(*t)) for t in tuples(domain, arity)))

    @classmethod
    def from_mapping(cls, name, arity, domain, mapping: Mapping) -> "CostFunction":
        missing = [t for t in tuples(domain, arity) if t not in mapping]
        if missing:
            raise ValidationError(f"function {name!r}: no value for tuple {missing[0]}")
        return cls(name, arity, domain, tuple(mapping[t] for t in tuples(domain, arity)))

    def index(self, args: Sequence[int]) -> int:
        i = 0
        for a in args:
            i = i * self.domain + a
        return i

    def __call__(self, *args: int) -> Fraction:
        if len(args) != self.arity:
            raise ValidationError(f"function {self.name!r} takes {self.arity} arguments")
        return self.table[self.index(args)]

    def items(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        return zip(tuples(self.domain, self.arity), self.table)

    def renamed(self, name: str) -> "CostFunction":
        return CostFunction(name, self.arity, self.domain, self.table)

    def signature(self) -> tuple:
        """Identity of the table, ignoring the name."""
        return (self.arity, self.table)

    def argmin(self) -> set[tuple[int, ...]]:
        low = min(self.table)
        return {t for t, v in self.items() if v == low}


class Language:
    """A named collection of cost functions over one domain ``0..domain-1``.

    Functions are kept in name order so iteration (and serialization) is
    deterministic.
    """

    def __init__(self, domain: int, functions: Iterable[CostFunction] = ()):
        if domain < 1:
            raise ValidationError("domain size must be at least 1")
        self.domain = domain
        table: dict[str, CostFunction] = {}
        for f in functions:
            if f.name in table:
                raise ValidationError(f"duplicate function name {f.name!r}")
            if f.domain != domain:
                raise ValidationError(f"function {f.name!r} is over domain {f.domain}, not {domain}")
            table[f.name] = f
        self._functions = {name: table[name] for name in sorted(table)}

    def __getitem__(self, name: str) -> CostFunction:
        try:
            return self._functions[name]
        except KeyError:
            raise ValidationError(f"unknown function {name!r}") from None

    def __contains__(self, name) -> bool:
        return name in self._functions

    def __iter__(self) -> Iterator[CostFunction]:
        return iter(self._functions.values())

    def __len__(self) -> int:
        return len(self._functions)

    @property
    def names(self) -> list[str]:
        return list(self._functions)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Language):
            return NotImplemented
        return self.domain == other.domain and self._functions == other._functions

    def __hash__(self) -> int:
        return hash((self.domain, tuple(self._functions.values())))

    def __repr__(self) -> str:
        return f"Language(domain={self.domain}, functions={self.names})"

    def max_value(self) -> Fraction:
        return max((max(f.table) for f in self), default=Fraction(0))


class Constraint(NamedTuple):
    scope: tuple[int, ...]
    function: str
    weight: Fraction


@dataclass(frozen=True)
class Instance:
    """``n_vars`` variables ``0..n_vars-1`` and weighted constraints over ``language``.

    ``offset`` is a constant added to every cost; reductions use it to keep
    optimum values exactly comparable.  ``threshold`` makes it a decision
    instance.
    """

    language: Language
    n_vars: int
    constraints: tuple[Constraint, ...] = ()
    threshold: Fraction | None = None
    offset: Fraction = Fraction(0)

    def __post_init__(self):
        if self.n_vars < 0:
            raise ValidationError("variable count must be non-negative")
        cons = []
        for c in self.constraints:
            scope, name, weight = c
            scope = tuple(int(v) for v in scope)
            f = self.language[name]
            if len(scope) != f.arity:
                raise ValidationError(
                    f"constraint on {name!r} has scope of length {len(scope)}, arity is {f.arity}"
                )
            for v in scope:
                if not 0 <= v < self.n_vars:
                    raise ValidationError(f"constraint on {name!r} uses undeclared variable {v}")
            weight = as_rational(weight)
            if weight < 0:
                warnings.warn(f"negative weight {weight} on {name!r}", stacklevel=3)
            cons.append(Constraint(scope, name, weight))
        object.__setattr__(self, "constraints", tuple(cons))
        object.__setattr__(self, "offset", as_rational(self.offset))
        if self.threshold is not None:
            object.__setattr__(self, "threshold", as_rational(self.threshold))

    def replace(self, **changes) -> "Instance":
        values = dict(
            language=self.language,
            n_vars=self.n_vars,
            constraints=self.constraints,
            threshold=self.threshold,
            offset=self.offset,
        )
        values.update(changes)
        return Instance(**values)


@dataclass(frozen=True)
class Gadget:
    """An instance together with projection variables; expresses a function."""

    instance: Instance
    projection: tuple[int, ...]

    def __post_init__(self):
        proj = tuple(int(v) for v in self.projection)
        if len(set(proj)) != len(proj):
            raise ValidationError("projection variables must be distinct")
        if not proj:
            raise ValidationError("projection must name at least one variable")
        for v in proj:
            if not 0 <= v < self.instance.n_vars:
                raise ValidationError(f"projection variable {v} is not declared")
        object.__setattr__(self, "projection", proj)


@dataclass(frozen=True)
class PinningSpec:
    """How a pinned function ``f`` arises from ``base``.

    ``kept[k]`` is the (1-based) position of ``base`` receiving argument
    ``k+1`` of ``f``; ``pinned`` lists ``(position, value)`` pairs.  Kept and
    pinned positions partition ``1..arity(base)``.
    """

    base: str
    kept: tuple[int, ...]
    pinned: tuple[tuple[int, int], ...] = ()

    @property
    def arity(self) -> int:
        return len(self.kept)

    def base_arguments(self, args: Sequence) -> list:
        """Arguments of ``base`` for the call ``f(*args)``; pinned slots hold labels."""
        n = len(self.kept) + len(self.pinned)
        out: list = [None] * n
        for k, pos in enumerate(self.kept):
            out[pos - 1] = args[k]
        for pos, value in self.pinned:
            out[pos - 1] = value
        return out


# ----------------------------------------------------------------------------
# evaluation


def cost(instance: Instance, assignment: Sequence[int]) -> Fraction:
    """``offset + sum(q * f(h(scope)))`` for a total assignment ``h``."""
    if len(assignment) != instance.n_vars:
        raise ValidationError(
            f"assignment has {len(assignment)} values for {instance.n_vars} variables"
        )
    d = instance.language.domain
    if any(not 0 <= a < d for a in assignment):
        raise ValidationError("assignment uses a label outside the domain")
    total = instance.offset
    lang = instance.language
    for scope, name, weight in instance.constraints:
        total += weight * lang[name](*(assignment[v] for v in scope))
    return total


def _scaled_tables(instance: Instance):
    """Integer versions of every ``q * f`` table plus the common scale."""
    lang = instance.language
    dens = {instance.offset.denominator}
    for _, name, weight in instance.constraints:
        for v in set(lang[name].table):
            dens.add((weight * v).denominator)
    scale = math.lcm(*dens)
    tables = []
    bound = abs(instance.offset) * scale
    for _, name, weight in instance.constraints:
        row = [int(weight * v * scale) for v in lang[name].table]
        bound += max(abs(x) for x in row)
        tables.append(row)
    dtype = np.int64 if bound < 2**62 else object
    offset = int(instance.offset * scale)
    return [np.array(t, dtype=dtype) for t in tables], offset, scale, dtype


def cost_grid(instance: Instance, limit: int = DEFAULT_LIMIT):
    """Scaled costs of all assignments as an array of shape ``(d,)*n``.

    Returns ``(grid, scale)``; the cost of ``h`` is ``grid[h] / scale``.
    """
    d, n = instance.language.domain, instance.n_vars
    size = d**n
    if size > limit:
        raise SizeLimitError(f"{d}^{n} = {size} assignments exceeds the limit of {limit}")
    tables, offset, scale, dtype = _scaled_tables(instance)
    grid = np.full((d,) * n, offset, dtype=dtype)
    axes = [np.arange(d).reshape([d if k == v else 1 for k in range(n)]) for v in range(n)]
    for (scope, _, _), table in zip(instance.constraints, tables):
        idx = 0
        for v in scope:
            idx = idx * d + axes[v]
        grid = grid + table[idx]
    return grid, scale


def all_assignments(instance: Instance) -> Iterator[tuple[int, ...]]:
    return tuples(instance.language.domain, instance.n_vars)


def brute_optimum(instance: Instance, limit: int = DEFAULT_LIMIT) -> tuple[Fraction, tuple[int, ...]]:
    """Exact minimum cost and the lexicographically smallest minimizer."""
    grid, scale = cost_grid(instance, limit)
    flat = grid.reshape(-1)
    i = int(np.argmin(flat)) if instance.n_vars else 0
    best = Fraction(int(flat[i]), scale)
    h = tuple(int(x) for x in np.unravel_index(i, grid.shape)) if instance.n_vars else ()
    return best, h


def optimal_assignments(instance: Instance, limit: int = DEFAULT_LIMIT) -> list[tuple[int, ...]]:
    """Every minimizer, in lexicographic order."""
    grid, _ = cost_grid(instance, limit)
    if instance.n_vars == 0:
        return [()]
    low = grid.min()
    return [tuple(int(x) for x in idx) for idx in zip(*np.nonzero(grid == low))]


def decide(instance: Instance, limit: int = DEFAULT_LIMIT) -> bool:
    """Is there an assignment of cost at most the threshold?"""
    if instance.threshold is None:
        raise ValidationError("decision requires a threshold")
    value, _ = brute_optimum(instance, limit)
    return value <= instance.threshold


def expressed_function(
    gadget: Gadget,
    language: Language | None = None,
    name: str = "expressed",
    limit: int = DEFAULT_LIMIT,
) -> CostFunction:
    """The function ``x -> min{cost(h) : h(projection) = x}``.

    When ``language`` is given the gadget instance is re-validated against it.
    """
    inst = gadget.instance
    if language is not None and language != inst.language:
        inst = inst.replace(language=language)
    grid, scale = cost_grid(inst, limit)
    d, m = inst.language.domain, len(gadget.projection)
    moved = np.moveaxis(grid, list(gadget.projection), list(range(m)))
    mins = moved.reshape(d**m, -1).min(axis=1)
    return CostFunction(name, m, d, tuple(Fraction(int(v), scale) for v in mins))


# ----------------------------------------------------------------------------
# language closures


def pinned_name(base: str, spec: PinningSpec) -> str:
    """Deterministic name for a member of the pinning closure."""
    parts = []
    identity = tuple(sorted(spec.kept)) == spec.kept
    if not identity:
        parts.append("perm=" + ",".join(str(p) for p in spec.kept))
    parts.extend(f"{pos}={val}" for pos, val in sorted(spec.pinned))
    if not parts:
        return base
    return f"{base}[{';'.join(parts)}]"


def apply_pinning(g: CostFunction, spec: PinningSpec, name: str | None = None) -> CostFunction:
    d = g.domain

    def value(*args):
        return g(*spec.base_arguments(args))

    return CostFunction.from_callable(name or pinned_name(g.name, spec), spec.arity, d, value)


def gamma_c(language: Language) -> tuple[Language, dict[str, PinningSpec]]:
    """Close ``language`` under pinning arguments to constants and permuting the rest.

    Original functions are always kept under their own names.  Derived
    functions are deduplicated by table; the first one generated wins.
    """
    d = language.domain
    out: list[CostFunction] = []
    specs: dict[str, PinningSpec] = {}
    seen: set = set()
    for g in language:
        spec = PinningSpec(g.name, tuple(range(1, g.arity + 1)))
        out.append(g)
        specs[g.name] = spec
        seen.add(g.signature())
    for g in language:
        n = g.arity
        positions = range(1, n + 1)
        for k in range(0, n):
            for pinned_pos in itertools.combinations(positions, k):
                free = [p for p in positions if p not in pinned_pos]
                for values in tuples(d, k):
                    pinned = tuple(zip(pinned_pos, values))
                    for kept in itertools.permutations(free):
                        spec = PinningSpec(g.name, tuple(kept), pinned)
                        f = apply_pinning(g, spec)
                        if f.signature() in seen or f.name in specs:
                            continue
                        seen.add(f.signature())
                        out.append(f)
                        specs[f.name] = spec
    return Language(d, out), specs


def restrict_to_subdomain(
    language: Language, subdomain: Iterable[int]
) -> tuple[Language, dict[int, int]]:
    """Restrict every table to ``subdomain``; labels are renumbered in increasing order.

    Returns the restricted language and the map old label -> new label.
    """
    labels = sorted(set(subdomain))
    if not labels:
        raise ValidationError("subdomain must be non-empty")
    if labels[0] < 0 or labels[-1] >= language.domain:
        raise ValidationError("subdomain contains labels outside the domain")
    relabel = {a: i for i, a in enumerate(labels)}
    k = len(labels)
    funcs = [
        CostFunction.from_callable(f.name, f.arity, k, lambda *args, f=f: f(*(labels[a] for a in args)))
        for f in language
    ]
    return Language(k, funcs), relabel


def verify_core_witnesses(
    language: Language, witnesses: Mapping[int, Instance], limit: int = DEFAULT_LIMIT
) -> bool:
    """Check that each ``witnesses[a]`` forces label ``a`` into every optimum."""
    for a in range(language.domain):
        inst = witnesses.get(a)
        if inst is None or inst.n_vars == 0:
            return False
        if inst.language != language:
            raise ValidationError(f"witness for {a} is over a different language")
        grid, _ = cost_grid(inst, limit)
        d, n = language.domain, inst.n_vars
        uses_a = np.zeros(grid.shape, dtype=bool)
        for v in range(n):
            uses_a = uses_a | (np.arange(d).reshape([d if k == v else 1 for k in range(n)]) == a)
        if not np.all(uses_a[grid == grid.min()]):
            return False
    return True


def find_retraction(language: Language, subdomain: Iterable[int]) -> dict[int, int] | None:
    """Search a map ``r: D -> subdomain`` fixing the subdomain with ``f(r(x)) <= f(x)``.

    Such a map sends every assignment to one over the subdomain that is no
    more expensive (for non-negative weights), so restricting the language
    to the subdomain keeps every optimum value.
    """
    sub = sorted(set(subdomain))
    others = [a for a in range(language.domain) if a not in sub]
    for image in tuples(len(sub), len(others)):
        r = {a: a for a in sub}
        r.update({a: sub[i] for a, i in zip(others, image)})
        if all(f(*(r[a] for a in t)) <= v for f in language for t, v in f.items()):
            return r
    return None
