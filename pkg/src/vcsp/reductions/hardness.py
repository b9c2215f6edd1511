"""The hardness chain 3-SAT -> 4-NAESAT -> 3-NAESAT -> MAXCUT -> VCSP.

Literals are ``(variable, bit)`` pairs; bit 1 negates the variable, so a
literal evaluates to ``h[variable] ^ bit``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..core import DEFAULT_LIMIT, Constraint, Instance, Language, as_rational, tuples
from ..errors import SizeLimitError, ValidationError

Literal = tuple[int, int]


@dataclass(frozen=True)
class _Formula:
    n_vars: int
    clauses: tuple[tuple[Literal, ...], ...]
    width: int = 3

    kind = "formula"

    def __post_init__(self):
        if self.n_vars < 0:
            raise ValidationError("variable count must be non-negative")
        clauses = []
        for clause in self.clauses:
            lits = tuple((int(v), int(b)) for v, b in clause)
            if len(lits) != self.width:
                raise ValidationError(f"{self.kind} clause {lits} does not have width {self.width}")
            for v, b in lits:
                if not 0 <= v < self.n_vars:
                    raise ValidationError(f"literal variable {v} out of range")
                if b not in (0, 1):
                    raise ValidationError(f"polarity bit must be 0 or 1, got {b}")
            clauses.append(lits)
        object.__setattr__(self, "clauses", tuple(clauses))

    def satisfied(self, h: Sequence[int]) -> bool:
        raise NotImplementedError

    def satisfiable(self, limit: int = DEFAULT_LIMIT) -> bool:
        if 2**self.n_vars > limit:
            raise SizeLimitError(f"2^{self.n_vars} assignments exceeds the limit of {limit}")
        return any(self.satisfied(h) for h in tuples(2, self.n_vars))


class CnfFormula(_Formula):
    kind = "cnf"

    def satisfied(self, h):
        return all(any(h[v] ^ b for v, b in clause) for clause in self.clauses)


class NaeFormula(_Formula):
    kind = "nae"

    def __post_init__(self):
        if self.width not in (3, 4):
            raise ValidationError("NAE formulas have width 3 or 4")
        super().__post_init__()

    def satisfied(self, h):
        return all(len({h[v] ^ b for v, b in clause}) == 2 for clause in self.clauses)


@dataclass(frozen=True)
class MaxCutInstance:
    """Weighted graph on vertices ``0..n_vertices-1`` with edges ``(u, v, w)``, ``u < v``."""

    n_vertices: int
    edges: tuple[tuple[int, int, Fraction], ...] = ()
    threshold: Fraction | None = None

    def __post_init__(self):
        seen = set()
        edges = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), as_rational(w)
            if not u < v:
                raise ValidationError(f"edge ({u}, {v}) must have u < v")
            if not (0 <= u and v < self.n_vertices):
                raise ValidationError(f"edge ({u}, {v}) uses an undeclared vertex")
            if w < 0:
                raise ValidationError("edge weights must be non-negative")
            if (u, v) in seen:
                raise ValidationError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
            edges.append((u, v, w))
        object.__setattr__(self, "edges", tuple(sorted(edges)))
        if self.threshold is not None:
            object.__setattr__(self, "threshold", as_rational(self.threshold))

    @classmethod
    def from_edges(cls, n_vertices, edges: Iterable, threshold=None) -> "MaxCutInstance":
        """Build from an edge list, merging parallel edges by adding weights."""
        acc: dict[tuple[int, int], Fraction] = {}
        for u, v, w in edges:
            if u == v:
                raise ValidationError(f"self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            acc[key] = acc.get(key, Fraction(0)) + as_rational(w)
        return cls(n_vertices, tuple((u, v, w) for (u, v), w in acc.items()), threshold)

    @property
    def total_weight(self) -> Fraction:
        return sum((w for _, _, w in self.edges), Fraction(0))

    def cut_value(self, side: Sequence[int]) -> Fraction:
        return sum((w for u, v, w in self.edges if side[u] != side[v]), Fraction(0))


def max_cut(cut: MaxCutInstance, limit: int = DEFAULT_LIMIT) -> tuple[Fraction, tuple[int, ...]]:
    """Exhaustive maximum cut; ties go to the lexicographically smallest side vector."""
    n = cut.n_vertices
    if 2**n > limit:
        raise SizeLimitError(f"2^{n} partitions exceeds the limit of {limit}")
    scale = math.lcm(*(w.denominator for _, _, w in cut.edges)) if cut.edges else 1
    # vertex 0 is the most significant bit so argmax picks the lexicographic first
    masks = np.arange(2**n, dtype=np.int64)
    total = np.zeros(2**n, dtype=object)
    for u, v, w in cut.edges:
        crossing = ((masks >> (n - 1 - u)) & 1) != ((masks >> (n - 1 - v)) & 1)
        total = total + crossing.astype(np.int64).astype(object) * int(w * scale)
    best = int(np.argmax(total)) if n else 0
    side = tuple((best >> (n - 1 - k)) & 1 for k in range(n))
    return Fraction(int(total[best]) if n else 0, scale), side


def maxcut_decide(cut: MaxCutInstance, limit: int = DEFAULT_LIMIT) -> bool:
    if cut.threshold is None:
        raise ValidationError("decision requires a threshold")
    return max_cut(cut, limit)[0] >= cut.threshold


# ----------------------------------------------------------------------------
# reductions


def sat3_to_nae4(cnf: CnfFormula) -> NaeFormula:
    """Append one shared fresh variable, positively, to every clause."""
    if cnf.width != 3:
        raise ValidationError("expected a 3-CNF formula")
    z = cnf.n_vars
    clauses = tuple(clause + ((z, 0),) for clause in cnf.clauses)
    return NaeFormula(cnf.n_vars + 1, clauses, 4)


def nae4_to_nae3(nae4: NaeFormula) -> NaeFormula:
    """Split ``NAE(a,b,c,d)`` into ``NAE(a,b,z)`` and ``NAE(~z,c,d)``, one ``z`` per clause."""
    if nae4.width != 4:
        raise ValidationError("expected a width-4 NAE formula")
    n = nae4.n_vars
    clauses = []
    for j, (a, b, c, d) in enumerate(nae4.clauses):
        z = n + j
        clauses.append((a, b, (z, 0)))
        clauses.append(((z, 1), c, d))
    return NaeFormula(n + len(nae4.clauses), tuple(clauses), 3)


def literal_vertex(lit: Literal) -> int:
    v, b = lit
    return 2 * v + b


def nae3_to_maxcut(nae3: NaeFormula) -> MaxCutInstance:
    """Graph with an edge of weight ``10m`` per variable and a unit triangle per clause.

    Vertex ``2v+b`` stands for the literal ``(v, b)``.  A clause with only two
    distinct literal vertices becomes a weight-2 edge between them (it cuts
    2 exactly when the clause holds, like a triangle); a clause on a single
    literal vertex can never hold and contributes no edge, which makes the
    threshold unreachable.
    """
    if nae3.width != 3:
        raise ValidationError("expected a width-3 NAE formula")
    m = len(nae3.clauses)
    big = 10 * m
    edges = [(2 * v, 2 * v + 1, big) for v in range(nae3.n_vars)]
    for clause in nae3.clauses:
        verts = sorted({literal_vertex(lit) for lit in clause})
        if len(verts) == 3:
            x, y, z = verts
            edges += [(x, y, 1), (x, z, 1), (y, z, 1)]
        elif len(verts) == 2:
            edges.append((verts[0], verts[1], 2))
    threshold = nae3.n_vars * big + 2 * m
    # zero-weight variable edges (no clauses) carry no information; keep the graph plain
    edges = [e for e in edges if e[2] != 0]
    return MaxCutInstance.from_edges(2 * nae3.n_vars, edges, threshold)


def validate_xor_function(language: Language, name: str, labels: tuple[int, int]) -> Fraction:
    """Check ``f(a,b) = f(b,a) = 0`` and ``f(a,a) = f(b,b) > 0``; return that diagonal value."""
    f = language[name]
    a, b = labels
    if f.arity != 2:
        raise ValidationError(f"{name!r} is not binary")
    if a == b or not (0 <= a < language.domain and 0 <= b < language.domain):
        raise ValidationError("xor labels must be two distinct domain labels")
    if f(a, b) != 0 or f(b, a) != 0:
        raise ValidationError(f"{name!r} must vanish on ({a},{b}) and ({b},{a})")
    k = f(a, a)
    if k <= 0 or f(b, b) != k:
        raise ValidationError(f"{name!r} must take one positive value on ({a},{a}) and ({b},{b})")
    return k


def maxcut_to_vcsp(cut: MaxCutInstance, language: Language, name: str, labels: tuple[int, int]) -> Instance:
    """One variable per vertex and one ``name`` constraint per edge; threshold ``W - t``.

    ``W`` is the total edge weight.  Weights are divided by the diagonal value
    of the function so an uncut edge costs exactly its weight.
    """
    k = validate_xor_function(language, name, labels)
    cons = tuple(Constraint((u, v), name, w / k) for u, v, w in cut.edges)
    threshold = None if cut.threshold is None else cut.total_weight - cut.threshold
    return Instance(language, cut.n_vertices, cons, threshold)


def chain_3sat_to_vcsp(cnf: CnfFormula, language: Language, name: str, labels: tuple[int, int]) -> Instance:
    cut = nae3_to_maxcut(nae4_to_nae3(sat3_to_nae4(cnf)))
    return maxcut_to_vcsp(cut, language, name, labels)
