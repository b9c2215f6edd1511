"""Probing which side of the BLP / (XOR) dichotomy a finite language is on.

Both probes are bounded.  A found witness is a proof (it is re-validated by
exhaustion); running out of bounds proves nothing.
"""
from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .blp import gap_report
from .core import (
    DEFAULT_LIMIT,
    Constraint,
    CostFunction,
    Gadget,
    Instance,
    Language,
    expressed_function,
    gamma_c,
    tuples,
)
from .errors import SizeLimitError, ValidationError

#: weights drawn for random instances
WEIGHTS = (Fraction(1), Fraction(1, 2), Fraction(2), Fraction(3))

#: maximum number of gadgets the witness search may enumerate
SEARCH_BUDGET = 200_000


@dataclass(frozen=True)
class XorWitness:
    gadget: Gadget
    labels: tuple[int, int]
    table: CostFunction

    def revalidate(self) -> bool:
        again = expressed_function(self.gadget, name=self.table.name)
        return again == self.table and xor_pair(again) == self.labels


def xor_pair(f: CostFunction) -> tuple[int, int] | None:
    """``(a, b)`` with ``a < b`` if ``argmin f`` is exactly ``{(a,b), (b,a)}``."""
    if f.arity != 2:
        return None
    low = f.argmin()
    if len(low) != 2:
        return None
    (a, b), (c, e) = sorted(low)
    if a != b and (c, e) == (b, a):
        return a, b
    return None


def _atoms(closure: Language, n: int):
    return [(f.name, scope) for f in closure for scope in tuples(n, f.arity)]


def search_size(closure: Language, max_vars: int, max_cons: int) -> int:
    total = 0
    for n in range(2, max_vars + 1):
        a = len(_atoms(closure, n))
        for k in range(1, max_cons + 1):
            total += math.comb(a + k - 1, k)
    return total


def xor_witness_search(
    language: Language, max_vars: int, max_cons: int, budget: int = SEARCH_BUDGET
) -> XorWitness | None:
    """Enumerate unit-weight gadgets over the pinning closure, projecting on variables 0 and 1.

    Gadgets are visited by variable count, then constraint count, then as
    multisets of (function, scope) atoms in closure order.  Returns the first
    gadget whose expressed table is minimized exactly on a swapped pair of
    distinct labels, or None if the bounds are exhausted.
    """
    if max_vars < 2:
        raise ValidationError("a binary witness needs at least two variables")
    closure, _ = gamma_c(language)
    size = search_size(closure, max_vars, max_cons)
    if size > budget:
        raise SizeLimitError(f"witness search would visit {size} gadgets (budget {budget})")
    for n in range(2, max_vars + 1):
        atoms = _atoms(closure, n)
        for k in range(1, max_cons + 1):
            for combo in itertools.combinations_with_replacement(range(len(atoms)), k):
                cons = tuple(Constraint(atoms[i][1], atoms[i][0], Fraction(1)) for i in combo)
                gadget = Gadget(Instance(closure, n, cons), (0, 1))
                table = expressed_function(gadget, name="xor")
                pair = xor_pair(table)
                if pair is not None:
                    return XorWitness(gadget, pair, table)
    return None


def random_instance(language: Language, rng: random.Random, max_vars: int, max_cons: int) -> Instance:
    """Draw ``n`` in ``1..max_vars``, ``k`` in ``0..max_cons`` and ``k`` uniform constraints.

    Each constraint picks its function uniformly, each scope entry uniformly
    among the ``n`` variables and its weight uniformly from ``WEIGHTS``.
    """
    n = rng.randint(1, max_vars)
    k = rng.randint(0, max_cons)
    names = language.names
    cons = []
    if names:
        for _ in range(k):
            f = language[rng.choice(names)]
            scope = tuple(rng.randrange(n) for _ in range(f.arity))
            cons.append(Constraint(scope, f.name, rng.choice(WEIGHTS)))
    return Instance(language, n, tuple(cons))


@dataclass(frozen=True)
class DichotomyReport:
    verdict: str  # "xor-witness" | "blp-tight-up-to-bound" | "gap-witness"
    max_vars: int
    max_cons: int
    trials: int
    seed: int
    witness: XorWitness | None = None
    gap_instance: Instance | None = None
    gap_trial: int | None = None
    blp_value: Fraction | None = None
    brute_value: Fraction | None = None
    search: str = "not-run"  # "exhausted" | "skipped-budget" | "found"

    def render(self) -> str:
        from .formats import serialize_instance

        lines = [
            f"verdict {self.verdict}",
            f"bounds max-vars {self.max_vars} max-cons {self.max_cons} trials {self.trials} seed {self.seed}",
            f"xor-search {self.search}",
        ]
        if self.gap_instance is not None:
            lines += [
                f"gap-trial {self.gap_trial}",
                f"blp {self.blp_value}",
                f"brute {self.brute_value}",
                "instance",
            ]
            lines += ["  " + s for s in serialize_instance(self.gap_instance).splitlines()]
        if self.witness is not None:
            w = self.witness
            lines.append(f"labels {w.labels[0]} {w.labels[1]}")
            lines.append(f"gadget vars {w.gadget.instance.n_vars} projection 0 1")
            for scope, name, weight in w.gadget.instance.constraints:
                lines.append(f"  con {name} {weight} {' '.join(map(str, scope))}")
            lines.append("table")
            for t, v in w.table.items():
                lines.append(f"  val {' '.join(map(str, t))} {v}")
        return "\n".join(lines) + "\n"


def _trial(inst: Instance):
    return gap_report(inst)


def empirical_dichotomy(
    language: Language,
    trials: int,
    max_vars: int,
    max_cons: int,
    seed: int,
    workers: int = 1,
    budget: int = SEARCH_BUDGET,
) -> DichotomyReport:
    """Compare BLP and brute force on seeded random instances, then search for (XOR).

    The first instance (by trial index) with a strict gap wins; results do
    not depend on ``workers``.
    """
    rng = random.Random(seed)
    instances = [random_instance(language, rng, max_vars, max_cons) for _ in range(trials)]
    if language.domain**max_vars > DEFAULT_LIMIT:
        raise SizeLimitError("random instances would exceed the brute-force limit")
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_trial, instances, chunksize=8))
    else:
        results = map(_trial, instances)
    common = dict(max_vars=max_vars, max_cons=max_cons, trials=trials, seed=seed)
    for t, (inst, (relaxed, brute, tight)) in enumerate(zip(instances, results)):
        if not tight:
            return DichotomyReport(
                "gap-witness", gap_instance=inst, gap_trial=t, blp_value=relaxed, brute_value=brute, **common
            )
    if max_vars < 2:
        return DichotomyReport("blp-tight-up-to-bound", search="not-run", **common)
    try:
        witness = xor_witness_search(language, max_vars, max_cons, budget)
    except SizeLimitError:
        return DichotomyReport("blp-tight-up-to-bound", search="skipped-budget", **common)
    if witness is not None:
        return DichotomyReport("xor-witness", witness=witness, search="found", **common)
    return DichotomyReport("blp-tight-up-to-bound", search="exhausted", **common)
