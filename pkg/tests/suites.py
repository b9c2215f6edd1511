"""Seeded case generators for the language reductions.

Each generator returns ``(input_instance, output_instance, expected_shift)``
where the claim under test is ``opt(output) == opt(input) + expected_shift``.
"""
import random
from fractions import Fraction

from vcsp.core import Constraint, CostFunction, Gadget, Instance, Language, expressed_function, gamma_c, tuples
from vcsp.reductions import (
    ScaleMap,
    apply_scale_map,
    dominance_factor,
    expand_expressible,
    lift_gammac,
    restrict_to_core_instance,
)
from vcsp.core import brute_optimum, restrict_to_subdomain

from oracles import random_instance, random_language

VALUES = (0, 1, 2, 3, Fraction(1, 2))


def expand_case(rng: random.Random):
    d = rng.randint(2, 3)
    target = random_language(rng, d, n_functions=rng.randint(1, 3), values=VALUES)
    gadgets, funcs = {}, []
    for k in range(rng.randint(1, 2)):
        arity = rng.randint(1, 2)
        hidden = rng.randint(0, 2)
        n = arity + hidden
        cons = []
        for _ in range(rng.randint(1, 3)):
            f = target[rng.choice(target.names)]
            cons.append(Constraint(tuple(rng.randrange(n) for _ in range(f.arity)), f.name, rng.choice((1, 2, Fraction(1, 3)))))
        proj = tuple(rng.sample(range(n), arity))
        g = Gadget(Instance(target, n, tuple(cons), offset=Fraction(rng.randint(0, 2))), proj)
        name = f"e{k}"
        gadgets[name] = g
        funcs.append(expressed_function(g, name=name))
    source = Language(d, funcs)
    inst = random_instance(rng, source, 3, 3)
    return inst, expand_expressible(inst, gadgets, target), Fraction(0)


def scale_case(rng: random.Random):
    d = rng.randint(2, 3)
    target = random_language(rng, d, n_functions=rng.randint(1, 3), values=VALUES)
    entries, funcs = {}, []
    for k, g in enumerate(target):
        a = rng.choice((Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3)))
        b = Fraction(rng.randint(0, 4), rng.choice((1, 2)))
        name = f"s{k}"
        funcs.append(CostFunction(name, g.arity, d, tuple(a * v + b for v in g.table)))
        entries[name] = (g.name, a, b)
    source = Language(d, funcs)
    inst = random_instance(rng, source, 4, 4)
    return inst, apply_scale_map(inst, ScaleMap(source, target, entries)), Fraction(0)


def retractable_language(rng: random.Random, core_domain: int, extra: int, n_functions: int):
    """Random tables on ``core_domain`` labels, extended so the new labels retract onto the old."""
    d = core_domain + extra
    r = {a: a for a in range(core_domain)}
    r.update({a: rng.randrange(core_domain) for a in range(core_domain, d)})
    funcs = []
    for k in range(n_functions):
        arity = rng.randint(1, 2)
        base = {t: Fraction(rng.choice(VALUES)) for t in tuples(core_domain, arity)}
        table = {}
        for t in tuples(d, arity):
            image = tuple(r[a] for a in t)
            bump = 0 if image == t else rng.choice((0, 1, 2))
            table[t] = base[image] + bump
        funcs.append(CostFunction.from_mapping(f"c{k}", arity, d, table))
    return Language(d, funcs)


def core_case(rng: random.Random):
    core_d = rng.randint(1, 2)
    lang = retractable_language(rng, core_d, rng.randint(1, 2), rng.randint(1, 3))
    sub = tuple(range(core_d))
    core, _ = restrict_to_subdomain(lang, sub)
    inst = random_instance(rng, lang, 4, 4)
    return inst, restrict_to_core_instance(inst, core, sub), Fraction(0)


def perm_setup(d: int, rng: random.Random):
    """A base language with neq-cost and unary anchors plus a matching permutation instance."""
    neq = CostFunction.from_callable("neq", 2, d, lambda a, b: Fraction(int(a == b)))
    anchors = [CostFunction.from_callable(f"at{a}", 1, d, lambda x, a=a: Fraction(int(x != a))) for a in range(d - 1)]
    extra = random_language(rng, d, n_functions=rng.randint(1, 2), values=VALUES)
    base = Language(d, [neq] + anchors + [f.renamed("r" + f.name) for f in extra])
    weight = rng.choice((Fraction(1), Fraction(1, 2)))
    cons = [Constraint((a, b), "neq", weight) for a in range(d) for b in range(a + 1, d)]
    cons += [Constraint((a,), f"at{a}", weight) for a in range(d - 1)]
    perm = Instance(base, d, tuple(cons))
    return base, perm


def gammac_case(rng: random.Random):
    d = rng.randint(2, 3)
    base, perm = perm_setup(d, rng)
    closure, specs = gamma_c(base)
    inst = random_instance(rng, closure, 3 if d == 2 else 2, 3)
    out = lift_gammac(inst, perm, specs)
    factor = dominance_factor(inst, perm)
    return inst, out, factor * brute_optimum(perm)[0]


SUITES = {
    "expand_expressible": expand_case,
    "apply_scale_map": scale_case,
    "restrict_to_core_instance": core_case,
    "lift_gammac": gammac_case,
}
