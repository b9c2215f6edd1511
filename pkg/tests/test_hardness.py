import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vcsp.core import CostFunction, Language, decide
from vcsp.errors import SizeLimitError, ValidationError
from vcsp.reductions import (
    CnfFormula,
    MaxCutInstance,
    NaeFormula,
    chain_3sat_to_vcsp,
    max_cut,
    maxcut_decide,
    maxcut_to_vcsp,
    nae3_to_maxcut,
    nae4_to_nae3,
    sat3_to_nae4,
    validate_xor_function,
)

from oracles import neq_language


def sat_oracle(n, clauses, nae=False):
    for h in itertools.product((0, 1), repeat=n):
        vals = [[h[v] ^ b for v, b in c] for c in clauses]
        if nae and all(0 in c and 1 in c for c in vals):
            return True
        if not nae and all(any(c) for c in vals):
            return True
    return False


def cut_oracle(n, edges):
    best = Fraction(0)
    for side in itertools.product((0, 1), repeat=n):
        best = max(best, sum((w for u, v, w in edges if side[u] != side[v]), Fraction(0)))
    return best


def random_clauses(rng, n, m, width):
    return tuple(tuple((rng.randrange(n), rng.randint(0, 1)) for _ in range(width)) for _ in range(m))


# ----------------------------------------------------------------------------
# data types


def test_formula_validation():
    with pytest.raises(ValidationError):
        CnfFormula(2, (((0, 0), (1, 0)),))
    with pytest.raises(ValidationError):
        CnfFormula(2, (((0, 0), (1, 0), (2, 0)),))
    with pytest.raises(ValidationError):
        NaeFormula(2, (), 5)
    with pytest.raises(ValidationError):
        NaeFormula(2, (((0, 2), (1, 0), (1, 0)),))


def test_maxcut_merges_and_rejects():
    g = MaxCutInstance.from_edges(3, [(0, 1, 1), (1, 0, 2), (1, 2, 1)])
    assert g.edges == ((0, 1, 3), (1, 2, 1))
    with pytest.raises(ValidationError):
        MaxCutInstance.from_edges(2, [(1, 1, 1)])
    with pytest.raises(ValidationError):
        MaxCutInstance(2, ((0, 1, -1),))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_max_cut_matches_oracle(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 7)
    edges = [(u, v, Fraction(rng.randint(0, 6), rng.choice((1, 2)))) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.5]
    g = MaxCutInstance(n, tuple(edges))
    value, side = max_cut(g)
    assert value == cut_oracle(n, g.edges)
    assert g.cut_value(side) == value


def test_max_cut_limit():
    with pytest.raises(SizeLimitError):
        max_cut(MaxCutInstance(25))


# ----------------------------------------------------------------------------
# 3-SAT to 4-NAE


def test_sat3_to_nae4_empty():
    out = sat3_to_nae4(CnfFormula(0, ()))
    assert (out.n_vars, out.clauses, out.width) == (1, (), 4)
    assert out.satisfiable()


def test_sat3_to_nae4_single_literal_clause():
    out = sat3_to_nae4(CnfFormula(1, (((0, 0),) * 3,)))
    assert out.clauses == (((0, 0), (0, 0), (0, 0), (1, 0)),)
    assert out.satisfied((1, 0))
    assert not out.satisfied((0, 0))


def test_sat3_to_nae4_two_clauses():
    cnf = CnfFormula(3, (((0, 0), (1, 0), (2, 1)), ((0, 1), (1, 0), (2, 0))))
    assert sat3_to_nae4(cnf).satisfiable() == sat_oracle(3, cnf.clauses) is True


def test_sat3_to_nae4_exhaustive_two_variables():
    lits = [(v, b) for v in range(2) for b in (0, 1)]
    clauses = list(itertools.combinations_with_replacement(lits, 3))
    for k in range(3):
        for combo in itertools.combinations_with_replacement(clauses, k):
            cnf = CnfFormula(2, combo)
            assert sat3_to_nae4(cnf).satisfiable() == sat_oracle(2, combo)


# ----------------------------------------------------------------------------
# 4-NAE to 3-NAE


def test_nae4_to_nae3_shapes():
    assert nae4_to_nae3(NaeFormula(2, (), 4)).clauses == ()
    out = nae4_to_nae3(NaeFormula(4, (((0, 0), (1, 1), (2, 0), (3, 1)),), 4))
    assert out.clauses == (((0, 0), (1, 1), (4, 0)), ((4, 1), (2, 0), (3, 1)))


def test_nae4_to_nae3_all_same_literal():
    nae = NaeFormula(1, (((0, 0),) * 4,), 4)
    assert not nae.satisfiable()
    assert not nae4_to_nae3(nae).satisfiable()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32))
def test_nae4_to_nae3_random(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 4)
    nae = NaeFormula(n, random_clauses(rng, n, rng.randint(0, 3), 4), 4)
    assert nae4_to_nae3(nae).satisfiable() == sat_oracle(n, nae.clauses, nae=True)


# ----------------------------------------------------------------------------
# 3-NAE to MAXCUT


def test_nae3_to_maxcut_single_clause():
    g = nae3_to_maxcut(NaeFormula(3, (((0, 0), (1, 0), (2, 0)),)))
    assert g.n_vertices == 6
    assert g.threshold == 32
    heavy = [e for e in g.edges if e[2] == 10]
    assert [(u, v) for u, v, _ in heavy] == [(0, 1), (2, 3), (4, 5)]
    assert sorted((u, v) for u, v, w in g.edges if w == 1) == [(0, 2), (0, 4), (2, 4)]
    assert cut_oracle(6, g.edges) == 32
    assert maxcut_decide(g)


def test_nae3_to_maxcut_empty():
    g = nae3_to_maxcut(NaeFormula(0, ()))
    assert (g.n_vertices, g.edges, g.threshold) == (0, (), 0)
    assert maxcut_decide(g)


def test_nae3_to_maxcut_repeated_literals():
    # NAE(x, x, y): satisfiable iff x != y, realized as a weight-2 edge
    nae = NaeFormula(2, (((0, 0), (0, 0), (1, 0)),))
    g = nae3_to_maxcut(nae)
    assert (0, 2, 2) in g.edges
    assert maxcut_decide(g) == nae.satisfiable() is True
    # NAE(x, x, x) can never hold
    nae = NaeFormula(1, (((0, 1),) * 3,))
    assert not maxcut_decide(nae3_to_maxcut(nae))


def test_nae3_to_maxcut_exhaustive_small():
    lits = [(v, b) for v in range(3) for b in (0, 1)]
    clauses = list(itertools.combinations_with_replacement(lits, 3))
    rng = random.Random(17)
    for k in range(3):
        combos = list(itertools.combinations_with_replacement(clauses, k))
        for combo in rng.sample(combos, min(len(combos), 150)):
            nae = NaeFormula(3, combo)
            g = nae3_to_maxcut(nae)
            assert (cut_oracle(g.n_vertices, g.edges) >= g.threshold) == sat_oracle(3, combo, nae=True)


# ----------------------------------------------------------------------------
# MAXCUT to VCSP


def k3(t):
    return MaxCutInstance(3, ((0, 1, 1), (0, 2, 1), (1, 2, 1)), Fraction(t))


def test_maxcut_to_vcsp_triangle():
    inst = maxcut_to_vcsp(k3(2), neq_language(), "neq", (0, 1))
    assert len(inst.constraints) == 3
    assert inst.threshold == 1
    assert decide(inst)
    inst = maxcut_to_vcsp(k3(3), neq_language(), "neq", (0, 1))
    assert inst.threshold == 0
    assert not decide(inst)


def test_maxcut_to_vcsp_single_edge():
    g = MaxCutInstance(2, ((0, 1, 5),), Fraction(5))
    inst = maxcut_to_vcsp(g, neq_language(), "neq", (0, 1))
    assert inst.threshold == 0 and decide(inst)


def test_xor_validation():
    assert validate_xor_function(neq_language(), "neq", (0, 1)) == 1
    scaled = Language(2, [CostFunction("f", 2, 2, (3, 0, 0, 3))])
    assert validate_xor_function(scaled, "f", (1, 0)) == 3
    bad = Language(2, [CostFunction("f", 2, 2, (1, 0, 1, 1))])
    with pytest.raises(ValidationError):
        validate_xor_function(bad, "f", (0, 1))
    with pytest.raises(ValidationError):
        validate_xor_function(neq_language(), "neq", (0, 0))


def test_scaled_xor_normalizes_weights():
    lang = Language(2, [CostFunction("f", 2, 2, (2, 0, 0, 2))])
    inst = maxcut_to_vcsp(k3(2), lang, "f", (0, 1))
    assert {c.weight for c in inst.constraints} == {Fraction(1, 2)}
    assert decide(inst)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_maxcut_to_vcsp_decisions(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    edges = [(u, v, rng.randint(0, 3)) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.6]
    g = MaxCutInstance.from_edges(n, edges, Fraction(rng.randint(0, 8)))
    assert decide(maxcut_to_vcsp(g, neq_language(), "neq", (0, 1))) == maxcut_decide(g)


# ----------------------------------------------------------------------------
# the whole chain


def test_chain_empty_formula():
    assert decide(chain_3sat_to_vcsp(CnfFormula(0, ()), neq_language(), "neq", (0, 1)))


def test_chain_unsatisfiable_formula():
    # all eight sign patterns over (x, y, y)
    clauses = tuple(((0, a), (1, b), (1, c)) for a, b, c in itertools.product((0, 1), repeat=3))
    cnf = CnfFormula(2, clauses)
    assert not sat_oracle(2, clauses)
    assert not decide(chain_3sat_to_vcsp(cnf, neq_language(), "neq", (0, 1)), limit=1 << 22)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32))
def test_chain_random_formulas(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    cnf = CnfFormula(n, random_clauses(rng, n, rng.randint(0, 2), 3))
    inst = chain_3sat_to_vcsp(cnf, neq_language(), "neq", (0, 1))
    assert decide(inst) == sat_oracle(n, cnf.clauses)
