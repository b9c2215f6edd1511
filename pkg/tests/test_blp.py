import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from vcsp.blp import (
    MAX_ARITY,
    blp_optimum,
    build_blp,
    gap_report,
    integral_point,
    lam_id,
    mu_id,
    round_by_self_reduction,
)
from vcsp.core import Constraint, CostFunction, Instance, Language, brute_optimum, cost
from vcsp.errors import ValidationError

from oracles import cut_language, naive_optimum, neq_language, random_instance, random_language


def neq_triangle():
    cons = tuple(Constraint(s, "neq", 1) for s in [(0, 1), (1, 2), (0, 2)])
    return Instance(neq_language(), 3, cons)


def test_column_and_row_ids():
    lp, index = build_blp(neq_triangle())
    assert lam_id(0, (1, 0)) in lp.columns
    assert mu_id(2, 1) in lp.columns
    assert len(lp.columns) == 3 * 4 + 3 * 2
    assert [r.id for r in lp.rows][:2] == ["marg:0:0:0", "marg:0:0:1"]
    assert lp.rows[-1].id == "one:2"
    assert lp.sense == "min"
    assert all(lp.bounds[c] == (0, 1) for c in lp.columns)
    assert len(index.marginal_rows) == 3 * 2 * 2


def test_triangle_gap():
    inst = neq_triangle()
    assert blp_optimum(inst) == 0
    assert brute_optimum(inst)[0] == 1
    assert gap_report(inst) == (0, 1, False)
    # the half-half point has objective 0
    lp, _ = build_blp(inst)
    half = {c: Fraction(1, 2) if c.startswith("mu") else Fraction(0) for c in lp.columns}
    for c in range(3):
        half[lam_id(c, (0, 1))] = half[lam_id(c, (1, 0))] = Fraction(1, 2)
    assert lp.is_feasible(half) and lp.value(half) == 0


def test_empty_instance():
    inst = Instance(neq_language(), 0)
    assert blp_optimum(inst) == 0
    assert gap_report(inst) == (0, 0, True)


def test_cut_path_tight():
    inst = Instance(cut_language(), 3, (Constraint((0, 1), "cut", 1), Constraint((1, 2), "cut", 1)))
    assert gap_report(inst) == (0, 0, True)


def test_offset_is_added():
    inst = neq_triangle().replace(offset=Fraction(5, 3))
    assert blp_optimum(inst) == Fraction(5, 3)


def test_arity_cap():
    f = CostFunction("big", MAX_ARITY + 1, 2, (0,) * 2 ** (MAX_ARITY + 1))
    inst = Instance(Language(2, [f]), 5, (Constraint(tuple(range(5)), "big", 1),))
    with pytest.raises(ValidationError):
        build_blp(inst)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_integral_embedding(seed):
    rng = random.Random(seed)
    lang = random_language(rng, rng.randint(2, 3), max_arity=3)
    inst = random_instance(rng, lang, 4, 4).replace(offset=Fraction(rng.randint(0, 4), 3))
    lp, _ = build_blp(inst)
    h = tuple(rng.randrange(lang.domain) for _ in range(inst.n_vars))
    point = integral_point(inst, h)
    assert lp.is_feasible(point)
    assert lp.value(point) == cost(inst, h) - inst.offset


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_lower_bound(seed):
    rng = random.Random(seed)
    lang = random_language(rng, rng.randint(2, 3))
    inst = random_instance(rng, lang, 4, 5)
    assert blp_optimum(inst) <= naive_optimum(inst)[0]


def test_rounding_on_tight_instances():
    rng = random.Random(3)
    for _ in range(25):
        inst = random_instance(rng, cut_language(), 4, 5)
        value, h = round_by_self_reduction(inst)
        assert value == blp_optimum(inst) == brute_optimum(inst)[0]
        assert cost(inst, h) == value


def test_rounding_on_triangle():
    value, h = round_by_self_reduction(neq_triangle())
    assert value == 1
    assert cost(neq_triangle(), h) == 1


def test_rounding_unary():
    lang = Language(2, [CostFunction("u", 1, 2, (1, 0))])
    inst = Instance(lang, 1, (Constraint((0,), "u", 1),))
    assert round_by_self_reduction(inst) == (0, (1,))
