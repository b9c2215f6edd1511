import itertools
import random

import pytest

from vcsp.blp import blp_optimum
from vcsp.classify import (
    WEIGHTS,
    DichotomyReport,
    empirical_dichotomy,
    random_instance,
    search_size,
    xor_pair,
    xor_witness_search,
)
from vcsp.core import CostFunction, Language, brute_optimum, gamma_c
from vcsp.errors import SizeLimitError, ValidationError

from oracles import cut_language, neq_language


def test_xor_pair():
    assert xor_pair(neq_language()["neq"]) == (0, 1)
    assert xor_pair(cut_language()["cut"]) is None
    assert xor_pair(CostFunction("u", 1, 2, (0, 1))) is None
    # minimized only at (0, 1): not symmetric
    assert xor_pair(CostFunction("g", 2, 2, (1, 0, 1, 1))) is None


def test_neq_witness_is_identity_gadget():
    w = xor_witness_search(neq_language(), 2, 1)
    assert w is not None
    assert w.labels == (0, 1)
    assert len(w.gadget.instance.constraints) == 1
    assert w.gadget.instance.constraints[0].function == "neq"
    assert w.table.argmin() == {(0, 1), (1, 0)}
    assert w.revalidate()


def test_cut_language_inconclusive():
    assert xor_witness_search(cut_language(), 3, 3) is None


def test_cut_language_hand_checked_tables():
    # recompute a sample of expressed tables with plain loops
    closure, _ = gamma_c(cut_language())
    assert len(closure) == 3
    names = closure.names
    rng = random.Random(4)
    for _ in range(30):
        cons = []
        for _ in range(rng.randint(1, 3)):
            f = closure[rng.choice(names)]
            cons.append((tuple(rng.randrange(3) for _ in range(f.arity)), f))
        table = {}
        for h in itertools.product((0, 1), repeat=3):
            value = sum(f(*(h[v] for v in scope)) for scope, f in cons)
            key = h[:2]
            table[key] = min(table.get(key, value), value)
        low = min(table.values())
        argmin = {k for k, v in table.items() if v == low}
        assert argmin != {(0, 1), (1, 0)}


def test_constant_language_has_no_witness():
    lang = Language(2, [CostFunction("c", 2, 2, (1, 1, 1, 1))])
    assert xor_witness_search(lang, 3, 2) is None


def test_search_budget_refusal():
    closure, _ = gamma_c(neq_language(3))
    assert search_size(closure, 5, 5) > 200_000
    with pytest.raises(SizeLimitError):
        xor_witness_search(neq_language(3), 5, 5)
    with pytest.raises(SizeLimitError):
        xor_witness_search(neq_language(), 2, 1, budget=1)
    with pytest.raises(ValidationError):
        xor_witness_search(neq_language(), 1, 1)


def test_random_instance_distribution():
    rng = random.Random(0)
    for _ in range(50):
        inst = random_instance(neq_language(), rng, 4, 5)
        assert 1 <= inst.n_vars <= 4
        assert len(inst.constraints) <= 5
        assert all(c.weight in WEIGHTS for c in inst.constraints)


def test_neq_language_reports_gap_or_witness():
    for seed in range(3):
        report = empirical_dichotomy(neq_language(), 30, 3, 3, seed)
        assert report.verdict in ("gap-witness", "xor-witness")
        if report.verdict == "gap-witness":
            assert report.blp_value < report.brute_value
            assert blp_optimum(report.gap_instance) == report.blp_value
            assert brute_optimum(report.gap_instance)[0] == report.brute_value


def test_cut_language_tight():
    report = empirical_dichotomy(cut_language(), 100, 5, 3, seed=7)
    assert report.verdict == "blp-tight-up-to-bound"
    assert report.search == "exhausted"
    report = empirical_dichotomy(cut_language(), 10, 5, 3, seed=7, budget=100)
    assert report.search == "skipped-budget"
    small = empirical_dichotomy(cut_language(), 20, 3, 3, seed=7)
    assert small.verdict == "blp-tight-up-to-bound" and small.search == "exhausted"


def test_empty_language():
    report = empirical_dichotomy(Language(2, []), 10, 3, 3, seed=1)
    assert report.verdict == "blp-tight-up-to-bound"


def test_report_is_deterministic_and_worker_independent():
    a = empirical_dichotomy(neq_language(), 40, 3, 4, seed=5)
    b = empirical_dichotomy(neq_language(), 40, 3, 4, seed=5, workers=2)
    assert a == b
    assert a.render() == b.render()
    assert isinstance(a, DichotomyReport)
    assert "verdict" in a.render()
