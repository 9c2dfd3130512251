import random

import pytest

from groundasp import oracle
from groundasp.gtext import parse_ground_text
from groundasp.oracle import (
    GuessAtomDefinedInCheck,
    ModelSet,
    TooLarge,
    classical_models,
    diverse_select,
    equilibrium_models,
    gc_solutions,
    ht_models,
    named,
    stable_models,
    superset_maximal,
    supported_models,
)
from groundasp.program import GroundProgram

from conftest import random_program


def sets(program, models):
    return named(program, models)


def test_semantics_counts_section_3_3_1():
    p = parse_ground_text("a :- not b. b :- c. c :- b.")
    assert sets(p, stable_models(p)) == [{"a"}]
    assert sets(p, supported_models(p)) == [{"a"}, {"b", "c"}]
    assert sets(p, classical_models(p)) == [{"a"}, {"b", "c"}, {"a", "b", "c"}]


def test_classical_unsat_constraint():
    p = parse_ground_text(":- .")
    assert len(classical_models(p)) == 0


def test_classical_empty_program():
    assert list(classical_models(GroundProgram())) == [frozenset()]


def test_supported_fact_self_support():
    p = parse_ground_text("a.")
    assert sets(p, supported_models(p)) == [{"a"}]


def test_supported_choice_unconditional():
    p = parse_ground_text("{a}.")
    assert sets(p, supported_models(p)) == [set(), {"a"}]


def test_stable_listing_one():
    p = parse_ground_text("{a}. b :- a. c :- not a.")
    assert sets(p, stable_models(p)) == [{"c"}, {"a", "b"}]


def test_stable_disjunctive():
    p = parse_ground_text("a;b.")
    assert sets(p, stable_models(p)) == [{"a"}, {"b"}]


def test_ht_or_lp_five_models():
    p = parse_ground_text("a;b.")
    models = ht_models(p)
    assert len(models) == 5
    readable = {
        (frozenset(p.symbol(x) for x in h), frozenset(p.symbol(x) for x in t))
        for h, t in models
    }
    assert readable == {
        (frozenset({"b"}), frozenset({"b"})),
        (frozenset({"b"}), frozenset({"a", "b"})),
        (frozenset({"a"}), frozenset({"a"})),
        (frozenset({"a"}), frozenset({"a", "b"})),
        (frozenset({"a", "b"}), frozenset({"a", "b"})),
    }


def test_ht_even_lp_six_models_including_empty_h():
    p = parse_ground_text("a :- not b. b :- not a.")
    models = ht_models(p)
    assert len(models) == 6
    assert (frozenset(), frozenset({1, 2})) in models


def test_ht_empty_program():
    assert list(ht_models(GroundProgram())) == [(frozenset(), frozenset())]


def test_equilibrium_or_and_even():
    for src in ("a;b.", "a :- not b. b :- not a."):
        p = parse_ground_text(src)
        assert sets(p, equilibrium_models(p)) == [{"a"}, {"b"}]


def test_equilibrium_self_loop():
    p = parse_ground_text("a :- a.")
    assert list(equilibrium_models(p)) == [frozenset()]


def test_strong_equivalence_witness():
    orp = parse_ground_text("a;b.")
    evp = parse_ground_text("a :- not b. b :- not a.")
    assert len(ht_models(orp)) != len(ht_models(evp))
    assert sets(orp, equilibrium_models(orp)) == sets(evp, equilibrium_models(evp))


def test_chain_inclusion(rng):
    for _ in range(80):
        p = random_program(rng, max_atoms=6, max_rules=10)
        st = set(stable_models(p).models)
        su = set(supported_models(p).models)
        cl = set(classical_models(p).models)
        assert st <= su <= cl


def test_equilibrium_equals_stable(rng):
    for _ in range(60):
        p = random_program(rng, max_atoms=5, max_rules=8)
        assert equilibrium_models(p) == stable_models(p)


def test_too_large():
    p = GroundProgram(
        [parse_ground_text("a.").statements[0]]
    )
    with pytest.raises(TooLarge):
        classical_models(p, cap=0)


def test_diverse_k_pairs():
    models = ModelSet([frozenset(), frozenset({"a"})])
    out = diverse_select(models, 2, "k_diverse", k=1)
    assert sorted(out) == sorted(
        [
            (frozenset(), frozenset({"a"})),
            (frozenset({"a"}), frozenset()),
        ]
    )


def test_diverse_k_zero_accepts_everything():
    models = ModelSet([frozenset(), frozenset({"a"})])
    out = diverse_select(models, 2, "k_diverse", k=0)
    assert len(out) == 4  # all ordered pairs with repetition


def test_most_diverse_grid_triples():
    cells = [frozenset({1, 2, 3}), frozenset({4, 5, 6}), frozenset({7, 8, 9})]
    combo, score = diverse_select(ModelSet(cells), 3, "most_diverse")
    assert score == 18
    assert set(combo) == set(cells)


def test_k_diverse_above_max_distance_empty():
    cells = [frozenset({1, 2, 3}), frozenset({4, 5, 6}), frozenset({7, 8, 9})]
    assert diverse_select(ModelSet(cells), 3, "k_diverse", k=7) == []


def guess_program():
    return parse_ground_text(
        """
        {a(1); a(2)}.
        ok :- #sum{ 1:a(1); 1:a(2) } >= 1.
        :- not ok.
        #show a(1) : a(1).
        #show a(2) : a(2).
        """
    )


def test_gc_paper_example():
    solutions = gc_solutions(guess_program(), parse_ground_text(":- not a(1)."))
    assert solutions == [frozenset({"a(2)"})]


def test_gc_unsat_check_keeps_all():
    guess = guess_program()
    solutions = gc_solutions(guess, parse_ground_text(":- ."))
    assert solutions == ModelSet(
        [
            frozenset({"a(1)"}),
            frozenset({"a(2)"}),
            frozenset({"a(1)", "a(2)"}),
        ]
    )


def test_gc_empty_check_rejects_all():
    assert len(gc_solutions(guess_program(), GroundProgram())) == 0


def test_gc_guess_atom_defined_in_check():
    check = parse_ground_text("a(1).")
    with pytest.raises(GuessAtomDefinedInCheck):
        gc_solutions(guess_program(), check)


def test_superset_maximal_choice():
    p = parse_ground_text("{a(1); a(2)}.")
    assert superset_maximal(p) == [frozenset({1, 2})]


def test_superset_maximal_single_model():
    p = parse_ground_text("a.")
    assert superset_maximal(p) == [frozenset({1})]


def test_superset_maximal_incomparable():
    p = parse_ground_text("a :- not b. b :- not a.")
    assert superset_maximal(p) == [frozenset({1}), frozenset({2})]
