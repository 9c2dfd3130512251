import random

import pytest

from groundasp import oracle
from groundasp.dl import DLPropagator
from groundasp.drivers import (
    BoundVarAbsent,
    IncConfig,
    branch_and_bound,
    dl_branch_and_bound,
    flowshop_makespans,
    gen_flowshop,
    gen_hanoi,
    guess_check_solve,
    incremental_solve,
)
from groundasp.gtext import parse_ground_text
from groundasp.solver import Solver

from conftest import random_program


def test_bnb_unique_model_two_calls():
    solver = Solver(parse_ground_text("a. #minimize{ 0:a }."))
    result = branch_and_bound(solver, quiet=True)
    assert result.bounds == [0]
    assert result.solve_calls == 2


def test_bnb_unsat_program():
    solver = Solver(parse_ground_text("{a}. :- a. :- not a. #minimize{ 1:a }."))
    result = branch_and_bound(solver, quiet=True)
    assert result.optimum is None
    assert result.solve_calls == 1
    assert result.bounds == []


def test_bnb_bounds_strictly_decreasing(rng):
    for _ in range(25):
        p = random_program(rng, max_atoms=5, max_rules=8)
        lits = tuple(
            (a, rng.randint(1, 3)) for a in range(1, p.atom_count + 1)
        )
        from groundasp.aspif import Minimize

        p.add(Minimize(0, lits))
        solver = Solver(p)
        result = branch_and_bound(solver, quiet=True)
        assert all(x > y for x, y in zip(result.bounds, result.bounds[1:]))
        models = oracle.stable_models(p)
        if len(models):
            best = min(
                sum(w for a, w in lits if a in m) for m in models
            )
            assert result.bounds[-1] == best
        else:
            assert result.optimum is None


def test_bnb_rejects_multiple_priorities():
    solver = Solver(parse_ground_text("{a}. #minimize{ 1@0:a; 1@1:a }."))
    with pytest.raises(ValueError):
        branch_and_bound(solver, quiet=True)


def test_bnb_progress_lines():
    lines = []
    solver = Solver(parse_ground_text("a. #minimize{ 2:a }."))
    branch_and_bound(solver, log=lines.append)
    assert lines == ["Found new bound: 2", "Optimum found"]


def test_hanoi_bounded_17():
    solver = Solver(gen_hanoi("bounded", 17))
    result = branch_and_bound(solver, quiet=True)
    assert result.bounds == [17, 16, 15]
    assert result.solve_calls == 4
    assert result.models == 3
    assert result.optimum["cost"] == 15


def test_hanoi_bounded_14_unsat():
    solver = Solver(gen_hanoi("bounded", 14))
    result = branch_and_bound(solver, quiet=True)
    assert result.optimum is None
    assert result.solve_calls == 1


def test_hanoi_incremental():
    status, step, calls = incremental_solve(
        gen_hanoi("incremental"), IncConfig(istop="SAT"), quiet=True
    )
    assert status == "SAT"
    assert step == 15
    assert calls == 16


class TrivialGenerator:
    """Step t is satisfiable iff t >= threshold."""

    def __init__(self, threshold):
        self.threshold = threshold
        from groundasp.aspif import External, NormalBody, Rule
        from groundasp.program import GroundProgram

        self._E, self._R, self._NB, self._GP = External, Rule, NormalBody, GroundProgram

    def segment(self, t):
        query = 2 * t + 1
        ok = 2 * t + 2
        statements = [self._E(query, 2)]
        if t >= self.threshold:
            statements.append(self._R(False, (ok,), self._NB(())))
        statements.append(self._R(False, (), self._NB((query, -ok))))
        from groundasp.program import GroundProgram

        return GroundProgram(statements), query


def test_incremental_stop_at_step_zero():
    status, step, calls = incremental_solve(
        TrivialGenerator(0), IncConfig(istop="SAT"), quiet=True
    )
    assert (status, step, calls) == ("SAT", 0, 1)


def test_incremental_imax_enforced():
    status, step, calls = incremental_solve(
        TrivialGenerator(99), IncConfig(istop="SAT", imax=3), quiet=True
    )
    assert status == "UNSAT"
    assert step == 3
    assert calls == 4


def test_incremental_imin_defers_stop():
    status, step, calls = incremental_solve(
        TrivialGenerator(0), IncConfig(istop="SAT", imin=2), quiet=True
    )
    assert (status, step, calls) == ("SAT", 2, 3)


def test_incremental_call_count_property(rng):
    for _ in range(10):
        threshold = rng.randint(0, 5)
        status, step, calls = incremental_solve(
            TrivialGenerator(threshold), IncConfig(istop="SAT"), quiet=True
        )
        assert status == "SAT" and step == threshold
        assert calls == threshold + 1


def test_flowshop_six_solutions_with_figure_makespans():
    makespans = flowshop_makespans()
    assert sorted(makespans.values()) == [16, 16, 18, 19, 20, 20]
    solver = Solver(gen_flowshop())
    propagator = DLPropagator()
    solver.register_propagator(propagator)
    found = []

    def on_model(model):
        witness = dict(propagator.assignment(model.thread_id))
        found.append(witness["bound"])

    solver.solve(on_model=on_model, max_models=0)
    assert sorted(found) == [16, 16, 18, 19, 20, 20]


def test_flowshop_optimum_16():
    solver = Solver(gen_flowshop())
    propagator = DLPropagator()
    solver.register_propagator(propagator)
    result = dl_branch_and_bound(solver, propagator, quiet=True)
    assert result.bounds[-1] == 16
    assert all(x > y for x, y in zip(result.bounds, result.bounds[1:]))


def test_flowshop_single_task():
    solver = Solver(gen_flowshop([("a", (5,))]))
    propagator = DLPropagator()
    solver.register_propagator(propagator)
    result = dl_branch_and_bound(solver, propagator, quiet=True)
    assert result.bounds[-1] == 5
    assert result.solve_calls == 2


def test_dl_bnb_infeasible_theory():
    program = parse_ground_text(
        "&diff { x - y } <= -1. &diff { y - x } <= -1. "
        "&diff { x - bound } <= 0."
    )
    solver = Solver(program)
    propagator = DLPropagator()
    solver.register_propagator(propagator)
    result = dl_branch_and_bound(solver, propagator, quiet=True)
    assert result.optimum is None


def test_dl_bnb_bound_var_absent():
    solver = Solver(parse_ground_text("&diff { x - y } <= 3."))
    propagator = DLPropagator()
    solver.register_propagator(propagator)
    with pytest.raises(BoundVarAbsent):
        dl_branch_and_bound(solver, propagator, quiet=True)


def test_dl_bnb_optimum_equals_brute_force(rng):
    for _ in range(5):
        tasks = []
        for i in range(rng.randint(1, 4)):
            tasks.append(
                (f"t{i}", tuple(rng.randint(1, 4) for _ in range(2)))
            )
        solver = Solver(gen_flowshop(tasks))
        propagator = DLPropagator()
        solver.register_propagator(propagator)
        result = dl_branch_and_bound(solver, propagator, quiet=True)
        assert result.bounds[-1] == min(flowshop_makespans(tasks).values())


GUESS = """
{a(1); a(2)}.
ok :- #sum{ 1:a(1); 1:a(2) } >= 1.
:- not ok.
#show a(1) : a(1).
#show a(2) : a(2).
"""


def test_gc_paper_answer():
    result = guess_check_solve(
        parse_ground_text(GUESS), parse_ground_text(":- not a(1).")
    )
    assert result == [frozenset({"a(2)"})]


def test_gc_superset_maximal_demo():
    check = parse_ground_text(
        """
        {b(1); b(2)}.
        ok2 :- #sum{ 1:b(1); 1:b(2) } >= 1.
        :- not ok2.
        :- a(1), not b(1).
        :- a(2), not b(2).
        better :- b(1), not a(1).
        better :- b(2), not a(2).
        :- not better.
        """
    )
    result = guess_check_solve(parse_ground_text(GUESS), check)
    assert result == [frozenset({"a(1)", "a(2)"})]


def test_gc_always_unsat_check_accepts_all():
    result = guess_check_solve(parse_ground_text(GUESS), parse_ground_text(":- ."))
    assert len(result) == 3


def test_gc_engine_matches_oracle(rng):
    from groundasp.aspif import NormalBody, Output, Rule
    from groundasp.program import GroundProgram

    for _ in range(60):
        gn = rng.randint(1, 4)
        gsyms = [f"g{i}" for i in range(1, gn + 1)]
        statements = []
        for _ in range(rng.randint(1, 6)):
            kind = rng.random()
            if kind < 0.2:
                head, choice = (), False
            elif kind < 0.5:
                head, choice = (rng.randint(1, gn),), False
            else:
                k = rng.randint(1, min(2, gn))
                head, choice = tuple(rng.sample(range(1, gn + 1), k)), True
            k = rng.randint(0, min(2, gn))
            atoms = rng.sample(range(1, gn + 1), k)
            statements.append(
                Rule(choice, head,
                     NormalBody(tuple(a if rng.random() < 0.6 else -a
                                      for a in atoms)))
            )
        for i, s in enumerate(gsyms, start=1):
            statements.append(Output(s, (i,)))
        guess = GroundProgram(statements)

        cn = rng.randint(1, 3)
        csyms = gsyms + [f"c{i}" for i in range(1, cn + 1)]
        statements = []
        n = len(csyms)
        for _ in range(rng.randint(1, 6)):
            kind = rng.random()
            if kind < 0.35:
                head, choice = (), False
            else:
                a = rng.randint(gn + 1, n)
                head, choice = (a,), rng.random() < 0.4
            k = rng.randint(0, min(3, n))
            atoms = rng.sample(range(1, n + 1), k)
            statements.append(
                Rule(choice, head,
                     NormalBody(tuple(a if rng.random() < 0.6 else -a
                                      for a in atoms)))
            )
        for i, s in enumerate(csyms, start=1):
            statements.append(Output(s, (i,)))
        check = GroundProgram(statements)

        want = oracle.gc_solutions(guess, check, guessed=set(gsyms))
        got = guess_check_solve(guess, check, guessed=set(gsyms))
        assert want == got
