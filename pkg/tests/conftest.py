"""Shared generators for randomized cross-checks."""

import random

import pytest

from groundasp.aspif import (
    Assumption,
    Comment,
    Edge,
    External,
    Heuristic,
    Minimize,
    NormalBody,
    Output,
    Project,
    Rule,
    WeightBody,
)
from groundasp.program import GroundProgram


def random_rule(rng, n):
    kind = rng.random()
    if kind < 0.25:
        head, choice = (), False
    elif kind < 0.55:
        head, choice = (rng.randint(1, n),), False
    else:
        k = rng.randint(1, min(3, n))
        head, choice = tuple(rng.sample(range(1, n + 1), k)), True
    if rng.random() < 0.25:
        k = rng.randint(1, min(3, n))
        atoms = rng.sample(range(1, n + 1), k)
        items = tuple(
            (a if rng.random() < 0.7 else -a, rng.randint(1, 3)) for a in atoms
        )
        bound = rng.randint(1, max(1, sum(w for _, w in items)))
        body = WeightBody(bound, items)
    else:
        k = rng.randint(0, min(3, n))
        atoms = rng.sample(range(1, n + 1), k)
        body = NormalBody(tuple(a if rng.random() < 0.6 else -a for a in atoms))
    return Rule(choice=choice, head=head, body=body)


def random_program(rng, max_atoms=8, max_rules=14, named=True):
    """Random ground normal/choice/weight program with default outputs."""
    n = rng.randint(1, max_atoms)
    statements = [random_rule(rng, n) for _ in range(rng.randint(0, max_rules))]
    if named:
        for a in range(1, n + 1):
            statements.append(Output(f"x{a}", (a,)))
    return GroundProgram(statements)


def random_aspif_statements(rng, n_atoms=9):
    """Random statement list covering the full aspif statement space."""
    statements = []
    for _ in range(rng.randint(0, 14)):
        pick = rng.random()
        if pick < 0.45:
            statements.append(random_rule(rng, n_atoms))
        elif pick < 0.55:
            k = rng.randint(0, 3)
            statements.append(
                Minimize(
                    rng.randint(-2, 2),
                    tuple(
                        (
                            rng.choice([-1, 1]) * rng.randint(1, n_atoms),
                            rng.randint(-3, 3),
                        )
                        for _ in range(k)
                    ),
                )
            )
        elif pick < 0.62:
            statements.append(
                Project(tuple(rng.sample(range(1, n_atoms + 1), rng.randint(0, 2))))
            )
        elif pick < 0.72:
            text = rng.choice(["a", "p(1,2)", "has space", "x"])
            k = rng.randint(0, 2)
            statements.append(
                Output(
                    text,
                    tuple(
                        rng.choice([-1, 1]) * rng.randint(1, n_atoms)
                        for _ in range(k)
                    ),
                )
            )
        elif pick < 0.80:
            statements.append(
                External(rng.randint(1, n_atoms), rng.randint(0, 3))
            )
        elif pick < 0.86:
            statements.append(
                Assumption(
                    tuple(
                        rng.choice([-1, 1]) * rng.randint(1, n_atoms)
                        for _ in range(rng.randint(0, 3))
                    )
                )
            )
        elif pick < 0.92:
            statements.append(
                Heuristic(
                    rng.randint(0, 5),
                    rng.randint(1, n_atoms),
                    rng.randint(-4, 4),
                    rng.randint(0, 3),
                    tuple(
                        rng.choice([-1, 1]) * rng.randint(1, n_atoms)
                        for _ in range(rng.randint(0, 2))
                    ),
                )
            )
        elif pick < 0.97:
            statements.append(
                Edge(
                    rng.randint(0, 3),
                    rng.randint(0, 3),
                    tuple(
                        rng.choice([-1, 1]) * rng.randint(1, n_atoms)
                        for _ in range(rng.randint(0, 2))
                    ),
                )
            )
        else:
            statements.append(Comment(rng.choice(["note", "a b c", ""])))
    return statements


@pytest.fixture
def rng():
    return random.Random(0xA5F)
