"""Reasoning loops on top of the solver.

Branch-and-bound minimization solves for one model, forbids its cost
with a weight-body integrity constraint in a fresh segment and repeats
until unsatisfiable; the last model is optimal.  Incremental solving
feeds step segments with `query(t)` externals to the solver, flipping
the previous query off permanently each round.  The hybrid variant
minimizes an integer variable of the difference-logic theory.  The
two-solver guess-and-check engine runs a second solver as a propagator
inside the first.

Built-in generators produce ground Towers of Hanoi and flow shop
instances so the reasoning loops can be driven without any grounder.
"""

from dataclasses import dataclass, field
from itertools import permutations

from .aspif import (
    External,
    Minimize,
    NormalBody,
    Output,
    Rule,
    TheoryAtomGuarded,
    TheoryCompound,
    TheoryElement,
    TheoryNumber,
    TheorySymbol,
    WeightBody,
)
from .gtext import parse_ground_text
from .oracle import GuessAtomDefinedInCheck, ModelSet
from .program import GroundProgram
from .propagators import Propagator
from .solver import Solver

__all__ = [
    "BnbResult",
    "IncConfig",
    "branch_and_bound",
    "incremental_solve",
    "dl_branch_and_bound",
    "BoundVarAbsent",
    "guess_check_solve",
    "CheckerPropagator",
    "gen_hanoi",
    "gen_flowshop",
    "HanoiIncremental",
    "flowshop_makespans",
    "DEFAULT_FLOWSHOP",
]


class BoundVarAbsent(Exception):
    pass


@dataclass
class BnbResult:
    optimum: object  # captured model dict or None
    bounds: list
    solve_calls: int
    models: int


def _normalized_bound_constraint(minimize_lits, cost):
    """Integrity constraint forbidding total cost >= `cost`."""
    items = []
    bound = cost
    for lit, weight in minimize_lits:
        if weight < 0:
            items.append((-lit, -weight))
            bound += -weight
        elif weight > 0:
            items.append((lit, weight))
    if bound <= 0:
        # every assignment reaches the bound: plain contradiction
        return Rule(choice=False, head=(), body=NormalBody(()))
    return Rule(choice=False, head=(), body=WeightBody(bound, tuple(items)))


def branch_and_bound(solver, quiet=False, log=print):
    """Minimize the program's objective by iterated strengthening.

    Returns a `BnbResult` with the captured optimal model (shown symbols
    and cost), the strictly decreasing bound history, and the number of
    solve calls used.
    """
    stmts = solver.program.minimize_statements()
    priorities = {st.priority for st in stmts}
    if len(priorities) > 1:
        raise ValueError(
            "branch and bound handles a single priority level; found "
            f"priorities {sorted(priorities)}"
        )
    minimize_lits = [pair for st in stmts for pair in st.lits]

    bounds = []
    calls = 0
    models = 0
    best = None
    while True:
        captured = {}

        def on_model(model, captured=captured):
            captured["shown"] = model.shown
            captured["cost"] = sum(
                weight
                for lit, weight in minimize_lits
                if model.value(lit) is True
            )
            return False

        result = solver.solve(on_model=on_model, max_models=1)
        calls += 1
        if not result.satisfiable:
            break
        models += 1
        best = dict(captured)
        bounds.append(captured["cost"])
        if not quiet:
            log(f"Found new bound: {captured['cost']}")
        solver.add_segment(
            GroundProgram(
                [_normalized_bound_constraint(minimize_lits, captured["cost"])]
            )
        )
    if best is not None and not quiet:
        log("Optimum found")
    return BnbResult(best, bounds, calls, models)


@dataclass
class IncConfig:
    imin: int = 0
    imax: int = None
    istop: str = "SAT"

    def __post_init__(self):
        if self.imin < 0:
            raise ValueError("imin must be non-negative")
        if self.imax is not None and self.imax < self.imin:
            raise ValueError("imax must be at least imin")
        if self.istop not in ("SAT", "UNSAT"):
            raise ValueError("istop must be SAT or UNSAT")


def incremental_solve(generator, config=None, solver=None, quiet=False, log=print,
                      on_model=None):
    """Run the incremental loop over a segment generator.

    Per step the generator's segment is added, the current `query`
    external is set true and the previous one released; iteration stops
    once the step count reaches `imin` and the last result matches
    `istop`, or `imax` is exceeded.  Returns (status, step, solve calls).
    """
    config = config or IncConfig()
    solver = solver or Solver()
    step = 0
    calls = 0
    result = None
    previous_query = None
    while True:
        segment, query = generator.segment(step)
        solver.add_segment(segment)
        if previous_query is not None:
            solver.release_external(previous_query)
        solver.assign_external(query, True)
        solver.cleanup()
        if not quiet:
            log(f"Step: {step}")
        result = solver.solve(max_models=1, on_model=on_model)
        calls += 1
        met = (
            result.satisfiable
            if config.istop == "SAT"
            else not result.satisfiable
        )
        if step >= config.imin and met:
            break
        if config.imax is not None and step >= config.imax:
            break
        previous_query = query
        step += 1
    return result.status, step, calls


# -- difference-logic optimization -------------------------------------------


def _diff_fact_segment(u, v, bound, program):
    """A fresh segment holding the head fact `&diff { u - v } <= bound`."""
    next_term = 0
    next_element = 0
    next_atom = program.atom_count
    for st in program.statements:
        if isinstance(st, (TheoryNumber, TheorySymbol, TheoryCompound)):
            next_term = max(next_term, st.index + 1)
        elif isinstance(st, TheoryElement):
            next_element = max(next_element, st.index + 1)

    statements = []

    def term(value):
        nonlocal next_term
        if isinstance(value, int):
            statements.append(TheoryNumber(next_term, value))
        elif isinstance(value, str):
            statements.append(TheorySymbol(next_term, value))
        else:
            kind = value[0]
            if kind == "fn":
                name = term(value[1])
                args = tuple(term(a) for a in value[2])
                statements.append(TheoryCompound(next_term, name, args))
            else:
                args = tuple(term(a) for a in value[1])
                statements.append(TheoryCompound(next_term, -1, args))
        next_term += 1
        return next_term - 1

    atom = next_atom + 1
    name = term(("fn", "diff", ("head",)))
    elem_term = term(("fn", "-", (u, v)))
    element = TheoryElement(next_element, (elem_term,), ())
    statements.append(element)
    op = term("<=")
    guard = term(bound)
    statements.append(TheoryAtomGuarded(atom, name, (element.index,), op, guard))
    statements.append(Rule(choice=False, head=(atom,), body=NormalBody(())))
    return GroundProgram(statements)


def dl_branch_and_bound(solver, propagator, bound_var="bound", quiet=False,
                        log=print):
    """Minimize an integer variable of the difference-logic theory.

    After each model the witness value b of `bound_var` is read and a
    constraint capping the variable at b - 1 is added in a fresh
    segment; the loop ends at unsatisfiability with the last bound as
    the optimum.  Returns a `BnbResult` whose bounds are witness values.
    """
    bounds = []
    calls = 0
    models = 0
    best = None
    while True:
        captured = {}

        def on_model(model, captured=captured):
            pairs = propagator.on_model(model)
            captured["shown"] = model.shown
            captured["witness"] = dict(pairs)
            return False

        result = solver.solve(on_model=on_model, max_models=1)
        calls += 1
        if not result.satisfiable:
            break
        models += 1
        witness = captured["witness"]
        if bound_var not in witness:
            raise BoundVarAbsent(
                f"variable {bound_var!r} does not occur in the theory witness"
            )
        value = witness[bound_var]
        bounds.append(value)
        best = dict(captured)
        if not quiet:
            log(f"Found new bound: {value}")
        solver.add_segment(
            _diff_fact_segment(bound_var, 0, value - 1, solver.program)
        )
    if best is not None and not quiet:
        log("Optimum found")
    return BnbResult(best, bounds, calls, models)


# -- two-solver guess and check ------------------------------------------------


class CheckerPropagator(Propagator):
    """Runs a second solver over the check program on total guesses.

    Implements only `init` and `check`: at initialization one checker is
    built per thread by importing the guess atoms (facts for top-level
    true ones, choices for unknown ones, dropping false ones) and adding
    the check program; on each total assignment the checker solves under
    assumptions mirroring the guessed values.  A satisfiable check means
    the candidate has a counterexample, so the guesser's decision
    literals are excluded permanently.
    """

    def __init__(self, check_program, guessed_symbols):
        self.check_program = check_program
        self.guessed = guessed_symbols
        self.checkers = {}
        self.rejected = 0

    def init(self, init):
        if self.checkers:
            return
        check = self.check_program
        check_atom = {sym: atom for atom, sym in check.symbols.items()}
        for thread in range(init.number_of_threads):
            checker = Solver()
            import_statements = []
            mapping = []
            for symbol, atom in init.symbolic_atoms:
                if symbol not in self.guessed:
                    continue
                catom = check_atom.get(symbol)
                if catom is None:
                    continue
                lit = init.solver_literal(atom)
                value = init.assignment.value(lit)
                if value is False:
                    continue
                if value is True:
                    import_statements.append(
                        Rule(choice=False, head=(catom,), body=NormalBody(()))
                    )
                else:
                    import_statements.append(
                        Rule(choice=True, head=(catom,), body=NormalBody(()))
                    )
                    mapping.append((lit, catom))
            checker.add_segment(GroundProgram(import_statements))
            checker.add_segment(check)
            self.checkers[thread] = (checker, mapping)

    def check(self, control):
        checker, mapping = self.checkers[control.thread_id]
        assumptions = [
            catom if control.assignment.value(lit) is True else -catom
            for lit, catom in mapping
        ]
        result = checker.solve(assumptions=assumptions, max_models=1)
        if result.satisfiable:
            self.rejected += 1
            control.add_nogood(list(control.assignment.decisions), lock=True)


def guess_check_solve(guess, check, guessed=None, max_models=0, threads=1,
                      on_model=None):
    """Two-solver guess-and-check: stable models of the guess program
    whose guessed atoms make the check program unsatisfiable.

    Accepted models are blocked by their guessed-atom projection, so
    each projection is reported once.  Returns a ModelSet of projections
    (sets of guessed symbols).
    """
    if not isinstance(guess, GroundProgram):
        guess = parse_ground_text(guess)
    if not isinstance(check, GroundProgram):
        check = parse_ground_text(check)
    if guessed is None:
        guessed = set(guess.symbols.values())
    guessed = set(guessed)

    clash = guessed & {
        check.symbol(a) for a in check.defined_atoms if check.symbol(a)
    }
    if clash:
        raise GuessAtomDefinedInCheck(
            f"guess atoms defined in check program: {sorted(clash)}"
        )

    solver = Solver(guess, threads=threads)
    solver.register_propagator(CheckerPropagator(check, guessed))
    guess_atoms = [
        (atom, sym) for atom, sym in sorted(guess.symbols.items()) if sym in guessed
    ]

    accepted = []
    while True:
        captured = {}

        def capture(model, captured=captured):
            captured["projection"] = frozenset(
                sym for atom, sym in guess_atoms if model.contains(atom)
            )
            captured["true"] = [atom for atom, _ in guess_atoms if model.contains(atom)]
            if on_model is not None:
                on_model(model)
            return False

        result = solver.solve(on_model=capture, max_models=1)
        if not result.satisfiable:
            break
        accepted.append(captured["projection"])
        if max_models and len(accepted) >= max_models:
            break
        true_atoms = set(captured["true"])
        blocking = tuple(
            atom if atom in true_atoms else -atom for atom, _ in guess_atoms
        )
        solver.add_segment(
            GroundProgram(
                [Rule(choice=False, head=(), body=NormalBody(blocking))]
            )
        )
    return ModelSet(accepted)


# -- instance generators --------------------------------------------------------


DEFAULT_FLOWSHOP = (("a", (3, 4)), ("b", (1, 6)), ("c", (5, 5)))

_PEG_NAMES = ("a", "b", "c", "d", "e", "f")


def _hanoi_lines(horizon, pegs, disks):
    """Ground rule text for the bounded Towers of Hanoi encoding.

    All disks start on the first peg and must reach the last one; disk
    numbers grow with size, one move per step while the goal is unmet,
    and moves onto smaller disks or of covered disks are forbidden.
    The objective counts the states in which the goal is not yet
    reached, so its optimum is the shortest plan length.
    """
    peg = _PEG_NAMES[:pegs]
    goal_peg = peg[-1]
    lines = []
    # the minimize statement comes first so objective atoms get the
    # lowest indices, which makes the search explore lazy plans first
    items = "; ".join(f"1@0:ngoal({t})" for t in range(horizon + 1))
    lines.append(f"#minimize{{ {items} }}.")
    for t in range(horizon + 1):
        for d in range(1, disks + 1):
            for p in peg:
                if p != goal_peg:
                    lines.append(f"ngoal({t}) :- on({d},{p},{t}).")
    lines.append(f":- ngoal({horizon}).")
    for d in range(1, disks + 1):
        lines.append(f"on({d},{peg[0]},0).")
    for t in range(1, horizon + 1):
        moves = "; ".join(
            f"move({d},{p},{t})" for d in range(1, disks + 1) for p in peg
        )
        lines.append(f"{{{moves}}} :- ngoal({t - 1}).")
        counted = "; ".join(
            f"1:move({d},{p},{t})" for d in range(1, disks + 1) for p in peg
        )
        lines.append(f"twomoves({t}) :- #sum{{ {counted} }} >= 2.")
        lines.append(f":- ngoal({t - 1}), twomoves({t}).")
        lines.append(f"onemove({t}) :- #sum{{ {counted} }} >= 1.")
        lines.append(f":- ngoal({t - 1}), not onemove({t}).")
        for d in range(1, disks + 1):
            for p in peg:
                lines.append(f"moved({d},{t}) :- move({d},{p},{t}).")
                lines.append(f"on({d},{p},{t}) :- move({d},{p},{t}).")
                lines.append(
                    f"on({d},{p},{t}) :- on({d},{p},{t - 1}), not moved({d},{t})."
                )
                # target peg must not hold a smaller disk
                for e in range(1, d):
                    lines.append(
                        f":- move({d},{p},{t}), on({e},{p},{t - 1})."
                    )
            # covered disks stay put
            for q in peg:
                for e in range(1, d):
                    lines.append(
                        f":- moved({d},{t}), on({d},{q},{t - 1}), on({e},{q},{t - 1})."
                    )
    lines.append("#show.")
    for t in range(1, horizon + 1):
        for d in range(1, disks + 1):
            for p in peg:
                lines.append(f"#show move({d},{p},{t}) : move({d},{p},{t}).")
    return lines


def gen_hanoi(kind="bounded", horizon=17, pegs=3, disks=4):
    """Ground Towers of Hanoi instance.

    `bounded` returns a GroundProgram with a minimize objective over the
    plan length; `incremental` returns a segment generator with
    `query(t)` externals for use with `incremental_solve`.
    """
    if kind == "bounded":
        return parse_ground_text("\n".join(_hanoi_lines(horizon, pegs, disks)))
    if kind == "incremental":
        return HanoiIncremental(pegs, disks)
    raise ValueError(f"unknown hanoi variant {kind!r}")


class HanoiIncremental:
    """Step segments for the incremental Towers of Hanoi encoding.

    Step 0 carries the initial configuration and the first goal check;
    step t adds the move frame for time t and a fresh `query(t)`
    external guarding the goal-at-t constraint.
    """

    def __init__(self, pegs=3, disks=4):
        self.pegs = _PEG_NAMES[:pegs]
        self.disks = range(1, disks + 1)
        self._atoms = {}
        self._statements_seen = 0

    def atom(self, name):
        atom = self._atoms.get(name)
        if atom is None:
            atom = len(self._atoms) + 1
            self._atoms[name] = atom
        return atom

    def _goal_check(self, t, statements):
        goal = self.pegs[-1]
        query = self.atom(f"query({t})")
        statements.append(External(query, 2))
        statements.append(Output(f"query({t})", (query,)))
        for d in self.disks:
            statements.append(
                Rule(
                    choice=False,
                    head=(),
                    body=NormalBody((query, -self.atom(f"on({d},{goal},{t})"))),
                )
            )
        return query

    def segment(self, t):
        statements = []
        atom = self.atom
        if t == 0:
            for d in self.disks:
                statements.append(
                    Rule(
                        choice=False,
                        head=(atom(f"on({d},{self.pegs[0]},0)"),),
                        body=NormalBody(()),
                    )
                )
        else:
            moves = tuple(
                atom(f"move({d},{p},{t})") for d in self.disks for p in self.pegs
            )
            statements.append(
                Rule(choice=True, head=moves, body=NormalBody(()))
            )
            counted = tuple((m, 1) for m in moves)
            two = atom(f"twomoves({t})")
            statements.append(
                Rule(choice=False, head=(two,), body=WeightBody(2, counted))
            )
            statements.append(
                Rule(choice=False, head=(), body=NormalBody((two,)))
            )
            one = atom(f"onemove({t})")
            statements.append(
                Rule(choice=False, head=(one,), body=WeightBody(1, counted))
            )
            statements.append(
                Rule(choice=False, head=(), body=NormalBody((-one,)))
            )
            for d in self.disks:
                moved = atom(f"moved({d},{t})")
                for p in self.pegs:
                    move = atom(f"move({d},{p},{t})")
                    statements.append(
                        Output(f"move({d},{p},{t})", (move,))
                    )
                    statements.append(
                        Rule(choice=False, head=(moved,), body=NormalBody((move,)))
                    )
                    statements.append(
                        Rule(
                            choice=False,
                            head=(atom(f"on({d},{p},{t})"),),
                            body=NormalBody((move,)),
                        )
                    )
                    statements.append(
                        Rule(
                            choice=False,
                            head=(atom(f"on({d},{p},{t})"),),
                            body=NormalBody(
                                (atom(f"on({d},{p},{t - 1})"), -moved)
                            ),
                        )
                    )
                    for e in range(1, d):
                        statements.append(
                            Rule(
                                choice=False,
                                head=(),
                                body=NormalBody(
                                    (move, atom(f"on({e},{p},{t - 1})"))
                                ),
                            )
                        )
                for q in self.pegs:
                    for e in range(1, d):
                        statements.append(
                            Rule(
                                choice=False,
                                head=(),
                                body=NormalBody(
                                    (
                                        moved,
                                        atom(f"on({d},{q},{t - 1})"),
                                        atom(f"on({e},{q},{t - 1})"),
                                    )
                                ),
                            )
                        )
        query = self._goal_check(t, statements)
        return GroundProgram(statements), query


def gen_flowshop(durations=DEFAULT_FLOWSHOP, bound_var="bound"):
    """Ground flow shop instance with difference constraints.

    Atoms `permutation(T,U)` guess a strict total execution order; the
    theory constrains task starts per machine and against `bound_var`
    so the witness value of that variable is the schedule's makespan.
    """
    durations = list(durations)
    tasks = [t for t, _ in durations]
    machines = range(1, len(durations[0][1]) + 1)
    dur = {
        (task, m): ds[m - 1] for task, ds in durations for m in machines
    }
    lines = []
    for i, t in enumerate(tasks):
        for u in tasks[i + 1 :]:
            lines.append(f"{{permutation({t},{u})}}.")
            lines.append(
                f"permutation({u},{t}) :- not permutation({t},{u})."
            )
    for t, u, v in permutations(tasks, 3):
        if t < u and t < v:  # one constraint per directed 3-cycle
            lines.append(
                f":- permutation({t},{u}), permutation({u},{v}), "
                f"permutation({v},{t})."
            )
    for t in tasks:
        for m in machines:
            lines.append(f"&diff {{ 0 - ({t},{m}) }} <= 0.")
            lines.append(
                f"&diff {{ ({t},{m}) - {bound_var} }} <= -{dur[t, m]}."
            )
            if m + 1 in machines:
                lines.append(
                    f"&diff {{ ({t},{m}) - ({t},{m + 1}) }} <= -{dur[t, m]}."
                )
    for t in tasks:
        for u in tasks:
            if t == u:
                continue
            for m in machines:
                lines.append(
                    f"&diff {{ ({t},{m}) - ({u},{m}) }} <= -{dur[t, m]} "
                    f":- permutation({t},{u})."
                )
    return parse_ground_text("\n".join(lines))


def flowshop_makespans(durations=DEFAULT_FLOWSHOP):
    """Brute-force makespan per task permutation (the schedule oracle)."""
    durations = list(durations)
    tasks = [t for t, _ in durations]
    dur = {t: ds for t, ds in durations}
    machines = len(durations[0][1])
    out = {}
    for order in permutations(tasks):
        machine_free = [0] * machines
        for task in order:
            done_previous = 0
            for m in range(machines):
                start = max(machine_free[m], done_previous)
                done_previous = start + dur[task][m]
                machine_free[m] = done_previous
        out[order] = machine_free[-1]
    return out
