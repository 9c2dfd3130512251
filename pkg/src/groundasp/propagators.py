"""Theory propagator contract.

A propagator implements up to four entry points, each with an empty
default: `init` runs once per solve call before search, `propagate` is
invoked with batches of watched literals assigned since its last call,
`undo` mirrors `propagate` on backjumps (one call per retracted decision
level, in chronological order), and `check` runs on total assignments.

Per thread, `init` happens before any other call and calls never
overlap, so propagators keeping one state object per thread id need no
locking.
"""

__all__ = ["Propagator", "PropagateInit", "PropagateControl", "AssignmentView"]


class Propagator:
    """Base class for theory propagators; override what you need."""

    def init(self, init):
        pass

    def propagate(self, control, changes):
        pass

    def undo(self, thread_id, assignment, changes):
        pass

    def check(self, control):
        pass


class AssignmentView:
    """Read-only view of the solver assignment."""

    def __init__(self, engine, decision_level=None):
        self._engine = engine
        self._level = decision_level

    def value(self, lit):
        v = self._engine._value(lit)
        return v

    def level(self, lit):
        return self._engine._level_of_lit(lit)

    @property
    def decision_level(self):
        if self._level is not None:
            return self._level
        return self._engine._decision_level()

    @property
    def is_total(self):
        return self._engine._is_total()

    @property
    def decisions(self):
        return self._engine._decision_literals()


class PropagateInit:
    """Initialization view handed to `Propagator.init`.

    Exposes the symbolic and theory atoms of the current program, the
    program-to-solver literal mapping, watch registration, and the
    configured thread count.  The `assignment` property reflects the
    top-level simplifications established before search.
    """

    def __init__(self, engine):
        self._engine = engine
        self.assignment = AssignmentView(engine)

    @property
    def symbolic_atoms(self):
        return [
            (symbol, atom)
            for atom, symbol in sorted(self._engine.program.symbols.items())
        ]

    @property
    def theory_atoms(self):
        return self._engine.program.theory_atoms()

    def solver_literal(self, program_literal):
        return self._engine._solver_literal(program_literal)

    def add_watch(self, solver_literal):
        self._engine._add_theory_watch(solver_literal, self._engine._init_target)

    @property
    def number_of_threads(self):
        return self._engine.threads


class PropagateControl:
    """Search-time view handed to `propagate` and `check`."""

    def __init__(self, engine, thread_id=0):
        self._engine = engine
        self.thread_id = thread_id
        self.assignment = AssignmentView(engine)

    def add_nogood(self, nogood, lock=False, tag=False):
        """Record a nogood (a set of literals that must not hold jointly).

        Returns False when the nogood is conflicting under the current
        assignment, in which case propagation must be given back to the
        solver.  `lock` keeps the constraint forever; `tag` scopes it to
        the current solve call.
        """
        return self._engine._add_nogood(nogood, lock=lock, tag=tag)

    def propagate(self):
        """Trigger unit propagation; returns False on conflict."""
        return self._engine._control_propagate()
