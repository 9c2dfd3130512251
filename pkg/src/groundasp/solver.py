"""Conflict-driven solver for ground normal/choice/weight programs.

The engine compiles a program into completion constraints (body
equivalences, head implications and support clauses), runs CDCL search
with first-UIP learning, activity-based decisions with phase saving and
geometric restarts, and enforces foundedness by an unfounded-set check
on total assignments that records the violated loop constraint and
continues.  Weight bodies are handled by a counting propagator with
eager reason extraction instead of clause expansion.

Models are enumerated by blocking the complement of each model's
decision literals; enumeration-scoped constraints are dropped when the
solve call returns.  Assumptions and external atoms are established as
pseudo-decision levels below the search, so assumptions hold in every
reported model of the call while external assignments persist across
calls until released or defined.

Program atoms are mapped to solver variables through an explicit table
(`solver_literal`), body variables live in the same space, and theory
propagators observe solver literals only.
"""

import heapq
from dataclasses import dataclass

from . import aspif
from .aspif import External, NormalBody, Rule
from .program import (
    GroundProgram,
    Redefinition,
    compose,
    sccs,
)
from .propagators import AssignmentView, PropagateControl, PropagateInit

__all__ = [
    "Solver",
    "SolveResult",
    "Model",
    "Statistics",
    "SolverError",
    "DisjunctiveUnsupported",
    "NotExternal",
    "AlreadyReleased",
    "SolveInProgress",
    "PropagatorFailure",
]

_VAR_DECAY = 0.95
_RESTART_FIRST = 100
_RESTART_FACTOR = 1.5


class SolverError(Exception):
    pass


class DisjunctiveUnsupported(SolverError):
    pass


class NotExternal(SolverError):
    pass


class AlreadyReleased(SolverError):
    pass


class SolveInProgress(SolverError):
    pass


class PropagatorFailure(SolverError):
    pass


@dataclass
class Statistics:
    choices: int = 0
    conflicts: int = 0
    models: int = 0
    solve_calls: int = 0


class SolveResult:
    def __init__(self, status, models):
        self.status = status  # "SAT" or "UNSAT"
        self.models = models

    @property
    def satisfiable(self):
        return self.status == "SAT"

    def __repr__(self):
        return f"SolveResult({self.status}, models={self.models})"


class Model:
    """One stable model as reported to solve callbacks."""

    def __init__(self, engine, number):
        self._engine = engine
        self.number = number
        self.thread_id = 0
        self._extra = []

    @property
    def shown(self):
        engine = self._engine
        program = engine.program
        out = []
        for atom, symbol in program.symbols.items():
            if engine.value_of(atom) is True:
                out.append(symbol)
        for st in program.conditional_outputs:
            if all(engine.value_of(l) is True for l in st.condition):
                out.append(st.text)
        out.extend(self._extra)
        return sorted(out)

    def extend(self, symbols):
        self._extra.extend(symbols)

    def contains(self, atom):
        return self._engine.value_of(atom) is True

    def value(self, lit):
        return self._engine.value_of(lit)

    @property
    def decisions(self):
        return self._engine._decision_literals()

    @property
    def cost(self):
        return self._engine.current_cost()

    @property
    def true_atoms(self):
        engine = self._engine
        return frozenset(
            a
            for a in range(1, engine.program.atom_count + 1)
            if engine.value_of(a) is True
        )


class _Clause:
    __slots__ = ("lits", "tagged", "deleted")

    def __init__(self, lits, tagged=False):
        self.lits = lits
        self.tagged = tagged
        self.deleted = False


class _WeightConstraint:
    """beta <-> (sum of weights over true literals >= bound)."""

    __slots__ = ("beta", "bound", "items")

    def __init__(self, beta, bound, items):
        self.beta = beta
        self.bound = bound
        self.items = items


class Solver:
    def __init__(self, program=None, threads=1):
        self.threads = threads
        self.stats = Statistics()
        self.program = GroundProgram()
        self.segments = []

        self._nvars = 0
        self._values = [0]
        self._levels = [0]
        self._reasons = [None]
        self._phase = [1]
        self._activity = [0.0]
        self._var_inc = 1.0
        self._heap = []
        self._trail = []
        self._trail_lim = []
        self._qhead = 0
        self._watches = [[], []]
        self._wc_of_var = [[]]
        self._clauses = []
        self._conflicting = False
        self._true_lit = None
        self._sentinel = None
        self._units = []

        self._avar = [0]  # atom id -> solver var
        self._body_cache = {}
        self._support = {}
        self._exempt = set()
        self._no_support_fixed = set()
        self._externals = {}
        self._released = set()
        self._gap_false = set()
        self._pending_assumptions = []

        self._propagators = []
        self._theory_watches = {}
        self._pending_changes = []
        self._delivered = []
        self._init_target = None
        self._pending_conflict = None
        self._in_solve = False
        self._call_tagged = False

        self._scc_defs = None

        if program is not None:
            self.add_segment(program)

    # -- literal plumbing ---------------------------------------------------

    def _new_var(self):
        self._nvars += 1
        self._values.append(0)
        self._levels.append(0)
        self._reasons.append(None)
        self._phase.append(1)
        self._activity.append(0.0)
        self._watches.append([])
        self._watches.append([])
        self._wc_of_var.append([])
        heapq.heappush(self._heap, (0.0, self._nvars))
        return self._nvars

    def _ensure_true_lit(self):
        if self._true_lit is None:
            self._true_lit = self._new_var()
            self._add_clause([self._true_lit])
        return self._true_lit

    def _plit(self, lit):
        var = self._avar[abs(lit)]
        return var if lit > 0 else -var

    def _solver_literal(self, program_literal):
        return self._plit(program_literal)

    def value_of(self, program_lit):
        """Truth value of a program literal under the current assignment."""
        return self._value(self._plit(program_lit))

    @staticmethod
    def _widx(lit):
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _value(self, lit):
        v = self._values[abs(lit)]
        if v == 0:
            return None
        return (v > 0) == (lit > 0)

    def _level_of_lit(self, lit):
        return self._levels[abs(lit)]

    def _decision_level(self):
        return len(self._trail_lim)

    def _is_total(self):
        return len(self._trail) == self._nvars

    def _decision_literals(self):
        return tuple(self._trail[i] for i in self._trail_lim)

    # -- program installation -----------------------------------------------

    def add_segment(self, segment):
        """Add a ground program segment; module composition rules apply."""
        if self._in_solve:
            raise SolveInProgress("cannot add segments during a solve call")
        if not isinstance(segment, GroundProgram):
            segment = GroundProgram(segment)
        merged = compose(self.segments + [segment])
        for atom in segment.defined_atoms:
            if atom in self._no_support_fixed:
                raise Redefinition(
                    f"atom {atom} was simplified to false in an earlier segment; "
                    "declare it #external to define it later"
                )
        self.segments.append(segment)
        self.program = merged
        self._install(segment)

    def _install(self, segment):
        program = self.program
        while len(self._avar) <= program.atom_count:
            self._avar.append(self._new_var())

        for ta in segment.theory_atoms():
            if (
                ta.lit
                and ta.location == "body"
                and ta.lit not in program.defined_atoms
            ):
                self._exempt.add(ta.lit)

        for st in segment.statements:
            if isinstance(st, External):
                atom = st.atom
                if st.value == aspif.EXTERNAL_RELEASE:
                    self._do_release(atom)
                elif atom not in self._released and atom not in program.defined_atoms:
                    self._externals[atom] = {
                        aspif.EXTERNAL_FREE: None,
                        aspif.EXTERNAL_TRUE: True,
                        aspif.EXTERNAL_FALSE: False,
                    }[st.value]
                    self._exempt.add(atom)
            elif isinstance(st, aspif.Assumption):
                self._pending_assumptions.extend(st.lits)

        new_rules = []
        for st in segment.statements:
            if not isinstance(st, Rule):
                continue
            if not st.choice and len(st.head) > 1:
                raise DisjunctiveUnsupported(
                    "disjunctive heads with more than one atom are only "
                    "supported by the oracle"
                )
            beta = self._body_literal(st.body)
            new_rules.append((st, beta))
            if st.choice:
                pass
            elif st.head:
                self._add_clause([-beta, self._plit(st.head[0])])
            else:
                self._add_clause([-beta])

        # atoms defined by this segment leave the external input set
        for atom in segment.defined_atoms:
            if atom in self._externals:
                del self._externals[atom]
                self._exempt.discard(atom)

        for st, beta in new_rules:
            for atom in st.head:
                self._support.setdefault(atom, []).append(beta)

        referenced = program.referenced_atoms
        for atom in range(1, program.atom_count + 1):
            if atom in self._exempt or atom in self._no_support_fixed:
                continue
            if atom in program.defined_atoms:
                self._gap_false.discard(atom)
                if atom in segment.defined_atoms:
                    self._add_clause(
                        [-self._plit(atom)] + self._support.get(atom, [])
                    )
            elif atom in referenced:
                self._gap_false.discard(atom)
                if atom not in self._released:
                    self._no_support_fixed.add(atom)
                    self._add_clause([-self._plit(atom)])
            else:
                # numbered but never seen: an input defaulting to false
                # until some later segment mentions or defines it
                self._gap_false.add(atom)

        self._scc_defs = None  # recomputed lazily for the unfounded check
        if not self._conflicting and self._propagate() is not None:
            self._conflicting = True

    def _body_literal(self, body):
        """Solver literal equivalent to the body's truth."""
        if isinstance(body, NormalBody):
            lits = tuple(self._plit(l) for l in body.lits)
            if not lits:
                return self._ensure_true_lit()
            if len(lits) == 1:
                return lits[0]
            key = ("n", tuple(sorted(lits)))
            beta = self._body_cache.get(key)
            if beta is None:
                beta = self._new_var()
                self._body_cache[key] = beta
                for l in lits:
                    self._add_clause([-beta, l])
                self._add_clause([beta] + [-l for l in lits])
            return beta
        items = tuple((self._plit(l), w) for l, w in body.lits)
        bound = body.bound
        total = sum(w for _, w in items)
        if bound <= 0:
            return self._ensure_true_lit()
        if bound > total:
            return -self._ensure_true_lit()
        key = ("w", bound, tuple(sorted(items)))
        beta = self._body_cache.get(key)
        if beta is None:
            beta = self._new_var()
            self._body_cache[key] = beta
            cx = _WeightConstraint(beta, bound, items)
            self._wc_of_var[beta].append(cx)
            for l, _ in items:
                if cx not in self._wc_of_var[abs(l)]:
                    self._wc_of_var[abs(l)].append(cx)
        return beta

    # -- externals ------------------------------------------------------------

    def assign_external(self, atom, value):
        """Fix (or free) an external atom's value for subsequent solves."""
        if atom in self._released:
            raise AlreadyReleased(f"external atom {atom} was released")
        if atom not in self._externals:
            raise NotExternal(f"atom {atom} is not an external atom")
        if value == "free":
            value = None
        if value not in (True, False, None):
            raise ValueError("external value must be True, False or 'free'")
        self._externals[atom] = value

    def release_external(self, atom):
        if atom in self._released:
            raise AlreadyReleased(f"external atom {atom} was already released")
        if atom not in self._externals:
            raise NotExternal(f"atom {atom} is not an external atom")
        self._do_release(atom)

    def _do_release(self, atom):
        self._externals.pop(atom, None)
        self._released.add(atom)
        self._exempt.discard(atom)
        if atom < len(self._avar):
            self._add_clause([-self._plit(atom)])
            if self._propagate() is not None:
                self._conflicting = True

    def cleanup(self):
        """Freeze top-level values into the program view.

        Returns (true_atoms, false_atoms) for atoms whose truth value is
        ultimately determined, mirroring domain cleanup between solves.
        """
        true_atoms = set()
        false_atoms = set(self._released)
        for atom in range(1, self.program.atom_count + 1):
            var = self._avar[atom]
            if self._levels[var] == 0 and self._values[var] != 0:
                (true_atoms if self._values[var] > 0 else false_atoms).add(atom)
        return true_atoms, false_atoms

    # -- clause management ------------------------------------------------------

    def _add_clause(self, lits, tagged=False):
        """Add a clause over solver literals, simplifying against level 0."""
        if tagged:
            self._call_tagged = True
        out = []
        seen = set()
        for l in lits:
            if -l in seen:
                return None  # tautology
            if l in seen:
                continue
            v = self._value(l)
            if v is True and self._levels[abs(l)] == 0:
                return None
            if v is False and self._levels[abs(l)] == 0:
                continue
            seen.add(l)
            out.append(l)
        if not out:
            self._conflicting = True
            return None
        if len(out) == 1 and self._decision_level() == 0:
            if self._value(out[0]) is False:
                self._conflicting = True
            elif self._value(out[0]) is None:
                self._assign(out[0], None)
            return None
        # watches: non-false literals first, then by descending level
        out.sort(
            key=lambda l: (
                0 if self._value(l) is not False else 1,
                -self._levels[abs(l)],
            )
        )
        clause = _Clause(out, tagged)
        self._clauses.append(clause)
        self._watches[self._widx(out[0])].append(clause)
        if len(out) > 1:
            self._watches[self._widx(out[1])].append(clause)
        elif not tagged:
            # permanent unit learned above level 0: re-asserted per call
            self._units.append(clause)
        first = self._value(out[0])
        rest_false = len(out) == 1 or self._value(out[1]) is False
        if first is False:
            self._pending_conflict = clause
        elif first is None and rest_false:
            self._assign(out[0], clause)
        return clause

    # -- assignment -----------------------------------------------------------

    def _assign(self, lit, reason):
        var = abs(lit)
        self._values[var] = 1 if lit > 0 else -1
        self._levels[var] = self._decision_level()
        self._reasons[var] = reason
        self._trail.append(lit)

    def _unassign(self, var):
        self._phase[var] = self._values[var]
        self._values[var] = 0
        self._reasons[var] = None
        heapq.heappush(self._heap, (-self._activity[var], var))

    def _backjump(self, target):
        while self._decision_level() > target:
            level = self._decision_level()
            for pidx in range(len(self._propagators)):
                changes = self._delivered[pidx].pop(level, None)
                if changes:
                    view = AssignmentView(self, decision_level=level)
                    try:
                        self._propagators[pidx].undo(0, view, changes)
                    except Exception as err:  # noqa: BLE001
                        raise PropagatorFailure(str(err)) from err
            limit = self._trail_lim.pop()
            for lit in reversed(self._trail[limit:]):
                self._unassign(abs(lit))
            del self._trail[limit:]
        self._qhead = min(self._qhead, len(self._trail))

    # -- propagation ------------------------------------------------------------

    def _propagate(self):
        while True:
            conflict = self._pending_conflict
            if conflict is not None:
                self._pending_conflict = None
                return conflict
            if self._qhead >= len(self._trail):
                return None
            lit = self._trail[self._qhead]
            self._qhead += 1

            watchers = self._theory_watches.get(lit)
            if watchers:
                for pidx in watchers:
                    self._pending_changes[pidx].append(lit)

            for cx in self._wc_of_var[abs(lit)]:
                conflict = self._wc_propagate(cx)
                if conflict is not None:
                    return conflict

            ws = self._watches[self._widx(-lit)]
            i = 0
            j = 0
            n = len(ws)
            while i < n:
                clause = ws[i]
                i += 1
                if clause.deleted:
                    continue
                lits = clause.lits
                if len(lits) == 1:
                    ws[j] = clause
                    j += 1
                    if self._value(lits[0]) is False:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return clause
                    continue
                if lits[0] == -lit:
                    lits[0], lits[1] = lits[1], lits[0]
                first = lits[0]
                if self._value(first) is True:
                    ws[j] = clause
                    j += 1
                    continue
                for k in range(2, len(lits)):
                    if self._value(lits[k]) is not False:
                        lits[1], lits[k] = lits[k], lits[1]
                        self._watches[self._widx(lits[1])].append(clause)
                        break
                else:
                    ws[j] = clause
                    j += 1
                    if self._value(first) is False:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        return clause
                    self._assign(first, clause)
            del ws[j:]

    def _wc_propagate(self, cx):
        value = self._value
        sum_true = 0
        sum_poss = 0
        for l, w in cx.items:
            v = value(l)
            if v is True:
                sum_true += w
                sum_poss += w
            elif v is None:
                sum_poss += w
        beta_v = value(cx.beta)

        if sum_true >= cx.bound:
            if beta_v is not True:
                reason = [cx.beta]
                acc = 0
                for l, w in cx.items:
                    if value(l) is True:
                        reason.append(-l)
                        acc += w
                        if acc >= cx.bound:
                            break
                if beta_v is False:
                    return _Clause(reason)
                self._assign(cx.beta, _Clause(reason))
        elif sum_poss < cx.bound:
            if beta_v is not False:
                reason = [-cx.beta] + [
                    l for l, _ in cx.items if value(l) is False
                ]
                if beta_v is True:
                    return _Clause(reason)
                self._assign(-cx.beta, _Clause(reason))
        elif beta_v is True:
            false_items = None
            for l, w in cx.items:
                if value(l) is None and sum_poss - w < cx.bound:
                    if false_items is None:
                        false_items = [
                            f for f, _ in cx.items if value(f) is False
                        ]
                    self._assign(l, _Clause([l, -cx.beta] + false_items))
        elif beta_v is False:
            true_items = None
            for l, w in cx.items:
                if value(l) is None and sum_true + w >= cx.bound:
                    if true_items is None:
                        true_items = [
                            -t for t, _ in cx.items if value(t) is True
                        ]
                    self._assign(-l, _Clause([-l, cx.beta] + true_items))
        return None

    def _propagate_all(self):
        """Unit and theory propagation to mutual fixpoint."""
        while True:
            if self._conflicting:
                return _Clause([])
            conflict = self._propagate()
            if conflict is not None:
                return conflict
            if not self._dispatch_propagators():
                return None

    # -- conflict analysis -------------------------------------------------------

    def _bump(self, var):
        self._activity[var] += self._var_inc
        if self._activity[var] > 1e100:
            for v in range(1, self._nvars + 1):
                self._activity[v] *= 1e-100
            self._var_inc *= 1e-100
        heapq.heappush(self._heap, (-self._activity[var], var))

    def _analyze(self, conflict):
        """First-UIP resolution; returns (clause, backtrack level, tagged)."""
        level = self._decision_level()
        learnt = []
        seen = bytearray(self._nvars + 1)
        counter = 0
        tagged = False
        clause = conflict
        p = None
        index = len(self._trail)

        while True:
            tagged = tagged or clause.tagged
            for q in clause.lits:
                if p is not None and q == p:
                    continue
                var = abs(q)
                if seen[var] or self._levels[var] == 0:
                    continue
                seen[var] = 1
                self._bump(var)
                if self._levels[var] >= level:
                    counter += 1
                else:
                    learnt.append(q)
            while True:
                index -= 1
                p = self._trail[index]
                if seen[abs(p)]:
                    break
            counter -= 1
            seen[abs(p)] = 0
            if counter == 0:
                break
            clause = self._reasons[abs(p)]
        asserting = -p

        # simple clause minimization: drop literals whose reason is subsumed
        marked = {abs(l) for l in learnt}
        marked.add(abs(asserting))
        kept = []
        for q in learnt:
            reason = self._reasons[abs(q)]
            if reason is not None and all(
                abs(r) in marked or self._levels[abs(r)] == 0
                for r in reason.lits
                if r != -q
            ):
                tagged = tagged or reason.tagged
                continue
            kept.append(q)
        learnt = [asserting] + kept

        if len(learnt) == 1:
            bt_level = 0
        else:
            bt_level = max(self._levels[abs(l)] for l in learnt[1:])
        self._var_inc /= _VAR_DECAY
        return learnt, bt_level, tagged

    # -- decision heuristic ---------------------------------------------------

    def _decide(self):
        while self._heap:
            _, var = heapq.heappop(self._heap)
            if self._values[var] == 0:
                self.stats.choices += 1
                self._trail_lim.append(len(self._trail))
                self._assign(var if self._phase[var] >= 0 else -var, None)
                return True
        for var in range(1, self._nvars + 1):
            if self._values[var] == 0:
                self.stats.choices += 1
                self._trail_lim.append(len(self._trail))
                self._assign(var if self._phase[var] >= 0 else -var, None)
                return True
        return False

    # -- propagator plumbing ----------------------------------------------------

    def register_propagator(self, propagator):
        if self._in_solve:
            raise SolveInProgress("cannot register propagators during solving")
        self._propagators.append(propagator)
        self._pending_changes.append([])
        self._delivered.append({})

    def _add_theory_watch(self, lit, pidx):
        watchers = self._theory_watches.setdefault(lit, [])
        if pidx not in watchers:
            watchers.append(pidx)
            if self._value(lit) is True:
                self._pending_changes[pidx].append(lit)

    def _add_nogood(self, nogood, lock=False, tag=False):
        clause_lits = [-l for l in nogood]
        clause = self._add_clause(clause_lits, tagged=tag and not lock)
        if self._pending_conflict is not None or self._conflicting:
            return False
        if clause is not None and self._value(clause.lits[0]) is False:
            self._pending_conflict = clause
            return False
        return True

    def _control_propagate(self):
        conflict = self._propagate()
        if conflict is not None:
            self._pending_conflict = conflict
            return False
        return True

    def _dispatch_propagators(self):
        """Deliver freshly assigned watched literals, one batch per
        propagator in registration order.  Returns True when any
        propagator changed the solver state."""
        touched = False
        for pidx, propagator in enumerate(self._propagators):
            pending = self._pending_changes[pidx]
            if not pending:
                continue
            changes = []
            seen = set()
            for lit in pending:
                if lit in seen or self._value(lit) is not True:
                    continue
                seen.add(lit)
                changes.append(lit)
            self._pending_changes[pidx] = []
            if not changes:
                continue
            per_level = self._delivered[pidx]
            for lit in changes:
                per_level.setdefault(self._level_of_lit(lit), []).append(lit)
            trail_before = len(self._trail)
            control = PropagateControl(self)
            try:
                propagator.propagate(control, changes)
            except PropagatorFailure:
                raise
            except Exception as err:  # noqa: BLE001
                raise PropagatorFailure(str(err)) from err
            if (
                self._pending_conflict is not None
                or self._conflicting
                or len(self._trail) != trail_before
            ):
                touched = True
                break
        return touched

    def _run_checks(self):
        """Final theory checks on a total assignment; True when the
        assignment was refuted or extended."""
        for propagator in self._propagators:
            trail_before = len(self._trail)
            control = PropagateControl(self)
            try:
                propagator.check(control)
            except PropagatorFailure:
                raise
            except Exception as err:  # noqa: BLE001
                raise PropagatorFailure(str(err)) from err
            if (
                self._pending_conflict is not None
                or self._conflicting
                or len(self._trail) != trail_before
            ):
                return True
        return False

    def _init_propagators(self):
        init = PropagateInit(self)
        for pidx, propagator in enumerate(self._propagators):
            self._init_target = pidx
            try:
                propagator.init(init)
            except Exception as err:  # noqa: BLE001
                raise PropagatorFailure(str(err)) from err
        self._init_target = None

    # -- unfounded sets ---------------------------------------------------------

    def _scc_definitions(self):
        if self._scc_defs is not None:
            return self._scc_defs
        index = sccs(self.program)
        defs = []
        for cid, members in enumerate(index.members):
            if index.is_trivial(cid):
                continue
            member_set = set(members)
            by_atom = {}
            for st in self.program.rules():
                if not any(a in member_set for a in st.head):
                    continue
                beta = self._body_literal(st.body)
                for atom in st.head:
                    if atom in member_set:
                        by_atom.setdefault(atom, []).append((st, beta))
            defs.append((member_set, by_atom))
        self._scc_defs = defs
        return defs

    def _unfounded_check(self):
        """Record loop constraints for unfounded atoms of the current
        total assignment; True when any were added."""
        added = False
        for member_set, by_atom in self._scc_definitions():
            cand = {a for a in member_set if self.value_of(a) is True}
            if not cand:
                continue
            derived = set()
            changed = True
            while changed:
                changed = False
                for atom in cand - derived:
                    for st, beta in by_atom.get(atom, ()):
                        if self._value(beta) is not True:
                            continue
                        if self._rule_acyclic_support(st, cand, derived):
                            derived.add(atom)
                            changed = True
                            break
            unfounded = cand - derived
            if unfounded:
                self._add_loop_nogoods(unfounded, by_atom)
                added = True
        return added

    def _rule_acyclic_support(self, st, cand, derived):
        body = st.body
        if isinstance(body, NormalBody):
            return all(
                l < 0 or l not in cand or l in derived for l in body.lits
            )
        total = 0
        for l, w in body.lits:
            if l > 0 and l in cand and l not in derived:
                continue
            if self.value_of(l) is True:
                total += w
        return total >= body.bound

    def _add_loop_nogoods(self, unfounded, by_atom):
        """One permanent clause per unfounded atom: the atom implies some
        support avenue outside the set, all of which are false now."""
        tail = []
        seen = set()
        for atom in unfounded:
            for st, beta in by_atom.get(atom, ()):
                body = st.body
                if isinstance(body, NormalBody):
                    if any(l > 0 and l in unfounded for l in body.lits):
                        continue  # depends on the unfounded set itself
                    if beta not in seen:
                        seen.add(beta)
                        tail.append(beta)
                else:
                    outside = [
                        (l, w)
                        for l, w in body.lits
                        if not (l > 0 and l in unfounded)
                    ]
                    if sum(w for _, w in outside) < body.bound:
                        continue
                    if self._value(beta) is False:
                        if beta not in seen:
                            seen.add(beta)
                            tail.append(beta)
                    else:
                        for l, _ in outside:
                            sl = self._plit(l) if abs(l) < len(self._avar) else l
                            if self.value_of(l) is False and sl not in seen:
                                seen.add(sl)
                                tail.append(sl)
        for atom in unfounded:
            self._add_clause([-self._plit(atom)] + tail)

    # -- solving ------------------------------------------------------------------

    def solve(self, assumptions=(), on_model=None, max_models=0):
        """Enumerate stable models under the given assumptions.

        `assumptions` are program literals holding in every reported
        model of this call only.  `max_models` bounds the number of
        models (0 means all).  The callback receives a `Model`;
        returning False stops the enumeration early.
        """
        if self._in_solve:
            raise SolveInProgress("solver is already solving")
        self._in_solve = True
        self.stats.solve_calls += 1
        self._call_tagged = False
        models_found = 0
        try:
            self._init_propagators()
            if self._conflicting:
                return SolveResult("UNSAT", 0)

            for clause in self._units:
                if not clause.deleted and self._value(clause.lits[0]) is None:
                    self._assign(clause.lits[0], clause)
            if self._propagate_all() is not None:
                if not self._call_tagged:
                    self._conflicting = True
                return SolveResult("UNSAT", 0)

            # enumeration root: one level between the top level and the
            # assumptions, so call-scoped constraints never fix level 0
            if self._sentinel is None:
                self._sentinel = self._new_var()
            prefix_lits = [self._sentinel]
            prefix_lits += [
                -self._plit(atom) for atom in sorted(self._gap_false)
            ]
            prefix_lits += [
                self._plit(atom if value else -atom)
                for atom, value in sorted(self._externals.items())
                if value is not None
            ]
            prefix_lits += [self._plit(l) for l in self._pending_assumptions]
            self._pending_assumptions = []
            prefix_lits += [self._plit(l) for l in assumptions]

            for lit in prefix_lits:
                value = self._value(lit)
                if value is False:
                    return SolveResult("UNSAT", 0)
                if value is None:
                    self._trail_lim.append(len(self._trail))
                    self._assign(lit, None)
                    if self._propagate_all() is not None:
                        return SolveResult("UNSAT", 0)
            base_level = self._decision_level()

            restart_limit = _RESTART_FIRST
            conflicts_here = 0
            while True:
                conflict = self._propagate_all()
                if conflict is not None:
                    self.stats.conflicts += 1
                    conflicts_here += 1
                    conflict_level = max(
                        (self._levels[abs(l)] for l in conflict.lits), default=0
                    )
                    if conflict_level < self._decision_level():
                        self._backjump(conflict_level)
                    if self._decision_level() <= base_level:
                        if self._decision_level() == 0 and not self._call_tagged:
                            self._conflicting = True
                        return SolveResult(
                            "SAT" if models_found else "UNSAT", models_found
                        )
                    learnt, bt_level, tagged = self._analyze(conflict)
                    bt_level = max(bt_level, base_level)
                    self._backjump(bt_level)
                    self._add_clause(learnt, tagged=tagged)
                    if conflicts_here >= restart_limit:
                        conflicts_here = 0
                        restart_limit = int(restart_limit * _RESTART_FACTOR)
                        self._backjump(base_level)
                    continue

                if self._is_total():
                    if self._run_checks():
                        continue
                    if self._unfounded_check():
                        continue
                    models_found += 1
                    self.stats.models += 1
                    keep_going = True
                    if on_model is not None:
                        keep_going = on_model(Model(self, models_found)) is not False
                    decisions = [
                        self._trail[i] for i in self._trail_lim[base_level:]
                    ]
                    if (
                        not keep_going
                        or (max_models and models_found >= max_models)
                        or not decisions
                    ):
                        return SolveResult("SAT", models_found)
                    self._backjump(base_level)
                    self._add_clause([-d for d in decisions], tagged=True)
                    continue

                if not self._decide():
                    continue  # propagation finished the assignment
        finally:
            self._backjump(0)
            self._drop_tagged()
            self._in_solve = False

    def _drop_tagged(self):
        kept = []
        for clause in self._clauses:
            if clause.tagged:
                clause.deleted = True
            else:
                kept.append(clause)
        self._clauses = kept

    # -- model helpers --------------------------------------------------------

    def current_cost(self):
        """Cost per minimize priority under the current assignment."""
        by_priority = {}
        for st in self.program.minimize_statements():
            acc = by_priority.setdefault(st.priority, 0)
            for lit, weight in st.lits:
                if self.value_of(lit) is True:
                    acc += weight
            by_priority[st.priority] = acc
        return sorted(by_priority.items())
