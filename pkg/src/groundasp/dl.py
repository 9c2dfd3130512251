"""Difference-constraint theory propagation.

A difference constraint `u - v <= d` over integer variables maps to a
weighted edge (u, v, d); a constraint set is satisfiable iff the edge
graph has no negative cycle.  `DiffGraph` detects cycles incrementally
while maintaining a potential function as a feasibility certificate
(for every active edge, pot(u) + d - pot(v) >= 0), repairing potentials
on insertion Dijkstra-style over reduced costs.  Edges carry the
decision level of their insertion and are removed level by level in
chronological order on backtracking.

`DLPropagator` wires the graph into the solver: it watches the solver
literal of every `&diff` theory atom, and for body occurrences (strict
semantics) additionally watches the negated literal mapped to the
negated constraint (v, u, -d-1).  Negative cycles become nogoods over
the first true literal of each participating edge.  Witness values are
reported as the current potentials normalized so that the distinguished
origin variable `0` maps to 0.
"""

import heapq
from typing import NamedTuple

from .program import render_term
from .propagators import Propagator

__all__ = [
    "DiffEdge",
    "DiffGraph",
    "DLPropagator",
    "DLError",
    "MalformedDiffAtom",
    "NonChronological",
    "Infeasible",
    "bellman_ford",
    "ORIGIN",
]

ORIGIN = 0  # the term `0` is an ordinary variable fixed as reference point


class DLError(Exception):
    pass


class MalformedDiffAtom(DLError):
    pass


class NonChronological(DLError):
    pass


class Infeasible(DLError):
    pass


class DiffEdge(NamedTuple):
    u: object
    v: object
    d: int


class DiffGraph:
    """Backtrackable difference-constraint graph with potentials."""

    def __init__(self):
        self._pot = {}
        self._out = {}  # u -> list of [v, d, alive]
        self._trail = []  # (level, u, record, undo info)
        self._levels = []

    def vars(self):
        return set(self._pot)

    def potential(self, node):
        return self._pot.get(node, 0)

    def add_edge(self, edge, level):
        """Activate an edge at the given level.

        Returns None on success; on a negative cycle, returns the list
        of already-active edges forming the cycle together with the new
        edge (which is then not activated).
        """
        u, v, d = edge
        if self._levels and level < self._levels[-1]:
            raise NonChronological(
                f"edges at level {self._levels[-1]} still present"
            )
        pot = self._pot
        created = []
        for n in (u, v):
            if n not in pot and n not in created:
                created.append(n)
        pu = pot.setdefault(u, 0)
        pv = pot.setdefault(v, 0)
        pot_undo = ()
        slack = pu + d - pv
        if slack < 0:
            if u == v:
                for n in created:
                    del pot[n]
                return [DiffEdge(u, v, d)]
            cycle_or_pot = self._repair(u, v, slack)
            if isinstance(cycle_or_pot, list):
                for n in created:
                    del pot[n]
                return [DiffEdge(u, v, d)] + cycle_or_pot
            pot_undo = tuple((node, pot[node]) for node in cycle_or_pot)
            for node, value in cycle_or_pot.items():
                pot[node] = value
        record = [v, d, True]
        self._out.setdefault(u, []).append(record)
        self._trail.append((level, u, record, pot_undo, tuple(created)))
        if not self._levels or self._levels[-1] != level:
            self._levels.append(level)
        return None

    def _repair(self, u, v, slack):
        """Lower potentials so the new edge (u, v) gains nonnegative
        slack; reaching u with a negative offset exposes a cycle."""
        pot = self._pot
        gamma = {v: slack}
        pred = {}
        settled = {}
        heap = [(slack, _order_key(v), v)]
        while heap:
            g, _, x = heapq.heappop(heap)
            if x in settled or g > gamma.get(x, 0):
                continue
            if x == u:
                cycle = []
                node = u
                while node != v:
                    y, d, _ = pred[node]
                    cycle.append(DiffEdge(y, node, d))
                    node = y
                cycle.reverse()
                return cycle
            settled[x] = pot[x] + g
            base = settled[x]
            for record in self._out.get(x, ()):
                y, w, alive = record
                if not alive or y in settled:
                    continue
                candidate = base + w - pot.setdefault(y, 0)
                if candidate < gamma.get(y, 0):
                    gamma[y] = candidate
                    pred[y] = (x, w, record)
                    heapq.heappush(heap, (candidate, _order_key(y), y))
        return settled

    def backtrack(self, level):
        """Remove all edges added on `level` (the most recent one)."""
        if self._levels and level < self._levels[-1]:
            raise NonChronological(
                f"cannot backtrack level {level} while level "
                f"{self._levels[-1]} is present"
            )
        if not self._levels or self._levels[-1] != level:
            return
        self._levels.pop()
        while self._trail and self._trail[-1][0] == level:
            _, u, record, pot_undo, created = self._trail.pop()
            record[2] = False
            out = self._out[u]
            while out and not out[-1][2]:
                out.pop()
            for node, value in pot_undo:
                self._pot[node] = value
            for node in created:
                self._pot.pop(node, None)

    def check_certificate(self):
        """Assert the potential invariant over all active edges."""
        for u, records in self._out.items():
            for v, d, alive in records:
                if alive and self._pot[u] + d - self._pot[v] < 0:
                    raise AssertionError(
                        f"certificate violated on edge ({u},{v},{d})"
                    )

    def get_assignment(self):
        """Witness values for all variables, origin normalized to 0."""
        base = self._pot.get(ORIGIN, 0)
        out = []
        for node, p in self._pot.items():
            if node == ORIGIN:
                continue
            out.append((node, base - p))
        out.sort(key=lambda pair: render_term(pair[0]))
        return out

    def active_edges(self):
        edges = []
        for u, records in self._out.items():
            for v, d, alive in records:
                if alive:
                    edges.append(DiffEdge(u, v, d))
        return edges


def _order_key(node):
    return render_term(node)


def bellman_ford(edges, nodes=None):
    """Independent feasibility oracle for a difference-constraint set.

    Returns a satisfying assignment (dict, origin at 0 when present) or
    None when the constraints admit none.  Kept free of DiffGraph so the
    two routes stay independent.
    """
    nodes = set(nodes or ())
    for u, v, _ in edges:
        nodes.add(u)
        nodes.add(v)
    dist = {n: 0 for n in nodes}  # virtual source connected to all nodes
    for _ in range(len(nodes)):
        changed = False
        for u, v, d in edges:
            if dist[u] + d < dist[v]:
                dist[v] = dist[u] + d
                changed = True
        if not changed:
            break
    else:
        for u, v, d in edges:
            if dist[u] + d < dist[v]:
                return None
    base = dist.get(ORIGIN, 0)
    return {n: base - dist[n] for n in nodes}


def _parse_diff_atom(ta):
    if len(ta.elements) != 1:
        raise MalformedDiffAtom("diff atom must have exactly one element")
    terms, condition = ta.elements[0]
    if condition or len(terms) != 1:
        raise MalformedDiffAtom("diff element must be one unconditional term")
    term = terms[0]
    if not (isinstance(term, tuple) and term[0] == "fn" and term[1] == "-"
            and len(term[2]) == 2):
        raise MalformedDiffAtom("diff element must be a difference u - v")
    if ta.guard is None:
        raise MalformedDiffAtom("diff atom needs a guard")
    op, bound = ta.guard
    if op != "<=" or not isinstance(bound, int):
        raise MalformedDiffAtom(f"diff guard must be `<= integer`, got {op!r}")
    u, v = term[2]
    return DiffEdge(u, v, bound)


class DLPropagator(Propagator):
    """Propagator adding difference-constraint reasoning to the solver.

    Head occurrences are treated as defined and non-strict (only the
    constraint itself is enforced when the atom is true); body
    occurrences as external and strict (a false atom enforces the
    negated constraint).
    """

    def __init__(self):
        self._l2e = {}
        self._e2l = {}
        self._graphs = {}
        self._seen_atoms = set()
        self._threads = 1

    def graph(self, thread_id):
        graph = self._graphs.get(thread_id)
        if graph is None:
            graph = DiffGraph()
            self._graphs[thread_id] = graph
        return graph

    def init(self, init):
        self._threads = init.number_of_threads
        for ta in init.theory_atoms:
            if ta.name != "diff" or ta.lit == 0:
                continue
            key = (ta.lit, ta.location, ta.elements, ta.guard)
            if key in self._seen_atoms:
                continue
            self._seen_atoms.add(key)
            edge = _parse_diff_atom(ta)
            lit = init.solver_literal(ta.lit)
            self._l2e.setdefault(lit, []).append(edge)
            self._e2l.setdefault(edge, []).append(lit)
            init.add_watch(lit)
            if ta.location == "body":
                neg = DiffEdge(edge.v, edge.u, -edge.d - 1)
                self._l2e.setdefault(-lit, []).append(neg)
                self._e2l.setdefault(neg, []).append(-lit)
                init.add_watch(-lit)

    def _literal(self, control, edge):
        """First solver literal associated with the edge that is true."""
        for lit in self._e2l[edge]:
            if control.assignment.value(lit) is True:
                return lit
        raise DLError(f"no true literal for edge {edge}")

    def propagate(self, control, changes):
        graph = self.graph(control.thread_id)
        level = control.assignment.decision_level
        for lit in changes:
            for edge in self._l2e[lit]:
                cycle = graph.add_edge(edge, level)
                if cycle is not None:
                    nogood = []
                    for e in cycle:
                        l = self._literal(control, e) if e in self._e2l else lit
                        if l not in nogood:
                            nogood.append(l)
                    control.add_nogood(nogood)
                    return

    def undo(self, thread_id, assignment, changes):
        self.graph(thread_id).backtrack(assignment.decision_level)

    def assignment(self, thread_id=0):
        """Witness pairs (variable term, value) for the thread's graph."""
        return self.graph(thread_id).get_assignment()

    def on_model(self, model):
        """Append dl(x,v) witness symbols to a freshly found model."""
        pairs = self.assignment(model.thread_id)
        model.extend(
            f"dl({render_term(var)},{value})" for var, value in pairs
        )
        return pairs
