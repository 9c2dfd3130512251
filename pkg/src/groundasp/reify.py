"""Serialize ground programs into the fact representation.

Rules become `rule/2` facts over `choice/1` or `disjunction/1` heads and
`normal/1` or `sum/2` bodies, linked to `atom_tuple`, `literal_tuple` and
`weighted_literal_tuple` declarations.  Atom and literal tuples are
numbered independently, each consecutively from 0, and structurally
identical tuples share one id, so for instance the output fact for an
atom reuses an existing literal tuple holding just that literal.

Sum bodies carry their lower bound as the second argument of `sum/2`
(the bound has no other home in the fact format).  Theory statements are
mirrored field by field into `theory_*` facts; this schema is an
artifact convention of this toolkit rather than an interchange format.
"""

from . import aspif
from .aspif import (
    Assumption,
    Comment,
    External,
    Minimize,
    NormalBody,
    Output,
    Project,
    Rule,
    TheoryAtom,
    TheoryAtomGuarded,
    TheoryCompound,
    TheoryElement,
    TheoryNumber,
    TheorySymbol,
    WeightBody,
)
from .program import GroundProgram, sccs as compute_sccs

__all__ = ["reify", "render_facts"]

_EXTERNAL_NAMES = {0: "free", 1: "true", 2: "false", 3: "release"}


class _Tuples:
    """Interned tuple ids, numbered consecutively from 0."""

    def __init__(self, declare, member):
        self.declare = declare
        self.member = member
        self.ids = {}

    def get(self, items, facts):
        items = tuple(items)
        known = self.ids.get(items)
        if known is not None:
            return known
        new = len(self.ids)
        self.ids[items] = new
        facts.append((self.declare, (new,)))
        for entry in items:
            if isinstance(entry, tuple):
                facts.append((self.member, (new, *entry)))
            else:
                facts.append((self.member, (new, entry)))
        return new


def reify(program, sccs=False, incremental=False):
    """Turn a GroundProgram into an ordered list of (predicate, args) facts."""
    if not isinstance(program, GroundProgram):
        program = GroundProgram(program)
    facts = []
    if incremental:
        facts.append(("tag", ("incremental",)))
    atom_tuples = _Tuples("atom_tuple", "atom_tuple")
    literal_tuples = _Tuples("literal_tuple", "literal_tuple")
    weighted_tuples = _Tuples("weighted_literal_tuple", "weighted_literal_tuple")

    def body_term(body):
        if isinstance(body, NormalBody):
            bid = literal_tuples.get(body.lits, facts)
            return ("fn", "normal", (bid,))
        bid = weighted_tuples.get(body.lits, facts)
        return ("fn", "sum", (bid, body.bound))

    for st in program.statements:
        if isinstance(st, Rule):
            hid = atom_tuples.get(st.head, facts)
            head = ("fn", "choice" if st.choice else "disjunction", (hid,))
            facts.append(("rule", (head, body_term(st.body))))
        elif isinstance(st, Minimize):
            bid = weighted_tuples.get(st.lits, facts)
            facts.append(("minimize", (st.priority, bid)))
        elif isinstance(st, Output):
            cid = literal_tuples.get(st.condition, facts)
            facts.append(("output", (st.text, cid)))
        elif isinstance(st, External):
            facts.append(("external", (st.atom, _EXTERNAL_NAMES[st.value])))
        elif isinstance(st, Project):
            for atom in st.atoms:
                facts.append(("project", (atom,)))
        elif isinstance(st, Assumption):
            for lit in st.lits:
                facts.append(("assumption", (lit,)))
        elif isinstance(st, TheoryNumber):
            facts.append(("theory_number", (st.index, st.value)))
        elif isinstance(st, TheorySymbol):
            facts.append(("theory_symbol", (st.index, _quote(st.name))))
        elif isinstance(st, TheoryCompound):
            facts.append(("theory_compound", (st.index, st.selector)))
            for pos, arg in enumerate(st.args):
                facts.append(("theory_compound_arg", (st.index, pos, arg)))
        elif isinstance(st, TheoryElement):
            facts.append(("theory_element", (st.index,)))
            for pos, term in enumerate(st.terms):
                facts.append(("theory_element_term", (st.index, pos, term)))
            for pos, lit in enumerate(st.condition):
                facts.append(("theory_element_condition", (st.index, pos, lit)))
        elif isinstance(st, TheoryAtom):
            facts.append(("theory_atom", (st.atom, st.name_term)))
            for pos, el in enumerate(st.elements):
                facts.append(("theory_atom_element", (st.atom, pos, el)))
        elif isinstance(st, TheoryAtomGuarded):
            facts.append(("theory_atom", (st.atom, st.name_term)))
            for pos, el in enumerate(st.elements):
                facts.append(("theory_atom_element", (st.atom, pos, el)))
            facts.append(("theory_atom_guard", (st.atom, st.guard_op, st.guard_term)))
        elif isinstance(st, (Comment, aspif.Heuristic, aspif.Edge)):
            pass  # no fact schema; heuristics and edges are solver hints

    if sccs:
        index = compute_sccs(program)
        for cid, members in enumerate(index.members):
            if index.is_trivial(cid):
                continue
            for atom in members:
                facts.append(("scc", (cid, atom)))
    return facts


def _quote(text):
    if text and (text[0].islower() or text[0] == "_") and all(
        c.isalnum() or c == "_" for c in text
    ):
        return text
    return '"' + text.replace('"', '\\"') + '"'


def _render_arg(arg):
    if isinstance(arg, tuple):
        _, name, args = arg
        return f"{name}({','.join(_render_arg(a) for a in args)})"
    return str(arg)


def render_facts(facts):
    """One fact per line, terminated by `.`, in the given order."""
    lines = []
    for pred, args in facts:
        lines.append(f"{pred}({','.join(_render_arg(a) for a in args)}).")
    return "\n".join(lines) + ("\n" if lines else "")
