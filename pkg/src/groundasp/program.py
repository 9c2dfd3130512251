"""Shared in-memory program representation.

A `GroundProgram` is an ordered list of aspif statements plus derived
views: the highest atom id, the symbol table (from output statements
whose condition is the atom itself), resolved theory atoms, and the
strongly connected components of the positive dependency graph.
"""

from dataclasses import dataclass

from . import aspif
from .aspif import (
    Assumption,
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

__all__ = [
    "GroundProgram",
    "TheoryAtomIR",
    "SccIndex",
    "ProgramError",
    "Redefinition",
    "CrossSegmentLoop",
    "Inconsistent",
    "compose",
    "sccs",
    "facts_after_simplification",
    "render_term",
]


class ProgramError(Exception):
    pass


class Redefinition(ProgramError):
    pass


class CrossSegmentLoop(ProgramError):
    pass


class Inconsistent(ProgramError):
    pass


def render_term(term):
    """Render a ground term: an int, a symbol string, or nested tuples
    of the form ("fn", name, args) and ("tup", args)."""
    if isinstance(term, int):
        return str(term)
    if isinstance(term, str):
        return term
    kind = term[0]
    if kind == "fn":
        _, name, args = term
        if not args:
            return name
        return f"{name}({','.join(render_term(a) for a in args)})"
    if kind == "tup":
        args = term[1]
        inner = ",".join(render_term(a) for a in args)
        if len(args) == 1:
            inner += ","
        return f"({inner})"
    raise ValueError(f"unknown term kind {kind!r}")


@dataclass(frozen=True)
class TheoryAtomIR:
    """Resolved view of one theory atom.

    `lit` is the program atom (0 for directives), `name` the root symbol
    of the name term, `location` head or body, `elements` a tuple of
    (terms, condition) pairs over resolved ground terms, and `guard`
    an (operator, term) pair or None.
    """

    lit: int
    name: str
    location: str
    elements: tuple
    guard: object


@dataclass(frozen=True)
class SccIndex:
    component: dict  # atom -> component id
    members: tuple  # component id -> tuple of atoms
    trivial: tuple  # component id -> bool

    def is_trivial(self, cid):
        return self.trivial[cid]


def _body_lits(body):
    if isinstance(body, NormalBody):
        return body.lits
    return tuple(l for l, _ in body.lits)


class GroundProgram:
    """Ordered aspif statements plus an atom registry."""

    def __init__(self, statements=()):
        self.statements = list(statements)
        self._refresh()

    def _refresh(self):
        self.atom_count = 0
        self.symbols = {}
        self.conditional_outputs = []
        self.defined_atoms = set()
        self.referenced_atoms = set()
        self.external_values = {}
        for st in self.statements:
            self._scan(st)

    def _scan(self, st):
        def see(atom):
            self.referenced_atoms.add(atom)
            if atom > self.atom_count:
                self.atom_count = atom

        if isinstance(st, Rule):
            for a in st.head:
                see(a)
                self.defined_atoms.add(a)
            for l in _body_lits(st.body):
                see(abs(l))
        elif isinstance(st, Minimize):
            for l, _ in st.lits:
                see(abs(l))
        elif isinstance(st, Output):
            for l in st.condition:
                see(abs(l))
            if len(st.condition) == 1 and st.condition[0] > 0:
                self.symbols.setdefault(st.condition[0], st.text)
            else:
                self.conditional_outputs.append(st)
        elif isinstance(st, External):
            see(st.atom)
            self.external_values[st.atom] = st.value
        elif isinstance(st, (Project, Assumption)):
            atoms = st.atoms if isinstance(st, Project) else st.lits
            for l in atoms:
                see(abs(l))
        elif isinstance(st, aspif.Heuristic):
            see(st.atom)
            for l in st.condition:
                see(abs(l))
        elif isinstance(st, aspif.Edge):
            for l in st.condition:
                see(abs(l))
        elif isinstance(st, (TheoryAtom, TheoryAtomGuarded)):
            if st.atom:
                see(st.atom)
        elif isinstance(st, TheoryElement):
            for l in st.condition:
                see(abs(l))

    def add(self, st):
        self.statements.append(st)
        self._scan(st)

    def rules(self):
        return [st for st in self.statements if isinstance(st, Rule)]

    def is_external(self, atom):
        """True while the atom is declared external and not defined."""
        value = self.external_values.get(atom)
        return (
            value is not None
            and value != aspif.EXTERNAL_RELEASE
            and atom not in self.defined_atoms
        )

    @property
    def external_atoms(self):
        return {a for a in self.external_values if self.is_external(a)}

    def symbol(self, atom):
        return self.symbols.get(atom)

    def minimize_statements(self):
        return [st for st in self.statements if isinstance(st, Minimize)]

    # -- theory resolution ------------------------------------------------

    def theory_terms(self):
        terms = {}
        for st in self.statements:
            if isinstance(st, TheoryNumber):
                terms[st.index] = st.value
            elif isinstance(st, TheorySymbol):
                terms[st.index] = st.name
            elif isinstance(st, TheoryCompound):
                terms[st.index] = st
        resolved = {}

        def resolve(idx):
            if idx in resolved:
                return resolved[idx]
            entry = terms[idx]
            if isinstance(entry, TheoryCompound):
                args = tuple(resolve(a) for a in entry.args)
                if entry.selector == -1:
                    value = ("tup", args)
                elif entry.selector in (-2, -3):
                    value = ("tup", args)  # set/list collapse to tuples here
                else:
                    name = resolve(entry.selector)
                    value = ("fn", name, args)
            else:
                value = entry
            resolved[idx] = value
            return value

        return {idx: resolve(idx) for idx in terms}

    def theory_atoms(self):
        """Resolve all theory atoms into TheoryAtomIR records.

        A name term of shape `name(head)` or `name(body)` carries an
        explicit occurrence tag; otherwise the occurrence is derived
        from where the atom appears in rules (head wins over body).
        """
        terms = self.theory_terms()
        elements = {
            st.index: st for st in self.statements if isinstance(st, TheoryElement)
        }
        head_atoms = set()
        body_atoms = set()
        for st in self.rules():
            head_atoms.update(st.head)
            body_atoms.update(abs(l) for l in _body_lits(st.body))

        out = []
        for st in self.statements:
            if not isinstance(st, (TheoryAtom, TheoryAtomGuarded)):
                continue
            name_term = terms[st.name_term]
            location = None
            if (
                isinstance(name_term, tuple)
                and name_term[0] == "fn"
                and len(name_term[2]) == 1
                and name_term[2][0] in ("head", "body")
            ):
                name = name_term[1]
                location = name_term[2][0]
            elif isinstance(name_term, str):
                name = name_term
            elif isinstance(name_term, tuple) and name_term[0] == "fn":
                name = name_term[1]
            else:
                name = render_term(name_term)
            if location is None:
                if st.atom == 0 or st.atom in head_atoms:
                    location = "head"
                elif st.atom in body_atoms:
                    location = "body"
                else:
                    location = "head"
            elems = []
            for eidx in st.elements:
                el = elements[eidx]
                elems.append(
                    (tuple(terms[t] for t in el.terms), tuple(el.condition))
                )
            guard = None
            if isinstance(st, TheoryAtomGuarded):
                guard = (terms[st.guard_op], terms[st.guard_term])
            out.append(
                TheoryAtomIR(st.atom, name, location, tuple(elems), guard)
            )
        return out

    def __eq__(self, other):
        return (
            isinstance(other, GroundProgram) and self.statements == other.statements
        )

    def __repr__(self):
        return f"GroundProgram({len(self.statements)} statements)"


def compose(segments):
    """Merge program segments in arrival order.

    Raises `Redefinition` when two segments define the same atom and
    `CrossSegmentLoop` when a positive cycle spans segments.  Externals
    defined by a later segment lose their external status (the merged
    program simply records the defining rules after the declaration).
    """
    segments = [
        seg if isinstance(seg, GroundProgram) else GroundProgram(seg)
        for seg in segments
    ]
    defined_by = {}
    for i, seg in enumerate(segments):
        for atom in seg.defined_atoms:
            if atom in defined_by and defined_by[atom] != i:
                raise Redefinition(
                    f"atom {atom} defined in segment {defined_by[atom]} "
                    f"and again in segment {i}"
                )
            defined_by[atom] = i

    merged = GroundProgram(
        [st for seg in segments for st in seg.statements]
    )

    index = sccs(merged)
    for cid, members in enumerate(index.members):
        if index.is_trivial(cid):
            continue
        origins = {defined_by[a] for a in members if a in defined_by}
        if len(origins) > 1:
            raise CrossSegmentLoop(
                f"positive loop over atoms {sorted(members)} spans "
                f"segments {sorted(origins)}"
            )
    return merged


def sccs(program):
    """Strongly connected components of the positive dependency graph.

    Edges run from each head atom to the positive body atoms of its
    rule.  Components are numbered by their smallest member atom; a
    component is trivial iff it contains no edge.
    """
    edges = {}
    for st in program.rules():
        pos = [l for l in _body_lits(st.body) if l > 0]
        for a in st.head:
            edges.setdefault(a, set()).update(pos)

    atoms = sorted(range(1, program.atom_count + 1))
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    counter = [0]
    components = []

    def strongconnect(root):
        work = [(root, iter(sorted(edges.get(root, ()))))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = lowlink[w] = counter[0]
                    counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(sorted(edges.get(w, ())))))
                    advanced = True
                    break
                if w in on_stack:
                    lowlink[v] = min(lowlink[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[v])
            if lowlink[v] == index[v]:
                component = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    component.append(w)
                    if w == v:
                        break
                components.append(sorted(component))

    for atom in atoms:
        if atom not in index:
            strongconnect(atom)

    components.sort(key=lambda c: c[0])
    component_of = {}
    trivial = []
    for cid, members in enumerate(components):
        for atom in members:
            component_of[atom] = cid
        if len(members) > 1:
            trivial.append(False)
        else:
            atom = members[0]
            trivial.append(atom not in edges.get(atom, ()))
    return SccIndex(component_of, tuple(tuple(c) for c in components), tuple(trivial))


def facts_after_simplification(program):
    """Fixpoint of unit propagation on completion-level information.

    Atoms with a certainly-true defining rule become true; non-external
    atoms whose every defining rule has a certainly-false body become
    false.  External atoms are exempt.  Raises `Inconsistent` when an
    integrity constraint's body is certainly true.
    """
    rules_for = {}
    constraints = []
    for st in program.rules():
        if not st.head and not st.choice:
            constraints.append(st)
            continue
        for a in st.head:
            rules_for.setdefault(a, []).append(st)

    true = set()
    false = set()

    def lit_state(l):
        a = abs(l)
        if l > 0:
            if a in true:
                return True
            if a in false:
                return False
        else:
            if a in true:
                return False
            if a in false:
                return True
        return None

    def body_state(body):
        if isinstance(body, NormalBody):
            states = [lit_state(l) for l in body.lits]
            if any(s is False for s in states):
                return False
            if all(s is True for s in states):
                return True
            return None
        certain = sum(w for (l, w) in body.lits if lit_state(l) is True)
        possible = certain + sum(
            w for (l, w) in body.lits if lit_state(l) is None
        )
        if certain >= body.bound:
            return True
        if possible < body.bound:
            return False
        return None

    changed = True
    while changed:
        changed = False
        for atom in range(1, program.atom_count + 1):
            if atom in true or atom in false:
                continue
            if program.is_external(atom):
                continue
            defs = rules_for.get(atom, [])
            body_states = [body_state(st.body) for st in defs]
            if any(
                s is True and not st.choice and len(st.head) == 1
                for st, s in zip(defs, body_states)
            ):
                true.add(atom)
                changed = True
            elif all(s is False for s in body_states):
                false.add(atom)
                changed = True

    for st in constraints:
        if body_state(st.body) is True:
            raise Inconsistent("integrity constraint with certainly true body")
    return true, false
