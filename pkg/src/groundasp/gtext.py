"""Human-writable ground program language.

The text format is a deliberately small, ground-only fragment: rules with
choice or disjunctive heads, `not` and `not not` body literals, a single
`#sum{ w:l; ... } >= k` aggregate per body, `#minimize`, `#external`,
`#show`, `#assume`, `#project` directives, and `&diff { u - v } <= d`
theory atoms in heads or bodies.  Variables (uppercase identifiers) are
rejected; programs compile straight into the aspif statement IR with
atoms interned in first-occurrence order.

Example::

    {a}.
    b :- a.
    c :- not a.
"""

from . import aspif
from .aspif import (
    Assumption,
    External,
    Minimize,
    NormalBody,
    Output,
    Project,
    Rule,
    TheoryAtomGuarded,
    TheoryCompound,
    TheoryElement,
    TheoryNumber,
    TheorySymbol,
    WeightBody,
)
from .program import GroundProgram, render_term

__all__ = [
    "parse_ground_text",
    "render_ground_text",
    "GroundTextError",
    "ParseError",
    "NonGroundTerm",
    "DuplicateExternalDefinition",
    "Unrepresentable",
]


class GroundTextError(Exception):
    pass


class ParseError(GroundTextError):
    def __init__(self, message, line, column):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class NonGroundTerm(ParseError):
    pass


class DuplicateExternalDefinition(GroundTextError):
    pass


class Unrepresentable(GroundTextError):
    pass


_PUNCT = (
    ":-",
    "<=",
    ">=",
    "{",
    "}",
    "(",
    ")",
    ";",
    ",",
    ".",
    ":",
    "&",
    "-",
    "@",
    "[",
    "]",
)


def _tokenize(source):
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "%":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(("int", int(source[i:j]), line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "var" if word[0].isupper() else "ident"
            tokens.append((kind, word, line, col))
            col += j - i
            i = j
            continue
        if ch == "#":
            j = i + 1
            while j < n and source[j].isalpha():
                j += 1
            tokens.append(("directive", source[i:j], line, col))
            col += j - i
            i = j
            continue
        for punct in _PUNCT:
            if source.startswith(punct, i):
                tokens.append(("punct", punct, line, col))
                col += len(punct)
                i += len(punct)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(("eof", None, line, col))
    return tokens


class _Compiler:
    def __init__(self):
        self.atoms = {}
        self.aux_atoms = set()
        self.theory_atom_ids = set()
        self.statements = []
        self.shows = []
        self.has_show = False
        self.externals_seen = set()
        self.nn_cache = {}
        self.diff_cache = {}
        self.term_cache = {}
        self.next_term = 0
        self.next_element = 0

    def intern(self, name, aux=False):
        atom = self.atoms.get(name)
        if atom is None:
            atom = len(self.atoms) + 1
            self.atoms[name] = atom
            if aux:
                self.aux_atoms.add(atom)
        return atom

    def fresh_aux(self, stem):
        n = 1
        while f"{stem}_{n}" in self.atoms:
            n += 1
        return self.intern(f"{stem}_{n}", aux=True)

    def nn_literal(self, atom):
        """Auxiliary encoding of `not not a`: aux :- not a, use -aux."""
        aux = self.nn_cache.get(atom)
        if aux is None:
            aux = self.fresh_aux("nn")
            self.statements.append(
                Rule(choice=False, head=(aux,), body=NormalBody((-atom,)))
            )
            self.nn_cache[atom] = aux
        return -aux

    def theory_term(self, term):
        idx = self.term_cache.get(term)
        if idx is not None:
            return idx
        if isinstance(term, int):
            st = TheoryNumber(self.next_term, term)
        elif isinstance(term, str):
            st = TheorySymbol(self.next_term, term)
        elif term[0] == "fn":
            name_idx = self.theory_term(term[1])
            args = tuple(self.theory_term(a) for a in term[2])
            st = TheoryCompound(self.next_term, name_idx, args)
        else:
            args = tuple(self.theory_term(a) for a in term[1])
            st = TheoryCompound(self.next_term, -1, args)
        self.term_cache[term] = self.next_term
        self.next_term += 1
        self.statements.append(st)
        return st.index

    def diff_atom(self, u, v, bound, location):
        key = (u, v, bound, location)
        atom = self.diff_cache.get(key)
        if atom is not None:
            return atom
        surface = f"&diff({location}){{{render_term(u)}-{render_term(v)}}}<={bound}"
        atom = self.intern(surface, aux=True)
        self.theory_atom_ids.add(atom)
        name = self.theory_term(("fn", "diff", (location,)))
        elem_term = self.theory_term(("fn", "-", (u, v)))
        element = TheoryElement(self.next_element, (elem_term,), ())
        self.next_element += 1
        self.statements.append(element)
        op = self.theory_term("<=")
        guard = self.theory_term(bound)
        self.statements.append(
            TheoryAtomGuarded(atom, name, (element.index,), op, guard)
        )
        self.diff_cache[key] = atom
        return atom

    def finish(self):
        if self.has_show:
            self.statements.extend(self.shows)
        else:
            for name, atom in self.atoms.items():
                if atom in self.aux_atoms:
                    continue
                self.statements.append(Output(name, (atom,)))
        return GroundProgram(self.statements)


class _Parser:
    def __init__(self, source):
        self.tokens = _tokenize(source)
        self.pos = 0
        self.out = _Compiler()

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok[2], tok[3])

    def accept(self, kind, value=None):
        tok = self.peek()
        if tok[0] == kind and (value is None or tok[1] == value):
            return self.next()
        return None

    def expect(self, kind, value=None):
        tok = self.accept(kind, value)
        if tok is None:
            got = self.peek()
            want = value if value is not None else kind
            self.error(f"expected {want!r}, found {got[1]!r}")
        return tok

    # -- terms and atoms ---------------------------------------------------

    def parse_term(self):
        tok = self.peek()
        if tok[0] == "var":
            raise NonGroundTerm(
                f"variable {tok[1]!r} in ground program", tok[2], tok[3]
            )
        if tok[0] == "int":
            return self.next()[1]
        if tok[0] == "ident":
            name = self.next()[1]
            if self.accept("punct", "("):
                args = [self.parse_term()]
                while self.accept("punct", ","):
                    args.append(self.parse_term())
                self.expect("punct", ")")
                return ("fn", name, tuple(args))
            return name
        if tok[0] == "punct" and tok[1] == "(":
            self.next()
            args = [self.parse_term()]
            while self.accept("punct", ","):
                args.append(self.parse_term())
            self.expect("punct", ")")
            if len(args) == 1:
                return args[0]
            return ("tup", tuple(args))
        if tok[0] == "punct" and tok[1] == "-":
            self.next()
            value = self.expect("int")
            return -value[1]
        self.error(f"expected term, found {tok[1]!r}")

    def parse_atom(self):
        term = self.parse_term()
        if isinstance(term, int) or (
            not isinstance(term, str) and term[0] != "fn"
        ):
            self.error("atom expected")
        return self.out.intern(render_term(term))

    def parse_int(self):
        if self.accept("punct", "-"):
            return -self.expect("int")[1]
        return self.expect("int")[1]

    def parse_diff_atom(self, location):
        self.expect("ident", "diff")
        self.expect("punct", "{")
        u = self.parse_term()
        self.expect("punct", "-")
        v = self.parse_term()
        self.expect("punct", "}")
        self.expect("punct", "<=")
        bound = self.parse_int()
        return self.out.diff_atom(u, v, bound, location)

    def parse_literal(self):
        """A body literal as a signed atom id."""
        if self.accept("ident", "not"):
            if self.accept("ident", "not"):
                return self.out.nn_literal(self.parse_atom())
            return -self.parse_atom()
        if self.accept("punct", "&"):
            return self.parse_diff_atom("body")
        return self.parse_atom()

    def parse_aggregate(self):
        self.expect("punct", "{")
        items = []
        while True:
            weight = self.parse_int()
            self.expect("punct", ":")
            lit = self.parse_literal()
            items.append((lit, weight))
            if not self.accept("punct", ";"):
                break
        self.expect("punct", "}")
        self.expect("punct", ">=")
        bound = self.parse_int()
        # normalize negative weights by literal complementation
        norm = []
        for lit, weight in items:
            if weight < 0:
                norm.append((-lit, -weight))
                bound += -weight
            elif weight > 0:
                norm.append((lit, weight))
        return WeightBody(bound, tuple(norm))

    # -- statements ----------------------------------------------------------

    def parse_body(self):
        lits = []
        aggregate = None
        if self.peek()[0] == "punct" and self.peek()[1] == ".":
            return lits, aggregate
        while True:
            if self.peek()[0] == "directive" and self.peek()[1] == "#sum":
                tok = self.peek()
                self.next()
                if aggregate is not None:
                    self.error("at most one aggregate per body", tok)
                aggregate = self.parse_aggregate()
            else:
                lits.append(self.parse_literal())
            if not self.accept("punct", ","):
                break
        return lits, aggregate

    def make_body(self, lits, aggregate):
        if aggregate is None:
            return NormalBody(tuple(lits))
        if not lits:
            return aggregate
        aux = self.out.fresh_aux("agg")
        self.out.statements.append(Rule(choice=False, head=(aux,), body=aggregate))
        return NormalBody(tuple(lits) + (aux,))

    def parse_rule(self, head, choice):
        if self.accept("punct", ":-"):
            lits, aggregate = self.parse_body()
            body = self.make_body(lits, aggregate)
        else:
            body = NormalBody(())
        self.expect("punct", ".")
        self.out.statements.append(Rule(choice=choice, head=tuple(head), body=body))

    def parse_statement(self):
        tok = self.peek()
        if tok[0] == "directive":
            self.parse_directive()
            return
        if self.accept("punct", ":-"):
            lits, aggregate = self.parse_body()
            body = self.make_body(lits, aggregate)
            self.expect("punct", ".")
            self.out.statements.append(Rule(choice=False, head=(), body=body))
            return
        if self.accept("punct", "{"):
            atoms = []
            if not (self.peek()[0] == "punct" and self.peek()[1] == "}"):
                atoms.append(self.parse_atom())
                while self.accept("punct", ";"):
                    atoms.append(self.parse_atom())
            self.expect("punct", "}")
            self.parse_rule(atoms, choice=True)
            return
        if self.accept("punct", "&"):
            atom = self.parse_diff_atom("head")
            self.parse_rule([atom], choice=False)
            return
        atoms = [self.parse_atom()]
        while self.accept("punct", ";"):
            atoms.append(self.parse_atom())
        self.parse_rule(atoms, choice=False)

    def parse_directive(self):
        tok = self.next()
        name = tok[1]
        out = self.out
        if name == "#minimize":
            self.expect("punct", "{")
            items = []
            while True:
                weight = self.parse_int()
                priority = 0
                if self.accept("punct", "@"):
                    priority = self.parse_int()
                lits = []
                if self.accept("punct", ":"):
                    lits.append(self.parse_literal())
                    while self.accept("punct", ","):
                        lits.append(self.parse_literal())
                items.append((weight, priority, lits))
                if not self.accept("punct", ";"):
                    break
            self.expect("punct", "}")
            self.expect("punct", ".")
            by_priority = {}
            for weight, priority, lits in items:
                if len(lits) == 1:
                    lit = lits[0]
                elif not lits:
                    lit = out.fresh_aux("min")
                    out.statements.append(
                        Rule(choice=False, head=(lit,), body=NormalBody(()))
                    )
                else:
                    lit = out.fresh_aux("min")
                    out.statements.append(
                        Rule(
                            choice=False, head=(lit,), body=NormalBody(tuple(lits))
                        )
                    )
                by_priority.setdefault(priority, []).append((lit, weight))
            for priority in sorted(by_priority):
                out.statements.append(
                    Minimize(priority, tuple(by_priority[priority]))
                )
        elif name == "#external":
            atom_tok = self.peek()
            atom = self.parse_atom()
            if atom in out.externals_seen:
                raise DuplicateExternalDefinition(
                    f"{atom_tok[2]}:{atom_tok[3]}: repeated #external declaration"
                )
            out.externals_seen.add(atom)
            self.expect("punct", ".")
            value = aspif.EXTERNAL_FALSE
            if self.accept("punct", "["):
                word = self.expect("ident")[1]
                values = {
                    "true": aspif.EXTERNAL_TRUE,
                    "false": aspif.EXTERNAL_FALSE,
                    "free": aspif.EXTERNAL_FREE,
                }
                if word not in values:
                    self.error(f"unknown external value {word!r}", tok)
                value = values[word]
                self.expect("punct", "]")
            out.statements.append(External(atom, value))
        elif name == "#show":
            out.has_show = True
            if self.accept("punct", "."):
                return
            term = self.parse_term()
            text = render_term(term)
            condition = []
            if self.accept("punct", ":"):
                condition.append(self.parse_literal())
                while self.accept("punct", ","):
                    condition.append(self.parse_literal())
            self.expect("punct", ".")
            out.shows.append(Output(text, tuple(condition)))
        elif name == "#assume":
            self.expect("punct", "{")
            lits = [self.parse_literal()]
            while self.accept("punct", ";"):
                lits.append(self.parse_literal())
            self.expect("punct", "}")
            self.expect("punct", ".")
            out.statements.append(Assumption(tuple(lits)))
        elif name == "#project":
            atom = self.parse_atom()
            self.expect("punct", ".")
            out.statements.append(Project((atom,)))
        else:
            self.error(f"unknown directive {name!r}", tok)

    def run(self):
        while self.peek()[0] != "eof":
            self.parse_statement()
        return self.out.finish()


def parse_ground_text(source):
    """Compile ground-text source into a GroundProgram."""
    return _Parser(source).run()


def _render_literal(lit, names):
    name = names.get(abs(lit))
    if name is None:
        raise Unrepresentable(f"atom {abs(lit)} has no symbolic name")
    return name if lit > 0 else f"not {name}"


def _render_body(body, names):
    if isinstance(body, NormalBody):
        return ", ".join(_render_literal(l, names) for l in body.lits)
    items = "; ".join(
        f"{w}:{_render_literal(l, names)}" for l, w in body.lits
    )
    return f"#sum{{ {items} }} >= {body.bound}"


def render_ground_text(program):
    """Render a program back to ground text.

    Inverse of `parse_ground_text` up to atom renumbering.  Statements
    outside the ground-text subset (heuristics, edges, theory atoms not
    of the `&diff` shape) raise `Unrepresentable`.
    """
    names = dict(program.symbols)
    diff_atoms = {}
    for ta in program.theory_atoms():
        if ta.name != "diff" or ta.guard is None or len(ta.elements) != 1:
            raise Unrepresentable(f"theory atom over &{ta.name} has no text form")
        (terms, condition) = ta.elements[0]
        if condition or len(terms) != 1:
            raise Unrepresentable("conditional theory elements have no text form")
        term = terms[0]
        if not (isinstance(term, tuple) and term[0] == "fn" and term[1] == "-"):
            raise Unrepresentable("difference term expected")
        op, bound = ta.guard
        if op != "<=" or not isinstance(bound, int):
            raise Unrepresentable("difference guard expected")
        u, v = term[2]
        diff_atoms[ta.lit] = (
            f"&diff {{ {render_term(u)} - {render_term(v)} }} <= {bound}"
        )

    used = set(names.values())
    for atom in range(1, program.atom_count + 1):
        if atom in names or atom in diff_atoms:
            continue
        name = f"x_{atom}"
        if name in used:
            raise Unrepresentable(f"cannot invent a name for atom {atom}")
        names[atom] = name
        used.add(name)

    def literal(lit):
        if abs(lit) in diff_atoms:
            text = diff_atoms[abs(lit)]
            return text if lit > 0 else f"not {text}"
        return _render_literal(lit, names)

    def body_text(body):
        if isinstance(body, NormalBody):
            return ", ".join(literal(l) for l in body.lits)
        items = "; ".join(f"{w}:{literal(l)}" for l, w in body.lits)
        return f"#sum{{ {items} }} >= {body.bound}"

    mentioned = set()
    for st in program.statements:
        if isinstance(st, Rule):
            mentioned.update(st.head)
            if isinstance(st.body, NormalBody):
                mentioned.update(abs(l) for l in st.body.lits)
            else:
                mentioned.update(abs(l) for l, _ in st.body.lits)
        elif isinstance(st, Minimize):
            mentioned.update(abs(l) for l, _ in st.lits)
        elif isinstance(st, External):
            mentioned.add(st.atom)
        elif isinstance(st, Assumption):
            mentioned.update(abs(l) for l in st.lits)
        elif isinstance(st, Project):
            mentioned.update(st.atoms)

    lines = []
    # re-parsing gives every non-theory atom a default self-output; emit
    # explicit #show lines whenever the program deviates from that or an
    # output atom would otherwise not occur in the rendered text at all
    explicit_show = bool(program.conditional_outputs) or any(
        program.symbols.get(a) != names[a] or a not in mentioned
        for a in range(1, program.atom_count + 1)
        if a not in diff_atoms
    )

    for st in program.statements:
        if isinstance(st, Rule):
            if st.choice:
                for a in st.head:
                    if a in diff_atoms:
                        raise Unrepresentable("theory atom in choice head")
                head = "{" + "; ".join(names[a] for a in st.head) + "}"
            elif st.head:
                head = "; ".join(
                    diff_atoms.get(a) or _render_literal(a, names) for a in st.head
                )
            else:
                head = ""
            body = body_text(st.body)
            if head and body:
                lines.append(f"{head} :- {body}.")
            elif head:
                lines.append(f"{head}.")
            else:
                lines.append(f":- {body}.")
        elif isinstance(st, Minimize):
            items = "; ".join(
                f"{w}@{st.priority}:{literal(l)}" for l, w in st.lits
            )
            lines.append(f"#minimize{{ {items} }}.")
        elif isinstance(st, External):
            word = {0: "free", 1: "true", 2: "false"}.get(st.value)
            if word is None:
                raise Unrepresentable("released external has no text form")
            suffix = "" if st.value == aspif.EXTERNAL_FALSE else f" [{word}]"
            lines.append(f"#external {names[st.atom]}.{suffix}")
        elif isinstance(st, Assumption):
            lines.append(
                "#assume{ " + "; ".join(literal(l) for l in st.lits) + " }."
            )
        elif isinstance(st, Project):
            for a in st.atoms:
                lines.append(f"#project {names[a]}.")
        elif isinstance(st, Output):
            pass  # handled below
        elif isinstance(
            st,
            (TheoryNumber, TheorySymbol, TheoryCompound, TheoryElement),
        ):
            pass
        elif isinstance(st, (aspif.TheoryAtom, aspif.TheoryAtomGuarded)):
            pass  # already folded into diff_atoms or rejected above
        elif isinstance(st, aspif.Comment):
            lines.append(f"% {st.text}")
        else:
            raise Unrepresentable(f"{type(st).__name__} has no text form")

    if explicit_show:
        lines.append("#show.")
        for st in program.statements:
            if isinstance(st, Output):
                cond = ", ".join(literal(l) for l in st.condition)
                lines.append(f"#show {st.text} : {cond}." if cond else f"#show {st.text}.")
    return "\n".join(lines) + ("\n" if lines else "")
