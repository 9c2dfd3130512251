"""Reader and writer for the line-based aspif intermediate format.

An aspif stream starts with a header line `asp <major> <minor> <revision>
[tags...]` and continues with one statement per line; each program segment
is terminated by a line containing a single `0`.  Multiple segments are
only admitted when the header carries the `incremental` tag.

Statements are integer coded: 1 rule, 2 minimize, 3 project, 4 output,
5 external, 6 assumption, 7 heuristic, 8 edge, 9 theory (with subtype
codes 0, 1, 2, 4, 5, 6), 10 comment.  Positive and negative integers
denote positive and negative literals; 0 is not a valid literal.

Parsing is permissive at the grammar level (token counts, literal zero,
unknown codes); semantic invariants such as literal signs or weight
positivity are reported by `validate_statement` instead, so that files
can be inspected even when they carry questionable content.
"""

from dataclasses import dataclass, field

__all__ = [
    "Header",
    "NormalBody",
    "WeightBody",
    "Rule",
    "Minimize",
    "Project",
    "Output",
    "External",
    "Assumption",
    "Heuristic",
    "Edge",
    "TheoryNumber",
    "TheorySymbol",
    "TheoryCompound",
    "TheoryElement",
    "TheoryAtom",
    "TheoryAtomGuarded",
    "Comment",
    "AspifError",
    "ZeroLiteral",
    "CountMismatch",
    "UnknownCode",
    "MissingTerminator",
    "NonIncrementalMultiSegment",
    "InvalidStatement",
    "EXTERNAL_FREE",
    "EXTERNAL_TRUE",
    "EXTERNAL_FALSE",
    "EXTERNAL_RELEASE",
    "HEURISTIC_MODIFIERS",
    "parse_program",
    "write_program",
    "write_statement",
    "validate_statement",
]

EXTERNAL_FREE = 0
EXTERNAL_TRUE = 1
EXTERNAL_FALSE = 2
EXTERNAL_RELEASE = 3

HEURISTIC_MODIFIERS = ("level", "sign", "factor", "init", "true", "false")


class AspifError(Exception):
    """Base class for aspif reader/writer errors.

    `line` carries the 1-based line number of the offending input line
    and `partial` the segments parsed before the error, so callers can
    report precise diagnostics while keeping earlier statements intact.
    """

    def __init__(self, message, line=None, partial=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
        self.partial = partial if partial is not None else []


class ZeroLiteral(AspifError):
    pass


class CountMismatch(AspifError):
    pass


class UnknownCode(AspifError):
    pass


class MissingTerminator(AspifError):
    pass


class NonIncrementalMultiSegment(AspifError):
    pass


class InvalidStatement(AspifError):
    pass


@dataclass(frozen=True)
class Header:
    major: int = 1
    minor: int = 0
    revision: int = 0
    tags: tuple = ()

    @property
    def incremental(self):
        return "incremental" in self.tags


@dataclass(frozen=True)
class NormalBody:
    lits: tuple = ()


@dataclass(frozen=True)
class WeightBody:
    bound: int = 1
    lits: tuple = ()  # pairs (literal, weight)


@dataclass(frozen=True)
class Rule:
    choice: bool
    head: tuple  # positive literals
    body: object  # NormalBody or WeightBody


@dataclass(frozen=True)
class Minimize:
    priority: int
    lits: tuple  # pairs (literal, weight)


@dataclass(frozen=True)
class Project:
    atoms: tuple


@dataclass(frozen=True)
class Output:
    text: str
    condition: tuple = ()


@dataclass(frozen=True)
class External:
    atom: int
    value: int  # EXTERNAL_FREE/TRUE/FALSE/RELEASE


@dataclass(frozen=True)
class Assumption:
    lits: tuple


@dataclass(frozen=True)
class Heuristic:
    modifier: int
    atom: int
    bias: int
    priority: int
    condition: tuple = ()


@dataclass(frozen=True)
class Edge:
    u: int
    v: int
    condition: tuple = ()


@dataclass(frozen=True)
class TheoryNumber:
    index: int
    value: int


@dataclass(frozen=True)
class TheorySymbol:
    index: int
    name: str


@dataclass(frozen=True)
class TheoryCompound:
    index: int
    selector: int  # -1/-2/-3 for (), {}, [] tuples, else a term index
    args: tuple = ()


@dataclass(frozen=True)
class TheoryElement:
    index: int
    terms: tuple = ()
    condition: tuple = ()


@dataclass(frozen=True)
class TheoryAtom:
    atom: int  # positive literal, or 0 for a directive
    name_term: int
    elements: tuple = ()


@dataclass(frozen=True)
class TheoryAtomGuarded:
    atom: int
    name_term: int
    elements: tuple
    guard_op: int  # term index of the operator
    guard_term: int


@dataclass(frozen=True)
class Comment:
    text: str


class _Line:
    """Cursor over one input line, byte exact for length-prefixed strings."""

    def __init__(self, raw, number):
        self.raw = raw
        self.data = raw.encode("utf-8")
        self.pos = 0
        self.number = number

    def _skip_space(self):
        data = self.data
        n = len(data)
        while self.pos < n and data[self.pos] in (0x20, 0x09):
            self.pos += 1

    def at_end(self):
        self._skip_space()
        return self.pos >= len(self.data)

    def next_int(self, what="integer"):
        self._skip_space()
        data = self.data
        start = self.pos
        if start >= len(data):
            raise CountMismatch(f"expected {what}, found end of line", self.number)
        end = start
        if data[end : end + 1] == b"-":
            end += 1
        while end < len(data) and 0x30 <= data[end] <= 0x39:
            end += 1
        if end == start or data[start:end] == b"-":
            raise CountMismatch(
                f"expected {what}, found {data[start:start + 8]!r}", self.number
            )
        self.pos = end
        return int(data[start:end])

    def next_lit(self, what="literal"):
        value = self.next_int(what)
        if value == 0:
            raise ZeroLiteral(f"0 is not a valid {what}", self.number)
        return value

    def next_string(self, nbytes):
        # exactly one separating space, then nbytes raw bytes
        data = self.data
        if self.pos < len(data) and data[self.pos] in (0x20, 0x09):
            self.pos += 1
        chunk = data[self.pos : self.pos + nbytes]
        if len(chunk) != nbytes:
            raise CountMismatch(
                f"string shorter than declared length {nbytes}", self.number
            )
        self.pos += nbytes
        return chunk.decode("utf-8")

    def rest(self):
        if self.pos < len(self.data) and self.data[self.pos] in (0x20, 0x09):
            self.pos += 1
        out = self.data[self.pos :].decode("utf-8")
        self.pos = len(self.data)
        return out

    def finish(self):
        if not self.at_end():
            raise CountMismatch(
                f"trailing tokens {self.data[self.pos:self.pos + 16]!r}", self.number
            )


def _parse_header(line):
    fields = line.raw.split()
    if not fields or fields[0] != "asp":
        raise AspifError("missing `asp` header", line.number)
    if len(fields) < 4:
        raise CountMismatch("header needs major, minor and revision", line.number)
    try:
        major, minor, revision = (int(f) for f in fields[1:4])
    except ValueError:
        raise CountMismatch("non-numeric version field", line.number) from None
    if major < 0 or minor < 0 or revision < 0:
        raise AspifError("negative version field", line.number)
    if major != 1:
        raise AspifError(f"unsupported major version {major}", line.number)
    return Header(major, minor, revision, tuple(fields[4:]))


def _parse_lits(line, n, what="literal"):
    return tuple(line.next_lit(what) for _ in range(n))


def _parse_body(line):
    form = line.next_int("body form")
    if form == 0:
        n = line.next_int("body length")
        return NormalBody(_parse_lits(line, n))
    if form == 1:
        bound = line.next_int("lower bound")
        n = line.next_int("body length")
        lits = tuple(
            (line.next_lit(), line.next_int("weight")) for _ in range(n)
        )
        return WeightBody(bound, lits)
    raise UnknownCode(f"unknown body form {form}", line.number)


def _parse_theory(line):
    sub = line.next_int("theory subtype")
    if sub == 0:
        return TheoryNumber(line.next_int("term index"), line.next_int("value"))
    if sub == 1:
        index = line.next_int("term index")
        n = line.next_int("string length")
        return TheorySymbol(index, line.next_string(n))
    if sub == 2:
        index = line.next_int("term index")
        selector = line.next_int("selector")
        n = line.next_int("argument count")
        return TheoryCompound(index, selector, tuple(line.next_int() for _ in range(n)))
    if sub == 4:
        index = line.next_int("element index")
        n = line.next_int("term count")
        terms = tuple(line.next_int() for _ in range(n))
        m = line.next_int("condition length")
        return TheoryElement(index, terms, _parse_lits(line, m))
    if sub in (5, 6):
        atom = line.next_int("atom")
        if atom < 0:
            raise ZeroLiteral("theory atom must be positive or 0", line.number)
        name = line.next_int("name term")
        n = line.next_int("element count")
        elements = tuple(line.next_int() for _ in range(n))
        if sub == 5:
            return TheoryAtom(atom, name, elements)
        op = line.next_int("guard operator")
        term = line.next_int("guard term")
        return TheoryAtomGuarded(atom, name, elements, op, term)
    raise UnknownCode(f"unknown theory subtype {sub}", line.number)


def _parse_statement(line):
    code = line.next_int("statement code")
    if code == 1:
        h = line.next_int("head kind")
        if h not in (0, 1):
            raise UnknownCode(f"unknown head kind {h}", line.number)
        m = line.next_int("head length")
        head = _parse_lits(line, m, "head atom")
        st = Rule(choice=(h == 1), head=head, body=_parse_body(line))
    elif code == 2:
        priority = line.next_int("priority")
        n = line.next_int("count")
        st = Minimize(
            priority,
            tuple((line.next_lit(), line.next_int("weight")) for _ in range(n)),
        )
    elif code == 3:
        n = line.next_int("count")
        st = Project(_parse_lits(line, n, "atom"))
    elif code == 4:
        m = line.next_int("string length")
        text = line.next_string(m)
        n = line.next_int("condition length")
        st = Output(text, _parse_lits(line, n))
    elif code == 5:
        st = External(line.next_lit("atom"), line.next_int("external value"))
        if st.value not in (0, 1, 2, 3):
            raise UnknownCode(f"unknown external value {st.value}", line.number)
    elif code == 6:
        n = line.next_int("count")
        st = Assumption(_parse_lits(line, n))
    elif code == 7:
        modifier = line.next_int("modifier")
        atom = line.next_lit("atom")
        bias = line.next_int("bias")
        priority = line.next_int("priority")
        n = line.next_int("condition length")
        st = Heuristic(modifier, atom, bias, priority, _parse_lits(line, n))
    elif code == 8:
        u = line.next_int("node")
        v = line.next_int("node")
        n = line.next_int("condition length")
        st = Edge(u, v, _parse_lits(line, n))
    elif code == 9:
        st = _parse_theory(line)
    elif code == 10:
        return Comment(line.rest())
    else:
        raise UnknownCode(f"unknown statement code {code}", line.number)
    line.finish()
    return st


def parse_program(stream, on_warning=None):
    """Parse an aspif stream into a list of (header, statements) segments.

    `stream` may be text, bytes, or an iterable of lines.  Only the first
    segment carries the header; subsequent entries pair `None` with their
    statement list.  Unknown header tags are preserved and reported via
    `on_warning` when given.
    """
    if isinstance(stream, bytes):
        stream = stream.decode("utf-8")
    if isinstance(stream, str):
        lines = stream.splitlines()
    else:
        lines = [ln.rstrip("\n") for ln in stream]

    header = None
    segments = []
    statements = []
    closed = False
    for number, raw in enumerate(lines, start=1):
        if raw.strip() == "":
            continue
        line = _Line(raw, number)
        if header is None:
            header = _parse_header(line)
            for tag in header.tags:
                if tag != "incremental" and on_warning is not None:
                    on_warning(f"line {number}: unknown header tag {tag!r}")
            continue
        if raw.strip() == "0":
            segments.append((header if not segments else None, statements))
            statements = []
            closed = True
            continue
        if closed and not header.incremental:
            raise NonIncrementalMultiSegment(
                "statements after `0` require the incremental tag",
                number,
                segments,
            )
        closed = False
        try:
            statements.append(_parse_statement(line))
        except AspifError as err:
            err.partial = segments
            raise
    if header is None:
        raise AspifError("empty input: missing `asp` header")
    if statements or not segments:
        raise MissingTerminator(
            "segment not terminated by `0`", len(lines), segments
        )
    if not closed:
        raise MissingTerminator("segment not terminated by `0`", len(lines), segments)
    return segments


def _lits_tokens(lits):
    return [str(l) for l in lits]


def write_statement(st):
    """Render one statement as an aspif line (without the newline)."""
    if isinstance(st, Rule):
        issues = validate_statement(st)
        if issues:
            raise InvalidStatement("; ".join(issues))
        parts = ["1", "1" if st.choice else "0", str(len(st.head))]
        parts += _lits_tokens(st.head)
        if isinstance(st.body, NormalBody):
            parts += ["0", str(len(st.body.lits))] + _lits_tokens(st.body.lits)
        else:
            parts += ["1", str(st.body.bound), str(len(st.body.lits))]
            for lit, weight in st.body.lits:
                parts += [str(lit), str(weight)]
        return " ".join(parts)
    if isinstance(st, Minimize):
        parts = ["2", str(st.priority), str(len(st.lits))]
        for lit, weight in st.lits:
            parts += [str(lit), str(weight)]
        return " ".join(parts)
    if isinstance(st, Project):
        return " ".join(["3", str(len(st.atoms))] + _lits_tokens(st.atoms))
    if isinstance(st, Output):
        issues = validate_statement(st)
        if issues:
            raise InvalidStatement("; ".join(issues))
        data = st.text.encode("utf-8")
        parts = ["4", str(len(data)), st.text, str(len(st.condition))]
        return " ".join(parts + _lits_tokens(st.condition))
    if isinstance(st, External):
        return f"5 {st.atom} {st.value}"
    if isinstance(st, Assumption):
        return " ".join(["6", str(len(st.lits))] + _lits_tokens(st.lits))
    if isinstance(st, Heuristic):
        issues = validate_statement(st)
        if issues:
            raise InvalidStatement("; ".join(issues))
        parts = [
            "7",
            str(st.modifier),
            str(st.atom),
            str(st.bias),
            str(st.priority),
            str(len(st.condition)),
        ]
        return " ".join(parts + _lits_tokens(st.condition))
    if isinstance(st, Edge):
        parts = ["8", str(st.u), str(st.v), str(len(st.condition))]
        return " ".join(parts + _lits_tokens(st.condition))
    if isinstance(st, TheoryNumber):
        return f"9 0 {st.index} {st.value}"
    if isinstance(st, TheorySymbol):
        data = st.name.encode("utf-8")
        return f"9 1 {st.index} {len(data)} {st.name}"
    if isinstance(st, TheoryCompound):
        parts = ["9", "2", str(st.index), str(st.selector), str(len(st.args))]
        return " ".join(parts + [str(a) for a in st.args])
    if isinstance(st, TheoryElement):
        parts = ["9", "4", str(st.index), str(len(st.terms))]
        parts += [str(t) for t in st.terms]
        parts.append(str(len(st.condition)))
        return " ".join(parts + _lits_tokens(st.condition))
    if isinstance(st, TheoryAtom):
        parts = ["9", "5", str(st.atom), str(st.name_term), str(len(st.elements))]
        return " ".join(parts + [str(e) for e in st.elements])
    if isinstance(st, TheoryAtomGuarded):
        parts = ["9", "6", str(st.atom), str(st.name_term), str(len(st.elements))]
        parts += [str(e) for e in st.elements]
        parts += [str(st.guard_op), str(st.guard_term)]
        return " ".join(parts)
    if isinstance(st, Comment):
        issues = validate_statement(st)
        if issues:
            raise InvalidStatement("; ".join(issues))
        return f"10 {st.text}"
    raise InvalidStatement(f"cannot serialize {type(st).__name__}")


def write_program(segments, header=None):
    """Serialize segments back to aspif text.

    Accepts either the (header, statements) pairs produced by
    `parse_program` or bare statement lists.  The emitted header is
    `asp 1 0 0`, with the `incremental` tag added for multi-segment
    output.
    """
    normalized = []
    for seg in segments:
        if isinstance(seg, tuple) and len(seg) == 2:
            seg_header, statements = seg
            if seg_header is not None and header is None:
                header = seg_header
        else:
            statements = seg
        normalized.append(list(statements))
    if header is None:
        tags = ("incremental",) if len(normalized) > 1 else ()
        header = Header(1, 0, 0, tags)
    elif len(normalized) > 1 and not header.incremental:
        header = Header(header.major, header.minor, header.revision,
                        header.tags + ("incremental",))
    out = [" ".join(["asp", str(header.major), str(header.minor),
                     str(header.revision), *header.tags]).rstrip()]
    for statements in normalized:
        out.extend(write_statement(st) for st in statements)
        out.append("0")
    return "\n".join(out) + "\n"


def validate_statement(st):
    """Return a list of invariant violations for one statement."""
    issues = []
    if isinstance(st, Rule):
        for atom in st.head:
            if atom <= 0:
                issues.append(f"head atom must be positive, got {atom}")
        if isinstance(st.body, WeightBody):
            if st.body.bound <= 0:
                issues.append(f"weight body bound must be positive, got {st.body.bound}")
            for lit, weight in st.body.lits:
                if lit == 0:
                    issues.append("0 is not a valid literal")
                if weight <= 0:
                    issues.append(f"weight body weight must be positive, got {weight}")
        else:
            for lit in st.body.lits:
                if lit == 0:
                    issues.append("0 is not a valid literal")
    elif isinstance(st, Output):
        data = st.text.encode("utf-8")
        if b"\x00" in data:
            issues.append("output text must not contain the NUL byte")
        if b"\n" in data:
            issues.append("output text must not contain a newline")
        for lit in st.condition:
            if lit == 0:
                issues.append("0 is not a valid literal")
    elif isinstance(st, External):
        if st.atom <= 0:
            issues.append(f"external atom must be positive, got {st.atom}")
        if st.value not in (0, 1, 2, 3):
            issues.append(f"external value must be in 0..3, got {st.value}")
    elif isinstance(st, Heuristic):
        if not 0 <= st.modifier <= 5:
            issues.append(f"heuristic modifier must be in 0..5, got {st.modifier}")
        if st.atom <= 0:
            issues.append(f"heuristic atom must be positive, got {st.atom}")
        if st.priority < 0:
            issues.append(f"heuristic priority must be non-negative, got {st.priority}")
        for lit in st.condition:
            if lit == 0:
                issues.append("0 is not a valid literal")
    elif isinstance(st, Project):
        for atom in st.atoms:
            if atom <= 0:
                issues.append(f"projected atom must be positive, got {atom}")
    elif isinstance(st, (Minimize, Assumption, Edge)):
        lits = st.lits if not isinstance(st, Edge) else st.condition
        if isinstance(st, Minimize):
            lits = [l for l, _ in st.lits]
        for lit in lits:
            if lit == 0:
                issues.append("0 is not a valid literal")
    elif isinstance(st, (TheoryAtom, TheoryAtomGuarded)):
        if st.atom < 0:
            issues.append(f"theory atom must be positive or 0, got {st.atom}")
    elif isinstance(st, Comment):
        if "\n" in st.text:
            issues.append("comment must not contain a newline")
    return issues
