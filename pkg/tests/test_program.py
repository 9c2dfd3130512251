import random

import pytest

from groundasp import aspif
from groundasp.aspif import NormalBody, Rule
from groundasp.gtext import parse_ground_text
from groundasp.program import (
    CrossSegmentLoop,
    GroundProgram,
    Inconsistent,
    Redefinition,
    compose,
    facts_after_simplification,
    sccs,
)

from conftest import random_program


def test_compose_acyclic():
    merged = compose([parse_ground_text("a."), GroundProgram(
        [Rule(choice=False, head=(2,), body=NormalBody((1,)))]
    )])
    assert len(merged.rules()) == 2


def test_compose_cross_segment_loop():
    seg1 = GroundProgram([Rule(choice=False, head=(1,), body=NormalBody((2,)))])
    seg2 = GroundProgram([Rule(choice=False, head=(2,), body=NormalBody((1,)))])
    with pytest.raises(CrossSegmentLoop):
        compose([seg1, seg2])


def test_compose_negative_cross_segment_cycle_is_legal():
    seg1 = GroundProgram([Rule(choice=False, head=(1,), body=NormalBody((-2,)))])
    seg2 = GroundProgram([Rule(choice=False, head=(2,), body=NormalBody((-1,)))])
    merged = compose([seg1, seg2])
    assert len(merged.rules()) == 2


def test_compose_redefinition():
    seg = GroundProgram([Rule(choice=False, head=(1,), body=NormalBody(()))])
    with pytest.raises(Redefinition):
        compose([seg, seg])


def test_compose_external_later_defined():
    seg1 = parse_ground_text("#external d. e :- d.")
    d = [a for a, s in seg1.symbols.items() if s == "d"][0]
    seg2 = GroundProgram([Rule(choice=False, head=(d,), body=NormalBody(()))])
    merged = compose([seg1, seg2])
    assert not merged.is_external(d)
    assert d in merged.defined_atoms


def test_compose_associative(rng):
    for _ in range(30):
        # disjoint atom ranges avoid redefinition; associativity on the result
        segs = []
        base = 0
        for _ in range(3):
            p = random_program(rng, max_atoms=3, max_rules=4, named=False)
            shifted = []
            for st in p.statements:
                if isinstance(st, Rule):
                    body = st.body
                    if isinstance(body, NormalBody):
                        body = NormalBody(
                            tuple(l + base if l > 0 else l - base for l in body.lits)
                        )
                    else:
                        body = aspif.WeightBody(
                            body.bound,
                            tuple(
                                (l + base if l > 0 else l - base, w)
                                for l, w in body.lits
                            ),
                        )
                    shifted.append(
                        Rule(st.choice, tuple(a + base for a in st.head), body)
                    )
            segs.append(GroundProgram(shifted))
            base += 5
        left = compose([compose(segs[:2]), segs[2]])
        right = compose([segs[0], compose(segs[1:])])
        assert left.statements == right.statements


def test_sccs_trivial():
    p = parse_ground_text("b :- a. a.")
    index = sccs(p)
    assert all(index.is_trivial(c) for c in range(len(index.members)))


def test_sccs_nontrivial_pair():
    p = parse_ground_text("b :- c. c :- b.")
    index = sccs(p)
    nontrivial = [m for c, m in enumerate(index.members) if not index.is_trivial(c)]
    assert nontrivial == [(1, 2)]  # b and c share a component


def test_sccs_empty():
    index = sccs(GroundProgram())
    assert index.members == ()


def test_sccs_self_loop_not_trivial():
    p = parse_ground_text("a :- a.")
    index = sccs(p)
    assert not index.is_trivial(index.component[1])


def test_scc_matches_mutual_reachability(rng):
    for _ in range(40):
        p = random_program(rng, max_atoms=6, max_rules=10, named=False)
        index = sccs(p)
        atoms = range(1, p.atom_count + 1)
        edges = {a: set() for a in atoms}
        for rule in p.rules():
            pos = [
                l
                for l in (
                    rule.body.lits
                    if isinstance(rule.body, NormalBody)
                    else [l for l, _ in rule.body.lits]
                )
                if l > 0
            ]
            for a in rule.head:
                edges[a].update(pos)
        # brute-force transitive closure as the independent oracle
        reach = {a: set(edges[a]) for a in atoms}
        changed = True
        while changed:
            changed = False
            for a in atoms:
                extra = set()
                for b in reach[a]:
                    extra |= reach[b]
                if not extra <= reach[a]:
                    reach[a] |= extra
                    changed = True
        for a in atoms:
            for b in atoms:
                together = index.component[a] == index.component[b]
                mutual = a == b or (b in reach[a] and a in reach[b])
                assert together == mutual
        for cid, members in enumerate(index.members):
            has_edge = any(b in edges[a] for a in members for b in members)
            assert index.is_trivial(cid) == (not has_edge)


def test_facts_forward_chaining():
    p = parse_ground_text("a. b :- a.")
    assert facts_after_simplification(p) == ({1, 2}, set())


def test_facts_no_support():
    p = parse_ground_text("b :- c.")
    true, false = facts_after_simplification(p)
    assert true == set() and false == {1, 2}


def test_facts_externals_exempt():
    p = parse_ground_text("#external c. b :- c.")
    assert facts_after_simplification(p) == (set(), set())


def test_facts_never_classify_external_false(rng):
    for _ in range(30):
        p = random_program(rng, max_atoms=5, max_rules=8, named=False)
        ext = 1
        if ext in p.defined_atoms:
            continue
        p.add(aspif.External(ext, aspif.EXTERNAL_FALSE))
        _, false = facts_after_simplification(p)
        assert ext not in false


def test_facts_inconsistent():
    p = parse_ground_text("a. :- a.")
    with pytest.raises(Inconsistent):
        facts_after_simplification(p)


def test_theory_atom_resolution_names_and_guards():
    p = parse_ground_text("&diff { (a,1) - 0 } <= 5.")
    (ta,) = p.theory_atoms()
    assert ta.name == "diff"
    assert ta.location == "head"
    (terms, condition) = ta.elements[0]
    assert condition == ()
    assert terms[0] == ("fn", "-", (("tup", ("a", 1)), 0))
    assert ta.guard == ("<=", 5)


def test_is_external_lifecycle():
    p = parse_ground_text("#external d.")
    assert p.is_external(1)
    p.add(Rule(choice=False, head=(1,), body=NormalBody(())))
    assert not p.is_external(1)
