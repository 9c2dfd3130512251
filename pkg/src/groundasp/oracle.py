"""Brute-force reference semantics for ground programs.

Every model class is computed by exhaustive enumeration over the
interpretation space: classical models (rules as material implications),
supported models, stable models via the reduct, here-and-there and
equilibrium models, diverse model selection, superset-maximal models,
and guess-and-check solutions.  These oracles are deliberately
independent of the CDCL engine so they can serve as its ground truth.

External atoms are treated as inputs: their declared value fixes them
(default false), `free` leaves them open, and they are exempt from
support and minimality requirements.
"""

import numpy as np

from .aspif import NormalBody, Rule, WeightBody
from .program import GroundProgram

__all__ = [
    "ModelSet",
    "TooLarge",
    "GuessAtomDefinedInCheck",
    "classical_models",
    "supported_models",
    "stable_models",
    "ht_models",
    "equilibrium_models",
    "diverse_select",
    "gc_solutions",
    "superset_maximal",
    "named",
    "BRUTE_FORCE_CAP",
]

BRUTE_FORCE_CAP = 20


class TooLarge(Exception):
    pass


class GuessAtomDefinedInCheck(Exception):
    pass


class ModelSet:
    """Canonical, deduplicated collection of interpretations.

    Ordered by size, then lexicographically by sorted members, so two
    ModelSets over the same universe compare equal iff they contain the
    same models.
    """

    def __init__(self, models):
        unique = {frozenset(m) if not isinstance(m, tuple) else m for m in models}
        self.models = sorted(unique, key=_model_key)

    def __iter__(self):
        return iter(self.models)

    def __len__(self):
        return len(self.models)

    def __contains__(self, m):
        return (frozenset(m) if not isinstance(m, tuple) else m) in set(self.models)

    def __eq__(self, other):
        if isinstance(other, ModelSet):
            return self.models == other.models
        return self.models == ModelSet(other).models

    def __repr__(self):
        return f"ModelSet({[sorted(m) if not isinstance(m, tuple) else m for m in self.models]})"


def _model_key(m):
    if isinstance(m, tuple):  # HT pair (H, T)
        h, t = m
        return (len(t), tuple(sorted(t)), len(h), tuple(sorted(h)))
    return (len(m), tuple(sorted(m)))


def named(program, models):
    """Map a ModelSet over atom ids to one over display symbols."""
    out = []
    for m in models:
        if isinstance(m, tuple):
            out.append(tuple(frozenset(program.symbol(a) or str(a) for a in part) for part in m))
        else:
            out.append(frozenset(program.symbol(a) or str(a) for a in m))
    return ModelSet(out)


# -- compiled view ----------------------------------------------------------


class _Compiled:
    def __init__(self, program, cap):
        if not isinstance(program, GroundProgram):
            program = GroundProgram(program)
        self.program = program
        self.n = program.atom_count
        if self.n > cap:
            raise TooLarge(f"{self.n} atoms exceed the brute-force cap {cap}")
        self.rules = program.rules()
        self.fixed_true = 0
        self.fixed_false = 0
        self.exempt = set()  # atoms free of support/derivation requirements
        for atom, value in program.external_values.items():
            if not program.is_external(atom):
                continue
            self.exempt.add(atom)
            if value == 1:
                self.fixed_true |= 1 << (atom - 1)
            elif value in (2, 3):
                self.fixed_false |= 1 << (atom - 1)
        self.disjunctive = any(
            len(r.head) > 1 and not r.choice for r in self.rules
        )

    def interpretations(self):
        count = 1 << self.n
        interps = np.arange(count, dtype=np.int64)
        ok = (interps & self.fixed_true) == self.fixed_true
        ok &= (interps & self.fixed_false) == 0
        return interps, ok

    def body_sat(self, interps, body):
        if isinstance(body, NormalBody):
            pos = 0
            neg = 0
            for l in body.lits:
                if l > 0:
                    pos |= 1 << (l - 1)
                else:
                    neg |= 1 << (-l - 1)
            return ((interps & pos) == pos) & ((interps & neg) == 0)
        total = np.zeros(len(interps), dtype=np.int64)
        for l, w in body.lits:
            bit = (interps >> (abs(l) - 1)) & 1
            total += w * (bit if l > 0 else 1 - bit)
        return total >= body.bound

    def head_sat(self, interps, rule):
        if rule.choice:
            return np.ones(len(interps), dtype=bool)
        mask = 0
        for a in rule.head:
            mask |= 1 << (a - 1)
        if mask == 0:
            return np.zeros(len(interps), dtype=bool)
        return (interps & mask) != 0

    def classical_mask(self):
        interps, ok = self.interpretations()
        for rule in self.rules:
            ok &= self.head_sat(interps, rule) | ~self.body_sat(interps, rule.body)
        return interps, ok

    def supported_mask(self):
        interps, ok = self.classical_mask()
        support = {}
        for rule in self.rules:
            if not rule.head:
                continue
            sat = self.body_sat(interps, rule.body)
            for a in rule.head:
                if a in support:
                    support[a] = support[a] | sat
                else:
                    support[a] = sat.copy()
        for atom in range(1, self.n + 1):
            if atom in self.exempt:
                continue
            true_here = ((interps >> (atom - 1)) & 1).astype(bool)
            ok &= ~true_here | support.get(
                atom, np.zeros(len(interps), dtype=bool)
            )
        return interps, ok

    # -- per-interpretation checks (plain ints as bitmasks) ----------------

    def body_value(self, body, pos_set_mask, neg_ref_mask):
        """Body truth with positive literals read from `pos_set_mask` and
        negative literals from `neg_ref_mask` (both bitmasks)."""
        if isinstance(body, NormalBody):
            for l in body.lits:
                if l > 0:
                    if not (pos_set_mask >> (l - 1)) & 1:
                        return False
                elif (neg_ref_mask >> (-l - 1)) & 1:
                    return False
            return True
        total = 0
        for l, w in body.lits:
            if l > 0:
                if (pos_set_mask >> (l - 1)) & 1:
                    total += w
            elif not (neg_ref_mask >> (-l - 1)) & 1:
                total += w
        return total >= body.bound

    def reduct_lfp(self, model_mask):
        """Least fixpoint of the reduct under the model (non-disjunctive)."""
        x = model_mask & self.mask_of(self.exempt)
        changed = True
        while changed:
            changed = False
            for rule in self.rules:
                if not rule.head:
                    continue
                if not self.body_value(rule.body, x, model_mask):
                    continue
                if rule.choice:
                    derive = self.mask_of(rule.head) & model_mask
                else:
                    derive = self.mask_of(rule.head)
                if derive & ~x:
                    x |= derive
                    changed = True
        return x

    def models_reduct(self, candidate_mask, model_mask):
        """Does `candidate_mask` satisfy the reduct of the program under
        `model_mask`?  Used by the disjunctive minimality check."""
        for rule in self.rules:
            if not self.body_value(rule.body, candidate_mask, model_mask):
                continue
            if rule.choice:
                for a in rule.head:
                    bit = 1 << (a - 1)
                    if model_mask & bit and not candidate_mask & bit:
                        return False
            elif rule.head:
                if not any(candidate_mask & (1 << (a - 1)) for a in rule.head):
                    return False
            else:
                return False
        return True

    @staticmethod
    def mask_of(atoms):
        mask = 0
        for a in atoms:
            mask |= 1 << (a - 1)
        return mask

    def to_set(self, mask):
        return frozenset(
            a for a in range(1, self.n + 1) if (mask >> (a - 1)) & 1
        )


def classical_models(program, cap=BRUTE_FORCE_CAP):
    c = _Compiled(program, cap)
    interps, ok = c.classical_mask()
    return ModelSet(c.to_set(int(i)) for i in interps[ok])


def supported_models(program, cap=BRUTE_FORCE_CAP):
    c = _Compiled(program, cap)
    interps, ok = c.supported_mask()
    return ModelSet(c.to_set(int(i)) for i in interps[ok])


def stable_models(program, cap=BRUTE_FORCE_CAP):
    """Models of the program that are subset-minimal models of their reduct.

    For non-disjunctive programs the reduct is definite, so stability
    reduces to the least-fixpoint test; genuinely disjunctive programs
    fall back to explicit subset minimization.
    """
    c = _Compiled(program, cap)
    if not c.disjunctive:
        interps, ok = c.supported_mask()
        out = []
        for i in interps[ok]:
            m = int(i)
            if c.reduct_lfp(m) == m:
                out.append(c.to_set(m))
        return ModelSet(out)
    interps, ok = c.classical_mask()
    out = []
    for i in interps[ok]:
        m = int(i)
        if not c.models_reduct(m, m):
            continue
        # strictly smaller models of the reduct disprove stability
        sub = (m - 1) & m
        minimal = True
        while True:
            if c.models_reduct(sub, m):
                minimal = False
                break
            if sub == 0:
                break
            sub = (sub - 1) & m
        if minimal:
            out.append(c.to_set(m))
    return ModelSet(out)


# -- here-and-there ---------------------------------------------------------


def _ht_body(c, body, h_mask, t_mask, world_mask):
    """Body satisfaction at one world: positive literals are read at the
    world, negative literals hold iff the atom is not in T."""
    if isinstance(body, NormalBody):
        for l in body.lits:
            if l > 0:
                if not (world_mask >> (l - 1)) & 1:
                    return False
            elif (t_mask >> (-l - 1)) & 1:
                return False
        return True
    total = 0
    for l, w in body.lits:
        if l > 0:
            if (world_mask >> (l - 1)) & 1:
                total += w
        elif not (t_mask >> (-l - 1)) & 1:
            total += w
    return total >= body.bound


def _ht_satisfies(c, h_mask, t_mask):
    for rule in c.rules:
        # world t: classical satisfaction in T
        if _ht_body(c, rule.body, h_mask, t_mask, t_mask):
            if rule.choice:
                pass
            elif rule.head:
                if not any(t_mask & (1 << (a - 1)) for a in rule.head):
                    return False
            else:
                return False
        # world h
        if _ht_body(c, rule.body, h_mask, t_mask, h_mask):
            if rule.choice:
                # law of the excluded middle per chosen atom
                for a in rule.head:
                    bit = 1 << (a - 1)
                    if t_mask & bit and not h_mask & bit:
                        return False
            elif rule.head:
                if not any(h_mask & (1 << (a - 1)) for a in rule.head):
                    return False
            else:
                return False
    return True


def _ht_pairs(c):
    full = (1 << c.n) - 1
    for t_mask in range(full + 1):
        if t_mask & c.fixed_true != c.fixed_true or t_mask & c.fixed_false:
            continue
        # inputs behave classically: H agrees with T on them
        h_fixed = t_mask & c.mask_of(c.exempt)
        rest = t_mask & ~h_fixed
        sub = rest
        while True:
            h_mask = sub | h_fixed
            if _ht_satisfies(c, h_mask, t_mask):
                yield h_mask, t_mask
            if sub == 0:
                break
            sub = (sub - 1) & rest


def ht_models(program, cap=BRUTE_FORCE_CAP):
    c = _Compiled(program, cap)
    return ModelSet(
        (c.to_set(h), c.to_set(t)) for h, t in _ht_pairs(c)
    )


def equilibrium_models(program, cap=BRUTE_FORCE_CAP):
    """Total HT models (T,T) admitting no HT model (H,T) with H strictly
    smaller."""
    c = _Compiled(program, cap)
    by_t = {}
    for h_mask, t_mask in _ht_pairs(c):
        by_t.setdefault(t_mask, []).append(h_mask)
    out = []
    for t_mask, hs in by_t.items():
        if t_mask in hs and all(h == t_mask for h in hs):
            out.append(c.to_set(t_mask))
    return ModelSet(out)


# -- selections and second-level reasoning ----------------------------------


def _distance(a, b, shown):
    if shown is not None:
        a = a & shown
        b = b & shown
    return len(a ^ b)


def diverse_select(models, m, option, k=0, shown=None):
    """Select m-tuples of models by pairwise Hamming distance over the
    shown atoms.

    `k_diverse` returns every ordered m-tuple (repetition allowed) whose
    pairwise distances all reach k; `most_diverse` returns one tuple
    maximizing the total pairwise distance, ties broken by tuple index
    order.
    """
    models = list(models)
    if not models:
        raise ValueError("no models to select from")
    shown = frozenset(shown) if shown is not None else None

    def tuples(prefix):
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for i in range(len(models)):
            prefix.append(i)
            yield from tuples(prefix)
            prefix.pop()

    if option == "k_diverse":
        out = []
        for combo in tuples([]):
            if all(
                _distance(models[combo[i]], models[combo[j]], shown) >= k
                for i in range(m)
                for j in range(i + 1, m)
            ):
                out.append(tuple(models[i] for i in combo))
        return out
    if option == "most_diverse":
        best = None
        best_score = -1
        for combo in tuples([]):
            score = sum(
                _distance(models[combo[i]], models[combo[j]], shown)
                for i in range(m)
                for j in range(i + 1, m)
            )
            if score > best_score:
                best_score = score
                best = combo
        return tuple(models[i] for i in best), best_score
    raise ValueError(f"unknown option {option!r}")


def _symbol_sets(program, models):
    return ModelSet(
        frozenset(program.symbol(a) for a in m if program.symbol(a)) for m in models
    )


def gc_solutions(guess, check, guessed=None, cap=BRUTE_FORCE_CAP):
    """Stable models of the guess program whose guessed atoms, added as
    facts, make the check program unsatisfiable.

    `guessed` is a set of display symbols; it defaults to all symbols of
    the guess program.  Results are reported as sets of guessed symbols.
    """
    if not isinstance(guess, GroundProgram):
        guess = GroundProgram(guess)
    if not isinstance(check, GroundProgram):
        check = GroundProgram(check)
    if guessed is None:
        guessed = set(guess.symbols.values())
    guessed = set(guessed)

    check_defined_symbols = {
        check.symbol(a) for a in check.defined_atoms if check.symbol(a)
    }
    clash = guessed & check_defined_symbols
    if clash:
        raise GuessAtomDefinedInCheck(
            f"guess atoms defined in check program: {sorted(clash)}"
        )

    check_atom_by_symbol = {
        sym: atom for atom, sym in check.symbols.items()
    }
    solutions = []
    seen = set()
    for model in stable_models(guess, cap):
        projection = frozenset(
            guess.symbol(a) for a in model if guess.symbol(a) in guessed
        )
        if projection in seen:
            continue
        seen.add(projection)
        extended = GroundProgram(check.statements)
        for sym in projection:
            atom = check_atom_by_symbol.get(sym)
            if atom is not None:
                extended.add(Rule(choice=False, head=(atom,), body=NormalBody(())))
        if len(stable_models(extended, cap)) == 0:
            solutions.append(projection)
    return ModelSet(solutions)


def superset_maximal(program, shown=None, cap=BRUTE_FORCE_CAP):
    """Stable models whose shown projection has no strict stable superset."""
    if not isinstance(program, GroundProgram):
        program = GroundProgram(program)
    if shown is None:
        shown = set(program.symbols)
    shown = set(shown)
    projections = {
        frozenset(m & shown) for m in stable_models(program, cap)
    }
    out = [
        p
        for p in projections
        if not any(p < q for q in projections)
    ]
    return ModelSet(out)
