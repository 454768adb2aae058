"""Split sequents, proof trees, rule checking, occurrence ancestry, and
cut/axiom classification for propositional and normal modal systems."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache

from .formulas import (
    And,
    Atom,
    BOTTOM,
    Bottom,
    Box,
    Formula,
    Neg,
    Or,
    TOP,
    format_formula,
    formula_length,
    parse_formula,
    signed_subformulas,
    vars_of,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 100000))


class ProofError(ValueError):
    pass


class NoAtomAvailable(ProofError):
    pass


@dataclass(frozen=True)
class Violation:
    path: tuple
    reason: str


# ---------------------------------------------------------------------------
# Systems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class System:
    name: str
    modal_rules: frozenset
    cut_policy: str

    @property
    def modal(self):
        return bool(self.modal_rules)

    def with_literal_cuts(self) -> "System":
        """Internal variant admitting cuts on negated atoms/boxes mid-pipeline."""
        policy = "modal-literal" if self.modal else "literal"
        return System(self.name + "+lit", self.modal_rules, policy)


LKMINUS = System("lk-minus", frozenset(), "none")
LKAT = System("lk-at", frozenset(), "atomic")
LKLIT = System("lk-lit", frozenset(), "literal")
LKMONO = System("lk-mono", frozenset(), "mono")
LK = System("lk", frozenset(), "any")
K = System("k", frozenset({"k"}), "modal-atomic")
KD = System("kd", frozenset({"k", "d"}), "modal-atomic")
KT = System("kt", frozenset({"k", "t"}), "modal-atomic")
K4 = System("k4", frozenset({"4"}), "modal-atomic")
KD4 = System("kd4", frozenset({"4", "d"}), "modal-atomic")
S4 = System("s4", frozenset({"4", "t"}), "modal-atomic")

SYSTEMS = {
    s.name: s
    for s in (LKMINUS, LKAT, LKLIT, LKMONO, LK, K, KD, KT, K4, KD4, S4)
}


def system_by_name(name: str) -> System:
    key = name.lower()
    if key in SYSTEMS:
        return SYSTEMS[key]
    raise ProofError(f"unknown system {name!r}; choose from {sorted(SYSTEMS)}")


def is_atomic_cut_formula(f: Formula) -> bool:
    return isinstance(f, (Atom, Bottom)) or f == TOP


def is_literal_cut_formula(f: Formula) -> bool:
    if is_atomic_cut_formula(f):
        return True
    return isinstance(f, Neg) and isinstance(f.body, (Atom, Bottom))


def cut_allowed(f: Formula, system: System, conclusion: "Sequent") -> bool:
    policy = system.cut_policy
    if policy == "none":
        return False
    if policy == "any":
        return True
    if policy == "atomic":
        return is_atomic_cut_formula(f)
    if policy == "literal":
        return is_literal_cut_formula(f)
    if policy == "mono":
        v = vars_of(f)
        return v <= conclusion.side_vars(1) or v <= conclusion.side_vars(2)
    if policy == "modal-atomic":
        return is_atomic_cut_formula(f) or isinstance(f, Box)
    if policy == "modal-literal":
        if is_atomic_cut_formula(f) or isinstance(f, Box):
            return True
        return isinstance(f, Neg) and isinstance(f.body, (Atom, Bottom, Box))
    raise ProofError(f"unknown cut policy {policy!r}")


# ---------------------------------------------------------------------------
# Split sequents
# ---------------------------------------------------------------------------

COMPONENTS = ("g1", "g2", "d1", "d2")


def _sorted(fs) -> tuple:
    return tuple(sorted(fs, key=format_formula))


@dataclass(frozen=True)
class Sequent:
    g1: tuple = ()
    g2: tuple = ()
    d1: tuple = ()
    d2: tuple = ()

    def comp(self, name) -> tuple:
        return getattr(self, name)

    def replace(self, name, formulas) -> "Sequent":
        parts = {c: self.comp(c) for c in COMPONENTS}
        parts[name] = _sorted(formulas)
        return Sequent(**parts)

    def insert(self, name, f) -> "Sequent":
        return self.replace(name, self.comp(name) + (f,))

    def remove_one(self, name, f) -> "Sequent":
        comp = list(self.comp(name))
        comp.remove(f)
        return self.replace(name, comp)

    def count(self, name, f) -> int:
        return self.comp(name).count(f)

    def antecedent(self):
        return self.g1 + self.g2

    def succedent(self):
        return self.d1 + self.d2

    def side_vars(self, side) -> frozenset:
        out = frozenset()
        for f in self.comp(f"g{side}") + self.comp(f"d{side}"):
            out |= vars_of(f)
        return out

    def all_vars(self) -> frozenset:
        return self.side_vars(1) | self.side_vars(2)

    def occurrences(self):
        for c in COMPONENTS:
            for i, f in enumerate(self.comp(c)):
                yield c, i, f

    def flat_index(self, comp, idx) -> int:
        offset = 0
        for c in COMPONENTS:
            if c == comp:
                return offset + idx
            offset += len(self.comp(c))
        raise ProofError(f"bad component {comp!r}")

    def from_flat(self, flat):
        for c in COMPONENTS:
            n = len(self.comp(c))
            if flat < n:
                return c, flat
            flat -= n
        raise ProofError(f"flat index out of range")

    def length(self) -> int:
        return sum(formula_length(f) for c in COMPONENTS for f in self.comp(c))

    def __repr__(self):
        return f"<seq {format_sequent(self)}>"


def sequent(g1=(), g2=(), d1=(), d2=()) -> Sequent:
    return Sequent(_sorted(g1), _sorted(g2), _sorted(d1), _sorted(d2))


def format_sequent(s: Sequent) -> str:
    def side(fs):
        return ", ".join(format_formula(f) for f in fs)

    return f"{side(s.g1)} ; {side(s.g2)} => {side(s.d1)} ; {side(s.d2)}"


def parse_sequent(text: str) -> Sequent:
    if text.count("=>") != 1:
        raise ProofError(f"sequent text needs exactly one '=>': {text!r}")
    left, right = text.split("=>")

    def halves(part):
        if part.count(";") != 1:
            raise ProofError(f"each side needs exactly one ';': {text!r}")
        a, b = part.split(";")
        return a, b

    g1, g2 = halves(left)
    d1, d2 = halves(right)

    def formulas(chunk):
        chunk = chunk.strip()
        if not chunk:
            return ()
        return tuple(parse_formula(piece) for piece in chunk.split(","))

    return sequent(formulas(g1), formulas(g2), formulas(d1), formulas(d2))


# ---------------------------------------------------------------------------
# Proof trees
# ---------------------------------------------------------------------------

RULES = (
    "ax",
    "bot",
    "lw",
    "rw",
    "lc",
    "rc",
    "land1",
    "land2",
    "rand",
    "lor",
    "ror1",
    "ror2",
    "lneg",
    "rneg",
    "cut",
    "k",
    "d",
    "t",
    "4",
)

_UNARY_MAIN = {
    "lw",
    "rw",
    "lc",
    "rc",
    "land1",
    "land2",
    "ror1",
    "ror2",
    "lneg",
    "rneg",
    "t",
}


@dataclass(frozen=True)
class Proof:
    rule: str
    sequentv: Sequent
    children: tuple = ()
    main_comp: str = None
    main_formula: Formula = None

    @property
    def sequent(self) -> Sequent:
        return self.sequentv

    def __repr__(self):
        return f"<proof {self.rule} {format_sequent(self.sequentv)}>"


def proof_size(p: Proof) -> int:
    return 1 + sum(proof_size(c) for c in p.children)


def proof_depth(p: Proof) -> int:
    if not p.children:
        return 0
    return 1 + max(proof_depth(c) for c in p.children)


def proof_length(p: Proof) -> int:
    """Symbol count summed over every sequent in the tree."""
    return p.sequentv.length() + sum(proof_length(c) for c in p.children)


def subproof_at(p: Proof, path) -> Proof:
    for i in path:
        p = p.children[i]
    return p


def replace_at(p: Proof, path, new: Proof) -> Proof:
    if not path:
        return new
    i = path[0]
    kids = list(p.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return Proof(p.rule, p.sequentv, tuple(kids), p.main_comp, p.main_formula)


def iter_nodes(p: Proof, path=()):
    yield path, p
    for i, c in enumerate(p.children):
        yield from iter_nodes(c, path + (i,))


# ---------------------------------------------------------------------------
# Rule constructors
# ---------------------------------------------------------------------------

def ax(f: Formula, ant="g1", suc="d1") -> Proof:
    if ant not in ("g1", "g2") or suc not in ("d1", "d2"):
        raise ProofError("axiom components must be one antecedent and one succedent")
    return Proof("ax", sequent(**{ant: [f], suc: [f]}))


def bot_axiom(comp="g1") -> Proof:
    if comp not in ("g1", "g2"):
        raise ProofError("false-axiom lives in an antecedent component")
    return Proof("bot", sequent(**{comp: [BOTTOM]}))


def _need(cond, msg):
    if not cond:
        raise ProofError(msg)


def lw(child: Proof, f: Formula, comp="g1") -> Proof:
    _need(comp in ("g1", "g2"), "lw adds to an antecedent component")
    return Proof("lw", child.sequentv.insert(comp, f), (child,), comp, f)


def rw(child: Proof, f: Formula, comp="d1") -> Proof:
    _need(comp in ("d1", "d2"), "rw adds to a succedent component")
    return Proof("rw", child.sequentv.insert(comp, f), (child,), comp, f)


def lc(child: Proof, f: Formula, comp="g1") -> Proof:
    _need(comp in ("g1", "g2"), "lc contracts an antecedent component")
    _need(child.sequentv.count(comp, f) >= 2, "lc needs two copies")
    return Proof("lc", child.sequentv.remove_one(comp, f), (child,), comp, f)


def rc(child: Proof, f: Formula, comp="d1") -> Proof:
    _need(comp in ("d1", "d2"), "rc contracts a succedent component")
    _need(child.sequentv.count(comp, f) >= 2, "rc needs two copies")
    return Proof("rc", child.sequentv.remove_one(comp, f), (child,), comp, f)


def land1(child: Proof, main: Formula, comp="g1") -> Proof:
    _need(isinstance(main, And), "land1 main must be a conjunction")
    _need(comp in ("g1", "g2"), "land1 works in an antecedent component")
    _need(child.sequentv.count(comp, main.left) >= 1, "land1 premise lacks the left conjunct")
    return Proof("land1", child.sequentv.remove_one(comp, main.left).insert(comp, main), (child,), comp, main)


def land2(child: Proof, main: Formula, comp="g1") -> Proof:
    _need(isinstance(main, And), "land2 main must be a conjunction")
    _need(comp in ("g1", "g2"), "land2 works in an antecedent component")
    _need(child.sequentv.count(comp, main.right) >= 1, "land2 premise lacks the right conjunct")
    return Proof("land2", child.sequentv.remove_one(comp, main.right).insert(comp, main), (child,), comp, main)


def rand(left: Proof, right: Proof, main: Formula, comp="d1") -> Proof:
    _need(isinstance(main, And), "rand main must be a conjunction")
    _need(comp in ("d1", "d2"), "rand works in a succedent component")
    ctx_l = left.sequentv.remove_one(comp, main.left)
    ctx_r = right.sequentv.remove_one(comp, main.right)
    _need(ctx_l == ctx_r, "rand premises must share their context")
    return Proof("rand", ctx_l.insert(comp, main), (left, right), comp, main)


def lor(left: Proof, right: Proof, main: Formula, comp="g1") -> Proof:
    _need(isinstance(main, Or), "lor main must be a disjunction")
    _need(comp in ("g1", "g2"), "lor works in an antecedent component")
    ctx_l = left.sequentv.remove_one(comp, main.left)
    ctx_r = right.sequentv.remove_one(comp, main.right)
    _need(ctx_l == ctx_r, "lor premises must share their context")
    return Proof("lor", ctx_l.insert(comp, main), (left, right), comp, main)


def ror1(child: Proof, main: Formula, comp="d1") -> Proof:
    _need(isinstance(main, Or), "ror1 main must be a disjunction")
    _need(comp in ("d1", "d2"), "ror1 works in a succedent component")
    return Proof("ror1", child.sequentv.remove_one(comp, main.left).insert(comp, main), (child,), comp, main)


def ror2(child: Proof, main: Formula, comp="d1") -> Proof:
    _need(isinstance(main, Or), "ror2 main must be a disjunction")
    _need(comp in ("d1", "d2"), "ror2 works in a succedent component")
    return Proof("ror2", child.sequentv.remove_one(comp, main.right).insert(comp, main), (child,), comp, main)


def lneg(child: Proof, main: Formula, comp="g1") -> Proof:
    _need(isinstance(main, Neg), "lneg main must be a negation")
    _need(comp in ("g1", "g2"), "lneg works in an antecedent component")
    dcomp = "d" + comp[1]
    return Proof("lneg", child.sequentv.remove_one(dcomp, main.body).insert(comp, main), (child,), comp, main)


def rneg(child: Proof, main: Formula, comp="d1") -> Proof:
    _need(isinstance(main, Neg), "rneg main must be a negation")
    _need(comp in ("d1", "d2"), "rneg works in a succedent component")
    gcomp = "g" + comp[1]
    return Proof("rneg", child.sequentv.remove_one(gcomp, main.body).insert(comp, main), (child,), comp, main)


def cut(left: Proof, right: Proof, f: Formula, side=2) -> Proof:
    dcomp, gcomp = f"d{side}", f"g{side}"
    ctx_l = left.sequentv.remove_one(dcomp, f)
    ctx_r = right.sequentv.remove_one(gcomp, f)
    _need(ctx_l == ctx_r, "cut premises must share their context")
    return Proof("cut", ctx_l, (left, right), dcomp, f)


def rule_k(child: Proof) -> Proof:
    s = child.sequentv
    _need(len(s.d1) + len(s.d2) == 1, "k premise has exactly one succedent formula")
    dcomp = "d1" if s.d1 else "d2"
    a = (s.d1 + s.d2)[0]
    return Proof(
        "k",
        sequent(
            [Box(f) for f in s.g1],
            [Box(f) for f in s.g2],
            [Box(a)] if dcomp == "d1" else [],
            [Box(a)] if dcomp == "d2" else [],
        ),
        (child,),
        dcomp,
        Box(a),
    )


def rule_d(child: Proof) -> Proof:
    s = child.sequentv
    _need(not s.d1 and not s.d2, "d premise has an empty succedent")
    return Proof("d", sequent([Box(f) for f in s.g1], [Box(f) for f in s.g2]), (child,))


def rule_t(child: Proof, main: Formula, comp="g1") -> Proof:
    _need(isinstance(main, Box), "t main must be boxed")
    _need(comp in ("g1", "g2"), "t works in an antecedent component")
    return Proof("t", child.sequentv.remove_one(comp, main.body).insert(comp, main), (child,), comp, main)


def rule_4(child: Proof) -> Proof:
    s = child.sequentv
    _need(len(s.d1) + len(s.d2) == 1, "4 premise has exactly one succedent formula")
    dcomp = "d1" if s.d1 else "d2"
    a = (s.d1 + s.d2)[0]
    new_gs = {}
    for comp in ("g1", "g2"):
        boxed = [f for f in s.comp(comp) if isinstance(f, Box)]
        stripped = sorted((f.body for f in boxed), key=format_formula)
        base = list(s.comp(comp))
        for f in stripped:
            base.remove(f)  # raises if the premise lacks the unboxed copy
        _need(
            _sorted(base) == _sorted(boxed),
            "4 premise antecedent must be the boxed context plus its bodies",
        )
        new_gs[comp] = boxed
    return Proof(
        "4",
        sequent(
            new_gs["g1"],
            new_gs["g2"],
            [Box(a)] if dcomp == "d1" else [],
            [Box(a)] if dcomp == "d2" else [],
        ),
        (child,),
        dcomp,
        Box(a),
    )


def first_index(s: Sequent, comp: str, f: Formula) -> int:
    return _first_indices(s.comp(comp), f, 1)[0]


def rebuild(node: Proof, children) -> Proof:
    """The same rule instance over new premise proofs (contexts may differ)."""
    children = tuple(children)
    r = node.rule
    m, comp = node.main_formula, node.main_comp
    if r == "lw":
        return lw(children[0], m, comp)
    if r == "rw":
        return rw(children[0], m, comp)
    if r == "lc":
        return lc(children[0], m, comp)
    if r == "rc":
        return rc(children[0], m, comp)
    if r == "land1":
        return land1(children[0], m, comp)
    if r == "land2":
        return land2(children[0], m, comp)
    if r == "rand":
        return rand(children[0], children[1], m, comp)
    if r == "lor":
        return lor(children[0], children[1], m, comp)
    if r == "ror1":
        return ror1(children[0], m, comp)
    if r == "ror2":
        return ror2(children[0], m, comp)
    if r == "lneg":
        return lneg(children[0], m, comp)
    if r == "rneg":
        return rneg(children[0], m, comp)
    if r == "cut":
        return cut(children[0], children[1], m, int(comp[1]))
    if r == "t":
        return rule_t(children[0], m, comp)
    if r == "k":
        return rule_k(children[0])
    if r == "d":
        return rule_d(children[0])
    if r == "4":
        return rule_4(children[0])
    raise ProofError(f"cannot rebuild rule {r!r}")


def weaken_to(p: Proof, target: Sequent) -> Proof:
    """Add weakenings until the end-sequent matches target (a superset)."""
    for comp in COMPONENTS:
        have = list(p.sequentv.comp(comp))
        for f in target.comp(comp):
            if f in have:
                have.remove(f)
            else:
                p = lw(p, f, comp) if comp[0] == "g" else rw(p, f, comp)
    _need(p.sequentv == target, "weaken_to target must extend the end-sequent")
    return p


def contract_to(p: Proof, target: Sequent) -> Proof:
    """Contract duplicates until the end-sequent matches target (a sub-multiset)."""
    for comp in COMPONENTS:
        want = list(target.comp(comp))
        for f in set(p.sequentv.comp(comp)):
            extra = p.sequentv.count(comp, f) - want.count(f)
            _need(extra >= 0, "contract_to target must shrink the end-sequent")
            for _ in range(extra):
                p = lc(p, f, comp) if comp[0] == "g" else rc(p, f, comp)
    _need(p.sequentv == target, "contract_to mismatch")
    return p


def wax(f: Formula, target: Sequent, ant="g1", suc="d1") -> Proof:
    """Axiom f => f weakened up to the target sequent."""
    return weaken_to(ax(f, ant, suc), target)


def top_right(comp="d1") -> Proof:
    """Derivation of the top literal on the right: false-axiom plus rneg."""
    gcomp = "g" + comp[1]
    return rneg(bot_axiom(gcomp), TOP, comp)


# ---------------------------------------------------------------------------
# Expected premises (rule schemas)
# ---------------------------------------------------------------------------

def expected_premises(p: Proof):
    """The premise sequents this node's rule demands, or None for leaves."""
    s = p.sequentv
    rule = p.rule
    m, comp = p.main_formula, p.main_comp
    if rule in ("ax", "bot"):
        return ()
    if rule == "lw" or rule == "rw":
        return (s.remove_one(comp, m),)
    if rule == "lc" or rule == "rc":
        return (s.insert(comp, m),)
    if rule == "land1":
        return (s.remove_one(comp, m).insert(comp, m.left),)
    if rule == "land2":
        return (s.remove_one(comp, m).insert(comp, m.right),)
    if rule == "rand":
        base = s.remove_one(comp, m)
        return (base.insert(comp, m.left), base.insert(comp, m.right))
    if rule == "lor":
        base = s.remove_one(comp, m)
        return (base.insert(comp, m.left), base.insert(comp, m.right))
    if rule == "ror1":
        return (s.remove_one(comp, m).insert(comp, m.left),)
    if rule == "ror2":
        return (s.remove_one(comp, m).insert(comp, m.right),)
    if rule == "lneg":
        return (s.remove_one(comp, m).insert("d" + comp[1], m.body),)
    if rule == "rneg":
        return (s.remove_one(comp, m).insert("g" + comp[1], m.body),)
    if rule == "cut":
        side = comp[1]
        return (s.insert(f"d{side}", m), s.insert(f"g{side}", m))
    if rule == "t":
        return (s.remove_one(comp, m).insert(comp, m.body),)
    if rule == "k":
        return (_k_premise(s, comp, m, four=False),)
    if rule == "4":
        return (_k_premise(s, comp, m, four=True),)
    if rule == "d":
        return (_d_premise(s),)
    raise ProofError(f"unknown rule {rule!r}")


def _boxed_only(fs):
    return all(isinstance(f, Box) for f in fs)


def _k_premise(s: Sequent, dcomp, boxed_main, four):
    if not (_boxed_only(s.g1) and _boxed_only(s.g2)):
        raise ProofError("modal rule conclusion antecedent must be boxed")
    if s.comp(dcomp) != (boxed_main,) or s.comp("d1" if dcomp == "d2" else "d2"):
        raise ProofError("modal rule conclusion succedent must be the single boxed main")
    gs = {}
    for comp in ("g1", "g2"):
        bodies = [f.body for f in s.comp(comp)]
        gs[comp] = bodies + list(s.comp(comp)) if four else bodies
    return sequent(gs["g1"], gs["g2"],
                   [boxed_main.body] if dcomp == "d1" else [],
                   [boxed_main.body] if dcomp == "d2" else [])


def _d_premise(s: Sequent):
    if not (_boxed_only(s.g1) and _boxed_only(s.g2)):
        raise ProofError("d conclusion antecedent must be boxed")
    if s.d1 or s.d2:
        raise ProofError("d conclusion succedent must be empty")
    return sequent([f.body for f in s.g1], [f.body for f in s.g2])


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------

def check_proof(p: Proof, system: System):
    """None if every node matches its schema and the system's cut policy."""
    for path, node in iter_nodes(p):
        s = node.sequentv
        for c in COMPONENTS:
            if tuple(s.comp(c)) != _sorted(s.comp(c)):
                return Violation(path, f"component {c} is not canonically sorted")
        if not system.modal:
            if any(_has_box(f) for _, _, f in s.occurrences()):
                return Violation(path, "boxed formula in a non-modal system")
        if node.rule == "ax":
            ants, sucs = s.antecedent(), s.succedent()
            if len(ants) != 1 or len(sucs) != 1 or ants[0] != sucs[0]:
                return Violation(path, "axiom must be exactly f => f")
            if node.children:
                return Violation(path, "axiom has no premises")
            continue
        if node.rule == "bot":
            if s.antecedent() != (BOTTOM,) or s.succedent() or node.children:
                return Violation(path, "false-axiom must be exactly false =>")
            continue
        if node.rule not in RULES:
            return Violation(path, f"unknown rule {node.rule!r}")
        if node.rule in ("k", "d", "t", "4") and node.rule not in system.modal_rules:
            return Violation(path, f"rule {node.rule} not available in {system.name}")
        if node.rule == "cut":
            if node.main_comp not in ("d1", "d2"):
                return Violation(path, "cut placement must name a succedent component")
            if not cut_allowed(node.main_formula, system, s):
                return Violation(path, f"cut on {format_formula(node.main_formula)} violates the {system.name} policy")
        try:
            expected = expected_premises(node)
        except ProofError as e:
            return Violation(path, str(e))
        if len(expected) != len(node.children):
            return Violation(path, f"rule {node.rule} expects {len(expected)} premises")
        for i, (want, child) in enumerate(zip(expected, node.children)):
            if child.sequentv != want:
                return Violation(
                    path + (i,),
                    f"premise is {format_sequent(child.sequentv)} but {node.rule} needs {format_sequent(want)}",
                )
        if node.rule in _UNARY_MAIN or node.rule in ("rand", "lor", "cut"):
            if node.main_comp not in COMPONENTS or node.main_formula is None:
                return Violation(path, f"rule {node.rule} needs a main occurrence")
    return None


@lru_cache(maxsize=None)
def _has_box(f: Formula) -> bool:
    if isinstance(f, Box):
        return True
    if isinstance(f, Neg):
        return _has_box(f.body)
    if isinstance(f, (And, Or)):
        return _has_box(f.left) or _has_box(f.right)
    return False


def respects_subformula_property(p: Proof) -> bool:
    """Every formula anywhere is a (signed) subformula of the end-sequent."""
    closure = set()
    for f in p.sequentv.antecedent():
        closure |= {g for g, _ in signed_subformulas(f, positive=False)}
    for f in p.sequentv.succedent():
        closure |= {g for g, _ in signed_subformulas(f, positive=True)}
    for _, node in iter_nodes(p):
        for _, _, f in node.sequentv.occurrences():
            if f not in closure:
                return False
    return True


# ---------------------------------------------------------------------------
# Occurrence analysis
# ---------------------------------------------------------------------------

def _first_indices(comp_tuple, formula, k):
    """Indices of the first k copies of formula in the tuple."""
    out = []
    for i, f in enumerate(comp_tuple):
        if f == formula:
            out.append(i)
            if len(out) == k:
                return out
    raise ProofError(f"expected {k} copies of {format_formula(formula)}")


def _pair_component(child_comp, child_skip, concl_comp, concl_skip):
    """Grouped context pairing: k-th remaining copy to k-th remaining copy."""
    pairs = []
    formulas = sorted(set(child_comp) | set(concl_comp), key=format_formula)
    for f in formulas:
        ci = [i for i, g in enumerate(child_comp) if g == f][child_skip.get(f, 0):]
        oi = [i for i, g in enumerate(concl_comp) if g == f][concl_skip.get(f, 0):]
        if len(ci) != len(oi):
            raise ProofError(f"context mismatch on {format_formula(f)}")
        pairs.extend(zip(ci, oi))
    return pairs


def node_links(node: Proof, child_idx: int):
    """Direct-ancestor wiring for one premise.

    Returns (edges, consumed) where edges maps child occurrences
    (comp, idx) to conclusion occurrences and consumed lists child
    occurrences with no conclusion descendant (cut formula occurrences).
    """
    s = node.sequentv
    child = node.children[child_idx].sequentv
    rule = node.rule
    m, comp = node.main_formula, node.main_comp
    edges = []
    consumed = []

    def contexts(child_skip, concl_skip):
        for c in COMPONENTS:
            pairs = _pair_component(
                child.comp(c), child_skip.get(c, {}), s.comp(c), concl_skip.get(c, {})
            )
            edges.extend((((c, ci), (c, oi))) for ci, oi in pairs)

    if rule in ("lw", "rw"):
        contexts({}, {comp: {m: 1}})
    elif rule in ("lc", "rc"):
        main_idx = _first_indices(s.comp(comp), m, 1)[0]
        for i in _first_indices(child.comp(comp), m, 2):
            edges.append(((comp, i), (comp, main_idx)))
        contexts({comp: {m: 2}}, {comp: {m: 1}})
    elif rule in ("land1", "land2", "ror1", "ror2"):
        aux = {"land1": getattr(m, "left", None), "land2": getattr(m, "right", None),
               "ror1": getattr(m, "left", None), "ror2": getattr(m, "right", None)}[rule]
        main_idx = _first_indices(s.comp(comp), m, 1)[0]
        aux_idx = _first_indices(child.comp(comp), aux, 1)[0]
        edges.append(((comp, aux_idx), (comp, main_idx)))
        contexts({comp: {aux: 1}}, {comp: {m: 1}})
    elif rule == "t":
        main_idx = _first_indices(s.comp(comp), m, 1)[0]
        aux_idx = _first_indices(child.comp(comp), m.body, 1)[0]
        edges.append(((comp, aux_idx), (comp, main_idx)))
        contexts({comp: {m.body: 1}}, {comp: {m: 1}})
    elif rule in ("rand", "lor"):
        aux = m.left if child_idx == 0 else m.right
        main_idx = _first_indices(s.comp(comp), m, 1)[0]
        aux_idx = _first_indices(child.comp(comp), aux, 1)[0]
        edges.append(((comp, aux_idx), (comp, main_idx)))
        contexts({comp: {aux: 1}}, {comp: {m: 1}})
    elif rule == "lneg":
        dcomp = "d" + comp[1]
        main_idx = _first_indices(s.comp(comp), m, 1)[0]
        aux_idx = _first_indices(child.comp(dcomp), m.body, 1)[0]
        edges.append(((dcomp, aux_idx), (comp, main_idx)))
        contexts({dcomp: {m.body: 1}}, {comp: {m: 1}})
    elif rule == "rneg":
        gcomp = "g" + comp[1]
        main_idx = _first_indices(s.comp(comp), m, 1)[0]
        aux_idx = _first_indices(child.comp(gcomp), m.body, 1)[0]
        edges.append(((gcomp, aux_idx), (comp, main_idx)))
        contexts({gcomp: {m.body: 1}}, {comp: {m: 1}})
    elif rule == "cut":
        side = comp[1]
        cc = f"d{side}" if child_idx == 0 else f"g{side}"
        cut_idx = _first_indices(child.comp(cc), m, 1)[0]
        consumed.append((cc, cut_idx))
        contexts({cc: {m: 1}}, {})
    elif rule in ("k", "d", "4"):
        for c in ("g1", "g2"):
            strip_alloc = {}
            for oi, f in enumerate(s.comp(c)):
                body_positions = [i for i, g in enumerate(child.comp(c)) if g == f.body]
                k = strip_alloc.get(f.body, 0)
                strip_alloc[f.body] = k + 1
                edges.append(((c, body_positions[k]), (c, oi)))
            if rule == "4":
                strip_counts = {}
                for f in s.comp(c):
                    strip_counts[f.body] = strip_counts.get(f.body, 0) + 1
                own_alloc = {}
                for oi, f in enumerate(s.comp(c)):
                    own_positions = [i for i, g in enumerate(child.comp(c)) if g == f]
                    k = strip_counts.get(f, 0) + own_alloc.get(f, 0)
                    own_alloc[f] = own_alloc.get(f, 0) + 1
                    edges.append(((c, own_positions[k]), (c, oi)))
        if rule != "d":
            dcomp = comp
            edges.append(((dcomp, 0), (dcomp, 0)))
    else:
        raise ProofError(f"no links for rule {rule!r}")
    return edges, consumed


class Analysis:
    """Whole-proof occurrence graph: ancestry, weakness, weights, cut data."""

    def __init__(self, proof: Proof):
        self.proof = proof
        self.direct = {}       # occ -> tuple of direct-ancestor occs
        self.origin_rule = {}  # occ with no direct ancestors -> introducing rule
        self.cuts = []         # (path, node)
        self.axioms = []       # (path, node) for rule ax
        self._weak = {}
        self._build(proof, ())

    def _build(self, node, path):
        for c, i, _ in node.sequentv.occurrences():
            self.direct.setdefault((path, c, i), ())
        if node.rule == "cut":
            self.cuts.append((path, node))
        if node.rule == "ax":
            self.axioms.append((path, node))
        for ci, child in enumerate(node.children):
            cpath = path + (ci,)
            self._build(child, cpath)
            edges, consumed = node_links(node, ci)
            for (cc, cidx), (oc, oidx) in edges:
                key = (path, oc, oidx)
                self.direct[key] = self.direct.get(key, ()) + ((cpath, cc, cidx),)
        if node.rule in ("lw", "rw"):
            comp = node.main_comp
            idx = _first_indices(node.sequentv.comp(comp), node.main_formula, 1)[0]
            self.origin_rule[(path, comp, idx)] = node.rule
        elif node.rule in ("ax", "bot"):
            for c, i, _ in node.sequentv.occurrences():
                self.origin_rule[(path, c, i)] = node.rule

    def occurrence_formula(self, occ):
        path, comp, idx = occ
        return subproof_at(self.proof, path).sequentv.comp(comp)[idx]

    def ancestors(self, occ):
        """Reflexive-transitive closure of the direct-ancestor relation."""
        seen = set()
        stack = [occ]
        while stack:
            o = stack.pop()
            if o in seen:
                continue
            seen.add(o)
            stack.extend(self.direct.get(o, ()))
        return seen

    def is_weak(self, occ):
        if occ not in self._weak:
            origins = [
                o for o in self.ancestors(occ) if not self.direct.get(o, ())
            ]
            self._weak[occ] = all(
                self.origin_rule.get(o) in ("lw", "rw") for o in origins
            )
        return self._weak[occ]

    def in_weakening_conclusion(self, occ):
        path, _, _ = occ
        return subproof_at(self.proof, path).rule in ("lw", "rw")

    def relevant_set(self, occ):
        return {
            o
            for o in self.ancestors(occ)
            if not self.is_weak(o) and not self.in_weakening_conclusion(o)
        }

    def weight(self, occ):
        return len(self.relevant_set(occ))

    def cut_occurrences(self, path):
        """The two consumed cut-formula occurrences of the cut at path."""
        node = subproof_at(self.proof, path)
        _need(node.rule == "cut", "not a cut")
        out = []
        for ci in (0, 1):
            _, consumed = node_links(node, ci)
            cc, cidx = consumed[0]
            out.append((path + (ci,), cc, cidx))
        return out

    def cut_weight(self, path):
        left, right = self.cut_occurrences(path)
        return self.weight(left) + self.weight(right)

    def cut_ancestor_occs(self):
        out = set()
        for path, _ in self.cuts:
            for occ in self.cut_occurrences(path):
                out |= self.ancestors(occ)
        return out

    def axiom_occs(self, path):
        node = subproof_at(self.proof, path)
        occs = [(path, c, i) for c, i, _ in node.sequentv.occurrences()]
        return occs


@dataclass(frozen=True)
class CutInfo:
    type_r: bool
    atomic: bool
    literal: bool
    monochromatic: bool
    analytic: bool
    degree: int
    weight: int


@dataclass(frozen=True)
class AxiomInfo:
    kind: str  # "L/L", "L/R", "R/L", "R/R"
    omega: bool


def propositional_degree(f: Formula) -> int:
    if isinstance(f, (Atom, Bottom)):
        return 0
    if isinstance(f, Box):
        return propositional_degree(f.body)
    if isinstance(f, Neg):
        return 1 + propositional_degree(f.body)
    return 1 + propositional_degree(f.left) + propositional_degree(f.right)


def classify_cut(p: Proof, path, analysis: Analysis = None) -> CutInfo:
    node = subproof_at(p, path)
    if node.rule != "cut":
        raise ProofError("classify_cut needs a cut node")
    analysis = analysis or Analysis(p)
    f = node.main_formula
    s = node.sequentv
    v = vars_of(f)
    closure = set()
    for _, _, g in s.occurrences():
        closure |= {h for h, _ in signed_subformulas(g)}
    return CutInfo(
        type_r=node.main_comp == "d2",
        atomic=is_atomic_cut_formula(f),
        literal=is_literal_cut_formula(f),
        monochromatic=v <= s.side_vars(1) or v <= s.side_vars(2),
        analytic=f in closure,
        degree=propositional_degree(f),
        weight=analysis.cut_weight(path),
    )


def axiom_type(p: Proof, path, analysis: Analysis = None) -> AxiomInfo:
    node = subproof_at(p, path)
    if node.rule != "ax":
        raise ProofError("axiom_type needs an ax node")
    ant = "L" if node.sequentv.g1 else "R"
    suc = "L" if node.sequentv.d1 else "R"
    analysis = analysis or Analysis(p)
    cut_anc = analysis.cut_ancestor_occs()
    occs = analysis.axiom_occs(path)
    omega = all(o in cut_anc for o in occs) and bool(analysis.cuts)
    return AxiomInfo(f"{ant}/{suc}", omega)


def occurrence_metrics(p: Proof, occ, analysis: Analysis = None):
    analysis = analysis or Analysis(p)
    return {
        "weak": analysis.is_weak(occ),
        "weight": analysis.weight(occ),
        "relevant_set": analysis.relevant_set(occ),
    }


def is_tame(p: Proof):
    """(ok, witness): no omega axioms, and every cut has an all-R/R flank.

    The witness names the offending axiom or cut path when not tame.
    """
    analysis = Analysis(p)
    cut_anc = analysis.cut_ancestor_occs()
    for path, _ in analysis.axioms:
        occs = analysis.axiom_occs(path)
        if occs and all(o in cut_anc for o in occs) and analysis.cuts:
            return False, ("omega-axiom", path)
    for path, node in analysis.cuts:
        ok_somewhere = False
        for side in (0, 1):
            occ = analysis.cut_occurrences(path)[side]
            anc = analysis.ancestors(occ)
            flank_ok = True
            for apath, anode in analysis.axioms:
                if apath[: len(path) + 1] != path + (side,):
                    continue
                if any(o in anc for o in analysis.axiom_occs(apath)):
                    info_ant = "L" if anode.sequentv.g1 else "R"
                    info_suc = "L" if anode.sequentv.d1 else "R"
                    if (info_ant, info_suc) != ("R", "R"):
                        flank_ok = False
                        break
            if flank_ok:
                ok_somewhere = True
                break
        if not ok_somewhere:
            return False, ("cut-without-rr-flank", path)
    return True, None


# ---------------------------------------------------------------------------
# Monochromatization
# ---------------------------------------------------------------------------

def _substitute_atom(f: Formula, old: str, new: Formula) -> Formula:
    if isinstance(f, Atom):
        return new if f.name == old else f
    if isinstance(f, Bottom):
        return f
    if isinstance(f, Neg):
        return Neg(_substitute_atom(f.body, old, new))
    if isinstance(f, Box):
        return Box(_substitute_atom(f.body, old, new))
    return type(f)(_substitute_atom(f.left, old, new), _substitute_atom(f.right, old, new))


def _substitute_proof(p: Proof, old: str, new: Formula) -> Proof:
    sub = lambda f: _substitute_atom(f, old, new)
    s = p.sequentv
    return Proof(
        p.rule,
        sequent(*(tuple(map(sub, s.comp(c))) for c in COMPONENTS)),
        tuple(_substitute_proof(c, old, new) for c in p.children),
        p.main_comp,
        sub(p.main_formula) if p.main_formula is not None else None,
    )


def _flip_cone(p: Proof, occ):
    """Move an end-sequent occurrence and its whole ancestor cone to the
    sibling partition component."""
    comp, idx = occ
    flip = {"g1": "g2", "g2": "g1", "d1": "d2", "d2": "d1"}
    target = flip[comp]
    f = p.sequentv.comp(comp)[idx]

    analysis = Analysis(p)
    cone = analysis.ancestors(((), comp, idx))
    by_path = {}
    for (path, c, i) in cone:
        by_path.setdefault(path, []).append((c, i))

    def rebuild(node, path):
        kids = tuple(rebuild(ch, path + (j,)) for j, ch in enumerate(node.children))
        moves = by_path.get(path, [])
        s = node.sequentv
        parts = {c: list(s.comp(c)) for c in COMPONENTS}
        main_comp = node.main_comp
        for c, i in sorted(moves, key=lambda m: -m[1]):
            g = parts[c][i]
            del parts[c][i]
            parts[flip[c]].append(g)
            if node.main_comp == c and node.main_formula == g:
                main_comp = flip[c]
        return Proof(
            node.rule,
            sequent(parts["g1"], parts["g2"], parts["d1"], parts["d2"]),
            kids,
            main_comp,
            node.main_formula,
        )

    return rebuild(p, ())


def _placement_consistent(node: Proof) -> bool:
    side = int(node.main_comp[1])
    return vars_of(node.main_formula) <= node.sequentv.side_vars(side)


def monochromatize(p: Proof, system: System) -> Proof:
    """Make every cut's placement side cover its variables, rewriting
    topmost offenders by atom replacement and side flips."""
    while True:
        offenders = [
            (path, node)
            for path, node in iter_nodes(p)
            if node.rule == "cut" and not _placement_consistent(node)
        ]
        if not offenders:
            return p
        path, node = max(offenders, key=lambda pn: len(pn[0]))
        f = node.main_formula
        atom_names = sorted(vars_of(f))
        if not atom_names:
            raise ProofError("a variable-free cut formula is always placement-consistent")
        name = atom_names[0]
        side = int(node.main_comp[1])
        s = node.sequentv
        own = sorted(n for n in s.side_vars(side))
        other = sorted(n for n in s.side_vars(3 - side))
        if name in s.all_vars():
            # semantically monochromatic but placed on the wrong side: flip
            sub = _flip_sides_of_cut(node)
            p = replace_at(p, path, sub)
            continue
        if own:
            replacement = Atom(own[0])
            p = replace_at(p, path, _substitute_proof(node, name, replacement))
        elif other:
            flipped = _flip_sides_of_cut(node)
            p = replace_at(p, path, _substitute_proof(flipped, name, Atom(other[0])))
        else:
            raise NoAtomAvailable(
                f"no atom in {format_sequent(s)} to replace {name} with"
            )


def _flip_sides_of_cut(node: Proof) -> Proof:
    side = node.main_comp[1]
    left, right = node.children
    left_occ = ("d" + side, _first_indices(left.sequentv.comp("d" + side), node.main_formula, 1)[0])
    right_occ = ("g" + side, _first_indices(right.sequentv.comp("g" + side), node.main_formula, 1)[0])
    new_left = _flip_cone(left, left_occ)
    new_right = _flip_cone(right, right_occ)
    new_side = 2 if side == "1" else 1
    return cut(new_left, new_right, node.main_formula, new_side)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def format_proof(p: Proof) -> str:
    def go(node):
        seq = format_sequent(node.sequentv)
        if node.main_formula is not None and node.rule != "cut":
            comp = node.main_comp
            idx = _first_indices(node.sequentv.comp(comp), node.main_formula, 1)[0]
            main = str(node.sequentv.flat_index(comp, idx))
        elif node.rule == "cut":
            main = node.main_comp  # placement component; formula is derivable
        else:
            main = "-"
        inner = " ".join([node.rule, f'"{seq}"', main] + [go(c) for c in node.children])
        return f"({inner})"

    return go(p)


def format_proof_text(p: Proof, indent=0) -> str:
    lines = [("  " * indent) + f"{p.rule}: {format_sequent(p.sequentv)}"]
    for c in p.children:
        lines.append(format_proof_text(c, indent + 1))
    return "\n".join(lines)


def _tokenize_sexpr(text):
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            out.append(ch)
            i += 1
        elif ch == '"':
            j = text.index('"', i + 1)
            out.append(('"', text[i + 1 : j]))
            i = j + 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            out.append(text[i:j])
            i = j
    return out


def parse_proof(text: str) -> Proof:
    toks = _tokenize_sexpr(text)
    pos = 0

    def parse_node():
        nonlocal pos
        if toks[pos] != "(":
            raise ProofError(f"expected '(' at token {pos}")
        pos += 1
        rule = toks[pos]
        pos += 1
        kind, seq_text = toks[pos]
        if kind != '"':
            raise ProofError("expected quoted sequent text")
        pos += 1
        seq = parse_sequent(seq_text)
        main_tok = toks[pos]
        pos += 1
        children = []
        while toks[pos] != ")":
            children.append(parse_node())
        pos += 1
        return _rebuild_node(rule, seq, main_tok, tuple(children))

    node = parse_node()
    if pos != len(toks):
        raise ProofError("trailing tokens after proof")
    return node


def _rebuild_node(rule, seq, main_tok, children):
    if rule == "cut":
        comp = main_tok
        if comp not in ("d1", "d2"):
            raise ProofError(f"bad cut placement {main_tok!r}")
        left = children[0].sequentv
        extra = list(left.comp(comp))
        for f in seq.comp(comp):
            extra.remove(f)
        if len(extra) != 1:
            raise ProofError("cut premise must add exactly one succedent formula")
        return Proof("cut", seq, children, comp, extra[0])
    if rule in ("ax", "bot", "d"):
        return Proof(rule, seq, children)
    if rule in ("k", "4"):
        dcomp = "d1" if seq.d1 else "d2"
        return Proof(rule, seq, children, dcomp, seq.comp(dcomp)[0])
    if main_tok == "-":
        raise ProofError(f"rule {rule} needs a main occurrence index")
    comp, idx = seq.from_flat(int(main_tok))
    return Proof(rule, seq, children, comp, seq.comp(comp)[idx])
