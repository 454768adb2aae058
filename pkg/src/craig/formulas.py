"""Propositional/modal formula ASTs, parsing, semantics, and clause-set algebra.

The connective set is {false, atoms, ~, &, |, []}.  `true` and `->` exist
only as parser sugar: `A -> B` expands to `~A | B` and `true` parses to the
canonical top formula `~false`.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    """Malformed input text; carries 1-based line and column."""

    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class IncompleteAssignment(FormulaError):
    pass


class ModalNotSupported(FormulaError):
    pass


class NotValidImplication(FormulaError):
    pass


class TooManySharedVars(FormulaError):
    pass


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------

ATOM_NAME = re.compile(r"[a-z][a-zA-Z0-9_]*\Z")


@dataclass(frozen=True)
class Formula:
    __slots__ = ()

    def __repr__(self):
        return f"<{format_formula(self)}>"


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    __slots__ = ()


@dataclass(frozen=True, repr=False)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not ATOM_NAME.match(self.name):
            raise FormulaError(f"bad atom name: {self.name!r}")


@dataclass(frozen=True, repr=False)
class Neg(Formula):
    body: Formula


@dataclass(frozen=True, repr=False)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, repr=False)
class Box(Formula):
    body: Formula


BOTTOM = Bottom()
TOP = Neg(BOTTOM)


def impl(a, b):
    """A -> B as sugar: ~A | B."""
    return Or(Neg(a), b)


@lru_cache(maxsize=None)
def vars_of(f: Formula) -> frozenset:
    if isinstance(f, Bottom):
        return frozenset()
    if isinstance(f, Atom):
        return frozenset([f.name])
    if isinstance(f, (Neg, Box)):
        return vars_of(f.body)
    return vars_of(f.left) | vars_of(f.right)


@lru_cache(maxsize=None)
def formula_length(f: Formula) -> int:
    """Symbol count: atoms and false weigh 1, each connective adds 1."""
    if isinstance(f, (Bottom, Atom)):
        return 1
    if isinstance(f, (Neg, Box)):
        return 1 + formula_length(f.body)
    return 1 + formula_length(f.left) + formula_length(f.right)


def is_modal(f: Formula) -> bool:
    if isinstance(f, Box):
        return True
    if isinstance(f, (Neg, Box)):
        return is_modal(f.body)
    if isinstance(f, (And, Or)):
        return is_modal(f.left) or is_modal(f.right)
    return False


def signed_subformulas(f: Formula, positive=True):
    """All (subformula, polarity) pairs occurring in f, f itself positive."""
    out = {(f, positive)}
    if isinstance(f, (And, Or)):
        out |= signed_subformulas(f.left, positive)
        out |= signed_subformulas(f.right, positive)
    elif isinstance(f, Neg):
        out |= signed_subformulas(f.body, not positive)
    elif isinstance(f, Box):
        out |= signed_subformulas(f.body, positive)
    return out


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PREC_OR = 1
_PREC_AND = 2
_PREC_UNARY = 3


def _fmt(f, parent_prec, spaced):
    amp = " & " if spaced else "&"
    bar = " | " if spaced else "|"
    if f == TOP:
        return "true"
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Neg):
        return "~" + _fmt(f.body, _PREC_UNARY, spaced)
    if isinstance(f, Box):
        return "[]" + _fmt(f.body, _PREC_UNARY, spaced)
    if isinstance(f, And):
        text = _fmt(f.left, _PREC_AND, spaced) + amp + _fmt(f.right, _PREC_AND + 1, spaced)
        return "(" + text + ")" if parent_prec > _PREC_AND else text
    if isinstance(f, Or):
        text = _fmt(f.left, _PREC_OR, spaced) + bar + _fmt(f.right, _PREC_OR + 1, spaced)
        return "(" + text + ")" if parent_prec > _PREC_OR else text
    raise FormulaError(f"not a formula: {f!r}")


@lru_cache(maxsize=None)
def format_formula(f: Formula) -> str:
    return _fmt(f, 0, True)


@lru_cache(maxsize=None)
def format_formula_compact(f: Formula) -> str:
    return _fmt(f, 0, False)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"->|\[\]|[~&|()]|[a-z][a-zA-Z0-9_]*|\S")


class _Tokens:
    def __init__(self, text):
        self.items = []  # (kind, value, line, col)
        line = 1
        line_start = 0
        pos = 0
        while pos < len(text):
            ch = text[pos]
            if ch == "\n":
                line += 1
                line_start = pos + 1
                pos += 1
                continue
            if ch.isspace():
                pos += 1
                continue
            m = _TOKEN_RE.match(text, pos)
            col = pos - line_start + 1
            if not m:
                raise ParseError(f"bad character {ch!r}", line, col)
            tok = m.group()
            if tok in ("->", "[]", "~", "&", "|", "(", ")"):
                self.items.append((tok, tok, line, col))
            elif tok in ("true", "false"):
                self.items.append((tok, tok, line, col))
            elif ATOM_NAME.match(tok):
                self.items.append(("atom", tok, line, col))
            else:
                raise ParseError(f"unexpected token {tok!r}", line, col)
            pos = m.end()
        self.items.append(("eof", "", line, len(text) - line_start + 1))
        self.idx = 0

    def peek(self):
        return self.items[self.idx]

    def next(self):
        item = self.items[self.idx]
        self.idx += 1
        return item

    def expect(self, kind):
        item = self.next()
        if item[0] != kind:
            raise ParseError(f"expected {kind!r}, found {item[1]!r}", item[2], item[3])
        return item


def _parse_impl(toks):
    left = _parse_or(toks)
    if toks.peek()[0] == "->":
        toks.next()
        right = _parse_impl(toks)
        return impl(left, right)
    return left


def _parse_or(toks):
    f = _parse_and(toks)
    while toks.peek()[0] == "|":
        toks.next()
        f = Or(f, _parse_and(toks))
    return f


def _parse_and(toks):
    f = _parse_unary(toks)
    while toks.peek()[0] == "&":
        toks.next()
        f = And(f, _parse_unary(toks))
    return f


def _parse_unary(toks):
    kind, value, line, col = toks.next()
    if kind == "~":
        return Neg(_parse_unary(toks))
    if kind == "[]":
        return Box(_parse_unary(toks))
    if kind == "atom":
        return Atom(value)
    if kind == "false":
        return BOTTOM
    if kind == "true":
        return TOP
    if kind == "(":
        f = _parse_impl(toks)
        toks.expect(")")
        return f
    raise ParseError(f"unexpected token {value!r}", line, col)


def parse_formula(text: str) -> Formula:
    toks = _Tokens(text)
    f = _parse_impl(toks)
    kind, value, line, col = toks.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {value!r}", line, col)
    return f


# ---------------------------------------------------------------------------
# Semantics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KripkeModel:
    """Finite Kripke model: worlds, successor map, per-world valuation."""

    worlds: tuple
    successors: tuple  # tuple of (world, frozenset of worlds)
    valuation: tuple   # tuple of (world, tuple of (atom, bool))

    def succ(self, w):
        for world, out in self.successors:
            if world == w:
                return out
        return frozenset()

    def value(self, w, name):
        for world, pairs in self.valuation:
            if world == w:
                for atom, b in pairs:
                    if atom == name:
                        return b
                return False
        return False


def make_model(worlds, successors, valuation) -> KripkeModel:
    return KripkeModel(
        tuple(worlds),
        tuple((w, frozenset(successors.get(w, ()))) for w in worlds),
        tuple((w, tuple(sorted(valuation.get(w, {}).items()))) for w in worlds),
    )


def eval_formula(f: Formula, assignment=None, model: KripkeModel = None, world=None) -> bool:
    if model is not None:
        return _eval_kripke(f, model, world)
    if is_modal(f):
        raise ModalNotSupported("modal formula needs a Kripke model")
    return _eval_classical(f, assignment or {})


def _eval_classical(f, a):
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Atom):
        if f.name not in a:
            raise IncompleteAssignment(f"no value for atom {f.name}")
        return a[f.name]
    if isinstance(f, Neg):
        return not _eval_classical(f.body, a)
    if isinstance(f, And):
        return _eval_classical(f.left, a) and _eval_classical(f.right, a)
    if isinstance(f, Or):
        return _eval_classical(f.left, a) or _eval_classical(f.right, a)
    raise FormulaError(f"cannot evaluate {f!r}")


def _eval_kripke(f, model, w):
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Atom):
        return model.value(w, f.name)
    if isinstance(f, Neg):
        return not _eval_kripke(f.body, model, w)
    if isinstance(f, And):
        return _eval_kripke(f.left, model, w) and _eval_kripke(f.right, model, w)
    if isinstance(f, Or):
        return _eval_kripke(f.left, model, w) or _eval_kripke(f.right, model, w)
    if isinstance(f, Box):
        return all(_eval_kripke(f.body, model, v) for v in model.succ(w))
    raise FormulaError(f"cannot evaluate {f!r}")


def assignments_over(names):
    names = sorted(names)
    for bits in itertools.product([False, True], repeat=len(names)):
        yield dict(zip(names, bits))


def is_valid(f: Formula) -> bool:
    if is_modal(f):
        raise ModalNotSupported("use the modal prover for modal validity")
    return all(_eval_classical(f, a) for a in assignments_over(vars_of(f)))


def entails(a: Formula, b: Formula) -> bool:
    if is_modal(a) or is_modal(b):
        raise ModalNotSupported("use the modal prover for modal entailment")
    names = vars_of(a) | vars_of(b)
    return all(
        _eval_classical(b, v) for v in assignments_over(names) if _eval_classical(a, v)
    )


def equiv(f: Formula, g: Formula) -> bool:
    if is_modal(f) or is_modal(g):
        raise ModalNotSupported("use the modal prover for modal equivalence")
    names = vars_of(f) | vars_of(g)
    return all(
        _eval_classical(f, v) == _eval_classical(g, v) for v in assignments_over(names)
    )


def sel(c: Formula, x: Formula, y: Formula) -> Formula:
    """Ternary selector (c | x) & (~c | y), kept unexpanded in the AST."""
    return And(Or(c, x), Or(Neg(c), y))


# ---------------------------------------------------------------------------
# Literals, clauses, clause sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    negated: bool
    body: Formula

    def __post_init__(self):
        if not isinstance(self.body, (Atom, Bottom, Box)):
            raise FormulaError(f"literal body must be an atom, false, or boxed: {self.body!r}")

    def dual(self) -> "Literal":
        return Literal(not self.negated, self.body)

    @property
    def is_modal(self):
        return isinstance(self.body, Box)

    def __repr__(self):
        return f"<lit {format_literal(self)}>"


def pos(body) -> Literal:
    if isinstance(body, str):
        body = Atom(body)
    return Literal(False, body)


def neg(body) -> Literal:
    if isinstance(body, str):
        body = Atom(body)
    return Literal(True, body)


TOP_LITERAL = Literal(True, BOTTOM)  # the literal reading of ~false


def literal_formula(lit: Literal) -> Formula:
    return Neg(lit.body) if lit.negated else lit.body


def literal_of_formula(f: Formula) -> Literal:
    """Inverse of literal_formula; raises if f is not a literal."""
    if isinstance(f, Neg) and isinstance(f.body, (Atom, Bottom, Box)):
        return Literal(True, f.body)
    if isinstance(f, (Atom, Bottom, Box)):
        return Literal(False, f)
    raise FormulaError(f"not a literal: {f!r}")


def is_literal_formula(f: Formula) -> bool:
    try:
        literal_of_formula(f)
        return True
    except FormulaError:
        return False


def format_literal(lit: Literal) -> str:
    body = format_formula_compact(lit.body)
    if isinstance(lit.body, Box):
        body = "[](" + format_formula_compact(lit.body.body) + ")"
    if isinstance(lit.body, Bottom):
        return "true" if lit.negated else "false"
    return ("~" if lit.negated else "") + body


def literal_key(lit: Literal):
    return (lit.negated, format_literal(lit).lstrip("~"))


def clause(*lits) -> frozenset:
    out = []
    for l in lits:
        if isinstance(l, str):
            l = parse_literal(l)
        out.append(l)
    return frozenset(out)


def sorted_literals(c) -> list:
    return sorted(c, key=literal_key)


def clause_key(c):
    return tuple(literal_key(l) for l in sorted_literals(c))


def sorted_clauses(cs) -> list:
    return sorted(cs, key=clause_key)


def clause_set(*clauses_) -> frozenset:
    return frozenset(clauses_)


def cross(cs1, cs2) -> frozenset:
    """Clause-set product: pairwise unions."""
    return frozenset(c | d for c in cs1 for d in cs2)


def clause_formula(c) -> Formula:
    lits = sorted_literals(c)
    if not lits:
        return BOTTOM
    f = literal_formula(lits[-1])
    for l in reversed(lits[:-1]):
        f = Or(literal_formula(l), f)
    return f


def clause_set_formula(cs) -> Formula:
    """Right-associated conjunction of right-associated disjunctions."""
    clauses_ = sorted_clauses(cs)
    if not clauses_:
        return TOP
    f = clause_formula(clauses_[-1])
    for c in reversed(clauses_[:-1]):
        f = And(clause_formula(c), f)
    return f


def parse_literal(text: str) -> Literal:
    text = text.strip()
    negated = False
    if text.startswith("~"):
        negated = True
        text = text[1:]
    if text == "false":
        return Literal(negated, BOTTOM)
    if text == "true":
        return Literal(not negated, BOTTOM)
    f = parse_formula(text)
    lit = literal_of_formula(f)
    if lit.negated:
        raise FormulaError(f"doubly negated literal text: {text!r}")
    return Literal(negated, lit.body)


def _split_clause_line(line):
    # split on whitespace outside parentheses so boxed bodies stay intact
    parts = []
    depth = 0
    cur = []
    for ch in line:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch.isspace() and depth == 0:
            if cur:
                parts.append("".join(cur))
                cur = []
        else:
            cur.append(ch)
    if cur:
        parts.append("".join(cur))
    return parts


def parse_clause_set(text: str) -> frozenset:
    if text == "":
        return frozenset()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines = lines[:-1]
    out = []
    for line in lines:
        out.append(frozenset(parse_literal(tok) for tok in _split_clause_line(line)))
    return frozenset(out)


def format_clause(c) -> str:
    return " ".join(format_literal(l) for l in sorted_literals(c))


def format_clause_set(cs) -> str:
    return "".join(format_clause(c) + "\n" for c in sorted_clauses(cs))


# ---------------------------------------------------------------------------
# NNF and CNF
# ---------------------------------------------------------------------------

def nnf(f: Formula) -> Formula:
    """Push negations to atoms; boxed subformulas are kept opaque."""
    if isinstance(f, (Atom, Bottom, Box)):
        return f
    if isinstance(f, And):
        return And(nnf(f.left), nnf(f.right))
    if isinstance(f, Or):
        return Or(nnf(f.left), nnf(f.right))
    body = f.body
    if isinstance(body, (Atom, Bottom, Box)):
        return f
    if isinstance(body, Neg):
        return nnf(body.body)
    if isinstance(body, And):
        return Or(nnf(Neg(body.left)), nnf(Neg(body.right)))
    if isinstance(body, Or):
        return And(nnf(Neg(body.left)), nnf(Neg(body.right)))
    raise FormulaError(f"cannot normalize {f!r}")


def cnf(f: Formula) -> frozenset:
    """Distributive clause-set normal form of an NNF formula."""
    if f == TOP:
        return frozenset()
    if isinstance(f, Bottom):
        return frozenset([frozenset()])
    if isinstance(f, And):
        return cnf(f.left) | cnf(f.right)
    if isinstance(f, Or):
        return cross(cnf(f.left), cnf(f.right))
    return frozenset([frozenset([literal_of_formula(f)])])


def formula_cnf(f: Formula) -> frozenset:
    return cnf(nnf(f))


# ---------------------------------------------------------------------------
# Subsumption and pruning
# ---------------------------------------------------------------------------

def subsumes(a, b) -> bool:
    """a subsumes b: every clause of b contains some clause of a."""
    return all(any(c <= d for c in a) for d in b)


def is_pruned_clause_set(cs) -> bool:
    polarity = {}
    for c in cs:
        for lit in c:
            if lit == TOP_LITERAL:
                return False
            seen = polarity.setdefault(lit.body, set())
            seen.add(lit.negated)
            if len(seen) == 2:
                return False
    return True


def prune(cs) -> frozenset:
    """Resolve away every atom occurring in both polarities.

    Deletes clauses containing the literal `true` first, drops tautological
    clauses, then eliminates each mixed-polarity atom in canonical order by
    replacing its clauses with all resolvents.
    """
    cs = frozenset(c for c in cs if TOP_LITERAL not in c)
    mixed = set()
    polarity = {}
    for c in cs:
        for lit in c:
            if isinstance(lit.body, Bottom):
                continue
            seen = polarity.setdefault(lit.body, set())
            seen.add(lit.negated)
            if len(seen) == 2:
                mixed.add(lit.body)
    for body in sorted(mixed, key=format_formula_compact):
        plus = Literal(False, body)
        minus = Literal(True, body)
        cs = frozenset(c for c in cs if not (plus in c and minus in c))
        keep = [c for c in cs if plus not in c and minus not in c]
        with_plus = [c for c in cs if plus in c]
        with_minus = [c for c in cs if minus in c]
        resolvents = [
            (c1 - {plus}) | (c2 - {minus}) for c1 in with_plus for c2 in with_minus
        ]
        cs = frozenset(keep) | frozenset(resolvents)
    return cs


def clause_set_vars(cs) -> frozenset:
    out = set()
    for c in cs:
        for lit in c:
            out |= vars_of(lit.body)
    return frozenset(out)


def is_clause_set_interpolant(cs, a: Formula, b: Formula) -> bool:
    f = clause_set_formula(cs)
    return (
        clause_set_vars(cs) <= (vars_of(a) & vars_of(b))
        and entails(a, f)
        and entails(f, b)
    )


def is_pruned_interpolant(cs, a: Formula, b: Formula) -> bool:
    """Pruned clause set, interpolant, and no clause has an a-entailed proper subclause."""
    if not is_pruned_clause_set(cs):
        return False
    if not is_clause_set_interpolant(cs, a, b):
        return False
    for c in cs:
        lits = list(c)
        for r in range(len(lits)):
            for sub in itertools.combinations(lits, r):
                if entails(a, clause_formula(frozenset(sub))):
                    return False
    return True


# ---------------------------------------------------------------------------
# Semantic interpolant oracle
# ---------------------------------------------------------------------------

def _projected_rows(f, shared):
    """Truth-table rows over the shared atoms reachable by some model of f."""
    rows = set()
    extra = sorted(vars_of(f) - set(shared))
    for row in assignments_over(shared):
        for ext in assignments_over(extra):
            v = dict(row)
            v.update(ext)
            if _eval_classical(f, v):
                rows.add(tuple(row[x] for x in shared))
                break
    return rows


def _forcing_rows(b, shared):
    """Rows over the shared atoms under which b holds for every extension."""
    rows = set()
    extra = sorted(vars_of(b) - set(shared))
    for row in assignments_over(shared):
        ok = True
        for ext in assignments_over(extra):
            v = dict(row)
            v.update(ext)
            if not _eval_classical(b, v):
                ok = False
                break
        if ok:
            rows.add(tuple(row[x] for x in shared))
    return rows


def _prime_implicate_cnf(true_rows, shared):
    """Canonical CNF of a boolean function given by its true rows: all minimal implied clauses."""
    all_rows = list(itertools.product([False, True], repeat=len(shared)))

    def clause_holds(c, row):
        for lit in c:
            value = row[shared.index(lit.body.name)]
            if value != lit.negated:
                return True
        return False

    implied = []
    for signs in itertools.product([None, False, True], repeat=len(shared)):
        c = frozenset(
            Literal(not sign, Atom(shared[i]))
            for i, sign in enumerate(signs)
            if sign is not None
        )
        if all(clause_holds(c, row) for row in all_rows if row in true_rows):
            implied.append(c)
    minimal = [c for c in implied if not any(d < c for d in implied)]
    return frozenset(minimal)


def enumerate_interpolants(a: Formula, b: Formula, max_shared=4):
    """One canonical representative per equivalence class of interpolants of a -> b.

    Brute force over all boolean functions on the shared atoms; each class is
    rendered as the formula of its prime-implicate clause set.
    """
    if is_modal(a) or is_modal(b):
        raise ModalNotSupported("interpolant enumeration is propositional")
    shared = sorted(vars_of(a) & vars_of(b))
    if len(shared) > max_shared:
        raise TooManySharedVars(f"{len(shared)} shared atoms exceeds cap {max_shared}")
    lower = _projected_rows(a, shared)
    upper = _forcing_rows(b, shared)
    if not lower <= upper:
        raise NotValidImplication("the implication is not valid")
    free = sorted(upper - lower)
    out = []
    for picks in itertools.product([False, True], repeat=len(free)):
        rows = set(lower) | {r for r, take in zip(free, picks) if take}
        out.append((rows, clause_set_formula(_prime_implicate_cnf(rows, shared))))
    order = list(itertools.product([False, True], repeat=len(shared)))
    out.sort(key=lambda rf: tuple(r in rf[0] for r in order))
    return [f for _, f in out]


# ---------------------------------------------------------------------------
# Modal CNF
# ---------------------------------------------------------------------------

def outer_boxes(f: Formula):
    """Boxed subformulas not nested inside another box, in first-seen order."""
    out = []

    def walk(g):
        if isinstance(g, Box):
            if g not in out:
                out.append(g)
        elif isinstance(g, Neg):
            walk(g.body)
        elif isinstance(g, (And, Or)):
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


def mcnf(f: Formula) -> frozenset:
    """Clause set of modal literals: abstract outer boxes, take CNF, substitute back."""
    boxes = outer_boxes(f)
    taken = vars_of(f)
    names = {}
    i = 0
    for box in boxes:
        while f"b{i}" in taken:
            i += 1
        names[box] = f"b{i}"
        i += 1

    def abstract(g):
        if isinstance(g, Box):
            return Atom(names[g])
        if isinstance(g, Neg):
            return Neg(abstract(g.body))
        if isinstance(g, And):
            return And(abstract(g.left), abstract(g.right))
        if isinstance(g, Or):
            return Or(abstract(g.left), abstract(g.right))
        return g

    back = {name: box for box, name in names.items()}
    cs = formula_cnf(abstract(f))
    result = []
    for c in cs:
        lits = []
        for lit in c:
            if isinstance(lit.body, Atom) and lit.body.name in back:
                lits.append(Literal(lit.negated, back[lit.body.name]))
            else:
                lits.append(lit)
        result.append(frozenset(lits))
    return frozenset(result)
