"""Cut-free backward proof search for the propositional and modal systems,
plus the constructions that realize a target interpolant in a proof."""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    And,
    Atom,
    BOTTOM,
    Box,
    Formula,
    Neg,
    Or,
    TOP,
    format_formula,
    formula_cnf,
    is_clause_set_interpolant,
    is_pruned_interpolant,
    literal_formula,
    make_model,
    mcnf,
    sorted_clauses,
    sorted_literals,
)
from .maehara import verify_interpolant
from .sequent import (
    COMPONENTS,
    LKAT,
    Proof,
    ProofError,
    Sequent,
    System,
    ax,
    bot_axiom,
    check_proof,
    cut,
    land1,
    land2,
    lc,
    lneg,
    lor,
    rand,
    rc,
    ror1,
    ror2,
    rneg,
    rule_4,
    rule_d,
    rule_k,
    rule_t,
    rw,
    sequent,
    wax,
    weaken_to,
)


class ConstructError(ProofError):
    pass


class NotProvable(ConstructError):
    def __init__(self, seq, countermodel=None):
        super().__init__(f"not provable: {seq!r}")
        self.sequent = seq
        self.countermodel = countermodel


class NotEntailed(ConstructError):
    pass


class NotAnInterpolant(ConstructError):
    pass


class NotPrunedInterpolant(ConstructError):
    pass


class SubproofMismatch(ConstructError):
    pass


# ---------------------------------------------------------------------------
# Backward search
# ---------------------------------------------------------------------------

def _closure_proof(s: Sequent):
    for gcomp in ("g1", "g2"):
        if BOTTOM in s.comp(gcomp):
            return weaken_to(bot_axiom(gcomp), s)
    for gcomp in ("g1", "g2"):
        for f in s.comp(gcomp):
            for dcomp in ("d1", "d2"):
                if f in s.comp(dcomp):
                    return weaken_to(ax(f, gcomp, dcomp), s)
    return None


def _first_composite(s: Sequent):
    for comp in COMPONENTS:
        for f in s.comp(comp):
            if isinstance(f, (And, Or, Neg)):
                return comp, f
    return None


@dataclass
class _FailNode:
    """Countermodel scaffolding: a saturated open sequent and the models of
    its failed modal jumps."""

    sequent: Sequent
    children: list


def _prop_countermodel(s: Sequent):
    a = {}
    for f in s.antecedent():
        if isinstance(f, Atom):
            a[f.name] = True
    for f in s.succedent():
        if isinstance(f, Atom):
            a.setdefault(f.name, False)
    return a


def _fail_tree_to_model(tree: _FailNode):
    worlds = []
    succ = {}
    val = {}

    def build(node):
        w = len(worlds)
        worlds.append(w)
        val[w] = _prop_countermodel(node.sequent)
        succ[w] = set()
        for child in node.children:
            succ[w].add(build(child))
        return w

    build(tree)
    return make_model(worlds, succ, val)


def _search(s: Sequent, system: System, unfolded, blocked):
    """Returns (proof, None) or (None, fail-tree)."""
    closed = _closure_proof(s)
    if closed is not None:
        return closed, None
    pick = _first_composite(s)
    if pick is not None:
        comp, f = pick
        ant = comp in ("g1", "g2")
        base = s.remove_one(comp, f)
        if ant and isinstance(f, And):
            sub, fail = _search(
                base.insert(comp, f.left).insert(comp, f.right), system, unfolded, blocked
            )
            if sub is None:
                return None, fail
            return lc(land1(land2(sub, f, comp), f, comp), f, comp), None
        if ant and isinstance(f, Or):
            left, fail = _search(base.insert(comp, f.left), system, unfolded, blocked)
            if left is None:
                return None, fail
            right, fail = _search(base.insert(comp, f.right), system, unfolded, blocked)
            if right is None:
                return None, fail
            return lor(left, right, f, comp), None
        if ant and isinstance(f, Neg):
            sub, fail = _search(
                base.insert("d" + comp[1], f.body), system, unfolded, blocked
            )
            if sub is None:
                return None, fail
            return lneg(sub, f, comp), None
        if not ant and isinstance(f, And):
            left, fail = _search(base.insert(comp, f.left), system, unfolded, blocked)
            if left is None:
                return None, fail
            right, fail = _search(base.insert(comp, f.right), system, unfolded, blocked)
            if right is None:
                return None, fail
            return rand(left, right, f, comp), None
        if not ant and isinstance(f, Or):
            sub, fail = _search(
                base.insert(comp, f.left).insert(comp, f.right), system, unfolded, blocked
            )
            if sub is None:
                return None, fail
            return rc(ror1(ror2(sub, f, comp), f, comp), f, comp), None
        if not ant and isinstance(f, Neg):
            sub, fail = _search(
                base.insert("g" + comp[1], f.body), system, unfolded, blocked
            )
            if sub is None:
                return None, fail
            return rneg(sub, f, comp), None
    # literals and boxes only
    if "t" in system.modal_rules:
        for comp in ("g1", "g2"):
            for f in s.comp(comp):
                if isinstance(f, Box) and (comp, f) not in unfolded:
                    sub, fail = _search(
                        s.insert(comp, f.body),
                        system,
                        unfolded | {(comp, f)},
                        blocked,
                    )
                    if sub is None:
                        return None, fail
                    return lc(rule_t(sub, f, comp), f, comp), None
    fails = []
    jump = "4" if "4" in system.modal_rules else ("k" if "k" in system.modal_rules else None)
    if jump is not None:
        boxed = {c: sorted(set(g for g in s.comp(c) if isinstance(g, Box)),
                           key=format_formula)
                 for c in ("g1", "g2")}
        for dcomp in ("d1", "d2"):
            for f in s.comp(dcomp):
                if not isinstance(f, Box):
                    continue
                if jump == "k":
                    premise = sequent(
                        [g.body for g in boxed["g1"]],
                        [g.body for g in boxed["g2"]],
                        [f.body] if dcomp == "d1" else [],
                        [f.body] if dcomp == "d2" else [],
                    )
                else:
                    premise = sequent(
                        [g.body for g in boxed["g1"]] + boxed["g1"],
                        [g.body for g in boxed["g2"]] + boxed["g2"],
                        [f.body] if dcomp == "d1" else [],
                        [f.body] if dcomp == "d2" else [],
                    )
                key = (premise, jump)
                if key in blocked:
                    continue
                sub, fail = _search(premise, system, frozenset(), blocked | {key})
                if sub is not None:
                    conclusion = weaken_to(
                        rule_k(sub) if jump == "k" else rule_4(sub), s
                    )
                    return conclusion, None
                if fail is not None:
                    fails.append(fail)
        if "d" in system.modal_rules:
            premise = sequent(
                [g.body for g in boxed["g1"]], [g.body for g in boxed["g2"]]
            )
            key = (premise, "d")
            if key not in blocked:
                sub, fail = _search(premise, system, frozenset(), blocked | {key})
                if sub is not None:
                    return weaken_to(rule_d(sub), s), None
                if fail is not None:
                    fails.append(fail)
    return None, _FailNode(s, fails)


def prove_cutfree(s: Sequent, system: System) -> Proof:
    """Backward root-first search; raises NotProvable with a countermodel for
    the propositional systems and for k."""
    proof, fail = _search(s, system, frozenset(), frozenset())
    if proof is not None:
        bad = check_proof(proof, system)
        assert bad is None, bad
        return proof
    countermodel = None
    if not system.modal:
        countermodel = _prop_countermodel(fail.sequent)
    elif system.modal_rules == frozenset({"k"}):
        countermodel = _fail_tree_to_model(fail)
    raise NotProvable(s, countermodel)


def try_prove_cutfree(s: Sequent, system: System):
    try:
        return prove_cutfree(s, system)
    except NotProvable:
        return None


# ---------------------------------------------------------------------------
# Realizing clauses (literal shifting)
# ---------------------------------------------------------------------------

def realize_clause(a: Formula, clause_, system: System = LKAT) -> Proof:
    """A proof of  a ; => ; l1, ..., lk  whose interpolant is the false
    constant disjoined with the clause's literals, via literal cuts."""
    lits = sorted_literals(clause_)
    fls = [literal_formula(l) for l in lits]
    try:
        cur = prove_cutfree(sequent([a], [], fls, []), system)
    except NotProvable as e:
        raise NotEntailed(f"{format_formula(a)} does not entail the clause") from e
    for j, lf in enumerate(fls):
        left = rw(cur, lf, "d2")
        ctx = left.sequentv.remove_one("d1", lf)
        right = wax(lf, ctx.insert("g1", lf), "g1", "d2")
        cur = cut(left, right, lf, 1)
    return cur


# ---------------------------------------------------------------------------
# Conjoining clause proofs (transversal cut cascade)
# ---------------------------------------------------------------------------

def conjoin(
    a: Formula,
    b: Formula,
    cs,
    pis,
    system: System = LKAT,
    cminus_cap: int = 4096,
) -> Proof:
    """Stitch per-clause proofs  a ; => ; Ci  into a proof of  a ; => ; b
    whose interpolant's clause set is the union of the pieces'.

    Every clause contributes cuts on its literals (right of the partition)
    against recursively built transversal premises; the transversal leaves
    ; l1, ..., ln => ; b  are closed by cut-free search.  Negative-literal
    cuts are converted to cuts on their bodies afterwards.
    """
    from .transform import literal_cuts_to_atomic

    clauses = sorted_clauses(cs)
    if len(pis) != len(clauses):
        raise SubproofMismatch("one subproof per clause is required")
    for clause_, pi in zip(clauses, pis):
        want = sequent([a], [], [], [literal_formula(l) for l in sorted_literals(clause_)])
        if pi.sequentv != want:
            raise SubproofMismatch(
                f"subproof proves {pi.sequentv!r} instead of {want!r}"
            )
    if not system.modal:
        if not is_clause_set_interpolant(cs, a, b):
            raise NotAnInterpolant("the clause set does not interpolate a -> b")
    else:
        from .formulas import clause_set_formula

        if not verify_interpolant(a, b, clause_set_formula(cs), system):
            raise NotAnInterpolant("the clause set does not interpolate a -> b")
    product = 1
    for clause_ in clauses:
        product *= max(1, len(clause_))
        if product > cminus_cap:
            raise ConstructError(
                f"transversal product exceeds the cap ({cminus_cap}); "
                "raise it explicitly for larger clause sets"
            )

    empty = [i for i, c in enumerate(clauses) if not c]
    if empty:
        # an empty clause forces a itself to be unsatisfiable; its subproof
        # already proves a ; => ;  and the remaining clauses are redundant
        return weaken_to(pis[empty[0]], sequent([a], [], [], [b]))

    leaves = {}

    def leaf(selection) -> Proof:
        if selection not in leaves:
            fls = sorted(
                {literal_formula(l) for l in selection}, key=format_formula
            )
            leaves[selection] = prove_cutfree(
                sequent([], fls, [], [b]), system
            )
        return leaves[selection]

    memo = {}

    def derive(i: int, selection) -> Proof:
        """Proof of  a ; T => ; b  for the selected literals T."""
        key = (i, selection)
        if key in memo:
            return memo[key]
        t_formulas = sorted(
            {literal_formula(l) for l in selection}, key=format_formula
        )
        if i == len(clauses):
            out = weaken_to(leaf(selection), sequent([a], t_formulas, [], [b]))
        else:
            lits = sorted_literals(clauses[i])
            pending = [literal_formula(l) for l in lits]
            cur = weaken_to(
                pis[i], sequent([a], t_formulas, [], pending + [b])
            )
            for j, lit in enumerate(lits):
                lf = pending[j]
                prem = derive(i + 1, selection | {lit})
                ctx = cur.sequentv.remove_one("d2", lf)
                right = weaken_to(prem, ctx.insert("g2", lf))
                cur = cut(cur, right, lf, 2)
            out = cur
        memo[key] = out
        return out

    psi = derive(0, frozenset())
    psi = weaken_to(psi, sequent([a], [], [], [b]))
    return literal_cuts_to_atomic(psi)


# ---------------------------------------------------------------------------
# Completeness constructions
# ---------------------------------------------------------------------------

def realize_interpolant(a: Formula, b: Formula, c: Formula, system: System = LKAT,
                        cminus_cap: int = 4096) -> Proof:
    """A checked proof of  a ; => ; b  whose extracted interpolant is
    equivalent to c: clause realization followed by the conjunction step."""
    if not verify_interpolant(a, b, c, system):
        raise NotAnInterpolant(f"{format_formula(c)} does not interpolate")
    cs = mcnf(c) if system.modal else formula_cnf(c)
    pis = [realize_clause(a, clause_, system) for clause_ in sorted_clauses(cs)]
    return conjoin(a, b, cs, pis, system, cminus_cap)


def realize_pruned(a: Formula, b: Formula, cs) -> Proof:
    """A tame proof with right-side cuts whose interpolant's clause set is
    exactly the given pruned interpolant; clause proofs are cut-free."""
    if not is_pruned_interpolant(cs, a, b):
        raise NotPrunedInterpolant("need a pruned interpolant of a -> b")
    pis = []
    for clause_ in sorted_clauses(cs):
        fls = [literal_formula(l) for l in sorted_literals(clause_)]
        pis.append(prove_cutfree(sequent([a], [], [], fls), LKAT))
    return conjoin(a, b, cs, pis, LKAT)


def pruned_subsumption_pipeline(a: Formula, b: Formula, cs):
    """Cut-free realization up to subsumption: realize the pruned
    interpolant, then eliminate cuts.  Returns (proof, trace)."""
    from .transform import eliminate_cuts

    realized = realize_pruned(a, b, cs)
    result = eliminate_cuts(realized)
    return result.proof, result.trace


# ---------------------------------------------------------------------------
# Exhaustive cut-free interpolant enumeration
# ---------------------------------------------------------------------------

def enumerate_cutfree_interpolants(s: Sequent, system: System, max_depth: int):
    """All interpolant ASTs of cut-free proofs of s up to the given depth."""
    memo = {}

    def leaf_interpolants(seq: Sequent):
        out = set()
        ants, sucs = seq.antecedent(), seq.succedent()
        if len(ants) == 1 and len(sucs) == 1 and ants[0] == sucs[0]:
            ant = "L" if seq.g1 else "R"
            suc = "L" if seq.d1 else "R"
            out.add(
                {
                    ("L", "L"): BOTTOM,
                    ("R", "R"): TOP,
                    ("L", "R"): ants[0],
                    ("R", "L"): Neg(ants[0]),
                }[(ant, suc)]
            )
        if not sucs and ants == (BOTTOM,):
            out.add(BOTTOM if seq.g1 else TOP)
        return out

    def mset(seq: Sequent, depth: int):
        key = (seq, depth)
        if key in memo:
            return memo[key]
        out = set(leaf_interpolants(seq))
        if depth > 0:
            for comp in COMPONENTS:
                ant = comp in ("g1", "g2")
                for f in set(seq.comp(comp)):
                    base = seq.remove_one(comp, f)
                    out |= mset(base, depth - 1)  # weakening backward
                    out |= mset(seq.insert(comp, f), depth - 1)  # contraction
                    if ant and isinstance(f, And):
                        out |= mset(base.insert(comp, f.left), depth - 1)
                        out |= mset(base.insert(comp, f.right), depth - 1)
                    elif ant and isinstance(f, Or):
                        ls = mset(base.insert(comp, f.left), depth - 1)
                        rs = mset(base.insert(comp, f.right), depth - 1)
                        op = Or if comp == "g1" else And
                        out |= {op(x, y) for x in ls for y in rs}
                    elif ant and isinstance(f, Neg):
                        out |= mset(base.insert("d" + comp[1], f.body), depth - 1)
                    elif ant and isinstance(f, Box) and "t" in system.modal_rules:
                        out |= mset(seq.insert(comp, f.body), depth - 1)
                    elif not ant and isinstance(f, And):
                        ls = mset(base.insert(comp, f.left), depth - 1)
                        rs = mset(base.insert(comp, f.right), depth - 1)
                        op = Or if comp == "d1" else And
                        out |= {op(x, y) for x in ls for y in rs}
                    elif not ant and isinstance(f, Or):
                        out |= mset(base.insert(comp, f.left), depth - 1)
                        out |= mset(base.insert(comp, f.right), depth - 1)
                    elif not ant and isinstance(f, Neg):
                        out |= mset(base.insert("g" + comp[1], f.body), depth - 1)
            out |= _modal_backward(seq, system, depth, mset)
        memo[key] = frozenset(out)
        return memo[key]

    return mset(s, max_depth)


def _modal_backward(seq: Sequent, system: System, depth: int, mset):
    out = set()
    boxes_only = all(isinstance(f, Box) for f in seq.antecedent())
    sucs = seq.succedent()
    if not boxes_only:
        return out
    single = len(sucs) == 1 and isinstance(sucs[0], Box)
    dcomp = "d1" if seq.d1 else "d2"

    def wrap(x):
        return Box(x) if dcomp == "d2" else Neg(Box(Neg(x)))

    if single and "k" in system.modal_rules:
        premise = sequent(
            [f.body for f in seq.g1],
            [f.body for f in seq.g2],
            [sucs[0].body] if dcomp == "d1" else [],
            [sucs[0].body] if dcomp == "d2" else [],
        )
        out |= {wrap(x) for x in mset(premise, depth - 1)}
    if single and "4" in system.modal_rules:
        premise = sequent(
            [f.body for f in seq.g1] + list(seq.g1),
            [f.body for f in seq.g2] + list(seq.g2),
            [sucs[0].body] if dcomp == "d1" else [],
            [sucs[0].body] if dcomp == "d2" else [],
        )
        out |= {wrap(x) for x in mset(premise, depth - 1)}
    if not sucs and "d" in system.modal_rules:
        premise = sequent([f.body for f in seq.g1], [f.body for f in seq.g2])
        out |= {Box(x) for x in mset(premise, depth - 1)}
    return out
