"""Interpolant-aware proof transformations: negation inversion, conversion of
literal cuts to positive cuts, weakening normalization, and cut elimination
on tame proofs with right-side cuts, with a subsumption trace."""

from __future__ import annotations

from dataclasses import dataclass

from .formulas import (
    And,
    Atom,
    Bottom,
    Box,
    Formula,
    Neg,
    Or,
    TOP,
    formula_cnf,
    subsumes,
)
from .maehara import maehara
from .sequent import (
    Analysis,
    LK,
    Proof,
    ProofError,
    Sequent,
    ax,
    check_proof,
    classify_cut,
    cut,
    first_index,
    is_tame,
    iter_nodes,
    lc,
    lneg,
    lw,
    node_links,
    rc,
    rebuild,
    replace_at,
    rneg,
    rw,
    subproof_at,
    wax,
    weaken_to,
)


class TransformError(ProofError):
    pass


class TargetNotNegation(TransformError):
    pass


class NotTame(TransformError):
    pass


class NotTypeR(TransformError):
    pass


_DUAL_COMP = {"d1": "g1", "d2": "g2", "g1": "d1", "g2": "d2"}


# ---------------------------------------------------------------------------
# Negation inversion
# ---------------------------------------------------------------------------

def neg_invert(p: Proof, comp: str, idx: int) -> Proof:
    """Move an end-sequent occurrence of ~A to A in the dual component,
    preserving the interpolant as an AST and at most doubling the length."""
    f = p.sequentv.comp(comp)[idx]
    if not isinstance(f, Neg):
        raise TargetNotNegation(f"occurrence at {comp}:{idx} is {f!r}")
    return _invert(p, (comp, idx))


def _axiom_inversion(node: Proof, comp: str) -> Proof:
    """Axiom case: rebuild a two-node proof with the same interpolant."""
    nf = node.sequentv.comp(comp)[0]
    a = nf.body
    ant = "g1" if node.sequentv.g1 else "g2"
    suc = "d1" if node.sequentv.d1 else "d2"
    dual = _DUAL_COMP[comp]
    if comp in ("d1", "d2"):
        # the other occurrence sits in the antecedent
        if (ant, comp) == ("g1", "d2"):
            return lneg(ax(a, "g2", "d1"), nf, "g1")
        if (ant, comp) == ("g2", "d2"):
            return lneg(ax(a, "g2", "d2"), nf, "g2")
        if (ant, comp) == ("g1", "d1"):
            return lneg(ax(a, "g1", "d1"), nf, "g1")
        raise TransformError(
            "inverting an axiom placed right/left needs a non-normal interpolant"
        )
    # target in the antecedent; the other occurrence sits in the succedent
    if (comp, suc) == ("g2", "d2"):
        return rneg(ax(a, "g2", "d2"), nf, "d2")
    if (comp, suc) == ("g1", "d1"):
        return rneg(ax(a, "g1", "d1"), nf, "d1")
    if (comp, suc) == ("g1", "d2"):
        return rneg(ax(a, "g2", "d1"), nf, "d2")
    raise TransformError(
        "inverting an axiom placed right/left needs a non-normal interpolant"
    )


def _invert(node: Proof, occ) -> Proof:
    comp, idx = occ
    nf = node.sequentv.comp(comp)[idx]
    a = nf.body
    dual = _DUAL_COMP[comp]
    rule = node.rule
    if rule == "ax":
        return _axiom_inversion(node, comp)
    if rule == "bot":
        raise TransformError("a negation cannot occur in a false-axiom")
    is_main = (
        node.main_comp == comp
        and node.main_formula == nf
        and idx == first_index(node.sequentv, comp, nf)
    )
    if is_main:
        if rule == "rneg" and comp in ("d1", "d2"):
            return node.children[0]
        if rule == "lneg" and comp in ("g1", "g2"):
            return node.children[0]
        if rule in ("lw", "rw"):
            child = node.children[0]
            return (
                lw(child, a, dual) if dual in ("g1", "g2") else rw(child, a, dual)
            )
        if rule in ("lc", "rc"):
            child = node.children[0]
            i1 = first_index(child.sequentv, comp, nf)
            step1 = _invert(child, (comp, i1))
            i2 = first_index(step1.sequentv, comp, nf)
            step2 = _invert(step1, (comp, i2))
            return (
                lc(step2, a, dual) if dual in ("g1", "g2") else rc(step2, a, dual)
            )
        raise TransformError(f"rule {rule} cannot introduce the negation {nf!r}")
    # context occurrence: invert the corresponding ancestors and rebuild
    new_children = list(node.children)
    found = False
    for ci in range(len(node.children)):
        edges, _ = node_links(node, ci)
        for (cc, cidx), (oc, oidx) in edges:
            if (oc, oidx) == occ:
                new_children[ci] = _invert(new_children[ci], (cc, cidx))
                found = True
                break
    if not found:
        raise TransformError(f"occurrence {occ} has no ancestors to invert")
    return rebuild(node, new_children)


# ---------------------------------------------------------------------------
# Literal cuts to positive cuts
# ---------------------------------------------------------------------------

def _is_negative_literal_cut(f: Formula) -> bool:
    if f == TOP:
        return False
    return isinstance(f, Neg) and isinstance(f.body, (Atom, Bottom, Box))


def literal_cuts_to_atomic(p: Proof) -> Proof:
    """Replace every cut on a negated atom or box by a cut on its body,
    keeping the clause-set form of the interpolant."""
    while True:
        targets = [
            (path, node)
            for path, node in iter_nodes(p)
            if node.rule == "cut" and _is_negative_literal_cut(node.main_formula)
        ]
        if not targets:
            return p
        path, node = max(targets, key=lambda pn: len(pn[0]))
        nf = node.main_formula
        side = node.main_comp[1]
        dcomp, gcomp = "d" + side, "g" + side
        left, right = node.children
        left_inv = _invert(left, (dcomp, first_index(left.sequentv, dcomp, nf)))
        right_inv = _invert(right, (gcomp, first_index(right.sequentv, gcomp, nf)))
        replacement = cut(right_inv, left_inv, nf.body, int(side))
        p = replace_at(p, path, replacement)


# ---------------------------------------------------------------------------
# Weakening normalization
# ---------------------------------------------------------------------------

def is_w_reduced(p: Proof) -> bool:
    for _, node in iter_nodes(p):
        if node.rule in ("lw", "rw"):
            if node.children[0].rule not in ("lw", "rw", "ax", "bot"):
                return False
    return True


def w_reduce(p: Proof) -> Proof:
    """Shift weakenings up until each sits just below an axiom or weakening."""
    kids = [w_reduce(c) for c in p.children]
    node = rebuild(p, kids) if kids else p
    if node.rule in ("lw", "rw"):
        return _push_weakening(node)
    return node


def _push_weakening(w: Proof) -> Proof:
    child = w.children[0]
    if child.rule in ("lw", "rw", "ax", "bot"):
        return w
    if child.rule in ("k", "d", "4", "t"):
        raise TransformError("weakening normalization is propositional only")
    f, comp = w.main_formula, w.main_comp
    hoisted = []
    for gk in child.children:
        wk = lw(gk, f, comp) if comp in ("g1", "g2") else rw(gk, f, comp)
        hoisted.append(_push_weakening(wk))
    return rebuild(child, hoisted)


# ---------------------------------------------------------------------------
# Occurrence-cone deletion (for weak cut formulas)
# ---------------------------------------------------------------------------

def delete_occurrence(p: Proof, occ) -> Proof:
    """Remove a weak occurrence, its ancestors, and the weakenings that
    introduce them.  Binary rules met by the cone collapse to their left
    branch; this keeps the interpolant's clause set when the cone stays on
    partition side 2 (conjunctive combinations), which type-R cuts ensure."""
    return _delete(p, [occ])


def _delete(node: Proof, kill) -> Proof:
    kill = [k for k in kill]
    if not kill:
        return node
    rule = node.rule
    seen = set()
    dedup = []
    for k in kill:
        if k not in seen:
            seen.add(k)
            dedup.append(k)
    kill = dedup
    if rule in ("ax", "bot"):
        raise TransformError("cannot delete an axiom-active occurrence")
    main_hit = False
    m, comp = node.main_formula, node.main_comp
    if m is not None and rule != "cut":
        main_occ = (comp, first_index(node.sequentv, comp, m))
        main_hit = main_occ in kill
        if main_hit:
            kill.remove(main_occ)
    child_kills = [[] for _ in node.children]
    for ci in range(len(node.children)):
        edges, _ = node_links(node, ci)
        for (cc, cidx), (oc, oidx) in edges:
            if (oc, oidx) in kill:
                child_kills[ci].append((cc, cidx))
    if main_hit:
        if rule in ("lw", "rw"):
            return _delete(node.children[0], child_kills[0])
        if rule in ("lc", "rc", "land1", "land2", "ror1", "ror2", "lneg", "rneg"):
            aux_occs = _aux_occurrences(node, 0)
            return _delete(node.children[0], child_kills[0] + aux_occs)
        if rule in ("rand", "lor"):
            if comp[1] != "2":
                raise TransformError(
                    "cannot collapse a disjunctive branch while deleting a cone"
                )
            aux_occs = _aux_occurrences(node, 0)
            return _delete(node.children[0], child_kills[0] + aux_occs)
        raise TransformError(f"cannot delete through rule {rule}")
    new_children = [
        _delete(c, ck) if ck else c for c, ck in zip(node.children, child_kills)
    ]
    return rebuild(node, new_children)


def _aux_occurrences(node: Proof, ci: int):
    edges, _ = node_links(node, ci)
    m, comp = node.main_formula, node.main_comp
    main_occ = (comp, first_index(node.sequentv, comp, m))
    return [src for src, dst in edges if dst == main_occ]


# ---------------------------------------------------------------------------
# Cut elimination
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    kind: str
    path: tuple
    degree: int
    weight: int
    new_cuts: tuple  # (degree, weight) pairs of the replacing cuts
    interpolant_cnf: frozenset


@dataclass(frozen=True)
class CutEliminationResult:
    proof: Proof
    trace: tuple


def _uppermost_cut(p: Proof):
    cuts = [path for path, node in iter_nodes(p) if node.rule == "cut"]
    if not cuts:
        return None
    return max(cuts, key=lambda path: (len(path), tuple(-i for i in path)))


def _cut_occs(chi: Proof):
    side = chi.main_comp[1]
    left, right = chi.children
    occ_l = ("d" + side, first_index(left.sequentv, "d" + side, chi.main_formula))
    occ_r = ("g" + side, first_index(right.sequentv, "g" + side, chi.main_formula))
    return occ_l, occ_r


def _is_introducing(premise: Proof, occ, analysis: Analysis):
    """How the premise provides its cut occurrence: 'wax' when it traces to
    an axiom under weakenings, 'logical' when its last rule introduces it,
    'contraction' for a contraction on it, else None."""
    comp, idx = occ
    f = premise.sequentv.comp(comp)[idx]
    rule = premise.rule
    if rule == "ax":
        return "wax"
    if rule in ("lw", "rw"):
        return "wax"  # w-reduced and the occurrence is not weak
    if (
        premise.main_comp == comp
        and premise.main_formula == f
        and idx == first_index(premise.sequentv, comp, f)
    ):
        if rule in ("lc", "rc"):
            return "contraction"
        if rule in ("rand", "ror1", "ror2", "rneg", "land1", "land2", "lor", "lneg"):
            return "logical"
        raise TransformError(f"unexpected introducing rule {rule}")
    return None


def _wax_axiom_comp(premise: Proof, occ_comp: str):
    """The axiom's other component in a weakening stack over an axiom, or
    None when the stack sits on a false-axiom (the occurrence is its bottom)."""
    node = premise
    while node.rule in ("lw", "rw"):
        node = node.children[0]
    if node.rule == "bot":
        return None
    if node.rule != "ax":
        raise TransformError("weak stack does not end in an axiom")
    if occ_comp in ("d1", "d2"):
        return "g1" if node.sequentv.g1 else "g2"
    return "d1" if node.sequentv.d1 else "d2"


def _merge_sequents(a: Sequent, b: Sequent) -> Sequent:
    from .sequent import COMPONENTS, sequent

    parts = {}
    for c in COMPONENTS:
        items = list(a.comp(c))
        have = list(items)
        for f in b.comp(c):
            if f in have:
                have.remove(f)
            else:
                items.append(f)
        parts[c] = items
    return sequent(parts["g1"], parts["g2"], parts["d1"], parts["d2"])


def _weaken_add(p: Proof, f: Formula, comp: str) -> Proof:
    return lw(p, f, comp) if comp in ("g1", "g2") else rw(p, f, comp)


def _reduce_cut(chi: Proof):
    """One reduction step: (replacement, kind, new cut paths in replacement)."""
    f = chi.main_formula
    side = int(chi.main_comp[1])
    dcomp, gcomp = f"d{side}", f"g{side}"
    left, right = chi.children
    occ_l, occ_r = _cut_occs(chi)
    an_l, an_r = Analysis(left), Analysis(right)

    if an_l.is_weak(((),) + occ_l):
        return delete_occurrence(left, occ_l), "weak-left"
    if an_r.is_weak(((),) + occ_r):
        return delete_occurrence(right, occ_r), "weak-right"

    intro_l = _is_introducing(left, occ_l, an_l)
    intro_r = _is_introducing(right, occ_r, an_r)

    if intro_l is None:
        return _permute(chi, over_left=True), "permute-left"
    if intro_r is None:
        return _permute(chi, over_left=False), "permute-right"

    if intro_l == "contraction":
        return _contract_reduce(chi, on_left=True, analysis=an_l), "contraction-left"
    if intro_r == "contraction":
        return _contract_reduce(chi, on_left=False, analysis=an_r), "contraction-right"

    if intro_l == "wax" and intro_r == "wax":
        t1 = _wax_axiom_comp(left, dcomp)
        t2 = _wax_axiom_comp(right, gcomp)
        if t2 is None:
            # the right occurrence is the bottom of a false-axiom; the left
            # one then comes from an axiom false => false whose antecedent
            # copy survives in the conclusion
            from .formulas import BOTTOM as _BOT
            from .sequent import bot_axiom

            if f != _BOT or t1 is None:
                raise TransformError("false-axiom cut with a non-false formula")
            return weaken_to(bot_axiom(t1), chi.sequentv), "axiom"
        if t1 is None:
            raise TransformError("a false-axiom cannot feed the left cut occurrence")
        if t1 == "g1" and t2 == "d1":
            raise NotTame("a left/right against right/left axiom cut cannot occur in a tame proof")
        return wax(f, chi.sequentv, t1, t2), "axiom"

    if intro_l == "wax":
        # absorb the axiom into the logical premise via a contraction
        t1 = _wax_axiom_comp(left, dcomp)
        if t1 != gcomp:
            raise TransformError(
                "axiom-against-rule cut crosses the partition; not supported"
            )
        return lc(right, f, gcomp), "axiom-absorb"
    if intro_r == "wax":
        t2 = _wax_axiom_comp(right, gcomp)
        if t2 != dcomp:
            raise TransformError(
                "rule-against-axiom cut crosses the partition; not supported"
            )
        return rc(left, f, dcomp), "axiom-absorb"
    if intro_l is None or intro_r is None:
        raise TransformError("unclassified cut configuration")

    return _degree_reduce(chi), "degree"


def _permute(chi: Proof, over_left: bool):
    """Permute the cut above the last rule of one premise."""
    f = chi.main_formula
    side = int(chi.main_comp[1])
    dcomp, gcomp = f"d{side}", f"g{side}"
    active = chi.children[0] if over_left else chi.children[1]
    passive = chi.children[1] if over_left else chi.children[0]
    rule = active.rule
    m, mcomp = active.main_formula, active.main_comp

    def new_cut(branch: Proof, aux_pairs):
        br = branch
        for g, c in [(m, mcomp)]:
            br = _weaken_add(br, g, c)
        ps = passive
        for g, c in aux_pairs:
            ps = _weaken_add(ps, g, c)
        br = w_reduce(br)
        ps = w_reduce(ps)
        if over_left:
            return cut(br, ps, f, side)
        return cut(ps, br, f, side)

    if rule in ("rand", "lor"):
        aux = [[(m.left, mcomp)], [(m.right, mcomp)]]
        cuts = [new_cut(active.children[i], aux[i]) for i in (0, 1)]
        merged = rebuild(active, cuts)
        out = merged
        # one duplicated main to contract away
        out = (
            lc(out, m, mcomp) if mcomp in ("g1", "g2") else rc(out, m, mcomp)
        )
        return out
    if rule in ("lc", "rc"):
        aux = [(m, mcomp), (m, mcomp)]
    elif rule in ("land1", "ror1"):
        aux = [(m.left, mcomp)]
    elif rule in ("land2", "ror2"):
        aux = [(m.right, mcomp)]
    elif rule == "lneg":
        aux = [(m.body, "d" + mcomp[1])]
    elif rule == "rneg":
        aux = [(m.body, "g" + mcomp[1])]
    elif rule in ("lw", "rw"):
        raise TransformError("cannot permute over a weakening")
    else:
        raise TransformError(f"cannot permute over rule {rule}")
    inner = new_cut(active.children[0], aux)
    out = rebuild(active, [inner])
    out = lc(out, m, mcomp) if mcomp in ("g1", "g2") else rc(out, m, mcomp)
    return out


def _contract_reduce(chi: Proof, on_left: bool, analysis: Analysis):
    f = chi.main_formula
    side = int(chi.main_comp[1])
    dcomp, gcomp = f"d{side}", f"g{side}"
    left, right = chi.children
    if on_left:
        inner_premise = left.children[0]  # ends the contraction on f@dcomp
        i1 = first_index(inner_premise.sequentv, dcomp, f)
        copies = [(dcomp, i1)]
        rest = [
            i
            for i, g in enumerate(inner_premise.sequentv.comp(dcomp))
            if g == f and i != i1
        ]
        copies.append((dcomp, rest[0]))
        an = Analysis(inner_premise)
        for occ in copies:
            if an.is_weak(((),) + occ):
                shortened = delete_occurrence(inner_premise, occ)
                return cut(shortened, right, f, side)
        widened = w_reduce(rw(right, f, dcomp))
        inner = cut(inner_premise, widened, f, side)
        return cut(inner, right, f, side)
    inner_premise = right.children[0]
    i1 = first_index(inner_premise.sequentv, gcomp, f)
    rest = [
        i
        for i, g in enumerate(inner_premise.sequentv.comp(gcomp))
        if g == f and i != i1
    ]
    copies = [(gcomp, i1), (gcomp, rest[0])]
    an = Analysis(inner_premise)
    for occ in copies:
        if an.is_weak(((),) + occ):
            shortened = delete_occurrence(inner_premise, occ)
            return cut(left, shortened, f, side)
    widened = w_reduce(lw(left, f, gcomp))
    inner = cut(widened, inner_premise, f, side)
    return cut(left, inner, f, side)


def _degree_reduce(chi: Proof):
    f = chi.main_formula
    side = int(chi.main_comp[1])
    left, right = chi.children
    if isinstance(f, And):
        if right.rule == "land1":
            return cut(left.children[0], right.children[0], f.left, side)
        if right.rule == "land2":
            return cut(left.children[1], right.children[0], f.right, side)
        raise TransformError("conjunction cut against unexpected rule")
    if isinstance(f, Or):
        if left.rule == "ror1":
            return cut(left.children[0], right.children[0], f.left, side)
        if left.rule == "ror2":
            return cut(left.children[0], right.children[1], f.right, side)
        raise TransformError("disjunction cut against unexpected rule")
    if isinstance(f, Neg):
        return cut(right.children[0], left.children[0], f.body, side)
    raise TransformError(f"cannot reduce degree of cut on {f!r}")


def eliminate_cuts(p: Proof) -> CutEliminationResult:
    """Stepwise removal of all cuts from a tame proof whose cuts all sit on
    the right of the partition; the clause-set interpolant of each reduct
    subsumes-extends the previous one."""
    bad = check_proof(p, LK)
    if bad is not None:
        raise TransformError(f"input does not check: {bad.reason}")
    for path, node in iter_nodes(p):
        if node.rule in ("k", "d", "t", "4"):
            raise TransformError("cut elimination is propositional only")
        if node.rule == "cut":
            info = classify_cut(p, path)
            if not info.type_r:
                raise NotTypeR(f"cut at {path} is not of type R")
            if not info.monochromatic:
                raise TransformError(f"cut at {path} is not monochromatic")
    ok, witness = is_tame(p)
    if not ok:
        raise NotTame(f"input proof is not tame: {witness}")

    end = p.sequentv
    p = w_reduce(p)
    trace = []
    current_cnf = formula_cnf(maehara(p, LK).interpolant)
    while True:
        path = _uppermost_cut(p)
        if path is None:
            break
        chi = subproof_at(p, path)
        old_info = classify_cut(p, path)
        replacement, kind = _reduce_cut(chi)
        if replacement.sequentv != chi.sequentv:
            raise TransformError(
                f"{kind} reduction changed the sequent at {path}"
            )
        p = w_reduce(replace_at(p, path, replacement))
        new_cuts = []
        for sub_path, node in iter_nodes(replacement):
            if node.rule == "cut":
                info = classify_cut(replacement, sub_path)
                new_cuts.append((info.degree, info.weight))
        for dw in new_cuts:
            if dw >= (old_info.degree, old_info.weight):
                raise TransformError(
                    f"{kind} reduction did not decrease the measure: "
                    f"{dw} vs {(old_info.degree, old_info.weight)}"
                )
        next_cnf = formula_cnf(maehara(p, LK).interpolant)
        if not subsumes(current_cnf, next_cnf):
            raise TransformError(f"{kind} reduction broke the subsumption chain")
        trace.append(
            TraceStep(
                kind,
                path,
                old_info.degree,
                old_info.weight,
                tuple(new_cuts),
                next_cnf,
            )
        )
        current_cnf = next_cnf
    if p.sequentv != end:
        raise TransformError("cut elimination changed the end-sequent")
    return CutEliminationResult(p, tuple(trace))
