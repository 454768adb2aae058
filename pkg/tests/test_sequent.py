
from craig.formulas import And, Atom, BOTTOM, Box, Neg, Or, TOP, vars_of
from craig.sequent import (
    Analysis,
    K,
    K4,
    LK,
    LKAT,
    LKLIT,
    LKMINUS,
    LKMONO,
    Proof,
    ax,
    axiom_type,
    bot_axiom,
    check_proof,
    classify_cut,
    contract_to,
    cut,
    format_proof,
    format_sequent,
    is_tame,
    iter_nodes,
    land1,
    land2,
    lc,
    lneg,
    lor,
    lw,
    monochromatize,
    occurrence_metrics,
    parse_proof,
    parse_sequent,
    proof_depth,
    proof_length,
    proof_size,
    respects_subformula_property,
    rneg,
    ror1,
    rule_4,
    rule_d,
    rule_k,
    rule_t,
    rw,
    sequent,
    system_by_name,
    top_right,
    wax,
    weaken_to,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")
pq = And(p, q)
porq = Or(p, q)


def example_sigma():
    """Atomic-cut proof of p & q ; => ; p | q with interpolant q & (p & true)."""
    pi1 = land1(ax(p, "g1", "d2"), pq, "g1")
    pi2 = land2(ax(q, "g1", "d2"), pq, "g1")
    leaf = ror1(lw(ax(p, "g2", "d2"), q, "g2"), porq, "d2")
    left_inner = weaken_to(pi1, sequent([pq], [q], [], [p, porq]))
    right_inner = weaken_to(leaf, sequent([pq], [p, q], [], [porq]))
    inner = cut(left_inner, right_inner, p, 2)
    left_outer = weaken_to(pi2, sequent([pq, pq], [], [], [q, porq]))
    right_outer = weaken_to(inner, sequent([pq, pq], [q], [], [porq]))
    outer = cut(left_outer, right_outer, q, 2)
    return lc(outer, pq, "g1")


def omega_proof():
    """Monochromatic two-cut proof of ;p,q => ;q fed from both occurrences
    of one axiom ;p => ;p, so that axiom has type omega."""
    n = ax(p, "g2", "d2")
    n2 = rneg(n, Neg(p), "d2")
    c1 = sequent([], [p, q], [], [p, q])
    l1 = weaken_to(n2, sequent([], [p, q], [], [p, q, Neg(p)]))
    r1 = weaken_to(ax(q, "g2", "d2"), sequent([], [p, q, Neg(p)], [], [p, q]))
    cut1 = cut(l1, r1, Neg(p), 2)
    assert cut1.sequentv == c1
    y = weaken_to(ax(q, "g2", "d2"), sequent([], [p, p, q], [], [q]))
    return cut(cut1, y, p, 2)


class TestConstructionAndChecking:
    def test_sigma_checks_in_lkat(self):
        sigma = example_sigma()
        assert sigma.sequentv == sequent([pq], [], [], [porq])
        assert check_proof(sigma, LKAT) is None
        assert check_proof(sigma, LKLIT) is None
        assert check_proof(sigma, LKMONO) is None
        assert check_proof(sigma, LK) is None
        v = check_proof(sigma, LKMINUS)
        assert v is not None and "cut" in v.reason

    def test_composite_cut_rejected_in_lkat(self):
        left = rw(ax(pq, "g1", "d2"), pq, "d2")
        right = lw(ax(pq, "g2", "d2"), pq, "g1")
        proof = cut(left, right, pq, 2)
        assert check_proof(proof, LK) is None
        v = check_proof(proof, LKAT)
        assert v is not None and "policy" in v.reason
        # monochromatic, so lk-mono accepts it
        assert check_proof(proof, LKMONO) is None

    def test_k_rule(self):
        proof = rule_k(ax(p, "g1", "d2"))
        assert proof.sequentv == sequent([Box(p)], [], [], [Box(p)])
        assert check_proof(proof, K) is None
        v = check_proof(proof, K4)
        assert v is not None and "not available" in v.reason

    def test_k_schema_violation(self):
        bad = Proof("k", sequent([p], [], [], [Box(q)]), (ax(q, "g1", "d2"),), "d2", Box(q))
        v = check_proof(bad, K)
        assert v is not None and "boxed" in v.reason

    def test_rule_4(self):
        child = lw(ax(p, "g1", "d2"), Box(p), "g1")
        proof = rule_4(child)
        assert proof.sequentv == sequent([Box(p)], [], [], [Box(p)])
        assert check_proof(proof, K4) is None

    def test_rule_d(self):
        child = lneg(ax(p, "g1", "d1"), Neg(p), "g1")
        assert child.sequentv == sequent([p, Neg(p)], [], [], [])
        proof = rule_d(child)
        assert check_proof(proof, system_by_name("kd")) is None

    def test_rule_t(self):
        child = ax(p, "g1", "d2")
        proof = rule_t(child, Box(p), "g1")
        assert proof.sequentv == sequent([Box(p)], [], [], [p])
        assert check_proof(proof, system_by_name("kt")) is None

    def test_modal_formula_rejected_propositionally(self):
        v = check_proof(ax(Box(p), "g1", "d2"), LKAT)
        assert v is not None

    def test_top_right_macro(self):
        proof = top_right("d2")
        assert proof.sequentv == sequent([], [], [], [TOP])
        assert check_proof(proof, LKMINUS) is None

    def test_weaken_and_contract(self):
        base = ax(p, "g1", "d2")
        target = sequent([p, q], [r], [BOTTOM], [p, p])
        expanded = weaken_to(base, target)
        assert expanded.sequentv == target
        assert check_proof(expanded, LKMINUS) is None
        back = contract_to(expanded, sequent([p, q], [r], [BOTTOM], [p]))
        assert check_proof(back, LKMINUS) is None

    def test_wax(self):
        proof = wax(q, sequent([p, q], [], [q, r], []), "g1", "d1")
        assert check_proof(proof, LKMINUS) is None


class TestSubformulaProperty:
    def test_cut_free_proofs_respect_it(self):
        pi1 = land1(ax(p, "g1", "d2"), pq, "g1")
        proof = ror1(pi1, porq, "d2")
        assert respects_subformula_property(proof)

    def test_sigma_does_not_need_it(self):
        # atomic cuts stay inside the subformula closure here
        assert respects_subformula_property(example_sigma())


class TestMetrics:
    def test_weak_occurrence(self):
        proof = rw(ax(p, "g1", "d1"), q, "d1")
        occ = ((), "d1", proof.sequentv.d1.index(q))
        m = occurrence_metrics(proof, occ)
        assert m["weak"] and m["weight"] == 0

    def test_axiom_occurrence_weight(self):
        proof = ax(p, "g1", "d1")
        m = occurrence_metrics(proof, ((), "g1", 0))
        assert not m["weak"]
        assert m["weight"] == 1

    def test_lor_main_weight(self):
        left = rw(ax(p, "g1", "d1"), q, "d1")
        right = rw(ax(q, "g1", "d1"), p, "d1")
        proof = lor(left, right, porq, "g1")
        assert proof_size(proof) == 5
        m = occurrence_metrics(proof, ((), "g1", 0))
        assert m["weight"] == 3

    def test_proof_measures(self):
        sigma = example_sigma()
        assert proof_depth(sigma) >= 4
        assert proof_length(sigma) > proof_size(sigma)


class TestCutAndAxiomClassification:
    def test_classify_atomic_cut(self):
        sigma = example_sigma()
        cuts = [path for path, n in iter_nodes(sigma) if n.rule == "cut"]
        assert cuts
        for path in cuts:
            info = classify_cut(sigma, path)
            assert info.type_r
            assert info.atomic and info.literal and info.monochromatic
            assert info.degree == 0
            assert info.weight >= 2

    def test_classify_negated_literal_cut(self):
        left = rw(ax(p, "g1", "d2"), Neg(p), "d2")
        right = lw(ax(p, "g1", "d2"), Neg(p), "g2")
        proof = cut(left, right, Neg(p), 2)
        info = classify_cut(proof, ())
        assert info.literal and not info.atomic

    def test_axiom_types(self):
        assert axiom_type(ax(p, "g1", "d1"), ()).kind == "L/L"
        assert axiom_type(ax(p, "g2", "d2"), ()).kind == "R/R"
        assert axiom_type(ax(p, "g1", "d2"), ()).kind == "L/R"
        assert axiom_type(ax(p, "g2", "d1"), ()).kind == "R/L"

    def test_omega_axiom(self):
        proof = omega_proof()
        assert check_proof(proof, LKLIT) is None
        # the inner axiom ;p => ;p feeds both cuts
        target = None
        for path, node in iter_nodes(proof):
            if node.rule == "ax" and node.sequentv.g2 == (p,):
                target = path
        assert target is not None
        info = axiom_type(proof, target)
        assert info.kind == "R/R" and info.omega
        ok, witness = is_tame(proof)
        assert not ok and witness[0] == "omega-axiom"

    def test_sigma_is_tame(self):
        ok, witness = is_tame(example_sigma())
        assert ok, witness

    def test_cut_free_is_tame(self):
        proof = land1(ax(p, "g1", "d2"), pq, "g1")
        ok, _ = is_tame(proof)
        assert ok


class TestAncestryExample:
    def build(self):
        # p | q => ~(~p & ~q), with every occurrence accounted for
        nanb = And(Neg(p), Neg(q))
        ax_p = ax(p, "g1", "d1")
        ln_p = lneg(ax_p, Neg(p), "g1")
        la1 = land1(ln_p, nanb, "g1")
        ax_q = ax(q, "g1", "d1")
        ln_q = lneg(ax_q, Neg(q), "g1")
        la2 = land2(ln_q, nanb, "g1")
        disj = lor(la1, la2, Or(p, q), "g1")
        return rneg(disj, Neg(nanb), "d1")

    def test_direct_ancestors_of_disjunction_main(self):
        proof = self.build()
        analysis = Analysis(proof)
        # the disjunction introduced by lor has exactly two direct ancestors
        inner = proof.children[0]
        assert inner.rule == "lor"
        idx = inner.sequentv.g1.index(Or(p, q))
        direct = analysis.direct[((0,), "g1", idx)]
        assert len(direct) == 2

    def test_root_negation_has_eight_ancestors(self):
        proof = self.build()
        analysis = Analysis(proof)
        idx = proof.sequentv.d1.index(Neg(And(Neg(p), Neg(q))))
        assert len(analysis.ancestors(((), "d1", idx))) == 8

    def test_descendant_paths_are_unique(self):
        # every non-root occurrence feeds exactly one conclusion occurrence
        # or is consumed by a cut
        from craig.sequent import node_links

        for proof in (self.build(), example_sigma(), omega_proof()):
            for path, node in iter_nodes(proof):
                for ci, child in enumerate(node.children):
                    edges, consumed = node_links(node, ci)
                    sources = [src for src, _ in edges] + consumed
                    assert sorted(sources) == sorted(
                        (c, i) for c, i, _ in child.sequentv.occurrences()
                    )


class TestAnalyticCuts:
    def test_analytic_implies_monochromatic(self):
        sigma = example_sigma()
        for path, node in iter_nodes(sigma):
            if node.rule == "cut":
                info = classify_cut(sigma, path)
                assert info.analytic
                assert info.monochromatic

    def test_non_analytic_cut(self):
        left = rw(ax(p, "g1", "d2"), Atom("z"), "d2")
        right = lw(ax(p, "g1", "d2"), Atom("z"), "g2")
        proof = cut(left, right, Atom("z"), 2)
        info = classify_cut(proof, ())
        assert not info.analytic and not info.monochromatic


class TestMonochromatize:
    def spurious_cut(self, atom):
        left = rw(ax(p, "g1", "d2"), atom, "d2")
        right = lw(ax(p, "g1", "d2"), atom, "g2")
        return cut(left, right, atom, 2)

    def test_fresh_atom_removed(self):
        proof = self.spurious_cut(Atom("z"))
        assert check_proof(proof, LKAT) is None
        fixed = monochromatize(proof, LKAT)
        assert check_proof(fixed, LKAT) is None
        assert fixed.sequentv == proof.sequentv
        for _, node in iter_nodes(fixed):
            assert "z" not in node.sequentv.all_vars()

    def test_spurious_cut_becomes_p(self):
        proof = self.spurious_cut(q)
        fixed = monochromatize(proof, LKAT)
        for path, node in iter_nodes(fixed):
            if node.rule == "cut":
                assert node.main_formula == p

    def test_already_monochromatic_unchanged(self):
        sigma = example_sigma()
        assert monochromatize(sigma, LKAT) == sigma

    def test_flip_for_wrong_side_placement(self):
        # valid cut on p placed on side 2, but p only occurs on side 1
        left = rw(ax(p, "g1", "d1"), p, "d2")
        right = lw(ax(p, "g1", "d1"), p, "g2")
        proof = cut(left, right, p, 2)
        assert proof.sequentv == sequent([p], [], [p], [])
        fixed = monochromatize(proof, LKAT)
        assert check_proof(fixed, LKAT) is None
        assert fixed.sequentv == proof.sequentv
        for path, node in iter_nodes(fixed):
            if node.rule == "cut":
                assert vars_of(node.main_formula) <= node.sequentv.side_vars(
                    int(node.main_comp[1])
                )


class TestSerialization:
    def test_sequent_text_round_trip(self):
        s = sequent([pq, p], [q], [], [porq, BOTTOM])
        assert parse_sequent(format_sequent(s)) == s

    def test_empty_components(self):
        s = sequent([], [], [], [p])
        assert parse_sequent(format_sequent(s)) == s

    def test_proof_round_trip(self):
        for proof in (
            example_sigma(),
            omega_proof(),
            top_right("d2"),
            rule_k(ax(p, "g1", "d2")),
            rule_4(lw(ax(p, "g1", "d2"), Box(p), "g1")),
            rule_d(lneg(ax(p, "g1", "d1"), Neg(p), "g1")),
            bot_axiom("g2"),
        ):
            assert parse_proof(format_proof(proof)) == proof
