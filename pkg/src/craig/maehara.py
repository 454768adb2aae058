"""Interpolant extraction over split proofs, for the propositional systems
with atomic/literal/monochromatic cuts and the normal modal systems."""

from __future__ import annotations

from dataclasses import dataclass

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
    entails,
    formula_length,
    is_modal,
    vars_of,
)
from .sequent import (
    Proof,
    ProofError,
    Sequent,
    System,
    format_sequent,
    iter_nodes,
)


class InterpolationError(ProofError):
    pass


class NonMonochromaticCut(InterpolationError):
    pass


class UnsupportedRule(InterpolationError):
    pass


@dataclass(frozen=True)
class AnnotatedProof:
    proof: Proof
    interpolants: tuple  # ((path, formula), ...) in preorder

    @property
    def interpolant(self) -> Formula:
        return dict(self.interpolants)[()]

    def at(self, path) -> Formula:
        return dict(self.interpolants)[path]


_PASS_THROUGH = {
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


def _axiom_interpolant(s: Sequent) -> Formula:
    f = s.antecedent()[0]
    ant = "L" if s.g1 else "R"
    suc = "L" if s.d1 else "R"
    if (ant, suc) == ("L", "L"):
        return BOTTOM
    if (ant, suc) == ("R", "R"):
        return TOP
    if (ant, suc) == ("L", "R"):
        return f
    return Neg(f)


def maehara(p: Proof, system: System) -> AnnotatedProof:
    """Annotate every node with its interpolant; the root one interpolates
    the end-sequent's partition."""
    notes = []

    def go(node: Proof, path):
        rule = node.rule
        if rule == "ax":
            c = _axiom_interpolant(node.sequentv)
        elif rule == "bot":
            c = BOTTOM if node.sequentv.g1 else TOP
        elif rule in _PASS_THROUGH:
            c = go(node.children[0], path + (0,))
        elif rule in ("rand", "lor"):
            left = go(node.children[0], path + (0,))
            right = go(node.children[1], path + (1,))
            c = Or(left, right) if node.main_comp in ("d1", "g1") else And(left, right)
        elif rule == "cut":
            side = int(node.main_comp[1])
            v = vars_of(node.main_formula)
            if not (
                v <= node.sequentv.side_vars(1) or v <= node.sequentv.side_vars(2)
            ):
                raise NonMonochromaticCut(
                    f"cut on {node.main_formula!r} in "
                    f"{format_sequent(node.sequentv)}"
                )
            left = go(node.children[0], path + (0,))
            right = go(node.children[1], path + (1,))
            c = Or(left, right) if side == 1 else And(left, right)
        elif rule in ("k", "4"):
            inner = go(node.children[0], path + (0,))
            if node.main_comp == "d2":
                c = Box(inner)
            else:
                c = Neg(Box(Neg(inner)))
        elif rule == "d":
            if not ({"k", "4"} & system.modal_rules):
                raise UnsupportedRule(
                    "interpolating the seriality rule needs a box-introducing rule"
                )
            c = Box(go(node.children[0], path + (0,)))
        else:
            raise UnsupportedRule(f"no interpolation case for rule {rule!r}")
        notes.append((path, c))
        return c

    go(p, ())
    return AnnotatedProof(p, tuple(sorted(notes)))


def is_nnf_interpolant(f: Formula) -> bool:
    """Negation only on atoms, false, or boxed subformulas (box bodies are opaque)."""
    if isinstance(f, (Atom, Bottom, Box)):
        return True
    if isinstance(f, Neg):
        return isinstance(f.body, (Atom, Bottom, Box))
    if isinstance(f, (And, Or)):
        return is_nnf_interpolant(f.left) and is_nnf_interpolant(f.right)
    return False


def interpolant_length_bound_holds(p: Proof, system: System) -> bool:
    from .sequent import proof_length

    return formula_length(maehara(p, system).interpolant) <= proof_length(p)


def verify_interpolant(a: Formula, b: Formula, c: Formula, system: System) -> bool:
    """Variable condition plus both implications, by truth table or by the
    cut-free modal prover."""
    if not vars_of(c) <= (vars_of(a) & vars_of(b)):
        return False
    if not system.modal:
        if is_modal(a) or is_modal(b) or is_modal(c):
            return False
        return entails(a, c) and entails(c, b)
    from .construct import try_prove_cutfree
    from .sequent import sequent

    first = try_prove_cutfree(sequent([a], [], [], [c]), system)
    second = try_prove_cutfree(sequent([c], [], [], [b]), system)
    return first is not None and second is not None


def format_annotated(ann: AnnotatedProof) -> str:
    """One line per node: its sequent suffixed with the node interpolant."""
    from .formulas import format_formula

    lines = []
    for path, node in iter_nodes(ann.proof):
        indent = "  " * len(path)
        lines.append(
            f"{indent}{node.rule}: {format_sequent(node.sequentv)} @ "
            f"{format_formula(ann.at(path))}"
        )
    lines.append(format_formula(ann.interpolant))
    return "\n".join(lines) + "\n"
