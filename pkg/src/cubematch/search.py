"""Bounded brute-force enumeration of candidate instantiations.

Candidates are generated type-directed in eta-long beta-normal form:
product types force an abstraction, atomic types force a fully-applied
head chosen among the universal declarations (and enclosing binders), and
sort types additionally admit sorts and products as inhabitants.  Every
result is re-verified with the typechecker before being returned, and the
output order is deterministic: size first, then a structural key.

Size here counts choice nodes: abstraction domains are dictated by the
target type and cost nothing, everything else costs one node.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .problems import (
    Problem,
    QContext,
    QDecl,
    Quant,
    SubstTriple,
    Substitution,
    apply_subst_in_prefix,
    is_solution,
)
from .reduction import Fuel, beta_eta_normalize
from .terms import PROP, TYPE, App, Lam, Pi, Sort, Term, Var, describe, shift, subst
from .typecheck import CubeSpec, check_type

__all__ = ["SearchBudget", "decision_size", "enumerate_candidates", "solve_bounded"]


@dataclass(frozen=True)
class SearchBudget:
    max_term_size: int = 6
    max_solutions: int = 16

    def __post_init__(self) -> None:
        if self.max_term_size <= 0 or self.max_solutions <= 0:
            raise ValueError("budgets must be positive")


def decision_size(t: Term) -> int:
    """Node count with forced abstraction domains excluded."""
    match t:
        case App(fn, arg):
            return 1 + decision_size(fn) + decision_size(arg)
        case Lam(_, body):
            return 1 + decision_size(body)
        case Pi(dom, cod):
            return 1 + decision_size(dom) + decision_size(cod)
        case _:
            return 1


def _candidate_key(t: Term) -> tuple[int, str]:
    return decision_size(t), describe(t)


def enumerate_candidates(
    qctx: QContext,
    T: Term,
    budget: SearchBudget,
    spec: CubeSpec,
    fuel: Fuel | None = None,
) -> list[Term]:
    """All eta-long beta-normal inhabitants of T over the universal slots,
    within the size budget, deduplicated, verified, in deterministic order."""
    env = [d.ty for d in qctx.decls]
    usable = [d.quant is Quant.FORALL for d in qctx.decls]

    def var_type(env: list[Term], pos: int) -> Term:
        return shift(env[pos], len(env) - pos, 0)

    def gen(env: list[Term], usable: list[bool], target: Term, size: int) -> Iterator[Term]:
        if size <= 0:
            return
        tn = beta_eta_normalize(target, fuel)
        if isinstance(tn, Pi):
            for body in gen(env + [tn.dom], usable + [True], tn.cod, size - 1):
                yield Lam(tn.dom, body, tn.hint)
            return
        for pos in range(len(env)):
            if not usable[pos]:
                continue
            head_ty = beta_eta_normalize(var_type(env, pos), fuel)
            yield from spines(Var(len(env) - 1 - pos), head_ty, tn, env, usable, size - 1)
        if isinstance(tn, Sort):
            if tn == TYPE:
                yield PROP
            for s1, s2 in spec.rules:
                if Sort(s2) != tn:
                    continue
                for dom_size in range(1, size - 1):
                    for dom in gen(env, usable, Sort(s1), dom_size):
                        for cod in gen(
                            env + [dom], usable + [True], tn, size - 1 - dom_size
                        ):
                            yield Pi(dom, cod)

    def spines(
        head: Term,
        head_ty: Term,
        target: Term,
        env: list[Term],
        usable: list[bool],
        size: int,
    ) -> Iterator[Term]:
        if head_ty == target:
            yield head
            return
        if not isinstance(head_ty, Pi):
            return
        for arg_size in range(1, size):
            for arg in gen(env, usable, head_ty.dom, arg_size):
                rest = beta_eta_normalize(subst(head_ty.cod, 0, arg), fuel)
                yield from spines(
                    App(head, arg), rest, target, env, usable, size - 1 - arg_size
                )

    seen: set[Term] = set()
    out: list[Term] = []
    for cand in gen(env, usable, T, budget.max_term_size):
        if cand in seen:
            continue
        seen.add(cand)
        if check_type(qctx.plain(), cand, T, spec, fuel):
            out.append(cand)
    out.sort(key=_candidate_key)
    return out


def solve_bounded(
    p: Problem, budget: SearchBudget, spec: CubeSpec, fuel: Fuel | None = None
) -> list[Substitution]:
    """Assign enumerated candidates to the unknowns in declaration order
    and keep the assignments that verify as solutions.

    Sound but deliberately incomplete beyond the budget.  The result order
    sorts by largest component first, so enlarging the size budget only
    appends; the list is cut at max_solutions.
    """
    ex_positions = p.qctx.existential_positions()
    found: list[Substitution] = []
    cand_cache: dict[tuple[QContext, Term], list[Term]] = {}

    def image_prefix(sub: Substitution, upto: int) -> QContext:
        decls = []
        for q in range(upto):
            if sub.triple_at(q) is not None:
                continue
            d = p.qctx.decls[q]
            decls.append(QDecl(d.quant, apply_subst_in_prefix(sub, d.ty, q), d.name))
        return QContext(tuple(decls))

    def dfs(i: int, triples: tuple[SubstTriple, ...]) -> None:
        if i == len(ex_positions):
            s = Substitution(p.qctx, triples)
            if is_solution(s, p, spec, fuel):
                found.append(s)
            return
        q = ex_positions[i]
        partial = Substitution(p.qctx, triples)
        ictx = image_prefix(partial, q)
        ty_img = apply_subst_in_prefix(partial, p.qctx.decls[q].ty, q)
        key = (ictx, ty_img)
        if key not in cand_cache:
            cand_cache[key] = enumerate_candidates(ictx, ty_img, budget, spec, fuel)
        for cand in cand_cache[key]:
            dfs(i + 1, triples + (SubstTriple(q, QContext(), cand),))

    dfs(0, ())

    def sol_key(s: Substitution) -> tuple[int, int, tuple[str, ...]]:
        sizes = [decision_size(tr.term) for tr in s.triples] or [0]
        return max(sizes), sum(sizes), tuple(describe(tr.term) for tr in s.triples)

    found.sort(key=sol_key)
    return found[: budget.max_solutions]
