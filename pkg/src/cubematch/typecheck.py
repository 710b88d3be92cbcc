"""Context formation and type synthesis for the eight cube calculi.

A calculus is a rule set R of sort pairs steering product formation; the
synthesis rules are syntax-directed, so one pass computes the (normal-form)
type when it exists and a precise error when it does not.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import (
    ContextError,
    CubeError,
    NoRuleApplies,
    NotAType,
    SortPairMissing,
    TypeHasNoType,
    TypingError,
)
from .reduction import Fuel, beta_eta_normalize, equivalent
from .terms import TYPE, App, Lam, Pi, Sort, Term, Var, describe, shift, subst

__all__ = [
    "SortPair",
    "PP",
    "PT",
    "TP",
    "TT",
    "ALL_PAIRS",
    "CubeSpec",
    "PRESETS",
    "cube_spec",
    "Decl",
    "Context",
    "wf_context",
    "infer_type",
    "check_type",
    "sort_of",
]

SortPair = tuple[str, str]

PP: SortPair = ("Prop", "Prop")
PT: SortPair = ("Prop", "Type")
TP: SortPair = ("Type", "Prop")
TT: SortPair = ("Type", "Type")
ALL_PAIRS: frozenset[SortPair] = frozenset({PP, PT, TP, TT})


def pair_text(pair: SortPair) -> str:
    return f"{pair[0]}-{pair[1]}"


@dataclass(frozen=True)
class CubeSpec:
    """The rule set selecting one calculus; Prop-Prop is always present."""

    rules: frozenset[SortPair]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if not self.rules <= ALL_PAIRS:
            raise ValueError("rules must be sort pairs over Prop/Type")
        if PP not in self.rules:
            raise ValueError("the pair Prop-Prop is mandatory")

    def allows(self, pair: SortPair) -> bool:
        return pair in self.rules

    def missing(self, required: Iterable[SortPair]) -> frozenset[SortPair]:
        return frozenset(required) - self.rules

    def label(self) -> str:
        if self.name:
            return self.name
        pairs = ", ".join(pair_text(p) for p in sorted(self.rules))
        return f"custom ({pairs})"


PRESETS: dict[str, CubeSpec] = {
    "stlc": CubeSpec(frozenset({PP}), name="stlc"),
    "lP": CubeSpec(frozenset({PP, PT}), name="lP"),
    "l2": CubeSpec(frozenset({PP, TP}), name="l2"),
    "lw-weak": CubeSpec(frozenset({PP, TT}), name="lw-weak"),
    "lw": CubeSpec(frozenset({PP, TP, TT}), name="lw"),
    "lP2": CubeSpec(frozenset({PP, PT, TP}), name="lP2"),
    "lPw-weak": CubeSpec(frozenset({PP, PT, TT}), name="lPw-weak"),
    "coc": CubeSpec(ALL_PAIRS, name="coc"),
}


def cube_spec(name: str) -> CubeSpec:
    """Look up a calculus preset by its surface name."""
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(PRESETS)
        raise CubeError(f"unknown calculus {name!r}; expected one of: {known}") from None


@dataclass(frozen=True)
class Decl:
    """One declaration x:T; the name is display-only."""

    ty: Term
    name: str | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Context:
    """Ordered declarations, outermost first; Var(0) is the innermost."""

    decls: tuple[Decl, ...] = ()

    def __len__(self) -> int:
        return len(self.decls)

    def __iter__(self) -> Iterator[Decl]:
        return iter(self.decls)

    def extended(self, ty: Term, name: str | None = None) -> Context:
        return Context(self.decls + (Decl(ty, name),))

    def prefix(self, length: int) -> Context:
        return Context(self.decls[:length])

    def lookup(self, index: int) -> Term:
        """Type of Var(index), shifted into the full context."""
        pos = len(self.decls) - 1 - index
        if pos < 0:
            raise NoRuleApplies(f"unbound de Bruijn index {index}")
        return shift(self.decls[pos].ty, index + 1, 0)

    def names(self) -> list[str | None]:
        return [d.name for d in self.decls]


def sort_of(ctx: Context, T: Term, spec: CubeSpec, fuel: Fuel | None = None) -> Sort:
    """The sort of T (Prop or Type); errors when T is not a type."""
    ty = infer_type(ctx, T, spec, fuel)
    if not isinstance(ty, Sort):
        raise NotAType(f"{describe(T)} has type {describe(ty)}, not a sort")
    return ty


def wf_context(ctx: Context, spec: CubeSpec, fuel: Fuel | None = None) -> None:
    """Every declared type must be well-sorted in its prefix."""
    for q, d in enumerate(ctx.decls):
        try:
            sort_of(ctx.prefix(q), d.ty, spec, fuel)
        except TypingError as e:
            label = d.name or f"#{q}"
            pair = e.pair if isinstance(e, SortPairMissing) else None
            raise ContextError(
                f"declaration {q} ({label}) is ill-formed: {e.message}",
                position=q,
                name=d.name,
                pair=pair,
            ) from e


def infer_type(ctx: Context, t: Term, spec: CubeSpec, fuel: Fuel | None = None) -> Term:
    """Synthesize the normal-form type of t; the context is trusted.

    Both judgements of the calculus are covered: wf_context for contexts,
    this function for terms.  Conversion happens only at application
    arguments; every returned type is beta-eta normal.
    """
    match t:
        case Sort("Prop"):
            return TYPE
        case Sort(_):
            raise TypeHasNoType("the sort Type has no type")
        case Var(k):
            return beta_eta_normalize(ctx.lookup(k), fuel)
        case Pi(dom, cod, hint):
            s1 = sort_of(ctx, dom, spec, fuel)
            s2 = sort_of(ctx.extended(dom, hint), cod, spec, fuel)
            pair = (s1.tag, s2.tag)
            if not spec.allows(pair):
                raise SortPairMissing(
                    pair,
                    f"product {describe(t)} needs the sort pair {pair_text(pair)},"
                    f" which {spec.label()} lacks",
                )
            return s2
        case Lam(dom, body, hint):
            s1 = sort_of(ctx, dom, spec, fuel)
            inner = ctx.extended(dom, hint)
            body_ty = infer_type(inner, body, spec, fuel)
            s2 = sort_of(inner, body_ty, spec, fuel)
            pair = (s1.tag, s2.tag)
            if not spec.allows(pair):
                raise SortPairMissing(
                    pair,
                    f"abstraction {describe(t)} would live in a product needing"
                    f" the sort pair {pair_text(pair)}, which {spec.label()} lacks",
                )
            return beta_eta_normalize(Pi(dom, body_ty, hint), fuel)
        case App(fn, arg):
            fn_ty = infer_type(ctx, fn, spec, fuel)
            if not isinstance(fn_ty, Pi):
                raise NoRuleApplies(
                    f"cannot apply {describe(fn)}: its type {describe(fn_ty)}"
                    " is not a product"
                )
            arg_ty = infer_type(ctx, arg, spec, fuel)
            if not equivalent(arg_ty, fn_ty.dom, fuel):
                raise NoRuleApplies(
                    f"argument {describe(arg)} has type {describe(arg_ty)},"
                    f" but {describe(fn_ty.dom)} is expected"
                )
            return beta_eta_normalize(subst(fn_ty.cod, 0, arg), fuel)
    raise AssertionError("unreachable")


def check_type(
    ctx: Context, t: Term, T: Term, spec: CubeSpec, fuel: Fuel | None = None
) -> bool:
    """True iff the synthesized type converts to T (T itself is trusted)."""
    actual = infer_type(ctx, t, spec, fuel)
    return equivalent(actual, T, fuel)
