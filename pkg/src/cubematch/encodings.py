"""Executable encodings of elementary unification into low-order matching.

Each builder wraps an elementary problem (gamma, u1, u2) in a fixed block
of fresh declarations and emits the matching problem

    t1 = (G (f L c) (f L d))        t2 = (G c d)

where L is a constant function returning the base point and f is the one
new unknown.  Three variants exist:

* build_thm1: needs dependent types; f gets a third-order type.
* build_erratum: needs polymorphism and type constructors; f gets a
  fourth-order type.
* build_thm2_invalid: the superseded variant kept as a regression; it
  needs the same capabilities as build_erratum and f's type has infinite
  order, which is exactly why it is flagged invalid.

Witness transport in both directions is kernel-verified, never assumed.
The Goldfarb-style numeral and solution-shape builders live here too, as
typability regressions over the term-elementary signature.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import CapabilityError, CubeError, ElementarityError, WitnessError
from .problems import (
    INFINITE,
    OrderValue,
    Problem,
    ProblemKind,
    QContext,
    QDecl,
    Quant,
    SubstTriple,
    Substitution,
    apply_subst,
    is_solution,
    is_term_elementary,
    is_type_elementary,
    make_problem,
    order,
)
from .reduction import Fuel
from .terms import PROP, App, Lam, Pi, Term, Var, app, arrow, pick_fresh, shift
from .typecheck import PT, TP, TT, CubeSpec, SortPair, pair_text

__all__ = [
    "ArtifactKind",
    "ReductionArtifact",
    "GoldfarbShapes",
    "build_thm1",
    "thm1_witness",
    "thm1_extract",
    "build_erratum",
    "erratum_witness",
    "build_thm2_invalid",
    "goldfarb_numeral",
    "goldfarb_tpl",
    "goldfarb_solution_shapes",
]


class ArtifactKind(Enum):
    THM1 = "thm1"
    ERRATUM_THM2 = "erratum"
    INVALID_THM2 = "thm2-invalid"


@dataclass(frozen=True)
class ReductionArtifact:
    """A source problem, its constructed matching target, and metadata."""

    kind: ArtifactKind
    source: Problem
    target: Problem
    spec: CubeSpec
    names: Mapping[str, str]
    f_position: int
    f_order: OrderValue
    required_pairs: frozenset[SortPair]
    invalid_per_erratum: bool


def _fresh_names(source: Problem, roles: tuple[str, ...]) -> dict[str, str]:
    taken = {d.name for d in source.qctx.decls if d.name}
    out: dict[str, str] = {}
    for role in roles:
        name = pick_fresh(role, taken)
        taken.add(name)
        out[role] = name
    return out


def _require(spec: CubeSpec, required: frozenset[SortPair], purpose: str) -> None:
    missing = spec.missing(required)
    if missing:
        pairs = ", ".join(pair_text(p) for p in sorted(missing))
        raise CapabilityError(
            f"{spec.label()} lacks {pairs}, needed for {purpose}", missing=missing
        )


def _finish(
    kind: ArtifactKind,
    source: Problem,
    block: tuple[QDecl, ...],
    t1: Term,
    t2: Term,
    spec: CubeSpec,
    names: dict[str, str],
    expected_order: OrderValue,
    required: frozenset[SortPair],
    fuel: Fuel | None,
) -> ReductionArtifact:
    qctx = QContext(source.qctx.decls + block)
    target = make_problem(qctx, t1, t2, spec, fuel)
    if target.kind is not ProblemKind.MATCHING:
        raise CubeError("internal: constructed target is not a matching problem")
    f_pos = len(qctx) - 1
    f_order = order(qctx.decls[f_pos].ty, qctx.prefix(f_pos), fuel)
    if f_order != expected_order:
        raise CubeError(
            f"internal: unknown's type has order {f_order}, expected {expected_order}"
        )
    return ReductionArtifact(
        kind=kind,
        source=source,
        target=target,
        spec=spec,
        names=names,
        f_position=f_pos,
        f_order=f_order,
        required_pairs=required,
        invalid_per_erratum=kind is ArtifactKind.INVALID_THM2,
    )


def build_thm1(
    source: Problem, spec: CubeSpec, fuel: Fuel | None = None
) -> ReductionArtifact:
    """Dependent-types encoding; the new unknown's type is third-order.

    Appends [z:U, P:U->Prop, c:(P z), d:(P z), G:(P z)->(P z)->(P z)] and
    the unknown f : (h:U->U)(P (h u1)) -> (P (h u2)) to the source context.
    """
    required = frozenset({PT})
    _require(spec, required, "the predicate declaration over the base type")
    if not is_term_elementary(source, fuel):
        raise ElementarityError("source problem is not term-elementary")
    g = len(source.qctx)
    names = _fresh_names(source, ("z", "P", "c", "d", "G", "f"))
    u1, u2 = source.lhs, source.rhs

    z = QDecl(Quant.FORALL, Var(g - 1), names["z"])
    p = QDecl(Quant.FORALL, arrow(Var(g), PROP), names["P"])
    c = QDecl(Quant.FORALL, App(Var(0), Var(1)), names["c"])
    d = QDecl(Quant.FORALL, App(Var(1), Var(2)), names["d"])
    pz = App(Var(2), Var(3))
    gg = QDecl(Quant.FORALL, arrow(pz, arrow(pz, pz)), names["G"])
    # f's type, over the g+5 declarations before it.
    u_here = Var(g + 4)
    lhs_atom = App(Var(4), App(Var(0), shift(u1, 6, 0)))  # (P (h u1)), under h
    rhs_atom = App(Var(4), App(Var(0), shift(u2, 6, 0)))
    f_ty = Pi(arrow(u_here, u_here), arrow(lhs_atom, rhs_atom), "h")
    f = QDecl(Quant.EXISTS, f_ty, names["f"])

    m = g + 6
    lam_z = Lam(Var(m - 1), Var(6), "x")  # [x:U]z
    t1 = app(Var(1), app(Var(0), lam_z, Var(3)), app(Var(0), lam_z, Var(2)))
    t2 = app(Var(1), Var(3), Var(2))
    return _finish(
        ArtifactKind.THM1,
        source,
        (z, p, c, d, gg, f),
        t1,
        t2,
        spec,
        names,
        OrderValue.finite(3),
        required,
        fuel,
    )


def build_erratum(
    source: Problem, spec: CubeSpec, fuel: Fuel | None = None
) -> ReductionArtifact:
    """Corrected polymorphic encoding; the unknown's type is fourth-order.

    Appends [P:Prop->Prop, Z:Prop, c:(P Z), d:(P Z), G:(P Z)->(P Z)->(P Z)]
    and f : (h:Prop->Prop)(P (h u1)) -> (P (h u2)) to the source context.
    """
    required = frozenset({TP, TT})
    _require(spec, required, "the polymorphic predicate block")
    if not is_type_elementary(source, spec, fuel):
        raise ElementarityError("source problem is not type-elementary")
    g = len(source.qctx)
    names = _fresh_names(source, ("P", "Z", "c", "d", "G", "f"))
    u1, u2 = source.lhs, source.rhs

    p = QDecl(Quant.FORALL, arrow(PROP, PROP), names["P"])
    z = QDecl(Quant.FORALL, PROP, names["Z"])
    c = QDecl(Quant.FORALL, App(Var(1), Var(0)), names["c"])
    d = QDecl(Quant.FORALL, App(Var(2), Var(1)), names["d"])
    pz = App(Var(3), Var(2))
    gg = QDecl(Quant.FORALL, arrow(pz, arrow(pz, pz)), names["G"])
    lhs_atom = App(Var(5), App(Var(0), shift(u1, 6, 0)))  # (P (h u1)), under h
    rhs_atom = App(Var(5), App(Var(0), shift(u2, 6, 0)))
    f_ty = Pi(arrow(PROP, PROP), arrow(lhs_atom, rhs_atom), "h")
    f = QDecl(Quant.EXISTS, f_ty, names["f"])

    lam_z = Lam(PROP, Var(5), "X")  # [X:Prop]Z
    t1 = app(Var(1), app(Var(0), lam_z, Var(3)), app(Var(0), lam_z, Var(2)))
    t2 = app(Var(1), Var(3), Var(2))
    return _finish(
        ArtifactKind.ERRATUM_THM2,
        source,
        (p, z, c, d, gg, f),
        t1,
        t2,
        spec,
        names,
        OrderValue.finite(4),
        required,
        fuel,
    )


def build_thm2_invalid(
    source: Problem, spec: CubeSpec, fuel: Fuel | None = None
) -> ReductionArtifact:
    """The superseded polymorphic encoding, kept as a negative regression.

    Appends [Z:Prop, c:Z, d:Z, G:Z->Z->Z] and the unknown
    f : (h:Prop->Prop)(h u1) -> (h u2), whose type has infinite order; every
    serialization of the artifact carries the invalid flag.
    """
    required = frozenset({TP, TT})
    _require(spec, required, "the polymorphic block")
    if not is_type_elementary(source, spec, fuel):
        raise ElementarityError("source problem is not type-elementary")
    g = len(source.qctx)
    names = _fresh_names(source, ("Z", "c", "d", "G", "f"))
    u1, u2 = source.lhs, source.rhs

    z = QDecl(Quant.FORALL, PROP, names["Z"])
    c = QDecl(Quant.FORALL, Var(0), names["c"])
    d = QDecl(Quant.FORALL, Var(1), names["d"])
    zr = Var(2)
    gg = QDecl(Quant.FORALL, arrow(zr, arrow(zr, zr)), names["G"])
    lhs_atom = App(Var(0), shift(u1, 5, 0))  # (h u1), under h
    rhs_atom = App(Var(0), shift(u2, 5, 0))
    f_ty = Pi(arrow(PROP, PROP), arrow(lhs_atom, rhs_atom), "h")
    f = QDecl(Quant.EXISTS, f_ty, names["f"])

    lam_z = Lam(PROP, Var(5), "X")  # [X:Prop]Z
    t1 = app(Var(1), app(Var(0), lam_z, Var(3)), app(Var(0), lam_z, Var(2)))
    t2 = app(Var(1), Var(3), Var(2))
    return _finish(
        ArtifactKind.INVALID_THM2,
        source,
        (z, c, d, gg, f),
        t1,
        t2,
        spec,
        names,
        INFINITE,
        required,
        fuel,
    )


def _transport_witness(
    tau: Substitution,
    art: ReductionArtifact,
    dom1: Term,
    pred_index: int,
    fuel: Fuel | None,
) -> Substitution:
    """sigma = tau + {f := [x1:dom1][x2:(P (x1 tau_u1))]x2}.

    Indices are over the image of the block prefix: tau_u1 is hoisted past
    the five block declarations and the x1 binder, and pred_index is the
    predicate's index as seen under x1."""
    tau_u1 = apply_subst(tau, art.source.lhs)
    dom2 = App(Var(pred_index), App(Var(0), shift(tau_u1, 6, 0)))
    tf = Lam(dom1, Lam(dom2, Var(0), "x2"), "x1")
    sigma = Substitution(
        art.target.qctx,
        tau.triples + (SubstTriple(art.f_position, QContext(), tf),),
    )
    if not is_solution(sigma, art.target, art.spec, fuel):
        raise CubeError("internal: transported witness fails kernel verification")
    return sigma


def thm1_witness(
    tau: Substitution, art: ReductionArtifact, fuel: Fuel | None = None
) -> Substitution:
    """Extend a source solution to a target solution; kernel-verified."""
    if art.kind is not ArtifactKind.THM1:
        raise ValueError("artifact was not built by build_thm1")
    if tau.qctx != art.source.qctx or not is_solution(tau, art.source, art.spec, fuel):
        raise WitnessError("tau does not solve the source problem")
    il = tau.image_len
    n = il + 5
    u_here = Var(n - 1)
    # image block slots: z=il, P=il+1, c, d, G; P seen under one binder is Var(4)
    return _transport_witness(tau, art, arrow(u_here, u_here), 4, fuel)


def erratum_witness(
    tau: Substitution, art: ReductionArtifact, fuel: Fuel | None = None
) -> Substitution:
    """Same transport for the corrected polymorphic encoding."""
    if art.kind is not ArtifactKind.ERRATUM_THM2:
        raise ValueError("artifact was not built by build_erratum")
    if tau.qctx != art.source.qctx or not is_solution(tau, art.source, art.spec, fuel):
        raise WitnessError("tau does not solve the source problem")
    # image block slots: P=il, Z, c, d, G; P seen under one binder is Var(5)
    return _transport_witness(tau, art, arrow(PROP, PROP), 5, fuel)


def thm1_extract(
    sigma: Substitution, art: ReductionArtifact, fuel: Fuel | None = None
) -> Substitution:
    """Restrict a target solution to the source unknowns; kernel-verified.

    The target forces the transported unknown to project its second
    argument, which only typechecks when the instantiated sides agree, so
    the restriction must solve the source; failing that is a kernel bug.
    """
    if art.kind is not ArtifactKind.THM1:
        raise ValueError("artifact was not built by build_thm1")
    if sigma.qctx != art.target.qctx or not is_solution(
        sigma, art.target, art.spec, fuel
    ):
        raise WitnessError("sigma does not solve the constructed matching problem")
    g = len(art.source.qctx)
    tau = Substitution(
        art.source.qctx, tuple(tr for tr in sigma.triples if tr.pos < g)
    )
    if not is_solution(tau, art.source, art.spec, fuel):
        raise CubeError("internal: restricted solution fails on the source")
    return tau


@dataclass(frozen=True)
class GoldfarbShapes:
    """Slots of the base type, its constant and the binary operator.

    The context must declare them term-elementary-style: U universal of
    sort Prop, a:U and g:U->U->U universal.
    """

    qctx: QContext
    u_pos: int
    a_pos: int
    g_pos: int

    def __post_init__(self) -> None:
        u, a, g = (self.qctx.decls[p] for p in (self.u_pos, self.a_pos, self.g_pos))
        u_at = lambda pos: Var(pos - 1 - self.u_pos)  # noqa: E731
        if u.quant is not Quant.FORALL or u.ty != PROP:
            raise ValueError("base-type slot must be a universal of sort Prop")
        if a.quant is not Quant.FORALL or a.ty != u_at(self.a_pos):
            raise ValueError("constant slot must be a universal of the base type")
        uu = u_at(self.g_pos)
        if g.quant is not Quant.FORALL or g.ty != arrow(uu, arrow(uu, uu)):
            raise ValueError("operator slot must be universal of type U->U->U")

    @classmethod
    def standard(cls) -> GoldfarbShapes:
        u = QDecl(Quant.FORALL, PROP, "U")
        a = QDecl(Quant.FORALL, Var(0), "a")
        g = QDecl(Quant.FORALL, arrow(Var(1), arrow(Var(1), Var(1))), "g")
        return cls(QContext((u, a, g)), 0, 1, 2)

    def _u(self, depth: int) -> Var:
        return Var(len(self.qctx) - 1 - self.u_pos + depth)

    def _a(self, depth: int) -> Var:
        return Var(len(self.qctx) - 1 - self.a_pos + depth)

    def _g(self, depth: int) -> Var:
        return Var(len(self.qctx) - 1 - self.g_pos + depth)


def goldfarb_numeral(n: int, shapes: GoldfarbShapes) -> Term:
    """[w1:U](g a (g a ... (g a w1))) with n applications of (g a _)."""
    if n < 0:
        raise ValueError("numerals encode naturals")
    body: Term = Var(0)
    for _ in range(n):
        body = app(shapes._g(1), shapes._a(1), body)
    return Lam(shapes._u(0), body, "w1")


def goldfarb_tpl(n_i: int, p: int, shapes: GoldfarbShapes) -> Term:
    """[w1:U][w2:U](g (N(n_i*p) w1) (N(p) w2)) over the numeral builder N.

    The composite first index is read as the numeral of the arithmetic
    product n_i * p (the multiplication-gadget reading; see the docs).
    """
    left = App(shift(goldfarb_numeral(n_i * p, shapes), 2, 0), Var(1))
    right = App(shift(goldfarb_numeral(p, shapes), 2, 0), Var(0))
    body = app(shapes._g(2), left, right)
    return Lam(shapes._u(0), Lam(shapes._u(1), body, "w2"), "w1")


def goldfarb_solution_shapes(
    n_i: int, n_j: int, shapes: GoldfarbShapes
) -> tuple[Term, Term]:
    """The unary shape [w1:U](N(n_i) w1) and the ternary fold

    [w1][w2][w3](g (t_0 w1 w2) (g (t_1 w1 w2) ... (g (t_{n_j-1} w1 w2) w3)))

    over the two-argument shapes t_p = goldfarb_tpl(n_i, p, ...)."""
    f_shape = Lam(
        shapes._u(0), App(shift(goldfarb_numeral(n_i, shapes), 1, 0), Var(0)), "w1"
    )
    acc: Term = Var(0)  # w3
    for p in reversed(range(n_j)):
        tp = shift(goldfarb_tpl(n_i, p, shapes), 3, 0)
        acc = app(shapes._g(3), app(tp, Var(2), Var(1)), acc)
    g_shape = Lam(
        shapes._u(0),
        Lam(shapes._u(1), Lam(shapes._u(2), acc, "w3"), "w2"),
        "w1",
    )
    return f_shape, g_shape
