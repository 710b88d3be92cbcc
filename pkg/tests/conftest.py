"""Shared fixtures: standard contexts and the canonical source problems."""

from __future__ import annotations

from pathlib import Path

import pytest

from cubematch import (
    PROP,
    App,
    Problem,
    QContext,
    QDecl,
    Quant,
    Var,
    arrow,
    cube_spec,
    make_problem,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def lp():
    return cube_spec("lP")


@pytest.fixture
def lw():
    return cube_spec("lw")


@pytest.fixture
def stlc():
    return cube_spec("stlc")


@pytest.fixture
def term_source(lp) -> Problem:
    """[forall U:Prop; forall a:U; exists F:U->U] with goal (F a) = a."""
    qctx = QContext(
        (
            QDecl(Quant.FORALL, PROP, "U"),
            QDecl(Quant.FORALL, Var(0), "a"),
            QDecl(Quant.EXISTS, arrow(Var(1), Var(1)), "F"),
        )
    )
    return make_problem(qctx, App(Var(0), Var(1)), Var(1), lp)


@pytest.fixture
def type_source(lw) -> Problem:
    """[forall A:Prop; exists X:Prop] with goal X = A."""
    qctx = QContext(
        (QDecl(Quant.FORALL, PROP, "A"), QDecl(Quant.EXISTS, PROP, "X"))
    )
    return make_problem(qctx, Var(0), Var(1), lw)
