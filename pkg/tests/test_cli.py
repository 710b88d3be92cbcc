"""Command-line behavior: verdicts, exit codes, file emission."""

from __future__ import annotations

import json

from conftest import FIXTURES
from cubematch.cli import main


def run(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def jrun(capsys, *argv: str) -> tuple[int, dict]:
    code, out = run(capsys, *argv, "--format", "json")
    return code, json.loads(out)


def fx(name: str) -> str:
    return str(FIXTURES / name)


# ------------- check -------------


def test_check_yes(capsys) -> None:
    code, out = run(capsys, "check", fx("thm1_target.prob"))
    assert code == 0 and "yes" in out


def test_check_wrong_calculus_reports_the_missing_pair(capsys) -> None:
    code, payload = jrun(
        capsys, "check", fx("thm1_target.prob"), "--calculus", "stlc"
    )
    assert code == 2
    assert payload["outcome"] == "error"
    assert "Prop-Type" in payload["details"]["error"]["message"]


def test_check_empty_file_is_a_syntax_error(capsys, tmp_path) -> None:
    empty = tmp_path / "empty.prob"
    empty.write_text("")
    code, payload = jrun(capsys, "check", str(empty))
    assert code == 2 and payload["details"]["error"]["kind"] == "ParseError"


# ------------- normalize -------------


def test_normalize_inline_identity_redex(capsys) -> None:
    code, payload = jrun(
        capsys, "normalize", fx("term_source.prob"), "--term", "([x:U]x) a"
    )
    assert code == 0 and payload["details"]["term"] == "a"


def test_normalize_goal_sides(capsys) -> None:
    code, payload = jrun(capsys, "normalize", fx("term_source.prob"))
    assert code == 0
    assert payload["details"]["lhs"] == "F a"
    assert payload["details"]["rhs"] == "a"


def test_normalize_instantiated_goal_collapses_to_the_spine(capsys) -> None:
    # the goal's left side with the unknown replaced by the projection
    # binding reduces to the closed right side
    sigma_t1 = (
        "G (([x1:U -> U][x2:P (x1 a)]x2) ([x:U]z) c)"
        " (([x1:U -> U][x2:P (x1 a)]x2) ([x:U]z) d)"
    )
    code, payload = jrun(
        capsys, "normalize", fx("thm1_target.prob"), "--term", sigma_t1
    )
    assert code == 0 and payload["details"]["term"] == "G c d"


def test_normalize_fuel_exhaustion_is_exit_2(capsys) -> None:
    code, payload = jrun(
        capsys,
        "normalize",
        fx("term_source.prob"),
        "--term",
        "([x:U]x) (([y:U]y) a)",
        "--fuel",
        "1",
    )
    assert code == 2 and payload["details"]["error"]["kind"] == "FuelExhausted"


# ------------- order / classify -------------


def test_order_of_the_constructed_unknowns(capsys) -> None:
    for fixture, expected in [
        ("thm1_target.prob", 3),
        ("erratum_target.prob", 4),
        ("thm2_invalid_target.prob", "inf"),
    ]:
        code, payload = jrun(capsys, "order", fx(fixture), "f")
        assert code == 0 and payload["details"]["order"] == expected


def test_order_unknown_variable(capsys) -> None:
    code, _ = run(capsys, "order", fx("term_source.prob"), "nope")
    assert code == 2


def test_classify(capsys) -> None:
    code, payload = jrun(capsys, "classify", fx("term_source.prob"))
    assert code == 0
    d = payload["details"]
    assert d["kind"] == "matching"
    assert d["term_elementary"] is True
    assert d["type_elementary"] is False
    assert d["max_existential_order"] == 2
    assert "type_elementary_note" in d  # lP lacks type constructors


def test_classify_type_level(capsys) -> None:
    code, payload = jrun(capsys, "classify", fx("type_source.prob"))
    d = payload["details"]
    assert d["type_elementary"] is True and "type_elementary_note" not in d


# ------------- verify -------------


def test_verify_yes_and_no(capsys) -> None:
    code, _ = run(capsys, "verify", fx("term_source.prob"), fx("thm1_tau_identity.subst"))
    assert code == 0
    code, _ = run(capsys, "verify", fx("term_source.prob"), fx("thm1_tau_bad.subst"))
    assert code == 1  # ill-typed binding is a well-posed "no"


def test_verify_transported_solution(capsys) -> None:
    code, _ = run(capsys, "verify", fx("thm1_target.prob"), fx("thm1_sigma.subst"))
    assert code == 0


# ------------- build -------------


def test_build_thm1_output_reparses_and_checks(capsys, tmp_path) -> None:
    out = tmp_path / "t.prob"
    code, payload = jrun(
        capsys, "build", "thm1", fx("term_source.prob"), "-o", str(out)
    )
    assert code == 0
    assert payload["details"]["f_order"] == 3
    assert payload["details"]["invalid_per_erratum"] is False
    code2, _ = run(capsys, "check", str(out))
    assert code2 == 0
    code3, payload3 = jrun(capsys, "order", str(out), "f")
    assert payload3["details"]["order"] == 3


def test_build_matches_the_fixture_transcriptions(capsys, tmp_path) -> None:
    from cubematch.syntax import parse_problem

    for kind, source, fixture in [
        ("thm1", "term_source.prob", "thm1_target.prob"),
        ("erratum", "type_source.prob", "erratum_target.prob"),
        ("thm2-invalid", "type_source.prob", "thm2_invalid_target.prob"),
    ]:
        out = tmp_path / f"{kind}.prob"
        code, _ = run(capsys, "build", kind, fx(source), "-o", str(out))
        assert code == 0
        _, built = parse_problem(out.read_text())
        _, expected = parse_problem((FIXTURES / fixture).read_text())
        assert built == expected, kind


def test_build_capability_failure(capsys, tmp_path) -> None:
    code, payload = jrun(
        capsys,
        "build",
        "erratum",
        fx("type_source.prob"),
        "-o",
        str(tmp_path / "x.prob"),
        "--calculus",
        "lPw-weak",
    )
    assert code == 2
    assert "Type-Prop" in payload["details"]["error"]["message"]


def test_build_flags_the_invalid_variant(capsys, tmp_path) -> None:
    out = tmp_path / "inv.prob"
    code, payload = jrun(
        capsys, "build", "thm2-invalid", fx("type_source.prob"), "-o", str(out)
    )
    assert code == 0
    assert payload["details"]["invalid_per_erratum"] is True
    assert "# invalid-per-erratum: true" in out.read_text()


# ------------- solve -------------


def test_solve_finds_and_reverifies(capsys, tmp_path) -> None:
    code, payload = jrun(capsys, "solve", fx("term_source.prob"), "--size", "4")
    assert code == 0
    assert payload["details"]["count"] == 2
    # every emitted block re-verifies through the verify command
    for i, block in enumerate(payload["details"]["solutions"]):
        sf = tmp_path / f"s{i}.subst"
        sf.write_text(block)
        rc, _ = run(capsys, "verify", fx("term_source.prob"), str(sf))
        assert rc == 0


def test_solve_negative_answer_is_exit_1(capsys, tmp_path) -> None:
    clash = tmp_path / "clash.prob"
    clash.write_text(
        "calculus lP\nforall U : Prop\nforall a : U\nforall b : U\nmatch a = b\n"
    )
    code, payload = jrun(capsys, "solve", str(clash), "--size", "5")
    assert code == 1 and payload["details"]["count"] == 0


def test_missing_file_is_exit_2(capsys) -> None:
    code, _ = run(capsys, "check", "no-such-file.prob")
    assert code == 2
