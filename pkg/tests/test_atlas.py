import json
from pathlib import Path

import pytest

from skewcert import atlas

ROOT = Path(__file__).resolve().parents[1]
NAMES = [n for n, _ in atlas.list_fixtures()]


@pytest.fixture(scope="module")
def reports():
    return {r.name: r for r in atlas.run_all()}


def test_list_fixtures():
    assert NAMES == sorted(NAMES)
    for name in ("wehler-pic2", "k3-pic3", "monomial-x-xy", "abelian-ExE", "henon", "cremona-involution",
                 "identity-map"):
        assert name in NAMES
    assert all(summary for _, summary in atlas.list_fixtures())


@pytest.mark.parametrize("name", NAMES)
def test_fixture_passes(reports, name):
    rep = reports[name]
    failed = [r.id for r in rep.results if not r.passed]
    failed += [f"{r.id}/{c['label']}" for r in rep.results for c in r.erratum_checks if not c["passed"]]
    assert rep.passed, failed


def test_unknown_fixture():
    with pytest.raises(atlas.FixtureError, match="unknown fixture 'nope'"):
        atlas.run_fixture("nope")


def _result(reports, fixture, eid):
    return next(r for r in reports[fixture].results if r.id == eid)


def _expectation(fixture, eid):
    return next(e for e in atlas.get_fixture(fixture).expectations if e.id == eid)


def test_spec_examples(reports):
    radius = _result(reports, "wehler-pic2", "W4")
    assert radius.passed and radius.actual == "7 + 4√3"
    assert _expectation("henon", "H1").args["step"] == 4
    cert = _result(reports, "henon", "H1")
    assert cert.passed and cert.actual["verdict"] == "FreeUpTo(3)"
    ident = [r for r in reports["identity-map"].results if r.op == "degree_sequence"]
    assert ident and all(set(r.actual["degrees"]) == {1} for r in ident)


def test_provenance_tags():
    for name in NAMES:
        fx = atlas.get_fixture(name)
        for e in fx.expectations:
            assert e.provenance in {"PAPER", "TRIVIAL", "DERIVED"}
            if e.provenance == "DERIVED":
                assert e.oracle
            if e.erratum:
                assert e.provenance == "DERIVED"
                assert e.erratum["printed"] and e.erratum["corrected"] and e.erratum["checks"]


def test_errata_ids(reports):
    ids = sorted(r.erratum["id"] for rep in reports.values() for r in rep.results if r.erratum)
    assert ids == ["E1", "E2", "E3", "E4", "E5", "E6"]


def test_errata_file_is_current(reports):
    text = atlas.generate_errata(list(reports.values()))
    assert (ROOT / "ERRATA.md").read_text(encoding="utf-8") == text
    assert "FAIL" not in text


def test_runs_are_deterministic():
    first = json.dumps(atlas.run_fixture("monomial-x-xy").to_json(), default=str, sort_keys=True)
    second = json.dumps(atlas.run_fixture("monomial-x-xy").to_json(), default=str, sort_keys=True)
    assert first == second


def test_report_text(reports):
    text = reports["wehler-pic2"].format_text()
    assert text.startswith("fixture wehler-pic2") and text.rstrip().endswith("overall: PASS")
    assert "erratum E1" in text


# -- validation ------------------------------------------------------------------------

def _raw(**over):
    base = {"schema": 1, "name": "t", "kind": "lattice", "summary": "s",
            "inputs": {"lattice": {"gram": [[1]], "generators": {"g": [[1]]}, "compose": ["g"]}},
            "expectations": [{"id": "X1", "op": "signature", "expected": [1, 0], "provenance": "TRIVIAL"}]}
    base.update(over)
    return base


def test_fixture_validation():
    fx = atlas.Fixture.from_json(_raw())
    assert atlas.validate_fixture(fx) == []
    with pytest.raises(atlas.FixtureError, match="schema"):
        atlas.Fixture.from_json(_raw(schema=2))
    with pytest.raises(atlas.FixtureError, match="without an oracle"):
        atlas.Fixture.from_json(_raw(expectations=[{"id": "X1", "op": "signature", "expected": [1, 0],
                                                    "provenance": "DERIVED"}]))
    with pytest.raises(atlas.FixtureError, match="bad provenance"):
        atlas.Fixture.from_json(_raw(expectations=[{"id": "X1", "op": "signature", "expected": [1, 0],
                                                    "provenance": "GUESS"}]))
    with pytest.raises(atlas.FixtureError, match="unknown operation"):
        atlas.Fixture.from_json(_raw(expectations=[{"id": "X1", "op": "frobnicate", "expected": 1,
                                                    "provenance": "TRIVIAL"}]))
    with pytest.raises(atlas.FixtureError, match="erratum must sit on a DERIVED"):
        atlas.Fixture.from_json(_raw(expectations=[{
            "id": "X1", "op": "signature", "expected": [1, 0], "provenance": "PAPER",
            "erratum": {"id": "E9", "printed": "a", "corrected": "b", "note": "n", "checks": []}}]))


@pytest.mark.parametrize("expected,actual,ok", [
    ({"a": 1}, {"a": 1, "b": 2}, True),
    ({"a": 1}, {"b": 2}, False),
    ({"approx": 1.5, "tol": 0.1}, 1.55, True),
    ({"approx": 1.5, "tol": 0.01}, 1.55, False),
    ([1, 2], [1, 2, 3], False),
    (True, 1, False),
    ("7 + 4√3", "7 + 4√3", True),
])
def test_matches(expected, actual, ok):
    assert atlas.matches(expected, actual) is ok
