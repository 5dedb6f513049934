import json

import pytest
from hypothesis import given, settings

from csvqe.errors import ParseError
from csvqe.io import bundled, dumps, load, loads, parse_hamiltonian, save
from csvqe.oracle import exact_ground_energy
from strategies import hamiltonians


@settings(max_examples=100, deadline=None)
@given(hamiltonians(max_n=4))
def test_round_trip(h):
    back = loads(dumps(h, {"name": "x"}))
    assert back.hamiltonian == h
    assert back.metadata == {"name": "x"}


def test_save_load(tmp_path):
    h = bundled("example_3q").hamiltonian
    path = tmp_path / "h.json"
    save(h, path)
    hf = load(path)
    assert hf.hamiltonian == h and hf.source == str(path)


def test_identity_label_folds_into_constant():
    hf = parse_hamiltonian({"n": 2, "terms": {"II": 0.5, "ZI": 1.0}, "constant": 0.25})
    assert hf.hamiltonian.constant == 0.75 and len(hf.hamiltonian) == 1


def test_bundled_fixtures():
    ex = bundled("example_3q").hamiltonian
    assert ex.n == 3 and len(ex) == 14
    assert exact_ground_energy(ex) == pytest.approx(-3.9622, abs=1e-4)
    h2 = bundled("h2_like").hamiltonian
    assert h2.n == 4
    with pytest.raises(ParseError):
        bundled("nope")


@pytest.mark.parametrize("doc, needle", [
    ([], "top level"),
    ({"terms": {}}, "'n'"),
    ({"n": 0, "terms": {}}, "'n'"),
    ({"n": True, "terms": {}}, "'n'"),
    ({"n": 2}, "'terms'"),
    ({"n": 2, "terms": {"ZZ": 1}, "extra": 1}, "extra"),
    ({"n": 2, "terms": {"ZZZ": 1}}, "'ZZZ'"),
    ({"n": 2, "terms": {"ZA": 1}}, "'ZA'"),
    ({"n": 2, "terms": {"ZZ": "1"}}, "'ZZ'"),
    ({"n": 2, "terms": {"ZZ": float("nan")}}, "'ZZ'"),
    ({"n": 2, "terms": {}, "constant": None}, "'constant'"),
    ({"n": 2, "terms": {}, "metadata": []}, "'metadata'"),
])
def test_errors_name_the_offender(doc, needle):
    with pytest.raises(ParseError, match=needle.replace("(", r"\(")):
        parse_hamiltonian(doc, "f.json")


def test_json_syntax_error_reports_line():
    text = '{\n  "n": 2,\n  "terms": {"ZZ": 1,}\n}'
    with pytest.raises(ParseError, match="line 3"):
        loads(text, "bad.json")


def test_missing_file(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        load(tmp_path / "absent.json")


def test_dumps_is_sorted_json():
    h = bundled("example_3q").hamiltonian
    doc = json.loads(dumps(h))
    assert list(doc["terms"]) == sorted(doc["terms"])
