"""CLI contract tests: exit codes, JSON round-trips, table/JSON parity."""

import json

import pytest

from p2models.cli import main
from p2models.dvr import make_ring
from p2models.fiber import FiberClass
from p2models.models import ModelDescriptor

CANON = json.dumps({"p": 3, "M": 12, "m": 3, "n": 3,
                    "a_digits": [0, 1, 1], "j": 1})
TWIST = json.dumps({"p": 3, "M": 12, "m": 3, "n": 3,
                    "a_digits": [0, 2, 2], "j": 2})


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_ring_info(capsys):
    code, out, _ = run(capsys, "ring-info", "--p", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["e"] == 6 and doc["v_lam1"] == 3
    assert doc["eta_digits_mod_pi^p"] == [0, 1, 1]


def test_phi_canonical_cell(capsys):
    code, out, _ = run(capsys, "phi", "--p", "3", "--m", "3", "--n", "3")
    doc = json.loads(out)
    assert code == 0
    assert doc["surjective"] is True
    assert [(e["a_digits"], e["j"]) for e in doc["elements"]] == \
        [([0, 0, 0], 0), ([0, 1, 1], 1), ([0, 2, 2], 2)]


def test_phi_brute_matches(capsys):
    _, out1, _ = run(capsys, "phi", "--p", "3", "--m", "2", "--n", "1")
    _, out2, _ = run(capsys, "phi", "--p", "3", "--m", "2", "--n", "1",
                     "--brute")
    assert json.loads(out1)["elements"] == json.loads(out2)["elements"]


def test_enumerate_m_max_zero(capsys):
    code, out, _ = run(capsys, "enumerate", "--p", "3", "--m-max", "0")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["models"]) == 1
    assert doc["models"][0]["m"] == 0 and doc["models"][0]["n"] == 0


def test_isomorphic_example(capsys):
    code, out, _ = run(capsys, "isomorphic", "--left", CANON,
                       "--right", TWIST)
    assert code == 0
    assert json.loads(out)["isomorphic"] is True


def test_hom_with_brute(capsys):
    code, out, _ = run(capsys, "hom", "--left", CANON, "--right", TWIST,
                       "--brute")
    doc = json.loads(out)
    assert code == 0
    assert doc["hom"]["class"] == "OrderP2"
    assert doc["brute"]["class"] == "OrderP2"


def test_fiber_verify(capsys):
    code, out, _ = run(capsys, "fiber", "--descriptor", CANON, "--verify")
    doc = json.loads(out)
    assert code == 0
    assert doc["fiber"] == {"class": "ZpByZp", "a": 0, "b": 1}
    assert doc["verified"] is True


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--descriptor", CANON)
    assert code == 0
    bad = json.dumps({"p": 3, "M": 12, "m": 2, "n": 2,
                      "a_digits": [0, 0], "j": 1})  # (0,1) not in Phi
    code, out, err = run(capsys, "verify", "--descriptor", bad)
    assert code == 1


def test_validation_exit_code(capsys):
    code, _, err = run(capsys, "phi", "--p", "4", "--m", "1", "--n", "1")
    assert code == 2 and "odd prime" in err
    code, _, err = run(capsys, "phi", "--p", "3", "--m", "1", "--n", "2")
    assert code == 2
    code, _, err = run(capsys, "isomorphic", "--left", "{oops",
                       "--right", CANON)
    assert code == 2


def test_descriptor_json_roundtrip():
    ring = make_ring(3, 12)
    d = ModelDescriptor.from_json(ring, json.loads(CANON))
    assert ModelDescriptor.from_json(ring, d.to_json()) == d


def test_fiberclass_json_roundtrip():
    fc = FiberClass("AlphaPExtension", (1, 2))
    assert FiberClass.from_json(fc.to_json()) == fc


def test_table_and_json_same_data(capsys):
    _, out_json, _ = run(capsys, "phi", "--p", "3", "--m", "3", "--n", "1")
    _, out_tab, _ = run(capsys, "phi", "--p", "3", "--m", "3", "--n", "1",
                        "--table")
    doc = json.loads(out_json)
    lines = [l for l in out_tab.splitlines()[2:] if l.strip()]
    assert len(lines) == len(doc["elements"])
    for line, el in zip(lines, doc["elements"]):
        a_str, j_str = line.split()
        digits = [] if a_str == "0" and not el["a_digits"] else \
            [int(x) for x in a_str.split(".")]
        assert digits == el["a_digits"]
        assert int(j_str) == el["j"]


def test_out_file(tmp_path, capsys):
    target = tmp_path / "out.json"
    code, out, _ = run(capsys, "ring-info", "--p", "3", "--out", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["p"] == 3


def test_dump_series_golden(capsys):
    code, out, _ = run(capsys, "dump-series", "--p", "3", "--degree", "6")
    doc = json.loads(out)
    assert code == 0
    assert doc["coefficients"][:4] == ["1", "1", "1/2", "1/2"]


def test_selftest_subset(capsys):
    code, out, _ = run(capsys, "selftest", "--p", "3",
                       "--criteria", "2,13,neg")
    doc = json.loads(out)
    assert code == 0
    assert [r["criterion"] for r in doc] == ["2", "13", "neg"]
    assert all(r["passed"] for r in doc)


def test_verify_emit_presentation(capsys):
    code, out, _ = run(capsys, "verify", "--descriptor", CANON,
                       "--emit-presentation")
    doc = json.loads(out)
    assert code == 0
    pres = doc["presentation"]
    assert pres["generators"] == ["S1", "S2"]
    assert len(pres["relations"]) == 2
    assert len(pres["units"]) == 2
