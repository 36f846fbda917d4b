import json

import pytest

from grho.cli import FAILED, INCONCLUSIVE, OK, USAGE, main
from grho.fixtures import fixture_triples

FIX = fixture_triples()


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_labelling(capsys):
    code, out, _ = run(capsys, "labelling", "dump", "--level", "3")
    rep = json.loads(out)
    assert code == OK and rep["length"] == len(rep["word"]) and "config_hash" in rep
    code, out, _ = run(capsys, "labelling", "verify", "--level", "5", "--max-len", "9")
    assert code == OK and json.loads(out)["ok"]


def test_element_commands(capsys, tmp_path):
    code, out, _ = run(capsys, "element", "eval", "--word", "zeta1", "--x", "1/2")
    assert code == OK and json.loads(out)["x"] == "1/2"
    code, _, _ = run(capsys, "element", "equals", "--word", "zeta1 zeta1^-1", "--word-b", "")
    assert code == OK
    code, _, _ = run(capsys, "element", "equals", "--word", "zeta1", "--word-b", "zeta2")
    assert code == FAILED
    dump = tmp_path / "e.json"
    code, _, _ = run(capsys, "element", "dump", "--word", "chi1 zeta2", "--out", str(dump))
    assert code == OK
    el = tmp_path / "el.json"
    el.write_text(json.dumps(json.loads(dump.read_text())["element"]))
    code, out, _ = run(capsys, "element", "check", "--a", str(el))
    assert code == OK and json.loads(out)["ok"]
    code, _, _ = run(capsys, "element", "equals", "--a", str(el), "--word-b", "chi1 zeta2")
    assert code == OK


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "element", "eval", "--word", "zeta1", "--bogus")[0] == USAGE
    assert run(capsys, "element", "eval", "--word", "zeta1")[0] == USAGE
    assert run(capsys, "element", "eval", "--word", "zeta9", "--x", "0")[0] == USAGE
    assert run(capsys, "nosuch")[0] == USAGE
    bad = tmp_path / "bad.json"
    bad.write_text('{"triple": [1, 2,')
    code, _, err = run(capsys, "witness", "run", "--triple", str(bad))
    assert code == USAGE and "bad.json:1:" in err
    code, _, err = run(capsys, "witness", "run", "--triple", str(tmp_path / "missing.json"))
    assert code == USAGE
    assert run(capsys, "labelling", "dump", "--seed-word", "aa")[0] == USAGE


def test_structure_decompose(capsys, tmp_path):
    f = _write(tmp_path / "f.json", "zeta2 zeta3^-1")
    g = _write(tmp_path / "g.json", "zeta3")
    code, out, _ = run(capsys, "structure", "decompose", "--f", f, "--g", g, "--window", "20")
    rep = json.loads(out)
    assert code == OK and rep["decomposition"]["recomposition"]
    c = _write(tmp_path / "c.json", "chi1")
    code, out, _ = run(capsys, "structure", "decompose", "--f", c, "--g", g, "--window", "20")
    assert code == FAILED and "precondition" in json.loads(out)["error"]


@pytest.mark.parametrize("name", ["A", "B"])
def test_witness_then_replay(capsys, tmp_path, name):
    spec, h = FIX[name]
    if h:
        spec = {**spec, "h_word": h}
    triple = _write(tmp_path / "t.json", spec)
    bundle, cert = str(tmp_path / "bundle.json"), str(tmp_path / "cert.json")
    code, out, _ = run(capsys, "witness", "run", "--triple", triple, "--out", bundle, "--cert", cert)
    assert code == OK and json.loads(out)["status"] == "accepted"
    code, out, _ = run(capsys, "cocycle", "replay", "--cert", cert, "--evidence", bundle)
    assert code == OK and json.loads(out)["accepted"]

    # byte-identical reruns
    bundle2, cert2 = str(tmp_path / "bundle2.json"), str(tmp_path / "cert2.json")
    run(capsys, "witness", "run", "--triple", triple, "--out", bundle2, "--cert", cert2)
    assert open(bundle, "rb").read() == open(bundle2, "rb").read()
    assert open(cert, "rb").read() == open(cert2, "rb").read()

    # corrupt one step
    c = json.loads(open(cert).read())
    c["steps"][0], c["steps"][1] = c["steps"][1], c["steps"][0]
    bad = _write(tmp_path / "bad.json", c)
    code, out, _ = run(capsys, "cocycle", "replay", "--cert", bad, "--evidence", bundle)
    assert code == FAILED and json.loads(out)["failed_step"] == 0


def test_witness_inconclusive(capsys, tmp_path):
    spec, _ = FIX["B"]
    triple = _write(tmp_path / "t.json", spec)
    code, out, _ = run(capsys, "witness", "run", "--triple", triple, "--search-budget", "0")
    assert code == INCONCLUSIVE and json.loads(out)["status"] == "inconclusive"


def test_witness_bad_triple(capsys, tmp_path):
    triple = _write(tmp_path / "t.json", {"triple": ["zeta1", "zeta1", "zeta1"]})
    code, out, _ = run(capsys, "witness", "run", "--triple", triple)
    assert code == FAILED and json.loads(out)["failures"][0][0] == "triple"


def test_malformed_certificate(capsys, tmp_path):
    bundle = _write(tmp_path / "b.json", {})
    cert = _write(tmp_path / "c.json", {"tokens": []})
    assert run(capsys, "cocycle", "replay", "--cert", cert, "--evidence", bundle)[0] == USAGE
