import json

import pytest

from rtlmosaic.certificate import check_certificate, dumps
from rtlmosaic.rms import decide_sat, decide_valid

from certmutations import mutants

DEEP = "G(p -> U(p,p)) & G(p -> F !p) & G(!p -> F p)"


@pytest.fixture(scope="module")
def certs():
    out = {}
    for text in ["p", "S(p, q) & !q", "U(U(!q, q), !p)", DEEP]:
        out[text] = decide_sat(text).certificate
    return out


def test_round_trip(certs):
    for text, cert in certs.items():
        assert check_certificate(cert)
        assert check_certificate(dumps(cert), text)
        assert check_certificate(json.loads(dumps(cert)))


def test_invalid_certificate_carries_negation():
    v = decide_valid("p")
    assert check_certificate(v.certificate, "!p")


def test_wrong_formula_rejected(certs):
    res = check_certificate(certs["p"], "q")
    assert not res and res.path == "$.formula"


def test_deleted_cover_formula_rejected(certs):
    cert = json.loads(dumps(certs["p"]))
    node = cert["nodes"][cert["root"]]
    node["mosaic"]["cover"].pop()
    res = check_certificate(cert)
    assert not res and res.path.startswith("$.nodes[")


def test_empty_ps_rejected(certs):
    cert = json.loads(dumps(certs["p"]))
    node = next(n for n in cert["nodes"] if n["rule"] == "shuffle")
    node["ps"] = []
    res = check_certificate(cert)
    assert not res and res.path.endswith(".ps")


def test_composition_tag_must_match_parts(certs):
    cert = json.loads(dumps(certs["S(p, q) & !q"]))
    node = next(n for n in cert["nodes"] if n["rule"] == "composition")
    node["tag"] = "1"
    res = check_certificate(cert)
    assert not res and "highest part tag" in res.clause


@pytest.mark.parametrize("blob", ["", "[]", "{}", '{"format": "rtlmosaic-certificate"}', "not json"])
def test_garbage_rejected(blob):
    assert not check_certificate(blob)


def test_trail_certificate_shape(certs):
    nodes = certs[DEEP]["nodes"]
    assert any(n["rule"] in ("lead", "trail") for n in nodes)
    for n in nodes:
        if n["rule"] in ("lead", "trail"):
            assert n["tag"].endswith(("+", "-"))


@pytest.mark.parametrize("text", ["p", "S(p, q) & !q", DEEP])
def test_mutations_rejected(certs, text):
    for what, cert in mutants(certs[text], seed=7):
        res = check_certificate(cert)
        assert not res, what
        assert res.path.startswith("$")
