import itertools
import json

from recapture.syntax import SCHEMES, Bounds
from recapture.systems import IDENTITY, J, K, LP_SYSTEM, RecaptureConstraint
from recapture.taxonomy import (
    ANCHORS,
    EQUIVALENCE_CAVEAT,
    RECONSTRUCTION_NOTE,
    REPORT_FORMAT,
    StanceAnswers,
    Tri,
    classify_stance,
    derive_formal_answers,
)

ALL = list(itertools.product(Tri, Tri, Tri, (True, False, None)))


def test_totality():
    stances = {classify_stance(StanceAnswers(*v)).stance for v in ALL}
    assert stances == {
        "notational-variant", "reactionary right", "centre right", "centre left", "radical left", "indeterminate",
    }
    for v in ALL:
        r = classify_stance(StanceAnswers(*v, Bounds()))
        assert RECONSTRUCTION_NOTE in r.notes
        assert "answers hold at these bounds only" in r.render()
        assert (r.stance == "indeterminate") == (r.blocking is not None)


def test_extension_means_supplement():
    for eq, rec, m in itertools.product(Tri, Tri, (True, False, None)):
        r = classify_stance(StanceAnswers(eq, Tri.YES, rec, m))
        assert r.relation == "supplement"


def test_non_extension_means_rival():
    for rec, m in itertools.product(Tri, (True, False, None)):
        assert classify_stance(StanceAnswers(Tri.NO, Tri.NO, rec, m)).relation == "rival"


def test_interpretation_is_ignored_without_recapture():
    for eq, ce in itertools.product(Tri, Tri):
        reports = {classify_stance(StanceAnswers(eq, ce, Tri.NO, m)).to_dict()["stance"] for m in (True, False, None)}
        assert len(reports) == 1


def test_equivalence_short_circuits():
    r = classify_stance(StanceAnswers(Tri.YES, Tri.NO, Tri.NO, None))
    assert r.stance == "notational-variant" and EQUIVALENCE_CAVEAT in r.notes


def test_unknown_never_guesses():
    r = classify_stance(StanceAnswers(Tri.NO, Tri.NO, Tri.UNKNOWN, True))
    assert r.stance == "indeterminate" and r.blocking == "recaptures"
    r = classify_stance(StanceAnswers(Tri.NO, Tri.NO, Tri.YES, None))
    assert r.blocking == "meaningful"


def test_report_document():
    r = classify_stance(StanceAnswers(Tri.NO, Tri.NO, Tri.YES, True, Bounds(2, 3, 2)))
    d = json.loads(json.dumps(r.to_dict()))
    assert d["format"] == REPORT_FORMAT
    assert d["anchor"] == ANCHORS["centre right"]
    assert d["bounds"] == "atoms<=2, depth<=3, ante<=2"
    text = r.render()
    for key in ("stance", "relation", "role"):
        assert f"{key}: {d[key]}" in text


def test_tri_of():
    assert Tri.of(True) is Tri.YES and Tri.of(None) is Tri.UNKNOWN and Tri.of("no") is Tri.NO


def test_derived_answers():
    em = RecaptureConstraint.relativization(SCHEMES["EM"])
    a = derive_formal_answers(J, K, (IDENTITY, IDENTITY), em, Bounds(2, 2, 1))
    assert (a.equivalent, a.conservative_extension, a.recaptures) == (Tri.NO, Tri.NO, Tri.YES)
    assert classify_stance(a).blocking == "meaningful"
    b = derive_formal_answers(LP_SYSTEM, K, bounds=Bounds(2, 1, 2))
    assert b.recaptures is Tri.UNKNOWN and classify_stance(b).stance == "indeterminate"
