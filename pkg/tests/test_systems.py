import pytest
from hypothesis import given, settings

from recapture.engines.intuitionistic import intuitionistic_validates
from recapture.errors import BoundsTooLarge, ConstraintError, SignatureError
from recapture.syntax import (
    CORE, SCHEMES, Atom, Bounds, Sequent, Signature, count_wffs, depth, disj, neg, parse_sequent,
)
from recapture.systems import (
    DOUBLE_NEGATION,
    FAILS,
    GODEL_GENTZEN,
    HOLDS,
    IDENTITY,
    NOT_APPLICABLE,
    PREDICATES,
    J,
    K,
    K3_SYSTEM,
    L3_SYSTEM,
    LP_SYSTEM,
    RecaptureConstraint,
    TranslationMap,
    check_conservative_extension,
    check_equivalence,
    check_recapture,
    check_translation,
    compare_theorems,
    coverage,
    find_divergence,
    fragment,
    lacks,
    max_depth,
    provably_decidable,
    relativize,
    snapshot,
    subsystem,
)

from .test_syntax import formulas

EM = RecaptureConstraint.relativization(SCHEMES["EM"])
NOT_AND = Signature.of("not", "and")
SMALL = Bounds(1, 1, 1)


def test_snapshot_examples():
    k = snapshot(fragment(K, NOT_AND), SMALL)
    assert k.summary() == "3 wffs, 12 sequents, 5 valid"
    assert [str(s) for s in k.valid_sequents()] == [
        "p |- p", "p |- (p & p)", "(~p) |- (~p)", "(p & p) |- p", "(p & p) |- (p & p)",
    ]
    assert snapshot(fragment(J, NOT_AND), SMALL).valid_sequents() == k.valid_sequents()
    tiny = snapshot(fragment(K, NOT_AND), Bounds(1, 0, 0))
    assert (len(tiny.wffs), tiny.sequent_count, tiny.valid_count) == (1, 1, 0)


def test_snapshot_refuses_huge_bounds():
    with pytest.raises(BoundsTooLarge):
        snapshot(K, Bounds(2, 3, 2))


def test_fragment():
    frag = fragment(K, NOT_AND)
    full = snapshot(K, Bounds(1, 1, 1))
    part = snapshot(frag, Bounds(1, 1, 1))
    parent = dict(zip(full.sequents(), full.bitmap))
    assert all(parent[s] == bit for s, bit in zip(part.sequents(), part.bitmap))
    with pytest.raises(SignatureError):
        fragment(K, CORE)
    assert fragment(L3_SYSTEM, Signature.of("not")).signature == Signature.of("not")


def _coherent(sub, parent, bounds):
    child = snapshot(sub, bounds)
    full = snapshot(parent, bounds)
    parent_bits = dict(zip(full.sequents(), full.bitmap))
    assert all(parent_bits[s] == bit for s, bit in zip(child.sequents(), child.bitmap))
    return child


def test_subsystems_are_coherent():
    b = Bounds(1, 2, 1)
    shallow = _coherent(subsystem(K, max_depth(1)), K, b)
    assert all(depth(f) <= 1 for f in shallow.wffs) and len(shallow.wffs) == count_wffs(CORE, Bounds(1, 1))
    no_imp = _coherent(subsystem(K, lacks("imp")), K, b)
    frag = snapshot(fragment(K, Signature.of("bottom", "not", "and", "or")), b)
    assert no_imp.wffs == frag.wffs and no_imp.bits == frag.bits


def test_literal_decidability_keeps_only_theorems_and_refutables():
    b = Bounds(1, 2, 0)
    decided = snapshot(subsystem(J, provably_decidable(J)), b)
    parent = snapshot(J, b)
    for f in parent.wffs:
        settled = intuitionistic_validates(Sequent([], f)) or intuitionistic_validates(Sequent([], neg(f)))
        assert (f in decided.wffs) == settled
    assert len(decided.wffs) < len(parent.wffs)


def test_relativize():
    rel = relativize(J, SCHEMES["EM"])
    assert rel.validates(parse_sequent("|- p | ~p"))
    assert rel.validates(parse_sequent("|- ((p -> q) -> p) -> p"))
    assert not rel.validates(parse_sequent("|- p -> q"))
    assert snapshot(relativize(K, SCHEMES["EM"]), Bounds(1, 1, 2)).bits == snapshot(K, Bounds(1, 1, 2)).bits
    with pytest.raises(SignatureError):
        relativize(fragment(K, NOT_AND), SCHEMES["EM"])


@pytest.mark.parametrize("method, bounds", [("quotient", Bounds()), ("explicit", Bounds(1, 1, 1))])
def test_equivalence_examples(method, bounds):
    kk = check_equivalence(K, K, bounds=bounds, method=method)
    assert kk.outcome == HOLDS and kk.coverage == 1.0
    jk = check_equivalence(J, K, bounds=Bounds(1, 2, 1) if method == "explicit" else bounds, method=method)
    assert jk.outcome == FAILS and str(jk.witness) == "|- (p | (~p))"
    lp_star = RecaptureConstraint.restriction(["t", "f"]).apply(LP_SYSTEM)
    assert check_equivalence(lp_star, K, bounds=bounds, method=method).outcome == HOLDS


def test_equivalence_is_symmetric():
    for a, b in [(J, K), (LP_SYSTEM, K), (K3_SYSTEM, L3_SYSTEM)]:
        assert check_equivalence(a, b).outcome == check_equivalence(b, a).outcome


def test_failed_verdicts_revalidate():
    for v in [check_equivalence(J, K), check_equivalence(LP_SYSTEM, K), check_equivalence(K3_SYSTEM, K)]:
        assert v.outcome == FAILS
        verdicts = [val for key, val in v.details.items() if key.startswith("valid_in_")]
        assert len(verdicts) == 2 and verdicts[0] != verdicts[1]
        d = v.to_dict()
        assert d["outcome"] == FAILS and d["witness"] == str(v.witness)


def test_conservative_extension_examples():
    assert check_conservative_extension(K, fragment(K, NOT_AND)).outcome == HOLDS
    v = check_conservative_extension(J, K)
    assert v.outcome == NOT_APPLICABLE and v.reason == "signature"
    small = fragment(K, NOT_AND)
    v = check_conservative_extension(L3_SYSTEM, small)
    assert v.outcome == FAILS
    assert small.validates(v.witness) and not L3_SYSTEM.validates(v.witness)
    explicit = check_conservative_extension(L3_SYSTEM, small, Bounds(1, 3, 0), method="explicit")
    assert explicit.witness == check_conservative_extension(L3_SYSTEM, small, Bounds(1, 3, 0)).witness


def test_recapture_examples():
    assert check_recapture(J, K, EM).outcome == HOLDS
    assert check_recapture(LP_SYSTEM, K, RecaptureConstraint.restriction(["t", "f"])).outcome == HOLDS
    v = check_recapture(K, J, EM)
    assert v.outcome == FAILS and str(v.witness) == "|- (p | (~p))"
    with pytest.raises(ConstraintError):
        check_recapture(J, K, RecaptureConstraint.restriction(["t", "f"]))


def test_literal_decidability_recapture_degenerates():
    c = RecaptureConstraint.wff_predicate("decidable", PREDICATES["decidable"])
    starred = c.apply(J)
    # atoms are not J-decidable, so even p |- p leaves the subsystem's language
    v = check_recapture(J, K, c, bounds=Bounds(1, 1, 1))
    assert v.outcome == FAILS and str(v.witness) == "p |- p"
    assert not starred.admits(v.witness)
    deeper = check_recapture(J, K, c, bounds=Bounds(2, 2, 1))
    assert str(deeper.witness) == "|- (p | (~p))" and not starred.admits(deeper.witness)


def test_theorem_comparison():
    r = compare_theorems(K3_SYSTEM, K, Bounds(1, 1, 0))
    assert not r.theorems_equal and str(r.theorem_witness) == "(p -> p)"
    kk = compare_theorems(K, K)
    assert kk.theorems_equal and kk.consequence_equal


def test_divergence():
    w = find_divergence(LP_SYSTEM, K)
    assert K.validates(w) and not LP_SYSTEM.validates(w)
    assert str(w) == "(p & (~p)) |- q"
    assert find_divergence(K, K) is None
    assert str(find_divergence(J, K)) == "|- (p | (~p))"


@pytest.mark.parametrize("f", [DOUBLE_NEGATION, GODEL_GENTZEN])
def test_negative_translations(f):
    assert check_translation(K, J, f, Bounds(2, 2, 1)).outcome == HOLDS
    assert check_translation(K, J, f, Bounds(1, 1, 1), method="explicit").outcome == HOLDS
    assert check_translation(K, J, IDENTITY, Bounds(1, 2, 0)).outcome == FAILS


def test_custom_maps_use_the_explicit_route():
    swap = TranslationMap.custom("em-wrap", lambda a: disj(a, neg(a)), lambda d: d + 2)
    v = check_translation(K, K, swap, Bounds(1, 1, 1))
    assert v.outcome == FAILS and v.method == "explicit"
    assert check_translation(K, K, swap, Bounds(2, 3, 2)).outcome == NOT_APPLICABLE


def test_coverage():
    assert coverage(K, J, IDENTITY, Bounds(1, 2, 0)) == 1.0
    dn = coverage(K, J, DOUBLE_NEGATION, Bounds(1, 2, 0))
    assert 0 < dn < 1
    v = check_equivalence(K, J, DOUBLE_NEGATION, DOUBLE_NEGATION, Bounds(1, 1, 1))
    assert v.outcome == FAILS


@settings(max_examples=300, deadline=None)
@given(formulas(("p", "q", "r"), 4))
def test_declared_depth_growth(f):
    for m in (IDENTITY, DOUBLE_NEGATION, GODEL_GENTZEN):
        assert depth(m(f)) <= m.depth_bound(depth(f))


def test_goedel_gentzen_bound_is_tight():
    f = Atom("p")
    for d in range(5):
        assert depth(GODEL_GENTZEN(f)) == GODEL_GENTZEN.depth_bound(d)
        f = disj(f, f)
