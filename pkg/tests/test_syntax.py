import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recapture.errors import ParseError, SignatureError
from recapture.syntax import (
    BOTTOM,
    CORE,
    SCHEMES,
    Atom,
    AxiomScheme,
    Bounds,
    Compound,
    Sequent,
    Signature,
    atom_names,
    conj,
    count_sequents,
    count_wffs,
    depth,
    disj,
    enumerate_sequents,
    enumerate_wffs,
    formula_key,
    imp,
    instantiate_scheme,
    neg,
    parse_formula,
    parse_sequent,
    render_formula,
    render_sequent,
    sort_formulas,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")
BOXED = Signature.parse("bottom,not,and,or,imp,Box/1,Join/2")


def test_parse_precedence():
    assert parse_formula("~p & q | r -> p") == imp(disj(conj(neg(p), q), r), p)
    assert parse_formula("p -> q -> r") == imp(p, imp(q, r))
    assert parse_formula("~~p") == neg(neg(p))
    assert parse_formula("_|_") == BOTTOM


def test_render_is_fully_parenthesized():
    assert render_formula(imp(conj(p, neg(q)), BOTTOM)) == "((p & (~q)) -> _|_)"
    assert render_formula(p) == "p"
    assert render_sequent(parse_sequent("q, p |- p")) == "p, q |- p"
    assert render_sequent(parse_sequent("|- p | ~p")) == "|- (p | (~p))"


def test_user_connectives():
    f = parse_formula("Box(p) -> Join(p, ~q)", BOXED)
    assert f == imp(Compound("Box", (p,)), Compound("Join", (p, neg(q))))
    assert render_formula(f) == "(Box(p) -> Join(p, (~q)))"
    assert parse_formula(render_formula(f), BOXED) == f


@pytest.mark.parametrize("text", ["p &", "(p", "p q", "Box(p)", "~", "p |- q", "P"])
def test_parse_errors(text):
    with pytest.raises((ParseError, SignatureError)):
        parse_formula(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as exc:
        parse_formula("p & & q")
    assert "4" in str(exc.value) or "5" in str(exc.value)


def test_signature_restricts_parsing():
    with pytest.raises((ParseError, SignatureError)):
        parse_formula("p | q", Signature.of("not", "and"))


def test_sequent_antecedent_is_a_set():
    assert parse_sequent("p, p, q |- p") == parse_sequent("q, p |- p")
    assert len(parse_sequent("p, p |- q").antecedent) == 1


def test_counts_match_enumeration():
    for sig, b in [(CORE, Bounds(1, 2)), (CORE, Bounds(2, 1)), (Signature.of("not", "and"), Bounds(2, 2)),
                   (BOXED, Bounds(1, 1))]:
        assert len(enumerate_wffs(sig, b)) == count_wffs(sig, b)
    assert count_wffs(CORE, Bounds(2, 3)) == 32_732_733
    wffs = enumerate_wffs(Signature.of("not", "and"), Bounds(1, 1, 1))
    assert [render_formula(f) for f in wffs] == ["p", "(~p)", "(p & p)"]
    assert len(enumerate_sequents(wffs, 1)) == count_sequents(3, 1) == 12


def test_enumeration_is_canonical_and_deterministic():
    a = enumerate_wffs(CORE, Bounds(2, 2))
    b = enumerate_wffs(CORE, Bounds(2, 2))
    assert [render_formula(f) for f in a] == [render_formula(f) for f in b]
    keys = [formula_key(f) for f in a]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)  # strict: distinct formulas never tie
    assert sort_formulas(reversed(a)) == a
    assert all(depth(f) <= 2 for f in a)


def test_atom_names():
    assert atom_names(3) == ("p", "q", "r")
    assert atom_names(12)[-1] == "p1"


def test_schemes():
    assert [render_formula(f) for f in instantiate_scheme(SCHEMES["EM"], ["p", "q"])] == [
        "(p | (~p))", "(q | (~q))",
    ]
    two = AxiomScheme.parse("K", "A -> B -> A")
    assert len(instantiate_scheme(two, ["p", "q"])) == 4
    with pytest.raises(ValueError):
        instantiate_scheme(two, [])


# -- properties


def formulas(sig_atoms=("p", "q"), max_depth=3):
    leaves = st.sampled_from([Atom(a) for a in sig_atoms] + [BOTTOM])

    def extend(children):
        return st.one_of(
            children.map(neg),
            st.tuples(children, children).map(lambda t: conj(*t)),
            st.tuples(children, children).map(lambda t: disj(*t)),
            st.tuples(children, children).map(lambda t: imp(*t)),
        )

    return st.recursive(leaves, extend, max_leaves=8).filter(lambda f: depth(f) <= max_depth)


ENUMERATED = frozenset(enumerate_wffs(CORE, Bounds(2, 2)))


@settings(max_examples=300, deadline=None)
@given(formulas(max_depth=2))
def test_enumeration_is_exhaustive(f):
    assert f in ENUMERATED


@settings(max_examples=300, deadline=None)
@given(formulas(("p", "q", "r"), 4))
def test_round_trip(f):
    assert parse_formula(render_formula(f)) == f


@settings(max_examples=200, deadline=None)
@given(st.lists(formulas(), max_size=3), formulas())
def test_sequent_round_trip(ante, succ):
    s = Sequent(ante, succ)
    assert parse_sequent(render_sequent(s)) == s
