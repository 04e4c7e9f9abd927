"""The quotient route against direct enumeration."""

import itertools

import pytest

from recapture.engines.intuitionistic import Prover
from recapture.engines.matrix import CLASSICAL, K3, L3, LP, matrix_validates
from recapture.quotient import (
    IntuitionisticAlgebra,
    MatrixAlgebra,
    ProductAlgebra,
    Side,
    Universe,
    sweep,
)
from recapture.syntax import CORE, Bounds, Signature, count_wffs, enumerate_wffs, iter_sequents, sequent_key


def _brute_groups(wffs, key_of):
    first, counts = {}, {}
    for f in wffs:
        k = key_of(f)
        first.setdefault(k, f)
        counts[k] = counts.get(k, 0) + 1
    return {(str(first[k]), counts[k]) for k in first}


def _implicit_limit(sig, bounds):
    """Explicit layers up to depth-1, the deepest one scanned implicitly."""
    return count_wffs(sig, Bounds(bounds.atoms, bounds.depth - 1))


@pytest.mark.parametrize("sig, bounds", [
    (CORE, Bounds(1, 2)),
    (CORE, Bounds(2, 2)),
    (Signature.of("not", "or"), Bounds(2, 3)),
])
def test_universe_matches_enumeration(sig, bounds):
    alg = MatrixAlgebra(LP, bounds.atom_names)
    u = Universe(sig, bounds, alg, explicit_limit=_implicit_limit(sig, bounds))
    assert u.materialized_depth == bounds.depth - 1
    wffs = enumerate_wffs(sig, bounds)
    assert u.total == len(wffs) == count_wffs(sig, bounds)

    def key_of(f):
        return LP.vectors([f], bounds.atom_names)[0].tobytes()

    got = {(str(e.first), e.count) for e in u.entries}
    assert got == _brute_groups(wffs, key_of)
    orders = [e.order for e in u.entries]
    assert orders == sorted(orders)


def _canonical_first(wffs, ante, differs):
    bad = [s for s in iter_sequents(wffs, ante) if differs(s)]
    return (min(bad, key=lambda s: (len(s.antecedent), sequent_key(s))) if bad else None), len(bad)


@pytest.mark.parametrize("m1, m2, sig, bounds", [
    (LP, CLASSICAL, CORE, Bounds(1, 1, 2)),
    (K3, L3, CORE, Bounds(2, 1, 2)),
    (LP, K3, Signature.of("not", "and", "or"), Bounds(2, 2, 1)),
])
def test_matrix_sweep_matches_brute_force(m1, m2, sig, bounds):
    atoms = bounds.atom_names
    a, b = MatrixAlgebra(m1, atoms), MatrixAlgebra(m2, atoms)
    u = Universe(sig, bounds, ProductAlgebra([a, b]), explicit_limit=_implicit_limit(sig, bounds))
    r = sweep(u, Side(a, 0), Side(b, 1), bounds.ante, count=True)
    wffs = enumerate_wffs(sig, bounds)
    witness, n = _canonical_first(wffs, bounds.ante, lambda s: matrix_validates(m1, s) != matrix_validates(m2, s))
    assert r.disagreements == n
    assert r.sequents == len(list(iter_sequents(wffs, bounds.ante)))
    assert (r.witness is None) == (witness is None)
    if witness is not None:
        assert len(r.witness.antecedent) == len(witness.antecedent)
        assert matrix_validates(m1, r.witness) != matrix_validates(m2, r.witness)


def test_intuitionistic_sweep_matches_brute_force():
    bounds = Bounds(1, 2, 2)
    sig = Signature.of("not", "or", "imp")
    atoms = bounds.atom_names
    j, k = IntuitionisticAlgebra(atoms), MatrixAlgebra(CLASSICAL, atoms)
    u = Universe(sig, bounds, ProductAlgebra([j, k]), explicit_limit=_implicit_limit(sig, bounds))
    r = sweep(u, Side(j, 0), Side(k, 1), 2, count=True)
    prover = Prover()
    wffs = enumerate_wffs(sig, bounds)
    n = sum(
        prover.derives(s.antecedent, s.succedent) != matrix_validates(CLASSICAL, s)
        for s in iter_sequents(wffs, 2)
    )
    assert r.disagreements == n > 0
    assert str(r.witness) == "|- (p | (~p))"


def test_intuitionistic_classes_are_prover_exact():
    atoms = ("p",)
    alg = IntuitionisticAlgebra(atoms, worlds=1)
    u = Universe(CORE, Bounds(1, 2), alg)
    prover = Prover()
    reps = [e.first for e in u.entries]
    for a, b in itertools.combinations(reps[:60], 2):
        assert not (prover.derives([a], b) and prover.derives([b], a)), (a, b)
    # one-world fingerprints are classical; the classes they merge wrongly are recorded
    assert alg.collisions
