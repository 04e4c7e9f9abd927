"""Consequence systems and the relations between them.

A system couples a class of formulas (its language) with a validity
procedure on sequents over that language. Systems can be derived from one
another by dropping connectives (:func:`fragment`), by filtering formulas
(:func:`subsystem`) or by adding scheme instances to every antecedent
(:func:`relativize`).

Relations are checked exhaustively within :class:`~recapture.syntax.Bounds`.
Each check has two routes. The *explicit* route enumerates every sequent and
asks both validity procedures. The *quotient* route (see
:mod:`recapture.quotient`) checks once per pattern of semantic keys and so
reaches bounds where the sequents number in the billions. ``method="auto"``
prefers the quotient route and falls back to the explicit one when a system
or map has no key algebra. Verdicts only ever claim agreement *at bounds*.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .engines.intuitionistic import Budget, Prover
from .engines.matrix import BUILTIN_MATRICES, CLASSICAL, Matrix, MatrixDecider, restrict_matrix
from .errors import (
    BoundsTooLarge,
    BudgetExhausted,
    ConstraintError,
    CoverageError,
    SignatureError,
)
from .quotient import (
    Algebra,
    DecidableAlgebra,
    DepthAlgebra,
    IntuitionisticAlgebra,
    LacksAlgebra,
    MatrixAlgebra,
    PredicateAlgebra,
    ProductAlgebra,
    RelativizedAlgebra,
    Side,
    SubsystemAlgebra,
    TranslationAlgebra,
    Universe,
    interderivability_labels,
    sweep,
)
from .syntax import (
    CORE,
    AxiomScheme,
    Atom,
    Bounds,
    Compound,
    Formula,
    Sequent,
    Signature,
    conj,
    connectives_of,
    count_sequents,
    count_wffs,
    depth,
    disj,
    enumerate_wffs,
    instantiate_scheme,
    iter_sequents,
    neg,
)

DEFAULT_BUDGET = Budget()
EXPLICIT_SEQUENT_LIMIT = 2_000_000

HOLDS = "holds-at-bounds"
FAILS = "fails"
NOT_APPLICABLE = "not-applicable"


# --------------------------------------------------------------------------
# systems


class ConsequenceSystem:
    """A language plus a validity procedure.

    Sequents that use formulas outside the language are never valid.
    Key algebras are built lazily and cached per (atoms, budget).
    """

    kind = "abstract"

    def __init__(self, name: str, signature: Signature, parent: "ConsequenceSystem | None" = None):
        self.name = name
        self.signature = signature
        self.parent = parent
        self._names = signature.names
        self._algebras: dict[tuple, Algebra] = {}

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} over {self.signature}>"

    def in_language(self, f: Formula) -> bool:
        return connectives_of(f) <= self._names

    def admits(self, s: Sequent) -> bool:
        return self.in_language(s.succedent) and all(self.in_language(f) for f in s.antecedent)

    def decider(self, budget: Budget = DEFAULT_BUDGET) -> Callable[[Sequent], bool]:
        """A validity test that may share work across calls (e.g. a prover memo)."""
        inner = self._decider(budget)
        return lambda s: self.admits(s) and inner(s)

    def validates(self, s: Sequent, budget: Budget = DEFAULT_BUDGET) -> bool:
        return self.decider(budget)(s)

    def _decider(self, budget: Budget) -> Callable[[Sequent], bool]:
        raise NotImplementedError

    def algebra(self, atoms: Sequence[str], budget: Budget = DEFAULT_BUDGET) -> Algebra:
        key = (tuple(atoms), budget)
        got = self._algebras.get(key)
        if got is None:
            got = self._algebras[key] = self._algebra(tuple(atoms), budget)
        return got

    def _algebra(self, atoms: tuple[str, ...], budget: Budget) -> Algebra:
        raise CoverageError(f"{self.name} has no key algebra")

    @property
    def root(self) -> "ConsequenceSystem":
        return self if self.parent is None else self.parent.root

    def describe(self) -> str:
        return f"{self.name} ({self.kind}, signature {self.signature})"


class MatrixSystem(ConsequenceSystem):
    kind = "matrix"

    def __init__(self, matrix: Matrix, name: str | None = None, signature: Signature | None = None):
        sig = matrix.signature if signature is None else signature
        if not sig <= matrix.signature:
            raise SignatureError(f"matrix {matrix.name} has no tables for part of {sig}")
        super().__init__(name or matrix.name, sig)
        self.matrix = matrix

    def _decider(self, budget):
        return MatrixDecider(self.matrix)

    def _algebra(self, atoms, budget):
        return MatrixAlgebra(self.matrix, atoms)

    def bitmap(self, wffs: Sequence[Formula], bounds: Bounds) -> np.ndarray:
        """Validity of every sequent over ``wffs`` in canonical order, vectorized."""
        vecs = self.matrix.vectors(list(wffs), bounds.atom_names)
        des = self.matrix.designated_mask[vecs]
        out = []
        for k in range(bounds.ante + 1):
            for combo in itertools.combinations(range(len(wffs)), k):
                prem = des[list(combo)].all(axis=0) if combo else np.ones(des.shape[1], bool)
                out.append(~(prem[None, :] & ~des).any(axis=1))
        return np.concatenate(out) if out else np.zeros(0, bool)


class IntuitionisticSystem(ConsequenceSystem):
    kind = "intuitionistic"

    def __init__(self, name: str = "J", signature: Signature = CORE):
        if not signature <= CORE:
            raise SignatureError("the intuitionistic engine only covers the core connectives")
        super().__init__(name, signature)

    def _decider(self, budget):
        prover = Prover()
        return lambda s: prover.derives(s.antecedent, s.succedent, budget.steps)

    def _algebra(self, atoms, budget):
        return IntuitionisticAlgebra(atoms, budget.worlds, steps=budget.steps)


class FragmentSystem(ConsequenceSystem):
    kind = "fragment"

    def _decider(self, budget):
        return self.parent.decider(budget)

    def _algebra(self, atoms, budget):
        return self.parent.algebra(atoms, budget)


class SubsystemSystem(ConsequenceSystem):
    kind = "subsystem"

    def __init__(self, name: str, parent: ConsequenceSystem, predicate: "WffPredicate"):
        super().__init__(name, parent.signature, parent)
        self.predicate = predicate

    def in_language(self, f: Formula) -> bool:
        return self.parent.in_language(f) and self.predicate.test(f)

    def _decider(self, budget):
        return self.parent.decider(budget)

    def _algebra(self, atoms, budget):
        if self.predicate.algebra is None:
            raise CoverageError(f"predicate {self.predicate.name} has no key algebra")
        return SubsystemAlgebra(self.parent.algebra(atoms, budget), self.predicate.algebra(atoms, budget))


class RelativizedSystem(ConsequenceSystem):
    kind = "relativized"

    def __init__(self, name: str, parent: ConsequenceSystem, scheme: AxiomScheme):
        super().__init__(name, parent.signature, parent)
        self.scheme = scheme

    def premises(self, s: Sequent) -> list[Formula]:
        atoms = sorted(s.atoms())
        return instantiate_scheme(self.scheme, atoms) if atoms else []

    def _decider(self, budget):
        inner = self.parent.decider(budget)
        return lambda s: inner(Sequent([*s.antecedent, *self.premises(s)], s.succedent))

    def _algebra(self, atoms, budget):
        parent = self.parent.algebra(atoms, budget)
        return RelativizedAlgebra(parent, lambda chosen: instantiate_scheme(self.scheme, chosen), atoms)


K = MatrixSystem(CLASSICAL, "K", CORE)
J = IntuitionisticSystem()
LP_SYSTEM = MatrixSystem(BUILTIN_MATRICES["LP"])
K3_SYSTEM = MatrixSystem(BUILTIN_MATRICES["K3"])
L3_SYSTEM = MatrixSystem(BUILTIN_MATRICES["L3"])
BUILTIN_SYSTEMS: dict[str, ConsequenceSystem] = {
    "K": K, "J": J, "LP": LP_SYSTEM, "K3": K3_SYSTEM, "L3": L3_SYSTEM,
}


def fragment(sys: ConsequenceSystem, subsig: Signature, name: str | None = None) -> ConsequenceSystem:
    """Same validity, restricted to a proper sub-signature."""
    if not subsig < sys.signature:
        raise SignatureError(f"{subsig} is not a proper subset of {sys.name}'s signature {sys.signature}")
    return FragmentSystem(name or f"{sys.name}|{{{','.join(sorted(subsig.names))}}}", subsig, sys)


def subsystem(sys: ConsequenceSystem, pred: "WffPredicate", name: str | None = None) -> ConsequenceSystem:
    """Same validity over the formulas that satisfy ``pred``."""
    return SubsystemSystem(name or f"{sys.name}[{pred.name}]", sys, pred)


def relativize(sys: ConsequenceSystem, scheme: AxiomScheme, name: str | None = None) -> ConsequenceSystem:
    """Validity with the scheme's instances over the sequent's atoms as extra premises."""
    missing = scheme.connectives() - sys.signature.names
    if missing:
        raise SignatureError(f"scheme {scheme.name} uses {sorted(missing)}, outside {sys.name}'s signature")
    return RelativizedSystem(name or f"{sys.name}+{scheme.name}", sys, scheme)


def matrix_system(m: Matrix, name: str | None = None) -> MatrixSystem:
    return MatrixSystem(m, name)


# --------------------------------------------------------------------------
# wff predicates and recapture constraints


@dataclass(frozen=True)
class WffPredicate:
    """A decidable test on formulas, optionally with a compositional key algebra."""

    name: str
    test: Callable[[Formula], bool] = field(compare=False)
    algebra: Callable[[tuple[str, ...], Budget], PredicateAlgebra] | None = field(default=None, compare=False)

    def __call__(self, f: Formula) -> bool:
        return self.test(f)


def lacks(*names: str) -> WffPredicate:
    banned = frozenset(names)
    return WffPredicate(
        f"no-{'-'.join(sorted(banned))}",
        lambda f: not (connectives_of(f) & banned),
        lambda atoms, budget: LacksAlgebra(banned),
    )


def max_depth(k: int) -> WffPredicate:
    return WffPredicate(f"depth<={k}", lambda f: depth(f) <= k, lambda atoms, budget: DepthAlgebra(k))


def provably_decidable(host: ConsequenceSystem, budget: Budget = DEFAULT_BUDGET) -> WffPredicate:
    """Formulas A with ``host |- A | ~A``."""
    decide = host.decider(budget)
    return WffPredicate(
        f"decidable-in-{host.name}",
        lambda f: decide(Sequent([], disj(f, neg(f)))),
        lambda atoms, b: DecidableAlgebra(host.algebra(atoms, b)),
    )


def _lacks_factory(conn: str) -> Callable[[ConsequenceSystem], WffPredicate]:
    return lambda host: lacks(conn)


PREDICATES: dict[str, Callable[[ConsequenceSystem], WffPredicate]] = {
    "decidable": lambda host: provably_decidable(host),
    **{f"no-{c}": _lacks_factory(c) for c in ("bottom", "not", "and", "or", "imp")},
}


@dataclass(frozen=True)
class RecaptureConstraint:
    """How to carve the host's subsystem: a wff predicate, a relativizing
    scheme, or a subset of the host matrix's values."""

    name: str
    kind: str
    scheme: AxiomScheme | None = None
    values: tuple[str, ...] | None = None
    predicate: Callable[[ConsequenceSystem], WffPredicate] | None = field(default=None, compare=False)

    @classmethod
    def relativization(cls, scheme: AxiomScheme) -> "RecaptureConstraint":
        return cls(f"relativize:{scheme.name}", "relativization", scheme=scheme)

    @classmethod
    def restriction(cls, values: Iterable[str]) -> "RecaptureConstraint":
        vals = tuple(values)
        return cls(f"restrict:{','.join(vals)}", "matrix-restriction", values=vals)

    @classmethod
    def wff_predicate(cls, name: str, factory: Callable[[ConsequenceSystem], WffPredicate]) -> "RecaptureConstraint":
        return cls(f"predicate:{name}", "wff-predicate", predicate=factory)

    def apply(self, host: ConsequenceSystem) -> ConsequenceSystem:
        if self.kind == "relativization":
            try:
                return relativize(host, self.scheme)
            except SignatureError as exc:
                raise ConstraintError(str(exc)) from None
        if self.kind == "matrix-restriction":
            if not isinstance(host, MatrixSystem):
                raise ConstraintError(f"{self.name} needs a matrix host; {host.name} is {host.kind}")
            return MatrixSystem(restrict_matrix(host.matrix, self.values), signature=host.signature)
        if self.kind == "wff-predicate":
            return subsystem(host, self.predicate(host))
        raise ConstraintError(f"unknown constraint kind {self.kind!r}")


# --------------------------------------------------------------------------
# translations


def _gg(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return neg(neg(f))
    if f.connective == "or":
        a, b = (_gg(x) for x in f.args)
        return neg(conj(neg(a), neg(b)))
    return Compound(f.connective, tuple(_gg(x) for x in f.args))


@dataclass(frozen=True)
class TranslationMap:
    """A formula transformer applied pointwise to sequents.

    ``mode`` names a built-in transformer the quotient route understands;
    custom maps leave it unset and are checked explicitly.
    """

    name: str
    fn: Callable[[Formula], Formula] = field(compare=False)
    mode: str | None = None
    growth: Callable[[int], int] = field(default=lambda d: d, compare=False)

    def __call__(self, f: Formula) -> Formula:
        return self.fn(f)

    def sequent(self, s: Sequent) -> Sequent:
        return s.map(self.fn)

    def depth_bound(self, d: int) -> int:
        """Upper bound on the depth of an image of a depth-``d`` formula."""
        return self.growth(d)

    @classmethod
    def custom(cls, name: str, fn: Callable[[Formula], Formula],
               growth: Callable[[int], int] | None = None) -> "TranslationMap":
        return cls(name, fn, None, growth or (lambda d: d))


IDENTITY = TranslationMap("identity", lambda f: f, "identity", lambda d: d)
DOUBLE_NEGATION = TranslationMap("double-negation", lambda f: neg(neg(f)), "double-negation", lambda d: d + 2)
GODEL_GENTZEN = TranslationMap("goedel-gentzen", _gg, "goedel-gentzen", lambda d: 3 * d + 2)
TRANSLATIONS = {t.name: t for t in (IDENTITY, DOUBLE_NEGATION, GODEL_GENTZEN)}


# --------------------------------------------------------------------------
# snapshots


@dataclass(frozen=True)
class Snapshot:
    """Every bounded sequent of a system with one validity bit each."""

    system: str
    signature: Signature
    bounds: Bounds
    wffs: tuple[Formula, ...]
    bits: bytes  # packed, most significant bit first

    @property
    def sequent_count(self) -> int:
        return count_sequents(len(self.wffs), self.bounds.ante)

    @property
    def valid_count(self) -> int:
        return int(self.bitmap.sum())

    @property
    def bitmap(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.bits, dtype=np.uint8), count=self.sequent_count).astype(bool)

    def sequents(self) -> list[Sequent]:
        return list(iter_sequents(self.wffs, self.bounds.ante))

    def valid_sequents(self) -> list[Sequent]:
        return [s for s, v in zip(iter_sequents(self.wffs, self.bounds.ante), self.bitmap) if v]

    def summary(self) -> str:
        return f"{len(self.wffs)} wffs, {self.sequent_count} sequents, {self.valid_count} valid"


def system_wffs(sys: ConsequenceSystem, bounds: Bounds) -> list[Formula]:
    if count_wffs(sys.signature, bounds) > EXPLICIT_SEQUENT_LIMIT:
        raise BoundsTooLarge(f"{count_wffs(sys.signature, bounds):,} formulas at {bounds} is too many to list")
    return [f for f in enumerate_wffs(sys.signature, bounds) if sys.in_language(f)]


def _explicit_guard(n_wffs: int, bounds: Bounds) -> None:
    n = count_sequents(n_wffs, bounds.ante)
    if n > EXPLICIT_SEQUENT_LIMIT:
        raise BoundsTooLarge(
            f"{n:,} sequents at {bounds} exceeds the explicit limit of {EXPLICIT_SEQUENT_LIMIT:,}"
        )


def snapshot(sys: ConsequenceSystem, bounds: Bounds, budget: Budget = DEFAULT_BUDGET) -> Snapshot:
    """Decide every bounded sequent of ``sys`` directly."""
    wffs = system_wffs(sys, bounds)
    _explicit_guard(len(wffs), bounds)
    if isinstance(sys, MatrixSystem):
        bits = sys.bitmap(wffs, bounds)
    else:
        decide = sys.decider(budget)
        bits = np.array([decide(s) for s in iter_sequents(wffs, bounds.ante)], dtype=bool)
    return Snapshot(sys.name, sys.signature, bounds, tuple(wffs), np.packbits(bits).tobytes())


# --------------------------------------------------------------------------
# verdicts


@dataclass
class Verdict:
    outcome: str
    bounds: Bounds
    witness: Sequent | None = None
    coverage: float | None = None
    notes: list[str] = field(default_factory=list)
    reason: str | None = None
    method: str | None = None
    details: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.outcome == HOLDS

    @property
    def fails(self) -> bool:
        return self.outcome == FAILS

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "bounds": {"atoms": self.bounds.atoms, "depth": self.bounds.depth, "ante": self.bounds.ante},
            "witness": None if self.witness is None else str(self.witness),
            "coverage": self.coverage,
            "reason": self.reason,
            "method": self.method,
            "notes": list(self.notes),
            "details": {k: (str(v) if isinstance(v, (Sequent,)) else v) for k, v in self.details.items()},
        }


def _not_applicable(bounds: Bounds, reason: str, note: str, method: str | None = None) -> Verdict:
    return Verdict(NOT_APPLICABLE, bounds, reason=reason, notes=[note], method=method)


@dataclass
class _Found:
    witness: Sequent | None
    examined: int
    method: str
    image_vks: list[int] | None = None


def _routes(method: str):
    if method not in ("auto", "explicit", "quotient"):
        raise ValueError(f"method must be auto, explicit or quotient, not {method!r}")
    return ("quotient", "explicit") if method == "auto" else (method,)


def _run(method: str, quotient_fn, explicit_fn):
    """Try the routes in order; collect why each one was unavailable."""
    why = []
    for route in _routes(method):
        fn = quotient_fn if route == "quotient" else explicit_fn
        try:
            return fn(), why
        except CoverageError as exc:
            why.append(f"{route} route unavailable: {exc}")
        except BoundsTooLarge as exc:
            why.append(f"{route} route too large: {exc}")
    return None, why


def _translation_quotient(a, b, f, bounds, budget) -> _Found:
    if f.mode is None:
        raise CoverageError(f"map {f.name} has no key algebra")
    atoms = bounds.atom_names
    A = a.algebra(atoms, budget)
    if a is b and f.mode == "identity":
        return _Found(None, 0, "definitional")
    T = TranslationAlgebra(b.algebra(atoms, budget), f.mode, b.signature)
    u = Universe(a.signature, bounds, ProductAlgebra([A, T]))
    r = sweep(u, Side(A, 0), Side(T, 1), bounds.ante, accept=[Side(A, 0)])
    return _Found(r.witness, r.sequents, "quotient")


def _translation_explicit(a, b, f, bounds, budget) -> _Found:
    wffs = system_wffs(a, bounds)
    _explicit_guard(len(wffs), bounds)
    da, db = a.decider(budget), b.decider(budget)
    n = 0
    for s in iter_sequents(wffs, bounds.ante):
        n += 1
        if da(s) != db(f.sequent(s)):
            return _Found(s, n, "explicit")
    return _Found(None, n, "explicit")


def check_translation(a: ConsequenceSystem, b: ConsequenceSystem, f: TranslationMap, bounds: Bounds,
                      budget: Budget = DEFAULT_BUDGET, method: str = "auto") -> Verdict:
    """Does ``f`` preserve validity both ways: valid_a(s) iff valid_b(f(s)) for bounded a-sequents?"""
    try:
        found, why = _run(
            method,
            lambda: _translation_quotient(a, b, f, bounds, budget),
            lambda: _translation_explicit(a, b, f, bounds, budget),
        )
    except BudgetExhausted as exc:
        return _not_applicable(bounds, "budget", f"proof search gave up: {exc}")
    if found is None:
        return _not_applicable(bounds, "too-large", "; ".join(why))
    notes = [f"{a.name} -> {b.name} under {f.name}, checked by the {found.method} route", *why]
    if found.witness is None:
        return Verdict(HOLDS, bounds, notes=notes, method=found.method)
    image = f.sequent(found.witness)
    details = {
        "direction": f"{a.name}->{b.name}",
        "map": f.name,
        "image": str(image),
        f"valid_in_{a.name}": a.validates(found.witness, budget),
        f"valid_in_{b.name}": b.validates(image, budget),
    }
    return Verdict(FAILS, bounds, witness=found.witness, notes=notes, method=found.method, details=details)


def _coverage_shortcut(a, b, f) -> bool:
    return f.mode == "identity" and b.signature <= a.signature and not isinstance(a, SubsystemSystem)


def _coverage_quotient(a, b, f, bounds, budget) -> float:
    if f.mode is None:
        raise CoverageError(f"map {f.name} has no key algebra")
    atoms = bounds.atom_names
    A, B = a.algebra(atoms, budget), b.algebra(atoms, budget)
    T = TranslationAlgebra(B, f.mode, b.signature)
    ua = Universe(a.signature, bounds, ProductAlgebra([A, T]))
    keys = [e.key for e in ua.entries]
    akeys, tkeys = ua.algebra.part(0, keys), ua.algebra.part(1, keys)
    image = set()
    for ak, tk in zip(akeys, tkeys):
        if not A.accepts(A.vkey(int(ak))):
            continue
        tv = T.target_vkey(T.vkey(int(tk)))
        if tv >= 0 and B.accepts(tv):
            image.add(tv)
    ub = Universe(b.signature, bounds, B)
    targets = {B.vkey(e.key) for e in ub.entries}
    targets = {v for v in targets if B.accepts(v)}
    pool = sorted(targets | image)
    labels = dict(zip(pool, interderivability_labels(B, pool)))
    wanted = {labels[v] for v in targets}
    hit = {labels[v] for v in image} & wanted
    return len(hit) / len(wanted) if wanted else 1.0


def _coverage_explicit(a, b, f, bounds, budget) -> float:
    bw = system_wffs(b, bounds)
    aw = system_wffs(a, bounds)
    if len(bw) * (len(bw) + len(aw)) > EXPLICIT_SEQUENT_LIMIT:
        raise BoundsTooLarge("too many formulas for explicit coverage")
    db = b.decider(budget)
    reps: list[Formula] = []
    for x in bw:
        if not any(db(Sequent([x], r)) and db(Sequent([r], x)) for r in reps):
            reps.append(x)
    hit = set()
    for x in aw:
        y = f(x)
        if not b.in_language(y):
            continue
        for i, r in enumerate(reps):
            if i not in hit and db(Sequent([y], r)) and db(Sequent([r], y)):
                hit.add(i)
                break
    return len(hit) / len(reps) if reps else 1.0


def coverage(a: ConsequenceSystem, b: ConsequenceSystem, f: TranslationMap, bounds: Bounds,
             budget: Budget = DEFAULT_BUDGET, method: str = "auto") -> float | None:
    """Share of b's bounded interderivability classes met by f-images of bounded a-formulas."""
    if _coverage_shortcut(a, b, f):
        return 1.0
    got, _ = _run(
        method,
        lambda: _coverage_quotient(a, b, f, bounds, budget),
        lambda: _coverage_explicit(a, b, f, bounds, budget),
    )
    return got


def check_equivalence(a: ConsequenceSystem, b: ConsequenceSystem, f: TranslationMap = IDENTITY,
                      g: TranslationMap = IDENTITY, bounds: Bounds = Bounds(),
                      budget: Budget = DEFAULT_BUDGET, method: str = "auto") -> Verdict:
    """Both maps preserve validity both ways, and both are onto at bounds."""
    forward = check_translation(a, b, f, bounds, budget, method)
    if forward.outcome != HOLDS:
        return forward
    backward = check_translation(b, a, g, bounds, budget, method)
    if backward.outcome != HOLDS:
        return backward
    notes = forward.notes + backward.notes
    try:
        cov_f = coverage(a, b, f, bounds, budget, method)
        cov_g = coverage(b, a, g, bounds, budget, method)
    except BudgetExhausted as exc:
        return _not_applicable(bounds, "budget", f"proof search gave up while measuring coverage: {exc}")
    if cov_f is None or cov_g is None:
        return _not_applicable(bounds, "too-large", "coverage could not be measured at these bounds")
    cov = min(cov_f, cov_g)
    notes.append(f"coverage {f.name}: {cov_f:.4f}; {g.name}: {cov_g:.4f}")
    identity = f.mode == "identity" and g.mode == "identity"
    if cov < 1.0 and not identity:
        return Verdict(FAILS, bounds, coverage=cov, notes=notes + ["a map misses some target classes"],
                       method=forward.method, reason="not-surjective")
    return Verdict(HOLDS, bounds, coverage=cov, notes=notes, method=forward.method)


def _same_language_quotient(small, big, bounds, budget, max_ante, accept_both=False) -> _Found:
    atoms = bounds.atom_names
    S, B = small.algebra(atoms, budget), big.algebra(atoms, budget)
    if small is big:
        return _Found(None, 0, "definitional")
    sig = small.signature if not accept_both else Signature(small.signature.connectives & big.signature.connectives)
    u = Universe(sig, bounds, ProductAlgebra([S, B]))
    accept = [Side(S, 0), Side(B, 1)] if accept_both else [Side(S, 0)]
    r = sweep(u, Side(S, 0), Side(B, 1), max_ante, accept=accept)
    return _Found(r.witness, r.sequents, "quotient")


def _same_language_explicit(small, big, bounds, budget, max_ante, accept_both=False) -> _Found:
    b = Bounds(bounds.atoms, bounds.depth, max_ante)
    sig = small.signature if not accept_both else Signature(small.signature.connectives & big.signature.connectives)
    wffs = [f for f in enumerate_wffs(sig, b) if small.in_language(f) and (not accept_both or big.in_language(f))]
    _explicit_guard(len(wffs), b)
    ds, db = small.decider(budget), big.decider(budget)
    n = 0
    for s in iter_sequents(wffs, max_ante):
        n += 1
        if ds(s) != db(s):
            return _Found(s, n, "explicit")
    return _Found(None, n, "explicit")


def check_conservative_extension(big: ConsequenceSystem, small: ConsequenceSystem, bounds: Bounds = Bounds(),
                                 budget: Budget = DEFAULT_BUDGET, method: str = "auto") -> Verdict:
    """``big`` extends ``small`` conservatively: proper signature growth,
    and the same verdict on every bounded sequent of small's language."""
    if not small.signature < big.signature:
        return _not_applicable(
            bounds, "signature",
            f"{small.name}'s signature ({small.signature}) is not a proper subset of {big.name}'s ({big.signature})",
        )
    try:
        found, why = _run(
            method,
            lambda: _same_language_quotient(small, big, bounds, budget, bounds.ante),
            lambda: _same_language_explicit(small, big, bounds, budget, bounds.ante),
        )
    except BudgetExhausted as exc:
        return _not_applicable(bounds, "budget", f"proof search gave up: {exc}")
    if found is None:
        return _not_applicable(bounds, "too-large", "; ".join(why))
    notes = [f"{big.name} over {small.name}'s language, checked by the {found.method} route", *why]
    if found.witness is None:
        return Verdict(HOLDS, bounds, notes=notes, method=found.method)
    details = {
        f"valid_in_{small.name}": small.validates(found.witness, budget),
        f"valid_in_{big.name}": big.validates(found.witness, budget),
    }
    return Verdict(FAILS, bounds, witness=found.witness, notes=notes, method=found.method, details=details)


def check_recapture(host: ConsequenceSystem, target: ConsequenceSystem, c: RecaptureConstraint,
                    maps: tuple[TranslationMap, TranslationMap] = (IDENTITY, IDENTITY),
                    bounds: Bounds = Bounds(), budget: Budget = DEFAULT_BUDGET,
                    method: str = "auto") -> Verdict:
    """Carve ``host*`` out of ``host`` by ``c`` and check it is equivalent to ``target``."""
    starred = c.apply(host)
    v = check_equivalence(starred, target, maps[0], maps[1], bounds, budget, method)
    v.notes.insert(0, f"constraint {c.name} ({c.kind}) gives {starred.name}")
    v.details["constrained_system"] = starred.name
    return v


def find_divergence(a: ConsequenceSystem, b: ConsequenceSystem, bounds: Bounds = Bounds(),
                    budget: Budget = DEFAULT_BUDGET, method: str = "auto") -> Sequent | None:
    """Canonically first bounded sequent of the common language on which a and b differ."""
    found, why = _run(
        method,
        lambda: _same_language_quotient(a, b, bounds, budget, bounds.ante, accept_both=True),
        lambda: _same_language_explicit(a, b, bounds, budget, bounds.ante, accept_both=True),
    )
    if found is None:
        raise BoundsTooLarge("; ".join(why))
    return found.witness


def count_discrepancies(a: ConsequenceSystem, b: ConsequenceSystem, bounds: Bounds,
                        f: TranslationMap = IDENTITY, budget: Budget = DEFAULT_BUDGET):
    """Exact number of bounded a-sequents s with valid_a(s) != valid_b(f(s)).

    Quotient route only; antecedents up to size 2. Returns the full
    :class:`~recapture.quotient.SweepResult` (``disagreements`` holds the
    count, ``sequents`` the number examined, ``witness`` the first one).
    """
    if f.mode is None:
        raise CoverageError(f"map {f.name} has no key algebra")
    atoms = bounds.atom_names
    A = a.algebra(atoms, budget)
    if f.mode == "identity":
        B = b.algebra(atoms, budget)
        sig = Signature(a.signature.connectives & b.signature.connectives)
        u = Universe(sig, bounds, ProductAlgebra([A, B]))
        return sweep(u, Side(A, 0), Side(B, 1), bounds.ante, count=True, accept=[Side(A, 0), Side(B, 1)])
    T = TranslationAlgebra(b.algebra(atoms, budget), f.mode, b.signature)
    u = Universe(a.signature, bounds, ProductAlgebra([A, T]))
    return sweep(u, Side(A, 0), Side(T, 1), bounds.ante, count=True, accept=[Side(A, 0)])


@dataclass
class TheoremReport:
    bounds: Bounds
    theorems_equal: bool
    theorem_witness: Formula | None
    consequence_equal: bool
    consequence_witness: Sequent | None

    def to_dict(self) -> dict:
        return {
            "bounds": {"atoms": self.bounds.atoms, "depth": self.bounds.depth, "ante": self.bounds.ante},
            "theorems_equal": self.theorems_equal,
            "theorem_witness": None if self.theorem_witness is None else str(Sequent([], self.theorem_witness)),
            "consequence_equal": self.consequence_equal,
            "consequence_witness": None if self.consequence_witness is None else str(self.consequence_witness),
        }


def compare_theorems(a: ConsequenceSystem, b: ConsequenceSystem, bounds: Bounds = Bounds(),
                     budget: Budget = DEFAULT_BUDGET, method: str = "auto") -> TheoremReport:
    """Theorem sets (empty antecedents) and full consequence, over the common language."""
    theorems = find_divergence(a, b, Bounds(bounds.atoms, bounds.depth, 0), budget, method)
    consequence = theorems if theorems is not None else find_divergence(a, b, bounds, budget, method)
    return TheoremReport(
        bounds, theorems is None, None if theorems is None else theorems.succedent,
        consequence is None, consequence,
    )
