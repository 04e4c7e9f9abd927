"""Intuitionistic propositional provability by contraction-free proof search.

The calculus is Dyckhoff's G4ip: contexts are sets, the left implication
rule is split by the head connective of the antecedent's antecedent, and
every backward rule application shrinks a multiset ordering, so search
terminates without loop checks. Negation is read as implication into bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..errors import BudgetExhausted, CoverageError
from ..syntax import Atom, Formula, Sequent

_ATOM, _BOT, _AND, _OR, _IMP = range(5)
_OPS = {"and": _AND, "or": _OR, "imp": _IMP}


@dataclass(frozen=True)
class Budget:
    """Safety limits: proof-search steps per query, worlds per model."""

    steps: int = 1_000_000
    worlds: int = 4

    def __post_init__(self) -> None:
        if self.steps <= 0 or self.worlds <= 0:
            raise ValueError("budget limits must be positive")


class Prover:
    """A proof-search session.

    Formulas are interned as integers and results are memoized for the life
    of the object, so one prover can answer many related queries cheaply.
    ``intuitionistic_validates`` uses a fresh prover per call.
    """

    def __init__(self) -> None:
        self._node: dict[tuple, int] = {}
        self._op: list[int] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._memo: dict[tuple[frozenset[int], int], bool] = {}
        self._ids: dict[Formula, int] = {}
        self.bottom = self._mk(_BOT, -1, -1)
        self.steps = 0
        self._limit = 0
        self._query: object = None

    def _mk(self, op: int, left: int, right: int) -> int:
        key = (op, left, right)
        got = self._node.get(key)
        if got is None:
            got = len(self._op)
            self._node[key] = got
            self._op.append(op)
            self._left.append(left)
            self._right.append(right)
        return got

    def intern(self, f: Formula) -> int:
        got = self._ids.get(f)
        if got is not None:
            return got
        if isinstance(f, Atom):
            out = self._atom(f.name)
        elif f.connective == "bottom":
            out = self.bottom
        elif f.connective == "not":
            out = self._mk(_IMP, self.intern(f.args[0]), self.bottom)
        elif f.connective in _OPS:
            out = self._mk(_OPS[f.connective], self.intern(f.args[0]), self.intern(f.args[1]))
        else:
            raise CoverageError(f"the intuitionistic engine has no rule for {f.connective!r}")
        self._ids[f] = out
        return out

    def _atom(self, name: str) -> int:
        key = ("atom", name)
        got = self._node.get(key)
        if got is None:
            got = len(self._op)
            self._node[key] = got
            self._op.append(_ATOM)
            self._left.append(-1)
            self._right.append(-1)
        return got

    def derives(self, antecedent: Iterable[Formula], succedent: Formula, steps: int = 1_000_000) -> bool:
        """Is ``antecedent |- succedent`` intuitionistically derivable?"""
        ctx = frozenset(self.intern(a) for a in antecedent)
        goal = self.intern(succedent)
        self.steps = 0
        self._limit = steps
        self._query = (antecedent, succedent)
        return self._prove(ctx, goal)

    def _prove(self, ctx: frozenset[int], goal: int) -> bool:
        key = (ctx, goal)
        got = self._memo.get(key)
        if got is None:
            self.steps += 1
            if self.steps > self._limit:
                ante, succ = self._query  # type: ignore[misc]
                raise BudgetExhausted(Sequent(ante, succ), self._limit)
            got = self._search(ctx, goal)
            self._memo[key] = got
        return got

    def _search(self, ctx: frozenset[int], g: int) -> bool:
        op, left, right = self._op, self._left, self._right
        prove, mk = self._prove, self._mk
        if self.bottom in ctx or g in ctx:
            return True
        og = op[g]
        # invertible right rules
        if og == _IMP:
            return prove(ctx | {left[g]}, right[g])
        if og == _AND:
            return prove(ctx, left[g]) and prove(ctx, right[g])
        # invertible left rules
        for f in sorted(ctx):
            o = op[f]
            if o == _AND:
                return prove((ctx - {f}) | {left[f], right[f]}, g)
            if o == _OR:
                rest = ctx - {f}
                return prove(rest | {left[f]}, g) and prove(rest | {right[f]}, g)
            if o == _IMP:
                a, b = left[f], right[f]
                oa = op[a]
                if oa == _BOT:
                    return prove(ctx - {f}, g)
                if oa == _ATOM and a in ctx:
                    return prove((ctx - {f}) | {b}, g)
                if oa == _AND:
                    return prove((ctx - {f}) | {mk(_IMP, left[a], mk(_IMP, right[a], b))}, g)
                if oa == _OR:
                    return prove((ctx - {f}) | {mk(_IMP, left[a], b), mk(_IMP, right[a], b)}, g)
        # non-invertible choices
        if og == _OR and (prove(ctx, left[g]) or prove(ctx, right[g])):
            return True
        for f in sorted(ctx):
            if op[f] == _IMP and op[left[f]] == _IMP:
                a, b = left[f], right[f]
                rest = ctx - {f}
                if prove(rest | {mk(_IMP, right[a], b)}, a) and prove(rest | {b}, g):
                    return True
        return False


def intuitionistic_validates(s: Sequent, b: Budget = Budget()) -> bool:
    """Derivability of ``s``; raises ``BudgetExhausted`` rather than guessing."""
    return Prover().derives(s.antecedent, s.succedent, b.steps)
