"""Finite rooted Kripke models: direct forcing, a vectorized model family,
and countermodel search.

Frames are partial orders on worlds ``0..n-1`` whose order relation extends
only upward in the labelling (``i <= j`` implies ``i <= j`` numerically) and
whose root is world 0. Every finite rooted poset has such a labelling, so
nothing is lost, and the search order is: world count, then the order
relation read as a bit string, then the forcing assignment (one up-set per
atom, up-sets ordered as bit strings over worlds).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .. import _kernels
from ..errors import CoverageError
from ..syntax import Atom, Formula, Sequent, formula_key


@dataclass(frozen=True)
class KripkeModel:
    """``order[i][j]`` holds iff world i is below (or equal to) world j."""

    order: tuple[tuple[bool, ...], ...]
    forcing: tuple[frozenset[str], ...]
    root: int = 0

    def __post_init__(self) -> None:
        n = len(self.order)
        if len(self.forcing) != n or any(len(row) != n for row in self.order):
            raise ValueError("order and forcing must cover the same worlds")
        le = self.order
        for i in range(n):
            if not le[i][i]:
                raise ValueError("order must be reflexive")
            for j in range(n):
                if i != j and le[i][j] and le[j][i]:
                    raise ValueError("order must be antisymmetric")
                for k in range(n):
                    if le[i][j] and le[j][k] and not le[i][k]:
                        raise ValueError("order must be transitive")
                if le[i][j] and not self.forcing[i] <= self.forcing[j]:
                    raise ValueError("forcing must persist up the order")
        if not all(le[self.root][j] for j in range(n)):
            raise ValueError("the root must lie below every world")

    @property
    def worlds(self) -> int:
        return len(self.order)

    def above(self, w: int) -> list[int]:
        return [v for v in range(self.worlds) if self.order[w][v]]

    def describe(self) -> str:
        cover = [
            f"w{i}<w{j}" for i in range(self.worlds) for j in range(self.worlds)
            if i != j and self.order[i][j]
            and not any(k not in (i, j) and self.order[i][k] and self.order[k][j] for k in range(self.worlds))
        ]
        forced = [f"w{i}:{{{','.join(sorted(self.forcing[i]))}}}" for i in range(self.worlds)]
        return f"{self.worlds} world(s); root w{self.root}; order {' '.join(cover) or '(none)'}; forcing {' '.join(forced)}"


def forces(model: KripkeModel, world: int, f: Formula) -> bool:
    """Direct recursive forcing, used to re-check vectorized results."""
    if isinstance(f, Atom):
        return f.name in model.forcing[world]
    c, args = f.connective, f.args
    if c == "bottom":
        return False
    if c == "and":
        return forces(model, world, args[0]) and forces(model, world, args[1])
    if c == "or":
        return forces(model, world, args[0]) or forces(model, world, args[1])
    if c == "imp":
        return all(not forces(model, v, args[0]) or forces(model, v, args[1]) for v in model.above(world))
    if c == "not":
        return all(not forces(model, v, args[0]) for v in model.above(world))
    raise CoverageError(f"no forcing clause for {c!r}")


# --------------------------------------------------------------------------
# frames and families


@lru_cache(maxsize=None)
def rooted_frames(n: int) -> tuple[tuple[tuple[bool, ...], ...], ...]:
    """Every partial order on ``n`` naturally labelled worlds rooted at 0."""
    pairs = [(i, j) for i in range(1, n) for j in range(i + 1, n)]
    out = []
    for bits in itertools.product((False, True), repeat=len(pairs)):
        le = [[i == j or i == 0 for j in range(n)] for i in range(n)]
        for (i, j), bit in zip(pairs, bits):
            le[i][j] = bit
        if all(not (le[i][j] and le[j][k]) or le[i][k]
               for i in range(n) for j in range(n) for k in range(n)):
            out.append(tuple(tuple(row) for row in le))
    return tuple(out)


@lru_cache(maxsize=None)
def up_sets(order: tuple[tuple[bool, ...], ...]) -> tuple[tuple[bool, ...], ...]:
    n = len(order)
    return tuple(
        bits for bits in itertools.product((False, True), repeat=n)
        if all(not (bits[i] and order[i][j]) or bits[j] for i in range(n) for j in range(n))
    )


@dataclass
class ModelFamily:
    """All models of a list of frames over fixed atoms, laid out world by world.

    ``atom_forcing[a]`` is a boolean row over all worlds; ``succ[w]`` lists
    the worlds above ``w`` padded with ``w``; ``roots`` indexes model roots.
    """

    atoms: tuple[str, ...]
    atom_forcing: np.ndarray
    succ: np.ndarray
    roots: np.ndarray
    models: list[tuple[tuple[tuple[bool, ...], ...], tuple[tuple[bool, ...], ...]]]

    @property
    def size(self) -> int:
        return self.atom_forcing.shape[1]

    def evaluate(self, formulas: Sequence[Formula]) -> np.ndarray:
        """Forcing table (len(formulas), worlds)."""
        memo: dict[Formula, np.ndarray] = {}
        w = self.size

        def ev(f: Formula) -> np.ndarray:
            got = memo.get(f)
            if got is not None:
                return got
            if isinstance(f, Atom):
                if f.name not in self.atoms:
                    raise CoverageError(f"model family does not cover atom {f.name!r}")
                out = self.atom_forcing[self.atoms.index(f.name)]
            else:
                c, args = f.connective, f.args
                if c == "bottom":
                    out = np.zeros(w, dtype=bool)
                elif c == "and":
                    out = ev(args[0]) & ev(args[1])
                elif c == "or":
                    out = ev(args[0]) | ev(args[1])
                elif c == "imp":
                    out = self.imp(ev(args[0])[None], ev(args[1])[None])[0, 0]
                elif c == "not":
                    out = self.imp(ev(args[0])[None], np.zeros((1, w), dtype=bool))[0, 0]
                else:
                    raise CoverageError(f"no forcing clause for {c!r}")
            memo[f] = out
            return out

        if not formulas:
            return np.zeros((0, w), dtype=bool)
        return np.stack([ev(f) for f in formulas])

    def imp(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Implication forcing for all row pairs: (m1, W) x (m2, W) -> (m1, m2, W)."""
        return _kernels.forcing_imp(np.ascontiguousarray(x), np.ascontiguousarray(y), self.succ)

    def model(self, index: int) -> KripkeModel:
        order, assignment = self.models[index]
        n = len(order)
        forcing = tuple(
            frozenset(a for a, ups in zip(self.atoms, assignment) if ups[w]) for w in range(n)
        )
        return KripkeModel(order, forcing)


def model_family(atoms: Sequence[str], worlds: int, min_worlds: int = 1) -> ModelFamily:
    frames = [fr for n in range(min_worlds, worlds + 1) for fr in rooted_frames(n)]
    return _family(tuple(atoms), tuple(frames))


@lru_cache(maxsize=32)
def _family(atoms: tuple[str, ...], frames: tuple) -> ModelFamily:
    forcing_cols: list[list[bool]] = [[] for _ in atoms]
    succ_rows: list[list[int]] = []
    roots: list[int] = []
    models = []
    fan = max((len(fr) for fr in frames), default=1)
    offset = 0
    for order in frames:
        n = len(order)
        for assignment in itertools.product(up_sets(order), repeat=len(atoms)):
            roots.append(offset)
            models.append((order, assignment))
            for w in range(n):
                ups = [offset + v for v in range(n) if order[w][v]]
                succ_rows.append(ups + [offset + w] * (fan - len(ups)))
                for a, col in enumerate(forcing_cols):
                    col.append(assignment[a][w])
            offset += n
    atom_forcing = np.array(forcing_cols, dtype=bool).reshape(len(atoms), offset)
    succ = np.array(succ_rows, dtype=np.int32).reshape(offset, fan)
    return ModelFamily(atoms, atom_forcing, succ, np.array(roots, dtype=np.int64), models)


def kripke_countermodel(s: Sequent, max_worlds: int) -> KripkeModel | None:
    """First model (in search order) whose root forces the antecedent but not
    the succedent, or None if there is none within ``max_worlds`` worlds."""
    atoms = tuple(sorted(s.atoms()))
    ante = sorted(s.antecedent, key=formula_key)
    for n in range(1, max_worlds + 1):
        family = model_family(atoms, n, min_worlds=n)
        table = family.evaluate([*ante, s.succedent])
        bad = table[:-1].all(axis=0) & ~table[-1]
        hits = np.nonzero(bad[family.roots])[0]
        if len(hits):
            model = family.model(int(hits[0]))
            if not (all(forces(model, 0, a) for a in ante) and not forces(model, 0, s.succedent)):
                raise AssertionError(f"countermodel for {s} failed its forcing re-check")
            return model
    return None
