"""Exhaustive checking over a bounded language by semantic keys.

A *key algebra* gives every formula a key such that the key of a compound is
a function of the connective and the keys of its arguments. Matrix value
vectors and intuitionistic equivalence classes are both keys in this sense.
Validity of a sequent then depends only on the keys of its formulas, so a
universal claim about all bounded sequents can be checked once per pattern of
keys instead of once per sequent, while multiplicities are still counted
exactly.

The :class:`Universe` builds the bounded formula language layer by layer.
Layers are materialized while small. The deepest layer may instead be
scanned implicitly, as argument index pairs, which is where the compiled
kernels earn their keep. For every key it records how many formulas carry it
and which formula carries it first in canonical order.

:func:`sweep` compares two validity deciders over every antecedent/succedent
pattern and returns the first disagreement in canonical sequent order,
optionally with the exact number of disagreeing sequents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .engines.intuitionistic import Prover
from .engines.kripke import model_family
from .engines.matrix import Matrix
from .errors import BoundsTooLarge, CoverageError
from .syntax import (
    BINARY_TOKENS,
    Atom,
    Bounds,
    Compound,
    Formula,
    Sequent,
    Signature,
    atoms_of,
    collate,
    connectives_of,
    formula_key,
    iter_layers,
    neg,
    render_formula,
    text_key,
)

TOP = -1
"""State id of the empty antecedent, shared by every algebra."""


class Interner:
    """Dense ids for hashable values."""

    def __init__(self) -> None:
        self.ids: dict[object, int] = {}
        self.values: list[object] = []

    def __call__(self, value: object) -> int:
        got = self.ids.get(value)
        if got is None:
            got = len(self.values)
            self.ids[value] = got
            self.values.append(value)
        return got

    def __len__(self) -> int:
        return len(self.values)


# --------------------------------------------------------------------------
# key algebras


class Algebra:
    """Compositional keys plus a validity decider over *vkeys*.

    Keys compose: ``apply(c, keys of args)`` is the key of the compound.
    ``vkey`` coarsens a key to what validity needs. Antecedents are folded
    into *states* with ``unit`` and ``meet``; ``valid_matrix`` decides
    ``state |- vkey`` for a grid of states and vkeys.
    """

    def base(self, f: Formula) -> int:
        raise NotImplementedError

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        raise NotImplementedError

    def table(self, conn: str, arity: int, keys: np.ndarray) -> np.ndarray:
        """``apply`` over ``keys`` (unary) or ``keys x keys`` (binary)."""
        if arity == 1:
            return np.array([self.apply(conn, (int(k),)) for k in keys], dtype=np.int64)
        return np.array(
            [[self.apply(conn, (int(a), int(b))) for b in keys] for a in keys], dtype=np.int64
        ).reshape(len(keys), len(keys))

    def vkey(self, key: int) -> int:
        return key

    def accepts(self, vk: int) -> bool:
        return True

    def unit(self, vk: int) -> int:
        return vk

    def meet(self, a: int, b: int) -> int:
        raise NotImplementedError

    def valid_matrix(self, states: Sequence[int], vks: Sequence[int]) -> np.ndarray:
        raise NotImplementedError

    def relativized(self, premises: Sequence[Formula]) -> "Algebra":
        raise CoverageError(f"{type(self).__name__} cannot be relativized to premises")


def _pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a boolean array along its last axis into uint64 words."""
    n = bits.shape[-1]
    words = max(1, -(-n // 64))
    padded = np.zeros(bits.shape[:-1] + (words * 64,), dtype=bool)
    padded[..., :n] = bits
    return np.packbits(padded, axis=-1, bitorder="little").view(np.uint64)


class MatrixAlgebra(Algebra):
    """Keys are value vectors over every valuation of the bounded atoms;
    vkeys are the designation patterns inside the current valuation mask."""

    def __init__(self, matrix: Matrix, atoms: Sequence[str], valmask: np.ndarray | None = None):
        self.matrix = matrix
        self.atoms = tuple(atoms)
        n, k = len(matrix.values), len(self.atoms)
        self.width = n**k
        self.grid = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.uint8).reshape(
            self.width, k
        )
        self.valmask = (
            _pack_bits(np.ones(self.width, dtype=bool)) if valmask is None else valmask
        )
        self._keys = Interner()
        self._vecs = np.zeros((16, self.width), dtype=np.uint8)
        self._key_vk: list[int] = []
        self._vks = Interner()
        self._vk_masks: list[np.ndarray] = []
        self._states = Interner()
        self._state_masks: list[np.ndarray] = []
        self._relatives: dict[tuple[Formula, ...], MatrixAlgebra] = {}
        self.top = TOP

    def _intern(self, vec: np.ndarray) -> int:
        before = len(self._keys)
        key = self._keys(vec.tobytes())
        if key == before:
            if key >= len(self._vecs):
                self._vecs = np.concatenate([self._vecs, np.zeros_like(self._vecs)])
            self._vecs[key] = vec
            des = _pack_bits(self.matrix.designated_mask[vec]) & self.valmask
            self._key_vk.append(self._intern_vk(des))
        return key

    def _intern_vk(self, mask: np.ndarray) -> int:
        before = len(self._vks)
        vk = self._vks(mask.tobytes())
        if vk == before:
            self._vk_masks.append(mask)
        return vk

    def _intern_state(self, mask: np.ndarray) -> int:
        before = len(self._states)
        st = self._states(mask.tobytes())
        if st == before:
            self._state_masks.append(mask)
        return st

    def vector(self, key: int) -> np.ndarray:
        return self._vecs[key]

    def base(self, f: Formula) -> int:
        if isinstance(f, Atom):
            if f.name not in self.atoms:
                raise CoverageError(f"atom {f.name!r} is outside the bounded atoms")
            return self._intern(np.ascontiguousarray(self.grid[:, self.atoms.index(f.name)]))
        arr = self.matrix.array(f.connective)
        return self._intern(np.full(self.width, arr, dtype=np.uint8))

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        arr = self.matrix.array(conn)
        if arr.ndim == 0:
            return self._intern(np.full(self.width, arr, dtype=np.uint8))
        if arr.ndim == 1:
            return self._intern(arr[self._vecs[args[0]]])
        return self._intern(arr[self._vecs[args[0]], self._vecs[args[1]]])

    def table(self, conn: str, arity: int, keys: np.ndarray) -> np.ndarray:
        arr = self.matrix.array(conn)
        vecs = np.ascontiguousarray(self._vecs[keys])
        if arity == 1:
            rows = arr[vecs]
        else:
            rows = _kernels.compose_binary(arr, vecs, vecs).reshape(-1, self.width)
        uniq, inv = np.unique(rows, axis=0, return_inverse=True)
        ids = np.array([self._intern(np.ascontiguousarray(u)) for u in uniq], dtype=np.int64)
        out = ids[inv.ravel()]
        return out if arity == 1 else out.reshape(len(keys), len(keys))

    def vkey(self, key: int) -> int:
        return self._key_vk[key]

    def _state_mask(self, st: int) -> np.ndarray:
        return self.valmask if st == TOP else self._state_masks[st]

    def unit(self, vk: int) -> int:
        return self._intern_state(self._vk_masks[vk])

    def meet(self, a: int, b: int) -> int:
        if a == TOP:
            return b
        if b == TOP:
            return a
        return self._intern_state(self._state_masks[a] & self._state_masks[b])

    def valid_matrix(self, states: Sequence[int], vks: Sequence[int]) -> np.ndarray:
        s = np.stack([self._state_mask(int(x)) for x in states]) if len(states) else np.zeros((0, self.valmask.size), np.uint64)
        d = np.stack([self._vk_masks[int(v)] for v in vks]) if len(vks) else np.zeros((0, self.valmask.size), np.uint64)
        return _kernels.mask_valid(s, d)

    def relativized(self, premises: Sequence[Formula]) -> "MatrixAlgebra":
        premises = tuple(premises)
        got = self._relatives.get(premises)
        if got is None:
            mask = self.valmask.copy()
            if premises:
                vecs = self.matrix.vectors(list(premises), self.atoms)
                mask &= _pack_bits(self.matrix.designated_mask[vecs].all(axis=0))
            got = MatrixAlgebra(self.matrix, self.atoms, mask)
            self._relatives[premises] = got
        return got


class IntuitionisticAlgebra(Algebra):
    """Keys are intuitionistic equivalence classes (relative to fixed premises).

    Candidates are bucketed by their forcing pattern over every rooted model
    with at most ``worlds`` worlds. A bucket only narrows the search: two
    formulas share a key exactly when the prover derives each from the other
    (together with the premises). Buckets holding several classes are
    recorded in ``collisions``; they are where small models fail to separate
    inequivalent formulas.
    """

    def __init__(self, atoms: Sequence[str], worlds: int = 4, premises: Sequence[Formula] = (),
                 prover: Prover | None = None, steps: int = 1_000_000):
        self.atoms = tuple(atoms)
        self.worlds = worlds
        self.family = model_family(self.atoms, worlds)
        self.prover = prover if prover is not None else Prover()
        self.premises = tuple(premises)
        self.steps = steps
        w = self.family.size
        self.mask = self.family.evaluate(list(self.premises)).all(axis=0) if self.premises else np.ones(w, bool)
        self.reps: list[Formula] = []
        self._fps = np.zeros((16, w), dtype=bool)
        self._buckets: dict[bytes, list[int]] = {}
        self._applied: dict[tuple, int] = {}
        self._valid: dict[tuple[int, int], bool] = {}
        self._relatives: dict[tuple[Formula, ...], IntuitionisticAlgebra] = {}
        self.collisions: list[tuple[Formula, Formula]] = []
        self.top = TOP

    def __len__(self) -> int:
        return len(self.reps)

    def fingerprint(self, key: int) -> np.ndarray:
        return self._fps[key]

    def derives(self, ante: Sequence[Formula], succ: Formula) -> bool:
        return self.prover.derives((*self.premises, *ante), succ, self.steps)

    def _classify(self, f: Formula, fp: np.ndarray) -> int:
        sig = np.packbits(fp & self.mask).tobytes()
        bucket = self._buckets.setdefault(sig, [])
        for k in bucket:
            rep = self.reps[k]
            if self.derives((f,), rep) and self.derives((rep,), f):
                return k
        if bucket:
            self.collisions.append((f, self.reps[bucket[0]]))
        key = len(self.reps)
        self.reps.append(f)
        if key >= len(self._fps):
            self._fps = np.concatenate([self._fps, np.zeros_like(self._fps)])
        self._fps[key] = fp
        bucket.append(key)
        return key

    def base(self, f: Formula) -> int:
        got = self._applied.get(("base", f))
        if got is None:
            got = self._classify(f, self.family.evaluate([f])[0])
            self._applied[("base", f)] = got
        return got

    def _compose(self, conn: str, a: np.ndarray, b: np.ndarray | None) -> np.ndarray:
        """Forcing patterns of ``conn`` over row pairs: (m1, m2, W), or (m1, W) if unary."""
        if conn == "not":
            return self.family.imp(a, np.zeros((1, a.shape[1]), bool))[:, 0]
        if conn == "and":
            return a[:, None, :] & b[None, :, :]
        if conn == "or":
            return a[:, None, :] | b[None, :, :]
        if conn == "imp":
            return self.family.imp(a, b)
        raise CoverageError(f"the intuitionistic engine has no rule for {conn!r}")

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        memo = (conn, args)
        got = self._applied.get(memo)
        if got is None:
            f = Compound(conn, tuple(self.reps[a] for a in args))
            if conn == "bottom":
                fp = np.zeros(self.family.size, bool)
            elif len(args) == 1:
                fp = self._compose(conn, self._fps[[args[0]]], None)[0]
            else:
                fp = self._compose(conn, self._fps[[args[0]]], self._fps[[args[1]]])[0, 0]
            got = self._classify(f, fp)
            self._applied[memo] = got
        return got

    def table(self, conn: str, arity: int, keys: np.ndarray) -> np.ndarray:
        keys = [int(k) for k in keys]
        fps = self._fps[keys]
        if arity == 1:
            todo = [i for i, k in enumerate(keys) if (conn, (k,)) not in self._applied]
            if todo:
                grid = self._compose(conn, fps[todo], None)
                for row, i in enumerate(todo):
                    k = keys[i]
                    self._applied[(conn, (k,))] = self._classify(Compound(conn, (self.reps[k],)), grid[row])
            return np.array([self._applied[(conn, (k,))] for k in keys], dtype=np.int64)
        grid = self._compose(conn, fps, fps)
        out = np.empty((len(keys), len(keys)), dtype=np.int64)
        for i, a in enumerate(keys):
            for j, b in enumerate(keys):
                memo = (conn, (a, b))
                got = self._applied.get(memo)
                if got is None:
                    got = self._classify(Compound(conn, (self.reps[a], self.reps[b])), grid[i, j])
                    self._applied[memo] = got
                out[i, j] = got
        return out

    def meet(self, a: int, b: int) -> int:
        if a == TOP:
            return b
        if b == TOP or a == b:
            return a
        return self.apply("and", (min(a, b), max(a, b)))

    def valid(self, state: int, vk: int) -> bool:
        got = self._valid.get((state, vk))
        if got is None:
            ante = () if state == TOP else (self.reps[state],)
            got = self.derives(ante, self.reps[vk])
            self._valid[(state, vk)] = got
        return got

    def valid_matrix(self, states: Sequence[int], vks: Sequence[int]) -> np.ndarray:
        return np.array([[self.valid(int(s), int(v)) for v in vks] for s in states], dtype=bool).reshape(
            len(states), len(vks)
        )

    def countermodel_matrix(self, states: Sequence[int], vks: Sequence[int]) -> np.ndarray:
        """``True`` where a model of the family refutes ``state |- vkey``."""
        w = self.family.size
        s = np.stack([np.ones(w, bool) if x == TOP else self._fps[x] for x in states]) & self.mask
        d = np.stack([self._fps[v] for v in vks])
        return ~_kernels.mask_valid(_pack_bits(s), _pack_bits(d))

    def relativized(self, premises: Sequence[Formula]) -> "IntuitionisticAlgebra":
        premises = tuple(premises)
        got = self._relatives.get(premises)
        if got is None:
            got = IntuitionisticAlgebra(self.atoms, self.worlds, self.premises + premises, self.prover, self.steps)
            self._relatives[premises] = got
        return got


class OracleSide(Algebra):
    """Same keys as an intuitionistic algebra, decided by bounded countermodels."""

    def __init__(self, inner: IntuitionisticAlgebra):
        self.inner = inner

    def unit(self, vk: int) -> int:
        return vk

    def meet(self, a: int, b: int) -> int:
        return self.inner.meet(a, b)

    def valid_matrix(self, states, vks) -> np.ndarray:
        return ~self.inner.countermodel_matrix(states, vks)


def _bits(names: frozenset[str], atoms: Sequence[str]) -> int:
    return sum(1 << i for i, a in enumerate(atoms) if a in names)


class RelativizedAlgebra(Algebra):
    """Validity of ``G |- A`` relative to scheme instances over atoms(G, A).

    One relative sub-algebra per atom subset S. A key records the formula's
    atom set and its key in every sub-algebra whose S covers that set.
    """

    def __init__(self, parent: Algebra, instances: Callable[[Sequence[str]], list[Formula]],
                 atoms: Sequence[str]):
        self.atoms = tuple(atoms)
        n = len(self.atoms)
        self.sub: dict[int, Algebra] = {}
        for s in range(1 << n):
            chosen = [a for i, a in enumerate(self.atoms) if s >> i & 1]
            self.sub[s] = parent.relativized(instances(chosen) if chosen else [])
        self._supersets = {u: [s for s in range(1 << n) if s & u == u] for u in range(1 << n)}
        self._keys = Interner()
        self._vks = Interner()
        self._states = Interner()
        self._key_vk: dict[int, int] = {}
        self.top = TOP

    def _make(self, bits: int, subkeys: dict[int, int]) -> int:
        return self._keys((bits, tuple(sorted(subkeys.items()))))

    def base(self, f: Formula) -> int:
        bits = _bits(atoms_of(f), self.atoms)
        return self._make(bits, {s: self.sub[s].base(f) for s in self._supersets[bits]})

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        parts = [self._keys.values[a] for a in args]
        bits = 0
        for b, _ in parts:
            bits |= b
        maps = [dict(sk) for _, sk in parts]
        return self._make(
            bits, {s: self.sub[s].apply(conn, tuple(m[s] for m in maps)) for s in self._supersets[bits]}
        )

    def vkey(self, key: int) -> int:
        got = self._key_vk.get(key)
        if got is None:
            bits, subkeys = self._keys.values[key]
            got = self._vks((bits, tuple((s, self.sub[s].vkey(k)) for s, k in subkeys)))
            self._key_vk[key] = got
        return got

    def unit(self, vk: int) -> int:
        bits, subs = self._vks.values[vk]
        return self._states((bits, tuple((s, self.sub[s].unit(v)) for s, v in subs)))

    def _state(self, st: int) -> tuple[int, dict[int, int]]:
        if st == TOP:
            return 0, {s: TOP for s in self.sub}
        bits, subs = self._states.values[st]
        return bits, dict(subs)

    def meet(self, a: int, b: int) -> int:
        if a == TOP:
            return b
        if b == TOP:
            return a
        ba, sa = self._state(a)
        bb, sb = self._state(b)
        bits = ba | bb
        return self._states(
            (bits, tuple((s, self.sub[s].meet(sa[s], sb[s])) for s in self._supersets[bits]))
        )

    def valid_matrix(self, states, vks) -> np.ndarray:
        out = np.zeros((len(states), len(vks)), dtype=bool)
        for i, st in enumerate(states):
            bits, subs = self._state(int(st))
            for j, vk in enumerate(vks):
                vbits, vsubs = self._vks.values[int(vk)]
                s = bits | vbits
                out[i, j] = self.sub[s].valid_matrix([subs[s]], [dict(vsubs)[s]])[0, 0]
        return out


class PredicateAlgebra(Algebra):
    """Compositional wff predicate: ``accepts_key`` reads the key."""

    def accepts_key(self, key: int) -> bool:
        raise NotImplementedError


class LacksAlgebra(PredicateAlgebra):
    def __init__(self, names: frozenset[str]):
        self.names = names

    def base(self, f: Formula) -> int:
        return int(bool(connectives_of(f) & self.names))

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        return int(conn in self.names or any(args))

    def accepts_key(self, key: int) -> bool:
        return key == 0


class DepthAlgebra(PredicateAlgebra):
    def __init__(self, limit: int):
        self.limit = limit

    def base(self, f: Formula) -> int:
        return 0

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        return min(self.limit + 1, 1 + max(args, default=-1))

    def accepts_key(self, key: int) -> bool:
        return key <= self.limit


class DecidableAlgebra(PredicateAlgebra):
    """Accepts A when the host derives ``A | ~A``; keys are the host's keys."""

    def __init__(self, host: Algebra):
        self.host = host
        self._verdict: dict[int, bool] = {}

    def base(self, f: Formula) -> int:
        return self.host.base(f)

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        return self.host.apply(conn, args)

    def table(self, conn, arity, keys):
        return self.host.table(conn, arity, keys)

    def accepts_key(self, key: int) -> bool:
        got = self._verdict.get(key)
        if got is None:
            em = self.host.apply("or", (key, self.host.apply("not", (key,))))
            got = bool(self.host.valid_matrix([TOP], [self.host.vkey(em)])[0, 0])
            self._verdict[key] = got
        return got


class SubsystemAlgebra(Algebra):
    """Parent keys paired with a predicate; rejected formulas never validate."""

    def __init__(self, parent: Algebra, predicate: PredicateAlgebra):
        self.parent = parent
        self.predicate = predicate
        self._keys = Interner()
        self._vks = Interner()
        self._states = Interner()
        self.top = TOP

    def base(self, f: Formula) -> int:
        return self._keys((self.parent.base(f), self.predicate.base(f)))

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        parts = [self._keys.values[a] for a in args]
        return self._keys((
            self.parent.apply(conn, tuple(p for p, _ in parts)),
            self.predicate.apply(conn, tuple(q for _, q in parts)),
        ))

    def vkey(self, key: int) -> int:
        p, q = self._keys.values[key]
        return self._vks((self.parent.vkey(p), self.predicate.accepts_key(q)))

    def accepts(self, vk: int) -> bool:
        return self._vks.values[vk][1]

    def unit(self, vk: int) -> int:
        pv, ok = self._vks.values[vk]
        return self._states((self.parent.unit(pv), ok))

    def meet(self, a: int, b: int) -> int:
        if a == TOP:
            return b
        if b == TOP:
            return a
        pa, oa = self._states.values[a]
        pb, ob = self._states.values[b]
        return self._states((self.parent.meet(pa, pb), oa and ob))

    def valid_matrix(self, states, vks) -> np.ndarray:
        st = [(TOP, True) if s == TOP else self._states.values[int(s)] for s in states]
        vv = [self._vks.values[int(v)] for v in vks]
        inner = self.parent.valid_matrix([p for p, _ in st], [p for p, _ in vv])
        rows = np.array([ok for _, ok in st], dtype=bool)
        cols = np.array([ok for _, ok in vv], dtype=bool)
        return inner & rows[:, None] & cols[None, :]


OUT = -2
"""Translation state: the image left the target language."""


class TranslationAlgebra(Algebra):
    """Tracks, for each source formula X, the target key of its translation.

    ``mode`` is ``identity``, ``double-negation`` (A to ~~A) or
    ``goedel-gentzen`` (negative translation, applied homomorphically).
    Images that use a connective outside ``target_sig`` are out of the
    target's language and never valid there.
    """

    def __init__(self, target: Algebra, mode: str, target_sig: Signature):
        self.target = target
        self.mode = mode
        self.sig = target_sig.names
        self._keys = Interner()  # (inside, tracked target key)
        self._final: dict[int, int] = {}
        self._vks = Interner()
        self._states = Interner()
        self.top = TOP

    def _t(self, fn, *args) -> int | None:
        try:
            return fn(*args)
        except CoverageError:
            return None

    def _make(self, inside: bool, tracked: int | None) -> int:
        if tracked is None:
            inside = False
        return self._keys((inside, tracked if inside else None))

    def _dn(self, k: int) -> int | None:
        once = self._t(self.target.apply, "not", (k,))
        return None if once is None else self._t(self.target.apply, "not", (once,))

    def base(self, f: Formula) -> int:
        conns = connectives_of(f)
        if self.mode == "goedel-gentzen" and isinstance(f, Atom):
            if "not" not in self.sig:
                return self._make(False, None)
            k = self._t(self.target.base, f)
            return self._make(True, None if k is None else self._dn(k))
        return self._make(conns <= self.sig, self._t(self.target.base, f) if conns <= self.sig else None)

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        parts = [self._keys.values[a] for a in args]
        if not all(inside for inside, _ in parts):
            return self._make(False, None)
        kids = tuple(k for _, k in parts)
        t = self.target.apply
        if self.mode == "goedel-gentzen" and conn == "or":
            if not {"not", "and"} <= self.sig:
                return self._make(False, None)
            a, b = (self._t(t, "not", (k,)) for k in kids)
            if a is None or b is None:
                return self._make(False, None)
            both = self._t(t, "and", (a, b))
            return self._make(True, None if both is None else self._t(t, "not", (both,)))
        if conn not in self.sig:
            return self._make(False, None)
        return self._make(True, self._t(t, conn, kids))

    def final(self, key: int) -> int | None:
        """Target key of the image, or None when it is outside the target."""
        got = self._final.get(key, -3)
        if got == -3:
            inside, k = self._keys.values[key]
            if not inside:
                got = None
            elif self.mode == "double-negation":
                got = self._dn(k) if "not" in self.sig else None
            else:
                got = k
            self._final[key] = got
        return got

    def vkey(self, key: int) -> int:
        k = self.final(key)
        return self._vks(OUT if k is None else self.target.vkey(k))

    def target_vkey(self, vk: int) -> int:
        return self._vks.values[vk]

    def accepts(self, vk: int) -> bool:
        inner = self._vks.values[vk]
        return inner != OUT and self.target.accepts(inner)

    def unit(self, vk: int) -> int:
        inner = self._vks.values[vk]
        return self._states(OUT if inner == OUT else self.target.unit(inner))

    def meet(self, a: int, b: int) -> int:
        if a == TOP:
            return b
        if b == TOP:
            return a
        sa, sb = self._states.values[a], self._states.values[b]
        if OUT in (sa, sb):
            return self._states(OUT)
        return self._states(self.target.meet(sa, sb))

    def valid_matrix(self, states, vks) -> np.ndarray:
        st = [TOP if s == TOP else self._states.values[int(s)] for s in states]
        vv = [self._vks.values[int(v)] for v in vks]
        rows = np.array([s != OUT for s in st], dtype=bool)
        cols = np.array([v != OUT for v in vv], dtype=bool)
        inner = np.zeros((len(st), len(vv)), dtype=bool)
        ri, ci = np.nonzero(rows)[0], np.nonzero(cols)[0]
        if len(ri) and len(ci):
            inner[np.ix_(ri, ci)] = self.target.valid_matrix([st[i] for i in ri], [vv[j] for j in ci])
        return inner


class ProductAlgebra(Algebra):
    """Tuple of component keys; the universe is built over one of these."""

    def __init__(self, components: Sequence[Algebra]):
        self.components = list(components)
        self._keys = Interner()
        self._rows: list[tuple[int, ...]] = []

    def _make(self, parts: tuple[int, ...]) -> int:
        before = len(self._keys)
        key = self._keys(parts)
        if key == before:
            self._rows.append(parts)
        return key

    def part(self, i: int, keys: Sequence[int]) -> np.ndarray:
        return np.array([self._rows[int(k)][i] for k in keys], dtype=np.int64)

    def base(self, f: Formula) -> int:
        return self._make(tuple(c.base(f) for c in self.components))

    def apply(self, conn: str, args: tuple[int, ...]) -> int:
        rows = [self._rows[a] for a in args]
        return self._make(tuple(c.apply(conn, tuple(r[i] for r in rows)) for i, c in enumerate(self.components)))

    def table(self, conn: str, arity: int, keys: np.ndarray) -> np.ndarray:
        cols = []
        for i, comp in enumerate(self.components):
            ck = self.part(i, keys)
            uniq, inv = np.unique(ck, return_inverse=True)
            t = comp.table(conn, arity, uniq)
            cols.append(t[inv] if arity == 1 else t[np.ix_(inv, inv)])
        stacked = np.stack([c.ravel() for c in cols], axis=1)
        uniq, inv = np.unique(stacked, axis=0, return_inverse=True)
        ids = np.array([self._make(tuple(int(x) for x in row)) for row in uniq], dtype=np.int64)
        out = ids[inv.ravel()]
        return out if arity == 1 else out.reshape(len(keys), len(keys))


# --------------------------------------------------------------------------
# the bounded universe

EXPLICIT_LAYER_LIMIT = 150_000
TABLE_LIMIT = 40_000_000


@dataclass
class KeyEntry:
    key: int
    count: int
    first: Formula
    order: tuple = field(repr=False)


def _prefix(conn: str) -> str:
    if conn == "not":
        return "(~"
    if conn in BINARY_TOKENS:
        return "("
    return f"{conn}("


def _mid(conn: str) -> str:
    return f" {BINARY_TOKENS[conn]} " if conn in BINARY_TOKENS else ", "


class Universe:
    """Every formula over ``sig`` within ``bounds``, grouped by key."""

    def __init__(self, sig: Signature, bounds: Bounds, algebra: Algebra,
                 explicit_limit: int = EXPLICIT_LAYER_LIMIT):
        self.signature = sig
        self.bounds = bounds
        self.algebra = algebra
        self.explicit_limit = explicit_limit
        self._counts: dict[int, int] = {}
        self._first: dict[int, Formula] = {}
        self.materialized_depth = 0
        self._build()
        self.entries = sorted(
            (KeyEntry(k, self._counts[k], f, formula_key(f)) for k, f in self._first.items()),
            key=lambda e: e.order,
        )
        self.total = sum(self._counts.values())

    def _record(self, formulas: Sequence[Formula], keys: Sequence[int]) -> None:
        for f, k in zip(formulas, keys):
            k = int(k)
            if k not in self._first:
                self._first[k] = f
                self._counts[k] = 0
            self._counts[k] += 1

    def _build(self) -> None:
        sig, bounds, alg = self.signature, self.bounds, self.algebra
        layers = iter_layers(sig, Bounds(bounds.atoms, 0, 0))
        layer0 = next(layers)
        forms = [f for f, _ in layer0]
        texts = [t for _, t in layer0]
        depths = [0] * len(forms)
        keys = [alg.base(f) for f in forms]
        self._record(forms, keys)
        unary = [c.name for c in sig if c.arity == 1]
        binary = [c.name for c in sig if c.arity == 2]
        for d in range(1, bounds.depth + 1):
            m = len(forms)
            newest = [i for i in range(m) if depths[i] == d - 1]
            n_old = m - len(newest)
            size = len(unary) * len(newest) + len(binary) * (m * m - n_old * n_old)
            uniq, kidx = np.unique(np.array(keys, dtype=np.int64), return_inverse=True)
            kidx = kidx.ravel()
            if len(binary) * len(uniq) ** 2 > TABLE_LIMIT:
                raise BoundsTooLarge(f"{len(uniq)} distinct keys below depth {d} is too many to tabulate")
            tables = {c: alg.table(c, 1, uniq) for c in unary}
            tables.update({c: alg.table(c, 2, uniq) for c in binary})
            if size <= self.explicit_limit:
                layer = []
                for c in unary:
                    t = tables[c]
                    for i in newest:
                        layer.append((Compound(c, (forms[i],)), _prefix(c) + texts[i] + ")", t[kidx[i]]))
                for c in binary:
                    t, pre, mid = tables[c], _prefix(c), _mid(c)
                    for i in range(m):
                        row = t[kidx[i]]
                        for j in (range(m) if depths[i] == d - 1 else newest):
                            layer.append((Compound(c, (forms[i], forms[j])),
                                          f"{pre}{texts[i]}{mid}{texts[j]})", row[kidx[j]]))
                layer.sort(key=lambda item: text_key(item[1], d))
                self._record([f for f, _, _ in layer], [k for _, _, k in layer])
                forms += [f for f, _, _ in layer]
                texts += [t for _, t, _ in layer]
                depths += [d] * len(layer)
                keys += [int(k) for _, _, k in layer]
                self.materialized_depth = d
            elif d == bounds.depth:
                self._scan_last_layer(forms, texts, depths, kidx, tables, unary, binary, d)
            else:
                raise BoundsTooLarge(
                    f"depth-{d} layer has {size:,} formulas; only the deepest layer may be left implicit"
                )

    def _scan_last_layer(self, forms, texts, depths, kidx, tables, unary, binary, d) -> None:
        m = len(forms)
        if m >= 1 << _kernels.RANK_BITS:
            raise BoundsTooLarge(f"{m:,} formulas below the deepest layer is too many to scan")
        conns = unary + binary
        prefixes = sorted({_prefix(c) for c in conns})
        pool = sorted(((collate(p + t), pi, i) for pi, p in enumerate(prefixes) for i, t in enumerate(texts)))
        prefix_rank = np.zeros((len(prefixes), m), dtype=np.int64)
        for r, (_, pi, i) in enumerate(pool):
            prefix_rank[pi, i] = r
        lexrank = np.zeros(m, dtype=np.int64)
        for r, i in enumerate(sorted(range(m), key=lambda i: collate(texts[i]))):
            lexrank[i] = r
        mids = sorted({collate(_mid(c)) for c in binary})
        depth_arr = np.array(depths, dtype=np.int64)
        length = np.array([len(t) for t in texts], dtype=np.int64)
        n_out = 1 + max(int(t.max()) for t in tables.values())
        counts = np.zeros(n_out, dtype=np.int64)
        best = np.full(n_out, np.iinfo(np.int64).max, dtype=np.int64)
        arg = np.full(n_out, -1, dtype=np.int64)
        newest = np.nonzero(depth_arr == d - 1)[0]
        for tag, c in enumerate(conns):
            pr = prefix_rank[prefixes.index(_prefix(c))]
            if c in unary:
                ks = tables[c][kidx[newest]]
                sk = _kernels.pack_key(length[newest] + len(_prefix(c)) + 1, pr[newest], 0, 0)
                np.add.at(counts, ks, 1)
                for k, s, i in zip(ks, sk, newest):
                    if s < best[k]:
                        best[k], arg[k] = s, (tag << 40) | (int(i) << 20)
            else:
                overhead = len(_prefix(c)) + len(_mid(c)) + 1
                _kernels.binary_layer_scan(
                    np.ascontiguousarray(tables[c]), kidx.astype(np.int64), depth_arr, length, lexrank,
                    np.ascontiguousarray(pr), np.int64(overhead), np.int64(mids.index(collate(_mid(c)))),
                    np.int64(d - 1), counts, best, arg, np.int64(tag),
                )
        for k in np.nonzero(counts)[0]:
            k = int(k)
            if k not in self._first:
                code = int(arg[k])
                c = conns[code >> 40]
                i, j = (code >> 20) & ((1 << 20) - 1), code & ((1 << 20) - 1)
                args = (forms[i],) if c in unary else (forms[i], forms[j])
                self._first[k] = Compound(c, args)
                self._counts[k] = 0
            self._counts[k] += int(counts[k])


# --------------------------------------------------------------------------
# pattern sweep


@dataclass
class Side:
    """One validity decider inside a universe: a component of its product."""

    algebra: Algebra
    component: int


@dataclass
class Groups:
    """Formulas grouped by the joint vkeys of several sides, in first-occurrence order."""

    first: list[Formula]
    counts: list[int]
    vks: list[np.ndarray]  # per side


def group(universe: Universe, sides: Sequence[Side], accept: Sequence[Side] = ()) -> Groups:
    prod = universe.algebra
    keys = [e.key for e in universe.entries]
    per_side = []
    for s in sides:
        comp = prod.part(s.component, keys) if isinstance(prod, ProductAlgebra) else np.array(keys)
        per_side.append([s.algebra.vkey(int(k)) for k in comp])
    gate = [True] * len(keys)
    for a in accept:
        comp = prod.part(a.component, keys) if isinstance(prod, ProductAlgebra) else np.array(keys)
        gate = [g and a.algebra.accepts(a.algebra.vkey(int(k))) for g, k in zip(gate, comp)]
    index: dict[tuple, int] = {}
    first, counts, rows = [], [], []
    for n, entry in enumerate(universe.entries):
        if not gate[n]:
            continue
        joint = tuple(v[n] for v in per_side)
        g = index.get(joint)
        if g is None:
            g = index[joint] = len(first)
            first.append(entry.first)
            counts.append(0)
            rows.append(joint)
        counts[g] += entry.count
    vks = [np.array([r[i] for r in rows], dtype=np.int64) for i in range(len(sides))]
    return Groups(first, counts, vks)


@dataclass
class SweepResult:
    witness: Sequent | None
    witness_size: int | None
    groups: int
    formulas: int
    sequents: int
    disagreements: int | None  # exact count of disagreeing sequents, when counted
    checked_sizes: int


class _Rows:
    """Validity rows ``state |- every group`` for one side, cached per state."""

    def __init__(self, alg: Algebra, vks: np.ndarray):
        self.alg = alg
        self.vks = vks
        self.cache: dict[int, np.ndarray] = {}
        self.units = [alg.unit(int(v)) for v in vks]

    def rows(self, states: Sequence[int]) -> np.ndarray:
        todo = sorted({int(s) for s in states if int(s) not in self.cache})
        if todo:
            grid = self.alg.valid_matrix(todo, self.vks)
            for s, row in zip(todo, grid):
                self.cache[s] = row
        return np.stack([self.cache[int(s)] for s in states]) if len(states) else np.zeros((0, len(self.vks)), bool)


def sweep(universe: Universe, left: Side, right: Side, max_ante: int, *, count: bool = False,
          accept: Sequence[Side] = (), state_limit: int = 2_000_000) -> SweepResult:
    """Compare ``left`` and ``right`` on every sequent of the universe.

    Returns the canonically first disagreement. With ``count`` set, every
    size is examined and the exact number of disagreeing sequents is
    returned (antecedent bound at most 2).
    """
    if count and max_ante > 2:
        raise ValueError("exact disagreement counts are implemented for antecedents of size <= 2")
    g = group(universe, [left, right], accept)
    n = len(g.first)
    cnt = np.array(g.counts, dtype=np.int64)
    formulas = int(sum(g.counts))
    sequents = formulas * sum(comb(formulas, k) for k in range(max_ante + 1))
    rl, rr = _Rows(left.algebra, g.vks[0]), _Rows(right.algebra, g.vks[1])
    if n == 0:
        return SweepResult(None, None, 0, 0, 0, 0 if count else None, max_ante)
    witness = None
    size = None
    total = 0
    single = None  # size-1 disagreement matrix, reused for repeated antecedents

    def seq(ante_groups, succ_group):
        return Sequent([g.first[a] for a in ante_groups], g.first[succ_group])

    for k in range(max_ante + 1):
        if k == 0:
            diff = rl.rows([TOP]) != rr.rows([TOP])
            if diff.any():
                total += int(cnt[diff[0]].sum())
                if witness is None:
                    witness, size = seq((), int(np.argmax(diff[0]))), 0
        elif k == 1:
            if n * n > state_limit * 8:
                raise BoundsTooLarge(f"{n:,} formula classes is too many patterns")
            diff = rl.rows(rl.units) != rr.rows(rr.units)
            single = diff
            if diff.any():
                total += sum(int(cnt[i]) * int(cnt[diff[i]].sum()) for i in np.nonzero(diff.any(axis=1))[0])
                if witness is None:
                    i = int(np.argmax(diff.any(axis=1)))
                    witness, size = seq((i,), int(np.argmax(diff[i]))), 1
        else:
            if comb(n, k) > state_limit:
                raise BoundsTooLarge(f"{comb(n, k):,} antecedent patterns of size {k} exceeds the limit")
            if count and single is not None and single.any():
                # two formulas from one class behave as that class alone
                for i in np.nonzero(single.any(axis=1))[0]:
                    total += comb(int(cnt[i]), 2) * int(cnt[single[i]].sum())
            found = False
            for prefix in itertools.combinations(range(n), k - 1):
                partners = np.arange(prefix[-1] + 1, n)
                if not len(partners):
                    continue
                sl, sr = TOP, TOP
                for p in prefix:
                    sl = left.algebra.meet(sl, rl.units[p])
                    sr = right.algebra.meet(sr, rr.units[p])
                stl = [left.algebra.meet(sl, rl.units[h]) for h in partners]
                str_ = [right.algebra.meet(sr, rr.units[h]) for h in partners]
                diff = rl.rows(stl) != rr.rows(str_)
                if diff.any():
                    if count:
                        weight = int(np.prod([int(cnt[p]) for p in prefix]))
                        inner = diff.astype(np.int64) @ cnt
                        total += weight * int((cnt[partners] * inner).sum())
                    if witness is None:
                        r = int(np.argmax(diff.any(axis=1)))
                        witness, size = seq((*prefix, int(partners[r])), int(np.argmax(diff[r]))), k
                        found = True
                        if not count:
                            break
            if found and not count:
                break
        if witness is not None and not count:
            return SweepResult(witness, size, n, formulas, sequents, None, k)
    return SweepResult(witness, size, n, formulas, sequents, total if count else None, max_ante)


def interderivability_labels(alg: Algebra, vks: Sequence[int]) -> np.ndarray:
    """Label each vkey by its class under mutual single-premise derivability."""
    vks = list(vks)
    if not vks:
        return np.zeros(0, dtype=np.int64)
    units = [alg.unit(int(v)) for v in vks]
    m = alg.valid_matrix(units, vks)
    mutual = m & m.T
    parent = list(range(len(vks)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in zip(*np.nonzero(mutual)):
        a, b = find(int(i)), find(int(j))
        if a != b:
            parent[max(a, b)] = min(a, b)
    return np.array([find(i) for i in range(len(vks))], dtype=np.int64)
