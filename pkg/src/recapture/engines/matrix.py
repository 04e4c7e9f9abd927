"""Finite many-valued matrices and designation-preserving consequence."""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import CoverageError, MatrixError
from ..syntax import CORE_CONNECTIVES, Atom, Connective, Formula, Sequent, Signature


class Matrix:
    """Truth values, a designated subset and one total table per connective.

    Tables are given by value name: a constant is a value, a unary table maps
    values to values, a binary table maps value pairs to values.
    """

    def __init__(self, name: str, values: Sequence[str], designated: Iterable[str],
                 tables: Mapping[str, object], arities: Mapping[str, int] | None = None):
        self.name = name
        self.values = tuple(values)
        if len(set(self.values)) != len(self.values) or not self.values:
            raise MatrixError(f"{name}: values must be a non-empty list of distinct names")
        self.designated = frozenset(designated)
        if not self.designated <= set(self.values):
            raise MatrixError(f"{name}: designated values {sorted(self.designated)} are not all values")
        index = {v: i for i, v in enumerate(self.values)}
        self._index = index
        self._arrays: dict[str, np.ndarray] = {}
        conns = []
        for conn, table in tables.items():
            arity = _arity(conn, table, arities)
            conns.append(Connective(conn, arity))
            self._arrays[conn] = _compile(name, conn, arity, table, index)
        self.signature = Signature(frozenset(conns))
        self.designated_mask = np.array([v in self.designated for v in self.values])

    # -- tables

    def array(self, conn: str) -> np.ndarray:
        try:
            return self._arrays[conn]
        except KeyError:
            raise CoverageError(f"matrix {self.name} has no table for {conn!r}") from None

    def table(self, conn: str) -> object:
        """Table in the by-name form accepted by the constructor."""
        arr = self.array(conn)
        vals = self.values
        if arr.ndim == 0:
            return vals[int(arr)]
        if arr.ndim == 1:
            return {vals[i]: vals[int(arr[i])] for i in range(len(vals))}
        return {(vals[i], vals[j]): vals[int(arr[i, j])]
                for i in range(len(vals)) for j in range(len(vals))}

    def index(self, value: str) -> int:
        return self._index[value]

    def __repr__(self) -> str:
        return f"Matrix({self.name!r}, values={list(self.values)}, designated={sorted(self.designated)})"

    def same_tables(self, other: "Matrix") -> bool:
        """Equal up to value order: same values, designation and tables."""
        return (set(self.values) == set(other.values) and self.designated == other.designated
                and self.signature == other.signature
                and all(self.table(c.name) == other.table(c.name) for c in self.signature))

    # -- vectorized evaluation

    def vectors(self, formulas: Sequence[Formula], atoms: Sequence[str]) -> np.ndarray:
        """Value of each formula under every valuation of ``atoms``.

        Rows follow ``formulas``; columns enumerate valuations in
        ``itertools.product`` order over the value list.
        """
        n = len(self.values)
        k = len(atoms)
        grid = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.uint8).reshape(n**k, k)
        column = {a: grid[:, i] for i, a in enumerate(atoms)}
        memo: dict[Formula, np.ndarray] = {}

        def ev(f: Formula) -> np.ndarray:
            got = memo.get(f)
            if got is not None:
                return got
            if isinstance(f, Atom):
                if f.name not in column:
                    raise CoverageError(f"valuation does not cover atom {f.name!r}")
                out = column[f.name]
            else:
                arr = self.array(f.connective)
                if arr.ndim == 0:
                    out = np.full(n**k, arr, dtype=np.uint8)
                elif arr.ndim == 1:
                    out = arr[ev(f.args[0])]
                else:
                    out = arr[ev(f.args[0]), ev(f.args[1])]
            memo[f] = out
            return out

        if not formulas:
            return np.zeros((0, n**k), dtype=np.uint8)
        return np.stack([ev(f) for f in formulas])


def _arity(conn: str, table: object, arities: Mapping[str, int] | None) -> int:
    if conn in CORE_CONNECTIVES:
        return CORE_CONNECTIVES[conn][0]
    if arities and conn in arities:
        return arities[conn]
    if isinstance(table, str):
        return 0
    if isinstance(table, Mapping) and table:
        key = next(iter(table))
        return 2 if isinstance(key, tuple) else 1
    raise MatrixError(f"cannot infer the arity of {conn!r}")


def _compile(name: str, conn: str, arity: int, table: object, index: dict[str, int]) -> np.ndarray:
    vals = list(index)

    def look(v: object) -> int:
        if v not in index:
            raise MatrixError(f"{name}: table {conn!r} uses unknown value {v!r}")
        return index[v]  # type: ignore[index]

    if arity == 0:
        if not isinstance(table, str):
            raise MatrixError(f"{name}: constant {conn!r} needs a single value")
        return np.array(look(table), dtype=np.uint8)
    if not isinstance(table, Mapping):
        raise MatrixError(f"{name}: table {conn!r} must be a mapping")
    if arity == 1:
        missing = [v for v in vals if v not in table]
        if missing:
            raise MatrixError(f"{name}: table {conn!r} is not total; missing {missing}")
        return np.array([look(table[v]) for v in vals], dtype=np.uint8)
    out = np.zeros((len(vals), len(vals)), dtype=np.uint8)
    for i, a in enumerate(vals):
        for j, b in enumerate(vals):
            if (a, b) not in table:
                raise MatrixError(f"{name}: table {conn!r} is not total; missing ({a}, {b})")
            out[i, j] = look(table[(a, b)])
    return out


def _ordered(name: str, values: Sequence[str], designated: Iterable[str],
             neg: Mapping[str, str], imp_rule) -> Matrix:
    """Matrix over a chain: min/max lattice, the given negation and implication."""
    rank = {v: i for i, v in enumerate(values)}
    pairs = [(a, b) for a in values for b in values]
    return Matrix(
        name, values, designated,
        {
            "bottom": values[0],
            "not": dict(neg),
            "and": {(a, b): min(a, b, key=rank.__getitem__) for a, b in pairs},
            "or": {(a, b): max(a, b, key=rank.__getitem__) for a, b in pairs},
            "imp": {(a, b): imp_rule(a, b) for a, b in pairs},
        },
    )


def _kleene_imp(values, neg):
    rank = {v: i for i, v in enumerate(values)}
    return lambda a, b: max(neg[a], b, key=rank.__getitem__)


_CL_NEG = {"f": "t", "t": "f"}
CLASSICAL = _ordered("K", ("f", "t"), ("t",), _CL_NEG, _kleene_imp(("f", "t"), _CL_NEG))

_K3_NEG = {"f": "t", "n": "n", "t": "f"}
K3 = _ordered("K3", ("f", "n", "t"), ("t",), _K3_NEG, _kleene_imp(("f", "n", "t"), _K3_NEG))

_LP_NEG = {"f": "t", "b": "b", "t": "f"}
LP = _ordered("LP", ("f", "b", "t"), ("b", "t"), _LP_NEG, _kleene_imp(("f", "b", "t"), _LP_NEG))

_L3_VALUES = ("0", "1/2", "1")
_L3_NUM = {"0": 0.0, "1/2": 0.5, "1": 1.0}
_L3_NAME = {0.0: "0", 0.5: "1/2", 1.0: "1"}
L3 = _ordered(
    "L3", _L3_VALUES, ("1",),
    {v: _L3_NAME[1.0 - _L3_NUM[v]] for v in _L3_VALUES},
    lambda a, b: _L3_NAME[min(1.0, 1.0 - _L3_NUM[a] + _L3_NUM[b])],
)

BUILTIN_MATRICES = {"K": CLASSICAL, "K3": K3, "LP": LP, "L3": L3}


# --------------------------------------------------------------------------
# operations


def evaluate(m: Matrix, v: Mapping[str, str], f: Formula) -> str:
    """Value of ``f`` under valuation ``v`` (atom name -> value name)."""
    if isinstance(f, Atom):
        if f.name not in v:
            raise CoverageError(f"valuation does not cover atom {f.name!r}")
        if v[f.name] not in m._index:
            raise CoverageError(f"{v[f.name]!r} is not a value of {m.name}")
        return v[f.name]
    arr = m.array(f.connective)
    args = [m.index(evaluate(m, v, a)) for a in f.args]
    return m.values[int(arr[tuple(args)])]


def _sequent_atoms(s: Sequent) -> list[str]:
    return sorted(s.atoms())


def matrix_validates(m: Matrix, s: Sequent) -> bool:
    """Designation is preserved under every valuation of the sequent's atoms."""
    formulas = list(s.formulas)
    vecs = m.vectors(formulas, _sequent_atoms(s))
    des = m.designated_mask[vecs]
    premises = des[:-1].all(axis=0)
    return bool(not (premises & ~des[-1]).any())


class MatrixDecider:
    """Repeated validity queries against one matrix, with per-formula memos.

    Designation patterns are kept as Python ints (one bit per valuation of
    the queried sequent's atoms), so a sequent check is a few bitwise ops.
    """

    def __init__(self, m: Matrix):
        self.matrix = m
        self._values: dict[tuple, np.ndarray] = {}
        self._masks: dict[tuple, int] = {}

    def _vector(self, f: Formula, atoms: tuple[str, ...]) -> np.ndarray:
        key = (f, atoms)
        got = self._values.get(key)
        if got is None:
            if isinstance(f, Atom):
                if f.name not in atoms:
                    raise CoverageError(f"valuation does not cover atom {f.name!r}")
                n, k = len(self.matrix.values), len(atoms)
                i = atoms.index(f.name)
                got = ((np.arange(n**k) // n ** (k - 1 - i)) % n).astype(np.uint8)
            else:
                arr = self.matrix.array(f.connective)
                if arr.ndim == 0:
                    got = np.full(len(self.matrix.values) ** len(atoms), arr, dtype=np.uint8)
                else:
                    got = arr[tuple(self._vector(a, atoms) for a in f.args)]
            self._values[key] = got
        return got

    def mask(self, f: Formula, atoms: tuple[str, ...]) -> int:
        key = (f, atoms)
        got = self._masks.get(key)
        if got is None:
            bits = self.matrix.designated_mask[self._vector(f, atoms)]
            got = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")
            self._masks[key] = got
        return got

    def __call__(self, s: Sequent) -> bool:
        atoms = tuple(_sequent_atoms(s))
        width = len(self.matrix.values) ** len(atoms)
        prem = (1 << width) - 1
        for a in s.antecedent:
            prem &= self.mask(a, atoms)
        return not prem & ~self.mask(s.succedent, atoms)


def counter_valuation(m: Matrix, s: Sequent) -> dict[str, str] | None:
    """First valuation (in value-list order) that designates every premise
    but not the conclusion, or None when the sequent is valid."""
    atoms = _sequent_atoms(s)
    vecs = m.vectors(list(s.formulas), atoms)
    des = m.designated_mask[vecs]
    bad = np.nonzero(des[:-1].all(axis=0) & ~des[-1])[0]
    if not len(bad):
        return None
    combo = next(itertools.islice(itertools.product(m.values, repeat=len(atoms)), int(bad[0]), None))
    return dict(zip(atoms, combo))


def classical_validates(s: Sequent) -> bool:
    return matrix_validates(CLASSICAL, s)


def restrict_matrix(m: Matrix, subset: Iterable[str]) -> Matrix:
    """Submatrix on ``subset``; it must be closed under every table."""
    keep = set(subset)
    if not keep:
        raise MatrixError("restriction needs a non-empty value subset")
    unknown = keep - set(m.values)
    if unknown:
        raise MatrixError(f"{sorted(unknown)} are not values of {m.name}")
    values = [v for v in m.values if v in keep]
    designated = m.designated & keep
    if not designated:
        raise MatrixError(f"restricting {m.name} to {sorted(keep)} leaves no designated value")
    tables: dict[str, object] = {}
    arities = {}
    for conn in m.signature:
        full = m.table(conn.name)
        arities[conn.name] = conn.arity
        if conn.arity == 0:
            inside = {full} if full in keep else set()
            if not inside:
                raise MatrixError(f"{conn.name!r} takes value {full!r} outside {sorted(keep)}")
            tables[conn.name] = full
        elif conn.arity == 1:
            tables[conn.name] = {a: full[a] for a in values}  # type: ignore[index]
        else:
            tables[conn.name] = {(a, b): full[(a, b)] for a in values for b in values}  # type: ignore[index]
        leaks = set(tables[conn.name].values()) - keep if conn.arity else set()  # type: ignore[union-attr]
        if leaks:
            raise MatrixError(
                f"{sorted(keep)} is not closed under {conn.name!r} (produces {sorted(leaks)})"
            )
    name = f"{m.name}[{','.join(values)}]"
    return Matrix(name, values, designated, tables, arities)
