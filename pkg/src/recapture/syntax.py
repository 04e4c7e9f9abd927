"""Formula language: signatures, syntax trees, parsing, rendering, canonical
order, and bounded enumeration of formulas and sequents."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence, Union

from .errors import ParseError, SignatureError

# name -> (arity, token)
CORE_CONNECTIVES: dict[str, tuple[int, str]] = {
    "bottom": (0, "_|_"),
    "not": (1, "~"),
    "and": (2, "&"),
    "or": (2, "|"),
    "imp": (2, "->"),
}
BINARY_TOKENS = {"and": "&", "or": "|", "imp": "->"}

_USER_NAME = re.compile(r"[A-Z][A-Za-z0-9_]*\Z")
_ATOM_NAME = re.compile(r"[a-z][a-z0-9]*\Z")


# --------------------------------------------------------------------------
# signatures


@dataclass(frozen=True, order=True)
class Connective:
    name: str
    arity: int

    def __post_init__(self) -> None:
        if self.arity not in (0, 1, 2):
            raise SignatureError(f"connective {self.name!r}: arity must be 0, 1 or 2")
        if self.name in CORE_CONNECTIVES:
            expected = CORE_CONNECTIVES[self.name][0]
            if self.arity != expected:
                raise SignatureError(
                    f"core connective {self.name!r} has arity {expected}, not {self.arity}"
                )
        elif not _USER_NAME.match(self.name):
            raise SignatureError(
                f"user connective {self.name!r} must start with an upper-case letter"
            )

    @property
    def is_core(self) -> bool:
        return self.name in CORE_CONNECTIVES


@dataclass(frozen=True)
class Signature:
    """A finite set of connectives with unique names."""

    connectives: frozenset[Connective]

    def __post_init__(self) -> None:
        names = [c.name for c in self.connectives]
        if len(names) != len(set(names)):
            raise SignatureError("connective names must be unique within a signature")

    @classmethod
    def of(cls, *items: str | Connective | tuple[str, int]) -> "Signature":
        """Build from core names, ``(name, arity)`` pairs or connectives."""
        out = []
        for item in items:
            if isinstance(item, Connective):
                out.append(item)
            elif isinstance(item, tuple):
                out.append(Connective(*item))
            elif item in CORE_CONNECTIVES:
                out.append(Connective(item, CORE_CONNECTIVES[item][0]))
            else:
                raise SignatureError(f"unknown connective {item!r}; give its arity")
        return cls(frozenset(out))

    @classmethod
    def core(cls) -> "Signature":
        return cls.of(*CORE_CONNECTIVES)

    @classmethod
    def parse(cls, text: str) -> "Signature":
        """Read ``"not,and"`` or ``"not,Box/1"`` style lists."""
        items: list[str | tuple[str, int]] = []
        for part in filter(None, (p.strip() for p in text.split(","))):
            if "/" in part:
                name, _, arity = part.partition("/")
                items.append((name.strip(), int(arity)))
            else:
                items.append(part)
        return cls.of(*items)

    @property
    def names(self) -> frozenset[str]:
        return frozenset(c.name for c in self.connectives)

    def arity(self, name: str) -> int:
        for c in self.connectives:
            if c.name == name:
                return c.arity
        raise SignatureError(f"connective {name!r} is not in the signature")

    def __contains__(self, name: object) -> bool:
        return any(c.name == name for c in self.connectives)

    def __iter__(self) -> Iterator[Connective]:
        return iter(sorted(self.connectives, key=_connective_order))

    def __len__(self) -> int:
        return len(self.connectives)

    def __le__(self, other: "Signature") -> bool:
        return self.connectives <= other.connectives

    def __lt__(self, other: "Signature") -> bool:
        return self.connectives < other.connectives

    def __str__(self) -> str:
        return ",".join(f"{c.name}/{c.arity}" for c in self)


def _connective_order(c: Connective) -> tuple:
    core = list(CORE_CONNECTIVES)
    return (0, core.index(c.name), "") if c.is_core else (1, c.arity, c.name)


CORE = Signature.core()


# --------------------------------------------------------------------------
# formulas


@dataclass(frozen=True, slots=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class Compound:
    connective: str
    args: tuple["Formula", ...] = ()
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        # trees are hashed constantly (sets, memo tables); hash once
        object.__setattr__(self, "_hash", hash((self.connective, self.args)))

    def __hash__(self) -> int:
        return self._hash

    def __str__(self) -> str:
        return render_formula(self)


Formula = Union[Atom, Compound]

BOTTOM = Compound("bottom")


def neg(a: Formula) -> Formula:
    return Compound("not", (a,))


def conj(a: Formula, b: Formula) -> Formula:
    return Compound("and", (a, b))


def disj(a: Formula, b: Formula) -> Formula:
    return Compound("or", (a, b))


def imp(a: Formula, b: Formula) -> Formula:
    return Compound("imp", (a, b))


@lru_cache(maxsize=1 << 18)
def depth(f: Formula) -> int:
    if isinstance(f, Atom) or not f.args:
        return 0
    return 1 + max(depth(a) for a in f.args)


@lru_cache(maxsize=1 << 18)
def atoms_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset((f.name,))
    out: frozenset[str] = frozenset()
    for a in f.args:
        out |= atoms_of(a)
    return out


@lru_cache(maxsize=1 << 18)
def connectives_of(f: Formula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset()
    out = frozenset((f.connective,))
    for a in f.args:
        out |= connectives_of(a)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    """Post-order walk: children before parents."""
    if isinstance(f, Compound):
        for a in f.args:
            yield from subformulas(a)
    yield f


def substitute(f: Formula, mapping: dict[str, Formula]) -> Formula:
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    return Compound(f.connective, tuple(substitute(a, mapping) for a in f.args))


# --------------------------------------------------------------------------
# rendering and canonical order


@lru_cache(maxsize=1 << 18)
def render_formula(f: Formula) -> str:
    """Fully parenthesized text; only atoms and constants go bare."""
    if isinstance(f, Atom):
        return f.name
    c, args = f.connective, f.args
    if c == "bottom":
        return "_|_"
    if c == "not":
        return f"(~{render_formula(args[0])})"
    if c in BINARY_TOKENS:
        return f"({render_formula(args[0])} {BINARY_TOKENS[c]} {render_formula(args[1])})"
    if not args:
        return c
    return f"{c}({', '.join(render_formula(a) for a in args)})"


# Delimiters that can follow a name sort first, so a name sorts before any
# longer name it prefixes; atoms and letters sort before "(".
COLLATION = " ),abcdefghijklmnopqrstuvwxyz0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ(_~&|->"
_COLLATE_TABLE = {ord(ch): chr(0x100 + i) for i, ch in enumerate(COLLATION)}


def collate(text: str) -> str:
    """Map text to a string whose plain ordering is the canonical collation."""
    return text.translate(_COLLATE_TABLE)


def text_key(text: str, d: int) -> tuple[int, int, str]:
    return (d, len(text), collate(text))


def formula_key(f: Formula) -> tuple[int, int, str]:
    """Canonical order: depth, then rendered length, then collated text."""
    return text_key(render_formula(f), depth(f))


def sort_formulas(fs: Iterable[Formula]) -> list[Formula]:
    return sorted(set(fs), key=formula_key)


# --------------------------------------------------------------------------
# sequents and bounds


@dataclass(frozen=True)
class Sequent:
    antecedent: frozenset[Formula]
    succedent: Formula

    def __init__(self, antecedent: Iterable[Formula], succedent: Formula):
        object.__setattr__(self, "antecedent", frozenset(antecedent))
        object.__setattr__(self, "succedent", succedent)

    @property
    def formulas(self) -> tuple[Formula, ...]:
        return (*sorted(self.antecedent, key=formula_key), self.succedent)

    def atoms(self) -> frozenset[str]:
        out = atoms_of(self.succedent)
        for f in self.antecedent:
            out |= atoms_of(f)
        return out

    def connectives(self) -> frozenset[str]:
        out = connectives_of(self.succedent)
        for f in self.antecedent:
            out |= connectives_of(f)
        return out

    def map(self, fn) -> "Sequent":
        return Sequent((fn(a) for a in self.antecedent), fn(self.succedent))

    def __str__(self) -> str:
        return render_sequent(self)


def render_sequent(s: Sequent) -> str:
    ante = ", ".join(render_formula(a) for a in sorted(s.antecedent, key=formula_key))
    return f"{ante} |- {render_formula(s.succedent)}" if ante else f"|- {render_formula(s.succedent)}"


def sequent_key(s: Sequent) -> tuple:
    ante = sorted(formula_key(a) for a in s.antecedent)
    return (len(ante), ante, formula_key(s.succedent))


ATOM_ALPHABET = tuple("pqrstuvwxyz")


def atom_names(n: int) -> tuple[str, ...]:
    """The first ``n`` atoms: p, q, ..., z, then p1, q1, ..."""
    out = []
    for i in range(n):
        base, rnd = ATOM_ALPHABET[i % len(ATOM_ALPHABET)], i // len(ATOM_ALPHABET)
        out.append(base if rnd == 0 else f"{base}{rnd}")
    return tuple(out)


@dataclass(frozen=True)
class Bounds:
    atoms: int = 2
    depth: int = 3
    ante: int = 2

    def __post_init__(self) -> None:
        for name in ("atoms", "depth", "ante"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"bound {name} must be a non-negative integer, got {value!r}")

    @property
    def atom_names(self) -> tuple[str, ...]:
        return atom_names(self.atoms)

    def __str__(self) -> str:
        return f"atoms<={self.atoms}, depth<={self.depth}, ante<={self.ante}"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<bot>_\|_)|(?P<turn>\|-(?!>))|(?P<imp>->)|(?P<op>[~&|(),])"
    r"|(?P<atom>[a-z][a-z0-9]*)|(?P<user>[A-Z][A-Za-z0-9_]*))"
)


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    out, pos = [], 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unknown symbol {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tok = m.group(kind)
        out.append(_Token(tok if kind == "op" else kind, tok, start))
        pos = m.end()
    out.append(_Token("end", "", len(text)))
    return out


@dataclass
class _Parser:
    tokens: list[_Token]
    sig: Signature
    metavariables: bool = False
    pos: int = 0
    opens: list[int] = field(default_factory=list)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def need(self, name: str, offset: int) -> None:
        if name not in self.sig:
            raise ParseError(f"connective {name!r} is not in the signature", offset)

    def formula(self) -> Formula:
        left = self.disjunction()
        tok = self.peek()
        if tok.kind == "imp":
            self.take()
            self.need("imp", tok.offset)
            return Compound("imp", (left, self.formula()))
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek().kind == "|":
            tok = self.take()
            self.need("or", tok.offset)
            left = Compound("or", (left, self.conjunction()))
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek().kind == "&":
            tok = self.take()
            self.need("and", tok.offset)
            left = Compound("and", (left, self.unary()))
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "~":
            self.take()
            self.need("not", tok.offset)
            return Compound("not", (self.unary(),))
        return self.primary()

    def primary(self) -> Formula:
        tok = self.take()
        if tok.kind == "atom":
            return Atom(tok.text)
        if tok.kind == "bot":
            self.need("bottom", tok.offset)
            return BOTTOM
        if tok.kind == "(":
            inner = self.formula()
            close = self.take()
            if close.kind != ")":
                if close.kind == "end":
                    raise ParseError("unbalanced parentheses: '(' is never closed", tok.offset)
                raise ParseError(f"expected ')', found {close.text!r}", close.offset)
            return inner
        if tok.kind == "user":
            return self.user(tok)
        if tok.kind == "end":
            raise ParseError("expected a formula, found end of input", tok.offset)
        if tok.kind == ")":
            raise ParseError("unbalanced parentheses: unexpected ')'", tok.offset)
        raise ParseError(f"expected a formula, found {tok.text!r}", tok.offset)

    def user(self, tok: _Token) -> Formula:
        if tok.text not in self.sig:
            if self.metavariables and self.peek().kind != "(":
                return Atom(tok.text)
            raise ParseError(f"connective {tok.text!r} is not in the signature", tok.offset)
        arity = self.sig.arity(tok.text)
        if arity == 0:
            if self.peek().kind == "(":
                raise ParseError(f"arity error: {tok.text!r} takes no arguments", self.peek().offset)
            return Compound(tok.text)
        if self.peek().kind != "(":
            raise ParseError(f"arity error: {tok.text!r} needs {arity} argument(s)", self.peek().offset)
        open_tok = self.take()
        args = [self.formula()]
        while self.peek().kind == ",":
            self.take()
            args.append(self.formula())
        close = self.take()
        if close.kind == "end":
            raise ParseError("unbalanced parentheses: '(' is never closed", open_tok.offset)
        if close.kind != ")":
            raise ParseError(f"expected ')', found {close.text!r}", close.offset)
        if len(args) != arity:
            raise ParseError(
                f"arity error: {tok.text!r} takes {arity} argument(s), got {len(args)}", tok.offset
            )
        return Compound(tok.text, tuple(args))

    def finish(self) -> None:
        tok = self.peek()
        if tok.kind == ")":
            raise ParseError("unbalanced parentheses: unexpected ')'", tok.offset)
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.offset)


def parse_formula(text: str, sig: Signature = CORE, *, metavariables: bool = False) -> Formula:
    """Parse one formula. With ``metavariables`` set, unknown upper-case names
    become schematic letters."""
    tokens = _tokenize(text)
    for tok in tokens:
        if tok.kind in ("turn",):
            raise ParseError("unexpected '|-' inside a formula", tok.offset)
    parser = _Parser(tokens, sig, metavariables)
    f = parser.formula()
    parser.finish()
    return f


def parse_sequent(text: str, sig: Signature = CORE) -> Sequent:
    """Parse ``"A, B |- C"``; the antecedent may be empty."""
    tokens = _tokenize(text)
    turns = [i for i, t in enumerate(tokens) if t.kind == "turn"]
    if len(turns) != 1:
        where = tokens[turns[1]].offset if len(turns) > 1 else 0
        raise ParseError("a sequent needs exactly one '|-'", where)
    split = turns[0]
    ante: list[Formula] = []
    left = tokens[:split] + [_Token("end", "", tokens[split].offset)]
    if len(left) > 1:
        parser = _Parser(left, sig)
        ante.append(parser.formula())
        while parser.peek().kind == ",":
            parser.take()
            ante.append(parser.formula())
        parser.finish()
    parser = _Parser(tokens[split + 1 :], sig)
    succ = parser.formula()
    parser.finish()
    return Sequent(ante, succ)


# --------------------------------------------------------------------------
# enumeration


def count_wffs(sig: Signature, bounds: Bounds) -> int:
    """Closed-form size of ``enumerate_wffs(sig, bounds)``."""
    arity = [c.arity for c in sig.connectives]
    base = bounds.atoms + arity.count(0)
    unary, binary = arity.count(1), arity.count(2)
    exact, upto, prev_upto = base, base, 0
    for _ in range(bounds.depth):
        exact = unary * exact + binary * (upto * upto - prev_upto * prev_upto)
        prev_upto, upto = upto, upto + exact
    return upto


def count_sequents(n_wffs: int, max_antecedent: int) -> int:
    return n_wffs * sum(comb(n_wffs, k) for k in range(max_antecedent + 1))


def iter_layers(sig: Signature, bounds: Bounds) -> Iterator[list[tuple[Formula, str]]]:
    """Yield each exact-depth layer as canonically sorted ``(formula, text)``."""
    layer = [(Atom(a), a) for a in bounds.atom_names]
    layer += [(Compound(c.name), render_formula(Compound(c.name))) for c in sig if c.arity == 0]
    layer.sort(key=lambda ft: text_key(ft[1], 0))
    yield layer
    everything = list(layer)
    unary = [c.name for c in sig if c.arity == 1]
    binary = [c.name for c in sig if c.arity == 2]
    for d in range(1, bounds.depth + 1):
        fresh: list[tuple[Formula, str]] = []
        for name in unary:
            for f, t in layer:
                g = Compound(name, (f,))
                fresh.append((g, _wrap1(name, t)))
        n_old = len(everything) - len(layer)
        for name in binary:
            for i, (f, t) in enumerate(everything):
                # at least one child must sit in the newest layer
                start = 0 if i >= n_old else n_old
                for g, u in everything[start:]:
                    fresh.append((Compound(name, (f, g)), _wrap2(name, t, u)))
        fresh.sort(key=lambda ft: text_key(ft[1], d))
        yield fresh
        layer = fresh
        everything.extend(fresh)


def _wrap1(name: str, t: str) -> str:
    return f"(~{t})" if name == "not" else f"{name}({t})"


def _wrap2(name: str, t: str, u: str) -> str:
    if name in BINARY_TOKENS:
        return f"({t} {BINARY_TOKENS[name]} {u})"
    return f"{name}({t}, {u})"


def enumerate_wffs(sig: Signature, bounds: Bounds) -> list[Formula]:
    """All formulas over the first ``bounds.atoms`` atoms with depth at most
    ``bounds.depth``, in canonical order."""
    return [f for layer in iter_layers(sig, bounds) for f, _ in layer]


def iter_sequents(wffs: Sequence[Formula], max_antecedent: int) -> Iterator[Sequent]:
    n = len(wffs)
    for k in range(max_antecedent + 1):
        for combo in itertools.combinations(range(n), k):
            ante = frozenset(wffs[i] for i in combo)
            for j in range(n):
                yield Sequent(ante, wffs[j])


def enumerate_sequents(wffs: Sequence[Formula], max_antecedent: int) -> list[Sequent]:
    """Sequents ordered by antecedent size, antecedent indices, succedent index."""
    if len(set(wffs)) != len(wffs):
        raise ValueError("formula list contains duplicates")
    return list(iter_sequents(wffs, max_antecedent))


# --------------------------------------------------------------------------
# schemes


@dataclass(frozen=True)
class AxiomScheme:
    """A schematic formula; upper-case letters are the metavariables."""

    name: str
    template: Formula

    @classmethod
    def parse(cls, name: str, text: str, sig: Signature = CORE) -> "AxiomScheme":
        return cls(name, parse_formula(text, sig, metavariables=True))

    @property
    def metavariables(self) -> tuple[str, ...]:
        return tuple(sorted(a for a in atoms_of(self.template) if not _ATOM_NAME.match(a)))

    def connectives(self) -> frozenset[str]:
        return connectives_of(self.template)

    def instances(self, atoms: Sequence[str]) -> list[Formula]:
        """Every substitution of atoms for metavariables, before deduplication."""
        mv = self.metavariables
        return [
            substitute(self.template, {m: Atom(a) for m, a in zip(mv, choice)})
            for choice in itertools.product(atoms, repeat=len(mv))
        ]

    def __str__(self) -> str:
        return f"{self.name}: {render_formula(self.template)}"


def instantiate_scheme(s: AxiomScheme, atoms: Sequence[str]) -> list[Formula]:
    """All instances over ``atoms``, deduplicated and canonically ordered."""
    if not atoms:
        raise ValueError("instantiation needs at least one atom")
    return sort_formulas(s.instances(atoms))


SCHEMES: dict[str, AxiomScheme] = {
    "EM": AxiomScheme.parse("EM", "A | ~A"),
    "DNE": AxiomScheme.parse("DNE", "~~A -> A"),
    "NC": AxiomScheme.parse("NC", "~(A & ~A)"),
}
