"""Line-oriented logic definition files.

::

    # comments run to the end of the line
    name: ModalStandIn
    kind: matrix                  # matrix | classical | intuitionistic
    values: f t
    designated: t
    table bottom: f               # constants take their value inline
    table not:                    # unary: indented "argument result" rows
      f t
      t f
    table and:                    # binary: a grid headed by "*" ...
      * f t
      f f f
      t f t
    table or:                     # ... or indented "left right result" rows
      f f f
      f t t
      t f t
      t t t
    table Box/1:                  # new connectives are capitalized, with arity
      f f
      t t
    scheme EM2: A | ~A            # schemes may use the file's connectives

Every error names the offending line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .engines.matrix import CLASSICAL, Matrix
from .errors import DefinitionError, LogicError
from .syntax import CORE, CORE_CONNECTIVES, AxiomScheme
from .systems import ConsequenceSystem, IntuitionisticSystem, MatrixSystem

_HEADER = re.compile(r"table\s+([A-Za-z][A-Za-z0-9_]*)(?:/(\d+))?\s*:\s*(.*)\Z")
_FIELD = re.compile(r"(name|kind|values|designated)\s*:\s*(.*)\Z")
_SCHEME = re.compile(r"scheme\s+([A-Za-z][A-Za-z0-9_]*)\s*:\s*(.+)\Z")


@dataclass
class LogicDefinition:
    name: str
    kind: str
    system: ConsequenceSystem
    schemes: dict[str, AxiomScheme] = field(default_factory=dict)


@dataclass
class _Table:
    name: str
    arity: int
    line: int
    inline: str
    rows: list[tuple[int, list[str]]] = field(default_factory=list)


def _words(text: str) -> list[str]:
    return [w for w in re.split(r"[\s,]+", text.strip()) if w]


def parse_definition(text: str) -> LogicDefinition:
    fields: dict[str, tuple[int, str]] = {}
    tables: list[_Table] = []
    schemes: list[tuple[int, str, str]] = []
    current: _Table | None = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if raw[:1] in (" ", "\t"):
            if current is None:
                raise DefinitionError("indented row outside a table block", n)
            current.rows.append((n, _words(line)))
            continue
        current = None
        stripped = line.strip()
        if m := _FIELD.match(stripped):
            if m.group(1) in fields:
                raise DefinitionError(f"{m.group(1)!r} given twice", n)
            fields[m.group(1)] = (n, m.group(2).strip())
        elif m := _HEADER.match(stripped):
            name, arity = m.group(1), m.group(2)
            if name in CORE_CONNECTIVES:
                core_arity = CORE_CONNECTIVES[name][0]
                if arity is not None and int(arity) != core_arity:
                    raise DefinitionError(f"{name} has arity {core_arity}, not {arity}", n)
                ar = core_arity
            elif not name[0].isupper():
                raise DefinitionError(f"unknown connective {name!r}; new connectives start with a capital", n)
            elif arity is None:
                raise DefinitionError(f"new connective {name!r} needs an arity, as in {name}/1", n)
            else:
                ar = int(arity)
            if any(t.name == name for t in tables):
                raise DefinitionError(f"table {name!r} given twice", n)
            current = _Table(name, ar, n, m.group(3).strip())
            tables.append(current)
        elif m := _SCHEME.match(stripped):
            schemes.append((n, m.group(1), m.group(2)))
        else:
            raise DefinitionError(f"cannot read {stripped!r}", n)

    if "name" not in fields:
        raise DefinitionError("missing 'name:' line")
    name = fields["name"][1]
    kind = fields.get("kind", (0, "matrix"))[1]
    if kind not in ("matrix", "classical", "intuitionistic"):
        raise DefinitionError(f"kind must be matrix, classical or intuitionistic, not {kind!r}", fields["kind"][0])

    if kind == "matrix":
        system = _matrix_system(name, fields, tables)
    else:
        if tables:
            raise DefinitionError(f"a {kind} logic takes no tables", tables[0].line)
        system = MatrixSystem(CLASSICAL, name, CORE) if kind == "classical" else IntuitionisticSystem(name)

    parsed = {}
    for n, sname, body in schemes:
        try:
            parsed[sname] = AxiomScheme.parse(sname, body, system.signature)
        except LogicError as exc:
            raise DefinitionError(f"scheme {sname}: {exc}", n) from None
    return LogicDefinition(name, kind, system, parsed)


def _matrix_system(name: str, fields: dict, tables: list[_Table]) -> MatrixSystem:
    for key in ("values", "designated"):
        if key not in fields:
            raise DefinitionError(f"a matrix needs a '{key}:' line")
    vline, vtext = fields["values"]
    values = _words(vtext)
    if not values or len(set(values)) != len(values):
        raise DefinitionError("values must be distinct and non-empty", vline)
    dline, dtext = fields["designated"]
    designated = _words(dtext)
    for d in designated:
        if d not in values:
            raise DefinitionError(f"designated value {d!r} is not among the values", dline)
    if not designated:
        raise DefinitionError("at least one value must be designated", dline)
    if not tables:
        raise DefinitionError("a matrix needs at least one table")

    def value(v: str, line: int) -> str:
        if v not in values:
            raise DefinitionError(f"unknown value {v!r}", line)
        return v

    compiled: dict[str, object] = {}
    arities: dict[str, int] = {}
    for t in tables:
        arities[t.name] = t.arity
        compiled[t.name] = _table(t, values, value)
    try:
        m = Matrix(name, values, designated, compiled, arities)
    except LogicError as exc:
        raise DefinitionError(str(exc)) from None
    return MatrixSystem(m, name)


def _table(t: _Table, values: list[str], value) -> object:
    if t.arity == 0:
        if t.rows or len(_words(t.inline)) != 1:
            raise DefinitionError(f"constant {t.name} takes exactly one inline value", t.line)
        return value(_words(t.inline)[0], t.line)
    if t.inline:
        raise DefinitionError(f"table {t.name} lists its rows on indented lines below", t.line)
    if t.arity > 2:
        raise DefinitionError(f"{t.name}/{t.arity}: only arities 0, 1 and 2 are supported", t.line)
    out: dict = {}
    rows = t.rows
    if t.arity == 2 and rows and rows[0][1][:1] == ["*"]:
        hline, header = rows[0]
        cols = [value(v, hline) for v in header[1:]]
        for n, words in rows[1:]:
            if len(words) != len(cols) + 1:
                raise DefinitionError(f"row needs {len(cols) + 1} entries, found {len(words)}", n)
            a = value(words[0], n)
            for b, r in zip(cols, words[1:]):
                if (a, b) in out:
                    raise DefinitionError(f"{t.name}({a}, {b}) given twice", n)
                out[(a, b)] = value(r, n)
    else:
        for n, words in rows:
            if len(words) != t.arity + 1:
                raise DefinitionError(f"row needs {t.arity + 1} entries, found {len(words)}", n)
            args = tuple(value(v, n) for v in words[:-1])
            key = args[0] if t.arity == 1 else args
            if key in out:
                raise DefinitionError(f"{t.name}{args} given twice", n)
            out[key] = value(words[-1], n)
    expected = len(values) ** t.arity
    if len(out) != expected:
        if t.arity == 1:
            missing = [v for v in values if v not in out]
        else:
            missing = [f"({a}, {b})" for a in values for b in values if (a, b) not in out]
        raise DefinitionError(f"table {t.name} is not total; missing {', '.join(missing)}", t.line)
    return out


def load_definition(path: str | Path) -> LogicDefinition:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise DefinitionError(f"cannot read {p}: {exc.strerror}") from None
    return parse_definition(text)
