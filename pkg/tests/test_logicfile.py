from pathlib import Path

import pytest

from recapture.engines.matrix import LP
from recapture.errors import DefinitionError
from recapture.logicfile import load_definition, parse_definition
from recapture.syntax import Bounds, parse_sequent
from recapture.systems import HOLDS, IntuitionisticSystem, K, check_conservative_extension

LOGICS = Path(__file__).resolve().parent.parent / "logics"

XOR = """\
name: Xor
values: 0 1
designated: 1
table not:
  0 1
  1 0
table Xor/2:
  * 0 1
  0 0 1
  1 1 0
scheme SELF: ~Xor(A, A)
"""


def test_bundled_files():
    lp = load_definition(LOGICS / "lp.logic")
    assert lp.system.matrix.same_tables(LP)
    assert "EXPLOSION" in lp.schemes
    modal = load_definition(LOGICS / "modal_standin.logic")
    assert "Box" in modal.system.signature
    assert check_conservative_extension(modal.system, K, Bounds(1, 2, 1)).outcome == HOLDS


def test_bad_table_names_its_line():
    with pytest.raises(DefinitionError, match=r"line 9: table and is not total; missing \(t, t\)"):
        load_definition(LOGICS / "bad_table.logic")


def test_user_connective_and_scheme():
    d = parse_definition(XOR)
    assert d.system.validates(parse_sequent("Xor(p, ~p) |- ~Xor(p, p)", d.system.signature))
    assert str(d.schemes["SELF"]) == "SELF: (~Xor(A, A))"


def test_builtin_kinds():
    assert isinstance(parse_definition("name: Int\nkind: intuitionistic\n").system, IntuitionisticSystem)
    assert parse_definition("name: C\nkind: classical\n").system.validates(parse_sequent("|- p | ~p"))


@pytest.mark.parametrize("text, line, fragment", [
    ("values: a\n", None, "name"),
    ("name: X\nvalues: f t\ndesignated: x\ntable not:\n  f t\n  t f\n", 3, "not among"),
    ("name: X\nvalues: f t\ndesignated: t\ntable not:\n  f t\n  t q\n", 6, "unknown value"),
    ("name: X\nvalues: f t\ndesignated: t\ntable box:\n  f t\n", 4, "capital"),
    ("name: X\nvalues: f t\ndesignated: t\ntable Box:\n  f t\n", 4, "arity"),
    ("name: X\nvalues: f t\ndesignated: t\ntable not:\n  f t\n  f f\n", 6, "twice"),
    ("name: X\nvalues: f t\ndesignated: t\n  f t\n", 4, "outside"),
    ("name: X\nkind: classical\ntable not:\n  f t\n  t f\n", 3, "takes no tables"),
    ("name: X\nvalues: f t\ndesignated: t\ntable not:\n  f t\n  t f\nscheme E: A |\n", 7, "scheme E"),
    ("name: X\nwhatever\n", 2, "cannot read"),
])
def test_errors(text, line, fragment):
    with pytest.raises(DefinitionError) as exc:
        parse_definition(text)
    assert fragment in str(exc.value)
    if line is not None:
        assert f"line {line}:" in str(exc.value)


def test_missing_file():
    with pytest.raises(DefinitionError, match="cannot read"):
        load_definition("/nonexistent/x.logic")
