"""Stance classification for a change of logic.

Three formal questions (equivalence, conservative extension, recapture) are
answered by the checks in :mod:`recapture.systems`. A fourth question, whether
the old system can be given a meaningful reading inside the new theory, is
interpretive and always comes from the caller. :func:`classify_stance` walks
a decision chart over the four answers. The chart is a reconstruction, and
every report says so.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .engines.intuitionistic import Budget
from .syntax import Bounds
from .systems import (
    DEFAULT_BUDGET,
    FAILS,
    HOLDS,
    IDENTITY,
    ConsequenceSystem,
    RecaptureConstraint,
    TranslationMap,
    Verdict,
    check_conservative_extension,
    check_equivalence,
    check_recapture,
)

REPORT_FORMAT = "recapture-report/1"


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown-at-bounds"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def of(cls, value: "Tri | bool | str | None") -> "Tri":
        if isinstance(value, Tri):
            return value
        if value is None:
            return cls.UNKNOWN
        if isinstance(value, bool):
            return cls.YES if value else cls.NO
        return cls(value)


@dataclass
class StanceAnswers:
    equivalent: Tri
    conservative_extension: Tri
    recaptures: Tri
    meaningful: bool | None = None
    bounds: Bounds | None = None
    evidence: dict[str, Verdict] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.equivalent = Tri.of(self.equivalent)
        self.conservative_extension = Tri.of(self.conservative_extension)
        self.recaptures = Tri.of(self.recaptures)


# Where each branch comes from, in this package's words.
ANCHORS = {
    "reactionary right": "the new system is read as a conservative extension of the old; the old theory keeps its standing",
    "centre right": "recapture is welcomed as a sign that the new system is a progressive successor",
    "centre left": "recapture is granted as a formal fact but treated as a curiosity without significance",
    "radical left": "recapture is denied: no suitable constraint is expressible in the new system",
    "notational-variant": "the systems are equivalent, so at system level neither replaces the other",
}
RIVALRY_RULE = "without conservative extension, rivalry follows"
COMPETITION_RULE = "without recapture, competition follows"
EQUIVALENCE_CAVEAT = (
    "equivalent systems can still embed rival theories; equivalence settles the system-level question only"
)
RECONSTRUCTION_NOTE = "decision chart reconstructed from prose descriptions; its question order is not from a figure"


@dataclass
class StanceReport:
    relation: str | None  # supplement | rival
    role: str | None  # successor | competitor
    stance: str
    justification: list[str]
    notes: list[str]
    blocking: str | None = None
    bounds: Bounds | None = None

    @property
    def anchor(self) -> str | None:
        return ANCHORS.get(self.stance)

    def to_dict(self) -> dict:
        return {
            "format": REPORT_FORMAT,
            "stance": self.stance,
            "relation": self.relation or "n/a",
            "role": self.role or "n/a",
            "anchor": self.anchor,
            "blocking": self.blocking,
            "justification": list(self.justification),
            "notes": list(self.notes),
            "bounds": None if self.bounds is None else str(self.bounds),
        }

    def render(self) -> str:
        d = self.to_dict()
        lines = [
            f"stance: {d['stance']}",
            f"relation: {d['relation']}",
            f"role: {d['role']}",
        ]
        if self.anchor:
            lines.append(f"anchor: {self.anchor}")
        if self.blocking:
            lines.append(f"blocked by: {self.blocking}")
        lines += [f"because: {j}" for j in self.justification]
        lines += [f"note: {n}" for n in self.notes]
        lines.append(f"bounds: {d['bounds'] or 'n/a'} (answers hold at these bounds only)")
        return "\n".join(lines)


def classify_stance(a: StanceAnswers) -> StanceReport:
    """Total over every combination of answers."""
    why = [
        f"equivalent: {a.equivalent}",
        f"conservative extension: {a.conservative_extension}",
    ]
    notes = [RECONSTRUCTION_NOTE]
    relation = {Tri.YES: "supplement", Tri.NO: "rival"}.get(a.conservative_extension)
    if a.conservative_extension is Tri.NO:
        why.append(RIVALRY_RULE)
    if relation == "rival" and a.equivalent is Tri.YES:
        relation = None

    def report(stance, role=None, blocking=None):
        return StanceReport(relation, role, stance, why, notes, blocking, a.bounds)

    if a.equivalent is Tri.YES:
        notes.append(EQUIVALENCE_CAVEAT)
        return report("notational-variant")
    if a.equivalent is Tri.UNKNOWN:
        return report("indeterminate", blocking="equivalent")
    if a.conservative_extension is Tri.YES:
        return report("reactionary right")
    if a.conservative_extension is Tri.UNKNOWN:
        return report("indeterminate", blocking="conservative_extension")
    why.append(f"recaptures: {a.recaptures}")
    if a.recaptures is Tri.NO:
        why.append(COMPETITION_RULE)
        return report("radical left", "competitor")
    if a.recaptures is Tri.UNKNOWN:
        return report("indeterminate", blocking="recaptures")
    if a.meaningful is None:
        return report("indeterminate", blocking="meaningful")
    why.append(f"meaningful interpretation (supplied): {'yes' if a.meaningful else 'no'}")
    if a.meaningful:
        return report("centre right", "successor")
    return report("centre left", "competitor")


def _tri(v: Verdict) -> Tri:
    if v.outcome == HOLDS:
        return Tri.YES
    if v.outcome == FAILS:
        return Tri.NO
    return Tri.UNKNOWN


def derive_formal_answers(new: ConsequenceSystem, old: ConsequenceSystem,
                          maps: tuple[TranslationMap, TranslationMap] = (IDENTITY, IDENTITY),
                          constraint: RecaptureConstraint | None = None, bounds: Bounds = Bounds(),
                          budget: Budget = DEFAULT_BUDGET, method: str = "auto",
                          meaningful: bool | None = None) -> StanceAnswers:
    """Answer the three formal questions; the interpretive one is passed through."""
    eq = check_equivalence(new, old, maps[0], maps[1], bounds, budget, method)
    ce = check_conservative_extension(new, old, bounds, budget, method)
    # a signature that does not grow properly is a definite no, not a gap in the search
    ce_answer = Tri.NO if ce.reason == "signature" else _tri(ce)
    evidence = {"equivalent": eq, "conservative_extension": ce}
    if constraint is None:
        rec = Tri.UNKNOWN
    else:
        rv = check_recapture(new, old, constraint, maps, bounds, budget, method)
        evidence["recaptures"] = rv
        rec = _tri(rv)
    return StanceAnswers(_tri(eq), ce_answer, rec, meaningful, bounds, evidence)
