"""Relations between propositional consequence systems, checked at bounds."""

from .engines.intuitionistic import Budget, intuitionistic_validates
from .engines.kripke import KripkeModel, kripke_countermodel
from .engines.matrix import (
    CLASSICAL,
    K3,
    L3,
    LP,
    Matrix,
    classical_validates,
    counter_valuation,
    matrix_validates,
    restrict_matrix,
)
from .errors import (
    BoundsTooLarge,
    BudgetExhausted,
    CacheCorruption,
    ConstraintError,
    CoverageError,
    DefinitionError,
    LogicError,
    MatrixError,
    ParseError,
    SignatureError,
)
from .syntax import (
    CORE,
    SCHEMES,
    AxiomScheme,
    Bounds,
    Sequent,
    Signature,
    enumerate_sequents,
    enumerate_wffs,
    parse_formula,
    parse_sequent,
    render_formula,
    render_sequent,
)
from .systems import (
    BUILTIN_SYSTEMS,
    DOUBLE_NEGATION,
    GODEL_GENTZEN,
    IDENTITY,
    J,
    K,
    K3_SYSTEM,
    L3_SYSTEM,
    LP_SYSTEM,
    ConsequenceSystem,
    RecaptureConstraint,
    TranslationMap,
    Verdict,
    check_conservative_extension,
    check_equivalence,
    check_recapture,
    check_translation,
    compare_theorems,
    coverage,
    find_divergence,
    fragment,
    relativize,
    snapshot,
    subsystem,
)
from .taxonomy import StanceAnswers, StanceReport, Tri, classify_stance, derive_formal_answers

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
