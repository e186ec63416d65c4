"""Evaluation toolkit for natural-language to first-order-logic translation."""

from .analysis import (
    CategoryFlags,
    ErrorLabel,
    bin_by_complexity,
    classify_error,
    complexity,
    detect_categories,
)
from .dmatch import (
    Alignment,
    MatchScore,
    SearchConfig,
    best_alignment,
    brute_force_alignment,
    dmatch_score,
)
from .drs import ClauseSet, Drs, drs_to_clauses, fol_to_drs, formula_clauses
from .entail import (
    EntailConfig,
    EntailResult,
    Relation,
    Verdict,
    entails,
    logical_relation,
    prover_accuracy_verdict,
)
from .errors import (
    ConversionError,
    DuplicateBindingError,
    EmptyInputError,
    FormatError,
    LogicEvalError,
    NormalizationError,
    ParseError,
    PreconditionError,
    ProverTimeout,
    SizeError,
    ValidationError,
)
from .formula import check_wff, exact_match, parse_formula, print_formula
from .harness import (
    EvalConfig,
    PairRecord,
    PairResult,
    Report,
    aggregate,
    evaluate_corpus,
    evaluate_pair,
    load_corpus,
    render_report,
)
from .normalize import normalize
from .tptp import to_tptp

__version__ = "0.1.0"
