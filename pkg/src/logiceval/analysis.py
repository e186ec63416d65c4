"""Complexity, binning, syntactic categories and misprediction labels."""

from __future__ import annotations

import enum
import re
from collections import defaultdict
from dataclasses import dataclass

from .dmatch import SearchConfig, alignment_matches, best_alignment
from .drs import formula_clauses
from .entail import prover_accuracy_verdict
from .errors import PreconditionError
from .formula import (
    AtomKind,
    Conj,
    Exists,
    Formula,
    Neg,
    Sort,
    Variable,
    bound_variables,
    free_variables,
    iter_atoms,
    iter_nodes,
    negation_count,
)

ROLE_LABELS = ("subj", "obj")


def complexity(f: Formula) -> int:
    """Count logical constants: bound variables, negations and binary ``&``."""
    n = 0
    for node in iter_nodes(f):
        if isinstance(node, Exists):
            n += len(node.vars)
        elif isinstance(node, Neg):
            n += 1
        elif isinstance(node, Conj):
            n += len(node.children) - 1
    return n


def bin_by_complexity(items, k: int = 6) -> list[list]:
    """Sort ``(id, complexity)`` pairs by (complexity, id) and cut into ``k``
    contiguous groups whose sizes differ by at most one (larger groups first)."""
    if k < 1:
        raise ValueError("bin count must be positive")
    ordered = sorted(items, key=lambda it: (it[1], it[0]))
    base, extra = divmod(len(ordered), k)
    bins, start = [], 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        bins.append([item_id for item_id, _ in ordered[start:start + size]])
        start += size
    return bins


# ---------------------------------------------------------------------------
# syntactic categories


class FlagSource(enum.Enum):
    PROVIDED = "Provided"
    HEURISTIC = "Heuristic"


@dataclass(frozen=True)
class CategoryFlags:
    cc: bool = False
    pp: bool = False
    pss: bool = False
    source: FlagSource = FlagSource.HEURISTIC

    def as_dict(self) -> dict:
        return {"cc": self.cc, "pp": self.pp, "pss": self.pss, "source": self.source.value}


_COORD_RE = re.compile(r"\b(and|or)\b", re.IGNORECASE)
_PASSIVE_RE = re.compile(
    r"\b\w+(?:ed|en|wn)\s+by\b|\bbeing\s+\w+(?:ed|en|wn)\b", re.IGNORECASE
)


def _event_structure(f: Formula):
    unary = defaultdict(set)  # event var -> unary predicate names
    roles = defaultdict(lambda: defaultdict(set))  # event var -> role -> values
    binary = []
    for a in iter_atoms(f):
        if a.kind is AtomKind.PREDICATE and len(a.args) == 1:
            t = a.args[0]
            if isinstance(t, Variable) and t.sort is Sort.EVENT:
                unary[t].add(a.name)
        elif a.kind is AtomKind.ROLE_EQ:
            roles[a.args[0]][a.name].add(a.args[1])
        elif a.kind is AtomKind.PREDICATE and len(a.args) == 2:
            binary.append(a)
    return unary, roles, binary


def detect_categories(f: Formula, sentence: str | None = None, provided=None) -> CategoryFlags:
    """Heuristic CC/PP/PSS flags from the formula and, if given, the sentence.

    ``provided`` (a mapping with any of ``cc``/``pp``/``pss``) overrides the
    heuristics key by key; the result is marked ``Provided`` when all three
    flags come from it.
    """
    unary, roles, binary = _event_structure(f)

    events = sorted(unary, key=lambda v: v.raw_name)
    cc = bool(sentence and _COORD_RE.search(sentence))
    for i, a in enumerate(events):
        for b in events[i + 1:]:
            subj_a = roles[a].get("subj", set())
            subj_b = roles[b].get("subj", set())
            if (subj_a & subj_b) or (unary[a] & unary[b]):
                cc = True

    pp = any(
        isinstance(x.args[0], Variable)
        and x.args[0].sort is Sort.EVENT
        and not (isinstance(x.args[1], Variable) and x.args[1].sort is Sort.EVENT)
        and x.name.lstrip("_") not in ROLE_LABELS
        for x in binary
    )

    pss = any("obj" in r and "subj" not in r for r in roles.values())
    if sentence and _PASSIVE_RE.search(sentence):
        pss = True

    flags = {"cc": cc, "pp": pp, "pss": pss}
    provided = {k: bool(v) for k, v in (provided or {}).items() if k in flags and v is not None}
    flags.update(provided)
    source = FlagSource.PROVIDED if len(provided) == 3 else FlagSource.HEURISTIC
    return CategoryFlags(source=source, **flags)


# ---------------------------------------------------------------------------
# misprediction taxonomy


class ErrorLabel(enum.Enum):
    QUANTIFIER_COUNT = "QuantifierCount"
    POLARITY_MISMATCH = "PolarityMismatch"
    ARGUMENT_ROLE_ORDER = "ArgumentRoleOrder"
    SUBFORMULA_PRESENCE = "SubformulaPresence"
    PREDICATE_SYMBOLS = "PredicateSymbols"
    OTHER = "Other"


def quantifier_profile(f: Formula) -> tuple[int, int]:
    """(event, entity) counts over all quantifier bindings."""
    vs = bound_variables(f)
    return (
        sum(v.sort is Sort.EVENT for v in vs),
        sum(v.sort is Sort.ENTITY for v in vs),
    )


def _role_blind(label: str) -> str:
    return "subj" if label in ROLE_LABELS else label


def _label_blind(label: str) -> str:
    return label if label == "NOT" else "*"


def _perfect(gold, pred, cfg, label_fn) -> bool:
    if len(gold) != len(pred):
        return False
    a = best_alignment(gold, pred, cfg, label_fn)
    return a.matched == len(gold)


def classify_error(gold: Formula, pred: Formula, cfg: SearchConfig = SearchConfig(),
                   check_precondition: bool = True) -> ErrorLabel:
    """Deterministic label for a well-formed prediction that failed the prover.

    Rules, first hit wins: per-sort quantifier counts differ; negation counts
    differ; clauses match once subj/obj are identified; one clause multiset
    contains the other; clauses match once predicate labels are ignored.
    """
    if check_precondition:
        if free_variables(pred):
            raise PreconditionError("prediction is not well-formed")
        if prover_accuracy_verdict(gold, pred):
            raise PreconditionError("prediction is equivalent to gold")

    if quantifier_profile(gold) != quantifier_profile(pred):
        return ErrorLabel.QUANTIFIER_COUNT
    if negation_count(gold) != negation_count(pred):
        return ErrorLabel.POLARITY_MISMATCH

    gc, pc = formula_clauses(gold), formula_clauses(pred)
    if _perfect(gc, pc, cfg, _role_blind):
        return ErrorLabel.ARGUMENT_ROLE_ORDER

    a = best_alignment(gc, pc, cfg)
    _, gold_left, pred_left = alignment_matches(gc, pc, a)
    if (not gold_left) != (not pred_left):
        return ErrorLabel.SUBFORMULA_PRESENCE
    if _perfect(gc, pc, cfg, _label_blind):
        return ErrorLabel.PREDICATE_SYMBOLS
    return ErrorLabel.OTHER
