"""FOL -> DRS conversion and the flat clause encoding used for matching.

Clause inventory (conditions only, no referent clauses)::

    b1 NOT b2            negated sub-box
    b2 biker x2          predicate condition
    b2 subj e1 x2        role equation (subj(e1) = x2)
    b2 EQ x1 x2          term equation

Box identifiers are assigned in creation order, so ``b1`` is always the root.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Union

from .errors import ConversionError
from .formula import (
    Atom,
    Atomic,
    AtomKind,
    Conj,
    Constant,
    Exists,
    Formula,
    Neg,
    VAR_RE,
    Variable,
    atom_str,
    free_variables,
    rename_apart,
)

NOT = "NOT"
EQ = "EQ"
ROOT = "b1"


@dataclass(frozen=True)
class NegBox:
    drs: "Drs"


@dataclass(frozen=True)
class Drs:
    referents: tuple[Variable, ...] = ()
    conditions: tuple[Union[Atom, NegBox], ...] = ()

    def condition_count(self) -> int:
        n = 0
        for c in self.conditions:
            n += 1
            if isinstance(c, NegBox):
                n += c.drs.condition_count()
        return n

    def depth(self) -> int:
        inner = [c.drs.depth() for c in self.conditions if isinstance(c, NegBox)]
        return 1 + max(inner, default=0)


@dataclass(frozen=True)
class Box:
    id: str

    def __str__(self):
        return self.id


ClauseArg = Union[Variable, Constant, Box]


@dataclass(frozen=True)
class Clause:
    box: Box
    label: str
    args: tuple[ClauseArg, ...]

    def __str__(self):
        return " ".join([self.box.id, self.label, *(str(a) for a in self.args)])


@dataclass(frozen=True)
class ClauseSet:
    clauses: tuple[Clause, ...]
    boxes: frozenset[Box] = field(default=frozenset({Box(ROOT)}))
    variables: frozenset[Variable] = frozenset()

    def __len__(self):
        return len(self.clauses)

    def multiset(self) -> Counter:
        return Counter(self.clauses)


def fol_to_drs(f: Formula) -> Drs:
    """Convert a closed formula to a DRS.

    Quantified variables become referents of the box they are introduced in;
    every negation opens a sub-box.  Outer negations therefore give an empty
    root holding a single negated box.
    """
    if free_variables(f):
        names = sorted(v.raw_name for v in free_variables(f))
        raise ConversionError(f"formula has free variables: {', '.join(names)}")
    return _to_box(rename_apart(f))


def _to_box(f: Formula) -> Drs:
    refs: list[Variable] = []
    conds: list = []

    def fill(g):
        if isinstance(g, Atomic):
            conds.append(g.atom)
        elif isinstance(g, Exists):
            refs.extend(v for v in g.vars if v not in refs)
            fill(g.body)
        elif isinstance(g, Conj):
            for c in g.children:
                fill(c)
        elif isinstance(g, Neg):
            conds.append(NegBox(_to_box(g.child)))
        else:
            raise ConversionError(f"not a formula: {g!r}")

    fill(f)
    return Drs(tuple(refs), tuple(conds))


def drs_to_clauses(d: Drs) -> ClauseSet:
    clauses: list[Clause] = []
    boxes: list[Box] = []
    variables: set[Variable] = set()

    def emit(drs: Drs) -> Box:
        box = Box(f"b{len(boxes) + 1}")
        boxes.append(box)
        variables.update(drs.referents)
        for c in drs.conditions:
            if isinstance(c, NegBox):
                # reserve the NOT clause position before the inner clauses
                slot = len(clauses)
                clauses.append(None)
                inner = emit(c.drs)
                clauses[slot] = Clause(box, NOT, (inner,))
            else:
                clauses.append(_atom_clause(box, c))
                variables.update(t for t in c.args if isinstance(t, Variable))
        return box

    emit(d)
    return ClauseSet(tuple(clauses), frozenset(boxes), frozenset(variables))


def _atom_clause(box: Box, a: Atom) -> Clause:
    if a.kind is AtomKind.TERM_EQ:
        return Clause(box, EQ, a.args)
    return Clause(box, a.name, a.args)


def formula_clauses(f: Formula) -> ClauseSet:
    return drs_to_clauses(fol_to_drs(f))


def dump_clauses(cs: ClauseSet) -> str:
    """One clause per line: ``<box> <label> <arg>*``."""
    return "".join(f"{c}\n" for c in cs.clauses)


_BOX_RE = re.compile(r"b\d+")


def load_clauses(text: str) -> ClauseSet:
    """Inverse of :func:`dump_clauses`.

    Arguments shaped like ``b<digits>`` are boxes when they appear in a NOT
    clause, ``e``/``x`` names are variables, anything else is a constant.
    """
    clauses = []
    boxes = {Box(ROOT)}
    variables = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("%", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2 or not _BOX_RE.fullmatch(parts[0]):
            raise ValueError(f"line {lineno}: malformed clause {line!r}")
        box = Box(parts[0])
        boxes.add(box)
        args: list = []
        for tok in parts[2:]:
            if parts[1] == NOT:
                arg = Box(tok)
                boxes.add(arg)
            elif VAR_RE.fullmatch(tok):
                arg = Variable(tok)
                variables.add(arg)
            else:
                arg = Constant(tok)
            args.append(arg)
        clauses.append(Clause(box, parts[1], tuple(args)))
    return ClauseSet(tuple(clauses), frozenset(boxes), frozenset(variables))


def drs_str(d: Drs, indent: int = 0) -> str:
    """Readable box rendering, mostly for debugging."""
    pad = " " * indent
    lines = [pad + "[" + " ".join(v.raw_name for v in d.referents) + "]"]
    for c in d.conditions:
        if isinstance(c, NegBox):
            lines.append(pad + "  NOT")
            lines.append(drs_str(c.drs, indent + 4))
        else:
            lines.append(pad + "  " + atom_str(c))
    return "\n".join(lines)

