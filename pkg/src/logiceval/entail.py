"""Entailment and logical relations between fragment formulas.

Every supported formula is ``-^k exists vs.(positive conjunction)``.  For two
positive formulas, ``A |= B`` holds exactly when B's body maps
homomorphically into the canonical model of A: A's existential variables
become fresh constants, equalities and functional role equations are closed
under congruence, and B's atoms must be found among A's canonical facts.
Negated cases reduce to the positive one:

* ``-C |= -D``  iff  ``D |= C``
* ``A |= -D``   never, for positive A and D (their conjunction has a model)
* ``-C |= B``   iff  C or B is valid

Role equations ``(subj(e) = x)`` are read as facts ``subj(e, x)`` of a
partial function, so two values for the same role of the same event are
identified, but a role is never assumed to exist for an event.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Mapping

from .errors import NormalizationError, ProverTimeout
from .formula import (
    Atom,
    AtomKind,
    Constant,
    Formula,
    Neg,
    Variable,
    check_wff,
    constants,
    free_variables,
    iter_nodes,
    parse_formula,
)
from .normalize import flatten_positive, split_negations, strip_predicate_decorations


class Verdict(enum.Enum):
    ENTAILS = "Entails"
    NOT_ENTAILS = "NotEntails"
    UNSUPPORTED = "Unsupported"
    TIMEOUT = "Timeout"


class Relation(enum.Enum):
    EQUIVALENT = "Equivalent"
    FORWARD_ONLY = "ForwardOnly"
    BACKWARD_ONLY = "BackwardOnly"
    CONTRADICTION = "Contradiction"
    NEUTRAL = "Neutral"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class EntailConfig:
    max_steps: int = 200_000
    # ccg2lambda's leading underscores are lexical markers, not meaning
    ignore_decorations: bool = True
    prover_cmd: str | None = None
    prover_timeout: float = 10.0


@dataclass(frozen=True)
class EntailResult:
    verdict: Verdict
    witness: Mapping[Variable, str] | None = None

    def __post_init__(self):
        if self.witness is not None and self.verdict is not Verdict.ENTAILS:
            raise ValueError("a witness only accompanies an Entails verdict")

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.ENTAILS


@dataclass(frozen=True)
class FragmentShape:
    negations: int
    body: Formula
    supported: bool


def classify_fragment(f: Formula) -> FragmentShape:
    k, body = split_negations(f)
    supported = not any(isinstance(n, Neg) for n in iter_nodes(body))
    return FragmentShape(k, body, supported)


# ---------------------------------------------------------------------------
# canonical models


@dataclass(frozen=True)
class Fact:
    name: str
    args: tuple[str, ...]
    role: bool = False


@dataclass(frozen=True)
class FactBase:
    universe: tuple[str, ...]
    facts: tuple[Fact, ...]
    equalities: tuple[tuple[str, str], ...] = ()
    skolem: Mapping[Variable, str] = field(default_factory=dict, compare=False)


def skolemize(body: Formula, extra_constants=()) -> FactBase:
    """Replace each quantified variable of a positive body by a fresh constant.

    Input constants (and ``extra_constants``) join the universe under their own
    names; fresh constants are ``c1, c2, ...`` skipping any taken name.
    """
    quantified, atoms = flatten_positive(body)
    names = {c.name for c in constants(body)} | set(extra_constants)
    sk: dict[Variable, str] = {}
    i = 0
    for v in quantified:
        while True:
            i += 1
            cand = f"c{i}"
            if cand not in names:
                break
        sk[v] = cand

    def elem(t) -> str:
        if isinstance(t, Variable):
            if t not in sk:
                raise NormalizationError(f"free variable {t.raw_name!r}")
            return sk[t]
        return t.name

    facts, eqs = [], []
    for a in atoms:
        args = tuple(elem(t) for t in a.args)
        if a.kind is AtomKind.TERM_EQ:
            eqs.append(args)
        else:
            facts.append(Fact(a.name, args, a.kind is AtomKind.ROLE_EQ))
    universe = tuple(sk.values()) + tuple(sorted(names))
    return FactBase(universe, tuple(facts), tuple(eqs), sk)


@dataclass
class Closure:
    """Congruence-closed canonical model of a fact base."""

    rep: dict[str, str]
    classes: list[frozenset[str]]
    facts: dict[tuple[str, int], set[tuple[str, ...]]]
    roles: dict[str, dict[str, str]]

    def find(self, x: str) -> str:
        return self.rep[x]


def congruence_closure(fb: FactBase) -> Closure:
    parent = {u: u for u in fb.universe}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        # smaller name wins so representatives are deterministic
        if rb < ra:
            ra, rb = rb, ra
        parent[rb] = ra
        return True

    for a, b in fb.equalities:
        union(a, b)
    role_facts = [f for f in fb.facts if f.role]
    changed = True
    while changed:
        changed = False
        table = {}
        for f in role_facts:
            key = (f.name, find(f.args[0]))
            if key in table:
                changed |= union(table[key], f.args[1])
            else:
                table[key] = f.args[1]

    rep = {u: find(u) for u in fb.universe}
    groups = defaultdict(set)
    for u, r in rep.items():
        groups[r].add(u)
    facts = defaultdict(set)
    roles = defaultdict(dict)
    for f in fb.facts:
        args = tuple(rep[a] for a in f.args)
        if f.role:
            roles[f.name][args[0]] = args[1]
        else:
            facts[(f.name, len(args))].add(args)
    classes = [frozenset(groups[r]) for r in sorted(groups)]
    return Closure(rep, classes, dict(facts), dict(roles))


# ---------------------------------------------------------------------------
# homomorphism search


class _Search:
    def __init__(self, closure: Closure, atoms: list[Atom], max_steps: int):
        self.c = closure
        self.atoms = atoms
        self.max_steps = max_steps
        self.steps = 0
        self.domain = sorted(set(closure.rep.values()))
        # sorted so the visiting order (and step budget) is reproducible
        self.facts = {k: sorted(v) for k, v in closure.facts.items()}
        self.roles = {k: sorted(v.items()) for k, v in closure.roles.items()}

    def resolve(self, t, asg):
        if isinstance(t, Constant):
            return self.c.rep[t.name]
        return asg.get(t)

    def bound_count(self, a: Atom, asg) -> int:
        return sum(self.resolve(t, asg) is not None for t in a.args)

    def pick(self, remaining, asg) -> int:
        best, best_key = 0, None
        for i, a in enumerate(remaining):
            nb = self.bound_count(a, asg)
            if a.kind is AtomKind.TERM_EQ:
                # cheap check once anything is bound, otherwise enumerate last
                key = (0 if nb else 2, -nb)
            else:
                key = (1, -nb)
            if best_key is None or key < best_key:
                best, best_key = i, key
        return best

    def candidates(self, a: Atom, asg):
        if a.kind is AtomKind.PREDICATE:
            return self.facts.get((a.name, len(a.args)), ())
        if a.kind is AtomKind.ROLE_EQ:
            return self.roles.get(a.name, ())
        l, r = (self.resolve(t, asg) for t in a.args)
        if l is not None:
            return [(l, l)]
        if r is not None:
            return [(r, r)]
        return [(d, d) for d in self.domain]

    def run(self, remaining: list[Atom], asg: dict):
        if not remaining:
            return asg
        i = self.pick(remaining, asg)
        a = remaining[i]
        rest = remaining[:i] + remaining[i + 1:]
        for tup in self.candidates(a, asg):
            self.steps += 1
            if self.steps > self.max_steps:
                raise ProverTimeout(f"homomorphism search exceeded {self.max_steps} steps")
            new = self.unify(a.args, tup, asg)
            if new is not None:
                out = self.run(rest, new)
                if out is not None:
                    return out
        return None

    def unify(self, args, values, asg):
        new = asg
        for t, v in zip(args, values):
            cur = self.resolve(t, new)
            if cur is None:
                if new is asg:
                    new = dict(asg)
                new[t] = v
            elif cur != v:
                return None
        return new


def _positive_entails(a_body: Formula, b_body: Formula, max_steps: int):
    """Witness mapping if positive ``a_body`` entails positive ``b_body``, else None."""
    b_consts = {c.name for c in constants(b_body)}
    fb = skolemize(a_body, extra_constants=b_consts)
    # one spare element: the domain is never empty
    spare = "c0"
    while spare in fb.universe:
        spare += "_"
    fb = FactBase(fb.universe + (spare,), fb.facts, fb.equalities, fb.skolem)
    closure = congruence_closure(fb)
    _, atoms = flatten_positive(b_body)
    return _Search(closure, atoms, max_steps).run(atoms, {})


def _prepare(f: Formula, cfg: EntailConfig) -> Formula:
    if isinstance(f, str):
        f = parse_formula(f)
    if free_variables(f):
        raise ValueError("entailment needs closed formulas")
    return strip_predicate_decorations(f) if cfg.ignore_decorations else f


def entails(a: Formula, b: Formula, cfg: EntailConfig = EntailConfig()) -> EntailResult:
    a = _prepare(a, cfg)
    b = _prepare(b, cfg)
    sa, sb = classify_fragment(a), classify_fragment(b)
    if not (sa.supported and sb.supported):
        if cfg.prover_cmd:
            from .tptp import external_entails

            return external_entails(a, b, cfg)
        return EntailResult(Verdict.UNSUPPORTED)
    try:
        return _entails_shapes(sa, sb, cfg.max_steps)
    except ProverTimeout:
        return EntailResult(Verdict.TIMEOUT)


def _result(ok: bool) -> EntailResult:
    return EntailResult(Verdict.ENTAILS if ok else Verdict.NOT_ENTAILS)


def _entails_shapes(sa: FragmentShape, sb: FragmentShape, max_steps: int) -> EntailResult:
    ka, kb = sa.negations % 2, sb.negations % 2
    if ka == 0 and kb == 0:
        w = _positive_entails(sa.body, sb.body, max_steps)
        if w is None:
            return _result(False)
        return EntailResult(Verdict.ENTAILS, dict(w))
    if ka == 1 and kb == 1:
        return _result(_positive_entails(sb.body, sa.body, max_steps) is not None)
    if ka == 0:
        return _result(False)
    return _result(_is_valid(sa.body, max_steps) or _is_valid(sb.body, max_steps))


def _is_valid(body: Formula, max_steps: int) -> bool:
    """A positive existential body is valid iff it holds in a model with no facts."""
    consts = {c.name for c in constants(body)}
    closure = congruence_closure(FactBase(tuple(sorted(consts)) + ("c0",), ()))
    _, atoms = flatten_positive(body)
    return _Search(closure, atoms, max_steps).run(atoms, {}) is not None


def negate(f: Formula) -> Formula:
    """Negation with double negations cancelled."""
    return f.child if isinstance(f, Neg) else Neg(f)


def logical_relation(gold: Formula, pred: Formula, cfg: EntailConfig = EntailConfig()) -> Relation:
    """Five-way relation between gold and prediction.

    Raises :class:`ProverTimeout` if any direction runs out of budget.
    """
    gold = _prepare(gold, cfg)
    pred = _prepare(pred, cfg)
    fwd = entails(gold, pred, cfg)
    bwd = entails(pred, gold, cfg)
    verdicts = (fwd.verdict, bwd.verdict)
    if Verdict.TIMEOUT in verdicts:
        raise ProverTimeout("entailment check timed out")
    if Verdict.UNSUPPORTED in verdicts:
        return Relation.UNSUPPORTED
    if fwd.holds and bwd.holds:
        return Relation.EQUIVALENT
    if fwd.holds:
        return Relation.FORWARD_ONLY
    if bwd.holds:
        return Relation.BACKWARD_ONLY
    contra = entails(gold, negate(pred), cfg)
    if contra.verdict is Verdict.TIMEOUT:
        raise ProverTimeout("contradiction check timed out")
    if contra.verdict is Verdict.UNSUPPORTED:
        return Relation.UNSUPPORTED
    return Relation.CONTRADICTION if contra.holds else Relation.NEUTRAL


def prover_accuracy_verdict(gold, pred, cfg: EntailConfig = EntailConfig()) -> bool:
    """True iff gold and prediction entail each other.

    Text predictions that are not well-formed, and checks that time out,
    count as false.
    """
    if isinstance(pred, str):
        if not check_wff(pred).is_wff:
            return False
        pred = parse_formula(pred)
    if isinstance(gold, str):
        gold = parse_formula(gold)
    try:
        return logical_relation(gold, pred, cfg) is Relation.EQUIVALENT
    except ProverTimeout:
        return False
