"""Prenex normalization of raw ccg2lambda-style formulas.

The pipeline is ``strip_predicate_decorations`` -> ``pull_quantifiers`` ->
``renumber_variables``; :func:`normalize` composes the three.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NormalizationError
from .formula import (
    Atom,
    Atomic,
    AtomKind,
    Conj,
    Exists,
    Formula,
    Neg,
    Sort,
    Variable,
    bound_variables,
    conj,
    free_variables,
    iter_atoms,
)


def strip_predicate_decorations(f: Formula) -> Formula:
    """Remove leading underscores from predicate and role names."""
    if isinstance(f, Atomic):
        a = f.atom
        if a.kind is AtomKind.TERM_EQ:
            return f
        stripped = a.name.lstrip("_")
        return Atomic(a.rename(stripped)) if stripped and stripped != a.name else f
    if isinstance(f, Neg):
        return Neg(strip_predicate_decorations(f.child))
    if isinstance(f, Exists):
        return Exists(f.vars, strip_predicate_decorations(f.body))
    return Conj(tuple(strip_predicate_decorations(c) for c in f.children))


def split_negations(f: Formula) -> tuple[int, Formula]:
    """Peel the outermost chain of negations: ``(count, rest)``."""
    k = 0
    while isinstance(f, Neg):
        k += 1
        f = f.child
    return k, f


@dataclass(frozen=True)
class Renaming:
    """Injective, sort-preserving variable renaming in assignment order."""

    pairs: tuple[tuple[Variable, Variable], ...]

    def __post_init__(self):
        targets = [t for _, t in self.pairs]
        if len(set(targets)) != len(targets):
            raise ValueError("renaming is not injective")
        if any(s.sort is not t.sort for s, t in self.pairs):
            raise ValueError("renaming changes a variable's sort")

    def as_dict(self) -> dict[Variable, Variable]:
        return dict(self.pairs)


def flatten_positive(body: Formula) -> tuple[list[Variable], list[Atom]]:
    """Flatten a negation-free existential conjunction.

    Returns the quantified variables in order of quantifier occurrence and the
    atoms in depth-first order.  Variables bound more than once (in separate
    scopes) are renamed apart with fresh indices of the same sort.
    """
    used = {}
    for v in _all_variable_names(body):
        used[v.raw_name] = v
    next_index = {
        s: max([v.index for v in used.values() if v.sort is s], default=0) + 1 for s in Sort
    }
    quantified: list[Variable] = []
    seen: set[Variable] = set()
    atoms: list[Atom] = []

    def fresh(v: Variable) -> Variable:
        while True:
            cand = Variable(f"{v.sort.value}{next_index[v.sort]}")
            next_index[v.sort] += 1
            if cand.raw_name not in used:
                used[cand.raw_name] = cand
                return cand

    def walk(g, env):
        if isinstance(g, Atomic):
            atoms.append(g.atom.map_terms(lambda t: env.get(t, t)))
        elif isinstance(g, Exists):
            env = dict(env)
            for v in g.vars:
                target = fresh(v) if v in seen else v
                seen.add(v)
                seen.add(target)
                env[v] = target
                quantified.append(target)
            walk(g.body, env)
        elif isinstance(g, Conj):
            for c in g.children:
                walk(c, env)
        else:
            raise NormalizationError(
                "negation below a quantifier or inside a conjunction is not supported"
            )

    walk(body, {})
    return quantified, atoms


def _all_variable_names(f: Formula):
    yield from bound_variables(f)
    for a in iter_atoms(f):
        for t in a.args:
            if isinstance(t, Variable):
                yield t


def _wrap(k: int, f: Formula) -> Formula:
    for _ in range(k):
        f = Neg(f)
    return f


def pull_quantifiers(f: Formula) -> Formula:
    """Move all quantifiers into one prefix right below the outer negations.

    Prefix order: event variables first, then entity variables, each in order
    of first quantifier occurrence.  Conjuncts keep depth-first order.
    """
    if free_variables(f):
        raise NormalizationError("cannot normalize a formula with free variables")
    k, body = split_negations(f)
    quantified, atoms = flatten_positive(body)
    events = [v for v in quantified if v.sort is Sort.EVENT]
    entities = [v for v in quantified if v.sort is Sort.ENTITY]
    matrix = conj([Atomic(a) for a in atoms])
    prefix = tuple(events + entities)
    return _wrap(k, Exists(prefix, matrix) if prefix else matrix)


def prenex_renaming(f: Formula) -> Renaming:
    k, body = split_negations(f)
    if not isinstance(body, Exists):
        return Renaming(())
    return Renaming(
        tuple((v, Variable(f"{v.sort.value}{i}")) for i, v in enumerate(body.vars, start=1))
    )


def renumber_variables(f: Formula) -> Formula:
    """Give the i-th prefix variable index i, keeping its sort letter."""
    k, body = split_negations(f)
    if not isinstance(body, Exists):
        _check_matrix(body)
        return f
    _check_matrix(body.body)
    mapping = prenex_renaming(f).as_dict()

    def term(t):
        return mapping.get(t, t) if isinstance(t, Variable) else t

    matrix = body.body
    if isinstance(matrix, Atomic):
        new_matrix = Atomic(matrix.atom.map_terms(term))
    else:
        new_matrix = Conj(tuple(Atomic(c.atom.map_terms(term)) for c in matrix.children))
    return _wrap(k, Exists(tuple(mapping[v] for v in body.vars), new_matrix))


def _check_matrix(m: Formula) -> None:
    if isinstance(m, Atomic):
        return
    if isinstance(m, Conj) and all(isinstance(c, Atomic) for c in m.children):
        return
    raise NormalizationError("formula is not in prenex shape")


def normalize(f: Formula) -> Formula:
    return renumber_variables(pull_quantifiers(strip_predicate_decorations(f)))

