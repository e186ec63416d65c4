"""Random generators for fragment formulas and clause sets."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from logiceval.formula import (
    Constant,
    Exists,
    Neg,
    Variable,
    conj,
    Atomic,
    predicate,
    role_eq,
    term_eq,
)

UNARY = ["dog", "run", "jump", "man", "red", "sit", "park", "ball"]
BINARY = ["in", "on", "with"]
ROLES = ["subj", "obj"]
CONSTANTS = ["a", "b"]


class _State:
    def __init__(self, max_vars, max_atoms):
        self.vars_left = max_vars
        self.atoms_left = max_atoms


def _atom(rng: random.Random, scope, raw: bool):
    events = [v for v in scope if v.sort.value == "e"]
    ents = [v for v in scope if v.sort.value == "x"]
    deco = "_" if raw and rng.random() < 0.5 else ""
    choice = rng.random()
    if events and ents and choice < 0.25:
        return role_eq(rng.choice(ROLES), rng.choice(events), rng.choice(ents))
    if events and ents and choice < 0.4:
        return predicate(deco + rng.choice(BINARY), rng.choice(events), rng.choice(ents))
    if len(ents) >= 2 and choice < 0.45:
        return term_eq(*rng.sample(ents, 2))
    if choice < 0.5:
        return predicate(deco + rng.choice(UNARY), Constant(rng.choice(CONSTANTS)))
    return predicate(deco + rng.choice(UNARY), rng.choice(scope))


def _block(rng: random.Random, scope, st_: _State, raw: bool):
    taken = {v.raw_name for v in scope}
    n_new = 1 if st_.vars_left == 1 or rng.random() < 0.7 else 2
    new = []
    for _ in range(n_new):
        # small name pool so sibling scopes reuse names
        for _ in range(20):
            name = rng.choice("ex") + str(rng.randint(1, 4))
            if name not in taken:
                break
        else:
            break
        taken.add(name)
        new.append(Variable(name))
    if not new:
        return None
    st_.vars_left -= len(new)
    inner = list(scope) + new
    parts = []
    for _ in range(rng.randint(1, 3)):
        if st_.atoms_left <= 0:
            break
        parts.append(Atomic(_atom(rng, inner, raw)))
        st_.atoms_left -= 1
    if not parts:
        parts.append(Atomic(_atom(rng, inner, raw)))
        st_.atoms_left -= 1
    while st_.vars_left > 0 and st_.atoms_left > 0 and rng.random() < 0.6:
        child = _block(rng, inner, st_, raw)
        if child is None:
            break
        parts.append(child)
    return Exists(tuple(new), conj(parts))


def random_body(rng: random.Random, max_vars: int = 6, max_atoms: int = 10, raw: bool = True):
    """A closed positive fragment formula with nested quantifier scopes."""
    st_ = _State(max_vars, max_atoms)
    blocks = [_block(rng, [], st_, raw)]
    while st_.vars_left > 0 and st_.atoms_left > 0 and rng.random() < 0.3:
        b = _block(rng, [], st_, raw)
        if b is None:
            break
        blocks.append(b)
    return conj(blocks)


def random_fragment(rng: random.Random, max_vars: int = 6, max_atoms: int = 10,
                    raw: bool = True, negation: bool | None = None):
    body = random_body(rng, max_vars, max_atoms, raw)
    if negation is None:
        negation = rng.random() < 0.4
    return Neg(body) if negation else body


@st.composite
def fragments(draw, max_vars=6, max_atoms=10, raw=True, negation=None):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_fragment(random.Random(seed), max_vars, max_atoms, raw, negation)


@st.composite
def bodies(draw, max_vars=4, max_atoms=6, raw=False):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_body(random.Random(seed), max_vars, max_atoms, raw)


def _mutate(rng: random.Random, text: str) -> str:
    """Surface-level perturbation of a formula string (may break well-formedness)."""
    kind = rng.randrange(5)
    if kind == 0:
        return text.replace("subj(", "obj(", 1) if "subj(" in text else text.replace("obj(", "subj(", 1)
    if kind == 1:
        name = rng.choice(UNARY)
        return text.replace(name + "(", name + "ly(", 1) if name + "(" in text else text[:-1] + " & dog(a))"
    if kind == 2:
        # drop the last conjunct
        cut = text.rfind(" & ")
        return text[:cut] + ")" if cut > 0 else text
    if kind == 3:
        return text[1:] if text.startswith("-") else "-" + text
    return text[:-1]


def synthetic_records(n: int, seed: int = 0):
    """Corpus-shaped records mixing exact, equivalent, perturbed and broken predictions."""
    from logiceval.formula import print_formula
    from logiceval.harness import PairRecord
    from logiceval.normalize import normalize

    rng = random.Random(seed)
    out = []
    for i in range(n):
        raw = random_fragment(rng)
        gold = print_formula(normalize(raw))
        r = rng.random()
        if r < 0.3:
            pred = gold
        elif r < 0.45:
            pred = print_formula(raw)
        else:
            pred = _mutate(rng, gold)
        out.append(PairRecord(f"syn_{i:05d}", "A synthetic sentence.", gold, pred))
    return out


def _clause_set(clauses):
    from logiceval.drs import Box, ClauseSet

    boxes = {Box("b1")} | {c.box for c in clauses}
    boxes |= {a for c in clauses for a in c.args if isinstance(a, Box)}
    variables = {a for c in clauses for a in c.args if isinstance(a, Variable)}
    return ClauseSet(tuple(clauses), frozenset(boxes), frozenset(variables))


def perturb_clauses(rng: random.Random, cs):
    """Drop, relabel or re-argument a few clauses, then rename variables."""
    from logiceval.drs import NOT, Clause

    clauses = list(cs.clauses)
    for _ in range(rng.randint(0, 3)):
        if not clauses:
            break
        i = rng.randrange(len(clauses))
        c = clauses[i]
        op = rng.randrange(4)
        if op == 0 and c.label != NOT:
            del clauses[i]
        elif op == 1 and c.label != NOT:
            clauses[i] = Clause(c.box, rng.choice(UNARY + ROLES), c.args)
        elif op == 2 and len(c.args) == 2 and c.label != NOT:
            clauses[i] = Clause(c.box, c.label, c.args[::-1])
        elif op == 3 and c.label != NOT:
            clauses.append(Clause(c.box, rng.choice(UNARY), c.args[:1]))
    # rename apart by a random permutation within each sort
    ren = {}
    for sort in "ex":
        vs = sorted({a for c in clauses for a in c.args
                     if isinstance(a, Variable) and a.sort.value == sort}, key=lambda v: v.raw_name)
        idx = list(range(1, len(vs) + 1))
        rng.shuffle(idx)
        ren.update({v: Variable(f"{sort}{90 + i}") for v, i in zip(vs, idx)})
    out = [Clause(c.box, c.label, tuple(ren.get(a, a) for a in c.args)) for c in clauses]
    rng.shuffle(out)
    return _clause_set(out)


def random_clause_pair(rng: random.Random, max_vars: int = 5, max_atoms: int = 7):
    from logiceval.drs import formula_clauses

    gold = formula_clauses(random_fragment(rng, max_vars, max_atoms, raw=False))
    if rng.random() < 0.3:
        pred = formula_clauses(random_fragment(rng, max_vars, max_atoms, raw=False))
    else:
        pred = perturb_clauses(rng, gold)
    return gold, pred


@st.composite
def clause_pairs(draw, max_vars=4, max_atoms=6):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_clause_pair(random.Random(seed), max_vars, max_atoms)


def weaken(rng: random.Random, f):
    """Prenex copy of a positive ``f`` with some conjuncts dropped (so ``f`` entails it)."""
    from logiceval.formula import Atomic as At
    from logiceval.normalize import normalize

    g = normalize(f)
    atoms = [c for c in (g.body.children if hasattr(g.body, "children") else (g.body,))]
    keep = [a for a in atoms if rng.random() < 0.7] or [atoms[0]]
    return Exists(g.vars, conj(keep)) if all(isinstance(a, At) for a in keep) else g


def merge_variables(rng: random.Random, f):
    """Identify two same-sort variables of a positive prenex ``f`` (result entails ``f``)."""
    from logiceval.formula import rename_variables
    from logiceval.normalize import normalize

    g = normalize(f)
    for sort in rng.sample("ex", 2):
        vs = [v for v in g.vars if v.sort.value == sort]
        if len(vs) >= 2:
            a, b = rng.sample(vs, 2)
            body = rename_variables(g.body, {b: a})
            rest = tuple(v for v in g.vars if v != b)
            return Exists(rest, body)
    return g


def related_pair(rng: random.Random, max_vars: int = 5, max_atoms: int = 7):
    a = random_body(rng, max_vars, max_atoms, raw=rng.random() < 0.5)
    r = rng.random()
    if r < 0.3:
        b = weaken(rng, a)
    elif r < 0.5:
        b = merge_variables(rng, a)
    elif r < 0.6:
        b = a
    else:
        b = random_body(rng, max_vars, max_atoms, raw=False)
    if rng.random() < 0.3:
        a = Neg(a)
    if rng.random() < 0.3:
        b = Neg(b)
    return a, b
