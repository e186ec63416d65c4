"""Dmatch: Counter-style clause matching between two DRS clause sets.

A gold clause matches a predicted clause when the labels agree and every
argument corresponds under the current alignment: variables and boxes through
the (partial, injective) node maps, constants literally.  The root boxes are
always paired.  The best alignment is searched by restarted hill-climbing;
:func:`brute_force_alignment` is the exhaustive reference.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Callable, Mapping

from .drs import ROOT, Box, ClauseSet
from .errors import SizeError
from .formula import Variable


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 20
    max_iterations: int = 1000
    rng_seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.max_iterations < 1:
            raise ValueError("restarts and max_iterations must be positive")


@dataclass(frozen=True)
class Alignment:
    var_map: Mapping[Variable, Variable]
    box_map: Mapping[Box, Box]
    matched: int


@dataclass(frozen=True)
class MatchScore:
    precision: float
    recall: float
    f1: float
    matched: int = field(default=0, compare=False)
    gold_size: int = field(default=0, compare=False)
    pred_size: int = field(default=0, compare=False)

    @classmethod
    def from_counts(cls, matched: int, gold_size: int, pred_size: int) -> "MatchScore":
        if gold_size == 0 and pred_size == 0:
            return cls(1.0, 1.0, 1.0, 0, 0, 0)
        if gold_size == 0 or pred_size == 0:
            return cls(0.0, 0.0, 0.0, 0, gold_size, pred_size)
        p = matched / pred_size
        r = matched / gold_size
        f = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f, matched, gold_size, pred_size)

    @classmethod
    def zero(cls) -> "MatchScore":
        return cls(0.0, 0.0, 0.0)


LabelFn = Callable[[str], str]


def _identity(label: str) -> str:
    return label


class _Problem:
    """Integer encoding of a gold/pred pair for fast incremental scoring."""

    def __init__(self, gold: ClauseSet, pred: ClauseSet, label_fn: LabelFn = _identity):
        root = Box(ROOT)
        self.gold_nodes = _nodes(gold, root)
        self.pred_nodes = _nodes(pred, root)
        gidx = {n: i for i, n in enumerate(self.gold_nodes)}
        pidx = {n: i for i, n in enumerate(self.pred_nodes)}
        gidx[root] = -1
        pidx[root] = -1

        def enc(node, idx):
            return idx[node] if node in idx else node

        # gold clause: (box code, label, arg codes); ints are node indices,
        # -1 is the root box, other objects are constants
        self.gold = [
            (enc(c.box, gidx), label_fn(c.label), tuple(enc(a, gidx) for a in c.args))
            for c in gold.clauses
        ]
        self.pred_count = Counter(
            (enc(c.box, pidx), label_fn(c.label), tuple(enc(a, pidx) for a in c.args))
            for c in pred.clauses
        )
        self.clauses_of = defaultdict(list)
        for ci, (b, _, args) in enumerate(self.gold):
            for code in {b, *args}:
                if isinstance(code, int) and code >= 0:
                    self.clauses_of[code].append(ci)
        self.kind_g = [isinstance(n, Box) for n in self.gold_nodes]
        self.kind_p = [isinstance(n, Box) for n in self.pred_nodes]
        self.upper = min(len(gold.clauses), len(pred.clauses))

    def image(self, ci: int, m: list) -> tuple | None:
        b, label, args = self.gold[ci]
        out = []
        for code in (b, *args):
            if isinstance(code, int):
                if code == -1:
                    out.append(-1)
                    continue
                t = m[code]
                if t is None:
                    return None
                out.append(t)
            else:
                out.append(code)
        return (out[0], label, tuple(out[1:]))

    def full_state(self, m: list):
        images = [self.image(ci, m) for ci in range(len(self.gold))]
        counts = Counter(k for k in images if k is not None)
        return images, counts

    def matched_from(self, counts: Counter) -> int:
        pc = self.pred_count
        return sum(min(n, pc[k]) for k, n in counts.items() if k in pc)

    def delta(self, m: list, images: list, counts: Counter, changes: dict) -> int:
        """Score change if ``m`` is updated by ``changes`` (node -> new target)."""
        affected = set()
        for g in changes:
            affected.update(self.clauses_of.get(g, ()))
        if not affected:
            return 0
        saved = {g: m[g] for g in changes}
        for g, t in changes.items():
            m[g] = t
        diff: Counter = Counter()
        for ci in affected:
            old = images[ci]
            new = self.image(ci, m)
            if old != new:
                if old is not None:
                    diff[old] -= 1
                if new is not None:
                    diff[new] += 1
        for g, t in saved.items():
            m[g] = t
        pc = self.pred_count
        d = 0
        for k, c in diff.items():
            if c and k in pc:
                p = pc[k]
                before = counts[k]
                d += min(before + c, p) - min(before, p)
        return d

    def apply(self, m: list, images: list, counts: Counter, changes: dict) -> None:
        affected = set()
        for g, t in changes.items():
            m[g] = t
            affected.update(self.clauses_of.get(g, ()))
        for ci in affected:
            old = images[ci]
            new = self.image(ci, m)
            if old is not None:
                counts[old] -= 1
                if counts[old] == 0:
                    del counts[old]
            if new is not None:
                counts[new] += 1
            images[ci] = new


def _nodes(cs: ClauseSet, root: Box) -> list:
    variables = set(cs.variables)
    boxes = set(b for b in cs.boxes if b != root)
    for c in cs.clauses:
        for a in (c.box, *c.args):
            if isinstance(a, Variable):
                variables.add(a)
            elif isinstance(a, Box) and a != root:
                boxes.add(a)
    return sorted(variables, key=lambda v: v.raw_name) + sorted(
        boxes, key=lambda b: (len(b.id), b.id)
    )


def _signatures(nodes, clauses, idx_of):
    sig = [Counter() for _ in nodes]
    for c in clauses:
        for pos, a in enumerate((c.box, *c.args)):
            i = idx_of.get(a)
            if i is not None:
                sig[i][(c.label, pos)] += 1
    return sig


def _smart_init(prob: _Problem, gold: ClauseSet, pred: ClauseSet) -> list:
    """Greedy pairing of nodes whose neighbouring clause labels agree."""
    gsig = _signatures(prob.gold_nodes, gold.clauses, {n: i for i, n in enumerate(prob.gold_nodes)})
    psig = _signatures(prob.pred_nodes, pred.clauses, {n: i for i, n in enumerate(prob.pred_nodes)})
    scored = []
    for gi, gs in enumerate(gsig):
        for pi, ps in enumerate(psig):
            if prob.kind_g[gi] != prob.kind_p[pi]:
                continue
            sim = sum((gs & ps).values())
            scored.append((-sim, gi, pi))
    scored.sort()
    m: list = [None] * len(prob.gold_nodes)
    used = set()
    for _, gi, pi in scored:
        if m[gi] is None and pi not in used:
            m[gi] = pi
            used.add(pi)
    return m


def _random_init(prob: _Problem, rng: random.Random) -> list:
    m: list = [None] * len(prob.gold_nodes)
    for kind in (False, True):
        gs = [i for i, k in enumerate(prob.kind_g) if k == kind]
        ps = [i for i, k in enumerate(prob.kind_p) if k == kind]
        rng.shuffle(gs)
        rng.shuffle(ps)
        for g, p in zip(gs, ps):
            m[g] = p
    return m


def _climb(prob: _Problem, m: list, max_iterations: int) -> tuple[list, int]:
    images, counts = prob.full_state(m)
    score = prob.matched_from(counts)
    n_g = len(prob.gold_nodes)
    for _ in range(max_iterations):
        if score >= prob.upper:
            break
        owner = {t: g for g, t in enumerate(m) if t is not None}
        best_d, best_move = 0, None
        for g in range(n_g):
            kind = prob.kind_g[g]
            for p in range(len(prob.pred_nodes)):
                if prob.kind_p[p] != kind or m[g] == p:
                    continue
                other = owner.get(p)
                if other is None:
                    changes = {g: p}
                else:
                    changes = {g: p, other: m[g]}
                d = prob.delta(m, images, counts, changes)
                if d > best_d:
                    best_d, best_move = d, changes
        if best_move is None:
            break
        prob.apply(m, images, counts, best_move)
        score += best_d
    return m, score


def _to_alignment(prob: _Problem, m: list, matched: int) -> Alignment:
    root = Box(ROOT)
    var_map, box_map = {}, {root: root}
    for g, t in enumerate(m):
        if t is None:
            continue
        src, dst = prob.gold_nodes[g], prob.pred_nodes[t]
        (box_map if isinstance(src, Box) else var_map)[src] = dst
    return Alignment(var_map, box_map, matched)


def best_alignment(
    gold: ClauseSet,
    pred: ClauseSet,
    cfg: SearchConfig = SearchConfig(),
    label_fn: LabelFn = _identity,
) -> Alignment:
    """Restarted hill-climbing; restart 1 starts from the smart mapping.

    ``label_fn`` is applied to both sides' clause labels before matching,
    which lets callers match modulo label classes.
    """
    prob = _Problem(gold, pred, label_fn)
    rng = random.Random(cfg.rng_seed)
    best_m, best = None, -1
    for r in range(cfg.restarts):
        start = _smart_init(prob, gold, pred) if r == 0 else _random_init(prob, rng)
        m, score = _climb(prob, start, cfg.max_iterations)
        if score > best:
            best_m, best = list(m), score
        if best >= prob.upper:
            break
    return _to_alignment(prob, best_m, best)


def dmatch_score(gold: ClauseSet, pred: ClauseSet, cfg: SearchConfig = SearchConfig()) -> MatchScore:
    if not gold.clauses or not pred.clauses:
        return MatchScore.from_counts(0, len(gold), len(pred))
    a = best_alignment(gold, pred, cfg)
    return MatchScore.from_counts(a.matched, len(gold), len(pred))


def alignment_matches(gold: ClauseSet, pred: ClauseSet, a: Alignment, label_fn: LabelFn = _identity):
    """Return (matched gold clauses, unmatched gold, unmatched pred) under ``a``."""
    mapping = {**a.var_map, **a.box_map}
    remaining = Counter((c.box, label_fn(c.label), c.args) for c in pred.clauses)
    pred_left = list(pred.clauses)
    matched, gold_left = [], []
    for c in gold.clauses:
        img = _map_clause(c, mapping)
        key = None if img is None else (img[0], label_fn(c.label), img[1])
        if key is not None and remaining[key] > 0:
            remaining[key] -= 1
            matched.append(c)
            for j, pc in enumerate(pred_left):
                if (pc.box, label_fn(pc.label), pc.args) == key:
                    del pred_left[j]
                    break
        else:
            gold_left.append(c)
    return matched, gold_left, pred_left


def _map_clause(c, mapping):
    box = mapping.get(c.box)
    if box is None:
        return None
    args = []
    for a in c.args:
        if isinstance(a, (Variable, Box)):
            t = mapping.get(a)
            if t is None:
                return None
            args.append(t)
        else:
            args.append(a)
    return box, tuple(args)


# ---------------------------------------------------------------------------
# exhaustive reference


def _count_matched(gold: ClauseSet, pred_multiset: Counter, mapping: dict) -> int:
    images = Counter()
    for c in gold.clauses:
        img = _map_clause(c, mapping)
        if img is not None:
            images[(img[0], c.label, img[1])] += 1
    return sum((images & pred_multiset).values())


def _injections(src: list, dst: list):
    """All maximal injective maps between two finite sets, as dicts src -> dst.

    Extending a partial map never loses a matched clause, so maximal maps
    are enough to reach the optimum.
    """
    if len(src) <= len(dst):
        for perm in itertools.permutations(dst, len(src)):
            yield dict(zip(src, perm))
    else:
        for perm in itertools.permutations(src, len(dst)):
            yield dict(zip(perm, dst))


def brute_force_alignment(gold: ClauseSet, pred: ClauseSet, bound: int = 8) -> Alignment:
    root = Box(ROOT)
    gv = _nodes(gold, root)
    pv = _nodes(pred, root)
    g_vars = [n for n in gv if isinstance(n, Variable)]
    p_vars = [n for n in pv if isinstance(n, Variable)]
    g_boxes = [n for n in gv if isinstance(n, Box)]
    p_boxes = [n for n in pv if isinstance(n, Box)]
    if max(len(g_vars), len(p_vars), len(g_boxes), len(p_boxes)) > bound:
        raise SizeError(f"more than {bound} variables or boxes on one side")
    pred_ms = Counter((c.box, c.label, c.args) for c in pred.clauses)
    best = None
    for bm in _injections(g_boxes, p_boxes):
        bm = {**bm, root: root}
        for vm in _injections(g_vars, p_vars):
            n = _count_matched(gold, pred_ms, {**vm, **bm})
            if best is None or n > best.matched:
                best = Alignment(vm, bm, n)
    return best
