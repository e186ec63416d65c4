"""Formulas of the event-semantics fragment: AST, parser, printer, WFF check.

Surface syntax (one formula per string)::

    -exists e1 x2 x3.(biker(x2) & jump(e1) & (subj(e1) = x2) & air(x3) & in(e1,x3))

``-`` is negation, ``exists v1 v2 ... .`` binds a list of variables and its
body extends as far right as possible, ``&`` is n-ary conjunction, and
equalities are either role equations ``(subj(e1) = x2)`` or plain term
equations ``(x1 = x2)``.  Identifiers shaped like ``e<digits>`` or
``x<digits>`` (or bound by a quantifier) are variables; any other bare
identifier in argument position is a constant.
"""

from __future__ import annotations

import enum
import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator, Union

from .errors import DuplicateBindingError, ParseError

VAR_RE = re.compile(r"[ex]\d*")
_EVENT_RE = re.compile(r"e\d*")
_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    |(?P<ident>[A-Za-z_][A-Za-z0-9_]*)
    |(?P<arrow><->|->|=>|<=>)
    |(?P<neq>!=)
    |(?P<punct>[().,&=\-])
    |(?P<bad>[|~!\\])
    """,
    re.VERBOSE,
)
_UNSUPPORTED_WORDS = {"all", "forall"}


class Sort(enum.Enum):
    EVENT = "e"
    ENTITY = "x"


@dataclass(frozen=True)
class Variable:
    raw_name: str

    @property
    def sort(self) -> Sort:
        return Sort.EVENT if _EVENT_RE.fullmatch(self.raw_name) else Sort.ENTITY

    @property
    def index(self) -> int:
        """Numeric suffix of the name; 0 for unnumbered names such as ``e``."""
        m = re.search(r"\d+$", self.raw_name)
        return int(m.group()) if m else 0

    def __str__(self):
        return self.raw_name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self):
        return self.name


Term = Union[Variable, Constant]


class AtomKind(enum.Enum):
    PREDICATE = "predicate"
    ROLE_EQ = "role_eq"
    TERM_EQ = "term_eq"


@dataclass(frozen=True)
class Atom:
    kind: AtomKind
    name: str | None
    args: tuple[Term, ...]

    def __post_init__(self):
        if self.kind is AtomKind.PREDICATE and (not self.name or len(self.args) < 1):
            raise ValueError("predicate atoms need a name and at least one argument")
        if self.kind is AtomKind.ROLE_EQ and (not self.name or len(self.args) != 2):
            raise ValueError("role equations take exactly (event, value)")
        if self.kind is AtomKind.TERM_EQ and (self.name is not None or len(self.args) != 2):
            raise ValueError("term equations take exactly two terms and no name")

    def map_terms(self, fn) -> "Atom":
        return Atom(self.kind, self.name, tuple(fn(t) for t in self.args))

    def rename(self, name: str) -> "Atom":
        return Atom(self.kind, name, self.args)


def predicate(name: str, *args: Term) -> Atom:
    return Atom(AtomKind.PREDICATE, name, tuple(args))


def role_eq(name: str, event: Term, value: Term) -> Atom:
    return Atom(AtomKind.ROLE_EQ, name, (event, value))


def term_eq(left: Term, right: Term) -> Atom:
    return Atom(AtomKind.TERM_EQ, None, (left, right))


@dataclass(frozen=True)
class Atomic:
    atom: Atom


@dataclass(frozen=True)
class Neg:
    child: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple[Variable, ...]
    body: "Formula"

    def __post_init__(self):
        if not self.vars:
            raise ValueError("exists must bind at least one variable")
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("duplicate variable in quantifier list")


@dataclass(frozen=True)
class Conj:
    children: tuple["Formula", ...]

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("conjunction needs at least two children")


Formula = Union[Atomic, Neg, Exists, Conj]


def conj(children) -> Formula:
    """Build a conjunction, flattening nested conjunctions.

    A single child is returned as-is.
    """
    flat = []
    for c in children:
        if isinstance(c, Conj):
            flat.extend(c.children)
        else:
            flat.append(c)
    if not flat:
        raise ValueError("empty conjunction")
    if len(flat) == 1:
        return flat[0]
    return Conj(tuple(flat))


# ---------------------------------------------------------------------------
# lexing and parsing


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        tok = m.group()
        if kind == "ident":
            tokens.append(Token("exists" if tok == "exists" else "ident", tok, pos))
        elif kind == "punct":
            tokens.append(Token(tok, tok, pos))
        elif kind in ("arrow", "bad", "neq"):
            raise ParseError(
                f"{tok!r} is outside the supported fragment "
                "(only '-', '&', '=' and 'exists' are allowed)",
                pos,
                text,
            )
        pos = m.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.scope: list[set[str]] = []

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message, tok=None):
        tok = tok or self.tok
        return ParseError(message, tok.pos, self.text)

    def expect(self, kind: str) -> Token:
        tok = self.tok
        if tok.kind != kind:
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise self.error(f"expected {kind!r}, found {found}")
        self.i += 1
        return tok

    def parse(self) -> Formula:
        if self.tok.kind == "eof":
            raise self.error("empty formula")
        f = self.conjunction()
        if self.tok.kind != "eof":
            if self.tok.kind == ")":
                raise self.error("unbalanced ')'")
            raise self.error(f"unexpected token {self.tok.text!r}")
        return f

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.tok.kind == "&":
            self.i += 1
            parts.append(self.unary())
        return conj(parts)

    def unary(self) -> Formula:
        tok = self.tok
        if tok.kind == "-":
            self.i += 1
            return Neg(self.unary())
        if tok.kind == "exists":
            return self.quantified()
        if tok.kind == "(":
            self.i += 1
            inner = self.conjunction()
            if self.tok.kind != ")":
                raise self.error("unbalanced '(' (expected ')')", self.tok)
            self.i += 1
            return inner
        if tok.kind == "ident":
            nxt = self.tokens[self.i + 1]
            if tok.text in _UNSUPPORTED_WORDS and nxt.kind == "ident":
                raise self.error(
                    f"quantifier {tok.text!r} is outside the supported fragment"
                )
            return Atomic(self.atom())
        if tok.kind == "eof":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {tok.text!r}")

    def quantified(self) -> Formula:
        self.expect("exists")
        names: list[Token] = []
        while self.tok.kind == "ident":
            names.append(self.tok)
            self.i += 1
        if not names:
            raise self.error("expected variable after 'exists'")
        seen = set()
        for t in names:
            if t.text in seen:
                raise DuplicateBindingError(
                    f"variable {t.text!r} bound twice in one quantifier list",
                    t.pos,
                    self.text,
                )
            seen.add(t.text)
        if self.tok.kind != ".":
            raise self.error("expected '.' after quantifier variable list")
        self.i += 1
        self.scope.append(seen)
        try:
            body = self.conjunction()
        finally:
            self.scope.pop()
        return Exists(tuple(Variable(t.text) for t in names), body)

    def term(self) -> Term:
        tok = self.expect("ident")
        if self.tok.kind == "(":
            raise self.error("nested function terms are not supported")
        return self.make_term(tok.text)

    def make_term(self, name: str) -> Term:
        if any(name in s for s in self.scope) or VAR_RE.fullmatch(name):
            return Variable(name)
        return Constant(name)

    def atom(self) -> Atom:
        head = self.expect("ident")
        if self.tok.kind == "(":
            self.i += 1
            args = [self.term()]
            while self.tok.kind == ",":
                self.i += 1
                args.append(self.term())
            self.expect(")")
            if self.tok.kind == "=":
                eq = self.tok
                self.i += 1
                value = self.term()
                if len(args) != 1:
                    raise self.error(
                        f"role function {head.text!r} must take exactly one argument", eq
                    )
                return role_eq(head.text, args[0], value)
            return predicate(head.text, *args)
        if self.tok.kind == "=":
            self.i += 1
            right = self.term()
            return term_eq(self.make_term(head.text), right)
        raise self.error(f"expected '(' or '=' after {head.text!r}")


def parse_formula(text: str) -> Formula:
    """Parse formula text into an AST, raising :class:`ParseError` on failure."""
    if not text or not text.strip():
        raise ParseError("empty formula", 0, text)
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing


def _term_str(t: Term) -> str:
    return t.raw_name if isinstance(t, Variable) else t.name


def atom_str(a: Atom) -> str:
    if a.kind is AtomKind.PREDICATE:
        return f"{a.name}({','.join(_term_str(t) for t in a.args)})"
    if a.kind is AtomKind.ROLE_EQ:
        return f"({a.name}({_term_str(a.args[0])}) = {_term_str(a.args[1])})"
    return f"({_term_str(a.args[0])} = {_term_str(a.args[1])})"


def _opens_right(f: Formula) -> bool:
    # an exists body swallows everything to its right
    while isinstance(f, Neg):
        f = f.child
    return isinstance(f, Exists)


def print_formula(f: Formula) -> str:
    if isinstance(f, Atomic):
        return atom_str(f.atom)
    if isinstance(f, Neg):
        if isinstance(f.child, Conj):
            return f"-({print_formula(f.child)})"
        return "-" + print_formula(f.child)
    if isinstance(f, Exists):
        names = " ".join(v.raw_name for v in f.vars)
        body = f.body
        if isinstance(body, Atomic) and body.atom.kind is not AtomKind.PREDICATE:
            return f"exists {names}.{print_formula(body)}"
        return f"exists {names}.({print_formula(body)})"
    if isinstance(f, Conj):
        parts = []
        last = len(f.children) - 1
        for i, c in enumerate(f.children):
            s = print_formula(c)
            if isinstance(c, Conj) or (i < last and _opens_right(c)):
                s = f"({s})"
            parts.append(s)
        return " & ".join(parts)
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# traversal helpers


def iter_atoms(f: Formula) -> Iterator[Atom]:
    if isinstance(f, Atomic):
        yield f.atom
    elif isinstance(f, Neg):
        yield from iter_atoms(f.child)
    elif isinstance(f, Exists):
        yield from iter_atoms(f.body)
    else:
        for c in f.children:
            yield from iter_atoms(c)


def iter_nodes(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Neg):
        yield from iter_nodes(f.child)
    elif isinstance(f, Exists):
        yield from iter_nodes(f.body)
    elif isinstance(f, Conj):
        for c in f.children:
            yield from iter_nodes(c)


def free_variables(f: Formula) -> set[Variable]:
    free: set[Variable] = set()

    def walk(g, bound):
        if isinstance(g, Atomic):
            free.update(t for t in g.atom.args if isinstance(t, Variable) and t not in bound)
        elif isinstance(g, Neg):
            walk(g.child, bound)
        elif isinstance(g, Exists):
            walk(g.body, bound | set(g.vars))
        else:
            for c in g.children:
                walk(c, bound)

    walk(f, frozenset())
    return free


def constants(f: Formula) -> set[Constant]:
    return {t for a in iter_atoms(f) for t in a.args if isinstance(t, Constant)}


def bound_variables(f: Formula) -> list[Variable]:
    """Quantified variables in order of their quantifier occurrence."""
    return [v for n in iter_nodes(f) if isinstance(n, Exists) for v in n.vars]


def negation_count(f: Formula) -> int:
    return sum(isinstance(n, Neg) for n in iter_nodes(f))


def rename_variables(f: Formula, mapping) -> Formula:
    """Apply a variable renaming everywhere (bindings and occurrences)."""

    def term(t):
        return mapping.get(t, t) if isinstance(t, Variable) else t

    if isinstance(f, Atomic):
        return Atomic(f.atom.map_terms(term))
    if isinstance(f, Neg):
        return Neg(rename_variables(f.child, mapping))
    if isinstance(f, Exists):
        return Exists(tuple(term(v) for v in f.vars), rename_variables(f.body, mapping))
    return Conj(tuple(rename_variables(c, mapping) for c in f.children))


# ---------------------------------------------------------------------------
# well-formedness


@dataclass(frozen=True)
class Diagnostic:
    message: str
    span: tuple[int, int]


@dataclass(frozen=True)
class WffReport:
    parsed: bool
    closed: bool
    duplicate_bindings: bool
    diagnostics: tuple[Diagnostic, ...] = field(default=())

    @property
    def is_wff(self) -> bool:
        return self.parsed and self.closed and not self.duplicate_bindings

    def to_dict(self) -> dict:
        return {
            "parsed": self.parsed,
            "closed": self.closed,
            "duplicate_bindings": self.duplicate_bindings,
            "is_wff": self.is_wff,
            "diagnostics": [
                {"message": d.message, "span": list(d.span)} for d in self.diagnostics
            ],
        }


def _shadowed_bindings(f: Formula) -> list[Variable]:
    out = []

    def walk(g, bound):
        if isinstance(g, Exists):
            out.extend(v for v in g.vars if v in bound)
            walk(g.body, bound | set(g.vars))
        elif isinstance(g, Neg):
            walk(g.child, bound)
        elif isinstance(g, Conj):
            for c in g.children:
                walk(c, bound)

    walk(f, frozenset())
    return out


def _span_of(text: str, name: str) -> tuple[int, int]:
    m = re.search(rf"(?<![A-Za-z0-9_]){re.escape(name)}(?![A-Za-z0-9_])", text)
    return (m.start(), m.end()) if m else (0, len(text))


def check_wff(text: str) -> WffReport:
    """Well-formedness: parseable, closed, and no variable re-bound in scope.

    Bound-but-unused variables are allowed.  Predicates used with two
    different arities only produce a diagnostic.
    """
    try:
        f = parse_formula(text)
    except DuplicateBindingError as e:
        return WffReport(
            parsed=False,
            closed=False,
            duplicate_bindings=True,
            diagnostics=(Diagnostic(e.message, (e.pos, e.pos + 1)),),
        )
    except ParseError as e:
        pos = e.pos if e.pos is not None else 0
        return WffReport(False, False, False, (Diagnostic(e.message, (pos, pos + 1)),))

    diags = []
    free = sorted(free_variables(f), key=lambda v: v.raw_name)
    for v in free:
        diags.append(Diagnostic(f"free variable {v.raw_name!r}", _span_of(text, v.raw_name)))
    shadowed = _shadowed_bindings(f)
    for v in shadowed:
        diags.append(
            Diagnostic(f"variable {v.raw_name!r} re-bound inside its own scope",
                       _span_of(text, v.raw_name))
        )
    arities = defaultdict(set)
    for a in iter_atoms(f):
        if a.kind is AtomKind.PREDICATE:
            arities[a.name].add(len(a.args))
    for name, ar in sorted(arities.items()):
        if len(ar) > 1:
            diags.append(
                Diagnostic(f"predicate {name!r} used with arities {sorted(ar)}",
                           _span_of(text, name))
            )
    return WffReport(True, not free, bool(shadowed), tuple(diags))


_WS_RE = re.compile(r"\s+")
_SPACE_NEAR_PUNCT = re.compile(r" (?=[^A-Za-z0-9_])|(?<=[^A-Za-z0-9_]) ")


def normalize_whitespace(text: str) -> str:
    """Collapse whitespace runs and drop spaces that do not separate two words."""
    collapsed = _WS_RE.sub(" ", text.strip())
    return _SPACE_NEAR_PUNCT.sub("", collapsed)


def exact_match(gold: str, pred: str) -> bool:
    return normalize_whitespace(gold) == normalize_whitespace(pred)


def rename_apart(f: Formula) -> Formula:
    """Give every quantifier binding a distinct variable name.

    The first binding of a name keeps it; later bindings of the same name get
    a fresh index of the same sort.  Free variables are never captured.
    """
    taken = {v.raw_name for v in bound_variables(f)}
    taken.update(t.raw_name for a in iter_atoms(f) for t in a.args if isinstance(t, Variable))
    counters = {s: 1 for s in Sort}
    seen: set[str] = set()

    def fresh(v: Variable) -> Variable:
        while True:
            name = f"{v.sort.value}{counters[v.sort]}"
            counters[v.sort] += 1
            if name not in taken:
                taken.add(name)
                return Variable(name)

    def walk(g, env):
        if isinstance(g, Atomic):
            return Atomic(g.atom.map_terms(lambda t: env.get(t, t)))
        if isinstance(g, Neg):
            return Neg(walk(g.child, env))
        if isinstance(g, Exists):
            env = dict(env)
            new_vars = []
            for v in g.vars:
                target = fresh(v) if v.raw_name in seen else v
                seen.add(v.raw_name)
                env[v] = target
                new_vars.append(target)
            return Exists(tuple(new_vars), walk(g.body, env))
        return Conj(tuple(walk(c, env) for c in g.children))

    return walk(f, {})
