"""TPTP export and external SZS-status provers.

Symbol mangling (also written into every problem header):

* predicates and constants keep their name when it is a TPTP lower word
  (``[a-z][A-Za-z0-9_]*``), otherwise they are single-quoted (``'P'``,
  ``'_biker'``);
* variables are capitalised (``e1 -> E1``, ``x -> X``); a name that would
  collide is prefixed with ``V_``;
* role equations ``(subj(e1) = x2)`` become, by default, ``role_subj(E1,X2)``
  plus a functionality axiom, which is the reading used by the internal
  engine.  ``roles="function"`` instead writes ``subj(E1) = X2`` over a
  total unary function.
"""

from __future__ import annotations

import enum
import logging
import os
import re
import shlex
import subprocess
import tempfile

from .formula import (
    AtomKind,
    Atomic,
    Exists,
    Formula,
    Neg,
    Variable,
    bound_variables,
    iter_atoms,
    rename_apart,
)

log = logging.getLogger(__name__)

_LOWER_WORD = re.compile(r"[a-z][A-Za-z0-9_]*")
_SZS_RE = re.compile(r"SZS status\s+(\w+)")

HEADER = """\
% logiceval entailment problem ({direction}, roles={roles})
% predicates/constants: kept if [a-z][A-Za-z0-9_]*, else single-quoted
% variables: first letter upper-cased (e1 -> E1), V_ prefix on collision
% roles: {role_doc}
"""

_ROLE_DOC = {
    "relation": "(r(e) = x) -> role_r(E,X) plus functionality axiom per role",
    "function": "(r(e) = x) -> r(E) = X over a unary function r",
}


_slots = None


def set_prover_slots(semaphore) -> None:
    """Cap concurrent prover subprocesses with a shared semaphore (or ``None``)."""
    global _slots
    _slots = semaphore


class ProverStatus(enum.Enum):
    THEOREM = "Theorem"
    NOT_THEOREM = "NotTheorem"
    TIMEOUT = "Timeout"
    ERROR = "Error"


def _symbol(name: str) -> str:
    if _LOWER_WORD.fullmatch(name):
        return name
    escaped = name.replace("\\", "\\\\").replace("'", "\\'")
    return f"'{escaped}'"


def _variable_names(formulas) -> dict[Variable, str]:
    out: dict[Variable, str] = {}
    used: set[str] = set()
    names = set()
    for f in formulas:
        names.update(bound_variables(f))
        names.update(t for a in iter_atoms(f) for t in a.args if isinstance(t, Variable))
    for v in sorted(names, key=lambda v: v.raw_name):
        raw = v.raw_name
        cand = raw[0].upper() + raw[1:] if raw[0].isalpha() else f"V_{raw}"
        if cand in used:
            cand = f"V_{raw}"
        used.add(cand)
        out[v] = cand
    return out


class _Writer:
    def __init__(self, varnames, roles):
        self.varnames = varnames
        self.roles = roles

    def term(self, t) -> str:
        if isinstance(t, Variable):
            return self.varnames[t]
        return _symbol(t.name)

    def atom(self, a) -> str:
        args = [self.term(t) for t in a.args]
        if a.kind is AtomKind.PREDICATE:
            return f"{_symbol(a.name)}({','.join(args)})"
        if a.kind is AtomKind.TERM_EQ:
            return f"({args[0]} = {args[1]})"
        if self.roles == "function":
            return f"({_symbol(a.name)}({args[0]}) = {args[1]})"
        return f"{_symbol('role_' + a.name)}({args[0]},{args[1]})"

    def formula(self, f: Formula) -> str:
        if isinstance(f, Atomic):
            return self.atom(f.atom)
        if isinstance(f, Neg):
            return f"~ {self.formula(f.child)}"
        if isinstance(f, Exists):
            vs = ",".join(self.varnames[v] for v in f.vars)
            return f"? [{vs}] : {self.formula(f.body)}"
        return "(" + " & ".join(self.unit(c) for c in f.children) + ")"

    def unit(self, f: Formula) -> str:
        s = self.formula(f)
        return f"({s})" if isinstance(f, (Exists, Neg)) else s


def to_tptp(a: Formula, b: Formula, direction: str = "forward", roles: str = "relation") -> str:
    """TPTP FOF problem asking whether ``a`` entails ``b`` (``direction="forward"``)
    or ``b`` entails ``a`` (``"backward"``)."""
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    if roles not in _ROLE_DOC:
        raise ValueError("roles must be 'relation' or 'function'")
    premise, goal = (a, b) if direction == "forward" else (b, a)
    premise, goal = rename_apart(premise), rename_apart(goal)
    w = _Writer(_variable_names([premise, goal]), roles)
    lines = [HEADER.format(direction=direction, roles=roles, role_doc=_ROLE_DOC[roles])]
    if roles == "relation":
        role_names = sorted(
            {x.name for f in (premise, goal) for x in iter_atoms(f) if x.kind is AtomKind.ROLE_EQ}
        )
        for r in role_names:
            sym = _symbol("role_" + r)
            lines.append(
                f"fof({_symbol('functional_' + r)}, axiom, "
                f"! [E,X,Y] : (({sym}(E,X) & {sym}(E,Y)) => X = Y)).\n"
            )
    lines.append(f"fof(a, axiom, {w.formula(premise)}).\n")
    lines.append(f"fof(c, conjecture, {w.formula(goal)}).\n")
    return "".join(lines)


def parse_szs_status(output: str) -> ProverStatus:
    m = _SZS_RE.search(output)
    if not m:
        return ProverStatus.ERROR
    status = m.group(1)
    if status in ("Theorem", "ContradictoryAxioms", "Unsatisfiable"):
        return ProverStatus.THEOREM
    if status in ("CounterSatisfiable", "Satisfiable"):
        return ProverStatus.NOT_THEOREM
    if status in ("Timeout", "ResourceOut", "GaveUp", "MemoryOut", "Unknown"):
        return ProverStatus.TIMEOUT
    return ProverStatus.ERROR


def external_prove(problem: str, prover_cmd: str, timeout: float = 10.0) -> ProverStatus:
    """Run an SZS-emitting prover on ``problem``.

    ``prover_cmd`` is split shell-style; ``{problem}`` and ``{timeout}`` are
    substituted, and the problem path is appended if ``{problem}`` is absent.
    """
    fd, path = tempfile.mkstemp(suffix=".p", prefix="logiceval_")
    try:
        with os.fdopen(fd, "w", encoding="utf8") as fh:
            fh.write(problem)
        argv = []
        has_problem = False
        for part in shlex.split(prover_cmd):
            if "{problem}" in part:
                has_problem = True
            argv.append(part.replace("{problem}", path).replace("{timeout}", str(int(max(timeout, 1)))))
        if not has_problem:
            argv.append(path)
        if _slots is not None:
            _slots.acquire()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return ProverStatus.TIMEOUT
        except OSError as e:
            log.error("cannot run prover %r: %s", prover_cmd, e)
            return ProverStatus.ERROR
        finally:
            if _slots is not None:
                _slots.release()
        return parse_szs_status(proc.stdout + "\n" + proc.stderr)
    finally:
        os.unlink(path)


def external_entails(a: Formula, b: Formula, cfg):
    from .entail import EntailResult, Verdict

    status = external_prove(to_tptp(a, b, "forward"), cfg.prover_cmd, cfg.prover_timeout)
    verdict = {
        ProverStatus.THEOREM: Verdict.ENTAILS,
        ProverStatus.NOT_THEOREM: Verdict.NOT_ENTAILS,
        ProverStatus.TIMEOUT: Verdict.TIMEOUT,
    }.get(status, Verdict.UNSUPPORTED)
    return EntailResult(verdict)

