"""Command-line entry point: ``logiceval <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .dmatch import SearchConfig, dmatch_score
from .drs import formula_clauses
from .entail import EntailConfig, logical_relation
from .errors import LogicEvalError
from .formula import check_wff, parse_formula, print_formula
from .harness import EvalConfig, aggregate, evaluate_corpus, load_corpus, render_report
from .normalize import normalize
from .tptp import to_tptp

log = logging.getLogger("logiceval")

ENV_PREFIX = "LOGICEVAL_"

# flag -> (type, default); env vars fill in anything not given on the command line
_EVAL_SETTINGS = {
    "format": (str, None),
    "report_fmt": (str, "json"),
    "restarts": (int, 20),
    "seed": (int, 0),
    "prover_cmd": (str, None),
    "prover_timeout": (float, 10.0),
    "bins": (int, 6),
    "jobs": (int, 1),
}


def _resolve(args, env=None) -> None:
    env = os.environ if env is None else env
    for name, (typ, default) in _EVAL_SETTINGS.items():
        if getattr(args, name) is not None:
            continue
        raw = env.get(ENV_PREFIX + name.upper())
        if raw is not None and raw != "":
            try:
                value = typ(raw)
            except ValueError:
                raise LogicEvalError(f"bad value for {ENV_PREFIX}{name.upper()}: {raw!r}") from None
        else:
            value = default
        setattr(args, name, value)


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf8")


def cmd_evaluate(args) -> int:
    _resolve(args)
    if args.format not in (None, "jsonl", "tsv"):
        raise LogicEvalError(f"unknown corpus format {args.format!r}")
    if args.report_fmt not in ("json", "markdown", "csv"):
        raise LogicEvalError(f"unknown report format {args.report_fmt!r}")
    cfg = EvalConfig(
        restarts=args.restarts,
        seed=args.seed,
        prover_cmd=args.prover_cmd,
        prover_timeout=args.prover_timeout,
        bins=args.bins,
        jobs=args.jobs,
    )
    records = load_corpus(args.corpus, args.format)
    results = evaluate_corpus(records, cfg)
    _write(render_report(aggregate(results, cfg.bins), args.report_fmt), args.out)
    return 0


def cmd_normalize(args) -> int:
    status = 0
    for lineno, line in enumerate(sys.stdin, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            print(print_formula(normalize(parse_formula(line))))
        except LogicEvalError as e:
            print(f"line {lineno}: {e}", file=sys.stderr)
            print()
            status = 1
    return status


def cmd_check(args) -> int:
    lines = args.formulas or [ln.rstrip("\n") for ln in sys.stdin]
    for text in lines:
        if not text.strip():
            continue
        print(json.dumps(check_wff(text).to_dict()))
    return 0


def cmd_dmatch(args) -> int:
    cfg = SearchConfig(restarts=args.restarts, rng_seed=args.seed)
    g = formula_clauses(parse_formula(args.gold))
    p = formula_clauses(parse_formula(args.pred))
    s = dmatch_score(g, p, cfg)
    print(json.dumps({"precision": s.precision, "recall": s.recall, "f1": s.f1,
                      "matched": s.matched, "gold_size": s.gold_size, "pred_size": s.pred_size}))
    return 0


def cmd_entail(args) -> int:
    cfg = EntailConfig(prover_cmd=args.prover_cmd, prover_timeout=args.prover_timeout)
    print(logical_relation(parse_formula(args.a), parse_formula(args.b), cfg).value)
    return 0


def cmd_tptp(args) -> int:
    problem = to_tptp(parse_formula(args.a), parse_formula(args.b), args.direction, args.roles)
    _write(problem, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logiceval", description="Evaluate NL-to-FOL predictions.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="score a corpus and write a report")
    ev.add_argument("--corpus", required=True)
    ev.add_argument("--format", choices=["jsonl", "tsv"], help="default: from file extension")
    ev.add_argument("--out", help="report path (default: stdout)")
    ev.add_argument("--report-fmt", choices=["json", "markdown", "csv"])
    ev.add_argument("--restarts", type=int)
    ev.add_argument("--seed", type=int)
    ev.add_argument("--prover-cmd", help="SZS prover command; {problem} and {timeout} are substituted")
    ev.add_argument("--prover-timeout", type=float)
    ev.add_argument("--bins", type=int)
    ev.add_argument("--jobs", type=int)
    ev.set_defaults(func=cmd_evaluate)

    nm = sub.add_parser("normalize", help="prenex-normalize formulas read from stdin")
    nm.set_defaults(func=cmd_normalize)

    ck = sub.add_parser("check", help="well-formedness report, one JSON line per formula")
    ck.add_argument("formulas", nargs="*", help="formulas (default: read lines from stdin)")
    ck.set_defaults(func=cmd_check)

    dm = sub.add_parser("dmatch", help="Dmatch score between two formulas")
    dm.add_argument("gold")
    dm.add_argument("pred")
    dm.add_argument("--restarts", type=int, default=20)
    dm.add_argument("--seed", type=int, default=0)
    dm.set_defaults(func=cmd_dmatch)

    en = sub.add_parser("entail", help="logical relation between two formulas")
    en.add_argument("a")
    en.add_argument("b")
    en.add_argument("--prover-cmd")
    en.add_argument("--prover-timeout", type=float, default=10.0)
    en.set_defaults(func=cmd_entail)

    tp = sub.add_parser("tptp", help="emit a TPTP problem asking whether A entails B")
    tp.add_argument("a")
    tp.add_argument("b")
    tp.add_argument("--direction", choices=["forward", "backward"], default="forward")
    tp.add_argument("--roles", choices=["relation", "function"], default="relation")
    tp.add_argument("--out")
    tp.set_defaults(func=cmd_tptp)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (LogicEvalError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # noqa: BLE001
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
