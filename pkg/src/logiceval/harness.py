"""Corpus loading, per-pair evaluation, aggregation and report rendering."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

from .analysis import (
    CategoryFlags,
    ErrorLabel,
    bin_by_complexity,
    classify_error,
    complexity,
    detect_categories,
)
from .dmatch import MatchScore, SearchConfig, dmatch_score
from .drs import formula_clauses
from .entail import EntailConfig, Relation, logical_relation
from .errors import EmptyInputError, FormatError, LogicEvalError, ProverTimeout, ValidationError
from .formula import check_wff, exact_match, parse_formula

log = logging.getLogger(__name__)

CATEGORIES = ("cc", "pp", "pss")
TSV_COLUMNS = ("id", "sentence", "gold", "predicted")


class CorpusIOError(LogicEvalError, OSError):
    pass


@dataclass(frozen=True)
class EvalConfig:
    restarts: int = 20
    max_iterations: int = 1000
    seed: int = 0
    prover_cmd: str | None = None
    prover_timeout: float = 10.0
    max_steps: int = 200_000
    bins: int = 6
    jobs: int = 1
    prover_jobs: int = 4

    def search_config(self, pair_id: str = "") -> SearchConfig:
        # per-pair seed so results do not depend on evaluation order
        seed = (self.seed * 1_000_003 + zlib.crc32(pair_id.encode("utf8"))) & 0xFFFFFFFF
        return SearchConfig(self.restarts, self.max_iterations, seed)

    def entail_config(self) -> EntailConfig:
        return EntailConfig(
            max_steps=self.max_steps,
            prover_cmd=self.prover_cmd,
            prover_timeout=self.prover_timeout,
        )


@dataclass(frozen=True)
class PairRecord:
    id: str
    sentence: str
    gold: str
    predicted: str
    categories: dict | None = None


@dataclass
class PairResult:
    id: str
    exact: bool
    wff: bool
    prover: bool
    relation: Relation | None
    dmatch: MatchScore
    complexity: int
    categories: CategoryFlags
    error_label: ErrorLabel | None = None
    timed_out: bool = False
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "exact": self.exact,
            "wff": self.wff,
            "prover": self.prover,
            "relation": self.relation.value if self.relation else None,
            "dmatch": {
                "precision": self.dmatch.precision,
                "recall": self.dmatch.recall,
                "f1": self.dmatch.f1,
            },
            "complexity": self.complexity,
            "categories": self.categories.as_dict(),
            "error_label": self.error_label.value if self.error_label else None,
            "timed_out": self.timed_out,
        }


# ---------------------------------------------------------------------------
# corpus


def _flag(value, line):
    if value is None or value == "":
        return None
    if isinstance(value, bool):
        return value
    s = str(value).strip().lower()
    if s in ("1", "true", "yes", "y"):
        return True
    if s in ("0", "false", "no", "n"):
        return False
    raise FormatError(f"cannot read {value!r} as a boolean", line)


def _record(obj: dict, line: int) -> PairRecord:
    missing = [k for k in TSV_COLUMNS if k not in obj or obj[k] is None]
    if missing:
        raise FormatError(f"missing field(s): {', '.join(missing)}", line)
    cats = {k: _flag(obj.get(k), line) for k in CATEGORIES}
    cats = {k: v for k, v in cats.items() if v is not None}
    return PairRecord(
        str(obj["id"]), str(obj["sentence"]), str(obj["gold"]), str(obj["predicted"]),
        cats or None,
    )


def _read_jsonl(text: str) -> list[PairRecord]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON ({e.msg})", lineno) from None
        if not isinstance(obj, dict):
            raise FormatError("expected a JSON object", lineno)
        out.append(_record(obj, lineno))
    return out


def _read_tsv(text: str) -> list[PairRecord]:
    rows = list(csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        return []
    header = [h.strip() for h in rows[0]]
    if tuple(header[:4]) != TSV_COLUMNS:
        raise FormatError(f"header must start with {' '.join(TSV_COLUMNS)}", 1)
    extra = header[4:]
    if any(h not in CATEGORIES for h in extra):
        raise FormatError(f"unknown column(s) {extra}", 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) < 4:
            raise FormatError(f"expected at least 4 columns, found {len(row)}", lineno)
        out.append(_record(dict(zip(header, row)), lineno))
    return out


def load_corpus(path, fmt: str | None = None) -> list[PairRecord]:
    """Read a JSONL or TSV corpus and validate ids and gold formulas."""
    path = Path(path)
    if fmt is None:
        fmt = "tsv" if path.suffix.lower() in (".tsv", ".tab") else "jsonl"
    if fmt not in ("jsonl", "tsv"):
        raise ValueError(f"unknown corpus format {fmt!r}")
    try:
        text = path.read_text(encoding="utf8")
    except OSError as e:
        raise CorpusIOError(f"cannot read corpus {str(path)!r}: {e.strerror or e}") from e
    records = _read_jsonl(text) if fmt == "jsonl" else _read_tsv(text)

    counts = Counter(r.id for r in records)
    dups = sorted(i for i, n in counts.items() if n > 1)
    if dups:
        raise ValidationError(f"duplicate id(s): {', '.join(dups)}", dups)
    bad = [r.id for r in records if not check_wff(r.gold).is_wff]
    if bad:
        raise ValidationError(f"gold formula is not well-formed for: {', '.join(bad)}", bad)
    return records


# ---------------------------------------------------------------------------
# evaluation


def evaluate_pair(r: PairRecord, cfg: EvalConfig = EvalConfig()) -> PairResult:
    timings = {}
    t0 = time.perf_counter()
    gold = parse_formula(r.gold)
    cplx = complexity(gold)
    cats = detect_categories(gold, r.sentence, r.categories)
    report = check_wff(r.predicted)
    timings["wff"] = time.perf_counter() - t0
    if not report.is_wff:
        return PairResult(r.id, False, False, False, None, MatchScore.zero(), cplx, cats,
                          timings=timings)

    pred = parse_formula(r.predicted)
    scfg = cfg.search_config(r.id)

    t0 = time.perf_counter()
    score = dmatch_score(formula_clauses(gold), formula_clauses(pred), scfg)
    timings["dmatch"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    timed_out = False
    try:
        relation = logical_relation(gold, pred, cfg.entail_config())
    except ProverTimeout:
        relation, timed_out = None, True
    timings["prover"] = time.perf_counter() - t0
    prover = relation is Relation.EQUIVALENT

    label = None
    if not prover:
        t0 = time.perf_counter()
        label = classify_error(gold, pred, scfg, check_precondition=False)
        timings["error_label"] = time.perf_counter() - t0

    return PairResult(
        r.id, exact_match(r.gold, r.predicted), True, prover, relation, score, cplx, cats,
        label, timed_out, timings,
    )


def _init_worker(slots):
    from . import tptp

    tptp.set_prover_slots(slots)


def evaluate_corpus(records, cfg: EvalConfig = EvalConfig()) -> list[PairResult]:
    """Evaluate every record; results keep input order."""
    records = list(records)
    if cfg.jobs <= 1 or len(records) < 2:
        return [evaluate_pair(r, cfg) for r in records]
    import multiprocessing

    slots = multiprocessing.get_context().BoundedSemaphore(max(1, cfg.prover_jobs))
    chunk = max(1, len(records) // (cfg.jobs * 8))
    with ProcessPoolExecutor(cfg.jobs, initializer=_init_worker, initargs=(slots,)) as ex:
        return list(ex.map(evaluate_pair, records, [cfg] * len(records), chunksize=chunk))


# ---------------------------------------------------------------------------
# aggregation


def _mean(values):
    values = list(values)
    return sum(values) / len(values) if values else None


@dataclass
class Report:
    n: int
    exact_match: float
    prover_acc: float
    dmatch_p: float
    dmatch_r: float
    dmatch_f1: float
    non_wff_ratio: float
    wff_only: dict
    complexity_bins: list
    category_strata: dict
    error_distribution: dict
    relation_counts: dict
    timeouts: int
    exact_not_equivalent: list

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "exact_match": self.exact_match,
            "prover_acc": self.prover_acc,
            "dmatch_precision": self.dmatch_p,
            "dmatch_recall": self.dmatch_r,
            "dmatch_f1": self.dmatch_f1,
            "non_wff_ratio": self.non_wff_ratio,
            "wff_only": self.wff_only,
            "complexity_bins": self.complexity_bins,
            "category_strata": self.category_strata,
            "error_distribution": self.error_distribution,
            "relation_counts": self.relation_counts,
            "timeouts": self.timeouts,
            "exact_not_equivalent": self.exact_not_equivalent,
        }


def _summary(results) -> dict:
    return {
        "n": len(results),
        "exact_match": _mean(r.exact for r in results),
        "prover_acc": _mean(r.prover for r in results),
        "dmatch_precision": _mean(r.dmatch.precision for r in results),
        "dmatch_recall": _mean(r.dmatch.recall for r in results),
        "dmatch_f1": _mean(r.dmatch.f1 for r in results),
    }


def aggregate(results, k_bins: int = 6) -> Report:
    results = list(results)
    if not results:
        raise EmptyInputError("no results to aggregate")
    n = len(results)
    by_id = {r.id: r for r in results}
    overall = _summary(results)

    bins = []
    for i, ids in enumerate(bin_by_complexity([(r.id, r.complexity) for r in results], k_bins)):
        members = [by_id[j] for j in ids]
        cx = [m.complexity for m in members]
        bins.append({
            "bin": i + 1,
            "count": len(members),
            "min_complexity": min(cx) if cx else None,
            "max_complexity": max(cx) if cx else None,
            "prover_acc": _mean(m.prover for m in members),
            "dmatch_f1": _mean(m.dmatch.f1 for m in members),
        })

    strata = {}
    for cat in CATEGORIES:
        present = [r for r in results if getattr(r.categories, cat)]
        absent = [r for r in results if not getattr(r.categories, cat)]
        strata[cat] = {
            "present": {"count": len(present), "prover_acc": _mean(r.prover for r in present)},
            "absent": {"count": len(absent), "prover_acc": _mean(r.prover for r in absent)},
        }

    labels = Counter(r.error_label.value for r in results if r.error_label)
    errors = {lab.value: labels[lab.value] for lab in ErrorLabel if labels[lab.value]}
    rel = Counter(r.relation.value for r in results if r.relation)
    relations = {x.value: rel[x.value] for x in Relation if rel[x.value]}

    suspicious = [r.id for r in results if r.exact and not r.prover]
    if suspicious:
        log.warning("exact matches not certified equivalent: %s", ", ".join(suspicious))

    return Report(
        n=n,
        exact_match=overall["exact_match"],
        prover_acc=overall["prover_acc"],
        dmatch_p=overall["dmatch_precision"],
        dmatch_r=overall["dmatch_recall"],
        dmatch_f1=overall["dmatch_f1"],
        non_wff_ratio=sum(not r.wff for r in results) / n,
        wff_only=_summary([r for r in results if r.wff]),
        complexity_bins=bins,
        category_strata=strata,
        error_distribution=errors,
        relation_counts=relations,
        timeouts=sum(r.timed_out for r in results),
        exact_not_equivalent=suspicious,
    )


# ---------------------------------------------------------------------------
# rendering


def round3(x) -> str:
    """Three decimals, ties rounded half-up; ``-`` for missing values."""
    if x is None:
        return "-"
    return str(Decimal(repr(float(x))).quantize(Decimal("0.001"), rounding=ROUND_HALF_UP))


def _rounded(obj):
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return float(round3(obj))
    if isinstance(obj, dict):
        return {k: _rounded(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_rounded(v) for v in obj]
    return obj


_METRIC_COLUMNS = [
    ("Exact Match", "exact_match"),
    ("Prover Acc", "prover_acc"),
    ("Dmatch Precision", "dmatch_precision"),
    ("Dmatch Recall", "dmatch_recall"),
    ("Dmatch F1", "dmatch_f1"),
]


def render_report(rep: Report, fmt: str = "json") -> str:
    d = rep.to_dict()
    if fmt == "json":
        return json.dumps(_rounded(d), indent=2) + "\n"
    if fmt == "markdown":
        return _markdown(d)
    if fmt == "csv":
        return _csv(d)
    raise ValueError(f"unknown report format {fmt!r}")


def _markdown(d: dict) -> str:
    head = ["Items", *(name for name, _ in _METRIC_COLUMNS), "Non-WFF Ratio"]
    lines = ["| " + " | ".join(head) + " |", "|" + "---|" * len(head)]
    lines.append("| all ({}) | ".format(d["n"])
                 + " | ".join(round3(d[k]) for _, k in _METRIC_COLUMNS)
                 + f" | {round3(d['non_wff_ratio'])} |")
    w = d["wff_only"]
    lines.append("| WFF only ({}) | ".format(w["n"])
                 + " | ".join(round3(w[k]) for _, k in _METRIC_COLUMNS) + " | - |")
    out = ["## Results", "", *lines, ""]

    out += ["## Complexity bins", "", "| Bin | Count | Complexity | Prover Acc | Dmatch F1 |",
            "|---|---|---|---|---|"]
    for b in d["complexity_bins"]:
        rng = "-" if b["count"] == 0 else f"{b['min_complexity']}-{b['max_complexity']}"
        out.append(f"| {b['bin']} | {b['count']} | {rng} | {round3(b['prover_acc'])} "
                   f"| {round3(b['dmatch_f1'])} |")
    out += ["", "## Syntactic categories", "",
            "| Category | Present (n) | Prover Acc | Absent (n) | Prover Acc |",
            "|---|---|---|---|---|"]
    for cat, s in d["category_strata"].items():
        out.append(f"| {cat.upper()} | {s['present']['count']} | {round3(s['present']['prover_acc'])} "
                   f"| {s['absent']['count']} | {round3(s['absent']['prover_acc'])} |")
    if d["error_distribution"]:
        total = sum(d["error_distribution"].values())
        out += ["", "## Error distribution", "", "| Label | Count | Share |", "|---|---|---|"]
        for label, c in d["error_distribution"].items():
            out.append(f"| {label} | {c} | {round3(c / total)} |")
    out.append("")
    return "\n".join(out)


def _csv(d: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "key", "count", "exact_match", "prover_acc", "dmatch_precision",
                "dmatch_recall", "dmatch_f1", "non_wff_ratio"])
    w.writerow(["overall", "all", d["n"], *(round3(d[k]) for _, k in _METRIC_COLUMNS),
                round3(d["non_wff_ratio"])])
    wo = d["wff_only"]
    w.writerow(["overall", "wff_only", wo["n"], *(round3(wo[k]) for _, k in _METRIC_COLUMNS), ""])
    for b in d["complexity_bins"]:
        w.writerow(["complexity_bin", b["bin"], b["count"], "", round3(b["prover_acc"]), "", "",
                    round3(b["dmatch_f1"]), ""])
    for cat, s in d["category_strata"].items():
        for side in ("present", "absent"):
            w.writerow(["category", f"{cat}_{side}", s[side]["count"], "",
                        round3(s[side]["prover_acc"]), "", "", "", ""])
    for label, c in d["error_distribution"].items():
        w.writerow(["error_label", label, c, "", "", "", "", "", ""])
    return buf.getvalue()
