import json

import pytest

from fixtures import G1, G2, GOLD_230, P1, P2, PRED_230, PRENEX_55, PRENEX_88, RAW_88
from gen import synthetic_records
from logiceval.analysis import ErrorLabel
from logiceval.entail import Relation
from logiceval.errors import EmptyInputError, FormatError, ValidationError
from logiceval.harness import (
    CorpusIOError,
    EvalConfig,
    PairRecord,
    aggregate,
    evaluate_corpus,
    evaluate_pair,
    load_corpus,
    render_report,
    round3,
)


def rec(i, gold, pred, **kw):
    return PairRecord(f"r{i}", "A sentence.", gold, pred, kw or None)


def write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return path


def test_load_jsonl(tmp_path):
    p = write_jsonl(tmp_path / "c.jsonl", [
        {"id": "sick_train_88_p", "sentence": "s", "gold": PRENEX_88, "predicted": PRENEX_88},
        {"id": "sick_train_55_p", "sentence": "s", "gold": PRENEX_55, "predicted": PRENEX_55,
         "cc": False},
    ])
    recs = load_corpus(p)
    assert [r.id for r in recs] == ["sick_train_88_p", "sick_train_55_p"]
    assert recs[1].categories == {"cc": False}


def test_load_tsv(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text("id\tsentence\tgold\tpredicted\tpp\n"
                 f"a\tA boy jumps\t{PRENEX_55}\t{PRENEX_55}\t1\n")
    recs = load_corpus(p)
    assert recs[0].categories == {"pp": True}


def test_tsv_missing_predicted_column(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text(f"id\tsentence\tgold\na\ts\t{G1}\n")
    with pytest.raises(FormatError):
        load_corpus(p)


def test_tsv_short_row_reports_line(tmp_path):
    p = tmp_path / "c.tsv"
    p.write_text(f"id\tsentence\tgold\tpredicted\na\ts\t{G1}\t{G1}\nb\ts\n")
    with pytest.raises(FormatError) as info:
        load_corpus(p)
    assert info.value.line == 3


def test_jsonl_bad_line(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(json.dumps({"id": "a", "sentence": "s", "gold": G1, "predicted": G1}) + "\n{oops\n")
    with pytest.raises(FormatError) as info:
        load_corpus(p)
    assert info.value.line == 2


def test_duplicate_ids(tmp_path):
    row = {"id": "a", "sentence": "s", "gold": G1, "predicted": G1}
    with pytest.raises(ValidationError) as info:
        load_corpus(write_jsonl(tmp_path / "c.jsonl", [row, row]))
    assert info.value.ids == ["a"]


def test_bad_gold(tmp_path):
    row = {"id": "a", "sentence": "s", "gold": "jump(e1)", "predicted": G1}
    with pytest.raises(ValidationError):
        load_corpus(write_jsonl(tmp_path / "c.jsonl", [row]))


def test_missing_file(tmp_path):
    with pytest.raises(CorpusIOError):
        load_corpus(tmp_path / "missing.jsonl")


def test_evaluate_identity():
    r = evaluate_pair(rec(1, PRENEX_88, PRENEX_88))
    assert r.exact and r.prover and r.dmatch.f1 == 1.0
    assert r.relation is Relation.EQUIVALENT and r.error_label is None
    assert r.complexity == 8 and r.categories.pp


def test_evaluate_role_mismatch():
    r = evaluate_pair(rec(1, G2, P2))
    assert not r.prover and r.relation is Relation.NEUTRAL
    assert r.dmatch.f1 == 0.5
    assert r.error_label is ErrorLabel.ARGUMENT_ROLE_ORDER


def test_evaluate_non_wff():
    r = evaluate_pair(rec(1, G1, "exists e1.(jump(e1)"))
    assert not r.wff and not r.exact and not r.prover
    assert r.dmatch.f1 == 0.0 and r.error_label is None and r.relation is None


def test_evaluate_equivalent_not_exact():
    r = evaluate_pair(rec(1, PRENEX_88, RAW_88))
    assert not r.exact and r.prover


def test_aggregate_identity():
    rep = aggregate([evaluate_pair(rec(i, f, f)) for i, f in enumerate([G1, PRENEX_55, PRENEX_88])])
    assert rep.exact_match == rep.prover_acc == rep.dmatch_f1 == 1.0
    assert rep.non_wff_ratio == 0.0
    assert rep.error_distribution == {}


def test_aggregate_diagnostic_pairs():
    rep = aggregate([evaluate_pair(rec(1, G1, P1)), evaluate_pair(rec(2, G2, P2))])
    assert rep.dmatch_f1 == pytest.approx((2 / 3 + 0.5) / 2)
    assert rep.relation_counts == {"BackwardOnly": 1, "Neutral": 1}


def test_aggregate_single_non_wff():
    rep = aggregate([evaluate_pair(rec(1, G1, "exists e1.(jump(e1)"))])
    assert rep.non_wff_ratio == 1.0 and rep.prover_acc == 0.0
    assert rep.wff_only["n"] == 0 and rep.wff_only["prover_acc"] is None


def test_aggregate_empty():
    with pytest.raises(EmptyInputError):
        aggregate([])


def test_aggregate_invariants():
    results = evaluate_corpus(synthetic_records(120, seed=5))
    rep = aggregate(results)
    assert sum(b["count"] for b in rep.complexity_bins) == rep.n
    for s in rep.category_strata.values():
        assert s["present"]["count"] + s["absent"]["count"] == rep.n
    assert rep.prover_acc <= 1 - rep.non_wff_ratio + 1e-12
    assert sum(rep.error_distribution.values()) == sum(r.wff and not r.prover for r in results)
    for r in results:
        assert (r.error_label is not None) == (r.wff and not r.prover)
        assert not r.prover or r.relation is Relation.EQUIVALENT
        if r.exact:
            assert r.prover and r.dmatch.f1 == 1.0
    assert rep.exact_not_equivalent == []


def test_parallel_matches_serial():
    recs = synthetic_records(40, seed=2)
    serial = evaluate_corpus(recs, EvalConfig())
    parallel = evaluate_corpus(recs, EvalConfig(jobs=2))
    assert [r.to_dict() for r in serial] == [r.to_dict() for r in parallel]


def test_round3():
    assert round3(0.6894) == "0.689"
    assert round3(0.6895) == "0.690"
    assert round3(1.0) == "1.000"
    assert round3(None) == "-"


def test_render_formats():
    results = [evaluate_pair(rec(1, GOLD_230, PRED_230)), evaluate_pair(rec(2, G1, G1))]
    rep = aggregate(results)
    d = json.loads(render_report(rep, "json"))
    assert list(d)[:3] == ["n", "exact_match", "prover_acc"]
    assert d["error_distribution"] == {"QuantifierCount": 1}
    md = render_report(rep, "markdown")
    assert "| all (2) | 0.500 | 0.500 |" in md
    assert "## Error distribution" in md
    csv_text = render_report(rep, "csv")
    assert csv_text.splitlines()[0].startswith("section,key,count")
    assert sum(1 for ln in csv_text.splitlines() if ln.startswith("complexity_bin")) == 6
    with pytest.raises(ValueError):
        render_report(rep, "xml")


def test_render_rounding_in_markdown():
    rep = aggregate([evaluate_pair(rec(1, G1, G1))])
    rep.prover_acc = 0.6894
    assert "| 0.689 |" in render_report(rep, "markdown")
    rep.prover_acc = 0.6895
    assert "| 0.690 |" in render_report(rep, "markdown")


def test_empty_error_distribution_rendering():
    rep = aggregate([evaluate_pair(rec(1, G1, G1))])
    assert json.loads(render_report(rep, "json"))["error_distribution"] == {}
    assert "Error distribution" not in render_report(rep, "markdown")
