import pytest
from hypothesis import given, settings

from fixtures import PRENEX_55, PRENEX_88
from gen import fragments
from logiceval.drs import (
    NOT,
    Box,
    Drs,
    NegBox,
    drs_to_clauses,
    dump_clauses,
    fol_to_drs,
    formula_clauses,
    load_clauses,
)
from logiceval.errors import ConversionError
from logiceval.formula import iter_atoms, negation_count, parse_formula


def test_negated_row_structure():
    d = fol_to_drs(parse_formula(PRENEX_88))
    assert d.referents == () and len(d.conditions) == 1
    inner = d.conditions[0]
    assert isinstance(inner, NegBox)
    assert [v.sort.value for v in inner.drs.referents] == ["e", "x", "x"]
    assert [c.name for c in inner.drs.conditions] == ["biker", "jump", "subj", "air", "in"]


def test_positive_row_structure():
    d = fol_to_drs(parse_formula(PRENEX_55))
    assert len(d.referents) == 3
    assert [c.name for c in d.conditions] == ["boy", "three", "jump", "subj", "leaf", "in"]
    assert d.depth() == 1


def test_minimal():
    d = fol_to_drs(parse_formula("exists e1.(jump(e1))"))
    assert len(d.referents) == 1 and len(d.conditions) == 1


def test_clause_counts():
    right = formula_clauses(parse_formula(PRENEX_55))
    assert len(right) == 6 and {c.box for c in right.clauses} == {Box("b1")}
    left = formula_clauses(parse_formula(PRENEX_88))
    assert len(left) == 6
    assert str(left.clauses[0]) == "b1 NOT b2"
    assert sum(c.box == Box("b2") for c in left.clauses) == 5


def test_empty_box():
    assert len(drs_to_clauses(Drs())) == 0


def test_free_variable_rejected():
    with pytest.raises(ConversionError):
        fol_to_drs(parse_formula("jump(e1)"))


def test_role_clause_text():
    cs = formula_clauses(parse_formula("exists e x.(eat(e) & (subj(e)=x))"))
    assert dump_clauses(cs) == "b1 eat e\nb1 subj e x\n"


def test_inner_negation_nests_boxes():
    cs = formula_clauses(parse_formula("exists x.(P(x) & -Q(x))"))
    assert [str(c) for c in cs.clauses] == ["b1 P x", "b1 NOT b2", "b2 Q x"]


@settings(max_examples=200, deadline=None)
@given(fragments())
def test_clause_count_matches_atoms(f):
    cs = formula_clauses(f)
    n_atoms = len(list(iter_atoms(f)))
    assert len(cs) == n_atoms + negation_count(f)
    assert sum(c.label == NOT for c in cs.clauses) == negation_count(f)


@settings(max_examples=200, deadline=None)
@given(fragments())
def test_dump_load_roundtrip(f):
    cs = formula_clauses(f)
    back = load_clauses(dump_clauses(cs))
    assert back.clauses == cs.clauses
