import pytest

from gridfill.lang import (
    EQ_CELLS,
    EQ_CONST,
    MAPPER_ID,
    NEQ_CONST,
    SET_COL,
    Atom,
    ExtractorProgram,
    GetCell,
    ListProg,
    Mapper,
    Predicate,
    X,
)
from gridfill.score import DEFAULT_SCORES, NEG_INFINITY, ScoreTable, score_program

TRUE = Predicate.true()
NEQ_MISSING = Predicate.of(Atom(NEQ_CONST, MAPPER_ID, "?"))


def chain(dir, k, pred):
    return ListProg((GetCell(X(), dir, k, pred),))


def test_atom_ordering():
    t = DEFAULT_SCORES
    eq_missing = t.predicate(Predicate.of(Atom(EQ_CONST, MAPPER_ID, "?")))
    eq_cells = t.predicate(Predicate.of(Atom(EQ_CELLS, MAPPER_ID)))
    eq_const = t.predicate(Predicate.of(Atom(EQ_CONST, MAPPER_ID, "a")))
    neq_const = t.predicate(Predicate.of(Atom(NEQ_CONST, MAPPER_ID, "a")))
    assert t.predicate(TRUE) > eq_missing > eq_cells > eq_const
    assert eq_const == neq_const


def test_identity_mapper_outscores_others():
    t = DEFAULT_SCORES
    with_id = t.predicate(Predicate.of(Atom(EQ_CELLS, MAPPER_ID)))
    with_col = t.predicate(Predicate.of(Atom(EQ_CELLS, Mapper(SET_COL, 1))))
    assert with_id > with_col


def test_integer_ordering_values():
    t = DEFAULT_SCORES
    assert t.integer(1) == 1.0
    assert t.integer(2) == 0.9
    assert t.integer(-1) == 0.8
    assert t.integer(1) > t.integer(2) > t.integer(-1) > t.integer(3) \
        > t.integer(-2) > t.integer(-3)


def test_getcell_scores():
    assert score_program(chain("u", 1, TRUE)) == 1.0
    assert score_program(chain("u", 2, TRUE)) == pytest.approx(0.9)
    assert score_program(chain("u", -1, TRUE)) == pytest.approx(0.8)


def test_list_of_x():
    assert score_program(ListProg((X(),))) == 1.0


def test_null_program_is_neg_infinity():
    assert score_program(None) == NEG_INFINITY


def test_seq_preference_from_conditional_trace():
    preferred = ExtractorProgram((chain("l", 1, NEQ_MISSING),
                                  chain("r", 1, NEQ_MISSING)))
    other = ExtractorProgram((chain("r", -2, NEQ_MISSING),
                              chain("l", 1, NEQ_MISSING)))
    assert score_program(preferred) > score_program(other)


def test_conjunction_below_best_singleton():
    # the pinned formula (mean times a length penalty) guarantees a
    # conjunction scores below its best conjunct alone
    t = DEFAULT_SCORES
    a = Atom(NEQ_CONST, MAPPER_ID, "?")
    b = Atom(NEQ_CONST, MAPPER_ID, "x")
    both = t.predicate(Predicate.of(a, b))
    assert both < max(t.predicate(Predicate.of(a)), t.predicate(Predicate.of(b)))


def test_conjunction_formula():
    t = DEFAULT_SCORES
    a = Atom(NEQ_CONST, MAPPER_ID, "?")
    b = Atom(EQ_CELLS, Mapper(SET_COL, 1))
    expected = (0.9 + 0.8 * 0.85) / 2 * 0.9
    assert t.predicate(Predicate.of(a, b)) == pytest.approx(expected)


def test_nested_getcell_depth_divisor():
    t = DEFAULT_SCORES
    inner = GetCell(X(), "u", 1, TRUE)
    outer = GetCell(inner, "r", 2, TRUE)
    assert t.cellprog(outer) == pytest.approx((1.0 + 0.9) / 1)
    deeper = GetCell(outer, "d", 1, TRUE)
    assert t.cellprog(deeper) == pytest.approx((t.cellprog(outer) + 1.0) / 2)


def test_validate_rejects_bad_tables():
    bad = ScoreTable(atom_true=0.5)  # True must dominate
    with pytest.raises(ValueError):
        bad.validate()
    bad_ints = ScoreTable(ints={1: 1.0, 2: 0.9, -1: 0.95, 3: 0.7, -2: 0.6, -3: 0.5})
    with pytest.raises(ValueError):
        bad_ints.validate()


def test_default_table_validates_at_import():
    DEFAULT_SCORES.validate()


def test_override_table():
    t = ScoreTable(atom_other_const=0.3)
    t.validate()
    assert t.predicate(Predicate.of(Atom(EQ_CONST, MAPPER_ID, "a"))) == 0.3
