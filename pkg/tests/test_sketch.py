import json

import pytest

from conftest import cells
from gridfill.grid import CellRef, parse_table
from gridfill.lang import parse_program
from gridfill.sketch import (
    ArityError,
    CompletionSpec,
    Const,
    Func,
    Hole,
    SketchEvalError,
    SketchSyntaxError,
    SpecError,
    Targets,
    UnknownFunction,
    complete_table,
    eval_sketch,
    format_number,
    parse_sketch,
    parse_spec,
    synthesize_spec,
)
from gridfill.synth import ExampleSet, SynthConfig
from decimal import Decimal


def bind(text):
    return parse_program(text)


PREV_NONMISSING = bind('GetCell(x, l, 1, \\y.\\z. Val(z) != "?")')


def test_parse_sketch_sum():
    s = parse_sketch("SUM(?1, 1)")
    assert s == Func("SUM", (Hole(1), Const("1")))


def test_parse_bare_hole_is_id_sugar():
    assert parse_sketch("?1") == Hole(1)


def test_parse_nested():
    s = parse_sketch("MINUS(SUM(?1), ?2)")
    assert s == Func("MINUS", (Func("SUM", (Hole(1),)), Hole(2)))


def test_minus_arity_error():
    with pytest.raises(ArityError):
        parse_sketch("MINUS(?1)")


def test_unknown_function():
    with pytest.raises(UnknownFunction):
        parse_sketch("FOO(?1)")


def test_syntax_error_position():
    with pytest.raises(SketchSyntaxError):
        parse_sketch("SUM(?1")


def test_eval_sum_plus_one():
    g = parse_table("2,2,?,?,8,?")
    s = parse_sketch("SUM(?1, 1)")
    value = eval_sketch(s, {1: PREV_NONMISSING}, g, CellRef(1, 3))
    assert value == "3"
    # snapshot semantics: the second missing cell still reads the original 2
    assert eval_sketch(s, {1: PREV_NONMISSING}, g, CellRef(1, 4)) == "3"
    assert eval_sketch(s, {1: PREV_NONMISSING}, g, CellRef(1, 6)) == "9"


def test_eval_count_cells_only():
    g = parse_table("a,b\nc,?")
    prog = bind(
        'Filter(x, GetCell(x, u, -1, \\y.\\z. True), x, \\y.\\z. Val(z) != "?")'
    )
    s = parse_sketch("COUNT(?1)")
    assert eval_sketch(s, {1: prog}, g, CellRef(2, 2)) == "1"


def test_eval_avg():
    g = parse_table("10,?,20")
    s = parse_sketch("AVG(?1, ?2)")
    bindings = {
        1: bind("GetCell(x, l, 2, \\y.\\z. True)"),
        2: bind("GetCell(x, r, 2, \\y.\\z. True)"),
    }
    assert eval_sketch(s, bindings, g, CellRef(1, 2)) == "15"


def test_eval_minus_not_singleton():
    g = parse_table("1,2,?")
    two_cells = bind("List(x, x)")
    s = parse_sketch("MINUS(?1, ?2)")
    with pytest.raises(SketchEvalError) as err:
        eval_sketch(s, {1: two_cells, 2: bind("x")}, g, CellRef(1, 3))
    assert err.value.kind == "NotSingleton"


def test_eval_non_numeric_carries_cell():
    g = parse_table("abc,?")
    s = parse_sketch("SUM(?1, 1)")
    with pytest.raises(SketchEvalError) as err:
        eval_sketch(s, {1: PREV_NONMISSING}, g, CellRef(1, 2))
    assert err.value.kind == "NonNumeric"
    assert err.value.cell == CellRef(1, 1)


def test_eval_bottom_propagates():
    g = parse_table("?,1")
    s = parse_sketch("SUM(?1, 1)")
    assert eval_sketch(s, {1: PREV_NONMISSING}, g, CellRef(1, 1)) is None


def test_concat_strict_singletons():
    g = parse_table("?,ab,cd")
    s = parse_sketch("CONCAT(?1, ?2)")
    bindings = {
        1: bind("GetCell(x, r, 2, \\y.\\z. True)"),
        2: bind("GetCell(x, r, 3, \\y.\\z. True)"),
    }
    assert eval_sketch(s, bindings, g, CellRef(1, 1)) == "abcd"


def test_id_sugar_equivalence():
    g = parse_table("5,?")
    bindings = {1: PREV_NONMISSING}
    bare = eval_sketch(parse_sketch("?1"), bindings, g, CellRef(1, 2))
    wrapped = eval_sketch(parse_sketch("ID(?1)"), bindings, g, CellRef(1, 2))
    assert bare == wrapped == "5"


def test_number_formatting():
    assert format_number(Decimal("14.50")) == "14.5"
    assert format_number(Decimal("3.0")) == "3"
    assert format_number(Decimal("-10")) == "-10"
    assert format_number(Decimal("0.25")) == "0.25"
    assert format_number(Decimal("1E+2")) == "100"


def test_parse_spec_with_letters_and_negatives():
    spec = parse_spec({
        "sketch": "COUNT(?1)",
        "examples": {"1": [
            {"in": [5, "B"], "out": [[3, "B"], [4, "B"]]},
            {"in": [1, 1], "out": None},
        ]},
        "targets": {"kind": "missing"},
    })
    ex = spec.examples[1]
    assert ex.positives[0][0] == CellRef(5, 2)
    assert ex.positives[0][1] == (CellRef(3, 2), CellRef(4, 2))
    assert ex.negatives == (CellRef(1, 1),)


def test_parse_spec_requires_examples():
    with pytest.raises(SpecError):
        parse_spec({"sketch": "?1", "examples": {}})
    parse_spec({"sketch": "?1", "examples": {}}, require_examples=False)


def test_targets_kinds():
    g = parse_table("?,1\n2,?")
    assert Targets("missing").resolve(g) == cells((1, 1), (2, 2))
    assert Targets("cells", tuple(cells((2, 1)))).resolve(g) == cells((2, 1))
    assert Targets("column", col=2).resolve(g) == cells((1, 2), (2, 2))


def test_synthesize_spec_and_complete(grid_6_2):
    spec = parse_spec({
        "sketch": "?1",
        "examples": {"1": [{"in": [2, 2], "out": [[1, 2]]}]},
    })
    report = synthesize_spec(grid_6_2, spec, SynthConfig())
    assert report.ok
    filled, outcomes = complete_table(grid_6_2, spec, report.bindings)
    assert filled.value_at(CellRef(2, 2)) == "5"
    assert [o.cell for o in outcomes] == cells((2, 2))
    assert outcomes[0].value == "5"


def test_complete_table_snapshot_and_idempotent():
    g = parse_table("2,?,?")
    spec = parse_spec({
        "sketch": "SUM(?1, 1)",
        "examples": {"1": [{"in": [1, 2], "out": [[1, 1]]}]},
    })
    bindings = {1: PREV_NONMISSING}
    filled, _ = complete_table(g, spec, bindings)
    # both fills read the original table: 3,3 not 3,4
    assert filled.values == ("2", "3", "3")
    again, outcomes = complete_table(filled, spec, bindings)
    assert again == filled and outcomes == []


def test_complete_table_reports_bottom():
    g = parse_table("?,1")
    spec = parse_spec({
        "sketch": "?1",
        "examples": {"1": [{"in": [1, 1], "out": [[1, 2]]}]},
    }, require_examples=False)
    bindings = {1: PREV_NONMISSING}
    filled, outcomes = complete_table(g, spec, bindings)
    assert outcomes[0].bottom
    assert filled.value_at(CellRef(1, 1)) == "?"


def test_complete_table_requires_bindings():
    g = parse_table("?,1")
    spec = parse_spec({"sketch": "?1", "examples": {}}, require_examples=False)
    with pytest.raises(SpecError):
        complete_table(g, spec, {})


def test_spec_missing_examples_for_hole():
    g = parse_table("?,1")
    spec = parse_spec({"sketch": "SUM(?1, ?2)", "examples": {
        "1": [{"in": [1, 1], "out": [[1, 2]]}],
    }}, require_examples=False)
    with pytest.raises(SpecError):
        synthesize_spec(g, spec, SynthConfig())


def test_repeated_hole_id_reuses_binding():
    g = parse_table("5,?")
    s = parse_sketch("SUM(?1, ?1)")
    assert eval_sketch(s, {1: PREV_NONMISSING}, g, CellRef(1, 2)) == "10"


def test_column_letter_targets():
    g = parse_table("a,?\nb,?")
    spec = parse_spec({
        "sketch": "?1",
        "examples": {"1": [{"in": [1, "B"], "out": [[1, "A"]]}]},
        "targets": {"kind": "column", "col": "B"},
    })
    assert spec.targets.col == 2
    assert spec.targets.resolve(g) == cells((1, 2), (2, 2))
