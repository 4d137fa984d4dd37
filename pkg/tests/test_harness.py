import json
import statistics
from pathlib import Path

import pytest

from gridfill.grid import parse_table
from gridfill.harness import (
    BudgetExceeded,
    EnumBounds,
    TaskFixture,
    enumerate_programs,
    run_suite,
    simulate_interactive,
)
from gridfill.lang import ListProg, X, print_simple
from gridfill.preds import build_predicates
from gridfill.synth import SynthConfig

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def test_enumeration_includes_list_x(grid_6_2):
    universe = build_predicates(grid_6_2, max_conj=1)
    bounds = EnumBounds(max_size=2, max_depth=1,
                        predicates=universe.predicates[:1], t=1)
    programs = list(enumerate_programs(grid_6_2, bounds))
    assert ListProg((X(),)) in programs


def test_enumeration_all_24_getcell_forms(grid_6_2):
    universe = build_predicates(grid_6_2, max_conj=1)
    bounds = EnumBounds(max_size=3, max_depth=1,
                        predicates=universe.predicates[:1], t=1)
    programs = list(enumerate_programs(grid_6_2, bounds))
    getcells = [p for p in programs
                if isinstance(p, ListProg) and p.cells[0] != X()]
    assert len(getcells) == 24  # 4 directions x 6 offsets, True only


def test_enumeration_sorted_and_duplicate_free(grid_6_2):
    universe = build_predicates(grid_6_2, max_conj=1)
    bounds = EnumBounds(max_size=5, max_depth=2,
                        predicates=tuple(universe.predicates[:3]), t=1)
    programs = list(enumerate_programs(grid_6_2, bounds))
    sizes = [p.size() for p in programs]
    assert sizes == sorted(sizes)
    assert len(set(programs)) == len(programs)


def test_enumeration_budget(grid_6_2):
    universe = build_predicates(grid_6_2, max_conj=1)
    bounds = EnumBounds(max_size=9, max_depth=4,
                        predicates=tuple(universe.predicates), t=1, budget=1000)
    with pytest.raises(BudgetExceeded):
        list(enumerate_programs(grid_6_2, bounds))


def test_fixture_loading():
    fixture = TaskFixture.load(FIXTURES / "ex2_1_locf_plus1")
    assert fixture.grid.rows == 1 and fixture.grid.cols == 6
    assert fixture.category == 5
    assert fixture.expected


def test_simulate_single_example_pool():
    fixture = TaskFixture.load(FIXTURES / "ex6_2_small_grid")
    report = simulate_interactive(fixture, SynthConfig(), seed=1)
    assert report.solved
    assert report.iterations == 1
    assert report.examples_used == 1


def test_simulate_deterministic_replay():
    fixture = TaskFixture.load(FIXTURES / "sec5_row_vector")
    a = simulate_interactive(fixture, SynthConfig(), seed=42)
    b = simulate_interactive(fixture, SynthConfig(), seed=42)
    aj, bj = a.to_json(), b.to_json()
    aj.pop("wall_time_s"), bj.pop("wall_time_s")
    assert aj == bj


def test_simulate_examples_subset_of_pool():
    fixture = TaskFixture.load(FIXTURES / "ex2_2_locf_same_id")
    report = simulate_interactive(fixture, SynthConfig(), seed=7)
    assert report.solved
    assert report.examples_used <= report.pool_size


def test_median_helper():
    assert statistics.median([0.1, 0.2, 0.9]) == 0.2


def test_run_suite_empty(tmp_path):
    report = run_suite(tmp_path, SynthConfig())
    assert report.reports == []
    assert report.to_json()["fixtures"] == 0


def test_run_suite_two_fixtures(tmp_path):
    import shutil

    for name in ("ex6_2_small_grid", "locf_column"):
        shutil.copytree(FIXTURES / name, tmp_path / name)
    report = run_suite(tmp_path, SynthConfig(), seed=42)
    assert report.solved == 2
    payload = report.to_json()
    assert payload["fixtures"] == 2
    assert set(payload) >= {"avg_time_s", "median_time_s", "avg_examples"}
    assert "solved" in report.format_table()
