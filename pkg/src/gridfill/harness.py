"""Test and evaluation machinery: brute-force enumeration and the simulated
interactive protocol over shipped fixtures."""

from __future__ import annotations

import json
import random
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .fta import SynthTimeout
from .preds import PredicateCapExceeded
from .grid import DIRECTIONS, CellRef, Grid, parse_table
from .lang import (
    GETCELL_KS,
    FilterProg,
    GetCell,
    ListProg,
    X,
    eval_extractor,
)
from .sketch import CompletionSpec, complete_table, parse_spec
from .synth import SynthConfig


class BudgetExceeded(Exception):
    def __init__(self, estimate: int, budget: int):
        super().__init__(f"enumeration would visit ~{estimate} programs (budget {budget})")


@dataclass(frozen=True)
class EnumBounds:
    max_size: int
    max_depth: int
    predicates: tuple  # tuple[Predicate, ...] the universe subset to draw from
    t: int  # output arity; -1 disables List
    budget: int = 2_000_000


def _chains_by_depth(bounds: EnumBounds):
    """chains[d] = all cell programs with exactly d GetCell nodes."""
    chains = [[X()]]
    per_step = 4 * len(GETCELL_KS) * len(bounds.predicates)
    total = 1
    for d in range(bounds.max_depth):
        total += len(chains[d]) * per_step
        if total > bounds.budget:
            raise BudgetExceeded(total, bounds.budget)
        layer = []
        for inner in chains[d]:
            for dir in DIRECTIONS:
                for k in GETCELL_KS:
                    for pred in bounds.predicates:
                        layer.append(GetCell(inner, dir, k, pred))
        chains.append(layer)
    return chains


def _combo_count(sizes, slots: int, size_left: int) -> int:
    if slots == 0:
        return 1
    total = 0
    for d, n in enumerate(sizes):
        need = d + 1
        if need + (slots - 1) > size_left:
            break
        total += n * _combo_count(sizes, slots - 1, size_left - need)
    return total


def enumerate_programs(g: Grid, bounds: EnumBounds):
    """Exhaustive, duplicate-free stream of simple programs within bounds.

    Programs come out grouped by tree size, smallest first; generation order
    is canonical (direction, k, predicate order as given).
    """
    chains = _chains_by_depth(bounds)
    max_comp_size = bounds.max_size - 1  # root List/Filter node costs 1
    sizes = [len(layer) for layer in chains]

    estimate = _combo_count(sizes, 3, max_comp_size) * len(bounds.predicates)
    if bounds.t >= 1:
        estimate += _combo_count(sizes, bounds.t, max_comp_size)
    if estimate > bounds.budget:
        raise BudgetExceeded(estimate, bounds.budget)

    def sized_chain_lists(slots: int, size_left: int):
        """All tuples of `slots` chains with total size <= size_left."""
        if slots == 0:
            yield ()
            return
        for d in range(len(chains)):
            size = d + 1
            if size + (slots - 1) > size_left:
                break
            for rest in sized_chain_lists(slots - 1, size_left - size):
                for c in chains[d]:
                    yield (c,) + rest

    out = []
    if bounds.t >= 1:
        for combo in sized_chain_lists(bounds.t, max_comp_size):
            out.append(ListProg(combo))
    for combo in sized_chain_lists(3, max_comp_size):
        c1, c2, c3 = combo
        for pred in bounds.predicates:
            out.append(FilterProg(c1, c2, c3, pred))
    out.sort(key=lambda p: p.size())
    yield from out


# ---------------------------------------------------------------------------
# Fixtures and the simulated interactive protocol
# ---------------------------------------------------------------------------


@dataclass
class TaskFixture:
    name: str
    grid: Grid
    spec: CompletionSpec
    expected: dict  # CellRef -> str
    category: int
    description: str = ""
    config: dict = field(default_factory=dict)

    @staticmethod
    def load(path: Path) -> "TaskFixture":
        path = Path(path)
        csv_file = path / "table.csv"
        json_file = path / "table.json"
        if csv_file.exists():
            grid = parse_table(csv_file.read_text(), "csv")
        elif json_file.exists():
            grid = parse_table(json_file.read_text(), "json")
        else:
            raise FileNotFoundError(f"{path} has no table.csv or table.json")
        spec = parse_spec(json.loads((path / "spec.json").read_text()))
        expected = {}
        expected_file = path / "expected.json"
        if expected_file.exists():
            for key, value in json.loads(expected_file.read_text()).items():
                r, c = key.split(",")
                expected[CellRef(int(r), int(c))] = value
        meta = {}
        meta_file = path / "meta.json"
        if meta_file.exists():
            meta = json.loads(meta_file.read_text())
        return TaskFixture(
            name=path.name,
            grid=grid,
            spec=spec,
            expected=expected,
            category=meta.get("category", 0),
            description=meta.get("description", ""),
            config=meta.get("config", {}),
        )


@dataclass
class InteractiveReport:
    name: str
    solved: bool
    examples_used: int
    pool_size: int
    wall_time_s: float
    iterations: int
    fills_ok: Optional[bool] = None
    programs: dict = field(default_factory=dict)  # hole -> program text
    failure: str = ""

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "solved": self.solved,
            "examples_used": self.examples_used,
            "pool_size": self.pool_size,
            "wall_time_s": round(self.wall_time_s, 4),
            "iterations": self.iterations,
            "fills_ok": self.fills_ok,
            "programs": self.programs,
            "failure": self.failure,
        }


def _satisfied(program, g: Grid, item) -> bool:
    cell, out = item
    got = eval_extractor(program, g, cell)
    if out is None:
        return got is None
    return got is not None and tuple(got) == tuple(out)


def simulate_interactive(
    fixture: TaskFixture, cfg: SynthConfig, seed: int
) -> InteractiveReport:
    """Replay the iterative protocol: start from one random example per hole,
    then keep adding one randomly sampled failing example until the whole
    pool is satisfied, the pool runs out, or synthesis times out."""
    from .sketch import sketch_holes
    from .synth import ExampleSet, learn, prepare_base

    cfg = cfg.merged(fixture.config)
    rng = random.Random(f"{seed}:{fixture.name}")
    g = fixture.grid
    holes = sketch_holes(fixture.spec.sketch)
    pool = {}
    for h in holes:
        ex = fixture.spec.examples[h]
        pool[h] = [(i, out) for i, out in ex.positives] + [
            (i, None) for i in ex.negatives
        ]
    accumulated = {h: [pool[h][rng.randrange(len(pool[h]))]] for h in holes}
    pool_size = sum(len(items) for items in pool.values())

    start = time.monotonic()
    iterations = 0
    solved = False
    failure = ""
    bindings = {}
    base = None
    while True:
        iterations += 1
        bindings = {}
        failed_hole = None
        try:
            if base is None:
                base = prepare_base(g, cfg)
            for h in holes:
                positives = tuple(
                    (i, out) for i, out in accumulated[h] if out is not None
                )
                negatives = tuple(i for i, out in accumulated[h] if out is None)
                program = learn(g, ExampleSet(positives, negatives), cfg, base=base)
                if program is None:
                    failed_hole = h
                    break
                bindings[h] = program
        except SynthTimeout:
            failure = "timeout"
            break
        except PredicateCapExceeded as e:
            failure = str(e)
            break
        if failed_hole is not None:
            failure = f"no program for hole {failed_hole}"
            break
        failing = []
        for h in holes:
            for item in pool[h]:
                if item in accumulated[h]:
                    continue
                if not _satisfied(bindings[h], g, item):
                    failing.append((h, item))
        if not failing:
            solved = True
            break
        h, item = failing[rng.randrange(len(failing))]
        accumulated[h].append(item)

    wall = time.monotonic() - start
    report = InteractiveReport(
        name=fixture.name,
        solved=solved,
        examples_used=sum(len(v) for v in accumulated.values()),
        pool_size=pool_size,
        wall_time_s=wall,
        iterations=iterations,
        failure=failure,
    )
    if solved:
        from .lang import print_program

        report.programs = {str(h): print_program(p) for h, p in bindings.items()}
        if fixture.expected:
            _, outcomes = complete_table(g, fixture.spec, bindings)
            got = {o.cell: o.value for o in outcomes}
            report.fills_ok = all(
                got.get(cell) == value for cell, value in fixture.expected.items()
            )
    return report


@dataclass
class SuiteReport:
    reports: list
    seed: int

    @property
    def solved(self) -> int:
        return sum(1 for r in self.reports if r.solved)

    def times(self) -> list:
        return [r.wall_time_s for r in self.reports]

    def to_json(self) -> dict:
        times = self.times()
        examples = [r.examples_used for r in self.reports]
        return {
            "seed": self.seed,
            "fixtures": len(self.reports),
            "solved": self.solved,
            "avg_time_s": round(statistics.mean(times), 4) if times else 0.0,
            "median_time_s": round(statistics.median(times), 4) if times else 0.0,
            "avg_examples": round(statistics.mean(examples), 3) if examples else 0.0,
            "reports": [r.to_json() for r in self.reports],
        }

    def format_table(self) -> str:
        lines = [
            f"{'fixture':<22} {'cat':>3} {'solved':>6} {'exs':>4} {'time(s)':>8} {'fills':>5}"
        ]
        for r in self.reports:
            fills = "-" if r.fills_ok is None else ("ok" if r.fills_ok else "BAD")
            lines.append(
                f"{r.name:<22} {'':>3} {str(r.solved).lower():>6} "
                f"{r.examples_used:>4} {r.wall_time_s:>8.3f} {fills:>5}"
            )
        summary = self.to_json()
        lines.append(
            f"solved {summary['solved']}/{summary['fixtures']}  "
            f"avg {summary['avg_time_s']}s  median {summary['median_time_s']}s  "
            f"avg examples {summary['avg_examples']}"
        )
        return "\n".join(lines)


def run_suite(fixture_dir, cfg: SynthConfig, seed: int = 42) -> SuiteReport:
    """Run simulate_interactive over every fixture directory, sorted by name."""
    root = Path(fixture_dir)
    reports = []
    for path in sorted(p for p in root.iterdir() if p.is_dir()):
        fixture = TaskFixture.load(path)
        reports.append(simulate_interactive(fixture, cfg, seed))
    return SuiteReport(reports, seed)
