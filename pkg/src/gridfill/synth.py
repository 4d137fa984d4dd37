"""Three-level synthesis: branch-count loop, partition search, and unification.

Unification intersects per-example automata; automata are memoized by their
canonical example-subset key so the partition search never rebuilds one.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Optional

from .fta import DEFAULT_DEPTH, BaseFta, Fta, SynthTimeout, build_base, build_fta, intersect
from .grid import Grid
from .lang import ExtractorProgram, print_program
from .preds import (
    DEFAULT_MAX_CONJ,
    DEFAULT_MAX_PREDICATES,
    build_predicates,
)
from .score import DEFAULT_SCORES, NEG_INFINITY, ScoreTable

DEFAULT_TIMEOUT_S = 30.0
DEFAULT_MAX_EXAMPLES = 8


class ExampleError(Exception):
    pass


@dataclass(frozen=True)
class ExampleSet:
    """Positive examples (input -> output cells) plus user negative inputs."""

    positives: tuple  # tuple[(CellRef, tuple[CellRef, ...]), ...]
    negatives: tuple = ()  # tuple[CellRef, ...]

    def __post_init__(self) -> None:
        inputs = [i for i, _ in self.positives] + list(self.negatives)
        if len(set(inputs)) != len(inputs):
            raise ExampleError("example input cells must be distinct")
        for _, out in self.positives:
            if not out:
                raise ExampleError("positive example outputs must be nonempty")

    def validate_in_range(self, g: Grid) -> None:
        for i, out in self.positives:
            if not g.in_range(i):
                raise ExampleError(f"input cell {i} out of range")
            for o in out:
                if not g.in_range(o):
                    raise ExampleError(f"output cell {o} out of range")
        for i in self.negatives:
            if not g.in_range(i):
                raise ExampleError(f"negative input cell {i} out of range")

    def dom(self) -> tuple:
        return tuple(i for i, _ in self.positives)


@dataclass(frozen=True)
class SynthConfig:
    max_conj: int = DEFAULT_MAX_CONJ
    max_predicates: int = DEFAULT_MAX_PREDICATES
    depth: int = DEFAULT_DEPTH
    timeout_s: float = DEFAULT_TIMEOUT_S
    max_examples: int = DEFAULT_MAX_EXAMPLES
    enable_filter: bool = True
    enable_list: bool = True

    def merged(self, overrides: dict) -> "SynthConfig":
        return replace(self, **overrides)


@dataclass
class MemoCache:
    """Automata keyed by their canonical example subset."""

    entries: dict = field(default_factory=dict)
    hits: int = 0
    misses: int = 0

    def get_or_build(self, key, build):
        fta = self.entries.get(key)
        if fta is not None:
            self.hits += 1
            return fta
        self.misses += 1
        fta = build()
        self.entries[key] = fta
        return fta


@dataclass
class SynthTrace:
    """Optional instrumentation of the partition search."""

    branch_attempts: list = field(default_factory=list)  # (k, found program or None)
    candidates: list = field(default_factory=list)  # (k, partition, program text, theta)


def prepare_base(g: Grid, cfg: SynthConfig,
                 scores: ScoreTable = DEFAULT_SCORES) -> BaseFta:
    universe = build_predicates(g, cfg.max_conj, cfg.max_predicates)
    return build_base(g, universe, scores)


class _Task:
    def __init__(self, base: BaseFta, cfg: SynthConfig, memo: Optional[MemoCache],
                 deadline: Optional[float], trace: Optional[SynthTrace]):
        self.base = base
        self.cfg = cfg
        self.memo = memo if memo is not None else MemoCache()
        self.deadline = deadline
        self.trace = trace
        self.scores = base.scores

    def check_deadline(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SynthTimeout()

    def simp_prog(self, positives, negatives):
        """LearnSimpProg: unify positives while failing on every negative."""
        lens = {len(out) for _, out in positives}
        t = lens.pop() if len(lens) == 1 else -1
        key = (
            tuple(sorted((i, out) for i, out in positives)),
            tuple(sorted(negatives)),
            t,
        )
        fta = self.memo.get_or_build(key, lambda: self._build(positives, negatives, t))
        self.check_deadline()
        return fta.rank(self.deadline)

    def _build(self, positives, negatives, t) -> Fta:
        cfg = self.cfg
        base = self.base

        def one(i, out) -> Fta:
            return build_fta(base, i, out, t, depth=cfg.depth,
                             enable_list=cfg.enable_list,
                             enable_filter=cfg.enable_filter)

        items = sorted(positives) + [(j, None) for j in sorted(negatives)]
        fta = one(*items[0])
        for i, out in items[1:]:
            self.check_deadline()
            fta = intersect(fta, one(i, out))
        return fta

    def learn_extractor(self, k: int, examples, user_negatives):
        """Best Seq program with exactly k branches, or None."""
        if k == 1:
            simple = self.simp_prog(examples, user_negatives)
            if self.trace is not None and simple is not None:
                self.trace.candidates.append(
                    (1, tuple(i for i, _ in examples),
                     print_program(ExtractorProgram.single(simple)),
                     self.scores.program(simple))
                )
            return None if simple is None else ExtractorProgram.single(simple)

        dom = sorted(i for i, _ in examples)
        if k > len(dom):
            return None
        best = None
        best_theta = NEG_INFINITY
        by_input = dict(examples)
        for size in range(1, len(dom)):
            for subset in combinations(dom, size):
                self.check_deadline()
                chosen = set(subset)
                inside = tuple((i, by_input[i]) for i in dom if i in chosen)
                outside = tuple((i, by_input[i]) for i in dom if i not in chosen)
                neg = tuple(i for i, _ in outside) + tuple(user_negatives)
                first = self.simp_prog(inside, neg)
                if first is None:
                    continue
                rest = self.learn_extractor(k - 1, outside, user_negatives)
                if rest is None:
                    continue
                candidate = ExtractorProgram((first,) + rest.branches)
                theta = self.scores.program(candidate)
                if self.trace is not None:
                    self.trace.candidates.append(
                        (k, subset, print_program(candidate), theta)
                    )
                if theta > best_theta:
                    best = candidate
                    best_theta = theta
        return best


def learn(
    g: Grid,
    examples: ExampleSet,
    cfg: SynthConfig = SynthConfig(),
    base: Optional[BaseFta] = None,
    memo: Optional[MemoCache] = None,
    scores: ScoreTable = DEFAULT_SCORES,
    trace: Optional[SynthTrace] = None,
) -> Optional[ExtractorProgram]:
    """Synthesize an extractor satisfying every example, or None.

    Enumerates the branch count from 1 up; the first count with a solution
    wins, and within it the best-scoring program over all partitions.
    Raises SynthTimeout when the configured budget expires.
    """
    if not examples.positives:
        raise ExampleError("at least one positive example is required")
    if len(examples.positives) > cfg.max_examples:
        raise ExampleError(
            f"{len(examples.positives)} examples exceed the limit of {cfg.max_examples}"
        )
    examples.validate_in_range(g)
    if base is None:
        base = prepare_base(g, cfg, scores)
    deadline = None
    if cfg.timeout_s and cfg.timeout_s > 0:
        deadline = time.monotonic() + cfg.timeout_s
    task = _Task(base, cfg, memo, deadline, trace)
    positives = tuple(examples.positives)
    for k in range(1, len(positives) + 1):
        program = task.learn_extractor(k, positives, examples.negatives)
        if trace is not None:
            trace.branch_attempts.append(
                (k, None if program is None else print_program(program))
            )
        if program is not None:
            return program
    return None


def learn_simp_prog(
    g: Grid,
    positives,
    negatives,
    cfg: SynthConfig = SynthConfig(),
    base: Optional[BaseFta] = None,
    memo: Optional[MemoCache] = None,
    scores: ScoreTable = DEFAULT_SCORES,
):
    """Direct access to unification (LearnSimpProg)."""
    if base is None:
        base = prepare_base(g, cfg, scores)
    deadline = None
    if cfg.timeout_s and cfg.timeout_s > 0:
        deadline = time.monotonic() + cfg.timeout_s
    task = _Task(base, cfg, memo, deadline, None)
    return task.simp_prog(tuple(positives), tuple(negatives))
