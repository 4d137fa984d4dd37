"""Heuristic scoring of DSL components and programs.

Only orderings between scores are fixed by design; the concrete constants
here are chosen for reproducibility and can be overridden via ScoreTable.
The ordering constraints are re-validated whenever a table is built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .grid import MISSING
from .lang import (
    EQ_CELLS,
    Atom,
    ExtractorProgram,
    FilterProg,
    GetCell,
    ListProg,
    Predicate,
    X,
)

NEG_INFINITY = -math.inf


@dataclass(frozen=True)
class ScoreTable:
    """Score constants. `validate` enforces the required orderings."""

    atom_true: float = 1.0
    atom_missing_const: float = 0.9
    atom_eq_cells: float = 0.8
    atom_other_const: float = 0.25
    mapper_identity: float = 1.0
    mapper_other: float = 0.85
    ints: dict = field(
        default_factory=lambda: {1: 1.0, 2: 0.9, -1: 0.8, 3: 0.7, -2: 0.6, -3: 0.5}
    )
    conj_penalty: float = 0.9

    def validate(self) -> None:
        if not (
            self.atom_true
            > self.atom_missing_const
            > self.atom_eq_cells
            > self.atom_other_const
            > 0
        ):
            raise ValueError("atom score ordering violated")
        if not self.mapper_identity > self.mapper_other > 0:
            raise ValueError("mapper score ordering violated")
        ks = [1, 2, -1, 3, -2, -3]
        vals = [self.ints[k] for k in ks]
        if sorted(vals, reverse=True) != vals or len(set(vals)) != len(vals):
            raise ValueError("integer score ordering violated")
        if vals[-1] <= 0:
            raise ValueError("integer scores must be positive")
        if not 0 < self.conj_penalty <= 1:
            raise ValueError("conjunction penalty must be in (0, 1]")

    def atom(self, a: Atom) -> float:
        mapper_factor = (
            self.mapper_identity if a.mapper.is_identity() else self.mapper_other
        )
        if a.kind == EQ_CELLS:
            base = self.atom_eq_cells
        elif a.const == MISSING:
            base = self.atom_missing_const
        else:
            base = self.atom_other_const
        return base * mapper_factor

    def predicate(self, pred: Predicate) -> float:
        if pred.is_true():
            return self.atom_true
        n = len(pred.atoms)
        mean = sum(self.atom(a) for a in pred.atoms) / n
        return mean * self.conj_penalty ** (n - 1)

    def integer(self, k: int) -> float:
        return self.ints[k]

    def cellprog(self, prog) -> float:
        if isinstance(prog, X):
            return 1.0
        step = self.integer(prog.k) * self.predicate(prog.pred)
        if isinstance(prog.inner, X):
            return step
        inner_depth = prog.inner.depth()
        return (self.cellprog(prog.inner) + step) / max(inner_depth, 1)

    def simple(self, prog) -> float:
        if isinstance(prog, ListProg):
            return sum(self.cellprog(c) for c in prog.cells) / len(prog.cells)
        # Filter's score averages its three cell programs; the predicate
        # deliberately does not contribute.
        return (
            self.cellprog(prog.bind)
            + self.cellprog(prog.start)
            + self.cellprog(prog.end)
        ) / 3

    def program(self, prog) -> float:
        if prog is None:
            return NEG_INFINITY
        if isinstance(prog, ExtractorProgram):
            return sum(self.simple(b) for b in prog.branches) / len(prog.branches)
        if isinstance(prog, (ListProg, FilterProg)):
            return self.simple(prog)
        if isinstance(prog, (X, GetCell)):
            return self.cellprog(prog)
        raise TypeError(f"cannot score {prog!r}")


DEFAULT_SCORES = ScoreTable()
DEFAULT_SCORES.validate()


def score_program(prog, table: ScoreTable = DEFAULT_SCORES) -> float:
    return table.program(prog)
