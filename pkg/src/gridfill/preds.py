"""Construction of the finite mapper/predicate universe for a table."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .grid import Grid
from .lang import (
    EQ_CELLS,
    EQ_CONST,
    MAPPER_ID,
    NEQ_CONST,
    SET_COL,
    SET_ROW,
    Atom,
    Mapper,
    Predicate,
)

DEFAULT_MAX_CONJ = 2
DEFAULT_MAX_PREDICATES = 50_000


class PredicateCapExceeded(Exception):
    def __init__(self, count: int, cap: int):
        self.count = count
        self.cap = cap
        super().__init__(
            f"predicate universe needs {count} predicates, over the cap of {cap}; "
            "raise max_predicates or lower max_conj"
        )


@dataclass(frozen=True)
class PredicateUniverse:
    mappers: tuple  # tuple[Mapper, ...]
    atoms: tuple  # tuple[Predicate, ...] single-atom predicates plus True
    predicates: tuple  # tuple[Predicate, ...] all conjunctions up to max_conj
    max_conj: int


def build_mappers(g: Grid) -> list:
    """Identity, then one row-fixing mapper per row, one col-fixing per column."""
    mappers = [MAPPER_ID]
    mappers.extend(Mapper(SET_ROW, k) for k in range(1, g.rows + 1))
    mappers.extend(Mapper(SET_COL, k) for k in range(1, g.cols + 1))
    return mappers


def _atoms(g: Grid, mappers) -> list:
    values = g.distinct_values()
    out = []
    for mapper in mappers:
        for v in values:
            out.append(Atom(EQ_CONST, mapper, v))
            out.append(Atom(NEQ_CONST, mapper, v))
    out.extend(Atom(EQ_CELLS, mapper) for mapper in mappers)
    return sorted(out, key=Atom.sort_key)


def _satisfiable(atoms) -> bool:
    # Two same-mapper const-equality atoms with different constants can never
    # hold together; neither can == and != of the same (mapper, constant).
    by_mapper = {}
    for a in atoms:
        if a.kind == EQ_CONST:
            prev = by_mapper.get(a.mapper)
            if prev is not None and prev != a.const:
                return False
            by_mapper[a.mapper] = a.const
    consts = {(a.mapper, a.const) for a in atoms if a.kind == EQ_CONST}
    for a in atoms:
        if a.kind == NEQ_CONST and (a.mapper, a.const) in consts:
            return False
    return True


def count_predicates(g: Grid, max_conj: int) -> int:
    """Size of the universe without materializing it (cap pre-check)."""
    n_atoms = len(_atoms(g, build_mappers(g)))
    total = 1  # True
    choose = 1
    for i in range(1, max_conj + 1):
        choose = choose * (n_atoms - i + 1) // i
        total += choose
    return total


def build_predicates(
    g: Grid,
    max_conj: int = DEFAULT_MAX_CONJ,
    max_predicates: int = DEFAULT_MAX_PREDICATES,
) -> PredicateUniverse:
    """Enumerate the canonical predicate universe (Preds) for table `g`.

    Constants are drawn from values present in the table. Conjunctions of
    1..max_conj distinct atoms are kept, minus unsatisfiable combinations.
    """
    if max_conj < 1:
        raise ValueError("max_conj must be >= 1")
    upper = count_predicates(g, max_conj)
    if upper > max_predicates:
        raise PredicateCapExceeded(upper, max_predicates)

    mappers = build_mappers(g)
    atoms = _atoms(g, mappers)
    predicates = [Predicate.true()]
    predicates.extend(Predicate((a,)) for a in atoms)
    for n in range(2, max_conj + 1):
        for combo in combinations(atoms, n):
            if _satisfiable(combo):
                predicates.append(Predicate(combo))
    atom_preds = tuple([Predicate.true()] + [Predicate((a,)) for a in atoms])
    return PredicateUniverse(
        mappers=tuple(mappers),
        atoms=atom_preds,
        predicates=tuple(predicates),
        max_conj=max_conj,
    )
