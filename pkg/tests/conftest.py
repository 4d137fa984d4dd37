import random

import pytest

from gridfill.grid import CellRef, Grid, parse_table
from gridfill.lang import (
    EQ_CELLS,
    EQ_CONST,
    GETCELL_KS,
    MAPPER_ID,
    NEQ_CONST,
    SET_COL,
    SET_ROW,
    Atom,
    ExtractorProgram,
    FilterProg,
    GetCell,
    ListProg,
    Mapper,
    Predicate,
    X,
)

DIRS = ("u", "d", "l", "r")


def random_mapper(rng: random.Random) -> Mapper:
    kind = rng.choice(("id", "row", "col"))
    if kind == "id":
        return MAPPER_ID
    if kind == "row":
        return Mapper(SET_ROW, rng.randint(1, 4))
    return Mapper(SET_COL, rng.randint(1, 4))


def random_atom(rng: random.Random) -> Atom:
    kind = rng.choice((EQ_CONST, NEQ_CONST, EQ_CELLS))
    mapper = random_mapper(rng)
    if kind == EQ_CELLS:
        return Atom(kind, mapper)
    const = rng.choice(("?", "a", "b", 'sa"y', "back\\slash", "10", ""))
    return Atom(kind, mapper, const)


def random_pred(rng: random.Random) -> Predicate:
    n = rng.choice((0, 0, 1, 1, 2))
    if n == 0:
        return Predicate.true()
    return Predicate.of(*(random_atom(rng) for _ in range(n)))


def random_cellprog(rng: random.Random, max_depth: int = 4):
    depth = rng.randint(0, max_depth)
    prog = X()
    for _ in range(depth):
        prog = GetCell(prog, rng.choice(DIRS), rng.choice(GETCELL_KS),
                       random_pred(rng))
    return prog


def random_simple(rng: random.Random):
    if rng.random() < 0.6:
        n = rng.choice((1, 1, 1, 2, 3))
        return ListProg(tuple(random_cellprog(rng) for _ in range(n)))
    return FilterProg(random_cellprog(rng), random_cellprog(rng),
                      random_cellprog(rng), random_pred(rng))


def random_program(rng: random.Random) -> ExtractorProgram:
    n = rng.choice((1, 1, 1, 2, 2, 3))
    return ExtractorProgram(tuple(random_simple(rng) for _ in range(n)))


@pytest.fixture
def grid_6_2() -> Grid:
    return parse_table("4,5\n6,?")


@pytest.fixture
def grid_row() -> Grid:
    # the conditional-trace row vector
    return parse_table("?,1,?,2,?")


@pytest.fixture
def grid_same_id() -> Grid:
    # id/x table: fill each missing x with the previous value sharing the id
    return parse_table("id,x\n1,10\n1,?\n2,100\n2,200\n1,?\n2,?\n1,300")


@pytest.fixture
def grid_fallback() -> Grid:
    # seven-day table whose columns 3 and 4 use carry-forward with fallback
    return parse_table(
        "2016-11-01,A,?,?\n2016-11-02,B,12,?\n2016-11-03,A,?,200\n"
        "2016-11-04,C,18,400\n2016-11-05,B,10,?\n2016-11-06,B,?,800\n"
        "2016-11-07,C,?,1000"
    )


def cells(*pairs) -> list:
    return [CellRef(r, c) for r, c in pairs]
