"""The cell-extraction DSL: AST, evaluation, and the concrete text syntax.

A program maps (grid, input cell) to a list of cells or the failure value,
encoded here as None. Evaluation is pure; all AST nodes are immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .grid import DIRECTIONS, MISSING, CellRef, Grid

GETCELL_KS = (1, 2, 3, -1, -2, -3)
DEFAULT_MAX_DEPTH = 4


class ProgramSyntaxError(Exception):
    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} (at position {pos})")


# ---------------------------------------------------------------------------
# Mappers and predicates
# ---------------------------------------------------------------------------


def _cached_hash(obj, parts) -> int:
    h = obj.__dict__.get("_hash")
    if h is None:
        h = hash(parts)
        object.__setattr__(obj, "_hash", h)
    return h

IDENTITY = "id"
SET_ROW = "set_row"
SET_COL = "set_col"


@dataclass(frozen=True)
class Mapper:
    """Cell-to-cell map used inside predicates: identity, fix-row, or fix-col."""

    kind: str  # IDENTITY | SET_ROW | SET_COL
    k: int = 0

    def apply(self, c: CellRef) -> CellRef:
        if self.kind == IDENTITY:
            return c
        if self.kind == SET_ROW:
            return CellRef(self.k, c.col)
        return CellRef(c.row, self.k)

    def is_identity(self) -> bool:
        return self.kind == IDENTITY

    def text(self, var: str) -> str:
        if self.kind == IDENTITY:
            return var
        if self.kind == SET_ROW:
            return f"({self.k}, col({var}))"
        return f"(row({var}), {self.k})"

    def sort_key(self):
        order = {IDENTITY: 0, SET_ROW: 1, SET_COL: 2}
        return (order[self.kind], self.k)

    def __hash__(self) -> int:
        return _cached_hash(self, ("mapper", self.kind, self.k))


MAPPER_ID = Mapper(IDENTITY)

EQ_CONST = "eq_const"
NEQ_CONST = "neq_const"
EQ_CELLS = "eq_cells"


@dataclass(frozen=True)
class Atom:
    """One predicate conjunct. `const` is unused for EQ_CELLS."""

    kind: str
    mapper: Mapper
    const: str = ""

    def sort_key(self):
        order = {EQ_CONST: 0, NEQ_CONST: 1, EQ_CELLS: 2}
        return (order[self.kind], self.mapper.sort_key(), self.const)

    def text(self) -> str:
        if self.kind == EQ_CELLS:
            return f"Val({self.mapper.text('y')}) == Val({self.mapper.text('z')})"
        op = "==" if self.kind == EQ_CONST else "!="
        return f'Val({self.mapper.text("z")}) {op} "{_escape(self.const)}"'

    def __hash__(self) -> int:
        return _cached_hash(self, ("atom", self.kind, self.mapper, self.const))


@dataclass(frozen=True)
class Predicate:
    """Canonical conjunction of atoms; the empty conjunction is True."""

    atoms: tuple = ()

    @staticmethod
    def true() -> "Predicate":
        return Predicate(())

    @staticmethod
    def of(*atoms: Atom) -> "Predicate":
        uniq = sorted(set(atoms), key=Atom.sort_key)
        return Predicate(tuple(uniq))

    def is_true(self) -> bool:
        return not self.atoms

    def text(self) -> str:
        if not self.atoms:
            return "True"
        return " && ".join(a.text() for a in self.atoms)

    def lambda_text(self) -> str:
        return "\\y.\\z. " + self.text()

    def __hash__(self) -> int:
        return _cached_hash(self, ("pred",) + self.atoms)


def eval_atom(atom: Atom, g: Grid, y: CellRef, z: CellRef) -> bool:
    """Atom truth under the missing-value rules.

    Comparisons against the `?` marker itself are literal; any other
    comparison is false when a compared cell holds `?`. A mapper landing
    out of range makes the atom false.
    """
    if atom.kind == EQ_CELLS:
        vy = g.value_at(atom.mapper.apply(y))
        vz = g.value_at(atom.mapper.apply(z))
        if vy is None or vz is None:
            return False
        if vy == MISSING or vz == MISSING:
            return False
        return vy == vz
    v = g.value_at(atom.mapper.apply(z))
    if v is None:
        return False
    if atom.const == MISSING:
        return (v == MISSING) == (atom.kind == EQ_CONST)
    if v == MISSING:
        return False
    return (v == atom.const) == (atom.kind == EQ_CONST)


def eval_predicate(pred: Predicate, g: Grid, y: CellRef, z: CellRef) -> bool:
    return all(eval_atom(a, g, y, z) for a in pred.atoms)


# ---------------------------------------------------------------------------
# Programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class X:
    """The input-cell variable."""

    def depth(self) -> int:
        return 0

    def size(self) -> int:
        return 1

    def __hash__(self) -> int:
        return hash("x")


@dataclass(frozen=True)
class GetCell:
    inner: "CellProg"
    dir: str
    k: int
    pred: Predicate

    def __post_init__(self) -> None:
        if self.dir not in DIRECTIONS:
            raise ValueError(f"bad direction {self.dir!r}")
        if self.k not in GETCELL_KS:
            raise ValueError(f"bad k {self.k!r}")

    def depth(self) -> int:
        d = self.__dict__.get("_depth")
        if d is None:
            d = self.inner.depth() + 1
            object.__setattr__(self, "_depth", d)
        return d

    def size(self) -> int:
        return self.depth() + 1

    def __hash__(self) -> int:
        return _cached_hash(
            self, ("getcell", self.inner, self.dir, self.k, self.pred)
        )

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(other) is not GetCell:
            return NotImplemented
        return (self.k == other.k and self.dir == other.dir
                and self.pred == other.pred and self.inner == other.inner)


CellProg = "X | GetCell"


@dataclass(frozen=True)
class ListProg:
    cells: tuple  # tuple[CellProg, ...], nonempty

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("List needs at least one cell program")

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.cells)

    def __hash__(self) -> int:
        return _cached_hash(self, ("list",) + self.cells)


@dataclass(frozen=True)
class FilterProg:
    bind: "CellProg"  # bound to y in the predicate
    start: "CellProg"
    end: "CellProg"
    pred: Predicate

    def size(self) -> int:
        return 1 + self.bind.size() + self.start.size() + self.end.size()

    def __hash__(self) -> int:
        return _cached_hash(
            self, ("filter", self.bind, self.start, self.end, self.pred)
        )


SimpleProg = "ListProg | FilterProg"


@dataclass(frozen=True)
class ExtractorProgram:
    """Ordered Seq branches; a single branch is a plain simple program."""

    branches: tuple  # tuple[SimpleProg, ...], nonempty

    def __post_init__(self) -> None:
        if not self.branches:
            raise ValueError("extractor needs at least one branch")

    @staticmethod
    def single(p) -> "ExtractorProgram":
        return ExtractorProgram((p,))


def ray(g: Grid, c: CellRef, dir: str) -> list:
    """All cells from `c` heading `dir`, including `c` itself."""
    if dir == "u":
        return [CellRef(r, c.col) for r in range(c.row, 0, -1)]
    if dir == "d":
        return [CellRef(r, c.col) for r in range(c.row, g.rows + 1)]
    if dir == "l":
        return [CellRef(c.row, k) for k in range(c.col, 0, -1)]
    return [CellRef(c.row, k) for k in range(c.col, g.cols + 1)]


def eval_cellprog(prog, g: Grid, x: CellRef) -> Optional[CellRef]:
    """Evaluate a cell program; None is the failure value."""
    if isinstance(prog, X):
        return x
    c = eval_cellprog(prog.inner, g, x)
    if c is None:
        return None
    hits = [z for z in ray(g, c, prog.dir) if eval_predicate(prog.pred, g, c, z)]
    k = prog.k
    if abs(k) > len(hits):
        return None
    return hits[k - 1] if k > 0 else hits[len(hits) - abs(k)]


def eval_simple(prog, g: Grid, x: CellRef) -> Optional[list]:
    if isinstance(prog, ListProg):
        out = []
        for cp in prog.cells:
            c = eval_cellprog(cp, g, x)
            if c is None:
                return None
            out.append(c)
        return out
    c1 = eval_cellprog(prog.bind, g, x)
    c2 = eval_cellprog(prog.start, g, x)
    c3 = eval_cellprog(prog.end, g, x)
    if c1 is None or c2 is None or c3 is None:
        return None
    span = g.line_range(c2, c3)
    if span is None:
        return None
    return [z for z in span if eval_predicate(prog.pred, g, c1, z)]


def eval_extractor(prog: ExtractorProgram, g: Grid, x: CellRef) -> Optional[list]:
    """Try branches in order; the first non-failing branch wins."""
    for branch in prog.branches:
        result = eval_simple(branch, g, x)
        if result is not None:
            return result
    return None


# ---------------------------------------------------------------------------
# Concrete syntax
# ---------------------------------------------------------------------------


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def print_cellprog(prog) -> str:
    if isinstance(prog, X):
        return "x"
    return (
        f"GetCell({print_cellprog(prog.inner)}, {prog.dir}, {prog.k}, "
        f"{prog.pred.lambda_text()})"
    )


def print_simple(prog) -> str:
    if isinstance(prog, ListProg):
        if len(prog.cells) == 1:
            # singleton List prints as the bare cell program
            return print_cellprog(prog.cells[0])
        return "List(" + ", ".join(print_cellprog(c) for c in prog.cells) + ")"
    return (
        f"Filter({print_cellprog(prog.bind)}, {print_cellprog(prog.start)}, "
        f"{print_cellprog(prog.end)}, {prog.pred.lambda_text()})"
    )


def print_program(prog: ExtractorProgram) -> str:
    """Render with Seq nested right-associatively."""
    parts = [print_simple(b) for b in prog.branches]
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = f"Seq({p}, {out})"
    return out


class _Parser:
    def __init__(self, text: str, max_depth: int):
        self.text = text
        self.pos = 0
        self.max_depth = max_depth

    def error(self, message: str):
        raise ProgramSyntaxError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n":
            self.pos += 1

    def peek_word(self) -> str:
        i = self.pos
        while i < len(self.text) and (self.text[i].isalnum() or self.text[i] == "_"):
            i += 1
        return self.text[self.pos : i]

    def eat(self, token: str) -> None:
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            self.error(f"expected {token!r}")
        self.pos += len(token)

    def try_eat(self, token: str) -> bool:
        self.skip_ws()
        if self.text.startswith(token, self.pos):
            self.pos += len(token)
            return True
        return False

    def parse_program(self) -> ExtractorProgram:
        self.skip_ws()
        if self.peek_word() == "Seq":
            self.eat("Seq")
            self.eat("(")
            first = self.parse_simple()
            self.eat(",")
            rest = self.parse_program()
            self.eat(")")
            return ExtractorProgram((first,) + rest.branches)
        return ExtractorProgram((self.parse_simple(),))

    def parse_simple(self):
        self.skip_ws()
        word = self.peek_word()
        if word == "List":
            self.eat("List")
            self.eat("(")
            cells = [self.parse_cell()]
            while self.try_eat(","):
                cells.append(self.parse_cell())
            self.eat(")")
            return ListProg(tuple(cells))
        if word == "Filter":
            self.eat("Filter")
            self.eat("(")
            bind = self.parse_cell()
            self.eat(",")
            start = self.parse_cell()
            self.eat(",")
            end = self.parse_cell()
            self.eat(",")
            pred = self.parse_pred()
            self.eat(")")
            return FilterProg(bind, start, end, pred)
        return ListProg((self.parse_cell(),))

    def parse_cell(self):
        self.skip_ws()
        word = self.peek_word()
        if word == "x":
            self.eat("x")
            return X()
        if word != "GetCell":
            self.error("expected a cell program")
        self.eat("GetCell")
        self.eat("(")
        inner = self.parse_cell()
        self.eat(",")
        self.skip_ws()
        d = self.peek_word()
        if d not in DIRECTIONS:
            self.error("expected a direction u|d|l|r")
        self.eat(d)
        self.eat(",")
        k = self.parse_int()
        if k not in GETCELL_KS:
            self.error(f"k must be in {sorted(GETCELL_KS)}")
        self.eat(",")
        pred = self.parse_pred()
        self.eat(")")
        prog = GetCell(inner, d, k, pred)
        if prog.depth() > self.max_depth:
            self.error(f"GetCell nesting exceeds the depth cap ({self.max_depth})")
        return prog

    def parse_int(self) -> int:
        self.skip_ws()
        i = self.pos
        if i < len(self.text) and self.text[i] == "-":
            i += 1
        start_digits = i
        while i < len(self.text) and self.text[i].isdigit():
            i += 1
        if i == start_digits:
            self.error("expected an integer")
        value = int(self.text[self.pos : i])
        self.pos = i
        return value

    def parse_pred(self) -> Predicate:
        self.eat("\\y.\\z.")
        atoms = [self.parse_atom()]
        while self.try_eat("&&"):
            atoms.append(self.parse_atom())
        if any(a is None for a in atoms):
            if len(atoms) > 1:
                self.error("True cannot be part of a conjunction")
            return Predicate.true()
        return Predicate.of(*atoms)

    def parse_atom(self) -> Optional[Atom]:
        self.skip_ws()
        if self.peek_word() == "True":
            self.eat("True")
            return None
        self.eat("Val(")
        mapper, var = self.parse_mapper()
        self.eat(")")
        self.skip_ws()
        if self.try_eat("=="):
            eq = True
        elif self.try_eat("!="):
            eq = False
        else:
            self.error("expected == or !=")
        self.skip_ws()
        if self.text.startswith('"', self.pos):
            if var != "z":
                self.error("constant comparisons use the z variable")
            const = self.parse_string()
            return Atom(EQ_CONST if eq else NEQ_CONST, mapper, const)
        if not eq:
            self.error("cell-to-cell comparison only supports ==")
        self.eat("Val(")
        mapper_z, var_z = self.parse_mapper()
        self.eat(")")
        if var != "y" or var_z != "z":
            self.error("cell comparison must have the form Val(..y..) == Val(..z..)")
        if mapper_z != mapper:
            self.error("cell comparison must apply one mapper to both y and z")
        return Atom(EQ_CELLS, mapper)

    def parse_mapper(self):
        self.skip_ws()
        word = self.peek_word()
        if word in ("y", "z"):
            self.eat(word)
            return MAPPER_ID, word
        self.eat("(")
        self.skip_ws()
        if self.peek_word() == "row":
            self.eat("row")
            self.eat("(")
            var = self.peek_word()
            if var not in ("y", "z"):
                self.error("expected y or z")
            self.eat(var)
            self.eat(")")
            self.eat(",")
            k = self.parse_int()
            self.eat(")")
            return Mapper(SET_COL, k), var
        k = self.parse_int()
        self.eat(",")
        self.eat("col")
        self.eat("(")
        var = self.peek_word()
        if var not in ("y", "z"):
            self.error("expected y or z")
        self.eat(var)
        self.eat(")")
        self.eat(")")
        return Mapper(SET_ROW, k), var

    def parse_string(self) -> str:
        self.eat('"')
        out = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated string")
            ch = self.text[self.pos]
            if ch == "\\":
                if self.pos + 1 >= len(self.text):
                    self.error("bad escape")
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if ch == '"':
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1


def parse_program(text: str, max_depth: int = DEFAULT_MAX_DEPTH) -> ExtractorProgram:
    """Parse the concrete syntax; inverse of print_program on canonical ASTs."""
    p = _Parser(text, max_depth)
    prog = p.parse_program()
    p.skip_ws()
    if p.pos != len(text):
        p.error("trailing input")
    return prog
