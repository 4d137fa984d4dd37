"""Table data model: immutable 2-D grids of strings with a `?` missing marker.

Coordinates are 1-based (row 1 = top, col 1 = left) everywhere in the public
API; spec files may use spreadsheet column letters (A, B, ...) which are
normalized to numbers at parse time.
"""

from __future__ import annotations

import csv as _csv
import io
import json
from dataclasses import dataclass
from typing import NamedTuple, Optional

MISSING = "?"

DIRECTIONS = ("u", "d", "l", "r")


class GridError(Exception):
    pass


class RaggedRows(GridError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row} has a different number of cells")


class EmptyTable(GridError):
    def __init__(self) -> None:
        super().__init__("table has no cells")


class CellRef(NamedTuple):
    row: int
    col: int

    def __str__(self) -> str:
        return f"({self.row},{self.col})"


def col_number(col: "int | str") -> int:
    """Normalize a column given as a number or spreadsheet letters (A=1)."""
    if isinstance(col, int):
        return col
    s = col.strip().upper()
    if not s or not s.isalpha():
        raise GridError(f"bad column {col!r}")
    n = 0
    for ch in s:
        n = n * 26 + (ord(ch) - ord("A") + 1)
    return n


@dataclass(frozen=True)
class Grid:
    """Dense row-major table of strings. Immutable; safe to share."""

    rows: int
    cols: int
    values: tuple  # tuple[str, ...], len == rows * cols

    def __post_init__(self) -> None:
        if self.rows <= 0 or self.cols <= 0:
            raise EmptyTable()
        if len(self.values) != self.rows * self.cols:
            raise GridError("values length does not match dimensions")

    @staticmethod
    def from_rows(rows) -> "Grid":
        rows = [list(r) for r in rows]
        if not rows or not rows[0]:
            raise EmptyTable()
        width = len(rows[0])
        flat = []
        for i, r in enumerate(rows):
            if len(r) != width:
                raise RaggedRows(i + 1)
            flat.extend(str(v) for v in r)
        return Grid(len(rows), width, tuple(flat))

    def in_range(self, c: CellRef) -> bool:
        return 1 <= c.row <= self.rows and 1 <= c.col <= self.cols

    def value_at(self, c: CellRef) -> Optional[str]:
        """Value of cell `c`, or None when `c` is out of range.

        Out-of-range is a return variant, never an exception.
        """
        if not self.in_range(c):
            return None
        return self.values[(c.row - 1) * self.cols + (c.col - 1)]

    def line_range(self, a: CellRef, b: CellRef) -> Optional[list]:
        """Cells from `a` toward `b` inclusive, when they share a row or column.

        Returns None when the endpoints are not on one line.
        """
        if a.row == b.row:
            step = 1 if b.col >= a.col else -1
            return [CellRef(a.row, c) for c in range(a.col, b.col + step, step)]
        if a.col == b.col:
            step = 1 if b.row >= a.row else -1
            return [CellRef(r, a.col) for r in range(a.row, b.row + step, step)]
        return None

    def cells(self):
        for r in range(1, self.rows + 1):
            for c in range(1, self.cols + 1):
                yield CellRef(r, c)

    def missing_cells(self):
        return [c for c in self.cells() if self.value_at(c) == MISSING]

    def distinct_values(self) -> list:
        seen = dict.fromkeys(self.values)
        return list(seen)

    def with_value(self, c: CellRef, value: str) -> "Grid":
        idx = (c.row - 1) * self.cols + (c.col - 1)
        vals = list(self.values)
        vals[idx] = value
        return Grid(self.rows, self.cols, tuple(vals))

    def row_values(self, r: int) -> list:
        return [self.values[(r - 1) * self.cols + c] for c in range(self.cols)]


def parse_table(text: str, format: str = "csv") -> Grid:
    """Parse a table from CSV (no header, cells trimmed) or JSON `{"rows": [[...]]}`."""
    if format == "csv":
        stripped = text.strip("\n")
        if not stripped.strip():
            raise EmptyTable()
        reader = _csv.reader(io.StringIO(stripped))
        rows = [[cell.strip() for cell in row] for row in reader if row]
        return Grid.from_rows(rows)
    if format == "json":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise GridError(f"bad JSON table: {e}") from e
        return table_from_json(obj)
    raise GridError(f"unknown table format {format!r}")


def table_from_json(obj) -> Grid:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise GridError('JSON table must be an object with a "rows" key')
    rows = obj["rows"]
    if not isinstance(rows, list) or not rows:
        raise EmptyTable()
    out = []
    for r in rows:
        if not isinstance(r, list):
            raise GridError("each row must be a list")
        cells = []
        for v in r:
            if isinstance(v, str):
                cells.append(v)
            elif isinstance(v, (int, bool)) and not isinstance(v, bool):
                cells.append(str(v))
            else:
                raise GridError(f"table cells must be strings, got {v!r}")
        out.append(cells)
    return Grid.from_rows(out)


def serialize_table(g: Grid, format: str = "csv") -> str:
    if format == "csv":
        buf = io.StringIO()
        writer = _csv.writer(buf, lineterminator="\n")
        for r in range(1, g.rows + 1):
            writer.writerow(g.row_values(r))
        return buf.getvalue()
    if format == "json":
        rows = [g.row_values(r) for r in range(1, g.rows + 1)]
        return json.dumps({"rows": rows})
    raise GridError(f"unknown table format {format!r}")


def remap_missing(g: Grid, token: str) -> Grid:
    """Map every cell equal to `token` to the `?` marker (CLI ingestion aid)."""
    return Grid(g.rows, g.cols, tuple(MISSING if v == token else v for v in g.values))
