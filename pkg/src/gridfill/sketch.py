"""Formula sketches: parsing, evaluation over hole bindings, table completion.

A sketch is an operator skeleton like SUM(?1, 1); each hole ?id is an
unknown cell-extraction program synthesized from its own examples. Filling
a table never sees other fills: every target cell is evaluated against the
original grid (snapshot semantics).
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from typing import Optional

from .fta import SynthTimeout
from .grid import CellRef, Grid, col_number
from .lang import eval_extractor, print_program
from .score import DEFAULT_SCORES, ScoreTable
from .synth import ExampleSet, MemoCache, SynthConfig, learn, prepare_base

FUNCTIONS = ("SUM", "AVG", "MAX", "MIN", "COUNT", "MINUS", "CONCAT", "ID")


class SketchSyntaxError(Exception):
    def __init__(self, message: str, pos: int):
        self.pos = pos
        super().__init__(f"{message} (at position {pos})")


class UnknownFunction(Exception):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown sketch function {name!r}")


class ArityError(Exception):
    pass


class SpecError(Exception):
    pass


class SketchEvalError(Exception):
    """Raised for NonNumeric / NotSingleton argument failures."""

    def __init__(self, kind: str, cell: Optional[CellRef], detail: str = ""):
        self.kind = kind
        self.cell = cell
        super().__init__(f"{kind}{f' at {cell}' if cell else ''}{': ' + detail if detail else ''}")


# ---------------------------------------------------------------------------
# Sketch AST and parser
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: str


@dataclass(frozen=True)
class Hole:
    id: int


@dataclass(frozen=True)
class Func:
    name: str
    args: tuple

    def __post_init__(self) -> None:
        if self.name not in FUNCTIONS:
            raise UnknownFunction(self.name)
        n = len(self.args)
        if self.name == "MINUS" and n != 2:
            raise ArityError("MINUS takes exactly 2 arguments")
        if self.name == "ID" and n != 1:
            raise ArityError("ID takes exactly 1 argument")
        if n < 1:
            raise ArityError(f"{self.name} needs at least one argument")


Sketch = "Const | Hole | Func"


def sketch_holes(s) -> list:
    if isinstance(s, Hole):
        return [s.id]
    if isinstance(s, Const):
        return []
    out = []
    for a in s.args:
        out.extend(sketch_holes(a))
    return sorted(set(out))


class _SketchParser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str):
        raise SketchSyntaxError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def parse(self):
        node = self.parse_term()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error("trailing input")
        return node

    def parse_term(self):
        self.skip_ws()
        if self.pos >= len(self.text):
            self.error("unexpected end of sketch")
        ch = self.text[self.pos]
        if ch == "?":
            self.pos += 1
            return Hole(self.parse_number())
        if ch == '"':
            return Const(self.parse_quoted())
        word = self.peek_word()
        if word and word.isupper() and self.looks_like_call(word):
            self.pos += len(word)
            self.skip_ws()
            self.expect("(")
            args = [self.parse_term()]
            self.skip_ws()
            while self.try_eat(","):
                args.append(self.parse_term())
            self.expect(")")
            if word not in FUNCTIONS:
                raise UnknownFunction(word)
            return Func(word, tuple(args))
        return Const(self.parse_bare())

    def looks_like_call(self, word: str) -> bool:
        i = self.pos + len(word)
        while i < len(self.text) and self.text[i].isspace():
            i += 1
        return i < len(self.text) and self.text[i] == "("

    def peek_word(self) -> str:
        i = self.pos
        while i < len(self.text) and (self.text[i].isalnum() or self.text[i] == "_"):
            i += 1
        return self.text[self.pos : i]

    def parse_number(self) -> int:
        i = self.pos
        while i < len(self.text) and self.text[i].isdigit():
            i += 1
        if i == self.pos:
            self.error("expected a hole number after ?")
        value = int(self.text[self.pos : i])
        if value < 1:
            self.error("hole ids are positive")
        self.pos = i
        return value

    def parse_quoted(self) -> str:
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated string")
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text):
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if ch == '"':
                self.pos += 1
                return "".join(out)
            out.append(ch)
            self.pos += 1

    def parse_bare(self) -> str:
        i = self.pos
        while i < len(self.text) and self.text[i] not in ",()":
            i += 1
        token = self.text[self.pos : i].strip()
        if not token:
            self.error("expected a term")
        self.pos = i
        return token

    def expect(self, token: str) -> None:
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


def parse_sketch(text: str):
    """Parse a sketch; a bare `?1` is sugar for ID(?1)."""
    return _SketchParser(text).parse()


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _parse_decimal(value: str, cell: Optional[CellRef]) -> Decimal:
    try:
        return Decimal(value)
    except InvalidOperation as e:
        raise SketchEvalError("NonNumeric", cell, value) from e


def format_number(d: Decimal) -> str:
    """Integers print without a decimal point, otherwise minimal digits."""
    if d == 0:
        return "0"
    return format(d.normalize(), "f")


class _Args:
    """Evaluated sketch argument: list of (value, source cell or None)."""

    def __init__(self, items):
        self.items = items

    def singleton(self):
        if len(self.items) != 1:
            raise SketchEvalError(
                "NotSingleton", self.items[0][1] if self.items else None,
                f"expected one value, got {len(self.items)}"
            )
        return self.items[0]


def _eval_node(node, bindings, g: Grid, c: CellRef):
    """Returns _Args, or None when any hole program fails."""
    if isinstance(node, Const):
        return _Args([(node.value, None)])
    if isinstance(node, Hole):
        prog = bindings.get(node.id)
        if prog is None:
            raise SpecError(f"no binding for hole ?{node.id}")
        cells = eval_extractor(prog, g, c)
        if cells is None:
            return None
        return _Args([(g.value_at(z), z) for z in cells])
    evaluated = []
    for a in node.args:
        got = _eval_node(a, bindings, g, c)
        if got is None:
            return None
        evaluated.append(got)
    return _Args([(_apply(node.name, node.args, evaluated), None)])


def _apply(name: str, arg_nodes, evaluated) -> str:
    flat = [item for arg in evaluated for item in arg.items]
    if name in ("SUM", "AVG", "MAX", "MIN"):
        numbers = [_parse_decimal(v, cell) for v, cell in flat]
        if not numbers:
            raise SketchEvalError("NotSingleton", None, f"{name} of nothing")
        if name == "SUM":
            return format_number(sum(numbers))
        if name == "AVG":
            return format_number(sum(numbers) / len(numbers))
        if name == "MAX":
            return format_number(max(numbers))
        return format_number(min(numbers))
    if name == "COUNT":
        # counts extracted cells; constants are not cells
        count = 0
        for arg, node in zip(evaluated, arg_nodes):
            count += sum(1 for _, cell in arg.items if cell is not None)
        return str(count)
    if name == "MINUS":
        a, ca = evaluated[0].singleton()
        b, cb = evaluated[1].singleton()
        return format_number(_parse_decimal(a, ca) - _parse_decimal(b, cb))
    if name == "CONCAT":
        return "".join(arg.singleton()[0] for arg in evaluated)
    if name == "ID":
        return evaluated[0].singleton()[0]
    raise UnknownFunction(name)


def eval_sketch(sketch, bindings: dict, g: Grid, c: CellRef) -> Optional[str]:
    """Value of the filled sketch at cell `c`; None when a hole fails."""
    got = _eval_node(sketch, bindings, g, c)
    if got is None:
        return None
    value, _ = got.singleton()
    return value


# ---------------------------------------------------------------------------
# Completion specs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Targets:
    kind: str  # "missing" | "cells" | "column"
    cells: tuple = ()
    col: int = 0

    def resolve(self, g: Grid) -> list:
        if self.kind == "missing":
            return g.missing_cells()
        if self.kind == "cells":
            return list(self.cells)
        if self.kind == "column":
            return [CellRef(r, self.col) for r in range(1, g.rows + 1)]
        raise SpecError(f"unknown target kind {self.kind!r}")


@dataclass(frozen=True)
class CompletionSpec:
    sketch: object
    sketch_text: str
    examples: dict  # hole id -> ExampleSet
    targets: Targets = Targets("missing")

    def validate_examples(self) -> None:
        for h in sketch_holes(self.sketch):
            ex = self.examples.get(h)
            if ex is None or not ex.positives:
                raise SpecError(f"hole ?{h} has no examples")


def _parse_cell(obj) -> CellRef:
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise SpecError(f"bad cell {obj!r}; expected [row, col]")
    row, col = obj
    if not isinstance(row, int) or row < 1:
        raise SpecError(f"bad row in {obj!r}")
    return CellRef(row, col_number(col))


def parse_spec(obj: dict, require_examples: bool = True) -> CompletionSpec:
    """Spec-file JSON: sketch text, per-hole examples (out null = negative), targets."""
    if not isinstance(obj, dict):
        raise SpecError("spec must be a JSON object")
    if "sketch" not in obj:
        raise SpecError('spec needs a "sketch"')
    sketch = parse_sketch(obj["sketch"])
    raw_examples = obj.get("examples", {})
    examples = {}
    for hole_key, items in raw_examples.items():
        try:
            hole = int(hole_key)
        except ValueError as e:
            raise SpecError(f"bad hole id {hole_key!r}") from e
        positives = []
        negatives = []
        for item in items:
            if "in" not in item:
                raise SpecError('each example needs an "in" cell')
            cell = _parse_cell(item["in"])
            out = item.get("out")
            if out is None:
                negatives.append(cell)
            else:
                if not isinstance(out, list) or not out:
                    raise SpecError('example "out" must be null or a nonempty list')
                positives.append((cell, tuple(_parse_cell(o) for o in out)))
        examples[hole] = ExampleSet(tuple(positives), tuple(negatives))
    targets = obj.get("targets", {"kind": "missing"})
    kind = targets.get("kind", "missing")
    if kind == "missing":
        t = Targets("missing")
    elif kind == "cells":
        t = Targets("cells", tuple(_parse_cell(c) for c in targets.get("cells", [])))
    elif kind == "column":
        t = Targets("column", col=col_number(targets["col"]))
    else:
        raise SpecError(f"unknown target kind {kind!r}")
    spec = CompletionSpec(sketch, obj["sketch"], examples, t)
    if require_examples:
        spec.validate_examples()
    return spec


@dataclass
class SynthesisReport:
    bindings: dict = field(default_factory=dict)  # hole -> ExtractorProgram
    failures: dict = field(default_factory=dict)  # hole -> "no program" | "timeout"
    theta: dict = field(default_factory=dict)
    elapsed_s: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures


def synthesize_spec(
    g: Grid,
    spec: CompletionSpec,
    cfg: SynthConfig = SynthConfig(),
    scores: ScoreTable = DEFAULT_SCORES,
    trace=None,
) -> SynthesisReport:
    """Run learn() once per hole; failures are reported per hole."""
    spec.validate_examples()
    report = SynthesisReport()
    base = prepare_base(g, cfg, scores)
    for hole in sketch_holes(spec.sketch):
        examples = spec.examples[hole]
        memo = MemoCache()
        start = time.monotonic()
        try:
            program = learn(g, examples, cfg, base=base, memo=memo,
                            scores=scores, trace=trace)
        except SynthTimeout:
            report.failures[hole] = "timeout"
            report.elapsed_s[hole] = time.monotonic() - start
            continue
        report.elapsed_s[hole] = time.monotonic() - start
        if program is None:
            report.failures[hole] = "no program"
        else:
            report.bindings[hole] = program
            report.theta[hole] = scores.program(program)
    return report


@dataclass
class FillOutcome:
    cell: CellRef
    value: Optional[str] = None
    error: Optional[str] = None

    @property
    def bottom(self) -> bool:
        return self.value is None and self.error is None


def complete_table(g: Grid, spec: CompletionSpec, bindings: dict):
    """Fill every target cell, reading only the original grid.

    Returns (new grid, list of per-cell outcomes). Cells whose evaluation
    fails or bottoms out keep their original value.
    """
    holes = sketch_holes(spec.sketch)
    missing = [h for h in holes if h not in bindings]
    if missing:
        raise SpecError(f"missing bindings for holes {missing}")
    outcomes = []
    out = g
    for cell in spec.targets.resolve(g):
        try:
            value = eval_sketch(spec.sketch, bindings, g, cell)
        except SketchEvalError as e:
            outcomes.append(FillOutcome(cell, error=f"{e.kind}: {e}"))
            continue
        if value is None:
            outcomes.append(FillOutcome(cell))
            continue
        outcomes.append(FillOutcome(cell, value=value))
        out = out.with_value(cell, value)
    return out, outcomes


def bindings_to_json(bindings: dict) -> dict:
    return {str(h): print_program(p) for h, p in bindings.items()}


def bindings_from_json(obj: dict, max_depth: int) -> dict:
    from .lang import parse_program

    out = {}
    for key, text in obj.items():
        out[int(key)] = parse_program(text, max_depth)
    return out
