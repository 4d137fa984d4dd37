"""Programming-by-example completion of tabular data.

Synthesizes cell-extraction programs from a formula sketch plus
input/output cell examples and applies them to fill missing or derived
cells. See the README for the CLI, HTTP service, and library surface.
"""

__version__ = "0.1.0"

from .grid import CellRef, Grid, parse_table, serialize_table  # noqa: F401
from .lang import (  # noqa: F401
    ExtractorProgram,
    eval_extractor,
    parse_program,
    print_program,
)
from .sketch import (  # noqa: F401
    CompletionSpec,
    complete_table,
    parse_sketch,
    parse_spec,
    synthesize_spec,
)
from .synth import ExampleSet, SynthConfig, learn  # noqa: F401
