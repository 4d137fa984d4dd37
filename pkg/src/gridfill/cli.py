"""Command-line entry points: synth, apply, eval, serve, oracle.

Exit codes: 0 success, 1 synthesis failed / suite unsolved, 2 usage or IO
error. `DACEX_LOG` (off|info|debug) controls tracing on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from .fta import SynthTimeout
from .grid import GridError, parse_table, remap_missing, serialize_table
from .harness import EnumBounds, enumerate_programs, run_suite
from .lang import print_program, print_simple
from .preds import PredicateCapExceeded, build_predicates
from .sketch import (
    ArityError,
    SketchSyntaxError,
    SpecError,
    UnknownFunction,
    bindings_from_json,
    bindings_to_json,
    complete_table,
    parse_spec,
    synthesize_spec,
)
from .synth import ExampleError, SynthConfig

log = logging.getLogger("gridfill")


def _setup_logging() -> None:
    level = os.environ.get("DACEX_LOG", "off").lower()
    if level == "off":
        logging.disable(logging.CRITICAL)
        return
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if level == "debug" else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )


def _load_table(path: str, na: str | None):
    text = Path(path).read_text()
    fmt = "json" if path.endswith(".json") else "csv"
    g = parse_table(text, fmt)
    if na is not None:
        g = remap_missing(g, na)
    return g, fmt


def _config_from_args(args) -> SynthConfig:
    cfg = SynthConfig()
    overrides = {}
    if getattr(args, "no_filter", False):
        overrides["enable_filter"] = False
    if getattr(args, "max_conj", None) is not None:
        overrides["max_conj"] = args.max_conj
    if getattr(args, "depth", None) is not None:
        overrides["depth"] = args.depth
    if getattr(args, "timeout", None) is not None:
        overrides["timeout_s"] = args.timeout
    if getattr(args, "max_predicates", None) is not None:
        overrides["max_predicates"] = args.max_predicates
    return cfg.merged(overrides)


def cmd_synth(args) -> int:
    g, _ = _load_table(args.table, args.na)
    spec = parse_spec(json.loads(Path(args.spec).read_text()))
    cfg = _config_from_args(args)
    report = synthesize_spec(g, spec, cfg)
    for hole, reason in sorted(report.failures.items()):
        if reason == "timeout":
            print(f"?{hole}: timeout", file=sys.stderr)
        else:
            print(f"?{hole}: no program found", file=sys.stderr)
    for hole in sorted(report.bindings):
        text = print_program(report.bindings[hole])
        print(f"?{hole}\ttheta={report.theta[hole]:.6g}\t{text}")
    if report.failures:
        return 1
    if args.out:
        Path(args.out).write_text(
            json.dumps(bindings_to_json(report.bindings), indent=2) + "\n"
        )
    return 0


def cmd_apply(args) -> int:
    g, fmt = _load_table(args.table, args.na)
    spec = parse_spec(json.loads(Path(args.spec).read_text()))
    cfg = _config_from_args(args)
    bindings = bindings_from_json(
        json.loads(Path(args.programs).read_text()), cfg.depth
    )
    filled, outcomes = complete_table(g, spec, bindings)
    Path(args.out).write_text(serialize_table(filled, fmt))
    bad = [o for o in outcomes if o.value is None]
    for o in bad:
        what = o.error if o.error else "bottom"
        print(f"{o.cell}: {what}", file=sys.stderr)
    return 0


def cmd_eval(args) -> int:
    cfg = SynthConfig()
    report = run_suite(args.fixtures, cfg, seed=args.seed)
    print(report.format_table())
    if args.json:
        Path(args.json).write_text(json.dumps(report.to_json(), indent=2) + "\n")
    return 0 if report.solved == len(report.reports) else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .svc import create_app

    # serve the built UI when present (index.html loads ./dist/main.js)
    ui = Path("frontend")
    built = (ui / "dist").is_dir() and (ui / "index.html").is_file()
    app = create_app(frontend_dir=str(ui) if built else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def cmd_oracle(args) -> int:
    g, _ = _load_table(args.table, args.na)
    universe = build_predicates(g, max_conj=1)
    if args.preds == "true":
        subset = universe.predicates[:1]
    else:
        subset = universe.atoms
    bounds = EnumBounds(
        max_size=args.max_size, max_depth=args.depth or 2,
        predicates=tuple(subset), t=args.t,
    )
    count = 0
    for prog in enumerate_programs(g, bounds):
        print(print_simple(prog))
        count += 1
        if args.limit and count >= args.limit:
            break
    log.info("enumerated %d programs", count)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridfill",
        description="Synthesize and apply cell-extraction programs over tables",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="synthesize programs for every sketch hole")
    p.add_argument("--table", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--out")
    p.add_argument("--no-filter", action="store_true")
    p.add_argument("--max-conj", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--timeout", type=float)
    p.add_argument("--max-predicates", type=int)
    p.add_argument("--na", help="input token to treat as the missing marker")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("apply", help="apply synthesized programs to a table")
    p.add_argument("--table", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--programs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--na")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("eval", help="run the fixture suite")
    p.add_argument("--fixtures", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--jobs", type=int, default=1, help="accepted; fixtures run sequentially")
    p.add_argument("--json", help="write the machine-readable report here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("oracle", help="dump the bounded program enumeration")
    p.add_argument("--table", required=True)
    p.add_argument("--max-size", type=int, default=3)
    p.add_argument("--depth", type=int)
    p.add_argument("--t", type=int, default=1)
    p.add_argument("--preds", choices=("true", "atoms"), default="true")
    p.add_argument("--limit", type=int)
    p.add_argument("--na")
    p.set_defaults(func=cmd_oracle)

    return parser


def run(argv) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except SynthTimeout:
        print("error: synthesis timed out", file=sys.stderr)
        return 1
    except (
        GridError,
        SpecError,
        ExampleError,
        SketchSyntaxError,
        UnknownFunction,
        ArityError,
        PredicateCapExceeded,
        FileNotFoundError,
        json.JSONDecodeError,
    ) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
