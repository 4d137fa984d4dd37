"""Stateless HTTP JSON service: synthesize, apply, health.

Each request carries the full table and examples; there are no sessions.
Responses are deterministic for identical request bodies.
"""

from __future__ import annotations

import time
from pathlib import Path
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .grid import GridError, table_from_json
from .lang import ProgramSyntaxError, print_program
from .preds import PredicateCapExceeded
from .sketch import (
    ArityError,
    SketchSyntaxError,
    SpecError,
    UnknownFunction,
    bindings_from_json,
    complete_table,
    parse_spec,
    synthesize_spec,
)
from .synth import ExampleError, SynthConfig

MAX_TABLE_BYTES = 1_000_000

_CONFIG_KEYS = (
    "max_conj", "max_predicates", "depth", "timeout_s",
    "max_examples", "enable_filter", "enable_list",
)


class TableBody(BaseModel):
    rows: list


class SynthesizeRequest(BaseModel):
    table: TableBody
    sketch: str
    examples: dict
    targets: Optional[dict] = None
    config: dict = Field(default_factory=dict)


class ApplyRequest(BaseModel):
    table: TableBody
    sketch: str
    programs: dict
    targets: Optional[dict] = None
    config: dict = Field(default_factory=dict)


def _config(overrides: dict) -> SynthConfig:
    unknown = set(overrides) - set(_CONFIG_KEYS)
    if unknown:
        raise SpecError(f"unknown config keys {sorted(unknown)}")
    return SynthConfig().merged(overrides)


def _spec_obj(sketch: str, examples: dict, targets: Optional[dict]) -> dict:
    obj: dict[str, Any] = {"sketch": sketch, "examples": examples}
    if targets is not None:
        obj["targets"] = targets
    return obj


def _fills_json(outcomes) -> list:
    fills = []
    for o in outcomes:
        entry: dict[str, Any] = {"cell": [o.cell.row, o.cell.col]}
        if o.error is not None:
            entry["error"] = o.error
        elif o.value is None:
            entry["bottom"] = True
        else:
            entry["value"] = o.value
        fills.append(entry)
    return fills


def create_app(frontend_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="gridfill", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(SpecError)
    @app.exception_handler(GridError)
    @app.exception_handler(SketchSyntaxError)
    @app.exception_handler(UnknownFunction)
    @app.exception_handler(ArityError)
    @app.exception_handler(ExampleError)
    @app.exception_handler(ProgramSyntaxError)
    @app.exception_handler(PredicateCapExceeded)
    async def unprocessable(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={"detail": f"{type(exc).__name__}: {exc}"},
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/api/synthesize")
    def synthesize(body: SynthesizeRequest) -> JSONResponse:
        if len(str(body.table.rows).encode()) > MAX_TABLE_BYTES:
            return JSONResponse(status_code=413, content={"detail": "table too large"})
        start = time.monotonic()
        g = table_from_json({"rows": body.table.rows})
        spec = parse_spec(_spec_obj(body.sketch, body.examples, body.targets))
        cfg = _config(body.config)
        report = synthesize_spec(g, spec, cfg)
        if "timeout" in report.failures.values():
            status = {
                str(h): report.failures.get(h, "ok") for h in
                sorted(set(report.failures) | set(report.bindings))
            }
            return JSONResponse(
                status_code=408,
                content={"detail": {"timeout_s": cfg.timeout_s, "holes": status}},
            )
        if report.failures:
            return JSONResponse(
                status_code=422,
                content={
                    "detail": {
                        "holes": {str(h): r for h, r in report.failures.items()}
                    }
                },
            )
        filled, outcomes = complete_table(g, spec, report.bindings)
        holes = {
            str(h): {
                "program": print_program(p),
                "score": report.theta[h],
                "branches": len(p.branches),
            }
            for h, p in report.bindings.items()
        }
        return JSONResponse(
            content={
                "holes": holes,
                "fills": _fills_json(outcomes),
                "timing_ms": round((time.monotonic() - start) * 1000, 3),
            }
        )

    @app.post("/api/apply")
    def apply(body: ApplyRequest) -> JSONResponse:
        start = time.monotonic()
        g = table_from_json({"rows": body.table.rows})
        spec = parse_spec(_spec_obj(body.sketch, {}, body.targets),
                          require_examples=False)
        cfg = _config(body.config)
        bindings = bindings_from_json(body.programs, cfg.depth)
        filled, outcomes = complete_table(g, spec, bindings)
        return JSONResponse(
            content={
                "fills": _fills_json(outcomes),
                "timing_ms": round((time.monotonic() - start) * 1000, 3),
            }
        )

    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="ui")

    return app
