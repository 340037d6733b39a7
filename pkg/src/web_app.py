import threading
import time
import uuid
from pathlib import Path
from typing import Any, Optional, Union

from fastapi import FastAPI, HTTPException
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .cli import evector_payload, info_payload, positive_limit, rank_payload
from .complex_core import SimplicialComplex, from_facets
from .config import AppConfig, load_config
from .model_matrix import ModelSpec, RankMismatchError
from .rank_engine import FAMILIES, family
from .run_logger import log_step
from .sweep import SweepCase, exhaustive_specs, random_specs, run_specs

RUNS: dict[str, dict[str, Any]] = {}
RUN_LOCK = threading.Lock()
RUN_TIMEOUT_SECONDS = 600


class ModelRequest(BaseModel):
    m: Optional[int] = None
    facets: Optional[list[list[int]]] = None
    family: Optional[str] = None
    levels: Optional[list[int]] = None
    r: Optional[int] = None
    verify: bool = False
    size_cap: Optional[int] = None
    max_entries: Optional[int] = None


class SweepRequest(BaseModel):
    max_m: int = 3
    min_m: Optional[int] = None
    level_set: list[int] = [2, 3]
    random_count: int = 0
    random_m: list[int] = [4, 5]
    seed: Optional[int] = None
    size_cap: Optional[int] = None
    max_entries: Optional[int] = None


def create_app() -> FastAPI:
    app = FastAPI(title="hlrank")

    @app.get("/api/families")
    def list_families():
        return JSONResponse({name: {"min_m": minimum} for name, (_, minimum) in FAMILIES.items()})

    @app.post("/api/info")
    def info(payload: ModelRequest):
        complex_ = _resolve_complex(payload)
        return JSONResponse(info_payload(complex_))

    @app.post("/api/evector")
    def evector(payload: ModelRequest):
        complex_ = _resolve_complex(payload)
        try:
            return JSONResponse(evector_payload(complex_, payload.r))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.post("/api/rank")
    def rank(payload: ModelRequest):
        config = load_config()
        spec = _resolve_spec(payload)
        size_cap, max_entries = _resolve_limits(payload, config)
        try:
            return JSONResponse(
                rank_payload(spec, verify=payload.verify, size_cap=size_cap, max_entries=max_entries)
            )
        except RankMismatchError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc

    @app.post("/api/sweep")
    def sweep(payload: SweepRequest, mode: str = "async"):
        config = load_config()
        seed = payload.seed if payload.seed is not None else config.seed
        size_cap, max_entries = _resolve_limits(payload, config)
        try:
            specs = exhaustive_specs(payload.max_m, payload.level_set, min_m=payload.min_m) if payload.max_m else []
            if payload.random_count:
                specs.extend(random_specs(payload.random_count, payload.random_m, payload.level_set, seed))
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        if not specs:
            raise HTTPException(status_code=400, detail="Nothing to check")

        output_dir = _new_output_dir(config)
        if mode == "sync":
            try:
                summary = run_specs(
                    specs, size_cap=size_cap, max_workers=config.max_workers, max_entries=max_entries
                )
            except RankMismatchError as exc:
                raise HTTPException(status_code=500, detail=str(exc)) from exc
            result = {**summary.to_dict(), "seed": seed}
            log_step(output_dir, "sweep_summary", result)
            return JSONResponse(result)

        run_id = str(uuid.uuid4())
        with RUN_LOCK:
            RUNS[run_id] = {
                "status": "running",
                "total": len(specs),
                "done": 0,
                "summary": None,
                "meta": {"output_dir": str(output_dir), "seed": seed},
                "started_at": time.time(),
                "last_update": time.time(),
            }

        thread = threading.Thread(
            target=_run_sweep_stream,
            args=(run_id, specs, size_cap, max_entries, config.max_workers, output_dir, seed),
            daemon=True,
        )
        thread.start()
        return JSONResponse({"run_id": run_id})

    @app.get("/api/status")
    def run_status(run_id: str):
        with RUN_LOCK:
            data = RUNS.get(run_id)
        if not data:
            raise HTTPException(status_code=404, detail="Run not found")
        if data.get("status") == "running":
            last_update = data.get("last_update", data.get("started_at", time.time()))
            if time.time() - last_update > RUN_TIMEOUT_SECONDS:
                _fail_run(run_id, "sweep timed out")
                with RUN_LOCK:
                    data = RUNS.get(run_id)
        return JSONResponse(data)

    return app


def _resolve_complex(payload: ModelRequest) -> SimplicialComplex:
    if (payload.facets is None) == (payload.family is None):
        raise HTTPException(status_code=400, detail="exactly one of 'facets' or 'family' is required")
    if payload.m is None:
        raise HTTPException(status_code=400, detail="'m' is required")
    try:
        if payload.family is not None:
            return family(payload.family, payload.m)
        return from_facets(payload.m, payload.facets)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _resolve_spec(payload: ModelRequest) -> ModelSpec:
    complex_ = _resolve_complex(payload)
    if payload.r is not None:
        levels = (payload.r,) * complex_.vertex_count
    elif payload.levels is not None:
        levels = tuple(payload.levels)
    else:
        raise HTTPException(status_code=400, detail="'levels' or 'r' is required")
    try:
        return ModelSpec(complex=complex_, levels=levels)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _resolve_limits(payload: Union[ModelRequest, SweepRequest], config: AppConfig) -> tuple[int, int]:
    try:
        return (
            positive_limit(payload.size_cap, config.size_cap, "size_cap"),
            positive_limit(payload.max_entries, config.max_entries, "max_entries"),
        )
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc


def _new_output_dir(config: AppConfig) -> Path:
    return config.output_root / f"sweep_{time.time_ns()}_{uuid.uuid4().hex[:8]}"


def _run_sweep_stream(
    run_id: str,
    specs: list[ModelSpec],
    size_cap: int,
    max_entries: int,
    max_workers: int,
    output_dir: Path,
    seed: int,
) -> None:
    try:
        log_step(output_dir, "sweep_start", {"cases": len(specs), "seed": seed})

        def _on_case(case: SweepCase) -> None:
            log_step(output_dir, "case", case.to_dict())
            _update_run(run_id)

        summary = run_specs(
            specs, size_cap=size_cap, max_workers=max_workers, on_case=_on_case, max_entries=max_entries
        )
        result = {**summary.to_dict(), "seed": seed}
        log_step(output_dir, "sweep_summary", result)
        _finalize_run(run_id, result)
    except Exception as exc:
        _fail_run(run_id, str(exc))


def _update_run(run_id: str) -> None:
    with RUN_LOCK:
        run = RUNS.get(run_id)
        if not run:
            return
        run["done"] += 1
        run["last_update"] = time.time()


def _finalize_run(run_id: str, summary: dict[str, Any]) -> None:
    with RUN_LOCK:
        run = RUNS.get(run_id)
        if not run:
            return
        run["status"] = "completed"
        run["summary"] = summary
        run["last_update"] = time.time()


def _fail_run(run_id: str, error: str) -> None:
    with RUN_LOCK:
        run = RUNS.get(run_id)
        if not run:
            return
        run["status"] = "failed"
        run["error"] = error
        run["last_update"] = time.time()


app = create_app()
