"""
Scheme evaluation API (FastAPI)

Endpoints:
- GET  /v1/schemes
- POST /v1/runs/evaluate

Maps simulator errors to HTTP statuses:
- 200 OK: run finished
- 400 Bad Request: invalid config, scheme or argument
- 422 Unprocessable Entity: learned scheme without a usable checkpoint
- 500 Internal Server Error: anything else
"""

from dataclasses import asdict
from typing import Any, Dict, Optional

import uvicorn
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .core.config import SimConfig
from .core.errors import AssignmentError, ConfigError, DomainError, MissingCheckpointError
from .harness.runner import run_scheme, summarize
from .harness.schemes import SCHEME_POLICIES, ExperimentSpec

app = FastAPI(title="THz multi-UAV simulator API", version="0.1.0")


def classify_status(error: Optional[BaseException]) -> int:
    if error is None:
        return 200
    if isinstance(error, MissingCheckpointError):
        return 422
    if isinstance(error, (ConfigError, DomainError, AssignmentError)):
        return 400
    return 500


def _evaluate(body: Dict[str, Any]) -> Dict[str, Any]:
    if not isinstance(body, dict) or "scheme" not in body:
        raise ConfigError("Request body needs a 'scheme'")
    config = SimConfig.from_dict({"network": body.get("network") or {}})
    spec = ExperimentSpec(
        scheme=body["scheme"],
        seeds=body.get("seeds") or [0],
        network=config.network,
        n_slots=body.get("n_slots"),
        checkpoint=body.get("checkpoint"),
    )
    run = run_scheme(spec)
    out = {
        "scheme": spec.scheme.value,
        "seeds": spec.seeds,
        "records": [r.to_dict() for r in run.records],
        "summary": [asdict(row) for row in summarize(run.records)],
    }
    if body.get("include_traces"):
        out["traces"] = run.traces
    if body.get("include_layouts"):
        out["layouts"] = run.layouts
    return out


@app.get("/v1/schemes")
def list_schemes():
    schemes = [
        {"name": scheme.value, "trajectory": trajectory, "power": power}
        for scheme, (trajectory, power) in SCHEME_POLICIES.items()
    ]
    return {"schemes": schemes}


@app.post("/v1/runs/evaluate")
def evaluate(body: Dict[str, Any]):
    try:
        result = _evaluate(body)
    except Exception as e:
        return JSONResponse(status_code=classify_status(e),
                            content={"error": type(e).__name__, "detail": str(e)})
    return JSONResponse(status_code=200, content=result)


if __name__ == "__main__":
    uvicorn.run("src.api:app", host="0.0.0.0", port=8000, reload=False)
