"""FastAPI application exposing the bracket calculus as a compute service.

Validation failures map to 422, numeric failures (truncation tails,
divergent cascades, level windows too small) to 409.  Run with::

    uvicorn wavebracket.service.app:app
"""
from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import NUMERIC_ERRORS, VALIDATION_ERRORS, WavebracketError
from . import handlers as H
from . import schemas as S

app = FastAPI(
    title="wavebracket",
    description="Bracket products, module norms, filters and multiwavelet "
                "verification over lattice-translation systems.",
    version="0.1.0",
)


@app.exception_handler(WavebracketError)
async def _domain_error(request: Request, exc: WavebracketError):
    if isinstance(exc, NUMERIC_ERRORS):
        status = 409
    elif isinstance(exc, VALIDATION_ERRORS):
        status = 422
    else:
        status = 500
    return JSONResponse(
        status_code=status,
        content={"error": type(exc).__name__, "detail": str(exc)},
    )


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError):
    return JSONResponse(status_code=422,
                        content={"error": "ValueError", "detail": str(exc)})


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/lattice", response_model=S.LatticeResponse)
def lattice(req: S.LatticeRequest):
    return H.lattice_info(req)


@app.post("/lattice/embedding", response_model=S.EmbeddingResponse)
def lattice_embedding(req: S.EmbeddingRequest):
    return H.embedding_info(req)


@app.post("/bracket/time", response_model=S.BracketTimeResponse)
def bracket_time(req: S.BracketTimeRequest):
    return H.bracket_time_op(req)


@app.post("/bracket/fourier", response_model=S.BracketFourierResponse)
def bracket_fourier(req: S.BracketFourierRequest):
    return H.bracket_fourier_op(req)


@app.post("/bracket/bridge", response_model=S.BridgeResponse)
def bracket_bridge(req: S.BridgeRequest):
    return H.bridge_op(req)


@app.post("/filters/extract", response_model=S.FiltersExtractResponse)
def filters_extract(req: S.FiltersExtractRequest):
    return H.filters_extract_op(req)


@app.post("/cascade", response_model=S.CascadeResponse)
def cascade(req: S.CascadeRequest):
    return H.cascade_op(req)


@app.post("/norms/report", response_model=S.NormsResponse)
def norms_report(req: S.NormsRequest):
    return H.norms_op(req)


@app.post("/norms/sweep", response_model=S.NormSweepResponse)
def norms_sweep(req: S.NormSweepRequest):
    return H.norm_sweep_op(req)


@app.post("/norms/chain", response_model=S.NormChainResponse)
def norms_chain(req: S.NormChainRequest):
    return H.norm_chain_op(req)


@app.post("/verify", response_model=S.VerifyResponse)
def verify(req: S.VerifyRequest):
    return H.verify_op(req)
