"""Pydantic request/response models for the service and CLI wire format."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field


class DilationSpec(BaseModel):
    entries: list[list[int]]


class EmbeddingSpec(BaseModel):
    matrix: Optional[list[list[float]]] = None
    dilation: Optional[DilationSpec] = None
    level: int = 0


class PieceModel(BaseModel):
    lo: list[float]
    hi: list[float]
    shape: list[int]
    coeffs: list[list[float]]  # [re, im] pairs, C order
    freq: Optional[list[float]] = None


class SignalModel(BaseModel):
    kind: Literal["analytic", "grid", "builtin"]
    domain: Literal["time", "frequency"] = "time"
    dim: int = 1
    pieces: Optional[list[PieceModel]] = None
    half_width: Optional[list[float]] = None
    n_samples: Optional[list[int]] = None
    values: Optional[list[list[float]]] = None
    subsample_shift: bool = False
    name: Optional[str] = None
    part: Optional[str] = None

    def to_json_obj(self) -> dict:
        return self.model_dump(exclude_none=True)


class FilterTap(BaseModel):
    index: list[int]
    re: float
    im: float


class FilterSeqModel(BaseModel):
    dim: int
    taps: list[FilterTap]


class TorusModel(BaseModel):
    kind: Literal["torus"] = "torus"
    dim: int
    n_samples: list[int]
    values: list[list[float]]
    tail_estimate: float = 0.0
    complete: bool = True
    trunc_R: int = 0
    level: Optional[int] = None


class Provenance(BaseModel):
    grid_M: Optional[int] = None
    grid_N: Optional[int] = None
    trunc_R: Optional[int] = None
    window: Optional[int] = None
    tolerances: dict = Field(default_factory=dict)
    seed: int = 0
    threads: Optional[str] = None


class LatticeRequest(BaseModel):
    dilation: DilationSpec


class LatticeResponse(BaseModel):
    dim: int
    index_m: int
    det_sign: int
    coset_reps: list[list[int]]
    dual_fiber_offsets: list[list[float]]
    character_defect: float


class EmbeddingRequest(BaseModel):
    dilation: DilationSpec
    level: int = 0


class EmbeddingResponse(BaseModel):
    dim: int
    matrix: list[list[float]]
    ann_basis: list[list[float]]
    det: float


class BracketTimeRequest(BaseModel):
    f: SignalModel
    g: SignalModel
    embedding: Optional[EmbeddingSpec] = None
    window: Optional[int] = None


class BracketTimeResponse(BaseModel):
    bracket: FilterSeqModel
    provenance: Provenance


class BracketFourierRequest(BaseModel):
    p: SignalModel
    q: SignalModel
    embedding: Optional[EmbeddingSpec] = None
    trunc_R: int = 8
    grid_M: int = 256
    tail_tol: Optional[float] = None


class BracketFourierResponse(BaseModel):
    torus: TorusModel
    provenance: Provenance


class BridgeRequest(BaseModel):
    f: SignalModel
    g: SignalModel
    embedding: Optional[EmbeddingSpec] = None
    window: Optional[int] = None
    grid_M: int = 256
    grid_N: int = 1024
    trunc_R: int = 8


class BridgeResponse(BaseModel):
    deviation: float
    provenance: Provenance


class FiltersExtractRequest(BaseModel):
    builtin: Optional[str] = None
    dim: int = 1
    phi: Optional[SignalModel] = None
    psis: Optional[list[SignalModel]] = None
    dilation: Optional[DilationSpec] = None
    window: Optional[int] = None
    fourier: bool = False
    grid_M: int = 1024
    trunc_R: int = 8


class FilterBankModel(BaseModel):
    dilation: DilationSpec
    h: FilterSeqModel
    g: list[FilterSeqModel]
    index_convention: str


class FiltersExtractResponse(BaseModel):
    bank: Optional[FilterBankModel] = None
    h_hat: Optional[TorusModel] = None
    g_hats: Optional[list[TorusModel]] = None
    provenance: Provenance


class CascadeRequest(BaseModel):
    builtin: Optional[str] = None
    h: Optional[FilterSeqModel] = None
    dilation: Optional[DilationSpec] = None
    iters: int = 12
    grid: bool = True
    half_width: float = 4.0
    n_samples: int = 4096


class CascadeResponse(BaseModel):
    iterations: int
    step_l2: list[float]
    x0_norms: list[float]
    ortho_dev: list[float]
    converged: bool
    provenance: Provenance


class NormsRequest(BaseModel):
    signal: SignalModel
    dilation: DilationSpec
    level: int = 0
    grid_M: int = 256
    trunc_R: int = 8
    tail_tol: Optional[float] = None


class NormsResponse(BaseModel):
    x_norm: float
    y_norm: float
    l2_norm: float
    level: int
    tail_estimate: float
    jump_estimate: float
    complete: bool
    provenance: Provenance


class NormSweepRequest(BaseModel):
    signal: SignalModel
    dilation: DilationSpec
    levels: list[int]
    grid_M: int = 256
    trunc_R: int = 8


class NormSweepResponse(BaseModel):
    rows: list[dict]
    provenance: Provenance


class NormChainRequest(BaseModel):
    signal: SignalModel
    dilation: DilationSpec
    level: int = 1
    grid_M: int = 256
    trunc_R: int = 8


class NormChainResponse(BaseModel):
    lower_ok: bool
    upper_ok: bool
    sandwich: list[float]
    refinement_residual: float
    provenance: Provenance


class VerifyRequest(BaseModel):
    builtin: Optional[str] = None
    dim: int = 1
    psis: Optional[list[SignalModel]] = None
    dilation: Optional[DilationSpec] = None
    n_range: tuple[int, int] = (-2, 2)
    recon_range: Optional[tuple[int, int]] = None
    grid_M: Optional[int] = None
    trunc_R: int = 8
    tol_ortho: float = 1e-5
    tol_recon: float = 1e-3
    seed: int = 0
    with_completeness: bool = True


class VerifyResponse(BaseModel):
    verdict: str
    ortho_residual: float
    ortho_tail: float
    ortho_matrix: list[dict]
    reconstruction: list[dict]
    provenance: Provenance
