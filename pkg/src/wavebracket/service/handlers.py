"""Service-layer handlers: pydantic request in, pydantic response out.

The FastAPI app routes to these functions and the CLI calls them in-process,
so both front ends share one implementation and one wire format.
"""
from __future__ import annotations

import os

import numpy as np

from .. import io as wio
from ..bracket import (
    FilterSeq,
    bracket_fourier,
    bracket_time,
    bridge_check,
)
from ..errors import UnknownName, WrongWaveletCount
from ..filters import (
    FilterBank,
    builtin,
    cascade,
    extract_filters,
    extract_filters_fourier,
)
from ..lattice import (
    DilationMatrix,
    Embedding,
    character_defect,
    coset_reps,
    dual_fiber_offsets,
    level_embedding,
    make_dilation,
)
from ..modnorm import norm_chain_check, norm_sweep, refinement_residual, x_norm, y_norm
from ..signal import GridSignal
from ..verify import (
    haar_test_corpus,
    shannon_test_corpus,
    verify_system,
)
from . import schemas as S


def _threads() -> str | None:
    return os.environ.get("BRACKET_MODULE_THREADS")


def _provenance(**kw) -> S.Provenance:
    return S.Provenance(threads=_threads(), **kw)


def _dilation(spec: S.DilationSpec) -> DilationMatrix:
    return make_dilation(spec.entries)


def _embedding(spec: S.EmbeddingSpec | None, dim: int) -> Embedding:
    from ..lattice import identity_embedding

    if spec is None:
        return identity_embedding(dim)
    if spec.matrix is not None:
        return Embedding(np.asarray(spec.matrix, dtype=float))
    if spec.dilation is not None:
        return level_embedding(_dilation(spec.dilation), spec.level)
    return identity_embedding(dim)


def _signal(model: S.SignalModel):
    return wio.signal_from_json(model.to_json_obj())


def _seq_model(a: FilterSeq) -> S.FilterSeqModel:
    return S.FilterSeqModel(**a.to_json())


def _torus_model(tf) -> S.TorusModel:
    return S.TorusModel(**wio.torus_to_json(tf))


def _bank_model(bank: FilterBank) -> S.FilterBankModel:
    return S.FilterBankModel(
        dilation=S.DilationSpec(entries=bank.D.entries.tolist()),
        h=_seq_model(bank.h),
        g=[_seq_model(gi) for gi in bank.g],
        index_convention=bank.index_convention,
    )


def lattice_info(req: S.LatticeRequest) -> S.LatticeResponse:
    D = _dilation(req.dilation)
    reps = coset_reps(D)
    offs = dual_fiber_offsets(D)
    return S.LatticeResponse(
        dim=D.dim,
        index_m=D.index_m,
        det_sign=D.det_sign,
        coset_reps=[r.tolist() for r in reps],
        dual_fiber_offsets=[o.tolist() for o in offs],
        character_defect=character_defect(level_embedding(D, 1)),
    )


def embedding_info(req: S.EmbeddingRequest) -> S.EmbeddingResponse:
    D = _dilation(req.dilation)
    E = level_embedding(D, req.level)
    return S.EmbeddingResponse(
        dim=E.dim,
        matrix=E.matrix_A.tolist(),
        ann_basis=E.ann_basis.tolist(),
        det=E.det_A,
    )


def bracket_time_op(req: S.BracketTimeRequest) -> S.BracketTimeResponse:
    f = _signal(req.f)
    g = _signal(req.g)
    E = _embedding(req.embedding, f.dim)
    seq = bracket_time(f, g, E, req.window)
    return S.BracketTimeResponse(
        bracket=_seq_model(seq),
        provenance=_provenance(window=req.window),
    )


def bracket_fourier_op(req: S.BracketFourierRequest) -> S.BracketFourierResponse:
    p = _signal(req.p)
    q = _signal(req.q)
    E = _embedding(req.embedding, p.dim)
    tf = bracket_fourier(p, q, E, req.trunc_R, req.grid_M, req.tail_tol)
    return S.BracketFourierResponse(
        torus=_torus_model(tf),
        provenance=_provenance(grid_M=req.grid_M, trunc_R=req.trunc_R,
                               tolerances={"tail_tol": req.tail_tol}),
    )


def bridge_op(req: S.BridgeRequest) -> S.BridgeResponse:
    f = _signal(req.f)
    g = _signal(req.g)
    E = _embedding(req.embedding, f.dim)
    dev = bridge_check(f, g, E, req.window, req.grid_M, req.grid_N, req.trunc_R)
    return S.BridgeResponse(
        deviation=dev,
        provenance=_provenance(grid_M=req.grid_M, grid_N=req.grid_N,
                               trunc_R=req.trunc_R, window=req.window),
    )


def filters_extract_op(req: S.FiltersExtractRequest) -> S.FiltersExtractResponse:
    if req.builtin:
        sys = builtin(req.builtin, req.dim)
        if req.fourier or sys.bank is None:
            if sys.hhat is not None:
                hhat, ghats = sys.hhat, sys.ghats
            else:
                from ..signal import to_frequency

                hhat, ghats = extract_filters_fourier(
                    to_frequency(sys.phi), [to_frequency(x) for x in sys.psis],
                    sys.D, req.grid_M, req.trunc_R)
            return S.FiltersExtractResponse(
                bank=_bank_model(sys.bank) if sys.bank else None,
                h_hat=_torus_model(hhat),
                g_hats=[_torus_model(g) for g in ghats],
                provenance=_provenance(grid_M=req.grid_M, trunc_R=req.trunc_R),
            )
        return S.FiltersExtractResponse(
            bank=_bank_model(sys.bank),
            provenance=_provenance(window=req.window),
        )
    if req.phi is None or req.psis is None or req.dilation is None:
        raise WrongWaveletCount("need builtin, or phi + psis + dilation")
    phi = _signal(req.phi)
    psis = [_signal(m) for m in req.psis]
    D = _dilation(req.dilation)
    if req.fourier:
        hhat, ghats = extract_filters_fourier(phi, psis, D, req.grid_M, req.trunc_R)
        return S.FiltersExtractResponse(
            h_hat=_torus_model(hhat),
            g_hats=[_torus_model(g) for g in ghats],
            provenance=_provenance(grid_M=req.grid_M, trunc_R=req.trunc_R),
        )
    bank = extract_filters(phi, psis, D, req.window)
    return S.FiltersExtractResponse(
        bank=_bank_model(bank),
        provenance=_provenance(window=req.window),
    )


def cascade_op(req: S.CascadeRequest) -> S.CascadeResponse:
    if req.builtin:
        sys = builtin(req.builtin, 1)
        if sys.bank is None:
            raise UnknownName(f"{req.builtin} has no time-domain filter bank")
        h, D = sys.bank.h, sys.D
    elif req.h is not None and req.dilation is not None:
        h = FilterSeq.from_json(req.h.model_dump())
        D = _dilation(req.dilation)
    else:
        raise UnknownName("need builtin, or h + dilation")
    init = None
    if req.grid:
        n = req.n_samples
        x = -req.half_width + np.arange(n) * (2 * req.half_width / n)
        init = GridSignal(req.half_width,
                          ((x >= 0) & (x < 1)).astype(complex))
    res = cascade(h, D, req.iters, init=init)
    return S.CascadeResponse(
        iterations=res.iterations,
        step_l2=res.step_l2,
        x0_norms=res.x0_norms,
        ortho_dev=res.ortho_dev,
        converged=res.converged,
        provenance=_provenance(grid_N=req.n_samples if req.grid else None),
    )


def cascade_final_signal(req: S.CascadeRequest):
    """Final cascade iterate as a signal (CLI --save-final helper)."""
    if req.builtin:
        sys = builtin(req.builtin, 1)
        h, D = sys.bank.h, sys.D
    else:
        h = FilterSeq.from_json(req.h.model_dump())
        D = _dilation(req.dilation)
    init = None
    if req.grid:
        n = req.n_samples
        x = -req.half_width + np.arange(n) * (2 * req.half_width / n)
        init = GridSignal(req.half_width, ((x >= 0) & (x < 1)).astype(complex))
    return cascade(h, D, req.iters, init=init, track_norms=False).final


def norms_op(req: S.NormsRequest) -> S.NormsResponse:
    sig = _signal(req.signal)
    D = _dilation(req.dilation)
    rep = x_norm(sig, D, req.level, req.grid_M, req.trunc_R, req.tail_tol)
    return S.NormsResponse(
        x_norm=rep.x_norm,
        y_norm=y_norm(sig, D, req.level, req.grid_M, req.trunc_R, req.tail_tol),
        l2_norm=rep.l2_norm,
        level=req.level,
        tail_estimate=rep.tail_estimate,
        jump_estimate=rep.jump_estimate,
        complete=rep.complete,
        provenance=_provenance(grid_M=req.grid_M, trunc_R=req.trunc_R,
                               tolerances={"tail_tol": req.tail_tol}),
    )


def norm_sweep_op(req: S.NormSweepRequest) -> S.NormSweepResponse:
    sig = _signal(req.signal)
    D = _dilation(req.dilation)
    rows = norm_sweep(sig, D, req.levels, req.grid_M, req.trunc_R)
    return S.NormSweepResponse(
        rows=rows,
        provenance=_provenance(grid_M=req.grid_M, trunc_R=req.trunc_R),
    )


def norm_chain_op(req: S.NormChainRequest) -> S.NormChainResponse:
    sig = _signal(req.signal)
    D = _dilation(req.dilation)
    cr = norm_chain_check(sig, D, req.level, req.grid_M, req.trunc_R)
    rr = refinement_residual(sig, D, req.level, req.grid_M, req.trunc_R)
    return S.NormChainResponse(
        lower_ok=cr.lower_ok,
        upper_ok=cr.upper_ok,
        sandwich=[cr.lower_value, cr.mid_value, cr.upper_value],
        refinement_residual=rr,
        provenance=_provenance(grid_M=req.grid_M, trunc_R=req.trunc_R),
    )


def verify_op(req: S.VerifyRequest) -> S.VerifyResponse:
    if req.builtin:
        sys = builtin(req.builtin, req.dim)
        psis, D = sys.psis, sys.D
        if req.builtin == "shannon":
            corpus, labels = shannon_test_corpus(req.seed)
            recon_range = req.recon_range or (0, 3)
            M = req.grid_M or 1024
        else:
            corpus, labels = haar_test_corpus(req.seed)
            recon_range = req.recon_range or (-6, 6)
            M = req.grid_M or 256
    else:
        if not req.psis or req.dilation is None:
            raise WrongWaveletCount("need builtin, or psis + dilation")
        psis = [_signal(m) for m in req.psis]
        D = _dilation(req.dilation)
        corpus, labels = ([], [])
        recon_range = req.recon_range or (-2, 2)
        M = req.grid_M or 256
    if not req.with_completeness:
        corpus, labels = ([], [])
    report = verify_system(psis, D, corpus, req.n_range, recon_range, M,
                           req.trunc_R, req.tol_ortho, req.tol_recon,
                           labels=labels)
    return S.VerifyResponse(
        verdict=report.verdict,
        ortho_residual=report.ortho_residual,
        ortho_tail=report.ortho_tail,
        ortho_matrix=[e.to_json() for e in report.ortho_entries],
        reconstruction=[e.to_json() for e in report.recon_entries],
        provenance=_provenance(grid_M=M, trunc_R=req.trunc_R, seed=req.seed,
                               tolerances={"ortho": req.tol_ortho,
                                           "recon": req.tol_recon}),
    )
