"""Scaling/wavelet filter extraction, the cascade iteration and built-ins.

Filters are bracket coefficients: the scaling filter is the level-0 bracket
of the scaling function against its own coarse dilate, and wavelet filters
pair it with the wavelets.  The cascade iterates the refinement map
phi -> D(phi o h); on grids this is a fused gather on a fixed dyadic box so
the support never outgrows the array.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bracket import FilterSeq, bracket_fourier, bracket_time, module_action_time
from .errors import Divergence, UnknownName, WrongWaveletCount
from .lattice import DilationMatrix, identity_embedding, level_embedding, make_dilation
from .signal import (
    FREQUENCY,
    TIME,
    AnalyticSignal,
    GridSignal,
    Piece,
    TorusFunction,
    dilate,
    fourier_dilate,
)

INDEX_CONVENTION = (
    "character exp(-2 pi i <zeta, x>); dilation sqrt(m) f(D x); "
    "scaling filter taps land on {0, +1} for the 1-d Haar system"
)


@dataclass
class FilterBank:
    """Scaling filter h plus the m-1 wavelet filters for a dilation matrix."""

    h: FilterSeq
    g: list[FilterSeq]
    D: DilationMatrix
    index_convention: str = INDEX_CONVENTION

    def to_json(self) -> dict:
        return {
            "dilation": self.D.to_json(),
            "h": self.h.to_json(),
            "g": [gi.to_json() for gi in self.g],
            "index_convention": self.index_convention,
        }

    @staticmethod
    def from_json(obj: dict) -> "FilterBank":
        return FilterBank(
            h=FilterSeq.from_json(obj["h"]),
            g=[FilterSeq.from_json(x) for x in obj["g"]],
            D=DilationMatrix.from_json(obj["dilation"]),
            index_convention=obj.get("index_convention", INDEX_CONVENTION),
        )


def extract_filters(phi, psis, D: DilationMatrix, window=None) -> FilterBank:
    """h = [phi, D^{-1} phi]_0 and g^i = [phi, D^{-1} psi^i]_0."""
    if len(psis) != D.index_m - 1:
        raise WrongWaveletCount(
            f"need m - 1 = {D.index_m - 1} wavelets, got {len(psis)}")
    E0 = identity_embedding(D.dim)
    h = bracket_time(phi, dilate(phi, D, -1), E0, window)
    g = [bracket_time(phi, dilate(psi, D, -1), E0, window) for psi in psis]
    return FilterBank(h=h, g=g, D=D)


def extract_filters_fourier(phat, psihats, D: DilationMatrix,
                            M: int = 1024, trunc_R: int = 8):
    """Fourier-domain filters (h-hat, [g-hat...]) as torus functions."""
    if len(psihats) != D.index_m - 1:
        raise WrongWaveletCount(
            f"need m - 1 = {D.index_m - 1} wavelets, got {len(psihats)}")
    E0 = identity_embedding(D.dim)
    hhat = bracket_fourier(phat, fourier_dilate(phat, D, -1), E0, trunc_R, M)
    ghats = [
        bracket_fourier(phat, fourier_dilate(ph, D, -1), E0, trunc_R, M)
        for ph in psihats
    ]
    return hhat, ghats


# ---------------------------------------------------------------------------
# reconstruction residuals
# ---------------------------------------------------------------------------

def _freq_l2_residual(lhs, rhs, half_width: float, n_samples: int, dim: int) -> float:
    probe = GridSignal(np.full(dim, half_width),
                       np.zeros((n_samples,) * dim, dtype=complex), FREQUENCY)
    pts = probe.grid_points()
    diff = lhs.values_at(pts) - rhs.values_at(pts)
    cell = float(np.prod(probe.spacing))
    return math.sqrt(cell * float(np.sum(np.abs(diff) ** 2)))


def reconstruction_residual(phi, psis, bank, n: int = 0,
                            symbols: tuple | None = None,
                            eval_half_width: float = 8.0,
                            eval_samples: int = 4096) -> float:
    """max residual of D^{n-1} phi = D^n phi o_n h and the wavelet analogues.

    Analytic signals evaluate the level-n relation exactly.  Grid signals
    check the unitarily equivalent fixed-grid form t = D(phi o_0 a), which is
    one cascade step.  Frequency-only systems take torus symbols (h-hat and
    the g-hats) via `symbols` and integrate the pointwise relation
    Dhat^{n-1} t = Dhat^n phi o-hat_n a-hat over a band.
    """
    from .bracket import module_action_fourier

    if getattr(phi, "domain", None) == FREQUENCY:
        if symbols is None:
            raise WrongWaveletCount("frequency-only systems need torus symbols")
        hhat, ghats = symbols
        D = bank.D if bank is not None else make_dilation([[2]])
        pairs = [(phi, hhat)] + list(zip(psis, ghats))
        E = level_embedding(D, n)
        worst = 0.0
        for target, sym in pairs:
            lhs = fourier_dilate(target, D, n - 1)
            rhs = module_action_fourier(fourier_dilate(phi, D, n), sym, E)
            worst = max(worst, _freq_l2_residual(lhs, rhs, eval_half_width,
                                                 eval_samples, phi.dim))
        return worst

    pairs = [(phi, bank.h)] + list(zip(psis, bank.g))
    worst = 0.0
    for target, a in pairs:
        if isinstance(phi, AnalyticSignal):
            lhs = dilate(target, bank.D, n - 1)
            rhs = module_action_time(dilate(phi, bank.D, n), a,
                                     level_embedding(bank.D, n))
            worst = max(worst, (lhs - rhs).l2_norm())
        elif isinstance(phi, GridSignal):
            rhs = _cascade_step_grid(phi, a, bank.D)
            diff = target.values - rhs.values
            cell = float(np.prod(phi.spacing))
            worst = max(worst, math.sqrt(cell * float(np.sum(np.abs(diff) ** 2))))
        else:
            raise UnknownName(f"unsupported representation {type(phi).__name__}")
    return worst


# ---------------------------------------------------------------------------
# cascade iteration
# ---------------------------------------------------------------------------

@dataclass
class CascadeResult:
    final: object
    step_l2: list = field(default_factory=list)
    x0_norms: list = field(default_factory=list)
    ortho_dev: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0

    def to_json(self) -> dict:
        return {
            "iterations": self.iterations,
            "step_l2": self.step_l2,
            "x0_norms": self.x0_norms,
            "ortho_dev": self.ortho_dev,
            "converged": self.converged,
        }


def _cascade_step_grid(v: GridSignal, h: FilterSeq, D: DilationMatrix) -> GridSignal:
    """phi_{k+1}(x_j) = sqrt(m) sum_gamma h(gamma) phi_k(D x_j - gamma).

    Fixed-box fused gather; D x_j - gamma must land on the grid (dyadic
    boxes and integer matrices guarantee it).
    """
    pts = v.grid_points() @ D.matrix().T
    out = np.zeros(pts.shape[0], dtype=complex)
    spacing = v.spacing
    shape = v.values.shape
    for k, c in h.items():
        q = pts - np.asarray(k, dtype=float)
        idx_f = (q + v.half_width) / spacing
        idx = np.round(idx_f).astype(int)
        ok = np.all(np.abs(idx_f - idx) < 1e-9, axis=1)
        for axis in range(v.dim):
            ok &= (idx[:, axis] >= 0) & (idx[:, axis] < shape[axis])
        if not np.all(np.abs(idx_f - np.round(idx_f)) < 1e-9):
            raise ValueError("cascade step left the dyadic grid")
        contrib = np.zeros(pts.shape[0], dtype=complex)
        contrib[ok] = v.values[tuple(idx[ok].T)]
        out += c * contrib
    out *= math.sqrt(D.index_m)
    return v.with_values(out.reshape(shape))


def _self_bracket_dev(phi, D: DilationMatrix) -> float:
    """| [phi, phi]_0 - e_0 |_inf over taps."""
    b = bracket_time(phi, phi, identity_embedding(phi.dim))
    return b.max_abs_diff(FilterSeq.delta(phi.dim))


def cascade(h: FilterSeq, D: DilationMatrix, iters: int, init=None,
            half_width: float = 8.0, n_samples: int = 4096,
            track_norms: bool = True) -> CascadeResult:
    """Iterate the refinement map phi -> D(phi o_0 h).

    Raises Divergence when the step norm grows three times in a row.  The
    result records the l2 step sizes, X_0 norms (through the level-0 bracket)
    and the deviation of [phi, phi]_0 from the unit tap.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if init is None:
        init = AnalyticSignal.box([0.0] * h.dim, [1.0] * h.dim)
    phi = init
    E0 = identity_embedding(h.dim)
    result = CascadeResult(final=phi)
    growth = 0
    prev_step = None
    for _ in range(iters):
        if isinstance(phi, GridSignal):
            nxt = _cascade_step_grid(phi, h, D)
            diff = math.sqrt(float(np.prod(phi.spacing))
                             * float(np.sum(np.abs(nxt.values - phi.values) ** 2)))
        else:
            nxt = dilate(module_action_time(phi, h, E0), D, 1)
            diff = (nxt - phi).l2_norm()
        result.step_l2.append(diff)
        if track_norms:
            b = bracket_time(nxt, nxt, E0)
            result.x0_norms.append(math.sqrt(max(0.0,
                float(np.max(b.fourier_grid(256).values.real)))))
            result.ortho_dev.append(b.max_abs_diff(FilterSeq.delta(h.dim)))
        if prev_step is not None and diff > prev_step * (1 + 1e-12):
            growth += 1
            if growth >= 3:
                raise Divergence(
                    f"step norms grew for 3 consecutive iterations: {result.step_l2[-4:]}")
        else:
            growth = 0
        prev_step = diff
        phi = nxt
        result.iterations += 1
    result.final = phi
    result.converged = bool(result.step_l2[-1] < 1e-10)
    return result


# ---------------------------------------------------------------------------
# built-in systems
# ---------------------------------------------------------------------------

def db4_scaling_taps() -> FilterSeq:
    """Four-tap orthonormal scaling filter with two vanishing moments.

    Solved in closed form: with s = sum of taps = 2^{-1/2} * m^{1/2} = 2^{1/2}
    halved per tap pair, the linear constraints leave one unknown fixed by the
    shift-2 orthogonality quadratic, whose positive root brings in sqrt(3).
    """
    s = 1.0 / math.sqrt(2.0)  # h0 + h2 = h1 + h3
    disc = math.sqrt(s * s + 2 * s * s)  # from 2 h0^2 - s h0 - s^2/4 = 0
    h0 = (s + disc) / 4.0
    h1 = h0 + s / 2.0
    h2 = s - h0
    h3 = s - h1
    return FilterSeq(1, {(0,): h0, (1,): h1, (2,): h2, (3,): h3})


def qmf_partner(h: FilterSeq) -> FilterSeq:
    """g(i) = (-1)^i conj(h(L-1-i)) for a causal 1-d filter of length L."""
    support = h.support()
    lo, hi = int(support.min()), int(support.max())
    L = hi - lo + 1
    taps = {}
    for i in range(L):
        taps[(lo + i,)] = (-1) ** i * np.conj(h.get([lo + L - 1 - i]))
    return FilterSeq(1, taps)


def _haar_pair_1d():
    phi = AnalyticSignal.box([0.0], [1.0])
    psi = AnalyticSignal([
        Piece([0.0], [0.5], np.array([1.0 + 0j])),
        Piece([0.5], [1.0], np.array([-1.0 + 0j])),
    ])
    return phi, psi


def _tensor_signal(parts: list[AnalyticSignal]) -> AnalyticSignal:
    """Tensor product of 1-d analytic signals (piecewise outer products)."""
    pieces = None
    for part in parts:
        if pieces is None:
            pieces = [Piece(p.lo, p.hi, p.coeffs, p.freq) for p in part.pieces]
            continue
        merged = []
        for a in pieces:
            for b in part.pieces:
                lo = np.concatenate([a.lo, b.lo])
                hi = np.concatenate([a.hi, b.hi])
                coeffs = np.multiply.outer(a.coeffs, b.coeffs)
                freq = None
                if a.freq is not None or b.freq is not None:
                    fa = a.freq if a.freq is not None else np.zeros(a.lo.size)
                    fb = b.freq if b.freq is not None else np.zeros(b.lo.size)
                    freq = np.concatenate([fa, fb])
                merged.append(Piece(lo, hi, coeffs, freq))
        pieces = merged
    return AnalyticSignal(pieces, TIME)


@dataclass
class BuiltinSystem:
    name: str
    D: DilationMatrix
    phi: object
    psis: list
    bank: FilterBank | None
    domain: str
    hhat: TorusFunction | None = None
    ghats: list | None = None


def builtin(name: str, dim: int = 1) -> BuiltinSystem:
    """Construct a named system: haar (any dim, D = 2I), shannon, db4 (1-d).

    Shannon lives in the frequency domain only (its bank is the pair of
    torus symbols); requesting its time-domain form elsewhere raises
    Unsupported.
    """
    name = name.lower()
    if name == "haar":
        D = make_dilation((2 * np.eye(dim, dtype=int)).tolist())
        phi1, psi1 = _haar_pair_1d()
        if dim == 1:
            phi, psis = phi1, [psi1]
        else:
            phi = _tensor_signal([phi1] * dim)
            psis = []
            for mask in range(1, 1 << dim):
                parts = [psi1 if (mask >> i) & 1 else phi1 for i in range(dim)]
                psis.append(_tensor_signal(parts))
        bank = extract_filters(phi, psis, D)
        return BuiltinSystem("haar", D, phi, psis, bank, TIME)
    if name == "shannon":
        if dim != 1:
            raise UnknownName("shannon is provided in one dimension")
        D = make_dilation([[2]])
        phat = AnalyticSignal.box([-0.5], [0.5], domain=FREQUENCY)
        # paper phase e^{i xi / 2} = e^{2 pi i (1/(4 pi)) xi}; support kept
        # half-open [lo, hi), which differs from the printed (1/2, 1] only on
        # a null set and tiles the line without gaps
        w = 1.0 / (4.0 * math.pi)
        psihat = AnalyticSignal([
            Piece([-1.0], [-0.5], np.array([1.0 + 0j]), freq=[w]),
            Piece([0.5], [1.0], np.array([1.0 + 0j]), freq=[w]),
        ], FREQUENCY)
        hhat, ghats = extract_filters_fourier(phat, [psihat], D)
        return BuiltinSystem("shannon", D, phat, [psihat], None, FREQUENCY,
                             hhat=hhat, ghats=ghats)
    if name == "db4":
        if dim != 1:
            raise UnknownName("db4 is provided in one dimension")
        D = make_dilation([[2]])
        h = db4_scaling_taps()
        g = qmf_partner(h)
        bank = FilterBank(h=h, g=[g], D=D)
        x = np.arange(4096) / 512.0 - 4.0
        init = GridSignal(4.0, ((x >= 0) & (x < 1)).astype(complex))
        res = cascade(h, D, 12, init=init, track_norms=False)
        phi = res.final
        psi = _cascade_step_grid(phi, g, D)
        return BuiltinSystem("db4", D, phi, [psi], bank, TIME)
    raise UnknownName(f"unknown builtin {name!r}")
