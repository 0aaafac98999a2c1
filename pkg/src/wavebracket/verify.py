"""Multiwavelet verification: orthonormality and reconstruction residuals.

A finite family is accepted when (a) every level bracket of dilated family
members matches delta_{ij} delta_{mn} * 1 on the torus grid and (b) the
truncated two-index expansion reconstructs a corpus of test signals in l2.
Both checks are desk-scaled versions of the exact characterization: finite
level windows with explicit tail accounting, and a verdict that means "no
violation detected at this resolution", never a proof.

Time-analytic families go through exact time-domain brackets; frequency-only
families (Shannon type) through complete lattice sums of their compact
spectra.  Either way the residuals are limited by arithmetic, not by an
unquantified discretization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bracket import (
    DEFAULT_TORUS_M,
    DEFAULT_TRUNC_R,
    bracket_fourier_values,
    bracket_level,
    module_action_level,
)
from .errors import RangeTooSmall
from .lattice import DilationMatrix, level_embedding, wrap_torus
from .signal import (
    FREQUENCY,
    TIME,
    AnalyticSignal,
    GridSignal,
    TorusFunction,
    dilate,
    fourier_dilate,
    to_frequency,
)

DEFAULT_TOL_ORTHO = 1e-5
DEFAULT_TOL_RECON = 1e-3
JUMP_THRESHOLD = 0.25
JUMP_RADIUS = 2


@dataclass
class OrthoEntry:
    i: int
    j: int
    m: int
    n: int
    residual: float
    tail: float
    excluded: int

    def row(self) -> list:
        return [self.i, self.j, self.m, self.n, self.residual, self.tail, self.excluded]

    def to_json(self) -> dict:
        return {"i": self.i, "j": self.j, "m": self.m, "n": self.n,
                "residual": self.residual, "tail": self.tail,
                "excluded": self.excluded}


@dataclass
class ReconEntry:
    label: str
    residual: float
    level_energy: dict
    boundary_energy: float
    partial_residuals: list

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "residual": self.residual,
            "level_energy": {str(k): v for k, v in self.level_energy.items()},
            "boundary_energy": self.boundary_energy,
            "partial_residuals": self.partial_residuals,
        }


@dataclass
class VerifyReport:
    ortho_residual: float
    ortho_tail: float
    ortho_entries: list = field(default_factory=list)
    recon_entries: list = field(default_factory=list)
    n_range: tuple = (-2, 2)
    recon_range: tuple = (-6, 6)
    grid_M: int = DEFAULT_TORUS_M
    trunc_R: int = DEFAULT_TRUNC_R
    tol_ortho: float = DEFAULT_TOL_ORTHO
    tol_recon: float = DEFAULT_TOL_RECON
    verdict: str = "inconclusive"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "ortho_residual": self.ortho_residual,
            "ortho_tail": self.ortho_tail,
            "n_range": list(self.n_range),
            "recon_range": list(self.recon_range),
            "grid_M": self.grid_M,
            "trunc_R": self.trunc_R,
            "tolerances": {"ortho": self.tol_ortho, "recon": self.tol_recon},
            "ortho_matrix": [e.to_json() for e in self.ortho_entries],
            "reconstruction": [e.to_json() for e in self.recon_entries],
        }

    def csv_rows(self) -> list:
        header = ["i", "j", "m", "n", "residual", "tail", "excluded_samples"]
        return [header] + [e.row() for e in self.ortho_entries]


def _masked_max(dev: np.ndarray, exclude_jumps: bool) -> tuple[float, int]:
    """Grid max of |dev| excluding samples near detected discontinuities."""
    mags = np.abs(dev)
    if not exclude_jumps:
        return float(mags.max()), 0
    mask = np.zeros(dev.shape, dtype=bool)
    for axis in range(dev.ndim):
        diff = np.abs(np.diff(dev, axis=axis))
        jumpy = diff > JUMP_THRESHOLD
        if not np.any(jumpy):
            continue
        idx = np.nonzero(jumpy)
        for off in range(-JUMP_RADIUS, JUMP_RADIUS + 2):
            shifted = list(idx)
            shifted[axis] = np.clip(idx[axis] + off, 0, dev.shape[axis] - 1)
            mask[tuple(shifted)] = True
    excluded = int(mask.sum())
    if excluded >= mags.size:
        return float(mags.max()), excluded
    return float(mags[~mask].max()), excluded


def verify_orthonormality(psis, D: DilationMatrix, n_range=(-2, 2),
                          M: int = DEFAULT_TORUS_M, trunc_R: int = DEFAULT_TRUNC_R,
                          exclude_jumps: bool = True):
    """Grid-max deviation of [[Dhat^n psi_i, Dhat^m psi_j]]_n from dd*1.

    Returns (worst_residual, worst_tail, entries).
    """
    levels = range(n_range[0], n_range[1] + 1)
    probe = TorusFunction(np.zeros((M,) * psis[0].dim, dtype=complex))
    zeta = probe.grid_points()
    time_route = all(
        isinstance(psi, AnalyticSignal) and psi.domain == TIME for psi in psis
    )
    entries = []
    worst = 0.0
    worst_tail = 0.0
    for i, pi in enumerate(psis):
        for j, pj in enumerate(psis):
            for n in levels:
                for m in levels:
                    if time_route:
                        seq = bracket_level(dilate(pi, D, n), dilate(pj, D, m), D, n)
                        vals = seq.fourier_at(zeta)
                        tail = 0.0
                    else:
                        p = fourier_dilate(to_frequency(pi), D, n)
                        q = fourier_dilate(to_frequency(pj), D, m)
                        vals, tail, _, _ = bracket_fourier_values(
                            p, q, level_embedding(D, n), zeta, trunc_R)
                    target = 1.0 if (i == j and m == n) else 0.0
                    dev = (vals - target).reshape(probe.values.shape)
                    residual, excluded = _masked_max(dev, exclude_jumps)
                    entries.append(OrthoEntry(i, j, m, n, residual, tail, excluded))
                    worst = max(worst, residual)
                    worst_tail = max(worst_tail, tail)
    return worst, worst_tail, entries


def _l2_of(sig) -> float:
    return float(sig.l2_norm())


def verify_completeness(psis, D: DilationMatrix, test_signals,
                        n_range=(-6, 6), M: int = DEFAULT_TORUS_M,
                        trunc_R: int = 32, eps_energy: float = 1e-3,
                        eps_capture: float = 0.5,
                        eval_half_width: float = 8.0, eval_samples: int = 4096,
                        labels=None, raise_on_tail: bool = True):
    """l2 residual of the truncated expansion per test signal.

    Time-analytic systems expand in the time domain (unitarily equivalent to
    the frequency statement, machine exact); frequency-only systems integrate
    the pointwise expansion over an evaluation band.  M is accepted for
    interface parity with the torus-grid operations; the expansion symbols
    are evaluated at exact reduced points, so no M-grid enters the residual.
    Raises RangeTooSmall
    when the window visibly misses the signal: either a level just outside
    the window carries more than eps_energy * |f|^2, or the window as a whole
    captures less than eps_capture of the energy (precondition on test
    signals, independent of system quality).
    """
    levels = list(range(n_range[0], n_range[1] + 1))
    time_route = all(
        isinstance(s, AnalyticSignal) and s.domain == TIME
        for s in list(psis) + list(test_signals)
    )
    entries = []
    for idx, f in enumerate(test_signals):
        label = labels[idx] if labels else f"signal{idx}"
        if time_route:
            entry = _complete_time(psis, D, f, levels, label)
        else:
            entry = _complete_frequency(psis, D, f, levels, label,
                                        eval_half_width, eval_samples, trunc_R)
        fnorm2 = _l2_of(f) ** 2
        if raise_on_tail and fnorm2 > 0:
            if entry.boundary_energy > eps_energy * fnorm2:
                raise RangeTooSmall(
                    f"level energy just outside the window is "
                    f"{entry.boundary_energy:.3e} > {eps_energy:.1e} * |f|^2 "
                    f"for {label}; widen n_range")
            captured = sum(entry.level_energy.values())
            if captured < eps_capture * fnorm2:
                raise RangeTooSmall(
                    f"window captures {captured:.3e} of |f|^2 = {fnorm2:.3e} "
                    f"for {label}; widen n_range")
        entries.append(entry)
    return entries


def _time_level_energy(psis, D, f, n) -> float:
    return sum(
        sum(abs(c) ** 2 for _, c in bracket_level(dilate(psi, D, n), f, D, n).items())
        for psi in psis
    )


def _complete_time(psis, D, f, levels, label) -> ReconEntry:
    running = None
    level_energy = {}
    partials = []
    for n in levels:
        e_n = 0.0
        for psi in psis:
            base = dilate(psi, D, n)
            coeffs = bracket_level(base, f, D, n)
            e_n += sum(abs(c) ** 2 for _, c in coeffs.items())
            term = module_action_level(base, coeffs, D, n)
            running = term if running is None else running + term
        level_energy[n] = e_n
        partials.append((f - running).l2_norm() if running is not None else _l2_of(f))
    residual = partials[-1]
    # energy the window misses: the two levels just outside it
    boundary = max(_time_level_energy(psis, D, f, levels[0] - 1),
                   _time_level_energy(psis, D, f, levels[-1] + 1))
    return ReconEntry(label, residual, level_energy, boundary, partials)


def _complete_frequency(psis, D, f, levels, label,
                        eval_half_width, eval_samples,
                        trunc_R: int = 32) -> ReconEntry:
    probe = GridSignal(np.full(f.dim, eval_half_width),
                       np.zeros((eval_samples,) * f.dim, dtype=complex), FREQUENCY)
    pts = probe.grid_points()
    cell = float(np.prod(probe.spacing))
    fhat = to_frequency(f)
    f_vals = fhat.values_at(pts)
    running = np.zeros_like(f_vals)
    level_energy = {}
    partials = []
    def level_terms(n):
        E = level_embedding(D, n)
        total = np.zeros_like(f_vals)
        for psi in psis:
            p = fourier_dilate(to_frequency(psi), D, n)
            reduced = wrap_torus(E.dual_map(pts))
            symbol, _, _, _ = bracket_fourier_values(p, fhat, E, reduced,
                                                     trunc_R=trunc_R)
            total = total + p.values_at(pts) * symbol
        return total

    for n in levels:
        term = level_terms(n)
        level_energy[n] = cell * float(np.sum(np.abs(term) ** 2))
        running = running + term
        partials.append(math.sqrt(cell * float(np.sum(np.abs(f_vals - running) ** 2))))
    residual = partials[-1]
    # energy the window misses: the two levels just outside it
    boundary = max(
        cell * float(np.sum(np.abs(level_terms(levels[0] - 1)) ** 2)),
        cell * float(np.sum(np.abs(level_terms(levels[-1] + 1)) ** 2)),
    )
    return ReconEntry(label, residual, level_energy, boundary, partials)


def classify(ortho_residual: float, ortho_tail: float, recon_entries,
             tol_ortho: float = DEFAULT_TOL_ORTHO,
             tol_recon: float = DEFAULT_TOL_RECON,
             eps_energy_abs: float | None = None) -> str:
    """pass / fail / inconclusive from the residual families.

    fail when any residual exceeds its tolerance; inconclusive when residuals
    pass but truncation tails are large enough to hide a violation.
    """
    if not recon_entries and ortho_residual == float("inf"):
        return "fail"
    if ortho_residual > tol_ortho:
        return "fail"
    if any(e.residual > tol_recon for e in recon_entries):
        return "fail"
    if ortho_tail > tol_ortho:
        return "inconclusive"
    if any(e.boundary_energy > max(e.residual ** 2, tol_recon ** 2)
           for e in recon_entries):
        return "inconclusive"
    return "pass"


def verify_system(psis, D: DilationMatrix, test_signals=(), n_range=(-2, 2),
                  recon_range=(-6, 6), M: int = DEFAULT_TORUS_M,
                  trunc_R: int = DEFAULT_TRUNC_R,
                  tol_ortho: float = DEFAULT_TOL_ORTHO,
                  tol_recon: float = DEFAULT_TOL_RECON,
                  eval_half_width: float = 8.0, eval_samples: int = 4096,
                  labels=None) -> VerifyReport:
    """Run both residual families and classify."""
    if not psis:
        return VerifyReport(
            ortho_residual=float("inf"), ortho_tail=0.0,
            verdict="fail", n_range=n_range, recon_range=recon_range,
            grid_M=M, trunc_R=trunc_R, tol_ortho=tol_ortho, tol_recon=tol_recon)
    worst, worst_tail, entries = verify_orthonormality(psis, D, n_range, M, trunc_R)
    recon = []
    if test_signals:
        recon = verify_completeness(psis, D, test_signals, recon_range, M,
                                    eval_half_width=eval_half_width,
                                    eval_samples=eval_samples, labels=labels)
    verdict = classify(worst, worst_tail, recon, tol_ortho, tol_recon)
    return VerifyReport(
        ortho_residual=worst, ortho_tail=worst_tail, ortho_entries=entries,
        recon_entries=recon, n_range=n_range, recon_range=recon_range,
        grid_M=M, trunc_R=trunc_R, tol_ortho=tol_ortho, tol_recon=tol_recon,
        verdict=verdict)


# ---------------------------------------------------------------------------
# standard test corpora
# ---------------------------------------------------------------------------

def haar_test_corpus(seed: int = 0, count: int = 2):
    """Zero-mean dyadic step functions: structured pair plus seeded randoms.

    Random members are supported in [0, 1) with zero mean, so every coarse
    scaling projection vanishes exactly and the level window carries all of
    the energy; the structured pair is the single coarse wavelet itself.
    """
    base = AnalyticSignal.box([0.0], [1.0]) - AnalyticSignal.box([1.0], [2.0])
    signals = [base]
    labels = ["unit-step-pair"]
    rng = np.random.default_rng(seed)
    from .signal import Piece
    for k in range(count):
        vals = rng.standard_normal(16)
        vals -= vals.mean()
        pieces = [
            Piece([i / 16.0], [(i + 1) / 16.0], np.array([v + 0j]))
            for i, v in enumerate(vals) if v != 0
        ]
        signals.append(AnalyticSignal(pieces, TIME))
        labels.append(f"random-steps-{k}")
    return signals, labels


def shannon_test_corpus(seed: int = 0, count: int = 2, band=(0.5, 4.0)):
    """Frequency bumps supported in +-[band]: the levels tile them exactly."""
    from .signal import Piece
    lo, hi = band
    signals = [AnalyticSignal([
        Piece([lo], [hi], np.array([1.0 + 0j, 0.25 + 0j])),
        Piece([-hi], [-lo], np.array([1.0 + 0j, 0.0 + 0j])),
    ], FREQUENCY)]
    labels = ["annulus-bump"]
    rng = np.random.default_rng(seed)
    for k in range(count):
        pieces = []
        edges = np.sort(rng.uniform(lo, hi, 3))
        spans = [(lo, edges[0]), (edges[0], edges[1]), (edges[1], hi)]
        for a, b in spans:
            if b - a < 1e-3:
                continue
            c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            pieces.append(Piece([a], [b], c.astype(complex)))
            pieces.append(Piece([-b], [-a],
                                (rng.standard_normal(2)
                                 + 1j * rng.standard_normal(2)).astype(complex)))
        signals.append(AnalyticSignal(pieces, FREQUENCY))
        labels.append(f"random-annulus-{k}")
    return signals, labels
