"""Bracket products and module actions, in time and frequency domain.

The time-domain bracket of two signals against an embedding theta is the
sequence of cross-correlation values on the embedded lattice::

    [f, g](gamma) = int conj(f(x - A gamma)) g(x) dx

and the frequency-domain bracket is its unitary image, the periodization of
conj(p) q over the annihilator lattice scaled by 1/|det A|.  Analytic signal
pairs integrate in closed form; grid pairs use lag sums on the common grid
(exact for cell-aligned piecewise-constant data, spectrally accurate for
smooth data).  The periodization walks lattice shells in a fixed order and
reports the magnitude of the last shell so truncation error is visible
rather than silent.
"""
from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import (
    DomainMismatch,
    GridMismatch,
    IncompatibleGrids,
    TailTooLarge,
    Unsupported,
    WindowTooSmall,
)
from .lattice import DilationMatrix, Embedding, identity_embedding, level_embedding
from .signal import (
    FREQUENCY,
    TIME,
    AnalyticSignal,
    GridSignal,
    TorusFunction,
    as_points,
    fourier,
    sample,
)

DEFAULT_TRUNC_R = 8
DEFAULT_TORUS_M = 256


# ---------------------------------------------------------------------------
# finitely supported sequences on Z^d
# ---------------------------------------------------------------------------

class FilterSeq:
    """Finitely supported complex sequence on Z^d."""

    def __init__(self, dim: int, taps: dict | None = None):
        self.dim = int(dim)
        self.taps: dict[tuple, complex] = {}
        if taps:
            for idx, c in taps.items():
                key = tuple(int(i) for i in (idx if isinstance(idx, (tuple, list, np.ndarray)) else (idx,)))
                if len(key) != self.dim:
                    raise ValueError(f"tap index {key} has wrong dimension")
                if c != 0:
                    self.taps[key] = complex(c)

    @staticmethod
    def delta(dim: int = 1, index=None, value: complex = 1.0) -> "FilterSeq":
        index = tuple([0] * dim) if index is None else tuple(index)
        return FilterSeq(dim, {index: value})

    def get(self, idx) -> complex:
        key = tuple(int(i) for i in np.atleast_1d(idx))
        return self.taps.get(key, 0.0 + 0j)

    def items(self):
        return sorted(self.taps.items())

    def support(self) -> np.ndarray:
        if not self.taps:
            return np.zeros((0, self.dim), dtype=int)
        return np.array(sorted(self.taps.keys()), dtype=int)

    def coeff_array(self) -> np.ndarray:
        return np.array([self.taps[tuple(k)] for k in self.support()], dtype=complex)

    def l1(self) -> float:
        return float(sum(abs(c) for c in self.taps.values()))

    def l2(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.taps.values()))

    def scaled(self, c: complex) -> "FilterSeq":
        return FilterSeq(self.dim, {k: v * c for k, v in self.taps.items()})

    def __add__(self, other: "FilterSeq") -> "FilterSeq":
        out = dict(self.taps)
        for k, v in other.taps.items():
            out[k] = out.get(k, 0.0) + v
        return FilterSeq(self.dim, out)

    def __sub__(self, other: "FilterSeq") -> "FilterSeq":
        return self + other.scaled(-1.0)

    def convolve(self, other: "FilterSeq") -> "FilterSeq":
        out: dict[tuple, complex] = {}
        for ka, va in self.taps.items():
            for kb, vb in other.taps.items():
                key = tuple(a + b for a, b in zip(ka, kb))
                out[key] = out.get(key, 0.0) + va * vb
        return FilterSeq(self.dim, out)

    def involution(self) -> "FilterSeq":
        """a*(gamma) = conj(a(-gamma))."""
        return FilterSeq(self.dim, {tuple(-i for i in k): np.conj(v)
                                    for k, v in self.taps.items()})

    def fourier_at(self, zeta) -> np.ndarray:
        """Finite Fourier sum sum_gamma a(gamma) e^{-2 pi i <zeta, gamma>}."""
        pts = as_points(zeta, self.dim)
        out = np.zeros(pts.shape[0], dtype=complex)
        for k, v in self.items():
            out += v * np.exp(-2j * np.pi * (pts @ np.asarray(k, dtype=float)))
        return out

    def fourier_grid(self, M: int) -> TorusFunction:
        grid = TorusFunction(np.zeros((M,) * self.dim, dtype=complex))
        vals = self.fourier_at(grid.grid_points()).reshape((M,) * self.dim)
        return TorusFunction(vals)

    def max_abs_diff(self, other: "FilterSeq") -> float:
        keys = set(self.taps) | set(other.taps)
        if not keys:
            return 0.0
        return max(abs(self.taps.get(k, 0.0) - other.taps.get(k, 0.0)) for k in keys)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "taps": [
                {"index": list(k), "re": float(v.real), "im": float(v.imag)}
                for k, v in self.items()
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "FilterSeq":
        taps = {tuple(t["index"]): t["re"] + 1j * t["im"] for t in obj["taps"]}
        return FilterSeq(obj["dim"], taps)


# ---------------------------------------------------------------------------
# time-domain bracket and action
# ---------------------------------------------------------------------------

def _tap_ranges(f, g, E: Embedding, window):
    """Per-axis integer ranges for possibly nonzero taps.

    Derived from the support boxes when available: [f,g](gamma) can be
    nonzero only if A gamma lies in supp(g) - supp(f).
    """
    d = E.dim
    boxf, boxg = f.support_box(), g.support_box()
    needed = None
    if boxf is not None and boxg is not None:
        lo = boxg[0] - boxf[1]
        hi = boxg[1] - boxf[0]
        corners = np.array(
            [[lo[i] if (k >> i) & 1 == 0 else hi[i] for i in range(d)]
             for k in range(1 << d)]
        )
        pre = corners @ np.linalg.inv(E.matrix_A).T
        needed = (np.ceil(pre.min(axis=0) - 1e-9).astype(int),
                  np.floor(pre.max(axis=0) + 1e-9).astype(int))
    if window is None:
        if needed is None:
            raise ValueError("window is required when supports are unbounded")
        return needed
    window = int(window)
    ranges = (-window * np.ones(d, dtype=int), window * np.ones(d, dtype=int))
    if needed is not None and (np.any(needed[0] < ranges[0]) or np.any(needed[1] > ranges[1])):
        warnings.warn(
            f"window {window} misses support-implied taps in "
            f"[{needed[0]}, {needed[1]}]", WindowTooSmall)
    return ranges


def _range_points(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    axes = [np.arange(a, b + 1) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1)


def _common_grid(f: GridSignal, g: GridSignal):
    if np.any(np.abs(f.half_width - g.half_width) > 1e-12):
        raise IncompatibleGrids("grid boxes differ")
    if f.n_samples == g.n_samples:
        return f, g
    # reconcile via trigonometric upsampling of the coarser grid
    nf, ng = np.asarray(f.n_samples), np.asarray(g.n_samples)
    if np.all(nf % ng == 0):
        return f, _upsample_to(g, tuple(nf))
    if np.all(ng % nf == 0):
        return _upsample_to(f, tuple(ng)), g
    raise IncompatibleGrids(f"sample counts {f.n_samples} / {g.n_samples}")


def _upsample_to(g: GridSignal, target: tuple) -> GridSignal:
    spec = fourier(g)
    pad = [( (t - n) // 2, (t - n) // 2) for t, n in zip(target, g.n_samples)]
    vals = np.pad(spec.values, pad)
    big = GridSignal(spec.half_width * np.asarray(target) / np.asarray(g.n_samples),
                     vals, FREQUENCY)
    from .signal import inverse_fourier
    return inverse_fourier(big)


def _grid_lag_sum(fv: np.ndarray, gv: np.ndarray, steps: np.ndarray) -> complex:
    """sum_k conj(f[k - steps]) g[k] with zero padding outside the arrays."""
    f_slices, g_slices = [], []
    for axis, s in enumerate(steps):
        n = fv.shape[axis]
        s = int(s)
        if abs(s) >= n:
            return 0.0 + 0j
        if s >= 0:
            f_slices.append(slice(0, n - s))
            g_slices.append(slice(s, n))
        else:
            f_slices.append(slice(-s, n))
            g_slices.append(slice(0, n + s))
    return complex(np.sum(np.conj(fv[tuple(f_slices)]) * gv[tuple(g_slices)]))


def bracket_time(f, g, E: Embedding | None = None, window=None) -> FilterSeq:
    """[f, g]_theta(gamma) = int conj(f(x - theta gamma)) g(x) dx.

    Exact piecewise integration for analytic pairs; lag-sum quadrature on the
    common grid for grid pairs.  The window defaults to the support-implied
    complete range; an explicit smaller window warns with WindowTooSmall.
    """
    E = identity_embedding(f.dim) if E is None else E
    if getattr(f, "domain", TIME) != TIME or getattr(g, "domain", TIME) != TIME:
        raise DomainMismatch("bracket_time expects time-domain signals")
    lo, hi = _tap_ranges(f, g, E, window)
    gammas = _range_points(lo, hi)
    if isinstance(f, AnalyticSignal) and isinstance(g, AnalyticSignal):
        taps = {}
        for gamma in gammas:
            shift = E.matrix_A @ gamma.astype(float)
            c = f.translated(shift).inner(g)
            if c != 0:
                taps[tuple(int(i) for i in gamma)] = c
        return FilterSeq(E.dim, taps)
    fg, gg = _to_grid_pair(f, g)
    cell = float(np.prod(fg.spacing))
    taps = {}
    for gamma in gammas:
        shift = E.matrix_A @ gamma.astype(float)
        steps = shift / fg.spacing
        rsteps = np.round(steps)
        if np.any(np.abs(steps - rsteps) > 1e-9):
            raise IncompatibleGrids(
                f"lattice shift {shift} is not an integer number of samples")
        c = cell * _grid_lag_sum(fg.values, gg.values, rsteps.astype(int))
        if c != 0:
            taps[tuple(int(i) for i in gamma)] = c
    return FilterSeq(E.dim, taps)


def _to_grid_pair(f, g):
    if isinstance(f, AnalyticSignal) and isinstance(g, GridSignal):
        f = sample(f, g.half_width, g.n_samples)
    elif isinstance(g, AnalyticSignal) and isinstance(f, GridSignal):
        g = sample(g, f.half_width, f.n_samples)
    if not (isinstance(f, GridSignal) and isinstance(g, GridSignal)):
        raise Unsupported(
            f"bracket_time cannot integrate {type(f).__name__}/{type(g).__name__}")
    return _common_grid(f, g)


def module_action_time(f, a: FilterSeq, E: Embedding | None = None):
    """f o a = sum_gamma a(gamma) f(. - theta gamma), in a fixed tap order."""
    E = identity_embedding(f.dim) if E is None else E
    if getattr(f, "domain", TIME) != TIME:
        raise DomainMismatch("module_action_time expects a time-domain signal")
    if isinstance(f, AnalyticSignal):
        pieces = []
        for k, v in a.items():
            shift = E.matrix_A @ np.asarray(k, dtype=float)
            for p in f.pieces:
                pieces.append(p.translated(shift).scaled(v))
        if not pieces:
            return AnalyticSignal.zero(f.dim, TIME)
        return AnalyticSignal(pieces, TIME)
    if isinstance(f, GridSignal):
        from .signal import translate
        out = np.zeros_like(f.values)
        flagged = False
        for k, v in a.items():
            shifted = translate(f, E, np.asarray(k))
            flagged = flagged or shifted.subsample_shift
            out = out + v * shifted.values
        return GridSignal(f.half_width, out, TIME, subsample_shift=flagged)
    raise Unsupported(f"cannot apply a module action to {type(f).__name__}")


# ---------------------------------------------------------------------------
# frequency-domain bracket and action
# ---------------------------------------------------------------------------

def _freq_support_ranges(p, q, E: Embedding):
    """Integer shift ranges covering A^*(supp p cap supp q), or None."""
    boxes = [s.support_box() for s in (p, q)]
    if any(b is None for b in boxes):
        return None
    lo = np.maximum(boxes[0][0], boxes[1][0])
    hi = np.minimum(boxes[0][1], boxes[1][1])
    if np.any(hi <= lo):
        return np.zeros(E.dim, dtype=int), np.zeros(E.dim, dtype=int)
    d = E.dim
    corners = np.array(
        [[lo[i] if (k >> i) & 1 == 0 else hi[i] for i in range(d)]
         for k in range(1 << d)]
    )
    mapped = corners @ E.matrix_A  # A^* xi, row form
    # j contributes iff (j + [-1/2, 1/2)) meets [lo, hi]; ties shaved inward
    return (np.ceil(mapped.min(axis=0) - 0.5 + 1e-12).astype(int),
            np.floor(mapped.max(axis=0) + 0.5 - 1e-12).astype(int))


def _shell_shifts(r: int, dim: int) -> np.ndarray:
    """Integer vectors with |j|_inf == r, lexicographic order."""
    if r == 0:
        return np.zeros((1, dim), dtype=int)
    pts = _range_points(-r * np.ones(dim, dtype=int), r * np.ones(dim, dtype=int))
    keep = np.max(np.abs(pts), axis=1) == r
    return pts[keep]


def bracket_fourier_values(p, q, E: Embedding, zeta, trunc_R: int = DEFAULT_TRUNC_R,
                           tail_tol: float | None = None):
    """Truncated periodization of conj(p) q over the annihilator lattice.

    Returns (values, tail_estimate, complete, R_used) at the requested torus
    points.  Shells are accumulated in a fixed order (r = 0, 1, ...), so the
    summation is deterministic; the tail estimate is the sup of the last
    shell's contribution, zero when the support-implied range was exhausted.
    """
    if getattr(p, "domain", None) != FREQUENCY or getattr(q, "domain", None) != FREQUENCY:
        raise DomainMismatch("bracket_fourier expects frequency-domain signals")
    zeta = as_points(zeta, E.dim)
    ranges = _freq_support_ranges(p, q, E)
    if ranges is None:
        R_needed = None
    else:
        R_needed = int(max(np.max(np.abs(ranges[0])), np.max(np.abs(ranges[1]))))
    R_used = trunc_R if R_needed is None else min(trunc_R, R_needed)
    factor = 1.0 / abs(E.det_A)
    same = p is q
    acc = np.zeros(zeta.shape[0], dtype=complex)
    last_shell = 0.0
    for r in range(R_used + 1):
        shifts = _shell_shifts(r, E.dim)
        pts = E.fiber_points(zeta, shifts).reshape(-1, E.dim)
        pv = p.values_at(pts)
        qv = pv if same else q.values_at(pts)
        shell = np.sum((np.conj(pv) * qv).reshape(zeta.shape[0], -1), axis=1)
        acc += shell
        last_shell = float(np.max(np.abs(shell))) * factor
    complete = R_needed is not None and R_used >= R_needed
    tail = 0.0 if complete else last_shell
    if tail_tol is not None and not complete and R_needed is None and tail > tail_tol:
        raise TailTooLarge(
            f"last periodization shell {tail:.3e} exceeds tolerance {tail_tol:.3e}")
    vals = acc * factor
    if same:
        vals = vals.real
    return vals, tail, complete, R_used


def _fold_applicable(p, q, E: Embedding, M: int) -> bool:
    """Fold needs identical grids, identity embedding, n = 2 L M with L integral.

    Then the grid has exactly M samples per unit frequency, so samples whose
    frequencies differ by integers are M indices apart and the residues land
    exactly on the M-point torus grid.
    """
    if not (isinstance(p, GridSignal) and isinstance(q, GridSignal)):
        return False
    if p.domain != FREQUENCY or q.domain != FREQUENCY:
        return False
    if p.n_samples != q.n_samples or np.any(np.abs(p.half_width - q.half_width) > 1e-12):
        return False
    if np.max(np.abs(E.matrix_A - np.eye(E.dim))) > 1e-12:
        return False
    n = np.asarray(p.n_samples, dtype=float)
    L = p.half_width
    if np.any(np.abs(n - 2.0 * L * M) > 1e-9):
        return False
    return bool(np.all(np.abs(L - np.round(L)) < 1e-9))


def _fold_bracket(p: GridSignal, q: GridSignal, M: int, trunc_R: int):
    """Alias-fold of the sampled cross-spectrum onto the torus grid.

    Sums stored samples whose frequencies differ by integers; exact for the
    windowed grid model (no interpolation is involved).  Group g along an
    axis with n = groups * M samples covers the integer shift k = g - F,
    F = groups / 2, because M * dxi = 1 on a fold-compatible grid.
    """
    cross = np.conj(p.values) * q.values
    d = cross.ndim
    dropped = 0.0
    out = cross
    for axis in range(d):
        a = np.moveaxis(out, axis, 0)
        groups = a.shape[0] // M
        a = a.reshape(groups, M, *a.shape[1:])
        ks = np.arange(groups) - groups // 2
        keep = np.abs(ks) <= trunc_R
        if not np.all(keep):
            dropped = max(dropped, float(np.max(np.abs(a[~keep]))))
        out = np.moveaxis(a[keep].sum(axis=0), 0, axis)
    out = np.roll(out, M // 2, axis=tuple(range(d)))
    complete = bool(np.all(np.asarray(p.n_samples) // (2 * M) <= trunc_R))
    if p is q:
        out = out.real
    return out, dropped if not complete else 0.0, complete


def bracket_fourier(p, q, E: Embedding | None = None, trunc_R: int = DEFAULT_TRUNC_R,
                    M: int = DEFAULT_TORUS_M, tail_tol: float | None = None,
                    level: int | None = None) -> TorusFunction:
    """Fourier-domain bracket [[p, q]] sampled on the M-per-axis torus grid."""
    dim = p.dim
    E = identity_embedding(dim) if E is None else E
    if _fold_applicable(p, q, E, M):
        vals, tail, complete = _fold_bracket(p, q, M, trunc_R)
        return TorusFunction(vals, tail, complete, trunc_R, level)
    probe = TorusFunction(np.zeros((M,) * dim, dtype=complex))
    vals, tail, complete, used = bracket_fourier_values(
        p, q, E, probe.grid_points(), trunc_R, tail_tol)
    return TorusFunction(vals.reshape((M,) * dim), tail, complete, used, level)


class SymbolProduct:
    """Frequency signal p(xi) * b(theta-hat xi): the Fourier module action.

    The torus symbol is looked up by nearest sample (no interpolation), which
    keeps the bracket/action adjunction exact on the torus grid.
    """

    domain = FREQUENCY

    def __init__(self, base, symbol: TorusFunction, E: Embedding):
        self.base = base
        self.symbol = symbol
        self.E = E
        self.dim = base.dim

    def values_at(self, Xi) -> np.ndarray:
        Xi = as_points(Xi, self.dim)
        z = self.E.dual_map(Xi)
        return self.base.values_at(Xi) * self.symbol.lookup(z)

    def support_box(self):
        return self.base.support_box()

    def l2_norm(self):
        raise Unsupported("compute norms of symbol products on a grid")


def module_action_fourier(p, b: TorusFunction, E: Embedding | None = None):
    """p o-hat b: pointwise product with the periodized lift of b.

    Returns a lazy product signal: materializing grid samples would silently
    change the off-grid model (an interpolant of products is not a product of
    interpolants), breaking the on-grid adjunction with the bracket.
    """
    E = identity_embedding(p.dim) if E is None else E
    if getattr(p, "domain", None) != FREQUENCY:
        raise DomainMismatch("module_action_fourier expects a frequency-domain signal")
    if b.dim != p.dim:
        raise GridMismatch(f"symbol dimension {b.dim} != signal dimension {p.dim}")
    return SymbolProduct(p, b, E)


# ---------------------------------------------------------------------------
# level variants and the Fourier bridge
# ---------------------------------------------------------------------------

def bracket_level(f, g, D: DilationMatrix, n: int, window=None) -> FilterSeq:
    """n-th level bracket: bracket_time against the level-n embedding."""
    return bracket_time(f, g, level_embedding(D, n), window)


def module_action_level(f, a: FilterSeq, D: DilationMatrix, n: int):
    return module_action_time(f, a, level_embedding(D, n))


def bracket_fourier_level(p, q, D: DilationMatrix, n: int,
                          trunc_R: int = DEFAULT_TRUNC_R, M: int = DEFAULT_TORUS_M,
                          tail_tol: float | None = None) -> TorusFunction:
    """[[p, q]]_n on the torus grid (annihilator lattice (D^*)^n Z^d)."""
    return bracket_fourier(p, q, level_embedding(D, n), trunc_R, M, tail_tol, level=n)


def bridge_check(f, g, E: Embedding | None = None, window=None,
                 M: int = DEFAULT_TORUS_M, N: int = 1024,
                 trunc_R: int = DEFAULT_TRUNC_R) -> float:
    """Max torus-grid deviation between the two bracket routes.

    Route A: time-domain bracket, then its finite Fourier sum.  Route B: FFT
    of the sampled signals on a fold-compatible box (half-width M/2), then
    the folded periodization.  The routes share no arithmetic.
    """
    E = identity_embedding(f.dim) if E is None else E
    a = bracket_time(f, g, E, window)
    probe = TorusFunction(np.zeros((M,) * f.dim, dtype=complex))
    grid_pts = probe.grid_points()
    route_a = a.fourier_at(grid_pts).reshape(probe.values.shape)

    half = np.full(f.dim, M / 2.0)
    shape = (N,) * f.dim
    fg = _resample_onto(f, half, shape)
    gg = fg if g is f else _resample_onto(g, half, shape)
    p = fourier(fg)
    q = p if g is f else fourier(gg)
    route_b = bracket_fourier(p, q, E, trunc_R=trunc_R, M=M)
    return float(np.max(np.abs(route_a - route_b.values)))


def _resample_onto(f, half_width, shape) -> GridSignal:
    if isinstance(f, GridSignal):
        probe = GridSignal(half_width, np.zeros(shape, dtype=complex), f.domain)
        vals = f.values_at(probe.grid_points()).reshape(shape)
        return GridSignal(half_width, vals, f.domain)
    return sample(f, half_width, shape)
