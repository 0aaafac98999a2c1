import warnings

import numpy as np
import pytest

from conftest import random_compact_signal
from wavebracket import (
    AnalyticSignal,
    FilterSeq,
    GridSignal,
    IncompatibleGrids,
    Piece,
    TorusFunction,
    WindowTooSmall,
    bracket_fourier,
    bracket_fourier_level,
    bracket_level,
    bracket_time,
    bridge_check,
    dilate,
    fourier,
    fourier_dilate,
    identity_embedding,
    make_dilation,
    module_action_fourier,
    module_action_time,
)

E1 = identity_embedding(1)
D2 = make_dilation([[2]])


def haar_phi():
    return AnalyticSignal.box([0.0], [1.0])


def random_seq(rng, dim=1, radius=2):
    taps = {}
    for k in range(-radius, radius + 1):
        taps[(k,) * dim if dim > 1 else (k,)] = complex(*rng.standard_normal(2))
    return FilterSeq(dim, taps)


# -- time-domain bracket ----------------------------------------------------

def test_bracket_disjoint_translates_is_delta():
    a = bracket_time(haar_phi(), haar_phi(), E1)
    assert a.items() == [((0,), 1.0 + 0j)]


def test_bracket_scaling_filter_taps():
    # h = [phi, D^{-1} phi]_0: two adjacent taps of magnitude 2^{-1/2}
    h = bracket_time(haar_phi(), dilate(haar_phi(), D2, -1), E1)
    taps = h.items()
    assert len(taps) == 2
    (i0, c0), (i1, c1) = taps
    assert i1[0] - i0[0] == 1
    assert abs(abs(c0) - 2 ** -0.5) < 1e-12
    assert abs(abs(c1) - 2 ** -0.5) < 1e-12


def test_bracket_gaussian_closed_form():
    # oracle: [g, g](k) = 2^{-1/2} e^{-pi k^2 / 2}, cross-checked by quadrature
    x = (np.arange(2_000_000) + 0.5) * (16.0 / 2_000_000) - 8.0
    dx = 16.0 / 2_000_000
    quad = np.sum(np.exp(-np.pi * (x - 1.0) ** 2) * np.exp(-np.pi * x ** 2)) * dx
    assert abs(quad - 2 ** -0.5 * np.exp(-np.pi / 2)) < 1e-10
    L, N = 8.0, 1024
    xs = -L + np.arange(N) * (2 * L / N)
    g = GridSignal(L, np.exp(-np.pi * xs ** 2) + 0j)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowTooSmall)
        a = bracket_time(g, g, E1, window=4)
    for k in range(-4, 5):
        assert abs(a.get([k]) - 2 ** -0.5 * np.exp(-np.pi * k * k / 2)) < 1e-12


def test_bracket_window_warning():
    wide = AnalyticSignal.box([0.0], [4.0])
    with pytest.warns(WindowTooSmall):
        bracket_time(wide, wide, E1, window=1)


def test_bracket_incompatible_grids():
    g1 = GridSignal(4.0, np.zeros(64, dtype=complex))
    g2 = GridSignal(8.0, np.zeros(64, dtype=complex))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowTooSmall)
        with pytest.raises(IncompatibleGrids):
            bracket_time(g1, g2, E1, window=1)


def test_bracket_grid_upsample_path():
    # same box, different N: coarser side is trig-upsampled
    L = 8.0
    x1 = -L + np.arange(1024) * (2 * L / 1024)
    x2 = -L + np.arange(512) * (2 * L / 512)
    g1 = GridSignal(L, np.exp(-np.pi * x1 ** 2) + 0j)
    g2 = GridSignal(L, np.exp(-np.pi * x2 ** 2) + 0j)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowTooSmall)
        a = bracket_time(g1, g2, E1, window=2)
    for k in range(-2, 3):
        assert abs(a.get([k]) - 2 ** -0.5 * np.exp(-np.pi * k * k / 2)) < 1e-10


# -- module action ------------------------------------------------------------

def test_action_identity_tap():
    f = haar_phi()
    out = module_action_time(f, FilterSeq.delta(), E1)
    pts = np.linspace(-1, 2, 31)
    assert np.max(np.abs(out.values_at(pts) - f.values_at(pts))) == 0.0


def test_action_disjoint_union():
    out = module_action_time(haar_phi(), FilterSeq(1, {(0,): 1.0, (1,): 1.0}), E1)
    pts = np.array([0.5, 1.5, 2.5, -0.5])
    assert np.allclose(out.values_at(pts), [1, 1, 0, 0])


def test_action_l1_l2_bound():
    rng = np.random.default_rng(11)
    for _ in range(5):
        f = random_compact_signal(rng)
        a = random_seq(rng)
        out = module_action_time(f, a, E1)
        assert out.l2_norm() <= a.l1() * f.l2_norm() + 1e-9


def test_action_associativity():
    rng = np.random.default_rng(12)
    pts = np.linspace(-6, 6, 301)
    for _ in range(10):
        f = random_compact_signal(rng)
        a, b = random_seq(rng), random_seq(rng, radius=1)
        lhs = module_action_time(module_action_time(f, a, E1), b, E1)
        rhs = module_action_time(f, a.convolve(b), E1)
        assert np.max(np.abs(lhs.values_at(pts) - rhs.values_at(pts))) < 1e-10


def test_action_unconditionality_proxy():
    rng = np.random.default_rng(13)
    f = random_compact_signal(rng)
    a = random_seq(rng, radius=3)
    out1 = module_action_time(f, a, E1)
    shuffled = FilterSeq(1, dict(reversed(a.items())))
    out2 = module_action_time(f, shuffled, E1)
    pts = np.linspace(-6, 6, 301)
    assert np.max(np.abs(out1.values_at(pts) - out2.values_at(pts))) < 1e-12


# -- Fourier-domain bracket ---------------------------------------------------

def test_fourier_bracket_shannon_is_one():
    phat = AnalyticSignal.box([-0.5], [0.5], domain="frequency")
    tf = bracket_fourier(phat, phat, E1, M=256)
    assert tf.complete
    assert np.max(np.abs(tf.values - 1.0)) < 1e-14


def test_fourier_bracket_positive():
    rng = np.random.default_rng(14)
    from wavebracket import random_band_signal
    p = random_band_signal(rng)
    tf = bracket_fourier(p, p, E1, M=64)
    assert np.all(tf.values >= -1e-12)
    assert np.isrealobj(tf.values)


def test_fourier_bracket_gaussian_dense_oracle():
    # brute-force periodization at 10x the truncation radius
    L, N = 8.0, 1024
    xs = -L + np.arange(N) * (2 * L / N)
    spec = fourier(GridSignal(L, np.exp(-np.pi * xs ** 2) + 0j))
    tf = bracket_fourier(spec, spec, E1, trunc_R=8, M=64)
    zeta = tf.grid_points()[:, 0]
    oracle = np.zeros(64)
    for k in range(-80, 81):
        oracle += np.exp(-2 * np.pi * (zeta + k) ** 2)
    assert np.max(np.abs(tf.values - oracle)) < 1e-10


def test_fourier_action_unit_symbol():
    rng = np.random.default_rng(15)
    from wavebracket import random_band_signal
    p = random_band_signal(rng)
    one = TorusFunction(np.ones(64, dtype=complex))
    out = module_action_fourier(p, one, E1)
    pts = np.linspace(-2.2, 2.2, 41)
    assert np.max(np.abs(out.values_at(pts) - p.values_at(pts))) == 0.0


def test_fourier_action_adjoint_identity():
    rng = np.random.default_rng(16)
    from wavebracket import random_band_signal
    p = random_band_signal(rng)
    q = random_band_signal(rng)
    M = 64
    b = TorusFunction(rng.standard_normal(M) + 1j * rng.standard_normal(M))
    lhs = bracket_fourier(p, module_action_fourier(q, b, E1), E1, M=M)
    rhs = bracket_fourier(p, q, E1, M=M)
    assert np.max(np.abs(lhs.values - rhs.values * b.values)) < 1e-10


def test_fourier_action_consistency_with_time():
    # F(f o a) == F(f) o-hat F_Z(a) at the spectrum grid points
    rng = np.random.default_rng(17)
    L, N = 8.0, 256
    xs = -L + np.arange(N) * (2 * L / N)
    f = GridSignal(L, np.exp(-np.pi * xs ** 2) + 0j)
    a = random_seq(rng)
    M = 256
    lhs = fourier(module_action_time(f, a, E1))
    rhs = module_action_fourier(fourier(f), a.fourier_grid(M), E1)
    pts = lhs.grid_points()
    assert np.max(np.abs(lhs.values.ravel() - rhs.values_at(pts))) < 1e-8


# -- level operations -----------------------------------------------------------

def test_bracket_level_zero_matches_identity_embedding():
    rng = np.random.default_rng(18)
    f, g = random_compact_signal(rng), random_compact_signal(rng)
    assert bracket_level(f, g, D2, 0).max_abs_diff(bracket_time(f, g, E1)) == 0.0


def test_bracket_level_haar_filter_shift():
    # [D^1 phi, D^0 phi]_1 equals h = [phi, D^{-1} phi]_0
    h = bracket_time(haar_phi(), dilate(haar_phi(), D2, -1), E1)
    shifted = bracket_level(dilate(haar_phi(), D2, 1), haar_phi(), D2, 1)
    assert shifted.max_abs_diff(h) < 1e-12


def test_bracket_level_dilation_identity():
    rng = np.random.default_rng(19)
    for n in (-1, 1):
        f, g = random_compact_signal(rng), random_compact_signal(rng)
        lhs = bracket_level(f, g, D2, n)
        rhs = bracket_time(dilate(f, D2, -n), dilate(g, D2, -n), E1)
        assert lhs.max_abs_diff(rhs) < 1e-10


def test_fourier_bracket_level_two_routes():
    # [[p,q]]_n == [[Dhat^{-n} p, Dhat^{-n} q]]_0 via independent lattice sums
    rng = np.random.default_rng(20)
    from wavebracket import random_band_signal
    p, q = random_band_signal(rng), random_band_signal(rng)
    for n in (-1, 1, 2):
        t1 = bracket_fourier_level(p, q, D2, n, trunc_R=16, M=64)
        t2 = bracket_fourier(fourier_dilate(p, D2, -n), fourier_dilate(q, D2, -n),
                             E1, trunc_R=16, M=64)
        assert np.max(np.abs(t1.values - t2.values)) < 1e-9


def test_fourier_bracket_level_quincunx_two_routes():
    rng = np.random.default_rng(21)
    from wavebracket import random_band_signal
    q2 = make_dilation([[1, 1], [1, -1]])
    p = random_band_signal(rng, dim=2)
    r = random_band_signal(rng, dim=2)
    for n in (-1, 1):
        t1 = bracket_fourier_level(p, r, q2, n, trunc_R=12, M=16)
        t2 = bracket_fourier(fourier_dilate(p, q2, -n), fourier_dilate(r, q2, -n),
                             identity_embedding(2), trunc_R=12, M=16)
        assert np.max(np.abs(t1.values - t2.values)) < 1e-9


def test_fourier_bracket_level_shannon_psi():
    w = 1.0 / (4.0 * np.pi)
    psihat = AnalyticSignal([
        Piece([-1.0], [-0.5], np.array([1.0 + 0j]), freq=[w]),
        Piece([0.5], [1.0], np.array([1.0 + 0j]), freq=[w]),
    ], "frequency")
    tf = bracket_fourier_level(psihat, psihat, D2, 0, M=256)
    assert np.max(np.abs(tf.values - 1.0)) < 1e-12


def test_fourier_bracket_zero():
    z = AnalyticSignal.zero(domain="frequency")
    tf = bracket_fourier_level(z, z, D2, 1, M=64)
    assert np.max(np.abs(tf.values)) == 0.0


# -- bridge ---------------------------------------------------------------------

def test_bridge_haar_pair():
    assert bridge_check(haar_phi(), haar_phi(), E1) < 1e-8


def test_bridge_zero():
    z = AnalyticSignal.zero()
    assert bridge_check(z, z, E1, window=1) == 0.0


def test_bridge_gaussian_pair():
    L, N = 8.0, 1024
    xs = -L + np.arange(N) * (2 * L / N)
    g = GridSignal(L, np.exp(-np.pi * xs ** 2) + 0j)
    assert bridge_check(g, g, E1, trunc_R=8) < 1e-6


# -- algebraic invariants ---------------------------------------------------------

def test_hermitian_symmetry():
    rng = np.random.default_rng(22)
    for _ in range(5):
        f, g = random_compact_signal(rng), random_compact_signal(rng)
        a = bracket_time(f, g, E1)
        b = bracket_time(g, f, E1)
        assert a.max_abs_diff(b.involution()) < 1e-12


def test_second_slot_linearity():
    rng = np.random.default_rng(23)
    f = random_compact_signal(rng)
    g = random_compact_signal(rng)
    h = random_compact_signal(rng)
    al, be = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
    lhs = bracket_time(f, g.scaled(al) + h.scaled(be), E1)
    rhs = bracket_time(f, g, E1).scaled(al) + bracket_time(f, h, E1).scaled(be)
    assert lhs.max_abs_diff(rhs) < 1e-12


def test_action_adjunction():
    rng = np.random.default_rng(24)
    for _ in range(5):
        f, g = random_compact_signal(rng), random_compact_signal(rng)
        a = random_seq(rng)
        lhs = bracket_time(f, module_action_time(g, a, E1), E1)
        rhs = bracket_time(f, g, E1).convolve(a)
        assert lhs.max_abs_diff(rhs) < 1e-10


def test_tail_tol_raises_for_noncompact():
    from wavebracket import TailTooLarge, fourier
    phat = fourier(haar_phi())  # unbounded 1/xi spectrum
    with pytest.raises(TailTooLarge):
        bracket_fourier(phat, phat, E1, trunc_R=8, M=64, tail_tol=1e-12)
    # compact spectra never raise, whatever the tolerance
    box = AnalyticSignal.box([-0.5], [0.5], domain="frequency")
    tf = bracket_fourier(box, box, E1, trunc_R=8, M=64, tail_tol=1e-12)
    assert tf.complete


def test_symbol_dim_mismatch():
    from wavebracket import GridMismatch
    p = AnalyticSignal.box([-0.5], [0.5], domain="frequency")
    bad = TorusFunction(np.zeros((8, 8), dtype=complex))
    with pytest.raises(GridMismatch):
        module_action_fourier(p, bad, E1)
