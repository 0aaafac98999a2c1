"""Acceptance suite: one test per criterion, printed pass/fail lines.

Each criterion pins its tolerance here.  Verdict lines are written past
pytest's capture so they appear in any run's output.
"""
import math
import sys
import time

import numpy as np

from wavebracket import (
    AnalyticSignal,
    GridSignal,
    TorusFunction,
    bracket_fourier,
    bracket_time,
    bridge_check,
    builtin,
    cascade,
    coset_reps,
    db4_scaling_taps,
    dilation_isometry_check,
    haar_test_corpus,
    identity_embedding,
    make_dilation,
    module_action_fourier,
    module_action_time,
    norm_chain_check,
    random_band_signal,
    refinement_residual,
    shannon_test_corpus,
    verify_system,
    x_norm,
)
from wavebracket.bracket import FilterSeq
from wavebracket.verify import verify_orthonormality

D2 = make_dilation([[2]])
E1 = identity_embedding(1)


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:2d} [{status}] {name}  {detail}",
          file=sys.__stdout__)
    assert ok, f"criterion {num} ({name}): {detail}"


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_1_haar_filters():
    with Timer() as t:
        sys = builtin("haar")
        h = sorted((c.real for _, c in sys.bank.h.items()))
        g = sorted(c.real for _, c in sys.bank.g[0].items())
        idx_h = [k[0] for k, _ in sys.bank.h.items()]
        sq = 2 ** -0.5
        ok = (
            len(h) == 2 and len(g) == 2
            and abs(abs(h[0]) - sq) < 1e-12 and abs(abs(h[1]) - sq) < 1e-12
            and abs(g[0] + sq) < 1e-12 and abs(g[1] - sq) < 1e-12
            and idx_h[1] - idx_h[0] == 1
        )
    report(1, "Haar filter taps", ok and t.elapsed < 1.0,
           f"|h|={[abs(c) for c in h]}, g={g}, {t.elapsed:.2f}s")


def test_criterion_2_shannon_filters():
    with Timer() as t:
        sys = builtin("shannon")
        M = 1024
        zeta = sys.hhat.grid_points()[:, 0]
        assert sys.hhat.n_samples == (M,)
        want_h = math.sqrt(2) * ((zeta >= -0.25) & (zeta < 0.25))
        off_h = np.min(np.abs(zeta[:, None] - np.array([[-0.25, 0.25]])),
                       axis=1) > 2.0 / M
        dev_h = float(np.max(np.abs(sys.hhat.values - want_h)[off_h]))
        want_g = math.sqrt(2) * (((zeta >= -0.5) & (zeta < -0.25))
                                 | ((zeta >= 0.25) & (zeta < 0.5)))
        off_g = np.min(np.abs(zeta[:, None]
                              - np.array([[-0.5, -0.25, 0.25, 0.5]])),
                       axis=1) > 2.0 / M
        dev_g = float(np.max(np.abs(np.abs(sys.ghats[0].values) - want_g)[off_g]))
        ok = dev_h < 1e-8 and dev_g < 1e-8
    report(2, "Shannon filters", ok and t.elapsed < 2.0,
           f"dev_h={dev_h:.2e}, dev_g={dev_g:.2e}, {t.elapsed:.2f}s")


def test_criterion_3_index_law():
    corpus = [[[2]], [[3]], [[-2]], [[2, 0], [0, 2]], [[1, 1], [1, -1]],
              [[2, 1], [0, 2]]]
    with Timer() as t:
        ok = True
        detail = []
        for entries in corpus:
            D = make_dilation(entries)
            det = abs(round(np.linalg.det(np.asarray(entries, dtype=float))))
            n_cosets = len(coset_reps(D))
            ok = ok and D.index_m == det == n_cosets
            detail.append(f"{entries}:m={D.index_m}")
    report(3, "index m = |det| with coset cross-check", ok and t.elapsed < 1.0,
           "; ".join(detail) + f", {t.elapsed:.2f}s")


def test_criterion_4_fourier_bridge():
    with Timer() as t:
        sys = builtin("haar")
        pairs = [(sys.phi, sys.phi), (sys.phi, sys.psis[0]),
                 (sys.psis[0], sys.psis[0])]
        haar_dev = max(bridge_check(f, g, E1, M=256, N=1024, trunc_R=8)
                       for f, g in pairs)
        L, N = 8.0, 1024
        x = -L + np.arange(N) * (2 * L / N)
        g1 = GridSignal(L, np.exp(-np.pi * x ** 2) + 0j)
        g2 = GridSignal(L, np.exp(-np.pi * (x - 0.5) ** 2) + 0j)
        gauss_dev = max(bridge_check(g1, g1, E1, M=256, N=1024, trunc_R=8),
                        bridge_check(g1, g2, E1, M=256, N=1024, trunc_R=8))
        ok = haar_dev < 1e-8 and gauss_dev < 1e-6
    report(4, "Fourier bridge", ok and t.elapsed < 5.0,
           f"haar={haar_dev:.2e}, gauss={gauss_dev:.2e}, {t.elapsed:.2f}s")


def _band_corpus():
    rng = np.random.default_rng(0)
    return [random_band_signal(rng) for _ in range(20)]


def test_criterion_5_norm_inequality():
    with Timer() as t:
        failures = 0
        worst = 0.0
        for p in _band_corpus():
            for n in range(-2, 3):
                rep = x_norm(p, D2, n, M=64)
                worst = max(worst, rep.l2_norm - rep.x_norm)
                if rep.l2_norm > rep.x_norm + 1e-8:
                    failures += 1
        ok = failures == 0
    report(5, "l2 <= X-norm over corpus x levels", ok and t.elapsed < 10.0,
           f"failures={failures}/100, worst margin={worst:.2e}, {t.elapsed:.2f}s")


def test_criterion_6_norm_chain_and_refinement():
    with Timer() as t:
        chain_fail = 0
        worst_ref = 0.0
        for p in _band_corpus():
            for n in (0, 1):
                cr = norm_chain_check(p, D2, n, M=64, slack=1e-8)
                if not (cr.lower_ok and cr.upper_ok):
                    chain_fail += 1
                worst_ref = max(worst_ref, refinement_residual(p, D2, n, M=64))
        ok = chain_fail == 0 and worst_ref < 1e-6
    report(6, "norm chain sandwich + refinement identity",
           ok and t.elapsed < 10.0,
           f"chain failures={chain_fail}, refinement max={worst_ref:.2e}, "
           f"{t.elapsed:.2f}s")


def test_criterion_7_dilation_unitarity():
    with Timer() as t:
        worst = 0.0
        for p in _band_corpus()[:10]:
            for n in (-1, 0, 1):
                worst = max(worst, dilation_isometry_check(p, D2, n, M=64))
        worst = max(worst, dilation_isometry_check(builtin("haar").phi, D2, 0))
        ok = worst < 1e-7
    report(7, "dilation unitarity across levels", ok and t.elapsed < 5.0,
           f"max deviation={worst:.2e}, {t.elapsed:.2f}s")


def test_criterion_8_multiwavelet_verdicts():
    with Timer() as t:
        haar = builtin("haar")
        sigs, labels = haar_test_corpus()
        rep_h = verify_system(haar.psis, haar.D, sigs, n_range=(-2, 2),
                              recon_range=(-6, 6), labels=labels)
        ortho_h = rep_h.ortho_residual
        recon_h = max(e.residual for e in rep_h.recon_entries)

        sh = builtin("shannon")
        ssigs, slabels = shannon_test_corpus()
        rep_s = verify_system(sh.psis, sh.D, ssigs, n_range=(-2, 2),
                              recon_range=(0, 3), M=1024, labels=slabels)
        ortho_s = rep_s.ortho_residual
        recon_s = max(e.residual for e in rep_s.recon_entries)

        psi = haar.psis[0]
        pert = AnalyticSignal(
            [p.scaled(1.01) if k == 0 else p for k, p in enumerate(psi.pieces)],
            "time")
        worst_p, _, _ = verify_orthonormality([pert], haar.D, (-1, 1), M=128)

        ok = (rep_h.verdict == "pass" and ortho_h < 1e-8 and recon_h < 1e-3
              and rep_s.verdict == "pass" and ortho_s < 1e-6 and recon_s < 1e-6
              and worst_p > 1e-3)
    report(8, "multiwavelet verdicts (haar, shannon, perturbed control)",
           ok and t.elapsed < 30.0,
           f"haar(o={ortho_h:.1e},r={recon_h:.1e}) "
           f"shannon(o={ortho_s:.1e},r={recon_s:.1e}) "
           f"perturbed residual={worst_p:.2e}, {t.elapsed:.1f}s")


def test_criterion_9_cascade():
    with Timer() as t:
        haar = builtin("haar")
        res_h = cascade(haar.bank.h, D2, iters=1)
        haar_exact = res_h.step_l2[0] < 1e-12 and res_h.ortho_dev[0] < 1e-12

        h = db4_scaling_taps()
        x = np.arange(4096) / 512.0 - 4.0
        init = GridSignal(4.0, ((x >= 0) & (x < 1)).astype(complex))
        res_d = cascade(h, D2, iters=12, init=init)
        db4_ok = res_d.ortho_dev[-1] < 1e-3
        ok = haar_exact and db4_ok
    report(9, "cascade fixed point (haar) and db4 convergence",
           ok and t.elapsed < 20.0,
           f"haar step={res_h.step_l2[0]:.1e}, db4 |[phi,phi]-e0|="
           f"{res_d.ortho_dev[-1]:.2e} after {res_d.iterations} iters, "
           f"{t.elapsed:.1f}s")


def test_criterion_10_algebraic_properties():
    from conftest import random_compact_signal

    rng = np.random.default_rng(0)
    pts = np.linspace(-7, 7, 141)
    with Timer() as t:
        worst = {"hermitian": 0.0, "linearity": 0.0, "adjunction": 0.0,
                 "associativity": 0.0, "fourier_action": 0.0}
        M = 32
        for _ in range(50):
            f = random_compact_signal(rng)
            g = random_compact_signal(rng)
            h = random_compact_signal(rng)
            a = FilterSeq(1, {(k,): complex(*rng.standard_normal(2))
                              for k in range(-1, 2)})
            b = FilterSeq(1, {(k,): complex(*rng.standard_normal(2))
                              for k in range(-1, 2)})
            fg = bracket_time(f, g, E1)
            worst["hermitian"] = max(
                worst["hermitian"],
                fg.max_abs_diff(bracket_time(g, f, E1).involution()))
            al, be = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
            lin_lhs = bracket_time(f, g.scaled(al) + h.scaled(be), E1)
            lin_rhs = fg.scaled(al) + bracket_time(f, h, E1).scaled(be)
            worst["linearity"] = max(worst["linearity"],
                                     lin_lhs.max_abs_diff(lin_rhs))
            adj_lhs = bracket_time(f, module_action_time(g, a, E1), E1)
            worst["adjunction"] = max(worst["adjunction"],
                                      adj_lhs.max_abs_diff(fg.convolve(a)))
            assoc_lhs = module_action_time(module_action_time(f, a, E1), b, E1)
            assoc_rhs = module_action_time(f, a.convolve(b), E1)
            worst["associativity"] = max(
                worst["associativity"],
                float(np.max(np.abs(assoc_lhs.values_at(pts)
                                    - assoc_rhs.values_at(pts)))))
            p = random_band_signal(rng)
            q = random_band_signal(rng)
            sym = TorusFunction(rng.standard_normal(M)
                                + 1j * rng.standard_normal(M))
            lhs = bracket_fourier(p, module_action_fourier(q, sym, E1), E1, M=M)
            rhs = bracket_fourier(p, q, E1, M=M)
            worst["fourier_action"] = max(
                worst["fourier_action"],
                float(np.max(np.abs(lhs.values - rhs.values * sym.values))))
        ok = all(v < 1e-10 for v in worst.values())
    detail = ", ".join(f"{k}={v:.1e}" for k, v in worst.items())
    report(10, "algebraic property suite (50 seeded instances)",
           ok and t.elapsed < 10.0, detail + f", {t.elapsed:.1f}s")
