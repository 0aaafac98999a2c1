import numpy as np
import pytest

from wavebracket import AnalyticSignal, Piece, make_dilation

# dilation matrix corpus used across the suite
CORPUS_1D = [[[2]], [[3]], [[-2]]]
CORPUS_2D = [[[2, 0], [0, 2]], [[1, 1], [1, -1]], [[2, 1], [0, 2]]]
CORPUS = CORPUS_1D + CORPUS_2D


def random_compact_signal(rng, degree=2, n_pieces=3, span=2.0):
    """Random time-domain piecewise polynomial supported in [-span, span)."""
    edges = np.sort(np.concatenate([[-span, span],
                                    rng.uniform(-span, span, n_pieces - 1)]))
    pieces = []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a < 1e-6:
            continue
        coeffs = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        pieces.append(Piece([a], [b], coeffs))
    return AnalyticSignal(pieces)


def random_dyadic_steps(rng, cells=8, width=1.0):
    """Random piecewise-constant signal on [0, width) with dyadic breakpoints."""
    vals = rng.standard_normal(cells) + 1j * rng.standard_normal(cells)
    step = width / cells
    pieces = [Piece([i * step], [(i + 1) * step], np.array([v]))
              for i, v in enumerate(vals)]
    return AnalyticSignal(pieces)


@pytest.fixture(scope="session")
def dilation_2():
    return make_dilation([[2]])


@pytest.fixture(scope="session")
def quincunx():
    return make_dilation([[1, 1], [1, -1]])
