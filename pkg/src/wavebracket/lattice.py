"""Dilation matrices, lattice embeddings and coset enumeration.

A dilation matrix is an integer d x d matrix whose eigenvalues all have
modulus > 1.  Its index m = |det| counts the cosets of D Z^d in Z^d.  An
embedding theta: Z^d -> R^d is represented by the nonsingular matrix A with
theta(gamma) = A gamma; the annihilator of the embedded lattice is generated
by the columns of (A^*)^{-1}.  The level-n embedding gamma -> D^{-n} gamma
ties the two together.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import LevelOverflow, NotExpanding, SingularMatrix

EPS_EIG = 1e-9
EPS_SING = 1e-12
EPS_RESIDUE = 1e-9
DEFAULT_N_MAX = 16


def _int_det(entries: np.ndarray) -> int:
    """Exact determinant of a small integer matrix (cofactor expansion)."""
    n = entries.shape[0]
    if n == 1:
        return int(entries[0, 0])
    if n == 2:
        return int(entries[0, 0] * entries[1, 1] - entries[0, 1] * entries[1, 0])
    total = 0
    for j in range(n):
        minor = np.delete(np.delete(entries, 0, axis=0), j, axis=1)
        total += (-1) ** j * int(entries[0, j]) * _int_det(minor)
    return total


@dataclass(frozen=True)
class DilationMatrix:
    """Validated integer expanding matrix with its derived index.

    Use :func:`make_dilation`; the constructor performs no checks.
    """

    entries: np.ndarray
    dim: int
    index_m: int
    det_sign: int

    def matrix(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=float)

    def power(self, n: int) -> np.ndarray:
        """D^n as a float matrix (exact integer arithmetic for n >= 0)."""
        if n >= 0:
            return np.linalg.matrix_power(self.entries, n).astype(float)
        return np.linalg.inv(np.linalg.matrix_power(self.entries, -n).astype(float))

    def to_json(self) -> dict:
        return {"dim": self.dim, "entries": self.entries.tolist()}

    @staticmethod
    def from_json(obj: dict) -> "DilationMatrix":
        return make_dilation(obj["entries"])


@dataclass(frozen=True)
class Embedding:
    """Embedding of Z^d into R^d via a nonsingular matrix.

    ``ann_basis`` columns generate the annihilator lattice (A^*)^{-1} Z^d.
    """

    matrix_A: np.ndarray
    det_A: float = field(init=False)
    ann_basis: np.ndarray = field(init=False)

    def __post_init__(self):
        A = np.asarray(self.matrix_A, dtype=float)
        det = float(np.linalg.det(A))
        if abs(det) <= EPS_SING:
            raise SingularMatrix(f"embedding matrix is singular (det={det!r})")
        object.__setattr__(self, "matrix_A", A)
        object.__setattr__(self, "det_A", det)
        object.__setattr__(self, "ann_basis", np.linalg.inv(A.T))

    @property
    def dim(self) -> int:
        return self.matrix_A.shape[0]

    def map_points(self, gamma: np.ndarray) -> np.ndarray:
        """theta(gamma) = A gamma for an (..., d) array of lattice points."""
        return np.asarray(gamma, dtype=float) @ self.matrix_A.T

    def dual_map(self, xi: np.ndarray) -> np.ndarray:
        """A^* xi; reduce mod Z^d afterwards to obtain theta-hat."""
        return np.asarray(xi, dtype=float) @ self.matrix_A

    def fiber_points(self, zeta: np.ndarray, shifts: np.ndarray) -> np.ndarray:
        """(A^*)^{-1}(zeta + k) for torus points zeta and integer shifts k."""
        z = np.asarray(zeta, dtype=float)
        pts = z[:, None, :] + np.asarray(shifts, dtype=float)[None, :, :]
        return pts @ self.ann_basis.T  # (A^*)^{-1} applied row-wise

    def to_json(self) -> dict:
        return {"dim": self.dim, "matrix": self.matrix_A.tolist()}

    @staticmethod
    def from_json(obj: dict) -> "Embedding":
        return Embedding(np.asarray(obj["matrix"], dtype=float))


def identity_embedding(dim: int) -> Embedding:
    return Embedding(np.eye(dim))


def make_dilation(entries) -> DilationMatrix:
    """Validate an integer matrix as a dilation matrix.

    Raises SingularMatrix when det == 0 and NotExpanding when any eigenvalue
    modulus is <= 1 + 1e-9 (modulus convention; see package docs).
    """
    arr = np.asarray(entries)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {arr.shape}")
    if not np.all(arr == np.round(arr)):
        raise ValueError("dilation matrix entries must be integers")
    ints = arr.astype(np.int64)
    det = _int_det(ints)
    if det == 0:
        raise SingularMatrix("dilation matrix has determinant 0")
    eigvals = np.linalg.eigvals(ints.astype(float))
    if np.min(np.abs(eigvals)) <= 1.0 + EPS_EIG:
        raise NotExpanding(
            f"eigenvalue moduli {sorted(np.abs(eigvals).tolist())} not all > 1"
        )
    return DilationMatrix(
        entries=ints,
        dim=ints.shape[0],
        index_m=abs(det),
        det_sign=1 if det > 0 else -1,
    )


def _integer_box_points(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """All integer points in the closed box [lo, hi], lexicographic order."""
    axes = [np.arange(int(np.floor(l)), int(np.ceil(h)) + 1) for l, h in zip(lo, hi)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def coset_reps(D: DilationMatrix) -> list[np.ndarray]:
    """Exactly m representatives of Z^d / D Z^d.

    Scans the integer bounding box of D [0,1)^d and keeps the points whose
    preimage D^{-1} gamma lies in [0,1)^d, i.e. the canonical representative
    of each class.  Sorted lexicographically.
    """
    Dm = D.matrix()
    corners = _integer_box_points(np.zeros(D.dim), np.ones(D.dim)).astype(float)
    images = corners @ Dm.T
    lo, hi = images.min(axis=0), images.max(axis=0)
    candidates = _integer_box_points(lo, hi)
    Dinv = np.linalg.inv(Dm)
    frac = candidates @ Dinv.T
    keep = np.all((frac >= -EPS_RESIDUE) & (frac < 1.0 - EPS_RESIDUE), axis=1)
    reps = candidates[keep]
    order = np.lexsort(reps.T[::-1])
    reps = reps[order]
    if reps.shape[0] != D.index_m:
        raise AssertionError(
            f"coset scan found {reps.shape[0]} representatives, expected {D.index_m}"
        )
    return [reps[i] for i in range(reps.shape[0])]


def same_coset(D: DilationMatrix, g1, g2) -> bool:
    """gamma ~ gamma' iff D^{-1}(gamma - gamma') is integral."""
    diff = np.asarray(g1, dtype=float) - np.asarray(g2, dtype=float)
    t = np.linalg.inv(D.matrix()) @ diff
    return bool(np.all(np.abs(t - np.round(t)) < EPS_RESIDUE))


def wrap_torus(x: np.ndarray) -> np.ndarray:
    """Reduce coordinates into the cube [-1/2, 1/2)."""
    x = np.asarray(x, dtype=float)
    return x - np.floor(x + 0.5)


def dual_fiber_offsets(D: DilationMatrix) -> list[np.ndarray]:
    """The m points (D^*)^{-1} gamma mod Z^d, gamma over cosets of D^*.

    These enumerate the fiber of the torus endomorphism zeta -> D^* zeta;
    they are pairwise distinct mod Z^d.
    """
    Dt = make_dilation(D.entries.T)
    reps = coset_reps(Dt)
    inv = np.linalg.inv(Dt.matrix())
    return [wrap_torus(inv @ rep.astype(float)) for rep in reps]


def level_embedding(D: DilationMatrix, n: int, n_max: int = DEFAULT_N_MAX) -> Embedding:
    """Embedding gamma -> D^{-n} gamma with annihilator basis (D^*)^n."""
    if abs(n) > n_max:
        raise LevelOverflow(f"|n|={abs(n)} exceeds n_max={n_max}")
    return Embedding(D.power(-n))


def character_defect(E: Embedding, window: int = 3, radius: int = 3) -> float:
    """max |exp(2 pi i <A gamma, beta>) - 1| over lattice/annihilator windows.

    Zero (up to rounding) by construction; exposed as a diagnostic of the
    annihilator basis.
    """
    d = E.dim
    gammas = _integer_box_points(-window * np.ones(d), window * np.ones(d))
    betas = _integer_box_points(-radius * np.ones(d), radius * np.ones(d)).astype(float)
    betas = betas @ E.ann_basis.T
    pair = (gammas.astype(float) @ E.matrix_A.T) @ betas.T
    return float(np.max(np.abs(np.exp(2j * np.pi * pair) - 1.0)))
