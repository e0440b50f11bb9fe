"""Single-cluster optimal fitting: the k=1 base case used by every solver.

The optimal r-flat under the sum-of-squared-distances objective passes
through the weighted centroid and is spanned by the top-r eigenvectors of
the weighted scatter matrix; its cost is the sum of the d-r smallest
eigenvalues (Eckart-Young).  Eigen-decomposing the d x d scatter matrix
rather than the n x d data matrix keeps the cost at O(d n^2 + d^3), which
is the right trade-off here because d is small in every use case.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import AffineDependenceError, DimensionMismatchError, ScalarModeError
from .geometry import (
    MODE_FLOAT,
    MODE_RATIONAL,
    AffineFlat,
    Hyperplane,
    WeightedPointCloud,
)

# Eigenvalues in [-EIG_CLAMP, 0) are numerical PSD violations; clamp to 0.
EIG_CLAMP = 1e-12


@dataclass(frozen=True)
class FitResult:
    """Fitted flat, its cost, and the full scatter spectrum (descending)."""

    flat: AffineFlat
    cost: float
    spectrum: tuple

    def __post_init__(self):
        object.__setattr__(self, "spectrum", tuple(float(s) for s in self.spectrum))


def centroid(cloud: WeightedPointCloud):
    """Weighted mean of the cloud; exact in rational mode."""
    if not cloud.records:
        raise ValueError("centroid of an empty cloud")
    if cloud.mode == MODE_FLOAT:
        X = cloud.coords_array()
        w = cloud.weights_array()
        return tuple((w @ X) / w.sum())
    total = Fraction(0)
    acc = [Fraction(0)] * cloud.dim
    for rec in cloud.records:
        total += rec.mult
        for i, c in enumerate(rec.coords):
            acc[i] += rec.mult * Fraction(c)
    return tuple(a / total for a in acc)


def scatter_matrix(cloud: WeightedPointCloud) -> np.ndarray:
    """Weighted scatter sum_i m_i (x_i - C)(x_i - C)^T, float mode only."""
    if cloud.mode != MODE_FLOAT:
        raise ScalarModeError("scatter_matrix requires a float-mode cloud")
    X = cloud.coords_array()
    w = cloud.weights_array()
    C = (w @ X) / w.sum()
    D = X - C
    return (D * w[:, None]).T @ D


def _sorted_eig(S: np.ndarray):
    """Eigenpairs sorted descending with deterministic tie-breaking.

    Ties keep ascending original index; each eigenvector's sign is fixed so
    that its largest-magnitude component (first such index) is positive.
    """
    w, V = np.linalg.eigh(S)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    V = V[:, order]
    for j in range(V.shape[1]):
        col = V[:, j]
        idx = int(np.argmax(np.abs(col)))
        if col[idx] < 0:
            V[:, j] = -col
    w[(w < 0) & (w >= -EIG_CLAMP)] = 0.0
    return w, V


def best_fit_flat(cloud: WeightedPointCloud, r: int) -> FitResult:
    """Optimal r-flat for the whole cloud: centroid plus top-r principal directions.

    Cost equals the sum of the d-r smallest scatter eigenvalues.  Output is
    deterministic under spectrum ties (stable sort, sign-fixed eigenvectors),
    so permuting input records cannot change the fitted flat.
    """
    if cloud.mode != MODE_FLOAT:
        raise ScalarModeError("best_fit_flat operates on float-mode clouds; "
                              "convert explicitly with cloud.to_float()")
    if not cloud.records:
        raise ValueError("cannot fit a flat to an empty cloud")
    d = cloud.dim
    if not (0 <= r <= d - 1):
        raise ValueError(f"flat dimension must satisfy 0 <= r <= d-1, got r={r}, d={d}")
    X = cloud.coords_array()
    w = cloud.weights_array()
    C = (w @ X) / w.sum()
    D = X - C
    S = (D * w[:, None]).T @ D
    evals, evecs = _sorted_eig(S)
    basis = tuple(tuple(evecs[:, j]) for j in range(r))
    B = evecs[:, :r]
    offset = C - B @ (B.T @ C) if r else C.copy()
    flat = AffineFlat(d, r, basis, tuple(offset), MODE_FLOAT)
    cost = float(np.sum(evals[r:]))
    return FitResult(flat=flat, cost=max(cost, 0.0), spectrum=tuple(evals))


def _affine_rank_rows(points: Sequence[Sequence[Fraction]]
                      ) -> list[list[Fraction]]:
    """Row-echelon basis of the difference space of the given points."""
    base = points[0]
    rows: list[list[Fraction]] = []
    for p in points[1:]:
        v = [Fraction(a) - Fraction(b) for a, b in zip(p, base)]
        v = _reduce_against(v, rows)
        if any(v):
            rows.append(v)
    return rows


def _reduce_against(v: list, rows: list[list]) -> list:
    v = list(v)
    for row in rows:
        pivot = next(i for i, c in enumerate(row) if c != 0)
        if v[pivot] != 0:
            f = v[pivot] / row[pivot]
            v = [a - f * b for a, b in zip(v, row)]
    return v


def fit_hyperplane_exact(points: Sequence[Sequence]) -> Hyperplane:
    """Exact normalized hyperplane through up to d affinely independent points.

    With d points spanning affine dimension d-1 the hyperplane is unique.
    With fewer points the affine hull is completed deterministically by
    appending standard-basis directions e_1, e_2, ... in order, skipping any
    that would push the dimension past d-1.
    """
    if not points:
        raise ValueError("need at least one point")
    for p in points:
        if any(isinstance(c, float) for c in p):
            raise ScalarModeError("fit_hyperplane_exact requires exact coordinates")
    pts = [tuple(Fraction(c) if not isinstance(c, Fraction) else c for c in p)
           for p in points]
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise DimensionMismatchError("points of mixed dimension")
    if len(pts) > d:
        raise ValueError(f"at most d={d} points may be supplied")
    rows = _affine_rank_rows(pts)
    if len(rows) != len(pts) - 1:
        raise AffineDependenceError("points are affinely dependent")
    for i in range(d):
        if len(rows) == d - 1:
            break
        e = [Fraction(0)] * d
        e[i] = Fraction(1)
        v = _reduce_against(e, rows)
        if any(v):
            rows.append(v)
    # Exact null space of the (d-1) x d direction matrix.
    normal = _null_vector(rows, d)
    base = pts[0]
    c0 = -sum(n * x for n, x in zip(normal, base))
    return Hyperplane((c0, *normal))


def _null_vector(rows: list[list[Fraction]], d: int) -> list[Fraction]:
    """One nonzero solution of rows @ c = 0 for an echelon system of rank d-1."""
    mat = [list(r) for r in rows]
    pivots = []
    col = 0
    for i in range(len(mat)):
        while col < d and all(mat[k][col] == 0 for k in range(i, len(mat))):
            col += 1
        sel = next(k for k in range(i, len(mat)) if mat[k][col] != 0)
        mat[i], mat[sel] = mat[sel], mat[i]
        piv = mat[i][col]
        mat[i] = [c / piv for c in mat[i]]
        for k in range(len(mat)):
            if k != i and mat[k][col] != 0:
                f = mat[k][col]
                mat[k] = [a - f * b for a, b in zip(mat[k], mat[i])]
        pivots.append(col)
        col += 1
    free = next(j for j in range(d) if j not in pivots)
    sol = [Fraction(0)] * d
    sol[free] = Fraction(1)
    for i, pc in enumerate(pivots):
        sol[pc] = -mat[i][free]
    return sol
