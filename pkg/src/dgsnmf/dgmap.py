"""Data-guided map estimation.

The map starts as a sum of similarities between each pixel and its
4-connected neighbours, is propagated over the image by solving a sparse
system built on the matting Laplacian, and is finally rescaled into [0, 1).
High values mark pixels that look like their neighbours (likely pure), low
values mark transition areas (likely mixed).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import DgMap, validate_cube
from .errors import (
    ImageTooSmallError,
    InvalidBandwidthError,
    NoConvergenceError,
    OutOfRangeError,
    ShapeMismatchError,
    ZeroNormError,
)


def dot_similarity(yi, yj):
    yi = np.asarray(yi, dtype=np.float64)
    yj = np.asarray(yj, dtype=np.float64)
    if yi.shape != yj.shape:
        raise ShapeMismatchError("spectra differ in length")
    ni, nj = np.linalg.norm(yi), np.linalg.norm(yj)
    if ni == 0 or nj == 0:
        raise ZeroNormError("dot similarity of a zero spectrum")
    return float(yi @ yj / (ni * nj))


def heat_similarity(yi, yj, sigma):
    if not sigma > 0:
        raise InvalidBandwidthError(f"sigma must be > 0, got {sigma}")
    yi = np.asarray(yi, dtype=np.float64)
    yj = np.asarray(yj, dtype=np.float64)
    if yi.shape != yj.shape:
        raise ShapeMismatchError("spectra differ in length")
    d = yj - yi
    return float(np.exp(-(d @ d) / sigma))


def _neighbour_pairs(width, height):
    """Index pairs of horizontally and vertically adjacent pixels (each once)."""
    idx = np.arange(width * height).reshape(height, width)
    right = np.stack([idx[:, :-1].ravel(), idx[:, 1:].ravel()])
    down = np.stack([idx[:-1, :].ravel(), idx[1:, :].ravel()])
    return np.concatenate([right, down], axis=1)


def initial_dgmap(cube, sigma=0.02, measure="heat", beta=1e-8):
    """Sum of similarities to the existing 4-neighbours of every pixel.

    Border pixels only count the neighbours they have, so in a constant image
    the raw value is 4 inside, 3 on edges and 2 at corners.
    """
    validate_cube(cube)
    Y = cube.data
    i, j = _neighbour_pairs(cube.width, cube.height)
    if measure == "heat":
        if not sigma > 0:
            raise InvalidBandwidthError(f"sigma must be > 0, got {sigma}")
        diff = Y[:, j] - Y[:, i]
        s = np.exp(-np.einsum("ln,ln->n", diff, diff) / sigma)
    elif measure == "dot":
        norms = np.linalg.norm(Y, axis=0)
        if np.any(norms == 0):
            raise ZeroNormError(f"pixel {int(np.argmin(norms))} has a zero spectrum")
        s = np.einsum("ln,ln->n", Y[:, i], Y[:, j]) / (norms[i] * norms[j])
    else:
        raise ValueError(f"unknown similarity measure {measure!r}")
    raw = np.zeros(cube.n_pixels)
    np.add.at(raw, i, s)
    np.add.at(raw, j, s)
    return DgMap.from_raw(raw, beta)


def window_indices(width, height, window=3):
    """``(n_windows, window**2)`` pixel indices of every fully contained window."""
    r = window // 2
    if width < window or height < window:
        raise ImageTooSmallError(f"{width}x{height} image cannot hold a {window}x{window} window")
    idx = np.arange(width * height).reshape(height, width)
    blocks = np.lib.stride_tricks.sliding_window_view(idx, (window, window))
    assert blocks.shape[:2] == (height - 2 * r, width - 2 * r)
    return blocks.reshape(-1, window * window)


def window_projection(Ybar, epsilon, method="svd"):
    """``Ybar.T (Ybar Ybar.T + eps I)^-1 Ybar`` for centred windows.

    ``Ybar`` has shape ``(..., L, m)``. The ``"svd"`` path works in the
    ``m``-dimensional pixel space through the thin SVD ``Ybar = U s W.T``, giving
    ``W diag(s^2 / (s^2 + eps)) W.T`` without forming any ``L x L`` matrix.
    Solving ``(Ybar.T Ybar + eps I) X = Ybar.T Ybar`` directly would be the same
    operator but loses about ``||Ybar||^2 / eps`` in relative accuracy, since the
    Gram matrix is rank deficient. ``"direct"`` inverts the ``L x L`` matrix and
    exists for checking.
    """
    Ybar = np.asarray(Ybar, dtype=np.float64)
    L = Ybar.shape[-2]
    if method == "svd":
        _, s, Wt = np.linalg.svd(Ybar, full_matrices=False)
        f = s * s / (s * s + epsilon)
        return np.swapaxes(Wt, -1, -2) @ (f[..., :, None] * Wt)
    if method == "direct":
        B = Ybar @ np.swapaxes(Ybar, -1, -2) + epsilon * np.eye(L)
        return np.swapaxes(Ybar, -1, -2) @ np.linalg.solve(B, Ybar)
    raise ValueError(f"unknown method {method!r}")


def window_laplacians(windows, epsilon):
    """Per-window blocks ``G G`` with ``G = P - Ybar.T (Ybar Ybar.T + eps I)^-1 Ybar``.

    ``windows`` has shape ``(n_windows, L, m)``. The returned blocks are exactly
    symmetric: the upper triangle is computed and mirrored.
    """
    m = windows.shape[2]
    Ybar = windows - windows.mean(axis=2, keepdims=True)
    G = np.eye(m) - 1.0 / m - window_projection(Ybar, epsilon)
    G = np.triu(G) + np.swapaxes(np.triu(G, 1), 1, 2)
    blocks = G @ G
    return np.triu(blocks) + np.swapaxes(np.triu(blocks, 1), 1, 2)


@dataclass(frozen=True, eq=False)
class SparseLaplacian:
    """Symmetric ``n x n`` matting Laplacian in CSR form."""

    matrix: sp.csr_matrix

    @property
    def n(self):
        return self.matrix.shape[0]

    def toarray(self):
        return self.matrix.toarray()

    def __matmul__(self, x):
        return self.matrix @ x


def build_matting_laplacian(cube, epsilon=1e-5, window=3):
    """Sum of per-window Laplacian blocks over every fully contained window."""
    validate_cube(cube)
    if not epsilon > 0:
        raise OutOfRangeError("epsilon must be > 0")
    if window < 3 or window % 2 == 0:
        raise OutOfRangeError("window must be odd and >= 3")
    win = window_indices(cube.width, cube.height, window)
    n_win, m = win.shape
    windows = np.moveaxis(cube.data[:, win], 0, 1)  # (n_win, L, m)
    blocks = window_laplacians(windows, epsilon)

    rows = np.repeat(win, m, axis=1).ravel()
    cols = np.tile(win, (1, m)).ravel()
    vals = blocks.reshape(-1)
    # stable sort keeps window order per entry so (p, q) and (q, p) sum identically
    n = cube.n_pixels
    order = np.argsort(rows * n + cols, kind="stable")
    keys = (rows * n + cols)[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    summed = np.add.reduceat(vals[order], starts)
    ukeys = keys[starts]
    L = sp.csr_matrix((summed, (ukeys // n, ukeys % n)), shape=(n, n))
    L.sort_indices()
    return SparseLaplacian(L)


def conjugate_gradient(A, b, tol=1e-8, max_iters=None, x0=None):
    """Jacobi-preconditioned conjugate gradient for a sparse SPD matrix.

    Stops when the true residual satisfies ``||b - A x|| <= tol * ||b||``.
    Returns ``(x, iterations)``; raises NoConvergenceError otherwise.
    """
    A = sp.csr_matrix(A)
    n = A.shape[0]
    if max_iters is None:
        max_iters = 10 * n
    b = np.asarray(b, dtype=np.float64)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros(n), 0
    inv_diag = 1.0 / A.diagonal()
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    r = b - A @ x
    target = tol * bnorm
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    it = 0
    while it < max_iters:
        if np.linalg.norm(r) <= target:
            # recursive residual drifts; confirm against the true one
            r = b - A @ x
            if np.linalg.norm(r) <= target:
                return x, it
            z = inv_diag * r
            p = z.copy()
            rz = r @ z
        Ap = A @ p
        step = rz / (p @ Ap)
        x += step * p
        r -= step * Ap
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    res = np.linalg.norm(b - A @ x)
    if res <= target:
        return x, it
    raise NoConvergenceError(it, res / bnorm)


def fine_tune(laplacian, h0, alpha=1e-5, cg_tol=1e-8, cg_max_iters=None, beta=1e-8):
    """Solve ``(L + alpha I) h = alpha h0`` and return the refined map.

    ``h0`` may be a :class:`DgMap` (its raw values are used) or an array.
    The initial map is passed unnormalized; the final rescale absorbs its range.
    """
    if not alpha > 0:
        raise OutOfRangeError("alpha must be > 0")
    h0 = np.asarray(h0.raw if isinstance(h0, DgMap) else h0, dtype=np.float64)
    if h0.shape != (laplacian.n,):
        raise ShapeMismatchError(f"map of length {h0.shape} for a {laplacian.n}-pixel Laplacian")
    system = (laplacian.matrix + alpha * sp.identity(laplacian.n, format="csr")).tocsr()
    h, _ = conjugate_gradient(system, alpha * h0, tol=cg_tol, max_iters=cg_max_iters)
    return DgMap.from_raw(h, beta)


def rescale(h, beta=1e-8):
    """Min-max rescale into [0, 1); ``beta`` keeps the maximum strictly below 1."""
    if not beta > 0:
        raise OutOfRangeError("beta must be > 0")
    h = np.asarray(h, dtype=np.float64)
    lo, hi = h.min(), h.max()
    out = (h - lo) / (hi - lo + beta)
    # guard against rounding up to 1 when the range is huge relative to beta
    return np.minimum(out, np.nextafter(1.0, 0.0))


def constant_dgmap(n, value):
    """Map of ``n`` copies of ``value``: 0 gives l1 behaviour, 0.5 gives l1/2."""
    if not 0 <= value < 1:
        raise OutOfRangeError(f"constant map value must be in [0, 1), got {value}")
    h = np.full(n, float(value))
    return DgMap(h, h)


def estimate_dgmap(cube, sigma=0.02, alpha=1e-5, epsilon=1e-5, window=3, beta=1e-8,
                   measure="heat", cg_tol=1e-8, cg_max_iters=None):
    """Full estimation: initial map, fine tuning on the matting Laplacian, rescale.

    Returns ``(initial, refined)``.
    """
    initial = initial_dgmap(cube, sigma=sigma, measure=measure, beta=beta)
    lap = build_matting_laplacian(cube, epsilon=epsilon, window=window)
    refined = fine_tune(lap, initial, alpha=alpha, cg_tol=cg_tol,
                        cg_max_iters=cg_max_iters, beta=beta)
    return initial, refined
