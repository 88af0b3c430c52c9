"""Evaluation metrics: spectral angle, abundance RMSE, matching and Hoyer sparsity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import EmptyInputError, ShapeMismatchError, ZeroColumnError, ZeroNormError


def sad(m, m_hat):
    """Spectral angle distance in radians."""
    m = np.asarray(m, dtype=np.float64)
    m_hat = np.asarray(m_hat, dtype=np.float64)
    if m.shape != m_hat.shape:
        raise ShapeMismatchError("spectra differ in length")
    nm, nh = np.linalg.norm(m), np.linalg.norm(m_hat)
    if nm == 0 or nh == 0:
        raise ZeroNormError("spectral angle of a zero spectrum")
    return float(np.arccos(np.clip(m @ m_hat / (nm * nh), -1.0, 1.0)))


def sad_matrix(M_hat, M_true):
    """``S[i, j]`` is the angle between estimated column i and true column j."""
    M_hat = np.asarray(M_hat, dtype=np.float64)
    M_true = np.asarray(M_true, dtype=np.float64)
    nh = np.linalg.norm(M_hat, axis=0)
    nt = np.linalg.norm(M_true, axis=0)
    if np.any(nh == 0) or np.any(nt == 0):
        raise ZeroNormError("endmember with zero norm")
    cos = (M_hat.T @ M_true) / np.outer(nh, nt)
    return np.arccos(np.clip(cos, -1.0, 1.0))


def rmse(z, z_hat):
    z = np.asarray(z, dtype=np.float64)
    z_hat = np.asarray(z_hat, dtype=np.float64)
    if z.size == 0:
        raise EmptyInputError("rmse of an empty row")
    if z.shape != z_hat.shape:
        raise ShapeMismatchError("rows differ in length")
    return float(np.sqrt(np.mean((z - z_hat) ** 2)))


def _optimal_cost(S):
    if S.size == 0:
        return 0.0
    r, c = linear_sum_assignment(S)
    return float(S[r, c].sum())


def match_endmembers(M_hat, M_true, tol=1e-12):
    """Assignment minimizing total SAD; ``perm[i]`` is the true index of estimate ``i``.

    Among optimal assignments (within ``tol``) the lexicographically smallest
    is returned: estimate 0 takes the lowest admissible truth index, then 1, ...
    """
    M_hat = np.asarray(M_hat, dtype=np.float64)
    M_true = np.asarray(M_true, dtype=np.float64)
    if M_hat.shape != M_true.shape or M_hat.ndim != 2:
        raise ShapeMismatchError(f"{M_hat.shape} vs {M_true.shape}")
    S = sad_matrix(M_hat, M_true)
    K = S.shape[0]
    best = _optimal_cost(S)
    perm = np.empty(K, dtype=int)
    rows, cols = list(range(K)), list(range(K))
    spent = 0.0
    for i in range(K):
        rows.remove(i)
        for j in cols:
            rest = [c for c in cols if c != j]
            cost = spent + S[i, j] + _optimal_cost(S[np.ix_(rows, rest)])
            if cost <= best + tol:
                perm[i] = j
                spent += S[i, j]
                cols = rest
                break
    return perm


def hoyer_sparsity_map(A):
    """Per-pixel Hoyer sparsity ``(sqrt K - l1/l2) / (sqrt K - 1)`` of abundance columns."""
    A = np.asarray(A, dtype=np.float64)
    K = A.shape[0]
    if K < 2:
        raise ShapeMismatchError("Hoyer sparsity needs K >= 2")
    l2 = np.linalg.norm(A, axis=0)
    zero = np.flatnonzero(l2 == 0)
    if zero.size:
        raise ZeroColumnError(int(zero[0]))
    l1 = np.abs(A).sum(axis=0)
    rk = np.sqrt(K)
    return np.clip((rk - l1 / l2) / (rk - 1.0), 0.0, 1.0)


@dataclass(frozen=True)
class EvalReport:
    matching: np.ndarray
    sad_per_endmember: np.ndarray
    rmse_per_abundance: np.ndarray

    @property
    def mean_sad(self):
        return float(np.mean(self.sad_per_endmember))

    @property
    def mean_rmse(self):
        return float(np.mean(self.rmse_per_abundance))

    def rows(self):
        """One row per estimated endmember: index, matched truth, SAD (rad, deg), RMSE."""
        for i, (j, s, r) in enumerate(zip(self.matching, self.sad_per_endmember,
                                          self.rmse_per_abundance)):
            yield i, int(j), float(s), float(np.degrees(s)), float(r)


def evaluate(factors_hat, factors_true, normalize_pixels=False):
    """Match endmembers, then score each matched pair.

    ``normalize_pixels`` rescales every estimated abundance column to sum to one
    before the RMSE; by default abundances are compared as produced.
    """
    M_hat, A_hat = factors_hat.endmembers, factors_hat.abundances
    M_true, A_true = factors_true.endmembers, factors_true.abundances
    if M_hat.shape != M_true.shape or A_hat.shape != A_true.shape:
        raise ShapeMismatchError(
            f"estimate M{M_hat.shape} A{A_hat.shape} vs truth M{M_true.shape} A{A_true.shape}"
        )
    if normalize_pixels:
        from .unmix import normalize_pixels as _norm

        A_hat = _norm(A_hat)
    perm = match_endmembers(M_hat, M_true)
    sads = np.array([sad(M_true[:, j], M_hat[:, i]) for i, j in enumerate(perm)])
    rmses = np.array([rmse(A_true[j], A_hat[i]) for i, j in enumerate(perm)])
    return EvalReport(perm, sads, rmses)
