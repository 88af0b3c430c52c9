"""Multiplicative-update NMF with pixel-adaptive lp sparsity.

Objective::

    0.5 * ||Y - M A||_F^2 + lam * sum_kn (A_kn + xi) ** (1 - h_n)

where ``h`` is the scaled data-guided map. A constant map of 0 recovers l1
regularization and a constant map of 0.5 recovers l1/2 regularization; both
also have dedicated kinds (``"l1"``, ``"lhalf"``) used as baselines.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .core import DgMap, FactorPair, SolverConfig, validate_cube
from .errors import BadKError, DegenerateRowError, ShapeMismatchError

logger = logging.getLogger(__name__)

# added to every multiplicative-update denominator
DELTA = 1e-12


@dataclass(frozen=True, eq=False)
class Regularizer:
    kind: str = "none"
    lam: float = 0.0
    xi: float = 1e-8
    dgmap: DgMap | None = None

    def __post_init__(self):
        if self.kind not in ("none", "l1", "lhalf", "dg"):
            raise ValueError(f"unknown regularizer kind {self.kind!r}")
        if self.lam < 0:
            raise ValueError("lambda must be >= 0")
        if self.kind == "dg" and self.dgmap is None:
            raise ValueError("data-guided regularizer needs a DgMap")
        if self.kind != "dg" and self.dgmap is not None:
            raise ValueError("only the data-guided regularizer takes a DgMap")

    @property
    def h(self):
        return self.dgmap.scaled

    def check(self, n_pixels):
        if self.kind == "dg" and len(self.dgmap) != n_pixels:
            raise ShapeMismatchError(f"DgMap has {len(self.dgmap)} entries, cube has {n_pixels} pixels")

    def penalty(self, A):
        if self.kind == "none" or self.lam == 0:
            return 0.0
        if self.kind == "l1":
            return self.lam * float(np.abs(A).sum())
        if self.kind == "lhalf":
            return self.lam * float(np.sqrt(A + self.xi).sum())
        return self.lam * float(((A + self.xi) ** (1.0 - self.h)).sum())

    def gradient(self, A):
        """Derivative of the penalty, the extra term in the abundance denominator."""
        if self.kind == "none" or self.lam == 0:
            return 0.0
        if self.kind == "l1":
            return self.lam
        if self.kind == "lhalf":
            return 0.5 * self.lam * (A + self.xi) ** -0.5
        h = self.h
        g = A + self.xi
        np.power(g, -h, out=g)
        g *= self.lam * (1.0 - h)
        return g


@dataclass
class RunTrace:
    objective_per_iter: list = field(default_factory=list)
    relative_decrements: list = field(default_factory=list)
    iterations_run: int = 0
    stop_reason: str = "MaxIters"


def _arrays(cube, factors):
    Y = cube.data if hasattr(cube, "data") else np.asarray(cube, dtype=np.float64)
    M, A = factors.endmembers, factors.abundances
    if M.shape[0] != Y.shape[0] or A.shape[1] != Y.shape[1]:
        raise ShapeMismatchError(f"Y {Y.shape} vs M {M.shape}, A {A.shape}")
    return Y, M, A


def objective(cube, factors, reg=None):
    Y, M, A = _arrays(cube, factors)
    reg = reg or Regularizer()
    reg.check(Y.shape[1])
    return _fit(Y, M, A, reg)


def _step_m(Y, M, A):
    return M * (Y @ A.T) / (M @ (A @ A.T) + DELTA)


def _step_a(Y, M, A, reg):
    return A * (M.T @ Y) / ((M.T @ M) @ A + reg.gradient(A) + DELTA)


def _fit(Y, M, A, reg, work=None):
    # ``work`` is an L x N scratch buffer; reusing it avoids a large allocation per call
    R = np.matmul(M, A, out=work)
    np.subtract(Y, R, out=R)
    return 0.5 * float(np.vdot(R, R)) + reg.penalty(A)


def update_endmembers(cube, factors):
    Y, M, A = _arrays(cube, factors)
    return _step_m(Y, M, A)


def update_abundances(cube, factors, reg=None):
    Y, M, A = _arrays(cube, factors)
    reg = reg or Regularizer()
    reg.check(Y.shape[1])
    return _step_a(Y, M, A, reg)


def rescale_factors(factors):
    """Normalize every abundance row to unit l1 norm, moving the scale into M."""
    M, A = factors.endmembers, factors.abundances
    s = np.abs(A).sum(axis=1)
    zero = np.flatnonzero(s == 0)
    if zero.size:
        raise DegenerateRowError(int(zero[0]))
    return FactorPair(M * s, A / s[:, None])


def normalize_pixels(A):
    """Column sum-to-one view of an abundance matrix, for display and evaluation."""
    A = np.asarray(A, dtype=np.float64)
    s = A.sum(axis=0)
    return np.divide(A, s, out=np.zeros_like(A), where=s > 0)


def initialize_factors(cube, k, seed=0, scheme="random"):
    """Strictly positive starting factors.

    ``random`` draws both matrices from U(0.1, 1). ``data_pixels`` uses ``k``
    distinct random pixels (plus a 1e-3 floor) as endmembers and a uniform
    random abundance matrix.
    """
    Y = cube.data
    L, N = Y.shape
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= min(L, N):
        raise BadKError(f"k must be an integer in [1, {min(L, N)}], got {k}")
    rng = np.random.default_rng(seed)
    if scheme == "random":
        M = rng.uniform(0.1, 1.0, size=(L, k))
        A = rng.uniform(0.1, 1.0, size=(k, N))
    elif scheme == "data_pixels":
        picks = rng.choice(N, size=k, replace=False)
        M = Y[:, picks] + 1e-3
        A = rng.uniform(0.1, 1.0, size=(k, N))
    else:
        raise ValueError(f"unknown init scheme {scheme!r}")
    return FactorPair(M, A)


def regularizer_from_config(config, cube=None):
    """Build the regularizer; a data-guided one without a map estimates it from ``cube``."""
    kind = config.regularizer
    dgmap = config.dgmap if kind == "dg" else None
    if kind == "dg" and dgmap is None:
        if cube is None:
            raise ValueError("data-guided regularizer needs a DgMap or a cube to estimate it")
        from .dgmap import estimate_dgmap

        _, dgmap = estimate_dgmap(cube, sigma=config.sigma, alpha=config.alpha,
                                  epsilon=config.epsilon, window=config.window,
                                  beta=config.beta, cg_tol=config.cg_tol,
                                  cg_max_iters=config.cg_max_iters)
    reg = Regularizer(kind, config.lam if kind != "none" else 0.0, config.xi, dgmap)
    if cube is not None:
        reg.check(cube.n_pixels)
    return reg


def run(cube, k, config=None, init=None):
    """Alternate abundance update, endmember update and row rescaling.

    With ``config.regularizer == "dg"`` and no ``config.dgmap`` the map is
    estimated from the cube first, using the config's map parameters.

    Stops when the relative decrement of the objective falls below
    ``config.rel_tol`` or after ``config.max_iters`` iterations. ``init``
    overrides the starting factors. Returns ``(factors, trace)``; the trace
    holds the objective of the initial factors followed by one value per
    iteration.
    """
    config = config or SolverConfig(regularizer="none")
    validate_cube(cube)
    reg = regularizer_from_config(config, cube)
    factors = init if init is not None else initialize_factors(cube, k, config.seed, config.init)
    if factors.k != k:
        raise BadKError(f"initial factors have K={factors.k}, expected {k}")
    Y = cube.data
    M, A = factors.endmembers, factors.abundances

    trace = RunTrace()
    work = np.empty_like(Y)
    prev = _fit(Y, M, A, reg, work)
    trace.objective_per_iter.append(prev)
    for it in range(1, config.max_iters + 1):
        A = _step_a(Y, M, A, reg)
        M = _step_m(Y, M, A)
        s = A.sum(axis=1)
        if np.any(s == 0):
            raise DegenerateRowError(int(np.flatnonzero(s == 0)[0]))
        M = M * s
        A = A / s[:, None]

        cur = _fit(Y, M, A, reg, work)
        dec = (prev - cur) / prev if prev > 0 else 0.0
        trace.objective_per_iter.append(cur)
        trace.relative_decrements.append(dec)
        trace.iterations_run = it
        prev = cur
        if dec < config.rel_tol:
            trace.stop_reason = "RelTol"
            break
    logger.debug("stopped after %d iterations (%s)", trace.iterations_run, trace.stop_reason)
    return FactorPair(M, A), trace
