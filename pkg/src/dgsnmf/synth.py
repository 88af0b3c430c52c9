"""Synthetic scenes with known endmembers and spatially structured abundances.

Endmember spectra are smooth sums of Gaussian bumps. The grid is split into
K regions (vertical strips for K <= 4, rows of strips otherwise). Pixels inside
a region are pure; pixels within a transition band of ``transition_width``
pixels across each region boundary blend the two neighbouring endmembers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import FactorPair, HyperCube
from .errors import InfeasibleSpecError
from .metrics import sad_matrix

MIN_PAIRWISE_SAD = 0.2


@dataclass(frozen=True)
class SceneSpec:
    width: int = 20
    height: int = 20
    channels: int = 30
    k: int = 3
    transition_width: int = 3
    noise_sigma: float = 0.0
    seed: int = 0
    mixing_profile: str = "hard_regions"

    def __post_init__(self):
        if self.k < 2:
            raise InfeasibleSpecError("need at least two endmembers")
        if self.transition_width < 1:
            raise InfeasibleSpecError("transition_width must be >= 1")
        if self.noise_sigma < 0:
            raise InfeasibleSpecError("noise_sigma must be >= 0")
        if self.mixing_profile not in ("hard_regions", "linear_gradient"):
            raise InfeasibleSpecError(f"unknown mixing profile {self.mixing_profile!r}")
        if self.width < 1 or self.height < 1 or self.channels < 1:
            raise InfeasibleSpecError("scene dimensions must be positive")


def smooth_spectra(channels, k, rng, max_tries=1000):
    """``channels x k`` matrix of bump spectra with pairwise SAD >= 0.2 rad."""
    x = np.arange(channels, dtype=np.float64)
    for _ in range(max_tries):
        M = np.empty((channels, k))
        for j in range(k):
            spec = np.full(channels, rng.uniform(0.02, 0.1))
            for _ in range(rng.integers(2, 5)):
                centre = rng.uniform(0, channels)
                width = rng.uniform(channels / 12, channels / 4) + 0.5
                spec += rng.uniform(0.2, 0.8) * np.exp(-0.5 * ((x - centre) / width) ** 2)
            M[:, j] = spec / max(1.0, spec.max())
        S = sad_matrix(M, M)
        if np.all(S[np.triu_indices(k, 1)] >= MIN_PAIRWISE_SAD):
            return M
    raise InfeasibleSpecError(f"could not draw {k} distinct spectra over {channels} channels")


def _band_weights(length, n_parts, tw, profile):
    """``(n_parts, length)`` weights along one axis; columns sum to one."""
    W = np.zeros((n_parts, length))
    bounds = [round(i * length / n_parts) for i in range(n_parts + 1)]
    if profile == "linear_gradient":
        # piecewise-linear ramp between part centres
        centres = [(bounds[i] + bounds[i + 1] - 1) / 2 for i in range(n_parts)]
        pos = np.arange(length, dtype=np.float64)
        for i in range(n_parts):
            W[i] = np.interp(pos, centres, np.eye(n_parts)[i])
        return W
    for i in range(n_parts):
        W[i, bounds[i]:bounds[i + 1]] = 1.0
    t = np.arange(1, tw + 1) / (tw + 1)
    for i in range(1, n_parts):
        start = bounds[i] - tw // 2
        if start < 0 or start + tw > length:
            raise InfeasibleSpecError(f"transition band {i} leaves the {length}-pixel axis")
        W[:, start:start + tw] = 0.0
        W[i - 1, start:start + tw] = 1.0 - t
        W[i, start:start + tw] = t
    if not np.all((W == 1.0).any(axis=1)):
        raise InfeasibleSpecError(
            f"{n_parts} regions with {tw}-pixel transitions do not fit in {length} pixels"
        )
    return W


def region_layout(k):
    """Number of strips in each row of regions."""
    if k <= 4:
        return [k]
    rows = math.ceil(math.sqrt(k))
    rows = math.ceil(k / math.ceil(k / rows))
    base, extra = divmod(k, rows)
    return [base + (1 if r < extra else 0) for r in range(rows)]


def abundance_maps(spec):
    """``K x N`` ground-truth abundances for the scene layout, columns summing to one."""
    layout = region_layout(spec.k)
    tw = spec.transition_width
    if min(layout) < 1:
        raise InfeasibleSpecError("empty region row")
    if len(layout) == 1:
        row_w = np.ones((1, spec.height))
    else:
        row_w = _band_weights(spec.height, len(layout), tw, spec.mixing_profile)
    A = np.zeros((spec.k, spec.height, spec.width))
    first = 0
    for r, n_strips in enumerate(layout):
        if n_strips == 1:
            col_w = np.ones((1, spec.width))
        else:
            col_w = _band_weights(spec.width, n_strips, tw, spec.mixing_profile)
        A[first:first + n_strips] = row_w[r][None, :, None] * col_w[:, None, :]
        first += n_strips
    return A.reshape(spec.k, -1)


def generate(spec):
    """Return ``(cube, truth)`` for a scene spec; deterministic in ``spec.seed``."""
    rng = np.random.default_rng(spec.seed)
    M = smooth_spectra(spec.channels, spec.k, rng)
    A = abundance_maps(spec)
    Y = M @ A
    if spec.noise_sigma > 0:
        Y = np.maximum(Y + rng.normal(0.0, spec.noise_sigma, size=Y.shape), 0.0)
    return HyperCube(Y, spec.width, spec.height), FactorPair(M, A)
