"""Domain types shared by every module.

Matrices follow the unmixing convention: a cube is an ``L x N`` array whose
columns are pixel spectra, endmembers are the columns of ``M`` (``L x K``) and
abundances the columns of ``A`` (``K x N``).

Pixel ``n`` sits at grid position ``(row, col) = (n // width, n % width)``, i.e.
pixels are enumerated row by row. An image stored as a ``(height, width, L)``
array therefore maps to ``image.reshape(-1, L).T``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NegativeValueError, NonFiniteError, OutOfRangeError, ShapeMismatchError

REGULARIZERS = ("none", "l1", "lhalf", "dg")


def _frozen(array, ndim):
    out = np.array(array, dtype=np.float64, copy=True)
    if out.ndim != ndim:
        raise ShapeMismatchError(f"expected a {ndim}-d array, got shape {out.shape}")
    out.setflags(write=False)
    return out


def _check_entries(array):
    bad = ~np.isfinite(array)
    if bad.any():
        raise NonFiniteError(tuple(int(i) for i in np.argwhere(bad)[0]))
    neg = array < 0
    if neg.any():
        raise NegativeValueError(tuple(int(i) for i in np.argwhere(neg)[0]))


def index_to_grid(n, width):
    """Return ``(row, col)`` of pixel index ``n``."""
    return divmod(n, width)


def grid_to_index(row, col, width):
    return row * width + col


@dataclass(frozen=True, eq=False)
class HyperCube:
    """Nonnegative ``L x N`` pixel-spectra matrix laid out on a ``height x width`` grid.

    Construction does not validate; call :func:`validate_cube` (or use
    :meth:`from_image`) when the data come from outside the package.
    """

    data: np.ndarray
    width: int
    height: int

    def __post_init__(self):
        object.__setattr__(self, "data", _frozen(self.data, 2))

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def n_pixels(self):
        return self.data.shape[1]

    @classmethod
    def from_image(cls, image):
        """Build a validated cube from a ``(height, width, L)`` array."""
        image = np.asarray(image, dtype=np.float64)
        height, width, channels = image.shape
        cube = cls(image.reshape(height * width, channels).T, width, height)
        validate_cube(cube)
        return cube

    def to_image(self):
        return self.data.T.reshape(self.height, self.width, self.channels)


def validate_cube(cube):
    """Raise if ``cube`` breaks a HyperCube invariant; return ``None`` otherwise."""
    data = cube.data
    if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
        raise ShapeMismatchError(f"cube data must be a non-empty L x N matrix, got {data.shape}")
    if cube.width < 1 or cube.height < 1 or cube.width * cube.height != data.shape[1]:
        raise ShapeMismatchError(
            f"grid {cube.width}x{cube.height} does not hold {data.shape[1]} pixels"
        )
    _check_entries(data)


@dataclass(frozen=True, eq=False)
class FactorPair:
    """Endmembers ``M`` (``L x K``) and abundances ``A`` (``K x N``)."""

    endmembers: np.ndarray
    abundances: np.ndarray

    def __post_init__(self):
        M = _frozen(self.endmembers, 2)
        A = _frozen(self.abundances, 2)
        if M.shape[1] != A.shape[0]:
            raise ShapeMismatchError(f"M is {M.shape} but A is {A.shape}")
        _check_entries(M)
        _check_entries(A)
        if M.shape[1] > min(M.shape[0], A.shape[1]):
            warnings.warn(
                f"K={M.shape[1]} exceeds min(L, N)={min(M.shape[0], A.shape[1])}",
                stacklevel=3,
            )
        object.__setattr__(self, "endmembers", M)
        object.__setattr__(self, "abundances", A)

    @property
    def k(self):
        return self.endmembers.shape[1]

    def reconstruct(self):
        return self.endmembers @ self.abundances


@dataclass(frozen=True, eq=False)
class DgMap:
    """Per-pixel guidance. ``raw`` is the unnormalized map, ``scaled`` lies in [0, 1)."""

    raw: np.ndarray
    scaled: np.ndarray

    def __post_init__(self):
        raw = _frozen(self.raw, 1)
        scaled = _frozen(self.scaled, 1)
        if raw.shape != scaled.shape:
            raise ShapeMismatchError("raw and scaled maps differ in length")
        if np.any(scaled < 0) or np.any(scaled >= 1) or not np.all(np.isfinite(scaled)):
            raise OutOfRangeError("scaled map values must lie in [0, 1)")
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "scaled", scaled)

    def __len__(self):
        return self.raw.shape[0]

    @classmethod
    def from_raw(cls, raw, beta=1e-8):
        from .dgmap import rescale

        raw = np.asarray(raw, dtype=np.float64)
        return cls(raw, rescale(raw, beta))


@dataclass(frozen=True)
class SolverConfig:
    """Every tunable of the pipeline, with defaults inside the documented ranges.

    ``regularizer`` is one of ``"none"``, ``"l1"``, ``"lhalf"``, ``"dg"``; the
    data-guided kind needs ``dgmap`` (a :class:`DgMap`) unless the caller
    estimates it first.
    """

    lam: float = 0.1
    xi: float = 1e-8
    sigma: float = 0.02
    alpha: float = 1e-5
    epsilon: float = 1e-5
    beta: float = 1e-8
    window: int = 3
    max_iters: int = 1000
    rel_tol: float = 1e-6
    seed: int = 0
    regularizer: str = "dg"
    dgmap: DgMap | None = field(default=None, compare=False)
    init: str = "random"
    cg_tol: float = 1e-8
    cg_max_iters: int | None = None

    def __post_init__(self):
        if self.regularizer not in REGULARIZERS:
            raise ValueError(f"unknown regularizer {self.regularizer!r}")
        if self.lam < 0:
            raise OutOfRangeError("lambda must be >= 0")
        for name in ("xi", "sigma", "alpha", "epsilon", "beta"):
            if getattr(self, name) <= 0:
                raise OutOfRangeError(f"{name} must be > 0")
        if self.window < 3 or self.window % 2 == 0:
            raise OutOfRangeError("window must be odd and >= 3")
        if self.max_iters < 1:
            raise OutOfRangeError("max_iters must be >= 1")
