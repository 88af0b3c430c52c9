"""File formats and image renders.

Cube files start with an ASCII line ``HSCUBE1 <width> <height> <channels>``
followed by ``8 * L * N`` bytes of little-endian float64, pixel-major (all
channels of pixel 0, then pixel 1, ...). Matrices are CSV with 17 significant
digits, which round-trips float64 exactly. Images are binary PPM (P6) and
PGM (P5).
"""

from __future__ import annotations

import csv

import numpy as np

from .core import DgMap, HyperCube, validate_cube
from .errors import (
    BadMagicError,
    DegeneratePixelError,
    ShapeMismatchError,
    TooManyEndmembersError,
    TruncatedPayloadError,
)

MAGIC = "HSCUBE1"

DEFAULT_PALETTE = ((255, 0, 0), (0, 255, 0), (0, 0, 255), (0, 0, 0))


def write_cube(cube, path):
    validate_cube(cube)
    header = f"{MAGIC} {cube.width} {cube.height} {cube.channels}\n".encode("ascii")
    payload = np.ascontiguousarray(cube.data.T, dtype="<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def read_cube(path):
    with open(path, "rb") as fh:
        line = fh.readline(256)
        payload = fh.read()
    fields = line.decode("ascii", errors="replace").split()
    if not line.endswith(b"\n") or len(fields) != 4 or fields[0] != MAGIC:
        raise BadMagicError(f"{path}: not a {MAGIC} file")
    try:
        width, height, channels = (int(f) for f in fields[1:])
    except ValueError:
        raise BadMagicError(f"{path}: malformed header {line!r}") from None
    n = width * height
    need = 8 * channels * n
    if len(payload) < need:
        raise TruncatedPayloadError(f"{path}: payload has {len(payload)} bytes, needs {need}")
    if len(payload) > need:
        raise ShapeMismatchError(f"{path}: {len(payload) - need} trailing bytes")
    data = np.frombuffer(payload, dtype="<f8").reshape(n, channels).T.astype(np.float64)
    cube = HyperCube(data, width, height)
    validate_cube(cube)
    return cube


def write_matrix(matrix, path):
    matrix = np.atleast_2d(np.asarray(matrix, dtype=np.float64))
    np.savetxt(path, matrix, fmt="%.17g", delimiter=",")


def read_matrix(path):
    return np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)


def write_dgmap(dgmap, path):
    """Store a map as an ``N x 2`` matrix file with columns raw, scaled."""
    write_matrix(np.column_stack([dgmap.raw, dgmap.scaled]), path)


def read_dgmap(path):
    m = read_matrix(path)
    if m.shape[1] != 2:
        raise ShapeMismatchError(f"{path}: expected two columns (raw, scaled), got {m.shape[1]}")
    return DgMap(m[:, 0], m[:, 1])


def write_trace(trace, path):
    """One row per iteration: objective after it and its relative decrement."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "objective", "relative_decrement"])
        for t, (obj, dec) in enumerate(zip(trace.objective_per_iter[1:],
                                           trace.relative_decrements), start=1):
            w.writerow([t, f"{obj:.17g}", f"{dec:.17g}"])


def _quantize(x):
    return np.clip(np.rint(x), 0, 255).astype(np.uint8)


def render_pseudo_color(A, width, height, palette=DEFAULT_PALETTE):
    """Blend palette colours by per-pixel normalized abundances.

    Returns a ``(height, width, 3)`` uint8 image.
    """
    A = np.asarray(A, dtype=np.float64)
    K, N = A.shape
    if N != width * height:
        raise ShapeMismatchError(f"{N} pixels do not fill a {width}x{height} grid")
    palette = np.asarray(palette, dtype=np.float64)
    if K > len(palette):
        raise TooManyEndmembersError(f"{K} endmembers but only {len(palette)} palette colours")
    s = A.sum(axis=0)
    zero = np.flatnonzero(s <= 0)
    if zero.size:
        raise DegeneratePixelError(int(zero[0]))
    rgb = (A / s).T @ palette[:K]
    return _quantize(rgb).reshape(height, width, 3)


def render_gray(values, width, height, vmax=1.0):
    """Linear ramp from 0 (black) to ``vmax`` (white); returns ``(height, width)`` uint8."""
    values = np.asarray(values, dtype=np.float64)
    if values.size != width * height:
        raise ShapeMismatchError(f"{values.size} values do not fill a {width}x{height} grid")
    return _quantize(255.0 * np.clip(values / vmax, 0.0, 1.0)).reshape(height, width)


def write_ppm(image, path):
    """Write a uint8 image as binary PGM (2-d input) or PPM (3-channel input)."""
    image = np.asarray(image, dtype=np.uint8)
    if image.ndim == 2:
        magic = b"P5"
    elif image.ndim == 3 and image.shape[2] == 3:
        magic = b"P6"
    else:
        raise ShapeMismatchError(f"cannot write image of shape {image.shape}")
    h, w = image.shape[:2]
    with open(path, "wb") as fh:
        fh.write(magic + f"\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(image).tobytes())


def read_ppm(path):
    with open(path, "rb") as fh:
        magic = fh.readline().strip()
        w, h = (int(v) for v in fh.readline().split())
        maxval = int(fh.readline())
        body = fh.read()
    if maxval != 255 or magic not in (b"P5", b"P6"):
        raise BadMagicError(f"{path}: unsupported image header")
    shape = (h, w) if magic == b"P5" else (h, w, 3)
    return np.frombuffer(body, dtype=np.uint8).reshape(shape)
