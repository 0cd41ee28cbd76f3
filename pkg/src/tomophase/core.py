"""Centered index sets, the periodic Dirichlet kernel and the voxel object type.

Storage convention: an axis of side ``n`` holds the centered indices
``centered_range(n)``; centered index ``i`` is stored at ``i + n // 2``.
Arrays are row-major over (x, y, z).
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import EvenPadding, InvalidSize

SNAP_TOL = 1e-12


def centered_range(n):
    """Centered integers of an n-point axis: [-n/2, n/2-1] (even) or [-(n-1)/2, (n-1)/2] (odd)."""
    if n < 1:
        raise InvalidSize(f"side length must be positive, got {n}")
    off = n // 2
    return np.arange(-off, n - off)


def offset(n):
    return n // 2


def to_storage(i, n):
    return np.asarray(i) + n // 2


def to_centered(s, n):
    return np.asarray(s) - n // 2


def default_padding(n):
    return 2 * n - 1


def check_padding(n, p):
    if n < 1:
        raise InvalidSize(f"side length must be positive, got {n}")
    if p < 2 * n - 1:
        raise InvalidSize(f"padded side p={p} must satisfy p >= 2n-1 = {2 * n - 1}")
    if p % 2 == 0:
        raise EvenPadding(f"padded side p={p} must be odd")


def dirichlet_kernel(p, t):
    """p-periodic Dirichlet kernel ``sin(pi t) / (p sin(pi t / p))``, equal to 1 at multiples of p.

    Vectorised over ``t``; integer arguments return exactly 0 or 1.  The argument is first reduced to the centered
    period ``[-p/2, p/2)``, which leaves the closed form unchanged for odd
    ``p`` and keeps ``sin(pi t)`` accurate for large ``|t|``.
    """
    if p < 1:
        raise InvalidSize(f"period must be positive, got {p}")
    t = np.asarray(t, dtype=np.float64)
    r = t - p * np.round(t / p)
    at_pole = np.abs(r) < SNAP_TOL
    safe = np.where(at_pole, 1.0, r)
    val = np.sin(np.pi * safe) / (p * np.sin(np.pi * safe / p))
    # exact zeros at the other integers keep the interpolation matrix an identity
    on_int = np.abs(r - np.round(r)) < SNAP_TOL
    out = np.where(at_pole, 1.0, np.where(on_int, 0.0, val))
    if out.ndim == 0:
        return float(out)
    return out


def _frozen(arr):
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Object3D:
    """Complex voxel field on the centered cube Z_n^3, zero elsewhere in Z_p^3."""

    values: np.ndarray
    p: int = 0

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.ndim != 3 or len(set(vals.shape)) != 1:
            raise InvalidSize(f"object values must be an n x n x n array, got {vals.shape}")
        n = vals.shape[0]
        p = self.p or default_padding(n)
        check_padding(n, p)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "p", int(p))

    @property
    def n(self):
        return self.values.shape[0]

    def at(self, i, j, k):
        """Value at centered coordinates; zero outside Z_n^3."""
        n = self.n
        idx = [int(c) + n // 2 for c in (i, j, k)]
        if all(0 <= s < n for s in idx):
            return complex(self.values[tuple(idx)])
        return 0j

    def padded(self):
        """Values embedded in the full Z_p^3 lattice (storage offset p // 2)."""
        out = np.zeros((self.p,) * 3, dtype=np.complex128)
        lo = self.p // 2 - self.n // 2
        sl = slice(lo, lo + self.n)
        out[sl, sl, sl] = self.values
        return out

    def support(self, tol=0.0):
        """Centered coordinates of voxels with modulus above ``tol``."""
        pts = np.argwhere(np.abs(self.values) > tol) - self.n // 2
        return [tuple(int(c) for c in row) for row in pts]

    def scaled(self, factor):
        return Object3D(self.values * factor, self.p)

    def __add__(self, other):
        if not isinstance(other, Object3D) or other.n != self.n or other.p != self.p:
            return NotImplemented
        return Object3D(self.values + other.values, self.p)

    def __sub__(self, other):
        if not isinstance(other, Object3D) or other.n != self.n or other.p != self.p:
            return NotImplemented
        return Object3D(self.values - other.values, self.p)


def delta_object(n, p=None, at=(0, 0, 0), amplitude=1.0):
    """Discrete delta at a centered voxel."""
    vals = np.zeros((n, n, n), dtype=np.complex128)
    vals[tuple(int(c) + n // 2 for c in at)] = amplitude
    return Object3D(vals, p or default_padding(n))


def zero_object(n, p=None):
    return Object3D(np.zeros((n, n, n), dtype=np.complex128), p or default_padding(n))


def twin_object(f):
    """3D conjugate inversion conj(f(-x)); needs a symmetric range, i.e. odd n."""
    if f.n % 2 == 0:
        raise EvenPadding("3D inversion requires odd n so that Z_n is symmetric")
    return Object3D(np.conj(f.values[::-1, ::-1, ::-1]), f.p)


class ObjectKind(str, Enum):
    COMPLEX_GAUSSIAN = "gaussian"
    UNIT_PHASES = "phases"
    FINITE_ALPHABET = "alphabet"


def random_object(n, p=None, kind=ObjectKind.COMPLEX_GAUSSIAN, seed=0, alphabet=None):
    """Seeded random object, i.i.d. per voxel.

    ``kind`` is ``"gaussian"`` (standard circular complex normal), ``"phases"``
    (uniform unit phases) or ``"alphabet"`` (uniform draws from ``alphabet``).
    """
    if n < 2:
        raise InvalidSize(f"random objects need n >= 2, got {n}")
    p = default_padding(n) if p is None else p
    check_padding(n, p)
    kind = ObjectKind(kind)
    rng = np.random.default_rng(seed)
    shape = (n, n, n)
    if kind is ObjectKind.COMPLEX_GAUSSIAN:
        vals = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    elif kind is ObjectKind.UNIT_PHASES:
        vals = np.exp(1j * rng.uniform(-np.pi, np.pi, size=shape))
    else:
        if not alphabet:
            raise InvalidSize("finite-alphabet objects need a non-empty alphabet")
        symbols = np.asarray(list(alphabet), dtype=np.complex128)
        vals = symbols[rng.integers(0, symbols.size, size=shape)]
    return Object3D(vals, p)


class SupportClass(str, Enum):
    EMPTY = "empty"
    POINT = "point"
    LINE = "line"
    PLANE = "plane"
    FULL3D = "full3d"
    SPREAD2D = "spread2d"

    @property
    def line_compatible(self):
        return self in (SupportClass.EMPTY, SupportClass.POINT, SupportClass.LINE)


def _affine_rank(points):
    pts = np.asarray(points, dtype=np.int64)
    diffs = pts[1:] - pts[0]
    if not diffs.any():
        return 0
    return int(np.linalg.matrix_rank(diffs.astype(np.float64)))


def classify_support(points: Iterable[Sequence[int]], dimension=None):
    """Affine classification of a finite set of integer points in 2D or 3D."""
    pts = [tuple(int(c) for c in pt) for pt in points]
    pts = sorted(set(pts))
    if dimension is None:
        dimension = len(pts[0]) if pts else 2
    if dimension not in (2, 3):
        raise InvalidSize(f"dimension must be 2 or 3, got {dimension}")
    if not pts:
        return SupportClass.EMPTY
    if len(pts) == 1:
        return SupportClass.POINT
    rank = _affine_rank(pts)
    if rank <= 1:
        return SupportClass.LINE
    if dimension == 2:
        return SupportClass.SPREAD2D
    return SupportClass.PLANE if rank == 2 else SupportClass.FULL3D


def support_points_2d(values, tol=1e-9):
    """Centered coordinates of entries of a square 2D array with modulus above ``tol * max(1, max|v|)``."""
    values = np.asarray(values)
    size = values.shape[0]
    mag = np.abs(values)
    thresh = tol * max(1.0, float(mag.max(initial=0.0)))
    pts = np.argwhere(mag > thresh) - size // 2
    return [tuple(int(c) for c in row) for row in pts]
