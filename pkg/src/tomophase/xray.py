"""Dirichlet-kernel interpolation and the three families of discrete X-ray transforms."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .core import Object3D, centered_range, dirichlet_kernel, support_points_2d, classify_support
from .errors import EvenPadding, InvalidSize, SlopeOutOfRange

FAMILIES = ("x", "y", "z")
_AXIS = {"x": 0, "y": 1, "z": 2}


def _family(name):
    key = str(name).lower()
    if key not in _AXIS:
        raise InvalidSize(f"unknown line family {name!r}; expected one of x, y, z")
    return key


@dataclass(frozen=True)
class Direction:
    """A parallel line family x(alpha, beta), y(alpha, beta) or z(alpha, beta)."""

    family: str
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "family", _family(self.family))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def axis(self):
        return _AXIS[self.family]

    def validate(self):
        if abs(self.alpha) > 1.0 or abs(self.beta) > 1.0:
            raise SlopeOutOfRange(
                f"slopes must satisfy |alpha|, |beta| <= 1, got ({self.alpha}, {self.beta})"
            )
        return self

    def vector(self):
        """Direction vector of the lines, unit component along the family axis."""
        v = [0.0, 0.0, 0.0]
        others = [a for a in range(3) if a != self.axis]
        v[self.axis] = 1.0
        v[others[0]] = self.alpha
        v[others[1]] = self.beta
        return tuple(v)

    def slice_frequencies(self, u, v):
        """3D frequency (xi, eta, zeta) on which the projection spectrum at (u, v) lands."""
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        w = -self.alpha * u - self.beta * v
        if self.family == "x":
            return w, u, v
        if self.family == "y":
            return u, w, v
        return u, v, w


@dataclass(frozen=True)
class Projection2D:
    """Complex samples on Z_p^2 (storage offset p // 2), optionally tagged with its direction."""

    values: np.ndarray
    direction: Optional[Direction] = None

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1]:
            raise InvalidSize(f"projection must be a square 2D array, got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def p(self):
        return self.values.shape[0]

    def at(self, c1, c2):
        off = self.p // 2
        a, b = int(c1) + off, int(c2) + off
        if 0 <= a < self.p and 0 <= b < self.p:
            return complex(self.values[a, b])
        return 0j

    def support(self, tol=1e-9):
        return support_points_2d(self.values, tol)

    def support_class(self, tol=1e-9):
        return classify_support(self.support(tol), 2)

    @classmethod
    def delta(cls, p, at=(0, 0), amplitude=1.0):
        vals = np.zeros((p, p), dtype=np.complex128)
        vals[at[0] + p // 2, at[1] + p // 2] = amplitude
        return cls(vals)

    @classmethod
    def from_small(cls, small, p, direction=None):
        """Embed an m x m array on Z_m^2 into Z_p^2 (centered)."""
        small = np.asarray(small, dtype=np.complex128)
        m = small.shape[0]
        if p % 2 == 0:
            raise EvenPadding(f"p must be odd, got {p}")
        lo = p // 2 - m // 2
        if lo < 0:
            raise InvalidSize(f"cannot embed a {m}x{m} array into Z_{p}^2")
        vals = np.zeros((p, p), dtype=np.complex128)
        vals[lo:lo + m, lo:lo + m] = small
        return cls(vals, direction)


def _slabs(f: Object3D, axis):
    # slabs[i] is the 2D slice perpendicular to the family axis, remaining axes in order
    return np.moveaxis(f.values, axis, 0)


def interpolate_slice(f: Object3D, family, slice_index, u, v):
    """Double Dirichlet-kernel interpolation of one slice at real (u, v).

    For family ``x`` this is ``sum_{j,k} f(i, j, k) D_p(u - j) D_p(v - k)``.
    Slices outside Z_n are identically zero.
    """
    axis = _AXIS[_family(family)]
    n, p = f.n, f.p
    i = int(slice_index)
    if not (-(n // 2) <= i < n - n // 2):
        return 0j
    slab = _slabs(f, axis)[i + n // 2]
    idx = centered_range(n)
    du = dirichlet_kernel(p, u - idx)
    dv = dirichlet_kernel(p, v - idx)
    return complex(du @ slab @ dv)


def kernel_tables(n, p, alpha, beta):
    """Interpolation weights ``A[i, c, j] = D_p(alpha * i + c - j)`` and the beta analogue."""
    idx = centered_range(n).astype(np.float64)
    cs = centered_range(p).astype(np.float64)
    a_arg = alpha * idx[:, None, None] + cs[None, :, None] - idx[None, None, :]
    b_arg = beta * idx[:, None, None] + cs[None, :, None] - idx[None, None, :]
    return dirichlet_kernel(p, a_arg), dirichlet_kernel(p, b_arg)


def project(f: Object3D, d: Direction) -> Projection2D:
    """Discrete X-ray transform of ``f`` along the line family ``d``.

    Line sums are evaluated for every intercept in Z_p^2; for p = 2n - 1 this
    is exactly the intercept set Z_{2n-1}^2.
    """
    d.validate()
    a_tab, b_tab = kernel_tables(f.n, f.p, d.alpha, d.beta)
    out = kernels.line_sums(_slabs(f, d.axis), a_tab, b_tab)
    return Projection2D(out, d)


def projection_matrix(n, p, d: Direction, voxels=None):
    """Matrix of the linear map voxel values -> flattened projection on Z_p^2.

    ``voxels`` is an optional list of centered voxel coordinates selecting the
    columns; by default all of Z_n^3 in storage order.
    """
    d.validate()
    if voxels is None:
        grid = centered_range(n)
        voxels = [(i, j, k) for i in grid for j in grid for k in grid]
    a_tab, b_tab = kernel_tables(n, p, d.alpha, d.beta)
    off = n // 2
    cols = []
    for vox in voxels:
        vox = [int(c) + off for c in vox]
        i = vox[d.axis]
        rest = [vox[a] for a in range(3) if a != d.axis]
        col = np.outer(a_tab[i, :, rest[0]], b_tab[i, :, rest[1]])
        cols.append(col.ravel())
    return np.array(cols, dtype=np.complex128).T
