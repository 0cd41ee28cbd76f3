"""Direct discrete Fourier sums, Fourier-slice verification and Vandermonde column inversion."""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from . import kernels
from .core import Object3D, centered_range
from .errors import IllConditionedWarning, InvalidSize, SingularNodes
from .xray import Direction, Projection2D, project

DEFAULT_NODE_TOL = 1e-9
DEFAULT_COND_THRESHOLD = 1e8


def _grid_coords(shape):
    axes = [centered_range(s) for s in shape]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1).astype(np.float64)


def dft3_points(f: Object3D, points):
    """3D transform sum_{ijk} f(i,j,k) exp(-2 pi i (xi i + eta j + zeta k) / p) at each row of ``points``."""
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return kernels.ndft(f.values.ravel(), _grid_coords(f.values.shape), pts, 1.0 / f.p)


def dft3_at(f: Object3D, xi, eta, zeta):
    return complex(dft3_points(f, [[xi, eta, zeta]])[0])


def dft2_points(g, points, period=None):
    """2D transform of an array on Z_p^2 at each row of ``points`` (frequencies in units of 1/p)."""
    vals = g.values if isinstance(g, Projection2D) else np.asarray(g)
    period = vals.shape[0] if period is None else period
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    return kernels.ndft(vals.ravel(), _grid_coords(vals.shape), pts, 1.0 / period)


def dft2_at(g, eta, zeta):
    return complex(dft2_points(g, [[eta, zeta]])[0])


def integer_grid(p):
    """All integer frequency pairs of Z_p^2 as an array of shape (p*p, 2), storage order."""
    return _grid_coords((p, p))


def dft_matrix(p):
    """E[u, c] = exp(-2 pi i u c / p) for u, c in Z_p."""
    z = centered_range(p)
    return np.exp(-2j * np.pi * np.outer(z, z) / p)


def spectrum2_integer(values):
    """2D transform on the integer grid Z_p^2 (storage order), via the separable matrix form."""
    values = np.asarray(values, dtype=np.complex128)
    e = dft_matrix(values.shape[0])
    return e @ values @ e.T


def fourier_slice_residual(f: Object3D, d: Direction, grid=None):
    """max |2D transform of project(f, d) - 3D transform of f on the slice| over ``grid``.

    ``grid`` is an iterable of integer frequency pairs in Z_p^2; the default
    is the full grid.
    """
    g = project(f, d)
    pts = integer_grid(f.p) if grid is None else np.atleast_2d(np.asarray(grid, dtype=np.float64))
    lhs = dft2_points(g, pts)
    xi, eta, zeta = d.slice_frequencies(pts[:, 0], pts[:, 1])
    rhs = dft3_points(f, np.stack([xi, eta, zeta], axis=1))
    if lhs.size == 0:
        return 0.0
    return float(np.max(np.abs(lhs - rhs)))


def circular_distance(a, b, period):
    d = np.mod(np.asarray(a) - np.asarray(b), period)
    return np.minimum(d, period - d)


@dataclass(frozen=True)
class VandermondeColumn:
    """Samples of an n-term trigonometric polynomial with period p at real nodes."""

    nodes: np.ndarray
    samples: np.ndarray
    n: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=np.float64).ravel())
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.complex128).ravel())
        if self.nodes.size != self.samples.size:
            raise InvalidSize("nodes and samples must have the same length")


class VandermondeSolution(NamedTuple):
    coefficients: np.ndarray
    condition: float
    nodes_used: np.ndarray


def vandermonde_matrix(nodes, n, p):
    """V[l, k] = exp(-2 pi i k xi_l / p) for k in Z_n."""
    ks = centered_range(n)
    return np.exp(-2j * np.pi * np.outer(np.asarray(nodes, dtype=np.float64), ks) / p)


def evaluate_column(coefficients, nodes, p):
    coefficients = np.asarray(coefficients, dtype=np.complex128)
    return vandermonde_matrix(nodes, coefficients.size, p) @ coefficients


def _distinct_prefix(nodes, p, tol):
    keep = []
    for l, x in enumerate(nodes):
        if all(circular_distance(x, nodes[k], p) >= tol for k in keep):
            keep.append(l)
    return keep


def solve_vandermonde_column(col: VandermondeColumn, tol=DEFAULT_NODE_TOL,
                             cond_threshold=DEFAULT_COND_THRESHOLD):
    """Solve for the n coefficients matching the samples at the nodes.

    Uses dense LU with partial pivoting; the condition number is the LAPACK
    1-norm estimate from the factorisation.  With more than n nodes, the
    first n mutually distinct ones are used.
    """
    n, p = col.n, col.p
    if n < 1:
        raise InvalidSize(f"coefficient count must be positive, got {n}")
    nodes, samples = col.nodes, col.samples
    if nodes.size < n:
        raise SingularNodes(f"need at least n={n} nodes, got {nodes.size}")
    if nodes.size == n:
        use = list(range(n))
        for a in range(n):
            for b in range(a + 1, n):
                if circular_distance(nodes[a], nodes[b], p) < tol:
                    raise SingularNodes(
                        f"nodes {nodes[a]!r} and {nodes[b]!r} coincide modulo p={p}"
                    )
    else:
        use = _distinct_prefix(nodes, p, tol)
        if len(use) < n:
            raise SingularNodes(f"only {len(use)} distinct nodes modulo p={p}, need {n}")
        use = use[:n]
    v = vandermonde_matrix(nodes[use], n, p)
    lu, piv = sla.lu_factor(v, check_finite=False)
    anorm = np.linalg.norm(v, 1)
    rcond, info = lapack.zgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if cond > cond_threshold:
        warnings.warn(
            f"Vandermonde system condition estimate {cond:.3g} exceeds {cond_threshold:.3g}",
            IllConditionedWarning,
            stacklevel=2,
        )
    coef = sla.lu_solve((lu, piv), samples[use], check_finite=False)
    return VandermondeSolution(coef, float(cond), nodes[use])
