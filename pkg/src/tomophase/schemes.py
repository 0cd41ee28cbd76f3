"""Measurement schemes: CT schemes, rotation schemes and n+1 direction (tom2) schemes."""

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .core import centered_range, check_padding, default_padding
from .errors import GammaOutOfRange, InvalidSize, SlopeOutOfRange, StrongCTFailure, ZeroExtraDirection
from .xray import _AXIS, FAMILIES, Direction, _family

DEFAULT_DISTINCT_TOL = 1e-9


@dataclass(frozen=True)
class Scheme:
    """A family of parallel-line directions, plus an optional extra orthogonal direction.

    ``slopes`` is an (m, 2) array of (alpha, beta) pairs for the base family;
    ``extra`` is the (alpha_0, beta_0) pair describing the direction with zero
    component along the base family axis.
    """

    family: str
    slopes: np.ndarray
    n: int
    p: int = 0
    extra: Optional[Tuple[float, float]] = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "family", _family(self.family))
        sl = np.array(self.slopes, dtype=np.float64, copy=True).reshape(-1, 2)
        if sl.shape[0] < 1:
            raise InvalidSize("a scheme needs at least one slope pair")
        if np.any(np.abs(sl) > 1.0):
            raise SlopeOutOfRange("all scheme slopes must satisfy |alpha|, |beta| <= 1")
        sl.setflags(write=False)
        object.__setattr__(self, "slopes", sl)
        p = self.p or default_padding(self.n)
        check_padding(self.n, p)
        object.__setattr__(self, "p", int(p))
        if self.extra is not None:
            ex = (float(self.extra[0]), float(self.extra[1]))
            if ex == (0.0, 0.0):
                raise ZeroExtraDirection("the extra direction must not be (0, 0)")
            object.__setattr__(self, "extra", ex)

    @property
    def m(self):
        return self.slopes.shape[0]

    def base_directions(self):
        return [Direction(self.family, a, b) for a, b in self.slopes]

    def extra_direction(self):
        if self.extra is None:
            return None
        return realize_extra(self.family, self.extra)

    def directions(self):
        dirs = self.base_directions()
        if self.extra is not None:
            dirs.append(self.extra_direction())
        return dirs

    def without_extra(self):
        return Scheme(self.family, self.slopes, self.n, self.p, None, self.label)

    def with_slopes(self, slopes):
        return Scheme(self.family, slopes, self.n, self.p, self.extra, self.label)


def realize_extra(family, extra):
    """Line family for the direction with zero component along ``family``'s axis.

    For an x-scheme the direction is (0, alpha_0, beta_0): it becomes the z family
    with slopes (0, alpha_0 / beta_0) when |alpha_0| <= |beta_0|, otherwise the
    y family with slopes (0, beta_0 / alpha_0).  The y- and z-schemes follow the
    same rule with their own axis order.
    """
    axis = _AXIS[_family(family)]
    a0, b0 = float(extra[0]), float(extra[1])
    if a0 == 0.0 and b0 == 0.0:
        raise ZeroExtraDirection("the extra direction must not be (0, 0)")
    vec = [0.0, 0.0, 0.0]
    others = [a for a in range(3) if a != axis]
    vec[others[0]] = a0
    vec[others[1]] = b0
    lead = others[1] if abs(b0) >= abs(a0) else others[0]
    rest = [a for a in range(3) if a != lead]
    alpha = vec[rest[0]] / vec[lead]
    beta = vec[rest[1]] / vec[lead]
    return Direction(FAMILIES[lead], alpha, beta)


@dataclass(frozen=True)
class StrongCTReport:
    passed: bool
    worst_pair: Tuple[int, int]
    worst_count: int
    tol: float
    n: int
    counts: np.ndarray = field(repr=False, default=None)


def node_values(slopes, p):
    """alpha_l * j + beta_l * k for every (j, k) in Z_p^2, shape (p*p, m), storage order."""
    slopes = np.asarray(slopes, dtype=np.float64).reshape(-1, 2)
    z = centered_range(p).astype(np.float64)
    jj, kk = np.meshgrid(z, z, indexing="ij")
    return jj.ravel()[:, None] * slopes[:, 0][None, :] + kk.ravel()[:, None] * slopes[:, 1][None, :]


def check_strong_ct(s: Scheme, tol=DEFAULT_DISTINCT_TOL):
    """Count distinct node values modulo p at every nonzero integer frequency pair.

    Values closer than ``tol`` in circular distance count once; the count is
    the size of the largest tol-separated subset.  Passes iff the minimum over
    (j, k) != (0, 0) is at least n.
    """
    p = s.p
    vals = node_values(s.slopes, p)
    counts = kernels.distinct_counts(vals, p, tol).reshape(p, p)
    off = p // 2
    masked = counts.astype(np.int64).copy()
    masked[off, off] = np.iinfo(np.int64).max
    flat = int(np.argmin(masked))
    a, b = divmod(flat, p)
    worst = int(masked[a, b])
    return StrongCTReport(worst >= s.n, (a - off, b - off), worst, float(tol), s.n, counts)


def random_scheme(n, family="z", seed=0, p=None, m=None):
    """n (or m) i.i.d. uniform slope pairs in the open square (-1, 1)^2."""
    if n < 1:
        raise InvalidSize(f"scheme size must be positive, got {n}")
    m = n if m is None else m
    rng = np.random.default_rng(seed)
    slopes = rng.uniform(-1.0, 1.0, size=(m, 2))
    while np.any(slopes <= -1.0):
        bad = slopes <= -1.0
        slopes[bad] = rng.uniform(-1.0, 1.0, size=int(bad.sum()))
    return Scheme(family, slopes, n, p or default_padding(n), label=f"random:{seed}")


def rotation_scheme(gamma, m, family="z", n=None, p=None, angles=None):
    """Slopes (gamma cos t_j, gamma sin t_j) for angles t_j, equispaced on [0, 2 pi) by default."""
    if not (0.0 < gamma <= 1.0):
        raise GammaOutOfRange(f"gamma must lie in (0, 1], got {gamma}")
    if angles is None:
        angles = 2.0 * np.pi * np.arange(m) / m
    angles = np.asarray(angles, dtype=np.float64)
    slopes = np.stack([gamma * np.cos(angles), gamma * np.sin(angles)], axis=1)
    n = m if n is None else n
    return Scheme(family, slopes, n, p or default_padding(n), label=f"rotation:{gamma}")


def tom2_scheme(base: Scheme, extra, tol=DEFAULT_DISTINCT_TOL):
    """Attach the extra direction to an n-direction base scheme that satisfies strong CT."""
    if extra is None or (float(extra[0]) == 0.0 and float(extra[1]) == 0.0):
        raise ZeroExtraDirection("the extra direction must not be (0, 0)")
    if base.m != base.n:
        raise StrongCTFailure(f"base scheme must have exactly n={base.n} directions, has {base.m}")
    report = check_strong_ct(base, tol)
    if not report.passed:
        raise StrongCTFailure(
            f"base scheme fails strong CT at {report.worst_pair} with {report.worst_count} "
            f"distinct nodes (< n={base.n})"
        )
    return Scheme(base.family, base.slopes, base.n, base.p, tuple(extra), base.label or "tom2")
