"""Masks, exit waves, autocorrelations and (coded) diffraction patterns.

A diffraction pattern of an array g on Z_p^2 is ``|sum_n g(n) exp(-2 pi i n.w)|^2``
sampled at frequencies w in [-1/2, 1/2]^2.  On the regular grid
w in Z_{2p-1}^2 / (2p-1) it is the (2p-1)-point transform of the
autocorrelation, so the two carry the same information.
"""

import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .core import centered_range
from .errors import (
    EvenPadding,
    IllConditionedWarning,
    InvalidSize,
    KadecViolation,
    NegativeIntensity,
    SizeMismatch,
    SupportOverflow,
    WrongNodeCount,
)
from .spectral import DEFAULT_COND_THRESHOLD, dft_matrix
from .xray import Projection2D

NEGATIVE_CLAMP = 1e-12
KADEC_BOUND = 0.25


@dataclass(frozen=True)
class Mask2D:
    """Unimodular mask exp(i phi) on Z_p^2; ``phases`` in [-pi, pi)."""

    phases: np.ndarray
    mask_id: str = ""

    def __post_init__(self):
        ph = np.array(self.phases, dtype=np.float64, copy=True)
        if ph.ndim != 2 or ph.shape[0] != ph.shape[1]:
            raise InvalidSize(f"mask phases must be a square 2D array, got {ph.shape}")
        ph.setflags(write=False)
        object.__setattr__(self, "phases", ph)

    @property
    def p(self):
        return self.phases.shape[0]

    @property
    def values(self):
        return np.exp(1j * self.phases)

    @property
    def is_plain(self):
        return not np.any(self.phases)


def plain_mask(p):
    return Mask2D(np.zeros((p, p)), mask_id="plain")


def random_mask(p, seed=0):
    """I.i.d. uniform phases on [-pi, pi), deterministic per seed."""
    if p < 1:
        raise InvalidSize(f"mask side must be positive, got {p}")
    rng = np.random.default_rng(seed)
    return Mask2D(rng.uniform(-np.pi, np.pi, size=(p, p)), mask_id=f"random:{seed}")


def apply_mask(g: Projection2D, mu: Mask2D) -> Projection2D:
    if g.p != mu.p:
        raise SizeMismatch(f"projection side {g.p} does not match mask side {mu.p}")
    return Projection2D(g.values * mu.values, g.direction)


@dataclass(frozen=True)
class Autocorrelation2D:
    """Autocorrelation on Z_{2p-1}^2 (storage offset p - 1)."""

    values: np.ndarray
    condition: float = 1.0

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.complex128, copy=True)
        if vals.ndim != 2 or vals.shape[0] != vals.shape[1] or vals.shape[0] % 2 == 0:
            raise InvalidSize(f"autocorrelation must be (2p-1) x (2p-1), got {vals.shape}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def p(self):
        return (self.values.shape[0] + 1) // 2

    def at(self, a, b):
        off = self.p - 1
        return complex(self.values[a + off, b + off])

    def hermitian_defect(self):
        """max |R(-n) - conj(R(n))|."""
        return float(np.max(np.abs(self.values[::-1, ::-1] - np.conj(self.values))))


def autocorrelation(g) -> Autocorrelation2D:
    vals = g.values if isinstance(g, Projection2D) else np.asarray(g)
    return Autocorrelation2D(kernels.autocorrelation(vals))


def regular_nodes(p):
    """Nodes (j, k) / (2p-1) for j, k in Z_{2p-1}, storage order."""
    size = 2 * p - 1
    z = centered_range(size).astype(np.float64)
    jj, kk = np.meshgrid(z, z, indexing="ij")
    return np.stack([jj.ravel(), kk.ravel()], axis=1) / size


@dataclass(frozen=True)
class DiffractionPattern:
    """Nonnegative intensities at frequency nodes w in [-1/2, 1/2]^2.

    ``grid`` is ``"regular"`` (nodes are ``regular_nodes(p)``) or
    ``"irregular"``.  ``metadata`` carries provenance such as the mask id and
    the norm used for the Kadec check.
    """

    intensities: np.ndarray
    nodes: np.ndarray
    p: int
    grid: str = "regular"
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        inten = np.array(self.intensities, dtype=np.float64, copy=True).ravel()
        nodes = np.array(self.nodes, dtype=np.float64, copy=True).reshape(-1, 2)
        if inten.size != nodes.shape[0]:
            raise WrongNodeCount(f"{inten.size} intensities for {nodes.shape[0]} nodes")
        if self.grid not in ("regular", "irregular"):
            raise InvalidSize(f"unknown grid kind {self.grid!r}")
        if inten.size and inten.min() < -NEGATIVE_CLAMP:
            raise NegativeIntensity(f"intensity {inten.min():.3g} below -{NEGATIVE_CLAMP:g}")
        inten = np.maximum(inten, 0.0)
        inten.setflags(write=False)
        nodes.setflags(write=False)
        object.__setattr__(self, "intensities", inten)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "metadata", dict(self.metadata))

    def as_grid(self):
        """Regular patterns reshaped to (2p-1, 2p-1)."""
        size = 2 * self.p - 1
        return self.intensities.reshape(size, size)


@dataclass(frozen=True)
class KadecReport:
    deviations: np.ndarray
    max_deviation: float
    passed: bool
    norm: str


def kadec_check(nodes, p, norm="sup"):
    """Check |(2p-1) w_jk - (j, k)| < 1/4 for every node, in the given vector norm.

    ``nodes`` must list w_jk in storage order of (j, k) in Z_{2p-1}^2.
    ``norm`` is ``"sup"`` (per-component) or ``"euclidean"``.
    """
    nodes = np.asarray(nodes, dtype=np.float64).reshape(-1, 2)
    size = 2 * p - 1
    if nodes.shape[0] != size * size:
        raise WrongNodeCount(f"expected {size * size} nodes for p={p}, got {nodes.shape[0]}")
    dev = size * nodes - size * regular_nodes(p)
    if norm == "sup":
        per_node = np.max(np.abs(dev), axis=1)
    elif norm == "euclidean":
        per_node = np.hypot(dev[:, 0], dev[:, 1])
    else:
        raise InvalidSize(f"unknown norm {norm!r}")
    worst = float(per_node.max())
    return KadecReport(per_node, worst, worst < KADEC_BOUND, norm)


def fourier_intensity(values, nodes):
    """|sum_n values(n) exp(-2 pi i n.w)|^2 at each node w."""
    vals = np.asarray(values, dtype=np.complex128)
    p = vals.shape[0]
    z = centered_range(p).astype(np.float64)
    jj, kk = np.meshgrid(z, z, indexing="ij")
    idx = np.stack([jj.ravel(), kk.ravel()], axis=1)
    amp = kernels.ndft(vals.ravel(), idx, nodes, 1.0)
    return amp.real ** 2 + amp.imag ** 2


def diffraction_pattern(g, grid="regular", force=False, kadec_norm="sup", mask_id=None):
    """Diffraction pattern of ``g`` on the regular grid or on explicit irregular nodes."""
    vals = g.values if isinstance(g, Projection2D) else np.asarray(g)
    p = vals.shape[0]
    meta = {"mask_id": mask_id} if mask_id else {}
    if isinstance(grid, str):
        if grid != "regular":
            raise InvalidSize(f"unknown grid {grid!r}; pass 'regular' or an array of nodes")
        nodes = regular_nodes(p)
        kind = "regular"
    else:
        nodes = np.asarray(grid, dtype=np.float64).reshape(-1, 2)
        kind = "irregular"
        report = kadec_check(nodes, p, kadec_norm)
        meta.update(kadec_norm=kadec_norm, kadec_max_deviation=report.max_deviation)
        if not report.passed:
            if not force:
                raise KadecViolation(
                    f"node deviation {report.max_deviation:.4f} violates the 1/4 bound"
                )
            meta["forced"] = True
    return DiffractionPattern(fourier_intensity(vals, nodes), nodes, p, kind, meta)


def pattern_from_autocorrelation(r: Autocorrelation2D, nodes):
    """Evaluate the trigonometric polynomial sum_n R(n) exp(-2 pi i n.w); real part returned."""
    size = r.values.shape[0]
    z = centered_range(size).astype(np.float64)
    jj, kk = np.meshgrid(z, z, indexing="ij")
    idx = np.stack([jj.ravel(), kk.ravel()], axis=1)
    return kernels.ndft(r.values.ravel(), idx, np.asarray(nodes, dtype=np.float64), 1.0)


def recover_autocorrelation(pat: DiffractionPattern, p=None, kadec_norm=None,
                            cond_threshold=DEFAULT_COND_THRESHOLD) -> Autocorrelation2D:
    """Invert the pattern to the autocorrelation.

    Regular grids use the inverse (2p-1)-point transform.  Irregular grids
    solve the dense square system at the nodes; the returned object carries
    its condition number.
    """
    p = pat.p if p is None else p
    size = 2 * p - 1
    if pat.intensities.size != size * size:
        raise WrongNodeCount(f"expected {size * size} samples for p={p}")
    if pat.grid == "regular":
        e = dft_matrix(size)
        r = np.conj(e) @ pat.as_grid() @ np.conj(e).T / (size * size)
        return Autocorrelation2D(r)
    norm = kadec_norm or pat.metadata.get("kadec_norm", "sup")
    report = kadec_check(pat.nodes, p, norm)
    if not report.passed:
        raise KadecViolation(f"node deviation {report.max_deviation:.4f} violates the 1/4 bound")
    z = centered_range(size).astype(np.float64)
    jj, kk = np.meshgrid(z, z, indexing="ij")
    idx = np.stack([jj.ravel(), kk.ravel()], axis=1)
    a = np.exp(-2j * np.pi * (pat.nodes @ idx.T))
    cond = float(np.linalg.cond(a))
    if cond > cond_threshold:
        warnings.warn(
            f"irregular-grid system condition {cond:.3g} exceeds {cond_threshold:.3g}",
            IllConditionedWarning,
            stacklevel=2,
        )
    r = np.linalg.solve(a, pat.intensities.astype(np.complex128))
    return Autocorrelation2D(r.reshape(size, size), condition=cond)


def twin(g: Projection2D) -> Projection2D:
    """Conjugate inversion n -> conj(g(-n))."""
    if g.p % 2 == 0:
        raise EvenPadding("twin image needs odd p so that Z_p is symmetric")
    return Projection2D(np.conj(g.values[::-1, ::-1]), g.direction)


def orbit_transform(g: Projection2D, shift=(0, 0), theta=0.0, twinned=False, tol=0.0):
    """exp(i theta) * h(n + shift) with h = twin(g) if ``twinned`` else g.

    Raises SupportOverflow when the shifted support would leave Z_p^2.
    """
    h = twin(g) if twinned else g
    p = h.p
    s1, s2 = int(shift[0]), int(shift[1])
    mask = np.abs(h.values) > tol
    rows, cols = np.nonzero(mask)
    if rows.size:
        if rows.min() - s1 < 0 or rows.max() - s1 >= p or cols.min() - s2 < 0 or cols.max() - s2 >= p:
            raise SupportOverflow(f"shift {shift} moves the support outside Z_{p}^2")
    out = np.zeros((p, p), dtype=np.complex128)
    src = h.values * np.where(mask, 1.0, 0.0)
    r0, r1 = max(0, s1), min(p, p + s1)
    c0, c1 = max(0, s2), min(p, p + s2)
    out[r0 - s1:r1 - s1, c0 - s2:c1 - s2] = src[r0:r1, c0:c1]
    return Projection2D(np.exp(1j * theta) * out, g.direction)
