"""Forward checks of uniqueness for coded tomographic diffraction data.

Nothing here inverts data.  Uniqueness is probed by computing coded data for
many objects and comparing them: invariance suites, pairwise
distinguishability and an exhaustive enumeration over a finite alphabet.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .core import Object3D, centered_range, classify_support, twin_object
from .diffraction import (
    DiffractionPattern,
    Mask2D,
    apply_mask,
    diffraction_pattern,
    plain_mask,
    random_mask,
    regular_nodes,
    twin,
)
from .errors import BudgetExceeded, InvalidSize, SizeMismatch
from .schemes import Scheme
from .xray import Direction, project, projection_matrix

SAME_TOL = 1e-9
GAP_TOL = 1e-6
PHASES = (1.0, 1j, -1.0, -1j)


@dataclass
class CodedDataSet:
    scheme: Scheme
    mask: Mask2D
    patterns: List[DiffractionPattern]
    seed: Optional[int] = None

    def stacked(self):
        return np.stack([pat.intensities for pat in self.patterns])


def coded_data(f: Object3D, mu: Mask2D, s: Scheme, seed=None):
    """Regular-grid coded diffraction pattern for every direction of the scheme (extra included)."""
    if mu.p != f.p or s.p != f.p:
        raise SizeMismatch(f"object p={f.p}, mask p={mu.p}, scheme p={s.p} must agree")
    pats = [
        diffraction_pattern(apply_mask(project(f, d), mu), mask_id=mu.mask_id)
        for d in s.directions()
    ]
    return CodedDataSet(s, mu, pats, seed)


def data_deviation(a: CodedDataSet, b: CodedDataSet):
    return float(np.max(np.abs(a.stacked() - b.stacked())))


def distinguish(f: Object3D, g: Object3D, mu: Mask2D, s: Scheme):
    """Largest intensity difference between the coded data of f and g."""
    if f.n != g.n or f.p != g.p:
        raise SizeMismatch("objects must share n and p")
    return data_deviation(coded_data(f, mu, s), coded_data(g, mu, s))


@dataclass
class InvarianceReport:
    phase_deviation: float
    plain_twin_deviation: float
    random_twin_deviations: list
    threshold_same: float
    threshold_differ: float

    @property
    def random_twin_deviation(self):
        return float(min(self.random_twin_deviations)) if self.random_twin_deviations else 0.0

    @property
    def phase_ok(self):
        return self.phase_deviation <= self.threshold_same

    @property
    def plain_twin_ok(self):
        return self.plain_twin_deviation <= self.threshold_same

    @property
    def random_twin_broken(self):
        return self.random_twin_deviation > self.threshold_differ

    @property
    def passed(self):
        return self.phase_ok and self.plain_twin_ok and self.random_twin_broken


def invariance_suite(f: Object3D, mu: Mask2D, s: Scheme, theta=0.7,
                     same_tol=1e-10, differ_tol=GAP_TOL):
    """Global-phase invariance, plain-mask twin invariance and random-mask twin breaking.

    The random-mask deviations are per direction: pattern of mu * twin(f_t)
    against pattern of mu * f_t.
    """
    base = coded_data(f, mu, s)
    rotated = coded_data(f.scaled(np.exp(1j * theta)), mu, s)
    phase_dev = data_deviation(base, rotated)
    plain = plain_mask(f.p)
    plain_dev = 0.0
    random_devs = []
    for d in s.directions():
        g = project(f, d)
        tw = twin(g)
        a = diffraction_pattern(apply_mask(g, plain)).intensities
        b = diffraction_pattern(apply_mask(tw, plain)).intensities
        plain_dev = max(plain_dev, float(np.max(np.abs(a - b))))
        a = diffraction_pattern(apply_mask(g, mu)).intensities
        b = diffraction_pattern(apply_mask(tw, mu)).intensities
        random_devs.append(float(np.max(np.abs(a - b))))
    return InvarianceReport(phase_dev, plain_dev, random_devs, same_tol, differ_tol)


# ---------------------------------------------------------------------------
# exhaustive enumeration
# ---------------------------------------------------------------------------


def _phase_group(alphabet):
    """Largest subgroup of {1, i, -1, -i} under which the alphabet is closed."""
    symbols = np.asarray(alphabet, dtype=np.complex128)

    def closed(c):
        return all(np.min(np.abs(symbols - c * a)) < 1e-12 for a in symbols)

    if closed(1j):
        return (1.0, 1j, -1.0, -1j)
    if closed(-1.0):
        return (1.0, -1.0)
    return (1.0,)


def _symbol_permutation(alphabet, phase):
    symbols = np.asarray(alphabet, dtype=np.complex128)
    return np.array([int(np.argmin(np.abs(symbols - phase * a))) for a in symbols], dtype=np.int64)


class _Operators:
    """Per-direction projection and coded-pattern matrices restricted to a voxel set."""

    def __init__(self, n, p, voxels, mu: Mask2D, directions):
        self.n, self.p = n, p
        self.directions = list(directions)
        nodes = regular_nodes(p)
        z = centered_range(p).astype(np.float64)
        jj, kk = np.meshgrid(z, z, indexing="ij")
        idx = np.stack([jj.ravel(), kk.ravel()], axis=1)
        fourier = np.exp(-2j * np.pi * (nodes @ idx.T))  # (G, p^2)
        m = mu.values.ravel()
        self.proj = [projection_matrix(n, p, d, voxels) for d in self.directions]
        self.coded = [fourier @ (m[:, None] * pm) for pm in self.proj]
        self.grid_size = nodes.shape[0]

    def patterns(self, values):
        parts = []
        for a in self.coded:
            amp = values @ a.T
            parts.append(amp.real ** 2 + amp.imag ** 2)
        return np.concatenate(parts, axis=1)

    def projections(self, values):
        return [values @ pm.T for pm in self.proj]


def _bits_to_points(bits, p):
    off = p // 2
    pts = []
    for pos in range(p * p):
        if (bits >> pos) & 1:
            a, b = divmod(pos, p)
            pts.append((a - off, b - off))
    return pts


def _line_compatible_masks(proj, tol, p, cache):
    mag = np.abs(proj)
    thresh = tol * np.maximum(1.0, mag.max(axis=1, keepdims=True))
    weights = (np.int64(1) << np.arange(p * p, dtype=np.int64))
    bits = ((mag > thresh).astype(np.int64) * weights).sum(axis=1)
    uniq, inv = np.unique(bits, return_inverse=True)
    flags = np.empty(uniq.size, dtype=bool)
    for u_i, b in enumerate(uniq):
        b = int(b)
        if b not in cache:
            cache[b] = classify_support(_bits_to_points(b, p), 2).line_compatible
        flags[u_i] = cache[b]
    return flags[inv.ravel()]


def _chain_groups(keys, thresh):
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    breaks = np.nonzero(np.diff(sk) > thresh)[0] + 1
    return np.split(order, breaks)


def collision_classes(values, ops: _Operators, same_tol=SAME_TOL, gap=GAP_TOL, seed=0,
                      max_brute=2048):
    """Group objects (rows of ``values``) whose coded data agree to ``same_tol``.

    Returns (labels, borderline) where borderline lists index pairs whose
    distance falls between ``same_tol`` and ``gap``.  Candidate pairs are found
    by chaining random linear keys at spacing ``gap * ||r||_1``, which never
    separates two pattern vectors closer than ``gap`` in sup norm.
    """
    values = np.asarray(values)
    total = values.shape[0]
    labels = np.full(total, -1, dtype=np.int64)
    borderline = []
    if total == 0:
        return labels, borderline
    rng = np.random.default_rng(seed)
    width = len(ops.coded) * ops.grid_size
    rvecs = rng.standard_normal((3, width))
    keys = np.empty((total, 3))
    chunk = 65536
    for start in range(0, total, chunk):
        pats = ops.patterns(values[start:start + chunk])
        keys[start:start + chunk] = pats @ rvecs.T
    thresholds = gap * np.abs(rvecs).sum(axis=1)

    next_label = 0
    stack = [(np.arange(total), 0)]
    while stack:
        members, level = stack.pop()
        if members.size == 1:
            labels[members[0]] = next_label
            next_label += 1
            continue
        if members.size > max_brute and level < 3:
            for grp in _chain_groups(keys[members, level], thresholds[level]):
                stack.append((members[grp], level + 1))
            continue
        if level < 3 and level == 0:
            for grp in _chain_groups(keys[members, 0], thresholds[0]):
                stack.append((members[grp], 1))
            continue
        pats = ops.patterns(values[members])
        dist = np.max(np.abs(pats[:, None, :] - pats[None, :, :]), axis=2)
        parent = np.arange(members.size)

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        close = np.argwhere(np.triu(dist <= same_tol, 1))
        for a, b in close:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
        mid = np.argwhere(np.triu((dist > same_tol) & (dist < gap), 1))
        for a, b in mid:
            borderline.append((int(members[a]), int(members[b]), float(dist[a, b])))
        roots = np.array([find(a) for a in range(members.size)])
        _, local = np.unique(roots, return_inverse=True)
        labels[members] = next_label + local
        next_label += int(local.max()) + 1
    return labels, borderline


@dataclass
class OracleReport:
    classes: list
    phase_orbit_pure: list
    anomalies: list
    n_enumerated: int
    n_admissible: int
    phase_group: tuple
    transient: list = field(default_factory=list)
    borderline: list = field(default_factory=list)
    mask_seeds: list = field(default_factory=list)

    @property
    def n_classes(self):
        return len(self.classes)

    @property
    def all_pure(self):
        return all(self.phase_orbit_pure)


class ObjectCodec:
    """Mixed-radix indexing of objects on a voxel set over a finite alphabet."""

    def __init__(self, support, alphabet, n, p):
        self.support = [tuple(int(c) for c in v) for v in support]
        self.alphabet = np.asarray(alphabet, dtype=np.complex128)
        self.n, self.p = n, p
        self.k = self.alphabet.size
        self.size = self.k ** len(self.support)
        self.weights = self.k ** np.arange(len(self.support) - 1, -1, -1, dtype=np.int64)

    def digits(self, index):
        index = np.asarray(index, dtype=np.int64)
        return (index[..., None] // self.weights) % self.k

    def index(self, digits):
        return np.asarray(digits, dtype=np.int64) @ self.weights

    def values(self, index):
        return self.alphabet[self.digits(index)]

    def decode(self, index):
        vals = np.zeros((self.n,) * 3, dtype=np.complex128)
        for v, sym in zip(self.support, self.values(index)):
            vals[tuple(c + self.n // 2 for c in v)] = sym
        return Object3D(vals, self.p)


def exhaustive_oracle(support, alphabet, mu: Mask2D, s: Scheme, budget=10**7,
                      same_tol=SAME_TOL, gap=GAP_TOL, support_tol=1e-9, seed=0, reruns=3):
    """Enumerate every object on ``support`` over ``alphabet`` and class them by coded data.

    Only objects whose projections are non-line in every scheme direction are
    kept.  Each data-collision class is checked to be exactly one global-phase
    orbit.  A class merging several orbits is re-tested under ``reruns`` fresh
    random masks (random masks only) and reported as an anomaly only if the
    collision persists under all of them.
    """
    n, p = s.n, s.p
    if mu.p != p:
        raise SizeMismatch(f"mask side {mu.p} does not match scheme p={p}")
    codec = ObjectCodec(support, alphabet, n, p)
    for v in codec.support:
        if any(not (-(n // 2) <= c < n - n // 2) for c in v):
            raise InvalidSize(f"voxel {v} lies outside Z_{n}^3")
    if codec.size > budget:
        raise BudgetExceeded(f"{codec.size} objects exceed the budget of {budget}")
    group = _phase_group(alphabet)
    ops = _Operators(n, p, codec.support, mu, s.directions())

    cache = {}
    admissible = []
    chunk = 65536
    for start in range(0, codec.size, chunk):
        idx = np.arange(start, min(codec.size, start + chunk), dtype=np.int64)
        vals = codec.values(idx)
        ok = np.ones(idx.size, dtype=bool)
        for proj in ops.projections(vals):
            ok &= ~_line_compatible_masks(proj, support_tol, p, cache)
        admissible.append(idx[ok])
    adm = np.concatenate(admissible) if admissible else np.zeros(0, dtype=np.int64)
    values = codec.values(adm)
    labels, borderline = collision_classes(values, ops, same_tol, gap, seed)

    # orbit bookkeeping: orbit id = smallest index among the phase images
    digits = codec.digits(adm)
    images = np.stack([codec.index(_symbol_permutation(alphabet, c)[digits]) for c in group])
    orbit_id = images.min(axis=0)
    n_classes = int(labels.max()) + 1 if labels.size else 0
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n_classes + 1))
    classes, pure, anomalies, transient = [], [], [], []
    pos_of = {int(i): k for k, i in enumerate(adm)} if adm.size < 2_000_000 else None
    seeds = [int(x) for x in np.random.SeedSequence(seed).generate_state(reruns)]
    for c in range(n_classes):
        members_pos = order[bounds[c]:bounds[c + 1]]
        members = adm[members_pos]
        classes.append([int(i) for i in members])
        orbits = np.unique(orbit_id[members_pos])
        orbit_members = np.unique(images[:, members_pos])
        is_pure = orbits.size == 1 and orbit_members.size == members.size
        pure.append(bool(is_pure))
        if is_pure:
            continue
        entry = {"class": c, "members": [int(i) for i in members], "orbits": [int(o) for o in orbits]}
        if orbits.size == 1:
            entry["kind"] = "split_orbit"
            anomalies.append(entry)
            continue
        entry["kind"] = "merged_orbits"
        if mu.is_plain or reruns == 0:
            entry["reruns_persisting"] = None
            anomalies.append(entry)
            continue
        reps = codec.values(orbits)
        persisted = 0
        for rs in seeds:
            alt = _Operators(n, p, codec.support, random_mask(p, rs), s.directions())
            pats = alt.patterns(reps)
            dist = np.max(np.abs(pats[:, None, :] - pats[None, :, :]), axis=2)
            if np.any(np.triu(dist <= same_tol, 1)):
                persisted += 1
        entry["reruns_persisting"] = persisted
        if persisted == len(seeds):
            anomalies.append(entry)
        else:
            transient.append(entry)
    return OracleReport(
        classes=classes,
        phase_orbit_pure=pure,
        anomalies=anomalies,
        n_enumerated=int(codec.size),
        n_admissible=int(adm.size),
        phase_group=tuple(group),
        transient=transient,
        borderline=borderline,
        mask_seeds=seeds,
    )


def twin_distinguish(f: Object3D, mu: Mask2D, s: Scheme):
    """Data deviation between f and its 3D twin (odd n)."""
    return distinguish(f, twin_object(f), mu, s)
