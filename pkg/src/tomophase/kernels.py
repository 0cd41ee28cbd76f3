"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

The numba flavour is used when numba imports cleanly and the environment
variable ``TOMOPHASE_NUMBA`` is not set to ``0``/``false``/``off``.  Both
flavours are always importable as ``<name>_numpy`` / ``<name>_numba`` so the
test-suite and the benchmark can compare them directly.
"""

import os

import numpy as np

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False


def _env_wants_numba():
    flag = os.environ.get("TOMOPHASE_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


USE_NUMBA = HAVE_NUMBA and _env_wants_numba()
BACKEND = "numba" if USE_NUMBA else "numpy"


def _njit(fn):
    if not HAVE_NUMBA:
        return fn
    return numba.njit(cache=True)(fn)


# ---------------------------------------------------------------------------
# interpolated line sums
# ---------------------------------------------------------------------------


def line_sums_numpy(slabs, a_tab, b_tab):
    """out[c1, c2] = sum_i sum_{j,k} a_tab[i,c1,j] * slabs[i,j,k] * b_tab[i,c2,k]."""
    return np.einsum("acj,ajk,adk->cd", a_tab, slabs, b_tab, optimize=True)


def _line_sums_loops(slabs, a_tab, b_tab):
    n = slabs.shape[0]
    p = a_tab.shape[1]
    out = np.zeros((p, p), dtype=np.complex128)
    tmp = np.zeros((p, n), dtype=np.complex128)
    for i in range(n):
        for c1 in range(p):
            for k in range(n):
                acc = 0j
                for j in range(n):
                    acc += a_tab[i, c1, j] * slabs[i, j, k]
                tmp[c1, k] = acc
        for c1 in range(p):
            for c2 in range(p):
                acc = 0j
                for k in range(n):
                    acc += tmp[c1, k] * b_tab[i, c2, k]
                out[c1, c2] += acc
    return out


line_sums_numba = _njit(_line_sums_loops)


# ---------------------------------------------------------------------------
# direct (nonuniform) discrete Fourier sums
# ---------------------------------------------------------------------------


def ndft_numpy(coef, idx, pts, scale):
    """out[q] = sum_n coef[n] * exp(-2 pi i * scale * <idx[n], pts[q]>)."""
    phase = -2j * np.pi * scale * (pts @ idx.T)
    return np.exp(phase) @ coef


def _ndft_loops(coef, idx, pts, scale):
    npts = pts.shape[0]
    ncoef = coef.shape[0]
    dim = idx.shape[1]
    out = np.zeros(npts, dtype=np.complex128)
    two_pi = 2.0 * np.pi * scale
    for q in range(npts):
        acc = 0j
        for m in range(ncoef):
            dot = 0.0
            for d in range(dim):
                dot += idx[m, d] * pts[q, d]
            ang = two_pi * dot
            acc += coef[m] * complex(np.cos(ang), -np.sin(ang))
        out[q] = acc
    return out


ndft_numba = _njit(_ndft_loops)


# ---------------------------------------------------------------------------
# circular distinct-value counting
# ---------------------------------------------------------------------------


def _max_packing(sorted_vals, period, tol):
    # Largest subset with pairwise circular distance >= tol; greedy from every
    # start point is exact on a circle.
    m = sorted_vals.shape[0]
    best = 0
    for s in range(m):
        start = sorted_vals[s]
        last = start
        count = 1
        limit = start + period - tol
        for t in range(1, m):
            v = sorted_vals[(s + t) % m]
            if s + t >= m:
                v += period
            if v - last >= tol and v <= limit:
                count += 1
                last = v
        if count > best:
            best = count
    return best


def distinct_counts_numpy(values, period, tol):
    """Per row, the number of values distinct modulo ``period`` at resolution ``tol``."""
    vals = np.sort(np.mod(values, period), axis=1)
    out = np.empty(vals.shape[0], dtype=np.int64)
    for r in range(vals.shape[0]):
        row = vals[r]
        gaps = np.diff(row)
        if np.all(gaps >= tol) and (row[0] + period - row[-1] >= tol or row.size == 1):
            out[r] = row.size
        else:
            out[r] = _max_packing(row, period, tol)
    return out


def _distinct_counts_loops(values, period, tol):
    rows = values.shape[0]
    out = np.empty(rows, dtype=np.int64)
    for r in range(rows):
        row = np.sort(np.mod(values[r], period))
        out[r] = _max_packing_nb(row, period, tol)
    return out


if HAVE_NUMBA:
    _max_packing_nb = numba.njit(cache=True)(_max_packing)
    distinct_counts_numba = numba.njit(cache=True)(_distinct_counts_loops)
else:  # pragma: no cover
    _max_packing_nb = _max_packing
    distinct_counts_numba = distinct_counts_numpy


# ---------------------------------------------------------------------------
# autocorrelation
# ---------------------------------------------------------------------------


def autocorrelation_numpy(g):
    """R[n] = sum_{n'} g[n'+n] conj(g[n']) for shifts n in [-(p-1), p-1]^2."""
    p = g.shape[0]
    size = 2 * p - 1
    out = np.zeros((size, size), dtype=np.complex128)
    gc = np.conj(g)
    for a in range(size):
        s1 = a - (p - 1)
        lo1, hi1 = max(0, -s1), min(p, p - s1)
        for b in range(size):
            s2 = b - (p - 1)
            lo2, hi2 = max(0, -s2), min(p, p - s2)
            out[a, b] = np.sum(
                g[lo1 + s1:hi1 + s1, lo2 + s2:hi2 + s2] * gc[lo1:hi1, lo2:hi2]
            )
    return out


def _autocorrelation_loops(g):
    p = g.shape[0]
    size = 2 * p - 1
    out = np.zeros((size, size), dtype=np.complex128)
    for a in range(size):
        s1 = a - (p - 1)
        for b in range(size):
            s2 = b - (p - 1)
            acc = 0j
            for u in range(max(0, -s1), min(p, p - s1)):
                for v in range(max(0, -s2), min(p, p - s2)):
                    acc += g[u + s1, v + s2] * np.conj(g[u, v])
            out[a, b] = acc
    return out


autocorrelation_numba = _njit(_autocorrelation_loops)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def line_sums(slabs, a_tab, b_tab):
    slabs = np.ascontiguousarray(slabs, dtype=np.complex128)
    a_tab = np.ascontiguousarray(a_tab, dtype=np.float64)
    b_tab = np.ascontiguousarray(b_tab, dtype=np.float64)
    if USE_NUMBA:
        return line_sums_numba(slabs, a_tab, b_tab)
    return line_sums_numpy(slabs, a_tab, b_tab)


def ndft(coef, idx, pts, scale):
    coef = np.ascontiguousarray(coef, dtype=np.complex128)
    idx = np.ascontiguousarray(idx, dtype=np.float64)
    pts = np.ascontiguousarray(np.atleast_2d(pts), dtype=np.float64)
    if USE_NUMBA:
        return ndft_numba(coef, idx, pts, float(scale))
    return ndft_numpy(coef, idx, pts, scale)


def distinct_counts(values, period, tol):
    values = np.ascontiguousarray(np.atleast_2d(values), dtype=np.float64)
    if USE_NUMBA:
        return distinct_counts_numba(values, float(period), float(tol))
    return distinct_counts_numpy(values, period, tol)


def autocorrelation(g):
    g = np.ascontiguousarray(g, dtype=np.complex128)
    if USE_NUMBA:
        return autocorrelation_numba(g)
    return autocorrelation_numpy(g)
