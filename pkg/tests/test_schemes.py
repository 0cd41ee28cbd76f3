import numpy as np
import pytest

from oracles import ROTATION_FROZEN, distinct_mod
from tomophase.errors import GammaOutOfRange, SlopeOutOfRange, StrongCTFailure, ZeroExtraDirection
from tomophase.schemes import (
    Scheme,
    check_strong_ct,
    node_values,
    random_scheme,
    realize_extra,
    rotation_scheme,
    tom2_scheme,
)


def test_all_zero_slopes_fail():
    for n in (2, 3, 4):
        rep = check_strong_ct(Scheme("z", np.zeros((n, 2)), n))
        assert not rep.passed and rep.worst_count == 1


def test_shear_scheme_fails_on_second_axis():
    n = 3
    p = 2 * n - 1
    s = Scheme("x", [(2 * l / p, 0.0) for l in range(n)], n)
    rep = check_strong_ct(s)
    assert not rep.passed
    off = p // 2
    assert rep.counts[off, off + 1] == 1
    assert rep.counts[off + 1, off] == n


def test_counts_match_bruteforce():
    s = random_scheme(3, seed=5)
    vals = node_values(s.slopes, s.p)
    rep = check_strong_ct(s)
    for row, count in zip(vals, rep.counts.ravel()):
        assert count == distinct_mod(row, s.p, 1e-9)


def test_random_schemes_pass():
    passed = sum(check_strong_ct(random_scheme(n, seed=sd)).passed for n in (2, 3, 4, 5) for sd in range(25))
    assert passed == 100
    a, b = random_scheme(4, "y", seed=3), random_scheme(4, "y", seed=3)
    assert np.array_equal(a.slopes, b.slopes)
    assert np.all(np.abs(a.slopes) < 1)


def test_rotation_scheme():
    s = rotation_scheme(1.0, 4)
    assert np.allclose(s.slopes, ROTATION_FROZEN, atol=1e-15)
    s = rotation_scheme(0.6, 7)
    assert np.allclose(np.hypot(s.slopes[:, 0], s.slopes[:, 1]), 0.6)
    with pytest.raises(GammaOutOfRange):
        rotation_scheme(0.0, 3)
    with pytest.raises(GammaOutOfRange):
        rotation_scheme(1.2, 3)


def test_rotation_scheme_recorded():
    # not asserted: only that the checker runs for every n
    for n in range(2, 7):
        rep = check_strong_ct(rotation_scheme(0.9, n))
        assert rep.worst_count >= 1


def test_tom2_construction():
    base = random_scheme(3, "x", seed=1)
    s = tom2_scheme(base, (1, 0))
    assert len(s.directions()) == 4
    with pytest.raises(ZeroExtraDirection):
        tom2_scheme(base, (0, 0))
    with pytest.raises(StrongCTFailure):
        tom2_scheme(Scheme("x", np.zeros((3, 2)), 3), (1, 0))


def test_realize_extra():
    d = realize_extra("x", (1.0, 0.0))
    assert d.family == "y" and (d.alpha, d.beta) == (0.0, 0.0)
    d = realize_extra("z", (0.4, 0.8))
    assert d.family == "y" and d.alpha == pytest.approx(0.5) and d.beta == 0.0
    d = realize_extra("y", (-0.5, 1.0))
    assert d.family == "z" and d.alpha == pytest.approx(-0.5) and d.beta == 0.0
    for fam in "xyz":
        for ex in [(0.3, -0.9), (1.0, 1.0), (-2.0, 0.5)]:
            d = realize_extra(fam, ex).validate()
            v = np.array(d.vector())
            assert v[["x", "y", "z"].index(fam)] == 0


def test_slope_bounds():
    with pytest.raises(SlopeOutOfRange):
        Scheme("z", [(1.2, 0.0)], 1)
