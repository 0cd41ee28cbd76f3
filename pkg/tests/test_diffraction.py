import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import AUTOCORR_1D_FROZEN, autocorrelation_loops, pattern_loops
from tomophase.diffraction import (
    Autocorrelation2D,
    DiffractionPattern,
    apply_mask,
    autocorrelation,
    diffraction_pattern,
    kadec_check,
    orbit_transform,
    pattern_from_autocorrelation,
    plain_mask,
    random_mask,
    recover_autocorrelation,
    regular_nodes,
    twin,
)
from tomophase.errors import (
    EvenPadding,
    KadecViolation,
    NegativeIntensity,
    SizeMismatch,
    SupportOverflow,
    WrongNodeCount,
)
from tomophase.xray import Projection2D


def rand_proj(p, seed, small=None):
    rng = np.random.default_rng(seed)
    m = small or p
    vals = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return Projection2D.from_small(vals, p)


def test_random_mask_contract():
    a, b = random_mask(5, 3), random_mask(5, 3)
    assert np.array_equal(a.phases, b.phases)
    assert np.allclose(np.abs(a.values), 1.0)
    assert np.all((a.phases >= -np.pi) & (a.phases < np.pi))
    big = random_mask(101, 9)
    assert abs(big.values.mean()) < 0.1
    assert plain_mask(5).is_plain and not a.is_plain


def test_apply_mask():
    g = rand_proj(5, 1)
    assert np.array_equal(apply_mask(g, plain_mask(5)).values, g.values)
    mu = random_mask(5, 2)
    masked = apply_mask(g, mu)
    assert np.allclose(np.abs(masked.values), np.abs(g.values))
    sparse = Projection2D.from_small(np.eye(3), 5)
    assert apply_mask(sparse, mu).support_class() == sparse.support_class()
    with pytest.raises(SizeMismatch):
        apply_mask(g, plain_mask(7))


def test_autocorrelation_examples():
    r = autocorrelation(Projection2D.delta(5))
    expected = np.zeros((9, 9))
    expected[4, 4] = 1
    assert np.allclose(r.values, expected)
    g = rand_proj(5, 4)
    r = autocorrelation(g)
    assert r.at(0, 0) == pytest.approx(np.sum(np.abs(g.values) ** 2))
    assert r.hermitian_defect() < 1e-12
    assert np.allclose(r.values, autocorrelation_loops(g.values), atol=1e-12)


def test_autocorrelation_frozen():
    o = AUTOCORR_1D_FROZEN
    vals = np.zeros((3, 3), complex)
    for (a, b), v in o["g"].items():
        vals[a + 1, b + 1] = v
    r = autocorrelation(vals)
    for (a, b), v in o["R"].items():
        assert r.at(a, b) == pytest.approx(v)


def test_pattern_examples():
    nodes = np.random.default_rng(1).uniform(-0.5, 0.5, size=(9, 2))
    assert np.allclose(diffraction_pattern(Projection2D.delta(3)).intensities, 1.0)
    g = rand_proj(5, 5)
    pat = diffraction_pattern(g)
    assert pat.as_grid().shape == (9, 9)
    via_r = pattern_from_autocorrelation(autocorrelation(g), regular_nodes(5))
    assert np.allclose(pat.intensities, via_r.real, atol=1e-10)
    assert np.allclose(np.abs(via_r.imag), 0, atol=1e-10)
    w = regular_nodes(5)[17]
    assert pat.intensities[17] == pytest.approx(pattern_loops(g.values, w), abs=1e-10)
    rot = diffraction_pattern(Projection2D(np.exp(0.9j) * g.values))
    assert np.max(np.abs(rot.intensities - pat.intensities)) <= 1e-12 * max(1, pat.intensities.max())
    assert nodes.shape == (9, 2)


def test_pattern_negative_intensity():
    with pytest.raises(NegativeIntensity):
        DiffractionPattern([1.0, -1e-6], [[0, 0], [0.1, 0]], 1, "irregular")
    pat = DiffractionPattern([1.0, -1e-13], [[0, 0], [0.1, 0]], 1, "irregular")
    assert pat.intensities[1] == 0.0
    with pytest.raises(WrongNodeCount):
        DiffractionPattern([1.0], [[0, 0], [0.1, 0]], 1, "irregular")


def test_kadec_examples():
    p = 3
    reg = regular_nodes(p)
    rep = kadec_check(reg, p)
    assert rep.passed and rep.max_deviation == 0
    assert kadec_check(reg + 0.2 / (2 * p - 1), p).passed
    bad = reg.copy()
    bad[4] += 0.30 / (2 * p - 1)
    rep_e = kadec_check(bad, p, norm="euclidean")
    assert not rep_e.passed and rep_e.max_deviation == pytest.approx(0.3 * np.sqrt(2))
    bad2 = reg.copy()
    bad2[0, 0] += 0.26 / (2 * p - 1)
    assert not kadec_check(bad2, p).passed
    with pytest.raises(WrongNodeCount):
        kadec_check(reg[:-1], p)


def test_recover_regular_and_zero():
    g = rand_proj(5, 6)
    r = autocorrelation(g)
    rec = recover_autocorrelation(diffraction_pattern(g))
    assert np.max(np.abs(rec.values - r.values)) <= 1e-10
    zero = recover_autocorrelation(diffraction_pattern(np.zeros((5, 5))))
    assert np.allclose(zero.values, 0)


def test_recover_irregular():
    p = 4
    g = rand_proj(5, 8, small=3).values[1:5, 1:5]
    rng = np.random.default_rng(12)
    nodes = regular_nodes(p) + rng.uniform(-0.2, 0.2, size=(49, 2)) / (2 * p - 1)
    pat = diffraction_pattern(g, nodes)
    rec = recover_autocorrelation(pat)
    err = np.max(np.abs(rec.values - autocorrelation(g).values))
    assert err <= 1e-8 * rec.condition
    bad = regular_nodes(p).copy()
    bad[3] += 0.3 / (2 * p - 1)
    with pytest.raises(KadecViolation):
        diffraction_pattern(g, bad)
    forced = diffraction_pattern(g, bad, force=True)
    assert forced.metadata["forced"]
    with pytest.raises(KadecViolation):
        recover_autocorrelation(forced)


def test_twin_properties():
    g = rand_proj(5, 9)
    assert np.array_equal(twin(twin(g)).values, g.values)
    sym = np.random.default_rng(1).standard_normal((5, 5))
    sym = sym + sym[::-1, ::-1]
    assert np.allclose(twin(Projection2D(sym)).values, sym)
    a = diffraction_pattern(g).intensities
    b = diffraction_pattern(twin(g)).intensities
    assert np.max(np.abs(a - b)) <= 1e-10
    with pytest.raises(EvenPadding):
        twin(Projection2D(np.ones((4, 4))))


def test_orbit_transform():
    g = rand_proj(7, 10, small=3)
    assert np.array_equal(orbit_transform(g).values, g.values)
    base = diffraction_pattern(g).intensities
    for shift, theta, tw in [((1, 0), 0.3, False), ((-2, 1), 1.1, True), ((0, 2), -2.0, True)]:
        h = orbit_transform(g, shift, theta, tw)
        assert np.max(np.abs(diffraction_pattern(h).intensities - base)) <= 1e-10
        ra, rb = autocorrelation(g).values, autocorrelation(h).values
        if tw:
            rb = rb[::-1, ::-1]
        assert np.max(np.abs(np.abs(ra) - np.abs(rb))) <= 1e-10
    with pytest.raises(SupportOverflow):
        orbit_transform(g, (3, 0))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(-2, 2), st.integers(-2, 2), st.floats(-3, 3))
def test_pattern_invariances_property(seed, s1, s2, theta):
    g = rand_proj(7, seed, small=3)
    base = diffraction_pattern(g).intensities
    h = orbit_transform(g, (s1, s2), theta, seed % 2 == 1)
    assert np.max(np.abs(diffraction_pattern(h).intensities - base)) <= 1e-10


def test_autocorrelation_type():
    with pytest.raises(Exception):
        Autocorrelation2D(np.zeros((4, 4)))
