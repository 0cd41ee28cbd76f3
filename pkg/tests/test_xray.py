import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import SHEARED_DELTA_FROZEN, project_loops
from tomophase.core import Object3D, SupportClass, delta_object, random_object
from tomophase.errors import EvenPadding, InvalidSize, SlopeOutOfRange
from tomophase.xray import Direction, Projection2D, interpolate_slice, project, projection_matrix


def test_direction_validation():
    with pytest.raises(SlopeOutOfRange):
        Direction("x", 1.5, 0.0).validate()
    with pytest.raises(InvalidSize):
        Direction("w", 0.0, 0.0)
    assert Direction("y", 0.2, -0.3).vector() == (0.2, 1.0, -0.3)


def test_interpolate_slice_examples():
    d = delta_object(3)
    assert interpolate_slice(d, "x", 0, 0, 0) == pytest.approx(1.0)
    assert interpolate_slice(d, "x", 0, 1, 0) == 0.0
    f = random_object(3, 5, seed=8)
    for x in (-1, 0, 1):
        for z in (-1, 0, 1):
            assert abs(interpolate_slice(f, "y", 1, x, z) - f.at(x, 1, z)) < 1e-12
    assert interpolate_slice(f, "y", 2, 0.3, 0.1) == 0


@pytest.mark.parametrize("family", ["x", "y", "z"])
@pytest.mark.parametrize("slopes", [(0.0, 0.0), (0.4, -0.7), (-1.0, 1.0), (0.25, 0.9)])
def test_delta_projects_to_delta(family, slopes):
    g = project(delta_object(3), Direction(family, *slopes))
    expected = Projection2D.delta(5).values
    assert np.allclose(g.values, expected, atol=1e-14)


def test_axis_sum_oracle():
    f = random_object(3, 5, seed=3)
    g = project(f, Direction("x", 0.0, 0.0))
    direct = f.values.sum(axis=0)
    assert np.allclose(g.values[1:4, 1:4], direct, atol=1e-12)
    assert np.allclose(g.values[[0, 4], :], 0, atol=1e-12)


def test_sheared_delta_frozen():
    o = SHEARED_DELTA_FROZEN
    n, p = o["n"], o["p"]
    vals = np.zeros((n, n, n), dtype=complex)
    vals[tuple(c + n // 2 for c in o["voxel"])] = 1.0
    g = project(Object3D(vals, p), Direction(*o["direction"]))
    assert np.allclose(g.values[:, p // 2].real, o["row_c2_0"], atol=1e-14)
    mask = np.ones((p, p), bool)
    mask[:, p // 2] = False
    assert np.allclose(g.values[mask], 0, atol=1e-14)


@pytest.mark.parametrize("family", ["x", "y", "z"])
def test_project_matches_loop_oracle(family):
    f = random_object(2, 5, seed=19)
    d = Direction(family, 0.35, -0.8)
    assert np.allclose(project(f, d).values, project_loops(f.values, 2, 5, family, 0.35, -0.8), atol=1e-11)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.sampled_from("xyz"), st.floats(-1, 1), st.floats(-1, 1),
       st.integers(0, 10_000))
def test_mass_conservation_and_linearity(n, family, a, b, seed):
    f = random_object(n, seed=seed)
    g = random_object(n, seed=seed + 1)
    d = Direction(family, a, b)
    pf, pg = project(f, d), project(g, d)
    assert abs(pf.values.sum() - f.values.sum()) < 1e-10
    assert np.allclose(project(f + g, d).values, pf.values + pg.values, atol=1e-11)


def test_projection_matrix_matches_project():
    f = random_object(3, 5, seed=5)
    d = Direction("z", -0.3, 0.6)
    a = projection_matrix(3, 5, d)
    assert np.allclose(a @ f.values.ravel(), project(f, d).values.ravel(), atol=1e-12)
    vox = [(0, 0, 0), (1, -1, 0)]
    sub = projection_matrix(3, 5, d, vox)
    assert sub.shape == (25, 2)
    assert np.allclose(sub[:, 0], project(delta_object(3), d).values.ravel())


def test_projection_support_and_embedding():
    g = Projection2D.from_small(np.ones((3, 3)), 5)
    assert g.support_class() is SupportClass.SPREAD2D
    assert Projection2D.delta(5, (1, -1)).at(1, -1) == 1
    assert Projection2D.delta(5).at(7, 0) == 0
    with pytest.raises(EvenPadding):
        Projection2D.from_small(np.ones((2, 2)), 4)
    with pytest.raises(InvalidSize):
        Projection2D(np.zeros((3, 4)))
