import numpy as np
import pytest

from oracles import FRESNEL_FROZEN
from tomophase.core import Object3D, random_object, zero_object
from tomophase.diffraction import plain_mask, random_mask
from tomophase.errors import NonPositiveInput
from tomophase.physics import (
    born_rytov_consistency,
    exit_wave,
    fresnel_validity,
    intensity_decomposition,
)
from tomophase.xray import Projection2D


def test_zero_object_waves():
    f = zero_object(3)
    assert np.allclose(exit_wave(f, model="born").values, 1.0)
    assert np.allclose(exit_wave(f, model="rytov").values, 1.0)
    assert born_rytov_consistency(f) == 0.0


def test_born_hand_sum():
    vals = np.arange(8).reshape(2, 2, 2) * (1 + 0.5j)
    f = Object3D(vals, 3)
    kappa = 2.0
    wave = exit_wave(f, "z", kappa, "born").values
    sums = vals.sum(axis=2)
    # Z_2 sits at storage 0..1 of Z_3 shifted by one: Z_2 = {-1, 0}
    assert np.allclose(wave[0:2, 0:2], 1 - 0.5j / kappa * sums, atol=1e-12)
    assert np.allclose(wave[2, :], 1.0) and np.allclose(wave[:, 2], 1.0)


def test_born_rytov_scale_free():
    f = random_object(3, seed=3)
    for scale in (1e-3, 1.0, 50.0):
        assert born_rytov_consistency(f.scaled(scale)) <= 1e-10


def test_decomposition_examples():
    mu = random_mask(5, 1)
    dec = intensity_decomposition(mu, np.zeros((5, 5)))
    assert np.all(dec.interference == 0) and np.all(dec.dark_field == 0)
    assert np.array_equal(dec.lhs, dec.reference)
    delta = Projection2D.delta(5)
    dec = intensity_decomposition(plain_mask(5), delta, kappa=2 * np.pi)
    assert np.allclose(dec.dark_field, 1 / (4 * (2 * np.pi) ** 2))
    rng = np.random.default_rng(5)
    s = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    assert intensity_decomposition(mu, s).residual <= 1e-10


@pytest.mark.parametrize("args,nf,valid", FRESNEL_FROZEN)
def test_fresnel_frozen(args, nf, valid):
    rep = fresnel_validity(*args)
    assert rep.fresnel_number == pytest.approx(nf)
    assert rep.valid is valid


def test_fresnel_threshold_and_errors():
    assert fresnel_validity(1e-9, 1.0, 1.0, threshold=0).valid
    with pytest.raises(NonPositiveInput):
        fresnel_validity(0, 1, 1)
    with pytest.raises(NonPositiveInput):
        exit_wave(zero_object(2), kappa=0)
