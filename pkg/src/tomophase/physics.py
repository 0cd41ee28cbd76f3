"""Born and Rytov exit waves under the projection approximation.

The continuum integral of the scattering potential along the optical axis
is replaced by the discrete axis-aligned line sum, i.e. the X-ray transform
with zero slopes.
"""

from dataclasses import dataclass

import numpy as np

from .core import Object3D
from .diffraction import Mask2D, regular_nodes
from .errors import InvalidSize, NonPositiveInput, SizeMismatch
from . import kernels
from .core import centered_range
from .xray import Direction, Projection2D, project

KAPPA_DEFAULT = 2.0 * np.pi
BORN = "born"
RYTOV = "rytov"


@dataclass(frozen=True)
class ExitWave2D:
    values: np.ndarray
    model: str
    kappa: float

    @property
    def p(self):
        return self.values.shape[0]


def axis_line_sum(f: Object3D, axis="z"):
    return project(f, Direction(axis, 0.0, 0.0))


def exit_wave(f: Object3D, axis="z", kappa=KAPPA_DEFAULT, model=BORN):
    """Born wave ``1 - (i / 2 kappa) S`` or Rytov wave ``exp(-(i / 2 kappa) S)``, S the axis line sum."""
    if kappa <= 0:
        raise NonPositiveInput(f"kappa must be positive, got {kappa}")
    s = axis_line_sum(f, axis).values
    model = model.lower()
    if model == BORN:
        vals = 1.0 - 0.5j / kappa * s
    elif model == RYTOV:
        vals = np.exp(-0.5j / kappa * s)
    else:
        raise InvalidSize(f"unknown exit-wave model {model!r}")
    vals = np.array(vals)
    vals.setflags(write=False)
    return ExitWave2D(vals, model, float(kappa))


def born_rytov_consistency(f: Object3D, kappa=KAPPA_DEFAULT, axis="z"):
    """max |exp(v_B - 1) - v_R| over Z_p^2."""
    vb = exit_wave(f, axis, kappa, BORN).values
    vr = exit_wave(f, axis, kappa, RYTOV).values
    return float(np.max(np.abs(np.exp(vb - 1.0) - vr)))


def _transform(values, nodes):
    p = values.shape[0]
    z = centered_range(p).astype(np.float64)
    jj, kk = np.meshgrid(z, z, indexing="ij")
    idx = np.stack([jj.ravel(), kk.ravel()], axis=1)
    return kernels.ndft(np.asarray(values, dtype=np.complex128).ravel(), idx, nodes, 1.0)


@dataclass(frozen=True)
class IntensityDecomposition:
    lhs: np.ndarray
    reference: np.ndarray
    interference: np.ndarray
    dark_field: np.ndarray
    residual: float


def intensity_decomposition(mu: Mask2D, fproj, kappa=KAPPA_DEFAULT, w_grid=None):
    """Split |F(mu v_B)|^2 into reference, interference and dark-field terms.

    reference = |F mu|^2, interference = Im(conj(F mu) F(mu S)) / kappa,
    dark_field = |F(mu S)|^2 / (4 kappa^2), with v_B = 1 - (i / 2 kappa) S.
    The transform is taken over the Z_p^2 window.
    """
    s = fproj.values if isinstance(fproj, Projection2D) else np.asarray(fproj, dtype=np.complex128)
    if s.shape != mu.phases.shape:
        raise SizeMismatch(f"projection shape {s.shape} does not match mask {mu.phases.shape}")
    nodes = regular_nodes(mu.p) if w_grid is None else np.asarray(w_grid, dtype=np.float64).reshape(-1, 2)
    m = mu.values
    f_mu = _transform(m, nodes)
    f_mus = _transform(m * s, nodes)
    vb = 1.0 - 0.5j / kappa * s
    lhs = np.abs(_transform(m * vb, nodes)) ** 2
    t0 = np.abs(f_mu) ** 2
    t1 = np.imag(np.conj(f_mu) * f_mus) / kappa
    t2 = np.abs(f_mus) ** 2 / (4.0 * kappa ** 2)
    resid = float(np.max(np.abs(lhs - (t0 + t1 + t2)))) if lhs.size else 0.0
    return IntensityDecomposition(lhs, t0, t1, t2, resid)


@dataclass(frozen=True)
class FresnelReport:
    ell: float
    wavelength: float
    z0: float
    fresnel_number: float
    valid: bool
    threshold: float


def fresnel_validity(ell, wavelength, z0, threshold=10.0):
    """Fresnel number ell^2 / (wavelength z0); the projection approximation needs it large."""
    for name, val in (("ell", ell), ("wavelength", wavelength), ("z0", z0)):
        if not val > 0:
            raise NonPositiveInput(f"{name} must be positive, got {val}")
    nf = ell * ell / (wavelength * z0)
    return FresnelReport(ell, wavelength, z0, nf, nf >= threshold, threshold)
