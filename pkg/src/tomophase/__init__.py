"""Discrete tomography of projected diffraction data: X-ray transforms, exact CT
reconstruction, coded diffraction patterns and forward uniqueness checks."""

from .core import (
    Object3D,
    ObjectKind,
    SupportClass,
    centered_range,
    classify_support,
    default_padding,
    delta_object,
    dirichlet_kernel,
    random_object,
    twin_object,
    zero_object,
)
from .ct_recon import (
    AmbiguityVerdict,
    CTResult,
    VerdictKind,
    ambiguity_classify,
    complete_dc_slice,
    ct_reconstruct,
    deficient_scheme,
    integer_slope_witness,
    null_witness,
    project_scheme,
)
from .diffraction import (
    Autocorrelation2D,
    DiffractionPattern,
    Mask2D,
    apply_mask,
    autocorrelation,
    diffraction_pattern,
    kadec_check,
    orbit_transform,
    plain_mask,
    random_mask,
    recover_autocorrelation,
    regular_nodes,
    twin,
)
from .errors import *  # noqa: F401,F403
from .physics import (
    born_rytov_consistency,
    exit_wave,
    fresnel_validity,
    intensity_decomposition,
)
from .schemes import Scheme, check_strong_ct, random_scheme, rotation_scheme, tom2_scheme
from .spectral import (
    VandermondeColumn,
    fourier_slice_residual,
    solve_vandermonde_column,
)
from .uniqueness import (
    CodedDataSet,
    OracleReport,
    coded_data,
    distinguish,
    exhaustive_oracle,
    invariance_suite,
)
from .xray import Direction, Projection2D, project

__version__ = "0.1.0"
