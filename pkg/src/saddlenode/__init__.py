"""Numerical moduli and normal forms of saddle-node foliations in the complex plane."""

__version__ = "0.1.0"

from .algebra import BiSeries, CoeffTable, Poly1, reciprocal_gamma, series_exp, series_log_ratio
from .geometry import FormalClass, SectorFrame, base_point, sigma_for
from .leaf import DulacField, IntegratorConfig, integrate_leaf
from .normalform import (
    NormalFormData,
    integrability_test,
    realize_holonomy,
    realize_orbital,
    realize_temporal,
    roundtrip_check,
)
from .period import (
    CauchyConfig,
    Settings,
    extract_coeffs,
    model_coeff,
    orbital_modulus,
    period_samples,
    temporal_modulus,
)
