"""Numerical core: special functions, fields, the fractional heat operator and its extension."""

from .blowup import (
    BlowupReport,
    HarnackReport,
    NondegeneracyReport,
    ParabolicCylinder,
    ParabolicDilation,
    RescaledField,
    VanishingOrderReport,
    almgren_rescale,
    blowup_sequence,
    frequency_transport_check,
    harnack_quotient,
    nondegeneracy_check,
    rescaled_neumann_check,
    vanishing_order,
)
from .errors import (
    ConfigError,
    DegeneracyError,
    DomainError,
    ExtrapolationError,
    LabError,
    PreconditionError,
    QuadratureDivergenceError,
    StructuralError,
)
from .extension import Box, SpectralExtension, YGrid, extend, neumann_trace, pde_residual, poisson_check
from .fields import SpaceTimeField, SpaceTimeGrid, dft_forward, dft_inverse, heat_semigroup
from .fracheat import (
    BalakrishnanQuadrature,
    FracConfig,
    PotentialField,
    frac_heat_balakrishnan,
    frac_heat_multiplier,
    manufactured_potential,
)
from .frequency import (
    BackwardGaussian,
    CurveOptions,
    FrequencyCurve,
    GaussianQuadrature,
    adjusted_frequency_curve,
    averaged_functionals,
    calibrate_C,
    centered_frequency,
    first_variation_check,
    height,
    energy_t,
)
from .solutions import LinearCombination, SymbolicField, builtin_field
from .specfun import gamma, macdonald_k, phi

__all__ = [
    "BackwardGaussian",
    "BalakrishnanQuadrature",
    "BlowupReport",
    "Box",
    "ConfigError",
    "CurveOptions",
    "DegeneracyError",
    "DomainError",
    "ExtrapolationError",
    "FracConfig",
    "FrequencyCurve",
    "GaussianQuadrature",
    "HarnackReport",
    "LabError",
    "LinearCombination",
    "NondegeneracyReport",
    "ParabolicCylinder",
    "ParabolicDilation",
    "PotentialField",
    "PreconditionError",
    "QuadratureDivergenceError",
    "RescaledField",
    "SpaceTimeField",
    "SpaceTimeGrid",
    "SpectralExtension",
    "StructuralError",
    "SymbolicField",
    "VanishingOrderReport",
    "YGrid",
    "adjusted_frequency_curve",
    "almgren_rescale",
    "averaged_functionals",
    "blowup_sequence",
    "builtin_field",
    "calibrate_C",
    "centered_frequency",
    "dft_forward",
    "dft_inverse",
    "energy_t",
    "extend",
    "first_variation_check",
    "frac_heat_balakrishnan",
    "frac_heat_multiplier",
    "frequency_transport_check",
    "gamma",
    "harnack_quotient",
    "heat_semigroup",
    "height",
    "macdonald_k",
    "manufactured_potential",
    "neumann_trace",
    "nondegeneracy_check",
    "pde_residual",
    "phi",
    "poisson_check",
    "rescaled_neumann_check",
    "vanishing_order",
]
