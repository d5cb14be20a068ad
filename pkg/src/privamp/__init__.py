"""Security bounds for privacy amplification with linear hash families over finite fields."""

from .asymptotics import (
    EXPONENTS,
    ExponentCurve,
    equivocation_rate,
    exponent,
    exponent_curve,
    exponent_relations_check,
    second_order,
    second_order_finite,
    type_exponent_check,
)
from .bounds import (
    BoundReport,
    bound_equivocation,
    bound_min_chernoff,
    bound_min_tail,
    bound_renyi2,
    bound_renyi2_opt,
    bound_simple,
    compute_bound,
    exact_leakage,
)
from .dist import (
    JointSubDistribution,
    Spectrum,
    convolve_shift,
    derive,
    iid_power,
    pushforward,
    spectrum_power,
    tail,
)
from .entropy import (
    cond_renyi,
    criteria,
    gallager_phi,
    renyi_divergence,
    smooth_h2_info_spectrum,
    smooth_min_entropy,
    smoothing_distance_min,
    tilted_distribution,
    variance_V,
)
from .errors import PrivampError
from .field import FieldElement, FieldSpec, ff_arith, field_spec, pairing
from .hashing import (
    HashFamily,
    LinearHash,
    conversion_epsilon,
    delta_bias,
    dual_universality_epsilon,
    make_family,
    nonuniform_seed_epsilon,
    universality_epsilon,
)
from .verify import grid_oracle, run_suite

__version__ = "0.1.0"
