"""Distribution of quasi-cyclic noise t_1 R_1 + ... + t_s R_s over F2[X]/(X^n - 1)
and its divergence from the independent-coordinate Bernoulli model."""

from .bernoulli import INF, h_tilde, h_tilde_approx, p, pile_up, sample_poly
from .bounds import (
    DivergenceReport,
    ap_divergence_lower,
    divergence_report,
    expected_weight,
    kl_closed_form,
    kl_equal_t,
    pinsker_upper,
    ratio_bounds_check,
    reverse_pinsker_lower,
)
from .exact import (
    DistTable,
    NoiseSpec,
    dist_sum,
    dist_tR,
    entropy,
    ideal_table,
    kl,
    lambda_profile,
    pair_table,
    total_entropy_bound_ap,
    tv,
)
from .experiments import WeightStats, empirical_tv, sample_noise, weight_experiment
from .kernels import backend_name
from .ring import RingElement, ideal_of, inverse, is_invertible, mul

__version__ = "0.1.0"
