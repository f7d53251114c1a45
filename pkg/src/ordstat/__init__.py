"""Order statistics of scaled random vectors.

Deterministic bounds with explicit constants for minima, k-th minima, and sums
of the k smallest entries of (x_i xi_i), together with the greedy partition
construction, majorization machinery for orthogonal transforms, linear vs
nonlinear m-term approximation errors, and a seeded Monte Carlo engine that
certifies every inequality.
"""

from .dist import (ConditionReport, DistributionSpec, Kind, check_alpha_condition,
                   check_beta_condition, check_cdf_decay, default_grid, exponential,
                   from_name, gen_exponential, half_normal, make_distribution,
                   uniform01)
from .ostat import IntervalPartition, jth_min, sum_k_smallest, sum_partition_min
from .bounds import (BoundReport, ScaledSequence, agmean_bound, averaged_cdf_quantile,
                     comparison_constant, greedy_partition, kmin_expectation_lower,
                     kmin_median_lower_dependent, kmin_tail_upper, low_est_check,
                     maclaurin_check, malzeit_ratio, min_expectation_bounds,
                     min_probability_lower, quantile_lower_bound, sum_kmin_bounds,
                     tail_sums, truncation_threshold, w_constant)
from .mc import (McEstimate, Statistic, VectorModel, check_sandwich, comonotone,
                 empirical_cdf, estimate_kth_min, estimate_sum_kmin,
                 gaussian_diagonal, independent_scaled, rotated_gaussian,
                 sample_vector)
from .transform import (MajorizationReport, MzResult, OrthogonalMatrix, VariancePair,
                        majorization_check, mz_ratio, propagate_variances,
                        random_orthogonal, read_matrix, write_matrix)
from .approx import (CovarianceModel, KlBasis, check_lastprop, kl_basis,
                     linear_error, nonlinear_error, wrd_constant)

__version__ = "0.1.0"
