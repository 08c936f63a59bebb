"""Accessible paths in fitness landscapes on the directed binary hypercube.

Toolkit for exact path counting, landscape generation under the classic
random-fitness models (house of cards and its pinned variants, rough Mount
Fuji drift, site percolation), permutation-component combinatorics, and
reproducible Monte Carlo estimation of accessibility probabilities.
"""

__version__ = "0.1.0"

from .errors import ResourceLimitError
from .landscape import (ABSENT, AlphaHoC, EtaSpec, Exponential, HoC, Landscape,
                        ModelSpec, Normal, Percolation, PinnedUniform, RMF,
                        Uniform, choc, generate, generate_pinned,
                        landscape_from_fitness, shift_transform, thin)
from .pathcount import (count_accessible, count_accessible_bruteforce,
                        exists_accessible, layer_interval_count)
from .combinatorics import (TnkTable, bound_diagnostics, c_eta_theta,
                            components, expected_paths, global_descents,
                            pair_term, percolation_expected, s1_s2_split,
                            second_moment_bound, t_n1, t_table)
from .experiments import (AlphaSweepResult, EstimateResult, SweepRow,
                          ThetaCouplingResult, choc_curve, estimate_moments,
                          estimate_p, rmf_theta_coupling,
                          second_moment_sanity, sweep_alpha, wilson_interval)

__all__ = [
    "__version__",
    "ResourceLimitError",
    "ABSENT", "AlphaHoC", "EtaSpec", "Exponential", "HoC", "Landscape",
    "ModelSpec", "Normal", "Percolation", "PinnedUniform", "RMF", "Uniform",
    "choc", "generate", "generate_pinned", "landscape_from_fitness",
    "shift_transform", "thin",
    "count_accessible", "count_accessible_bruteforce", "exists_accessible",
    "layer_interval_count",
    "TnkTable", "bound_diagnostics", "c_eta_theta", "components",
    "expected_paths", "global_descents", "pair_term", "percolation_expected",
    "s1_s2_split", "second_moment_bound", "t_n1", "t_table",
    "AlphaSweepResult", "EstimateResult", "SweepRow", "ThetaCouplingResult",
    "choc_curve", "estimate_moments", "estimate_p", "rmf_theta_coupling",
    "second_moment_sanity", "sweep_alpha", "wilson_interval",
]
