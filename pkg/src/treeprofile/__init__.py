"""treeprofile: simply generated random trees at exact size.

Samplers for conditioned, modified-root and unrooted simply generated
trees; height and distance profiles (with a subquadratic exact distance
profile); exact profile moments through a truncated generating-function
system; brute-force enumeration oracles; and reproducible Monte Carlo
experiments for the scaling limits.
"""

__version__ = "0.1.0"

from .weights import (WeightSequence, OffspringDistribution, WeightError,
                      mean_variance, tilt, criticalize, unrooted_to_rooted,
                      unrooted_model, root_degree_limit, geometric_weights,
                      poisson_weights, binary_weights, table_weights,
                      factorial_unrooted_weights, weights_from_json,
                      weights_to_json)
from .treecore import (OrderedTree, LabelledTree, PointedTree, ProfileCounts,
                       DistanceProfileCounts, TreeError, height_profile,
                       interpolate, distance_profile_naive,
                       distance_profile_from_rootings, wiener_index,
                       width_height_diameter, reroot_transform)
from .distprofile import (convolve_counts, distance_profile_fast, wiener_fast,
                          centroid_decomposition)
from .rng import RngStream
from .sampler import (SamplingError, sample_conditioned_gw, sample_forest,
                      sample_modified_gw, sample_unrooted_vertexmark,
                      sample_unrooted_edgemark, sample_unrooted_leafmark)
from . import genfun, oracle

__all__ = [
    "WeightSequence", "OffspringDistribution", "WeightError", "mean_variance",
    "tilt", "criticalize", "unrooted_to_rooted", "unrooted_model",
    "root_degree_limit", "geometric_weights", "poisson_weights",
    "binary_weights", "table_weights", "factorial_unrooted_weights",
    "weights_from_json", "weights_to_json", "OrderedTree", "LabelledTree", "PointedTree",
    "ProfileCounts", "DistanceProfileCounts", "TreeError", "height_profile",
    "interpolate", "distance_profile_naive", "distance_profile_from_rootings",
    "wiener_index", "width_height_diameter", "reroot_transform",
    "convolve_counts", "distance_profile_fast", "wiener_fast",
    "centroid_decomposition", "RngStream", "SamplingError",
    "sample_conditioned_gw", "sample_forest", "sample_modified_gw",
    "sample_unrooted_vertexmark", "sample_unrooted_edgemark",
    "sample_unrooted_leafmark", "genfun", "oracle",
]
