"""Hermite-Birkhoff interpolation of scattered data on the sphere, the flat
torus and Euclidean patches with geodesic-distance cardinal basis functions.
"""

from hbinterp.analysis import (
    check_bounds,
    convergence_study,
    error_norms,
    fill_distance,
    separation_distance,
)
from hbinterp.basis import (
    NeighborIndex,
    WeightConfig,
    alpha_power,
    build_neighbor_index,
    bump,
    cbf_inverse,
    cbf_localized,
    cbf_product,
)
from hbinterp.geometry import (
    Chart,
    Manifold,
    Patch,
    chart_forward,
    chart_inverse,
    geodesic_distance,
    sample_patch,
)
from hbinterp.interpolant import HermiteNode, Interpolant, build, nodes_from_function
from hbinterp.multiindex import MultiIndexSet, completeness_order, global_order_k, taylor_eval
from hbinterp.testfunctions import builtin

__version__ = "0.1.0"
