"""lppkit: exact computation and Monte Carlo estimation for planar last
passage percolation."""

__version__ = "0.1.0"

from .env import (
    DistributionSpec,
    Field,
    ParallelogramSpec,
    Vertex,
    WeightFieldSpec,
    make_field,
    parallelogram_contains,
    precedes,
)
from .geodesic import (
    GeodesicRecord,
    Path,
    leftmost_geodesic,
    midpoint_position,
    rightmost_geodesic,
    transversal_fluctuation,
)
from .passage import (
    BOTTOM,
    SetSpec,
    constrained_split_chain,
    constrained_weight,
    max_weight_exceeding_tf,
    passage_profile,
    point_to_point,
    set_to_set,
    split_chain,
)
from .watermelon import (
    FREE,
    PINNED,
    WatermelonInfeasibleError,
    WatermelonResult,
    brute_force_disjoint,
    watermelon_totals,
    watermelon_weight,
)
from .grid import (
    Discretization,
    GridSpec,
    build_grid,
    chain_weight,
    count_discretizations,
    enumerate_discretizations,
    geodesic_discretization,
)
