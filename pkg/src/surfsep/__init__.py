"""Balanced vertex separators for graphs embedded on orientable surfaces."""

from .embedded import (
    Dart,
    DualGraph,
    EmbeddedGraph,
    Face,
    build_embedded_graph,
    check_cycle,
    cycle_sides,
    dual,
    euler_genus,
    faces,
    from_rot,
    induced_embedding,
    read_rot,
    to_rot,
    triangulate,
    write_rot,
)
from .errors import (
    ComponentTooSmall,
    DegenerateFace,
    IndexOutOfRange,
    InsideNotPlanar,
    InvariantViolation,
    IterationLimitExceeded,
    MalformedRotation,
    NonIntegerGenus,
    NotACycle,
    NotPlanar,
    OverlappingTreePaths,
    SurfsepError,
    TooSmall,
)
from .generators import (
    InstanceSpec,
    gen_genus_sum,
    gen_planar_grid,
    gen_random_triangulation,
    gen_torus_grid,
)
from .planarity import ContractibilityOracle, is_contractible, is_planar
from .separator import (
    SeparatorResult,
    find_separator,
    lemma_main_driver,
    trim_separator,
    verify_separator,
    weighted_planar_separator,
    weighted_surface_separator,
)
from .voronoi import (
    boss,
    decompose,
    k_max_independent_set,
    k_neighborhood,
    noncontractible_in_two_regions,
    nrst,
    voronoi_regions,
)

__version__ = "0.1.0"
