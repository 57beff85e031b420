"""Billiard caustics, string constructions, and Liouville nets."""

from .errors import (
    BVPError,
    CausticsError,
    ConditioningError,
    ConstructionError,
    DegenerateCoordinatesError,
    DomainError,
    GrazingError,
    IntersectionError,
    RangeError,
    ReconstructionError,
)
from .metric import (
    EllipticCoordSpec,
    LiouvilleSpec,
    MetricChart,
    cartesian_from_elliptic,
    chart_from_spec,
    chart_to_spec,
    christoffel,
    confocal_elliptic,
    confocal_parabolic,
    control_chart,
    elliptic_from_cartesian,
    euclidean_cartesian,
    euclidean_polar,
    eval_metric,
    liouville_chart,
    synthetic_liouville,
)
from .curves import ConvexCurve, circle, confocal_ellipse, ellipse
from .geodesic import (
    GeodesicPath,
    GeodesicState,
    geodesic_bvp,
    geodesic_curvature,
    geodesic_distance,
    geodesic_ivp,
    shoot,
    tangent_intersection,
)
from .billiard import (
    PhasePoint,
    billiard_map,
    billiard_step,
    caustic_residual,
    find_closing_caustic,
    poncelet_search,
    rotation_number,
    symplectic_check,
    tangent_launch,
)

from .string_construction import (
    StringCurve,
    StringRecord,
    graves_check,
    leaf_gap,
    match_excess,
    string_curve,
    string_diffeo,
    string_excess,
)
from .poritsky import (
    GridMap,
    PoritskyParam,
    Reconstruction,
    build_map,
    commutation_check,
    map_rotation_number,
    ode_relation_residual,
    phi_psi_check,
    poritsky_check,
    poritsky_parameter,
    poritsky_to_liouville,
    rational_guard,
)
from .net import (
    DiagonalData,
    EtaForms,
    IvoryResult,
    LiouvilleRecovery,
    NetClassification,
    NetQuad,
    SampledNet,
    classify_planar_net,
    diagonal_paths,
    eta_forms,
    first_variation_check,
    ivory_check,
    liouville_from_ivory,
)
from .config import ExperimentConfig

__version__ = "0.1.0"
