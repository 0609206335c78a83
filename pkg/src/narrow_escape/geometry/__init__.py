"""Domain descriptors, realized boundaries and the Möbius map."""

from .conformal import FunnelAlpha, concentric_image, funnel_alpha, mobius_derivative, mobius_inverse, mobius_map
from .domains import (
    BallDomain,
    FunnelDomain2D,
    Neck,
    NeedleDomain,
    ProfileDomain,
    StepResult,
    contains,
    reflect,
)
from .profiles import (
    arc_density,
    cone_profile,
    cylinder_profile,
    power_funnel_profile,
    profile_area,
    profile_volume,
    sampled_profile,
    sphere_profile,
    tangent_circle_profile,
    with_cylinder,
)
from .specs import (
    CompositeSpec,
    DumbbellSpec,
    GeometryError,
    NeedleStripSpec,
    PlanarFunnelSpec,
    RevolutionProfile,
    needle_contains,
    nondimensionalize,
    redimensionalize,
)
