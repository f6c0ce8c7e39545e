"""Equivariant maps on convex polytopes: selectors, stabilizers and extension of prescribed values."""

__version__ = "0.1.0"

from .body import (  # noqa: E402
    BodyFamilyTag,
    ConvexBody,
    canonicalize,
    diameter,
    dimension,
    hausdorff,
    minkowski_combination,
    point_distance,
    support,
)
from .transforms import AffineTransform, GroupTag, SampleBounds, apply, classify, compose, inverse, sample  # noqa: E402
from .selectors import SelectorId, centroid, chebyshev, circumball, evaluate, john, lowner, steiner  # noqa: E402
from .symmetry import check_containment, fixed_point_set, is_fixed, stabilizer  # noqa: E402
from .blend import (  # noqa: E402
    Alignment,
    Scenario,
    blend,
    blend_body,
    blend_many,
    bump,
    connect,
    orbit_align,
    orbit_distance,
    orbit_map_f,
    validate,
)

__all__ = [
    "__version__",
    "BodyFamilyTag", "ConvexBody", "canonicalize", "diameter", "dimension", "hausdorff",
    "minkowski_combination", "point_distance", "support",
    "AffineTransform", "GroupTag", "SampleBounds", "apply", "classify", "compose", "inverse", "sample",
    "SelectorId", "centroid", "chebyshev", "circumball", "evaluate", "john", "lowner", "steiner",
    "check_containment", "fixed_point_set", "is_fixed", "stabilizer",
    "Alignment", "Scenario", "blend", "blend_body", "blend_many", "bump", "connect",
    "orbit_align", "orbit_distance", "orbit_map_f", "validate",
]
