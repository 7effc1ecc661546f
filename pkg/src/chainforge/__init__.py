"""chainforge: exact deformation calculus for polyhedral chains."""

from .chains import (ConvexRegion, MassReport, PolyhedralChain, Simplex,
                     clip_chain, restrict, restrict_outside)
from .canonical import canonicalize, chains_equal
from .costs import CostFunction, CostReport, validate_cost
from .grid import (FaceId, FaceRegions, Grid, classify_support, face_region,
                   face_regions, faces_meeting, locate_face, omega_faces)
from .projective import (PiecewiseProjectiveMap, ProjectivePiece,
                         lipschitz_bound, pushforward, pushforward_detailed)
from .scalars import MassValue, format_rational, parse_rational

__version__ = "0.1.0"

__all__ = [
    "ConvexRegion", "MassReport", "PolyhedralChain", "Simplex",
    "clip_chain", "restrict", "restrict_outside",
    "canonicalize", "chains_equal",
    "CostFunction", "CostReport", "validate_cost",
    "FaceId", "FaceRegions", "Grid", "classify_support", "face_region",
    "face_regions", "faces_meeting", "locate_face", "omega_faces",
    "PiecewiseProjectiveMap", "ProjectivePiece", "lipschitz_bound",
    "pushforward", "pushforward_detailed",
    "MassValue", "format_rational", "parse_rational",
    "__version__",
]
