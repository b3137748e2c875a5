"""Moduli space of labeled triangles under the Lipschitz distance.

Closed-form distances, explicit best Lipschitz maps with certified
constants, geodesics, Finsler length and the right-angled boundary.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConstructionError,
    InvalidInput,
    PreconditionFailed,
    TrilipError,
)
from .lipmap import best_lipschitz_map, lipschitz_constant  # noqa: E402
from .metric import m_distance, m_equal_area, pivot_index  # noqa: E402
from .triangle import (  # noqa: E402
    AngleTriple,
    EmbeddedTriangle,
    LabeledTriangle,
    ModuliPoint,
    from_angles,
    from_edges,
)
