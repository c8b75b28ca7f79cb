"""Phase portraits of random planar homogeneous polynomial vector fields.

Algebraic classification by (index at the origin, number of invariant lines),
Monte Carlo probability estimates under Gaussian coefficients and the expected
number of invariant lines by the Edelman-Kostlan formula.
"""

from homportrait.core import (
    BandHit,
    Classified,
    Degenerate,
    DegenerateField,
    HomPortraitError,
    NoConvergence,
    NotWellPosed,
    PortraitLabel,
    Reason,
    VectorField,
    eval_field,
    scale_field,
)
from homportrait.classifier import (
    classify,
    classify_linear,
    is_global_attractor,
    is_global_repeller,
    portrait_table,
)
from homportrait.index import cubic_index, linear_index, quadratic_index, winding_index
from homportrait.invlines import count_lines, direction_poly, infinity_signs
from homportrait.kostlan import ek_integrand, expected_lines
from homportrait.montecarlo import SamplerConfig, check_relations, estimate

__version__ = "0.1.0"

__all__ = [
    "BandHit",
    "Classified",
    "Degenerate",
    "DegenerateField",
    "HomPortraitError",
    "NoConvergence",
    "NotWellPosed",
    "PortraitLabel",
    "Reason",
    "SamplerConfig",
    "VectorField",
    "check_relations",
    "classify",
    "classify_linear",
    "count_lines",
    "cubic_index",
    "direction_poly",
    "ek_integrand",
    "estimate",
    "eval_field",
    "expected_lines",
    "infinity_signs",
    "is_global_attractor",
    "is_global_repeller",
    "linear_index",
    "portrait_table",
    "quadratic_index",
    "scale_field",
    "winding_index",
]
