"""Covariance-based transmit beampattern design and analysis for antenna arrays."""

from .constellations import (
    ArrayGeometry,
    QuadratureError,
    SpiralParams,
    make_archimedes_spiral,
    make_disk,
    make_hexagon,
    make_log_spiral,
    make_square_grid,
    make_ula,
)
from .design import (
    DesignResult,
    DesignSpec,
    build_user_gram,
    canonical_matrix,
    design_eig,
    design_ideal,
)
from .hermitian import (
    ConvergenceError,
    EigenPair,
    HermitianMatrix,
    dominant_eigenpair,
    is_psd,
    random_feasible_covariance,
    trace,
)
from .radiation import (
    Direction,
    MetricsReport,
    PatternGrid,
    UserSet,
    evaluate_grid,
    integrate_over_sphere,
    pattern_metrics,
    pattern_value,
    steering_vector,
    user_powers,
)

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "ConvergenceError",
    "DesignResult",
    "DesignSpec",
    "Direction",
    "EigenPair",
    "HermitianMatrix",
    "MetricsReport",
    "PatternGrid",
    "QuadratureError",
    "SpiralParams",
    "UserSet",
    "build_user_gram",
    "canonical_matrix",
    "design_eig",
    "design_ideal",
    "dominant_eigenpair",
    "evaluate_grid",
    "integrate_over_sphere",
    "is_psd",
    "make_archimedes_spiral",
    "make_disk",
    "make_hexagon",
    "make_log_spiral",
    "make_square_grid",
    "make_ula",
    "pattern_metrics",
    "pattern_value",
    "random_feasible_covariance",
    "steering_vector",
    "trace",
    "user_powers",
]
