"""Python access to the IMEX DIMSIM library."""

from ._core import (
    Error,
    GridMismatchError,
    InvalidArgument,
    Problem,
    StepFailure,
    Tableau,
    UnknownNameError,
    __version__,
    catalog,
    catalog_names,
    convergence_study,
    integrate,
    l_stability_check,
    make_problem,
    problem_names,
    region_S_alpha,
    region_SE,
    spectral_radius,
    ssp_coefficient,
    stability_matrix,
    summarize,
    verify_order,
)

__all__ = [
    "Error",
    "GridMismatchError",
    "InvalidArgument",
    "Problem",
    "StepFailure",
    "Tableau",
    "UnknownNameError",
    "__version__",
    "catalog",
    "catalog_names",
    "convergence_study",
    "integrate",
    "l_stability_check",
    "make_problem",
    "problem_names",
    "region_S_alpha",
    "region_SE",
    "spectral_radius",
    "ssp_coefficient",
    "stability_matrix",
    "summarize",
    "verify_order",
]
