"""itelab: a numerical laboratory for interior transmission eigenvalues.

The pencil of the clamped fourth-order reformulation is assembled on model
domains, solved by companion linearization, cross-validated against analytic
dispersion relations, and every closed-form identity of the underlying
boundary symbol algebra is verified numerically.
"""

__version__ = "0.1.0"

from .eig import EigenvalueRecord, filter_converged, linearize, solve_quadratic
from .oracle import (DispersionProblem, bessel_j, disk_dispersion,
                     find_zeros_rectangle, interval_dispersion,
                     oracle_eigenvalues)
from .pencil import (DiscretePencil, DiskMode, Interval, assemble_disk_mode,
                     assemble_interval, quadratic_form_T,
                     realpart_identity_check)
from .profiles import RefractiveProfile
from .regions import (ParabolicRegion, RegionReport, certify_section5,
                      lambda_of, left_halfplane_bound, parabola_check,
                      semiclassical_region_map)
from .symbols import (BoundaryMatrix, Rectangle, RootQuadruple, SymbolPoint,
                      boundary_symbol_matrix, contour_residue_oracle,
                      det_bounds_scan, dpartial_t0, eval_t0,
                      invert_boundary_matrix, residue_sum, sigma_roots,
                      t0_boundary)

__all__ = [
    "__version__",
    "EigenvalueRecord", "filter_converged", "linearize", "solve_quadratic",
    "DispersionProblem", "bessel_j", "disk_dispersion",
    "find_zeros_rectangle", "interval_dispersion", "oracle_eigenvalues",
    "DiscretePencil", "DiskMode", "Interval", "assemble_disk_mode",
    "assemble_interval", "quadratic_form_T", "realpart_identity_check",
    "RefractiveProfile",
    "ParabolicRegion", "RegionReport", "certify_section5", "lambda_of",
    "left_halfplane_bound", "parabola_check", "semiclassical_region_map",
    "BoundaryMatrix", "Rectangle", "RootQuadruple", "SymbolPoint",
    "boundary_symbol_matrix", "contour_residue_oracle", "det_bounds_scan",
    "dpartial_t0", "eval_t0", "invert_boundary_matrix", "residue_sum",
    "sigma_roots", "t0_boundary",
]
