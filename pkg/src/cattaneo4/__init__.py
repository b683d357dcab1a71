"""Spectral solver and experiment harness for a fourth-order damped wave
model of heat conduction with Dirichlet boundary data.

The displacement solves

    theta'' = -a theta' + b Lap(theta) - c Lap(theta''),

which the Dirichlet eigenbasis turns into the family of mode equations
(1 - c lam^2) theta'' + a theta' + b lam^2 theta = 0.  Whenever c equals
some 1/lam_n^2 the leading coefficient of mode n vanishes and the problem
degenerates; those values form the exceptional set that most of this
package is built around detecting, avoiding, or deliberately approaching.
"""

from .boundary import (BoundarySignal, DirichletDatum, MildSolutionReport,
                       SemigroupBlock, build_blocks, dirichlet_map_interval,
                       evolve_with_boundary, mild_solution_check)
from .errors import (DegenerateModeError, DiscreteExceptionalError,
                     ExceptionalParameterError, SingularParameterError,
                     StiffnessError, UnsolvableModeError)
from .experiments import (first_crossing, heat_comparison, limit1_reference,
                          limit1_scan, limit2_scan, limit3_scan,
                          propagation_burst, singularity_scan, whole_line_mode)
from .modal import (CharacteristicRoots, CompatibilityReport, ComplexPair,
                    DoubleRoot, FirstOrder, ModalInitialData, ModeValue,
                    ParameterSet, RealDistinct, characteristic_roots,
                    compatibility_report, eval_mode, solve_mode,
                    solve_mode_reference, solve_second_order)
from .oracle import (GridSolution, ModeTrajectory, OdeProblem, fd_solve,
                     integrate_mode, integrate_mode_batch, quad_integrate)
from .solver import (Field, WellPosednessReport, basis_field, check_wellposed,
                     evolve_homogeneous, field_norm, project_samples,
                     reconstruct, zero_field)
from .spectrum import (BasisDescriptor, EigenMode, ExceptionalSet, box_modes,
                       distance_to_exceptional, exceptional_for_c,
                       exceptional_for_sigma, interval_modes, modes_for,
                       weyl_exponent_fit)

__version__ = "0.1.0"

__all__ = [
    "BasisDescriptor", "BoundarySignal", "CharacteristicRoots",
    "CompatibilityReport", "ComplexPair", "DegenerateModeError",
    "DirichletDatum", "DiscreteExceptionalError", "DoubleRoot", "EigenMode",
    "ExceptionalParameterError", "ExceptionalSet", "Field", "FirstOrder",
    "GridSolution", "MildSolutionReport", "ModalInitialData",
    "ModeTrajectory", "ModeValue", "OdeProblem", "ParameterSet",
    "RealDistinct", "SemigroupBlock", "SingularParameterError",
    "StiffnessError", "UnsolvableModeError", "WellPosednessReport",
    "basis_field", "box_modes", "build_blocks", "characteristic_roots",
    "check_wellposed", "compatibility_report", "dirichlet_map_interval",
    "distance_to_exceptional", "eval_mode", "evolve_homogeneous",
    "evolve_with_boundary", "exceptional_for_c", "exceptional_for_sigma",
    "fd_solve", "field_norm", "first_crossing", "heat_comparison",
    "integrate_mode", "integrate_mode_batch", "interval_modes",
    "limit1_reference", "limit1_scan", "limit2_scan", "limit3_scan",
    "mild_solution_check", "modes_for", "project_samples",
    "propagation_burst", "quad_integrate", "reconstruct", "singularity_scan",
    "solve_mode", "solve_mode_reference", "solve_second_order",
    "weyl_exponent_fit", "whole_line_mode", "zero_field",
]
