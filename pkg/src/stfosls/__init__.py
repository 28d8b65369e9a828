"""Space-time first-order-system least-squares finite elements for the heat
equation, with the convergence-study harness built on top."""

from .mesh import (IntervalMesh, TensorMesh, TimePartition, TriangleMesh,
                   initial_meshes, initial_tensor_mesh, mesh_stats)
from .spaces import ProductDofLayout, build_layout
from .assembly import assemble_factors, assemble_rhs, assemble_system
from .solver import SolutionPair, SolveOptions, SolverError, solve_spd
from .projection import BrokenField, conservation_error, divergence_field, project
from .exact import ProblemData, fourier_coefficient_1d, make_problem
from .errors import ErrorReport, compute_errors
from .cli import StudyConfig, compute_eoc, run_study

__all__ = [
    "IntervalMesh", "TensorMesh", "TimePartition", "TriangleMesh",
    "initial_meshes", "initial_tensor_mesh", "mesh_stats",
    "ProductDofLayout", "build_layout",
    "assemble_factors", "assemble_rhs", "assemble_system",
    "SolutionPair", "SolveOptions", "SolverError", "solve_spd",
    "BrokenField", "conservation_error", "divergence_field", "project",
    "ProblemData", "fourier_coefficient_1d", "make_problem",
    "ErrorReport", "compute_errors",
    "StudyConfig", "compute_eoc", "run_study",
]

__version__ = "0.1.0"
