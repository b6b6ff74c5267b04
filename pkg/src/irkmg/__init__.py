"""Stage-coupled multigrid solvers for implicit Runge-Kutta flow problems.

Triangle mesh hierarchies, Taylor-Hood finite elements, Butcher tableau
tools, monolithic Vanka-smoothed multigrid, inexact Newton, and the
manufactured-solution benchmark harness.
"""

from . import bench, fem, mesh, newton, quadrature, solvers, stages, tableaux
from .bench import (ReportRow, RunConfig, SolverFailure, cli_main,
                    convergence_rates, emit_csv, run_ns_taylor_green,
                    run_stokes_mms)
from .fem import (BlockSystem, DirichletSpec, DofMap, assemble_blocks,
                  count_dofs, interpolate, l2_error, prolongation)
from .mesh import Mesh2D, MeshHierarchy, build_crossed_grid, build_hierarchy
from .newton import NewtonConfig, NewtonStats, ew_forcing, newton_solve
from .solvers import (MGHierarchyOp, SmootherSpec, VankaPatchSet,
                      build_vanka_patches, chebyshev_smooth,
                      coarse_direct_solve, estimate_interval, fgmres)
from .stages import StageSystem, StepState, advance_step, assemble_stage_operator
from .tableaux import ButcherTableau, consistency_check, stability_function, tableau_lookup

__version__ = "1.0.0"
