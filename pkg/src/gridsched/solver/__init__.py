"""LP and MILP solvers for frozen :class:`~gridsched.milp.MILPModel` instances."""
from .bnb import (FEASIBLE_GAP, TIMEOUT_NO_SOLUTION, MIPResult, SolverError, TooManyBinaries,
                  brute_force_mip, relative_gap, solve_mip)
from .simplex import INFEASIBLE, OPTIMAL, STUCK, UNBOUNDED, Basis, LPResult, solve_lp
from .solution import SolutionFileError, parse_solution_file, write_solution_file

__all__ = [
    "FEASIBLE_GAP", "INFEASIBLE", "OPTIMAL", "STUCK", "TIMEOUT_NO_SOLUTION", "UNBOUNDED",
    "Basis", "LPResult", "MIPResult", "SolutionFileError", "SolverError", "TooManyBinaries",
    "brute_force_mip", "parse_solution_file", "relative_gap", "solve_lp", "solve_mip",
    "write_solution_file",
]
