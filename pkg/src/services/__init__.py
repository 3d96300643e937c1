"""Services package for the energy block simulator."""

from .qp_solver import ActiveSetSolver, QpSolver, solve_qp
from .mpc_service import BlockDispatcher, run_receding_horizon

__all__ = [
    "ActiveSetSolver",
    "QpSolver",
    "solve_qp",
    "BlockDispatcher",
    "run_receding_horizon",
]
