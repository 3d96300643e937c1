"""Result models for QP solves."""

from dataclasses import dataclass
from enum import Enum

import numpy as np


class QpStatus(str, Enum):
    OPTIMAL = "optimal"
    MAX_ITERATIONS = "max_iterations"
    INFEASIBLE = "infeasible"


@dataclass
class QpSolution:
    """Result of solving one convex QP."""

    x_star: np.ndarray
    lambda_ineq: np.ndarray
    nu_eq: np.ndarray
    status: QpStatus
    iterations: int
    kkt_residual: float
    active_set: tuple[int, ...] = ()

    @property
    def is_optimal(self) -> bool:
        return self.status == QpStatus.OPTIMAL

    def objective(self, h: np.ndarray, f: np.ndarray) -> float:
        x = self.x_star
        return float(0.5 * x @ h @ x + f @ x)
