"""Dense convex QP solver (primal active set) and KKT checker."""

import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Optional

import numpy as np
from scipy.optimize import linprog

from ..config import QP_RIDGE
from ..errors import DimensionMismatch
from ..models.control import QpProblem
from ..models.qp_solution import QpSolution, QpStatus

logger = logging.getLogger(__name__)

# Threshold below which a search direction counts as zero
_STEP_EPS = 1e-12
# Relative |a·p| below which a constraint cannot block
_BLOCK_EPS = 1e-10
# Relative size of a multiplier still counted as non-negative
_DUAL_EPS = 1e-9
# Consecutive zero-length steps before switching to Bland's rule
_BLAND_AFTER = 5


def _as_system(a, b, n: int, name: str) -> tuple[np.ndarray, np.ndarray]:
    if a is None or np.size(a) == 0:
        return np.zeros((0, n)), np.zeros(0)
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape[1] != n or a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"{name}: matrix {a.shape} incompatible with rhs {b.shape} and n={n}")
    return a, b


def kkt_residual(
    h,
    f,
    a_ineq,
    b_ineq,
    a_eq,
    b_eq,
    solution: QpSolution,
) -> float:
    """
    Worst violation of the KKT conditions at a candidate solution.

    Returns the max of: stationarity ‖Hx + f + A_ineqᵀλ + A_eqᵀν‖∞,
    inequality violation, equality violation, dual negativity and
    complementary slackness |λ_i·(a_iᵀx − b_i)|.
    """
    h = np.asarray(h, dtype=float)
    n = h.shape[0]
    f = np.asarray(f, dtype=float).reshape(n)
    a_ineq, b_ineq = _as_system(a_ineq, b_ineq, n, "a_ineq")
    a_eq, b_eq = _as_system(a_eq, b_eq, n, "a_eq")

    x = np.asarray(solution.x_star, dtype=float).reshape(n)
    lam = np.asarray(solution.lambda_ineq, dtype=float).reshape(a_ineq.shape[0])
    nu = np.asarray(solution.nu_eq, dtype=float).reshape(a_eq.shape[0])

    stationarity = h @ x + f + a_ineq.T @ lam + a_eq.T @ nu
    slack = a_ineq @ x - b_ineq
    terms = [np.max(np.abs(stationarity), initial=0.0)]
    terms.append(np.max(slack, initial=0.0))
    terms.append(np.max(np.abs(a_eq @ x - b_eq), initial=0.0))
    terms.append(np.max(-lam, initial=0.0))
    terms.append(np.max(np.abs(lam * slack), initial=0.0))
    return float(max(terms))


def _extend_basis(basis: np.ndarray, row: np.ndarray) -> np.ndarray:
    """Add `row` to an orthonormal row basis unless it is already spanned."""
    norm = np.linalg.norm(row)
    if norm == 0.0:
        return basis
    residual = row / norm
    # two passes keep the basis orthogonal in floating point
    for _ in range(2):
        residual = residual - basis.T @ (basis @ residual)
    length = np.linalg.norm(residual)
    if length <= 1e-9:
        return basis
    return np.vstack([basis, residual / length])


class QpSolver(ABC):
    """Abstract base class for QP back ends."""

    @abstractmethod
    def solve(
        self,
        h,
        f,
        a_ineq=None,
        b_ineq=None,
        a_eq=None,
        b_eq=None,
    ) -> QpSolution:
        """
        Solve min ½xᵀHx + fᵀx s.t. A_ineq·x ≤ b_ineq, A_eq·x = b_eq.

        Returns:
            QpSolution with primal, duals and status
        """
        pass

    def solve_problem(self, problem: QpProblem) -> QpSolution:
        return self.solve(
            problem.h, problem.f, problem.a_ineq, problem.b_ineq, problem.a_eq, problem.b_eq
        )


class ActiveSetSolver(QpSolver):
    """
    Primal active-set method with a phase-1 LP start.

    Ties go to the lowest constraint index, so identical inputs always
    walk the same path.
    """

    def __init__(self, tol: float = 1e-6, max_iter: int = 500):
        """
        Initialize the solver.

        Args:
            tol: KKT residual accepted as optimal
            max_iter: Active-set iteration cap
        """
        self.tol = tol
        self.max_iter = max_iter

    def solve(self, h, f, a_ineq=None, b_ineq=None, a_eq=None, b_eq=None) -> QpSolution:
        h = np.asarray(h, dtype=float)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise DimensionMismatch(f"Hessian must be square, got {h.shape}")
        n = h.shape[0]
        f = np.asarray(f, dtype=float).reshape(-1)
        if f.shape[0] != n:
            raise DimensionMismatch(f"f has {f.shape[0]} entries for n={n}")
        a_in, b_in = _as_system(a_ineq, b_ineq, n, "a_ineq")
        a_e, b_e = _as_system(a_eq, b_eq, n, "a_eq")
        m, n_eq = a_in.shape[0], a_e.shape[0]

        h_reg = 0.5 * (h + h.T) + QP_RIDGE * np.eye(n)

        x = self._start_point(h_reg, f, a_in, b_in, a_e, b_e)
        if x is None:
            logger.debug("Phase 1 found no feasible point")
            return QpSolution(
                x_star=np.zeros(n),
                lambda_ineq=np.zeros(m),
                nu_eq=np.zeros(n_eq),
                status=QpStatus.INFEASIBLE,
                iterations=0,
                kkt_residual=float("inf"),
            )

        scale = 1.0 + np.max(np.abs(b_in), initial=0.0)
        eq_basis = np.zeros((0, n))
        for row in a_e:
            eq_basis = _extend_basis(eq_basis, row)
        working = self._initial_working_set(a_in, b_in, eq_basis, x, 1e-7 * scale)
        row_norms = np.linalg.norm(a_in, axis=1)

        lam = np.zeros(m)
        nu = np.zeros(n_eq)
        status = QpStatus.MAX_ITERATIONS
        iterations = 0
        # set after an unblocked full step: x minimizes over the working set
        at_minimum = False
        degenerate = 0

        for iterations in range(1, self.max_iter + 1):
            p, mult = self._working_step(h_reg, f, a_e, b_e, a_in, b_in, working, x)
            step_tol = _STEP_EPS * (1.0 + np.max(np.abs(x), initial=0.0))

            if at_minimum or np.max(np.abs(p), initial=0.0) <= step_tol:
                at_minimum = False
                nu = mult[:n_eq]
                lam_w = mult[n_eq:]
                dual_tol = _DUAL_EPS * (1.0 + np.max(np.abs(mult), initial=0.0))
                negative = np.flatnonzero(lam_w < -dual_tol)
                if negative.size == 0:
                    lam = np.zeros(m)
                    lam[working] = np.maximum(lam_w, 0.0)
                    status = QpStatus.OPTIMAL
                    break
                # Bland's rule once zero-length steps pile up; working is sorted
                if degenerate > _BLAND_AFTER:
                    drop = int(negative[0])
                else:
                    drop = int(np.argmin(lam_w))
                logger.debug(f"Iter {iterations}: drop constraint {working[drop]}")
                working.pop(drop)
                continue

            alpha, blocking = self._step_length(a_in, b_in, row_norms, x, p, working, eq_basis)
            x = x + alpha * p
            if blocking is None:
                at_minimum = True
                degenerate = 0
            else:
                degenerate = degenerate + 1 if alpha <= _STEP_EPS else 0
                working.append(blocking)
                working.sort()

        if status != QpStatus.OPTIMAL:
            # multipliers of the last working set, so the residual reflects x
            _, mult = self._working_step(h_reg, f, a_e, b_e, a_in, b_in, working, x)
            nu = mult[:n_eq]
            lam = np.zeros(m)
            lam[working] = np.maximum(mult[n_eq:], 0.0)

        solution = QpSolution(
            x_star=x,
            lambda_ineq=lam,
            nu_eq=nu,
            status=status,
            iterations=iterations,
            kkt_residual=0.0,
            active_set=tuple(working),
        )
        solution.kkt_residual = kkt_residual(h, f, a_in, b_in, a_e, b_e, solution)
        if status == QpStatus.OPTIMAL and solution.kkt_residual > self.tol:
            logger.debug(f"KKT residual {solution.kkt_residual:.2e} above tolerance {self.tol:.1e}")
            solution.status = QpStatus.MAX_ITERATIONS
        return solution

    def _working_step(self, h, f, a_e, b_e, a_in, b_in, working, x):
        g = h @ x + f
        # rhs pulls x back onto the working constraints if it drifted off
        rhs = np.concatenate([b_e - a_e @ x, b_in[working] - a_in[working] @ x])
        return self._solve_eqp(h, g, a_e, a_in[working], rhs=rhs)

    def _start_point(self, h, f, a_in, b_in, a_e, b_e) -> Optional[np.ndarray]:
        """
        Equality-constrained minimizer if feasible, else a phase-1 LP point.

        The LP first minimizes the linear cost so the start vertex sits
        near the optimum; a zero cost is the fallback when that LP is
        unbounded.
        """
        n = h.shape[0]
        p, _ = self._solve_eqp(h, f, a_e, np.zeros((0, n)), rhs=b_e)
        if a_in.shape[0] == 0 or np.all(a_in @ p <= b_in + 1e-9):
            if a_e.shape[0] == 0 or np.allclose(a_e @ p, b_e, atol=1e-9):
                return p

        for cost in (f, np.zeros(n)):
            result = linprog(
                c=cost,
                A_ub=a_in if a_in.shape[0] else None,
                b_ub=b_in if a_in.shape[0] else None,
                A_eq=a_e if a_e.shape[0] else None,
                b_eq=b_e if a_e.shape[0] else None,
                bounds=[(None, None)] * n,
                method="highs",
            )
            if result.status == 0:
                return np.asarray(result.x, dtype=float)
            if result.status == 2:
                break
        return None

    @staticmethod
    def _initial_working_set(a_in, b_in, eq_basis, x, tol) -> List[int]:
        """Lowest-index, linearly independent subset of the active constraints."""
        n = a_in.shape[1]
        basis = eq_basis
        working: List[int] = []
        for i in np.flatnonzero(np.abs(a_in @ x - b_in) <= tol):
            if basis.shape[0] >= n:
                break
            extended = _extend_basis(basis, a_in[i])
            if extended.shape[0] > basis.shape[0]:
                basis = extended
                working.append(int(i))
        return working

    @staticmethod
    def _solve_eqp(h, g, a_e, a_w, rhs=None) -> tuple[np.ndarray, np.ndarray]:
        """
        Solve min ½pᵀHp + gᵀp s.t. [A_e; A_w]·p = rhs (zero when omitted).

        Returns the step and the multipliers of [A_e; A_w].
        """
        n = h.shape[0]
        a = np.vstack([a_e, a_w]) if a_w.shape[0] else a_e
        k = a.shape[0]
        full_rhs = np.zeros(n + k)
        full_rhs[:n] = -g
        if rhs is not None:
            full_rhs[n : n + len(rhs)] = rhs
        kkt = np.zeros((n + k, n + k))
        kkt[:n, :n] = h
        kkt[:n, n:] = a.T
        kkt[n:, :n] = a
        try:
            sol = np.linalg.solve(kkt, full_rhs)
        except np.linalg.LinAlgError:
            sol = np.linalg.lstsq(kkt, full_rhs, rcond=None)[0]
        return sol[:n], sol[n:]

    @staticmethod
    def _step_length(a_in, b_in, row_norms, x, p, working, eq_basis) -> tuple[float, Optional[int]]:
        """
        Largest step in [0, 1] keeping inactive constraints satisfied.

        The blocking constraint is the nearest one (lowest index on ties)
        that is linearly independent of the equalities and the working set;
        dependent rows stay satisfied along p and are skipped.
        """
        if a_in.shape[0] == 0:
            return 1.0, None
        ap = a_in @ p
        slack = np.maximum(b_in - a_in @ x, 0.0)
        in_working = np.zeros(a_in.shape[0], dtype=bool)
        in_working[working] = True
        threshold = _BLOCK_EPS * row_norms * np.linalg.norm(p)
        candidates = np.flatnonzero((ap > threshold) & ~in_working)
        if candidates.size == 0:
            return 1.0, None

        ratios = slack[candidates] / ap[candidates]
        order = np.lexsort((candidates, ratios))
        basis = None
        for j in order:
            ratio, i = float(ratios[j]), int(candidates[j])
            if ratio >= 1.0:
                break
            if basis is None:
                basis = eq_basis
                for w in working:
                    basis = _extend_basis(basis, a_in[w])
            if _extend_basis(basis, a_in[i]).shape[0] > basis.shape[0]:
                return ratio, i
            logger.debug(f"Skipping dependent blocking constraint {i}")
        return 1.0, None


def solve_qp(
    h,
    f,
    a_ineq=None,
    b_ineq=None,
    a_eq=None,
    b_eq=None,
    tol: float = 1e-6,
    max_iter: int = 500,
) -> QpSolution:
    """Solve a dense convex QP with the active-set back end."""
    return ActiveSetSolver(tol=tol, max_iter=max_iter).solve(h, f, a_ineq, b_ineq, a_eq, b_eq)


def dump_qp(problem: QpProblem, path: str | Path) -> Path:
    """Write H, f, A, b, A_eq, b_eq as plain-text matrices for cross-checking."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    blocks = [
        ("H", problem.h),
        ("f", problem.f.reshape(1, -1)),
        ("A_ineq", problem.a_ineq),
        ("b_ineq", problem.b_ineq.reshape(1, -1)),
        ("A_eq", problem.a_eq),
        ("b_eq", problem.b_eq.reshape(1, -1)),
    ]
    with open(path, "w", encoding="utf-8") as fh:
        for name, matrix in blocks:
            matrix = np.atleast_2d(matrix)
            fh.write(f"# {name} {matrix.shape[0]} {matrix.shape[1]}\n")
            if matrix.size:
                np.savetxt(fh, matrix, fmt="%.17g")
    logger.info(f"Dumped QP ({problem.n_var} variables) to {path}")
    return path
