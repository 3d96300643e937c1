"""State-space assembly, MPC condensation and the receding-horizon loop."""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..config import POWER_BALANCE_TOL
from ..errors import DimensionMismatch, MissingUnit, DuplicateUnit, SolverExhausted
from ..models.control import (
    MpcConfig,
    PredictionMatrices,
    QpProblem,
    StateSpace,
)
from ..models.profiles import Profiles
from ..models.qp_solution import QpSolution, QpStatus
from ..models.trace import DispatchTrace
from ..models.unit import EnergyBlock, UnitControl, UnitDisturbance, UnitKind, UnitState
from .flexibility import provided_margin
from .qp_solver import ActiveSetSolver, QpSolver
from .units import feasible_control_bounds, initial_state, step_unit

logger = logging.getLogger(__name__)

# Control columns of each unit: (p_gen, p_load, spill); None = not a control
CONTROL_MAP: Dict[UnitKind, tuple[Optional[int], Optional[int], Optional[int]]] = {
    UnitKind.WIND: (0, None, 7),
    UnitKind.PV: (1, None, 8),
    UnitKind.BATTERY: (2, 3, None),
    UnitKind.HYDROGEN: (4, 5, None),
    UnitKind.GAS: (6, None, None),
}
# Disturbance column of each unit
DISTURBANCE_MAP: Dict[UnitKind, Optional[int]] = {
    UnitKind.WIND: 0,
    UnitKind.PV: 1,
    UnitKind.BATTERY: None,
    UnitKind.HYDROGEN: 2,
    UnitKind.GAS: 3,
}
STATE_ORDER = tuple(UnitKind)

# Σ p_gen − Σ p_load over the control vector
POWER_ROW = np.array([1, 1, 1, -1, 1, -1, 1, 0, 0], dtype=float)


def _check_block(block: EnergyBlock) -> None:
    kinds = [unit.kind for unit in block.units]
    for kind in UnitKind:
        count = kinds.count(kind)
        if count == 0:
            raise MissingUnit(f"block has no {kind.value} unit")
        if count > 1:
            raise DuplicateUnit(f"block has {count} {kind.value} units")


def build_state_space(
    block: EnergyBlock,
    dt_h: float,
    states: Optional[Sequence[UnitState]] = None,
) -> StateSpace:
    """
    Assemble the five-state energy block system.

    Args:
        block: Energy block holding one unit of each kind
        dt_h: Dispatch interval in hours
        states: Current unit states in block order; efficiency curves are
            evaluated at their last powers (constant efficiencies otherwise)

    Returns:
        StateSpace with A = diag(0,0,1,1,1), C selecting (x_b, x_h) and
        the 0/1 disturbance pattern; B carries −η_gen·Δt/C and
        +η_load·Δt/C on storage rows, −η_gen·Δt and −1 (spill) on the
        renewable rows.
    """
    _check_block(block)
    if dt_h <= 0:
        raise ValueError(f"dt_h must be positive, got {dt_h}")

    by_kind = {unit.kind: i for i, unit in enumerate(block.units)}
    state_of = {
        kind: (states[by_kind[kind]] if states is not None else UnitState(soc=0.0))
        for kind in UnitKind
    }

    nx, nu, nd = 5, 9, 4
    a = np.diag([0.0, 0.0, 1.0, 1.0, 1.0])
    b = np.zeros((nx, nu))
    d = np.zeros((nx, nd))
    d[0, 0] = d[1, 1] = d[3, 2] = d[4, 3] = 1.0
    c_out = np.zeros((2, nx))
    c_out[0, 2] = c_out[1, 3] = 1.0
    d_scale = np.ones(nd)

    u_min, u_max = np.zeros(nu), np.zeros(nu)
    du_min, du_max = np.full(nu, -np.inf), np.full(nu, np.inf)
    x_min, x_max = np.zeros(nx), np.zeros(nx)

    dt_min = dt_h * 60.0
    for row, kind in enumerate(STATE_ORDER):
        model = block.effective(kind)
        state = state_of[kind]
        gen_col, load_col, spill_col = CONTROL_MAP[kind]
        eta_gen = model.eta_gen_at(state.last_p_gen_mw)
        eta_load = model.eta_load_at(state.last_p_load_mw)
        scale = 1.0 / model.capacity_mwh if model.has_storage else 1.0

        b[row, gen_col] = -eta_gen * dt_h * scale
        u_min[gen_col], u_max[gen_col] = model.p_gen_min_mw, model.p_gen_max_mw
        du_min[gen_col] = model.ramp_gen_min_mw_per_min * dt_min
        du_max[gen_col] = model.ramp_gen_max_mw_per_min * dt_min
        if load_col is not None:
            b[row, load_col] = eta_load * dt_h * scale
            u_min[load_col], u_max[load_col] = model.p_load_min_mw, model.p_load_max_mw
            du_min[load_col] = model.ramp_load_min_mw_per_min * dt_min
            du_max[load_col] = model.ramp_load_max_mw_per_min * dt_min
        if spill_col is not None:
            b[row, spill_col] = -1.0
            u_min[spill_col], u_max[spill_col] = 0.0, np.inf

        dist_col = DISTURBANCE_MAP[kind]
        if dist_col is not None:
            d_scale[dist_col] = model.eta_ex * scale

        if model.has_storage:
            x_min[row], x_max[row] = model.soc_min, model.soc_max

    return StateSpace(
        a=a,
        b=b,
        c_out=c_out,
        d=d,
        d_scale=d_scale,
        u_min=u_min,
        u_max=u_max,
        du_min=du_min,
        du_max=du_max,
        x_min=x_min,
        x_max=x_max,
        y_min=c_out @ x_min,
        y_max=c_out @ x_max,
        balance_rows=(0, 1),
        power_row=POWER_ROW.copy(),
        spill_columns=(7, 8),
        dt_h=dt_h,
    )


def _horizon_blocks(ss: StateSpace, n_rows: int):
    """C·A^j for j = 1..n_rows and the cumulative sums S_j = Σ_{i<j} C·A^i·B."""
    powers = [np.eye(ss.nx)]
    for _ in range(n_rows):
        powers.append(powers[-1] @ ss.a)
    ca = [ss.c_out @ powers[j] for j in range(n_rows + 1)]
    cab = [ca[i] @ ss.b for i in range(n_rows)]
    cumulative = [np.zeros((ss.ny, ss.nu))]
    for i in range(n_rows):
        cumulative.append(cumulative[-1] + cab[i])
    return ca, cumulative


def _condense(ss: StateSpace, n_p: int, n_c: int):
    ny, nu, nx, nd = ss.ny, ss.nu, ss.nx, ss.nd
    ca, cumulative = _horizon_blocks(ss, n_p)

    m_x = np.vstack([ca[j] for j in range(1, n_p + 1)])
    m_u = np.vstack([cumulative[j] for j in range(1, n_p + 1)])
    m_du = np.zeros((n_p * ny, n_c * nu))
    m_d = np.zeros((n_p * ny, n_p * nd))
    for j in range(1, n_p + 1):
        rows = slice((j - 1) * ny, j * ny)
        for l in range(min(j, n_c)):
            # block (j, l+1) = Σ_{i=0}^{j-l-1} C·A^i·B
            m_du[rows, l * nu : (l + 1) * nu] = cumulative[j - l]
        for i in range(j):
            m_d[rows, i * nd : (i + 1) * nd] = ca[j - 1 - i] @ ss.d
    return m_x, m_u, m_du, m_d


def build_prediction_matrices(ss: StateSpace, cfg: MpcConfig) -> PredictionMatrices:
    """
    Condensation matrices for tracking (subscript 1) and constraints (2).

    Both horizons are the configured N_p/N_c, so the two families coincide.
    """
    cfg.validate()
    n_p, n_c, nu = cfg.n_p, cfg.n_c, ss.nu
    m_x1, m_u1, m_du1, m_d = _condense(ss, n_p, n_c)
    m_x2, m_u2, m_du2 = m_x1.copy(), m_u1.copy(), m_du1.copy()

    lambda_ = np.kron(np.tril(np.ones((n_c, n_c))), np.eye(nu))
    psi = np.kron(np.ones((n_c, 1)), np.eye(nu))

    return PredictionMatrices(
        m_x1=m_x1,
        m_u1=m_u1,
        m_delta_u1=m_du1,
        m_x2=m_x2,
        m_u2=m_u2,
        m_delta_u2=m_du2,
        lambda_=lambda_,
        psi=psi,
        m_d=m_d,
        n_p=n_p,
        n_c=n_c,
    )


def build_qp(
    ss: StateSpace,
    pred: PredictionMatrices,
    x_k,
    u_prev,
    d_forecast,
    load_forecast,
    cfg: MpcConfig,
    first_move_bounds: Optional[tuple[np.ndarray, np.ndarray]] = None,
    soft_outputs: bool = False,
    output_relax: float = 0.0,
) -> QpProblem:
    """
    Condensed QP over z = [ΔU(k), shed, dump, output slack].

    Args:
        ss: State space
        pred: Prediction matrices for `cfg`
        x_k: Current state
        u_prev: Control applied at k−1
        d_forecast: (N_p, nd) raw disturbances ξ over the horizon
        load_forecast: (N_p,) electric load over the horizon
        cfg: Controller settings
        first_move_bounds: Optional (lo, hi) on u(k) tightening the static
            bounds for the first move (state-dependent headroom, ramps)
        soft_outputs: Output bounds after the first predicted step get a
            slack penalized with `cfg.output_penalty`
        output_relax: When positive, the first predicted step's output
            bounds get a penalized slack of at most this much

    Returns:
        QpProblem with H = 2(MᵀQM + R), f = −2MᵀQE(k) plus penalties
    """
    n_p, n_c = pred.n_p, pred.n_c
    nu, ny, nd = ss.nu, ss.ny, ss.nd
    x_k = np.asarray(x_k, dtype=float).reshape(-1)
    u_prev = np.asarray(u_prev, dtype=float).reshape(-1)
    d_forecast = np.asarray(d_forecast, dtype=float).reshape(-1, nd) if nd else np.zeros((n_p, 0))
    load_forecast = np.asarray(load_forecast, dtype=float).reshape(-1)

    if x_k.size != ss.nx or u_prev.size != nu:
        raise DimensionMismatch(f"x_k has {x_k.size} entries (need {ss.nx}), u_prev {u_prev.size} (need {nu})")
    if d_forecast.shape[0] < n_p:
        raise DimensionMismatch(f"disturbance forecast covers {d_forecast.shape[0]} of {n_p} steps")
    if len(cfg.q_weights) != ny or len(cfg.r_weights) != nu or len(cfg.y_ref) != ny:
        raise DimensionMismatch("MPC weights or reference do not match the system dimensions")

    d_stack = np.concatenate([ss.normalize(d_forecast[j]) for j in range(n_p)]) if nd else np.zeros(0)
    free = pred.m_x1 @ x_k + pred.m_u1 @ u_prev + (pred.m_d @ d_stack if nd else 0.0)
    y_ref = np.tile(np.asarray(cfg.y_ref, dtype=float), n_p)
    error = y_ref - free

    q = np.diag(np.tile(np.asarray(cfg.q_weights, dtype=float), n_p))
    r = np.diag(np.tile(np.asarray(cfg.r_weights, dtype=float), n_c))
    m_du = pred.m_delta_u1
    h_du = 2.0 * (m_du.T @ q @ m_du + r)
    f_du = -2.0 * (m_du.T @ q @ error)

    n_du = nu * n_c
    with_slack = ss.power_row is not None
    if with_slack and load_forecast.size < n_c:
        raise DimensionMismatch(f"load forecast covers {load_forecast.size} of {n_c} steps")
    n_slack = 2 * n_c if with_slack else 0

    # output rows that carry a slack: first step when relaxed, the rest when soft
    soft_rows = np.zeros(n_p * ny, dtype=bool)
    soft_rows[:ny] = output_relax > 0.0
    soft_rows[ny:] = soft_outputs
    n_out = int(soft_rows.sum())
    out_start = n_du + n_slack
    n_var = out_start + n_out

    if ss.spill_columns and cfg.spill_weight:
        selector = np.zeros(nu)
        selector[list(ss.spill_columns)] = 1.0
        f_du = f_du + cfg.spill_weight * pred.lambda_.T @ np.tile(selector, n_c)

    h = np.zeros((n_var, n_var))
    f = np.zeros(n_var)
    h[:n_du, :n_du] = h_du
    f[:n_du] = f_du
    if with_slack:
        h[n_du:out_start, n_du:out_start] = cfg.slack_quadratic * np.eye(n_slack)
        f[n_du:out_start] = cfg.shed_penalty
    if n_out:
        h[out_start:, out_start:] = cfg.slack_quadratic * np.eye(n_out)
        f[out_start:] = cfg.output_penalty

    rows: List[np.ndarray] = []
    rhs: List[np.ndarray] = []
    labels: List[str] = []

    def add(block: np.ndarray, bound: np.ndarray, label: str) -> None:
        finite = np.isfinite(bound)
        if not finite.any():
            return
        full = np.zeros((block.shape[0], n_var))
        full[:, : block.shape[1]] = block
        rows.append(full[finite])
        rhs.append(bound[finite])
        labels.extend([label] * int(finite.sum()))

    # Π = I on the stacked increments
    pi = np.eye(n_du)
    add(pi, np.tile(ss.du_max, n_c), "du_max")
    add(-pi, -np.tile(ss.du_min, n_c), "du_min")

    u_lo = np.tile(ss.u_min, n_c)
    u_hi = np.tile(ss.u_max, n_c)
    if first_move_bounds is not None:
        u_lo[:nu] = np.maximum(u_lo[:nu], first_move_bounds[0])
        u_hi[:nu] = np.minimum(u_hi[:nu], first_move_bounds[1])
    base = pred.psi @ u_prev
    add(pred.lambda_, u_hi - base, "u_max")
    add(-pred.lambda_, -(u_lo - base), "u_min")

    # y ≤ y_max + e and y ≥ y_min − e on the rows that carry a slack e
    relief = np.zeros((n_p * ny, n_var))
    relief[np.flatnonzero(soft_rows), out_start + np.arange(n_out)] = -1.0
    y_free = pred.m_x2 @ x_k + pred.m_u2 @ u_prev + (pred.m_d @ d_stack if nd else 0.0)
    y_hi = np.tile(ss.y_max, n_p)
    y_lo = np.tile(ss.y_min, n_p)
    upper = relief.copy()
    upper[:, :n_du] = pred.m_delta_u2
    lower = relief.copy()
    lower[:, :n_du] = -pred.m_delta_u2
    add(upper, y_hi - y_free, "y_max")
    add(lower, -(y_lo - y_free), "y_min")

    if with_slack:
        slack_rows = np.zeros((n_slack, n_var))
        slack_rows[:, n_du:out_start] = -np.eye(n_slack)
        rows.append(slack_rows)
        rhs.append(np.zeros(n_slack))
        labels.extend(["slack"] * n_slack)

    if n_out:
        out_rows = np.zeros((n_out, n_var))
        out_rows[:, out_start:] = -np.eye(n_out)
        rows.append(out_rows)
        rhs.append(np.zeros(n_out))
        labels.extend(["output_slack"] * n_out)
        if output_relax > 0.0:
            cap_rows = np.zeros((ny, n_var))
            cap_rows[:, out_start : out_start + ny] = np.eye(ny)
            rows.append(cap_rows)
            rhs.append(np.full(ny, output_relax))
            labels.extend(["output_relax"] * ny)

    a_eq_rows: List[np.ndarray] = []
    b_eq: List[float] = []
    for j in range(n_c):
        lam_j = pred.lambda_[j * nu : (j + 1) * nu]
        d_j = ss.normalize(d_forecast[j]) if nd else np.zeros(0)
        if with_slack:
            row = np.zeros(n_var)
            row[:n_du] = ss.power_row @ lam_j
            row[n_du + j] = 1.0
            row[n_du + n_c + j] = -1.0
            a_eq_rows.append(row)
            b_eq.append(float(load_forecast[j] - ss.power_row @ u_prev))
        for state_row in ss.balance_rows:
            row = np.zeros(n_var)
            row[:n_du] = ss.b[state_row] @ lam_j
            a_eq_rows.append(row)
            b_eq.append(float(-(ss.b[state_row] @ u_prev) - ss.d[state_row] @ d_j))

    return QpProblem(
        h=h,
        f=f,
        a_ineq=np.vstack(rows) if rows else np.zeros((0, n_var)),
        b_ineq=np.concatenate(rhs) if rhs else np.zeros(0),
        a_eq=np.vstack(a_eq_rows) if a_eq_rows else np.zeros((0, n_var)),
        b_eq=np.asarray(b_eq, dtype=float),
        n_du=n_du,
        n_slack=n_slack,
        n_output_slack=n_out,
        row_labels=labels,
    )


@dataclass
class _StepPlan:
    u: np.ndarray
    status: str
    solution: Optional[QpSolution]


class BlockDispatcher:
    """
    Receding-horizon dispatcher of an energy block.

    At each step the condensed QP is solved, the first increment is
    applied, every unit is stepped and the step is recorded. Infeasible
    steps walk a relaxation ladder: the power-slack QP, then penalized
    slack on the SOC bounds past the first step, then up to
    `output_relax` of penalized slack on the first step too, and finally
    holding u(k−1) with the balance repaired.
    """

    def __init__(self, block: EnergyBlock, cfg: MpcConfig, solver: Optional[QpSolver] = None):
        """
        Initialize the dispatcher.

        Args:
            block: Energy block (all five unit kinds, some possibly excluded)
            cfg: Controller settings
            solver: QP back end (active-set solver by default)
        """
        cfg.validate()
        _check_block(block)
        self.block = block
        self.cfg = cfg
        self.solver = solver or ActiveSetSolver(tol=cfg.qp_tol, max_iter=cfg.qp_max_iter)
        self._by_kind = {unit.kind: i for i, unit in enumerate(block.units)}
        self._has_curves = any(u.eta_gen_curve or u.eta_load_curve for u in block.units)
        logger.info(
            f"Initialized dispatcher: N_p={cfg.n_p}, N_c={cfg.n_c}, "
            f"units={sorted(k.value for k in block.included)}"
        )

    def run(self, profiles: Profiles, n_steps: Optional[int] = None) -> DispatchTrace:
        """Dispatch `n_steps` steps (default: the whole profile)."""
        cfg = self.cfg
        dt_h = cfg.dt_h
        if abs(profiles.dt_h - dt_h) > 1e-12:
            raise DimensionMismatch(f"profile step {profiles.dt_h} h differs from MPC step {dt_h} h")
        n_steps = len(profiles) if n_steps is None else n_steps
        padded = profiles.window(0, n_steps + cfg.n_p)

        states = [initial_state(unit) for unit in self.block.units]
        ss = build_state_space(self.block, dt_h, states)
        pred = build_prediction_matrices(ss, cfg)
        u_prev = np.zeros(ss.nu)

        xi_all = self._raw_disturbances(padded)
        load_all = padded.eload_mw
        net_all = (xi_all[:, 0] + xi_all[:, 1]) / dt_h - padded.eload_mw

        rec_states, rec_controls, rec_dist = [], [], []
        rec_shed, rec_dump, rec_unserved, rec_provided, rec_status = [], [], [], [], []

        logger.info(f"Receding-horizon run: {n_steps} steps of {padded.step_minutes} min")

        for k in range(n_steps):
            if self._has_curves:
                ss = build_state_space(self.block, dt_h, states)
                pred = build_prediction_matrices(ss, cfg)

            x_k = self._state_vector(states)
            provided = provided_margin(self.block, states, dt_h)

            if cfg.forecast == "persistence":
                d_f = np.tile(xi_all[k], (cfg.n_p, 1))
                load_f = np.full(cfg.n_p, load_all[k])
            else:
                d_f = xi_all[k : k + cfg.n_p]
                load_f = load_all[k : k + cfg.n_p]

            first_lo, first_hi = self._first_move_bounds(states, dt_h, include_ramp=True)
            plan = self._plan_step(ss, pred, x_k, u_prev, d_f, load_f, (first_lo, first_hi))

            hold_lo, hold_hi = self._first_move_bounds(states, dt_h, include_ramp=plan.status != "held")
            u = self._repair_controls(plan.u, xi_all[k], states, hold_lo, hold_hi)
            residual = load_all[k] - float(POWER_ROW @ u)
            if abs(residual) < POWER_BALANCE_TOL:
                residual = 0.0
            shed, dump = max(residual, 0.0), max(-residual, 0.0)

            applied, unserved_h2 = self._applied_disturbances(xi_all[k], u, states, dt_h)
            next_states = self._step_units(states, u, applied, dt_h)

            rec_states.append(x_k)
            rec_controls.append(u)
            rec_dist.append(applied)
            rec_shed.append(shed)
            rec_dump.append(dump)
            rec_unserved.append(unserved_h2)
            rec_provided.append(provided.as_array())
            rec_status.append(plan.status)

            if plan.status != "optimal":
                logger.warning(f"Step {k}: MPC {plan.status}")
            elif plan.solution is not None:
                logger.debug(
                    f"Step {k}: {plan.solution.iterations} iterations, "
                    f"active set {len(plan.solution.active_set)}"
                )

            states = next_states
            u_prev = u

        trace = DispatchTrace(
            dt_h=dt_h,
            minutes=padded.minutes[:n_steps],
            states=np.array(rec_states).reshape(n_steps, 5),
            controls=np.array(rec_controls).reshape(n_steps, 9),
            disturbances=np.array(rec_dist).reshape(n_steps, 4),
            shed_mw=np.array(rec_shed),
            dump_mw=np.array(rec_dump),
            eload_mw=np.asarray(load_all[:n_steps], dtype=float),
            net_load_mw=np.asarray(net_all[:n_steps], dtype=float),
            h2_unserved_mwh=np.array(rec_unserved),
            provided=np.array(rec_provided).reshape(n_steps, 6),
            qp_status=rec_status,
            final_state=self._state_vector(states),
        )
        logger.info(
            f"Run finished: shed {trace.shed_mw.sum() * dt_h:.2f} MWh, "
            f"spill {trace.spill_mwh.sum():.2f} MWh, flagged {int(trace.flagged.sum())} steps"
        )
        return trace

    def _plan_step(self, ss, pred, x_k, u_prev, d_f, load_f, first_bounds) -> _StepPlan:
        cfg = self.cfg
        # (status, soft outputs after step 1, first-step output relaxation)
        ladder = [("optimal", False, 0.0), ("relaxed", True, 0.0)]
        if cfg.output_relax > 0.0:
            ladder.append(("relaxed", True, cfg.output_relax))
        for status, soft, relax in ladder:
            problem = build_qp(
                ss, pred, x_k, u_prev, d_f, load_f, cfg,
                first_move_bounds=first_bounds, soft_outputs=soft, output_relax=relax,
            )
            solution = self.solver.solve_problem(problem)
            if self._usable(solution):
                return _StepPlan(u=u_prev + solution.x_star[: ss.nu], status=status, solution=solution)
            logger.debug(f"Rung {status} (soft={soft}, relax={relax}): {solution.status.value}")
        return _StepPlan(u=u_prev.copy(), status="held", solution=None)

    def _usable(self, solution: QpSolution) -> bool:
        if solution.is_optimal:
            return True
        # stopped early but already within the controller's tolerance
        if solution.status == QpStatus.MAX_ITERATIONS and solution.kkt_residual <= self.cfg.qp_accept_tol:
            logger.debug(f"Accepting QP point with KKT residual {solution.kkt_residual:.2e}")
            return True
        return False

    def _raw_disturbances(self, profiles: Profiles) -> np.ndarray:
        xi = np.zeros((len(profiles), 4))
        if self.block.is_included(UnitKind.WIND):
            xi[:, 0] = profiles.wind_avail_mw * profiles.dt_h
        if self.block.is_included(UnitKind.PV):
            xi[:, 1] = profiles.pv_avail_mw * profiles.dt_h
        if self.block.is_included(UnitKind.HYDROGEN):
            xi[:, 2] = -profiles.h2_demand_mwh
        if self.block.is_included(UnitKind.GAS):
            xi[:, 3] = profiles.gas_supply_mwh
        return xi

    def _state_vector(self, states: Sequence[UnitState]) -> np.ndarray:
        return np.array([states[self._by_kind[kind]].soc for kind in STATE_ORDER])

    def _first_move_bounds(self, states, dt_h: float, include_ramp: bool):
        lo, hi = np.zeros(9), np.zeros(9)
        for kind in STATE_ORDER:
            model = self.block.effective(kind)
            bounds = feasible_control_bounds(model, states[self._by_kind[kind]], dt_h, include_ramp)
            gen_col, load_col, spill_col = CONTROL_MAP[kind]
            lo[gen_col], hi[gen_col] = bounds.p_gen_min, bounds.p_gen_max
            if load_col is not None:
                lo[load_col], hi[load_col] = bounds.p_load_min, bounds.p_load_max
            if spill_col is not None:
                lo[spill_col], hi[spill_col] = bounds.spill_min, bounds.spill_max
        # an empty interval collapses to its upper end, which stays within static bounds
        lo = np.minimum(lo, hi)
        return lo, hi

    def _repair_controls(self, u, xi, states, lo, hi) -> np.ndarray:
        """Clip to the feasible box and close the renewable balances exactly."""
        u = np.clip(np.asarray(u, dtype=float), lo, hi)
        for kind in (UnitKind.WIND, UnitKind.PV):
            model = self.block.effective(kind)
            state = states[self._by_kind[kind]]
            gen_col, _, spill_col = CONTROL_MAP[kind]
            inflow = model.eta_ex * xi[DISTURBANCE_MAP[kind]]
            eta_dt = model.eta_gen_at(state.last_p_gen_mw) * self.cfg.dt_h
            p = min(max(u[gen_col], 0.0), inflow / eta_dt)
            u[gen_col] = p
            u[spill_col] = max(inflow - eta_dt * p, 0.0)
        return u

    def _applied_disturbances(self, xi, u, states, dt_h: float) -> tuple[np.ndarray, float]:
        """Clip storage disturbances so the tank and gas store stay within bounds."""
        applied = np.array(xi, dtype=float)
        unserved_h2 = 0.0
        for kind in (UnitKind.HYDROGEN, UnitKind.GAS):
            col = DISTURBANCE_MAP[kind]
            raw = applied[col]
            if raw == 0.0:
                continue
            model = self.block.effective(kind)
            state = states[self._by_kind[kind]]
            control = self._unit_control(kind, u)
            after = state.soc + (
                -model.eta_gen_at(state.last_p_gen_mw) * control.p_gen_mw * dt_h
                + model.eta_load_at(state.last_p_load_mw) * control.p_load_mw * dt_h
            ) / model.capacity_mwh
            room_down = max(after - model.soc_min, 0.0) * model.capacity_mwh / model.eta_ex
            room_up = max(model.soc_max - after, 0.0) * model.capacity_mwh / model.eta_ex
            applied[col] = min(max(raw, -room_down), room_up)
            if kind == UnitKind.HYDROGEN and raw < 0:
                unserved_h2 = applied[col] - raw
        return applied, unserved_h2

    @staticmethod
    def _unit_control(kind: UnitKind, u: np.ndarray) -> UnitControl:
        gen_col, load_col, spill_col = CONTROL_MAP[kind]
        return UnitControl(
            p_gen_mw=float(u[gen_col]),
            p_load_mw=float(u[load_col]) if load_col is not None else 0.0,
            spill_mwh=float(u[spill_col]) if spill_col is not None else 0.0,
        )

    def _step_units(self, states, u, applied, dt_h: float) -> List[UnitState]:
        next_states = list(states)
        for kind in STATE_ORDER:
            i = self._by_kind[kind]
            dist_col = DISTURBANCE_MAP[kind]
            dist = UnitDisturbance(xi_mwh=float(applied[dist_col]) if dist_col is not None else 0.0)
            try:
                next_states[i] = step_unit(
                    self.block.get(kind), states[i], self._unit_control(kind, u), dist, dt_h
                )
            except ValueError as e:
                raise SolverExhausted(f"hold rung produced an invalid state: {e}") from e
        return next_states


def run_receding_horizon(
    block: EnergyBlock,
    profiles: Profiles,
    cfg: MpcConfig,
    n_steps: Optional[int] = None,
) -> DispatchTrace:
    """Dispatch a block over a profile with a fresh BlockDispatcher."""
    return BlockDispatcher(block, cfg).run(profiles, n_steps=n_steps)
