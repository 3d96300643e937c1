import time
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from src.errors import DimensionMismatch, DuplicateUnit, MissingUnit
from src.models.control import MpcConfig, StateSpace
from src.models.profiles import Profiles
from src.models.qp_solution import QpStatus
from src.models.unit import EnergyBlock, UnitControl, UnitDisturbance, UnitKind
from src.services.flexibility import compute_indices
from src.services.mpc_service import (
    CONTROL_MAP,
    DISTURBANCE_MAP,
    POWER_ROW,
    build_prediction_matrices,
    build_qp,
    build_state_space,
    run_receding_horizon,
)
from src.services.qp_solver import kkt_residual, solve_qp
from src.services.scenario_service import (
    DEFAULT_UNITS,
    build_block,
    build_mpc_config,
    load_scenario,
    resolve_profiles,
)
from src.services.units import initial_state, step_unit
from tests.conftest import DT_5MIN, constant_profiles, make_block

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"
SMALL_CFG = MpcConfig(n_p=6, n_c=3)


def toy_system() -> StateSpace:
    return StateSpace(a=[[1.0]], b=[[1.0]], c_out=[[1.0]], d=np.zeros((1, 0)))


def toy_config(**overrides) -> MpcConfig:
    values = dict(n_p=1, n_c=1, q_weights=(1.0,), r_weights=(1.0,), y_ref=(2.0,))
    values.update(overrides)
    return MpcConfig(**values)


def replay_errors(block, trace) -> np.ndarray:
    ss = build_state_space(block, trace.dt_h)
    predicted = np.array(
        [ss.step(x, u, xi) for x, u, xi in zip(trace.states, trace.controls, trace.disturbances)]
    )
    return np.abs(predicted - trace.next_states())


def balance_residuals(trace) -> np.ndarray:
    return np.abs(trace.controls @ POWER_ROW + trace.shed_mw - trace.dump_mw - trace.eload_mw)


class TestStateSpace:
    def test_structure_goldens(self, default_block):
        ss = build_state_space(default_block, DT_5MIN)
        assert np.array_equal(ss.a, np.diag([0.0, 0.0, 1.0, 1.0, 1.0]))

        c_out = np.zeros((2, 5))
        c_out[0, 2] = c_out[1, 3] = 1.0
        assert np.array_equal(ss.c_out, c_out)

        d = np.zeros((5, 4))
        d[0, 0] = d[1, 1] = d[3, 2] = d[4, 3] = 1.0
        assert np.array_equal(ss.d, d)

    def test_control_matrix(self, default_block):
        ss = build_state_space(default_block, DT_5MIN)
        dt = DT_5MIN
        b = np.zeros((5, 9))
        b[0, 0], b[0, 7] = -1.0 * dt * 1.0, -1.0
        b[1, 1], b[1, 8] = -1.0 * dt * 1.0, -1.0
        b[2, 2], b[2, 3] = -0.95 * dt * (1.0 / 120.0), 0.95 * dt * (1.0 / 120.0)
        b[3, 4], b[3, 5] = -0.55 * dt * (1.0 / 300.0), 0.70 * dt * (1.0 / 300.0)
        b[4, 6] = -0.40 * dt * (1.0 / 60.0)
        np.testing.assert_allclose(ss.b, b, rtol=1e-15, atol=0.0)
        assert np.array_equal(ss.b != 0, b != 0)

    def test_unit_efficiency_battery(self):
        block = make_block(battery={"eta_gen": 1.0, "eta_load": 1.0, "capacity_mwh": 1.0})
        ss = build_state_space(block, 1.0)
        assert ss.b[2, 2] == -1.0
        assert ss.b[2, 3] == 1.0

    def test_output_extracts_storage(self, default_block):
        ss = build_state_space(default_block, DT_5MIN)
        x = np.array([0.0, 0.0, 0.3, 0.6, 0.9])
        np.testing.assert_array_equal(ss.output(x), [0.3, 0.6])

    def test_bounds(self, default_block):
        ss = build_state_space(default_block, DT_5MIN)
        assert ss.u_max[2] == 10.0
        assert ss.du_max[2] == pytest.approx(10.0)
        assert ss.du_min[6] == pytest.approx(-2.5)
        assert ss.x_min[2] == 0.1 and ss.x_max[3] == 0.95
        assert np.isinf(ss.u_max[7])

    def test_excluded_unit_has_zero_power_bounds(self):
        ss = build_state_space(make_block(UnitKind.WIND, UnitKind.PV), DT_5MIN)
        assert ss.u_max[2] == ss.u_max[3] == ss.u_max[6] == 0.0
        assert ss.b[2, 2] != 0.0

    def test_missing_unit(self):
        units = tuple(DEFAULT_UNITS[kind] for kind in UnitKind if kind != UnitKind.GAS)
        with pytest.raises(MissingUnit):
            build_state_space(EnergyBlock(units=units), DT_5MIN)

    def test_duplicate_unit(self):
        units = tuple(DEFAULT_UNITS[kind] for kind in UnitKind) + (DEFAULT_UNITS[UnitKind.BATTERY],)
        with pytest.raises(DuplicateUnit):
            build_state_space(EnergyBlock(units=units), DT_5MIN)


class TestPredictionMatrices:
    def test_single_step_horizon(self):
        ss = StateSpace(a=[[0.5]], b=[[2.0, 1.0]], c_out=[[3.0]], d=np.zeros((1, 0)))
        pred = build_prediction_matrices(ss, MpcConfig(n_p=1, n_c=1))
        np.testing.assert_array_equal(pred.m_delta_u1, ss.c_out @ ss.b)

    def test_identity_dynamics_accumulate(self):
        ss = StateSpace(a=np.eye(2), b=[[1.0], [2.0]], c_out=[[1.0, 1.0]], d=np.zeros((2, 0)))
        pred = build_prediction_matrices(ss, MpcConfig(n_p=2, n_c=1))
        cb = ss.c_out @ ss.b
        np.testing.assert_array_equal(pred.m_delta_u1[0:1], cb)
        np.testing.assert_array_equal(pred.m_delta_u1[1:2], 2 * cb)

    def test_lambda_and_psi(self):
        ss = StateSpace(a=[[1.0]], b=[[1.0, 0.0]], c_out=[[1.0]], d=np.zeros((1, 0)))
        pred = build_prediction_matrices(ss, MpcConfig(n_p=3, n_c=3))
        expected = np.kron(np.tril(np.ones((3, 3))), np.eye(2))
        np.testing.assert_array_equal(pred.lambda_, expected)
        np.testing.assert_array_equal(pred.psi, np.vstack([np.eye(2)] * 3))

    def test_shapes(self, default_block):
        ss = build_state_space(default_block, DT_5MIN)
        pred = build_prediction_matrices(ss, MpcConfig(n_p=4, n_c=2))
        assert pred.m_x1.shape == (8, 5)
        assert pred.m_delta_u1.shape == (8, 18)
        assert pred.m_d.shape == (8, 16)
        # block upper triangle is zero
        assert not pred.m_delta_u1[0:2, 9:18].any()

    def test_matches_forward_simulation(self):
        rng = np.random.default_rng(1234)
        worst = 0.0
        for _ in range(200):
            nx, nu = int(rng.integers(1, 4)), int(rng.integers(1, 3))
            ny, nd = int(rng.integers(1, 3)), int(rng.integers(0, 3))
            n_p = int(rng.integers(1, 5))
            n_c = int(rng.integers(1, n_p + 1))
            ss = StateSpace(
                a=rng.normal(scale=0.7, size=(nx, nx)),
                b=rng.normal(size=(nx, nu)),
                c_out=rng.normal(size=(ny, nx)),
                d=rng.normal(size=(nx, nd)),
            )
            pred = build_prediction_matrices(ss, MpcConfig(n_p=n_p, n_c=n_c))

            x0 = rng.normal(size=nx)
            u_prev = rng.normal(size=nu)
            du = rng.normal(size=(n_c, nu))
            d = rng.normal(size=(n_p, nd))

            x, u, simulated = x0.copy(), u_prev.copy(), []
            for j in range(n_p):
                if j < n_c:
                    u = u + du[j]
                x = ss.a @ x + ss.b @ u + ss.d @ d[j]
                simulated.append(ss.c_out @ x)

            predicted = pred.m_x1 @ x0 + pred.m_u1 @ u_prev + pred.m_delta_u1 @ du.reshape(-1)
            if nd:
                predicted = predicted + pred.m_d @ d.reshape(-1)
            worst = max(worst, float(np.max(np.abs(predicted - np.concatenate(simulated)))))
        assert worst <= 1e-10


class TestBuildQp:
    def test_scalar_toy(self):
        ss, cfg = toy_system(), toy_config()
        pred = build_prediction_matrices(ss, cfg)
        qp = build_qp(ss, pred, [0.0], [0.0], None, [], cfg)
        np.testing.assert_array_equal(qp.h, [[4.0]])
        np.testing.assert_array_equal(qp.f, [-4.0])
        assert qp.a_ineq.shape == (0, 1)
        sol = solve_qp(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq)
        assert sol.x_star[0] == pytest.approx(1.0, abs=1e-12)

    def test_zero_output_weight(self):
        ss, cfg = toy_system(), toy_config(q_weights=(0.0,))
        pred = build_prediction_matrices(ss, cfg)
        qp = build_qp(ss, pred, [0.0], [0.0], None, [], cfg)
        np.testing.assert_array_equal(qp.h, [[2.0]])
        np.testing.assert_array_equal(qp.f, [0.0])

    def test_on_reference_needs_no_move(self):
        ss, cfg = toy_system(), toy_config(y_ref=(1.0,))
        pred = build_prediction_matrices(ss, cfg)
        qp = build_qp(ss, pred, [1.0], [0.0], None, [], cfg)
        assert not qp.f.any()
        sol = solve_qp(qp.h, qp.f)
        assert sol.x_star[0] == pytest.approx(0.0, abs=1e-12)

    def test_two_step_hand_trace(self):
        ss, cfg = toy_system(), toy_config()
        pred = build_prediction_matrices(ss, cfg)
        x, u = np.zeros(1), np.zeros(1)
        history = []
        for _ in range(2):
            qp = build_qp(ss, pred, x, u, None, [], cfg)
            du = solve_qp(qp.h, qp.f).x_star
            u = u + du
            x = ss.step(x, u, np.zeros(0))
            history.append((float(du[0]), float(u[0]), float(x[0])))
        assert history[0] == pytest.approx((1.0, 1.0, 1.0), abs=1e-12)
        assert history[1] == pytest.approx((0.0, 1.0, 2.0), abs=1e-12)

    def test_default_block_problem(self, default_block):
        states = [initial_state(unit) for unit in default_block.units]
        ss = build_state_space(default_block, DT_5MIN, states)
        cfg = SMALL_CFG
        pred = build_prediction_matrices(ss, cfg)
        d_forecast = np.tile([20 * DT_5MIN, 5 * DT_5MIN, -0.15, 1.0], (cfg.n_p, 1))
        load = np.full(cfg.n_p, 30.0)
        x_k = np.array([s.soc for s in states])
        qp = build_qp(ss, pred, x_k, np.zeros(9), d_forecast, load, cfg)

        assert qp.n_du == 27 and qp.n_slack == 6
        np.testing.assert_allclose(qp.h, qp.h.T, atol=1e-12)
        assert np.linalg.eigvalsh(qp.h).min() > 0.0
        assert qp.a_eq.shape == (9, 33)

        groups = [label for i, label in enumerate(qp.row_labels) if i == 0 or qp.row_labels[i - 1] != label]
        assert groups == ["du_max", "du_min", "u_max", "u_min", "y_max", "y_min", "slack"]

        sol = solve_qp(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq)
        assert sol.is_optimal
        assert kkt_residual(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq, sol) <= 1e-6

    def test_degenerate_dispatch_problem(self):
        # gas alone against a 20 MW load: many ramp and bound rows meet at one vertex
        block = make_block(UnitKind.WIND, UnitKind.PV, UnitKind.GAS)
        states = [initial_state(unit) for unit in block.units]
        ss = build_state_space(block, DT_5MIN, states)
        pred = build_prediction_matrices(ss, SMALL_CFG)
        d_forecast = np.tile([0.0, 0.0, 0.0, 5.0], (SMALL_CFG.n_p, 1))
        x_k = np.array([s.soc for s in states])
        qp = build_qp(ss, pred, x_k, np.zeros(9), d_forecast, np.full(SMALL_CFG.n_p, 20.0), SMALL_CFG)

        sol = solve_qp(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq)
        assert sol.is_optimal
        assert kkt_residual(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq, sol) <= 1e-6
        assert len(sol.active_set) <= qp.n_var - np.linalg.matrix_rank(qp.a_eq)
        # first gas move sits on its 2.5 MW ramp limit
        assert sol.x_star[6] == pytest.approx(2.5, abs=1e-6)

    def test_full_block_with_hydrogen_demand(self, default_block):
        states = [initial_state(unit) for unit in default_block.units]
        ss = build_state_space(default_block, DT_5MIN, states)
        pred = build_prediction_matrices(ss, SMALL_CFG)
        d_forecast = np.tile([0.0, 0.0, -0.15, 5.0], (SMALL_CFG.n_p, 1))
        x_k = np.array([s.soc for s in states])
        qp = build_qp(ss, pred, x_k, np.zeros(9), d_forecast, np.full(SMALL_CFG.n_p, 20.0), SMALL_CFG)
        sol = solve_qp(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq)
        assert sol.is_optimal
        assert kkt_residual(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq, sol) <= 1e-6

    def test_output_slack_rows(self, default_block):
        ss = build_state_space(default_block, DT_5MIN)
        pred = build_prediction_matrices(ss, SMALL_CFG)
        x_k = np.array([0.0, 0.0, 0.45, 0.40, 0.5])
        args = (ss, pred, x_k, np.zeros(9), np.zeros((6, 4)), np.zeros(6), SMALL_CFG)

        hard = build_qp(*args)
        assert hard.n_output_slack == 0
        assert "output_slack" not in hard.row_labels and "output_relax" not in hard.row_labels

        soft = build_qp(*args, soft_outputs=True)
        assert soft.n_output_slack == (SMALL_CFG.n_p - 1) * ss.ny
        assert soft.n_var == hard.n_var + soft.n_output_slack
        assert "output_slack" in soft.row_labels and "output_relax" not in soft.row_labels

        relaxed = build_qp(*args, soft_outputs=True, output_relax=0.01)
        assert relaxed.n_output_slack == SMALL_CFG.n_p * ss.ny
        assert relaxed.row_labels.count("output_relax") == ss.ny

    def test_dimension_mismatch(self, default_block):
        ss = build_state_space(default_block, DT_5MIN)
        pred = build_prediction_matrices(ss, SMALL_CFG)
        with pytest.raises(DimensionMismatch):
            build_qp(ss, pred, np.zeros(4), np.zeros(9), np.zeros((6, 4)), np.zeros(6), SMALL_CFG)
        with pytest.raises(DimensionMismatch):
            build_qp(ss, pred, np.zeros(5), np.zeros(9), np.zeros((2, 4)), np.zeros(6), SMALL_CFG)


class TestDispatch:
    def test_renewables_exactly_serve_load(self):
        block = make_block(UnitKind.WIND, UnitKind.PV)
        profiles = constant_profiles(12, wind=20.0, eload=20.0)
        trace = run_receding_horizon(block, profiles, SMALL_CFG)
        assert len(trace) == 12
        assert trace.shed_mw.max() <= 1e-6
        assert trace.spill_mwh.max() <= 1e-6
        assert replay_errors(block, trace).max() <= 1e-9

    def test_surplus_is_spilled(self):
        block = make_block(UnitKind.WIND, UnitKind.PV)
        profiles = constant_profiles(6, wind=50.0, eload=30.0)
        trace = run_receding_horizon(block, profiles, SMALL_CFG)
        np.testing.assert_allclose(trace.spill_mwh[:, 0], 20.0 * DT_5MIN, atol=1e-6)
        assert trace.shed_mw.max() <= 1e-6

    def test_replay_and_power_balance(self, default_block, small_profiles):
        trace = run_receding_horizon(default_block, small_profiles, SMALL_CFG)
        assert replay_errors(default_block, trace).max() <= 1e-9
        ok = ~trace.flagged
        assert balance_residuals(trace)[ok].max() <= 1e-6

    def test_replay_through_unit_steps(self, default_block, small_profiles):
        trace = run_receding_horizon(default_block, small_profiles, SMALL_CFG, n_steps=8)
        states = [initial_state(unit) for unit in default_block.units]
        for k in range(len(trace)):
            np.testing.assert_allclose([s.soc for s in states], trace.states[k], atol=1e-9)
            u, xi = trace.controls[k], trace.disturbances[k]
            stepped = []
            for unit, state in zip(default_block.units, states):
                gen, load, spill = CONTROL_MAP[unit.kind]
                control = UnitControl(
                    p_gen_mw=u[gen],
                    p_load_mw=u[load] if load is not None else 0.0,
                    spill_mwh=u[spill] if spill is not None else 0.0,
                )
                col = DISTURBANCE_MAP[unit.kind]
                dist = UnitDisturbance(xi_mwh=xi[col] if col is not None else 0.0)
                stepped.append(step_unit(unit, state, control, dist, DT_5MIN))
            states = stepped
        np.testing.assert_allclose([s.soc for s in states], trace.final_state, atol=1e-9)

    def test_controllables_reduce_shed_and_spill(self, small_profiles):
        renewables = make_block(UnitKind.WIND, UnitKind.PV)
        s1 = run_receding_horizon(renewables, small_profiles, SMALL_CFG)
        full = run_receding_horizon(make_block(), small_profiles, SMALL_CFG)

        def lost(trace):
            return trace.shed_mw.sum() * trace.dt_h + trace.spill_mwh.sum()

        assert lost(s1) > lost(full)

    def test_excluded_hydrogen_sees_no_demand(self, small_profiles):
        block = make_block(UnitKind.WIND, UnitKind.PV)
        trace = run_receding_horizon(block, small_profiles, SMALL_CFG, n_steps=4)
        assert not trace.disturbances[:, 2:].any()
        assert not trace.h2_unserved_mwh.any()

    def test_hydrogen_demand_drains_tank(self, small_profiles):
        trace = run_receding_horizon(make_block(), small_profiles, SMALL_CFG)
        np.testing.assert_allclose(trace.disturbances[:, 2], -0.15)

    def test_persistence_forecast(self, default_block, small_profiles):
        cfg = replace(SMALL_CFG, forecast="persistence")
        trace = run_receding_horizon(default_block, small_profiles, cfg)
        assert len(trace) == len(small_profiles)
        assert set(trace.qp_status) <= {"optimal", "relaxed", "held"}
        assert balance_residuals(trace)[~trace.flagged].max() <= 1e-6

    def test_efficiency_curves(self, small_profiles):
        block = make_block(hydrogen={"eta_gen_curve": [[0.0, 0.45], [15.0, 0.55], [30.0, 0.5]]})
        trace = run_receding_horizon(block, small_profiles, SMALL_CFG, n_steps=10)
        assert len(trace) == 10
        assert balance_residuals(trace)[~trace.flagged].max() <= 1e-6

    def test_profile_step_must_match(self, default_block):
        profiles = constant_profiles(6, wind=10.0, eload=10.0, step_minutes=15.0)
        with pytest.raises(DimensionMismatch):
            run_receding_horizon(default_block, profiles, SMALL_CFG)

    def test_short_profile_is_padded(self, default_block, small_profiles):
        trace = run_receding_horizon(default_block, small_profiles.window(0, 4), SMALL_CFG)
        assert len(trace) == 4

    def test_gas_ramps_up_against_steady_load(self):
        block = make_block(UnitKind.WIND, UnitKind.PV, UnitKind.GAS)
        profiles = constant_profiles(48, eload=20.0, gas=5.0)
        trace = run_receding_horizon(block, profiles, SMALL_CFG)
        assert trace.qp_status.count("optimal") >= 0.9 * len(trace)
        np.testing.assert_allclose(trace.controls[:4, 6], [2.5, 5.0, 7.5, 10.0], atol=1e-6)
        assert trace.shed_mw[-8:].max() <= 1e-6


def _empty_tank_problem(first_demand: float, **kwargs):
    """Wind feeding an electrolyser whose tank starts at its lower bound."""
    block = make_block(UnitKind.WIND, UnitKind.HYDROGEN, hydrogen={"soc_init": 0.05})
    states = [initial_state(unit) for unit in block.units]
    ss = build_state_space(block, DT_5MIN, states)
    pred = build_prediction_matrices(ss, SMALL_CFG)
    d_forecast = np.tile([40.0 * DT_5MIN, 0.0, -5.0, 0.0], (SMALL_CFG.n_p, 1))
    d_forecast[0, 2] = -first_demand
    x_k = np.array([s.soc for s in states])
    qp = build_qp(ss, pred, x_k, np.zeros(9), d_forecast, np.zeros(SMALL_CFG.n_p), SMALL_CFG, **kwargs)
    return solve_qp(qp.h, qp.f, qp.a_ineq, qp.b_ineq, qp.a_eq, qp.b_eq)


def _empty_tank_profiles(first_demand: float) -> Profiles:
    n = 12
    demand = np.full(n, 5.0)
    demand[0] = first_demand
    return Profiles(
        step_minutes=5.0,
        wind_avail_mw=np.full(n, 40.0),
        pv_avail_mw=np.zeros(n),
        eload_mw=np.zeros(n),
        h2_demand_mwh=demand,
        gas_supply_mwh=np.zeros(n),
    )


class TestRelaxationLadder:
    def test_later_shortage_needs_soft_outputs(self):
        # one 5 MW electrolyser step covers 0.2 MWh, but not 5 MWh a step after that
        assert _empty_tank_problem(0.2).status == QpStatus.INFEASIBLE
        assert _empty_tank_problem(0.2, soft_outputs=True).is_optimal

    def test_first_step_shortage_needs_output_relax(self):
        assert _empty_tank_problem(2.0, soft_outputs=True).status == QpStatus.INFEASIBLE
        assert _empty_tank_problem(2.0, soft_outputs=True, output_relax=0.01).is_optimal

    @pytest.mark.parametrize("first_demand", [0.2, 2.0])
    def test_dispatcher_climbs_to_relaxed(self, first_demand):
        block = make_block(UnitKind.WIND, UnitKind.HYDROGEN, hydrogen={"soc_init": 0.05})
        trace = run_receding_horizon(block, _empty_tank_profiles(first_demand), SMALL_CFG, n_steps=1)
        assert trace.qp_status == ["relaxed"]
        # the electrolyser starts at its ramp limit
        assert trace.controls[0, 5] == pytest.approx(5.0, abs=1e-6)

    def test_without_output_relax_the_step_is_held(self):
        block = make_block(UnitKind.WIND, UnitKind.HYDROGEN, hydrogen={"soc_init": 0.05})
        cfg = replace(SMALL_CFG, output_relax=0.0)
        trace = run_receding_horizon(block, _empty_tank_profiles(2.0), cfg, n_steps=1)
        assert trace.qp_status == ["held"]
        assert not trace.controls[0, :7].any()


def _scenario(name: str, hours: float):
    spec = load_scenario(SCENARIOS / f"{name}.json")
    return replace(spec, run_hours=hours)


def _run(spec):
    trace = run_receding_horizon(
        build_block(spec), resolve_profiles(spec), build_mpc_config(spec), n_steps=spec.n_steps
    )
    return trace, compute_indices(trace, trace.net_load_mw, trace.dt_h)


@pytest.mark.slow
def test_full_block_two_day_replay():
    spec = _scenario("scenario3", 48)
    block = build_block(spec)
    started = time.perf_counter()
    trace, indices = _run(spec)
    assert time.perf_counter() - started < 60.0
    assert len(trace) == 576
    assert trace.qp_status.count("optimal") >= 0.9 * len(trace)
    assert replay_errors(block, trace).max() <= 1e-9
    assert balance_residuals(trace)[~trace.flagged].max() <= 1e-6
    assert min(indices.e_ir, indices.e_io, indices.e_ic) >= 0.0


@pytest.mark.slow
def test_adding_controllables_improves_indices():
    results = [_run(_scenario(name, 24))[1] for name in ("scenario1", "scenario2", "scenario3")]
    for better, worse in ((results[1], results[0]), (results[2], results[1])):
        assert better.e_ir <= worse.e_ir
        assert better.e_io <= worse.e_io
        assert better.e_ic <= worse.e_ic
        assert (better.e_ir, better.e_io, better.e_ic) != (worse.e_ir, worse.e_io, worse.e_ic)
