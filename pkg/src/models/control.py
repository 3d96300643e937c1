"""Data models for the state space, MPC configuration and condensed QP."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

STATE_NAMES = ("x_w", "x_pv", "x_b", "x_h", "x_f")
CONTROL_NAMES = (
    "p_gen_w",
    "p_gen_pv",
    "p_gen_b",
    "p_load_b",
    "p_gen_h",
    "p_load_h",
    "p_gen_f",
    "w_w",
    "w_pv",
)
DISTURBANCE_NAMES = ("xi_w", "xi_pv", "xi_h", "xi_f")
OUTPUT_NAMES = ("x_b", "x_h")


def _col(values, n: int, fill: float) -> np.ndarray:
    if values is None:
        return np.full(n, fill, dtype=float)
    return np.asarray(values, dtype=float).reshape(n)


@dataclass
class StateSpace:
    """
    Discrete system x(k+1) = A·x(k) + B·u(k) + D·d(k), y(k) = C·x(k).

    d(k) here is the normalized disturbance `d_scale * ξ(k)`, which keeps D
    a pure 0/1 pattern while storage rows stay in SOC units.

    Optional energy-block structure:
        balance_rows: state rows that must return to zero every step
            (zero-capacity units whose inflow must be used or spilled).
        power_row: coefficients of u in Σ p_gen − Σ p_load.
        spill_columns: control columns carrying spilled energy.
    """

    a: np.ndarray
    b: np.ndarray
    c_out: np.ndarray
    d: np.ndarray
    d_scale: Optional[np.ndarray] = None
    u_min: Optional[np.ndarray] = None
    u_max: Optional[np.ndarray] = None
    du_min: Optional[np.ndarray] = None
    du_max: Optional[np.ndarray] = None
    x_min: Optional[np.ndarray] = None
    x_max: Optional[np.ndarray] = None
    y_min: Optional[np.ndarray] = None
    y_max: Optional[np.ndarray] = None
    balance_rows: tuple[int, ...] = ()
    power_row: Optional[np.ndarray] = None
    spill_columns: tuple[int, ...] = ()
    dt_h: float = 1.0

    def __post_init__(self):
        self.a = np.atleast_2d(np.asarray(self.a, dtype=float))
        self.b = np.atleast_2d(np.asarray(self.b, dtype=float))
        self.c_out = np.atleast_2d(np.asarray(self.c_out, dtype=float))
        nx = self.a.shape[0]
        self.d = np.asarray(self.d, dtype=float).reshape(nx, -1)
        self.d_scale = _col(self.d_scale, self.nd, 1.0)
        self.u_min = _col(self.u_min, self.nu, -np.inf)
        self.u_max = _col(self.u_max, self.nu, np.inf)
        self.du_min = _col(self.du_min, self.nu, -np.inf)
        self.du_max = _col(self.du_max, self.nu, np.inf)
        self.x_min = _col(self.x_min, nx, -np.inf)
        self.x_max = _col(self.x_max, nx, np.inf)
        self.y_min = _col(self.y_min, self.ny, -np.inf)
        self.y_max = _col(self.y_max, self.ny, np.inf)
        if self.power_row is not None:
            self.power_row = np.asarray(self.power_row, dtype=float).reshape(self.nu)

    @property
    def nx(self) -> int:
        return self.a.shape[0]

    @property
    def nu(self) -> int:
        return self.b.shape[1]

    @property
    def nd(self) -> int:
        return self.d.shape[1]

    @property
    def ny(self) -> int:
        return self.c_out.shape[0]

    def normalize(self, xi: np.ndarray) -> np.ndarray:
        """Raw disturbances (MWh per step) to the normalized d(k)."""
        return np.asarray(xi, dtype=float) * self.d_scale

    def step(self, x: np.ndarray, u: np.ndarray, xi: np.ndarray) -> np.ndarray:
        """One application of the state equation."""
        return self.a @ x + self.b @ u + self.d @ self.normalize(xi)

    def output(self, x: np.ndarray) -> np.ndarray:
        return self.c_out @ x


@dataclass
class MpcConfig:
    """Receding-horizon controller settings."""

    n_p: int = 12
    n_c: int = 6
    q_weights: tuple[float, ...] = (1.0, 1.0)
    r_weights: tuple[float, ...] = (0.01,) * 9
    dt_h: float = 5.0 / 60.0
    y_ref: tuple[float, ...] = (0.45, 0.40)
    shed_penalty: float = 1e4
    slack_quadratic: float = 1.0
    spill_weight: float = 1.0
    output_relax: float = 0.01
    output_penalty: float = 1e6
    forecast: str = "perfect"
    qp_tol: float = 1e-6
    qp_max_iter: int = 500
    qp_accept_tol: float = 1e-3

    def validate(self) -> None:
        """Raise ValueError when the configuration is unusable."""
        if not 1 <= self.n_c <= self.n_p:
            raise ValueError(f"Need 1 <= n_c <= n_p, got n_c={self.n_c}, n_p={self.n_p}")
        if any(w < 0 for w in self.q_weights) or any(w < 0 for w in self.r_weights):
            raise ValueError("MPC weights must be non-negative")
        if not any(self.q_weights) and not any(self.r_weights):
            raise ValueError("Q and R must not both be zero")
        if self.dt_h <= 0:
            raise ValueError("dt_h must be positive")
        if self.output_relax < 0 or self.output_penalty < 0 or self.qp_accept_tol < 0:
            raise ValueError("output_relax, output_penalty and qp_accept_tol must be non-negative")
        if self.forecast not in ("perfect", "persistence"):
            raise ValueError(f"Unknown forecast mode: {self.forecast}")

    def to_dict(self) -> dict:
        return {
            "n_p": self.n_p,
            "n_c": self.n_c,
            "q_weights": list(self.q_weights),
            "r_weights": list(self.r_weights),
            "dt_h": self.dt_h,
            "y_ref": list(self.y_ref),
            "shed_penalty": self.shed_penalty,
            "slack_quadratic": self.slack_quadratic,
            "spill_weight": self.spill_weight,
            "output_relax": self.output_relax,
            "output_penalty": self.output_penalty,
            "forecast": self.forecast,
            "qp_tol": self.qp_tol,
            "qp_max_iter": self.qp_max_iter,
            "qp_accept_tol": self.qp_accept_tol,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MpcConfig":
        data = dict(data)
        for key in ("q_weights", "r_weights", "y_ref"):
            if key in data:
                data[key] = tuple(float(v) for v in data[key])
        return cls(**data)


@dataclass
class PredictionMatrices:
    """Condensation matrices over the prediction and control horizons."""

    m_x1: np.ndarray
    m_u1: np.ndarray
    m_delta_u1: np.ndarray
    m_x2: np.ndarray
    m_u2: np.ndarray
    m_delta_u2: np.ndarray
    lambda_: np.ndarray
    psi: np.ndarray
    m_d: np.ndarray
    n_p: int
    n_c: int


@dataclass
class QpProblem:
    """
    min ½ zᵀHz + fᵀz  s.t.  A_ineq·z ≤ b_ineq,  A_eq·z = b_eq.

    z = [ΔU(k) (nu·N_c), shed (N_c), dump (N_c), output slack]; the power
    slacks are absent when the state space has no power-balance row, the
    output slack unless the relaxation ladder asks for it.
    """

    h: np.ndarray
    f: np.ndarray
    a_ineq: np.ndarray
    b_ineq: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    n_du: int
    n_slack: int = 0
    n_output_slack: int = 0
    row_labels: list[str] = field(default_factory=list)

    @property
    def n_var(self) -> int:
        return self.h.shape[0]
