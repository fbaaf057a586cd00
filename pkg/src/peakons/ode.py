"""Direct integration of the classical peakon system (verification oracle).

q_n' = sum_k p_k e^{-|q_n - q_k|},
p_n' = sum_k p_n p_k sgn(q_n - q_k) e^{-|q_n - q_k|},  sgn(0) = 0,

the Hamiltonian system for H = (1/2) sum p_n p_k e^{-|q_n - q_k|}.  The
right-hand side stops being Lipschitz when positions approach each other,
so integration halts before the minimum gap closes; continuation through
collisions belongs to the spectral pipeline.  Runs in double precision
(the oracle tolerance is 1e-6-scale, well above float64 noise).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from .core import PeakonState, peakon_state
from .errors import CoincidentPositions, StepSizeUnderflow


@dataclass(frozen=True)
class OdeOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    min_gap: float = 1e-6
    max_step: float = np.inf


@dataclass(frozen=True)
class OdeTrajectory:
    times: np.ndarray
    states: tuple  # PeakonState at each accepted step
    termination: str  # 'completed' | 'collision_imminent'
    n_rhs_evaluations: int
    dense: object = field(repr=False, default=None)

    def state_at(self, t) -> PeakonState:
        y = self.dense(t)
        n = len(y) // 2
        return peakon_state(y[n:], y[:n], t)


def _unpack(state: PeakonState):
    q = np.array([float(x) for x in state.positions])
    p = np.array([float(x) for x in state.heights])
    return q, p


def _rhs(q, p):
    dq = q[:, None] - q[None, :]
    e = np.exp(-np.abs(dq))
    s = np.sign(dq)
    return e @ p, p * ((s * e) @ p)


def ode_rhs(state: PeakonState):
    """(dq/dt, dp/dt) for the classical system; positions must be distinct."""
    q, p = _unpack(state)
    if len(q) > 1 and np.min(np.diff(q)) <= 0:
        raise CoincidentPositions("positions must be distinct")
    qdot, pdot = _rhs(q, p)
    return tuple(qdot), tuple(pdot)


def hamiltonian(state: PeakonState) -> float:
    """H = (1/2) sum p_n p_k e^{-|q_n - q_k|}; equals a quarter of the
    H^1 energy of u, hence I2/4 away from collisions."""
    q, p = _unpack(state)
    e = np.exp(-np.abs(q[:, None] - q[None, :]))
    return 0.5 * float(p @ e @ p)


def integrate(state: PeakonState, t_end, options: OdeOptions | None = None) -> OdeTrajectory:
    """Adaptive embedded 4(5) pair from state.time to t_end.

    Halts with termination 'collision_imminent' when the smallest gap
    q_{n+1} - q_n reaches options.min_gap (the blow-up dominates the local
    error estimate beyond that point).
    """
    options = options or OdeOptions()
    q0, p0 = _unpack(state)
    n = len(q0)
    if n > 1 and np.min(np.diff(q0)) <= 0:
        raise CoincidentPositions("positions must be distinct")
    t0 = float(state.time)

    def rhs(_t, y):
        qdot, pdot = _rhs(y[:n], y[n:])
        return np.concatenate([qdot, pdot])

    def gap_event(_t, y):
        if n < 2:
            return 1.0
        return float(np.min(np.diff(y[:n])) - options.min_gap)

    gap_event.terminal = True
    gap_event.direction = -1

    sol = solve_ivp(
        rhs,
        (t0, float(t_end)),
        np.concatenate([q0, p0]),
        method="RK45",
        rtol=options.rel_tol,
        atol=options.abs_tol,
        max_step=options.max_step,
        events=[gap_event],
        dense_output=True,
    )
    if sol.status == -1:
        raise StepSizeUnderflow(sol.message)
    states = []
    for t, y in zip(sol.t, sol.y.T):
        if n > 1 and np.min(np.diff(y[:n])) <= 0:
            raise StepSizeUnderflow("ordering lost at an accepted step")
        states.append(peakon_state(y[n:], y[:n], t))
    termination = "collision_imminent" if sol.status == 1 else "completed"
    return OdeTrajectory(sol.t, tuple(states), termination, sol.nfev, sol.sol)
