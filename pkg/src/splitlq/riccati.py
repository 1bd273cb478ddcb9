"""Linearized Riccati flow: backward integration, gain map and feedback law.

The nonlinear Riccati equation P' = -Q - A^T P - P A + P S P is solved
through the linear doubled system y' = K(t) y with y = [U; V], P = V U^-1
and final condition y(T) = [I; QT].  The backward pass produces (U0, V0)
at t0 with no intermediate storage; the forward engines live in
:mod:`splitlq.splitting`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MisuseError, SingularityError
from .magnus import LinearFlowProblem, cf4_step
from .matfun import expm, symmetry_defect
from .problem import _r_inverse, hamiltonian_matrix

# 1/cond(U) below this aborts the solve: P = V U^-1 is no longer meaningful.
U_RCOND_FLOOR = 1e-12


@dataclass(frozen=True)
class RiccatiFlow:
    """Snapshot (U, V) of the linearized Riccati flow at time t."""

    U: np.ndarray
    V: np.ndarray
    t: float

    def stacked(self):
        return np.vstack([self.U, self.V])

    @classmethod
    def from_stacked(cls, y, t):
        n = y.shape[1]
        return cls(U=y[:n], V=y[n:], t=t)

    def gains(self):
        """[P] with P = V U^-1 (raw, not symmetrized)."""
        return [_gain_raw(self.U, self.V, self.t)]


def check_nonsingular(U, t):
    norm_u = np.linalg.norm(U, 1)
    try:
        Uinv = np.linalg.solve(U, np.eye(U.shape[0]))
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"U(t) singular at t = {t}", where=t) from exc
    rcond = 1.0 / (norm_u * np.linalg.norm(Uinv, 1))
    if rcond < U_RCOND_FLOOR:
        raise SingularityError(
            f"U(t) numerically singular at t = {t} (1/cond = {rcond:.3e})", where=t
        )
    return Uinv


def _gain_raw(U, V, t):
    if U.shape == (1, 1):
        if U[0, 0] == 0.0:
            raise SingularityError(f"U(t) singular at t = {t}", where=t)
        return V / U[0, 0]
    try:
        return np.linalg.solve(U.T, V.T).T
    except np.linalg.LinAlgError as exc:
        raise SingularityError(f"U(t) singular at t = {t}", where=t) from exc


def terminal_flow(prob):
    """The final condition y(T) = [I; QT]."""
    n = prob.n
    return RiccatiFlow(U=np.eye(n), V=prob.QT.copy(), t=prob.T)


def backward_autonomous(prob):
    """(U0, V0) = expm((t0 - T) K) [I; QT] for constant coefficients."""
    if not prob.is_autonomous:
        raise MisuseError(
            "coefficients are time dependent; use backward_nonautonomous"
        )
    K = hamiltonian_matrix(prob, prob.t0)
    y = expm((prob.t0 - prob.T) * K) @ terminal_flow(prob).stacked()
    flow = RiccatiFlow.from_stacked(y, prob.t0)
    check_nonsingular(flow.U, prob.t0)
    return flow


def backward_nonautonomous(prob, steps):
    """Integrate y' = K(t) y from T down to t0 with uniform CF4 steps.

    U is condition-checked after every step; a singular U raises with the
    failing time.  No intermediate results are stored.
    """
    if steps < 1:
        raise MisuseError("steps must be >= 1")
    lin = LinearFlowProblem(matrix=lambda t: hamiltonian_matrix(prob, t),
                            dim=2 * prob.n)
    h = (prob.t0 - prob.T) / steps
    y = terminal_flow(prob).stacked()
    t = prob.T
    for _ in range(steps):
        y = cf4_step(lin, t, h, y)
        t += h
        check_nonsingular(y[: prob.n], t)
    return RiccatiFlow.from_stacked(y, prob.t0)


def gain(flow):
    """P = V U^-1, symmetrized as (P + P^T)/2.

    The raw asymmetry is available through :func:`gain_defect`.
    """
    P = _gain_raw(flow.U, flow.V, flow.t)
    return 0.5 * (P + P.T)


def gain_defect(flow):
    """max |P_ij - P_ji| of the raw gain, before symmetrization."""
    return symmetry_defect(_gain_raw(flow.U, flow.V, flow.t))


def control(prob, t, flow, x):
    """Optimal feedback u = -R(t)^-1 B(t)^T (V U^-1) x."""
    P = _gain_raw(flow.U, flow.V, t)
    B = prob.B(t)
    x = np.asarray(x, dtype=float)
    return -(_r_inverse(prob, t) @ (B.T @ (P @ x)))
