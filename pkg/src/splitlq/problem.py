"""LQ optimal control problem definitions.

A problem bundles the time-dependent coefficients A(t), B(t), Q(t), R(t),
the terminal weight, the initial state and the horizon, and knows how to
assemble the derived matrices: the control-weight image S(t) = B R^-1 B^T,
the doubled Hamiltonian flow matrix and the closed-loop state matrix.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionError, InputError, SingularityError
from .matfun import min_eigenvalue_sym, solve_checked, symmetry_defect

SYMMETRY_TOL = 1e-12
PSD_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class TimeMatrix:
    """A time-parameterized matrix coefficient with a declared constancy flag.

    ``evaluator`` must be a pure function of t returning an array of shape
    ``dims`` for every t in the problem horizon.  When ``constant`` is true
    the evaluator is sampled once and the cached value reused.
    """

    evaluator: Callable[[float], np.ndarray]
    dims: tuple[int, int]
    constant: bool = False
    _frozen_value: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def from_constant(cls, value):
        value = np.atleast_2d(np.asarray(value, dtype=float))
        if not np.all(np.isfinite(value)):
            raise InputError("constant coefficient has non-finite entries")
        return cls(evaluator=lambda t: value, dims=value.shape, constant=True,
                   _frozen_value=value)

    @classmethod
    def from_function(cls, fn, dims):
        return cls(evaluator=fn, dims=tuple(dims), constant=False)

    def __post_init__(self):
        if self.constant and self._frozen_value is None:
            # a declared-constant evaluator is sampled, checked, and frozen
            probe = [self._evaluate(t) for t in (0.0, 0.5, 1.0)]
            if any(not np.array_equal(probe[0], p) for p in probe[1:]):
                raise InputError(
                    "coefficient declared constant but varies with time")
            object.__setattr__(self, "_frozen_value", probe[0])

    def _evaluate(self, t):
        value = np.atleast_2d(np.asarray(self.evaluator(t), dtype=float))
        if value.shape != self.dims:
            raise DimensionError(
                f"evaluator returned shape {value.shape}, declared {self.dims}"
            )
        return value

    def __call__(self, t):
        if self._frozen_value is not None:
            return self._frozen_value
        return self._evaluate(t)


def _check_weight(name, tm, t_samples, positive_definite=False):
    for t in t_samples:
        W = tm(t)
        if symmetry_defect(W) > SYMMETRY_TOL * max(1.0, float(np.max(np.abs(W)))):
            raise InputError(f"{name}({t}) is not symmetric")
        lam = min_eigenvalue_sym(W)
        if positive_definite and lam <= 0.0:
            raise InputError(f"{name}({t}) is not positive definite (min eig {lam:.3e})")
        if not positive_definite and lam < -PSD_TOL:
            raise InputError(f"{name}({t}) is not PSD (min eig {lam:.3e})")


@dataclass(frozen=True, eq=False)
class LQProblem:
    """Data of a finite-horizon LQ optimal control problem.

    x' = A(t) x + B(t) u on [t0, T], quadratic running cost with state
    weight Q(t) (PSD) and control weight R(t) (SPD), terminal weight QT.
    """

    A: TimeMatrix
    B: TimeMatrix
    Q: TimeMatrix
    R: TimeMatrix
    QT: np.ndarray
    x0: np.ndarray
    t0: float = 0.0
    T: float = 1.0

    def __post_init__(self):
        n = self.A.dims[0]
        r = self.B.dims[1]
        if self.A.dims != (n, n):
            raise DimensionError("A must be square")
        if self.B.dims[0] != n:
            raise DimensionError("B must have as many rows as A")
        if self.Q.dims != (n, n) or self.R.dims != (r, r):
            raise DimensionError("Q must be n x n and R must be r x r")
        if not self.t0 < self.T:
            raise InputError(f"need t0 < T, got [{self.t0}, {self.T}]")
        object.__setattr__(self, "QT", np.atleast_2d(np.asarray(self.QT, dtype=float)))
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, dtype=float)))
        if self.QT.shape != (n, n):
            raise DimensionError("QT must be n x n")
        if self.x0.shape != (n,):
            raise DimensionError("x0 must have length n")
        samples = np.linspace(self.t0, self.T, 5)
        _check_weight("Q", self.Q, samples)
        _check_weight("R", self.R, samples, positive_definite=True)
        if symmetry_defect(self.QT) > SYMMETRY_TOL or min_eigenvalue_sym(self.QT) < -PSD_TOL:
            raise InputError("QT must be symmetric PSD")

    @property
    def n(self):
        return self.A.dims[0]

    @property
    def is_autonomous(self):
        return all(tm.constant for tm in (self.A, self.B, self.Q, self.R))

    # --- protocol shared with GameProblem, used by the stepping engines ---

    @property
    def nblocks(self):
        return 1

    def state_matrix(self, t):
        return self.A(t)

    def coupling_at(self, t):
        return [s_matrix(self, t)]

    def blocks_at(self, t):
        return self.A(t), [s_matrix(self, t)], [self.Q(t)]

    def flow_matrix(self, t):
        return hamiltonian_matrix(self, t)

    def feedback_controls(self, t, gains, x):
        B = self.B(t)
        return [-(_r_inverse(self, t) @ (B.T @ (gains[0] @ x)))]

    def terminal_gains(self):
        return [self.QT]


@functools.lru_cache(maxsize=None)
def _constant_inverse(tm: TimeMatrix):
    # TimeMatrix is hashable by identity (eq=False), so this caches the
    # factorized inverse of each constant R exactly once.
    M = tm(0.0)
    return solve_checked(M, np.eye(M.shape[0]))


def _r_inverse(prob, t):
    if prob.R.constant:
        return _constant_inverse(prob.R)
    R = prob.R(t)
    try:
        return solve_checked(R, np.eye(R.shape[0]), where=t)
    except SingularityError as exc:
        raise SingularityError(f"R(t) singular at t = {t}", where=t) from exc


def s_matrix(prob, t):
    """S(t) = B(t) R(t)^-1 B(t)^T, symmetrized on output."""
    B = prob.B(t)
    S = B @ _r_inverse(prob, t) @ B.T
    return 0.5 * (S + S.T)


def hamiltonian_matrix(prob, t):
    """The 2n x 2n flow matrix [[A, -S], [-Q, -A^T]] of the linearized RDE."""
    return assemble_flow_matrix(prob.n, *prob.blocks_at(t))


def assemble_flow_matrix(n, A, S_list, Q_list):
    """Stack [[A, -S_1 .. -S_N], [-Q_i down, -A^T diagonal]]."""
    N = len(S_list)
    K = np.zeros(((N + 1) * n, (N + 1) * n))
    K[:n, :n] = A
    for i in range(N):
        K[:n, n * (1 + i): n * (2 + i)] = -S_list[i]
        K[n * (1 + i): n * (2 + i), :n] = -Q_list[i]
        K[n * (1 + i): n * (2 + i), n * (1 + i): n * (2 + i)] = -A.T
    return K


def closed_loop_matrix(prob, t, P):
    """A(t) - S(t) P, the state matrix under optimal feedback."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape != (prob.n, prob.n):
        raise DimensionError(f"P must be {prob.n} x {prob.n}, got {P.shape}")
    return prob.A(t) - s_matrix(prob, t) @ P
