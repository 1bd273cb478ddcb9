"""Splitting-scheme registry and the forward stepping engines.

Four engines advance the coupled (Riccati flow, state) pair:

* ``step_autonomous`` -- constant coefficients, cached exponentials of the
  flow matrix; the Riccati advance is exact, so integrating to T returns
  P(T) = QT to roundoff.
* ``step_nonautonomous`` -- general time dependence through the
  two-time-coordinate interleave: each sub-flow is advanced with its own
  clock frozen while the other clock moves.
* ``s2_step`` / ``compose`` -- a symmetric second-order map whose Riccati
  update is the cheap Cayley approximation, raised to higher order by
  composition.
* ``step_near_integrable`` -- for problems whose constant drift dominates
  the coupling; the drift flow is exact and the perturbation is advanced
  with frozen time.

State update uses the a-coefficients and the Riccati flow the
b-coefficients; for the shipped 6-stage order-4 scheme this ordering keeps
the most negative coefficient on the state side, which helps positivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .errors import ConfigError, MisuseError
from .matfun import expm, min_eigenvalue_sym, pade2_apply, symmetry_defect
from .riccati import _gain_raw

# ---------------------------------------------------------------------------
# Scheme registry
# ---------------------------------------------------------------------------

CONSISTENCY_TOL = 1e-15


@dataclass(frozen=True)
class SplittingScheme:
    """Coefficient pairs (a_i, b_i) of a splitting method.

    ``a`` advances the state, ``b`` the Riccati flow; zero entries skip the
    corresponding map.  ``stages`` is the per-step work unit after FSAL
    merging and is what the benchmark reports as native evaluations.
    """

    name: str
    a: tuple
    b: tuple
    order: int
    stages: int
    symmetric: bool
    fsal: bool
    kind: str  # "general" | "near-integrable"

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise ConfigError(f"{self.name}: a and b must have equal length")
        if abs(math.fsum(self.a) - 1.0) > CONSISTENCY_TOL:
            raise ConfigError(f"{self.name}: sum(a) != 1")
        if abs(math.fsum(self.b) - 1.0) > CONSISTENCY_TOL:
            raise ConfigError(f"{self.name}: sum(b) != 1")

    def interleaved(self):
        """Nonzero coefficients in execution order (a_1, b_1, a_2, ...)."""
        seq = []
        for ai, bi in zip(self.a, self.b):
            if ai != 0.0:
                seq.append(ai)
            if bi != 0.0:
                seq.append(bi)
        return tuple(seq)


def _sp4():
    b1, b2, b3 = 0.0792036964311957, 0.353172906049774, -0.0420650803577195
    a2, a3 = 0.209515106613362, -0.143851773179818
    a4 = 0.5 - (a2 + a3)
    b4 = 1.0 - 2.0 * (b1 + b2 + b3)
    return SplittingScheme(
        name="sp4",
        a=(0.0, a2, a3, a4, a4, a3, a2),
        b=(b1, b2, b3, b4, b3, b2, b1),
        order=4, stages=6, symmetric=True, fsal=True, kind="general",
    )


def _sp6():
    a1, a2, a3 = 0.0502627644003922, 0.413514300428344, 0.0450798897943977
    a4, a5 = -0.188054853819569, 0.541960678450780
    a6 = 1.0 - 2.0 * (a1 + a2 + a3 + a4 + a5)
    b1, b2 = 0.148816447901042, -0.132385865767784
    b3, b4 = 0.067307604692185, 0.432666402578175
    b5 = 0.5 - (b1 + b2 + b3 + b4)
    return SplittingScheme(
        name="sp6",
        a=(a1, a2, a3, a4, a5, a6, a5, a4, a3, a2, a1),
        b=(b1, b2, b3, b4, b5, b5, b4, b3, b2, b1, 0.0),
        order=6, stages=10, symmetric=True, fsal=True, kind="general",
    )


def _ni42():
    a1 = (3.0 - math.sqrt(3.0)) / 6.0
    return SplittingScheme(
        name="ni42",
        a=(a1, 1.0 - 2.0 * a1, a1),
        b=(0.5, 0.5, 0.0),
        order=2, stages=2, symmetric=True, fsal=True, kind="near-integrable",
    )


def _ni84():
    a1, a2 = 0.07534696026989288842, 0.5179168546882567823
    a3 = 0.5 - (a1 + a2)
    b1, b2 = 0.19022593937367661925, 0.84652407044352625706
    b3 = 1.0 - 2.0 * (b1 + b2)
    return SplittingScheme(
        name="ni84",
        a=(a1, a2, a3, a3, a2, a1),
        b=(b1, b2, b3, b2, b1, 0.0),
        order=4, stages=5, symmetric=True, fsal=True, kind="near-integrable",
    )


def builtin_schemes():
    """The shipped schemes: Lie-Trotter, leapfrog, the 6-stage order-4 and
    10-stage order-6 compositions, and the (4,2) / (8,4) pairs tuned for
    dominant-plus-small-coupling problems."""
    sp1 = SplittingScheme(name="sp1", a=(1.0,), b=(1.0,), order=1, stages=1,
                          symmetric=False, fsal=False, kind="general")
    sp2 = SplittingScheme(name="sp2", a=(0.5, 0.5), b=(1.0, 0.0), order=2,
                          stages=1, symmetric=True, fsal=True, kind="general")
    return [sp1, sp2, _sp4(), _sp6(), _ni42(), _ni84()]


def get_scheme(name):
    for scheme in builtin_schemes():
        if scheme.name == name:
            return scheme
    raise ConfigError(f"unknown splitting scheme {name!r}")


# Composition weights turning a symmetric second-order map into order 4:
# (a1, a1, a2, a1, a1) with 4 a1 + a2 = 1.
_CUBE = 4.0 ** (1.0 / 3.0)
COMPOSE4_ALPHAS = (
    1.0 / (4.0 - _CUBE),
    1.0 / (4.0 - _CUBE),
    -_CUBE / (4.0 - _CUBE),
    1.0 / (4.0 - _CUBE),
    1.0 / (4.0 - _CUBE),
)


# ---------------------------------------------------------------------------
# Extended state
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExtendedState:
    """Riccati flow + state vector + the two time coordinates.

    ``t1`` accumulates the b-coefficients and is the clock frozen while the
    state advances; ``t2`` accumulates the a-coefficients and is the clock
    at which the flow matrix is sampled.  After a complete step both equal
    t_n + h.
    """

    flow: object  # RiccatiFlow or GameFlow (duck-typed)
    x: np.ndarray
    t1: float
    t2: float

    def replace(self, v=None, x=None, t1=None, t2=None):
        flow = self.flow
        t = t1 if t1 is not None else self.t1
        if v is not None:
            flow = type(self.flow).from_stacked(v, t)
        elif t1 is not None:
            flow = type(self.flow).from_stacked(self.flow.stacked(), t)
        return ExtendedState(
            flow=flow,
            x=self.x if x is None else x,
            t1=t,
            t2=self.t2 if t2 is None else t2,
        )


def initial_state(prob, flow):
    return ExtendedState(flow=flow, x=prob.x0.copy(), t1=prob.t0, t2=prob.t0)


def _closed_loop(prob, A, S_list, v, n, t):
    U = v[:n]
    N = A.copy()
    for j, S in enumerate(S_list):
        Vj = v[n * (1 + j): n * (2 + j)]
        N -= S @ _gain_raw(U, Vj, t)
    return N


# ---------------------------------------------------------------------------
# Engines
# ---------------------------------------------------------------------------


def step_autonomous(scheme, h, state, prob, cache=None):
    """One step of a general scheme with constant coefficients.

    The flow-matrix exponentials exp(b_i h M) are computed once per
    (scheme, h) and reused; a change of h simply misses the cache.
    """
    if not prob.is_autonomous:
        raise MisuseError("problem is not autonomous; use step_nonautonomous")
    if cache is None:
        cache = {}
    key = ("static",)
    if key not in cache:
        cache[key] = (prob.state_matrix(prob.t0), prob.coupling_at(prob.t0),
                      prob.flow_matrix(prob.t0))
    A0, S0, M0 = cache[key]
    n = prob.n

    v = state.flow.stacked()
    x = state.x
    t1 = state.t1
    for ai, bi in zip(scheme.a, scheme.b):
        if ai != 0.0:
            x = expm(ai * h * _closed_loop(prob, A0, S0, v, n, t1)) @ x
        if bi != 0.0:
            ekey = (scheme.name, h, bi)
            if ekey not in cache:
                cache[ekey] = expm(bi * h * M0)
            v = cache[ekey] @ v
    return state.replace(v=v, x=x, t1=state.t1 + h, t2=state.t2 + h)


def step_nonautonomous(scheme, h, state, prob):
    """One step of the two-time-coordinate interleave.

    Per stage: advance the state with its clock t1 frozen and the current
    gain, move t2 by a_i h, advance the flow by exp(b_i h M(t2)), move t1
    by b_i h.
    """
    n = prob.n
    v = state.flow.stacked()
    x = state.x
    t1, t2 = state.t1, state.t2
    for ai, bi in zip(scheme.a, scheme.b):
        if ai != 0.0:
            A = prob.state_matrix(t1)
            S = prob.coupling_at(t1)
            x = expm(ai * h * _closed_loop(prob, A, S, v, n, t1)) @ x
        t2 += ai * h
        if bi != 0.0:
            v = expm(bi * h * prob.flow_matrix(t2)) @ v
        t1 += bi * h
    return state.replace(v=v, x=x, t1=t1, t2=t2)


def s2_step(h, state, prob):
    """Symmetric second-order map: half state step, Cayley flow update at
    the midpoint clock, half state step."""
    n = prob.n
    v = state.flow.stacked()
    x = state.x
    t1, t2 = state.t1, state.t2

    x = expm(0.5 * h * _closed_loop(prob, prob.state_matrix(t1),
                                    prob.coupling_at(t1), v, n, t1)) @ x
    t2 += 0.5 * h
    v = pade2_apply(prob.flow_matrix(t2), h, v)
    t1 += h
    x = expm(0.5 * h * _closed_loop(prob, prob.state_matrix(t1),
                                    prob.coupling_at(t1), v, n, t1)) @ x
    t2 += 0.5 * h
    return state.replace(v=v, x=x, t1=t1, t2=t2)


def compose(base, alphas):
    """Composition of a base step map over fractional substeps.

    ``base(h, state, prob)`` must be a one-step map; the alphas must sum
    to one.  Returns a step map of the same signature.
    """
    if abs(math.fsum(alphas) - 1.0) > 1e-12:
        raise ConfigError(f"composition weights must sum to 1, got {math.fsum(alphas)}")
    def stepper(h, state, prob):
        for alpha in alphas:
            state = base(alpha * h, state, prob)
        return state
    return stepper


def _taylor4_apply(X, Y):
    # I + X + X^2/2 + X^3/6 + X^4/24 applied to Y.
    acc = Y.copy()
    term = Y
    for k in range(1, 5):
        term = (X @ term) / k
        acc += term
    return acc


def step_near_integrable(scheme, h, state, prob, dominant="A", cache=None):
    """One step for a dominant constant drift plus small coupling.

    The a-stages propagate U, V by the exact drift exponentials and the
    state by one CF4 step of its linear equation (the needed nodal drift
    exponentials are cached per stage length); the b-stages apply a
    degree-4 Taylor of the frozen coupling flow.  Time enters as a single
    extra coordinate, advanced during the a-stages only.
    """
    if dominant != "A":
        raise MisuseError(
            "near-integrable stepping needs the dominant part designated; "
            "only the constant drift block designation 'A' is supported"
        )
    if scheme.kind != "near-integrable":
        raise MisuseError(f"scheme {scheme.name} is not a near-integrable scheme")
    if not prob.A.constant:
        raise MisuseError("near-integrable stepping requires a constant A")
    if cache is None:
        cache = {}

    n = prob.n
    A = prob.state_matrix(prob.t0)
    nb = prob.nblocks
    v = state.flow.stacked()
    x = state.x
    t = state.t1

    skey = ("ni-static",)
    if skey not in cache:
        D = np.zeros(((nb + 1) * n, (nb + 1) * n))
        D[:n, :n] = A
        for j in range(nb):
            D[n * (1 + j): n * (2 + j), n * (1 + j): n * (2 + j)] = -A.T
        cache[skey] = D
    D = cache[skey]

    for ai, bi in zip(scheme.a, scheme.b):
        if ai != 0.0:
            tau = ai * h
            ekey = ("ni-exp", h, ai)
            if ekey not in cache:
                cache[ekey] = (
                    expm(0.5 * tau * A), expm(tau * A),
                    expm(-0.5 * tau * A.T), expm(-tau * A.T),
                )
            Eh, E1, Fh, F1 = cache[ekey]

            # CF4 on x' = (A - sum_j S_j(s) P_j(s)) x over [t, t + tau],
            # with the gain blocks evolved by the exact drift flow.
            U0 = v[:n]
            nodes = []
            for E, F, dt in ((None, None, 0.0), (Eh, Fh, 0.5 * tau), (E1, F1, tau)):
                Unode = U0 if E is None else E @ U0
                M = A.copy()
                for j, S in enumerate(prob.coupling_at(t + dt)):
                    Vnode = v[n * (1 + j): n * (2 + j)]
                    if F is not None:
                        Vnode = F @ Vnode
                    M -= S @ np.linalg.solve(Unode.T, Vnode.T).T
                nodes.append(M)
            M0, Mmid, M1 = nodes
            x = expm((tau / 12.0) * (-M0 + 4.0 * Mmid + 3.0 * M1)) @ (
                expm((tau / 12.0) * (3.0 * M0 + 4.0 * Mmid - M1)) @ x)

            vnew = np.empty_like(v)
            vnew[:n] = E1 @ v[:n]
            for j in range(nb):
                vnew[n * (1 + j): n * (2 + j)] = F1 @ v[n * (1 + j): n * (2 + j)]
            v = vnew
            t += tau
        if bi != 0.0:
            W = prob.flow_matrix(t) - D
            v = _taylor4_apply(bi * h * W, v)
    return state.replace(v=v, x=x, t1=t, t2=t)


# ---------------------------------------------------------------------------
# Forward driver
# ---------------------------------------------------------------------------


@dataclass
class Trajectory:
    """Time-indexed samples of the forward solve.

    ``gains[k, j]`` is the symmetrized j-th gain block at times[k];
    ``controls[j][k]`` the j-th control vector.  ``evaluations`` counts
    scheme stages (splitting) and is what work-precision plots use.
    """

    times: np.ndarray
    states: np.ndarray
    gains: np.ndarray
    controls: list
    evaluations: int
    min_gain_eig: float
    max_symmetry_defect: float
    terminal_gain_defect: float

    @property
    def terminal_state(self):
        return self.states[-1]

    @property
    def terminal_gains(self):
        return self.gains[-1]


def make_stepper(prob, method, cache):
    """Resolve a method name to (step map, stages per step).

    ``sp*``/``ni*`` pick the engine from the scheme kind and the problem's
    constancy; ``s2`` and ``s2c4`` use the Cayley-based symmetric map.
    """
    if method in ("s2", "s2c4"):
        base = lambda h, state, p: s2_step(h, state, p)
        if method == "s2":
            return base, 1
        return compose(s2_step, COMPOSE4_ALPHAS), 5
    scheme = get_scheme(method)
    if scheme.kind == "near-integrable":
        return (lambda h, state, p: step_near_integrable(scheme, h, state, p,
                                                         dominant="A", cache=cache),
                scheme.stages)
    if prob.is_autonomous:
        return (lambda h, state, p: step_autonomous(scheme, h, state, p, cache=cache),
                scheme.stages)
    return (lambda h, state, p: step_nonautonomous(scheme, h, state, p),
            scheme.stages)


def integrate_forward(prob, flow0, steps, method="sp4", stepper=None,
                      stages_per_step=None):
    """March the coupled system from t0 to T recording a Trajectory.

    ``flow0`` is the backward-pass result at t0.  Either a ``method`` name
    or an explicit (stepper, stages_per_step) pair selects the engine.
    """
    if steps < 1:
        raise ConfigError("steps must be >= 1")
    cache = {}
    if stepper is None:
        stepper, stages_per_step = make_stepper(prob, method, cache)
    h = (prob.T - prob.t0) / steps
    state = initial_state(prob, flow0)

    times = [state.t1]
    xs = [state.x.copy()]
    gains = [_symmetrized_gains(state, prob)]
    controls = [prob.feedback_controls(state.t1, gains[-1], state.x)]
    min_eig = min(min_eigenvalue_sym(P) for P in gains[-1])
    max_defect = _raw_gain_defect(state, prob)

    for _ in range(steps):
        state = stepper(h, state, prob)
        g = _symmetrized_gains(state, prob)
        times.append(state.t1)
        xs.append(state.x.copy())
        gains.append(g)
        controls.append(prob.feedback_controls(state.t1, g, state.x))
        min_eig = min(min_eig, min(min_eigenvalue_sym(P) for P in g))
        max_defect = max(max_defect, _raw_gain_defect(state, prob))

    terminal_defect = max(
        float(np.max(np.abs(P - QT)))
        for P, QT in zip(gains[-1], prob.terminal_gains())
    )
    nplayers = len(gains[0])
    return Trajectory(
        times=np.asarray(times),
        states=np.asarray(xs),
        gains=np.asarray(gains),
        controls=[np.asarray([c[j] for c in controls]) for j in range(nplayers)],
        evaluations=steps * stages_per_step,
        min_gain_eig=min_eig,
        max_symmetry_defect=max_defect,
        terminal_gain_defect=terminal_defect,
    )


def _symmetrized_gains(state, prob):
    return [0.5 * (P + P.T) for P in state.flow.gains()]


def _raw_gain_defect(state, prob):
    return max(symmetry_defect(P) for P in state.flow.gains())
