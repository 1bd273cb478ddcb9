"""Benchmark harness: the air-pollution test problems, method sweeps and
work-precision CSV output.

A pollution problem has one scalar state (the pollutant excess) driven by
N regional emission controls; player i pays c_i(t) e^{-rho t} for emitting
and d_i(t) e^{-rho t} for the ambient level.  Mapped to game data this is
A = -a(t), B_i = b(t), R_ii = c_i e^{-rho t}, Q_i = d_i e^{-rho t} and zero
terminal weights, so the exact terminal gain is zero and any negative
numerical gain is a positivity violation.
"""

from __future__ import annotations

import time as _time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError
from .games import GameProblem, backward_game
from .problem import TimeMatrix
from .reference import adaptive_solve, flatten_pipeline, rk4_solve, unflatten
from .splitting import integrate_forward

POSITIVITY_THRESHOLD = -1e-8
REFERENCE_AGREEMENT = 1e-11

# Method families: splitting cost is counted in stages, the baselines in
# rhs evaluations.
SPLITTING_METHODS = ("sp1", "sp2", "sp4", "sp6", "s2c4", "ni42", "ni84")
FIXED_STEP_METHODS = SPLITTING_METHODS + ("rk4",)
ADAPTIVE_METHODS = ("dopri",)


# ---------------------------------------------------------------------------
# Time-function catalog
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TimeFunction:
    """A named scalar function of time from the config catalog.

    kinds: ``constant`` (value) and ``tanh-ramp``
    (base + amplitude * tanh(rate * (t - center))).
    """

    kind: str
    params: tuple

    @classmethod
    def constant(cls, value):
        return cls(kind="constant", params=(float(value),))

    @classmethod
    def tanh_ramp(cls, base, amplitude, rate, center):
        return cls(kind="tanh-ramp",
                   params=(float(base), float(amplitude), float(rate), float(center)))

    @property
    def is_constant(self):
        return self.kind == "constant"

    def __call__(self, t):
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "tanh-ramp":
            base, amplitude, rate, center = self.params
            return base + amplitude * np.tanh(rate * (t - center))
        raise ConfigError(f"unknown time function kind {self.kind!r}")


def _as_time_function(value):
    if isinstance(value, TimeFunction):
        return value
    return TimeFunction.constant(value)


# ---------------------------------------------------------------------------
# Pollution problems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PollutionConfig:
    """Data of the N-region pollution game.

    ``a``, ``b`` and the per-player ``c``, ``d`` entries are constants or
    TimeFunction values; ``rho`` is the discount rate.
    """

    N: int
    a: object
    b: object
    c: tuple
    d: tuple
    rho: float = 0.0
    T: float = 1.0
    x0: float = 10.0

    def __post_init__(self):
        object.__setattr__(self, "a", _as_time_function(self.a))
        object.__setattr__(self, "b", _as_time_function(self.b))
        object.__setattr__(self, "c", tuple(_as_time_function(v) for v in self.c))
        object.__setattr__(self, "d", tuple(_as_time_function(v) for v in self.d))
        if len(self.c) != self.N or len(self.d) != self.N:
            raise ConfigError("need one c_i and one d_i per player")


def preset(name):
    """The benchmark presets: two autonomous 10-player problems and the
    two one-player problems with a tanh drift ramp and discounting."""
    if name == "fig1":
        return PollutionConfig(
            N=10, a=1.0, b=1.0,
            c=tuple((10.0 + i) / 2.0 for i in range(1, 11)),
            d=tuple(2.0 / (10.0 + i) for i in range(1, 11)),
            rho=0.0, T=1.0, x0=10.0,
        )
    if name == "fig2":
        return PollutionConfig(
            N=10, a=2.0, b=1.0,
            c=tuple((100.0 + i) / 2.0 for i in range(1, 11)),
            d=tuple(2.0 / (100.0 + i) for i in range(1, 11)),
            rho=0.0, T=1.0, x0=10.0,
        )
    if name in ("fig3a", "fig3b"):
        c1 = 11.0 / 2.0 if name == "fig3a" else 101.0 / 2.0
        ramp = TimeFunction.tanh_ramp(base=2.0, amplitude=1.0, rate=5.0, center=0.5)
        return PollutionConfig(
            N=1, a=ramp, b=1.0, c=(c1,), d=(1.0 / c1,),
            rho=0.1, T=1.0, x0=10.0,
        )
    raise ConfigError(f"unknown preset {name!r}; expected fig1|fig2|fig3a|fig3b")


def build_pollution(config):
    """Instantiate the pollution game: scalar state, per-player scalar
    blocks, discount factors folded into the weights."""
    for name, fns in (("c", config.c), ("d", config.d)):
        for i, fn in enumerate(fns):
            if fn.is_constant and fn(0.0) <= 0.0:
                raise ConfigError(f"{name}_{i + 1} must be positive")
    if config.b.is_constant and config.b(0.0) == 0.0:
        raise ConfigError("b must be nonzero")

    rho = config.rho
    discounted = rho != 0.0

    def scalar_tm(fn, sign=1.0, discount=False):
        if fn.is_constant and not (discount and discounted):
            return TimeMatrix.from_constant([[sign * fn(0.0)]])
        return TimeMatrix.from_function(
            lambda t: np.array([[sign * fn(t) * (np.exp(-rho * t) if discount else 1.0)]]),
            (1, 1),
        )

    A = scalar_tm(config.a, sign=-1.0)
    B = tuple(scalar_tm(config.b) for _ in range(config.N))
    R = tuple(scalar_tm(fn, discount=True) for fn in config.c)
    Q = tuple(scalar_tm(fn, discount=True) for fn in config.d)
    QT = tuple(np.zeros((1, 1)) for _ in range(config.N))
    return GameProblem(A=A, B=B, R=R, Q=Q, QT=QT, x0=np.array([config.x0]),
                       t0=0.0, T=config.T)


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    """One (method, resolution) row of a work-precision sweep."""

    method: str
    resolution: float  # step size h, or abs_tol for adaptive methods
    evaluations: int
    seconds: float
    x_error: float
    gain_defect: float
    positivity_flag: bool
    symmetry_defect: float


BACKWARD_STEPS = 2048  # CF4 backward budget for non-autonomous problems


def backward_pass(prob):
    """Backward pass at roundoff/1e-12 accuracy (expm when autonomous,
    CF4 otherwise); its cost is excluded from forward evaluation counts."""
    return backward_game(prob, steps=None if prob.is_autonomous else BACKWARD_STEPS)


def reference_endpoint(prob, flow0, steps):
    """High-accuracy forward endpoint, self-checked at two resolutions.

    Fine fixed-step RK4 on the flat system; the run is accepted only when
    the endpoints at ``steps`` and ``2 * steps`` agree to 1e-11.
    """
    ends = []
    for k in (2, 1):
        ode, y0 = flatten_pipeline(prob, flow0)
        y = rk4_solve(ode, prob.t0, prob.T, k * steps, y0)
        ends.append(unflatten(prob, y)[1])
    drift = float(np.max(np.abs(ends[0] - ends[1])))
    if drift > REFERENCE_AGREEMENT:
        raise ConfigError(
            f"reference self-consistency failure: endpoints differ by {drift:.3e}"
        )
    return ends[0]


def _terminal_min_gain(traj):
    return float(min(np.linalg.eigvalsh(P)[0] for P in traj.terminal_gains))


def run_single(prob, flow0, method, resolution, x_ref, measure_time=False):
    """One sweep row.  ``resolution`` is h for fixed-step methods and the
    absolute tolerance for the adaptive baseline (rel_tol = 10 * abs_tol)."""
    span = prob.T - prob.t0
    start = _time.perf_counter() if measure_time else 0.0
    if method in SPLITTING_METHODS:
        steps = max(1, round(span / resolution))
        traj = integrate_forward(prob, flow0, steps, method=method)
        evaluations = traj.evaluations
        x_end = traj.terminal_state
        gain_defect = traj.terminal_gain_defect
        sym_defect = traj.max_symmetry_defect
        min_gain = _terminal_min_gain(traj)
    elif method == "rk4":
        steps = max(1, round(span / resolution))
        ode, y0 = flatten_pipeline(prob, flow0)
        y = rk4_solve(ode, prob.t0, prob.T, steps, y0)
        evaluations = ode.evaluations
        x_end, gain_defect, sym_defect, min_gain = _flat_diagnostics(prob, y)
    elif method == "dopri":
        ode, y0 = flatten_pipeline(prob, flow0)
        y, evaluations = adaptive_solve(ode, prob.t0, prob.T, y0,
                                        abs_tol=resolution, rel_tol=10.0 * resolution)
        x_end, gain_defect, sym_defect, min_gain = _flat_diagnostics(prob, y)
    else:
        raise ConfigError(f"unknown method {method!r}")
    seconds = (_time.perf_counter() - start) if measure_time else 0.0
    return SweepResult(
        method=method,
        resolution=resolution,
        evaluations=evaluations,
        seconds=seconds,
        x_error=float(np.max(np.abs(x_end - x_ref))),
        gain_defect=float(gain_defect),
        positivity_flag=bool(min_gain < POSITIVITY_THRESHOLD),
        symmetry_defect=float(sym_defect),
    )


def _flat_diagnostics(prob, y):
    blocks, x = unflatten(prob, y)
    n = prob.n
    U = blocks[:n]
    gains = [np.linalg.solve(U.T, blocks[n * (1 + j): n * (2 + j)].T).T
             for j in range(prob.nblocks)]
    defect = max(float(np.max(np.abs(P - QT)))
                 for P, QT in zip(gains, prob.terminal_gains()))
    sym = max(float(np.max(np.abs(P - P.T))) for P in gains)
    min_gain = min(float(np.linalg.eigvalsh(0.5 * (P + P.T))[0]) for P in gains)
    return x, defect, sym, min_gain


def run_sweep(prob, methods, h_ladder=None, tol_ladder=None,
              reference_steps=None, measure_time=False):
    """Run every (method, resolution) pair and collect SweepResult rows.

    Fixed-step methods walk ``h_ladder``; the adaptive baseline walks
    ``tol_ladder``.  The reference endpoint is computed once at no coarser
    than 100x the finest ladder resolution.  Rows are deterministic unless
    ``measure_time`` is set (wall-clock is then filled in, at the cost of
    reproducibility).  Failing rows are recorded with a NaN error instead
    of aborting.
    """
    if h_ladder is None:
        h_ladder = tuple(1.0 / 2**k for k in range(2, 9))
    span = prob.T - prob.t0
    finest = max(1, round(span / min(h_ladder)))
    ref_steps = max(reference_steps or 0, 100 * finest)
    flow0 = backward_pass(prob)
    x_ref = reference_endpoint(prob, flow0, ref_steps)
    results = []
    for method in methods:
        ladder = tol_ladder if method in ADAPTIVE_METHODS else h_ladder
        if ladder is None:
            ladder = tuple(10.0 ** (-i) for i in range(3, 10))
        for resolution in ladder:
            try:
                results.append(run_single(prob, flow0, method, resolution,
                                          x_ref, measure_time=measure_time))
            except Exception:
                results.append(SweepResult(
                    method=method, resolution=resolution, evaluations=0,
                    seconds=0.0, x_error=float("nan"), gain_defect=float("nan"),
                    positivity_flag=False, symmetry_defect=float("nan"),
                ))
    return results


CSV_HEADER = ("method,resolution,evaluations,seconds,x_error,gain_defect,"
              "positivity_flag,symmetry_defect")


def emit_csv(results, path):
    """Write sweep rows with 17-significant-digit decimals.

    The output is byte-identical across runs of the same configuration
    (provided timing was not measured).
    """
    if not results:
        raise InputError("refusing to write an empty sweep (no result rows)")
    lines = [CSV_HEADER]
    for r in results:
        lines.append(",".join([
            r.method,
            f"{r.resolution:.17g}",
            str(r.evaluations),
            f"{r.seconds:.17g}",
            f"{r.x_error:.17g}",
            f"{r.gain_defect:.17g}",
            "true" if r.positivity_flag else "false",
            f"{r.symmetry_defect:.17g}",
        ]))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")
    return path
