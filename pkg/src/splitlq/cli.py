"""Command-line interface.

Three subcommands:

* ``solve``  -- read a problem config file, run one method, write a CSV row.
* ``game``   -- run a built-in benchmark preset with one method.
* ``sweep``  -- run a method x step-size sweep on a preset, write the CSV.

The config file is INI-style key/value text with nested sections; time
functions are picked from the named catalog (constant, tanh-ramp):

    [problem]
    players = 2
    rho = 0.0
    horizon = 1.0
    x0 = 10.0

    [a]
    kind = tanh-ramp
    base = 2.0
    amplitude = 1.0
    rate = 5.0
    center = 0.5

    [b]
    kind = constant
    value = 1.0

    [costs]
    c = 5.5, 6.0
    d = 0.18181818, 0.16666667
"""

from __future__ import annotations

import argparse
import configparser
import sys

from .bench import (PollutionConfig, TimeFunction, build_pollution, emit_csv,
                    preset, run_single, run_sweep, backward_pass,
                    reference_endpoint)
from .errors import ConfigError
from .games import GameProblem, solve_zero_sum
from .problem import TimeMatrix

METHODS = ("sp2", "sp4", "sp6", "s2c4", "ni42", "ni84", "rk4", "dopri")


def _time_function_from_section(section):
    kind = section.get("kind", "constant")
    if kind == "constant":
        return TimeFunction.constant(section.getfloat("value"))
    if kind == "tanh-ramp":
        return TimeFunction.tanh_ramp(
            base=section.getfloat("base"),
            amplitude=section.getfloat("amplitude", 1.0),
            rate=section.getfloat("rate", 1.0),
            center=section.getfloat("center", 0.0),
        )
    raise ConfigError(f"unknown time function kind {kind!r}")


def load_config(path):
    """Parse a problem config file into a PollutionConfig."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path!r}")
    if "problem" not in parser:
        raise ConfigError("config file needs a [problem] section")
    sec = parser["problem"]
    nplayers = sec.getint("players")
    if nplayers is None or nplayers < 1:
        raise ConfigError("players must be a positive integer")

    def coefficient(name, default=None):
        if name in parser:
            return _time_function_from_section(parser[name])
        if default is None:
            raise ConfigError(f"config file needs an [{name}] section")
        return TimeFunction.constant(default)

    def per_player(name):
        values = []
        if "costs" in parser and name in parser["costs"]:
            values = [TimeFunction.constant(float(v.strip()))
                      for v in parser["costs"][name].split(",")]
        for i in range(1, nplayers + 1):
            key = f"{name}.{i}"
            if key in parser:
                if len(values) < i:
                    values.extend([None] * (i - len(values)))
                values[i - 1] = _time_function_from_section(parser[key])
        if len(values) != nplayers or any(v is None for v in values):
            raise ConfigError(f"need one {name} entry per player")
        return tuple(values)

    return PollutionConfig(
        N=nplayers,
        a=coefficient("a"),
        b=coefficient("b"),
        c=per_player("c"),
        d=per_player("d"),
        rho=sec.getfloat("rho", 0.0),
        T=sec.getfloat("horizon", 1.0),
        x0=sec.getfloat("x0", 10.0),
    )


def _run_one(prob, method, steps, measure_time):
    h = (prob.T - prob.t0) / steps
    flow0 = backward_pass(prob)
    x_ref = reference_endpoint(prob, flow0, 100 * steps)
    resolution = 1e-8 if method == "dopri" else h
    return run_single(prob, flow0, method, resolution, x_ref,
                      measure_time=measure_time)


def _zero_sum_variant(prob, cross_weight):
    """Two-player zero-sum version of a pollution game: keep the first two
    players and attach constant cross weights R_12 = R_21."""
    if prob.nplayers < 2:
        raise ConfigError("--zero-sum needs at least two players")
    if cross_weight <= 0.0:
        raise ConfigError("--cross-weight must be positive")
    W = TimeMatrix.from_constant([[cross_weight]])
    return GameProblem(
        A=prob.A, B=prob.B[:2], R=prob.R[:2], Q=prob.Q[:2], QT=prob.QT[:2],
        x0=prob.x0, t0=prob.t0, T=prob.T,
        cross_R={(1, 2): W, (2, 1): W},
    )


def _run_zero_sum(prob, steps):
    traj = solve_zero_sum(prob, steps_backward=max(8, steps // 2),
                          steps_forward=steps)
    print(f"zero-sum x(T)={traj.terminal_state[0]:.12g} "
          f"evaluations={traj.evaluations} "
          f"terminal_gain_defect={traj.terminal_gain_defect:.6e} "
          f"min_gain_eig={traj.min_gain_eig:.6e} "
          f"symmetry_defect={traj.max_symmetry_defect:.6e}")


def _print_result(row):
    print(f"method={row.method} resolution={row.resolution:.6g} "
          f"evaluations={row.evaluations} x_error={row.x_error:.6e} "
          f"gain_defect={row.gain_defect:.6e} "
          f"positivity_violation={str(row.positivity_flag).lower()} "
          f"symmetry_defect={row.symmetry_defect:.6e}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="splitlq",
        description="LQ control and differential games via splitting integrators",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem from a config file")
    p_solve.add_argument("--problem", required=True, help="config file path")
    p_solve.add_argument("--method", required=True, choices=METHODS)
    p_solve.add_argument("--steps", type=int, default=64)
    p_solve.add_argument("--output", help="CSV output path")
    p_solve.add_argument("--time", action="store_true", help="measure wall clock")
    p_solve.add_argument("--zero-sum", dest="zero_sum", action="store_true",
                         help="two-player zero-sum mode (coupled Riccati)")
    p_solve.add_argument("--cross-weight", dest="cross_weight", type=float,
                         default=10.0, help="constant cross weights R_12 = R_21")

    p_game = sub.add_parser("game", help="run a benchmark preset")
    p_game.add_argument("--preset", required=True,
                        choices=("fig1", "fig2", "fig3a", "fig3b"))
    p_game.add_argument("--method", required=True, choices=METHODS)
    p_game.add_argument("--steps", type=int, default=64)
    p_game.add_argument("--output", help="CSV output path")
    p_game.add_argument("--time", action="store_true", help="measure wall clock")
    p_game.add_argument("--zero-sum", dest="zero_sum", action="store_true",
                        help="two-player zero-sum mode (coupled Riccati)")
    p_game.add_argument("--cross-weight", dest="cross_weight", type=float,
                        default=10.0, help="constant cross weights R_12 = R_21")

    p_sweep = sub.add_parser("sweep", help="method x resolution sweep")
    p_sweep.add_argument("--preset", required=True,
                         choices=("fig1", "fig2", "fig3a", "fig3b"))
    p_sweep.add_argument("--methods", required=True,
                         help="comma-separated method names")
    p_sweep.add_argument("--h-ladder", dest="h_ladder",
                         help="comma-separated step sizes")
    p_sweep.add_argument("--tol-exponent", dest="tol_exponent", type=int,
                         help="adaptive ladder AbsTol=10^-i for i=3..exponent")
    p_sweep.add_argument("--output", required=True, help="CSV output path")
    p_sweep.add_argument("--time", action="store_true", help="measure wall clock")

    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            prob = build_pollution(load_config(args.problem))
            if args.zero_sum:
                _run_zero_sum(_zero_sum_variant(prob, args.cross_weight),
                              args.steps)
            else:
                row = _run_one(prob, args.method, args.steps, args.time)
                _print_result(row)
                if args.output:
                    emit_csv([row], args.output)
        elif args.command == "game":
            prob = build_pollution(preset(args.preset))
            if args.zero_sum:
                _run_zero_sum(_zero_sum_variant(prob, args.cross_weight),
                              args.steps)
            else:
                row = _run_one(prob, args.method, args.steps, args.time)
                _print_result(row)
                if args.output:
                    emit_csv([row], args.output)
        elif args.command == "sweep":
            prob = build_pollution(preset(args.preset))
            methods = tuple(m.strip() for m in args.methods.split(","))
            for m in methods:
                if m not in METHODS:
                    raise ConfigError(f"unknown method {m!r}")
            h_ladder = None
            if args.h_ladder:
                h_ladder = tuple(float(v) for v in args.h_ladder.split(","))
            tol_ladder = None
            if args.tol_exponent:
                tol_ladder = tuple(10.0 ** (-i)
                                   for i in range(3, args.tol_exponent + 1))
            rows = run_sweep(prob, methods, h_ladder=h_ladder,
                             tol_ladder=tol_ladder, measure_time=args.time)
            emit_csv(rows, args.output)
            print(f"wrote {len(rows)} rows to {args.output}")
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
