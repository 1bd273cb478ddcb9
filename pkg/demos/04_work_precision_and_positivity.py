"""Work-precision sweep and the positivity story.

Runs the benchmark sweep machinery on the one-player ramp problem: error
against native evaluation counts for the splitting schemes and the RK
baselines, plus the positivity flag (terminal gain below -1e-8).  The
second-order splitting never violates positivity because each of its
sub-flows is an exact Riccati flow with nonnegative weights; RK4 drives
the terminal gain negative at every coarse step size.
"""

from splitlq import build_pollution, emit_csv, preset, run_sweep

prob = build_pollution(preset("fig3a"))
ladder = (1 / 4, 1 / 8, 1 / 16, 1 / 32, 1 / 64)

rows = run_sweep(prob, ("sp2", "sp4", "rk4", "dopri"),
                 h_ladder=ladder, tol_ladder=(1e-4, 1e-6, 1e-8))

print("method  resolution  evals    x_error    gain_defect  positivity_violation")
for r in rows:
    print(f"{r.method:6s}  {r.resolution:9.3g}  {r.evaluations:5d}  "
          f"{r.x_error:.3e}  {r.gain_defect:.3e}  {str(r.positivity_flag).lower()}")

path = emit_csv(rows, "fig3a_sweep.csv")
print(f"\nwrote {path} (byte-identical on reruns: no randomness, no timing)")
print("note how sp2 rows never violate positivity while every coarse rk4 row does")
