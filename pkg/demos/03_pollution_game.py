"""A ten-region emissions game solved as one linear block system.

Each region pays for its own emissions and for the ambient pollutant
level, so the Nash feedback couples ten scalar Riccati equations.  The
stacked blocks [U; V_1; ...; V_10] obey a single 11 x 11 linear flow,
which the pipeline integrates backward with one exponential and forward
with a splitting scheme.  Controls come out alongside the states at no
extra cost, and every u_i(T) vanishes because the terminal weights do.
"""

import numpy as np

from splitlq import build_pollution, preset, solve_game

prob = build_pollution(preset("fig1"))
print(f"players: {prob.nplayers}, state dim: {prob.n}, "
      f"autonomous: {prob.is_autonomous}")

traj = solve_game(prob, scheme="sp4", steps_forward=32)

print("\n   t      x        u_1       u_5       u_10")
for k in range(0, 33, 8):
    t = traj.times[k]
    print(f"{t:5.3f}  {traj.states[k][0]:7.4f}  "
          f"{traj.controls[0][k][0]:+.5f}  {traj.controls[4][k][0]:+.5f}  "
          f"{traj.controls[9][k][0]:+.5f}")

print(f"\npollutant excess decays from {traj.states[0][0]:.1f} "
      f"to {traj.terminal_state[0]:.4f}")
print("terminal controls (all should vanish):",
      np.max([abs(u[-1][0]) for u in traj.controls]))
print(f"terminal gain defect: {traj.terminal_gain_defect:.2e}")
print(f"stage evaluations used: {traj.evaluations}")
