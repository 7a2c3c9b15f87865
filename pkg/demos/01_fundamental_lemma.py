"""One recorded trajectory parameterizes every other trajectory.

A single sufficiently exciting input/output record of a controllable LTI
system spans all of its length-L behavior: any window a model-based
simulator could produce is a linear combination of the record's sliding
windows, and any linear combination of those windows is itself a genuine
trajectory.  This script demonstrates both directions numerically, with no
state-space model anywhere in the loop after data collection.
"""
import numpy as np

import ddlti as dd

rng = np.random.default_rng(7)

# The "plant": second order, one input, one output.  Only the data
# collection step below is allowed to touch it.
plant = dd.LtiSystem(A=[[0.8, 0.5], [-0.4, 0.6]],
                     B=[[1.0], [0.5]],
                     C=[[1.0, 0.0]],
                     D=[[0.2]])
n, L = 2, 4

# --- 1. collect one record, rich enough for depth-L windows ---------------
# The input must be persistently exciting of order n + L; the shortest
# record that can achieve this has pe_length_bound(n + L, m) samples.
T = dd.pe_length_bound(n + L, plant.m) + 8
u_rec = rng.standard_normal((T, plant.m))
assert dd.is_persistently_exciting(u_rec, n + L)
record = dd.simulate(plant, rng.standard_normal(n), u_rec)
print(f"recorded one trajectory of length {T} "
      f"(exciting of order {n + L} = n + L)")

# --- 2. the dictionary: stacked input/output sliding windows ---------------
d = dd.build_data_matrix([(record.u, record.y)], L)
print(f"dictionary matrix: {d.matrix.shape[0]} rows "
      f"((m + p) * L) x {d.n_columns} columns (windows)")

# --- 3. fresh model trajectories are members of the column span -----------
for trial in range(3):
    fresh = dd.simulate(plant, rng.standard_normal(n),
                        rng.standard_normal((L, plant.m)))
    res = dd.is_system_trajectory(d, fresh.u, fresh.y)
    print(f"  simulated window {trial}: member={res.member} "
          f"(residual {res.residual:.2e})")

# --- 4. and combinations of columns are themselves trajectories -----------
g = rng.standard_normal(d.n_columns)
u_new, y_new = dd.synthesize_trajectory(d, g)
# oracle: some initial state must explain (u_new, y_new) exactly
O_L, T_L = dd.response_maps(plant, L)
x0, *_ = np.linalg.lstsq(O_L, y_new - T_L @ u_new, rcond=None)
fit = np.linalg.norm(O_L @ x0 + T_L @ u_new - y_new)
print(f"synthesized a new trajectory from random coefficients; "
      f"best-initial-state misfit {fit:.2e}")

# --- 5. a window that is NOT a trajectory is rejected ----------------------
res = dd.is_system_trajectory(d, np.zeros((L, 1)), np.ones((L, 1)))
print(f"zero input with constant nonzero output: member={res.member} "
      f"(residual {res.residual:.2e})")
