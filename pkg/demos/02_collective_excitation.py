"""Several short records can excite what none of them excites alone.

Excitation of order k needs a depth-k Hankel matrix with full row rank,
which already requires k(m+1) - 1 samples from a single input record.
Short records individually fail — but their mosaic (the side-by-side
Hankel blocks) can still reach full rank, and that collective notion is
exactly what the data-driven results need.  The minimum total length is
counted by pe_length_bound.
"""
import numpy as np

import ddlti as dd

rng = np.random.default_rng(3)
m = 1          # input channels
k = 5          # excitation order to test
q = 3          # number of records

# --- 1. the counting bound --------------------------------------------------
single = dd.pe_length_bound(k, m)
multi = dd.pe_length_bound(k, m, q)
print(f"one record must have at least {single} samples to be exciting "
      f"of order {k}")
print(f"{q} records need only {multi} samples in total "
      f"({multi - q * (k - 1)} mosaic columns = k*m rows)")

# --- 2. three short records, none exciting alone ----------------------------
lengths = [k] * q
for i in range(multi - q * k):
    lengths[i % q] += 1
print(f"record lengths: {lengths} (total {sum(lengths)}, the minimum)")

records = [rng.standard_normal((T, m)) for T in lengths]
for i, u in enumerate(records):
    rep = dd.excitation_report(u, k)
    print(f"  record {i}: length {lengths[i]}, depth-{k} rank "
          f"{rep.rank}/{rep.required_rank} -> exciting: {rep.exciting}")

rep = dd.excitation_report(records, k)
print(f"mosaic of all {q}: rank {rep.rank}/{rep.required_rank} "
      f"-> collectively exciting: {rep.exciting}")

# --- 3. what that buys: the rank condition on real experiments --------------
# With collectively exciting inputs of order n + L, windows of q state
# trajectories stack to a full-row-rank matrix -- the multi-experiment
# form of the fundamental lemma.
plant = dd.LtiSystem(A=[[0.9, 0.3], [0.0, 0.7]], B=[[0.0], [1.0]],
                     C=[[1.0, 0.0]], D=[[0.0]])
n, L = 2, 3
need = dd.pe_length_bound(n + L, m, q)
lengths = [n + L] * q
for i in range(need - q * (n + L)):
    lengths[i % q] += 1
while True:
    inputs = [rng.standard_normal((T, m)) for T in lengths]
    if dd.is_persistently_exciting(inputs, n + L):
        break
trajs = [dd.simulate(plant, rng.standard_normal(n), u) for u in inputs]
full = dd.check_rank_condition(plant, [t.x for t in trajs], inputs, L)
print(f"{q} experiments of lengths {lengths}: stacked state/input windows "
      f"have full row rank n + m*L = {n + m * L}: {full}")

# --- 4. one sample fewer and the counting forbids it -------------------------
short = [rng.standard_normal((T, m)) for T in (k, k, multi - 2 * k - 1)]
rep = dd.excitation_report(short, k)
print(f"total {sum(len(s) for s in short)} samples (one below the bound): "
      f"rank {rep.rank}/{rep.required_rank}, exciting: {rep.exciting}")
