"""Export the data-driven LQR program for an external SDP solver.

The LQR solution is the trace-maximizing P among those satisfying a
matrix inequality written directly in the experiment data.  This library
solves that problem through a Riccati route, but the semidefinite program
itself can be handed to any SDPA-format solver (sdpa, csdp, mosek, ...)
as an independent cross-check.  This script writes the file, explains its
layout, and verifies the encoded blocks against the library's own LMI
operator.
"""
import tempfile
from pathlib import Path

import numpy as np

import ddlti as dd

rng = np.random.default_rng(1)
reactor = dd.batch_reactor()
exps = dd.generate_experiments(reactor, 5, 6, pe_order=5, rng=rng)
batch = dd.assemble_batch(exps)
weights = dd.LqrWeights(Q=np.eye(4), R=np.eye(2))

# --- 1. write the program ------------------------------------------------------
out = Path(tempfile.gettempdir()) / "reactor_lqr.dat-s"
text = dd.export_sdp(batch, weights, destination=out)
print(f"wrote {out} ({len(text.splitlines())} lines)")

# --- 2. the layout --------------------------------------------------------------
n, N = batch.n, batch.n_columns
print(f"variables: the {n * (n + 1) // 2} upper-triangle entries of P "
      f"(row-major)")
print(f"objective: SDPA minimizes, so the diagonal entries carry -1 "
      f"(maximize trace P)")
print(f"block 1 (size {n}): P itself, constrained positive semidefinite")
print(f"block 2 (size {N}): the negated data-side operator -L(P), "
      f"constrained positive semidefinite, i.e. L(P) <= 0")
for line in text.splitlines()[:5]:
    print("   | " + line)

# --- 3. verify the encoding against the library's operator ----------------------
entries = {}
for line in text.splitlines():
    if line.startswith('"'):
        continue
    parts = line.split()
    if len(parts) == 5:
        k, b, i, j, v = (int(parts[0]), int(parts[1]), int(parts[2]) - 1,
                         int(parts[3]) - 1, float(parts[4]))
        M = entries.setdefault((k, b), np.zeros((n if b == 1 else N,) * 2))
        M[i, j] = M[j, i] = v

S = rng.standard_normal((n, n))
P = S + S.T  # any symmetric P
pairs = [(i, j) for i in range(n) for j in range(i, n)]
x = np.array([P[i, j] for i, j in pairs])

block2 = sum(x[k] * entries[(k + 1, 2)] for k in range(len(pairs)))
block2 = block2 - entries[(0, 2)]
err = np.max(np.abs(block2 - (-dd.lmi_operator(P, batch, weights))))
print(f"reconstructed block 2 matches -L(P) to {err:.2e}")
print("feed the file to an SDPA-compatible solver to cross-check the gain;")
print("the same export is available as `ddlti export-sdp`")
