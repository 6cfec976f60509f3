"""The two-qudit circuits: frequency-routed CINC and dispersion-based SUM.

CINC: a wavelength filter sends the top frequency bin through the time-bin
shift gate while the other bins take a matched-delay bypass.

SUM: a chirped grating delays each frequency bin by its index, pushing some
time bins past the computational window; a switch-and-delay fold stage brings
them back, completing addition modulo d.

Run:  python demos/03_two_qudit_circuits.py
"""

import numpy as np

from tfqsim import (
    PhysicalGrid,
    QuditDims,
    build_cinc_circuit,
    build_sum_circuit,
    cinc,
    run_circuit,
    single_mode_field,
    sum_gate,
    transfer_matrix,
)
from tfqsim.circuits import Circuit, computational_probabilities

np.set_printoptions(precision=3, suppress=True, linewidth=150)

grid = PhysicalGrid(6.0, 3.0, 380.0, 0.25, 1553.9)
dims = QuditDims(3, 3)

# --- CINC ---------------------------------------------------------------------
circuit = build_cinc_circuit(grid)
mat = transfer_matrix(circuit)
print("CINC circuit matches the ideal matrix:",
      np.max(np.abs(mat - np.abs(cinc(dims).entries) ** 2)) < 1e-12)
for (m, n) in ((2, 0), (1, 0)):
    out = run_circuit(circuit, single_mode_field(dims, 0, m, n))
    flat = computational_probabilities(circuit, out).argmax()
    print(f"|{m}>_f |{n}>_t -> |{flat // 3}>_f |{flat % 3}>_t")

# --- SUM: watch the dispersion push bins out of the window --------------------
sum_circuit = build_sum_circuit(grid, 3)
cfbg_only = Circuit(components=sum_circuit.components[:1], dims=dims, grid=grid)
out = run_circuit(cfbg_only, single_mode_field(dims, 0, 2, 2))
(key,) = out.amplitudes
print(f"\nafter the grating alone, |2>_f |2>_t sits at absolute time bin {key.t}"
      " (outside the 3-bin window)")

out = run_circuit(sum_circuit, single_mode_field(dims, 0, 2, 2))
flat = computational_probabilities(sum_circuit, out).argmax()
print(f"after the fold stage it lands at |{flat // 3}>_f |{flat % 3}>_t  "
      "(2 + 2 mod 3 = 1)")

print("SUM circuit matches the ideal matrix:",
      np.max(np.abs(transfer_matrix(sum_circuit) - np.abs(sum_gate(dims).entries) ** 2)) < 1e-12)

# --- the 256-dimensional version ----------------------------------------------
# 1.2 ns bins, sixteen 75 GHz-spaced frequency bins: the same structure scales
# to a 16x16 two-qudit space = eight qubits in one photon.
grid16 = PhysicalGrid(1.2, 0.2, 75.0, 22.0, 1546.0)
big = build_sum_circuit(grid16, 16)
mat16 = transfer_matrix(big)
ideal16 = np.abs(sum_gate(QuditDims(16, 16)).entries) ** 2
print("\n16-level SUM matches over all 256 basis inputs:",
      np.max(np.abs(mat16 - ideal16)) < 1e-12)
block = mat16[5 * 16:6 * 16, 5 * 16:6 * 16]
print("frequency block 5 is a cyclic shift by 5:",
      np.array_equal(block, np.roll(np.eye(16), 5, axis=0)))
