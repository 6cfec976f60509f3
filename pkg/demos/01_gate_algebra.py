"""Tour of the ideal gate algebra: generalized Pauli operators, the Weyl
basis, and the two-qudit CINC / SUM / XOR / SWAP matrices.

Run:  python demos/01_gate_algebra.py
"""

import numpy as np

from tfqsim import (
    QuditDims,
    basis_state,
    apply,
    cinc,
    generalized_x,
    generalized_z,
    sum_gate,
    swap_gate,
    tensor,
    weyl,
    weyl_operators,
    xor_gate,
)
from tfqsim.states import save_complex_matrix_csv

np.set_printoptions(precision=3, suppress=True, linewidth=120)

# --- single-qudit shift and phase gates -------------------------------------
# X cycles the basis (|n> -> |n+1 mod d|), Z marks each level with a phase.

X3 = generalized_x(3)
Z3 = generalized_z(3)
print("X (d=3):\n", X3.entries.real)
print("Z (d=3) diagonal:", np.round(np.diag(Z3.entries), 3))
print("X^3 = I:", np.allclose(np.linalg.matrix_power(X3.entries, 3), np.eye(3)))

# Together they generate the d^2 Weyl operators Z^a X^b, an operator basis.
print("\nall nine 3x3 Weyl operators are unitary:",
      all(np.allclose(u.entries.conj().T @ u.entries, np.eye(3))
          for u in weyl_operators(3)))
print("commutation ZX = omega XZ holds:",
      np.allclose(Z3.entries @ X3.entries,
                  np.exp(2j * np.pi / 3) * X3.entries @ Z3.entries))

# --- two-qudit gates ---------------------------------------------------------
# The frequency qudit is the control (first factor), time is the target.

dims = QuditDims(3, 3)
CINC = cinc(dims)          # shift the time qudit only when frequency = |2>
SUM = sum_gate(dims)       # add the frequency value to the time value, mod 3

print("\nCINC pattern (1 = blue square):\n", CINC.entries.real.astype(int))
print("SUM pattern:\n", SUM.entries.real.astype(int))

s = basis_state(1, 2, dims)
print("SUM sends |1>_f |2>_t to index", np.argmax(np.abs(apply(SUM, s).amplitudes)),
      "= |1>_f |0>_t (flat index 1*3+0)")

# XOR subtracts instead of adding; it is exactly the inverse of SUM.
XOR = xor_gate(dims)
print("XOR . SUM = identity:", np.allclose(XOR.entries @ SUM.entries, np.eye(9)))

# SWAP exchanges the two qudits.
SWAP = swap_gate(dims)
print("SWAP^2 = identity:", np.allclose(SWAP.entries @ SWAP.entries, np.eye(9)))

# Single-qudit gates embed into the two-qudit space with the tensor helper.
print("tensor(X, I) moves the frequency index:",
      np.argmax(np.abs(apply(tensor(X3, generalized_z(3)), basis_state(0, 0, dims)).amplitudes)))

# --- serialization -----------------------------------------------------------
save_complex_matrix_csv("sum_gate_3x3.csv", SUM.entries)
print("\nwrote sum_gate_3x3.csv (one row per matrix row, entries as re+imj)")
print("spot check U_4 = ZX:\n", np.round(weyl(1, 1, 3).entries, 3))
