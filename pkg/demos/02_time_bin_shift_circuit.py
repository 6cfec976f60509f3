"""Component-level walk through the time-bin cyclic-shift gate.

A 1x2 switch separates bins {0, 1} from bin {2}; the first group takes a
3-bin fiber delay, a 2x2 coupler recombines the arms, and the detection
frame starts 2 bins late. Every bin therefore lands one slot higher,
wrapping the last bin to slot 0.

Run:  python demos/02_time_bin_shift_circuit.py
"""

import numpy as np

from tfqsim import (
    PhysicalGrid,
    build_x_gate_circuit,
    run_circuit,
    single_mode_field,
    transfer_matrix,
)
from tfqsim.circuits import (
    build_analysis_cascade,
    CASCADE_OVERLAP_SLOT,
    computational_probabilities,
    prep_phase_ramp_field,
)

np.set_printoptions(precision=4, suppress=True)

# 3 ns bins on a 6 ns grid; 380 GHz between frequency modes
grid = PhysicalGrid(bin_spacing_ns=6.0, bin_width_ns=3.0, freq_spacing_ghz=380.0,
                    freq_linewidth_ghz=0.25, center_wavelength_nm=1553.9)
circuit = build_x_gate_circuit(grid)
print("components:", [type(c).__name__ for c in circuit.components])
print("output frame starts", circuit.frame_offset_bins, "bins after the input frame")

# --- follow one photon -------------------------------------------------------
for n in range(3):
    out = run_circuit(circuit, single_mode_field(circuit.dims, 0, 0, n))
    probs = computational_probabilities(circuit, out)
    print(f"|{n}>_t  ->  slot {probs.argmax()}   "
          f"(kept probability {probs.sum():.3f}; the 2x2 recombiner costs 3 dB)")

# --- the full transfer matrix ------------------------------------------------
print("\ntransfer matrix (renormalized over the kept port):")
print(transfer_matrix(circuit))

# --- phase coherence ---------------------------------------------------------
# Feed the superposition |0> + e^{i phi}|1> + e^{2i phi}|2> through the gate,
# then overlap all three bins with 1-bin and 2-bin delay interferometers.
# The overlap slot interferes the three amplitudes: a three-slit fringe.
full = circuit.extended(build_analysis_cascade(circuit.post_select_path))
t_overlap = CASCADE_OVERLAP_SLOT + full.frame_offset_bins

print("\nphi/pi   P(overlap slot)   |1 + e^{i phi} + e^{2 i phi}|^2 / 9")
for phi in np.linspace(0, 2 * np.pi, 9):
    out = run_circuit(full, prep_phase_ramp_field(full.dims, phi))
    p = sum(abs(a) ** 2 for k, a in out.amplitudes.items()
            if k.path == full.post_select_path and k.t == t_overlap)
    ideal = abs(1 + np.exp(1j * phi) + np.exp(2j * phi)) ** 2 / 9
    print(f"{phi / np.pi:5.2f}    {p:12.5f}      {ideal:12.5f}  (ratio 3/32)")

print("\nthe fringe peaks at phi = 0 and vanishes at phi = +-2pi/3,")
print("so the circuit preserves the relative phases of the time bins.")
