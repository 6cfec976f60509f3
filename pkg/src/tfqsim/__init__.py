"""Simulation of deterministic single- and two-qudit photonic gates encoded in
the time and frequency bins of a single photon.

The package has three layers:

- algebra (``states``, ``gates``): exact qudit states and ideal gate matrices;
- optics (``photonics``, ``circuits``): component-level linear-optics
  simulation of the switch/delay/filter circuits that realize those gates;
- statistics (``channels``, ``counting``, ``experiments``): depolarizing-noise
  process matrices, photon-counting simulation, Bayesian fidelity estimation,
  and the config-driven experiment runner behind the ``tfqsim`` CLI.
"""

from .states import (
    DensityMatrix,
    GateMatrix,
    PureState,
    QuditDims,
    apply,
    basis_state,
    overlap_probability,
    pure_state,
    tensor,
)
from .gates import (
    WeylIndex,
    cinc,
    generalized_x,
    generalized_z,
    identity,
    sum_gate,
    swap_gate,
    weyl,
    weyl_operators,
    xor_gate,
)
from .photonics import (
    Cfbg,
    Coupler2x2,
    DelayInterferometer,
    DwdmCombine,
    DwdmSplit,
    FiberDelay,
    FieldState,
    IntensityModulator,
    ModeKey,
    MzmSwitch,
    PhaseModulator,
    PhaseShifter,
    PhysicalGrid,
    PulseShaper,
    apply_component,
    cfbg_bin_delay_ns,
    pulse_spread_ns,
    single_mode_field,
)
from .circuits import (
    AllLightLostError,
    Circuit,
    build_cinc_circuit,
    build_sum_circuit,
    build_x_gate_circuit,
    load_circuit,
    prep_basis_field,
    run_circuit,
    save_circuit,
    transfer_matrix,
)
from .channels import (
    DepolarizingModel,
    ProcessMatrix,
    apply_process,
    chi_depolarizing,
    chi_x,
    depolarize,
    lambda_from_visibility,
    process_fidelity,
    process_fidelity_from_visibility,
)
from .counting import (
    CountTable,
    Posterior,
    bme_probability,
    computational_fidelity,
    fringe_expected,
    sample_counts,
    subtract_accidentals,
    visibility,
)
from .experiments import (
    ExperimentConfig,
    REFERENCE_VALUES,
    default_config,
    report_summary,
    run_experiment,
)

__version__ = "0.1.0"
