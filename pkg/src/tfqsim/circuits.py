"""Circuit assembly for the time-bin and two-qudit gates, and transfer matrices.

The gate circuits re-reference the output time frame: a circuit's
frame_offset_bins is subtracted from absolute time indices at detection, so
computational slot n corresponds to absolute time bin n + offset. Light landing
outside the computational window is excluded by post-selection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import yaml

from .photonics import (
    Cfbg,
    Component,
    COMPONENT_KINDS,
    Coupler2x2,
    DelayInterferometer,
    DwdmCombine,
    DwdmSplit,
    FieldState,
    FiberDelay,
    JITTER_SENSITIVE,
    ModeKey,
    MzmSwitch,
    PhaseShifter,
    PhysicalGrid,
    cfbg_bin_delay_ns,
    single_mode_field,
)
from .states import QuditDims, format_complex


class AllLightLostError(RuntimeError):
    """Raised when post-selection keeps zero probability for some input."""


@dataclass(frozen=True)
class Circuit:
    """Ordered component list with the detection bookkeeping attached."""

    components: tuple[Component, ...]
    dims: QuditDims
    grid: PhysicalGrid
    input_path: int = 0
    post_select_path: int = 0
    frame_offset_bins: int = 0

    def extended(self, extra: list[Component], post_select_path: int | None = None) -> "Circuit":
        """New circuit with components appended after this one's."""
        return Circuit(
            components=self.components + tuple(extra),
            dims=self.dims,
            grid=self.grid,
            input_path=self.input_path,
            post_select_path=self.post_select_path if post_select_path is None
            else post_select_path,
            frame_offset_bins=self.frame_offset_bins,
        )


def run_circuit(circuit: Circuit, state: FieldState, rng=None,
                sigma_phase: float = 0.0) -> FieldState:
    """Propagate a field through the circuit.

    With sigma_phase > 0 each interferometric component picks up one Gaussian
    phase-drift sample per run, drawn from the supplied random stream.
    """
    if sigma_phase > 0 and rng is None:
        raise ValueError("phase jitter requires an explicit random stream")
    for comp in circuit.components:
        noise = 0.0
        if sigma_phase > 0 and isinstance(comp, JITTER_SENSITIVE):
            noise = float(rng.normal(0.0, sigma_phase))
        state = comp.apply(state, circuit.grid, phase_noise=noise)
    return state


def computational_probabilities(circuit: Circuit, out_state: FieldState) -> np.ndarray:
    """Probabilities over the N computational modes on the post-selected path.

    Not renormalized; the vector sums to the post-selected in-window power.
    """
    dims = circuit.dims
    probs = np.zeros(dims.total)
    for key, a in out_state.amplitudes.items():
        if key.path != circuit.post_select_path:
            continue
        slot = key.t - circuit.frame_offset_bins
        if 0 <= slot < dims.d_t:
            probs[dims.flat_index(key.f, slot)] += abs(a) ** 2
    return probs


def transfer_matrix(circuit: Circuit, input_states: list[FieldState] | None = None,
                    rng=None, sigma_phase: float = 0.0) -> np.ndarray:
    """Output-probability matrix over the computational space.

    Column j is the output distribution for basis input j (or for the j-th
    supplied input state), renormalized over the post-selected computational
    window.
    """
    dims = circuit.dims
    if input_states is None:
        input_states = [
            single_mode_field(dims, circuit.input_path, *dims.unflatten(j))
            for j in range(dims.total)
        ]
    mat = np.zeros((dims.total, len(input_states)))
    for j, state in enumerate(input_states):
        out = run_circuit(circuit, state, rng=rng, sigma_phase=sigma_phase)
        probs = computational_probabilities(circuit, out)
        total = probs.sum()
        if total <= 0:
            raise AllLightLostError(f"no post-selected light for input {j}")
        mat[:, j] = probs / total
    return mat


def prep_basis_field(dims: QuditDims, m: int, n: int, path: int = 0,
                     time_extinction_db: float = np.inf,
                     freq_extinction_db: float = np.inf) -> FieldState:
    """Basis state |m>_f |n>_t as carved by real modulators.

    Finite extinction leaves normalized leakage amplitude in every blocked
    time and frequency bin, as when the state is carved from a uniform
    comb/train by an intensity modulator and a pulse shaper.
    """
    dims.flat_index(m, n)  # range check
    eps_t = 10.0 ** (-time_extinction_db / 20.0) if np.isfinite(time_extinction_db) else 0.0
    eps_f = 10.0 ** (-freq_extinction_db / 20.0) if np.isfinite(freq_extinction_db) else 0.0
    amps = {}
    for f in range(dims.d_f):
        for t in range(dims.d_t):
            a = (1.0 if f == m else eps_f) * (1.0 if t == n else eps_t)
            if a:
                amps[ModeKey(path, f, t)] = a
    norm = np.sqrt(sum(abs(a) ** 2 for a in amps.values()))
    return FieldState(dims, {k: a / norm for k, a in amps.items()})


def prep_phase_ramp_field(dims: QuditDims, phi: float, path: int = 0) -> FieldState:
    """Superposition over time bins with phases 0, phi, 2*phi, ... at f = 0."""
    d = dims.d_t
    return FieldState(dims, {
        ModeKey(path, 0, n): np.exp(1j * n * phi) / np.sqrt(d) for n in range(d)
    })


def _time_bin_x_stage(input_path: int, arm_paths: tuple[int, int],
                      out_paths: tuple[int, int], computational_bins: frozenset[int],
                      wrap_bins: frozenset[int], fold_delay: int,
                      mzm_extinction_db: float) -> list[Component]:
    """Switch-delay-recombine stage mapping bin t to t + fold_delay except for
    wrap bins, which pass straight through; the later frame re-reference turns
    this into a cyclic shift."""
    port_for_bin = {t: 0 for t in computational_bins}
    port_for_bin.update({t: 1 for t in wrap_bins})
    return [
        MzmSwitch(input_path=input_path, outputs=arm_paths, port_for_bin=port_for_bin,
                  extinction_db=mzm_extinction_db),
        FiberDelay(path=arm_paths[0], bins=fold_delay),
        # cancels the coupler's cross-arm quadrature so the kept port adds in phase
        PhaseShifter(path=arm_paths[1], phase=-np.pi / 2),
        Coupler2x2(inputs=arm_paths, outputs=out_paths),
    ]


def build_x_gate_circuit(grid: PhysicalGrid, dims: QuditDims | None = None,
                         mzm_extinction_db: float = np.inf) -> Circuit:
    """Time-bin cyclic-shift gate |n>_t -> |n+1 mod 3>_t.

    Bins {0, 1} take the 3-bin delayed arm and bin {2} the direct arm; the
    output frame starts 2 bins late, so every bin lands one slot higher. The
    2x2 recombiner costs half the light on the kept port.
    """
    if dims is None:
        dims = QuditDims(1, 3)
    if dims.d_t != 3:
        raise ValueError(f"this switch pattern implements the 3-bin shift, got d_t={dims.d_t}")
    stage = _time_bin_x_stage(
        input_path=0, arm_paths=(1, 2), out_paths=(3, 4),
        computational_bins=frozenset({0, 1}), wrap_bins=frozenset({2}),
        fold_delay=3, mzm_extinction_db=mzm_extinction_db,
    )
    return Circuit(components=tuple(stage), dims=dims, grid=grid,
                   input_path=0, post_select_path=3, frame_offset_bins=2)


def build_analysis_cascade(path: int) -> list[Component]:
    """1-bin and 2-bin delay interferometers used to overlap all three bins.

    With the gate's frame offset already accounted for, the three output bins
    overlap in slot 3 of the cascade output.
    """
    return [
        DelayInterferometer(path=path, delay_bins=1),
        DelayInterferometer(path=path, delay_bins=2),
    ]


#: slot (after frame re-reference) where the cascade overlaps bins 0, 1, 2
CASCADE_OVERLAP_SLOT = 3


def build_cinc_circuit(grid: PhysicalGrid, dims: QuditDims | None = None,
                       mzm_extinction_db: float = np.inf,
                       dwdm_extinction_db: float = np.inf) -> Circuit:
    """Controlled increment: the top frequency bin is routed through a time-bin
    X gate while the other bins travel a matched-delay bypass.

    The bypass delay (2 bins) equals the X branch's net frame shift, so the
    bands recombine with zero relative delay.
    """
    if dims is None:
        dims = QuditDims(3, 3)
    if dims.d_f != 3 or dims.d_t != 3:
        raise ValueError(f"the demonstrated filter plan is 3x3, got {dims}")
    control = dims.d_f - 1
    pass_band = frozenset(range(dims.d_f)) - {control}
    components: list[Component] = [
        DwdmSplit(input_path=0, routes={1: frozenset({control}), 2: pass_band},
                  extinction_db=dwdm_extinction_db),
    ]
    components += _time_bin_x_stage(
        input_path=1, arm_paths=(3, 4), out_paths=(5, 6),
        computational_bins=frozenset({0, 1}), wrap_bins=frozenset({2}),
        fold_delay=3, mzm_extinction_db=mzm_extinction_db,
    )
    components += [
        FiberDelay(path=2, bins=2),
        DwdmCombine(ports={5: frozenset({control}), 2: pass_band}, output_path=7,
                    extinction_db=dwdm_extinction_db),
    ]
    return Circuit(components=tuple(components), dims=dims, grid=grid,
                   input_path=0, post_select_path=7, frame_offset_bins=2)


def build_sum_circuit(grid: PhysicalGrid, d: int,
                      dispersion_ns_per_nm: float = -2.0,
                      mzm_extinction_db: float = np.inf,
                      mismatch_tolerance: float = 0.1) -> Circuit:
    """SUM gate: dispersive delay shifts the time bins by the frequency index,
    then the bins pushed past the computational window are folded back.

    The grating delay is linear, not cyclic, so frequency bin m moves time bin
    n to n + m, reaching up to 2d - 2. The fold stage switches out bins >= d
    and delays the in-window bins by d, and the output frame starts d bins
    late, completing addition modulo d.
    """
    if d < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {d}")
    dims = QuditDims(d, d)
    step_ns = cfbg_bin_delay_ns(grid, dispersion_ns_per_nm)
    for m in range(d):
        delay_ns = m * step_ns
        bins = round(delay_ns / grid.bin_spacing_ns)
        if bins != m:
            raise ValueError(
                f"dispersion {dispersion_ns_per_nm} ns/nm gives {delay_ns:.3f} ns for "
                f"frequency bin {m}, which is not {m} time bins of {grid.bin_spacing_ns} ns"
            )
        if abs(delay_ns - bins * grid.bin_spacing_ns) > mismatch_tolerance * grid.bin_spacing_ns:
            raise ValueError(
                f"dispersive delay for frequency bin {m} misses the time grid by "
                f"{abs(delay_ns - bins * grid.bin_spacing_ns):.3f} ns "
                f"(tolerance {mismatch_tolerance:.0%} of {grid.bin_spacing_ns} ns)"
            )
    components: list[Component] = [
        Cfbg(dispersion_ns_per_nm=dispersion_ns_per_nm, mismatch_tolerance=mismatch_tolerance),
    ]
    components += _time_bin_x_stage(
        input_path=0, arm_paths=(1, 2), out_paths=(3, 4),
        computational_bins=frozenset(range(d)), wrap_bins=frozenset(range(d, 2 * d - 1)),
        fold_delay=d, mzm_extinction_db=mzm_extinction_db,
    )
    return Circuit(components=tuple(components), dims=dims, grid=grid,
                   input_path=0, post_select_path=3, frame_offset_bins=d)


# ---------------------------------------------------------------------------
# circuit description files
# ---------------------------------------------------------------------------

def _value_to_plain(value):
    if isinstance(value, frozenset):
        return sorted(value)
    if isinstance(value, tuple):
        return list(value)
    if isinstance(value, dict):
        return {k: _value_to_plain(v) for k, v in sorted(value.items())}
    if isinstance(value, complex):
        return format_complex(value)
    if isinstance(value, float) and np.isinf(value):
        return float("inf")
    return value


_FROZENSET_FIELDS = {"transmit", "routes", "ports"}
_TUPLE_FIELDS = {"outputs", "inputs"}


def _component_to_dict(comp: Component) -> dict:
    entry = {"type": comp.kind}
    for name, value in vars(comp).items():
        if name in _FROZENSET_FIELDS and isinstance(value, dict):
            entry[name] = {k: sorted(v) for k, v in sorted(value.items())}
        else:
            entry[name] = _value_to_plain(value)
    return entry


def _component_from_dict(entry: dict) -> Component:
    entry = dict(entry)
    kind = entry.pop("type")
    if kind not in COMPONENT_KINDS:
        raise ValueError(f"unknown component type {kind!r}")
    cls = COMPONENT_KINDS[kind]
    kwargs = {}
    for name, value in entry.items():
        if name in _TUPLE_FIELDS:
            value = tuple(value)
        elif name == "transmit":
            value = frozenset(value)
        elif name in ("routes", "ports"):
            value = {int(k): frozenset(v) for k, v in value.items()}
        elif name == "mask":
            value = {int(k): complex(v) for k, v in value.items()}
        elif name == "phases":
            value = {int(k): float(v) for k, v in value.items()}
        elif name == "port_for_bin":
            value = {int(k): int(v) for k, v in value.items()}
        kwargs[name] = value
    return cls(**kwargs)


def circuit_to_dict(circuit: Circuit) -> dict:
    return {
        "dims": {"d_f": circuit.dims.d_f, "d_t": circuit.dims.d_t},
        "grid": {
            "bin_spacing_ns": circuit.grid.bin_spacing_ns,
            "bin_width_ns": circuit.grid.bin_width_ns,
            "freq_spacing_ghz": circuit.grid.freq_spacing_ghz,
            "freq_linewidth_ghz": circuit.grid.freq_linewidth_ghz,
            "center_wavelength_nm": circuit.grid.center_wavelength_nm,
        },
        "input_path": circuit.input_path,
        "post_select_path": circuit.post_select_path,
        "frame_offset_bins": circuit.frame_offset_bins,
        "components": [_component_to_dict(c) for c in circuit.components],
    }


def circuit_from_dict(data: dict) -> Circuit:
    return Circuit(
        components=tuple(_component_from_dict(e) for e in data["components"]),
        dims=QuditDims(**data["dims"]),
        grid=PhysicalGrid(**data["grid"]),
        input_path=data.get("input_path", 0),
        post_select_path=data.get("post_select_path", 0),
        frame_offset_bins=data.get("frame_offset_bins", 0),
    )


def serialize_circuit(circuit: Circuit) -> str:
    return yaml.safe_dump(circuit_to_dict(circuit), sort_keys=True, default_flow_style=False)


def save_circuit(circuit: Circuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_circuit(circuit))


def load_circuit(path) -> Circuit:
    with open(path) as fh:
        data = yaml.safe_load(fh)
    return circuit_from_dict(data)
