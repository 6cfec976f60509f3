"""Component-level linear-optics simulation over (path, frequency-bin, time-bin) modes.

A single photon's field is a sparse map from optical modes to complex
amplitudes. Components are linear, norm-non-increasing maps on that field;
blocked or mis-routed light is attenuated by the component's extinction ratio
(field amplitude scales as 10^(-dB/20)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .states import QuditDims

SPEED_OF_LIGHT_M_S = 299792458.0

FOURIER_PRODUCT_FLOOR = 10.0


def extinction_amplitude(extinction_db: float) -> float:
    """Field-amplitude transmission of a blocked bin, 10^(-dB/20)."""
    if extinction_db < 0:
        raise ValueError(f"extinction ratio must be >= 0 dB, got {extinction_db}")
    if np.isinf(extinction_db):
        return 0.0
    return 10.0 ** (-extinction_db / 20.0)


@dataclass(frozen=True)
class PhysicalGrid:
    """Time/frequency encoding grid of the experiment."""

    bin_spacing_ns: float
    bin_width_ns: float
    freq_spacing_ghz: float
    freq_linewidth_ghz: float
    center_wavelength_nm: float = 1553.9

    def __post_init__(self):
        if min(self.bin_spacing_ns, self.bin_width_ns, self.freq_spacing_ghz,
               self.freq_linewidth_ghz, self.center_wavelength_nm) <= 0:
            raise ValueError(f"grid parameters must be positive: {self}")
        if self.fourier_product < FOURIER_PRODUCT_FLOOR:
            warnings.warn(
                f"bin spacing product df*dt = {self.fourier_product:.2f} is close to the "
                "Fourier limit; time and frequency bins are not independently addressable",
                stacklevel=2,
            )

    @property
    def fourier_product(self) -> float:
        """df * dt, dimensionless; must far exceed 1 for separable encoding."""
        return self.freq_spacing_ghz * self.bin_spacing_ns


def dispersive_delay_ns(freq_offset_ghz: float, dispersion_ns_per_nm: float,
                        center_wavelength_nm: float) -> float:
    """Group delay |D| * dlambda for a spectral offset from the grid origin."""
    dlambda_nm = (
        (center_wavelength_nm * 1e-9) ** 2 * (freq_offset_ghz * 1e9) / SPEED_OF_LIGHT_M_S * 1e9
    )
    return abs(dispersion_ns_per_nm) * dlambda_nm


def cfbg_bin_delay_ns(grid: PhysicalGrid, dispersion_ns_per_nm: float) -> float:
    """Delay step between adjacent frequency bins under a dispersive grating."""
    return dispersive_delay_ns(grid.freq_spacing_ghz, dispersion_ns_per_nm,
                               grid.center_wavelength_nm)


def pulse_spread_ns(grid: PhysicalGrid, dispersion_ns_per_nm: float) -> float:
    """Temporal broadening of one bin due to its spectral width under dispersion."""
    return dispersive_delay_ns(grid.freq_linewidth_ghz, dispersion_ns_per_nm,
                               grid.center_wavelength_nm)


@dataclass(frozen=True)
class ModeKey:
    """One optical mode: spatial path, frequency bin, time bin.

    Time indices are absolute (pre-detection-frame) and may exceed d_t - 1
    while light is propagating through delay stages.
    """

    path: int
    f: int
    t: int


class FieldState:
    """Sparse single-photon field over (path, f, t) modes. Norm may be < 1 (loss)."""

    #: time indices are bounded by this multiple of d_t as a runaway-delay guard
    TIME_CAP_FACTOR = 4

    def __init__(self, dims: QuditDims, amplitudes: dict[ModeKey, complex]):
        self.dims = dims
        amps = {}
        t_cap = self.TIME_CAP_FACTOR * dims.d_t
        for key, a in amplitudes.items():
            if a == 0:
                continue
            if not (0 <= key.f < dims.d_f):
                raise ValueError(f"frequency bin {key.f} out of range [0, {dims.d_f})")
            if key.t < 0:
                raise ValueError(f"negative time bin in {key}")
            if key.t >= t_cap:
                raise ValueError(
                    f"time bin {key.t} exceeds tracking cap {t_cap}; runaway delay?"
                )
            amps[key] = complex(a)
        norm = sum(abs(a) ** 2 for a in amps.values())
        if norm > 1.0 + 1e-10:
            raise ValueError(f"field norm^2 = {norm!r} exceeds 1; components must be passive")
        self.amplitudes = amps

    def norm_squared(self) -> float:
        return sum(abs(a) ** 2 for a in self.amplitudes.values())

    def power_on_path(self, path: int) -> float:
        return sum(abs(a) ** 2 for k, a in self.amplitudes.items() if k.path == path)

    def scaled(self, factor: complex) -> "FieldState":
        return FieldState(self.dims, {k: factor * a for k, a in self.amplitudes.items()})

    @staticmethod
    def superpose(dims: QuditDims, *terms: tuple[complex, "FieldState"]) -> "FieldState":
        """Linear combination sum(c_i * s_i); the result must stay within unit norm."""
        amps: dict[ModeKey, complex] = {}
        for coeff, state in terms:
            for key, a in state.amplitudes.items():
                amps[key] = amps.get(key, 0.0) + coeff * a
        return FieldState(dims, amps)


def single_mode_field(dims: QuditDims, path: int, f: int, t: int) -> FieldState:
    return FieldState(dims, {ModeKey(path, f, t): 1.0})


class Component:
    """Base class: a linear, norm-non-increasing map on FieldState."""

    kind = "component"

    def apply(self, state: FieldState, grid: PhysicalGrid,
              phase_noise: float = 0.0) -> FieldState:
        raise NotImplementedError


@dataclass(frozen=True)
class IntensityModulator(Component):
    """Carves time bins: transmitted bins pass, blocked bins are attenuated."""

    transmit: frozenset[int]
    extinction_db: float = np.inf

    kind = "intensity_modulator"

    def apply(self, state, grid, phase_noise=0.0):
        eps = extinction_amplitude(self.extinction_db)
        out = {}
        for key, a in state.amplitudes.items():
            out[key] = a if key.t in self.transmit else a * eps
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class PhaseModulator(Component):
    """Applies a per-time-bin phase; bins absent from the table get zero phase."""

    phases: dict[int, float]

    kind = "phase_modulator"

    def apply(self, state, grid, phase_noise=0.0):
        out = {}
        for key, a in state.amplitudes.items():
            phi = self.phases.get(key.t, 0.0)
            out[key] = a * np.exp(1j * phi)
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class PulseShaper(Component):
    """Per-frequency-bin complex mask; bins outside the mask are attenuated."""

    mask: dict[int, complex]
    extinction_db: float = np.inf

    kind = "pulse_shaper"

    def apply(self, state, grid, phase_noise=0.0):
        eps = extinction_amplitude(self.extinction_db)
        out = {}
        for key, a in state.amplitudes.items():
            factor = self.mask.get(key.f, eps)
            out[key] = a * factor
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class MzmSwitch(Component):
    """1x2 time-bin switch: each time bin is routed to its drive-pattern port.

    The routed port keeps sqrt(1 - eps^2) of the field so the two-output device
    stays lossless; the opposite port receives the eps leakage.
    """

    input_path: int
    outputs: tuple[int, int]
    port_for_bin: dict[int, int]
    extinction_db: float = np.inf

    kind = "mzm_switch"

    def apply(self, state, grid, phase_noise=0.0):
        eps = extinction_amplitude(self.extinction_db)
        keep = np.sqrt(1.0 - eps * eps)
        out: dict[ModeKey, complex] = {}

        def add(key, a):
            out[key] = out.get(key, 0.0) + a

        for key, a in state.amplitudes.items():
            if key.path != self.input_path:
                add(key, a)
                continue
            if key.t not in self.port_for_bin:
                raise ValueError(f"switch drive pattern does not cover time bin {key.t}")
            port = self.port_for_bin[key.t]
            routed = ModeKey(self.outputs[port], key.f, key.t)
            other = ModeKey(self.outputs[1 - port], key.f, key.t)
            add(routed, a * keep)
            if eps:
                add(other, a * eps)
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class Coupler2x2(Component):
    """50/50 coupler, unitary (1/sqrt2)[[1, i], [i, 1]] on the two path amplitudes.

    phase_noise models residual interferometer drift as an extra phase on the
    second input arm.
    """

    inputs: tuple[int, int]
    outputs: tuple[int, int]

    kind = "coupler_2x2"

    def apply(self, state, grid, phase_noise=0.0):
        inv_sqrt2 = 1.0 / np.sqrt(2.0)
        jitter = np.exp(1j * phase_noise) if phase_noise else 1.0
        out: dict[ModeKey, complex] = {}

        def add(key, a):
            out[key] = out.get(key, 0.0) + a

        for key, a in state.amplitudes.items():
            if key.path == self.inputs[0]:
                add(ModeKey(self.outputs[0], key.f, key.t), a * inv_sqrt2)
                add(ModeKey(self.outputs[1], key.f, key.t), 1j * a * inv_sqrt2)
            elif key.path == self.inputs[1]:
                b = a * jitter
                add(ModeKey(self.outputs[0], key.f, key.t), 1j * b * inv_sqrt2)
                add(ModeKey(self.outputs[1], key.f, key.t), b * inv_sqrt2)
            else:
                add(key, a)
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class FiberDelay(Component):
    """Delays every mode on one path by an integer number of time bins."""

    path: int
    bins: int

    kind = "fiber_delay"

    def __post_init__(self):
        if self.bins < 0:
            raise ValueError(f"delay must be a non-negative bin count, got {self.bins}")

    def apply(self, state, grid, phase_noise=0.0):
        out = {}
        for key, a in state.amplitudes.items():
            if key.path == self.path:
                key = ModeKey(key.path, key.f, key.t + self.bins)
            out[key] = out.get(key, 0.0) + a
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class DwdmSplit(Component):
    """Routes frequency bins from one input to per-band output paths.

    Each bin's designated band port keeps nearly all the field; every other
    band port receives the out-of-band leakage eps.
    """

    input_path: int
    routes: dict[int, frozenset[int]]
    extinction_db: float = np.inf

    kind = "dwdm_split"

    def apply(self, state, grid, phase_noise=0.0):
        eps = extinction_amplitude(self.extinction_db)
        n_other = len(self.routes) - 1
        keep = np.sqrt(max(1.0 - n_other * eps * eps, 0.0))
        band_of = {f: p for p, fs in self.routes.items() for f in fs}
        out: dict[ModeKey, complex] = {}

        def add(key, a):
            out[key] = out.get(key, 0.0) + a

        for key, a in state.amplitudes.items():
            if key.path != self.input_path:
                add(key, a)
                continue
            if key.f not in band_of:
                raise ValueError(f"filter bands do not cover frequency bin {key.f}")
            for port in self.routes:
                factor = keep if port == band_of[key.f] else eps
                if factor:
                    add(ModeKey(port, key.f, key.t), a * factor)
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class DwdmCombine(Component):
    """Merges per-band input paths onto one output path.

    In-band light passes with sqrt(1 - eps^2); out-of-band light on a port
    leaks through at eps and the rest is dropped.
    """

    ports: dict[int, frozenset[int]]
    output_path: int
    extinction_db: float = np.inf

    kind = "dwdm_combine"

    def apply(self, state, grid, phase_noise=0.0):
        eps = extinction_amplitude(self.extinction_db)
        keep = np.sqrt(1.0 - eps * eps)
        out: dict[ModeKey, complex] = {}

        def add(key, a):
            out[key] = out.get(key, 0.0) + a

        for key, a in state.amplitudes.items():
            if key.path not in self.ports:
                add(key, a)
                continue
            factor = keep if key.f in self.ports[key.path] else eps
            if factor:
                add(ModeKey(self.output_path, key.f, key.t), a * factor)
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class Cfbg(Component):
    """Chirped grating: frequency bin f is delayed by f grid steps.

    The per-bin dispersive delay must land on the time grid within
    mismatch_tolerance (fraction of the bin spacing), else the encoding breaks.
    The bin-label orientation absorbs the dispersion sign, so bin f always
    receives +f steps of delay.
    """

    dispersion_ns_per_nm: float
    mismatch_tolerance: float = 0.1

    kind = "cfbg"

    def apply(self, state, grid, phase_noise=0.0):
        step_ns = cfbg_bin_delay_ns(grid, self.dispersion_ns_per_nm)
        out = {}
        for key, a in state.amplitudes.items():
            delay_ns = key.f * step_ns
            bins = int(round(delay_ns / grid.bin_spacing_ns))
            residual = abs(delay_ns - bins * grid.bin_spacing_ns)
            if residual > self.mismatch_tolerance * grid.bin_spacing_ns:
                raise ValueError(
                    f"dispersive delay {delay_ns:.3f} ns for frequency bin {key.f} is "
                    f"{residual:.3f} ns off the time grid (tolerance "
                    f"{self.mismatch_tolerance:.0%} of {grid.bin_spacing_ns} ns)"
                )
            key = ModeKey(key.path, key.f, key.t + bins)
            out[key] = out.get(key, 0.0) + a
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class PhaseShifter(Component):
    """Constant phase on every mode of one path."""

    path: int
    phase: float

    kind = "phase_shifter"

    def apply(self, state, grid, phase_noise=0.0):
        factor = np.exp(1j * self.phase)
        out = {}
        for key, a in state.amplitudes.items():
            out[key] = a * factor if key.path == self.path else a
        return FieldState(state.dims, out)


@dataclass(frozen=True)
class DelayInterferometer(Component):
    """Unbalanced interferometer on one path, kept output only.

    The field is split 50/50 into a direct arm and a k-bin delayed arm with an
    internal phase, then recombined; the kept port carries
    (a(t) + e^{i theta} a(t-k)) / 2, so each pass costs a factor 1/2.
    """

    path: int
    delay_bins: int
    internal_phase: float = 0.0

    kind = "delay_interferometer"

    def __post_init__(self):
        if self.delay_bins < 1:
            raise ValueError(f"delay must be >= 1 bin, got {self.delay_bins}")

    def apply(self, state, grid, phase_noise=0.0):
        arm = 0.5 * np.exp(1j * (self.internal_phase + phase_noise))
        out: dict[ModeKey, complex] = {}

        def add(key, a):
            out[key] = out.get(key, 0.0) + a

        for key, a in state.amplitudes.items():
            if key.path != self.path:
                add(key, a)
                continue
            add(key, 0.5 * a)
            add(ModeKey(key.path, key.f, key.t + self.delay_bins), arm * a)
        return FieldState(state.dims, out)


#: component classes keyed by their serialized type name
COMPONENT_KINDS = {
    cls.kind: cls
    for cls in (
        IntensityModulator, PhaseModulator, PulseShaper, MzmSwitch, Coupler2x2,
        FiberDelay, DwdmSplit, DwdmCombine, Cfbg, PhaseShifter, DelayInterferometer,
    )
}

#: components whose output interferes two arms and therefore sees phase drift
JITTER_SENSITIVE = (Coupler2x2, DelayInterferometer)


def apply_component(component: Component, state: FieldState, grid: PhysicalGrid,
                    phase_noise: float = 0.0) -> FieldState:
    """Apply one component to a field state."""
    return component.apply(state, grid, phase_noise=phase_noise)
