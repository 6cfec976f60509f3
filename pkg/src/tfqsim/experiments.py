"""Config-driven experiment runner.

Each experiment computes deterministic outcome distributions from the
component-level circuit, draws counts from them with the configured
background/accidental model, and estimates fidelities the same way the
hardware runs were analyzed. All randomness flows from the config seed
through per-input substreams, so identical configs give byte-identical
artifacts regardless of parallelism.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np
import yaml

from .channels import lambda_from_visibility, process_fidelity_from_visibility
from .circuits import (
    AllLightLostError,
    Circuit,
    build_analysis_cascade,
    build_cinc_circuit,
    build_sum_circuit,
    build_x_gate_circuit,
    CASCADE_OVERLAP_SLOT,
    computational_probabilities,
    load_circuit,
    prep_basis_field,
    prep_phase_ramp_field,
    run_circuit,
    transfer_matrix,
)
from .counting import (
    CountTable,
    Posterior,
    computational_fidelity,
    count_table_to_csv,
    fringe_expected,
    posterior_to_json,
    sample_counts,
    visibility,
    visibility_repeat_scatter_std,
)
from .photonics import FieldState, PhysicalGrid
from .states import QuditDims

OUTPUT_DIR_ENV = "TFQSIM_OUT"

EXPERIMENTS = ("xgate", "fringe", "cinc", "sum3", "sum16", "custom")

#: fidelity / visibility values reported for the hardware runs being modeled
REFERENCE_VALUES = {
    "xgate": {"computational_fidelity": (0.996, 0.001)},
    "cinc": {"computational_fidelity": (0.90, 0.01)},
    "sum3": {"computational_fidelity": (0.92, 0.01)},
    "sum16": {"computational_fidelity": (0.9589, 0.0005)},
    "fringe": {"visibility": (0.94, 0.01), "process_fidelity": (0.92, 0.01)},
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete, explicit description of one simulated run.

    Every stochastic element is controlled by the seed; there is no
    wall-clock seeding anywhere.
    """

    experiment: str
    seed: int
    # encoding grid
    d_f: int = 3
    d_t: int = 3
    bin_spacing_ns: float = 6.0
    bin_width_ns: float = 3.0
    freq_spacing_ghz: float = 380.0
    freq_linewidth_ghz: float = 0.25
    center_wavelength_nm: float = 1553.9
    dispersion_ns_per_nm: float = -2.0
    # counting model
    shots_per_input: int = 200
    background_rate: float = 0.0
    coincidence_to_accidental: float | None = None
    # noise knobs
    uniform_error: float = 0.0
    prep_time_extinction_db: float = np.inf
    prep_freq_extinction_db: float = np.inf
    mzm_extinction_db: float = np.inf
    dwdm_extinction_db: float = np.inf
    sigma_phase: float = 0.0
    # fringe protocol
    lambda_depol: float = 1.0
    fringe_phases: int = 12
    fringe_repeats: int = 5
    fringe_signal_scale: float = 2650.0
    # plumbing
    circuit_file: str | None = None
    n_jobs: int = 1
    out_dir: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; pick from {EXPERIMENTS}")
        if not isinstance(self.seed, int):
            raise ValueError("seed must be an explicit integer (no wall-clock seeding)")
        if self.shots_per_input < 0:
            raise ValueError(f"shots must be >= 0, got {self.shots_per_input}")
        if not (0.0 <= self.uniform_error <= 1.0):
            raise ValueError(f"uniform_error must be in [0, 1], got {self.uniform_error}")
        if self.experiment == "custom" and not self.circuit_file:
            raise ValueError("custom experiment requires circuit_file")

    @property
    def grid(self) -> PhysicalGrid:
        return PhysicalGrid(
            bin_spacing_ns=self.bin_spacing_ns,
            bin_width_ns=self.bin_width_ns,
            freq_spacing_ghz=self.freq_spacing_ghz,
            freq_linewidth_ghz=self.freq_linewidth_ghz,
            center_wavelength_nm=self.center_wavelength_nm,
        )

    @property
    def dims(self) -> QuditDims:
        return QuditDims(self.d_f, self.d_t)

    def ideal(self) -> "ExperimentConfig":
        """Copy with every noise knob zeroed."""
        return replace(
            self,
            background_rate=0.0,
            coincidence_to_accidental=None,
            uniform_error=0.0,
            prep_time_extinction_db=np.inf,
            prep_freq_extinction_db=np.inf,
            mzm_extinction_db=np.inf,
            dwdm_extinction_db=np.inf,
            sigma_phase=0.0,
            lambda_depol=1.0,
        )

    def to_dict(self) -> dict:
        data = asdict(self)
        for key, value in data.items():
            if isinstance(value, float) and np.isinf(value):
                data[key] = float("inf")
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)

    @classmethod
    def from_yaml(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            data = yaml.safe_load(fh)
        return cls.from_dict(data)

    def to_yaml(self, path) -> None:
        with open(path, "w") as fh:
            yaml.safe_dump(self.to_dict(), fh, sort_keys=True, default_flow_style=False)


def default_config(experiment: str, seed: int | None = None) -> ExperimentConfig:
    """Load the packaged default config for one of the built-in experiments."""
    from importlib import resources

    ref = resources.files("tfqsim.configs").joinpath(f"{experiment}.yaml")
    if not ref.is_file():
        raise ValueError(f"no packaged config for experiment {experiment!r}")
    with resources.as_file(ref) as path:
        config = ExperimentConfig.from_yaml(path)
    if seed is not None:
        config = replace(config, seed=seed)
    return config


def build_experiment_circuit(config: ExperimentConfig) -> Circuit:
    """Gate circuit for the configured experiment."""
    grid = config.grid
    if config.experiment in ("xgate", "fringe"):
        return build_x_gate_circuit(grid, QuditDims(config.d_f, config.d_t),
                                    mzm_extinction_db=config.mzm_extinction_db)
    if config.experiment == "cinc":
        return build_cinc_circuit(grid, config.dims,
                                  mzm_extinction_db=config.mzm_extinction_db,
                                  dwdm_extinction_db=config.dwdm_extinction_db)
    if config.experiment in ("sum3", "sum16"):
        return build_sum_circuit(grid, config.d_t,
                                 dispersion_ns_per_nm=config.dispersion_ns_per_nm,
                                 mzm_extinction_db=config.mzm_extinction_db)
    if config.experiment == "custom":
        return load_circuit(config.circuit_file)
    raise ValueError(f"no circuit for experiment {config.experiment!r}")


def ideal_outcome_map(config: ExperimentConfig, circuit: Circuit) -> np.ndarray:
    """Flat outcome index the perfect gate sends each basis input to."""
    dims = circuit.dims
    if config.experiment == "xgate":
        return np.array([dims.flat_index(m, (n + 1) % dims.d_t)
                         for m, n in map(dims.unflatten, range(dims.total))])
    if config.experiment == "cinc":
        control = dims.d_f - 1
        return np.array([
            dims.flat_index(m, (n + (1 if m == control else 0)) % dims.d_t)
            for m, n in map(dims.unflatten, range(dims.total))
        ])
    if config.experiment in ("sum3", "sum16"):
        return np.array([dims.flat_index(m, (n + m) % dims.d_t)
                         for m, n in map(dims.unflatten, range(dims.total))])
    # custom: read the permutation off the circuit's own noise-free action
    mat = transfer_matrix(circuit)
    ideal = mat.argmax(axis=0)
    if len(set(ideal.tolist())) != dims.total:
        raise ValueError("custom circuit's dominant action is not a permutation; "
                         "cannot define ideal outcomes")
    return ideal


def simulate_outcome_distributions(config: ExperimentConfig,
                                   circuit: Circuit | None = None) -> np.ndarray:
    """Deterministic outcome distributions, one row per basis input.

    Rows are normalized over the post-selected computational window, i.e.
    they are the conditional detection probabilities the counting model
    samples from. The white-noise floor (uniform_error) is already mixed in.
    """
    if circuit is None:
        circuit = build_experiment_circuit(config)
    dims = circuit.dims
    rows = np.zeros((dims.total, dims.total))
    for j in range(dims.total):
        m, n = dims.unflatten(j)
        state = prep_basis_field(
            dims, m, n, path=circuit.input_path,
            time_extinction_db=config.prep_time_extinction_db,
            freq_extinction_db=config.prep_freq_extinction_db,
        )
        out = run_circuit(circuit, state)
        probs = computational_probabilities(circuit, out)
        total = probs.sum()
        if total <= 0:
            raise AllLightLostError(f"no post-selected light for basis input {j}")
        rows[j] = probs / total
    if config.uniform_error > 0:
        rows = (1.0 - config.uniform_error) * rows + config.uniform_error / dims.total
    return rows


def measured_space(config: ExperimentConfig, dims: QuditDims) -> list[np.ndarray]:
    """Outcome indices recorded for each input.

    The 256-dimensional run records one 16-bin time block per input (the
    frequency qudit is assumed unchanged); the smaller gates record every
    computational mode.
    """
    if config.experiment == "sum16":
        return [np.arange(m * dims.d_t, (m + 1) * dims.d_t)
                for m, _ in map(dims.unflatten, range(dims.total))]
    return [np.arange(dims.total) for _ in range(dims.total)]


def input_rng(seed: int, input_index: int):
    """Independent substream for one input; keying by index keeps parallel
    evaluation deterministic."""
    return np.random.default_rng([seed, input_index])


def sample_count_table(config: ExperimentConfig, distributions: np.ndarray,
                       outcome_spaces: list[np.ndarray], seed: int | None = None,
                       n_jobs: int | None = None) -> CountTable:
    """Draw the configured counts for every input from its distribution."""
    seed = config.seed if seed is None else seed
    n_jobs = config.n_jobs if n_jobs is None else n_jobs
    n_inputs = distributions.shape[0]
    n_outcomes = len(outcome_spaces[0])
    car = config.coincidence_to_accidental

    def sample_one(j: int) -> tuple[np.ndarray, float]:
        rng = input_rng(seed, j)
        p = distributions[j, outcome_spaces[j]]
        p = p / p.sum()
        row = sample_counts(p, config.shots_per_input, 0.0, rng)
        if car is not None:
            row = row + rng.poisson(config.shots_per_input / car / n_outcomes,
                                    size=n_outcomes)
        if config.background_rate > 0:
            row = row + rng.poisson(config.background_rate, size=n_outcomes)
        accidental = row.sum() / (1.0 + car) if car is not None else 0.0
        return row, accidental

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(sample_one, range(n_inputs)))
    else:
        results = [sample_one(j) for j in range(n_inputs)]

    counts = np.array([r[0] for r in results])
    accidentals = np.array([r[1] for r in results])
    return CountTable(
        n_outcomes=n_outcomes,
        counts=counts,
        accidental_estimate=accidentals,
        shots_requested=config.shots_per_input,
        background_rate=config.background_rate,
    )


def estimate_fidelity(table: CountTable, ideal_map: np.ndarray,
                      outcome_spaces: list[np.ndarray]) -> Posterior:
    """Computational-basis fidelity of a sampled run."""
    local_ideal = np.array([
        int(np.where(outcome_spaces[j] == ideal_map[j])[0][0])
        for j in range(len(ideal_map))
    ])
    return computational_fidelity(table, local_ideal)


def run_matrix_experiment_once(config: ExperimentConfig, seed: int | None = None,
                               precomputed: tuple | None = None):
    """One seeded realization: (fidelity posterior, count table, measured matrix).

    precomputed may carry (circuit, distributions, ideal_map, outcome_spaces)
    so Monte Carlo sweeps do not re-trace the circuit per seed.
    """
    if precomputed is None:
        circuit = build_experiment_circuit(config)
        distributions = simulate_outcome_distributions(config, circuit)
        ideal_map = ideal_outcome_map(config, circuit)
        outcome_spaces = measured_space(config, circuit.dims)
    else:
        circuit, distributions, ideal_map, outcome_spaces = precomputed
    table = sample_count_table(config, distributions, outcome_spaces, seed=seed)
    fidelity = estimate_fidelity(table, ideal_map, outcome_spaces)
    corrected, _ = table.corrected()
    dims = circuit.dims
    measured = np.zeros((dims.total, dims.total))
    for j in range(dims.total):
        total = corrected[j].sum()
        if total > 0:
            measured[outcome_spaces[j], j] = corrected[j] / total
    return fidelity, table, measured


# ---------------------------------------------------------------------------
# fringe experiment
# ---------------------------------------------------------------------------

def fringe_phase_grid(n_phases: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_phases) / n_phases


#: drift draws averaged per phase point when sigma_phase > 0 (counting
#: windows integrate over many drift samples)
FRINGE_JITTER_DRAWS = 256


def simulate_fringe_probabilities(config: ExperimentConfig) -> tuple[np.ndarray, np.ndarray]:
    """Detection probability at the interferometer-overlap slot per swept phase.

    The gate output is mixed with white noise of weight (1 - lambda); the
    noise floor is the overlap-slot probability averaged over basis-state
    inputs, which is what a fully depolarized photon would produce. With
    sigma_phase > 0 each phase point is additionally averaged over Gaussian
    interferometer drift, drawn from substreams keyed by the phase index.
    """
    gate = build_x_gate_circuit(config.grid, QuditDims(config.d_f, config.d_t),
                                mzm_extinction_db=config.mzm_extinction_db)
    circuit = gate.extended(build_analysis_cascade(gate.post_select_path))
    dims = circuit.dims
    key_t = CASCADE_OVERLAP_SLOT + circuit.frame_offset_bins

    def overlap_probability_of(state: FieldState, rng=None) -> float:
        out = run_circuit(circuit, state, rng=rng, sigma_phase=config.sigma_phase
                          if rng is not None else 0.0)
        return sum(
            abs(a) ** 2 for k, a in out.amplitudes.items()
            if k.path == circuit.post_select_path and k.t == key_t and k.f == 0
        )

    def jitter_averaged(state: FieldState, stream_key: int) -> float:
        if config.sigma_phase <= 0:
            return overlap_probability_of(state)
        rng = np.random.default_rng([config.seed, stream_key])
        return float(np.mean([overlap_probability_of(state, rng=rng)
                              for _ in range(FRINGE_JITTER_DRAWS)]))

    floor = np.mean([
        overlap_probability_of(prep_basis_field(dims, 0, n, path=circuit.input_path))
        for n in range(dims.d_t)
    ])
    phis = fringe_phase_grid(config.fringe_phases)
    lam = config.lambda_depol
    probs = np.array([
        lam * jitter_averaged(prep_phase_ramp_field(dims, phi, path=circuit.input_path), k)
        + (1.0 - lam) * floor
        for k, phi in enumerate(phis)
    ])
    return phis, probs


def sample_fringe(config: ExperimentConfig, phis: np.ndarray, probs: np.ndarray,
                  seed: int | None = None) -> list[tuple[float, float, int, float]]:
    """Sampled fringe rows (phi, expected, raw counts, corrected counts).

    The detection rate is fringe_signal_scale counts per unit projection
    probability; the mean background is subtracted from each measurement.
    """
    seed = config.seed if seed is None else seed
    # scale so that a unit-visibility fringe peaks at fringe_signal_scale counts
    scale = config.fringe_signal_scale / max(probs.max(), 1e-300) * fringe_expected(
        0.0, config.lambda_depol)
    rows = []
    for k, (phi, p) in enumerate(zip(phis, probs)):
        for r in range(config.fringe_repeats):
            rng = np.random.default_rng([seed, k, r])
            raw = int(rng.poisson(scale * p) + (
                rng.poisson(config.background_rate) if config.background_rate > 0 else 0))
            corrected = raw - config.background_rate
            rows.append((float(phi), fringe_expected(phi, config.lambda_depol),
                         raw, float(corrected)))
    return rows


def fringe_visibility_once(config: ExperimentConfig, phis: np.ndarray, probs: np.ndarray,
                           seed: int | None = None) -> Posterior:
    rows = sample_fringe(config, phis, probs, seed=seed)
    return visibility([(phi, corrected) for phi, _, _, corrected in rows])


# ---------------------------------------------------------------------------
# artifact writing
# ---------------------------------------------------------------------------

def _write_float_matrix_csv(path, mat: np.ndarray) -> None:
    with open(path, "w") as fh:
        for row in np.asarray(mat, dtype=float):
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def resolve_out_dir(config: ExperimentConfig, override: str | None = None) -> Path:
    out = override or config.out_dir or os.environ.get(OUTPUT_DIR_ENV) or "tfqsim-out"
    path = Path(out) / config.experiment
    path.mkdir(parents=True, exist_ok=True)
    return path


def run_experiment(config: ExperimentConfig, out_dir: str | None = None) -> dict:
    """Run one experiment and write its artifact set; returns the summary."""
    out = resolve_out_dir(config, out_dir)
    config.to_yaml(out / "effective_config.yaml")
    summary: dict = {"experiment": config.experiment, "seed": config.seed,
                     "out_dir": str(out)}

    if config.experiment == "fringe":
        phis, probs = simulate_fringe_probabilities(config)
        rows = sample_fringe(config, phis, probs)
        with open(out / "fringe.csv", "w") as fh:
            fh.write("phi,expected,sampled,corrected\n")
            for phi, expected, raw, corrected in rows:
                fh.write(f"{phi!r},{expected!r},{raw},{corrected!r}\n")
        vis = visibility([(phi, corrected) for phi, _, _, corrected in rows])
        scatter = visibility_repeat_scatter_std(
            [(phi, corrected) for phi, _, _, corrected in rows])
        posterior_to_json(vis, out / "visibility.json", std_repeat_scatter=scatter)
        lam_hat = lambda_from_visibility(min(max(vis.mean, 0.0), 1.0))
        fp = process_fidelity_from_visibility(min(max(vis.mean, 0.0), 1.0))
        # d F_P / dV = 48 / (9 - 3V)^2
        fp_std = 48.0 / (9.0 - 3.0 * min(max(vis.mean, 0.0), 1.0)) ** 2 * vis.std
        with open(out / "process_fidelity.json", "w") as fh:
            json.dump({"mean": fp, "std": fp_std, "lambda": lam_hat,
                       "visibility": vis.mean}, fh, indent=2, sort_keys=True)
            fh.write("\n")
        summary.update(visibility=vis.as_dict(),
                       process_fidelity={"mean": fp, "std": fp_std})
        return summary

    circuit = build_experiment_circuit(config)
    distributions = simulate_outcome_distributions(config, circuit)
    ideal_map = ideal_outcome_map(config, circuit)
    spaces = measured_space(config, circuit.dims)
    fidelity, table, measured = run_matrix_experiment_once(
        config, precomputed=(circuit, distributions, ideal_map, spaces))

    _write_float_matrix_csv(out / "transfer_matrix.csv", measured)
    if config.experiment == "sum16":
        d = circuit.dims.d_t
        for m in range(circuit.dims.d_f):
            block = measured[m * d:(m + 1) * d, m * d:(m + 1) * d]
            _write_float_matrix_csv(out / f"transfer_matrix_f{m:02d}.csv", block)
    count_table_to_csv(table, out / "counts.csv")
    posterior_to_json(
        fidelity, out / "fidelity.json",
        accidental_subtracted=config.coincidence_to_accidental is not None,
    )
    summary.update(computational_fidelity=fidelity.as_dict())
    return summary


def report_summary(out_dirs) -> str:
    """Console table comparing run results with the reference values."""
    lines = []
    header = f"{'experiment':<10} {'seed':>6}  {'result':<28} {'reference':<16}"
    lines.append(header)
    lines.append("-" * len(header))
    for out in out_dirs:
        out = Path(out)
        cfg = ExperimentConfig.from_yaml(out / "effective_config.yaml")
        refs = REFERENCE_VALUES.get(cfg.experiment, {})
        if (out / "fidelity.json").exists():
            with open(out / "fidelity.json") as fh:
                fid = json.load(fh)
            ref = refs.get("computational_fidelity")
            ref_txt = f"{ref[0]} +- {ref[1]}" if ref else "n/a"
            lines.append(
                f"{cfg.experiment:<10} {cfg.seed:>6}  "
                f"F_C = {fid['mean']:.4f} +- {fid['std']:.4f}      {ref_txt:<16}"
            )
        if (out / "visibility.json").exists():
            with open(out / "visibility.json") as fh:
                vis = json.load(fh)
            with open(out / "process_fidelity.json") as fh:
                fp = json.load(fh)
            ref_v = refs.get("visibility")
            ref_fp = refs.get("process_fidelity")
            lines.append(
                f"{cfg.experiment:<10} {cfg.seed:>6}  "
                f"V = {vis['mean']:.4f} +- {vis['std']:.4f}        "
                f"{(f'{ref_v[0]} +- {ref_v[1]}' if ref_v else 'n/a'):<16}"
            )
            lines.append(
                f"{'':<10} {'':>6}  "
                f"F_P = {fp['mean']:.4f} +- {fp['std']:.4f}      "
                f"{(f'{ref_fp[0]} +- {ref_fp[1]}' if ref_fp else 'n/a'):<16}"
            )
    return "\n".join(lines)
