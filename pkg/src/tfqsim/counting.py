"""Photon-counting simulation and Bayesian estimation of gate fidelities.

Counts for each input state follow a multinomial distribution over the
outcome bins, with optional Poisson background per outcome. Outcome
probabilities are estimated with a uniform-prior Bayesian mean, whose
closed form is

    p = (1 + C_u) / (N + C_tot)

with the matching posterior standard deviation; low total counts therefore
bound the estimate away from 1 even for a perfect gate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Posterior:
    """Posterior mean and standard deviation of an estimated probability."""

    mean: float
    std: float

    def as_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std}


@dataclass
class CountTable:
    """Raw outcome counts per input state, with accidental metadata.

    counts[i, u] is the number of events recorded in outcome u for input i.
    accidental_estimate[i] is the estimated total accidental count for input
    i, assumed uniform over outcomes when subtracted.
    """

    n_outcomes: int
    counts: np.ndarray
    accidental_estimate: np.ndarray = field(default=None)
    shots_requested: int = 0
    background_rate: float = 0.0

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 2 or self.counts.shape[1] != self.n_outcomes:
            raise ValueError(
                f"counts must be (n_inputs, {self.n_outcomes}), got {self.counts.shape}"
            )
        if np.any(self.counts < 0):
            raise ValueError("counts must be non-negative")
        if self.accidental_estimate is None:
            self.accidental_estimate = np.zeros(self.counts.shape[0])
        self.accidental_estimate = np.asarray(self.accidental_estimate, dtype=float)
        if np.any(self.accidental_estimate < 0):
            raise ValueError("accidental estimates must be non-negative")

    @property
    def n_inputs(self) -> int:
        return self.counts.shape[0]

    def totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def corrected(self) -> tuple[np.ndarray, bool]:
        """Accidental-subtracted real-valued counts and a flooring flag."""
        per_outcome = self.accidental_estimate[:, None] / self.n_outcomes
        corrected = self.counts - per_outcome
        floored = bool(np.any(corrected < 0))
        return np.maximum(corrected, 0.0), floored


def sample_counts(probs, shots: int, background_rate: float, rng) -> np.ndarray:
    """One row of counts: multinomial(shots, probs) plus Poisson background.

    Deterministic given the random stream. probs must be a distribution.
    """
    probs = np.asarray(probs, dtype=float)
    if shots < 0:
        raise ValueError(f"shots must be >= 0, got {shots}")
    if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError(f"probabilities must be a distribution, got sum {probs.sum()!r}")
    row = np.zeros(probs.size, dtype=np.int64)
    if shots:
        row += rng.multinomial(shots, probs / probs.sum())
    if background_rate > 0:
        row += rng.poisson(background_rate, size=probs.size)
    return row


def subtract_accidentals(row, accidental_estimate) -> tuple[np.ndarray, bool]:
    """Counts minus the accidental estimate, floored at zero.

    accidental_estimate may be a scalar (same for every outcome) or a vector.
    Returns the real-valued corrected row and whether flooring occurred.
    """
    row = np.asarray(row, dtype=float)
    acc = np.asarray(accidental_estimate, dtype=float)
    if np.any(acc < 0):
        raise ValueError("accidental estimate must be non-negative")
    corrected = row - acc
    floored = bool(np.any(corrected < 0))
    return np.maximum(corrected, 0.0), floored


def bme_probability(c_u: float, c_tot: float, n_outcomes: int) -> Posterior:
    """Uniform-prior Bayesian mean estimate of one outcome probability."""
    if n_outcomes < 2:
        raise ValueError(f"need at least 2 outcomes, got {n_outcomes}")
    if c_u < 0 or c_u > c_tot:
        raise ValueError(f"need 0 <= C_u <= C_tot, got C_u={c_u}, C_tot={c_tot}")
    denom = n_outcomes + c_tot
    mean = (1.0 + c_u) / denom
    var = (1.0 + c_u) / denom**2 * (denom - c_u - 1.0) / (denom + 1.0)
    return Posterior(mean=float(mean), std=float(np.sqrt(var)))


def computational_fidelity(table: CountTable, ideal_outcome_map) -> Posterior:
    """Mean ideal-outcome probability over all inputs, errors added in quadrature.

    Accidentals are subtracted (uniformly over outcomes) before estimation and
    the corrected counts are rounded to integers for the Bayesian estimate.
    """
    ideal = np.asarray(ideal_outcome_map, dtype=int)
    if ideal.shape != (table.n_inputs,):
        raise ValueError(
            f"ideal outcome map must have one entry per input ({table.n_inputs}), "
            f"got shape {ideal.shape}"
        )
    corrected, _ = table.corrected()
    rounded = np.rint(corrected).astype(np.int64)
    means = np.empty(table.n_inputs)
    variances = np.empty(table.n_inputs)
    for i in range(table.n_inputs):
        post = bme_probability(rounded[i, ideal[i]], rounded[i].sum(), table.n_outcomes)
        means[i] = post.mean
        variances[i] = post.std**2
    n = table.n_inputs
    return Posterior(mean=float(means.mean()), std=float(np.sqrt(variances.sum()) / n))


def fringe_expected(phi: float, lam: float) -> float:
    """Projection probability of the depolarized shifted phase-ramp state onto
    the uniform three-bin superposition: lam * |1 + e^{i phi} + e^{2 i phi}|^2 / 9
    plus the white-noise floor (1 - lam) / 3."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError(f"mixing weight must be in [0, 1], got {lam}")
    coherent = abs(1.0 + np.exp(1j * phi) + np.exp(2j * phi)) ** 2 / 9.0
    return float(lam * coherent + (1.0 - lam) / 3.0)


def _group_by_phase(samples) -> tuple[np.ndarray, list[np.ndarray]]:
    groups: dict[float, list[float]] = {}
    for phi, count in samples:
        groups.setdefault(float(phi), []).append(float(count))
    phis = np.array(sorted(groups))
    return phis, [np.asarray(groups[p]) for p in phis]


def visibility(samples) -> Posterior:
    """Fringe visibility (max - min) / (max + min) from the extremal phase points.

    samples is a list of (phi, corrected counts); repeats at the same phase are
    averaged. The error bar propagates Poisson noise of the two extremal
    per-phase means.
    """
    phis, groups = _group_by_phase(samples)
    if len(phis) < 2:
        raise ValueError("need samples at two or more phases to span a fringe")
    means = np.array([g.mean() for g in groups])
    i_max = int(np.argmax(means))
    i_min = int(np.argmin(means))
    hi, lo = means[i_max], means[i_min]
    if hi + lo <= 0:
        raise ValueError("fringe maximum + minimum is zero; no signal")
    v = (hi - lo) / (hi + lo)
    # Poisson: var of a per-phase mean of r repeats is mean / r
    var_hi = max(hi, 0.0) / groups[i_max].size
    var_lo = max(lo, 0.0) / groups[i_min].size
    dv_dhi = 2.0 * lo / (hi + lo) ** 2
    dv_dlo = -2.0 * hi / (hi + lo) ** 2
    std = np.sqrt(dv_dhi**2 * var_hi + dv_dlo**2 * var_lo)
    return Posterior(mean=float(v), std=float(std))


def visibility_repeat_scatter_std(samples) -> float:
    """Alternative error bar from the repeat-to-repeat scatter of the extremal points."""
    phis, groups = _group_by_phase(samples)
    means = np.array([g.mean() for g in groups])
    g_hi = groups[int(np.argmax(means))]
    g_lo = groups[int(np.argmin(means))]
    hi, lo = g_hi.mean(), g_lo.mean()
    if hi + lo <= 0:
        raise ValueError("fringe maximum + minimum is zero; no signal")
    sem_hi = g_hi.std(ddof=1) / np.sqrt(g_hi.size) if g_hi.size > 1 else 0.0
    sem_lo = g_lo.std(ddof=1) / np.sqrt(g_lo.size) if g_lo.size > 1 else 0.0
    dv_dhi = 2.0 * lo / (hi + lo) ** 2
    dv_dlo = -2.0 * hi / (hi + lo) ** 2
    return float(np.sqrt(dv_dhi**2 * sem_hi**2 + dv_dlo**2 * sem_lo**2))


def count_table_to_csv(table: CountTable, path) -> None:
    """Long-format CSV: input, outcome, raw counts, accidental share, corrected."""
    corrected, _ = table.corrected()
    per_outcome = table.accidental_estimate / table.n_outcomes
    with open(path, "w") as fh:
        fh.write("input,outcome,raw_counts,accidental,corrected\n")
        for i in range(table.n_inputs):
            for u in range(table.n_outcomes):
                fh.write(
                    f"{i},{u},{table.counts[i, u]},"
                    f"{float(per_outcome[i])!r},{float(corrected[i, u])!r}\n"
                )


def posterior_to_json(post: Posterior, path, **extra) -> None:
    payload = dict(post.as_dict(), **extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
