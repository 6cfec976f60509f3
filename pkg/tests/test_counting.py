import numpy as np
import pytest

from tfqsim.channels import lambda_from_visibility
from tfqsim.counting import (
    CountTable,
    bme_probability,
    computational_fidelity,
    count_table_to_csv,
    fringe_expected,
    sample_counts,
    subtract_accidentals,
    visibility,
)

LAM_94 = 0.912621359223301  # mixing weight at visibility 0.94


def test_sample_counts_delta_distribution():
    rng = np.random.default_rng(0)
    probs = np.zeros(9)
    probs[0] = 1.0
    row = sample_counts(probs, 100, 0.0, rng)
    assert row[0] == 100 and row.sum() == 100


def test_sample_counts_uniform_moments():
    rng = np.random.default_rng(1)
    row = sample_counts(np.full(9, 1 / 9), 9000, 0.0, rng)
    sigma = np.sqrt(9000 * (1 / 9) * (8 / 9))
    assert np.all(np.abs(row - 1000) < 5 * sigma)
    assert row.sum() == 9000


def test_sample_counts_background_only():
    rng = np.random.default_rng(2)
    rows = np.array([sample_counts(np.full(9, 1 / 9), 0, 200.0, rng) for _ in range(50)])
    # every count is a Poisson(200) draw: check mean and variance coarsely
    assert abs(rows.mean() - 200.0) < 5 * np.sqrt(200 / rows.size)
    assert 150 < rows.var() < 260


def test_sample_counts_validates_distribution():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_counts(np.array([0.5, 0.6]), 10, 0.0, rng)
    with pytest.raises(ValueError):
        sample_counts(np.array([0.5, 0.5]), -1, 0.0, rng)


def test_sample_counts_reproducible():
    probs = np.full(9, 1 / 9)
    a = sample_counts(probs, 500, 10.0, np.random.default_rng(42))
    b = sample_counts(probs, 500, 10.0, np.random.default_rng(42))
    assert np.array_equal(a, b)


def test_subtract_accidentals_plain():
    corrected, floored = subtract_accidentals(np.array([100.0]), 20.0)
    assert corrected[0] == 80.0 and not floored


def test_subtract_accidentals_floors_at_zero():
    corrected, floored = subtract_accidentals(np.array([10.0, 50.0]), 20.0)
    assert corrected[0] == 0.0 and corrected[1] == 30.0 and floored


def test_subtract_accidentals_car_convention():
    # with a coincidence-to-accidental ratio of 3.7, accidentals are
    # raw_total / (1 + 3.7)
    raw_total = 200 * (1 + 1 / 3.7)
    estimate = raw_total / (1 + 3.7)
    assert estimate == pytest.approx(200 / 3.7)


@pytest.mark.parametrize("c_u,c_tot,n,mean,std", [
    (0, 0, 9, 1 / 9, 0.09938079899999065),
    (100, 100, 9, 0.926605504587156, 0.024864678023972086),
    (300, 300, 9, 0.9741100323624595, 0.009019633998237037),
])
def test_bme_frozen_values(c_u, c_tot, n, mean, std):
    post = bme_probability(c_u, c_tot, n)
    assert post.mean == pytest.approx(mean, abs=1e-12)
    assert post.std == pytest.approx(std, abs=1e-12)


def test_bme_stays_inside_unit_interval():
    for c_tot in (0, 1, 10, 1000):
        for c_u in (0, c_tot // 2, c_tot):
            post = bme_probability(c_u, c_tot, 9)
            assert 0.0 < post.mean < 1.0


def test_bme_monotone_in_counts():
    means = [bme_probability(c_u, 100, 9).mean for c_u in range(0, 101, 10)]
    assert all(a < b for a, b in zip(means, means[1:]))


def test_bme_converges_to_frequency():
    for ratio in (0.2, 0.7):
        c_tot = 10**7
        post = bme_probability(int(ratio * c_tot), c_tot, 9)
        assert post.mean == pytest.approx(ratio, abs=1e-5)
        assert post.std < 1e-3


def test_bme_validates_inputs():
    with pytest.raises(ValueError):
        bme_probability(5, 4, 9)
    with pytest.raises(ValueError):
        bme_probability(0, 0, 1)


@pytest.mark.parametrize("t", [0, 100, 1000, 10**6])
def test_fidelity_ceiling_exact(t):
    """A perfect permutation gate with T counts per input scores (1+T)/(N+T)."""
    n = 9
    counts = np.zeros((n, n), dtype=int)
    perm = np.roll(np.arange(n), 1)
    for i in range(n):
        counts[i, perm[i]] = t
    post = computational_fidelity(CountTable(n_outcomes=n, counts=counts), perm)
    assert post.mean == pytest.approx((1 + t) / (n + t), abs=1e-14)


def test_fidelity_of_uniform_counts():
    n = 9
    counts = np.full((n, n), 100, dtype=int)
    post = computational_fidelity(CountTable(n_outcomes=n, counts=counts), np.arange(n))
    assert post.mean == pytest.approx(101 / 909, abs=1e-12)


def test_fidelity_error_adds_in_quadrature():
    n = 9
    counts = np.zeros((n, n), dtype=int)
    perm = np.arange(n)
    for i in range(n):
        counts[i, i] = 200
    post = computational_fidelity(CountTable(n_outcomes=n, counts=counts), perm)
    single = bme_probability(200, 200, n)
    assert post.std == pytest.approx(np.sqrt(n * single.std**2) / n, abs=1e-14)


def test_fidelity_requires_full_map():
    table = CountTable(n_outcomes=3, counts=np.eye(3, dtype=int) * 10)
    with pytest.raises(ValueError):
        computational_fidelity(table, np.array([0, 1]))


def test_fringe_expected_values():
    assert fringe_expected(0.0, 1.0) == pytest.approx(1.0)
    assert fringe_expected(2 * np.pi / 3, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert fringe_expected(0.0, LAM_94) == pytest.approx(0.9417475728155339, abs=1e-12)
    assert fringe_expected(2 * np.pi / 3, LAM_94) == pytest.approx(0.029126213592233, abs=1e-12)


def test_fringe_visibility_closed_form():
    """Analytic visibility is 3*lam/(lam + 2); inverting recovers lam exactly."""
    for lam in (0.1, 0.5, LAM_94, 1.0):
        peak = fringe_expected(0.0, lam)
        trough = fringe_expected(2 * np.pi / 3, lam)
        v = (peak - trough) / (peak + trough)
        assert v == pytest.approx(3 * lam / (lam + 2), abs=1e-12)
        assert lambda_from_visibility(v) == pytest.approx(lam, abs=1e-12)


def test_visibility_extremes():
    v = visibility([(0.0, 1000.0), (np.pi, 0.0)])
    assert v.mean == 1.0
    v = visibility([(0.0, 1000.0), (np.pi, 1000.0)])
    assert v.mean == 0.0


def test_visibility_averages_repeats():
    samples = [(0.0, 900.0), (0.0, 1100.0), (np.pi, 90.0), (np.pi, 110.0)]
    v = visibility(samples)
    assert v.mean == pytest.approx((1000 - 100) / (1000 + 100))
    assert v.std > 0


def test_visibility_needs_signal():
    with pytest.raises(ValueError):
        visibility([(0.0, 0.0), (np.pi, 0.0)])
    with pytest.raises(ValueError):
        visibility([(0.0, 10.0)])


def test_visibility_round_trip_from_sampled_fringe():
    """Simulated fringe counts under the white-noise model invert to lam."""
    lam = 0.8
    rng = np.random.default_rng(9)
    scale = 200000
    samples = []
    for k in range(12):
        phi = 2 * np.pi * k / 12
        for _ in range(5):
            samples.append((phi, float(rng.poisson(scale * fringe_expected(phi, lam)))))
    v = visibility(samples)
    lam_hat = lambda_from_visibility(v.mean)
    # 3 sigma of the propagated Poisson error, through d(lam)/dV = 6/(3-V)^2
    dlam = 6.0 / (3.0 - v.mean) ** 2 * v.std
    assert abs(lam_hat - lam) < 3 * max(dlam, 1e-4)


def test_count_table_corrected_and_csv(tmp_path):
    counts = np.array([[50, 10, 3], [5, 60, 2]])
    table = CountTable(n_outcomes=3, counts=counts,
                       accidental_estimate=np.array([9.0, 30.0]))
    corrected, floored = table.corrected()
    assert corrected[0, 0] == pytest.approx(47.0)
    assert corrected[1, 2] == 0.0 and floored
    path = tmp_path / "counts.csv"
    count_table_to_csv(table, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "input,outcome,raw_counts,accidental,corrected"
    assert len(lines) == 1 + 6
    assert lines[1].startswith("0,0,50,3.0,47.0")
