import numpy as np
import pytest

from tfqsim.channels import (
    DepolarizingModel,
    ProcessMatrix,
    apply_process,
    chi_depolarizing,
    chi_ideal,
    chi_x,
    depolarize,
    depolarize_x,
    lambda_from_visibility,
    process_fidelity,
    process_fidelity_from_lambda,
    process_fidelity_from_visibility,
)
from tfqsim.gates import generalized_x, weyl_operators
from tfqsim.states import DensityMatrix, QuditDims, density_from_pure, pure_state


def random_density(d, rng):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = a @ a.conj().T
    return DensityMatrix(d, rho / np.trace(rho))


def test_chi_identity_channel():
    rng = np.random.default_rng(0)
    rho = random_density(3, rng)
    out = apply_process(chi_ideal(0, 3), rho)
    assert np.max(np.abs(out.entries - rho.entries)) < 1e-12


def test_chi_x_slot_is_the_shift():
    rng = np.random.default_rng(1)
    rho = random_density(3, rng)
    out = apply_process(chi_x(3), rho)
    x = generalized_x(3).entries
    assert np.max(np.abs(out.entries - x @ rho.entries @ x.conj().T)) < 1e-12


def test_fully_depolarized_output():
    dims = QuditDims(1, 3)
    rho = density_from_pure(pure_state(np.ones(3), dims, normalize=True))
    out = apply_process(chi_depolarizing(0.0), rho)
    assert np.max(np.abs(out.entries - np.eye(3) / 3)) < 1e-12


def test_depolarize_endpoints():
    rng = np.random.default_rng(2)
    rho = random_density(3, rng)
    x = generalized_x(3)
    pure = depolarize(DepolarizingModel(1.0, x), rho)
    assert np.max(np.abs(pure.entries - x.entries @ rho.entries @ x.entries.conj().T)) < 1e-12
    mixed = depolarize(DepolarizingModel(0.0, x), rho)
    assert np.max(np.abs(mixed.entries - np.eye(3) / 3)) < 1e-12


def test_depolarize_projection_at_reported_visibility():
    # phi = 0 phase ramp is the uniform superposition, invariant under the shift;
    # projection onto it is lam + (1 - lam)/3
    dims = QuditDims(1, 3)
    uniform = pure_state(np.ones(3), dims, normalize=True)
    rho = density_from_pure(uniform)
    out = depolarize_x(0.9126, rho)
    proj = float(np.real(uniform.amplitudes.conj() @ out.entries @ uniform.amplitudes))
    assert proj == pytest.approx(0.9417333333333333, abs=1e-12)


def test_depolarize_rejects_bad_lambda():
    with pytest.raises(ValueError):
        DepolarizingModel(1.2, generalized_x(3))


def test_chi_depolarizing_endpoints():
    assert np.array_equal(chi_depolarizing(1.0).chi, chi_x().chi)
    assert np.allclose(chi_depolarizing(0.0).chi, np.eye(9) / 9)


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_dual_forms_agree(lam):
    """Weyl-basis channel action equals the direct convex-combination form."""
    rng = np.random.default_rng(int(lam * 100))
    for _ in range(5):
        rho = random_density(3, rng)
        via_chi = apply_process(chi_depolarizing(lam), rho)
        direct = depolarize_x(lam, rho)
        assert np.max(np.abs(via_chi.entries - direct.entries)) < 1e-10


@pytest.mark.parametrize("lam", [0.0, 0.25, 0.5, 0.75, 1.0])
def test_apply_process_preserves_trace_and_hermiticity(lam):
    rng = np.random.default_rng(7)
    rho = random_density(3, rng)
    out = apply_process(chi_depolarizing(lam), rho)
    assert abs(np.trace(out.entries) - 1) < 1e-10
    assert np.max(np.abs(out.entries - out.entries.conj().T)) < 1e-10


def test_twirling_identity():
    """Averaging over all nine Weyl conjugations fully mixes any state."""
    rng = np.random.default_rng(3)
    for _ in range(10):
        rho = random_density(3, rng)
        acc = sum(u.entries @ rho.entries @ u.entries.conj().T for u in weyl_operators(3))
        assert np.max(np.abs(acc / 3 - np.eye(3))) < 1e-10


def test_lambda_from_visibility_values():
    assert lambda_from_visibility(0.94) == pytest.approx(0.9126213592233009, abs=1e-13)
    assert lambda_from_visibility(1.0) == 1.0
    assert lambda_from_visibility(0.0) == 0.0
    with pytest.raises(ValueError):
        lambda_from_visibility(1.1)


def test_process_fidelity_from_visibility_values():
    assert process_fidelity_from_visibility(0.94) == pytest.approx(0.9223300970873786, abs=1e-13)
    assert process_fidelity_from_visibility(1.0) == 1.0
    assert process_fidelity_from_visibility(0.0) == pytest.approx(1 / 9)


def test_fp_consistent_with_lambda_chain():
    for v in (0.0, 0.3, 0.94, 1.0):
        lam = lambda_from_visibility(v)
        assert process_fidelity_from_visibility(v) == pytest.approx(
            process_fidelity_from_lambda(lam), abs=1e-12)


def test_process_fidelity_examples():
    assert process_fidelity(chi_x(), chi_x()) == pytest.approx(1.0)
    assert process_fidelity(chi_x(), ProcessMatrix(3, np.eye(9) / 9)) == pytest.approx(1 / 9)
    for lam in (0.0, 0.5, 1.0):
        assert process_fidelity(chi_x(), chi_depolarizing(lam)) == pytest.approx(
            (1 + 8 * lam) / 9, abs=1e-12)


def test_process_matrix_must_be_hermitian():
    bad = np.zeros((9, 9), dtype=complex)
    bad[0, 1] = 1.0
    with pytest.raises(ValueError):
        ProcessMatrix(3, bad)


def test_apply_process_dimension_mismatch():
    rho = DensityMatrix(2, np.eye(2) / 2)
    with pytest.raises(ValueError):
        apply_process(chi_x(3), rho)
