import math
import warnings

import numpy as np
import pytest

from decoheat import (
    EntropyLedger,
    HeatDensity,
    LatticeSpec,
    NumericsError,
    RangeError,
    ResolutionError,
    ValidationError,
    build_spectral_cache,
    characteristic_evaluator,
    conditional_work_distribution,
    decoherence_function,
    entropy_ledger,
    first_two_moments,
    fluctuation_residual,
    heat_moment,
    invert_to_density,
    lattice_dephasing_model,
    long_time_mean_heat,
    mixture_heat_distribution,
)
from decoheat.heat import first_moment_trace

SPEC6 = LatticeSpec(sites=6, coupling=1.0, temperature=0.1)
TF = 2.0


@pytest.fixture(scope="module")
def cache6():
    return build_spectral_cache(SPEC6)


@pytest.fixture(scope="module")
def model6():
    return lattice_dephasing_model(SPEC6)


@pytest.fixture(scope="module")
def branch_theta(cache6):
    return characteristic_evaluator(cache6, TF, populations=(0.0, 1.0))


# -- moments ----------------------------------------------------------------

def test_constant_theta_has_zero_moments():
    for k in (1, 2, 3, 4):
        assert heat_moment(lambda u: 1.0, k) == 0.0


def test_zero_duration_heat_is_zero(cache6):
    theta = characteristic_evaluator(cache6, 0.0)
    assert abs(heat_moment(theta, 1)) < 1e-9
    # second differences amplify the determinant's ~1e-14 noise by 1/h^2,
    # so "zero" is only clean to the corresponding floor
    assert abs(heat_moment(theta, 2)) < 1e-4


def test_first_moment_matches_oracle(branch_theta, model6):
    exact = conditional_work_distribution(model6, 1, TF).mean()
    assert abs(heat_moment(branch_theta, 1) - exact) < 1e-6


def test_second_moment_matches_oracle(branch_theta, model6):
    exact = conditional_work_distribution(model6, 1, TF).moment(2)
    assert abs(heat_moment(branch_theta, 2) - exact) < 1e-4


def test_first_moment_trace_cross_check(cache6, branch_theta):
    trace = first_moment_trace(cache6, TF, populations=(0.0, 1.0))
    assert abs(heat_moment(branch_theta, 1) - trace) < 1e-8


def test_mixture_moment_halves_branch(cache6, branch_theta):
    mixed = characteristic_evaluator(cache6, TF)
    assert abs(heat_moment(mixed, 1) - 0.5 * heat_moment(branch_theta, 1)) < 1e-10


def test_first_two_moments_match_separate_calls(branch_theta):
    mean, var = first_two_moments(branch_theta)
    assert mean == heat_moment(branch_theta, 1)
    assert var == heat_moment(branch_theta, 2) - mean ** 2


def test_moment_argument_validation(branch_theta):
    with pytest.raises(ValidationError):
        heat_moment(branch_theta, 0)
    with pytest.raises(ValidationError):
        heat_moment(branch_theta, 5)
    with pytest.raises(ValidationError):
        heat_moment(branch_theta, 1, delta_u=0.0)
    with pytest.raises(ValidationError):
        heat_moment(3.0, 1)
    with pytest.raises(ValidationError):
        first_two_moments(branch_theta, delta_u=-1.0)


def test_nan_evaluator_refused():
    with pytest.raises(NumericsError):
        heat_moment(lambda u: float("nan"), 1)


# -- fluctuation relation -----------------------------------------------------

def test_fluctuation_residual_small(branch_theta):
    beta = 1.0 / SPEC6.temperature
    assert fluctuation_residual(branch_theta, beta) < 1e-10


def test_fluctuation_residual_uncoupled():
    cache = build_spectral_cache(LatticeSpec(sites=6, coupling=0.0, temperature=0.1))
    theta = characteristic_evaluator(cache, 3.0, populations=(0.0, 1.0))
    assert fluctuation_residual(theta, 10.0) < 1e-10


def test_fluctuation_residual_beta_checked(branch_theta):
    for beta in (0.0, -1.0, np.inf):
        with pytest.raises(ValidationError):
            fluctuation_residual(branch_theta, beta)


# -- density inversion ---------------------------------------------------------

def test_uncoupled_density_is_pure_atom():
    density = invert_to_density(lambda u: 1.0 + 0j, q_max=5.0, sigma=0.1)
    assert density.zero_atom_weight == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(density.density)) < 1e-9


def test_density_matches_convolved_atoms(branch_theta, model6):
    # exact expectation: each heat atom smeared by the Gaussian kernel,
    # elastic atom excluded, all scaled by the coupled-branch population
    sigma = 0.05
    density = invert_to_density(branch_theta, q_max=12.0, sigma=sigma)
    atoms = conditional_work_distribution(model6, 1, TF)
    q = density.q_grid
    expected = np.zeros_like(q)
    for v, w in zip(atoms.values, atoms.weights):
        if abs(v) > 1e-9:
            expected += w * np.exp(-0.5 * ((q - v) / sigma) ** 2)
    expected *= 0.5 / (sigma * np.sqrt(2.0 * np.pi))
    assert np.max(np.abs(density.density - expected)) < 1e-6


def test_zero_atom_matches_oracle(branch_theta, model6):
    density = invert_to_density(branch_theta, q_max=12.0, sigma=0.05)
    mix = mixture_heat_distribution(model6, TF)
    assert abs(density.zero_atom_weight - mix.weight_at(0.0, tol=1e-9)) < 1e-9


def test_density_moments_match_atoms(branch_theta, model6):
    density = invert_to_density(branch_theta, q_max=12.0, sigma=0.05)
    mix = mixture_heat_distribution(model6, TF)
    assert abs(density.mean() - mix.mean()) < 1e-6
    var_exact = mix.moment(2) - mix.mean() ** 2
    assert abs(density.variance() - var_exact) < 1e-6


def test_density_thread_invariance(branch_theta):
    one = invert_to_density(branch_theta, 12.0, 0.05, threads=1)
    four = invert_to_density(branch_theta, 12.0, 0.05, threads=4)
    assert np.array_equal(one.density, four.density)
    assert one.zero_atom_weight == four.zero_atom_weight


def test_inversion_argument_validation(branch_theta):
    with pytest.raises(ValidationError):
        invert_to_density(branch_theta, -1.0, 0.05)
    with pytest.raises(ValidationError):
        invert_to_density(branch_theta, 12.0, 0.0)
    with pytest.raises(ValidationError):
        invert_to_density(branch_theta, 12.0, 0.05, p0=1.5)


def test_too_few_counting_samples(branch_theta):
    with pytest.raises(ResolutionError):
        invert_to_density(branch_theta, 1.0, 3.0)


def test_unnormalized_theta_flagged():
    # theta(0) != 1 carries less than unit mass; the probability audit at
    # the end of the inversion must refuse it (sampling artifacts such as
    # out-of-grid atoms only alias, they conserve the total)
    with pytest.raises(ResolutionError):
        invert_to_density(lambda u: 0.5 * np.exp(1j * u), q_max=5.0, sigma=0.1)


def test_heat_density_invariants():
    q = np.linspace(-1.0, 1.0, 401)
    gauss = np.exp(-0.5 * (q / 0.1) ** 2)
    gauss *= 0.5 / np.trapezoid(gauss, q)
    d = HeatDensity(q_grid=q, density=gauss, zero_atom_weight=0.5, sigma=0.1)
    assert d.moment(0) == pytest.approx(1.0, abs=1e-12)
    assert abs(d.mean()) < 1e-15
    # continuum is exactly the kernel, so corrected variance collapses
    assert abs(d.variance()) < 1e-6
    assert d.variance(kernel_corrected=False) == pytest.approx(0.5 * 0.1 ** 2, rel=1e-3)

    with pytest.raises(ValidationError):
        HeatDensity(q_grid=q[::-1], density=gauss, zero_atom_weight=0.5, sigma=0.1)
    with pytest.raises(ValidationError):
        HeatDensity(q_grid=q, density=gauss, zero_atom_weight=1.2, sigma=0.1)
    with pytest.raises(ValidationError):
        HeatDensity(q_grid=q, density=gauss, zero_atom_weight=0.5, sigma=0.0)
    with pytest.raises(NumericsError):
        HeatDensity(q_grid=q, density=gauss - 0.01, zero_atom_weight=0.5, sigma=0.1)
    with pytest.raises(NumericsError):
        HeatDensity(q_grid=q, density=2 * gauss, zero_atom_weight=0.5, sigma=0.1)


# -- entropy ledger --------------------------------------------------------------

def test_ledger_trivial_for_unit_nu():
    ledger = entropy_ledger(1.0, 0.0, 10.0, np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert ledger.delta_s == pytest.approx(0.0, abs=1e-12)
    assert ledger.heat_flux == 0.0
    assert ledger.sigma == ledger.delta_s + ledger.heat_flux


def test_ledger_full_dephasing_of_plus_state():
    ledger = entropy_ledger(0.0, 0.3, 2.0, np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert ledger.delta_s == pytest.approx(math.log(2.0), abs=1e-12)
    assert ledger.heat_flux == pytest.approx(0.6)
    assert ledger.sigma == pytest.approx(math.log(2.0) + 0.6)


def test_ledger_mixed_initial_state():
    rho0 = np.array([[0.75, 0.25], [0.25, 0.25]])
    # closed form: initial eigenvalues (1 +- sqrt(1/2)) / 2, final (3/4, 1/4)
    lo = (1.0 - math.sqrt(0.5)) / 2.0
    hi = (1.0 + math.sqrt(0.5)) / 2.0
    s0 = -(lo * math.log(lo) + hi * math.log(hi))
    s1 = -(0.75 * math.log(0.75) + 0.25 * math.log(0.25))
    ledger = entropy_ledger(0.0, 0.0, 1.0, rho0)
    assert ledger.delta_s == pytest.approx(s1 - s0, abs=1e-12)


def test_ledger_pure_phase_keeps_entropy():
    ledger = entropy_ledger(np.exp(0.7j), 0.1, 1.0, np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert abs(ledger.delta_s) < 1e-12


def test_ledger_rejects_unphysical_nu():
    rho = np.array([[0.5, 0.5], [0.5, 0.5]])
    with pytest.raises(RangeError):
        entropy_ledger(1.5, 0.0, 1.0, rho)
    with pytest.raises(ValidationError):
        entropy_ledger(0.5, 0.0, 1.0, np.eye(3) / 3)


def test_ledger_invariants_enforced():
    with pytest.raises(NumericsError):
        EntropyLedger(delta_s=-1.0, heat_flux=0.0, sigma=-1.0)
    with pytest.raises(NumericsError):
        EntropyLedger(delta_s=0.0, heat_flux=-1.0, sigma=-1.0)
    with pytest.raises(ValidationError):
        EntropyLedger(delta_s=0.5, heat_flux=0.5, sigma=0.7)


def test_ledger_from_lattice_pipeline(cache6):
    t = 5.0
    nu = decoherence_function(cache6, t).value
    theta = characteristic_evaluator(cache6, t)
    mean_q = heat_moment(theta, 1)
    ledger = entropy_ledger(nu, mean_q, 1.0 / SPEC6.temperature,
                            np.array([[0.5, 0.5], [0.5, 0.5]]))
    assert ledger.sigma >= 0.0
    assert ledger.delta_s <= math.log(2.0) + 1e-12


# -- long-time average -------------------------------------------------------------

def test_long_time_mean_from_spec_or_cache(cache6):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        a = long_time_mean_heat(SPEC6, window=(20.0, 40.0), samples=5)
        b = long_time_mean_heat(cache6, window=(20.0, 40.0), samples=5)
    assert a.value == pytest.approx(b.value, abs=1e-12)
    assert a.spread == pytest.approx(b.spread, abs=1e-12)


def test_long_time_uncoupled_is_zero():
    spec = LatticeSpec(sites=6, coupling=0.0, temperature=0.1)
    with warnings.catch_warnings():
        # mean and spread are both at the noise floor, so the 20% spread
        # flag has nothing meaningful to compare against
        warnings.simplefilter("ignore")
        got = long_time_mean_heat(spec, window=(20.0, 40.0), samples=5)
    assert abs(got.value) < 1e-9


def test_long_time_unsaturated_window_warns():
    with pytest.warns(UserWarning):
        got = long_time_mean_heat(SPEC6, window=(5.0, 10.0), samples=5)
    assert not got.saturated


def test_long_time_regression_medium_ring():
    spec = LatticeSpec(sites=80, coupling=1.0, temperature=0.1)
    got = long_time_mean_heat(spec, window=(50.0, 80.0), samples=6)
    assert got.saturated
    assert got.value == pytest.approx(0.1440787, abs=1e-5)


def test_long_time_window_validation():
    with pytest.raises(ValidationError):
        long_time_mean_heat(SPEC6, window=(10.0, 5.0))
    with pytest.raises(ValidationError):
        long_time_mean_heat(SPEC6, window=(0.0, 5.0))
    with pytest.raises(ValidationError):
        long_time_mean_heat(SPEC6, window=(5.0, 10.0), samples=1)
